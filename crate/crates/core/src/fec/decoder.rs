//! Flooding normalized min-sum decoding.
//!
//! LLRs are `ln P(0)/P(1)`, so a negative posterior decides 1. A posterior of
//! exactly zero carries no decision and keeps the frame unconverged even if
//! the syndrome happens to vanish.

use super::ldpc::LdpcCode;
use crate::error::{Error, Result};

/// Default normalization of check-to-variable messages.
pub const MIN_SUM_SCALE: f32 = 0.75;
/// Default iteration cap.
pub const DEFAULT_MAX_ITERS: usize = 50;

/// Channel LLRs are clipped here to keep f32 arithmetic finite.
const LLR_CLIP: f32 = 1.0e4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub converged: bool,
    /// Iterations run; 0 when the channel hard decision is already a codeword.
    pub iterations: usize,
}

/// Per-thread decoder state over a shared code.
#[derive(Clone, Debug)]
pub struct MinSumDecoder<'a> {
    code: &'a LdpcCode,
    scale: f32,
    llr: Vec<f32>,
    c2v: Vec<f32>,
    v2c: Vec<f32>,
    post: Vec<f32>,
    hard: Vec<u8>,
}

impl<'a> MinSumDecoder<'a> {
    pub fn new(code: &'a LdpcCode) -> Self {
        Self::with_scale(code, MIN_SUM_SCALE)
    }

    pub fn with_scale(code: &'a LdpcCode, scale: f32) -> Self {
        MinSumDecoder {
            code,
            scale,
            llr: vec![0.0; code.n()],
            c2v: vec![0.0; code.edges()],
            v2c: vec![0.0; code.edges()],
            post: vec![0.0; code.n()],
            hard: vec![0; code.n()],
        }
    }

    /// Hard decision of the last decode.
    pub fn hard_decision(&self) -> &[u8] {
        &self.hard
    }

    /// Posterior LLRs of the last decode.
    pub fn posteriors(&self) -> &[f32] {
        &self.post
    }

    pub fn decode(&mut self, llr: &[f64], max_iters: usize) -> Result<DecodeOutcome> {
        let code = self.code;
        if llr.len() != code.n() {
            return Err(Error::LengthMismatch { expected: code.n(), got: llr.len() });
        }
        let mut confident = true;
        for (d, &s) in self.llr.iter_mut().zip(llr) {
            *d = if s.is_nan() { 0.0 } else { (s as f32).clamp(-LLR_CLIP, LLR_CLIP) };
            confident &= *d != 0.0;
        }
        self.c2v.fill(0.0);
        self.post.copy_from_slice(&self.llr);
        let max_iters = max_iters.max(1);
        let mut it = 0;
        loop {
            // the check pass also returns the syndrome of the current posteriors
            let satisfied = self.check_pass(it < max_iters);
            if satisfied && confident {
                break;
            }
            if it == max_iters {
                self.harden();
                return Ok(DecodeOutcome { converged: false, iterations: max_iters });
            }
            confident = self.variable_pass();
            it += 1;
        }
        self.harden();
        Ok(DecodeOutcome { converged: true, iterations: it })
    }

    /// Update every check-to-variable message (when `update`) and report
    /// whether the hard decision of `post` satisfies every check.
    fn check_pass(&mut self, update: bool) -> bool {
        let code = self.code;
        let post = &self.post;
        let mut satisfied = true;
        for c in 0..code.m() {
            let lo = code.check_ptr[c] as usize;
            let hi = code.check_ptr[c + 1] as usize;
            let vars = &code.check_vars[lo..hi];
            let c2v = &mut self.c2v[lo..hi];
            let v2c = &mut self.v2c[lo..hi];
            let mut min1 = f32::INFINITY;
            let mut min2 = f32::INFINITY;
            let mut arg = 0;
            let mut neg = false;
            let mut parity = false;
            for (i, ((&v, &old), out)) in vars.iter().zip(c2v.iter()).zip(v2c.iter_mut()).enumerate() {
                let p = post[v as usize];
                parity ^= p < 0.0;
                let m = p - old;
                *out = m;
                neg ^= m < 0.0;
                let a = m.abs();
                let lower = a < min1;
                min2 = if lower { min1 } else { min2.min(a) };
                arg = if lower { i } else { arg };
                min1 = min1.min(a);
            }
            satisfied &= !parity;
            if !update {
                continue;
            }
            // a degree-1 check has no other edges and sends nothing
            let m1 = if min1.is_finite() { self.scale * min1 } else { 0.0 };
            let m2 = if min2.is_finite() { self.scale * min2 } else { 0.0 };
            for (i, (out, &m)) in c2v.iter_mut().zip(v2c.iter()).enumerate() {
                let mag = if i == arg { m2 } else { m1 };
                // sign of the product over the other edges
                *out = if neg ^ (m < 0.0) { -mag } else { mag };
            }
        }
        satisfied
    }

    /// Posterior update; true when no posterior is exactly zero.
    fn variable_pass(&mut self) -> bool {
        let code = self.code;
        let mut confident = true;
        for v in 0..code.n() {
            let mut acc = self.llr[v];
            for &e in &code.var_edges[code.var_ptr[v] as usize..code.var_ptr[v + 1] as usize] {
                acc += self.c2v[e as usize];
            }
            self.post[v] = acc;
            confident &= acc != 0.0;
        }
        confident
    }

    fn harden(&mut self) {
        for (h, &p) in self.hard.iter_mut().zip(&self.post) {
            *h = (p < 0.0) as u8;
        }
    }
}

impl LdpcCode {
    /// Decode with a fresh decoder: (hard bits, converged, iterations).
    pub fn decode(&self, llr: &[f64], max_iters: usize) -> Result<(Vec<u8>, bool, usize)> {
        let mut dec = MinSumDecoder::new(self);
        let out = dec.decode(llr, max_iters)?;
        Ok((dec.hard, out.converged, out.iterations))
    }
}
