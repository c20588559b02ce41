//! VC-MLC: the q least reliable label bits of every lattice symbol form the
//! inner-coded stream, the k − q remaining bits are uncoded. One inner
//! codeword fills floor(n_code / q) symbols; codeword bits left over at the
//! frame edge are not transmitted and enter the decoder as erasures.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{bit_errors, ChainConfig, FrameCounters, Modulation, TxFrame};
use crate::error::{Error, Result};
use crate::fec::{load_code, Interleaver, LdpcCode, MinSumDecoder};
use crate::lattice::NestedLatticePair;
use crate::voronoi::{OffsetMode, VoronoiCode};

const INTERLEAVER_SALT: u64 = 0x7f4a_7c15_9e37_79b9;

fn code_cache() -> &'static Mutex<HashMap<String, VoronoiCode>> {
    static C: OnceLock<Mutex<HashMap<String, VoronoiCode>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Voronoi code of a pair with q = n, built once per process.
pub(crate) fn voronoi_code(pair: &str, offset: &OffsetMode) -> Result<VoronoiCode> {
    let key = format!("{pair}|{offset:?}");
    if let Some(c) = code_cache().lock().expect("code cache").get(&key) {
        return Ok(c.clone());
    }
    let p = NestedLatticePair::builtin(pair)?;
    let n = p.dim();
    let code = VoronoiCode::new(p, n, offset.clone())?;
    code_cache().lock().expect("code cache").insert(key, code.clone());
    Ok(code)
}

#[derive(Clone, Debug)]
pub struct VcMlcChain {
    config: ChainConfig,
    vc: VoronoiCode,
    code: LdpcCode,
    interleaver: Interleaver,
    symbols: usize,
}

impl VcMlcChain {
    pub fn new(config: &ChainConfig, seed: u64) -> Result<Self> {
        let (pair, offset) = match &config.modulation {
            Modulation::Voronoi { pair, offset } => (pair, offset),
            other => return Err(Error::Config(format!("vc-mlc needs a Voronoi modulation, got {other:?}"))),
        };
        let vc = voronoi_code(pair, offset)?;
        let code = load_code(config.rate, config.code_length)?;
        let symbols = code.n() / vc.q();
        if symbols == 0 {
            return Err(Error::Config(format!("code length {} is shorter than q = {}", code.n(), vc.q())));
        }
        let interleaver = if config.interleave {
            Interleaver::new(code.n(), seed ^ INTERLEAVER_SALT)
        } else {
            Interleaver::identity(code.n())
        };
        Ok(VcMlcChain { config: config.clone(), vc, code, interleaver, symbols })
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn voronoi(&self) -> &VoronoiCode {
        &self.vc
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    /// Lattice symbols per frame.
    pub fn symbols_per_frame(&self) -> usize {
        self.symbols
    }

    pub fn transmit(&self, rng: &mut ChaCha8Rng) -> Result<TxFrame> {
        let (q, dim, mrb) = (self.vc.q(), self.vc.dim(), self.vc.k() - self.vc.q());
        let info: Vec<u8> = (0..self.code.k()).map(|_| rng.random_range(0..2u8)).collect();
        let cw = self.code.encode(&info)?;
        let mut lrbs = vec![0u8; cw.len()];
        self.interleaver.interleave(&cw, &mut lrbs);
        let mut uncoded = vec![0u8; self.symbols * mrb];
        uncoded.iter_mut().for_each(|b| *b = rng.random_range(0..2u8));
        let mut symbols = vec![0.0; self.symbols * dim];
        for s in 0..self.symbols {
            let label = self.vc.join_label(&lrbs[s * q..(s + 1) * q], &uncoded[s * mrb..(s + 1) * mrb]);
            self.vc.encode_into(&label, &mut symbols[s * dim..(s + 1) * dim])?;
        }
        Ok(TxFrame { symbols, coded_info: info, uncoded, shaper_input: Vec::new() })
    }

    pub fn receive(&self, tx: &TxFrame, y: &[f64], sigma2: f64) -> Result<FrameCounters> {
        let (q, dim, mrb) = (self.vc.q(), self.vc.dim(), self.vc.k() - self.vc.q());
        if y.len() != self.symbols * dim {
            return Err(Error::LengthMismatch { expected: self.symbols * dim, got: y.len() });
        }
        let n = self.code.n();
        // untransmitted tail bits stay at LLR 0
        let mut llr_ch = vec![0.0; n];
        for s in 0..self.symbols {
            self.vc.lrb_llr_into(&y[s * dim..(s + 1) * dim], sigma2, &mut llr_ch[s * q..(s + 1) * q])?;
        }
        let mut llr = vec![0.0; n];
        self.interleaver.deinterleave(&llr_ch, &mut llr);
        let mut dec = MinSumDecoder::new(&self.code);
        let outcome = dec.decode(&llr, self.config.max_iters)?;
        let hard = dec.hard_decision();
        let mut c = FrameCounters::default();
        let info_hat = self.code.extract_info(hard);
        c.coded_bits = info_hat.len() as u64;
        c.coded_errors = bit_errors(&info_hat, &tx.coded_info);
        c.ldpc_failures = u64::from(!outcome.converged);

        let mut lrbs = vec![0u8; n];
        self.interleaver.interleave(hard, &mut lrbs);
        for s in 0..self.symbols {
            let est = self.vc.mrb_hard_decision(&y[s * dim..(s + 1) * dim], &lrbs[s * q..(s + 1) * q])?;
            c.uncoded_errors += bit_errors(&est, &tx.uncoded[s * mrb..(s + 1) * mrb]);
        }
        c.uncoded_bits = (self.symbols * mrb) as u64;
        c.finish();
        Ok(c)
    }

    /// Symbol error counts of one frame under genie-aided MSD: MRB
    /// decisions given the true LRBs, next to unconstrained nearest-point
    /// decisions on the same noise: (conditional, unconditional, symbols).
    pub fn msd_symbol_errors(&self, tx: &TxFrame, y: &[f64]) -> Result<(u64, u64, u64)> {
        let (q, dim, mrb) = (self.vc.q(), self.vc.dim(), self.vc.k() - self.vc.q());
        let cw = self.code.encode(&tx.coded_info)?;
        let mut lrbs = vec![0u8; cw.len()];
        self.interleaver.interleave(&cw, &mut lrbs);
        let (mut cond, mut uncond) = (0u64, 0u64);
        for s in 0..self.symbols {
            let ys = &y[s * dim..(s + 1) * dim];
            let lrb = &lrbs[s * q..(s + 1) * q];
            let truth = &tx.uncoded[s * mrb..(s + 1) * mrb];
            cond += u64::from(self.vc.mrb_hard_decision(ys, lrb)? != truth);
            uncond += u64::from(self.vc.decode(ys)? != self.vc.join_label(lrb, truth));
        }
        Ok((cond, uncond, self.symbols as u64))
    }
}
