//! PAM/QAM constellations and their soft and hard demappers.
//!
//! A shaped PAM point is `(1 − 2·sign_bit) · amplitude · norm`, so the
//! labeling is sign-bit decomposable and the alphabet factors as 𝒳 = 𝒜 × 𝒮.
//! Amplitudes are handled by index j (amplitude 2j + 1); the m − 1 amplitude
//! bits are the label of j, MSB first.
//!
//! The coded least reliable bit of a dimension is either the sign itself or
//! the set-partition bit c = sign_bit ⊕ (j mod 2), which is the parity of the
//! PAM index (x ≡ 1 mod 4 ⇔ c = 0). Given c the remaining points are spaced
//! 4 apart instead of 2, while c stays uniform and independent of the shaped
//! amplitude, so the sign distribution is untouched.

use crate::error::{Error, Result};
use crate::shaping::amplitude;

/// How amplitude indices map to (m − 1)-bit labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AmplitudeLabeling {
    /// label = j (00→1, 01→3, 10→5, 11→7).
    #[default]
    Natural,
    /// Binary reflected Gray code, label = j ⊕ (j >> 1).
    Reflected,
}

impl AmplitudeLabeling {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "natural" => Ok(AmplitudeLabeling::Natural),
            "reflected" | "gray" => Ok(AmplitudeLabeling::Reflected),
            other => Err(Error::Config(format!("unknown amplitude labeling `{other}`"))),
        }
    }

    pub fn label_of(self, j: usize) -> usize {
        match self {
            AmplitudeLabeling::Natural => j,
            AmplitudeLabeling::Reflected => j ^ (j >> 1),
        }
    }

    pub fn index_of(self, label: usize) -> usize {
        match self {
            AmplitudeLabeling::Natural => label,
            AmplitudeLabeling::Reflected => {
                let mut j = label;
                let mut shift = label >> 1;
                while shift != 0 {
                    j ^= shift;
                    shift >>= 1;
                }
                j
            }
        }
    }
}

/// Which bit of a PS dimension the inner code protects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LrbLabel {
    /// c = sign_bit ⊕ (j mod 2): first level of a set partition.
    #[default]
    SetPartition,
    /// c = sign_bit.
    Sign,
}

impl LrbLabel {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "set-partition" | "partition" => Ok(LrbLabel::SetPartition),
            "sign" => Ok(LrbLabel::Sign),
            other => Err(Error::Config(format!("unknown LRB label `{other}` (set-partition, sign)"))),
        }
    }

    /// Sign bit of amplitude index j carrying LRB `c`; also maps a sign back
    /// to its LRB (the map is an involution for fixed j).
    #[inline]
    pub fn sign_bit(self, c: u8, j: usize) -> u8 {
        match self {
            LrbLabel::SetPartition => (c ^ j as u8) & 1,
            LrbLabel::Sign => c & 1,
        }
    }
}

/// Sign-decomposable 2^m-PAM with a prior on the 2^(m−1) amplitudes.
#[derive(Clone, Debug)]
pub struct PamConstellation {
    m: usize,
    prior: Vec<f64>,
    log_prior: Vec<f64>,
    norm: f64,
    labeling: AmplitudeLabeling,
}

impl PamConstellation {
    /// `prior[j]` is P(amplitude 2j + 1); the norm gives E[x²] = 1/2.
    pub fn new(m: usize, prior: Vec<f64>) -> Result<Self> {
        if !(1..=16).contains(&m) {
            return Err(Error::Config(format!("PAM bits per symbol {m} outside 1..=16")));
        }
        let k = 1usize << (m - 1);
        if prior.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: prior.len() });
        }
        let sum: f64 = prior.iter().sum();
        if prior.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("amplitude prior must be a probability vector (sum {sum})")));
        }
        let second: f64 = prior.iter().enumerate().map(|(j, p)| p * f64::from(amplitude(j)).powi(2)).sum();
        let norm = (0.5 / second).sqrt();
        Ok(PamConstellation {
            m,
            log_prior: prior.iter().map(|p| p.ln()).collect(),
            prior,
            norm,
            labeling: AmplitudeLabeling::Natural,
        })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        let k = 1usize << m.clamp(1, 16).saturating_sub(1);
        Self::new(m, vec![1.0 / k as f64; k])
    }

    pub fn with_labeling(mut self, labeling: AmplitudeLabeling) -> Self {
        self.labeling = labeling;
        self
    }

    /// Override the scaling (the prior-derived norm is the default).
    pub fn with_norm(mut self, norm: f64) -> Self {
        self.norm = norm;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn amplitudes(&self) -> usize {
        self.prior.len()
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn labeling(&self) -> AmplitudeLabeling {
        self.labeling
    }

    /// E[x²] under the prior (1/2 unless the norm was overridden).
    pub fn energy(&self) -> f64 {
        self.prior.iter().enumerate().map(|(j, p)| p * (f64::from(amplitude(j)) * self.norm).powi(2)).sum()
    }

    /// Every point of the scaled alphabet, negative to positive.
    pub fn points(&self) -> Vec<f64> {
        let k = self.amplitudes();
        (0..k).rev().map(|j| -self.level(j)).chain((0..k).map(|j| self.level(j))).collect()
    }

    #[inline]
    fn level(&self, j: usize) -> f64 {
        f64::from(amplitude(j)) * self.norm
    }

    /// Point of an amplitude index and sign bit (0 = positive).
    #[inline]
    pub fn map_index(&self, sign_bit: u8, j: usize) -> f64 {
        let a = self.level(j);
        if sign_bit & 1 == 0 {
            a
        } else {
            -a
        }
    }

    pub fn map(&self, sign_bit: u8, amplitude_bits: &[u8]) -> Result<f64> {
        Ok(self.map_index(sign_bit, self.index_from_bits(amplitude_bits)?))
    }

    /// Amplitude index of an (m − 1)-bit label, MSB first.
    pub fn index_from_bits(&self, bits: &[u8]) -> Result<usize> {
        if bits.len() != self.m - 1 {
            return Err(Error::LengthMismatch { expected: self.m - 1, got: bits.len() });
        }
        let label = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        Ok(self.labeling.index_of(label))
    }

    /// Label bits of amplitude index j, MSB first.
    pub fn bits_of_index(&self, j: usize, out: &mut [u8]) {
        let label = self.labeling.label_of(j);
        let w = self.m - 1;
        for (i, o) in out.iter_mut().enumerate().take(w) {
            *o = ((label >> (w - 1 - i)) & 1) as u8;
        }
    }

    /// Exact sign LLR, positive favouring a positive sign (bit 0).
    pub fn sign_llr(&self, y: f64, sigma2: f64) -> f64 {
        let inv = 0.5 / sigma2;
        let mut plus = f64::NEG_INFINITY;
        let mut minus = f64::NEG_INFINITY;
        for (j, &lp) in self.log_prior.iter().enumerate() {
            if lp == f64::NEG_INFINITY {
                continue;
            }
            let a = self.level(j);
            plus = log_add(plus, lp - (y - a) * (y - a) * inv);
            minus = log_add(minus, lp - (y + a) * (y + a) * inv);
        }
        plus - minus
    }

    /// Nearest-amplitude decision given the sign; ties go to the lower level.
    pub fn amplitude_hd_index(&self, y: f64, sign_bit: u8) -> usize {
        let v = if sign_bit & 1 == 0 { y } else { -y } / self.norm;
        let t = ((v - 1.0) / 2.0 - 0.5).ceil();
        t.clamp(0.0, (self.amplitudes() - 1) as f64) as usize
    }

    /// MAP amplitude decision under the prior (not used in acceptance runs).
    pub fn amplitude_map_index(&self, y: f64, sign_bit: u8, sigma2: f64) -> usize {
        let v = if sign_bit & 1 == 0 { y } else { -y };
        let mut best = (f64::NEG_INFINITY, 0);
        for (j, &lp) in self.log_prior.iter().enumerate() {
            let d = v - self.level(j);
            let metric = lp - d * d / (2.0 * sigma2);
            if metric > best.0 {
                best = (metric, j);
            }
        }
        best.1
    }

    /// Exact LLR of the inner-coded bit under `lrb`, positive favouring 0.
    pub fn lrb_llr(&self, lrb: LrbLabel, y: f64, sigma2: f64) -> f64 {
        if lrb == LrbLabel::Sign {
            return self.sign_llr(y, sigma2);
        }
        let inv = 0.5 / sigma2;
        let mut zero = f64::NEG_INFINITY;
        let mut one = f64::NEG_INFINITY;
        for (j, &lp) in self.log_prior.iter().enumerate() {
            if lp == f64::NEG_INFINITY {
                continue;
            }
            let a = self.level(j);
            let plus = lp - (y - a) * (y - a) * inv;
            let minus = lp - (y + a) * (y + a) * inv;
            // +a has c = j mod 2, −a the complement
            if j % 2 == 0 {
                zero = log_add(zero, plus);
                one = log_add(one, minus);
            } else {
                one = log_add(one, plus);
                zero = log_add(zero, minus);
            }
        }
        zero - one
    }

    /// Amplitude index and sign of the decision given the decoded LRB `c`:
    /// nearest point of the subset (or MAP under the prior when `map`).
    /// Ties go to the lower amplitude.
    pub fn decide_given_lrb(&self, lrb: LrbLabel, y: f64, c: u8, map: bool, sigma2: f64) -> (usize, u8) {
        if lrb == LrbLabel::Sign {
            let j = if map { self.amplitude_map_index(y, c, sigma2) } else { self.amplitude_hd_index(y, c) };
            return (j, c & 1);
        }
        let mut best = (f64::NEG_INFINITY, 0usize, 0u8);
        for (j, &lp) in self.log_prior.iter().enumerate() {
            let s = lrb.sign_bit(c, j);
            let d = y - self.map_index(s, j);
            let metric = if map { lp - d * d / (2.0 * sigma2) } else { -d * d };
            if metric > best.0 {
                best = (metric, j, s);
            }
        }
        (best.1, best.2)
    }

    pub fn amplitude_hd(&self, y: f64, sign_bit: u8) -> Vec<u8> {
        let mut out = vec![0u8; self.m - 1];
        self.bits_of_index(self.amplitude_hd_index(y, sign_bit), &mut out);
        out
    }
}

#[inline]
pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Square Gray-labeled 2^(2m)-QAM with uniform prior and unit energy per
/// two dimensions. Each real dimension carries an m-bit Gray-labeled
/// 2^m-PAM; bits 0..m drive the in-phase part, m..2m the quadrature part.
#[derive(Clone, Debug)]
pub struct GrayQam {
    m: usize,
    norm: f64,
    /// Gray label of each PAM level, levels ordered from most negative.
    labels: Vec<usize>,
}

impl GrayQam {
    /// `m` bits per real dimension.
    pub fn new(m: usize) -> Result<Self> {
        if !(1..=12).contains(&m) {
            return Err(Error::Config(format!("Gray PAM bits per dimension {m} outside 1..=12")));
        }
        let levels = 1usize << m;
        let second = ((levels * levels - 1) as f64) / 3.0;
        Ok(GrayQam { m, norm: (0.5 / second).sqrt(), labels: (0..levels).map(|i| i ^ (i >> 1)).collect() })
    }

    /// Square QAM of the given order (4, 16, 64, 256, ...).
    pub fn square(order: usize) -> Result<Self> {
        let bits = order.trailing_zeros() as usize;
        if !order.is_power_of_two() || bits % 2 != 0 || bits == 0 {
            return Err(Error::Config(format!("{order}-QAM is not a square power-of-two QAM")));
        }
        Self::new(bits / 2)
    }

    pub fn bits_per_dim(&self) -> usize {
        self.m
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.m
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    #[inline]
    fn level(&self, i: usize) -> f64 {
        (2.0 * i as f64 - ((1usize << self.m) - 1) as f64) * self.norm
    }

    /// One real dimension from m bits (MSB first).
    pub fn map_dim(&self, bits: &[u8]) -> f64 {
        let label = bits.iter().take(self.m).fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        let i = self.labels.iter().position(|&g| g == label).expect("labels cover every m-bit word");
        self.level(i)
    }

    /// Complex symbol from 2m bits, as (in-phase, quadrature).
    pub fn map(&self, bits: &[u8]) -> Result<(f64, f64)> {
        if bits.len() != 2 * self.m {
            return Err(Error::LengthMismatch { expected: 2 * self.m, got: bits.len() });
        }
        Ok((self.map_dim(&bits[..self.m]), self.map_dim(&bits[self.m..])))
    }

    /// Exact per-bit LLRs of one real dimension (positive favours 0).
    pub fn llr_dim(&self, y: f64, sigma2: f64, out: &mut [f64]) {
        let inv = 0.5 / sigma2;
        let mut num = vec![f64::NEG_INFINITY; self.m];
        let mut den = vec![f64::NEG_INFINITY; self.m];
        for (i, &g) in self.labels.iter().enumerate() {
            let d = y - self.level(i);
            let metric = -d * d * inv;
            for b in 0..self.m {
                if (g >> (self.m - 1 - b)) & 1 == 0 {
                    num[b] = log_add(num[b], metric);
                } else {
                    den[b] = log_add(den[b], metric);
                }
            }
        }
        for b in 0..self.m {
            out[b] = num[b] - den[b];
        }
    }

    /// LLRs of all 2m bits of a received complex sample.
    pub fn llr(&self, y: (f64, f64), sigma2: f64) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.m];
        let (i, q) = out.split_at_mut(self.m);
        self.llr_dim(y.0, sigma2, i);
        self.llr_dim(y.1, sigma2, q);
        out
    }
}

/// Gray-labeled QAM LLRs for `m` bits per real dimension.
pub fn gray_qam_llr(m: usize, y: (f64, f64), sigma2: f64) -> Result<Vec<f64>> {
    Ok(GrayQam::new(m)?.llr(y, sigma2))
}
