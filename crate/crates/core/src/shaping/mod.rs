//! Distribution matchers producing shaped amplitude sequences.
//!
//! Amplitudes are handled by index: index j stands for amplitude 2j + 1, so
//! the index doubles as the natural-binary amplitude label. Input blocks of L
//! bits are read as an unsigned integer, most significant bit first, and
//! matchers biject [0, 2^L) onto a set of length-N sequences in
//! lexicographic order (smaller amplitudes first).

mod ccdm;
mod ess;
mod select;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub use ccdm::Ccdm;
pub use ess::{EnergyTrellis, Ess};
pub use select::{select_composition, select_emax};

/// Amplitude value of index `j`.
#[inline]
pub fn amplitude(j: usize) -> u32 {
    2 * j as u32 + 1
}

/// Amplitude type of a length-N block with L input bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition {
    counts: Vec<usize>,
    n: usize,
    l: usize,
}

impl Composition {
    /// Composition with `counts[j]` occurrences of amplitude 2j + 1 and `l`
    /// input bits; fails when 2^l exceeds the number of sequences.
    pub fn new(counts: Vec<usize>, l: usize) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Infeasible("empty amplitude alphabet".into()));
        }
        let n = counts.iter().sum();
        let c = Composition { counts, n, l };
        if c.log2_floor() < l as u64 {
            return Err(Error::Infeasible(format!(
                "composition {:?} has only {} bits of sequences, {} requested",
                c.counts,
                c.log2_floor(),
                l
            )));
        }
        Ok(c)
    }

    /// Composition with the largest input length it supports.
    pub fn with_max_bits(counts: Vec<usize>) -> Result<Self> {
        let probe = Composition { n: counts.iter().sum(), counts, l: 0 };
        let l = probe.log2_floor() as usize;
        Ok(Composition { l, ..probe })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// Number of distinct sequences of this type.
    pub fn multinomial(&self) -> BigUint {
        multinomial(&self.counts)
    }

    /// floor(log2(multinomial)).
    pub fn log2_floor(&self) -> u64 {
        self.multinomial().bits().saturating_sub(1)
    }

    /// Σ n_a a² / N.
    pub fn mean_energy(&self) -> f64 {
        let e: u64 = self.counts.iter().enumerate().map(|(j, &c)| c as u64 * u64::from(amplitude(j)).pow(2)).sum();
        e as f64 / self.n as f64
    }

    /// Empirical amplitude distribution.
    pub fn probabilities(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.n as f64).collect()
    }
}

/// N! / Π n_j!.
pub fn multinomial(counts: &[usize]) -> BigUint {
    // Product of binomials keeps intermediates small.
    let mut acc = BigUint::one();
    let mut total = 0usize;
    for &c in counts {
        for i in 1..=c {
            total += 1;
            acc *= BigUint::from(total);
            acc /= BigUint::from(i);
        }
    }
    acc
}

/// Number of distinct permutations of `comp`.
pub fn multinomial_count(comp: &Composition) -> BigUint {
    comp.multinomial()
}

/// Entropy in bits of a probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// Big-endian bit reading: bits[0] is the most significant.
pub(crate) fn bits_to_index(bits: &[u8]) -> BigUint {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    let pad = bytes.len() * 8 - bits.len();
    for (i, &b) in bits.iter().enumerate() {
        let pos = i + pad;
        bytes[pos / 8] |= (b & 1) << (7 - pos % 8);
    }
    BigUint::from_bytes_be(&bytes)
}

pub(crate) fn index_to_bits(index: &BigUint, l: usize, out: &mut [u8]) {
    debug_assert!(index.bits() as usize <= l);
    for (i, o) in out.iter_mut().enumerate().take(l) {
        *o = index.bit((l - 1 - i) as u64) as u8;
    }
}

pub(crate) fn within_bits(index: &BigUint, l: usize) -> bool {
    index.is_zero() || index.bits() as usize <= l
}

/// Which matcher a shaper spec asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShaperKind {
    Ccdm,
    Ess,
}

impl ShaperKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ccdm" => Ok(ShaperKind::Ccdm),
            "ess" => Ok(ShaperKind::Ess),
            other => Err(Error::Config(format!("unknown shaper `{other}` (ccdm or ess)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ShaperKind::Ccdm => "ccdm",
            ShaperKind::Ess => "ess",
        }
    }
}

/// A constructed matcher of either kind.
#[derive(Clone, Debug)]
pub enum Shaper {
    Ccdm(Ccdm),
    Ess(Ess),
}

impl Shaper {
    /// Build a matcher for `alphabet` amplitudes, blocklength `n`, `l` input
    /// bits; CCDM picks the minimum-energy composition, ESS the smallest
    /// energy bound.
    pub fn build(kind: ShaperKind, alphabet: usize, n: usize, l: usize) -> Result<Self> {
        match kind {
            ShaperKind::Ccdm => Ok(Shaper::Ccdm(Ccdm::new(select::select_composition_bits(alphabet, n, l)?))),
            ShaperKind::Ess => {
                let e_max = select_emax(alphabet, n, l)?;
                Ok(Shaper::Ess(Ess::new(EnergyTrellis::new(alphabet, n, e_max)?, l)?))
            }
        }
    }

    pub fn kind(&self) -> ShaperKind {
        match self {
            Shaper::Ccdm(_) => ShaperKind::Ccdm,
            Shaper::Ess(_) => ShaperKind::Ess,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Shaper::Ccdm(c) => c.composition().n(),
            Shaper::Ess(e) => e.trellis().n(),
        }
    }

    pub fn l(&self) -> usize {
        match self {
            Shaper::Ccdm(c) => c.composition().l(),
            Shaper::Ess(e) => e.l(),
        }
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            Shaper::Ccdm(c) => c.composition().alphabet_size(),
            Shaper::Ess(e) => e.trellis().alphabet_size(),
        }
    }

    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        match self {
            Shaper::Ccdm(c) => c.encode(bits),
            Shaper::Ess(e) => e.encode(bits),
        }
    }

    pub fn decode(&self, seq: &[u8]) -> Result<Vec<u8>> {
        match self {
            Shaper::Ccdm(c) => c.decode(seq),
            Shaper::Ess(e) => e.decode(seq),
        }
    }

    /// Average amplitude distribution of the matcher output: exact for CCDM,
    /// sampled from `samples` random inputs for ESS.
    pub fn amplitude_distribution(&self, samples: usize, seed: u64) -> Result<Vec<f64>> {
        match self {
            Shaper::Ccdm(c) => Ok(c.composition().probabilities()),
            Shaper::Ess(e) => e.sampled_distribution(samples, seed),
        }
    }

    /// H(output amplitude distribution) − L/N, bits per amplitude.
    pub fn rate_loss(&self, samples: usize, seed: u64) -> Result<f64> {
        let p = self.amplitude_distribution(samples, seed)?;
        Ok(entropy(&p) - self.l() as f64 / self.n() as f64)
    }
}

/// Rate loss of a matcher (ESS marginal sampled from 2000 inputs).
pub fn rate_loss(shaper: &Shaper) -> Result<f64> {
    shaper.rate_loss(2000, 0x2a7e)
}
