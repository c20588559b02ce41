//! Enumerative sphere shaping: lexicographic indexing of all amplitude
//! sequences whose energy Σ a² does not exceed E_max.
//!
//! For odd amplitudes a = 2j + 1 the quantity (a² − 1)/8 = j(j+1)/2 is an
//! integer, so energies live on N + 8·Z and the trellis counts sequences by
//! the reduced budget b = (E − N)/8.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{amplitude, bits_to_index, index_to_bits, within_bits};
use crate::error::{Error, Result};

/// Reduced energy of amplitude index j.
#[inline]
pub(crate) fn unit_energy(j: usize) -> usize {
    j * (j + 1) / 2
}

/// Exact counts T(r, b): number of length-r sequences of reduced energy ≤ b.
#[derive(Clone, Debug)]
pub struct EnergyTrellis {
    alphabet: usize,
    n: usize,
    e_max: u64,
    budget: usize,
    rows: Vec<Vec<BigUint>>,
}

impl EnergyTrellis {
    pub fn new(alphabet: usize, n: usize, e_max: u64) -> Result<Self> {
        if alphabet == 0 || n == 0 {
            return Err(Error::Infeasible("empty alphabet or blocklength".into()));
        }
        if e_max < n as u64 {
            return Err(Error::Infeasible(format!("E_max {e_max} is below the minimum energy {n}")));
        }
        let budget = ((e_max - n as u64) / 8) as usize;
        let mut rows = Vec::with_capacity(n + 1);
        rows.push(vec![BigUint::one(); budget + 1]);
        for r in 1..=n {
            let prev: &Vec<BigUint> = &rows[r - 1];
            let row: Vec<BigUint> = (0..=budget)
                .map(|b| {
                    let mut acc = BigUint::zero();
                    for j in 0..alphabet {
                        let t = unit_energy(j);
                        if t > b {
                            break;
                        }
                        acc += &prev[b - t];
                    }
                    acc
                })
                .collect();
            rows.push(row);
        }
        Ok(EnergyTrellis { alphabet, n, e_max, budget, rows })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn e_max(&self) -> u64 {
        self.e_max
    }

    /// T(r, b) for a suffix of length r and reduced budget b.
    pub fn count(&self, r: usize, b: usize) -> &BigUint {
        &self.rows[r][b.min(self.budget)]
    }

    /// Number of admissible length-N sequences.
    pub fn total(&self) -> &BigUint {
        &self.rows[self.n][self.budget]
    }
}

/// Number of length-n sequences over `alphabet` amplitudes with reduced
/// energy ≤ b, for every b ≤ b_max (keeps one row at a time).
pub(crate) fn last_row(alphabet: usize, n: usize, b_max: usize) -> Vec<BigUint> {
    let mut prev = vec![BigUint::one(); b_max + 1];
    for _ in 0..n {
        let next: Vec<BigUint> = (0..=b_max)
            .map(|b| {
                let mut acc = BigUint::zero();
                for j in 0..alphabet {
                    let t = unit_energy(j);
                    if t > b {
                        break;
                    }
                    acc += &prev[b - t];
                }
                acc
            })
            .collect();
        prev = next;
    }
    prev
}

#[derive(Clone, Debug)]
pub struct Ess {
    trellis: EnergyTrellis,
    l: usize,
}

impl Ess {
    pub fn new(trellis: EnergyTrellis, l: usize) -> Result<Self> {
        if trellis.total() < &(BigUint::one() << l) {
            return Err(Error::Infeasible(format!(
                "E_max {} admits fewer than 2^{l} sequences",
                trellis.e_max()
            )));
        }
        Ok(Ess { trellis, l })
    }

    pub fn trellis(&self) -> &EnergyTrellis {
        &self.trellis
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.l {
            return Err(Error::LengthMismatch { expected: self.l, got: bits.len() });
        }
        let mut index = bits_to_index(bits);
        let n = self.trellis.n;
        let mut budget = self.trellis.budget;
        let mut out = Vec::with_capacity(n);
        for pos in 0..n {
            let r = n - pos - 1;
            let mut chosen = None;
            let mut last_fit = 0;
            for j in 0..self.trellis.alphabet {
                let t = unit_energy(j);
                if t > budget {
                    break;
                }
                last_fit = j;
                let cnt = self.trellis.count(r, budget - t);
                if &index < cnt {
                    chosen = Some(j);
                    break;
                }
                index -= cnt;
            }
            // index < total guarantees a choice; fall back defensively
            let j = chosen.unwrap_or(last_fit);
            budget -= unit_energy(j);
            out.push(j as u8);
        }
        Ok(out)
    }

    pub fn decode(&self, seq: &[u8]) -> Result<Vec<u8>> {
        let n = self.trellis.n;
        if seq.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: seq.len() });
        }
        let energy: u64 = seq.iter().map(|&j| u64::from(amplitude(j as usize)).pow(2)).sum();
        if seq.iter().any(|&j| j as usize >= self.trellis.alphabet) || energy > self.trellis.e_max {
            return Err(Error::EnergyViolation { energy, max: self.trellis.e_max });
        }
        let mut index = BigUint::zero();
        let mut budget = self.trellis.budget;
        for (pos, &s) in seq.iter().enumerate() {
            let r = n - pos - 1;
            for j in 0..s as usize {
                index += self.trellis.count(r, budget - unit_energy(j));
            }
            budget -= unit_energy(s as usize);
        }
        if !within_bits(&index, self.l) {
            return Err(Error::IndexOutOfRange(self.l));
        }
        let mut bits = vec![0u8; self.l];
        index_to_bits(&index, self.l, &mut bits);
        Ok(bits)
    }

    /// Amplitude histogram of `samples` encodes of uniformly random inputs.
    pub fn sampled_distribution(&self, samples: usize, seed: u64) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hist = vec![0u64; self.trellis.alphabet];
        let mut bits = vec![0u8; self.l];
        for _ in 0..samples.max(1) {
            bits.iter_mut().for_each(|b| *b = rng.random_range(0..2));
            for j in self.encode(&bits)? {
                hist[j as usize] += 1;
            }
        }
        let total: u64 = hist.iter().sum();
        Ok(hist.iter().map(|&h| h as f64 / total as f64).collect())
    }
}
