//! Constant-composition distribution matching by exact arithmetic coding.
//!
//! With infinite-precision interval arithmetic, arithmetic decoding of an
//! index under the type-class model is lexicographic unranking: at every
//! position the interval splits among the remaining symbols in proportion to
//! their remaining counts, so the sub-interval of symbol a holds exactly
//! M·r_a/r sequences.

use num_bigint::BigUint;
use num_traits::Zero;

use super::{bits_to_index, index_to_bits, within_bits, Composition};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Ccdm {
    comp: Composition,
    total: BigUint,
}

impl Ccdm {
    pub fn new(comp: Composition) -> Self {
        let total = comp.multinomial();
        Ccdm { comp, total }
    }

    pub fn composition(&self) -> &Composition {
        &self.comp
    }

    /// Amplitude-index sequence of the L-bit input.
    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        let l = self.comp.l();
        if bits.len() != l {
            return Err(Error::LengthMismatch { expected: l, got: bits.len() });
        }
        let mut index = bits_to_index(bits);
        let mut counts = self.comp.counts().to_vec();
        let mut remaining = self.comp.n();
        let mut m = self.total.clone();
        let mut out = Vec::with_capacity(remaining);
        while remaining > 0 {
            let last_symbol = counts.iter().rposition(|&c| c > 0).expect("counts left");
            for a in 0..counts.len() {
                if counts[a] == 0 {
                    continue;
                }
                let cnt = &m * counts[a] / remaining;
                if a == last_symbol || index < cnt {
                    out.push(a as u8);
                    counts[a] -= 1;
                    remaining -= 1;
                    m = cnt;
                    break;
                }
                index -= cnt;
            }
        }
        Ok(out)
    }

    /// Input bits of a sequence; errors on a wrong type or an index outside
    /// the L-bit range.
    pub fn decode(&self, seq: &[u8]) -> Result<Vec<u8>> {
        let k = self.comp.alphabet_size();
        let mut counts = vec![0usize; k];
        for &a in seq {
            let a = a as usize;
            if a >= k {
                return Err(Error::CompositionViolation);
            }
            counts[a] += 1;
        }
        if counts != self.comp.counts() {
            return Err(Error::CompositionViolation);
        }
        let mut index = BigUint::zero();
        let mut remaining = self.comp.n();
        let mut m = self.total.clone();
        for &s in seq {
            let s = s as usize;
            for a in 0..s {
                if counts[a] > 0 {
                    index += &m * counts[a] / remaining;
                }
            }
            m = &m * counts[s] / remaining;
            counts[s] -= 1;
            remaining -= 1;
        }
        let l = self.comp.l();
        if !within_bits(&index, l) {
            return Err(Error::IndexOutOfRange(l));
        }
        let mut bits = vec![0u8; l];
        index_to_bits(&index, l, &mut bits);
        Ok(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_four_permutations() {
        let c = Ccdm::new(Composition::new(vec![2, 2], 2).unwrap());
        let seqs: Vec<Vec<u8>> =
            [[0u8, 0], [0, 1], [1, 0], [1, 1]].iter().map(|b| c.encode(b).unwrap()).collect();
        assert_eq!(seqs, vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![0, 1, 1, 0], vec![1, 0, 0, 1]]);
        assert!(matches!(c.decode(&[1, 0, 1, 0]), Err(Error::IndexOutOfRange(2))));
        assert!(matches!(c.decode(&[1, 1, 1, 0]), Err(Error::CompositionViolation)));
    }
}
