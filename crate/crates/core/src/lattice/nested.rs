//! Nested lattice pairs Λs ⊆ Λ and integer coordinates for the quotient Λ/Λs.
//!
//! With coding basis B and shaping basis Bs, the basis change M = Bs·B⁻¹ is an
//! integer matrix. Its Smith form U·M·V = D gives the quotient coordinates: a
//! point z·B of Λ has label u = (z·V) mod diag(D), and a label u is lifted
//! back to z = u·V⁻¹.
//!
//! A second, triangular labelling uses the Hermite form H of M (upper
//! triangular, positive pivots h_j, entries right of each pivot reduced into
//! [0, h_j)): reducing z against H column by column leaves digits
//! u_j ∈ [0, h_j), and the digit vector is itself a representative. A unit
//! change of z_j then moves digit j alone unless it wraps.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};

use super::snf::{echelon_basis, smith_normal_form, IntMatrix};
use super::LatticeDef;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct NestedLatticePair {
    coding: LatticeDef,
    shaping: LatticeDef,
    index_log2: u32,
    snf_diag: Vec<u64>,
    basis_change: Vec<Vec<i64>>,
    v: Vec<Vec<i64>>,
    v_inv: Vec<Vec<i64>>,
    hermite: Vec<Vec<i64>>,
}

fn big(r: &Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn rational_sqrt(r: &Rational64) -> Option<Rational64> {
    let isqrt = |v: i64| -> Option<i64> {
        let s = (v as f64).sqrt().round() as i64;
        (s * s == v).then_some(s)
    };
    Some(Rational64::new(isqrt(*r.numer())?, isqrt(*r.denom())?))
}

fn rational_inverse(a: &[Vec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !m[i][col].is_zero()).ok_or(Error::Singular)?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].clone();
        for j in 0..n {
            m[col][j] = &m[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for i in 0..n {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..n {
                let a = &m[col][j] * &f;
                m[i][j] -= a;
                let b = &inv[col][j] * &f;
                inv[i][j] -= b;
            }
        }
    }
    Ok(inv)
}

/// Upper-triangular Hermite basis of the row span of `m`.
fn hermite_form(m: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    let mut h = echelon_basis(m, n)?;
    for j in 1..n {
        let (top, rest) = h.split_at_mut(j);
        let pivot = &rest[0];
        for row in top.iter_mut() {
            let q = row[j].div_euclid(pivot[j]);
            if q != 0 {
                for (x, &y) in row.iter_mut().zip(pivot.iter()) {
                    *x = x.checked_sub(q.checked_mul(y).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
                }
            }
        }
    }
    Ok(h)
}

fn to_i64_rows(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&v| i64::try_from(v).map_err(|_| Error::Overflow)).collect())
        .collect()
}

impl NestedLatticePair {
    /// Pair from two lattices; fails unless Λs ⊆ Λ with index a power of two.
    pub fn new(coding: LatticeDef, shaping: LatticeDef) -> Result<Self> {
        let n = coding.dim();
        if shaping.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: shaping.dim() });
        }
        let ratio = shaping.scale_sq() / coding.scale_sq();
        let factor = rational_sqrt(&ratio).ok_or_else(|| {
            Error::NotNested(format!("scale ratio {ratio} of {} / {} is not a rational square", shaping.name(), coding.name()))
        })?;
        let g: Vec<Vec<BigRational>> = coding.generator().iter().map(|r| r.iter().map(big).collect()).collect();
        let g_inv = rational_inverse(&g)?;
        let f = big(&factor);
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in shaping.generator().iter().enumerate() {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for (k, s) in row.iter().enumerate() {
                    if !s.is_zero() {
                        acc += big(s) * &g_inv[k][j];
                    }
                }
                acc *= &f;
                if !acc.is_integer() {
                    return Err(Error::NotNested(format!(
                        "{} basis vector {i} is not an integer combination of the {} basis",
                        shaping.name(),
                        coding.name()
                    )));
                }
                m[i][j] = acc.to_integer().to_i64().ok_or(Error::Overflow)?;
            }
        }
        let snf = smith_normal_form(&IntMatrix::from_rows(&m))?;
        let diag: Vec<u64> = snf.invariant_factors().iter().map(|&d| d as u64).collect();
        let mut index_log2 = 0u32;
        for &d in &diag {
            if !d.is_power_of_two() {
                return Err(Error::NotNested(format!("quotient invariant {d} is not a power of two")));
            }
            index_log2 += d.trailing_zeros();
        }
        if index_log2 == 0 {
            return Err(Error::NotNested("shaping lattice equals the coding lattice".into()));
        }
        let hermite = hermite_form(&m, n)?;
        Ok(NestedLatticePair {
            coding,
            shaping,
            index_log2,
            snf_diag: diag,
            basis_change: m,
            v: to_i64_rows(&snf.v)?,
            v_inv: to_i64_rows(&snf.v_inv)?,
            hermite,
        })
    }

    /// Λ / (factor·Λ).
    pub fn self_similar(coding: LatticeDef, factor: i64) -> Result<Self> {
        let shaping = coding.scaled(Rational64::from_integer(factor));
        Self::new(coding, shaping)
    }

    /// Λ24 / 8Λ24 (index 2⁷²).
    pub fn leech_8() -> Self {
        Self::self_similar(LatticeDef::leech(), 8).expect("Leech pair")
    }

    /// Λ24 / 16Λ24 (index 2⁹⁶).
    pub fn leech_16() -> Self {
        Self::self_similar(LatticeDef::leech(), 16).expect("Leech pair")
    }

    /// Z24 / 8RΛ24 (index 2⁷²): cubic coding lattice, rotated Leech shaping.
    pub fn cubic_leech_8() -> Self {
        Self::new(LatticeDef::integer(24), LatticeDef::rotated_leech().scaled(Rational64::from_integer(8)))
            .expect("cubic Leech pair")
    }

    /// Z24 / 16RΛ24 (index 2⁹⁶).
    pub fn cubic_leech_16() -> Self {
        Self::new(LatticeDef::integer(24), LatticeDef::rotated_leech().scaled(Rational64::from_integer(16)))
            .expect("cubic Leech pair")
    }

    /// Parse `A/kB` (for example `L24/8L24`, `Z2/4Z2`, `E8/2E8`); `B`
    /// defaults to `A` when omitted (`D4/8`).
    pub fn builtin(name: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad lattice pair `{name}` (expected e.g. L24/8L24)"));
        let (a, b) = name.split_once('/').ok_or_else(bad)?;
        let digits = b.chars().take_while(|c| c.is_ascii_digit()).count();
        let factor: i64 = b[..digits].parse().map_err(|_| bad())?;
        let coding = LatticeDef::builtin(a.trim())?;
        let rest = b[digits..].trim();
        let base = if rest.is_empty() { coding.clone() } else { LatticeDef::builtin(rest)? };
        Self::new(coding, base.scaled(Rational64::from_integer(factor)))
    }

    pub fn coding(&self) -> &LatticeDef {
        &self.coding
    }

    pub fn shaping(&self) -> &LatticeDef {
        &self.shaping
    }

    pub fn dim(&self) -> usize {
        self.coding.dim()
    }

    /// k = log2 |Λ/Λs|.
    pub fn index_log2(&self) -> u32 {
        self.index_log2
    }

    pub fn snf_diag(&self) -> &[u64] {
        &self.snf_diag
    }

    /// Integer matrix M with Bs = M·B.
    pub fn basis_change(&self) -> &[Vec<i64>] {
        &self.basis_change
    }

    /// Quotient label of the Λ point with coefficients `z`.
    pub fn label_of(&self, z: &[i64]) -> Vec<u64> {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let s: i128 = z.iter().zip(&self.v).map(|(&zi, row)| zi as i128 * row[j] as i128).sum();
                s.rem_euclid(self.snf_diag[j] as i128) as u64
            })
            .collect()
    }

    /// Pivots h_j of the triangular labelling; their product is the index.
    pub fn hermite_diag(&self) -> Vec<u64> {
        self.hermite.iter().enumerate().map(|(j, r)| r[j] as u64).collect()
    }

    /// Triangular digits of the Λ point with coefficients `z`.
    pub fn hermite_label_of(&self, z: &[i64]) -> Vec<u64> {
        let mut w = z.to_vec();
        for (j, row) in self.hermite.iter().enumerate() {
            let q = w[j].div_euclid(row[j]);
            if q != 0 {
                for (x, &y) in w[j..].iter_mut().zip(&row[j..]) {
                    *x -= q * y;
                }
            }
        }
        w.into_iter().map(|v| v as u64).collect()
    }

    /// Coefficients (in Λ's basis) of a representative of label `u`.
    pub fn coefficients_of(&self, u: &[u64]) -> Vec<i64> {
        let n = self.dim();
        let mut z = vec![0i64; n];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (zj, &v) in z.iter_mut().zip(&self.v_inv[i]) {
                *zj += ui as i64 * v;
            }
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_leech_pairs() {
        let p = NestedLatticePair::leech_8();
        assert_eq!(p.index_log2(), 72);
        assert!(p.snf_diag().iter().all(|&d| d == 8));
        let p = NestedLatticePair::leech_16();
        assert_eq!(p.index_log2(), 96);
        assert!(p.snf_diag().iter().all(|&d| d == 16));
        assert_eq!(NestedLatticePair::cubic_leech_8().index_log2(), 72);
        assert_eq!(NestedLatticePair::cubic_leech_16().index_log2(), 96);
    }

    #[test]
    fn labels_round_trip() {
        let p = NestedLatticePair::builtin("D4/4D4").unwrap();
        assert_eq!(p.index_log2(), 8);
        let u = vec![1, 3, 0, 2];
        let z = p.coefficients_of(&u);
        assert_eq!(p.label_of(&z), u);
    }

    #[test]
    fn rejects_non_nested() {
        let z2 = LatticeDef::integer(2);
        let half = z2.scaled(Rational64::new(1, 2));
        assert!(NestedLatticePair::new(z2.clone(), half).is_err());
        assert!(NestedLatticePair::new(z2.clone(), z2.scaled(Rational64::from_integer(3))).is_err());
    }

    #[test]
    fn mixed_pair() {
        // 2D8 ⊆ 2E8 ⊆ E8, index 2⁸·2.
        let p = NestedLatticePair::builtin("E8/2D8").unwrap();
        assert_eq!(p.index_log2(), 9);
    }
}
