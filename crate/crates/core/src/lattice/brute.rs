//! Reference closest-point search by sphere enumeration.
//!
//! The basis is LLL-reduced and every lattice point inside a ball around the
//! target is listed by depth-first search over the Gram–Schmidt levels. This
//! shares no code with the structured decoders and serves as their oracle.

use std::cmp::Ordering;

use super::small::{dist2, lex_cmp};
use super::LatticeDef;
use crate::error::{Error, Result};

/// Precomputed reduced basis and Gram–Schmidt data of one lattice.
pub struct Enumerator {
    n: usize,
    basis: Vec<Vec<f64>>,
    gs_norm: Vec<f64>,
    mu: Vec<Vec<f64>>,
    gs: Vec<Vec<f64>>,
    covering: Option<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<f64>) {
    let n = b.len();
    let mut gs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut norm = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &gs[j]) / norm[j];
            for (x, g) in v.iter_mut().zip(&gs[j]) {
                *x -= mu[i][j] * g;
            }
        }
        norm[i] = dot(&v, &v);
        gs.push(v);
    }
    (gs, mu, norm)
}

fn lll(mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = b.len();
    let (mut _gs, mut mu, mut norm) = gram_schmidt(&b);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let bj = b[j].clone();
                for (x, v) in b[k].iter_mut().zip(&bj) {
                    *x -= q * v;
                }
                (_gs, mu, norm) = gram_schmidt(&b);
            }
        }
        if norm[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * norm[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            (_gs, mu, norm) = gram_schmidt(&b);
            k = k.saturating_sub(1).max(1);
        }
    }
    b
}

impl Enumerator {
    pub fn new(lattice: &LatticeDef) -> Self {
        let n = lattice.dim();
        let basis = lll((0..n).map(|i| lattice.basis_row(i).to_vec()).collect());
        let (gs, mu, gs_norm) = gram_schmidt(&basis);
        Enumerator { n, basis, gs_norm, mu, gs, covering: lattice.covering_radius() }
    }

    /// All lattice points within Euclidean distance `radius` of `y`.
    pub fn within(&self, y: &[f64], radius: f64) -> Vec<Vec<f64>> {
        let n = self.n;
        // y in Gram–Schmidt coordinates
        let c: Vec<f64> = (0..n).map(|j| dot(y, &self.gs[j]) / self.gs_norm[j]).collect();
        let r2 = radius * radius * (1.0 + 1e-12) + 1e-12;
        let mut z = vec![0i64; n];
        let mut found = Vec::new();
        self.recurse(n, &c, 0.0, r2, &mut z, &mut found);
        found
    }

    fn recurse(&self, level: usize, c: &[f64], partial: f64, r2: f64, z: &mut [i64], found: &mut Vec<Vec<f64>>) {
        if level == 0 {
            let mut x = vec![0.0; self.n];
            for (i, &zi) in z.iter().enumerate() {
                for (o, b) in x.iter_mut().zip(&self.basis[i]) {
                    *o += zi as f64 * b;
                }
            }
            found.push(x);
            return;
        }
        let j = level - 1;
        let centre = c[j] - (level..self.n).map(|i| z[i] as f64 * self.mu[i][j]).sum::<f64>();
        let span = ((r2 - partial).max(0.0) / self.gs_norm[j]).sqrt();
        let lo = (centre - span).ceil() as i64;
        let hi = (centre + span).floor() as i64;
        for v in lo..=hi {
            let d = (centre - v as f64).powi(2) * self.gs_norm[j];
            if partial + d > r2 {
                continue;
            }
            z[j] = v;
            self.recurse(j, c, partial + d, r2, z, found);
        }
        z[j] = 0;
    }

    /// Nearest point within `radius`; among equidistant points the
    /// lexicographically smallest.
    pub fn closest(&self, y: &[f64], radius: f64) -> Result<Vec<f64>> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: y.len() });
        }
        if let Some(cov) = self.covering {
            if radius < cov * (1.0 - 1e-12) {
                return Err(Error::RadiusTooSmall { radius, covering: cov });
            }
        }
        let pts = self.within(y, radius);
        pts.into_iter()
            .map(|p| (dist2(y, &p), p))
            .min_by(|a, b| {
                // distances that agree to rounding are treated as equal
                let tol = 1e-9 * (1.0 + a.0.max(b.0));
                if (a.0 - b.0).abs() <= tol {
                    lex_cmp(&a.1, &b.1)
                } else {
                    a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal)
                }
            })
            .map(|(_, p)| p)
            .ok_or(Error::NoCandidate(radius))
    }
}

/// Nearest point of `lattice` to `y` by exhaustive search inside a ball of
/// the given radius, which must be at least the covering radius when known.
pub fn brute_force_quantize(lattice: &LatticeDef, y: &[f64], radius: f64) -> Result<Vec<f64>> {
    Enumerator::new(lattice).closest(y, radius)
}

/// Every point of `lattice` within `radius` of `centre`.
pub fn enumerate_within(lattice: &LatticeDef, centre: &[f64], radius: f64) -> Result<Vec<Vec<f64>>> {
    if centre.len() != lattice.dim() {
        return Err(Error::DimensionMismatch { expected: lattice.dim(), got: centre.len() });
    }
    Ok(Enumerator::new(lattice).within(centre, radius))
}
