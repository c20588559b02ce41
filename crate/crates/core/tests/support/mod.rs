//! Oracles shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use cmsim::lattice::{enumerate_within, NestedLatticePair};
use cmsim::shaping::amplitude;
use cmsim::voronoi::{OffsetMode, VoronoiCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn label_bits(idx: usize, k: usize) -> Vec<u8> {
    (0..k).map(|j| (idx >> j & 1) as u8).collect()
}

pub fn key(x: &[f64]) -> Vec<i64> {
    x.iter().map(|v| (v * 1e6).round() as i64).collect()
}

pub fn lattice_frame(code: &VoronoiCode, x: &[f64]) -> Vec<f64> {
    x.iter().zip(code.offset()).map(|(v, a)| v / code.energy_norm() + a).collect()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn energy(seq: &[u8]) -> u64 {
    seq.iter().map(|&j| u64::from(amplitude(j as usize)).pow(2)).sum()
}

pub fn type_of(seq: &[u8], k: usize) -> Vec<usize> {
    let mut c = vec![0; k];
    for &s in seq {
        c[s as usize] += 1;
    }
    c
}

/// Every length-n sequence over k amplitudes, in lexicographic order.
pub fn all_sequences(k: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(k.pow(n as u32));
    let mut cur = vec![0u8; n];
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if (cur[i] as usize) + 1 < k {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
    }
}

// ---- demapper oracles -------------------------------------------------

/// Every label with its lattice-frame point and its images under all Λs
/// translates short enough to matter: a point at distance ρ from y lies in a
/// translate Ω(Λs) + s with |s| ≤ |y| + ρ + R(Λs), and every competitor here
/// is within 4·R(Λ) of y.
pub struct Periodic {
    labels: Vec<Vec<u8>>,
    /// translated points of label j
    images: Vec<Vec<Vec<f64>>>,
}

/// Distance from one received vector to the nearest image of every label.
pub struct Scan<'a> {
    labels: &'a [Vec<u8>],
    d: Vec<f64>,
}

impl Periodic {
    pub fn new(c: &VoronoiCode) -> Self {
        let n = c.dim();
        let cov_s = c.pair().shaping().covering_radius().unwrap();
        let cov_c = c.pair().coding().covering_radius().unwrap();
        let radius = 2.0 * cov_s + 4.0 * cov_c + 1.0;
        let shifts = enumerate_within(c.pair().shaping(), &vec![0.0; n], radius).unwrap();
        let labels: Vec<Vec<u8>> = (0..1usize << c.k()).map(|i| label_bits(i, c.k())).collect();
        let images = labels
            .iter()
            .map(|bits| {
                let base = lattice_frame(c, &c.encode(bits).unwrap());
                shifts.iter().map(|s| base.iter().zip(s).map(|(a, b)| a + b).collect()).collect()
            })
            .collect();
        Periodic { labels, images }
    }

    pub fn scan(&self, y: &[f64]) -> Scan<'_> {
        let d = self.images.iter().map(|imgs| imgs.iter().map(|p| dist2(y, p)).fold(f64::INFINITY, f64::min)).collect();
        Scan { labels: &self.labels, d }
    }
}

impl Scan<'_> {
    pub fn nearest<F: Fn(&[u8]) -> bool>(&self, keep: F) -> (f64, &[u8]) {
        let mut best = (f64::INFINITY, &[][..]);
        for (bits, &d) in self.labels.iter().zip(&self.d) {
            if d < best.0 && keep(bits) {
                best = (d, bits);
            }
        }
        best
    }

    /// One-competitor max-log LLRs.
    pub fn lrb_llr(&self, c: &VoronoiCode, sigma2: f64) -> Vec<f64> {
        let (d0, b0) = self.nearest(|_| true);
        let lsb = c.lrb_label(b0);
        let scale = c.energy_norm().powi(2) / (2.0 * sigma2);
        (0..c.q())
            .map(|i| {
                let mut want = lsb.clone();
                want[i] ^= 1;
                let (d1, _) = self.nearest(|b| c.lrb_label(b) == want);
                if lsb[i] == 0 {
                    (d1 - d0) * scale
                } else {
                    (d0 - d1) * scale
                }
            })
            .collect()
    }

    /// Full max-log LLRs (all other bits free).
    pub fn full_llr(&self, c: &VoronoiCode, sigma2: f64) -> Vec<f64> {
        let scale = c.energy_norm().powi(2) / (2.0 * sigma2);
        (0..c.q())
            .map(|i| {
                let p = c.lrb_positions()[i];
                let (d0, _) = self.nearest(|b| b[p] == 0);
                let (d1, _) = self.nearest(|b| b[p] == 1);
                (d1 - d0) * scale
            })
            .collect()
    }

    pub fn mrb(&self, c: &VoronoiCode, lrbs: &[u8]) -> Vec<u8> {
        let (_, b) = self.nearest(|b| c.lrb_label(b) == lrbs);
        c.mrb_label(b)
    }
}

/// Compare the VC demapper with exhaustive enumeration at three noise
/// levels (max-log tolerance 1e-9).
pub fn check_demapper(pair: &str, points: Option<usize>, seed: u64) {
    let p = NestedLatticePair::builtin(pair).unwrap();
    let n = p.dim();
    let c = VoronoiCode::new(p, n, OffsetMode::Generic).unwrap();
    let oracle = Periodic::new(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = 1usize << c.k();
    let labels: Vec<usize> = match points {
        None => (0..total).collect(),
        Some(m) => (0..m).map(|_| rng.random_range(0..total)).collect(),
    };
    for &sigma in &[0.05, 0.15, 0.35] {
        let sigma2 = sigma * sigma;
        for &idx in &labels {
            let bits = label_bits(idx, c.k());
            let x = c.encode(&bits).unwrap();
            let y: Vec<f64> = x.iter().map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal)).collect();
            let yl = lattice_frame(&c, &y);
            let got = c.lrb_llr(&y, sigma2).unwrap();
            let scan = oracle.scan(&yl);
            let want = scan.lrb_llr(&c, sigma2);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-9 * (1.0 + w.abs()), "{pair} σ={sigma} llr {got:?} vs {want:?}");
            }
            if pair.starts_with('Z') {
                let full = scan.full_llr(&c, sigma2);
                for (g, w) in got.iter().zip(&full) {
                    assert!((g - w).abs() <= 1e-9 * (1.0 + w.abs()));
                }
            }
            // MRB decision for the true LRBs and for a corrupted LRB vector
            let lrb = c.lrb_label(&bits);
            assert_eq!(c.mrb_hard_decision(&y, &lrb).unwrap(), scan.mrb(&c, &lrb));
            let mut bad = lrb.clone();
            bad[idx % c.q()] ^= 1;
            assert_eq!(c.mrb_hard_decision(&y, &bad).unwrap(), scan.mrb(&c, &bad));
        }
    }
}
