use std::collections::HashSet;

mod support;

use cmsim::lattice::{leech, quantize, NestedLatticePair};
use cmsim::voronoi::{OffsetMode, VoronoiCode};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use support::{check_demapper, dist2, key, label_bits, lattice_frame};

fn code(pair: &str, offset: OffsetMode) -> VoronoiCode {
    let p = NestedLatticePair::builtin(pair).unwrap();
    let n = p.dim();
    VoronoiCode::new(p, n, offset).unwrap()
}

/// Λ24/8Λ24: the Leech lattice as coding lattice.
fn self_similar_72() -> VoronoiCode {
    VoronoiCode::new(NestedLatticePair::leech_8(), 24, OffsetMode::Generic).unwrap()
}


#[test]
fn z2_example_point() {
    let c = code("Z2/4Z2", OffsetMode::Explicit(vec![-0.5, -0.5]));
    let x = c.encode(&[0, 0, 0, 0]).unwrap();
    let raw: Vec<f64> = x.iter().map(|v| v / c.energy_norm()).collect();
    assert_eq!(key(&raw), key(&[0.5, 0.5]));
}

#[test]
fn exhaustive_bijection_small_pairs() {
    for pair in ["Z2/4Z2", "D4/4D4", "D4/8D4", "E8/4E8", "E8/2D8"] {
        let p = NestedLatticePair::builtin(pair).unwrap();
        if p.snf_diag().iter().any(|d| d % 2 != 0) {
            continue;
        }
        let c = VoronoiCode::new(p, NestedLatticePair::builtin(pair).unwrap().dim(), OffsetMode::Generic).unwrap();
        let count = 1usize << c.k();
        assert!(count <= 1 << 16);
        let mut seen = HashSet::new();
        for idx in 0..count {
            let bits = label_bits(idx, c.k());
            let x = c.encode(&bits).unwrap();
            assert_eq!(c.decode(&x).unwrap(), bits, "{pair} label {idx}");
            assert!(seen.insert(key(&x)));
            // membership: inside Ω(Λs) and x + a ∈ Λ
            let raw: Vec<f64> = x.iter().map(|v| v / c.energy_norm()).collect();
            assert!(quantize(c.pair().shaping(), &raw).unwrap().iter().all(|v| v.abs() < 1e-9));
            let z = c.pair().coding().coordinates(&lattice_frame(&c, &x));
            assert!(z.iter().all(|v| (v - v.round()).abs() < 1e-6));
        }
        assert_eq!(seen.len(), count, "{pair}");
        assert_eq!(c.boundary_ties(), 0, "{pair}");
    }
}

#[test]
fn z2_cardinality_matches_index() {
    let c = code("Z2/4Z2", OffsetMode::HalfBasis);
    let pts: HashSet<_> = (0..16).map(|i| key(&c.encode(&label_bits(i, 4)).unwrap())).collect();
    assert_eq!(pts.len(), 16);
}

#[test]
fn self_similar_leech_72_bijection_and_membership() {
    let c = self_similar_72();
    assert_eq!((c.k(), c.q()), (72, 24));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = HashSet::new();
    for _ in 0..10_000 {
        let bits: Vec<u8> = (0..72).map(|_| rng.random_range(0..2)).collect();
        let x = c.encode(&bits).unwrap();
        assert_eq!(c.decode(&x).unwrap(), bits);
        assert!(seen.insert(key(&x)));
        let raw: Vec<f64> = x.iter().map(|v| v / c.energy_norm()).collect();
        assert!(quantize(c.pair().shaping(), &raw).unwrap().iter().all(|v| v.abs() < 1e-9));
        let p: Vec<i64> = lattice_frame(&c, &x).iter().map(|v| (v * 8f64.sqrt()).round() as i64).collect();
        assert!(leech::contains(&p));
    }
    assert_eq!(c.boundary_ties(), 0);
}

#[test]
fn cubic_leech_72_bijection_and_membership() {
    let c = VoronoiCode::leech_72().unwrap();
    assert_eq!((c.k(), c.q()), (72, 24));
    assert_eq!(c.radix().iter().map(|r| r.trailing_zeros()).sum::<u32>(), 72);
    let shaping = c.pair().shaping();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut seen = HashSet::new();
    for _ in 0..10_000 {
        let bits: Vec<u8> = (0..72).map(|_| rng.random_range(0..2)).collect();
        let x = c.encode(&bits).unwrap();
        assert_eq!(c.decode(&x).unwrap(), bits);
        assert!(seen.insert(key(&x)));
        let raw: Vec<f64> = x.iter().map(|v| v / c.energy_norm()).collect();
        assert!(quantize(shaping, &raw).unwrap().iter().all(|v| v.abs() < 1e-9));
        let p = lattice_frame(&c, &x);
        assert!(p.iter().all(|v| (v - v.round()).abs() < 1e-6));
        // the LRBs are the coordinate parities
        let par: Vec<u8> = p.iter().map(|v| (v.round() as i64).rem_euclid(2) as u8).collect();
        assert_eq!(c.lrb_label(&bits), par);
    }
    assert_eq!(c.boundary_ties(), 0);
}

#[test]
fn leech_96_round_trip() {
    let c = VoronoiCode::leech_96().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let bits: Vec<u8> = (0..96).map(|_| rng.random_range(0..2)).collect();
        assert_eq!(c.decode(&c.encode(&bits).unwrap()).unwrap(), bits);
    }
}

#[test]
fn perturbed_points_decode_to_their_label() {
    // minimum distance before normalization: 2 for Λ24, 1 for Z24
    for (c, d) in [(self_similar_72(), 2.0), (VoronoiCode::leech_72().unwrap(), 1.0)] {
        perturb_and_decode(&c, d);
    }
}

fn perturb_and_decode(c: &VoronoiCode, dmin: f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let bits: Vec<u8> = (0..72).map(|_| rng.random_range(0..2)).collect();
        let x = c.encode(&bits).unwrap();
        let mut e: Vec<f64> = (0..24).map(|_| rng.sample(StandardNormal)).collect();
        let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = rng.random_range(0.0..0.495 * dmin) * c.energy_norm();
        e.iter_mut().for_each(|v| *v *= r / norm);
        let y: Vec<f64> = x.iter().zip(&e).map(|(a, b)| a + b).collect();
        assert_eq!(c.decode(&y).unwrap(), bits);
    }
}

#[test]
fn translation_by_shaping_lattice_keeps_point_set() {
    for pair in ["Z2/4Z2", "D4/4D4"] {
        let p = NestedLatticePair::builtin(pair).unwrap();
        let n = p.dim();
        let base = VoronoiCode::new(p.clone(), n, OffsetMode::Generic).unwrap();
        let z: Vec<i64> = (0..n as i64).map(|i| i % 3 - 1).collect();
        let s = p.shaping().point(&z);
        let moved: Vec<f64> = base.offset().iter().zip(&s).map(|(a, b)| a + b).collect();
        let other = VoronoiCode::new(p, n, OffsetMode::Explicit(moved)).unwrap();
        let set = |c: &VoronoiCode| -> HashSet<Vec<i64>> {
            (0..1usize << c.k()).map(|i| key(&c.encode(&label_bits(i, c.k())).unwrap())).collect()
        };
        assert_eq!(set(&base), set(&other), "{pair}");
    }
}

#[test]
fn lrb_flip_changes_lambda_mod_2lambda_coset() {
    for c in [self_similar_72(), VoronoiCode::leech_72().unwrap()] {
        lrb_flip_case(&c);
    }
    let pos = self_similar_72().lrb_positions().to_vec();
    assert_eq!(pos.iter().copied().take(5).collect::<Vec<_>>(), vec![0, 3, 6, 9, 12]);
    // cubic pair: positions are the prefix sums of the label widths
    let c = VoronoiCode::leech_72().unwrap();
    let mut acc = 0;
    for (p, r) in c.lrb_positions().iter().zip(c.radix()) {
        assert_eq!(*p, acc);
        acc += r.trailing_zeros() as usize;
    }
}

fn lrb_flip_case(c: &VoronoiCode) {
    let twice = c.pair().coding().scaled(Rational64::from_integer(2));
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let bits: Vec<u8> = (0..72).map(|_| rng.random_range(0..2)).collect();
        let i = rng.random_range(0..24);
        let mut flipped = bits.clone();
        flipped[c.lrb_positions()[i]] ^= 1;
        let a = lattice_frame(&c, &c.encode(&bits).unwrap());
        let b = lattice_frame(&c, &c.encode(&flipped).unwrap());
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let q = quantize(&twice, &diff).unwrap();
        assert!(dist2(&diff, &q) > 1e-6, "difference lies in 2Λ");
        // flipping an MRB keeps the coset
        let mut mrb = bits.clone();
        mrb[c.lrb_positions()[i] + 1] ^= 1;
        let m = lattice_frame(&c, &c.encode(&mrb).unwrap());
        let diff: Vec<f64> = a.iter().zip(&m).map(|(x, y)| x - y).collect();
        let q = quantize(&twice, &diff).unwrap();
        assert!(dist2(&diff, &q) < 1e-9);
    }
    assert_eq!(c.lrb_label(&[0u8; 72]), vec![0u8; 24]);
}

#[test]
fn stats_and_shaping_gain() {
    let c72 = VoronoiCode::leech_72().unwrap();
    let s = c72.constellation_stats(20_000, 1).unwrap();
    assert_eq!(s.se, 6.0);
    assert!((s.mean_energy_2d - 1.0).abs() < 0.02);
    assert!(s.normalized_second_moment < 1.0 / 12.0, "G = {}", s.normalized_second_moment);
    assert_eq!(s.projection.len(), 20_000 * 12);
    let c96 = VoronoiCode::leech_96().unwrap();
    assert_eq!(c96.se(), 8.0);
    // Low-energy region of the projection is denser than for a square grid of
    // the same energy: the fraction inside radius 0.5 exceeds the uniform
    // square's π·0.25/(4·1.5) (side √6 for unit energy per 2-D).
    let inner = s.projection.iter().filter(|(x, y)| x * x + y * y < 0.25).count() as f64 / s.projection.len() as f64;
    assert!(inner > std::f64::consts::PI * 0.25 / 6.0);
}

#[test]
fn demapper_matches_oracle_z2() {
    check_demapper("Z2/4Z2", None, 21);
    check_demapper("Z2/8Z2", None, 22);
}

#[test]
fn demapper_matches_oracle_d4() {
    check_demapper("D4/4D4", None, 23);
}

#[test]
fn demapper_matches_oracle_d4_4096_sampled() {
    check_demapper("D4/8D4", Some(500), 24);
}

#[test]
fn llr_signs_and_scaling() {
    let c = VoronoiCode::leech_72().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..100 {
        let bits: Vec<u8> = (0..72).map(|_| rng.random_range(0..2)).collect();
        let x = c.encode(&bits).unwrap();
        let llr = c.lrb_llr(&x, 0.01).unwrap();
        for (l, b) in llr.iter().zip(c.lrb_label(&bits)) {
            assert!(if b == 0 { *l > 0.0 } else { *l < 0.0 });
        }
        let half = c.lrb_llr(&x, 0.02).unwrap();
        for (a, b) in llr.iter().zip(&half) {
            assert!((a / 2.0 - b).abs() < 1e-9 * a.abs());
        }
        assert_eq!(c.mrb_hard_decision(&x, &c.lrb_label(&bits)).unwrap(), c.mrb_label(&bits));
    }
}

#[test]
fn mrb_recovery_within_half_distance_of_2lambda() {
    // 2Λ has minimum distance 4 (Λ24) or 2 (Z24) before normalization.
    for (c, d) in [(self_similar_72(), 4.0), (VoronoiCode::leech_72().unwrap(), 2.0)] {
        mrb_case(&c, d);
    }
}

fn mrb_case(c: &VoronoiCode, dmin: f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..500 {
        let bits: Vec<u8> = (0..72).map(|_| rng.random_range(0..2)).collect();
        let x = c.encode(&bits).unwrap();
        let mut e: Vec<f64> = (0..24).map(|_| rng.sample(StandardNormal)).collect();
        let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = rng.random_range(0.0..0.495 * dmin) * c.energy_norm();
        e.iter_mut().for_each(|v| *v *= r / norm);
        let y: Vec<f64> = x.iter().zip(&e).map(|(a, b)| a + b).collect();
        assert_eq!(c.mrb_hard_decision(&y, &c.lrb_label(&bits)).unwrap(), c.mrb_label(&bits));
    }
}

#[test]
fn join_label_inverts_split() {
    let c = VoronoiCode::leech_96().unwrap();
    let bits: Vec<u8> = (0..96).map(|i| (i * 7 % 3 == 0) as u8).collect();
    assert_eq!(c.join_label(&c.lrb_label(&bits), &c.mrb_label(&bits)), bits);
}
