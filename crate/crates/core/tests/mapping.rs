use cmsim::mapping::{gray_qam_llr, AmplitudeLabeling, GrayQam, LrbLabel, PamConstellation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn pam_labeling_examples() {
    let c = PamConstellation::uniform(3).unwrap();
    let n = c.norm();
    assert!(close(c.map(0, &[0, 0]).unwrap() / n, 1.0, 1e-15));
    assert!(close(c.map(1, &[1, 1]).unwrap() / n, -7.0, 1e-15));
    assert!(close(c.map(0, &[0, 1]).unwrap() / n, 3.0, 1e-15));
    assert!(close(c.map(0, &[1, 0]).unwrap() / n, 5.0, 1e-15));
    for label in 0..4u8 {
        let bits = [label >> 1, label & 1];
        assert_eq!(c.map(0, &bits).unwrap(), -c.map(1, &bits).unwrap());
    }
}

#[test]
fn pam_image_is_signed_amplitudes() {
    let c = PamConstellation::new(3, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
    let mut image: Vec<f64> = Vec::new();
    for s in 0..2u8 {
        for label in 0..4u8 {
            image.push(c.map(s, &[label >> 1, label & 1]).unwrap());
        }
    }
    image.sort_by(f64::total_cmp);
    let expected: Vec<f64> = [-7.0, -5.0, -3.0, -1.0, 1.0, 3.0, 5.0, 7.0].iter().map(|a| a * c.norm()).collect();
    assert_eq!(image, expected);
    assert_eq!(c.points(), expected);
}

#[test]
fn energy_is_half_per_dimension() {
    for prior in [vec![0.25; 4], vec![0.4, 0.3, 0.2, 0.1], vec![0.7, 0.2, 0.05, 0.05]] {
        let c = PamConstellation::new(3, prior.clone()).unwrap();
        // analytic: Σ P(a)·(a·norm)²
        let e: f64 = prior.iter().enumerate().map(|(j, p)| p * ((2 * j + 1) as f64 * c.norm()).powi(2)).sum();
        assert!((e - 0.5).abs() < 1e-9);
        assert!((c.energy() - 0.5).abs() < 1e-9);
    }
}

#[test]
fn sign_llr_examples() {
    let c = PamConstellation::uniform(2).unwrap().with_norm(1.0);
    assert_eq!(c.sign_llr(0.0, 1.0), 0.0);
    let expected = ((1.0f64 + (-2.0f64).exp()) / ((-2.0f64).exp() + (-8.0f64).exp())).ln();
    assert!(close(c.sign_llr(1.0, 1.0), expected, 1e-12));
    assert!((c.sign_llr(1.0, 1.0) - 2.124).abs() < 1e-3);
    let mut prev = f64::NEG_INFINITY;
    for i in 0..200 {
        let v = c.sign_llr(i as f64 * 0.5, 1.0);
        assert!(v > prev);
        prev = v;
    }
    assert!(c.sign_llr(60.0, 1.0) > 200.0);
}

#[test]
fn sign_llr_reduces_to_bpsk() {
    let c = PamConstellation::uniform(1).unwrap();
    let n = c.norm();
    for &(y, s2) in &[(0.3, 0.1), (-1.2, 0.5), (2.0, 2.0), (0.01, 0.01)] {
        assert!(close(c.sign_llr(y, s2), 2.0 * y * n / s2, 1e-12));
    }
}

#[test]
fn sign_llr_matches_direct_sum() {
    let c = PamConstellation::new(3, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let y: f64 = rng.random_range(-2.0..2.0);
        let s2: f64 = rng.random_range(0.05..1.0);
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, p) in c.prior().iter().enumerate() {
            let a = (2 * j + 1) as f64 * c.norm();
            num += p * (-(y - a).powi(2) / (2.0 * s2)).exp();
            den += p * (-(y + a).powi(2) / (2.0 * s2)).exp();
        }
        assert!(close(c.sign_llr(y, s2), (num / den).ln(), 1e-9));
    }
}

/// Set-partition bit straight from the point: x ≡ 1 (mod 4) ⇔ c = 0.
fn partition_bit(x_over_norm: f64) -> u8 {
    ((x_over_norm.round() as i64 - 1).rem_euclid(4) / 2) as u8
}

#[test]
fn set_partition_subsets_are_spaced_four_apart() {
    let c = PamConstellation::uniform(3).unwrap();
    for bit in 0..2u8 {
        let mut pts: Vec<f64> = (0..4).map(|j| c.map_index(LrbLabel::SetPartition.sign_bit(bit, j), j) / c.norm()).collect();
        pts.sort_by(f64::total_cmp);
        assert!(pts.windows(2).all(|w| (w[1] - w[0] - 4.0).abs() < 1e-12), "{pts:?}");
        assert!(pts.iter().all(|&x| partition_bit(x) == bit));
    }
    assert_eq!(LrbLabel::Sign.sign_bit(1, 2), 1);
    assert!(LrbLabel::parse("set-partition").is_ok() && LrbLabel::parse("gray").is_err());
}

#[test]
fn set_partition_llr_and_decision_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for m in [2usize, 3, 4] {
        let k = 1usize << (m - 1);
        let mut prior: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
        let t: f64 = prior.iter().sum();
        prior.iter_mut().for_each(|p| *p /= t);
        let c = PamConstellation::new(m, prior.clone()).unwrap();
        let lrb = LrbLabel::SetPartition;
        for _ in 0..300 {
            let y = rng.random_range(-1.8..1.8);
            let s2 = rng.random_range(0.002..0.3);
            // enumerate all 2^m points with their prior
            let (mut p0, mut p1) = (0.0, 0.0);
            for j in 0..k {
                for s in 0..2u8 {
                    let x = c.map_index(s, j);
                    let w = prior[j] * (-(y - x) * (y - x) / (2.0 * s2)).exp();
                    if partition_bit(x / c.norm()) == 0 { p0 += w } else { p1 += w }
                }
            }
            if p0 > 1e-300 && p1 > 1e-300 {
                assert!(close(c.lrb_llr(lrb, y, s2), (p0 / p1).ln(), 1e-9));
            }
            for bit in 0..2u8 {
                let (j, s) = c.decide_given_lrb(lrb, y, bit, false, s2);
                let x = c.map_index(s, j);
                assert_eq!(partition_bit(x / c.norm()), bit);
                for jj in 0..k {
                    let xx = c.map_index(lrb.sign_bit(bit, jj), jj);
                    assert!((y - x).abs() <= (y - xx).abs() + 1e-12);
                }
            }
        }
        // the sign mode is the plain sign LLR
        assert_eq!(c.lrb_llr(LrbLabel::Sign, 0.3, 0.1), c.sign_llr(0.3, 0.1));
    }
}

#[test]
fn amplitude_hd_examples() {
    let c = PamConstellation::uniform(3).unwrap();
    let n = c.norm();
    assert_eq!(c.amplitude_hd_index(2.9 * n, 0), 1);
    assert_eq!(c.amplitude_hd_index(-0.2 * n, 1), 0);
    assert_eq!(c.amplitude_hd(2.9 * n, 0), vec![0, 1]);
    // exact midpoints resolve to the lower amplitude
    for (mid, lower) in [(2.0, 0), (4.0, 1), (6.0, 2)] {
        assert_eq!(c.amplitude_hd_index(mid * n, 0), lower);
        assert_eq!(c.amplitude_hd_index(-mid * n, 1), lower);
    }
    assert_eq!(c.amplitude_hd_index(100.0, 0), 3);
    assert_eq!(c.amplitude_hd_index(100.0, 1), 0);
}

#[test]
fn map_decision_prefers_likely_amplitudes() {
    let c = PamConstellation::new(3, vec![0.85, 0.1, 0.04, 0.01]).unwrap();
    let n = c.norm();
    // just above the ML midpoint, heavy prior on amplitude 1 wins at high noise
    assert_eq!(c.amplitude_hd_index(2.1 * n, 0), 1);
    assert_eq!(c.amplitude_map_index(2.1 * n, 0, 0.5), 0);
    assert_eq!(c.amplitude_map_index(2.1 * n, 0, 1e-6), 1);
}

#[test]
fn reflected_labeling_round_trip() {
    let c = PamConstellation::uniform(4).unwrap().with_labeling(AmplitudeLabeling::Reflected);
    let mut bits = [0u8; 3];
    for j in 0..8 {
        c.bits_of_index(j, &mut bits);
        assert_eq!(c.index_from_bits(&bits).unwrap(), j);
    }
    // adjacent amplitudes differ in one bit
    let mut prev = [0u8; 3];
    c.bits_of_index(0, &mut prev);
    for j in 1..8 {
        c.bits_of_index(j, &mut bits);
        assert_eq!(bits.iter().zip(&prev).filter(|(a, b)| a != b).count(), 1);
        prev = bits;
    }
}

#[test]
fn qam4_origin_llrs_are_zero() {
    assert_eq!(gray_qam_llr(1, (0.0, 0.0), 0.3).unwrap(), vec![0.0, 0.0]);
}

/// Direct sum over every point of the 2-D constellation.
fn brute_qam_llr(q: &GrayQam, y: (f64, f64), sigma2: f64) -> Vec<f64> {
    let b = q.bits_per_symbol();
    let mut num = vec![0.0f64; b];
    let mut den = vec![0.0f64; b];
    // subtract the nearest-point metric to avoid underflow
    let mut points = Vec::new();
    for word in 0..(1usize << b) {
        let bits: Vec<u8> = (0..b).map(|i| ((word >> (b - 1 - i)) & 1) as u8).collect();
        let x = q.map(&bits).unwrap();
        let d2 = (y.0 - x.0).powi(2) + (y.1 - x.1).powi(2);
        points.push((bits, d2));
    }
    let dmin = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    for (bits, d2) in &points {
        let w = (-(d2 - dmin) / (2.0 * sigma2)).exp();
        for i in 0..b {
            if bits[i] == 0 {
                num[i] += w;
            } else {
                den[i] += w;
            }
        }
    }
    num.iter().zip(&den).map(|(n, d)| (n / d).ln()).collect()
}

#[test]
fn gray_qam_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for order in [16, 64, 256] {
        let q = GrayQam::square(order).unwrap();
        for snr_db in [5.0, 12.0, 20.0] {
            let sigma2 = 1.0 / (2.0 * 10f64.powf(snr_db / 10.0));
            for _ in 0..200 {
                let y = (rng.random_range(-1.3..1.3), rng.random_range(-1.3..1.3));
                let fast = q.llr(y, sigma2);
                let slow = brute_qam_llr(&q, y, sigma2);
                for (a, b) in fast.iter().zip(&slow) {
                    if b.is_finite() {
                        assert!(close(*a, *b, 1e-9), "{order}-QAM {snr_db} dB: {a} vs {b}");
                    }
                }
            }
        }
    }
}

#[test]
fn gray_qam_is_gray_and_unit_energy() {
    let q = GrayQam::square(64).unwrap();
    let mut e = 0.0;
    for word in 0..64usize {
        let bits: Vec<u8> = (0..6).map(|i| ((word >> (5 - i)) & 1) as u8).collect();
        let x = q.map(&bits).unwrap();
        e += x.0 * x.0 + x.1 * x.1;
    }
    assert!((e / 64.0 - 1.0).abs() < 1e-12);
    let step = 2.0 * q.norm();
    for i in 0..7usize {
        let l0 = (i ^ (i >> 1)) as u8;
        let l1 = ((i + 1) ^ ((i + 1) >> 1)) as u8;
        assert_eq!((l0 ^ l1).count_ones(), 1);
        let b0: Vec<u8> = (0..3).map(|k| (l0 >> (2 - k)) & 1).collect();
        let b1: Vec<u8> = (0..3).map(|k| (l1 >> (2 - k)) & 1).collect();
        assert!(close(q.map_dim(&b1) - q.map_dim(&b0), step, 1e-12));
    }
}

#[test]
fn gray_llr_signs_at_high_snr() {
    let q = GrayQam::square(256).unwrap();
    let sigma2: f64 = 1e-5;
    let noise = Normal::new(0.0, sigma2.sqrt()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let bits: Vec<u8> = (0..8).map(|_| rng.random_range(0..2)).collect();
        let x = q.map(&bits).unwrap();
        let y = (x.0 + noise.sample(&mut rng), x.1 + noise.sample(&mut rng));
        for (llr, &b) in q.llr(y, sigma2).iter().zip(&bits) {
            assert_eq!(*llr < 0.0, b == 1);
        }
    }
}

proptest! {
    #[test]
    fn sign_flip_negates(label in 0u8..8, sign in 0u8..2) {
        let c = PamConstellation::new(4, vec![0.3, 0.2, 0.15, 0.1, 0.1, 0.08, 0.05, 0.02]).unwrap();
        let bits = [label >> 2 & 1, label >> 1 & 1, label & 1];
        prop_assert_eq!(c.map(sign, &bits).unwrap(), -c.map(sign ^ 1, &bits).unwrap());
    }

    #[test]
    fn sign_llr_is_odd(y in -3.0f64..3.0, s2 in 0.01f64..2.0) {
        let c = PamConstellation::new(3, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        prop_assert!((c.sign_llr(y, s2) + c.sign_llr(-y, s2)).abs() < 1e-9 * (1.0 + c.sign_llr(y, s2).abs()));
    }

    #[test]
    fn hd_is_nearest_level(y in -2.0f64..2.0, sign in 0u8..2) {
        let c = PamConstellation::uniform(3).unwrap();
        let j = c.amplitude_hd_index(y, sign);
        let v = if sign == 0 { y } else { -y };
        let d = (v - (2 * j + 1) as f64 * c.norm()).abs();
        for k in 0..4 {
            prop_assert!(d <= (v - (2 * k + 1) as f64 * c.norm()).abs() + 1e-12);
        }
    }
}
