//! Confidence intervals and threshold-crossing interpolation.

use super::BerRecord;
use crate::error::{Error, Result};

const Z95: f64 = 1.959_963_984_540_054;

/// Half-width of the Wilson 95% interval on errors/bits, relative to the
/// point estimate; infinite when no error has been seen.
pub fn wilson_ci95_rel(errors: u64, bits: u64) -> f64 {
    if errors == 0 || bits == 0 {
        return f64::INFINITY;
    }
    let n = bits as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    half / p
}

/// SNR at which the records cross `target`, interpolated linearly in
/// (snr_db, log10 ber) between the first bracketing pair of nonzero points.
pub fn snr_at_ber(records: &[BerRecord], target: f64) -> Result<f64> {
    if !(target > 0.0) {
        return Err(Error::Config(format!("target BER {target} must be positive")));
    }
    let mut pts: Vec<(f64, f64)> = records.iter().map(|r| (r.snr_db, r.ber)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(&(s, _)) = pts.iter().find(|p| p.1 == target) {
        return Ok(s);
    }
    let lt = target.log10();
    for w in pts.windows(2) {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        if b0 > 0.0 && b1 > 0.0 && (b0 - target) * (b1 - target) < 0.0 {
            let (l0, l1) = (b0.log10(), b1.log10());
            return Ok(s0 + (lt - l0) / (l1 - l0) * (s1 - s0));
        }
    }
    let mut near: Vec<&(f64, f64)> = pts.iter().collect();
    let dist = |b: f64| if b > 0.0 { (b.log10() - lt).abs() } else { f64::INFINITY };
    near.sort_by(|a, b| dist(a.1).total_cmp(&dist(b.1)));
    let nearest = near.iter().take(2).map(|(s, b)| format!("({s} dB, {b:e})")).collect::<Vec<_>>().join(", ");
    Err(Error::NoBracket { target, nearest })
}

/// Gain of `a` over `b` at `threshold`: snr_b − snr_a in dB.
pub fn compare_gains(records_a: &[BerRecord], records_b: &[BerRecord], threshold: f64) -> Result<f64> {
    Ok(snr_at_ber(records_b, threshold)? - snr_at_ber(records_a, threshold)?)
}
