//! Transmission rate bookkeeping in bits per two dimensions.
//!
//! PS-MLC: R_t = 2·(L/N + R), with one coded sign bit per real dimension.
//! VC-MLC: R_t = 2·((k − q) + q·R) / n.
//! BICM:   R_t = log2(M)·R.
//! Every rate is evaluated as an exact rational before rounding.

use num_rational::Ratio;

use super::{presets, ChainConfig, Modulation, Scheme};
use crate::error::{Error, Result};
use crate::lattice::NestedLatticePair;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransmissionRate {
    pub exact: Ratio<i64>,
}

impl TransmissionRate {
    pub fn value(&self) -> f64 {
        *self.exact.numer() as f64 / *self.exact.denom() as f64
    }

    /// Three significant digits, trailing zeros dropped ("7.2", "5.33").
    pub fn display(&self) -> String {
        format_sig3(self.value())
    }
}

/// `v` to three significant digits without trailing zeros.
pub fn format_sig3(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (2 - mag).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn compute_rate(config: &ChainConfig) -> Result<TransmissionRate> {
    let (a, b) = config.rate.fraction();
    let r = Ratio::new(a as i64, b as i64);
    let exact = match (config.scheme, &config.modulation) {
        (Scheme::PsMlc, Modulation::Pam { bits_per_dim, .. }) => {
            let s = config.shaper.as_ref().ok_or_else(|| Error::Config("ps-mlc needs a shaper".into()))?;
            if s.n == 0 || s.l() > s.n * (bits_per_dim - 1) {
                return Err(Error::Config(format!("shaping rate {} does not fit {bits_per_dim} bits per dimension", s.rs)));
            }
            (Ratio::new(s.l() as i64, s.n as i64) + r) * 2
        }
        (Scheme::VcMlc, Modulation::Voronoi { pair, .. }) => {
            let p = NestedLatticePair::builtin(pair)?;
            let (k, n) = (p.index_log2() as i64, p.dim() as i64);
            let q = n;
            (Ratio::from_integer(k - q) + r * q) * 2 / n
        }
        (Scheme::Bicm, Modulation::Qam { order }) => {
            if !order.is_power_of_two() || order.trailing_zeros() % 2 != 0 {
                return Err(Error::Config(format!("QAM order {order} is not an even power of two")));
            }
            r * order.trailing_zeros() as i64
        }
        (s, m) => return Err(Error::Config(format!("scheme {} does not take modulation {m:?}", s.name()))),
    };
    Ok(TransmissionRate { exact })
}

/// One line of the rate audit.
#[derive(Clone, Debug)]
pub struct RateAuditRow {
    pub preset: String,
    pub table_label: &'static str,
    pub printed: &'static str,
    pub computed: String,
    pub exact: String,
    pub matches: bool,
}

/// Computed R_t of every preset that reproduces a reference rate-table row.
pub fn rate_audit() -> Result<Vec<RateAuditRow>> {
    presets()
        .into_iter()
        .filter_map(|p| p.table_row.map(|row| (p.config, row)))
        .map(|(config, row)| {
            let rate = compute_rate(&config)?;
            let computed = rate.display();
            Ok(RateAuditRow {
                preset: config.name,
                table_label: row.label,
                printed: row.printed_rt,
                matches: computed == row.printed_rt,
                exact: rate.exact.to_string(),
                computed,
            })
        })
        .collect()
}
