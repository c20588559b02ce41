//! Flat TOML run files. Every key is optional; a `preset` supplies the
//! defaults and the remaining keys override single fields.
//!
//! ```toml
//! preset = "ps64qam-ccdm200"
//! snr = "16:18:0.25"
//! seed = 7
//! min_errors = 200
//! blocklength = 1024
//! ```

use serde::Deserialize;

use super::{RunSpec, StopRule};
use crate::chains::{preset, ChainConfig, Modulation, Scheme, ShaperSpec};
use crate::error::{Error, Result};
use crate::fec::CodeRate;
use crate::mapping::{AmplitudeLabeling, LrbLabel};
use crate::shaping::ShaperKind;
use crate::voronoi::OffsetMode;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub preset: Option<String>,
    pub name: Option<String>,
    pub scheme: Option<String>,
    pub code_rate: Option<String>,
    pub code_length: Option<usize>,
    pub max_iters: Option<usize>,
    pub interleave: Option<bool>,
    pub deshape: Option<bool>,
    // PS
    pub bits_per_dim: Option<usize>,
    pub labeling: Option<String>,
    pub lrb_label: Option<String>,
    pub map_decision: Option<bool>,
    pub shaper: Option<String>,
    pub blocklength: Option<usize>,
    pub rs: Option<f64>,
    pub composition: Option<Vec<usize>>,
    // VC
    pub pair: Option<String>,
    pub offset: Option<String>,
    // BICM
    pub qam_order: Option<usize>,
    // run
    pub snr: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub min_errors: Option<u64>,
    pub min_bits: Option<u64>,
    pub max_bits: Option<u64>,
    pub workers: Option<usize>,
}

/// Parse `a:b:step` (inclusive of b up to rounding) or a comma list.
pub fn parse_snr_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("bad SNR grid `{s}` (a:b:step or a,b,c)"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(num).collect(),
        3 => {
            let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0) || b < a {
                return Err(bad());
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(bad()),
    }
}

impl RunFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Chain configuration: the preset with every given key applied.
    pub fn chain_config(&self) -> Result<ChainConfig> {
        let mut c = match &self.preset {
            Some(p) => preset(p)?,
            None => {
                let scheme = Scheme::parse(self.scheme.as_deref().ok_or_else(|| {
                    Error::Config("a run file needs `preset` or `scheme`".into())
                })?)?;
                let base = match scheme {
                    Scheme::PsMlc => "ps64qam-ccdm200",
                    Scheme::VcMlc => "vc24-72-mlc",
                    Scheme::Bicm => "qam64-bicm",
                };
                let mut c = preset(base)?;
                c.name = "custom".into();
                c
            }
        };
        if let Some(s) = &self.scheme {
            let s = Scheme::parse(s)?;
            if s != c.scheme {
                return Err(Error::Config(format!("scheme {} contradicts preset {}", s.name(), c.name)));
            }
        }
        if let Some(n) = &self.name {
            c.name = n.clone();
        }
        if let Some(r) = &self.code_rate {
            c.rate = CodeRate::parse(r)?;
        }
        set(&mut c.code_length, self.code_length);
        set(&mut c.max_iters, self.max_iters);
        set(&mut c.interleave, self.interleave);
        set(&mut c.deshape, self.deshape);
        match &mut c.modulation {
            Modulation::Pam { bits_per_dim, labeling, lrb, map_decision } => {
                set(bits_per_dim, self.bits_per_dim);
                set(map_decision, self.map_decision);
                if let Some(l) = &self.labeling {
                    *labeling = AmplitudeLabeling::parse(l)?;
                }
                if let Some(l) = &self.lrb_label {
                    *lrb = LrbLabel::parse(l)?;
                }
                let s: &mut ShaperSpec = c.shaper.as_mut().ok_or_else(|| Error::Config("ps-mlc needs a shaper".into()))?;
                if let Some(k) = &self.shaper {
                    s.kind = ShaperKind::parse(k)?;
                }
                set(&mut s.n, self.blocklength);
                set(&mut s.rs, self.rs);
                if self.composition.is_some() {
                    s.composition = self.composition.clone();
                }
                self.reject(&[("pair", self.pair.is_some()), ("offset", self.offset.is_some()), ("qam_order", self.qam_order.is_some())])?;
            }
            Modulation::Voronoi { pair, offset } => {
                set(pair, self.pair.clone());
                if let Some(o) = &self.offset {
                    *offset = OffsetMode::parse(o)?;
                }
                self.reject_ps()?;
                self.reject(&[("qam_order", self.qam_order.is_some())])?;
            }
            Modulation::Qam { order } => {
                set(order, self.qam_order);
                self.reject_ps()?;
                self.reject(&[("pair", self.pair.is_some()), ("offset", self.offset.is_some())])?;
            }
        }
        Ok(c)
    }

    fn reject(&self, keys: &[(&str, bool)]) -> Result<()> {
        match keys.iter().find(|k| k.1) {
            Some((k, _)) => Err(Error::Config(format!("key `{k}` does not apply to this scheme"))),
            None => Ok(()),
        }
    }

    fn reject_ps(&self) -> Result<()> {
        self.reject(&[
            ("bits_per_dim", self.bits_per_dim.is_some()),
            ("labeling", self.labeling.is_some()),
            ("lrb_label", self.lrb_label.is_some()),
            ("map_decision", self.map_decision.is_some()),
            ("shaper", self.shaper.is_some()),
            ("blocklength", self.blocklength.is_some()),
            ("rs", self.rs.is_some()),
            ("composition", self.composition.is_some()),
        ])
    }

    pub fn run_spec(&self) -> Result<RunSpec> {
        let config = self.chain_config()?;
        let snrs = parse_snr_grid(self.snr.as_deref().ok_or_else(|| Error::Config("missing `snr`".into()))?)?;
        let d = StopRule::default();
        let spec = RunSpec {
            config,
            snrs,
            stop: StopRule {
                min_errors: self.min_errors.unwrap_or(d.min_errors),
                min_bits: self.min_bits.unwrap_or(d.min_bits),
                max_bits: self.max_bits.unwrap_or(d.max_bits),
            },
            seed: self.seed.unwrap_or(1),
            workers: self.workers.unwrap_or(0),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}
