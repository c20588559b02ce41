//! AWGN channel with SNR defined as Es/N0 per two real dimensions.
//!
//! Constellations are normalized to Es = 1 per 2-D, so the noise variance
//! per real dimension is σ² = Es / (2·10^(SNR/10)). Noise streams are ChaCha8
//! keyed by (seed, stream index), which makes every worker's draws
//! reproducible independently of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// SNRs at or below this are treated as degenerate.
pub const MIN_SNR_DB: f64 = -100.0;

/// Noise variance per real dimension for a per-2-D SNR in dB.
pub fn sigma2_from_snr(snr_db: f64, es: f64) -> Result<f64> {
    if !snr_db.is_finite() || snr_db <= MIN_SNR_DB {
        return Err(Error::InvalidSnr(snr_db));
    }
    if !(es > 0.0) {
        return Err(Error::Config(format!("signal energy {es} must be positive")));
    }
    Ok(es / (2.0 * 10f64.powf(snr_db / 10.0)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    pub snr_db: f64,
    pub sigma2: f64,
    pub es: f64,
}

impl ChannelSpec {
    /// Unit-energy channel at `snr_db`.
    pub fn new(snr_db: f64) -> Result<Self> {
        Self::with_energy(snr_db, 1.0)
    }

    pub fn with_energy(snr_db: f64, es: f64) -> Result<Self> {
        Ok(ChannelSpec { snr_db, sigma2: sigma2_from_snr(snr_db, es)?, es })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// y = x + n in place.
    pub fn add_noise_in_place(&self, x: &mut [f64], rng: &mut ChaCha8Rng) {
        let s = self.sigma();
        for v in x.iter_mut() {
            let n: f64 = StandardNormal.sample(rng);
            *v += s * n;
        }
    }

    pub fn add_noise(&self, x: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut y = x.to_vec();
        self.add_noise_in_place(&mut y, rng);
        y
    }
}

/// Independent generator for (seed, stream); streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
