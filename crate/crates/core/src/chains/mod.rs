//! End-to-end coded-modulation chains: PS-MLC, VC-MLC and the uniform QAM
//! BICM baseline, with their rate bookkeeping and named presets.
//!
//! Every chain processes one inner LDPC codeword per frame. Transmit streams
//! are real vectors in which entries 2i and 2i + 1 form complex symbol i;
//! a 24-D lattice point occupies 24 consecutive entries.
//!
//! The pre-HD-FEC BER counts, per frame, the inner-code information bits
//! after soft decoding plus the uncoded label bits (PAM amplitude labels or
//! VC MRBs) after the hard-decision stage. For PS chains the deshaper also
//! runs, and its bit errors are reported in separate counters.

mod bicm;
mod ps;
mod rate;
mod vc;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::fec::CodeRate;
use crate::mapping::{AmplitudeLabeling, LrbLabel};
use crate::shaping::ShaperKind;
use crate::voronoi::OffsetMode;

pub use bicm::BicmChain;
pub use ps::PsMlcChain;
pub use rate::{compute_rate, format_sig3, rate_audit, RateAuditRow, TransmissionRate};
pub use vc::VcMlcChain;

/// Coded-modulation scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    PsMlc,
    VcMlc,
    Bicm,
}

impl Scheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ps-mlc" => Ok(Scheme::PsMlc),
            "vc-mlc" => Ok(Scheme::VcMlc),
            "bicm" => Ok(Scheme::Bicm),
            other => Err(Error::Config(format!("unknown scheme `{other}` (ps-mlc, vc-mlc, bicm)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::PsMlc => "ps-mlc",
            Scheme::VcMlc => "vc-mlc",
            Scheme::Bicm => "bicm",
        }
    }
}

/// Matcher settings of a PS chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ShaperSpec {
    pub kind: ShaperKind,
    /// Blocklength N.
    pub n: usize,
    /// Target shaping rate R_s; L = round(N·R_s).
    pub rs: f64,
    /// Explicit CCDM composition overriding the selection.
    pub composition: Option<Vec<usize>>,
}

impl ShaperSpec {
    pub fn l(&self) -> usize {
        (self.n as f64 * self.rs).round() as usize
    }
}

/// Scheme-specific modulation parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Modulation {
    /// 2^m-PAM per real dimension, sign-decomposable labels.
    Pam { bits_per_dim: usize, labeling: AmplitudeLabeling, lrb: LrbLabel, map_decision: bool },
    /// Voronoi constellation of a nested pair ("Z24/8RL24").
    Voronoi { pair: String, offset: OffsetMode },
    /// Gray-labeled square QAM.
    Qam { order: usize },
}

/// One simulated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub name: String,
    pub scheme: Scheme,
    pub modulation: Modulation,
    pub shaper: Option<ShaperSpec>,
    pub rate: CodeRate,
    pub code_length: usize,
    pub max_iters: usize,
    /// Bit interleaving between encoder and mapper, keyed by the run seed.
    pub interleave: bool,
    /// Run the deshaper on received PS blocks.
    pub deshape: bool,
}

/// Reference rate-table row a preset reproduces: label and printed R_t.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub label: &'static str,
    pub printed_rt: &'static str,
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub config: ChainConfig,
    pub table_row: Option<TableRow>,
}

fn ps(name: &str, m: usize, kind: ShaperKind, n: usize, rs: f64, rate: CodeRate) -> ChainConfig {
    ChainConfig {
        name: name.into(),
        scheme: Scheme::PsMlc,
        modulation: Modulation::Pam {
            bits_per_dim: m,
            labeling: AmplitudeLabeling::Natural,
            lrb: LrbLabel::SetPartition,
            map_decision: false,
        },
        shaper: Some(ShaperSpec { kind, n, rs, composition: None }),
        rate,
        code_length: crate::fec::NORMAL_LENGTH,
        max_iters: crate::fec::DEFAULT_MAX_ITERS,
        interleave: true,
        deshape: true,
    }
}

fn vc(name: &str, pair: &str, rate: CodeRate) -> ChainConfig {
    ChainConfig {
        name: name.into(),
        scheme: Scheme::VcMlc,
        modulation: Modulation::Voronoi { pair: pair.into(), offset: OffsetMode::Generic },
        shaper: None,
        rate,
        code_length: crate::fec::NORMAL_LENGTH,
        max_iters: crate::fec::DEFAULT_MAX_ITERS,
        interleave: true,
        deshape: false,
    }
}

fn bicm(name: &str, order: usize, rate: CodeRate) -> ChainConfig {
    ChainConfig {
        name: name.into(),
        scheme: Scheme::Bicm,
        modulation: Modulation::Qam { order },
        shaper: None,
        rate,
        code_length: crate::fec::NORMAL_LENGTH,
        max_iters: crate::fec::DEFAULT_MAX_ITERS,
        interleave: true,
        deshape: false,
    }
}

const fn row(label: &'static str, printed_rt: &'static str) -> Option<TableRow> {
    Some(TableRow { label, printed_rt })
}

/// Every shipped preset, reference rate-table rows first in table order.
pub fn presets() -> Vec<Preset> {
    use CodeRate::*;
    use ShaperKind::*;
    let p = |config, table_row| Preset { config, table_row };
    vec![
        p(vc("vc24-72-mlc", "Z24/8RL24", R2_3), row("Λ24^72 MLC 2/3", "5.33")),
        p(bicm("qam64-bicm", 64, R8_9), row("64QAM BICM 8/9", "5.33")),
        p(ps("ps64qam-ccdm200", 3, Ccdm, 200, 1.87, R4_5), row("PS-64QAM MLC 4/5 R_s 1.87", "5.34")),
        p(vc("vc24-96-mlc", "Z24/16RL24", R3_5), row("Λ24^96 MLC 3/5", "7.2")),
        p(bicm("qam256-bicm", 256, R9_10), row("256QAM BICM 9/10", "7.2")),
        p(ps("ps256qam-ccdm200", 4, Ccdm, 200, 2.8, R4_5), row("PS-256QAM MLC 4/5 R_s 2.8", "7.2")),
        p(ps("ps256qam-rs187-ccdm200", 4, Ccdm, 200, 1.87, R4_5), row("PS-256QAM MLC 4/5 R_s 1.87", "5.34")),
        p(ps("ps64qam-ccdm1024", 3, Ccdm, 1024, 1.87, R4_5), None),
        p(ps("ps64qam-ess200", 3, Ess, 200, 1.87, R4_5), None),
        p(ps("ps256qam-ccdm1024", 4, Ccdm, 1024, 2.8, R4_5), None),
        p(ps("ps256qam-ess200", 4, Ess, 200, 2.8, R4_5), None),
        p(ps("ps256qam-rs187-ess200", 4, Ess, 200, 1.87, R4_5), None),
    ]
}

/// Preset by name. A `-short` suffix swaps in the length-720 test code;
/// `debug-noiseless` is a tiny VC chain meant for zero-noise checks.
pub fn preset(name: &str) -> Result<ChainConfig> {
    if let Some(base) = name.strip_suffix("-short") {
        let mut c = preset(base)?;
        c.code_length = crate::fec::TEST_LENGTH;
        c.name = name.to_string();
        return Ok(c);
    }
    if name == "debug-noiseless" {
        let mut c = vc("debug-noiseless", "E8/4E8", CodeRate::R2_3);
        c.code_length = crate::fec::TEST_LENGTH;
        return Ok(c);
    }
    presets()
        .into_iter()
        .find(|p| p.config.name == name)
        .map(|p| p.config)
        .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))
}

/// Bit and error counts of one or more frames. Merging is plain integer
/// addition, so any merge order gives the same totals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameCounters {
    pub frames: u64,
    /// Pre-HD-FEC bits and errors (coded info + uncoded labels).
    pub bits: u64,
    pub errors: u64,
    /// Inner-code information bits after soft decoding.
    pub coded_bits: u64,
    pub coded_errors: u64,
    /// Uncoded label bits after the hard-decision stage.
    pub uncoded_bits: u64,
    pub uncoded_errors: u64,
    /// Frames whose decoder stopped without a valid codeword.
    pub ldpc_failures: u64,
    /// Shaper input bits after deshaping (PS only); failed blocks count
    /// every bit as an error.
    pub deshaped_bits: u64,
    pub deshaped_errors: u64,
    pub deshape_failures: u64,
}

impl FrameCounters {
    pub fn merge(&mut self, o: &FrameCounters) {
        self.frames += o.frames;
        self.bits += o.bits;
        self.errors += o.errors;
        self.coded_bits += o.coded_bits;
        self.coded_errors += o.coded_errors;
        self.uncoded_bits += o.uncoded_bits;
        self.uncoded_errors += o.uncoded_errors;
        self.ldpc_failures += o.ldpc_failures;
        self.deshaped_bits += o.deshaped_bits;
        self.deshaped_errors += o.deshaped_errors;
        self.deshape_failures += o.deshape_failures;
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }

    fn finish(&mut self) {
        self.frames = 1;
        self.bits = self.coded_bits + self.uncoded_bits;
        self.errors = self.coded_errors + self.uncoded_errors;
    }
}

/// What a transmitter emitted, kept for error counting.
#[derive(Clone, Debug)]
pub struct TxFrame {
    /// Real transmit stream (complex symbols interleaved re/im).
    pub symbols: Vec<f64>,
    /// Inner-code information bits.
    pub coded_info: Vec<u8>,
    /// Uncoded label bits in transmit order.
    pub uncoded: Vec<u8>,
    /// PS only: the shaper input bits of every complete block.
    pub shaper_input: Vec<Vec<u8>>,
}

/// A constructed chain, ready to simulate frames.
#[derive(Clone, Debug)]
pub enum Chain {
    Ps(PsMlcChain),
    Vc(VcMlcChain),
    Bicm(BicmChain),
}

impl Chain {
    /// Build a chain; `seed` keys the interleaver.
    pub fn build(config: &ChainConfig, seed: u64) -> Result<Self> {
        match config.scheme {
            Scheme::PsMlc => Ok(Chain::Ps(PsMlcChain::new(config, seed)?)),
            Scheme::VcMlc => Ok(Chain::Vc(VcMlcChain::new(config, seed)?)),
            Scheme::Bicm => Ok(Chain::Bicm(BicmChain::new(config, seed)?)),
        }
    }

    pub fn config(&self) -> &ChainConfig {
        match self {
            Chain::Ps(c) => c.config(),
            Chain::Vc(c) => c.config(),
            Chain::Bicm(c) => c.config(),
        }
    }

    pub fn name(&self) -> &str {
        &self.config().name
    }

    pub fn transmit(&self, rng: &mut ChaCha8Rng) -> Result<TxFrame> {
        match self {
            Chain::Ps(c) => c.transmit(rng),
            Chain::Vc(c) => c.transmit(rng),
            Chain::Bicm(c) => c.transmit(rng),
        }
    }

    pub fn receive(&self, tx: &TxFrame, y: &[f64], sigma2: f64) -> Result<FrameCounters> {
        match self {
            Chain::Ps(c) => c.receive(tx, y, sigma2),
            Chain::Vc(c) => c.receive(tx, y, sigma2),
            Chain::Bicm(c) => c.receive(tx, y, sigma2),
        }
    }

    /// Transmit, add noise, receive: the counters of one frame.
    pub fn simulate_frame(&self, channel: &ChannelSpec, rng: &mut ChaCha8Rng) -> Result<FrameCounters> {
        let tx = self.transmit(rng)?;
        let y = channel.add_noise(&tx.symbols, rng);
        self.receive(&tx, &y, channel.sigma2)
    }

    /// Mean transmit energy per 2-D over `frames` frames.
    pub fn mean_energy(&self, frames: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        let mut total = 0.0;
        let mut dims = 0usize;
        for _ in 0..frames.max(1) {
            let tx = self.transmit(rng)?;
            total += tx.symbols.iter().map(|v| v * v).sum::<f64>();
            dims += tx.symbols.len();
        }
        Ok(2.0 * total / dims as f64)
    }
}

/// Count differing bits.
pub(crate) fn bit_errors(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| (**x ^ **y) & 1 == 1).count() as u64
}
