//! Monte-Carlo BER engine: SNR sweeps under a stop rule, threshold-crossing
//! interpolation and CSV records.
//!
//! Frame f of SNR point p draws all of its randomness from
//! `stream_rng(seed, (p << 32) | f)`. Frames are simulated in fixed-size
//! batches and the stop rule is checked between batches, so a record depends
//! only on (config, seed) and never on the worker count.

mod config;
mod stats;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::{Chain, ChainConfig, FrameCounters};
use crate::channel::{stream_rng, ChannelSpec};
use crate::error::{Error, Result};

pub use config::{parse_snr_grid, RunFile};
pub use stats::{compare_gains, snr_at_ber, wilson_ci95_rel};

/// Frames simulated between two stop-rule checks.
pub const BATCH_FRAMES: u64 = 4;
/// Default pre-HD-FEC BER threshold.
pub const DEFAULT_THRESHOLD: f64 = 4.5e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub min_errors: u64,
    pub min_bits: u64,
    /// Hard cap; a point stops here even if the minimums are unmet.
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { min_errors: 200, min_bits: 2_000_000, max_bits: 200_000_000 }
    }
}

impl StopRule {
    pub fn validate(&self) -> Result<()> {
        if self.min_errors == 0 || self.min_bits == 0 || self.max_bits == 0 {
            return Err(Error::Config("stop-rule fields must be positive".into()));
        }
        if self.max_bits < self.min_bits {
            return Err(Error::Config(format!("max_bits {} is below min_bits {}", self.max_bits, self.min_bits)));
        }
        Ok(())
    }

    pub fn done(&self, c: &FrameCounters) -> bool {
        (c.errors >= self.min_errors && c.bits >= self.min_bits) || c.bits >= self.max_bits
    }
}

#[derive(Clone, Debug)]
pub struct RunSpec {
    pub config: ChainConfig,
    /// Strictly increasing.
    pub snrs: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

impl RunSpec {
    pub fn new(config: ChainConfig, snrs: Vec<f64>) -> Self {
        RunSpec { config, snrs, stop: StopRule::default(), seed: 1, workers: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        self.stop.validate()?;
        if self.snrs.is_empty() {
            return Err(Error::Config("empty SNR list".into()));
        }
        if self.snrs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config(format!("SNR list {:?} is not strictly increasing", self.snrs)));
        }
        Ok(())
    }
}

/// One CSV row plus the full counter breakdown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub preset: String,
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub frames: u64,
    pub ci95_rel: f64,
    pub seconds: f64,
    #[serde(skip)]
    pub counters: FrameCounters,
}

impl BerRecord {
    fn from_counters(preset: &str, snr_db: f64, c: FrameCounters, seconds: f64) -> Self {
        BerRecord {
            preset: preset.to_string(),
            snr_db,
            bits: c.bits,
            errors: c.errors,
            ber: c.ber(),
            frames: c.frames,
            ci95_rel: wilson_ci95_rel(c.errors, c.bits),
            seconds,
            counters: c,
        }
    }

    /// Equality of everything but wall time.
    pub fn same_counts(&self, o: &BerRecord) -> bool {
        self.preset == o.preset && self.snr_db == o.snr_db && self.counters == o.counters
    }
}

/// Run the stop rule at one SNR; `point` keys the noise streams.
pub fn run_point(chain: &Chain, snr_db: f64, stop: &StopRule, seed: u64, point: u32) -> Result<BerRecord> {
    let ch = ChannelSpec::new(snr_db)?;
    let t = Instant::now();
    let mut total = FrameCounters::default();
    let mut next = 0u64;
    while !stop.done(&total) {
        let batch: Vec<FrameCounters> = (next..next + BATCH_FRAMES)
            .into_par_iter()
            .map(|f| chain.simulate_frame(&ch, &mut stream_rng(seed, (u64::from(point) << 32) | f)))
            .collect::<Result<_>>()?;
        // merge in frame order, then re-check between batches only
        batch.iter().for_each(|c| total.merge(c));
        next += BATCH_FRAMES;
    }
    Ok(BerRecord::from_counters(chain.name(), snr_db, total, t.elapsed().as_secs_f64()))
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// One record per SNR point, in the order given.
pub fn run_sweep(spec: &RunSpec) -> Result<Vec<BerRecord>> {
    spec.validate()?;
    crate::chains::compute_rate(&spec.config)?;
    let chain = Chain::build(&spec.config, spec.seed)?;
    with_workers(spec.workers, || {
        spec.snrs
            .iter()
            .enumerate()
            .map(|(p, &snr)| run_point(&chain, snr, &spec.stop, spec.seed, p as u32))
            .collect()
    })?
}

/// Records around a BER crossing, found by stepping from `start` and then
/// bisecting until the bracket is at most `resolution` dB wide.
#[derive(Clone, Debug)]
pub struct Crossing {
    pub records: Vec<BerRecord>,
    pub snr_db: f64,
}

/// Locate the SNR where `chain` crosses `target`. Points are keyed by a
/// running index, so the search is deterministic in `seed`. The final
/// estimate interpolates log-linearly over the bracket; when the upper end
/// still has no error at resolution/8 its midpoint is returned.
pub fn find_crossing(
    chain: &Chain,
    target: f64,
    start: f64,
    step: f64,
    resolution: f64,
    stop: &StopRule,
    seed: u64,
) -> Result<Crossing> {
    if !(step > 0.0 && resolution > 0.0) {
        return Err(Error::Config("step and resolution must be positive".into()));
    }
    let mut records: Vec<BerRecord> = Vec::new();
    let mut point = 0u32;
    let mut eval = |snr: f64, records: &mut Vec<BerRecord>| -> Result<f64> {
        let r = run_point(chain, snr, stop, seed, point)?;
        point += 1;
        let ber = r.ber;
        records.push(r);
        Ok(ber)
    };
    // a bracket needs a nonzero BER on both sides of the target
    let above = |b: f64| b >= target;
    let (mut lo, mut hi);
    let b0 = eval(start, &mut records)?;
    if above(b0) {
        lo = start;
        hi = start + step;
        let mut guard = 0;
        while above(eval(hi, &mut records)?) {
            lo = hi;
            hi += step;
            guard += 1;
            if guard > 40 {
                return Err(Error::NoBracket { target, nearest: format!("BER stays above target up to {hi} dB") });
            }
        }
    } else {
        hi = start;
        lo = start - step;
        let mut guard = 0;
        while !above(eval(lo, &mut records)?) {
            hi = lo;
            lo -= step;
            guard += 1;
            if guard > 40 {
                return Err(Error::NoBracket { target, nearest: format!("BER stays below target down to {lo} dB") });
            }
        }
    }
    let ber_at = |records: &[BerRecord], s: f64| records.iter().rev().find(|r| r.snr_db == s).map_or(0.0, |r| r.ber);
    // a zero count at `hi` cannot anchor a log-linear interpolation; keep
    // bisecting a little further in that case
    while hi - lo > resolution || (ber_at(&records, hi) == 0.0 && hi - lo > resolution / 8.0) {
        let mid = 0.5 * (lo + hi);
        if above(eval(mid, &mut records)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pick = |s: f64| records.iter().rev().find(|r| r.snr_db == s).cloned().expect("evaluated point");
    let snr_db = if pick(hi).errors == 0 {
        // cliff: no error at hi even within resolution/8, report the midpoint
        0.5 * (lo + hi)
    } else {
        snr_at_ber(&[pick(lo), pick(hi)], target)?
    };
    records.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    Ok(Crossing { records, snr_db })
}

pub const CSV_HEADER: [&str; 8] = ["preset", "snr_db", "bits", "errors", "ber", "frames", "ci95_rel", "seconds"];

pub fn write_csv<W: std::io::Write>(records: &[BerRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(records: &[BerRecord], path: &Path) -> Result<()> {
    write_csv(records, std::fs::File::create(path)?)
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<BerRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected CSV header {:?}", header.iter().collect::<Vec<_>>())));
    }
    rd.deserialize().map(|r| r.map_err(|e| Error::Parse(e.to_string()))).collect()
}

pub fn read_csv_file(path: &Path) -> Result<Vec<BerRecord>> {
    read_csv(std::fs::File::open(path)?)
}

/// (x, y) pairs of transmitted 2-D symbols, for projection plots.
pub fn projection(config: &ChainConfig, samples: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let chain = Chain::build(config, seed)?;
    let mut out = Vec::with_capacity(samples);
    let mut f = 0;
    while out.len() < samples {
        let tx = chain.transmit(&mut stream_rng(seed, f))?;
        out.extend(tx.symbols.chunks_exact(2).map(|p| (p[0], p[1])).take(samples - out.len()));
        f += 1;
    }
    Ok(out)
}

pub fn write_projection_csv<W: std::io::Write>(points: &[(f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y"]).map_err(|e| Error::Io(e.to_string()))?;
    for (x, y) in points {
        w.write_record([x.to_string(), y.to_string()]).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
