//! `cmsim`: BER sweeps, threshold gains, rate audit and projection export.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use cmsim::chains::{compute_rate, presets, rate_audit, Chain};
use cmsim::harness::{
    compare_gains, find_crossing, projection, read_csv_file, run_point, snr_at_ber, write_csv,
    write_csv_file, write_projection_csv, RunFile, DEFAULT_THRESHOLD,
};
use cmsim::Result;

#[derive(Parser)]
#[command(name = "cmsim", version, about = "Coded-modulation BER simulator: PS-MLC, VC-MLC and QAM BICM")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a preset over an SNR grid and write BER records as CSV.
    Run {
        /// Flat TOML run file; command-line flags override its keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// SNR grid in dB: a:b:step or a comma list.
        #[arg(long)]
        snr: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        min_errors: Option<u64>,
        #[arg(long)]
        min_bits: Option<u64>,
        #[arg(long)]
        max_bits: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Gain of the first record set over the second at a BER threshold.
    Gains {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Print the transmission rate of every reference rate-table preset.
    AuditRates,
    /// List presets with their transmission rates.
    Presets,
    /// Locate a BER crossing by stepping and bisection.
    Threshold {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        start: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = 0.1)]
        resolution: f64,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        target: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export (x, y) samples of the transmitted 2-D symbols.
    Proj {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Run { config, preset, snr, seed, out, min_errors, min_bits, max_bits, workers } => {
            let mut file = match &config {
                Some(p) => RunFile::load(p)?,
                None => RunFile::default(),
            };
            if preset.is_some() {
                file.preset = preset;
            }
            file.snr = snr.or(file.snr);
            file.seed = seed.or(file.seed);
            file.min_errors = min_errors.or(file.min_errors);
            file.min_bits = min_bits.or(file.min_bits);
            file.max_bits = max_bits.or(file.max_bits);
            file.workers = workers.or(file.workers);
            let out = out.or(file.out.as_ref().map(PathBuf::from));
            let spec = file.run_spec()?;
            let chain = Chain::build(&spec.config, spec.seed)?;
            eprintln!("{}: R_t = {} bits/2-D", spec.config.name, compute_rate(&spec.config)?.display());
            let mut records = Vec::with_capacity(spec.snrs.len());
            for (p, &s) in spec.snrs.iter().enumerate() {
                let r = run_point(&chain, s, &spec.stop, spec.seed, p as u32)?;
                eprintln!("  {:6.2} dB  ber {:.4e}  ({} frames, {:.1} s)", s, r.ber, r.frames, r.seconds);
                records.push(r);
            }
            match out {
                Some(p) => write_csv_file(&records, &p)?,
                None => write_csv(&records, std::io::stdout().lock())?,
            }
        }
        Cmd::Gains { a, b, threshold } => {
            let (ra, rb) = (read_csv_file(&a)?, read_csv_file(&b)?);
            let (sa, sb) = (snr_at_ber(&ra, threshold)?, snr_at_ber(&rb, threshold)?);
            let gain = compare_gains(&ra, &rb, threshold)?;
            println!("threshold {threshold:e}: {} at {sa:.3} dB, {} at {sb:.3} dB", a.display(), b.display());
            println!("gain {gain:.3} dB");
        }
        Cmd::AuditRates => {
            let t = Instant::now();
            let mut ok = true;
            println!("{:<26} {:<24} {:>7} {:>9} {:>8}", "preset", "table row", "printed", "computed", "exact");
            for r in rate_audit()? {
                ok &= r.matches;
                println!(
                    "{:<26} {:<24} {:>7} {:>9} {:>8} {}",
                    r.preset,
                    r.table_label,
                    r.printed,
                    r.computed,
                    r.exact,
                    if r.matches { "ok" } else { "MISMATCH" }
                );
            }
            println!("{} in {:.1} ms", if ok { "all rows match" } else { "mismatch" }, t.elapsed().as_secs_f64() * 1e3);
            if !ok {
                return Err(cmsim::Error::Config("rate audit failed".into()));
            }
        }
        Cmd::Presets => {
            for p in presets() {
                println!("{:<26} {:>6}  {}", p.config.name, compute_rate(&p.config)?.display(), p.config.scheme.name());
            }
        }
        Cmd::Threshold { preset, start, step, resolution, target, seed, out } => {
            let cfg = cmsim::chains::preset(&preset)?;
            let chain = Chain::build(&cfg, seed)?;
            let c = find_crossing(&chain, target, start, step, resolution, &Default::default(), seed)?;
            for r in &c.records {
                eprintln!("  {:6.3} dB  ber {:.4e}  ({} frames)", r.snr_db, r.ber, r.frames);
            }
            println!("{preset}: BER {target:e} at {:.3} dB", c.snr_db);
            if let Some(p) = out {
                write_csv_file(&c.records, &p)?;
            }
        }
        Cmd::Proj { preset, samples, seed, out } => {
            let pts = projection(&cmsim::chains::preset(&preset)?, samples, seed)?;
            match out {
                Some(p) => write_projection_csv(&pts, std::fs::File::create(p)?)?,
                None => write_projection_csv(&pts, std::io::stdout().lock())?,
            }
        }
    }
    std::io::stdout().flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
