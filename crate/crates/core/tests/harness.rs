use std::process::Command;
use std::time::Instant;

use cmsim::chains::{preset, Chain, FrameCounters};
use cmsim::harness::{
    compare_gains, find_crossing, parse_snr_grid, read_csv, run_sweep, snr_at_ber, wilson_ci95_rel, write_csv,
    BerRecord, RunFile, RunSpec, StopRule,
};
use cmsim::Error;

fn rec(snr_db: f64, ber: f64) -> BerRecord {
    let bits = 1_000_000u64;
    let errors = (ber * bits as f64).round() as u64;
    BerRecord {
        preset: "t".into(),
        snr_db,
        bits,
        errors,
        ber,
        frames: 1,
        ci95_rel: wilson_ci95_rel(errors, bits),
        seconds: 0.0,
        counters: FrameCounters::default(),
    }
}

#[test]
fn interpolation_examples() {
    let r = [rec(17.0, 1e-2), rec(18.0, 1e-3)];
    assert!((snr_at_ber(&r, 4.5e-3).unwrap() - 17.346_787_486).abs() < 1e-6);
    assert_eq!(snr_at_ber(&r, 1e-3).unwrap(), 18.0);
    match snr_at_ber(&r, 1e-5) {
        Err(Error::NoBracket { nearest, .. }) => assert!(nearest.contains("18 dB")),
        other => panic!("{other:?}"),
    }
    // order of records does not matter
    assert_eq!(snr_at_ber(&[r[1].clone(), r[0].clone()], 4.5e-3).unwrap(), snr_at_ber(&r, 4.5e-3).unwrap());
    assert_eq!(compare_gains(&r, &r, 4.5e-3).unwrap(), 0.0);
    let shifted = [rec(17.5, 1e-2), rec(18.5, 1e-3)];
    assert!((compare_gains(&r, &shifted, 4.5e-3).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn zero_ber_points_do_not_anchor_a_crossing() {
    let r = [rec(17.0, 1e-2), rec(18.0, 0.0)];
    assert!(matches!(snr_at_ber(&r, 4.5e-3), Err(Error::NoBracket { .. })));
}

#[test]
fn wilson_interval() {
    let rel = wilson_ci95_rel(200, 2_000_000);
    assert!((0.13..0.145).contains(&rel), "{rel}");
    assert!(wilson_ci95_rel(0, 100).is_infinite());
    assert!(wilson_ci95_rel(2000, 2_000_000) < wilson_ci95_rel(200, 2_000_000));
}

#[test]
fn snr_grids() {
    assert_eq!(parse_snr_grid("16:17:0.25").unwrap(), [16.0, 16.25, 16.5, 16.75, 17.0]);
    assert_eq!(parse_snr_grid("1,2.5").unwrap(), [1.0, 2.5]);
    assert!(parse_snr_grid("3:1:0.5").is_err());
    assert!(parse_snr_grid("1:2:0").is_err());
    assert!(parse_snr_grid("x").is_err());
}

#[test]
fn spec_validation() {
    let cfg = preset("debug-noiseless").unwrap();
    let mut s = RunSpec::new(cfg.clone(), vec![3.0, 3.0]);
    assert!(s.validate().is_err());
    s.snrs = vec![3.0, 2.0];
    assert!(s.validate().is_err());
    s.snrs = vec![3.0];
    s.stop.min_errors = 0;
    assert!(s.validate().is_err());
    assert!(run_sweep(&s).is_err());
}

fn small_stop() -> StopRule {
    StopRule { min_errors: 50, min_bits: 20_000, max_bits: 100_000 }
}

#[test]
fn noiseless_debug_preset_gives_zero_ber() {
    let mut s = RunSpec::new(preset("debug-noiseless").unwrap(), vec![200.0]);
    s.stop = small_stop();
    let r = run_sweep(&s).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!((r[0].errors, r[0].ber), (0, 0.0));
    assert!(r[0].bits >= 100_000);
}

#[test]
fn records_follow_the_stop_rule_and_are_deterministic() {
    let mut s = RunSpec::new(preset("qam64-bicm-short").unwrap(), vec![10.0, 12.0, 14.0]);
    s.stop = small_stop();
    s.seed = 5;
    let a = run_sweep(&s).unwrap();
    s.workers = 2;
    let b = run_sweep(&s).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(x.same_counts(y));
        assert!((x.errors >= 50 && x.bits >= 20_000) || x.bits >= 100_000);
        assert_eq!(x.ber, x.errors as f64 / x.bits as f64);
        assert!(x.frames > 0);
    }
    assert!(a[0].ber > a[2].ber);
    let strip = |rs: &[BerRecord]| {
        let mut v = Vec::new();
        let rs: Vec<BerRecord> = rs.iter().cloned().map(|mut r| {
            r.seconds = 0.0;
            r
        }).collect();
        write_csv(&rs, &mut v).unwrap();
        v
    };
    assert_eq!(strip(&a), strip(&b));
    s.seed = 6;
    assert!(!run_sweep(&s).unwrap()[0].same_counts(&a[0]));
}

#[test]
fn csv_round_trip_and_header() {
    let r = vec![rec(17.0, 1e-2), rec(18.0, 1e-3)];
    let mut buf = Vec::new();
    write_csv(&r, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("preset,snr_db,bits,errors,ber,frames,ci95_rel,seconds\n"));
    let back = read_csv(&buf[..]).unwrap();
    assert_eq!(back.len(), 2);
    assert_eq!((back[1].snr_db, back[1].errors, back[1].ber), (18.0, 1000, 1e-3));
    assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
}

#[test]
fn run_files() {
    let f = RunFile::from_toml("preset = \"ps64qam-ccdm200\"\nblocklength = 1024\nsnr = \"16:17:0.5\"\nseed = 3\n").unwrap();
    let s = f.run_spec().unwrap();
    assert_eq!(s.config.shaper.as_ref().unwrap().n, 1024);
    assert_eq!((s.snrs.len(), s.seed), (3, 3));
    assert_eq!(s.stop, StopRule::default());
    assert!(RunFile::from_toml("bogus = 1").is_err());
    let f = RunFile::from_toml("preset = \"qam64-bicm\"\nrs = 1.5\nsnr = \"1\"").unwrap();
    assert!(f.run_spec().is_err());
    let f = RunFile::from_toml("scheme = \"vc-mlc\"\npair = \"E8/4E8\"\ncode_length = 720\nsnr = \"10\"").unwrap();
    let c = f.chain_config().unwrap();
    assert_eq!(c.code_length, 720);
    assert!(RunFile::from_toml("snr = \"1\"").unwrap().run_spec().is_err());
}

#[test]
fn crossing_search_brackets_the_target() {
    let chain = Chain::build(&preset("qam64-bicm-short").unwrap(), 1).unwrap();
    let stop = StopRule { min_errors: 100, min_bits: 50_000, max_bits: 2_000_000 };
    let c = find_crossing(&chain, 1e-2, 10.0, 1.0, 0.25, &stop, 1).unwrap();
    let below = c.records.iter().filter(|r| r.snr_db < c.snr_db).all(|r| r.ber >= 1e-2);
    let above = c.records.iter().filter(|r| r.snr_db > c.snr_db).all(|r| r.ber < 1e-2);
    assert!(below && above, "{:?}", c.records.iter().map(|r| (r.snr_db, r.ber)).collect::<Vec<_>>());
}

fn cli(args: &[&str]) -> (bool, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cmsim")).args(args).output().unwrap();
    (out.status.success(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn cli_audit_rates_is_fast() {
    let t = Instant::now();
    let (ok, out) = cli(&["audit-rates"]);
    assert!(t.elapsed().as_secs_f64() < 1.0);
    assert!(ok);
    assert!(out.contains("all rows match"));
    assert_eq!(out.matches(" ok").count(), 7);
}

#[test]
fn cli_run_and_gains() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "preset = \"qam64-bicm-short\"\nmin_bits = 20000\nmax_bits = 100000\nmin_errors = 50\n").unwrap();
    let (ok, _) = cli(&["run", "--config", cfg.to_str().unwrap(), "--snr", "12:20:2", "--out", csv.to_str().unwrap()]);
    assert!(ok);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 6);
    let (ok, out) = cli(&["gains", csv.to_str().unwrap(), csv.to_str().unwrap(), "--threshold", "3e-2"]);
    assert!(ok, "{out}");
    assert!(out.contains("gain 0.000 dB"));
    let (ok, _) = cli(&["run", "--preset", "nope", "--snr", "1"]);
    assert!(!ok);
    let proj = dir.path().join("p.csv");
    let (ok, _) = cli(&["proj", "--preset", "ps64qam-ccdm200-short", "--samples", "100", "--out", proj.to_str().unwrap()]);
    assert!(ok);
    assert_eq!(std::fs::read_to_string(&proj).unwrap().lines().count(), 101);
}
