//! Inner soft-decision LDPC coding and outer hard-decision FEC bookkeeping.
//!
//! DVB-S2 parity-check matrices are built from the standard's address
//! tables: information bit j of group t = j / 360 connects to checks
//! `(x + (j mod 360)·q) mod m` for every address x in row t, and the parity
//! part is the dual-diagonal staircase. Short blocklength test codes (n = 720)
//! follow the same systematic-plus-staircase shape with seeded random
//! connections.

mod decoder;
mod ldpc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use decoder::{DecodeOutcome, MinSumDecoder, DEFAULT_MAX_ITERS, MIN_SUM_SCALE};
pub use ldpc::LdpcCode;

/// DVB-S2 normal FECFRAME length.
pub const NORMAL_LENGTH: usize = 64800;
/// DVB-S2 short FECFRAME length.
pub const SHORT_LENGTH: usize = 16200;
/// Length of the seeded test codes.
pub const TEST_LENGTH: usize = 720;

/// Inner code rates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodeRate {
    R3_5,
    R2_3,
    R4_5,
    R8_9,
    R9_10,
}

impl CodeRate {
    pub const ALL: [CodeRate; 5] = [CodeRate::R3_5, CodeRate::R2_3, CodeRate::R4_5, CodeRate::R8_9, CodeRate::R9_10];

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "3/5" => Ok(CodeRate::R3_5),
            "2/3" => Ok(CodeRate::R2_3),
            "4/5" => Ok(CodeRate::R4_5),
            "8/9" => Ok(CodeRate::R8_9),
            "9/10" => Ok(CodeRate::R9_10),
            other => Err(Error::UnknownCode { rate: other.to_string(), length: 0 }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CodeRate::R3_5 => "3/5",
            CodeRate::R2_3 => "2/3",
            CodeRate::R4_5 => "4/5",
            CodeRate::R8_9 => "8/9",
            CodeRate::R9_10 => "9/10",
        }
    }

    /// (numerator, denominator).
    pub fn fraction(self) -> (usize, usize) {
        match self {
            CodeRate::R3_5 => (3, 5),
            CodeRate::R2_3 => (2, 3),
            CodeRate::R4_5 => (4, 5),
            CodeRate::R8_9 => (8, 9),
            CodeRate::R9_10 => (9, 10),
        }
    }

    pub fn value(self) -> f64 {
        let (a, b) = self.fraction();
        a as f64 / b as f64
    }

    /// The standard's address table for a frame length, if it defines one.
    fn table(self, length: usize) -> Option<&'static str> {
        match (length, self) {
            (NORMAL_LENGTH, CodeRate::R3_5) => Some(include_str!("../../data/dvbs2/normal_3_5.txt")),
            (NORMAL_LENGTH, CodeRate::R2_3) => Some(include_str!("../../data/dvbs2/normal_2_3.txt")),
            (NORMAL_LENGTH, CodeRate::R4_5) => Some(include_str!("../../data/dvbs2/normal_4_5.txt")),
            (NORMAL_LENGTH, CodeRate::R8_9) => Some(include_str!("../../data/dvbs2/normal_8_9.txt")),
            (NORMAL_LENGTH, CodeRate::R9_10) => Some(include_str!("../../data/dvbs2/normal_9_10.txt")),
            (SHORT_LENGTH, CodeRate::R3_5) => Some(include_str!("../../data/dvbs2/short_3_5.txt")),
            (SHORT_LENGTH, CodeRate::R2_3) => Some(include_str!("../../data/dvbs2/short_2_3.txt")),
            (SHORT_LENGTH, CodeRate::R8_9) => Some(include_str!("../../data/dvbs2/short_8_9.txt")),
            _ => None,
        }
    }
}

impl std::fmt::Display for CodeRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Build a code: DVB-S2 tables at 64800 and 16200, seeded test codes at 720.
pub fn load_code(rate: CodeRate, length: usize) -> Result<LdpcCode> {
    if length == TEST_LENGTH {
        return Ok(test_code(rate));
    }
    let table = rate.table(length).ok_or(Error::UnknownCode { rate: rate.name().into(), length })?;
    dvbs2_code(rate, length, table)
}

/// As `load_code`, with the rate given as text ("2/3").
pub fn load_code_str(rate: &str, length: usize) -> Result<LdpcCode> {
    let r = CodeRate::parse(rate).map_err(|_| Error::UnknownCode { rate: rate.to_string(), length })?;
    load_code(r, length)
}

fn dvbs2_code(rate: CodeRate, n: usize, table: &str) -> Result<LdpcCode> {
    let (a, b) = rate.fraction();
    let k = n * a / b;
    let m = n - k;
    let q = m / 360;
    let rows: Vec<Vec<usize>> = table
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|t| t.parse::<usize>().map_err(|_| Error::Parse(t.into()))).collect())
        .collect::<Result<_>>()?;
    if rows.len() != k / 360 {
        return Err(Error::Parse(format!("rate {rate} table has {} rows, expected {}", rows.len(), k / 360)));
    }
    let mut checks = vec![Vec::new(); m];
    for j in 0..k {
        let w = j % 360;
        for &x in &rows[j / 360] {
            checks[(x + w * q) % m].push(j);
        }
    }
    add_staircase(&mut checks, k);
    LdpcCode::from_checks(&format!("dvbs2-{}-{n}", rate.name()), n, checks)
}

fn add_staircase(checks: &mut [Vec<usize>], k: usize) {
    for (c, row) in checks.iter_mut().enumerate() {
        row.push(k + c);
        if c > 0 {
            row.push(k + c - 1);
        }
    }
}

/// Rate-`rate` code of length 720: every information bit joins three
/// distinct checks chosen by a rate-keyed RNG, plus the staircase.
fn test_code(rate: CodeRate) -> LdpcCode {
    let (a, b) = rate.fraction();
    let n = TEST_LENGTH;
    let k = n * a / b;
    let m = n - k;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d9c_0000 + (a * 100 + b) as u64);
    let mut checks = vec![Vec::new(); m];
    // spread degrees: walk a shuffled check order, three checks per column
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng);
    let mut cursor = 0;
    for j in 0..k {
        let mut picked: Vec<usize> = Vec::with_capacity(3);
        while picked.len() < 3 {
            if cursor == order.len() {
                order.shuffle(&mut rng);
                cursor = 0;
            }
            let c = order[cursor];
            cursor += 1;
            if !picked.contains(&c) {
                picked.push(c);
            }
        }
        for c in picked {
            checks[c].push(j);
        }
    }
    add_staircase(&mut checks, k);
    LdpcCode::from_checks(&format!("test-{}-{n}", rate.name()), n, checks).expect("indices are in range")
}

/// Outer hard-decision code: only its rate and BER threshold matter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HdFecModel {
    pub rate: f64,
    pub threshold: f64,
}

impl HdFecModel {
    /// Staircase code, rate 239/255, pre-FEC BER threshold 4.5·10⁻³.
    pub const STAIRCASE: HdFecModel = HdFecModel { rate: 239.0 / 255.0, threshold: 4.5e-3 };

    /// True when a pre-FEC BER is below the threshold.
    pub fn passes(&self, ber: f64) -> bool {
        ber < self.threshold
    }
}

impl Default for HdFecModel {
    fn default() -> Self {
        Self::STAIRCASE
    }
}

/// Fixed pseudo-random bit permutation between encoder and mapper.
/// `interleave` sends position i to position `perm[i]`.
#[derive(Clone, Debug)]
pub struct Interleaver {
    perm: Vec<u32>,
    inv: Vec<u32>,
}

impl Interleaver {
    pub fn new(n: usize, seed: u64) -> Self {
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut inv = vec![0u32; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Interleaver { perm, inv }
    }

    pub fn identity(n: usize) -> Self {
        let perm: Vec<u32> = (0..n as u32).collect();
        Interleaver { inv: perm.clone(), perm }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn interleave<T: Copy>(&self, input: &[T], out: &mut [T]) {
        for (i, &p) in self.perm.iter().enumerate() {
            out[p as usize] = input[i];
        }
    }

    pub fn deinterleave<T: Copy>(&self, input: &[T], out: &mut [T]) {
        for (j, &i) in self.inv.iter().enumerate() {
            out[i as usize] = input[j];
        }
    }
}
