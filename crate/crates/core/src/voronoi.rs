//! Voronoi constellations Γ = (Λ − a) ∩ Ω(Λs) and their bit labelling.
//!
//! Labels follow the chain Λ ⊃ 2Λ ⊃ Λs (Λs ⊆ 2Λ is required). A coding
//! lattice point with coefficients z splits as z = p + 2w: the parity vector
//! p = z mod 2 names the Λ/2Λ coset and supplies the n least reliable bits,
//! and w is labelled in Λ/(½Λs) by its triangular (Hermite) digits
//! w_i ∈ [0, h_i). Coordinate i owns the integer u_i = p_i + 2·w_i ∈ [0, 2h_i),
//! written in natural binary (least significant first) at bits
//! `[off_i, off_i + 1 + log2 h_i)`, so the LSB of every integer is an LRB and
//! q = n. The transmitted point is
//! `(c − a) mod Λs`, scaled to unit energy per two dimensions.
//!
//! With the cubic coding lattice Zⁿ the LRBs are coordinate parities and a
//! nearest-neighbour error flips exactly one of them; an error of the MRB
//! decision moves one digit w_i and spills into later digits only when it
//! wraps.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{LatticeDef, NestedLatticePair};

/// How the offset vector a is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum OffsetMode {
    /// a = ½ Σ g_j over the coding basis rows.
    HalfBasis,
    /// Half-basis offset plus a fixed pseudo-random perturbation of size
    /// `1e-6` per coordinate; puts no point on the boundary of Ω(Λs).
    Generic,
    /// Explicit offset in unnormalized coordinates.
    Explicit(Vec<f64>),
}

impl OffsetMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "half-basis" => Ok(OffsetMode::HalfBasis),
            "generic" => Ok(OffsetMode::Generic),
            other => {
                let v: std::result::Result<Vec<f64>, _> =
                    other.split(',').map(|t| t.trim().parse::<f64>()).collect();
                v.map(OffsetMode::Explicit)
                    .map_err(|_| Error::Config(format!("bad offset `{other}` (half-basis, generic, or a,b,...)")))
            }
        }
    }
}

const GENERIC_OFFSET_SEED: u64 = 0x5eed_0ff5e7;
const DEFAULT_ENERGY_SAMPLES: usize = 1_000_000;
const ENERGY_SEED: u64 = 0xe0e0_2024;
/// Pairs up to this index have their energy computed by full enumeration.
const EXACT_ENERGY_MAX_LOG2: u32 = 16;

fn energy_cache() -> &'static Mutex<HashMap<String, f64>> {
    static C: OnceLock<Mutex<HashMap<String, f64>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// A Voronoi code; immutable after construction apart from the boundary-tie
/// counter.
#[derive(Clone)]
pub struct VoronoiCode {
    pair: NestedLatticePair,
    /// Λ / ½Λs, labelling the most reliable bits.
    half: NestedLatticePair,
    twice: LatticeDef,
    offset: Vec<f64>,
    k: usize,
    q: usize,
    bits: Vec<u32>,
    bit_offset: Vec<usize>,
    energy_norm: f64,
    /// Coding-lattice vector with label e_i (bit i's coset flip).
    lrb_moves: Vec<Vec<f64>>,
    ties: Arc<AtomicU64>,
}

impl std::fmt::Debug for VoronoiCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VoronoiCode")
            .field("coding", &self.pair.coding().name())
            .field("shaping", &self.pair.shaping().name())
            .field("k", &self.k)
            .field("q", &self.q)
            .field("energy_norm", &self.energy_norm)
            .finish()
    }
}

/// Summary of a sampled constellation.
#[derive(Clone, Debug)]
pub struct ConstellationStats {
    /// Mean energy per two dimensions after normalization.
    pub mean_energy_2d: f64,
    /// Spectral efficiency 2k/n, bits per two dimensions.
    pub se: f64,
    /// Normalized second moment of the unnormalized points.
    pub normalized_second_moment: f64,
    /// (x_{2j}, x_{2j+1}) pairs of the sampled points.
    pub projection: Vec<(f64, f64)>,
}

impl VoronoiCode {
    /// Code with `q` least reliable bits (must equal n), the given offset and
    /// the default energy estimate.
    pub fn new(pair: NestedLatticePair, q: usize, offset: OffsetMode) -> Result<Self> {
        Self::with_energy_samples(pair, q, offset, DEFAULT_ENERGY_SAMPLES)
    }

    /// As [`VoronoiCode::new`] with an explicit Monte-Carlo sample count for
    /// the energy normalization (ignored for small pairs, which are
    /// enumerated).
    pub fn with_energy_samples(pair: NestedLatticePair, q: usize, offset: OffsetMode, samples: usize) -> Result<Self> {
        let n = pair.dim();
        if q != n {
            return Err(Error::Config(format!("q = {q}: one least reliable bit per coordinate requires q = n = {n}")));
        }
        let coding = pair.coding();
        let half = NestedLatticePair::new(coding.clone(), pair.shaping().scaled(num_rational::Rational64::new(1, 2)))
            .map_err(|e| Error::Config(format!("the shaping lattice must lie in 2Λ for the Λ/2Λ label: {e}")))?;
        let mut bits = Vec::with_capacity(n);
        let mut bit_offset = Vec::with_capacity(n);
        let mut k = 0usize;
        for d in half.hermite_diag() {
            bit_offset.push(k);
            let b = 1 + d.trailing_zeros();
            bits.push(b);
            k += b as usize;
        }
        debug_assert_eq!(k as u32, pair.index_log2());
        let offset = match offset {
            OffsetMode::HalfBasis | OffsetMode::Generic => {
                let mut a = vec![0.0; n];
                for i in 0..n {
                    for (o, b) in a.iter_mut().zip(coding.basis_row(i)) {
                        *o += 0.5 * b;
                    }
                }
                if offset == OffsetMode::Generic {
                    let mut rng = ChaCha8Rng::seed_from_u64(GENERIC_OFFSET_SEED);
                    a.iter_mut().for_each(|v| *v += rng.random_range(-1e-6..1e-6));
                }
                a
            }
            OffsetMode::Explicit(a) => {
                if a.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: a.len() });
                }
                a
            }
        };
        // label e_i is the coefficient vector e_i
        let lrb_moves = (0..n).map(|i| coding.basis_row(i).to_vec()).collect();
        let twice = coding.scaled(num_rational::Rational64::from_integer(2));
        let mut code = VoronoiCode {
            pair,
            half,
            twice,
            offset,
            k,
            q,
            bits,
            bit_offset,
            energy_norm: 1.0,
            lrb_moves,
            ties: Arc::new(AtomicU64::new(0)),
        };
        code.energy_norm = code.compute_energy_norm(samples)?;
        code.ties.store(0, Ordering::Relaxed);
        Ok(code)
    }

    /// Z24/8RΛ24 with 24 LRBs (k = 72): cubic coding lattice, Leech shaping.
    pub fn leech_72() -> Result<Self> {
        Self::new(NestedLatticePair::cubic_leech_8(), 24, OffsetMode::Generic)
    }

    /// Z24/16RΛ24 with 24 LRBs (k = 96).
    pub fn leech_96() -> Result<Self> {
        Self::new(NestedLatticePair::cubic_leech_16(), 24, OffsetMode::Generic)
    }

    fn cache_key(&self, samples: usize) -> String {
        let gen: Vec<String> = self.pair.coding().generator().iter().flatten().map(|r| r.to_string()).collect();
        let off: Vec<String> = self.offset.iter().map(|v| format!("{:x}", v.to_bits())).collect();
        format!(
            "{}|{}|{}|{}|{}",
            gen.join(","),
            self.pair.coding().scale_sq(),
            self.pair.shaping().scale_sq(),
            off.join(","),
            samples
        )
    }

    fn compute_energy_norm(&self, samples: usize) -> Result<f64> {
        let exact = self.k as u32 <= EXACT_ENERGY_MAX_LOG2;
        let key = self.cache_key(if exact { 0 } else { samples });
        if let Some(&v) = energy_cache().lock().expect("energy cache").get(&key) {
            return Ok(v);
        }
        let n = self.dim();
        let mut raw = vec![0.0; n];
        let mut total = 0.0;
        let count;
        if exact {
            count = 1usize << self.k;
            let mut bits = vec![0u8; self.k];
            for idx in 0..count {
                for (j, b) in bits.iter_mut().enumerate() {
                    *b = (idx >> j & 1) as u8;
                }
                self.encode_raw(&bits, &mut raw)?;
                total += raw.iter().map(|v| v * v).sum::<f64>();
            }
        } else {
            if samples == 0 {
                return Err(Error::Config("energy sample count must be positive".into()));
            }
            count = samples;
            let mut rng = ChaCha8Rng::seed_from_u64(ENERGY_SEED);
            let mut bits = vec![0u8; self.k];
            for _ in 0..samples {
                bits.iter_mut().for_each(|b| *b = rng.random_range(0..2));
                self.encode_raw(&bits, &mut raw)?;
                total += raw.iter().map(|v| v * v).sum::<f64>();
            }
        }
        let energy_2d = total / count as f64 * 2.0 / n as f64;
        let norm = 1.0 / energy_2d.sqrt();
        energy_cache().lock().expect("energy cache").insert(key, norm);
        Ok(norm)
    }

    pub fn pair(&self) -> &NestedLatticePair {
        &self.pair
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }

    /// Bits per n-dimensional symbol.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Coded least reliable bits per symbol.
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn energy_norm(&self) -> f64 {
        self.energy_norm
    }

    /// Per-coordinate radices 2·h_i.
    pub fn radix(&self) -> Vec<u64> {
        self.half.hermite_diag().iter().map(|d| 2 * d).collect()
    }

    /// Spectral efficiency 2k/n.
    pub fn se(&self) -> f64 {
        2.0 * self.k as f64 / self.dim() as f64
    }

    /// Number of quantizer ties met while reducing modulo Λs since
    /// construction (points on the boundary of Ω(Λs)).
    pub fn boundary_ties(&self) -> u64 {
        self.ties.load(Ordering::Relaxed)
    }

    /// Positions of the least reliable bits within a k-bit label.
    pub fn lrb_positions(&self) -> &[usize] {
        &self.bit_offset
    }

    /// Positions of the remaining (most reliable) bits, ascending.
    pub fn mrb_positions(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.k - self.q);
        for (&off, &b) in self.bit_offset.iter().zip(&self.bits) {
            out.extend(off + 1..off + b as usize);
        }
        out.sort_unstable();
        out
    }

    fn labels_from_bits(&self, bits: &[u8]) -> Vec<u64> {
        self.bit_offset
            .iter()
            .zip(&self.bits)
            .map(|(&off, &b)| (0..b as usize).fold(0u64, |acc, j| acc | (u64::from(bits[off + j] & 1) << j)))
            .collect()
    }

    fn bits_from_labels(&self, u: &[u64], out: &mut [u8]) {
        for ((&off, &b), &ui) in self.bit_offset.iter().zip(&self.bits).zip(u) {
            for j in 0..b as usize {
                out[off + j] = (ui >> j & 1) as u8;
            }
        }
    }

    fn encode_raw(&self, bits: &[u8], out: &mut [f64]) -> Result<()> {
        if bits.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: bits.len() });
        }
        let u = self.labels_from_bits(bits);
        let c = self.pair.coding().point(&self.coefficients_of(&u));
        let x: Vec<f64> = c.iter().zip(&self.offset).map(|(c, a)| c - a).collect();
        let mut s = vec![0.0; x.len()];
        if self.pair.shaping().quantize_into(&x, &mut s)? {
            self.ties.fetch_add(1, Ordering::Relaxed);
        }
        for ((o, xi), si) in out.iter_mut().zip(&x).zip(&s) {
            *o = xi - si;
        }
        Ok(())
    }

    /// Constellation point of a k-bit label (unit energy per 2-D on average).
    pub fn encode(&self, bits: &[u8]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.encode_into(bits, &mut out)?;
        Ok(out)
    }

    pub fn encode_into(&self, bits: &[u8], out: &mut [f64]) -> Result<()> {
        self.encode_raw(bits, out)?;
        out.iter_mut().for_each(|v| *v *= self.energy_norm);
        Ok(())
    }

    /// Shift a received normalized vector into coding-lattice coordinates.
    fn to_lattice_frame(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.offset).map(|(v, a)| v / self.energy_norm + a).collect()
    }

    /// Coefficients z = p + 2w of a representative of labels `u`.
    fn coefficients_of(&self, u: &[u64]) -> Vec<i64> {
        // triangular digits are their own representative, so z = p + 2w = u
        u.iter().map(|&v| v as i64).collect()
    }

    fn labels_of_point(&self, c: &[f64]) -> Vec<u64> {
        let z = self.pair.coding().integer_coordinates(c);
        let p: Vec<i64> = z.iter().map(|v| v.rem_euclid(2)).collect();
        let w: Vec<i64> = z.iter().zip(&p).map(|(v, b)| (v - b) / 2).collect();
        self.half.hermite_label_of(&w).iter().zip(&p).map(|(wi, &pi)| 2 * wi + pi as u64).collect()
    }

    /// Label of the constellation point nearest to `y`.
    pub fn decode(&self, y: &[f64]) -> Result<Vec<u8>> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: y.len() });
        }
        let yl = self.to_lattice_frame(y);
        let mut c = vec![0.0; yl.len()];
        self.pair.coding().quantize_into(&yl, &mut c)?;
        let mut bits = vec![0u8; self.k];
        self.bits_from_labels(&self.labels_of_point(&c), &mut bits);
        Ok(bits)
    }

    /// The q least reliable bits of a label.
    pub fn lrb_label(&self, bits: &[u8]) -> Vec<u8> {
        self.bit_offset.iter().map(|&p| bits[p]).collect()
    }

    /// The k − q most reliable bits of a label, in ascending position.
    pub fn mrb_label(&self, bits: &[u8]) -> Vec<u8> {
        self.mrb_positions().iter().map(|&p| bits[p]).collect()
    }

    /// Assemble a label from its LRB and MRB parts.
    pub fn join_label(&self, lrb: &[u8], mrb: &[u8]) -> Vec<u8> {
        let mut bits = vec![0u8; self.k];
        for (&p, &b) in self.bit_offset.iter().zip(lrb) {
            bits[p] = b;
        }
        for (p, &b) in self.mrb_positions().into_iter().zip(mrb) {
            bits[p] = b;
        }
        bits
    }

    /// Max-log LLRs of the q least reliable bits with one competitor per bit:
    /// the nearest point ĉ of Λ fixes every LRB, and bit i's competitor is
    /// the nearest point of the coset ĉ + w_i + 2Λ. Positive favours 0.
    pub fn lrb_llr(&self, y: &[f64], sigma2: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.q];
        self.lrb_llr_into(y, sigma2, &mut out)?;
        Ok(out)
    }

    pub fn lrb_llr_into(&self, y: &[f64], sigma2: f64, out: &mut [f64]) -> Result<()> {
        let n = self.dim();
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len() });
        }
        let yl = self.to_lattice_frame(y);
        let mut c = vec![0.0; n];
        self.pair.coding().quantize_into(&yl, &mut c)?;
        let lsb: Vec<u64> = self.labels_of_point(&c).iter().map(|u| u & 1).collect();
        let d0: f64 = yl.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
        let scale = self.energy_norm * self.energy_norm / (2.0 * sigma2);
        let mut shifted = vec![0.0; n];
        let mut q2 = vec![0.0; n];
        for (i, w) in self.lrb_moves.iter().enumerate() {
            // competitor = t + Q_2Λ(y − t), t = ĉ + w_i
            for j in 0..n {
                shifted[j] = yl[j] - c[j] - w[j];
            }
            self.twice.quantize_into(&shifted, &mut q2)?;
            let d1: f64 = shifted.iter().zip(&q2).map(|(a, b)| (a - b) * (a - b)).sum();
            let llr = (d1 - d0) * scale;
            out[i] = if lsb[i] == 0 { llr } else { -llr };
        }
        Ok(())
    }

    /// Most reliable bits given decoded LRBs: nearest point of the Λ/2Λ coset
    /// selected by `lrbs`, reduced to its label.
    pub fn mrb_hard_decision(&self, y: &[f64], lrbs: &[u8]) -> Result<Vec<u8>> {
        let n = self.dim();
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len() });
        }
        if lrbs.len() != self.q {
            return Err(Error::LengthMismatch { expected: self.q, got: lrbs.len() });
        }
        let yl = self.to_lattice_frame(y);
        let u: Vec<u64> = lrbs.iter().map(|&b| u64::from(b & 1)).collect();
        let t = self.pair.coding().point(&self.coefficients_of(&u));
        let shifted: Vec<f64> = yl.iter().zip(&t).map(|(a, b)| a - b).collect();
        let mut q2 = vec![0.0; n];
        self.twice.quantize_into(&shifted, &mut q2)?;
        let c: Vec<f64> = t.iter().zip(&q2).map(|(a, b)| a + b).collect();
        let mut bits = vec![0u8; self.k];
        self.bits_from_labels(&self.labels_of_point(&c), &mut bits);
        Ok(self.mrb_label(&bits))
    }

    /// Energy, spectral efficiency and a 2-D projection from uniformly random
    /// labels.
    pub fn constellation_stats(&self, samples: usize, seed: u64) -> Result<ConstellationStats> {
        if samples < 1000 {
            return Err(Error::Config("constellation statistics need at least 1000 samples".into()));
        }
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bits = vec![0u8; self.k];
        let mut x = vec![0.0; n];
        let mut energy = 0.0;
        let mut projection = Vec::with_capacity(samples * (n / 2));
        for _ in 0..samples {
            bits.iter_mut().for_each(|b| *b = rng.random_range(0..2));
            self.encode_into(&bits, &mut x)?;
            energy += x.iter().map(|v| v * v).sum::<f64>();
            projection.extend(x.chunks_exact(2).map(|p| (p[0], p[1])));
        }
        let mean_energy_2d = energy / samples as f64 * 2.0 / n as f64;
        // Second moment of the unnormalized region: volume det(Λs).
        let log_vol = self.k as f64 * std::f64::consts::LN_2 + log_det(self.pair.coding());
        let mean_sq_raw = mean_energy_2d * n as f64 / 2.0 / (self.energy_norm * self.energy_norm);
        let normalized_second_moment = mean_sq_raw / (n as f64 * (2.0 * log_vol / n as f64).exp());
        Ok(ConstellationStats { mean_energy_2d, se: self.se(), normalized_second_moment, projection })
    }
}

/// ln |det| of a lattice basis.
fn log_det(lat: &LatticeDef) -> f64 {
    // Partial-pivot LU on the real basis.
    let n = lat.dim();
    let mut m: Vec<f64> = (0..n).flat_map(|i| lat.basis_row(i).to_vec()).collect();
    let mut acc = 0.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs()))
            .expect("nonempty");
        for j in 0..n {
            m.swap(col * n + j, piv * n + j);
        }
        let p = m[col * n + col];
        acc += p.abs().ln();
        for i in col + 1..n {
            let f = m[i * n + col] / p;
            for j in col..n {
                m[i * n + j] -= f * m[col * n + j];
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_code() -> VoronoiCode {
        VoronoiCode::new(NestedLatticePair::builtin("Z2/4Z2").unwrap(), 2, OffsetMode::Explicit(vec![-0.5, -0.5]))
            .unwrap()
    }

    #[test]
    fn z2_origin_label() {
        let code = z2_code();
        let x = code.encode(&[0, 0, 0, 0]).unwrap();
        let raw: Vec<f64> = x.iter().map(|v| v / code.energy_norm()).collect();
        assert!((raw[0] - 0.5).abs() < 1e-12 && (raw[1] - 0.5).abs() < 1e-12);
        // 16 points at ±0.5, ±1.5: mean energy per 2-D is 2·1.25 = 2.5.
        assert!((code.energy_norm() - 1.0 / 2.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lrb_positions_for_leech_packing() {
        let code = VoronoiCode::with_energy_samples(NestedLatticePair::leech_8(), 24, OffsetMode::Generic, 100)
            .unwrap();
        assert_eq!(code.k(), 72);
        assert_eq!(code.lrb_positions()[..4], [0, 3, 6, 9]);
        assert_eq!(code.mrb_positions().len(), 48);
        assert_eq!(code.se(), 6.0);
    }

    #[test]
    fn rejects_q_other_than_n() {
        assert!(VoronoiCode::new(NestedLatticePair::builtin("Z2/4Z2").unwrap(), 1, OffsetMode::HalfBasis).is_err());
    }
}
