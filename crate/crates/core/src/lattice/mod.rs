//! Lattices, exact closest-point quantizers and modulo-lattice reduction.
//!
//! A [`LatticeDef`] is the point set `scale · {z·G : z ∈ Zⁿ}`, where the
//! generator `G` is a rational matrix in the canonical coordinates of one of
//! the supported families and `scale² ` is a positive rational. Keeping the
//! squared scale rational lets the unimodular Leech lattice (integer form
//! divided by √8) live next to its integer generator without irrational data.
//!
//! Exact decoders exist for Zⁿ, Dₙ, E8 and Λ24; the decoder only depends on
//! the family's point set, so any generator of that point set may be used.

mod brute;
pub mod golay;
pub mod leech;
mod nested;
mod small;
pub mod snf;

use std::fmt;
use std::path::Path;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use brute::{brute_force_quantize, enumerate_within};
pub use nested::NestedLatticePair;
pub use snf::{determinant, smith_normal_form, IntMatrix, SmithForm};

/// Point-set family a lattice belongs to (selects the exact decoder).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    /// Zⁿ
    Integer,
    /// Dₙ, integer vectors with even coordinate sum
    Checkerboard,
    /// E8 = D8 ∪ (D8 + ½)
    Gosset,
    /// √8·Λ24 in canonical coordinates
    Leech,
    /// (I + J)·√8·Λ24 for the Gaussian automorphism J of [`leech::gaussian`]:
    /// a rotated copy of 4·Λ24 inside Z²⁴
    RotatedLeech,
    /// Anything else; no exact decoder.
    Custom,
}

impl LatticeKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z" | "integer" | "cubic" => Ok(LatticeKind::Integer),
            "d" | "checkerboard" => Ok(LatticeKind::Checkerboard),
            "e8" | "gosset" => Ok(LatticeKind::Gosset),
            "leech" | "l24" | "lambda24" => Ok(LatticeKind::Leech),
            "rotated-leech" | "rl24" => Ok(LatticeKind::RotatedLeech),
            "custom" => Ok(LatticeKind::Custom),
            other => Err(Error::Config(format!("unknown lattice family `{other}`"))),
        }
    }

    /// |det| of the canonical point set, as log2 (all supported families
    /// have power-of-two volume).
    fn canonical_det_log2(self) -> Option<u32> {
        match self {
            LatticeKind::Integer | LatticeKind::Gosset => Some(0),
            LatticeKind::Checkerboard => Some(1),
            LatticeKind::Leech => Some(leech::DET_LOG2),
            LatticeKind::RotatedLeech => Some(leech::DET_LOG2 + 12),
            LatticeKind::Custom => None,
        }
    }
}

/// A lattice with its generator, scale and decoder family.
#[derive(Clone)]
pub struct LatticeDef {
    name: String,
    kind: LatticeKind,
    dim: usize,
    generator: Vec<Vec<Rational64>>,
    scale_sq: Rational64,
    scale: f64,
    basis: Vec<f64>,
    basis_inv: Vec<f64>,
    covering_radius: Option<f64>,
    min_norm: Option<f64>,
}

impl fmt::Debug for LatticeDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeDef")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("dim", &self.dim)
            .field("scale_sq", &self.scale_sq)
            .finish()
    }
}

fn int_rows(rows: &[Vec<i64>]) -> Vec<Vec<Rational64>> {
    rows.iter().map(|r| r.iter().map(|&v| Rational64::from_integer(v)).collect()).collect()
}

fn ratio_to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl LatticeDef {
    fn build(
        name: String,
        kind: LatticeKind,
        generator: Vec<Vec<Rational64>>,
        scale_sq: Rational64,
        canonical_covering: Option<f64>,
        canonical_min_norm: Option<f64>,
    ) -> Result<Self> {
        let dim = generator.len();
        if dim == 0 || generator.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidLattice(format!("{name}: generator must be square and nonempty")));
        }
        if !scale_sq.is_positive() {
            return Err(Error::InvalidLattice(format!("{name}: scale must be positive")));
        }
        let scale = ratio_to_f64(&scale_sq).sqrt();
        let basis: Vec<f64> = generator.iter().flatten().map(|r| scale * ratio_to_f64(r)).collect();
        let basis_inv = invert(&basis, dim).ok_or(Error::Singular)?;
        Ok(LatticeDef {
            name,
            kind,
            dim,
            generator,
            scale_sq,
            scale,
            basis,
            basis_inv,
            covering_radius: canonical_covering.map(|c| c * scale),
            min_norm: canonical_min_norm.map(|m| m * scale * scale),
        })
    }

    /// Zⁿ.
    pub fn integer(n: usize) -> Self {
        let rows: Vec<Vec<i64>> =
            (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let cover = (n as f64).sqrt() / 2.0;
        Self::build(format!("Z{n}"), LatticeKind::Integer, int_rows(&rows), Rational64::one(), Some(cover), Some(1.0))
            .expect("identity generator")
    }

    /// Dₙ (n ≥ 2).
    pub fn checkerboard(n: usize) -> Self {
        assert!(n >= 2, "D_n needs n >= 2");
        let mut rows = vec![vec![0i64; n]; n];
        rows[0][0] = -1;
        rows[0][1] = -1;
        for i in 1..n {
            rows[i][i - 1] = 1;
            rows[i][i] = -1;
        }
        let cover = f64::max(1.0, (n as f64).sqrt() / 2.0);
        Self::build(format!("D{n}"), LatticeKind::Checkerboard, int_rows(&rows), Rational64::one(), Some(cover), Some(2.0))
            .expect("D_n generator")
    }

    /// E8 with minimum squared norm 2.
    pub fn gosset() -> Self {
        let mut rows = vec![vec![Rational64::zero(); 8]; 8];
        rows[0][0] = Rational64::from_integer(2);
        for i in 1..7 {
            rows[i][i - 1] = Rational64::from_integer(-1);
            rows[i][i] = Rational64::one();
        }
        rows[7] = vec![Rational64::new(1, 2); 8];
        Self::build("E8".into(), LatticeKind::Gosset, rows, Rational64::one(), Some(1.0), Some(2.0))
            .expect("E8 generator")
    }

    /// Unimodular Leech lattice Λ24 (determinant 1, minimum squared norm 4).
    pub fn leech() -> Self {
        Self::build(
            "L24".into(),
            LatticeKind::Leech,
            int_rows(leech::integer_basis()),
            Rational64::new(1, 8),
            Some(4.0),
            Some(32.0),
        )
        .expect("Leech generator")
    }

    /// R·Λ24 with R = (I + J)/√2 a rotation; unimodular like Λ24. Z²⁴
    /// contains 8·RΛ24 and 16·RΛ24 with index 2⁷² and 2⁹⁶, which makes the
    /// cubic lattice a coding lattice for Leech-shaped constellations.
    pub fn rotated_leech() -> Self {
        let j = leech::gaussian();
        let mut jb = vec![0i64; leech::DIM];
        let rows: Vec<Vec<i64>> = leech::integer_basis()
            .iter()
            .map(|b| {
                j.apply(b, &mut jb);
                b.iter().zip(&jb).map(|(x, y)| x + y).collect()
            })
            .collect();
        Self::build(
            "RL24".into(),
            LatticeKind::RotatedLeech,
            int_rows(&rows),
            Rational64::new(1, 16),
            Some(4.0 * std::f64::consts::SQRT_2),
            Some(64.0),
        )
        .expect("rotated Leech generator")
    }

    /// Built-in lattice by name: `Z<n>`, `D<n>`, `E8`, `L24`, `RL24`.
    pub fn builtin(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "e8" => return Ok(Self::gosset()),
            "l24" | "leech" | "lambda24" => return Ok(Self::leech()),
            "rl24" => return Ok(Self::rotated_leech()),
            _ => {}
        }
        let parse_n = |s: &str| s.parse::<usize>().map_err(|_| Error::Config(format!("unknown lattice `{name}`")));
        if let Some(n) = lower.strip_prefix('z') {
            let n = parse_n(n)?;
            if n > 0 {
                return Ok(Self::integer(n));
            }
        }
        if let Some(n) = lower.strip_prefix('d') {
            let n = parse_n(n)?;
            if n >= 2 {
                return Ok(Self::checkerboard(n));
            }
        }
        Err(Error::Config(format!("unknown lattice `{name}`")))
    }

    /// A lattice from an explicit generator. For families with an exact
    /// decoder the rows must generate exactly the canonical point set.
    pub fn from_generator(
        name: impl Into<String>,
        kind: LatticeKind,
        generator: Vec<Vec<Rational64>>,
        scale_sq: Rational64,
        covering_radius: Option<f64>,
    ) -> Result<Self> {
        let name = name.into();
        let (canon_cover, canon_min) = match kind {
            LatticeKind::Custom => (None, None),
            _ => {
                let n = generator.len();
                let reference = match kind {
                    LatticeKind::Integer => Self::integer(n),
                    LatticeKind::Checkerboard => Self::checkerboard(n),
                    LatticeKind::Gosset if n == 8 => Self::gosset(),
                    LatticeKind::Leech if n == leech::DIM => Self::leech(),
                    LatticeKind::RotatedLeech if n == leech::DIM => Self::rotated_leech(),
                    _ => {
                        return Err(Error::InvalidLattice(format!("{name}: dimension {n} does not fit {kind:?}")))
                    }
                };
                (
                    reference.covering_radius.map(|c| c / reference.scale),
                    reference.min_norm.map(|m| m / (reference.scale * reference.scale)),
                )
            }
        };
        let lat = Self::build(name, kind, generator, scale_sq, canon_cover, canon_min)?;
        if kind != LatticeKind::Custom {
            lat.check_canonical_generator()?;
        } else if let Some(c) = covering_radius {
            return Ok(LatticeDef { covering_radius: Some(c), ..lat });
        }
        Ok(lat)
    }

    fn check_canonical_generator(&self) -> Result<()> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for row in &self.generator {
            let y: Vec<f64> = row.iter().map(ratio_to_f64).collect();
            decode_canonical(self.kind, &y, &mut out)?;
            if out.iter().zip(&y).any(|(a, b)| (a - b).abs() > 1e-12) {
                return Err(Error::InvalidLattice(format!("{}: generator row is not in the {:?} point set", self.name, self.kind)));
            }
        }
        // Scale rows to integers (denominators are at most 2 for the
        // supported families) and compare the volume.
        let denom_lcm = self.generator.iter().flatten().fold(1i64, |acc, r| num_integer::lcm(acc, *r.denom()));
        let ints: Vec<Vec<i64>> = self
            .generator
            .iter()
            .map(|r| r.iter().map(|v| (v * denom_lcm).to_integer()).collect())
            .collect();
        let det = snf::determinant(&IntMatrix::from_rows(&ints))?.unsigned_abs();
        let want_log2 = self.kind.canonical_det_log2().expect("family has a volume") as u128
            + (n as u128) * (denom_lcm as u128).trailing_zeros() as u128;
        let want = 1u128.checked_shl(want_log2 as u32).ok_or(Error::Overflow)?;
        if !(denom_lcm as u128).is_power_of_two() || det != want {
            return Err(Error::InvalidLattice(format!(
                "{}: generator spans a proper sublattice of the {:?} point set",
                self.name, self.kind
            )));
        }
        Ok(())
    }

    /// Load a generator from a text file: one row per line, whitespace
    /// separated rational entries `p/q` (or integers); `#` starts a comment.
    pub fn from_matrix_file(
        path: impl AsRef<Path>,
        kind: LatticeKind,
        scale_sq: Rational64,
        covering_radius: Option<f64>,
    ) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let gen = parse_matrix(&text)?;
        let name = path.file_stem().map_or("custom".into(), |s| s.to_string_lossy().into_owned());
        Self::from_generator(name, kind, gen, scale_sq, covering_radius)
    }

    /// The lattice `factor · self`.
    pub fn scaled(&self, factor: Rational64) -> Self {
        let mut out = Self::build(
            format!("{}*{}", factor, self.name),
            self.kind,
            self.generator.clone(),
            self.scale_sq * factor * factor,
            None,
            None,
        )
        .expect("scaling preserves validity");
        let f = ratio_to_f64(&factor).abs();
        out.covering_radius = self.covering_radius.map(|c| c * f);
        out.min_norm = self.min_norm.map(|m| m * f * f);
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator(&self) -> &[Vec<Rational64>] {
        &self.generator
    }

    pub fn scale_sq(&self) -> Rational64 {
        self.scale_sq
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Row `i` of the real (scaled) basis.
    pub fn basis_row(&self, i: usize) -> &[f64] {
        &self.basis[i * self.dim..(i + 1) * self.dim]
    }

    pub fn covering_radius(&self) -> Option<f64> {
        self.covering_radius
    }

    /// Minimum squared norm, when known.
    pub fn min_norm(&self) -> Option<f64> {
        self.min_norm
    }

    pub fn has_exact_decoder(&self) -> bool {
        self.kind != LatticeKind::Custom
    }

    /// Lattice point with integer coefficients `z`.
    pub fn point(&self, z: &[i64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.point_into(z, &mut out);
        out
    }

    pub fn point_into(&self, z: &[i64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, &c) in z.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            for (o, b) in out.iter_mut().zip(self.basis_row(i)) {
                *o += c * b;
            }
        }
    }

    /// Real coefficients of `x` in this lattice's basis (`x = coords · B`).
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &self.basis_inv[i * n..(i + 1) * n];
            for (o, v) in out.iter_mut().zip(row) {
                *o += xi * v;
            }
        }
        out
    }

    /// Integer coefficients of a lattice point.
    pub fn integer_coordinates(&self, x: &[f64]) -> Vec<i64> {
        self.coordinates(x).iter().map(|v| v.round() as i64).collect()
    }

    /// Nearest lattice point, writing into `out`; returns whether a tie was
    /// broken.
    pub fn quantize_into(&self, y: &[f64], out: &mut [f64]) -> Result<bool> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: y.len() });
        }
        if self.kind == LatticeKind::Custom {
            return Err(Error::NoExactDecoder(self.name.clone()));
        }
        let inv = 1.0 / self.scale;
        let mut canon = [0.0f64; 32];
        let canon = if self.dim <= 32 {
            &mut canon[..self.dim]
        } else {
            return self.quantize_large(y, out);
        };
        for (c, v) in canon.iter_mut().zip(y) {
            *c = v * inv;
        }
        let tie = decode_canonical(self.kind, canon, out)?;
        out.iter_mut().for_each(|v| *v *= self.scale);
        Ok(tie)
    }

    fn quantize_large(&self, y: &[f64], out: &mut [f64]) -> Result<bool> {
        let canon: Vec<f64> = y.iter().map(|v| v / self.scale).collect();
        let tie = decode_canonical(self.kind, &canon, out)?;
        out.iter_mut().for_each(|v| *v *= self.scale);
        Ok(tie)
    }
}

fn decode_canonical(kind: LatticeKind, y: &[f64], out: &mut [f64]) -> Result<bool> {
    Ok(match kind {
        LatticeKind::Integer => small::decode_integer(y, out),
        LatticeKind::Checkerboard => small::decode_checkerboard(y, out),
        LatticeKind::Gosset => {
            if y.len() != 8 {
                return Err(Error::DimensionMismatch { expected: 8, got: y.len() });
            }
            small::decode_gosset(y, out)
        }
        LatticeKind::Leech => {
            if y.len() != leech::DIM {
                return Err(Error::DimensionMismatch { expected: leech::DIM, got: y.len() });
            }
            leech::decode(y, out)
        }
        LatticeKind::RotatedLeech => {
            if y.len() != leech::DIM {
                return Err(Error::DimensionMismatch { expected: leech::DIM, got: y.len() });
            }
            // (I + J)⁻¹ = (I − J)/2 and (I + J)/√2 is orthogonal, so the
            // nearest point maps through the Leech decoder.
            let j = leech::gaussian();
            let mut jy = [0.0f64; leech::DIM];
            j.apply(y, &mut jy);
            let mut t = [0.0f64; leech::DIM];
            for i in 0..leech::DIM {
                t[i] = 0.5 * (y[i] - jy[i]);
            }
            let mut c = [0.0f64; leech::DIM];
            let tie = leech::decode(&t, &mut c);
            j.apply(&c, &mut jy);
            for i in 0..leech::DIM {
                out[i] = c[i] + jy[i];
            }
            tie
        }
        LatticeKind::Custom => return Err(Error::NoExactDecoder("custom".into())),
    })
}

/// Nearest point of `lattice` to `y`.
pub fn quantize(lattice: &LatticeDef, y: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; lattice.dim()];
    lattice.quantize_into(y, &mut out)?;
    Ok(out)
}

/// Representative of `y` in the Voronoi region of `lattice`: y − Q(y).
pub fn mod_lattice(lattice: &LatticeDef, y: &[f64]) -> Result<Vec<f64>> {
    let q = quantize(lattice, y)?;
    Ok(y.iter().zip(&q).map(|(a, b)| a - b).collect())
}

/// Parse a rational matrix: rows per line, entries `p/q` or integers.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Rational64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<Rational64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad entry `{tok}`", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix".into()));
    }
    let n = rows[0].len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    Ok(rows)
}

/// Gauss-Jordan inverse of a row-major n×n matrix.
pub(crate) fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[piv * n + col].abs() < 1e-300 {
            return None;
        }
        for j in 0..n {
            m.swap(col * n + j, piv * n + j);
            inv.swap(col * n + j, piv * n + j);
        }
        let p = m[col * n + col];
        for j in 0..n {
            m[col * n + j] /= p;
            inv[col * n + j] /= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[i * n + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                m[i * n + j] -= f * m[col * n + j];
                inv[i * n + j] -= f * inv[col * n + j];
            }
        }
    }
    Some(inv)
}
