//! Leech lattice in its integer form √8·Λ24.
//!
//! A vector x ∈ Z²⁴ belongs to √8·Λ24 iff, for m ∈ {0, 1}, x ≡ 2c + m·(1, …, 1)
//! (mod 4) for some Golay codeword c and Σx ≡ 4m (mod 8). Equivalently the
//! lattice is the union of 8192 cosets t + 4·D24 with t = 2c + m·(−3, 1²³).
//!
//! The decoder enumerates the 4096 Golay codewords for each half. Per
//! coordinate it keeps the nearest value in every residue class mod 4, so a
//! coset cost is a sum of 24 table entries. Splitting the coordinates into a
//! trio of disjoint octads turns that sum into three byte-indexed lookups;
//! when the mod-8 sum condition fails the cheapest single ±4 move is added,
//! again from per-octad tables.

use std::sync::OnceLock;

use super::golay;
use super::small::{cheapest_flip, dist2, is_half, lex_cmp, round_half_down};
use super::snf::echelon_basis;

pub(crate) const DIM: usize = 24;

/// |det| of the integer form: 8¹².
pub(crate) const DET_LOG2: u32 = 36;

/// An integer basis of √8·Λ24 (upper echelon form), derived from the Golay
/// generators, 4·D24 and (−3, 1²³).
pub fn integer_basis() -> &'static Vec<Vec<i64>> {
    static BASIS: OnceLock<Vec<Vec<i64>>> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for g in golay::generators() {
            rows.push((0..DIM).map(|i| if g >> i & 1 == 1 { 2 } else { 0 }).collect());
        }
        let mut first = vec![0i64; DIM];
        first[0] = -4;
        first[1] = -4;
        rows.push(first);
        for i in 1..DIM {
            let mut r = vec![0i64; DIM];
            r[i - 1] = 4;
            r[i] = -4;
            rows.push(r);
        }
        let mut odd = vec![1i64; DIM];
        odd[0] = -3;
        rows.push(odd);
        echelon_basis(&rows, DIM).expect("the Leech generating set has full rank")
    })
}

/// A monomial automorphism J of √8·Λ24 with J² = −I, so that (I + J)/√2 is
/// a rotation and (I + J)·Λ24 ⊂ Λ24 is a similar sublattice of index 2¹².
///
/// J = D·P: P is the fixed-point-free involution x ↦ −1/x of the projective
/// line over F23 (coordinate 23 is ∞), an automorphism of the Golay code, and
/// D negates a dodecad that meets every 2-cycle of P once.
#[derive(Clone, Debug)]
pub struct Gaussian {
    /// (Jx)_i = ±x_{perm[i]}
    pub perm: [usize; DIM],
    /// Bit i set when coordinate i is negated.
    pub negate: u32,
}

impl Gaussian {
    pub fn apply<T: Copy + std::ops::Neg<Output = T>>(&self, x: &[T], out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate() {
            let v = x[self.perm[i]];
            *o = if self.negate >> i & 1 == 1 { -v } else { v };
        }
    }
}

pub fn gaussian() -> &'static Gaussian {
    static J: OnceLock<Gaussian> = OnceLock::new();
    J.get_or_init(|| {
        let mut perm = [0usize; DIM];
        perm[0] = 23;
        perm[23] = 0;
        for (i, p) in perm.iter_mut().enumerate().take(23).skip(1) {
            // −1/i mod 23
            *p = (1..23).find(|&y| (i * y) % 23 == 22).expect("F23 is a field");
        }
        let transversal = |w: u32| (0..DIM).all(|i| (w >> i & 1) != (w >> perm[i] & 1));
        let negate = golay::gray_walk()
            .words
            .iter()
            .copied()
            .find(|&w| w.count_ones() == 12 && transversal(w))
            .expect("a transversal dodecad exists");
        Gaussian { perm, negate }
    })
}

/// Membership test in the integer form.
pub fn contains(x: &[i64]) -> bool {
    if x.len() != DIM {
        return false;
    }
    let m = x[0].rem_euclid(2);
    if x.iter().any(|v| v.rem_euclid(2) != m) {
        return false;
    }
    let mut word = 0u32;
    for (i, v) in x.iter().enumerate() {
        if ((v - m).rem_euclid(4)) == 2 {
            word |= 1 << i;
        }
    }
    let sum: i64 = x.iter().sum();
    golay::contains(word) && sum.rem_euclid(8) == 4 * m
}

struct Tables {
    x: [[f64; DIM]; 4],
    d: [[f64; DIM]; 4],
    delta: [[f64; DIM]; 4],
    down: [[bool; DIM]; 4],
    half: [[bool; DIM]; 4],
    centered: [[bool; DIM]; 4],
    /// bit i set when the nearest value in residue r has odd (x − r)/4
    h: [u32; 4],
}

impl Tables {
    fn new(y: &[f64]) -> Self {
        let mut t = Tables {
            x: [[0.0; DIM]; 4],
            d: [[0.0; DIM]; 4],
            delta: [[0.0; DIM]; 4],
            down: [[false; DIM]; 4],
            half: [[false; DIM]; 4],
            centered: [[false; DIM]; 4],
            h: [0; 4],
        };
        for r in 0..4 {
            let rf = r as f64;
            for i in 0..DIM {
                let q = (y[i] - rf) / 4.0;
                let k = round_half_down(q);
                let x = rf + 4.0 * k;
                let d = (y[i] - x) * (y[i] - x);
                let down = y[i] <= x;
                let alt = if down { x - 4.0 } else { x + 4.0 };
                t.x[r][i] = x;
                t.d[r][i] = d;
                t.delta[r][i] = (y[i] - alt) * (y[i] - alt) - d;
                t.down[r][i] = down;
                t.half[r][i] = is_half(q);
                t.centered[r][i] = y[i] == x;
                if (k as i64).rem_euclid(2) == 1 {
                    t.h[r] |= 1 << i;
                }
            }
        }
        t
    }

    #[inline]
    fn residue(m: usize, word: u32, i: usize) -> usize {
        m + 2 * ((word >> i) & 1) as usize
    }

    /// Nearest point of coset (m, word); returns (tie inside the coset).
    fn materialize(&self, m: usize, word: u32, out: &mut [f64]) -> bool {
        let mut tie = false;
        let mut parity = 0u32;
        for i in 0..DIM {
            let r = Self::residue(m, word, i);
            out[i] = self.x[r][i];
            parity ^= (self.h[r] >> i) & 1;
        }
        if parity as usize != m {
            let mut deltas = [0.0; DIM];
            let mut down = [false; DIM];
            for i in 0..DIM {
                let r = Self::residue(m, word, i);
                deltas[i] = self.delta[r][i];
                down[i] = self.down[r][i];
            }
            let (i, t) = cheapest_flip(&deltas, &down);
            out[i] += if down[i] { -4.0 } else { 4.0 };
            tie |= t || self.centered[Self::residue(m, word, i)][i];
            for j in (0..DIM).filter(|&j| j != i) {
                tie |= self.half[Self::residue(m, word, j)][j];
            }
        } else {
            tie |= (0..DIM).any(|i| self.half[Self::residue(m, word, i)][i]);
        }
        tie
    }
}

/// Three disjoint octads covering all coordinates, and every codeword split
/// into its three octad restrictions (one byte each).
struct Trio {
    coords: [[usize; 8]; 3],
    words: Vec<u32>,
    bytes: Vec<[u8; 3]>,
}

fn trio() -> &'static Trio {
    static T: OnceLock<Trio> = OnceLock::new();
    T.get_or_init(|| {
        let words = golay::gray_walk().words.clone();
        let first = *words.iter().find(|w| w.count_ones() == 8).expect("octads exist");
        let second = *words
            .iter()
            .find(|&&w| w.count_ones() == 8 && w & first == 0)
            .expect("a disjoint octad exists");
        let third = ((1u32 << DIM) - 1) ^ first ^ second;
        let mut coords = [[0usize; 8]; 3];
        for (mask, row) in [first, second, third].iter().zip(coords.iter_mut()) {
            let mut k = 0;
            for i in 0..DIM {
                if mask >> i & 1 == 1 {
                    row[k] = i;
                    k += 1;
                }
            }
        }
        let bytes = words
            .iter()
            .map(|&w| {
                let mut b = [0u8; 3];
                for (j, row) in coords.iter().enumerate() {
                    for (k, &i) in row.iter().enumerate() {
                        b[j] |= ((w >> i & 1) as u8) << k;
                    }
                }
                b
            })
            .collect();
        Trio { coords, words, bytes }
    })
}

/// Per-octad lookup tables for one half: cost and cheapest ±4 move of every
/// residue pattern (byte bit k set = coordinate k of the octad uses r1).
struct BlockTables {
    cost: [[f64; 256]; 3],
    fix: [[f64; 256]; 3],
}

impl BlockTables {
    fn new(t: &Tables, trio: &Trio, r0: usize, r1: usize) -> Self {
        let mut cost = [[0.0; 256]; 3];
        let mut fix = [[0.0; 256]; 3];
        for (j, coords) in trio.coords.iter().enumerate() {
            cost[j][0] = coords.iter().map(|&i| t.d[r0][i]).sum();
            for b in 1..256usize {
                let low = b.trailing_zeros() as usize;
                let i = coords[low];
                cost[j][b] = cost[j][b & (b - 1)] + (t.d[r1][i] - t.d[r0][i]);
            }
            let mut nib = [[f64::INFINITY; 16]; 2];
            for (h, half) in nib.iter_mut().enumerate() {
                for (b, slot) in half.iter_mut().enumerate() {
                    for k in 0..4 {
                        let i = coords[4 * h + k];
                        let r = if b >> k & 1 == 1 { r1 } else { r0 };
                        *slot = slot.min(t.delta[r][i]);
                    }
                }
            }
            for b in 0..256usize {
                fix[j][b] = nib[0][b & 15].min(nib[1][b >> 4]);
            }
        }
        BlockTables { cost, fix }
    }
}

/// Closest point of √8·Λ24 to `y` (canonical coordinates). Returns whether a
/// tie was broken.
pub(crate) fn decode(y: &[f64], out: &mut [f64]) -> bool {
    debug_assert_eq!(y.len(), DIM);
    let t = Tables::new(y);
    let trio = trio();

    let mut best = f64::INFINITY;
    let mut thresh = f64::INFINITY;
    let mut near: Vec<(usize, u32)> = Vec::with_capacity(4);

    for m in 0..2usize {
        let (r0, r1) = (m, m + 2);
        let bt = BlockTables::new(&t, trio, r0, r1);
        let p0 = t.h[r0].count_ones() & 1;
        let kmask = t.h[r0] ^ t.h[r1];
        for (&word, b) in trio.words.iter().zip(&trio.bytes) {
            let (b0, b1, b2) = (b[0] as usize, b[1] as usize, b[2] as usize);
            let cost = bt.cost[0][b0] + bt.cost[1][b1] + bt.cost[2][b2];
            if cost > thresh {
                continue;
            }
            let parity = p0 ^ ((word & kmask).count_ones() & 1);
            let total = if parity as usize != m {
                cost + bt.fix[0][b0].min(bt.fix[1][b1]).min(bt.fix[2][b2])
            } else {
                cost
            };
            if total > thresh {
                continue;
            }
            if total < best - 1e-9 * (1.0 + best.min(1e300)) {
                near.clear();
            }
            near.push((m, word));
            if total < best {
                best = total;
                thresh = best + 1e-9 * (1.0 + best);
            }
        }
    }

    // Resolve near-ties exactly.
    let mut cand = [0.0f64; DIM];
    let mut best_exact = f64::INFINITY;
    let mut tie = false;
    let mut have = false;
    for &(m, word) in &near {
        let inner_tie = t.materialize(m, word, &mut cand);
        let d = dist2(y, &cand);
        let replace = if !have || d < best_exact {
            tie = inner_tie;
            true
        } else if d == best_exact {
            tie = true;
            lex_cmp(&cand, out) == std::cmp::Ordering::Less
        } else {
            false
        };
        if replace {
            best_exact = d;
            out.copy_from_slice(&cand);
            have = true;
        }
    }
    tie
}
