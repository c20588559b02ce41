//! Closest-point decoders for Zⁿ, Dₙ and E8 in canonical coordinates.
//!
//! Each decoder writes the nearest point into `out` and returns `true` when
//! an exact tie between distinct nearest points was broken. Ties resolve to
//! the lexicographically smallest candidate.

use std::cmp::Ordering;

/// Round to nearest integer, halves go down (the lexicographically smaller
/// neighbour).
#[inline]
pub(crate) fn round_half_down(v: f64) -> f64 {
    (v - 0.5).ceil()
}

#[inline]
pub(crate) fn is_half(v: f64) -> bool {
    v - v.floor() == 0.5
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn decode_integer(y: &[f64], out: &mut [f64]) -> bool {
    let mut tie = false;
    for (o, &v) in out.iter_mut().zip(y) {
        tie |= is_half(v);
        *o = round_half_down(v);
    }
    tie
}

/// Pick the coordinate whose single-step change is cheapest. Among equally
/// cheap changes the lexicographically smallest result wins: the first
/// downward move if any, otherwise the last upward one.
pub(crate) fn cheapest_flip(deltas: &[f64], downward: &[bool]) -> (usize, bool) {
    let best = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = (0..deltas.len()).filter(|&i| deltas[i] == best).collect();
    let pick = tied
        .iter()
        .copied()
        .find(|&i| downward[i])
        .unwrap_or(*tied.last().expect("nonempty"));
    (pick, tied.len() > 1)
}

pub(crate) fn decode_checkerboard(y: &[f64], out: &mut [f64]) -> bool {
    let mut tie = decode_integer(y, out);
    let sum: i64 = out.iter().map(|&v| v as i64).sum();
    if sum.rem_euclid(2) == 0 {
        return tie;
    }
    let n = y.len();
    let mut deltas = vec![0.0; n];
    let mut downward = vec![false; n];
    for i in 0..n {
        let x = out[i];
        let down = y[i] <= x;
        tie |= y[i] == x;
        let alt = if down { x - 1.0 } else { x + 1.0 };
        deltas[i] = (y[i] - alt).powi(2) - (y[i] - x).powi(2);
        downward[i] = down;
    }
    let (i, t) = cheapest_flip(&deltas, &downward);
    out[i] += if downward[i] { -1.0 } else { 1.0 };
    tie | t
}

/// E8 = D8 ∪ (D8 + ½·1).
pub(crate) fn decode_gosset(y: &[f64], out: &mut [f64]) -> bool {
    let mut a = [0.0; 8];
    let mut b = [0.0; 8];
    let shifted: Vec<f64> = y.iter().map(|v| v - 0.5).collect();
    let ta = decode_checkerboard(y, &mut a);
    let tb = decode_checkerboard(&shifted, &mut b);
    b.iter_mut().for_each(|v| *v += 0.5);
    let da = dist2(y, &a);
    let db = dist2(y, &b);
    let (pick_a, tie) = match da.partial_cmp(&db).unwrap_or(Ordering::Equal) {
        Ordering::Less => (true, ta),
        Ordering::Greater => (false, tb),
        Ordering::Equal => (lex_cmp(&a, &b) != Ordering::Greater, true),
    };
    out.copy_from_slice(if pick_a { &a } else { &b });
    tie
}
