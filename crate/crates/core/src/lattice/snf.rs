//! Exact integer matrix machinery: Smith normal form, determinants, and
//! Hermite-style echelon bases.
//!
//! All arithmetic is checked `i128`; overflow surfaces as [`Error::Overflow`]
//! instead of silently wrapping.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn diagonal(diag: &[i128]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_rows<T: Copy + Into<i128>>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v.into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diag(&self) -> Vec<i128> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == 0))
    }

    pub fn scaled(&self, k: i128) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|&v| v.checked_mul(k).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a.checked_mul(other[(k, j)]).ok_or(Error::Overflow)?;
                    out[(i, j)] = out[(i, j)].checked_add(p).ok_or(Error::Overflow)?;
                }
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i128) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for j in 0..self.cols {
            let p = self[(src, j)].checked_mul(k).ok_or(Error::Overflow)?;
            self[(dst, j)] = self[(dst, j)].checked_add(p).ok_or(Error::Overflow)?;
        }
        Ok(())
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i128) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for i in 0..self.rows {
            let p = self[(i, src)].checked_mul(k).ok_or(Error::Overflow)?;
            self[(i, dst)] = self[(i, dst)].checked_add(p).ok_or(Error::Overflow)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination. Intermediates
/// are arbitrary precision; only the result must fit in `i128`.
pub fn determinant(m: &IntMatrix) -> Result<i128> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows, got: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| m.row(i).iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let det = if negate { -&a[n - 1][n - 1] } else { a[n - 1][n - 1].clone() };
    det.to_i128().ok_or(Error::Overflow)
}

/// Result of [`smith_normal_form`]: `u * m * v == d`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, tracked alongside the column operations.
    pub v_inv: IntMatrix,
}

impl SmithForm {
    pub fn invariant_factors(&self) -> Vec<i128> {
        self.d.diag()
    }
}

/// Smith normal form of a nonsingular square integer matrix.
///
/// The diagonal of `d` is positive and each entry divides the next; `u` and
/// `v` are unimodular.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows, got: m.cols });
    }
    if determinant(m)? == 0 {
        return Err(Error::Singular);
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut u = IntMatrix::identity(n);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    for t in 0..n {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    let x = a[(i, j)];
                    if x != 0 && pivot.is_none_or(|(pi, pj)| x.abs() < a[(pi, pj)].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let (pi, pj) = pivot.ok_or(Error::Singular)?;
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = a[(t, t)];
            let mut clean = true;
            for i in t + 1..n {
                let q = a[(i, t)] / p;
                a.add_row(i, t, -q)?;
                u.add_row(i, t, -q)?;
                clean &= a[(i, t)] == 0;
            }
            for j in t + 1..n {
                let q = a[(t, j)] / p;
                a.add_col(j, t, -q)?;
                v.add_col(j, t, -q)?;
                v_inv.add_row(t, j, q)?;
                clean &= a[(t, j)] == 0;
            }
            if !clean {
                continue;
            }
            // Every remaining entry must be a multiple of the pivot.
            let offender = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| a[(i, j)] % p != 0);
            match offender {
                Some((i, _)) => {
                    a.add_row(t, i, 1)?;
                    u.add_row(t, i, 1)?;
                }
                None => break,
            }
        }
        if a[(t, t)] < 0 {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    Ok(SmithForm { u, d: a, v, v_inv })
}

/// Echelon basis of the integer row span of `rows` (a Hermite-style
/// reduction without the upper reduction step). Fails when the span is not
/// full rank.
pub fn echelon_basis(rows: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    let mut pool: Vec<Vec<i64>> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let mut basis = Vec::with_capacity(n);
    for col in 0..n {
        loop {
            let pivot = pool
                .iter()
                .enumerate()
                .filter(|(_, r)| r[col] != 0)
                .min_by_key(|(_, r)| r[col].abs())
                .map(|(i, _)| i);
            let Some(pi) = pivot else {
                return Err(Error::Singular);
            };
            let p = pool[pi].clone();
            let mut done = true;
            for (i, r) in pool.iter_mut().enumerate() {
                if i == pi || r[col] == 0 {
                    continue;
                }
                let q = r[col] / p[col];
                for (x, &y) in r.iter_mut().zip(&p) {
                    *x -= q * y;
                }
                done &= r[col] == 0;
            }
            if done {
                let mut row = pool.swap_remove(pi);
                if row[col] < 0 {
                    row.iter_mut().for_each(|x| *x = -*x);
                }
                basis.push(row);
                pool.retain(|r| r.iter().any(|&x| x != 0));
                break;
            }
        }
    }
    Ok(basis)
}
