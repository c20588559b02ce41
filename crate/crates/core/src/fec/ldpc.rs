//! Sparse parity-check codes, their encoders and the alist file format.
//!
//! ## alist format
//!
//! Plain text, whitespace separated, 1-based indices (MacKay's layout):
//!
//! ```text
//! n m                      columns (variables) and rows (checks)
//! max_col_weight max_row_weight
//! col_weight_1 … col_weight_n
//! row_weight_1 … row_weight_m
//! n lines: the rows of each column (zero padding allowed)
//! m lines: the columns of each row (zero padding allowed)
//! ```
//!
//! The reader takes the column lists as authoritative and ignores the row
//! lists, so files without the trailing row section are accepted too.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// How codewords are produced from information bits.
#[derive(Clone, Debug)]
enum Encoder {
    /// Info bits occupy columns 0..k, the parity part is the dual-diagonal
    /// staircase (check j touches parity j and j − 1).
    Staircase,
    /// Reduced echelon form: `rows[r]` lists the info positions feeding the
    /// parity bit at `pivots[r]`.
    Dense { pivots: Vec<usize>, rows: Vec<Vec<u32>> },
}

/// A binary LDPC code with its Tanner graph in both orientations.
#[derive(Clone, Debug)]
pub struct LdpcCode {
    name: String,
    n: usize,
    k: usize,
    m: usize,
    /// Check-major edge list: variables of check c are
    /// `check_vars[check_ptr[c]..check_ptr[c + 1]]`.
    pub(crate) check_ptr: Vec<u32>,
    pub(crate) check_vars: Vec<u32>,
    /// Edge indices of each variable, into the check-major edge list.
    pub(crate) var_ptr: Vec<u32>,
    pub(crate) var_edges: Vec<u32>,
    info_positions: Vec<usize>,
    encoder: Encoder,
}

impl LdpcCode {
    /// Code from the row lists of H (duplicates cancel, as in GF(2)).
    pub fn from_checks(name: &str, n: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        let m = checks.len();
        let mut check_ptr = Vec::with_capacity(m + 1);
        let mut check_vars = Vec::new();
        check_ptr.push(0u32);
        for mut row in checks {
            row.sort_unstable();
            let mut i = 0;
            while i < row.len() {
                let v = row[i];
                let mut run = 1;
                while i + run < row.len() && row[i + run] == v {
                    run += 1;
                }
                if v >= n {
                    return Err(Error::Parse(format!("column index {v} outside 0..{n}")));
                }
                if run % 2 == 1 {
                    check_vars.push(v as u32);
                }
                i += run;
            }
            check_ptr.push(check_vars.len() as u32);
        }
        let mut deg = vec![0u32; n];
        for &v in &check_vars {
            deg[v as usize] += 1;
        }
        let mut var_ptr = Vec::with_capacity(n + 1);
        var_ptr.push(0u32);
        for d in &deg {
            var_ptr.push(var_ptr.last().unwrap() + d);
        }
        let mut fill = var_ptr.clone();
        let mut var_edges = vec![0u32; check_vars.len()];
        for (e, &v) in check_vars.iter().enumerate() {
            var_edges[fill[v as usize] as usize] = e as u32;
            fill[v as usize] += 1;
        }
        let mut code = LdpcCode {
            name: name.to_string(),
            n,
            k: 0,
            m,
            check_ptr,
            check_vars,
            var_ptr,
            var_edges,
            info_positions: Vec::new(),
            encoder: Encoder::Staircase,
        };
        if code.is_staircase() {
            code.k = n - m;
            code.info_positions = (0..code.k).collect();
        } else {
            code.build_dense_encoder();
        }
        Ok(code)
    }

    fn is_staircase(&self) -> bool {
        if self.m == 0 || self.m > self.n {
            return false;
        }
        let k = self.n - self.m;
        (0..self.m).all(|c| {
            let mut parity: Vec<usize> =
                self.check(c).iter().map(|&v| v as usize).filter(|&v| v >= k).map(|v| v - k).collect();
            parity.sort_unstable();
            if c == 0 {
                parity == [0]
            } else {
                parity == [c - 1, c]
            }
        })
    }

    /// Gaussian elimination over GF(2), preferring pivots in the rightmost
    /// columns so that info bits stay in front whenever H allows it.
    fn build_dense_encoder(&mut self) {
        let words = self.n.div_ceil(64);
        let mut rows: Vec<Vec<u64>> = (0..self.m)
            .map(|c| {
                let mut r = vec![0u64; words];
                for &v in self.check(c) {
                    r[v as usize / 64] ^= 1 << (v % 64);
                }
                r
            })
            .collect();
        let bit = |r: &[u64], j: usize| (r[j / 64] >> (j % 64)) & 1 == 1;
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in (0..self.n).rev() {
            let Some(p) = (rank..self.m).find(|&r| bit(&rows[r], col)) else { continue };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && bit(row, col) {
                    row.iter_mut().zip(&pivot_row).for_each(|(a, b)| *a ^= b);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == self.m {
                break;
            }
        }
        let mut is_pivot = vec![false; self.n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        self.info_positions = (0..self.n).filter(|&j| !is_pivot[j]).collect();
        self.k = self.info_positions.len();
        let dense_rows = rows[..rank]
            .iter()
            .map(|r| self.info_positions.iter().filter(|&&j| bit(r, j)).map(|&j| j as u32).collect())
            .collect();
        self.encoder = Encoder::Dense { pivots, rows: dense_rows };
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Codeword length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Information length.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of parity checks (rows of H).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn edges(&self) -> usize {
        self.check_vars.len()
    }

    /// Codeword positions that carry the information bits, ascending.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// True when the information bits are the codeword prefix.
    pub fn is_prefix_systematic(&self) -> bool {
        self.info_positions.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Variables of check c.
    #[inline]
    pub fn check(&self, c: usize) -> &[u32] {
        &self.check_vars[self.check_ptr[c] as usize..self.check_ptr[c + 1] as usize]
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        let mut out = vec![0u8; self.n];
        self.encode_into(info, &mut out)?;
        Ok(out)
    }

    pub fn encode_into(&self, info: &[u8], out: &mut [u8]) -> Result<()> {
        if info.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: info.len() });
        }
        if out.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: out.len() });
        }
        out.fill(0);
        for (&p, &b) in self.info_positions.iter().zip(info) {
            out[p] = b & 1;
        }
        match &self.encoder {
            Encoder::Staircase => {
                let k = self.k;
                let mut acc = 0u8;
                for c in 0..self.m {
                    for &v in self.check(c) {
                        if (v as usize) < k {
                            acc ^= out[v as usize];
                        }
                    }
                    out[k + c] = acc;
                }
            }
            Encoder::Dense { pivots, rows } => {
                for (&p, row) in pivots.iter().zip(rows) {
                    out[p] = row.iter().fold(0, |a, &j| a ^ out[j as usize]);
                }
            }
        }
        Ok(())
    }

    /// Information bits of a codeword (or hard decision).
    pub fn extract_info(&self, word: &[u8]) -> Vec<u8> {
        self.info_positions.iter().map(|&p| word[p]).collect()
    }

    /// Number of unsatisfied checks of a hard-decision word.
    pub fn syndrome_weight(&self, word: &[u8]) -> usize {
        (0..self.m).filter(|&c| self.check(c).iter().fold(0u8, |a, &v| a ^ word[v as usize]) & 1 == 1).count()
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.n
            && (0..self.m).all(|c| self.check(c).iter().fold(0u8, |a, &v| a ^ word[v as usize]) & 1 == 0)
    }

    /// Rows of each column, 0-based (the column view of H).
    pub fn columns(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|v| {
                let mut rows: Vec<usize> = self.var_edges[self.var_ptr[v] as usize..self.var_ptr[v + 1] as usize]
                    .iter()
                    .map(|&e| self.check_of_edge(e as usize))
                    .collect();
                rows.sort_unstable();
                rows
            })
            .collect()
    }

    fn check_of_edge(&self, e: usize) -> usize {
        self.check_ptr.partition_point(|&p| p as usize <= e) - 1
    }

    pub fn to_alist(&self) -> String {
        let cols = self.columns();
        let rows: Vec<&[u32]> = (0..self.m).map(|c| self.check(c)).collect();
        let max_c = cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_r = rows.iter().map(|r| r.len()).max().unwrap_or(0);
        let mut s = String::new();
        let join = |it: &mut dyn Iterator<Item = usize>| it.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(s, "{} {}", self.n, self.m).unwrap();
        writeln!(s, "{max_c} {max_r}").unwrap();
        writeln!(s, "{}", join(&mut cols.iter().map(Vec::len))).unwrap();
        writeln!(s, "{}", join(&mut rows.iter().map(|r| r.len()))).unwrap();
        for c in &cols {
            let mut line: Vec<usize> = c.iter().map(|r| r + 1).collect();
            line.resize(max_c.max(1), 0);
            writeln!(s, "{}", join(&mut line.into_iter())).unwrap();
        }
        for r in &rows {
            let mut line: Vec<usize> = r.iter().map(|&v| v as usize + 1).collect();
            line.sort_unstable();
            line.resize(max_r.max(1), 0);
            writeln!(s, "{}", join(&mut line.into_iter())).unwrap();
        }
        s
    }

    pub fn from_alist(name: &str, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut next_nums = |what: &str| -> Result<Vec<usize>> {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("alist ends before the {what}")))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad number `{t}` in the {what}"))))
                .collect()
        };
        let dims = next_nums("size line")?;
        let [n, m] = dims[..] else { return Err(Error::Parse("size line needs `n m`".into())) };
        next_nums("max weight line")?;
        let col_w = next_nums("column weights")?;
        next_nums("row weights")?;
        if col_w.len() != n {
            return Err(Error::Parse(format!("{} column weights for {n} columns", col_w.len())));
        }
        let mut checks = vec![Vec::new(); m];
        for (col, &w) in col_w.iter().enumerate() {
            let rows: Vec<usize> = next_nums("column lists")?.into_iter().filter(|&r| r != 0).collect();
            if rows.len() != w {
                return Err(Error::Parse(format!("column {col} lists {} rows, weight says {w}", rows.len())));
            }
            for r in rows {
                if r > m {
                    return Err(Error::Parse(format!("row index {r} outside 1..={m}")));
                }
                checks[r - 1].push(col);
            }
        }
        Self::from_checks(name, n, checks)
    }

    pub fn load_alist(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("alist");
        Self::from_alist(name, &text)
    }
}
