//! Sparse integer matrices with unbounded entries.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::LinalgError;

const TEXT_HEADER: &str = "# intmatrix v1";

/// Sparse `rows x cols` matrix over `Z`. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(v));
            }
        }
        m
    }

    pub fn from_dense_big(rows: usize, cols: usize, data: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zero(rows, cols);
        for (i, row) in data.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Build from `(row, col, value)` triples; repeated positions are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut m = Self::zero(rows, cols);
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(LinalgError::IndexOutOfRange { row: r, col: c, rows, cols });
            }
            m.add_to(r, c, &v);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &BigInt) {
        if v.is_zero() {
            return;
        }
        let e = self.entries.entry((r, c)).or_default();
        *e += v;
        if e.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    /// Nonzero entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in self.iter() {
            d[r][c] = v.clone();
        }
        d
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zero(self.cols, self.rows);
        for (r, c, v) in self.iter() {
            t.entries.insert((c, r), v.clone());
        }
        t
    }

    pub fn mul(&self, o: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (o.rows, o.cols),
            });
        }
        let mut by_row: Vec<Vec<(usize, &BigInt)>> = vec![vec![]; o.rows];
        for (r, c, v) in o.iter() {
            by_row[r].push((c, v));
        }
        let mut out = Self::zero(self.rows, o.cols);
        for (i, k, a) in self.iter() {
            for &(j, b) in &by_row[k] {
                out.add_to(i, j, &(a * b));
            }
        }
        Ok(out)
    }

    /// Largest absolute value of an entry.
    pub fn max_abs(&self) -> BigInt {
        self.entries.values().map(|v| v.abs()).max().unwrap_or_default()
    }

    /// Determinant of a square matrix by fraction-free elimination.
    pub fn det(&self) -> Result<BigInt, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.to_dense();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(sign * prev)
    }

    /// Serialize in the versioned sparse text format:
    /// a header line, `rows cols nnz`, then `row col value` per entry.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", TEXT_HEADER).unwrap();
        writeln!(s, "{} {} {}", self.rows, self.cols, self.nnz()).unwrap();
        for (r, c, v) in self.iter() {
            writeln!(s, "{} {} {}", r, c, v).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<IntMatrix, LinalgError> {
        let bad = |line: usize, msg: &str| LinalgError::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == TEXT_HEADER => {}
            Some((i, _)) => return Err(bad(i + 1, "missing or unsupported header")),
            None => return Err(bad(1, "empty input")),
        }
        let (ln, dims) = lines.next().ok_or_else(|| bad(2, "missing dimensions"))?;
        let dims: Vec<usize> = dims
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(ln + 1, "bad dimensions"))?;
        let [rows, cols, nnz] = dims[..] else {
            return Err(bad(ln + 1, "expected rows cols nnz"));
        };
        let mut m = Self::zero(rows, cols);
        let mut count = 0;
        for (i, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(bad(i + 1, "expected row col value"));
            }
            let r: usize = toks[0].parse().map_err(|_| bad(i + 1, "bad row"))?;
            let c: usize = toks[1].parse().map_err(|_| bad(i + 1, "bad column"))?;
            let v: BigInt = toks[2].parse().map_err(|_| bad(i + 1, "bad value"))?;
            if r >= rows || c >= cols {
                return Err(bad(i + 1, "index out of range"));
            }
            if v.is_zero() || m.entries.contains_key(&(r, c)) {
                return Err(bad(i + 1, "zero or duplicate entry"));
            }
            m.entries.insert((r, c), v);
            count += 1;
        }
        if count != nnz {
            return Err(bad(0, "entry count does not match header"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let m = IntMatrix::from_dense(&[vec![0, 3, 0], vec![-7, 0, 1]]);
        let t = m.to_text();
        assert_eq!(IntMatrix::from_text(&t).unwrap(), m);
        assert!(IntMatrix::from_text("1 1 0\n").is_err());
    }

    #[test]
    fn det_small() {
        let m = IntMatrix::from_dense(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(m.det().unwrap(), BigInt::from(18));
        let m = IntMatrix::from_dense(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.det().unwrap(), BigInt::from(-1));
    }
}
