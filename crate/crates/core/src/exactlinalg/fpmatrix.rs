//! Dense matrices over a [`FiniteField`].

use std::fmt;
use std::sync::Arc;

use super::field::FiniteField;
use super::poly::Poly;
use super::LinalgError;

#[derive(Clone, PartialEq, Eq)]
pub struct FpMatrix {
    field: Arc<FiniteField>,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:?} {}x{}", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| self.field.format(self.get(r, c)))
                .collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl FpMatrix {
    pub fn zero(field: &Arc<FiniteField>, rows: usize, cols: usize) -> Self {
        FpMatrix { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &Arc<FiniteField>, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &Arc<FiniteField>, rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zero(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// From integer entries reduced into the prime subfield.
    pub fn from_ints(field: &Arc<FiniteField>, rows: &[Vec<i64>]) -> Self {
        let conv: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_int(x)).collect())
            .collect();
        Self::from_rows(field, &conv)
    }

    /// Matrix whose columns are the given vectors (all of length `n`).
    pub fn from_columns(field: &Arc<FiniteField>, n: usize, cols: &[Vec<u64>]) -> Self {
        let mut m = Self::zero(field, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = Self::zero(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, o: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (o.rows, o.cols),
            });
        }
        let f = &self.field;
        let mut out = Self::zero(f, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b != 0 {
                        let idx = i * o.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(0, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j])))
            })
            .collect()
    }

    pub fn add(&self, o: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let f = &self.field;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.add(a, b)).collect();
        FpMatrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let f = &self.field;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.sub(a, b)).collect();
        FpMatrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: u64) -> FpMatrix {
        let f = &self.field;
        let data = self.data.iter().map(|&a| f.mul(a, s)).collect();
        FpMatrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// Evaluate a polynomial at a square matrix.
    pub fn eval_poly(&self, p: &Poly) -> FpMatrix {
        let n = self.rows;
        let mut acc = Self::zero(&self.field, n, n);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul(self).unwrap();
            for i in 0..n {
                let v = self.field.add(acc.get(i, i), c);
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// Map entries into a larger field.
    pub fn map_entries(&self, target: &Arc<FiniteField>, g: impl Fn(u64) -> u64) -> FpMatrix {
        FpMatrix {
            field: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| g(x)).collect(),
        }
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).unwrap();
            for j in c..self.cols {
                let v = f.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel `{v : A v = 0}`, as column vectors.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let f = &self.field;
        let mut basis = vec![];
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(m.get(r, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `A X = B` for square invertible `A`.
    pub fn solve(&self, b: &FpMatrix) -> Option<FpMatrix> {
        let n = self.rows;
        if self.cols != n || b.rows != n {
            return None;
        }
        let mut aug = Self::zero(&self.field, n, n + b.cols);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            for j in 0..b.cols {
                aug.set(i, n + j, b.get(i, j));
            }
        }
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut x = Self::zero(&self.field, n, b.cols);
        for i in 0..n {
            for j in 0..b.cols {
                x.set(i, j, aug.get(i, n + j));
            }
        }
        Some(x)
    }

    /// Characteristic polynomial `det(x I - A)` via Hessenberg reduction.
    pub fn charpoly(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "charpoly of a non-square matrix");
        let f = self.field.clone();
        let n = self.rows;
        let mut h = self.clone();
        // Reduce to upper Hessenberg form by similarity.
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| h.get(i, m - 1) != 0) else {
                continue;
            };
            if i != m {
                for j in 0..n {
                    h.data.swap(i * n + j, m * n + j);
                }
                for r in 0..n {
                    h.data.swap(r * n + i, r * n + m);
                }
            }
            let inv = f.inv(h.get(m, m - 1)).unwrap();
            for i in m + 1..n {
                let u = f.mul(h.get(i, m - 1), inv);
                if u == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = f.sub(h.get(i, j), f.mul(u, h.get(m, j)));
                    h.set(i, j, v);
                }
                for r in 0..n {
                    let v = f.add(h.get(r, m), f.mul(u, h.get(r, i)));
                    h.set(r, m, v);
                }
            }
        }
        // Recurrence on leading principal minors.
        let mut p: Vec<Poly> = vec![Poly::constant(&f, 1)];
        for m in 1..=n {
            let diag = Poly::linear(&f, h.get(m - 1, m - 1));
            let mut pm = diag.mul(&p[m - 1]);
            let mut t = 1u64;
            for i in 1..m {
                t = f.mul(t, h.get(m - i, m - i - 1));
                let c = f.mul(t, h.get(m - i - 1, m - 1));
                if c != 0 {
                    pm = pm.sub(&p[m - i - 1].scale(c));
                }
            }
            p.push(pm);
        }
        p.pop().unwrap()
    }

    /// Matrix of `self` restricted to the invariant subspace spanned by the
    /// columns of `basis` (assumed independent), i.e. `X` with `A B = B X`.
    pub fn restrict(&self, basis: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        let ab = self.mul(basis)?;
        let d = basis.cols;
        // Pick d rows where B is invertible.
        let bt = basis.transpose();
        let mut echelon = bt.clone();
        let rows_sel = echelon.rref();
        if rows_sel.len() < d {
            return Err(LinalgError::NotInvariant);
        }
        let pick = |m: &FpMatrix| {
            let mut out = FpMatrix::zero(&self.field, d, m.cols);
            for (k, &r) in rows_sel.iter().enumerate() {
                for j in 0..m.cols {
                    out.set(k, j, m.get(r, j));
                }
            }
            out
        };
        let x = pick(basis).solve(&pick(&ab)).ok_or(LinalgError::NotInvariant)?;
        if basis.mul(&x)? != ab {
            return Err(LinalgError::NotInvariant);
        }
        Ok(x)
    }
}
