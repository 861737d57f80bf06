//! Smith normal form and integral homology.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::intmatrix::IntMatrix;
use super::LinalgError;

/// `A = U * S * V` with `U`, `V` unimodular and `S` diagonal in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SNFResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SNFResult {
    /// Nonzero diagonal entries of `S`, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.get(i, i)).filter(|d| !d.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Nearest integer to `a / b`, for `b != 0`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (a, b) = if b.is_negative() { (-a, -b) } else { (a.clone(), b.clone()) };
    let num: BigInt = a * 2 + &b;
    num.div_floor(&(b * 2))
}

struct Dense {
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
    ops: u64,
    budget: Option<u64>,
}

impl Dense {
    fn new(a: Vec<Vec<BigInt>>, cols: usize, track: bool, budget: Option<u64>) -> Self {
        let m = a.len();
        let ident = |n: usize| {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
                .collect::<Vec<Vec<BigInt>>>()
        };
        Dense {
            u: track.then(|| ident(m)),
            v: track.then(|| ident(cols)),
            a,
            ops: 0,
            budget,
        }
    }

    fn tick(&mut self) -> Result<(), LinalgError> {
        self.ops += 1;
        match self.budget {
            Some(b) if self.ops > b => Err(LinalgError::ResourceLimit(format!(
                "Smith normal form exceeded {} elementary operations",
                b
            ))),
            _ => Ok(()),
        }
    }

    /// row_i += c * row_j
    fn row_add(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let (ri, rj) = two_mut(&mut self.a, i, j);
        for (x, y) in ri.iter_mut().zip(rj.iter()) {
            if !y.is_zero() {
                *x += c * y;
            }
        }
        if let Some(u) = &mut self.u {
            for row in u.iter_mut() {
                if !row[i].is_zero() {
                    let t = c * &row[i];
                    row[j] -= t;
                }
            }
        }
    }

    /// col_i += c * col_j
    fn col_add(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for row in self.a.iter_mut() {
            if !row[j].is_zero() {
                let t = c * &row[j];
                row[i] += t;
            }
        }
        if let Some(v) = &mut self.v {
            let (vj, vi) = two_mut(v, j, i);
            for (x, y) in vj.iter_mut().zip(vi.iter()) {
                if !y.is_zero() {
                    *x -= c * y;
                }
            }
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            for row in u.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            v.swap(i, j);
        }
    }

    fn row_neg(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for row in u.iter_mut() {
                row[i] = -&row[i];
            }
        }
    }

    /// Move the best pivot of the trailing submatrix to `(t, t)`.
    fn choose_pivot(&mut self, t: usize, cols: usize) -> bool {
        let m = self.a.len();
        let mut row_nnz = vec![0usize; m];
        let mut col_nnz = vec![0usize; cols];
        for i in t..m {
            for j in t..cols {
                if !self.a[i][j].is_zero() {
                    row_nnz[i] += 1;
                    col_nnz[j] += 1;
                }
            }
        }
        let mut best: Option<(BigInt, usize, usize, usize)> = None;
        for i in t..m {
            for j in t..cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                let key = (x.abs(), row_nnz[i] + col_nnz[j]);
                let better = match &best {
                    None => true,
                    Some((b, s, _, _)) => (&key.0, key.1) < (b, *s),
                };
                if better {
                    best = Some((key.0, key.1, i, j));
                }
            }
        }
        match best {
            None => false,
            Some((_, _, i, j)) => {
                self.row_swap(t, i);
                self.col_swap(t, j);
                true
            }
        }
    }

    fn run(&mut self, cols: usize) -> Result<(), LinalgError> {
        let m = self.a.len();
        let mut t = 0;
        while t < m.min(cols) {
            if !self.choose_pivot(t, cols) {
                break;
            }
            loop {
                let p = self.a[t][t].clone();
                let mut clean = true;
                for i in t + 1..m {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = round_div(&self.a[i][t], &p);
                    self.row_add(i, t, &-q);
                    self.tick()?;
                    if !self.a[i][t].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..cols {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = round_div(&self.a[t][j], &p);
                    self.col_add(j, t, &-q);
                    self.tick()?;
                    if !self.a[t][j].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    // Bring the smallest remainder in row/column t to the pivot.
                    let mut best = (p.abs(), t, t);
                    for i in t + 1..m {
                        let x = self.a[i][t].abs();
                        if !x.is_zero() && x < best.0 {
                            best = (x, i, t);
                        }
                    }
                    for j in t + 1..cols {
                        let x = self.a[t][j].abs();
                        if !x.is_zero() && x < best.0 {
                            best = (x, t, j);
                        }
                    }
                    self.row_swap(t, best.1);
                    self.col_swap(t, best.2);
                    continue;
                }
                // Enforce divisibility by the rest of the submatrix.
                let bad = (t + 1..m).find_map(|i| {
                    (t + 1..cols)
                        .any(|j| !self.a[i][j].is_multiple_of(&p))
                        .then_some(i)
                });
                match bad {
                    Some(i) => {
                        self.row_add(t, i, &BigInt::one());
                        self.tick()?;
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.row_neg(t);
            }
            t += 1;
        }
        Ok(())
    }
}

fn two_mut<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &T) {
    assert_ne!(i, j);
    if i < j {
        let (a, b) = v.split_at_mut(j);
        (&mut a[i], &b[0])
    } else {
        let (a, b) = v.split_at_mut(i);
        (&mut b[0], &a[j])
    }
}

/// Row Hermite reduction driven by LLL on the row transform, after Havas,
/// Majewski and Matthews. Plain elimination keeps `A` small but the
/// accumulated transforms grow by the size of every quotient; reducing the
/// transform lattice as we go keeps them within a few bits of the input.
///
/// On return `a_in = w * b`: zero rows first, then echelon rows whose leading
/// columns decrease downward and whose leading entries are positive.
///
/// Gram data (`d`, `lam`) is only read for the prefix of zero rows, so it is
/// kept for that prefix alone and extended when a row joins it.
struct LllHermite {
    b: Vec<Vec<BigInt>>,
    /// Accumulated row transform, `b = p * a_in`.
    p: Vec<Vec<BigInt>>,
    /// Its inverse.
    w: Vec<Vec<BigInt>>,
    /// Rows `0..z` are zero and have valid Gram data.
    z: usize,
    /// Gram determinants of the leading transform rows, `d[0] = 1`.
    d: Vec<BigInt>,
    /// `lam[i][j]` for `j < min(i, z)`.
    lam: Vec<Vec<BigInt>>,
    cols: usize,
    ops: u64,
    budget: Option<u64>,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

impl LllHermite {
    fn new(b: Vec<Vec<BigInt>>, cols: usize, budget: Option<u64>) -> Self {
        let k = b.len();
        // Presorting into the final row order costs no swaps: a permutation
        // transform has trivial Gram data.
        let lead = |row: &Vec<BigInt>| row.iter().position(|x| !x.is_zero()).unwrap_or(cols);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(lead(&b[i])));
        let mut p = vec![vec![BigInt::zero(); k]; k];
        let mut w = vec![vec![BigInt::zero(); k]; k];
        for (new, &old) in order.iter().enumerate() {
            p[new][old] = BigInt::one();
            w[old][new] = BigInt::one();
        }
        let mut b = b;
        let b: Vec<Vec<BigInt>> = order.iter().map(|&i| std::mem::take(&mut b[i])).collect();
        let z = b.iter().take_while(|row| row.iter().all(Zero::is_zero)).count();
        LllHermite {
            b,
            p,
            w,
            z,
            d: vec![BigInt::one(); k + 1],
            lam: vec![vec![BigInt::zero(); k]; k],
            cols,
            ops: 0,
            budget,
        }
    }

    fn tick(&mut self) -> Result<(), LinalgError> {
        self.ops += 1;
        match self.budget {
            Some(b) if self.ops > b => Err(LinalgError::ResourceLimit(format!(
                "Hermite reduction exceeded {} elementary operations",
                b
            ))),
            _ => Ok(()),
        }
    }

    fn lead(&self, i: usize) -> usize {
        self.b[i].iter().position(|x| !x.is_zero()).unwrap_or(self.cols)
    }

    /// Extend the Gram data over every zero row now sitting at `z`.
    fn absorb(&mut self) {
        let rows = self.b.len();
        while self.z < rows && self.b[self.z].iter().all(Zero::is_zero) {
            let z = self.z;
            let step = |mut u: BigInt, lam_i: &[BigInt], lam_z: &[BigInt], d: &[BigInt]| {
                for l in 0..z {
                    u = (&d[l + 1] * u - &lam_i[l] * &lam_z[l]) / &d[l];
                }
                u
            };
            self.d[z + 1] = step(dot(&self.p[z], &self.p[z]), &self.lam[z], &self.lam[z], &self.d);
            for i in z + 1..rows {
                let u = step(dot(&self.p[i], &self.p[z]), &self.lam[i], &self.lam[z], &self.d);
                self.lam[i][z] = u;
            }
            self.z += 1;
        }
    }

    fn negate(&mut self, i: usize) {
        for x in self.b[i].iter_mut().chain(self.p[i].iter_mut()) {
            *x = -&*x;
        }
        for row in self.w.iter_mut() {
            row[i] = -&row[i];
        }
        let z = self.z;
        for x in self.lam[i][..i.min(z)].iter_mut() {
            *x = -&*x;
        }
        if i < z {
            for r in i + 1..self.b.len() {
                self.lam[r][i] = -&self.lam[r][i];
            }
        }
    }

    /// row_k -= q * row_i, for i < k.
    fn sub(&mut self, k: usize, i: usize, q: &BigInt) {
        for m in [&mut self.b, &mut self.p] {
            let (rk, ri) = two_mut(m, k, i);
            for (x, y) in rk.iter_mut().zip(ri.iter()) {
                if !y.is_zero() {
                    *x -= q * y;
                }
            }
        }
        for row in self.w.iter_mut() {
            if !row[k].is_zero() {
                let t = q * &row[k];
                row[i] += t;
            }
        }
        if i < self.z {
            let t = q * &self.d[i + 1];
            self.lam[k][i] -= t;
        }
        let j_max = i.min(self.z);
        let (lk, li) = two_mut(&mut self.lam, k, i);
        for (x, y) in lk[..j_max].iter_mut().zip(li[..j_max].iter()) {
            if !y.is_zero() {
                *x -= q * y;
            }
        }
    }

    /// Reduce row `k` by row `i < k`; returns both leading columns.
    fn reduce(&mut self, k: usize, i: usize) -> Result<(usize, usize), LinalgError> {
        let c1 = self.lead(i);
        if c1 < self.cols && self.b[i][c1].is_negative() {
            self.negate(i);
        }
        let c2 = self.lead(k);
        if c2 < self.cols && self.b[k][c2].is_negative() {
            self.negate(k);
        }
        let q = if c1 < self.cols {
            self.b[k][c1].div_floor(&self.b[i][c1])
        } else if (&self.lam[k][i] * 2i32).abs() > self.d[i + 1] {
            round_div(&self.lam[k][i], &self.d[i + 1])
        } else {
            BigInt::zero()
        };
        if !q.is_zero() {
            self.sub(k, i, &q);
            self.tick()?;
        }
        Ok((c1, c2))
    }

    fn swap(&mut self, k: usize) {
        debug_assert!(k != self.z, "swap across the edge of the zero prefix");
        self.b.swap(k, k - 1);
        self.p.swap(k, k - 1);
        for row in self.w.iter_mut() {
            row.swap(k, k - 1);
        }
        for j in 0..(k - 1).min(self.z) {
            let t = std::mem::take(&mut self.lam[k][j]);
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        if k >= self.z {
            return;
        }
        let l = self.lam[k][k - 1].clone();
        let bv = (&self.d[k - 1] * &self.d[k + 1] + &l * &l) / &self.d[k];
        for i in k + 1..self.b.len() {
            if self.lam[i][k].is_zero() && self.lam[i][k - 1].is_zero() {
                continue;
            }
            let t = self.lam[i][k].clone();
            let new_k = (&self.d[k + 1] * &self.lam[i][k - 1] - &l * &t) / &self.d[k];
            self.lam[i][k - 1] = (&bv * &t + &l * &new_k) / &self.d[k + 1];
            self.lam[i][k] = new_k;
        }
        self.d[k] = bv;
    }

    fn run(&mut self) -> Result<(), LinalgError> {
        let rows = self.b.len();
        let mut k = 1;
        while k < rows {
            self.absorb();
            let (c1, c2) = self.reduce(k, k - 1)?;
            self.absorb();
            let zero_pair = c1 == self.cols && c2 == self.cols;
            let lovasz_fails = zero_pair && {
                let l = &self.lam[k][k - 1];
                (&self.d[k - 1] * &self.d[k + 1] + l * l) * 4 < &self.d[k] * &self.d[k] * 3
            };
            if (c1 < self.cols && c1 <= c2) || lovasz_fails {
                self.swap(k);
                self.tick()?;
                k = (k - 1).max(1);
            } else {
                for i in (0..k - 1).rev() {
                    self.reduce(k, i)?;
                }
                k += 1;
            }
        }
        Ok(())
    }
}

fn transpose(a: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

fn dense_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|row| {
            let mut out = vec![BigInt::zero(); cols];
            for (x, brow) in row.iter().zip(b) {
                if x.is_zero() {
                    continue;
                }
                for (o, y) in out.iter_mut().zip(brow) {
                    if !y.is_zero() {
                        *o += x * y;
                    }
                }
            }
            out
        })
        .collect()
}

/// Smith normal form with transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SNFResult {
    smith_normal_form_with_budget(a, None).expect("no budget means no resource limit")
}

/// As [`smith_normal_form`], aborting with [`LinalgError::ResourceLimit`]
/// after `max_ops` elementary operations.
///
/// A row Hermite pass and a column Hermite pass (both LLL-reduced) bring `A`
/// close to diagonal with small transforms; the pivoting elimination then
/// finishes on what is left.
pub fn smith_normal_form_with_budget(
    a: &IntMatrix,
    max_ops: Option<u64>,
) -> Result<SNFResult, LinalgError> {
    let (m, n) = (a.rows(), a.cols());
    let remaining = |used: u64| max_ops.map(|b| b.saturating_sub(used));

    // A = W1 * H
    let mut rows = LllHermite::new(a.to_dense(), n, max_ops);
    rows.run()?;
    let mut used = rows.ops;
    // H^T = W2 * K, so H = K^T * W2^T
    let mut cols = LllHermite::new(transpose(&rows.b, n), m, remaining(used));
    cols.run()?;
    used += cols.ops;
    // K^T = U2 * S * V2
    let mut d = Dense::new(transpose(&cols.b, m), n, true, remaining(used));
    d.run(n)?;

    let u = dense_mul(&rows.w, d.u.as_ref().unwrap(), m);
    let v = dense_mul(d.v.as_ref().unwrap(), &transpose(&cols.w, n), n);
    let mut s = IntMatrix::zero(m, n);
    for i in 0..m.min(n) {
        s.set(i, i, d.a[i][i].clone());
    }
    Ok(SNFResult {
        u: IntMatrix::from_dense_big(m, m, &u),
        s,
        v: IntMatrix::from_dense_big(n, n, &v),
    })
}

/// Turn a list of nonzero diagonal entries into the invariant-factor chain of
/// the same diagonal matrix.
fn chain_from_diagonal(mut ds: Vec<BigInt>) -> Vec<BigInt> {
    for x in ds.iter_mut() {
        *x = x.abs();
    }
    ds.retain(|x| !x.is_one());
    let k = ds.len();
    for i in 0..k {
        for j in i + 1..k {
            let g = ds[i].gcd(&ds[j]);
            let l = &ds[i] / &g * &ds[j];
            ds[i] = g;
            ds[j] = l;
        }
    }
    ds.retain(|x| !x.is_one());
    ds
}

/// Rank and the invariant factors greater than one, without transforms.
///
/// Sparse elimination on pivots that divide their whole row and column
/// (units first, ranked by Markowitz cost); the remainder goes through the
/// dense algorithm.
pub fn elementary_divisors(a: &IntMatrix) -> (usize, Vec<BigInt>) {
    elementary_divisors_with_budget(a, None).expect("no budget means no resource limit")
}

pub fn elementary_divisors_with_budget(
    a: &IntMatrix,
    max_ops: Option<u64>,
) -> Result<(usize, Vec<BigInt>), LinalgError> {
    let mut sp = Sparse::new(a);
    let mut diag = sp.eliminate(max_ops)?;
    let (core, core_cols) = sp.dense_core();
    let mut rank = sp.rank;
    if !core.is_empty() && core_cols > 0 {
        let mut d = Dense::new(core, core_cols, false, max_ops.map(|b| b.saturating_sub(sp.ops)));
        d.run(core_cols)?;
        for i in 0..d.a.len().min(core_cols) {
            if !d.a[i][i].is_zero() {
                rank += 1;
                diag.push(d.a[i][i].clone());
            }
        }
    }
    Ok((rank, chain_from_diagonal(diag)))
}

struct Sparse {
    rows: Vec<BTreeMap<usize, BigInt>>,
    cols: Vec<BTreeSet<usize>>,
    active_cols: BTreeSet<(usize, usize)>,
    rank: usize,
    ops: u64,
}

impl Sparse {
    fn new(a: &IntMatrix) -> Self {
        let mut rows = vec![BTreeMap::new(); a.rows()];
        let mut cols = vec![BTreeSet::new(); a.cols()];
        for (r, c, v) in a.iter() {
            rows[r].insert(c, v.clone());
            cols[c].insert(r);
        }
        let active_cols = cols
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .map(|(c, s)| (s.len(), c))
            .collect();
        Sparse { rows, cols, active_cols, rank: 0, ops: 0 }
    }

    fn col_insert(&mut self, c: usize, r: usize) {
        let old = self.cols[c].len();
        if self.cols[c].insert(r) {
            self.active_cols.remove(&(old, c));
            self.active_cols.insert((old + 1, c));
        }
    }

    fn col_remove(&mut self, c: usize, r: usize) {
        let old = self.cols[c].len();
        if self.cols[c].remove(&r) {
            self.active_cols.remove(&(old, c));
            if old > 1 {
                self.active_cols.insert((old - 1, c));
            }
        }
    }

    /// row_i -= f * row_r
    fn row_sub(&mut self, i: usize, r: usize, f: &BigInt) {
        let src: Vec<(usize, BigInt)> =
            self.rows[r].iter().map(|(&c, v)| (c, v * f)).collect();
        for (c, t) in src {
            let e = self.rows[i].entry(c).or_insert_with(BigInt::zero);
            let was_zero = e.is_zero();
            *e -= t;
            if e.is_zero() {
                self.rows[i].remove(&c);
                if !was_zero {
                    self.col_remove(c, i);
                }
            } else if was_zero {
                self.col_insert(c, i);
            }
        }
    }

    fn divides_row_and_col(&self, r: usize, c: usize, p: &BigInt) -> bool {
        self.rows[r].values().all(|x| x.is_multiple_of(p))
            && self.cols[c].iter().all(|&i| self.rows[i][&c].is_multiple_of(p))
    }

    fn find_pivot(&self) -> Option<(usize, usize)> {
        // Units in the sparsest columns first.
        // After the first hit, look at a few more columns for a cheaper one.
        let mut best: Option<(usize, usize, usize)> = None;
        let mut extra = 0;
        for &(cnt, c) in &self.active_cols {
            if let Some((cost, _, _)) = best {
                extra += 1;
                if cost == 0 || extra > 8 {
                    break;
                }
            }
            for &r in &self.cols[c] {
                if self.rows[r][&c].abs().is_one() {
                    let cost = (cnt - 1) * (self.rows[r].len() - 1);
                    if best.map_or(true, |(b, _, _)| cost < b) {
                        best = Some((cost, r, c));
                    }
                }
            }
        }
        if let Some((_, r, c)) = best {
            return Some((r, c));
        }
        // Otherwise the smallest entry dividing its row and column.
        let mut cand: Option<(BigInt, usize, usize, usize)> = None;
        for &(cnt, c) in &self.active_cols {
            for &r in &self.cols[c] {
                let v = self.rows[r][&c].abs();
                let cost = (cnt - 1) * (self.rows[r].len() - 1);
                let better = cand.as_ref().map_or(true, |(b, bc, _, _)| (&v, cost) < (b, *bc));
                if better && self.divides_row_and_col(r, c, &v) {
                    cand = Some((v, cost, r, c));
                }
            }
        }
        cand.map(|(_, _, r, c)| (r, c))
    }

    fn eliminate(&mut self, max_ops: Option<u64>) -> Result<Vec<BigInt>, LinalgError> {
        let mut diag = vec![];
        while let Some((r, c)) = self.find_pivot() {
            let p = self.rows[r][&c].clone();
            let others: Vec<usize> = self.cols[c].iter().copied().filter(|&i| i != r).collect();
            for i in others {
                let f = &self.rows[i][&c] / &p;
                self.row_sub(i, r, &f);
                self.ops += 1;
                if let Some(b) = max_ops {
                    if self.ops > b {
                        return Err(LinalgError::ResourceLimit(format!(
                            "sparse elimination exceeded {} row operations",
                            b
                        )));
                    }
                }
            }
            // The pivot row is cleared by column operations that touch nothing else.
            let row = std::mem::take(&mut self.rows[r]);
            for &k in row.keys() {
                self.col_remove(k, r);
            }
            self.rank += 1;
            diag.push(p);
        }
        Ok(diag)
    }

    fn dense_core(&self) -> (Vec<Vec<BigInt>>, usize) {
        let cols: Vec<usize> = self.active_cols.iter().map(|&(_, c)| c).collect::<BTreeSet<_>>().into_iter().collect();
        let index: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let core = self
            .rows
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| {
                let mut row = vec![BigInt::zero(); cols.len()];
                for (c, v) in r {
                    row[index[c]] = v.clone();
                }
                row
            })
            .collect();
        (core, cols.len())
    }
}

/// Free rank and torsion of `ker(d_out) / im(d_in)`.
///
/// `d_in` maps into the middle group (its rows index it) and `d_out` maps out
/// of it (its columns index it).
pub fn homology_summands(
    d_in: &IntMatrix,
    d_out: &IntMatrix,
) -> Result<(usize, Vec<BigInt>), LinalgError> {
    homology_summands_with_budget(d_in, d_out, None)
}

pub fn homology_summands_with_budget(
    d_in: &IntMatrix,
    d_out: &IntMatrix,
    max_ops: Option<u64>,
) -> Result<(usize, Vec<BigInt>), LinalgError> {
    if d_out.cols() != d_in.rows() {
        return Err(LinalgError::DimensionMismatch {
            left: (d_out.rows(), d_out.cols()),
            right: (d_in.rows(), d_in.cols()),
        });
    }
    let comp = d_out.mul(d_in)?;
    if !comp.is_zero() {
        return Err(LinalgError::CompositionNonzero { nnz: comp.nnz() });
    }
    let n = d_in.rows();
    let (r_in, divisors) = elementary_divisors_with_budget(d_in, max_ops)?;
    let (r_out, _) = elementary_divisors_with_budget(d_out, max_ops)?;
    Ok((n - r_in - r_out, divisors))
}

/// Number of cyclic summands of order divisible by `p`.
pub fn p_rank(divisors: &[BigInt], p: u64) -> usize {
    let p = BigInt::from(p);
    divisors.iter().filter(|d| d.is_multiple_of(&p)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_of(r: &SNFResult) -> Vec<i64> {
        r.invariant_factors().iter().map(|d| i64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn small_examples() {
        let r = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(r.s, IntMatrix::identity(3));
        let a = IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        let r = smith_normal_form(&a);
        assert_eq!(diag_of(&r), vec![1, 6]);
        let a = IntMatrix::from_dense(&[vec![2, 4], vec![0, 6]]);
        let r = smith_normal_form(&a);
        assert_eq!(diag_of(&r), vec![2, 6]);
        assert_eq!(r.u.mul(&r.s).unwrap().mul(&r.v).unwrap(), a);
    }

    #[test]
    fn homology_small() {
        let (f, t) = homology_summands(&IntMatrix::from_dense(&[vec![2]]), &IntMatrix::zero(1, 1)).unwrap();
        assert_eq!((f, t), (0, vec![BigInt::from(2)]));
        let (f, t) = homology_summands(&IntMatrix::zero(3, 2), &IntMatrix::zero(4, 3)).unwrap();
        assert_eq!((f, t.len()), (3, 0));
        let err = homology_summands(&IntMatrix::identity(2), &IntMatrix::identity(2));
        assert!(matches!(err, Err(LinalgError::CompositionNonzero { .. })));
    }

    #[test]
    fn sparse_matches_dense() {
        let a = IntMatrix::from_dense(&[
            vec![2, 4, 0, 6],
            vec![0, 6, 2, 0],
            vec![4, 0, 0, 12],
            vec![0, 0, 3, 0],
        ]);
        let r = smith_normal_form(&a);
        let (rank, divs) = elementary_divisors(&a);
        assert_eq!(rank, r.rank());
        let dense: Vec<BigInt> = r.invariant_factors().into_iter().filter(|d| !d.is_one()).collect();
        assert_eq!(divs, dense);
    }

    #[test]
    fn degenerate_shapes() {
        for (m, n) in [(0, 0), (0, 3), (3, 0), (2, 5)] {
            let a = IntMatrix::zero(m, n);
            let r = smith_normal_form(&a);
            assert_eq!((r.u.rows(), r.v.rows(), r.rank()), (m, n, 0));
            assert_eq!(r.u.mul(&r.s).unwrap().mul(&r.v).unwrap(), a);
        }
    }

    #[test]
    fn hermite_pass_shape() {
        let a = [vec![0, 4, 6], vec![0, 0, 0], vec![3, 1, 1], vec![6, 6, 8]];
        let big: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut h = LllHermite::new(big.clone(), 3, None);
        h.run().unwrap();
        assert_eq!(dense_mul(&h.w, &h.b, 3), big);
        assert_eq!(dense_mul(&h.p, &big, 3), h.b);
        // Rank 2: two zero rows, then two echelon rows.
        let leads: Vec<usize> = (0..4).map(|i| h.lead(i)).collect();
        assert_eq!(&leads[..2], &[3, 3], "{:?}", h.b);
        assert!(leads[2] > leads[3], "{:?}", h.b);
        assert!((2..4).all(|i| h.b[i][leads[i]].is_positive()));
    }

    #[test]
    fn transforms_stay_small() {
        // Elimination with accumulated transforms reached thousands of bits
        // here; the Hermite passes keep them near the input size.
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let dense: Vec<Vec<i64>> = (0..90)
            .map(|_| (0..80).map(|_| if next() % 10 == 0 { (next() % 11) as i64 - 5 } else { 0 }).collect())
            .collect();
        let a = IntMatrix::from_dense(&dense);
        let r = smith_normal_form(&a);
        assert_eq!(r.u.mul(&r.s).unwrap().mul(&r.v).unwrap(), a);
        assert!(r.u.max_abs().bits() < 64 && r.v.max_abs().bits() < 64);
        assert!(r.u.det().unwrap().abs().is_one() && r.v.det().unwrap().abs().is_one());
    }

    #[test]
    fn budget_is_reported() {
        let a = IntMatrix::from_dense(&[vec![6, 10], vec![15, 4]]);
        let err = smith_normal_form_with_budget(&a, Some(1));
        assert!(matches!(err, Err(LinalgError::ResourceLimit(_))));
    }
}
