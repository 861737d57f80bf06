//! Small exact integer vectors and square matrices.
//!
//! Everything geometric in the crate (minimal vectors, sharbly symbols,
//! coset representatives) lives in `Z^m` for `m <= 4`, so machine integers
//! with `i128` intermediates are enough here. Unbounded arithmetic is kept for
//! the boundary matrices in [`crate::exactlinalg`].

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A row vector in `Z^m`.
pub type Vector = Vec<i64>;

/// Greatest common divisor of the entries, always nonnegative.
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divide by the content. The zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> Vector {
    let c = content(v);
    if c <= 1 {
        return v.to_vec();
    }
    v.iter().map(|x| x / c).collect()
}

/// Flip the sign so that the first nonzero coordinate is positive.
/// Returns the sign that was applied.
pub fn canonical_sign(v: &mut [i64]) -> i8 {
    match v.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => {
            v.iter_mut().for_each(|x| *x = -*x);
            -1
        }
        _ => 1,
    }
}

/// Canonical vector order: compare coordinates from the last one backwards,
/// so that `e_1 < e_2 < e_1 + e_2` in rank 2.
pub fn vector_cmp(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

pub fn is_primitive(v: &[i64]) -> bool {
    content(v) == 1
}

/// Inner product `u^T A v` for a symmetric matrix given by rows.
pub fn quad_eval(gram: &SquareMatrix, v: &[i64]) -> i128 {
    let n = gram.n;
    let mut s = 0i128;
    for i in 0..n {
        if v[i] == 0 {
            continue;
        }
        let mut row = 0i128;
        for j in 0..n {
            row += gram.get(i, j) as i128 * v[j] as i128;
        }
        s += v[i] as i128 * row;
    }
    s
}

/// Determinant of a square `i128` matrix by fraction-free elimination.
pub fn det_i128(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Determinant of the matrix whose rows are `rows`.
pub fn det_rows(rows: &[&[i64]]) -> i128 {
    det_i128(
        rows.iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect(),
    )
}

/// Rank over `Q` of a list of vectors of equal length.
pub fn rank(vectors: &[Vector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols = vectors[0].len();
    let mut a: Vec<Vec<i128>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| x as i128).collect())
        .collect();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c] != 0 {
                let (x, y) = (a[r][c], a[i][c]);
                let g = x.gcd(&y);
                let (fx, fy) = (y / g, x / g);
                for j in c..cols {
                    a[i][j] = a[i][j] * fy - a[r][j] * fx;
                }
                let cg = a[i].iter().fold(0i128, |g, x| g.gcd(x));
                if cg > 1 {
                    a[i].iter_mut().for_each(|x| *x /= cg);
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Square integer matrix, row-major. Vectors are rows and act on the right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<i64>,
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = self.rows().collect();
        write!(f, "{:?}", rows)
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl SquareMatrix {
    pub fn zero(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let mut m = Self::zero(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Panics if the rows are ragged or not square.
    pub fn from_rows(rows: &[Vector]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend_from_slice(r);
        }
        SquareMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Row vector times matrix: `v * self`.
    pub fn act(&self, v: &[i64]) -> Vector {
        let n = self.n;
        let mut out = vec![0i64; n];
        for (i, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[j] += x * self.get(i, j);
            }
        }
        out
    }

    pub fn det(&self) -> i128 {
        det_i128(
            self.rows()
                .map(|r| r.iter().map(|&x| x as i128).collect())
                .collect(),
        )
    }

    /// Adjugate matrix, so that `self * adj = det * I`.
    pub fn adjugate(&self) -> Vec<Vec<i128>> {
        let n = self.n;
        if n == 1 {
            return vec![vec![1]];
        }
        let mut adj = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<i128>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| self.get(r, c) as i128)
                            .collect()
                    })
                    .collect();
                let cof = det_i128(minor);
                adj[j][i] = if (i + j) % 2 == 0 { cof } else { -cof };
            }
        }
        adj
    }

    /// Exact inverse when it is integral (i.e. the matrix is unimodular).
    pub fn inverse_unimodular(&self) -> Option<SquareMatrix> {
        let d = self.det();
        if d != 1 && d != -1 {
            return None;
        }
        let adj = self.adjugate();
        let mut out = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, (adj[i][j] * d) as i64);
            }
        }
        Some(out)
    }

    pub fn is_unimodular(&self) -> bool {
        matches!(self.det(), 1 | -1)
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.n {
            let x = self.get(i, j);
            self.set(i, j, -x);
        }
    }
}

/// Solve `x * B = v` for a nonsingular `B`, returning `(numerators, denominator)`
/// with positive denominator.
pub fn solve_rational(b: &SquareMatrix, v: &[i64]) -> Option<(Vec<i128>, i128)> {
    let d = b.det();
    if d == 0 {
        return None;
    }
    let adj = b.adjugate();
    let n = b.size();
    let mut num = vec![0i128; n];
    for j in 0..n {
        for i in 0..n {
            num[j] += v[i] as i128 * adj[i][j];
        }
    }
    let (mut num, mut d) = (num, d);
    if d < 0 {
        num.iter_mut().for_each(|x| *x = -*x);
        d = -d;
    }
    let g = num.iter().fold(d, |g, x| g.gcd(x));
    if g > 1 {
        num.iter_mut().for_each(|x| *x /= g);
        d /= g;
    }
    Some((num, d))
}

/// Extended gcd: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = (a as i128).extended_gcd(&(b as i128));
    let (mut g, mut x, mut y) = (e.gcd, e.x, e.y);
    if g < 0 {
        g = -g;
        x = -x;
        y = -y;
    }
    (g as i64, x as i64, y as i64)
}

/// A unimodular matrix whose first row is the given primitive vector.
pub fn complete_to_unimodular(v: &[i64]) -> Option<SquareMatrix> {
    let n = v.len();
    if !is_primitive(v) {
        return None;
    }
    // Column-reduce v to e_1 while recording the inverse transform; the
    // inverse then has v as its first row.
    let mut w = v.to_vec();
    let mut inv = SquareMatrix::identity(n);
    // Bring every coordinate into position 0 via 2x2 Bezout steps.
    for j in 1..n {
        let (a, b) = (w[0], w[j]);
        if b == 0 {
            continue;
        }
        let (g, x, y) = ext_gcd(a, b);
        // Column op [[x, -b/g],[y, a/g]] on columns (0, j) has det 1 and
        // maps (a, b) to (g, 0). Its inverse is [[a/g, b/g],[-y, x]].
        let (ag, bg) = (a / g, b / g);
        w[0] = g;
        w[j] = 0;
        // inv <- M^{-1} * inv, acting on rows 0 and j.
        for c in 0..n {
            let (r0, rj) = (inv.get(0, c), inv.get(j, c));
            inv.set(0, c, ag * r0 + bg * rj);
            inv.set(j, c, -y * r0 + x * rj);
        }
    }
    if w[0] == -1 {
        inv.negate_row(0);
        if n > 1 {
            inv.negate_row(1);
        }
    }
    debug_assert_eq!(inv.row(0), v);
    Some(inv)
}

/// Representatives of `Z^m / L` for the full-rank lattice `L` spanned by
/// `rows`: all `a` with `0 <= a_i < h_ii`, where `h` is an upper-triangular
/// row echelon basis of `L`.
pub fn lattice_coset_reps(rows: &[Vector]) -> Vec<Vector> {
    let m = rows.len();
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    for c in 0..m {
        // Euclid down column c among rows c.., leaving the gcd in row c.
        loop {
            let nz: Vec<usize> = (c..m).filter(|&r| a[r][c] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&r) = nz.first() {
                    a.swap(c, r);
                }
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| a[r][c].abs()).unwrap();
            a.swap(c, piv);
            for r in c + 1..m {
                let q = a[r][c].div_euclid(a[c][c]);
                if q != 0 {
                    for j in 0..m {
                        a[r][j] -= q * a[c][j];
                    }
                }
            }
        }
    }
    let diag: Vec<i64> = (0..m).map(|i| a[i][i].abs() as i64).collect();
    if diag.iter().any(|&d| d == 0) {
        return vec![];
    }
    let mut out = vec![vec![0i64; m]];
    for (i, &d) in diag.iter().enumerate() {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..d).map(move |x| {
                    let mut w = v.clone();
                    w[i] = x;
                    w
                })
            })
            .collect();
    }
    out
}

/// Reduce modulo `n` into `[0, n)`.
#[inline]
pub fn modn(x: i64, n: i64) -> i64 {
    x.rem_euclid(n)
}

/// Modular inverse of `a` modulo `n`, if it exists.
pub fn inv_mod(a: i64, n: i64) -> Option<i64> {
    if n == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(modn(a, n), n);
    (g == 1).then(|| modn(x, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coset_reps_count_and_distinct() {
        let rows = vec![vec![2, 1, 0], vec![0, 3, 1], vec![1, 1, 4]];
        let d = det_rows(&[&rows[0], &rows[1], &rows[2]]).unsigned_abs() as usize;
        let reps = lattice_coset_reps(&rows);
        assert_eq!(reps.len(), d);
        let b = SquareMatrix::from_rows(&rows);
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                let diff: Vec<i64> = reps[i].iter().zip(&reps[j]).map(|(x, y)| x - y).collect();
                let (_, den) = solve_rational(&b, &diff).unwrap();
                assert_ne!(den, 1, "reps {:?} and {:?} differ by a lattice vector", reps[i], reps[j]);
            }
        }
    }

    #[test]
    fn det_and_inverse() {
        let m = SquareMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(m.det(), 1);
        let inv = m.inverse_unimodular().unwrap();
        assert_eq!(m.mul(&inv), SquareMatrix::identity(2));
        let z = SquareMatrix::from_rows(&[
            vec![0, 0, 0, -1],
            vec![1, 0, 0, -1],
            vec![0, 1, 0, -1],
            vec![0, 0, 1, -1],
        ]);
        assert_eq!(z.det(), 1);
        let mut p = SquareMatrix::identity(4);
        for _ in 0..5 {
            p = p.mul(&z);
        }
        assert_eq!(p, SquareMatrix::identity(4));
    }

    #[test]
    fn completion_has_given_first_row() {
        for v in [vec![3, 5], vec![6, 10, 15], vec![0, 0, 1, 0], vec![-1, 0, 0], vec![4, -7, 9, 2]] {
            let m = complete_to_unimodular(&v).unwrap();
            assert_eq!(m.row(0), &v[..]);
            assert_eq!(m.det(), 1);
        }
        assert!(complete_to_unimodular(&[2, 4]).is_none());
    }

    #[test]
    fn rank_and_solve() {
        assert_eq!(rank(&[vec![1, 2, 3], vec![2, 4, 6]]), 1);
        assert_eq!(rank(&[vec![1, 0], vec![1, 1], vec![0, 1]]), 2);
        let b = SquareMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let (x, d) = solve_rational(&b, &[1, 1]).unwrap();
        assert_eq!((x, d), (vec![3, 2], 6));
    }
}
