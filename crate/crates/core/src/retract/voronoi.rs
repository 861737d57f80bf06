//! Perfect forms by the Voronoi neighbor walk.

use num_integer::Integer;
use num_rational::Ratio;

use crate::lattice::{quad_eval, SquareMatrix, Vector};

use super::equiv::{configuration_key, transforms};
use super::shortvec::{is_positive_definite, minimal_vectors, short_vectors};
use super::{PerfectForm, RetractError};

/// Coordinates of the rank-one form `v v^T` in the upper-triangular basis,
/// so that `<F, v v^T> = v^T F v` with `F` stored by its upper-triangular
/// entries.
pub(crate) fn rank_one_coords(v: &[i64]) -> Vec<i64> {
    let m = v.len();
    let mut out = Vec::with_capacity(m * (m + 1) / 2);
    for i in 0..m {
        for j in i..m {
            out.push(if i == j { v[i] * v[i] } else { 2 * v[i] * v[j] });
        }
    }
    out
}

fn symmetric_from_coords(c: &[i64], m: usize) -> SquareMatrix {
    let mut f = SquareMatrix::zero(m);
    let mut k = 0;
    for i in 0..m {
        for j in i..m {
            f.set(i, j, c[k]);
            f.set(j, i, c[k]);
            k += 1;
        }
    }
    f
}

/// Primitive integer generator of the kernel of a rank-deficient-by-one
/// integer matrix (rows given), or `None` if the kernel is not a line.
pub(crate) fn kernel_line(rows: &[Vec<i64>], n: usize) -> Option<Vec<i64>> {
    // Fraction-free row echelon form over i128.
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let (x, y) = (a[r][c], a[i][c]);
                for j in 0..n {
                    a[i][j] = a[i][j] * x - a[r][j] * y;
                }
                let g = a[i].iter().fold(0i128, |g, v| g.gcd(v));
                if g > 1 {
                    a[i].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() + 1 != n {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c)).unwrap();
    // Solve with x_free = L = lcm of pivot entries.
    let l = pivots
        .iter()
        .enumerate()
        .fold(1i128, |l, (i, &c)| l.lcm(&a[i][c].abs()));
    let mut x = vec![0i128; n];
    x[free] = l;
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = -a[i][free] * l / a[i][c];
    }
    let g = x.iter().fold(0i128, |g, v| g.gcd(v));
    Some(x.iter().map(|v| (v / g) as i64).collect())
}

/// Facet normals of the cone spanned by the rank-one forms of `vs`, as
/// symmetric matrices, each with the index set of vectors on the facet.
pub(crate) fn facets(vs: &[Vector], m: usize) -> Vec<(SquareMatrix, Vec<usize>)> {
    let n = m * (m + 1) / 2;
    let rays: Vec<Vec<i64>> = vs.iter().map(|v| rank_one_coords(v)).collect();
    let k = rays.len();
    let mut seen: Vec<Vec<usize>> = vec![];
    let mut out = vec![];
    let mut idx: Vec<usize> = (0..n - 1).collect();
    if k < n - 1 {
        return out;
    }
    loop {
        let sub: Vec<Vec<i64>> = idx.iter().map(|&i| rays[i].clone()).collect();
        if let Some(normal) = kernel_line(&sub, n) {
            let vals: Vec<i64> = rays
                .iter()
                .map(|r| r.iter().zip(&normal).map(|(a, b)| a * b).sum())
                .collect();
            let sign = if vals.iter().all(|&v| v >= 0) {
                Some(1)
            } else if vals.iter().all(|&v| v <= 0) {
                Some(-1)
            } else {
                None
            };
            if let Some(s) = sign {
                let on: Vec<usize> = (0..k).filter(|&i| vals[i] == 0).collect();
                if !seen.contains(&on) {
                    seen.push(on.clone());
                    let nrm: Vec<i64> = normal.iter().map(|x| x * s).collect();
                    out.push((symmetric_from_coords(&nrm, m), on));
                }
            }
        }
        let mut p = n - 1;
        while p > 0 && idx[p - 1] == k - (n - 1) + p - 1 {
            p -= 1;
        }
        if p == 0 {
            break;
        }
        idx[p - 1] += 1;
        for q in p..n - 1 {
            idx[q] = idx[q - 1] + 1;
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

fn combine(a: &SquareMatrix, f: &SquareMatrix, r: Ratio<i128>) -> SquareMatrix {
    // denom * (A + r F), integral.
    let (num, den) = (*r.numer(), *r.denom());
    let m = a.size();
    let mut g = SquareMatrix::zero(m);
    for i in 0..m {
        for j in 0..m {
            g.set(i, j, (den * a.get(i, j) as i128 + num * f.get(i, j) as i128) as i64);
        }
    }
    g
}

/// The Voronoi neighbor of the perfect form `a` (minimum `lambda`) across
/// the facet with normal `f`, scaled to a primitive integral matrix.
pub(crate) fn neighbor(a: &SquareMatrix, lambda: i64, f: &SquareMatrix) -> SquareMatrix {
    let mut lo = Ratio::from_integer(0i128);
    let mut u = Ratio::from_integer(1i128);
    loop {
        let g = combine(a, f, u);
        let scale = *u.denom();
        if !is_positive_definite(&g) {
            u = (lo + u) / 2;
            continue;
        }
        let below = short_vectors(&g, scale * lambda as i128, true);
        if below.is_empty() {
            let at = short_vectors(&g, scale * lambda as i128, false);
            if at.iter().any(|v| quad_eval(f, v) < 0) {
                let gcd = (0..g.size())
                    .flat_map(|i| (0..g.size()).map(move |j| (i, j)))
                    .fold(0i64, |acc, (i, j)| acc.gcd(&g.get(i, j)));
                let mut h = SquareMatrix::zero(g.size());
                for i in 0..g.size() {
                    for j in 0..g.size() {
                        h.set(i, j, g.get(i, j) / gcd);
                    }
                }
                return h;
            }
            lo = u;
            u *= 2;
        } else {
            // The value first drops to lambda at the smallest crossing.
            u = below
                .iter()
                .map(|v| {
                    let av = quad_eval(a, v);
                    let fv = quad_eval(f, v);
                    Ratio::new(av - lambda as i128, -fv)
                })
                .min()
                .unwrap();
        }
    }
}

/// The standard root-lattice form with 2 on the diagonal and 1 elsewhere.
pub(crate) fn a_m_form(m: usize) -> SquareMatrix {
    let mut g = SquareMatrix::zero(m);
    for i in 0..m {
        for j in 0..m {
            g.set(i, j, if i == j { 2 } else { 1 });
        }
    }
    g
}

/// Representatives of the `GL(m, Z)`-classes of perfect forms.
pub fn perfect_forms(m: usize) -> Result<Vec<PerfectForm>, RetractError> {
    if !(2..=4).contains(&m) {
        return Err(RetractError::UnsupportedRank(m));
    }
    let start = a_m_form(m);
    let (min, vs) = minimal_vectors(&start)?;
    let mut forms = vec![PerfectForm { gram: start, min_value: min, min_vectors: vs }];
    let mut i = 0;
    while i < forms.len() {
        let cur = forms[i].clone();
        for (f, _) in facets(&cur.min_vectors, m) {
            let nb = neighbor(&cur.gram, cur.min_value, &f);
            let (nmin, nvs) = minimal_vectors(&nb)?;
            let key = configuration_key(&nvs, m);
            let known = forms.iter().any(|p| {
                p.min_vectors.len() == nvs.len()
                    && configuration_key(&p.min_vectors, m) == key
                    && !transforms(&p.min_vectors, &nvs, m, false).is_empty()
            });
            if !known {
                forms.push(PerfectForm { gram: nb, min_value: nmin, min_vectors: nvs });
            }
        }
        i += 1;
    }
    Ok(forms)
}
