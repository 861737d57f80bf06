//! Short and minimal vectors of positive definite integral forms.

use crate::lattice::{canonical_sign, det_i128, quad_eval, vector_cmp, SquareMatrix, Vector};

use super::RetractError;

/// Positive definiteness via leading principal minors.
pub fn is_positive_definite(gram: &SquareMatrix) -> bool {
    let n = gram.size();
    (1..=n).all(|k| {
        let minor: Vec<Vec<i128>> = (0..k)
            .map(|i| (0..k).map(|j| gram.get(i, j) as i128).collect())
            .collect();
        det_i128(minor) > 0
    })
}

/// All nonzero vectors with `v^T G v <= bound` (`< bound` if `strict`), one
/// per `±` pair with the first nonzero coordinate positive, sorted.
///
/// Fincke–Pohst enumeration with a floating-point Cholesky factor for the
/// search bounds and an exact check for every candidate.
pub fn short_vectors(gram: &SquareMatrix, bound: i128, strict: bool) -> Vec<Vector> {
    let n = gram.size();
    let mut q = vec![vec![0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] = gram.get(i, j) as f64;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let slack = 1e-7 * (bound as f64).abs().max(1.0);
    let mut out = vec![];
    let mut x = vec![0i64; n];
    enumerate(&q, gram, n, bound as f64 + slack, &mut x, bound, strict, &mut out);
    out.sort_by(|a, b| vector_cmp(a, b));
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    q: &[Vec<f64>],
    gram: &SquareMatrix,
    level: usize,
    remaining: f64,
    x: &mut Vec<i64>,
    bound: i128,
    strict: bool,
    out: &mut Vec<Vector>,
) {
    if level == 0 {
        if x.iter().all(|&c| c == 0) {
            return;
        }
        let mut v = x.clone();
        if canonical_sign(&mut v) < 0 {
            return;
        }
        let val = quad_eval(gram, &v);
        if val < bound || (!strict && val == bound) {
            out.push(v);
        }
        return;
    }
    let i = level - 1;
    let n = x.len();
    let center: f64 = -(i + 1..n).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let radius = (remaining.max(0.0) / q[i][i]).sqrt() + 1e-9;
    let lo = (center - radius).ceil() as i64;
    let hi = (center + radius).floor() as i64;
    for xi in lo..=hi {
        let t = xi as f64 - center;
        let rest = remaining - q[i][i] * t * t;
        if rest < -1e-7 * remaining.abs().max(1.0) {
            continue;
        }
        x[i] = xi;
        enumerate(q, gram, i, rest, x, bound, strict, out);
    }
    x[i] = 0;
}

/// Arithmetical minimum and the minimal vectors (one per `±` pair, sorted).
pub fn minimal_vectors(gram: &SquareMatrix) -> Result<(i64, Vec<Vector>), RetractError> {
    let n = gram.size();
    for i in 0..n {
        for j in 0..n {
            if gram.get(i, j) != gram.get(j, i) {
                return Err(RetractError::NotSymmetric);
            }
        }
    }
    if !is_positive_definite(gram) {
        return Err(RetractError::NotPositiveDefinite);
    }
    let bound = (0..n).map(|i| gram.get(i, i) as i128).min().unwrap_or(0);
    let cands = short_vectors(gram, bound, false);
    let min = cands.iter().map(|v| quad_eval(gram, v)).min().unwrap_or(bound);
    let vs = cands.into_iter().filter(|v| quad_eval(gram, v) == min).collect();
    Ok((min as i64, vs))
}
