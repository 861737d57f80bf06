//! `GL(m, Z)`-equivalence of finite vector configurations taken up to sign.

use std::collections::HashSet;

use crate::lattice::{canonical_sign, det_rows, SquareMatrix, Vector};

/// Per-vector invariant: the sorted multiset of `|det|` over all `m`-subsets
/// of the configuration containing the vector. Invariant under `GL(m, Z)`
/// and under sign changes of individual vectors.
pub fn vector_colors(vs: &[Vector], m: usize) -> Vec<Vec<i128>> {
    let k = vs.len();
    let mut colors = vec![vec![]; k];
    let mut idx: Vec<usize> = (0..m).collect();
    if k < m {
        return colors;
    }
    loop {
        let rows: Vec<&[i64]> = idx.iter().map(|&i| vs[i].as_slice()).collect();
        let d = det_rows(&rows).abs();
        for &i in &idx {
            colors[i].push(d);
        }
        // Next combination.
        let mut p = m;
        while p > 0 && idx[p - 1] == k - m + p - 1 {
            p -= 1;
        }
        if p == 0 {
            break;
        }
        idx[p - 1] += 1;
        for q in p..m {
            idx[q] = idx[q - 1] + 1;
        }
    }
    for c in colors.iter_mut() {
        c.sort_unstable();
    }
    colors
}

/// Configuration-level invariant, usable as a hash bucket key.
pub fn configuration_key(vs: &[Vector], m: usize) -> Vec<Vec<i128>> {
    let mut c = vector_colors(vs, m);
    c.sort();
    c
}

fn canon(v: &[i64]) -> Vector {
    let mut w = v.to_vec();
    canonical_sign(&mut w);
    w
}

/// Matrices `g` in `GL(m, Z)` with `{±v g : v in src} = {±w : w in dst}`.
///
/// With `all = false` returns at most one. Solutions come in pairs `±g`; only
/// the member fixing the sign of the first basis image is produced here, and
/// callers that need the whole group add `-g` themselves.
pub fn transforms(src: &[Vector], dst: &[Vector], m: usize, all: bool) -> Vec<SquareMatrix> {
    if src.len() != dst.len() || src.len() < m {
        return vec![];
    }
    let cs = vector_colors(src, m);
    let cd = vector_colors(dst, m);
    {
        let (mut a, mut b) = (cs.clone(), cd.clone());
        a.sort();
        b.sort();
        if a != b {
            return vec![];
        }
    }
    // Candidate images per source vector.
    let cand: Vec<Vec<usize>> = cs
        .iter()
        .map(|c| (0..dst.len()).filter(|&j| &cd[j] == c).collect())
        .collect();
    // Basis of src: greedily prefer vectors with few candidates.
    let mut order: Vec<usize> = (0..src.len()).collect();
    order.sort_by_key(|&i| (cand[i].len(), i));
    let mut basis: Vec<usize> = vec![];
    for &i in &order {
        let mut trial: Vec<Vector> = basis.iter().map(|&b| src[b].clone()).collect();
        trial.push(src[i].clone());
        if crate::lattice::rank(&trial) == trial.len() {
            basis.push(i);
            if basis.len() == m {
                break;
            }
        }
    }
    if basis.len() < m {
        return vec![];
    }
    let bmat = SquareMatrix::from_rows(&basis.iter().map(|&b| src[b].clone()).collect::<Vec<_>>());
    let det = bmat.det();
    let adj = bmat.adjugate();
    let dst_set: HashSet<Vector> = dst.iter().map(|v| canon(v)).collect();
    let mut out = vec![];
    let mut images: Vec<Vector> = vec![];
    let mut used = vec![false; dst.len()];
    search(
        &basis, &cand, dst, &adj, det, m, src, &dst_set, &mut images, &mut used, all,
        &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn search(
    basis: &[usize],
    cand: &[Vec<usize>],
    dst: &[Vector],
    adj: &[Vec<i128>],
    det: i128,
    m: usize,
    src: &[Vector],
    dst_set: &HashSet<Vector>,
    images: &mut Vec<Vector>,
    used: &mut [bool],
    all: bool,
    out: &mut Vec<SquareMatrix>,
) {
    if !all && !out.is_empty() {
        return;
    }
    let j = images.len();
    if j == m {
        // g = B^{-1} B' = adj(B) B' / det(B).
        let mut g = SquareMatrix::zero(m);
        for r in 0..m {
            for c in 0..m {
                let mut s = 0i128;
                for t in 0..m {
                    s += adj[r][t] * images[t][c] as i128;
                }
                if s % det != 0 {
                    return;
                }
                g.set(r, c, (s / det) as i64);
            }
        }
        if !g.is_unimodular() {
            return;
        }
        if src.iter().all(|v| dst_set.contains(&canon(&g.act(v)))) {
            out.push(g);
        }
        return;
    }
    let b = basis[j];
    for &c in &cand[b] {
        if used[c] {
            continue;
        }
        used[c] = true;
        let signs: &[i64] = if j == 0 { &[1] } else { &[1, -1] };
        for &s in signs {
            images.push(dst[c].iter().map(|x| x * s).collect());
            search(basis, cand, dst, adj, det, m, src, dst_set, images, used, all, out);
            images.pop();
        }
        used[c] = false;
    }
}

/// The full group `{g : {±v g} = {±v}}`, including `-I`, sorted.
pub fn stabilizer(vs: &[Vector], m: usize) -> Vec<SquareMatrix> {
    let mut gs = transforms(vs, vs, m, true);
    let negs: Vec<SquareMatrix> = gs
        .iter()
        .map(|g| {
            let mut h = g.clone();
            for i in 0..m {
                h.negate_row(i);
            }
            h
        })
        .collect();
    gs.extend(negs);
    gs.sort();
    gs.dedup();
    gs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_stabilizer_is_signed_permutations() {
        let e: Vec<Vector> = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(stabilizer(&e, 3).len(), 48);
    }

    #[test]
    fn a2_configuration() {
        let a2: Vec<Vector> = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
        // Dihedral group of order 12.
        assert_eq!(stabilizer(&a2, 2).len(), 12);
        let other: Vec<Vector> = vec![vec![1, 0], vec![1, 1], vec![2, 1]];
        let g = transforms(&a2, &other, 2, false);
        assert_eq!(g.len(), 1);
        let bad: Vec<Vector> = vec![vec![1, 0], vec![0, 1], vec![1, 2]];
        assert!(transforms(&a2, &bad, 2, false).is_empty());
    }
}
