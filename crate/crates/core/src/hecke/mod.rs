//! Hecke operators `T(ℓ, k)` on the coinvariant sharbly complex.
//!
//! `T(ℓ, k)` is the double coset `Γ₀(N) D Γ₀(N)` with `D` diagonal, first
//! `m - k` entries 1 and last `k` entries `ℓ`. With matrices acting on row
//! vectors from the right, the double coset splits as `⊔ s_α Γ₀(N)` and a
//! symbol `u` maps to `Σ u s_α`.

mod classify;
mod homology;
mod reduce;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::CongruenceError;
use crate::exactlinalg::{FiniteField, LinalgError};
use crate::lattice::SquareMatrix;
use crate::sharbly::{Coefficient, SharblyChain, SharblyError};

pub use classify::{ClassKey, Classifier};
pub use homology::{hecke_matrix, hecke_matrix_with_steps, homology_space, HomologySpace, SpaceKind};
pub use reduce::{reduce_to_v, reducing_points, Reducer, Reduction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("Hecke action on 2-torsion is not computed: the reduction involves division by 2")]
    PrimeTwo,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("k = {k} is outside 1..={m}")]
    BadK { m: usize, k: usize },
    #[error("reduction budget of {0} steps exhausted")]
    BudgetExhausted(usize),
    #[error("input chain is not a cycle in the coinvariant complex")]
    NotACycle,
    #[error("reduction failed: {0}")]
    ReductionFailed(String),
    #[error("image of a class lies outside the homology subspace")]
    NotInSubspace,
    #[error("p^2 divides an elementary divisor; higher Bocksteins are not implemented")]
    HigherTorsion,
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Sharbly(#[from] SharblyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Coset representatives of `T(ℓ, k)` at level `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeOperator {
    pub m: usize,
    pub ell: u64,
    pub k: usize,
    pub level: u64,
    pub reps: Vec<SquareMatrix>,
    /// `ℓ | N`: the representatives are those of the `U`-type operator.
    pub u_type: bool,
}

/// Number of `k`-dimensional subspaces of `F_q^m`.
pub fn gaussian_binomial(m: usize, k: usize, q: u64) -> u64 {
    if k > m {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= (q as u128).pow((m - i) as u32) - 1;
        den *= (q as u128).pow((i + 1) as u32) - 1;
    }
    (num / den) as u64
}

/// Lower-triangular Hermite forms `s` (under column operations) with
/// diagonal entries in `{1, ℓ}`, exactly `k` of them `ℓ`, and `ℓ s⁻¹`
/// integral. For `ℓ | N` only those with `s_11 = 1` are kept, so that every
/// representative has first row `(1, 0, ..., 0)`.
pub fn double_coset_reps(m: usize, ell: u64, k: usize, level: u64) -> Result<HeckeOperator, HeckeError> {
    if !crate::exactlinalg::is_prime(ell) {
        return Err(HeckeError::NotPrime(ell));
    }
    if k == 0 || k > m {
        return Err(HeckeError::BadK { m, k });
    }
    let l = ell as i64;
    let u_type = level % ell == 0;
    let mut reps = vec![];
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let diag: Vec<i64> = (0..m).map(|i| if mask >> i & 1 == 1 { l } else { 1 }).collect();
        if u_type && diag[0] != 1 {
            continue;
        }
        // Free entries: s_ij for j < i with s_ii = ℓ, in [0, ℓ).
        let slots: Vec<(usize, usize)> = (0..m)
            .filter(|&i| diag[i] == l)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .collect();
        let total = (l as u64).pow(slots.len() as u32);
        for code in 0..total {
            let mut s = SquareMatrix::diagonal(&diag);
            let mut c = code;
            for &(i, j) in &slots {
                s.set(i, j, (c % ell) as i64);
                c /= ell;
            }
            if scaled_inverse_integral(&s, l) {
                reps.push(s);
            }
        }
    }
    reps.sort();
    Ok(HeckeOperator { m, ell, k, level, reps, u_type })
}

/// Whether `ℓ s⁻¹ = ℓ adj(s) / det(s)` is integral.
fn scaled_inverse_integral(s: &SquareMatrix, l: i64) -> bool {
    let det = s.det();
    s.adjugate()
        .iter()
        .all(|row| row.iter().all(|&a| (a * l as i128) % det == 0))
}

/// `Σ c_u [u s]`: each vector is multiplied by `s` on the right, made
/// primitive and the symbol renormalized.
pub fn act<C: Coefficient>(chain: &SharblyChain<C>, s: &SquareMatrix) -> Result<SharblyChain<C>, HeckeError> {
    Ok(chain.act(s)?)
}

impl HeckeOperator {
    /// `Σ_α chain · s_α`.
    pub fn apply<C: Coefficient>(&self, chain: &SharblyChain<C>) -> Result<SharblyChain<C>, HeckeError> {
        let mut out = SharblyChain::zero(chain.rank(), chain.degree());
        for s in &self.reps {
            out.add_chain(&chain.act(s)?)?;
        }
        Ok(out)
    }

    pub fn label(&self) -> (u64, usize) {
        (self.ell, self.k)
    }
}

pub(crate) fn check_odd_prime(p: u64) -> Result<std::sync::Arc<FiniteField>, HeckeError> {
    if p == 2 {
        return Err(HeckeError::PrimeTwo);
    }
    Ok(FiniteField::prime(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::coset_label;

    /// Brute-force count of index-ℓ^k sublattices of Z^m containing ℓ Z^m,
    /// i.e. subspaces of F_ℓ^m, by enumerating spanning sets.
    fn subspace_count(m: usize, k: usize, l: u64) -> usize {
        let vecs: Vec<Vec<u64>> = (0..l.pow(m as u32))
            .map(|c| (0..m).map(|i| c / l.pow(i as u32) % l).collect())
            .collect();
        let mut seen = std::collections::BTreeSet::new();
        // Subspaces of dimension m - k as row spaces in reduced echelon form.
        let dim = m - k;
        let mut idx = vec![0usize; dim];
        fn rec(
            pos: usize,
            idx: &mut Vec<usize>,
            vecs: &[Vec<u64>],
            l: u64,
            seen: &mut std::collections::BTreeSet<Vec<Vec<u64>>>,
        ) {
            if pos == idx.len() {
                let rows: Vec<Vec<u64>> = idx.iter().map(|&i| vecs[i].clone()).collect();
                if let Some(e) = echelon(rows, l) {
                    seen.insert(e);
                }
                return;
            }
            for i in 0..vecs.len() {
                idx[pos] = i;
                rec(pos + 1, idx, vecs, l, seen);
            }
        }
        rec(0, &mut idx, &vecs, l, &mut seen);
        seen.len()
    }

    fn echelon(mut rows: Vec<Vec<u64>>, l: u64) -> Option<Vec<Vec<u64>>> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let mut r = 0;
        for c in 0..m {
            let Some(p) = (r..n).find(|&i| rows[i][c] != 0) else { continue };
            rows.swap(r, p);
            let inv = (1..l).find(|&x| x * rows[r][c] % l == 1).unwrap();
            rows[r] = rows[r].iter().map(|&x| x * inv % l).collect();
            for i in 0..n {
                if i != r && rows[i][c] != 0 {
                    let f = rows[i][c];
                    let pivot = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pivot) {
                        *x = (*x + l * l - f * y) % l;
                    }
                }
            }
            r += 1;
        }
        (r == n).then_some(rows)
    }

    #[test]
    fn rep_counts() {
        assert_eq!(double_coset_reps(2, 3, 1, 1).unwrap().reps.len(), 4);
        assert_eq!(double_coset_reps(4, 2, 1, 1).unwrap().reps.len(), 15);
        assert_eq!(double_coset_reps(4, 2, 2, 1).unwrap().reps.len(), 35);
        for (m, k, l) in [(2, 1, 5), (3, 1, 2), (3, 2, 3), (4, 3, 2)] {
            let n = double_coset_reps(m, l, k, 1).unwrap().reps.len();
            assert_eq!(n as u64, gaussian_binomial(m, k, l));
            assert_eq!(n, subspace_count(m, k, l));
        }
        assert_eq!(double_coset_reps(4, 7, 4, 11).unwrap().reps, vec![SquareMatrix::diagonal(&[7; 4])]);
    }

    #[test]
    fn reps_are_distinct_cosets() {
        let op = double_coset_reps(3, 3, 1, 11).unwrap();
        for a in &op.reps {
            assert_eq!(coset_label(a, 11).coords, vec![1, 0, 0]);
            for b in &op.reps {
                if a == b {
                    continue;
                }
                // s_a⁻¹ s_b integral and unimodular would mean the same coset.
                let adj = a.adjugate();
                let det = a.det();
                let integral = (0..3).all(|i| {
                    (0..3).all(|j| (0..3).map(|t| adj[i][t] * b.get(t, j) as i128).sum::<i128>() % det == 0)
                });
                assert!(!integral);
            }
        }
    }

    #[test]
    fn u_type_reps() {
        let op = double_coset_reps(2, 11, 1, 11).unwrap();
        assert!(op.u_type);
        assert_eq!(op.reps.len(), 11);
        assert!(op.reps.iter().all(|s| s.get(0, 0) == 1));
    }

    #[test]
    fn act_examples() {
        use num_bigint::BigInt;
        let mut c: SharblyChain<BigInt> = SharblyChain::zero(2, 0);
        c.add_vectors(&[vec![1, 0], vec![0, 1]], BigInt::from(1)).unwrap();
        assert_eq!(act(&c, &SquareMatrix::diagonal(&[1, 3])).unwrap(), c);
        assert_eq!(act(&c, &SquareMatrix::identity(2)).unwrap(), c);
    }

    #[test]
    fn act_composes_on_the_right() {
        use num_bigint::BigInt;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for m in 2..=3 {
            let mut trials = 0;
            while trials < 40 {
                let vs: Vec<Vec<i64>> = (0..=m).map(|_| (0..m).map(|_| rng.gen_range(-3..=3)).collect()).collect();
                let mut c: SharblyChain<BigInt> = SharblyChain::zero(m, 1);
                if c.add_vectors(&vs, BigInt::from(2)).is_err() || c.is_empty() {
                    continue;
                }
                let s = random_nonsingular(&mut rng, m);
                let t = random_nonsingular(&mut rng, m);
                let lhs = act(&act(&c, &s).unwrap(), &t).unwrap();
                assert_eq!(lhs, act(&c, &s.mul(&t)).unwrap());
                trials += 1;
            }
        }
    }

    fn random_nonsingular(rng: &mut impl rand::Rng, m: usize) -> SquareMatrix {
        loop {
            let rows: Vec<Vec<i64>> = (0..m).map(|_| (0..m).map(|_| rng.gen_range(-2..=2)).collect()).collect();
            let s = SquareMatrix::from_rows(&rows);
            if s.det() != 0 {
                return s;
            }
        }
    }

    #[test]
    fn two_torsion_is_rejected() {
        let err = check_odd_prime(2).unwrap_err();
        assert_eq!(err, HeckeError::PrimeTwo);
        assert!(err.to_string().contains("division by 2"));
    }
}
