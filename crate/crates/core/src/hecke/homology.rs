//! Mod-`p` homology subspaces on the cell basis and Hecke matrices on them.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::congruence::{retract_dim, LevelComplex};
use crate::exactlinalg::{elementary_divisors, FiniteField, FpMatrix, IntMatrix};
use crate::sharbly::{ModP, SharblyChain};

use super::classify::ClassKey;
use super::reduce::Reducer;
use super::{check_odd_prime, HeckeError, HeckeOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    /// `Z_t / B_t` with `F_p` coefficients.
    Full,
    /// Reductions of integral classes of order `p`: the image of the
    /// Bockstein `b ↦ ∂b / p` on mod-`p` cycles of degree `t + 1`.
    Torsion,
}

/// Echelon rows with the combination of basis cycles each row carries;
/// boundary rows carry the zero combination.
#[derive(Clone, Debug)]
struct Echelon {
    rows: Vec<(usize, Vec<u64>, Vec<u64>)>,
}

impl Echelon {
    fn reduce(&self, f: &FiniteField, v: &mut [u64], tag: &mut [u64]) {
        for (pivot, row, rtag) in &self.rows {
            let c = v[*pivot];
            if c == 0 {
                continue;
            }
            let factor = f.div(c, row[*pivot]).expect("pivot is nonzero");
            for (x, y) in v.iter_mut().zip(row) {
                *x = f.sub(*x, f.mul(factor, *y));
            }
            for (x, y) in tag.iter_mut().zip(rtag) {
                *x = f.add(*x, f.mul(factor, *y));
            }
        }
    }

    /// Adds `v` with tag `tag` if independent; returns whether it was.
    fn insert(&mut self, f: &FiniteField, mut v: Vec<u64>, tag: Vec<u64>) -> bool {
        let mut acc = vec![0; tag.len()];
        self.reduce(f, &mut v, &mut acc);
        let Some(pivot) = v.iter().position(|&x| x != 0) else { return false };
        let tag = tag.iter().zip(&acc).map(|(a, b)| f.sub(*a, *b)).collect();
        self.rows.push((pivot, v, tag));
        true
    }
}

/// A basis of a subspace of `H_t(F_p)` given by cycles on the cell basis.
#[derive(Clone, Debug)]
pub struct HomologySpace {
    pub m: usize,
    pub level: u64,
    pub p: u64,
    pub t: usize,
    pub dim: usize,
    pub kind: SpaceKind,
    /// Cycle coordinates on the cells of retract dimension `dim`.
    pub basis: Vec<Vec<u64>>,
    field: Arc<FiniteField>,
    echelon: Echelon,
}

impl HomologySpace {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    /// Coordinates of a cycle modulo boundaries.
    pub fn coordinates(&self, v: &[u64]) -> Result<Vec<u64>, HeckeError> {
        let mut w = v.to_vec();
        let mut tag = vec![0; self.basis.len()];
        self.echelon.reduce(&self.field, &mut w, &mut tag);
        if w.iter().any(|&x| x != 0) {
            return Err(HeckeError::NotInSubspace);
        }
        Ok(tag)
    }

    /// A basis cycle as a sharbly chain built from cell representatives.
    pub fn cycle_chain(&self, reducer: &mut Reducer, j: usize) -> Result<SharblyChain<ModP>, HeckeError> {
        cell_chain(reducer, self.dim, &self.basis[j])
    }
}

/// `Σ c_i σ_i` for cell coordinates `c`, with each representative's
/// orientation matched to its basis element.
pub fn cell_chain(reducer: &mut Reducer, dim: usize, coords: &[u64]) -> Result<SharblyChain<ModP>, HeckeError> {
    let p = reducer.prime();
    let complex = reducer.classifier.complex();
    let m = complex.m;
    let t = m * (m + 1) / 2 - m - dim;
    let mut chain = SharblyChain::zero(m, t);
    for (i, &c) in coords.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let vs = reducer.classifier.complex().representative(dim, i);
        let mut one = SharblyChain::zero(m, t);
        one.add_vectors(&vs, ModP::new(1, p))?;
        let (sym, _) = one.terms().next().ok_or(HeckeError::ReductionFailed(format!("cell {i} is degenerate")))?;
        let sym = sym.clone();
        match reducer.classifier.classify(&sym) {
            Some((ClassKey::Cell { dim: d, index }, sign)) if d == dim && index == i => {
                let coef = if sign < 0 { (p - c % p) % p } else { c % p };
                chain.add_term(sym, ModP::new(coef as i64, p))?;
            }
            other => {
                return Err(HeckeError::ReductionFailed(format!(
                    "representative of cell {i} classifies as {other:?}"
                )))
            }
        }
    }
    Ok(chain)
}

fn to_fp(field: &Arc<FiniteField>, a: &IntMatrix) -> FpMatrix {
    let p = BigInt::from(field.characteristic());
    let mut out = FpMatrix::zero(field, a.rows(), a.cols());
    for (r, c, v) in a.iter() {
        let x = v.mod_floor(&p).to_u64().expect("reduced entry fits");
        out.set(r, c, x);
    }
    out
}

/// The full or torsion part of `H_t(F_p)` in sharbly degree `t`.
pub fn homology_space(complex: &LevelComplex, t: usize, p: u64, kind: SpaceKind) -> Result<HomologySpace, HeckeError> {
    let field = check_odd_prime(p)?;
    let m = complex.m;
    let missing = |d| HeckeError::Congruence(crate::congruence::CongruenceError::MissingCellTable(d));
    let dim = retract_dim(m, t).ok_or(HeckeError::ReductionFailed(format!("degree {t} has no cells")))?;
    let n = complex.bases.get(&dim).ok_or(missing(dim))?.len();
    let d_in = match retract_dim(m, t + 1) {
        Some(d) => complex.boundaries.get(&(t + 1)).cloned().ok_or(missing(d))?,
        None => IntMatrix::zero(n, 0),
    };
    let d_out = if t == 0 {
        IntMatrix::zero(0, n)
    } else {
        complex.boundaries.get(&t).cloned().ok_or(missing(dim + 1))?
    };
    let in_fp = to_fp(&field, &d_in);
    let mut echelon = Echelon { rows: vec![] };
    for c in 0..in_fp.cols() {
        echelon.insert(&field, in_fp.column(c), vec![]);
    }
    let candidates: Vec<Vec<u64>> = match kind {
        SpaceKind::Full => to_fp(&field, &d_out).kernel(),
        SpaceKind::Torsion => {
            let (_, divisors) = elementary_divisors(&d_in);
            let bp = BigInt::from(p);
            if divisors.iter().any(|q| (q % (&bp * &bp)).is_zero()) {
                return Err(HeckeError::HigherTorsion);
            }
            in_fp
                .kernel()
                .into_iter()
                .map(|b| {
                    let mut acc = vec![BigInt::zero(); n];
                    for (r, c, v) in d_in.iter() {
                        acc[r] += v * BigInt::from(b[c]);
                    }
                    acc.iter()
                        .map(|x| {
                            debug_assert!((x % &bp).is_zero());
                            (x / &bp).mod_floor(&bp).to_u64().unwrap()
                        })
                        .collect()
                })
                .collect()
        }
    };
    // Select independent candidates first, then rebuild with tags sized to them.
    let mut basis: Vec<Vec<u64>> = vec![];
    let mut chosen = Echelon { rows: echelon.rows.clone() };
    for v in candidates {
        let mut w = v.clone();
        let mut tag = vec![];
        chosen.reduce(&field, &mut w, &mut tag);
        if w.iter().all(|&x| x == 0) {
            continue;
        }
        chosen.rows.push((w.iter().position(|&x| x != 0).unwrap(), w, vec![]));
        basis.push(v);
    }
    let r = basis.len();
    let mut echelon = Echelon { rows: echelon.rows.into_iter().map(|(p, v, _)| (p, v, vec![0; r])).collect() };
    for (j, v) in basis.iter().enumerate() {
        let mut e = vec![0; r];
        e[j] = 1;
        echelon.insert(&field, v.clone(), e);
    }
    Ok(HomologySpace { m, level: complex.level, p, t, dim, kind, basis, field, echelon })
}

/// Matrix of `op` on `space`: column `j` holds the coordinates of `T z_j`.
pub fn hecke_matrix(op: &HeckeOperator, reducer: &mut Reducer, space: &HomologySpace) -> Result<FpMatrix, HeckeError> {
    Ok(hecke_matrix_with_steps(op, reducer, space)?.0)
}

/// [`hecke_matrix`] together with the number of reduction steps spent on
/// each basis cycle.
pub fn hecke_matrix_with_steps(
    op: &HeckeOperator,
    reducer: &mut Reducer,
    space: &HomologySpace,
) -> Result<(FpMatrix, Vec<usize>), HeckeError> {
    check_odd_prime(space.p)?;
    let r = space.len();
    let mut cols = Vec::with_capacity(r);
    let mut steps = Vec::with_capacity(r);
    for j in 0..r {
        let z = space.cycle_chain(reducer, j)?;
        let image = op.apply(&z)?;
        let red = reducer.reduce(&image)?;
        debug_assert!(reducer.verify(&image, &red)?);
        if red.output.iter().all(|&x| x == 0) {
            log::warn!(
                "spurious cycle: T({}, {}) of basis cycle {j} at level {} reduces to zero on the cell basis",
                op.ell,
                op.k,
                space.level
            );
        }
        steps.push(red.steps);
        cols.push(space.coordinates(&red.output)?);
    }
    Ok((FpMatrix::from_columns(&space.field, r, &cols), steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::assemble_complex;
    use crate::exactlinalg::Poly;
    use crate::hecke::{double_coset_reps, Classifier};
    use crate::retract::retract_cells;

    #[test]
    fn rank_two_level_eleven_charpolys() {
        let table = retract_cells(2, &[0, 1]).unwrap();
        let c = assemble_complex(&table, 11).unwrap();
        for p in [7u64, 13] {
            let space = homology_space(&c, 0, p, SpaceKind::Full).unwrap();
            assert_eq!(space.len(), 3);
            let mut r = Reducer::new(Classifier::new(&c), p, 10_000).unwrap();
            let f = space.field().clone();
            // (ℓ, a_ℓ) for the curve 11a; the Eisenstein eigenvalue is 1 + ℓ.
            for (l, a) in [(2u64, -2i64), (3, -1), (5, 1), (7, -2)] {
                let op = double_coset_reps(2, l, 1, 11).unwrap();
                let t = hecke_matrix(&op, &mut r, &space).unwrap();
                let e = Poly::from_ints(&f, &[-(1 + l as i64), 1]);
                let cusp = Poly::from_ints(&f, &[-a, 1]);
                assert_eq!(t.charpoly(), e.mul(&cusp).mul(&cusp), "T{l} mod {p}");
            }
        }
    }

    #[test]
    fn rank_two_commutativity_and_center() {
        let table = retract_cells(2, &[0, 1]).unwrap();
        let c = assemble_complex(&table, 11).unwrap();
        let p = 7;
        let space = homology_space(&c, 0, p, SpaceKind::Full).unwrap();
        let mut r = Reducer::new(Classifier::new(&c), p, 10_000).unwrap();
        let mut mats = vec![];
        for (l, k) in [(2u64, 1usize), (3, 1), (5, 1), (11, 1), (2, 2), (3, 2)] {
            let op = double_coset_reps(2, l, k, 11).unwrap();
            let t = hecke_matrix(&op, &mut r, &space).unwrap();
            if k == 2 {
                assert_eq!(t, FpMatrix::identity(space.field(), space.len()));
            }
            mats.push(t);
        }
        for a in &mats {
            for b in &mats {
                assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
            }
        }
    }
}
