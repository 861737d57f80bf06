//! Simultaneous eigenvalues of commuting matrices over a prime field.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::field::FiniteField;
use super::fpmatrix::FpMatrix;
use super::poly::Poly;
use super::LinalgError;

/// One system of simultaneous eigenvalues, with values in `field`.
///
/// Packages related by Frobenius are identified; `values` holds the
/// lexicographically smallest member of the orbit and `orbit_size` its length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPackage<L: Ord> {
    pub field: Arc<FiniteField>,
    pub values: BTreeMap<L, u64>,
    pub orbit_size: usize,
}

impl<L: Ord> EigenPackage<L> {
    pub fn get(&self, label: &L) -> Option<u64> {
        self.values.get(label).copied()
    }

    /// Whether every eigenvalue lies in the prime field.
    pub fn is_rational(&self) -> bool {
        self.values.values().all(|&v| self.field.is_prime_subfield(v))
    }
}

/// A joint generalized eigenspace whose eigenvalues need a field larger than
/// the configured bound. Factors are the irreducible characteristic factors
/// per operator over the base field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutsideBound<L: Ord> {
    pub factors: BTreeMap<L, Poly>,
    pub extension_degree: usize,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenDecomposition<L: Ord> {
    /// Packages with their generalized-eigenspace multiplicities.
    pub packages: Vec<(EigenPackage<L>, usize)>,
    pub outside_bound: Vec<OutsideBound<L>>,
}

impl<L: Ord + Clone + std::fmt::Debug> EigenDecomposition<L> {
    /// Error if any part of the space was left out because of the bound.
    pub fn require_complete(self) -> Result<Self, LinalgError> {
        match self.outside_bound.first() {
            Some(ob) => Err(LinalgError::EigenvalueOutsideBound {
                degree: ob.extension_degree,
                dimension: ob.dimension,
            }),
            None => Ok(self),
        }
    }

    pub fn total_multiplicity(&self) -> usize {
        self.packages.iter().map(|(_, m)| m).sum()
    }
}

/// Split the space into joint primary components: each block is invariant
/// under every operator, and each operator has an irreducible characteristic
/// polynomial (up to powers) on it. Returns ambient bases and factors.
fn refine(field: &Arc<FiniteField>, mats: &[FpMatrix]) -> Result<Vec<(FpMatrix, Vec<Poly>)>, LinalgError> {
    let n = mats[0].rows();
    let mut blocks = vec![(FpMatrix::identity(field, n), vec![])];
    for t in mats {
        let mut next = vec![];
        for (basis, facs) in blocks {
            if basis.cols() == 0 {
                continue;
            }
            let x = t.restrict(&basis)?;
            for (g, k) in x.charpoly().factor() {
                let mut gk = Poly::constant(field, 1);
                for _ in 0..k {
                    gk = gk.mul(&g);
                }
                let ker = x.eval_poly(&gk).kernel();
                let kb = FpMatrix::from_columns(field, x.rows(), &ker);
                let sub = basis.mul(&kb)?;
                let mut f2 = facs.clone();
                f2.push(g);
                next.push((sub, f2));
            }
        }
        blocks = next;
    }
    Ok(blocks)
}

fn lcm(a: usize, b: usize) -> usize {
    a / num_integer::gcd(a, b) * b
}

/// Simultaneous eigenvalue packages of pairwise commuting square matrices
/// over a prime field, using extensions of degree at most `max_degree`.
pub fn simultaneous_eigenpackages<L: Ord + Clone>(
    mats: &[FpMatrix],
    labels: &[L],
    max_degree: usize,
) -> Result<EigenDecomposition<L>, LinalgError> {
    if mats.len() != labels.len() {
        return Err(LinalgError::LabelCount { mats: mats.len(), labels: labels.len() });
    }
    if mats.is_empty() {
        return Ok(EigenDecomposition { packages: vec![], outside_bound: vec![] });
    }
    let base = mats[0].field().clone();
    if base.degree() != 1 {
        return Err(LinalgError::FieldMismatch);
    }
    let n = mats[0].rows();
    for (i, m) in mats.iter().enumerate() {
        if m.rows() != n || m.cols() != n {
            return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        if m.field() != &base {
            return Err(LinalgError::FieldMismatch);
        }
        for (j, o) in mats.iter().enumerate().skip(i + 1) {
            if m.mul(o)? != o.mul(m)? {
                return Err(LinalgError::NonCommuting(i, j));
            }
        }
    }
    let p = base.characteristic();
    let mut packages: Vec<(EigenPackage<L>, usize)> = vec![];
    let mut outside = vec![];
    let mut fields: BTreeMap<usize, Arc<FiniteField>> = BTreeMap::new();
    for (basis, facs) in refine(&base, mats)? {
        let e = facs.iter().fold(1, |acc, g| lcm(acc, g.degree().unwrap_or(1)));
        let dim = basis.cols();
        if e > max_degree {
            outside.push(OutsideBound {
                factors: labels.iter().cloned().zip(facs).collect(),
                extension_degree: e,
                dimension: dim,
            });
            continue;
        }
        let k = match fields.get(&e) {
            Some(k) => k.clone(),
            None => {
                let k = FiniteField::new(p, e as u32)?;
                fields.insert(e, k.clone());
                k
            }
        };
        // Restrict to the block, move to K and split into eigenvalue tuples.
        let local: Vec<FpMatrix> = mats
            .iter()
            .map(|t| t.restrict(&basis).map(|x| x.map_entries(&k, |v| v)))
            .collect::<Result<_, _>>()?;
        let mut orbits: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        for (sub, sfacs) in refine(&k, &local)? {
            let mut tuple = vec![];
            for g in &sfacs {
                if g.degree() != Some(1) {
                    return Err(LinalgError::FieldMismatch);
                }
                tuple.push(k.neg(g.coeff(0)));
            }
            // Canonical member of the Frobenius orbit.
            let mut best = tuple.clone();
            let mut cur = tuple;
            for _ in 1..e {
                cur = cur.iter().map(|&x| k.frobenius(x)).collect();
                best = best.min(cur.clone());
            }
            *orbits.entry(best).or_default() += sub.cols();
        }
        for (tuple, mult) in orbits {
            let mut size = 1;
            let mut cur: Vec<u64> = tuple.iter().map(|&x| k.frobenius(x)).collect();
            while cur != tuple {
                size += 1;
                cur = cur.iter().map(|&x| k.frobenius(x)).collect();
            }
            // Frobenius-fixed tuples are prime-field values with the same encoding.
            let field = if size == 1 { base.clone() } else { k.clone() };
            let pkg = EigenPackage {
                field,
                values: labels.iter().cloned().zip(tuple).collect(),
                orbit_size: size,
            };
            match packages.iter_mut().find(|(q, _)| *q == pkg) {
                Some((_, m)) => *m += mult,
                None => packages.push((pkg, mult)),
            }
        }
    }
    packages.sort_by(|a, b| {
        (a.0.field.degree(), a.0.values.values().collect::<Vec<_>>())
            .cmp(&(b.0.field.degree(), b.0.values.values().collect::<Vec<_>>()))
    });
    Ok(EigenDecomposition { packages, outside_bound: outside })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pair() {
        let f = FiniteField::prime(5).unwrap();
        let a = FpMatrix::from_ints(&f, &[vec![1, 0], vec![0, 2]]);
        let b = FpMatrix::from_ints(&f, &[vec![3, 0], vec![0, 3]]);
        let d = simultaneous_eigenpackages(&[a, b], &["a", "b"], 4).unwrap();
        let got: Vec<(u64, u64, usize)> = d
            .packages
            .iter()
            .map(|(p, m)| (p.get(&"a").unwrap(), p.get(&"b").unwrap(), *m))
            .collect();
        assert_eq!(got, vec![(1, 3, 1), (2, 3, 1)]);
    }

    #[test]
    fn companion_quadratic_is_one_package() {
        let f = FiniteField::prime(3).unwrap();
        // x^2 + 1 is irreducible over F_3.
        let c = FpMatrix::from_ints(&f, &[vec![0, -1], vec![1, 0]]);
        let d = simultaneous_eigenpackages(&[c.clone()], &[0], 2).unwrap();
        assert_eq!(d.packages.len(), 1);
        let (pkg, mult) = &d.packages[0];
        assert_eq!((*mult, pkg.orbit_size, pkg.field.order()), (2, 2, 9));
        let v = pkg.get(&0).unwrap();
        assert_eq!(pkg.field.add(pkg.field.mul(v, v), 1), 0);
        let d = simultaneous_eigenpackages(&[c], &[0], 1).unwrap();
        assert!(d.packages.is_empty());
        assert_eq!(d.outside_bound[0].dimension, 2);
    }

    #[test]
    fn non_commuting_rejected() {
        let f = FiniteField::prime(5).unwrap();
        let a = FpMatrix::from_ints(&f, &[vec![1, 1], vec![0, 1]]);
        let b = FpMatrix::from_ints(&f, &[vec![1, 0], vec![1, 1]]);
        let err = simultaneous_eigenpackages(&[a, b], &[0, 1], 4);
        assert!(matches!(err, Err(LinalgError::NonCommuting(0, 1))));
    }
}
