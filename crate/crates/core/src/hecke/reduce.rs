//! Rewriting coinvariant cycles as cycles of retract cells.
//!
//! The largest non-cell symbol `S` is eliminated by subtracting a multiple
//! of `∂[u, S]`, where `u` is a reducing point of the largest basis `F`
//! among the `m`-subsets of `S`: `u = Σ x_i v_i` over `F` with every
//! `|x_i| <= 1/2`, so the bases obtained by swapping `u` into `F` have at
//! most half the determinant. Reducing points depend only on the
//! coinvariant class of `F`, so the cones `[u, F]` produced from different
//! symbols sharing `F` cancel once all of them are processed; a surviving
//! cone means the input was not a cycle.

use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::congruence::retract_dim;
use crate::exactlinalg::FiniteField;
use crate::lattice::{
    canonical_sign, det_rows, lattice_coset_reps, primitive, solve_rational, vector_cmp, SquareMatrix, Vector,
};
use crate::sharbly::{normalize, ModP, SharblyChain, SharblySymbol};

use super::classify::{ClassKey, Classifier};
use super::{check_odd_prime, HeckeError};

/// Primitive points `u = Σ x_i v_i` of `Z^m` with all `|x_i| <= 1/2`, one per
/// nonzero class of `Z^m / <v_i>` plus the alternatives on the boundary,
/// best first (smallest `max |x_i|`, then smallest `Σ |x_i|`).
pub fn reducing_points(face: &[Vector]) -> Vec<Vector> {
    let b = SquareMatrix::from_rows(face);
    let mut out: Vec<(i128, i128, Vector)> = vec![];
    let mut seen = HashSet::new();
    for a in lattice_coset_reps(face) {
        let Some((num, den)) = solve_rational(&b, &a) else { return vec![] };
        if den == 1 {
            continue;
        }
        // Shift each coordinate into (-1/2, 1/2]; record ties at 1/2.
        let mut base = a.clone();
        let mut xs = vec![];
        let mut ties = vec![];
        for (i, &n) in num.iter().enumerate() {
            let r = (2 * n - den).div_euclid(2 * den) + i128::from((2 * n - den).rem_euclid(2 * den) != 0);
            let x = n - r * den;
            for (c, v) in base.iter_mut().zip(&face[i]) {
                *c -= (r as i64) * v;
            }
            if 2 * x == den {
                ties.push(i);
            }
            xs.push(x.abs());
        }
        let max = *xs.iter().max().unwrap();
        let sum: i128 = xs.iter().sum();
        for mask in 0u32..(1 << ties.len()) {
            let mut u = base.clone();
            for (t, &i) in ties.iter().enumerate() {
                if mask >> t & 1 == 1 {
                    for (c, v) in u.iter_mut().zip(&face[i]) {
                        *c -= v;
                    }
                }
            }
            if u.iter().all(|&c| c == 0) {
                continue;
            }
            // Dividing by the content keeps every coordinate within 1/2.
            let mut u = primitive(&u);
            canonical_sign(&mut u);
            if seen.insert(u.clone()) {
                out.push((max, sum, u));
            }
        }
    }
    out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then_with(|| vector_cmp(&a.2, &b.2)));
    out.into_iter().map(|(_, _, u)| u).collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(p) = (0..k).rev().find(|&p| idx[p] < n - k + p) else { break };
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
    out
}

/// `(max |det|, number of m-subsets attaining it, index of the first one)`.
fn face_profile(vs: &[Vector], m: usize) -> (i128, usize, Vec<usize>) {
    let mut best = (0i128, 0usize, vec![]);
    for s in subsets(vs.len(), m) {
        let rows: Vec<&[i64]> = s.iter().map(|&i| vs[i].as_slice()).collect();
        let d = det_rows(&rows).abs();
        if d > best.0 {
            best = (d, 1, s);
        } else if d == best.0 {
            best.1 += 1;
        }
    }
    best
}

/// Output of a reduction: coordinates on the cell basis of the target
/// dimension and the certificate `w` with `input + ∂w = output` in the
/// coinvariant complex.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub dim: usize,
    pub output: Vec<u64>,
    pub certificate: SharblyChain<ModP>,
    pub steps: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Priority {
    max_det: i128,
    /// Cones on their own reducing point wait until every other symbol of
    /// the same size has been processed.
    original: bool,
    count: usize,
}

struct Entry {
    coef: u64,
    rep: SharblySymbol,
    priority: Priority,
}

pub struct Reducer<'a> {
    pub classifier: Classifier<'a>,
    field: std::sync::Arc<FiniteField>,
    p: u64,
    pub budget: usize,
}

impl<'a> Reducer<'a> {
    pub fn new(classifier: Classifier<'a>, p: u64, budget: usize) -> Result<Self, HeckeError> {
        let field = check_odd_prime(p)?;
        Ok(Reducer { classifier, field, p, budget })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    fn coef(&self, c: &ModP) -> u64 {
        c.value % self.p
    }

    fn priority(&mut self, s: &SharblySymbol) -> Result<Priority, HeckeError> {
        let m = s.rank();
        let (max_det, count, face) = face_profile(s.vectors(), m);
        let mut original = true;
        if max_det > 1 && s.degree() > 0 {
            let f: Vec<Vector> = face.iter().map(|&i| s.vectors()[i].clone()).collect();
            let us = self.classifier.reducing_orbit(&f, self.p).map_err(HeckeError::ReductionFailed)?;
            original = !s.vectors().iter().any(|v| us.contains(v));
        }
        Ok(Priority { max_det, original, count })
    }

    /// Coinvariant coefficients of a chain, keyed by class.
    pub fn classes(&mut self, chain: &SharblyChain<ModP>) -> HashMap<ClassKey, u64> {
        let f = self.field.clone();
        let mut out: HashMap<ClassKey, u64> = HashMap::new();
        for (s, c) in chain.terms() {
            if let Some((key, sign)) = self.classifier.classify(s) {
                let v = if sign < 0 { f.neg(self.coef(c)) } else { self.coef(c) };
                let e = out.entry(key).or_insert(0);
                *e = f.add(*e, v);
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// Whether `∂ chain` vanishes in the coinvariant complex.
    pub fn is_cycle(&mut self, chain: &SharblyChain<ModP>) -> Result<bool, HeckeError> {
        if chain.degree() == 0 {
            return Ok(true);
        }
        let b = chain.boundary()?;
        Ok(self.classes(&b).is_empty())
    }

    /// Rewrite a coinvariant cycle of degree `t` as a combination of the
    /// cell basis in retract dimension `d(t)`.
    pub fn reduce(&mut self, input: &SharblyChain<ModP>) -> Result<Reduction, HeckeError> {
        let m = input.rank();
        let t = input.degree();
        let complex = self.classifier.complex();
        let dim = retract_dim(m, t).ok_or(HeckeError::ReductionFailed(format!("degree {t} has no cells")))?;
        let n = complex
            .bases
            .get(&dim)
            .ok_or(HeckeError::ReductionFailed(format!("no cells of dimension {dim}")))?
            .len();
        if !self.is_cycle(input)? {
            return Err(HeckeError::NotACycle);
        }
        let f = self.field.clone();
        let p = self.p;
        let mut cells = vec![0u64; n];
        let mut others: HashMap<ClassKey, Entry> = HashMap::new();
        let mut heap: BinaryHeap<(Priority, ClassKey)> = BinaryHeap::new();
        let mut certificate = SharblyChain::zero(m, t + 1);
        let mut steps = 0usize;

        let add = |this: &mut Self,
                       others: &mut HashMap<ClassKey, Entry>,
                       heap: &mut BinaryHeap<(Priority, ClassKey)>,
                       cells: &mut Vec<u64>,
                       s: &SharblySymbol,
                       c: u64|
         -> Result<(), HeckeError> {
            let Some((key, sign)) = this.classifier.classify(s) else { return Ok(()) };
            let c = if sign < 0 { f.neg(c) } else { c };
            match key {
                ClassKey::Cell { dim: d, index } => {
                    if d != dim {
                        return Err(HeckeError::ReductionFailed(format!("cell of dimension {d} in degree {t}")));
                    }
                    cells[index] = f.add(cells[index], c);
                }
                ClassKey::Other { .. } => {
                    if let Some(e) = others.get_mut(&key) {
                        let was = e.coef;
                        e.coef = f.add(e.coef, c);
                        if was == 0 && e.coef != 0 {
                            heap.push((e.priority, key));
                        }
                    } else {
                        // The coefficient is measured on the class, whatever the
                        // orientation of the stored symbol.
                        let priority = this.priority(s)?;
                        others.insert(key.clone(), Entry { coef: c, rep: s.clone(), priority });
                        heap.push((priority, key));
                    }
                }
            }
            Ok(())
        };

        for (s, c) in input.terms() {
            add(self, &mut others, &mut heap, &mut cells, s, self.coef(c))?;
        }

        while let Some((_, key)) = heap.pop() {
            let (c, rep, priority) = {
                let e = &others[&key];
                (e.coef, e.rep.clone(), e.priority)
            };
            if c == 0 {
                continue;
            }
            steps += 1;
            if steps > self.budget {
                return Err(HeckeError::BudgetExhausted(self.budget));
            }
            let (_, _, face) = face_profile(rep.vectors(), m);
            let fvecs: Vec<Vector> = face.iter().map(|&i| rep.vectors()[i].clone()).collect();
            let us = self.classifier.reducing_orbit(&fvecs, p).map_err(HeckeError::ReductionFailed)?;
            if !priority.original {
                // A cone [u, F] survives only if F is killed: then some
                // element of Γ₀(N) reverses F and swaps the cones over the
                // orbit, so coning with the other orbit points still has a
                // nonzero pivot and everything else is smaller.
                let (fsym, _) = normalize(&fvecs)?.expect("max face is a basis");
                if self.classifier.classify(&fsym).is_some() {
                    return Err(HeckeError::ReductionFailed(format!("cone {rep} survives with nonzero coefficient")));
                }
            }
            let mut h = SharblyChain::zero(m, t + 1);
            for u in us.iter().filter(|u| !rep.vectors().contains(u)) {
                let mut hv = vec![u.clone()];
                hv.extend(rep.vectors().iter().cloned());
                h.add_vectors(&hv, ModP::new(1, p))?;
            }
            if h.is_zero() {
                return Err(HeckeError::ReductionFailed(format!("no cone available over {rep}")));
            }
            let dh = h.boundary()?;
            // Coefficient of this class in ∂H.
            let mut a = 0u64;
            let mut terms = vec![];
            for (s, c) in dh.terms() {
                let cv = self.coef(c);
                if let Some((k2, sign)) = self.classifier.classify(s) {
                    if k2 == key {
                        a = f.add(a, if sign < 0 { f.neg(cv) } else { cv });
                    }
                }
                terms.push((s.clone(), cv));
            }
            // The stored coefficient is on the class; the entry was created
            // from a symbol that may carry a sign relative to it, but `c`
            // and `a` are both measured on the class, so the ratio is right.
            let Some(factor) = f.div(c, a) else {
                return Err(HeckeError::ReductionFailed(format!("pivot vanishes mod {p} at {}", rep)));
            };
            for (s, cv) in terms {
                add(self, &mut others, &mut heap, &mut cells, &s, f.neg(f.mul(factor, cv)))?;
            }
            certificate.add_chain(&h.scale(&ModP::new(f.neg(factor) as i64, p)))?;
            debug_assert_eq!(others[&key].coef, 0);
        }
        Ok(Reduction { dim, output: cells, certificate, steps })
    }

    /// Check `input + ∂(certificate) = output` in the coinvariant complex.
    pub fn verify(&mut self, input: &SharblyChain<ModP>, r: &Reduction) -> Result<bool, HeckeError> {
        let mut lhs = input.clone();
        lhs.add_chain(&r.certificate.boundary()?)?;
        let got = self.classes(&lhs);
        let want: HashMap<ClassKey, u64> = r
            .output
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (ClassKey::Cell { dim: r.dim, index: i }, v))
            .collect();
        Ok(got == want)
    }
}

/// One-shot reduction with a fresh classifier.
pub fn reduce_to_v(
    complex: &crate::congruence::LevelComplex,
    chain: &SharblyChain<ModP>,
    p: u64,
    budget: usize,
) -> Result<Reduction, HeckeError> {
    let mut r = Reducer::new(Classifier::new(complex), p, budget)?;
    r.reduce(chain)
}
