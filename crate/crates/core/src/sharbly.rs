//! Sharbly symbols and chains.
//!
//! A symbol `[v_1, ..., v_{m+k}]` of primitive vectors in `Z^m` has degree
//! `k`. Symbols are alternating in their entries, vanish when the vectors do
//! not span `Q^m`, and ignore the sign of each vector; normalization builds
//! all three relations in.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::lattice::{canonical_sign, primitive, rank, vector_cmp, SquareMatrix, Vector};
use crate::retract::{identify_cell, permutation_sign, CellTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SharblyError {
    #[error("zero vector in a sharbly symbol")]
    ZeroVector,
    #[error("vectors of mixed length in a sharbly symbol")]
    Ragged,
    #[error("boundary is not defined in degree 0")]
    DegreeZero,
    #[error("singular matrix cannot act on symbols")]
    SingularMatrix,
    #[error("chain of rank {0} and degree {1} mixed with rank {2} and degree {3}")]
    Mismatch(usize, usize, usize, usize),
    #[error("chain parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A normalized symbol: primitive vectors with canonical signs, pairwise
/// distinct, spanning, in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SharblySymbol {
    vectors: Vec<Vector>,
}

impl Ord for SharblySymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vectors
            .len()
            .cmp(&other.vectors.len())
            .then_with(|| {
                self.vectors
                    .iter()
                    .zip(&other.vectors)
                    .map(|(a, b)| vector_cmp(a, b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    }
}

impl PartialOrd for SharblySymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SharblySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vectors.iter().map(|v| format!("{:?}", v)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl SharblySymbol {
    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn degree(&self) -> usize {
        self.vectors.len() - self.rank()
    }

    /// Image under `v -> v g` (re-primitivized), normalized.
    pub fn act(&self, g: &SquareMatrix) -> Result<Option<(SharblySymbol, i8)>, SharblyError> {
        let imgs: Vec<Vector> = self.vectors.iter().map(|v| g.act(v)).collect();
        normalize(&imgs)
    }

    /// Faces `[.., v_i omitted, ..]` with signs `(-1)^i`, normalized; zero
    /// faces are dropped.
    pub fn faces(&self) -> Vec<(SharblySymbol, i8)> {
        let mut out = vec![];
        for i in 0..self.vectors.len() {
            let face: Vec<Vector> = self
                .vectors
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.clone())
                .collect();
            if let Ok(Some((s, sign))) = normalize(&face) {
                let alt = if i % 2 == 0 { 1 } else { -1 };
                out.push((s, sign * alt));
            }
        }
        out
    }
}

/// Normalize a list of integer vectors to a symbol and sign, or `None` for
/// the zero symbol.
pub fn normalize(vectors: &[Vector]) -> Result<Option<(SharblySymbol, i8)>, SharblyError> {
    let m = vectors.first().map_or(0, |v| v.len());
    let mut vs = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.len() != m {
            return Err(SharblyError::Ragged);
        }
        if v.iter().all(|&x| x == 0) {
            return Err(SharblyError::ZeroVector);
        }
        let mut w = primitive(v);
        canonical_sign(&mut w);
        vs.push(w);
    }
    if vs.is_empty() || rank(&vs) < m {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..vs.len()).collect();
    order.sort_by(|&a, &b| vector_cmp(&vs[a], &vs[b]));
    if order.windows(2).any(|w| vs[w[0]] == vs[w[1]]) {
        return Ok(None);
    }
    let sign = permutation_sign(&order);
    let sorted = order.iter().map(|&i| vs[i].clone()).collect();
    Ok(Some((SharblySymbol { vectors: sorted }, sign)))
}

/// Coefficient rings for chains.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// The image of a small integer, in the same ring as `self`.
    fn embed(&self, x: i64) -> Self;
}

impl Coefficient for BigInt {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn embed(&self, x: i64) -> Self {
        BigInt::from(x)
    }
}

/// Element of a prime field `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ModP {
    pub value: u64,
    pub p: u64,
}

impl ModP {
    pub fn new(x: i64, p: u64) -> Self {
        ModP { value: x.rem_euclid(p as i64) as u64, p }
    }
}

impl fmt::Display for ModP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Coefficient for ModP {
    fn add(&self, o: &Self) -> Self {
        ModP { value: (self.value + o.value) % self.p, p: self.p }
    }
    fn neg(&self) -> Self {
        ModP { value: (self.p - self.value) % self.p, p: self.p }
    }
    fn mul(&self, o: &Self) -> Self {
        ModP { value: ((self.value as u128 * o.value as u128) % self.p as u128) as u64, p: self.p }
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn embed(&self, x: i64) -> Self {
        ModP::new(x, self.p)
    }
}

/// Finite formal sum of symbols of one rank and degree.
#[derive(Clone, PartialEq, Debug)]
pub struct SharblyChain<C: Coefficient> {
    m: usize,
    degree: usize,
    terms: BTreeMap<SharblySymbol, C>,
}

impl<C: Coefficient> SharblyChain<C> {
    pub fn zero(m: usize, degree: usize) -> Self {
        SharblyChain { m, degree, terms: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SharblySymbol, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &SharblySymbol) -> Option<&C> {
        self.terms.get(s)
    }

    /// Add `c * symbol`.
    pub fn add_term(&mut self, s: SharblySymbol, c: C) -> Result<(), SharblyError> {
        if s.rank() != self.m || s.degree() != self.degree {
            return Err(SharblyError::Mismatch(self.m, self.degree, s.rank(), s.degree()));
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.get_mut(&s) {
            Some(e) => {
                let v = e.add(&c);
                if v.is_zero() {
                    self.terms.remove(&s);
                } else {
                    *e = v;
                }
            }
            None => {
                self.terms.insert(s, c);
            }
        }
        Ok(())
    }

    /// Add `c * [vectors]`, normalizing first.
    pub fn add_vectors(&mut self, vectors: &[Vector], c: C) -> Result<(), SharblyError> {
        if let Some((s, sign)) = normalize(vectors)? {
            let c = if sign < 0 { c.neg() } else { c };
            self.add_term(s, c)?;
        }
        Ok(())
    }

    pub fn add_chain(&mut self, other: &Self) -> Result<(), SharblyError> {
        if other.m != self.m || other.degree != self.degree {
            return Err(SharblyError::Mismatch(self.m, self.degree, other.m, other.degree));
        }
        for (s, c) in &other.terms {
            self.add_term(s.clone(), c.clone())?;
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        SharblyChain {
            m: self.m,
            degree: self.degree,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, a: &C) -> Self {
        let mut out = Self::zero(self.m, self.degree);
        for (s, c) in &self.terms {
            out.add_term(s.clone(), c.mul(a)).expect("same shape");
        }
        out
    }

    /// `∂[v_1..v_n] = Σ (-1)^i [.., v_i omitted, ..]`, extended linearly.
    pub fn boundary(&self) -> Result<Self, SharblyError> {
        if self.degree == 0 {
            return Err(SharblyError::DegreeZero);
        }
        let mut out = Self::zero(self.m, self.degree - 1);
        for (s, c) in &self.terms {
            for (f, sign) in s.faces() {
                let c = if sign < 0 { c.neg() } else { c.clone() };
                out.add_term(f, c)?;
            }
        }
        Ok(out)
    }

    /// Right action of a nonsingular integer matrix.
    pub fn act(&self, g: &SquareMatrix) -> Result<Self, SharblyError> {
        if g.det() == 0 {
            return Err(SharblyError::SingularMatrix);
        }
        let mut out = Self::zero(self.m, self.degree);
        for (s, c) in &self.terms {
            if let Some((t, sign)) = s.act(g)? {
                let c = if sign < 0 { c.neg() } else { c.clone() };
                out.add_term(t, c)?;
            }
        }
        Ok(out)
    }

    /// One line per term, `coeff ; v_1 ; v_2 ; ...`, in canonical order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (sym, c) in &self.terms {
            s.push_str(&c.to_string());
            for v in sym.vectors() {
                s.push_str(" ; ");
                let coords: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                s.push_str(&coords.join(" "));
            }
            s.push('\n');
        }
        s
    }
}

impl SharblyChain<BigInt> {
    /// A single symbol with coefficient one.
    pub fn from_symbol(s: SharblySymbol) -> Self {
        let mut c = Self::zero(s.rank(), s.degree());
        c.add_term(s, BigInt::one()).expect("same shape");
        c
    }

    /// Parse the line format of [`SharblyChain::to_text`].
    pub fn from_text(m: usize, degree: usize, text: &str) -> Result<Self, SharblyError> {
        let mut out = Self::zero(m, degree);
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| SharblyError::Parse { line: i + 1, msg: msg.to_string() };
            let mut parts = line.split(';');
            let c = BigInt::from_str(parts.next().unwrap_or("").trim()).map_err(|_| bad("bad coefficient"))?;
            let vs: Vec<Vector> = parts
                .map(|p| {
                    p.split_whitespace()
                        .map(|t| t.parse::<i64>())
                        .collect::<Result<Vector, _>>()
                        .map_err(|_| bad("bad vector"))
                })
                .collect::<Result<_, _>>()?;
            if vs.len() != m + degree {
                return Err(bad("wrong number of vectors"));
            }
            out.add_vectors(&vs, c)?;
        }
        Ok(out)
    }
}

/// Whether every symbol of the chain is the minimal-vector set of a retract
/// cell, and the symbols that are not.
pub fn v_support<C: Coefficient>(chain: &SharblyChain<C>, table: &CellTable) -> (bool, Vec<SharblySymbol>) {
    let offenders: Vec<SharblySymbol> = chain
        .terms()
        .filter(|(s, _)| identify_cell(s.vectors(), table).is_none())
        .map(|(s, _)| s.clone())
        .collect();
    (offenders.is_empty(), offenders)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(vs: &[[i64; 2]]) -> Vec<Vector> {
        vs.iter().map(|v| v.to_vec()).collect()
    }

    #[test]
    fn normalize_examples() {
        let (s, sign) = normalize(&sym(&[[0, 1], [1, 0]])).unwrap().unwrap();
        assert_eq!((s.vectors().to_vec(), sign), (sym(&[[1, 0], [0, 1]]), -1));
        assert_eq!(normalize(&sym(&[[1, 0], [-1, 0]])).unwrap(), None);
        let (s, sign) = normalize(&sym(&[[-1, 0], [0, 1]])).unwrap().unwrap();
        assert_eq!((s.vectors().to_vec(), sign), (sym(&[[1, 0], [0, 1]]), 1));
        assert!(matches!(normalize(&sym(&[[0, 0], [1, 0]])), Err(SharblyError::ZeroVector)));
    }

    #[test]
    fn boundary_example() {
        let mut c = SharblyChain::zero(2, 1);
        c.add_vectors(&sym(&[[1, 0], [0, 1], [1, 1]]), BigInt::one()).unwrap();
        let mut expect = SharblyChain::zero(2, 0);
        expect.add_vectors(&sym(&[[0, 1], [1, 1]]), BigInt::one()).unwrap();
        expect.add_vectors(&sym(&[[1, 0], [1, 1]]), BigInt::from(-1)).unwrap();
        expect.add_vectors(&sym(&[[1, 0], [0, 1]]), BigInt::one()).unwrap();
        assert_eq!(c.boundary().unwrap(), expect);
    }

    #[test]
    fn degenerate_faces_vanish() {
        // A repeated line kills the symbol; distinct lines do not.
        let mut c = SharblyChain::zero(2, 1);
        c.add_vectors(&sym(&[[1, 0], [0, 1], [1, 2]]), BigInt::one()).unwrap();
        assert!(!c.boundary().unwrap().is_zero());
        let mut d = SharblyChain::<BigInt>::zero(2, 1);
        assert!(d.add_vectors(&sym(&[[1, 0], [2, 0], [0, 1]]), BigInt::one()).is_ok());
        assert!(d.is_zero());
    }

    #[test]
    fn text_round_trip() {
        let mut c = SharblyChain::zero(2, 1);
        c.add_vectors(&sym(&[[1, 0], [0, 1], [1, 1]]), BigInt::from(3)).unwrap();
        c.add_vectors(&sym(&[[1, 0], [1, 2], [1, 1]]), BigInt::from(-2)).unwrap();
        let t = c.to_text();
        assert_eq!(SharblyChain::from_text(2, 1, &t).unwrap(), c);
    }
}
