//! Dirichlet characters with values in finite fields, sums of characters
//! twisted by powers of the cyclotomic character, and matching of Hecke
//! eigenvalue packages against them.
//!
//! Over `F_p` the cyclotomic character `ε` agrees with the character
//! `ℓ ↦ ℓ mod p` of conductor `p` at every `ℓ ≠ p`, so a summand `χ ε^i` is
//! again a Dirichlet character modulo `p · cond(χ)`. Matching therefore
//! searches multisets of characters modulo `N p` and names each one as
//! `χ ε^i` afterwards.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::prime_factors;
use crate::exactlinalg::{is_prime, FiniteField, LinalgError, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("Frob_{ell} is ramified for this representation")]
    RamifiedPrime { ell: u64 },
    #[error("eigenvalue a({0}, {1}) is missing")]
    MissingEntry(u64, usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matching needs at least two good primes, found {0}")]
    TooFewPrimes(usize),
    #[error("characters with different fields or characteristics")]
    FieldMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Generators of `(Z/n)^×` with their orders, one cyclic factor each.
fn unit_generators(n: u64) -> Vec<(u64, u64)> {
    let mut out = vec![];
    for (q, a) in prime_powers(n) {
        let qa = q.pow(a);
        let rest = n / qa;
        // CRT lift of g mod q^a that is 1 modulo the rest of n.
        let lift = |g: u64| -> u64 {
            if rest == 1 {
                return g % n;
            }
            (0..qa).map(|k| 1 + k * rest).find(|x| x % qa == g % qa).unwrap() % n
        };
        if q == 2 {
            if a >= 2 {
                out.push((lift(qa - 1), 2));
            }
            if a >= 3 {
                out.push((lift(5), qa / 4));
            }
        } else {
            let phi = qa / q * (q - 1);
            let g = (2..qa).find(|&g| mult_order(g, qa) == phi).expect("odd prime powers have primitive roots");
            out.push((lift(g), phi));
        }
    }
    out
}

fn prime_powers(n: u64) -> Vec<(u64, u32)> {
    prime_factors(n)
        .into_iter()
        .map(|q| {
            let mut a = 0;
            let mut r = n;
            while r % q == 0 {
                r /= q;
                a += 1;
            }
            (q, a)
        })
        .collect()
}

fn mult_order(g: u64, n: u64) -> u64 {
    let mut x = g % n;
    let mut k = 1;
    while x != 1 {
        x = x * g % n;
        k += 1;
        if k > n {
            return 0;
        }
    }
    k
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// A character `(Z/n)^× → F_q^×`, stored as its table of values.
#[derive(Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    field: Arc<FiniteField>,
    /// `values[x]` for `x` coprime to the modulus, 0 otherwise.
    values: Vec<u64>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, o: &Self) -> bool {
        self.modulus == o.modulus && self.field == o.field && self.values == o.values
    }
}

impl Eq for DirichletCharacter {}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirichletCharacter({:?})", self.descriptor())
    }
}

/// Serializable description: conductor and values on generators of the
/// units modulo the conductor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterDescriptor {
    pub conductor: u64,
    pub generator_values: Vec<(u64, String)>,
}

impl DirichletCharacter {
    pub fn trivial(modulus: u64, field: &Arc<FiniteField>) -> Self {
        let values = (0..modulus.max(1)).map(|x| u64::from(gcd(x, modulus) == 1)).collect();
        DirichletCharacter { modulus: modulus.max(1), field: field.clone(), values }
    }

    /// The character with the given values on the generators returned by
    /// the standard decomposition of `(Z/n)^×`; `None` if a value has the
    /// wrong order.
    fn from_generator_values(modulus: u64, field: &Arc<FiniteField>, gens: &[(u64, u64)], vals: &[u64]) -> Option<Self> {
        let f = field.as_ref();
        if gens.iter().zip(vals).any(|(&(_, o), &v)| f.pow(v, o) != 1) {
            return None;
        }
        let n = modulus;
        let mut values = vec![0u64; n as usize];
        let mut elems = vec![(1 % n, 1u64)];
        for (&(g, o), &v) in gens.iter().zip(vals) {
            let mut next = Vec::with_capacity(elems.len() * o as usize);
            for &(x, c) in &elems {
                let (mut y, mut d) = (x, c);
                for _ in 0..o {
                    next.push((y, d));
                    y = y * g % n;
                    d = f.mul(d, v);
                }
            }
            elems = next;
        }
        for (x, c) in elems {
            values[x as usize] = c;
        }
        if n == 1 {
            values[0] = 1;
        }
        Some(DirichletCharacter { modulus: n, field: field.clone(), values })
    }

    /// All characters modulo `n` with values in `field`.
    pub fn all(modulus: u64, field: &Arc<FiniteField>) -> Vec<Self> {
        let gens = unit_generators(modulus);
        let choices: Vec<Vec<u64>> = gens.iter().map(|&(_, o)| field.roots_of_unity(o)).collect();
        let mut out = vec![];
        let mut idx = vec![0usize; gens.len()];
        loop {
            let vals: Vec<u64> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            if let Some(c) = Self::from_generator_values(modulus, field, &gens, &vals) {
                out.push(c);
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return out;
                }
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// The character `x ↦ x mod p` that agrees with `ε` away from `p`.
    pub fn cyclotomic(p: u64, field: &Arc<FiniteField>) -> Self {
        let values = (0..p).map(|x| field.from_int(x as i64)).collect();
        DirichletCharacter { modulus: p, field: field.clone(), values }
    }

    /// The quadratic character modulo an odd prime `q`.
    pub fn legendre(q: u64, field: &Arc<FiniteField>) -> Self {
        let values = (0..q)
            .map(|x| {
                if x == 0 {
                    0
                } else if (1..q).any(|y| y * y % q == x) {
                    1
                } else {
                    field.from_int(-1)
                }
            })
            .collect();
        DirichletCharacter { modulus: q, field: field.clone(), values }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The same character with values in an extension field.
    pub fn extend(&self, big: &Arc<FiniteField>) -> Result<Self, GaloisError> {
        let powers = big.embedding_from(&self.field)?;
        let values = self.values.iter().map(|&v| big.embed(&self.field, &powers, v)).collect();
        Ok(DirichletCharacter { modulus: self.modulus, field: big.clone(), values })
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    /// `χ(x)`, or `None` if `x` is not a unit.
    pub fn value(&self, x: u64) -> Option<u64> {
        let v = self.values[(x % self.modulus) as usize];
        (v != 0).then_some(v)
    }

    /// The same character on a multiple of its modulus.
    pub fn lift(&self, modulus: u64) -> Self {
        assert_eq!(modulus % self.modulus, 0, "lift to a non-multiple");
        let values = (0..modulus)
            .map(|x| if gcd(x, modulus) == 1 { self.values[(x % self.modulus) as usize] } else { 0 })
            .collect();
        DirichletCharacter { modulus, field: self.field.clone(), values }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, GaloisError> {
        if self.field != o.field {
            return Err(GaloisError::FieldMismatch);
        }
        let n = num_integer::lcm(self.modulus, o.modulus);
        let (a, b) = (self.lift(n), o.lift(n));
        let values = a.values.iter().zip(&b.values).map(|(&x, &y)| self.field.mul(x, y)).collect();
        Ok(DirichletCharacter { modulus: n, field: self.field.clone(), values })
    }

    pub fn pow(&self, k: u64) -> Self {
        let values = self.values.iter().map(|&x| if x == 0 { 0 } else { self.field.pow(x, k) }).collect();
        DirichletCharacter { modulus: self.modulus, field: self.field.clone(), values }
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v <= 1)
    }

    /// `χ(-1) = 1`.
    pub fn is_even(&self) -> bool {
        self.value(self.modulus - 1) == Some(1)
    }

    pub fn conductor(&self) -> u64 {
        let n = self.modulus;
        let mut divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        divisors.sort_unstable();
        for d in divisors {
            let ok = (1..n).filter(|&x| gcd(x, n) == 1 && x % d == 1 % d).all(|x| self.values[x as usize] == 1);
            if ok {
                return d;
            }
        }
        n
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let d = self.conductor();
        let mut values = vec![0u64; d as usize];
        for x in 0..self.modulus {
            if gcd(x, self.modulus) == 1 {
                values[(x % d) as usize] = self.values[x as usize];
            }
        }
        if d == 1 {
            values[0] = 1;
        }
        DirichletCharacter { modulus: d, field: self.field.clone(), values }
    }

    pub fn descriptor(&self) -> CharacterDescriptor {
        let prim = self.primitive();
        let generator_values = unit_generators(prim.modulus)
            .into_iter()
            .map(|(g, _)| (g, self.field.format(prim.values[g as usize])))
            .collect();
        CharacterDescriptor { conductor: prim.modulus, generator_values }
    }
}

/// A semisimple sum `⊕ χ_j ε^{i_j}` of characters twisted by powers of the
/// mod-`p` cyclotomic character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisRep {
    pub p: u64,
    pub field: Arc<FiniteField>,
    /// Summands sorted by `(conductor, power, values)`, so equality is
    /// multiset equality.
    summands: Vec<(DirichletCharacter, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandDescriptor {
    pub conductor: u64,
    pub generator_values: Vec<(u64, String)>,
    pub cyclotomic_power: u32,
}

impl GaloisRep {
    pub fn new(p: u64, field: &Arc<FiniteField>, summands: Vec<(DirichletCharacter, u32)>) -> Result<Self, GaloisError> {
        if !is_prime(p) {
            return Err(GaloisError::NotPrime(p));
        }
        if field.characteristic() != p || summands.iter().any(|(c, _)| c.field() != field) {
            return Err(GaloisError::FieldMismatch);
        }
        let mut summands: Vec<(DirichletCharacter, u32)> =
            summands.into_iter().map(|(c, i)| (c.primitive(), i)).collect();
        summands.sort_by(|a, b| {
            (a.0.modulus, a.1, &a.0.values).cmp(&(b.0.modulus, b.1, &b.0.values))
        });
        Ok(GaloisRep { p, field: field.clone(), summands })
    }

    /// `1 ⊕ ε ⊕ ... ⊕ ε^{m-1}`.
    pub fn eisenstein(m: usize, p: u64, field: &Arc<FiniteField>) -> Result<Self, GaloisError> {
        let one = DirichletCharacter::trivial(1, field);
        Self::new(p, field, (0..m as u32).map(|i| (one.clone(), i)).collect())
    }

    pub fn dimension(&self) -> usize {
        self.summands.len()
    }

    pub fn summands(&self) -> &[(DirichletCharacter, u32)] {
        &self.summands
    }

    /// `Frob_ℓ` acts on `χ ε^i` by `χ(ℓ) ℓ^i`. At `ℓ = p` the power is read
    /// literally, so twisted summands contribute 0; this is the shape of the
    /// Hecke polynomial at `p` for classes with `ε`-twisted summands.
    fn frobenius_value(&self, c: &DirichletCharacter, i: u32, ell: u64) -> Result<u64, GaloisError> {
        let chi = c.value(ell).ok_or(GaloisError::RamifiedPrime { ell })?;
        let f = &self.field;
        Ok(f.mul(chi, f.pow(f.from_int((ell % self.p) as i64), i as u64)))
    }

    /// `det(I - ρ(Frob_ℓ) X) = ∏ (1 - χ(ℓ) ℓ^i X)`.
    pub fn frobenius_charpoly(&self, ell: u64) -> Result<Poly, GaloisError> {
        if !is_prime(ell) {
            return Err(GaloisError::NotPrime(ell));
        }
        let f = &self.field;
        let mut out = Poly::constant(f, 1);
        for (c, i) in &self.summands {
            let a = self.frobenius_value(c, *i, ell)?;
            out = out.mul(&Poly::new(f, vec![1, f.neg(a)]));
        }
        Ok(out)
    }

    /// The same representation with values in a larger field.
    pub fn extend(&self, big: &Arc<FiniteField>) -> Result<Self, GaloisError> {
        let summands = self
            .summands
            .iter()
            .map(|(c, i)| Ok((c.extend(big)?, *i)))
            .collect::<Result<_, GaloisError>>()?;
        Self::new(self.p, big, summands)
    }

    /// Same Frobenius eigenvalues at every `ℓ ∤ p · cond`: the multisets of
    /// characters `χ_j ω^{i_j}` agree, `ω` being `x ↦ x mod p`.
    pub fn equivalent(&self, o: &GaloisRep) -> bool {
        if self.p != o.p || self.dimension() != o.dimension() {
            return false;
        }
        if self.field != o.field {
            let (small, big) = if self.field.degree() < o.field.degree() { (self, o) } else { (o, self) };
            return match small.extend(&big.field) {
                Ok(s) => s.equivalent(big),
                Err(_) => false,
            };
        }
        let norm = |r: &GaloisRep| -> Vec<Vec<u64>> {
            let omega = DirichletCharacter::cyclotomic(r.p, &r.field);
            let mut v: Vec<Vec<u64>> = r
                .summands
                .iter()
                .map(|(c, i)| c.mul(&omega.pow(*i as u64)).unwrap().primitive().values)
                .collect();
            v.sort();
            v
        };
        norm(self) == norm(o)
    }

    pub fn descriptors(&self) -> Vec<SummandDescriptor> {
        self.summands
            .iter()
            .map(|(c, i)| {
                let d = c.descriptor();
                SummandDescriptor { conductor: d.conductor, generator_values: d.generator_values, cyclotomic_power: *i }
            })
            .collect()
    }
}

fn power_suffix(i: u32) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    match i {
        0 => String::new(),
        1 => "ε".into(),
        _ => format!("ε{}", i.to_string().chars().map(|d| SUP[d.to_digit(10).unwrap() as usize]).collect::<String>()),
    }
}

impl fmt::Display for GaloisRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .summands
            .iter()
            .map(|(c, i)| {
                let chi = if c.is_trivial() {
                    String::new()
                } else {
                    let d = c.descriptor();
                    let vals: Vec<String> = d.generator_values.iter().map(|(g, v)| format!("{g}↦{v}")).collect();
                    format!("χ{}[{}]", d.conductor, vals.join(","))
                };
                match (chi.is_empty(), *i) {
                    (true, 0) => "1".to_string(),
                    _ => format!("{chi}{}", power_suffix(*i)),
                }
            })
            .collect();
        write!(f, "{}", parts.join("⊕"))
    }
}

/// Hecke eigenvalues `a(ℓ, k)` of one eigenclass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPackage {
    pub level: u64,
    pub p: u64,
    pub m: usize,
    pub field: Arc<FiniteField>,
    pub entries: BTreeMap<(u64, usize), u64>,
}

impl EigenPackage {
    pub fn new(level: u64, p: u64, m: usize, field: &Arc<FiniteField>) -> Self {
        EigenPackage { level, p, m, field: field.clone(), entries: BTreeMap::new() }
    }

    /// From eigenvalues labelled by `(ℓ, k)`.
    pub fn from_linalg(level: u64, m: usize, pkg: &crate::exactlinalg::EigenPackage<(u64, usize)>) -> Self {
        let p = pkg.field.characteristic();
        let mut out = Self::new(level, p, m, &pkg.field);
        for (&(l, k), &a) in &pkg.values {
            out.set(l, k, a);
        }
        out
    }

    pub fn set(&mut self, ell: u64, k: usize, a: u64) {
        self.entries.insert((ell, k), a);
    }

    /// `a(ℓ, k)`, with `a(ℓ, 0) = 1`.
    pub fn get(&self, ell: u64, k: usize) -> Option<u64> {
        if k == 0 {
            return Some(1);
        }
        self.entries.get(&(ell, k)).copied()
    }

    /// Inverts [`hecke_lhs_polynomial`] at `ℓ ≠ p`.
    pub fn set_from_polynomial(&mut self, ell: u64, poly: &Poly) -> Result<(), GaloisError> {
        let f = self.field.clone();
        let l = f.from_int((ell % self.p) as i64);
        if l == 0 {
            return Err(GaloisError::RamifiedPrime { ell });
        }
        for k in 1..=self.m {
            let scale = f.pow(l, (k * (k - 1) / 2) as u64);
            let mut a = f.div(poly.coeff(k), scale).expect("ℓ is a unit mod p");
            if k % 2 == 1 {
                a = f.neg(a);
            }
            self.set(ell, k, a);
        }
        Ok(())
    }

    pub fn primes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.entries.keys().map(|&(l, _)| l).collect();
        v.dedup();
        v
    }

    /// `ℓ | N`: the entries come from the `U`-type operator.
    pub fn is_u_type(&self, ell: u64) -> bool {
        self.level % ell == 0
    }

    /// Primes `ℓ ∤ N p` with every `a(ℓ, k)` present.
    pub fn good_primes(&self) -> Vec<u64> {
        self.primes()
            .into_iter()
            .filter(|&l| self.level % l != 0 && l != self.p && (1..=self.m).all(|k| self.get(l, k).is_some()))
            .collect()
    }
}

/// `Σ_{k=0}^{m} (-1)^k ℓ^{k(k-1)/2} a(ℓ, k) X^k`.
pub fn hecke_lhs_polynomial(pkg: &EigenPackage, ell: u64) -> Result<Poly, GaloisError> {
    let f = &pkg.field;
    let l = f.from_int((ell % pkg.p) as i64);
    let mut coeffs = Vec::with_capacity(pkg.m + 1);
    for k in 0..=pkg.m {
        let a = pkg.get(ell, k).ok_or(GaloisError::MissingEntry(ell, k))?;
        let mut c = f.mul(f.pow(l, (k * k.saturating_sub(1) / 2) as u64), a);
        if k % 2 == 1 {
            c = f.neg(c);
        }
        coeffs.push(c);
    }
    Ok(Poly::new(f, coeffs))
}

/// Search space for [`match_representation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSearch {
    /// Character values are sought in `F_{p^e}` for `e` up to this bound.
    pub extension_degree: u32,
}

impl Default for MatchSearch {
    fn default() -> Self {
        MatchSearch { extension_degree: 2 }
    }
}

/// Every sum of `m` characters of conductor dividing `N p` (twisted by
/// `ε^i`, `0 <= i < m`) whose Frobenius polynomials equal the Hecke
/// polynomials at all good primes of the package. Results are pairwise
/// inequivalent and use the smallest twist-free naming available.
pub fn match_representation(pkg: &EigenPackage, search: MatchSearch) -> Result<Vec<GaloisRep>, GaloisError> {
    let good = pkg.good_primes();
    if good.len() < 2 {
        return Err(GaloisError::TooFewPrimes(good.len()));
    }
    let p = pkg.p;
    let base = pkg.field.clone();
    let e = search.extension_degree.max(base.degree());
    let e = (1..=e).rev().find(|d| d % base.degree() == 0).unwrap_or(base.degree());
    let big = FiniteField::new(p, e)?;
    let powers = big.embedding_from(&base)?;
    let targets: Vec<(u64, Poly)> = good
        .iter()
        .map(|&l| {
            let poly = hecke_lhs_polynomial(pkg, l)?;
            let coeffs = poly.coeffs().iter().map(|&c| big.embed(&base, &powers, c)).collect();
            Ok((l, Poly::new(&big, coeffs)))
        })
        .collect::<Result<_, GaloisError>>()?;
    let modulus = pkg.level * p;
    // Candidate characters: their value at each good prime is a root of the
    // reversed target polynomial.
    let chars: Vec<DirichletCharacter> = DirichletCharacter::all(modulus, &big)
        .into_iter()
        .filter(|c| {
            targets.iter().all(|(l, t)| {
                let a = c.value(*l).expect("good primes are units");
                // 1 - a X vanishes at X = a⁻¹.
                t.eval(big.inv(a).unwrap()) == 0
            })
        })
        .collect();
    let mut found: Vec<Vec<usize>> = vec![];
    let mut stack = vec![];
    let polys: Vec<Poly> = targets.iter().map(|(_, t)| t.clone()).collect();
    search_multisets(&chars, &targets, polys, 0, pkg.m, &mut stack, &mut found, &big);
    let omega = DirichletCharacter::cyclotomic(p, &big);
    let mut out: Vec<GaloisRep> = vec![];
    for combo in found {
        let summands = combo.iter().map(|&i| name_summand(&chars[i], &omega, pkg.m, p)).collect();
        let rep = GaloisRep::new(p, &big, summands)?;
        if !out.iter().any(|r| r.equivalent(&rep)) {
            out.push(rep);
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search_multisets(
    chars: &[DirichletCharacter],
    targets: &[(u64, Poly)],
    polys: Vec<Poly>,
    start: usize,
    left: usize,
    stack: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
    f: &Arc<FiniteField>,
) {
    if left == 0 {
        if polys.iter().all(|q| q.is_one()) {
            found.push(stack.clone());
        }
        return;
    }
    for i in start..chars.len() {
        let mut next = Vec::with_capacity(polys.len());
        let mut ok = true;
        for ((l, _), q) in targets.iter().zip(&polys) {
            let a = chars[i].value(*l).unwrap();
            let lin = Poly::new(f, vec![1, f.neg(a)]);
            let (quo, rem) = q.divrem(&lin);
            if !rem.is_zero() {
                ok = false;
                break;
            }
            next.push(quo);
        }
        if ok {
            stack.push(i);
            search_multisets(chars, targets, next, i, left - 1, stack, found, f);
            stack.pop();
        }
    }
}

/// Write `ψ` as `χ ε^i` with `0 <= i < m`, preferring the smallest
/// conductor of `χ` and then the smallest `i`.
fn name_summand(psi: &DirichletCharacter, omega: &DirichletCharacter, m: usize, p: u64) -> (DirichletCharacter, u32) {
    let inv = omega.pow(p.saturating_sub(2));
    let mut best: Option<(u64, u32, DirichletCharacter)> = None;
    let mut chi = psi.clone();
    for i in 0..m as u32 {
        let prim = chi.primitive();
        let key = (prim.modulus(), i);
        if best.as_ref().map_or(true, |(c, j, _)| key < (*c, *j)) {
            best = Some((key.0, i, prim));
        }
        chi = chi.mul(&inv).unwrap();
    }
    let (_, i, c) = best.unwrap();
    (c, i)
}

/// One row of reference Hecke polynomials: operator kind (`'T'` or `'U'`),
/// `ℓ`, and coefficients from the constant term up.
pub type PolynomialRow = (char, u64, &'static [i64]);

/// A block of published Hecke polynomials for odd torsion classes of
/// `GL(4)` in cohomological degree 5.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceBlock {
    pub level: u64,
    pub p: u64,
    /// Number of eigenclasses sharing the block.
    pub classes: usize,
    /// Eigenclass index for levels with several distinct blocks.
    pub class_id: usize,
    pub rows: &'static [PolynomialRow],
    /// Whether the matched representation is `β ⊕ ε ⊕ ε² ⊕ βε³`.
    pub beta_twist: bool,
}

const EIS5: &[PolynomialRow] = &[('T', 2, &[1, 0, 0, 0, -1]), ('T', 3, &[1, 0, 0, 0, -1]), ('T', 5, &[1, -1]), ('T', 7, &[1, 0, 0, 0, -1])];

pub const REFERENCE_POLYNOMIALS: &[ReferenceBlock] = &[
    ReferenceBlock { level: 11, p: 5, classes: 1, class_id: 1, rows: EIS5, beta_twist: false },
    ReferenceBlock {
        level: 19,
        p: 3,
        classes: 1,
        class_id: 1,
        rows: &[('T', 2, &[1, 0, 1, 0, 1]), ('T', 3, &[1, -1]), ('T', 5, &[1, 0, 1, 0, 1]), ('T', 7, &[1, -1, 0, -1, 1])],
        beta_twist: false,
    },
    ReferenceBlock { level: 19, p: 5, classes: 1, class_id: 1, rows: EIS5, beta_twist: false },
    ReferenceBlock {
        level: 22,
        p: 5,
        classes: 1,
        class_id: 1,
        rows: &[('U', 2, &[1, -1, -1, -1, -1]), ('T', 3, &[1, 0, 0, 0, -1]), ('T', 5, &[1, -1]), ('T', 7, &[1, 0, 0, 0, -1])],
        beta_twist: false,
    },
    ReferenceBlock {
        level: 22,
        p: 5,
        classes: 1,
        class_id: 2,
        rows: &[('U', 2, &[1, 2, 1, -2, -1]), ('T', 3, &[1, 0, 0, 0, -1]), ('T', 5, &[1, -1]), ('T', 7, &[1, 0, 0, 0, -1])],
        beta_twist: false,
    },
    ReferenceBlock {
        level: 22,
        p: 5,
        classes: 1,
        class_id: 3,
        rows: &[('U', 2, &[1, 1, -1, 1, -1]), ('T', 3, &[1, 0, 0, 0, -1]), ('T', 5, &[1, -1]), ('T', 7, &[1, 0, 0, 0, -1])],
        beta_twist: false,
    },
    ReferenceBlock {
        level: 23,
        p: 11,
        classes: 1,
        class_id: 1,
        rows: &[
            ('T', 2, &[1, -4, 4, 1, -2]),
            ('T', 3, &[1, 4, 5, -2, 3]),
            ('T', 5, &[1, -2, 4, 3, 5]),
            ('T', 7, &[1, -4, -4, 3, 4]),
        ],
        beta_twist: false,
    },
    ReferenceBlock {
        level: 25,
        p: 5,
        classes: 2,
        class_id: 1,
        rows: &[('T', 2, &[1, 0, 0, 0, -1]), ('T', 3, &[1, 0, 0, 0, -1]), ('U', 5, &[1]), ('T', 7, &[1, 0, 0, 0, -1])],
        beta_twist: false,
    },
    ReferenceBlock {
        level: 27,
        p: 3,
        classes: 2,
        class_id: 1,
        rows: &[('T', 2, &[1, 0, 0, 0, 1]), ('U', 3, &[1]), ('T', 5, &[1, 0, 1, 0, 1]), ('T', 7, &[1, -1, 0, -1, 1])],
        beta_twist: false,
    },
    ReferenceBlock { level: 29, p: 5, classes: 1, class_id: 1, rows: EIS5, beta_twist: false },
    ReferenceBlock {
        level: 29,
        p: 7,
        classes: 1,
        class_id: 1,
        rows: &[('T', 2, &[1, -1, 0, -1, 1]), ('T', 3, &[1, 2, -2, -2, 1]), ('T', 5, &[1, -2, -2, 2, 1]), ('T', 7, &[1, -1])],
        beta_twist: false,
    },
    ReferenceBlock {
        level: 30,
        p: 5,
        classes: 1,
        class_id: 1,
        rows: &[
            ('U', 2, &[1, -2, 0, 1, -1]),
            ('U', 3, &[1, 2, -2, 0, -1]),
            ('U', 5, &[1]),
            ('T', 7, &[1, -2, 2, -1, -1]),
            ('T', 11, &[1, 1, 1, 1, 1]),
            ('T', 13, &[1, 1, -2, 2, -1]),
        ],
        beta_twist: true,
    },
    ReferenceBlock { level: 31, p: 5, classes: 1, class_id: 1, rows: EIS5, beta_twist: false },
];

/// Reference rows `(N, p, kind, ℓ)` that disagree with the representation
/// of their block. At `N = 27`, `p = 3` the `T_2` row reads `1 + X^4`, while
/// `1 ⊕ ε ⊕ ε² ⊕ ε³` gives `1 + X^2 + X^4` at `ℓ ≡ 2 (mod 3)`, as in the `T_5`
/// row of the same block; `1 + X^4` needs Frobenius eigenvalues of order 8,
/// which no character of conductor dividing 81 has in `F_9`.
pub const REFERENCE_ERRATA: &[(u64, u64, char, u64)] = &[(27, 3, 'T', 2)];

pub fn is_erratum(level: u64, p: u64, row: &PolynomialRow) -> bool {
    REFERENCE_ERRATA.contains(&(level, p, row.0, row.1))
}

/// Odd torsion in degree 5 for `GL(4)` and `N <= 31`: `(N, p, dimension)`.
pub const REFERENCE_TORSION: &[(u64, u64, usize)] = &[
    (11, 5, 1),
    (19, 3, 1),
    (19, 5, 1),
    (22, 5, 3),
    (23, 11, 1),
    (25, 5, 2),
    (27, 3, 2),
    (29, 5, 1),
    (29, 7, 1),
    (30, 5, 1),
    (31, 5, 1),
];

impl ReferenceBlock {
    /// The representation matched to this block.
    pub fn representation(&self) -> Result<GaloisRep, GaloisError> {
        let f = FiniteField::prime(self.p)?;
        if !self.beta_twist {
            return GaloisRep::eisenstein(4, self.p, &f);
        }
        // β: the even quadratic character of conductor 5, with β(2) = -1.
        let beta = DirichletCharacter::legendre(5, &f);
        let one = DirichletCharacter::trivial(1, &f);
        GaloisRep::new(self.p, &f, vec![(beta.clone(), 0), (one.clone(), 1), (one, 2), (beta, 3)])
    }

    /// The eigenvalues implied by the rows with `ℓ ≠ p`, where the
    /// polynomial determines `a(ℓ, k)` uniquely.
    pub fn package(&self) -> Result<EigenPackage, GaloisError> {
        let f = FiniteField::prime(self.p)?;
        let mut pkg = EigenPackage::new(self.level, self.p, 4, &f);
        for row in self.rows.iter().filter(|r| r.1 != self.p) {
            pkg.set_from_polynomial(row.1, &Poly::from_ints(&f, row.2))?;
        }
        Ok(pkg)
    }

    pub fn row_polynomial(&self, row: &PolynomialRow) -> Result<Poly, GaloisError> {
        let f = FiniteField::prime(self.p)?;
        Ok(Poly::from_ints(&f, row.2))
    }
}

/// Balanced textual form `1 - 4X + 4X^2 + ...` of a polynomial over a
/// prime field.
pub fn format_polynomial(poly: &Poly, balanced: bool) -> String {
    let f = poly.field();
    let mut out = String::new();
    for (i, &c) in poly.coeffs().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let v: i64 = if balanced { f.to_balanced(c).unwrap_or(c as i64) } else { c as i64 };
        let (sign, mag) = if v < 0 { ("-", -v) } else { ("+", v) };
        let mono = match i {
            0 => mag.to_string(),
            1 if mag == 1 => "X".to_string(),
            1 => format!("{mag}X"),
            _ if mag == 1 => format!("X^{i}"),
            _ => format!("{mag}X^{i}"),
        };
        if out.is_empty() {
            out = if sign == "-" { format!("-{mono}") } else { mono };
        } else {
            out.push_str(&format!(" {sign} {mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Arc<FiniteField> {
        FiniteField::prime(p).unwrap()
    }

    #[test]
    fn character_counts_and_conductors() {
        let f5 = f(5);
        // (Z/150)^× ≅ Z/2 × Z/20; values of order dividing 4.
        let all = DirichletCharacter::all(150, &f5);
        assert_eq!(all.len(), 2 * 4);
        let beta = DirichletCharacter::legendre(5, &f5);
        assert_eq!(beta.value(2), Some(4));
        assert!(beta.is_even());
        assert!(beta.mul(&beta).unwrap().is_trivial());
        assert!(all.iter().any(|c| c.primitive() == beta));
        let conds: Vec<u64> = all.iter().map(|c| c.conductor()).collect();
        assert!(conds.contains(&1) && conds.contains(&3) && !conds.contains(&25));
        // Mod 8: two generators of order 2.
        assert_eq!(DirichletCharacter::all(8, &f(3)).len(), 4);
    }

    #[test]
    fn charpoly_examples() {
        let f11 = f(11);
        let rep = GaloisRep::eisenstein(4, 11, &f11).unwrap();
        assert_eq!(rep.frobenius_charpoly(2).unwrap(), Poly::from_ints(&f11, &[1, -4, 4, 1, -2]));
        let f7 = f(7);
        let two = GaloisRep::new(7, &f7, vec![(DirichletCharacter::trivial(1, &f7), 0); 2]).unwrap();
        for l in [2, 3, 5, 11] {
            assert_eq!(two.frobenius_charpoly(l).unwrap(), Poly::from_ints(&f7, &[1, -2, 1]));
        }
        let beta = REFERENCE_POLYNOMIALS.iter().find(|b| b.beta_twist).unwrap().representation().unwrap();
        assert_eq!(beta.frobenius_charpoly(11).unwrap(), Poly::from_ints(&f(5), &[1, 1, 1, 1, 1]));
        assert!(matches!(beta.frobenius_charpoly(5), Err(GaloisError::RamifiedPrime { ell: 5 })));
    }

    #[test]
    fn lhs_examples() {
        let f5 = f(5);
        let mut pkg = EigenPackage::new(11, 5, 4, &f5);
        for (k, a) in [1, 15, 35, 15, 1].iter().enumerate() {
            pkg.set(2, k, f5.from_int(*a));
        }
        assert_eq!(hecke_lhs_polynomial(&pkg, 2).unwrap(), Poly::from_ints(&f5, &[1, 0, 0, 0, -1]));
        for k in 1..=4 {
            pkg.set(5, k, 0);
        }
        assert_eq!(hecke_lhs_polynomial(&pkg, 5).unwrap(), Poly::from_ints(&f5, &[1]));
        let mut one = EigenPackage::new(1, 5, 1, &f5);
        one.set(3, 1, 1);
        assert_eq!(hecke_lhs_polynomial(&one, 3).unwrap(), Poly::from_ints(&f5, &[1, -1]));
        assert_eq!(hecke_lhs_polynomial(&one, 7), Err(GaloisError::MissingEntry(7, 1)));
    }

    #[test]
    fn reference_packages_match() {
        for block in REFERENCE_POLYNOMIALS {
            let pkg = block.package().unwrap();
            for row in block.rows.iter().filter(|r| r.1 != block.p) {
                assert_eq!(hecke_lhs_polynomial(&pkg, row.1).unwrap(), block.row_polynomial(row).unwrap());
            }
            let found = match_representation(&pkg, MatchSearch::default()).unwrap();
            let want = block.representation().unwrap();
            if block.rows.iter().any(|r| is_erratum(block.level, block.p, r)) {
                assert!(found.is_empty());
                continue;
            }
            assert!(found.iter().any(|r| r.equivalent(&want)), "N={} p={}: {:?}", block.level, block.p, found.iter().map(|r| r.to_string()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn formatting() {
        let f11 = f(11);
        let p = Poly::from_ints(&f11, &[1, -4, 4, 1, -2]);
        assert_eq!(format_polynomial(&p, true), "1 - 4X + 4X^2 + X^3 - 2X^4");
        assert_eq!(format_polynomial(&p, false), "1 + 7X + 4X^2 + X^3 + 9X^4");
        let f5 = f(5);
        let rep = GaloisRep::eisenstein(4, 5, &f5).unwrap();
        assert_eq!(rep.to_string(), "1⊕ε⊕ε²⊕ε³");
    }

    fn small_primes(bound: u64) -> impl Iterator<Item = u64> {
        (2..=bound).filter(|&l| crate::exactlinalg::is_prime(l))
    }

    #[test]
    fn matches_survive_more_primes() {
        for block in REFERENCE_POLYNOMIALS.iter().filter(|b| !b.rows.iter().any(|r| is_erratum(b.level, b.p, r))) {
            let want = block.representation().unwrap();
            let mut pkg = block.package().unwrap();
            let before = match_representation(&pkg, MatchSearch::default()).unwrap();
            for l in small_primes(29).filter(|l| (block.level * block.p) % l != 0) {
                pkg.set_from_polynomial(l, &want.frobenius_charpoly(l).unwrap()).unwrap();
            }
            let after = match_representation(&pkg, MatchSearch::default()).unwrap();
            assert!(after.iter().any(|r| r.equivalent(&want)));
            assert!(after.iter().all(|r| before.iter().any(|b| b.equivalent(r))));
            for l in pkg.good_primes() {
                let poly = want.frobenius_charpoly(l).unwrap();
                assert_ne!(poly.coeff(0), 0);
                assert_eq!(hecke_lhs_polynomial(&pkg, l).unwrap(), poly);
            }
        }
    }

    #[test]
    fn random_packages_do_not_match() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for i in 0..20 {
            let block = &REFERENCE_POLYNOMIALS[i % REFERENCE_POLYNOMIALS.len()];
            let f = FiniteField::prime(block.p).unwrap();
            let mut pkg = EigenPackage::new(block.level, block.p, 4, &f);
            for l in small_primes(29).filter(|l| (block.level * block.p) % l != 0) {
                for k in 1..=4 {
                    pkg.set(l, k, rng.gen_range(0..block.p));
                }
            }
            assert!(match_representation(&pkg, MatchSearch::default()).unwrap().is_empty());
        }
    }

    #[test]
    fn beta_is_quadratic() {
        let rep = REFERENCE_POLYNOMIALS.iter().find(|b| b.beta_twist).unwrap().representation().unwrap();
        for (chi, _) in rep.summands().iter().filter(|(c, _)| !c.is_trivial()) {
            assert!(chi.pow(2).is_trivial());
            assert_eq!(chi.conductor(), 5);
            assert_eq!(chi.value(2), Some(4));
        }
    }
}
