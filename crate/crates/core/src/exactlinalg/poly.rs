//! Univariate polynomials over a [`FiniteField`], with factorization.

use std::fmt;
use std::sync::Arc;

use super::field::FiniteField;

/// Coefficients low degree first; no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Arc<FiniteField>,
    coeffs: Vec<u64>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = self.field.format(c);
            let cs = if cs.contains('+') { format!("({})", cs) } else { cs };
            match (i, c) {
                (0, _) => write!(f, "{}", cs)?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{}*x", cs)?,
                (_, 1) => write!(f, "x^{}", i)?,
                _ => write!(f, "{}*x^{}", cs, i)?,
            }
        }
        Ok(())
    }
}

/// Small deterministic generator for Cantor–Zassenhaus splitting.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

impl Poly {
    pub fn new(field: &Arc<FiniteField>, mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// From integer coefficients (low degree first), reduced into the prime field.
    pub fn from_ints(field: &Arc<FiniteField>, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &Arc<FiniteField>) -> Self {
        Self::new(field, vec![])
    }

    pub fn constant(field: &Arc<FiniteField>, c: u64) -> Self {
        Self::new(field, vec![c])
    }

    pub fn x(field: &Arc<FiniteField>) -> Self {
        Self::new(field, vec![0, 1])
    }

    /// `x - a`.
    pub fn linear(field: &Arc<FiniteField>, a: u64) -> Self {
        Self::new(field, vec![field.neg(a), 1])
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect();
        Poly::new(f, c)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect();
        Poly::new(f, c)
    }

    pub fn scale(&self, s: u64) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.mul(c, s)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let f = &self.field;
        if self.is_zero() || o.is_zero() {
            return Poly::zero(f);
        }
        let mut r = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                r[i + j] = f.add(r[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, r)
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let f = &self.field;
        let dd = d.degree().expect("polynomial division by zero");
        let li = f.inv(d.lead()).unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(f), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = f.mul(r[k], li);
            if c == 0 {
                continue;
            }
            q[k - dd] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                r[k - dd + i] = f.sub(r[k - dd + i], f.mul(c, di));
            }
        }
        r.truncate(dd);
        (Poly::new(f, q), Poly::new(f, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lead()).unwrap())
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int((i as u64 % f.characteristic()) as i64)))
            .collect();
        Poly::new(f, c)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// `self^k mod m`.
    pub fn powmod(&self, mut k: u128, m: &Poly) -> Poly {
        let mut r = Poly::constant(&self.field, 1).rem(m);
        let mut b = self.rem(m);
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b).rem(m);
            }
            b = b.mul(&b).rem(m);
            k >>= 1;
        }
        r
    }

    /// Apply a ring map to every coefficient, e.g. an embedding into a larger field.
    pub fn map_coeffs(&self, target: &Arc<FiniteField>, g: impl Fn(u64) -> u64) -> Poly {
        Poly::new(target, self.coeffs.iter().map(|&c| g(c)).collect())
    }

    /// `p`-th root of a polynomial whose derivative vanishes.
    fn pth_root(&self) -> Poly {
        let f = &self.field;
        let p = f.characteristic() as usize;
        // Inverse Frobenius on F_q is x -> x^(q/p).
        let inv_frob = f.order() / f.characteristic();
        let c = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|&c| f.pow(c, inv_frob))
            .collect();
        Poly::new(f, c)
    }

    /// Square-free decomposition: pairs `(g, k)` with `self = lead * prod g^k`.
    pub fn squarefree(&self) -> Vec<(Poly, usize)> {
        let mut out = vec![];
        self.squarefree_into(1, &mut out);
        out.sort_by(|a, b| (a.1, &a.0.coeffs).cmp(&(b.1, &b.0.coeffs)));
        out
    }

    fn squarefree_into(&self, mult: usize, out: &mut Vec<(Poly, usize)>) {
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return;
        }
        let p = self.field.characteristic() as usize;
        let df = f.derivative();
        if df.is_zero() {
            f.pth_root().squarefree_into(mult * p, out);
            return;
        }
        let mut c = f.gcd(&df);
        let mut w = f.divrem(&c).0;
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c);
            let z = w.divrem(&y).0;
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i * mult));
            }
            i += 1;
            w = y;
            c = c.divrem(&w).0;
        }
        if c.degree().unwrap_or(0) > 0 {
            c.pth_root().squarefree_into(mult * p, out);
        }
    }

    /// Distinct-degree factorization of a monic square-free polynomial.
    fn distinct_degree(&self) -> Vec<(Poly, usize)> {
        let fld = &self.field;
        let q = fld.order() as u128;
        let mut out = vec![];
        let mut f = self.clone();
        let x = Poly::x(fld);
        let mut h = x.rem(&f);
        let mut d = 0;
        while f.degree().unwrap_or(0) >= 2 * (d + 1) {
            d += 1;
            h = h.powmod(q, &f);
            let g = f.gcd(&h.sub(&x));
            if !g.is_one() {
                f = f.divrem(&g).0;
                h = h.rem(&f);
                out.push((g, d));
            }
        }
        if let Some(deg) = f.degree() {
            if deg > 0 {
                out.push((f, deg));
            }
        }
        out
    }

    /// Equal-degree splitting into monic irreducible factors of degree `d`.
    fn equal_degree(&self, d: usize, rng: &mut SplitMix, out: &mut Vec<Poly>) {
        let n = self.degree().unwrap();
        if n == d {
            out.push(self.clone());
            return;
        }
        let fld = &self.field;
        let q = fld.order() as u128;
        loop {
            let r: Vec<u64> = (0..n).map(|_| rng.next() % fld.order()).collect();
            let a = Poly::new(fld, r);
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let g = if fld.characteristic() == 2 {
                // Trace map a + a^2 + ... + a^(2^(k-1)) with q^d = 2^k.
                let k = fld.degree() as usize * d;
                let mut t = a.rem(self);
                let mut s = t.clone();
                for _ in 1..k {
                    t = t.mul(&t).rem(self);
                    s = s.add(&t);
                }
                s
            } else {
                let e = (q.pow(d as u32) - 1) / 2;
                a.powmod(e, self).sub(&Poly::constant(fld, 1))
            };
            let g = self.gcd(&g);
            let gd = g.degree().unwrap_or(0);
            if gd > 0 && gd < n {
                g.equal_degree(d, rng, out);
                self.divrem(&g).0.equal_degree(d, rng, out);
                return;
            }
        }
    }

    /// Factor into monic irreducibles with multiplicity, sorted by degree then
    /// coefficients. The leading coefficient is dropped.
    pub fn factor(&self) -> Vec<(Poly, usize)> {
        let mut rng = SplitMix(0x5eed);
        let mut out = vec![];
        for (g, k) in self.squarefree() {
            for (h, d) in g.distinct_degree() {
                let mut parts = vec![];
                h.equal_degree(d, &mut rng, &mut parts);
                out.extend(parts.into_iter().map(|p| (p, k)));
            }
        }
        // Merge equal factors coming from different square-free layers.
        out.sort_by(|a, b| {
            (a.0.coeffs.len(), &a.0.coeffs).cmp(&(b.0.coeffs.len(), &b.0.coeffs))
        });
        let mut merged: Vec<(Poly, usize)> = vec![];
        for (p, k) in out {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += k,
                _ => merged.push((p, k)),
            }
        }
        merged
    }

    /// All roots in the coefficient field, with multiplicity, sorted.
    pub fn roots(&self) -> Vec<(u64, usize)> {
        let mut r: Vec<(u64, usize)> = self
            .factor()
            .into_iter()
            .filter(|(g, _)| g.degree() == Some(1))
            .map(|(g, k)| (self.field.neg(g.coeff(0)), k))
            .collect();
        r.sort_unstable();
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(fs: &[(Poly, usize)], field: &Arc<FiniteField>) -> Poly {
        let mut acc = Poly::constant(field, 1);
        for (g, k) in fs {
            for _ in 0..*k {
                acc = acc.mul(g);
            }
        }
        acc
    }

    #[test]
    fn factor_reassembles() {
        for p in [2u64, 3, 5, 7, 11] {
            let f = FiniteField::prime(p).unwrap();
            let mut seed = SplitMix(p);
            for _ in 0..40 {
                let deg = 1 + (seed.next() % 9) as usize;
                let mut c: Vec<u64> = (0..deg).map(|_| seed.next() % p).collect();
                c.push(1);
                let poly = Poly::new(&f, c);
                // Square a random factor in to exercise multiplicities.
                let poly = poly.mul(&Poly::linear(&f, seed.next() % p));
                let fs = poly.factor();
                assert_eq!(product(&fs, &f), poly, "p={} poly={}", p, poly);
                for (g, _) in &fs {
                    let m: Vec<u64> = g.coeffs().to_vec();
                    assert!(super::super::field::is_irreducible_prime_field(&m, p));
                }
            }
        }
    }

    #[test]
    fn factor_over_extension() {
        let f = FiniteField::new(3, 2).unwrap();
        // x^2 + 1 is irreducible over F_3 and splits over F_9.
        let g = Poly::from_ints(&f, &[1, 0, 1]);
        let roots = g.roots();
        assert_eq!(roots.len(), 2);
        for (r, _) in roots {
            assert_eq!(g.eval(r), 0);
        }
    }

    #[test]
    fn pth_power_input() {
        let f = FiniteField::prime(3).unwrap();
        // (x + 1)^3 * (x^2 + 1)^2
        let a = Poly::from_ints(&f, &[1, 1]);
        let b = Poly::from_ints(&f, &[1, 0, 1]);
        let poly = a.mul(&a).mul(&a).mul(&b).mul(&b);
        let fs = poly.factor();
        assert_eq!(fs, vec![(a, 3), (b, 2)]);
    }
}
