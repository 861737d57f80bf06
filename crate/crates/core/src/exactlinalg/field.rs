//! Finite fields `F_q`, `q = p^e`, with elements packed into a `u64`.
//!
//! An element of `F_{p^e}` is a polynomial of degree `< e` over `F_p`
//! (modulo a fixed irreducible polynomial), stored as its base-`p` digit
//! expansion. The prime field embeds as the integers `0..p`.

use std::fmt;
use std::sync::Arc;

use super::LinalgError;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    e: u32,
    q: u64,
    /// Monic defining polynomial, low degree first, length `e + 1`.
    modulus: Vec<u64>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{} (mod {:?})", self.p, self.e, self.modulus)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut k: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while k > 0 {
        if k & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        k >>= 1;
    }
    r
}

// Dense polynomial helpers over the prime field, used only to find and
// check defining polynomials.
fn pf_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn pf_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = powmod(m[dm], p - 2, p);
    while r.len() > dm {
        let c = mulmod(*r.last().unwrap(), lead_inv, p);
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let t = mulmod(c, mi, p);
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    pf_trim(r)
}

fn pf_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + mulmod(x, y, p)) % p;
        }
    }
    pf_rem(&r, m, p)
}

fn pf_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (pf_trim(a.to_vec()), pf_trim(b.to_vec()));
    while !b.is_empty() {
        let r = pf_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^(p^k) mod m`.
fn pf_frob_x(m: &[u64], p: u64, k: u32) -> Vec<u64> {
    let mut x = pf_rem(&[0, 1], m, p);
    for _ in 0..k {
        // x <- x^p
        let mut r = vec![1u64];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                r = pf_mulmod(&r, &base, m, p);
            }
            base = pf_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        x = r;
    }
    x
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial over `F_p`.
pub(crate) fn is_irreducible_prime_field(m: &[u64], p: u64) -> bool {
    let n = (m.len() - 1) as u32;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let xm = pf_rem(&[0, 1], m, p);
    let sub_x = |mut f: Vec<u64>| {
        if f.len() < 2 {
            f.resize(2, 0);
        }
        f[1] = (f[1] + p - 1) % p;
        pf_trim(f)
    };
    if pf_frob_x(m, p, n) != xm {
        return false;
    }
    for r in prime_factors(n as u64) {
        let h = sub_x(pf_frob_x(m, p, n / r as u32));
        let g = pf_gcd(m, &h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

impl FiniteField {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Arc<Self>, LinalgError> {
        Self::new(p, 1)
    }

    /// `F_{p^e}` with the lexicographically first irreducible defining polynomial.
    pub fn new(p: u64, e: u32) -> Result<Arc<Self>, LinalgError> {
        if !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        if e == 0 {
            return Err(LinalgError::BadExtensionDegree(e));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q < (1u64 << 62))
            .ok_or(LinalgError::FieldTooLarge { p, e })?;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            let mut found = None;
            // Enumerate monic polynomials of degree e by their lower coefficients.
            for code in 0..q {
                let mut m: Vec<u64> = (0..e).map(|i| (code / p.pow(i)) % p).collect();
                if m[0] == 0 {
                    continue;
                }
                m.push(1);
                if is_irreducible_prime_field(&m, p) {
                    found = Some(m);
                    break;
                }
            }
            found.expect("irreducible polynomials exist in every degree")
        };
        Ok(Arc::new(FiniteField { p, e, q, modulus }))
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        1
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    /// Balanced representative of a prime-field element, e.g. `4 -> -1` in `F_5`.
    pub fn to_balanced(&self, x: u64) -> Option<i64> {
        if x >= self.p {
            return None;
        }
        let p = self.p as i64;
        let x = x as i64;
        Some(if x > p / 2 { x - p } else { x })
    }

    pub fn is_prime_subfield(&self, x: u64) -> bool {
        x < self.p
    }

    fn digits(&self, mut x: u64) -> [u64; 16] {
        let mut d = [0u64; 16];
        for slot in d.iter_mut().take(self.e as usize) {
            *slot = x % self.p;
            x /= self.p;
        }
        d
    }

    fn pack(&self, d: &[u64]) -> u64 {
        d.iter()
            .take(self.e as usize)
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut d = [0u64; 16];
        for i in 0..self.e as usize {
            d[i] = (da[i] + db[i]) % self.p;
        }
        self.pack(&d)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if self.e == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let da = self.digits(a);
        let mut d = [0u64; 16];
        for i in 0..self.e as usize {
            d[i] = (self.p - da[i]) % self.p;
        }
        self.pack(&d)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let p = self.p;
        if self.e == 1 {
            return mulmod(a, b, p);
        }
        let e = self.e as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = [0u64; 32];
        for i in 0..e {
            if da[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] = (prod[i + j] + mulmod(da[i], db[j], p)) % p;
            }
        }
        // Reduce by the monic modulus from the top down.
        for k in (e..2 * e - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..e {
                let t = mulmod(c, self.modulus[i], p);
                prod[k - e + i] = (prod[k - e + i] + p - t) % p;
            }
        }
        self.pack(&prod[..e])
    }

    pub fn pow(&self, mut a: u64, mut k: u64) -> u64 {
        let mut r = 1;
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            k >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        if self.e == 1 {
            return Some(powmod(a, self.p - 2, self.p));
        }
        Some(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Option<u64> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.p)
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let mut n = self.q - 1;
        for r in prime_factors(self.q - 1) {
            while n % r == 0 && self.pow(a, n / r) == 1 {
                n /= r;
            }
        }
        Some(n)
    }

    /// A generator of the multiplicative group.
    pub fn primitive_element(&self) -> u64 {
        (1..self.q)
            .find(|&a| self.mult_order(a) == Some(self.q - 1))
            .expect("finite field has a primitive element")
    }

    /// All elements whose multiplicative order divides `n`.
    pub fn roots_of_unity(&self, n: u64) -> Vec<u64> {
        let g = self.primitive_element();
        let d = num_integer::gcd(n, self.q - 1);
        let step = (self.q - 1) / d;
        let z = self.pow(g, step);
        let mut out = Vec::with_capacity(d as usize);
        let mut x = 1;
        for _ in 0..d {
            out.push(x);
            x = self.mul(x, z);
        }
        out.sort_unstable();
        out
    }

    /// Human-readable element: an integer for the prime subfield, otherwise the
    /// polynomial in the generator `a`.
    pub fn format(&self, x: u64) -> String {
        if x < self.p {
            return x.to_string();
        }
        let d = self.digits(x);
        let mut terms = vec![];
        for i in (0..self.e as usize).rev() {
            if d[i] == 0 {
                continue;
            }
            let t = match (i, d[i]) {
                (0, c) => c.to_string(),
                (1, 1) => "a".to_string(),
                (1, c) => format!("{}a", c),
                (k, 1) => format!("a^{}", k),
                (k, c) => format!("{}a^{}", c, k),
            };
            terms.push(t);
        }
        terms.join("+")
    }

    /// The embedding of `small` into `self` sending the generator of `small` to
    /// the first root (in element order) of its defining polynomial.
    pub fn embedding_from(&self, small: &FiniteField) -> Result<Vec<u64>, LinalgError> {
        if small.p != self.p || self.e % small.e != 0 {
            return Err(LinalgError::FieldMismatch);
        }
        if small.e == 1 {
            return Ok(vec![1]);
        }
        // Evaluate small's modulus at candidates from the subfield of order small.q.
        let eval = |x: u64| {
            small
                .modulus
                .iter()
                .rev()
                .fold(0u64, |acc, &c| self.add(self.mul(acc, x), c))
        };
        let root = (0..self.q)
            .find(|&x| eval(x) == 0)
            .ok_or(LinalgError::FieldMismatch)?;
        let mut powers = vec![1u64];
        for _ in 1..small.e {
            let last = *powers.last().unwrap();
            powers.push(self.mul(last, root));
        }
        Ok(powers)
    }

    /// Apply an embedding computed by [`Self::embedding_from`].
    pub fn embed(&self, small: &FiniteField, powers: &[u64], x: u64) -> u64 {
        let d = small.digits(x);
        let mut acc = 0;
        for (i, &pw) in powers.iter().enumerate() {
            if d[i] != 0 {
                acc = self.add(acc, self.mul(d[i], pw));
            }
        }
        acc
    }
}
