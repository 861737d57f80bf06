//! `Γ₀(N)` coset labels, orbit decomposition of retract cells and the
//! coinvariant chain complex with trivial coefficients.
//!
//! `Γ₀(N)` is the subgroup of `SL(m, Z)` whose first row is `(*, 0, ..., 0)`
//! modulo `N`. Matrices act on row vectors from the right, so `Γ₀(N)` is the
//! stabilizer of the line through `e_1` in `(Z/N)^m` and the right cosets
//! `Γ₀(N) g` are labeled by the first row of `g` up to a unit.
//!
//! A cell `σ h` (`σ` a table representative, `h ∈ GL(m, Z)`) lies in the
//! `Γ₀(N)`-orbit labeled by `(first row of h⁻¹, det h)`. Changing `h` to `s h`
//! for `s` in the stabilizer of `σ` moves the label to `(x s⁻¹, ε det s)` and
//! multiplies the orientation by the sign of the permutation `s` induces on
//! the minimal vectors. Orbits where a label is fixed with both signs carry
//! only 2-torsion and are dropped ("killed").

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlinalg::{homology_summands_with_budget, IntMatrix, LinalgError};
use crate::lattice::{complete_to_unimodular, inv_mod, modn, SquareMatrix, Vector};
use crate::retract::{identify_cell, CellId, CellTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("level must be positive")]
    BadLevel,
    #[error("cohomological degree {degree} is outside the computable window for m = {m}")]
    UnsupportedDegree { m: usize, degree: usize },
    #[error("cell table lacks retract dimension {0}")]
    MissingCellTable(usize),
    #[error("boundary maps in sharbly degrees {t} and {} compose to a nonzero matrix ({nnz} entries)", t - 1)]
    CompositionNonzero { t: usize, nnz: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Virtual cohomological dimension of `SL(m, Z)`.
pub fn vcd(m: usize) -> usize {
    m * (m - 1) / 2
}

/// Sharbly degree for cohomological degree `degree`.
pub fn sharbly_degree(m: usize, degree: usize) -> Option<usize> {
    vcd(m).checked_sub(degree)
}

/// Retract dimension of the cells spanning sharbly degree `t`.
pub fn retract_dim(m: usize, t: usize) -> Option<usize> {
    (m * (m + 1) / 2).checked_sub(m + t)
}

/// A point of `P^{m-1}(Z/N)`: a vector primitive modulo `N`, up to units.
///
/// Canonical form: the first coordinate that is a unit is scaled to 1; if no
/// coordinate is a unit, the lexicographically least unit multiple is used.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CosetLabel {
    pub level: u64,
    pub coords: Vec<u64>,
}

fn units(n: i64) -> Vec<i64> {
    (0..n.max(1)).filter(|&a| a.gcd(&n) == 1).collect()
}

fn is_primitive_mod(x: &[i64], n: i64) -> bool {
    x.iter().fold(n, |g, &c| g.gcd(&c)) == 1
}

fn canonical_mod(x: &mut [i64], n: i64, units: &[i64]) {
    for c in x.iter_mut() {
        *c = modn(*c, n);
    }
    if let Some(u) = x.iter().find_map(|&c| inv_mod(c, n).filter(|_| c.gcd(&n) == 1)) {
        x.iter_mut().for_each(|c| *c = modn(*c * u, n));
        return;
    }
    let mut best = x.to_vec();
    for &u in units {
        let cand: Vec<i64> = x.iter().map(|&c| modn(c * u, n)).collect();
        if cand < best {
            best = cand;
        }
    }
    x.copy_from_slice(&best);
}

impl CosetLabel {
    /// Canonical label of a vector, or `None` if it is not primitive mod `N`.
    pub fn new(coords: &[i64], level: u64) -> Option<CosetLabel> {
        let n = level as i64;
        if n < 1 || !is_primitive_mod(coords, n) {
            return None;
        }
        let mut x = coords.to_vec();
        canonical_mod(&mut x, n, &units(n));
        Some(CosetLabel { level, coords: x.into_iter().map(|c| c as u64).collect() })
    }

    pub fn as_vector(&self) -> Vector {
        self.coords.iter().map(|&c| c as i64).collect()
    }

    /// The label of `x g` for `g` invertible modulo `N`.
    pub fn act(&self, g: &SquareMatrix) -> CosetLabel {
        let x = g.act(&self.as_vector());
        CosetLabel::new(&x, self.level).expect("invertible matrices preserve primitivity")
    }

    /// A primitive integral vector reducing to this label.
    pub fn lift(&self) -> Vector {
        lift_primitive(&self.as_vector(), self.level as i64)
    }

    /// A matrix of determinant `det` whose first row lifts the label; `g⁻¹`
    /// then labels the cell `σ g⁻¹`.
    pub fn lift_matrix(&self, det: i8) -> SquareMatrix {
        let mut g = complete_to_unimodular(&self.lift()).expect("lift is primitive");
        if det < 0 {
            let last = g.size() - 1;
            g.negate_row(last);
        }
        g
    }
}

impl std::fmt::Display for CosetLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(":"))
    }
}

/// Lift a vector primitive modulo `n` to a primitive integral vector with
/// the same reduction.
fn lift_primitive(x: &[i64], n: i64) -> Vector {
    let mut v: Vector = x.iter().map(|&c| modn(c, n)).collect();
    let m = v.len();
    if n == 1 {
        v.iter_mut().for_each(|c| *c = 0);
        v[0] = 1;
        return v;
    }
    let rest = v[1..].iter().fold(0i64, |g, &c| g.gcd(&c));
    if rest == 0 {
        // Only the first coordinate is nonzero, and it is a unit mod n.
        if m > 1 {
            v[1] = n;
        }
        return v;
    }
    // gcd(x_1, n, rest) = 1, so some x_1 + t n is prime to rest.
    let mut t = 0;
    while (v[0] + t * n).gcd(&rest) != 1 {
        t += 1;
    }
    v[0] += t * n;
    v
}

/// Label of the coset `Γ₀(N) g`: the first row of `g` modulo `N` up to units.
pub fn coset_label(g: &SquareMatrix, level: u64) -> CosetLabel {
    CosetLabel::new(g.row(0), level).expect("rows of invertible matrices are primitive")
}

/// All of `P^{m-1}(Z/N)` in sorted order.
pub fn projective_labels(m: usize, level: u64) -> Vec<CosetLabel> {
    let n = level as i64;
    let us = units(n);
    let mut out = vec![];
    let total = (n as usize).pow(m as u32);
    let mut x = vec![0i64; m];
    for code in 0..total {
        let mut c = code;
        for slot in x.iter_mut().rev() {
            *slot = (c % n as usize) as i64;
            c /= n as usize;
        }
        if !is_primitive_mod(&x, n) {
            continue;
        }
        let mut y = x.clone();
        canonical_mod(&mut y, n, &us);
        if y == x {
            out.push(CosetLabel { level, coords: x.iter().map(|&c| c as u64).collect() });
        }
    }
    out
}

/// `|P^{m-1}(Z/N)|`, the index of `Γ₀(N)` in `SL(m, Z)`.
pub fn label_count(m: usize, level: u64) -> u64 {
    let mut n = level;
    let mut count = 1u64;
    let mut p = 2;
    while n > 1 {
        if n % p == 0 {
            let mut pk = 1;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            // p^{k(m-1)} (p^m - 1) / (p^{m-1} (p - 1))
            let pm = p.pow(m as u32);
            count *= pk.pow(m as u32 - 1) / p.pow(m as u32 - 1) * (pm - 1) / (p - 1);
        }
        p += 1;
    }
    count
}

/// Whether `SL(4, Z)`-level `N` admits 5-torsion in `Γ₀(N)`: `25 ∤ N` and
/// `q ≡ 1 (mod 5)` for every prime `q ≠ 5` dividing `N`.
pub fn five_torsion_exists(level: u64) -> bool {
    if level % 25 == 0 {
        return false;
    }
    prime_factors(level).into_iter().all(|q| q == 5 || q % 5 == 1)
}

/// Primes that can occur as orders of torsion elements of `Γ₀(N) ⊂ SL(4, Z)`.
pub fn torsion_primes(level: u64) -> Vec<u64> {
    let mut out = vec![2, 3];
    if five_torsion_exists(level) {
        out.push(5);
    }
    out
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Exhaustive search for `v` primitive in `(Z/N)^4` and a unit `λ` with
/// `v Z ≡ λ v`, where `Z` is the companion matrix of `1 + x + x² + x³ + x⁴`.
/// `Γ₀(N)` contains an element of order 5 exactly when such a pair exists.
pub fn order5_brute_check(level: u64) -> bool {
    let n = level as i64;
    // v Z = (-d, a - d, b - d, c - d) for v = (a, b, c, d); the first
    // coordinate forces d = -λ a, the other three are checked.
    for lambda in units(n) {
        for a in 0..n {
            let d = modn(-lambda * a, n);
            for b in 0..n {
                if modn(a - d - lambda * b, n) != 0 {
                    continue;
                }
                for c in 0..n {
                    if modn(b - d - lambda * c, n) != 0 || modn(c - d - lambda * d, n) != 0 {
                        continue;
                    }
                    if is_primitive_mod(&[a, b, c, d], n) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// A `Γ₀(N)`-orbit of cells over one table orbit: the label of its canonical
/// member (with the determinant of `h`) and whether it is killed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeveledCell {
    pub base: CellId,
    pub label: CosetLabel,
    pub det: i8,
    pub killed: bool,
}

/// Dense indexing of `P^{m-1}(Z/N) × {±1}`.
struct LabelSpace {
    level: u64,
    labels: Vec<CosetLabel>,
    index: HashMap<Vec<u64>, u32>,
}

impl LabelSpace {
    fn new(m: usize, level: u64) -> Self {
        let labels = projective_labels(m, level);
        let index = labels.iter().enumerate().map(|(i, l)| (l.coords.clone(), i as u32)).collect();
        LabelSpace { level, labels, index }
    }

    fn len(&self) -> usize {
        2 * self.labels.len()
    }

    /// Slot of `(label, det)`.
    fn slot(&self, label: &CosetLabel, det: i8) -> usize {
        let i = self.index[&label.coords] as usize;
        2 * i + usize::from(det < 0)
    }

    fn decode(&self, slot: usize) -> (&CosetLabel, i8) {
        (&self.labels[slot / 2], if slot % 2 == 0 { 1 } else { -1 })
    }
}

/// Per table orbit: for every label slot, the basis index of its orbit (or
/// `None` if killed) and the orientation sign relative to the canonical
/// member.
struct OrbitMap {
    slots: Vec<(Option<u32>, i8)>,
}

/// The coinvariant complex of `Γ₀(N)` on the retract cells of a table.
pub struct LevelComplex {
    pub m: usize,
    pub level: u64,
    table: CellTable,
    labels: LabelSpace,
    orbit_maps: HashMap<CellId, OrbitMap>,
    /// Every `Γ₀(N)`-orbit, killed or not, by retract dimension.
    pub orbits: BTreeMap<usize, Vec<LeveledCell>>,
    /// Surviving orbits by retract dimension; these index the chain groups.
    pub bases: BTreeMap<usize, Vec<LeveledCell>>,
    /// `∂_t : C_t → C_{t-1}` by sharbly degree `t`, as matrices acting on
    /// column vectors.
    pub boundaries: BTreeMap<usize, IntMatrix>,
}

impl LevelComplex {
    pub fn table(&self) -> &CellTable {
        &self.table
    }

    /// Dimension of the chain group in sharbly degree `t`.
    pub fn rank_in_degree(&self, t: usize) -> Option<usize> {
        let d = retract_dim(self.m, t)?;
        self.bases.get(&d).map(Vec::len)
    }

    /// Coinvariant class of the cell `rep(id) · g`: its basis index in
    /// dimension `id.dim` and sign, or `None` for a killed orbit.
    pub fn class_of(&self, id: CellId, g: &SquareMatrix) -> Option<(usize, i8)> {
        let label = coset_label(&inverse_integral(g), self.labels.level);
        let det = if g.det() > 0 { 1 } else { -1 };
        let (idx, sign) = self.orbit_maps[&id].slots[self.labels.slot(&label, det)];
        idx.map(|i| (i as usize, sign))
    }

    /// Coinvariant class of an arbitrary symbol whose vectors form a retract
    /// cell. Returns `Ok(None)` for a killed orbit and `Err(())` if the
    /// vectors are not a cell of the table.
    pub fn locate(&self, vectors: &[Vector]) -> Result<Option<(usize, usize, i8)>, ()> {
        let (id, g, sign) = identify_cell(vectors, &self.table).ok_or(())?;
        Ok(self.class_of(id, &g).map(|(i, s)| (id.dim, i, s * sign)))
    }

    /// A concrete cell (its ordered vectors) representing a basis element.
    pub fn representative(&self, dim: usize, index: usize) -> Vec<Vector> {
        let cell = &self.bases[&dim][index];
        let rep = &self.table.cell(cell.base).min_vectors;
        let h = cell.label.lift_matrix(cell.det);
        let h = inverse_integral(&h);
        rep.iter().map(|v| h.act(v)).collect()
    }
}

fn inverse_integral(g: &SquareMatrix) -> SquareMatrix {
    g.inverse_unimodular().expect("unimodular transporter")
}

/// Build the coinvariant complex on every dimension of `table`.
pub fn assemble_complex(table: &CellTable, level: u64) -> Result<LevelComplex, CongruenceError> {
    if level == 0 {
        return Err(CongruenceError::BadLevel);
    }
    let m = table.m;
    let labels = LabelSpace::new(m, level);
    let mut orbit_maps = HashMap::new();
    let mut orbits: BTreeMap<usize, Vec<LeveledCell>> = BTreeMap::new();
    let mut bases: BTreeMap<usize, Vec<LeveledCell>> = BTreeMap::new();
    for cell in &table.cells {
        // Label action of s is x -> x s⁻¹, det -> det · det s.
        let acts: Vec<(SquareMatrix, i8, i8)> = cell
            .stabilizer
            .iter()
            .zip(&cell.orientation)
            .map(|(s, &chi)| (inverse_integral(s), if s.det() > 0 { 1 } else { -1 }, chi))
            .collect();
        let mut slots: Vec<(Option<u32>, i8)> = vec![(None, 0); labels.len()];
        let mut done = vec![false; labels.len()];
        let all = orbits.entry(cell.id.dim).or_default();
        let alive = bases.entry(cell.id.dim).or_default();
        for start in 0..labels.len() {
            if done[start] {
                continue;
            }
            let (x, eps) = labels.decode(start);
            let mut members: Vec<(usize, i8)> = vec![];
            let mut killed = false;
            let mut seen: HashMap<usize, i8> = HashMap::new();
            for (sinv, det_s, chi) in &acts {
                let slot = labels.slot(&x.act(sinv), eps * det_s);
                match seen.get(&slot) {
                    Some(&prev) if prev != *chi => killed = true,
                    Some(_) => {}
                    None => {
                        seen.insert(slot, *chi);
                        members.push((slot, *chi));
                    }
                }
            }
            let index = if killed {
                None
            } else {
                alive.push(LeveledCell { base: cell.id, label: x.clone(), det: eps, killed });
                Some((alive.len() - 1) as u32)
            };
            all.push(LeveledCell { base: cell.id, label: x.clone(), det: eps, killed });
            for (slot, chi) in members {
                done[slot] = true;
                slots[slot] = (index, chi);
            }
        }
        orbit_maps.insert(cell.id, OrbitMap { slots });
    }
    let mut complex = LevelComplex {
        m,
        level,
        table: table.clone(),
        labels,
        orbit_maps,
        orbits,
        bases,
        boundaries: BTreeMap::new(),
    };
    for &d in &table.dims {
        if !table.dims.contains(&(d + 1)) {
            continue;
        }
        let t = m * (m + 1) / 2 - m - d;
        let rows = complex.bases[&(d + 1)].len();
        let cols = complex.bases[&d].len();
        let mut mat = IntMatrix::zero(rows, cols);
        for (col, lc) in complex.bases[&d].iter().enumerate() {
            let cell = table.cell(lc.base);
            // The basis element is the cell rep · h with h⁻¹ lifting the label.
            let h = inverse_integral(&lc.label.lift_matrix(lc.det));
            for (j, face) in cell.faces.iter().enumerate() {
                let Some((fid, g, sign)) = &face.target else { continue };
                let Some((row, chi)) = complex.class_of(*fid, &g.mul(&h)) else { continue };
                let alt = if j % 2 == 0 { 1 } else { -1 };
                mat.add_to(row, col, &BigInt::from(alt * sign * chi));
            }
        }
        complex.boundaries.insert(t, mat);
    }
    for (&t, d) in &complex.boundaries {
        if t == 0 {
            continue;
        }
        if let Some(d_next) = complex.boundaries.get(&(t - 1)) {
            let comp = d_next.mul(d)?;
            if !comp.is_zero() {
                return Err(CongruenceError::CompositionNonzero { t, nnz: comp.nnz() });
            }
        }
    }
    Ok(complex)
}

/// Odd torsion and free rank of the homology in one cohomological degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionReport {
    pub m: usize,
    pub level: u64,
    pub degree: usize,
    pub sharbly_degree: usize,
    pub free_rank: usize,
    /// `(p, dim_{F_p} of the p-torsion)` for odd primes `p` that occur.
    pub torsion: Vec<(u64, usize)>,
    /// Elementary divisors above 1, as decimal strings.
    pub divisors: Vec<String>,
    /// 2-primary information is not trustworthy: killed orbits carry
    /// 2-torsion that the complex drops.
    pub reliable_at_2: bool,
}

impl TorsionReport {
    pub fn torsion_dim(&self, p: u64) -> usize {
        self.torsion.iter().find(|(q, _)| *q == p).map_or(0, |&(_, d)| d)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,prime,dimension\n");
        for (p, d) in &self.torsion {
            writeln!(s, "{},{},{}", self.level, p, d).unwrap();
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Free rank and odd torsion of `H_t` for `t` the sharbly degree of the
/// cohomological degree `degree`.
pub fn torsion_classes(
    complex: &LevelComplex,
    degree: usize,
    max_ops: Option<u64>,
) -> Result<TorsionReport, CongruenceError> {
    let m = complex.m;
    let bad = CongruenceError::UnsupportedDegree { m, degree };
    let t = sharbly_degree(m, degree).ok_or(bad.clone())?;
    let d = retract_dim(m, t).ok_or(bad.clone())?;
    let n = complex.bases.get(&d).ok_or(CongruenceError::MissingCellTable(d))?.len();
    let d_in = match retract_dim(m, t + 1) {
        Some(dn) if complex.table.dims.contains(&dn) => complex.boundaries[&(t + 1)].clone(),
        Some(dn) => return Err(CongruenceError::MissingCellTable(dn)),
        None => IntMatrix::zero(n, 0),
    };
    let d_out = if t == 0 {
        IntMatrix::zero(0, n)
    } else {
        complex
            .boundaries
            .get(&t)
            .cloned()
            .ok_or(CongruenceError::MissingCellTable(d + 1))?
    };
    let (free_rank, divisors) = homology_summands_with_budget(&d_in, &d_out, max_ops)?;
    let mut primes: BTreeMap<u64, usize> = BTreeMap::new();
    for q in divisors.iter() {
        for p in small_prime_factors(q) {
            if p != 2 {
                *primes.entry(p).or_default() += 1;
            }
        }
    }
    Ok(TorsionReport {
        m,
        level: complex.level,
        degree,
        sharbly_degree: t,
        free_rank,
        torsion: primes.into_iter().collect(),
        divisors: divisors.iter().map(|q| q.to_string()).collect(),
        reliable_at_2: false,
    })
}

/// Prime factors of a divisor; trial division is fine for the sizes met in
/// practice, and anything left over is reported as is if it fits in `u64`.
fn small_prime_factors(q: &BigInt) -> Vec<u64> {
    let mut n = q.abs();
    let mut out = vec![];
    let mut p = 2u64;
    while BigInt::from(p) * BigInt::from(p) <= n && p < 1_000_000 {
        let bp = BigInt::from(p);
        if n.is_multiple_of(&bp) {
            out.push(p);
            while n.is_multiple_of(&bp) {
                n /= &bp;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        if let Some(r) = n.to_u64() {
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retract::retract_cells;

    #[test]
    fn label_examples() {
        let id = SquareMatrix::identity(4);
        assert_eq!(coset_label(&id, 7).coords, vec![1, 0, 0, 0]);
        let l = CosetLabel::new(&[2, 3, 0, 0], 5).unwrap();
        assert_eq!(l.coords, vec![1, 4, 0, 0]);
        assert_eq!(projective_labels(2, 11).len(), 12);
        assert!(CosetLabel::new(&[2, 4], 6).is_none());
    }

    #[test]
    fn label_count_formula() {
        for m in 2..=4 {
            for n in 1..=12u64 {
                if m == 4 && n > 8 {
                    continue;
                }
                assert_eq!(projective_labels(m, n).len() as u64, label_count(m, n), "m={m} N={n}");
            }
        }
    }

    #[test]
    fn lifts_are_primitive() {
        for n in [1u64, 4, 6, 12, 25] {
            for l in projective_labels(3, n) {
                let v = l.lift();
                assert_eq!(CosetLabel::new(&v, n).unwrap(), l);
                assert_eq!(v.iter().fold(0i64, |g, &c| g.gcd(&c)), 1);
            }
        }
    }

    #[test]
    fn five_torsion_examples() {
        for n in [5, 11, 31] {
            assert!(five_torsion_exists(n));
        }
        for n in [22, 25, 30] {
            assert!(!five_torsion_exists(n));
        }
        assert!(order5_brute_check(11));
        assert!(!order5_brute_check(30));
        assert!(order5_brute_check(5));
    }

    #[test]
    fn rank_two_level_one() {
        let t = retract_cells(2, &[0, 1]).unwrap();
        let c = assemble_complex(&t, 1).unwrap();
        assert_eq!(c.orbits[&1].len(), 1);
        assert!(c.orbits[&1][0].killed);
        assert_eq!(c.bases[&0].len(), 1);
    }

    #[test]
    fn rank_two_level_eleven() {
        let t = retract_cells(2, &[0, 1]).unwrap();
        let c = assemble_complex(&t, 11).unwrap();
        assert_eq!(c.bases[&1].len(), 6);
        assert_eq!(c.bases[&0].len(), 4);
        let r = torsion_classes(&c, 1, None).unwrap();
        assert_eq!(r.free_rank, 3);
        assert!(r.torsion.is_empty());
    }
}
