//! Coinvariant classes of arbitrary sharbly symbols.
//!
//! Symbols that are retract cells are located in the level complex. Other
//! symbols are sorted into `GL(m, Z)`-orbits found on the fly; within an
//! orbit the class is the stabilizer-minimal coset label, as for cells.

use std::collections::HashMap;

use crate::congruence::{coset_label, CosetLabel, LevelComplex};
use crate::lattice::{canonical_sign, SquareMatrix, Vector};
use crate::retract::{configuration_key, induced_permutation_sign, stabilizer, transforms};
use crate::sharbly::SharblySymbol;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassKey {
    /// Basis element `index` of the level complex in retract dimension `dim`.
    Cell { dim: usize, index: usize },
    /// A non-cell orbit with its canonical label.
    Other { orbit: usize, label: CosetLabel, det: i8 },
}

impl ClassKey {
    pub fn is_cell(&self) -> bool {
        matches!(self, ClassKey::Cell { .. })
    }
}

struct Orbit {
    vectors: Vec<Vector>,
    /// `(s, s⁻¹, det s, orientation character)` over the full stabilizer.
    stab: Vec<(SquareMatrix, SquareMatrix, i8, i8)>,
    /// Reducing-point candidates of the representative, best first
    /// (computed on demand).
    candidates: Option<Vec<Vector>>,
}

/// Position of a non-cell symbol relative to its orbit representative `R`:
/// `[symbol] = sign [R h]`, where `h` carries the canonical label.
pub(crate) struct Placement {
    pub orbit: usize,
    pub h: SquareMatrix,
    pub sign: i8,
    pub label: CosetLabel,
    pub det: i8,
    pub killed: bool,
}

pub struct Classifier<'a> {
    complex: &'a LevelComplex,
    orbits: Vec<Orbit>,
    buckets: HashMap<Vec<Vec<i128>>, Vec<usize>>,
    cache: HashMap<SharblySymbol, Option<(ClassKey, i8)>>,
    points: HashMap<(usize, CosetLabel, i8, u64), Vec<Vector>>,
}

impl<'a> Classifier<'a> {
    pub fn new(complex: &'a LevelComplex) -> Self {
        Classifier {
            complex,
            orbits: vec![],
            buckets: HashMap::new(),
            cache: HashMap::new(),
            points: HashMap::new(),
        }
    }

    pub fn complex(&self) -> &LevelComplex {
        self.complex
    }

    /// Number of non-cell orbits met so far.
    pub fn other_orbits(&self) -> usize {
        self.orbits.len()
    }

    /// Class and sign of a symbol, or `None` if its orbit is killed.
    pub fn classify(&mut self, s: &SharblySymbol) -> Option<(ClassKey, i8)> {
        if let Some(c) = self.cache.get(s) {
            return c.clone();
        }
        let out = self.classify_uncached(s.vectors());
        self.cache.insert(s.clone(), out.clone());
        out
    }

    fn classify_uncached(&mut self, vs: &[Vector]) -> Option<(ClassKey, i8)> {
        match self.complex.locate(vs) {
            Ok(Some((dim, index, sign))) => return Some((ClassKey::Cell { dim, index }, sign)),
            Ok(None) => return None,
            Err(()) => {}
        }
        let p = self.place(vs);
        (!p.killed).then(|| (ClassKey::Other { orbit: p.orbit, label: p.label, det: p.det }, p.sign))
    }

    pub(crate) fn place(&mut self, vs: &[Vector]) -> Placement {
        let m = self.complex.m;
        let key = configuration_key(vs, m);
        let bucket = self.buckets.entry(key).or_default();
        let mut found = None;
        for &o in bucket.iter() {
            if let Some(g) = transforms(&self.orbits[o].vectors, vs, m, false).into_iter().next() {
                found = Some((o, g));
                break;
            }
        }
        let (o, g) = match found {
            Some(x) => x,
            None => {
                let stab = stabilizer(vs, m)
                    .into_iter()
                    .map(|s| {
                        let chi = induced_permutation_sign(vs, &s, vs).expect("stabilizer permutes vectors");
                        let det = if s.det() > 0 { 1 } else { -1 };
                        let inv = s.inverse_unimodular().expect("unimodular");
                        (s, inv, det, chi)
                    })
                    .collect();
                self.orbits.push(Orbit { vectors: vs.to_vec(), stab, candidates: None });
                bucket.push(self.orbits.len() - 1);
                (self.orbits.len() - 1, SquareMatrix::identity(m))
            }
        };
        let orbit = &self.orbits[o];
        let sign = induced_permutation_sign(&orbit.vectors, &g, vs).expect("transform maps onto the symbol");
        let label = coset_label(&g.inverse_unimodular().expect("unimodular"), self.complex.level);
        let det: i8 = if g.det() > 0 { 1 } else { -1 };
        // Canonical member of the label orbit under the stabilizer; the
        // orbit is killed if some stabilizer element fixes the label and
        // reverses orientation.
        let mut best: Option<(CosetLabel, i8, i8, usize)> = None;
        let mut images: HashMap<(CosetLabel, i8), i8> = HashMap::new();
        let mut killed = false;
        for (i, (_, sinv, ds, chi)) in orbit.stab.iter().enumerate() {
            let img = (label.act(sinv), det * ds);
            if let Some(&prev) = images.get(&img) {
                killed |= prev != *chi;
                continue;
            }
            images.insert(img.clone(), *chi);
            if best.as_ref().map_or(true, |(l, d, _, _)| (&img.0, img.1) < (l, *d)) {
                best = Some((img.0, img.1, *chi, i));
            }
        }
        let (label, det, chi, i) = best.expect("stabilizer contains the identity");
        let h = orbit.stab[i].0.mul(&g);
        Placement { orbit: o, h, sign: sign * chi, label, det, killed }
    }

    /// Reducing points for the basis `face`, chosen equivariantly: the
    /// orbit `O h`, where `O` is the orbit of a reducing point of the
    /// orbit representative under the stabilizer elements fixing the
    /// canonical label, so `Γ₀(N)`-translates of the face get translated
    /// points. The first candidate whose orbit size is prime to `p` is used.
    pub fn reducing_orbit(&mut self, face: &[Vector], p: u64) -> Result<Vec<Vector>, String> {
        let pl = self.place(face);
        let key = (pl.orbit, pl.label.clone(), pl.det, p);
        if let Some(us) = self.points.get(&key) {
            return Ok(us.iter().map(|u| line(pl.h.act(u))).collect());
        }
        let orbit = &mut self.orbits[pl.orbit];
        if orbit.candidates.is_none() {
            orbit.candidates = Some(super::reducing_points(&orbit.vectors));
        }
        let fixing: Vec<&SquareMatrix> = orbit
            .stab
            .iter()
            .filter(|(_, sinv, ds, _)| pl.label.act(sinv) == pl.label && pl.det * ds == pl.det)
            .map(|(s, _, _, _)| s)
            .collect();
        let mut found = None;
        for u in orbit.candidates.as_ref().unwrap() {
            let mut o: Vec<Vector> = fixing.iter().map(|s| line(s.act(u))).collect();
            o.sort();
            o.dedup();
            if o.len() as u64 % p != 0 {
                found = Some(o);
                break;
            }
        }
        let us = found.ok_or_else(|| {
            format!("every reducing-point orbit of {:?} has size divisible by {p}", orbit.vectors)
        })?;
        let out = us.iter().map(|u| line(pl.h.act(u))).collect();
        self.points.insert(key, us);
        Ok(out)
    }
}

fn line(mut v: Vector) -> Vector {
    canonical_sign(&mut v);
    v
}
