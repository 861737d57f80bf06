//! Perfect forms and the cells of the well-rounded retract for `m = 2, 3, 4`.
//!
//! A retract cell of dimension `d` is dual to a Voronoi cone spanned by the
//! rank-one forms `v v^T` of its `k` minimal vectors, with
//! `k + d = m(m+1)/2` in the dimensions handled here. Cells are stored by
//! their minimal vectors (canonical signs, sorted).

mod cells;
mod equiv;
mod shortvec;
mod voronoi;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{SquareMatrix, Vector};

pub use cells::{identify_cell, retract_cells, supported_dims};
pub use equiv::{configuration_key, stabilizer, transforms, vector_colors};
pub use shortvec::{is_positive_definite, minimal_vectors, short_vectors};
pub use voronoi::perfect_forms;

pub(crate) use cells::permutation_sign;
pub use cells::induced_permutation_sign;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RetractError {
    #[error("form is not symmetric")]
    NotSymmetric,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("rank {0} is not supported (2..=4)")]
    UnsupportedRank(usize),
    #[error("retract dimension {d} is not supported for m = {m}")]
    UnsupportedDimension { m: usize, d: usize },
    #[error("cell of dimension {dim} has {vectors} minimal vectors; only simplicial cells are handled")]
    NonSimplicialCell { dim: usize, vectors: usize },
    #[error("a spanning face of dimension {dim} is missing from the table")]
    MissingFace { dim: usize },
    #[error("cell table parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectForm {
    pub gram: SquareMatrix,
    pub min_value: i64,
    pub min_vectors: Vec<Vector>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    pub dim: usize,
    pub index: usize,
}

/// Face obtained by omitting one minimal vector. `target` is `None` when the
/// remaining vectors do not span, and otherwise `(orbit, g, sign)` with
/// `[face] = sign * [rep * g]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceRecord {
    pub omitted: usize,
    pub target: Option<(CellId, SquareMatrix, i8)>,
}

/// A `GL(m, Z)`-orbit of retract cells.
///
/// The stabilizer is stored in full (it is finite and small), with the
/// orientation character alongside: the sign of the permutation a stabilizer
/// element induces on the ordered minimal vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellOrbit {
    pub id: CellId,
    pub min_vectors: Vec<Vector>,
    pub stabilizer: Vec<SquareMatrix>,
    pub orientation: Vec<i8>,
    pub orientation_reversing: bool,
    /// Incidences with cells of dimension `dim + 1` (filled when that
    /// dimension is part of the table). These are the sharbly-boundary faces;
    /// the retract boundary is the transposed incidence.
    pub faces: Vec<FaceRecord>,
}

impl CellOrbit {
    pub fn dim(&self) -> usize {
        self.id.dim
    }

    /// A generating set of the stabilizer, picked greedily from the group.
    pub fn stabilizer_gens(&self) -> Vec<SquareMatrix> {
        let mut gens: Vec<SquareMatrix> = vec![];
        let mut closure: Vec<SquareMatrix> = vec![];
        for g in &self.stabilizer {
            if closure.contains(g) {
                continue;
            }
            gens.push(g.clone());
            closure = generate(&gens);
        }
        gens
    }
}

fn generate(gens: &[SquareMatrix]) -> Vec<SquareMatrix> {
    let n = gens[0].size();
    let mut out = vec![SquareMatrix::identity(n)];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let h = out[i].mul(g);
            if !out.contains(&h) {
                out.push(h);
            }
        }
        i += 1;
    }
    out
}

const CACHE_HEADER: &str = "# retract-cells v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellTable {
    pub m: usize,
    pub dims: Vec<usize>,
    pub cells: Vec<CellOrbit>,
}

fn fmt_vec(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn fmt_mat(g: &SquareMatrix) -> String {
    g.rows().map(fmt_vec).collect::<Vec<_>>().join(" ")
}

impl CellTable {
    pub fn cell(&self, id: CellId) -> &CellOrbit {
        self.cells
            .iter()
            .find(|c| c.id == id)
            .expect("cell id from this table")
    }

    pub fn in_dim(&self, d: usize) -> impl Iterator<Item = &CellOrbit> {
        self.cells.iter().filter(move |c| c.id.dim == d)
    }

    /// Deterministic text serialization.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", CACHE_HEADER).unwrap();
        writeln!(s, "m {}", self.m).unwrap();
        writeln!(s, "dims {}", self.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")).unwrap();
        writeln!(s, "cells {}", self.cells.len()).unwrap();
        for c in &self.cells {
            writeln!(s, "cell {} {} {}", c.id.dim, c.id.index, c.min_vectors.len()).unwrap();
            for v in &c.min_vectors {
                writeln!(s, "v {}", fmt_vec(v)).unwrap();
            }
            writeln!(s, "stab {}", c.stabilizer.len()).unwrap();
            for (g, o) in c.stabilizer.iter().zip(&c.orientation) {
                writeln!(s, "g {} {}", o, fmt_mat(g)).unwrap();
            }
            writeln!(s, "faces {}", c.faces.len()).unwrap();
            for f in &c.faces {
                match &f.target {
                    None => writeln!(s, "f {} zero", f.omitted).unwrap(),
                    Some((id, g, sign)) => writeln!(
                        s,
                        "f {} {} {} {} {}",
                        f.omitted,
                        id.dim,
                        id.index,
                        sign,
                        fmt_mat(g)
                    )
                    .unwrap(),
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<CellTable, RetractError> {
        let mut lines = text.lines().enumerate().peekable();
        let mut next = |want: &str| -> Result<(usize, Vec<String>), RetractError> {
            let (i, l) = lines.next().ok_or(RetractError::Parse { line: 0, msg: "unexpected end".into() })?;
            let toks: Vec<String> = l.split_whitespace().map(String::from).collect();
            if toks.first().map(String::as_str) != Some(want) {
                return Err(RetractError::Parse { line: i + 1, msg: format!("expected {}", want) });
            }
            Ok((i + 1, toks[1..].to_vec()))
        };
        let bad = |line: usize| RetractError::Parse { line, msg: "malformed record".into() };
        let ints = |line: usize, toks: &[String]| -> Result<Vec<i64>, RetractError> {
            toks.iter().map(|t| t.parse::<i64>().map_err(|_| bad(line))).collect()
        };
        if text.lines().next() != Some(CACHE_HEADER) {
            return Err(RetractError::Parse { line: 1, msg: "missing or unsupported header".into() });
        }
        next("#")?;
        let (l, t) = next("m")?;
        let m = ints(l, &t)?[0] as usize;
        let (l, t) = next("dims")?;
        let dims: Vec<usize> = ints(l, &t)?.into_iter().map(|d| d as usize).collect();
        let (l, t) = next("cells")?;
        let ncells = ints(l, &t)?[0] as usize;
        let mat = |line: usize, xs: &[i64]| -> Result<SquareMatrix, RetractError> {
            if xs.len() != m * m {
                return Err(bad(line));
            }
            Ok(SquareMatrix::from_rows(&xs.chunks(m).map(|c| c.to_vec()).collect::<Vec<_>>()))
        };
        let mut cells = vec![];
        for _ in 0..ncells {
            let (l, t) = next("cell")?;
            let h = ints(l, &t)?;
            let (dim, index, k) = (h[0] as usize, h[1] as usize, h[2] as usize);
            let mut min_vectors = vec![];
            for _ in 0..k {
                let (l, t) = next("v")?;
                min_vectors.push(ints(l, &t)?);
            }
            let (l, t) = next("stab")?;
            let ns = ints(l, &t)?[0] as usize;
            let (mut stabilizer, mut orientation) = (vec![], vec![]);
            for _ in 0..ns {
                let (l, t) = next("g")?;
                let xs = ints(l, &t)?;
                orientation.push(xs[0] as i8);
                stabilizer.push(mat(l, &xs[1..])?);
            }
            let (l, t) = next("faces")?;
            let nf = ints(l, &t)?[0] as usize;
            let mut faces = vec![];
            for _ in 0..nf {
                let (l, t) = next("f")?;
                if t.len() == 2 && t[1] == "zero" {
                    faces.push(FaceRecord { omitted: t[0].parse().map_err(|_| bad(l))?, target: None });
                } else {
                    let xs = ints(l, &t)?;
                    if xs.len() < 4 {
                        return Err(bad(l));
                    }
                    let id = CellId { dim: xs[1] as usize, index: xs[2] as usize };
                    faces.push(FaceRecord {
                        omitted: xs[0] as usize,
                        target: Some((id, mat(l, &xs[4..])?, xs[3] as i8)),
                    });
                }
            }
            let orientation_reversing = orientation.iter().any(|&o| o < 0);
            cells.push(CellOrbit {
                id: CellId { dim, index },
                min_vectors,
                stabilizer,
                orientation,
                orientation_reversing,
                faces,
            });
        }
        Ok(CellTable { m, dims, cells })
    }
}
