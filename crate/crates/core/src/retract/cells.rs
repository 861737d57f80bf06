//! Cells of the well-rounded retract as faces of perfect cones.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::lattice::{canonical_sign, rank, vector_cmp, SquareMatrix, Vector};

use super::equiv::{configuration_key, stabilizer, transforms};
use super::voronoi::{facets, perfect_forms, rank_one_coords};
use super::{CellId, CellOrbit, CellTable, FaceRecord, RetractError};

/// Retract dimensions this crate handles for each rank.
pub fn supported_dims(m: usize) -> Result<&'static [usize], RetractError> {
    match m {
        2 => Ok(&[0, 1]),
        3 => Ok(&[1, 2, 3]),
        4 => Ok(&[4, 5, 6]),
        _ => Err(RetractError::UnsupportedRank(m)),
    }
}

/// All faces of the cone spanned by the rank-one forms of `vs`, as sorted
/// index sets with their dimensions (including the full cone).
fn cone_faces(vs: &[Vector], m: usize) -> Vec<(Vec<usize>, usize)> {
    let facet_sets: Vec<BTreeSet<usize>> =
        facets(vs, m).into_iter().map(|(_, on)| on.into_iter().collect()).collect();
    let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
    all.insert((0..vs.len()).collect());
    let mut frontier: Vec<BTreeSet<usize>> = facet_sets.clone();
    for f in &facet_sets {
        all.insert(f.iter().copied().collect());
    }
    while let Some(face) = frontier.pop() {
        for g in &facet_sets {
            let inter: BTreeSet<usize> = face.intersection(g).copied().collect();
            let key: Vec<usize> = inter.iter().copied().collect();
            if !all.contains(&key) {
                all.insert(key);
                frontier.push(inter);
            }
        }
    }
    all.into_iter()
        .map(|s| {
            let rays: Vec<Vector> = s.iter().map(|&i| rank_one_coords(&vs[i])).collect();
            let d = rank(&rays);
            (s, d)
        })
        .collect()
}

/// Sign of the permutation `pi` with `vs[i] g = ± ws[pi(i)]`, if `g` maps
/// the configuration onto `ws` up to sign.
pub fn induced_permutation_sign(vs: &[Vector], g: &SquareMatrix, ws: &[Vector]) -> Option<i8> {
    let mut index: HashMap<Vector, usize> = HashMap::new();
    for (i, w) in ws.iter().enumerate() {
        let mut c = w.clone();
        canonical_sign(&mut c);
        index.insert(c, i);
    }
    let mut perm = Vec::with_capacity(vs.len());
    for v in vs {
        let mut img = g.act(v);
        canonical_sign(&mut img);
        perm.push(*index.get(&img)?);
    }
    Some(permutation_sign(&perm))
}

pub(crate) fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

fn canonical_set(vs: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = vs
        .iter()
        .map(|v| {
            let mut w = v.clone();
            canonical_sign(&mut w);
            w
        })
        .collect();
    out.sort_by(|a, b| vector_cmp(a, b));
    out
}

/// `GL(m, Z)`-orbit representatives of retract cells in the given dimensions,
/// with stabilizers, orientation characters and face incidences.
pub fn retract_cells(m: usize, dims: &[usize]) -> Result<CellTable, RetractError> {
    let allowed = supported_dims(m)?;
    let dims: BTreeSet<usize> = dims.iter().copied().collect();
    for &d in &dims {
        if !allowed.contains(&d) {
            return Err(RetractError::UnsupportedDimension { m, d });
        }
    }
    let big_n = m * (m + 1) / 2;
    let forms = perfect_forms(m)?;
    let mut by_dim: BTreeMap<usize, Vec<Vec<Vector>>> = BTreeMap::new();
    for form in &forms {
        for (subset, cone_dim) in cone_faces(&form.min_vectors, m) {
            if cone_dim > big_n {
                continue;
            }
            let d = big_n - cone_dim;
            if !dims.contains(&d) {
                continue;
            }
            let vs: Vec<Vector> = subset.iter().map(|&i| form.min_vectors[i].clone()).collect();
            if rank(&vs) < m {
                continue;
            }
            if vs.len() != cone_dim {
                return Err(RetractError::NonSimplicialCell { dim: d, vectors: vs.len() });
            }
            let vs = canonical_set(&vs);
            let list = by_dim.entry(d).or_default();
            let key = configuration_key(&vs, m);
            let known = list.iter().any(|w| {
                configuration_key(w, m) == key && !transforms(w, &vs, m, false).is_empty()
            });
            if !known {
                list.push(vs);
            }
        }
    }
    // Canonical order within each dimension.
    let mut cells = vec![];
    for &d in &dims {
        let mut list = by_dim.remove(&d).unwrap_or_default();
        list.sort_by(|a, b| {
            configuration_key(a, m)
                .cmp(&configuration_key(b, m))
                .then_with(|| {
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| vector_cmp(x, y))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
        });
        for (index, vs) in list.into_iter().enumerate() {
            let stab = stabilizer(&vs, m);
            let orientation: Vec<i8> = stab
                .iter()
                .map(|g| induced_permutation_sign(&vs, g, &vs).expect("stabilizer permutes vectors"))
                .collect();
            let orientation_reversing = orientation.iter().any(|&s| s < 0);
            cells.push(CellOrbit {
                id: CellId { dim: d, index },
                min_vectors: vs,
                stabilizer: stab,
                orientation,
                orientation_reversing,
                faces: vec![],
            });
        }
    }
    let mut table = CellTable { m, dims: dims.iter().copied().collect(), cells };
    // Faces: omit one vector; nonspanning faces are zero.
    let mut all_faces = vec![];
    for cell in &table.cells {
        let mut recs = vec![];
        if dims.contains(&(cell.id.dim + 1)) {
            for j in 0..cell.min_vectors.len() {
                let face: Vec<Vector> = cell
                    .min_vectors
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, v)| v.clone())
                    .collect();
                let target = if rank(&face) < m {
                    None
                } else {
                    Some(identify_cell(&face, &table).ok_or(RetractError::MissingFace {
                        dim: cell.id.dim + 1,
                    })?)
                };
                recs.push(FaceRecord { omitted: j, target });
            }
        }
        all_faces.push(recs);
    }
    for (cell, recs) in table.cells.iter_mut().zip(all_faces) {
        cell.faces = recs;
    }
    Ok(table)
}

/// Locate a configuration in the table: returns the orbit, a transporter `g`
/// and a sign with `[vectors] = sign * [rep * g]` as sharbly symbols, where
/// `rep * g` keeps the representative's vector order.
pub fn identify_cell(vectors: &[Vector], table: &CellTable) -> Option<(CellId, SquareMatrix, i8)> {
    let m = table.m;
    let k = vectors.len();
    let big_n = m * (m + 1) / 2;
    if k > big_n {
        return None;
    }
    let d = big_n - k;
    let ws = canonical_set(vectors);
    if ws.windows(2).any(|p| p[0] == p[1]) {
        return None;
    }
    let key = configuration_key(&ws, m);
    for cell in table.cells.iter().filter(|c| c.id.dim == d) {
        if configuration_key(&cell.min_vectors, m) != key {
            continue;
        }
        if let Some(g) = transforms(&cell.min_vectors, &ws, m, false).into_iter().next() {
            let sign = induced_permutation_sign(&cell.min_vectors, &g, vectors)?;
            return Some((cell.id, g, sign));
        }
    }
    None
}
