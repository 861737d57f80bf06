//! Batch jobs: cell tables, torsion reports, Hecke matrices, eigenpackages
//! and Galois matches, with an on-disk cache and tabular output.

mod cache;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::{
    assemble_complex, five_torsion_exists, order5_brute_check, retract_dim, sharbly_degree, torsion_classes,
    torsion_primes, vcd, CongruenceError, LevelComplex, TorsionReport,
};
use crate::exactlinalg::{is_prime, simultaneous_eigenpackages, FiniteField, FpMatrix, LinalgError};
use crate::galois::{
    hecke_lhs_polynomial, match_representation, EigenPackage, GaloisError, MatchSearch, SummandDescriptor,
    REFERENCE_POLYNOMIALS,
};
use crate::hecke::{
    double_coset_reps, hecke_matrix_with_steps, homology_space, Classifier, HeckeError, Reducer, SpaceKind,
};
use crate::retract::{retract_cells, supported_dims, CellTable, RetractError};

pub use cache::{Cache, CACHE_FORMAT};
pub use report::{
    render_compute, render_matches, render_predictions, render_reference_table2, render_table1, render_table2, Format,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("Hecke polynomial row {kind}{ell} at level {level} does not match its eigenvalues")]
    RowMismatch { level: u64, kind: String, ell: u64 },
    #[error(transparent)]
    Retract(#[from] RetractError),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Cohomological degree used when none is given: 5 for `m = 4`, the top
/// degree otherwise.
pub fn default_degree(m: usize) -> usize {
    if m == 4 {
        5
    } else {
        vcd(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobConfig {
    pub m: usize,
    pub levels: Vec<u64>,
    pub degree: usize,
    /// Primes `ℓ` for `T(ℓ, k)`, `k = 1..=m`.
    pub hecke_primes: Vec<u64>,
    /// Restrict Hecke work to these torsion primes; `None` means every odd
    /// prime found.
    pub torsion_primes: Option<Vec<u64>>,
    /// Reduction steps allowed per basis cycle.
    pub reduction_budget: usize,
    /// Row operations allowed per Smith normal form.
    pub snf_budget: Option<u64>,
    /// Largest extension degree for eigenvalues and character values.
    pub max_extension: usize,
    pub cache_dir: Option<PathBuf>,
    /// Print polynomial coefficients in `(-p/2, p/2]` rather than `[0, p)`.
    pub balanced: bool,
}

impl JobConfig {
    pub fn new(m: usize, levels: Vec<u64>) -> Self {
        JobConfig {
            m,
            levels,
            degree: default_degree(m),
            hecke_primes: vec![2, 3, 5, 7],
            torsion_primes: None,
            reduction_budget: 100_000,
            snf_budget: None,
            max_extension: 2,
            cache_dir: None,
            balanced: true,
        }
    }

    pub fn cache(&self) -> Cache {
        Cache::new(self.cache_dir.clone())
    }

    pub fn sharbly_degree(&self) -> usize {
        sharbly_degree(self.m, self.degree).expect("validated degree")
    }

    /// Retract dimensions needed for homology in the configured degree.
    pub fn retract_dims(&self) -> Vec<usize> {
        let t = self.sharbly_degree();
        let mut dims: Vec<usize> = [t.checked_sub(1), Some(t), Some(t + 1)]
            .into_iter()
            .flatten()
            .filter_map(|s| retract_dim(self.m, s))
            .collect();
        dims.sort_unstable();
        dims.dedup();
        dims
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |s: String| Err(PipelineError::Config(s));
        if !(2..=4).contains(&self.m) {
            return bad(format!("rank {} is outside 2..=4", self.m));
        }
        let Some(t) = sharbly_degree(self.m, self.degree) else {
            return bad(format!("degree {} exceeds the vcd {} of SL({})", self.degree, vcd(self.m), self.m));
        };
        let supported = supported_dims(self.m)?;
        let Some(d) = retract_dim(self.m, t) else {
            return bad(format!("degree {} has no retract cells for m = {}", self.degree, self.m));
        };
        if !supported.contains(&d) || retract_dim(self.m, t + 1).is_some_and(|e| !supported.contains(&e)) {
            return bad(format!("degree {} needs retract cells outside {:?} for m = {}", self.degree, supported, self.m));
        }
        if self.levels.is_empty() || self.levels.contains(&0) {
            return bad("levels must be positive and nonempty".into());
        }
        if let Some(&l) = self.hecke_primes.iter().find(|&&l| !is_prime(l)) {
            return bad(format!("Hecke prime {l} is not prime"));
        }
        if let Some(ps) = &self.torsion_primes {
            if ps.contains(&2) {
                return Err(HeckeError::PrimeTwo.into());
            }
            if let Some(&p) = ps.iter().find(|&&p| !is_prime(p)) {
                return bad(format!("torsion prime {p} is not prime"));
            }
        }
        if self.max_extension == 0 {
            return bad("extension bound must be at least 1".into());
        }
        Ok(())
    }
}

/// The cell table for rank `m` in the given retract dimensions.
pub fn cell_table(m: usize, dims: &[usize], cache: &Cache) -> Result<CellTable, PipelineError> {
    let inputs = format!("m={m} dims={dims:?}");
    if let Some(text) = cache.load("cells", &inputs) {
        match CellTable::from_text(&text) {
            Ok(t) => return Ok(t),
            Err(e) => log::warn!("discarding unreadable cell table cache: {e}"),
        }
    }
    let start = Instant::now();
    let table = retract_cells(m, dims)?;
    log::info!(
        "cell table m={m} dims={dims:?}: {} orbits in {:.1?}",
        table.cells.len(),
        start.elapsed()
    );
    cache.store("cells", &inputs, &table.to_text())?;
    Ok(table)
}

/// Odd torsion and free rank at one level, cached by `(m, N, degree)`.
pub fn torsion_report(cfg: &JobConfig, complex: &LevelComplex) -> Result<TorsionReport, PipelineError> {
    let inputs = format!("m={} N={} degree={}", cfg.m, complex.level, cfg.degree);
    cfg.cache().json("torsion", &inputs, || {
        let start = Instant::now();
        let r = torsion_classes(complex, cfg.degree, cfg.snf_budget)?;
        log::info!(
            "N={}: free rank {}, odd torsion {:?} in {:.1?}",
            complex.level,
            r.free_rank,
            r.torsion,
            start.elapsed()
        );
        Ok(r)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorReport {
    pub ell: u64,
    pub k: usize,
    pub u_type: bool,
    /// Rows of the matrix; column `j` is the image of basis cycle `j`.
    pub matrix: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryReport {
    pub ell: u64,
    pub k: usize,
    pub a: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowReport {
    /// `T` for `ℓ ∤ N`, `U` for `ℓ | N`.
    pub kind: String,
    pub ell: u64,
    /// Coefficients of the Hecke polynomial, constant term first, as field
    /// element encodings.
    pub coefficients: Vec<u64>,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageReport {
    pub level: u64,
    pub p: u64,
    pub m: usize,
    #[serde(rename = "class-id")]
    pub class_id: usize,
    pub multiplicity: usize,
    /// Eigenvalues live in `F_{p^e}` for this `e`.
    pub field_degree: u32,
    pub entries: Vec<EntryReport>,
    #[serde(default)]
    pub rows: Vec<RowReport>,
}

impl PackageReport {
    pub fn package(&self) -> Result<EigenPackage, PipelineError> {
        let f = FiniteField::new(self.p, self.field_degree)?;
        let mut pkg = EigenPackage::new(self.level, self.p, self.m, &f);
        for e in &self.entries {
            pkg.set(e.ell, e.k, e.a);
        }
        Ok(pkg)
    }

    /// Recomputes every row from the entries and compares.
    pub fn verify_rows(&self) -> Result<(), PipelineError> {
        let pkg = self.package()?;
        for row in &self.rows {
            let poly = hecke_lhs_polynomial(&pkg, row.ell)?;
            if poly.coeffs() != row.coefficients.as_slice() {
                return Err(PipelineError::RowMismatch { level: self.level, kind: row.kind.clone(), ell: row.ell });
            }
        }
        Ok(())
    }
}

fn polynomial_rows(pkg: &EigenPackage, balanced: bool) -> Result<Vec<RowReport>, PipelineError> {
    let mut rows = vec![];
    for ell in pkg.primes() {
        if (1..=pkg.m).any(|k| pkg.get(ell, k).is_none()) {
            continue;
        }
        let poly = hecke_lhs_polynomial(pkg, ell)?;
        let text = if pkg.field.degree() == 1 {
            crate::galois::format_polynomial(&poly, balanced)
        } else {
            format!("{:?}", poly.coeffs())
        };
        rows.push(RowReport {
            kind: if pkg.is_u_type(ell) { "U" } else { "T" }.into(),
            ell,
            coefficients: poly.coeffs().to_vec(),
            text,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeBlock {
    pub m: usize,
    pub level: u64,
    pub p: u64,
    pub degree: usize,
    pub kind: SpaceKind,
    pub dim: usize,
    pub operators: Vec<OperatorReport>,
    /// Every computed `T(ℓ, m)` with `ℓ ∤ N` was the identity.
    pub central_identity: bool,
    pub packages: Vec<PackageReport>,
    /// Dimension of the part whose eigenvalues need a larger field.
    pub outside_bound: usize,
}

/// Hecke matrices on the `p`-part of the homology at one level, with their
/// eigenpackages. Matrices are cached by `(m, N, degree, p, kind, ℓ, k)`.
pub fn hecke_block(
    cfg: &JobConfig,
    complex: &LevelComplex,
    p: u64,
    kind: SpaceKind,
) -> Result<HeckeBlock, PipelineError> {
    let level = complex.level;
    let m = cfg.m;
    let space = homology_space(complex, cfg.sharbly_degree(), p, kind)?;
    let field = space.field().clone();
    log::info!("N={level} p={p}: {kind:?} space of dimension {} on {} cells", space.len(), space.basis.first().map_or(0, Vec::len));
    let mut reducer = Reducer::new(Classifier::new(complex), p, cfg.reduction_budget)?;
    let cache = cfg.cache();
    let mut operators = vec![];
    if !space.is_empty() {
        for &ell in &cfg.hecke_primes {
            for k in 1..=m {
                let inputs = format!("m={m} N={level} degree={} p={p} kind={kind:?} ell={ell} k={k}", cfg.degree);
                let matrix: Vec<Vec<u64>> = cache.json("hecke", &inputs, || {
                    let start = Instant::now();
                    let op = double_coset_reps(m, ell, k, level)?;
                    let (t, steps) = hecke_matrix_with_steps(&op, &mut reducer, &space)?;
                    log::info!(
                        "N={level} p={p} T({ell},{k}): {} reps, reduction steps {:?}, {:.1?}",
                        op.reps.len(),
                        steps,
                        start.elapsed()
                    );
                    Ok(rows_of(&t))
                })?;
                operators.push(OperatorReport { ell, k, u_type: level % ell == 0, matrix });
            }
        }
    }
    let mats: Vec<FpMatrix> = operators.iter().map(|o| FpMatrix::from_rows(&field, &o.matrix)).collect();
    let identity = FpMatrix::identity(&field, space.len());
    let central_identity = operators
        .iter()
        .zip(&mats)
        .filter(|(o, _)| o.k == m && !o.u_type)
        .all(|(_, t)| *t == identity);
    let labels: Vec<(u64, usize)> = operators.iter().map(|o| (o.ell, o.k)).collect();
    let decomposition = simultaneous_eigenpackages(&mats, &labels, cfg.max_extension)?;
    let outside_bound = decomposition.outside_bound.iter().map(|o| o.dimension).sum();
    let mut packages = vec![];
    for (i, (pkg, mult)) in decomposition.packages.iter().enumerate() {
        let g = EigenPackage::from_linalg(level, m, pkg);
        let rows = polynomial_rows(&g, cfg.balanced)?;
        packages.push(PackageReport {
            level,
            p,
            m,
            class_id: i + 1,
            multiplicity: *mult,
            field_degree: g.field.degree(),
            entries: g.entries.iter().map(|(&(ell, k), &a)| EntryReport { ell, k, a }).collect(),
            rows,
        });
    }
    Ok(HeckeBlock {
        m,
        level,
        p,
        degree: cfg.degree,
        kind,
        dim: space.len(),
        operators,
        central_identity,
        packages,
        outside_bound,
    })
}

fn rows_of(t: &FpMatrix) -> Vec<Vec<u64>> {
    (0..t.rows()).map(|r| (0..t.cols()).map(|c| t.get(r, c)).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelOutcome {
    pub level: u64,
    pub torsion: Option<TorsionReport>,
    pub hecke: Vec<HeckeBlock>,
    pub error: Option<String>,
}

impl LevelOutcome {
    pub fn completed(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputeReport {
    pub m: usize,
    pub degree: usize,
    pub levels: Vec<LevelOutcome>,
}

impl ComputeReport {
    pub fn all_completed(&self) -> bool {
        self.levels.iter().all(LevelOutcome::completed)
    }

    /// `(N, p, dim)` rows for every odd torsion prime found.
    pub fn table1(&self) -> Vec<(u64, u64, usize)> {
        self.levels
            .iter()
            .filter_map(|l| l.torsion.as_ref())
            .flat_map(|r| r.torsion.iter().map(move |&(p, d)| (r.level, p, d)))
            .collect()
    }

    pub fn packages(&self) -> Vec<PackageReport> {
        self.levels
            .iter()
            .flat_map(|l| l.hecke.iter().flat_map(|b| b.packages.iter().cloned()))
            .collect()
    }
}

/// What to compute at each level after the torsion report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeckeJob {
    /// Nothing beyond the torsion report.
    None,
    /// Hecke action on the `p`-torsion for each odd torsion prime found.
    TorsionPrimes,
    /// Hecke action on the given space at a fixed prime.
    At(u64, SpaceKind),
}

fn run_level(cfg: &JobConfig, table: &CellTable, level: u64, job: HeckeJob) -> Result<LevelOutcome, PipelineError> {
    let start = Instant::now();
    let complex = assemble_complex(table, level)?;
    log::info!(
        "N={level}: complex assembled, ranks {:?}, {:.1?}",
        complex.bases.iter().map(|(d, b)| (*d, b.len())).collect::<Vec<_>>(),
        start.elapsed()
    );
    let report = torsion_report(cfg, &complex)?;
    let jobs: Vec<(u64, SpaceKind)> = match job {
        HeckeJob::None => vec![],
        HeckeJob::TorsionPrimes => report
            .torsion
            .iter()
            .map(|&(p, _)| p)
            .filter(|p| cfg.torsion_primes.as_ref().is_none_or(|ps| ps.contains(p)))
            .map(|p| (p, SpaceKind::Torsion))
            .collect(),
        HeckeJob::At(p, kind) => vec![(p, kind)],
    };
    let mut hecke = vec![];
    for (p, kind) in jobs {
        hecke.push(hecke_block(cfg, &complex, p, kind)?);
    }
    Ok(LevelOutcome { level, torsion: Some(report), hecke, error: None })
}

/// Runs every configured level; a failing level is recorded and the others
/// still run.
pub fn run_levels(cfg: &JobConfig, job: HeckeJob) -> Result<ComputeReport, PipelineError> {
    cfg.validate()?;
    if let HeckeJob::At(p, _) = job {
        if p == 2 {
            return Err(HeckeError::PrimeTwo.into());
        }
    }
    let table = cell_table(cfg.m, &cfg.retract_dims(), &cfg.cache())?;
    let mut levels = vec![];
    for &level in &cfg.levels {
        let outcome = run_level(cfg, &table, level, job).unwrap_or_else(|e| {
            log::error!("N={level}: {e}");
            LevelOutcome { level, torsion: None, hecke: vec![], error: Some(e.to_string()) }
        });
        levels.push(outcome);
    }
    Ok(ComputeReport { m: cfg.m, degree: cfg.degree, levels })
}

/// Torsion reports, then Hecke eigenpackages for every odd torsion prime.
pub fn run_compute(cfg: &JobConfig) -> Result<ComputeReport, PipelineError> {
    run_levels(cfg, HeckeJob::TorsionPrimes)
}

/// Hecke eigenpackages at a fixed prime `p` on the chosen space.
pub fn run_hecke(cfg: &JobConfig, p: u64, kind: SpaceKind) -> Result<ComputeReport, PipelineError> {
    run_levels(cfg, HeckeJob::At(p, kind))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    pub level: u64,
    pub p: u64,
    #[serde(rename = "class-id")]
    pub class_id: usize,
    pub matched: Vec<Vec<SummandDescriptor>>,
    /// Human-readable names of the matched representations.
    pub names: Vec<String>,
    pub verified_primes: Vec<u64>,
    pub error: Option<String>,
}

/// Packages found anywhere in a JSON document: any object with `level`,
/// `p`, `class-id` and `entries`.
pub fn parse_packages(text: &str) -> Result<Vec<PackageReport>, PipelineError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| PipelineError::Parse(e.to_string()))?;
    let mut out = vec![];
    collect_packages(&value, &mut out)?;
    Ok(out)
}

fn collect_packages(v: &serde_json::Value, out: &mut Vec<PackageReport>) -> Result<(), PipelineError> {
    match v {
        serde_json::Value::Object(map) => {
            if ["level", "p", "class-id", "entries"].iter().all(|k| map.contains_key(*k)) {
                let pkg: PackageReport =
                    serde_json::from_value(v.clone()).map_err(|e| PipelineError::Parse(e.to_string()))?;
                out.push(pkg);
            } else {
                for x in map.values() {
                    collect_packages(x, out)?;
                }
            }
        }
        serde_json::Value::Array(xs) => {
            for x in xs {
                collect_packages(x, out)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Matches each package against sums of characters.
pub fn run_match(packages: &[PackageReport], search: MatchSearch) -> Result<Vec<MatchReport>, PipelineError> {
    let mut out = vec![];
    for r in packages {
        r.verify_rows()?;
        let pkg = r.package()?;
        let mut report = MatchReport {
            level: r.level,
            p: r.p,
            class_id: r.class_id,
            matched: vec![],
            names: vec![],
            verified_primes: pkg.good_primes(),
            error: None,
        };
        match match_representation(&pkg, search) {
            Ok(reps) => {
                report.matched = reps.iter().map(|g| g.descriptors()).collect();
                report.names = reps.iter().map(|g| g.to_string()).collect();
            }
            Err(e) => report.error = Some(e.to_string()),
        }
        out.push(report);
    }
    Ok(out)
}

/// The reference eigenclasses as packages, from their rows at `ℓ ≠ p`.
pub fn reference_packages(balanced: bool) -> Result<Vec<PackageReport>, PipelineError> {
    let mut out = vec![];
    for b in REFERENCE_POLYNOMIALS {
        let pkg = b.package()?;
        out.push(PackageReport {
            level: b.level,
            p: b.p,
            m: pkg.m,
            class_id: b.class_id,
            multiplicity: 1,
            field_degree: 1,
            entries: pkg.entries.iter().map(|(&(ell, k), &a)| EntryReport { ell, k, a }).collect(),
            rows: polynomial_rows(&pkg, balanced)?,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub level: u64,
    /// Primes that can be orders of torsion elements of `Γ₀(N) ⊂ SL(4, Z)`.
    pub primes: Vec<u64>,
    pub five_torsion: bool,
    /// Exhaustive search for an element of order 5, as a cross-check.
    pub brute_check: bool,
}

pub fn run_predict(levels: &[u64]) -> Vec<Prediction> {
    levels
        .iter()
        .map(|&level| Prediction {
            level,
            primes: torsion_primes(level),
            five_torsion: five_torsion_exists(level),
            brute_check: order5_brute_check(level),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let cfg = JobConfig::new(4, vec![11]);
        assert_eq!(cfg.degree, 5);
        assert_eq!(cfg.retract_dims(), vec![4, 5, 6]);
        cfg.validate().unwrap();
        assert_eq!(JobConfig::new(2, vec![11]).retract_dims(), vec![0, 1]);
        let mut bad = cfg.clone();
        bad.degree = 4;
        assert!(matches!(bad.validate(), Err(PipelineError::Config(_))));
        bad = cfg.clone();
        bad.torsion_primes = Some(vec![2, 5]);
        assert!(matches!(bad.validate(), Err(PipelineError::Hecke(HeckeError::PrimeTwo))));
        bad = cfg.clone();
        bad.m = 5;
        assert!(bad.validate().is_err());
        bad = cfg;
        bad.hecke_primes = vec![4];
        assert!(bad.validate().is_err());
    }

    #[test]
    fn predictions() {
        let p = run_predict(&[1, 11, 31, 50]);
        assert_eq!(p[0].primes, vec![2, 3, 5]);
        assert!(p[1].five_torsion && p[2].five_torsion && !p[3].five_torsion);
        assert!(p.iter().all(|x| x.five_torsion == x.brute_check));
    }

    #[test]
    fn rank_two_level_eleven() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = JobConfig::new(2, vec![11]);
        cfg.hecke_primes = vec![2, 3, 11];
        cfg.cache_dir = Some(dir.path().to_path_buf());
        let report = run_hecke(&cfg, 7, SpaceKind::Full).unwrap();
        assert!(report.all_completed());
        let level = &report.levels[0];
        assert_eq!(level.torsion.as_ref().unwrap().free_rank, 3);
        let block = &level.hecke[0];
        assert_eq!(block.dim, 3);
        assert!(block.central_identity);
        let a2: Vec<u64> = block
            .packages
            .iter()
            .flat_map(|p| p.entries.iter().filter(|e| (e.ell, e.k) == (2, 1)).map(|e| e.a))
            .collect();
        assert!(a2.contains(&3) && a2.contains(&5), "{a2:?}");
        // Warm cache: identical output.
        let again = run_hecke(&cfg, 7, SpaceKind::Full).unwrap();
        assert_eq!(render_compute(&again, Format::Json).unwrap(), render_compute(&report, Format::Json).unwrap());
        // The packages survive a JSON round trip and verify.
        let json = render_compute(&report, Format::Json).unwrap();
        let pkgs = parse_packages(&json).unwrap();
        assert_eq!(pkgs, report.packages());
        let matches = run_match(&pkgs, MatchSearch::default()).unwrap();
        assert_eq!(matches.len(), pkgs.len());
        assert!(run_hecke(&cfg, 2, SpaceKind::Full).is_err());
    }

    #[test]
    fn tampered_rows_are_rejected() {
        let f = FiniteField::prime(5).unwrap();
        let mut pkg = EigenPackage::new(11, 5, 1, &f);
        pkg.set(2, 1, 3);
        pkg.set(3, 1, 4);
        let rows = polynomial_rows(&pkg, true).unwrap();
        let mut r = PackageReport {
            level: 11,
            p: 5,
            m: 1,
            class_id: 1,
            multiplicity: 1,
            field_degree: 1,
            entries: vec![EntryReport { ell: 2, k: 1, a: 3 }, EntryReport { ell: 3, k: 1, a: 4 }],
            rows,
        };
        r.verify_rows().unwrap();
        r.rows[0].coefficients[1] = 0;
        assert!(matches!(r.verify_rows(), Err(PipelineError::RowMismatch { .. })));
    }
}
