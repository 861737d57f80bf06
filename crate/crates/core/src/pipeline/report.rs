//! CSV, JSON and plain-text renderings of pipeline results.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::galois::{format_polynomial, REFERENCE_POLYNOMIALS};

use super::{ComputeReport, MatchReport, PackageReport, PipelineError, Prediction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    Json,
    #[default]
    Txt,
}

impl FromStr for Format {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "txt" => Ok(Format::Txt),
            _ => Err(PipelineError::Parse(format!("unknown format {s:?}"))),
        }
    }
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Odd torsion rows `(N, p, dim)`.
pub fn render_table1(rows: &[(u64, u64, usize)], format: Format) -> String {
    match format {
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|&(level, p, dim)| serde_json::json!({ "level": level, "p": p, "dim": dim }))
                .collect();
            json(&v)
        }
        Format::Csv => {
            let mut s = String::from("level,p,dim\n");
            for (n, p, d) in rows {
                writeln!(s, "{n},{p},{d}").unwrap();
            }
            s
        }
        Format::Txt => {
            let mut s = String::from("   N    p  dim\n");
            for (n, p, d) in rows {
                writeln!(s, "{n:>4} {p:>4} {d:>4}").unwrap();
            }
            s
        }
    }
}

/// Hecke polynomial rows per eigenclass. Rows are re-derived from the
/// eigenvalues before anything is printed.
pub fn render_table2(packages: &[PackageReport], format: Format) -> Result<String, PipelineError> {
    for p in packages {
        p.verify_rows()?;
    }
    Ok(match format {
        Format::Json => json(packages),
        Format::Csv => {
            let mut s = String::from("level,p,class_id,multiplicity,operator,polynomial\n");
            for p in packages {
                for r in &p.rows {
                    writeln!(s, "{},{},{},{},{}{},{}", p.level, p.p, p.class_id, p.multiplicity, r.kind, r.ell, r.text)
                        .unwrap();
                }
            }
            s
        }
        Format::Txt => {
            let mut s = String::new();
            for p in packages {
                writeln!(s, "N = {}, p = {}, class {} (multiplicity {})", p.level, p.p, p.class_id, p.multiplicity).unwrap();
                for r in &p.rows {
                    writeln!(s, "  {}{} : {}", r.kind, r.ell, r.text).unwrap();
                }
            }
            s
        }
    })
}

/// A whole run: the torsion table, then the Hecke blocks.
pub fn render_compute(report: &ComputeReport, format: Format) -> Result<String, PipelineError> {
    let packages = report.packages();
    for p in &packages {
        p.verify_rows()?;
    }
    Ok(match format {
        Format::Json => json(report),
        Format::Csv => {
            let mut s = String::from("level,status,free_rank,odd_torsion\n");
            for l in &report.levels {
                let status = if l.completed() { "ok" } else { "failed" };
                let (rank, tors) = match &l.torsion {
                    Some(t) => (
                        t.free_rank.to_string(),
                        t.torsion.iter().map(|(p, d)| format!("{p}^{d}")).collect::<Vec<_>>().join(" "),
                    ),
                    None => (String::new(), String::new()),
                };
                writeln!(s, "{},{status},{rank},{tors}", l.level).unwrap();
            }
            s.push('\n');
            s.push_str(&render_table2(&packages, Format::Csv)?);
            s
        }
        Format::Txt => {
            let mut s = format!("rank {}, cohomological degree {}\n\n", report.m, report.degree);
            for l in &report.levels {
                match (&l.torsion, &l.error) {
                    (_, Some(e)) => writeln!(s, "N = {}: FAILED: {e}", l.level).unwrap(),
                    (Some(t), None) if t.torsion.is_empty() => {
                        writeln!(s, "N = {}: free rank {}, no odd torsion", l.level, t.free_rank).unwrap()
                    }
                    (Some(t), None) => {
                        let tors: Vec<String> = t.torsion.iter().map(|(p, d)| format!("(Z/{p})^{d}")).collect();
                        writeln!(s, "N = {}: free rank {}, odd torsion {}", l.level, t.free_rank, tors.join(" + "))
                            .unwrap()
                    }
                    (None, None) => writeln!(s, "N = {}: no report", l.level).unwrap(),
                }
                for b in &l.hecke {
                    writeln!(
                        s,
                        "  p = {}: {:?} space of dimension {}, central operators trivial: {}",
                        b.p, b.kind, b.dim, b.central_identity
                    )
                    .unwrap();
                    if b.outside_bound > 0 {
                        writeln!(s, "  {} dimensions need a larger field", b.outside_bound).unwrap();
                    }
                }
            }
            if !packages.is_empty() {
                s.push('\n');
                s.push_str(&render_table2(&packages, Format::Txt)?);
            }
            s
        }
    })
}

pub fn render_matches(reports: &[MatchReport], format: Format) -> String {
    match format {
        Format::Json => json(reports),
        Format::Csv => {
            let mut s = String::from("level,p,class_id,representation\n");
            for r in reports {
                if r.names.is_empty() {
                    writeln!(s, "{},{},{},", r.level, r.p, r.class_id).unwrap();
                }
                for n in &r.names {
                    writeln!(s, "{},{},{},{n}", r.level, r.p, r.class_id).unwrap();
                }
            }
            s
        }
        Format::Txt => {
            let mut s = String::new();
            for r in reports {
                let primes: Vec<String> = r.verified_primes.iter().map(u64::to_string).collect();
                writeln!(s, "N = {}, p = {}, class {} (checked at {})", r.level, r.p, r.class_id, primes.join(", "))
                    .unwrap();
                if let Some(e) = &r.error {
                    writeln!(s, "  error: {e}").unwrap();
                } else if r.names.is_empty() {
                    writeln!(s, "  no match").unwrap();
                }
                for n in &r.names {
                    writeln!(s, "  {n}").unwrap();
                }
            }
            s
        }
    }
}

pub fn render_predictions(rows: &[Prediction], format: Format) -> String {
    match format {
        Format::Json => json(rows),
        Format::Csv => {
            let mut s = String::from("level,torsion_primes,five_torsion,brute_check\n");
            for r in rows {
                let ps: Vec<String> = r.primes.iter().map(u64::to_string).collect();
                writeln!(s, "{},{},{},{}", r.level, ps.join(" "), r.five_torsion, r.brute_check).unwrap();
            }
            s
        }
        Format::Txt => {
            let mut s = String::new();
            for r in rows {
                let ps: Vec<String> = r.primes.iter().map(u64::to_string).collect();
                let flag = if r.five_torsion == r.brute_check { "" } else { "  (brute-force check disagrees)" };
                writeln!(s, "N = {:>3}: {{{}}}{flag}", r.level, ps.join(", ")).unwrap();
            }
            s
        }
    }
}

/// The reference Hecke polynomial rows as printed, one line per row.
pub fn render_reference_table2(format: Format, balanced: bool) -> Result<String, PipelineError> {
    let mut rows = vec![];
    for b in REFERENCE_POLYNOMIALS {
        for r in b.rows {
            let text = format_polynomial(&b.row_polynomial(r)?, balanced);
            rows.push((b.level, b.p, b.class_id, format!("{}{}", r.0, r.1), text));
        }
    }
    Ok(match format {
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(n, p, c, op, t)| serde_json::json!({ "level": n, "p": p, "class": c, "operator": op, "polynomial": t }))
                .collect();
            json(&v)
        }
        Format::Csv => {
            let mut s = String::from("level,p,class_id,operator,polynomial\n");
            for (n, p, c, op, t) in &rows {
                writeln!(s, "{n},{p},{c},{op},{t}").unwrap();
            }
            s
        }
        Format::Txt => {
            let mut s = String::new();
            let mut last = None;
            for (n, p, c, op, t) in &rows {
                if last != Some((n, p, c)) {
                    writeln!(s, "N = {n}, p = {p}, class {c}").unwrap();
                    last = Some((n, p, c));
                }
                writeln!(s, "  {op} : {t}").unwrap();
            }
            s
        }
    })
}
