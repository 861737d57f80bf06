//! Torsion and Hecke eigenpackages for `GL(4)` at the levels given on the
//! command line, e.g. `cargo run --release --example gl4_level -- 11`.

use sharbly::pipeline::{render_compute, run_compute, Format, JobConfig};

fn main() {
    env_logger::init();
    let levels: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("level")).collect();
    let cfg = JobConfig::new(4, if levels.is_empty() { vec![11] } else { levels });
    let report = run_compute(&cfg).expect("valid configuration");
    print!("{}", render_compute(&report, Format::Txt).expect("rows verify"));
}
