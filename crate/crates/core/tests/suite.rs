use std::time::Instant;

use dqhkr::cohomology::{ModuleKind, Truncation, DEFAULT_BUDGET};
use dqhkr::report::Report;
use dqhkr::scalar::Scalar;
use dqhkr::suite;

fn passes(name: &str, r: dqhkr::Result<Report>, t: Instant) -> Report {
    let r = r.unwrap();
    eprintln!("{name}: {:.2?}", t.elapsed());
    assert!(r.passed(), "{r}");
    r
}

#[test]
fn matrices_parse() {
    let a = suite::parse_matrix("0 1; 0 0").unwrap();
    assert_eq!(a[0][1], Scalar::one());
    assert_eq!(suite::parse_matrix("1/2, i; -i 0").unwrap()[0][0], Scalar::ratio(1, 2));
    assert!(suite::parse_matrix("0 1; 0").is_err());
    assert!(suite::parse_matrix("x 1; 0 0").is_err());
    assert!(suite::parse_matrix("").is_err());
}

#[test]
fn every_suite_passes_on_defaults() {
    let a = suite::parse_matrix("0 1; 0 0").unwrap();
    let t = Instant::now();
    passes("assoc", suite::assoc(&a, 3, 50, 1), t);
    let t = Instant::now();
    passes("obstruction", suite::obstruction(3, 20, 1), t);
    let t = Instant::now();
    passes("sp-check", suite::sp_check(4, 20, 1), t);
    let t = Instant::now();
    passes("bimodule", suite::bimodule(3, 3, 10, 1), t);
    let t = Instant::now();
    passes("subalgebra", suite::subalgebra(3, 2, 50, 1), t);
    let t = Instant::now();
    passes("classes", suite::classes(50, 1), t);
}

#[test]
fn chainmaps_pass_for_small_m() {
    for m in 1..=3 {
        let t = Instant::now();
        passes(&format!("chainmaps m={m}"), suite::chainmaps(m, 3, 50, 7), t);
    }
}

#[test]
fn hkr_reports_a_table() {
    let tr = Truncation { m: 3, k: 1, n: 2, d: 2, o: 2, module: ModuleKind::DiffOps };
    let r = passes("hkr", suite::hkr(&tr, DEFAULT_BUDGET, 0), Instant::now());
    assert_eq!(r.tables[0].rows.len(), 4);
}

#[test]
fn reports_are_deterministic() {
    let a = suite::parse_matrix("0 1; 0 0").unwrap();
    assert_eq!(suite::assoc(&a, 2, 10, 5).unwrap().to_json(), suite::assoc(&a, 2, 10, 5).unwrap().to_json());
}
