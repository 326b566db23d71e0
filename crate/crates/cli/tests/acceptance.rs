//! One PASS/FAIL line per acceptance criterion. Arithmetic is exact, so the
//! tolerance on every value is zero; the limits are wall-clock budgets.

use std::process::Command;
use std::time::{Duration, Instant};

use dqhkr::cohomology::{hkr_compare, truncated_cohomology, ModuleKind, Truncation, DEFAULT_BUDGET};
use dqhkr::report::Report;
use dqhkr::suite;

fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Monomials of degree ≤ d in n variables, by enumeration.
fn monomials(n: usize, d: u32) -> usize {
    if n == 0 {
        return 1;
    }
    (0..=d).map(|e| monomials(n - 1, d - e)).sum()
}

struct Outcome {
    failure: Option<String>,
    slowest: Duration,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failure: None, slowest: Duration::ZERO }
    }

    fn fail(&mut self, msg: String) {
        self.failure.get_or_insert(msg);
    }

    fn time<T>(&mut self, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.slowest = self.slowest.max(t.elapsed());
        out
    }

    fn report(&mut self, r: dqhkr::Result<Report>) {
        match r {
            Ok(r) => {
                if let Some(c) = r.first_failure() {
                    self.fail(format!("{}: {}: {}", r.command, c.name, c.witness.as_deref().unwrap_or("")));
                }
            }
            Err(e) => self.fail(e.to_string()),
        }
    }
}

/// Prints the criterion line; `per_config` applies the limit to the slowest
/// configuration instead of the whole run.
fn verdict(id: usize, what: &str, limit: Duration, per_config: bool, start: Instant, mut o: Outcome) -> bool {
    let measured = if per_config { o.slowest } else { start.elapsed() };
    if measured > limit {
        o.fail(format!("took {measured:.2?}, limit {limit:?}"));
    }
    let scope = if per_config { "slowest config" } else { "total" };
    let status = if o.failure.is_none() { "PASS" } else { "FAIL" };
    print!("{status}  criterion {id}: {what} [exact; {scope} {measured:.2?} < {limit:?}]");
    if let Some(f) = &o.failure {
        print!("  {f}");
    }
    println!();
    o.failure.is_none()
}

fn function_module() -> bool {
    let start = Instant::now();
    let mut o = Outcome::new();
    for (m, n) in [(1, 1), (2, 2), (2, 3)] {
        for d in 0..=2 {
            let t = Truncation { m, k: m.min(n), n, d, o: 0, module: ModuleKind::Functions };
            let expected: Vec<usize> = (0..=m).map(|j| choose(m, j) * monomials(n, d)).collect();
            match o.time(|| truncated_cohomology(&t, DEFAULT_BUDGET)) {
                Ok(r) if r.dims == expected && r.representatives_closed => {}
                Ok(r) => o.fail(format!("{t:?}: {:?} vs {expected:?}", r.dims)),
                Err(e) => o.fail(e.to_string()),
            }
        }
    }
    verdict(1, "function-module cohomology equals C(m,j)·C(n+d,d)", Duration::from_secs(30), true, start, o)
}

fn diffop_module() -> bool {
    let start = Instant::now();
    let mut o = Outcome::new();
    for (m, k, n) in [(1, 1, 1), (2, 1, 2), (2, 1, 3), (3, 2, 3)] {
        for d in 0..=2 {
            for ord in 0..=2 {
                let t = Truncation { m, k, n, d, o: ord, module: ModuleKind::DiffOps };
                let expected: Vec<usize> =
                    (0..=m).map(|j| choose(m - k, j) * monomials(n, d) * monomials(n - k, ord)).collect();
                match o.time(|| hkr_compare(&t, DEFAULT_BUDGET)) {
                    Ok(c) if c.report.dims == expected && c.all_match() && c.report.representatives_closed => {}
                    Ok(c) => o.fail(format!("{t:?}: {:?} vs {expected:?}", c.report.dims)),
                    Err(e) => o.fail(e.to_string()),
                }
            }
        }
    }
    let t = Truncation { m: 2, k: 1, n: 2, d: 1, o: 1, module: ModuleKind::DiffOps };
    match truncated_cohomology(&t, DEFAULT_BUDGET) {
        Ok(r) if r.dims == [6, 6, 0] => {}
        Ok(r) => o.fail(format!("(2,1,2,d=1,o=1) gave {:?}", r.dims)),
        Err(e) => o.fail(e.to_string()),
    }
    let what = "DiffOp-module cohomology equals the closed-form count; (2,1,2,1,1) = (6,6,0)";
    verdict(2, what, Duration::from_secs(120), true, start, o)
}

fn fibered_triviality() -> bool {
    let start = Instant::now();
    let mut o = Outcome::new();
    for (m, n) in [(1, 1), (2, 2), (2, 3), (3, 3)] {
        for d in 0..=2 {
            for ord in 0..=1 {
                let t = Truncation { m, k: m, n, d, o: ord, module: ModuleKind::DiffOps };
                match o.time(|| truncated_cohomology(&t, DEFAULT_BUDGET)) {
                    Ok(r) if r.dims[1..].iter().all(|&x| x == 0) && r.dims[0] > 0 => {}
                    Ok(r) => o.fail(format!("{t:?}: {:?}", r.dims)),
                    Err(e) => o.fail(e.to_string()),
                }
            }
        }
    }
    verdict(3, "k = m: H^j = 0 for j ≥ 1", Duration::from_secs(120), true, start, o)
}

fn chain_maps() -> bool {
    let start = Instant::now();
    let mut o = Outcome::new();
    for m in 1..=3 {
        o.report(suite::chainmaps(m, 3, 50, 2024));
    }
    verdict(4, "bar/Koszul identities on 50 samples per degree 0..3, m ≤ 3", Duration::from_secs(60), false, start, o)
}

fn deformation() -> bool {
    let start = Instant::now();
    let mut o = Outcome::new();
    let a = suite::parse_matrix("0 1; 0 0").expect("literal matrix");
    o.report(suite::assoc(&a, 3, 50, 1));
    o.report(suite::obstruction(3, 20, 1));
    o.report(suite::sp_check(4, 20, 1));
    o.report(suite::bimodule(3, 3, 10, 1));
    o.report(suite::subalgebra(3, 2, 50, 1));
    let what = "star product, obstruction, sP-bracket, bimodule and subalgebra suites";
    verdict(5, what, Duration::from_secs(120), false, start, o)
}

fn cross_module() -> bool {
    let start = Instant::now();
    let mut o = Outcome::new();
    o.report(suite::classes(50, 3));
    verdict(6, "G̃ cocycles, class_of∘G̃ = id, Alt kills coboundaries", Duration::from_secs(60), false, start, o)
}

fn determinism() -> bool {
    let start = Instant::now();
    let mut o = Outcome::new();
    let dir = std::env::temp_dir().join(format!("dqhkr-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let commands: [&[&str]; 8] = [
        &["assoc", "--order", "3", "--seed", "5"],
        &["obstruction", "--samples", "4", "--seed", "5"],
        &["sp-check", "--seed", "5"],
        &["bimodule", "--seed", "5"],
        &["subalgebra", "--samples", "10", "--seed", "5"],
        &["chainmaps", "--m", "2", "--degree", "2", "--seed", "5"],
        &["classes", "--seed", "5"],
        &["hkr", "--m", "2", "--k", "1", "--n", "2", "--d", "1", "--o", "1"],
    ];
    for args in commands {
        let runs: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
            .map(|i| {
                let path = dir.join(format!("{}-{i}.json", args[0]));
                let out = Command::new(env!("CARGO_BIN_EXE_dqhkr"))
                    .args(args)
                    .arg("--out")
                    .arg(&path)
                    .output()
                    .expect("run dqhkr");
                if !out.status.success() {
                    o.fail(format!("{} exited with {}", args[0], out.status));
                }
                (std::fs::read(&path).unwrap_or_default(), out.stdout)
            })
            .collect();
        if runs[0].0.is_empty() || runs[0] != runs[1] {
            o.fail(format!("{} reports differ between runs", args[0]));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    verdict(7, "repeated CLI runs give byte-identical reports", Duration::from_secs(120), false, start, o)
}

fn main() {
    let results = [
        function_module(),
        diffop_module(),
        fibered_triviality(),
        chain_maps(),
        deformation(),
        cross_module(),
        determinism(),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} criteria, {failed} failed", results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
