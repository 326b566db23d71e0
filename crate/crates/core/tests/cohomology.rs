use dqhkr::cohomology::{hkr_compare, koszul_hom_differential, truncated_cohomology, ModuleKind, Truncation, DEFAULT_BUDGET};
use dqhkr::diffop::{DiffOp, Projection};
use dqhkr::koszul::{increasing_tuples, BarComplex, KoszulCochain};
use dqhkr::poly::{MultiIndex, Polynomial, Space};
use dqhkr::scalar::Scalar;

fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Counts monomials of degree ≤ d in n variables by brute enumeration.
fn monomials_up_to(n: usize, d: usize) -> usize {
    fn go(n: usize, d: usize) -> usize {
        if n == 0 {
            return 1;
        }
        (0..=d).map(|e| go(n - 1, d - e)).sum()
    }
    go(n, d)
}

#[test]
fn function_module_matches_exterior_count() {
    for (m, n) in [(1, 1), (2, 2), (2, 3)] {
        for d in 0..=2 {
            let t = Truncation { m, k: m.min(n), n, d, o: 0, module: ModuleKind::Functions };
            let r = truncated_cohomology(&t, DEFAULT_BUDGET).unwrap();
            let expected: Vec<usize> = (0..=m).map(|j| choose(m, j) * monomials_up_to(n, d as usize)).collect();
            assert_eq!(r.dims, expected, "{t:?}");
            assert!(r.representatives_closed);
        }
    }
}

#[test]
fn diffop_module_sweep() {
    for (m, k, n) in [(1, 1, 1), (2, 1, 2), (2, 1, 3), (3, 2, 3)] {
        for d in 0..=2 {
            for o in 0..=2 {
                let t = Truncation { m, k, n, d, o, module: ModuleKind::DiffOps };
                let cmp = hkr_compare(&t, DEFAULT_BUDGET).unwrap();
                let expected: Vec<usize> = (0..=m)
                    .map(|j| choose(m - k, j) * monomials_up_to(n, d as usize) * monomials_up_to(n - k, o as usize))
                    .collect();
                assert_eq!(cmp.report.dims, expected, "{t:?}");
                assert!(cmp.all_match());
                assert!(cmp.report.squares_to_zero);
                assert!(cmp.report.block_ranks_agree);
                assert!(cmp.report.representatives_closed);
            }
        }
    }
}

#[test]
fn fibered_case_is_trivial_above_degree_zero() {
    for (m, n) in [(1, 1), (2, 2), (2, 3), (3, 3)] {
        let t = Truncation { m, k: m, n, d: 1, o: 2, module: ModuleKind::DiffOps };
        let r = truncated_cohomology(&t, DEFAULT_BUDGET).unwrap();
        assert!(r.dims[1..].iter().all(|&h| h == 0), "{t:?}: {:?}", r.dims);
    }
}

#[test]
fn table_renders_every_degree() {
    let t = Truncation { m: 2, k: 1, n: 2, d: 1, o: 1, module: ModuleKind::DiffOps };
    let table = hkr_compare(&t, DEFAULT_BUDGET).unwrap().to_string();
    assert_eq!(table.lines().count(), 2 + 3);
    assert!(table.contains("     1        6        6    yes"));
}

/// `δ_K` is the transpose of the Koszul boundary: `(δ_K φ)(e^J) = φ(∂_K e^J)`.
#[test]
fn differential_is_dual_to_koszul_boundary() {
    let m = 3;
    let base = Space::coordinates("x", m);
    let total = Space::fibered("y", 3, 2);
    let proj = Projection::new(&base, &total).unwrap();
    let bar = BarComplex::new(m, m);
    let one = Polynomial::one(bar.pair());
    for j in 0..m {
        for idx in increasing_tuples(m, j) {
            for alpha in MultiIndex::all_up_to(3, 1) {
                for sym in MultiIndex::all_up_to(3, 2) {
                    let v = DiffOp::monomial(sym, Polynomial::monomial(&total, alpha.clone(), Scalar::one()));
                    let phi = KoszulCochain::from_terms(&proj, j, [(idx.clone(), v)]).unwrap();
                    let dphi = koszul_hom_differential(&phi);
                    for target in increasing_tuples(m, j + 1) {
                        let omega = bar.koszul_chain(j + 1, [(target.clone(), one.clone())]).unwrap();
                        let lhs = dphi.eval_chain(&bar, &omega);
                        let rhs = phi.eval_chain(&bar, &bar.koszul_differential(&omega).unwrap());
                        assert_eq!(lhs, rhs, "{phi:?} on e{target:?}");
                    }
                }
            }
        }
    }
}
