use dqhkr::hochschild::{antisymmetrize, class_of, hochschild_differential, is_cocycle};
use dqhkr::koszul::{g_tilde, increasing_tuples, right_mul, xi, xi_inverse, BarChain, BarCochain, BarComplex, KoszulChain, KoszulCochain};
use dqhkr::multidiff::ModuleValue;
use dqhkr::sample::Sampler;
use dqhkr::{DiffOp, MultiDiffOp, MultiIndex, Polynomial, Projection, Scalar, Space};

fn random_chain(bar: &BarComplex, smp: &mut Sampler, k: usize) -> BarChain {
    bar.chain(k, smp.poly(bar.space(k))).unwrap()
}

fn random_koszul(bar: &BarComplex, smp: &mut Sampler, k: usize) -> KoszulChain {
    let terms: Vec<_> = increasing_tuples(bar.m(), k).into_iter().map(|i| (i, smp.poly(bar.pair()))).collect();
    bar.koszul_chain(k, terms).unwrap()
}

#[test]
fn bar_differential_squares_to_zero() {
    let mut smp = Sampler::new(11, "bar-d2").with_degree(3);
    for m in 1..=2 {
        let bar = BarComplex::new(m, 3);
        for k in 2..=3 {
            for _ in 0..5 {
                let chi = random_chain(&bar, &mut smp, k);
                let d = bar.bar_differential(&chi).unwrap();
                assert!(bar.bar_differential(&d).unwrap().is_zero());
            }
        }
        let chi = random_chain(&bar, &mut smp, 1);
        let d = bar.bar_differential(&chi).unwrap();
        assert!(bar.augmentation(&d).unwrap().is_zero());
    }
}

#[test]
fn bar_homotopy_identities() {
    let mut smp = Sampler::new(11, "bar-h").with_degree(3);
    for m in 1..=2 {
        let bar = BarComplex::new(m, 3);
        for _ in 0..5 {
            let chi = random_chain(&bar, &mut smp, 0);
            let back = bar.bar_differential(&bar.bar_homotopy(&chi)).unwrap().add(&bar.unit(&bar.augmentation(&chi).unwrap()));
            assert_eq!(back, chi);
            for k in 1..=2 {
                let chi = random_chain(&bar, &mut smp, k);
                let dh = bar.bar_differential(&bar.bar_homotopy(&chi)).unwrap();
                let hd = bar.bar_homotopy(&bar.bar_differential(&chi).unwrap());
                assert_eq!(dh.add(&hd), chi, "m={m} k={k}");
            }
        }
    }
}

#[test]
fn koszul_differential_squares_to_zero() {
    let mut smp = Sampler::new(11, "kos-d2").with_degree(2);
    for m in 1..=3 {
        let bar = BarComplex::new(m, 3);
        for k in 1..=m {
            let omega = random_koszul(&bar, &mut smp, k);
            let d = bar.koszul_differential(&omega).unwrap();
            if k >= 2 {
                assert!(bar.koszul_differential(&d).unwrap().is_zero());
            } else {
                assert!(bar.koszul_augmentation(&d).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn koszul_homotopy_identities() {
    let mut smp = Sampler::new(11, "kos-h").with_degree(3);
    for m in 1..=3 {
        let bar = BarComplex::new(m, 3);
        for _ in 0..3 {
            let omega = random_koszul(&bar, &mut smp, 0);
            let eta_eps = bar.koszul_unit(&bar.koszul_augmentation(&omega).unwrap());
            let back = bar.koszul_differential(&bar.koszul_homotopy(&omega)).unwrap().add(&eta_eps);
            assert_eq!(back, omega);
            for k in 1..=m {
                let omega = random_koszul(&bar, &mut smp, k);
                let hd = bar.koszul_homotopy(&bar.koszul_differential(&omega).unwrap());
                let sum = if k < m {
                    bar.koszul_differential(&bar.koszul_homotopy(&omega)).unwrap().add(&hd)
                } else {
                    hd
                };
                assert_eq!(sum, omega, "m={m} k={k}");
            }
        }
    }
}

#[test]
fn f_and_g_are_chain_maps() {
    let mut smp = Sampler::new(11, "fg-chain").with_degree(2);
    for m in 1..=2 {
        let bar = BarComplex::new(m, 3);
        for k in 1..=m {
            let omega = random_koszul(&bar, &mut smp, k);
            let lhs = bar.bar_differential(&bar.chain_map_f(&omega)).unwrap();
            let rhs = bar.chain_map_f(&bar.koszul_differential(&omega).unwrap());
            assert_eq!(lhs, rhs);
        }
        for k in 1..=3 {
            let chi = random_chain(&bar, &mut smp, k);
            let lhs = bar.koszul_differential(&bar.chain_map_g(&chi)).unwrap();
            let rhs = bar.chain_map_g(&bar.bar_differential(&chi).unwrap());
            assert_eq!(lhs, rhs, "m={m} k={k}");
        }
    }
}

#[test]
fn g_after_f_is_identity_on_basis() {
    let mut smp = Sampler::new(11, "gf").with_degree(2);
    for m in 1..=3 {
        let bar = BarComplex::new(m, 3);
        for k in 0..=m.min(3) {
            for idx in increasing_tuples(m, k) {
                let omega = bar.koszul_chain(k, [(idx.clone(), smp.poly(bar.pair()))]).unwrap();
                assert_eq!(bar.chain_map_g(&bar.chain_map_f(&omega)), omega, "m={m} I={idx:?}");
            }
        }
    }
}

#[test]
fn theta_is_the_projection_f_after_g() {
    let mut smp = Sampler::new(11, "theta").with_degree(3);
    for m in 1..=2 {
        let bar = BarComplex::new(m, 3);
        for k in 0..=2 {
            for _ in 0..4 {
                let chi = random_chain(&bar, &mut smp, k);
                let theta = bar.theta(&chi);
                assert_eq!(theta, bar.chain_map_f(&bar.chain_map_g(&chi)));
                assert_eq!(bar.theta(&theta), theta);
            }
            let omega = random_koszul(&bar, &mut smp, k.min(m));
            let f = bar.chain_map_f(&omega);
            assert_eq!(bar.theta(&f), f);
        }
    }
}

fn delta_oracle<V: ModuleValue>(phi: &MultiDiffOp<V>, args: &[Polynomial]) -> V {
    let proj = phi.proj();
    let k = phi.arity();
    let mut out = phi.eval(&args[1..]).left_mul(&proj.pullback(&args[0]));
    for i in 1..=k {
        let mut merged: Vec<Polynomial> = args[..i - 1].to_vec();
        merged.push(&args[i - 1] * &args[i]);
        merged.extend_from_slice(&args[i + 1..]);
        let sign = if i % 2 == 0 { 1 } else { -1 };
        out.add_assign_ref(&phi.eval(&merged).scale(&Scalar::from_int(sign)));
    }
    let last = right_mul(&phi.eval(&args[..k]), &args[k], proj);
    let sign = if k.is_multiple_of(2) { -1 } else { 1 };
    out.add_assign_ref(&last.scale(&Scalar::from_int(sign)));
    out
}

fn fibration() -> Projection {
    Projection::new(&Space::coordinates("x", 2), &Space::fibered("y", 2, 1)).unwrap()
}

#[test]
fn hochschild_differential_matches_evaluation() {
    let mut smp = Sampler::new(11, "delta-eval").with_degree(2).with_terms(3);
    let proj = fibration();
    for k in 0..=2 {
        let phi = smp.function_cochain(&proj, k, 2);
        let psi = smp.diffop_cochain(&proj, k, 2);
        let dphi = hochschild_differential(&phi);
        let dpsi = hochschild_differential(&psi);
        for _ in 0..3 {
            let args: Vec<Polynomial> = (0..=k).map(|_| smp.poly(proj.base())).collect();
            assert_eq!(dphi.eval(&args), delta_oracle(&phi, &args));
            assert_eq!(dpsi.eval(&args), delta_oracle(&psi, &args));
        }
    }
}

#[test]
fn hochschild_differential_squares_to_zero() {
    let mut smp = Sampler::new(11, "delta2").with_degree(2).with_terms(3);
    let proj = fibration();
    for k in 0..=3 {
        let phi = smp.function_cochain(&proj, k, 2);
        assert!(hochschild_differential(&hochschild_differential(&phi)).is_zero(), "functions k={k}");
        let psi = smp.diffop_cochain(&proj, k, 1);
        assert!(hochschild_differential(&hochschild_differential(&psi)).is_zero(), "diffops k={k}");
    }
}

#[test]
fn antisymmetrization_kills_coboundaries() {
    let mut smp = Sampler::new(11, "alt").with_degree(2).with_terms(3);
    let s = Space::coordinates("x", 2);
    let proj = Projection::identity(&s);
    for k in 0..=2 {
        for _ in 0..5 {
            let psi = smp.function_cochain(&proj, k, 2);
            let d = hochschild_differential(&psi);
            assert!(antisymmetrize(&d).is_zero());
            assert!(class_of(&d).unwrap().is_zero());
            let alt = antisymmetrize(&psi);
            assert_eq!(antisymmetrize(&alt), alt);
        }
    }
}

fn random_vertical_koszul(smp: &mut Sampler, proj: &Projection, k: usize, skip_base: bool) -> KoszulCochain<DiffOp> {
    let m = proj.base().dim();
    let terms: Vec<_> = increasing_tuples(m, k)
        .into_iter()
        .filter(|i| !skip_base || i.iter().all(|&j| j >= proj.rank()))
        .map(|i| (i, smp.diffop(proj.total(), 2).vertical_part()))
        .collect();
    KoszulCochain::from_terms(proj, k, terms).unwrap()
}

#[test]
fn class_of_inverts_g_tilde_modulo_coboundaries() {
    let mut smp = Sampler::new(11, "class").with_degree(2).with_terms(3);
    let proj = Projection::new(&Space::coordinates("x", 3), &Space::fibered("y", 3, 1)).unwrap();
    for k in 0..=2 {
        for _ in 0..4 {
            let eta = random_vertical_koszul(&mut smp, &proj, k, true);
            let g = g_tilde(&eta);
            assert!(is_cocycle(&g));
            assert_eq!(class_of(&g).unwrap(), eta);
            let psi = smp.diffop_cochain(&proj, k.saturating_sub(1), 1);
            if k > 0 {
                let shifted = g.add(&hochschild_differential(&psi));
                assert_eq!(class_of(&shifted).unwrap(), eta, "k={k}");
            }
        }
    }
    let s = Space::coordinates("x", 3);
    let id = Projection::identity(&s);
    for k in 0..=3 {
        let terms: Vec<_> = increasing_tuples(3, k).into_iter().map(|i| (i, smp.poly(&s))).collect();
        let eta = KoszulCochain::from_terms(&id, k, terms).unwrap();
        assert_eq!(class_of(&g_tilde(&eta)).unwrap(), eta);
    }
}

#[test]
fn xi_round_trips_and_intertwines() {
    let mut smp = Sampler::new(11, "xi").with_degree(2).with_terms(3);
    let proj = fibration();
    let bar = BarComplex::new(2, 3);
    for _ in 0..20 {
        let phi = smp.diffop_cochain(&proj, 1, 2);
        let psi = xi_inverse(&phi);
        assert_eq!(xi(&psi).unwrap(), phi);
        let args: Vec<Polynomial> = (0..2).map(|_| smp.poly(proj.base())).collect();
        let chain = bar.bar_differential(&bar.tensor(&args)).unwrap();
        assert_eq!(psi.eval(&bar, &chain), hochschild_differential(&phi).eval(&args));
    }
    let c = smp.diffop(proj.total(), 1);
    let zero = MultiDiffOp::constant(&proj, c.clone());
    assert_eq!(xi(&xi_inverse(&zero)).unwrap().eval(&[]), c);
    let broken = BarCochain::from_terms(&proj, 0, [((vec![], MultiIndex::unit(2, 0)), c)]);
    assert!(xi(&broken).is_err());
}

#[test]
fn g_tilde_is_pullback_along_g() {
    let mut smp = Sampler::new(11, "gstar").with_degree(2).with_terms(3);
    let proj = fibration();
    let bar = BarComplex::new(2, 3);
    for k in 1..=2 {
        let eta = random_vertical_koszul(&mut smp, &proj, k, false);
        let g = g_tilde(&eta);
        let args: Vec<Polynomial> = (0..k).map(|_| smp.poly(proj.base())).collect();
        let pulled = eta.eval_chain(&bar, &bar.chain_map_g(&bar.tensor(&args)));
        let kfact = Scalar::from_int(if k == 1 { 1 } else { 2 });
        assert_eq!(pulled.scale(&kfact), g.eval(&args));
    }
}
