use dqhkr::diffop::DiffOp;
use dqhkr::poly::{Polynomial, Space};
use dqhkr::sample::Sampler;
use dqhkr::scalar::Scalar;
use dqhkr::series::FormalSeries;
use dqhkr::star::{EquivalenceOp, StarProduct};

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn moyal(cap: usize) -> StarProduct {
    let m = Space::coordinates("x", 2);
    StarProduct::constant_coefficient(&m, &[vec![s(0), s(1)], vec![s(0), s(0)]], cap).unwrap()
}

/// `x¹∂₁` and `∂₂` commute but are not constant-coefficient.
fn euler_fields() -> (Space, Vec<DiffOp>) {
    let m = Space::coordinates("x", 2);
    let x1d1 = DiffOp::partial(&m, 0).left_mul(&Polynomial::var(&m, 0));
    (m.clone(), vec![x1d1, DiffOp::partial(&m, 1)])
}

/// `C_r(a, b) = (1/r!) Σ A^{i₁j₁}⋯A^{i_r j_r} (X_{i₁}⋯X_{i_r} a)(X_{j₁}⋯X_{j_r} b)`
/// by direct application of the fields.
fn exp_oracle(fields: &[DiffOp], a_mat: &[Vec<Scalar>], r: usize, a: &Polynomial, b: &Polynomial) -> Polynomial {
    let p = fields.len();
    let mut acc = Polynomial::zero(a.space());
    let total = p.pow(2 * r as u32);
    for code in 0..total {
        let mut c = code;
        let mut is = Vec::new();
        let mut js = Vec::new();
        for _ in 0..r {
            is.push(c % p);
            c /= p;
            js.push(c % p);
            c /= p;
        }
        let mut w = Scalar::one();
        for (i, j) in is.iter().zip(&js) {
            w = &w * &a_mat[*i][*j];
        }
        if w.is_zero() {
            continue;
        }
        let mut fa = a.clone();
        let mut fb = b.clone();
        for (i, j) in is.iter().zip(&js) {
            fa = fields[*i].apply(&fa);
            fb = fields[*j].apply(&fb);
        }
        acc.add_assign_ref(&(&fa * &fb).scale(&w));
    }
    acc.scale(&Scalar::inv_factorial(r as u32))
}

#[test]
fn moyal_examples() {
    let star = moyal(3);
    let m = star.space().clone();
    let x1 = Polynomial::var(&m, 0);
    let x2 = Polynomial::var(&m, 1);
    let p = star.star(&x1, &x2);
    assert_eq!(p.coeff(0), &(&x1 * &x2));
    assert_eq!(p.coeff(1), &Polynomial::one(&m));
    assert!(star.star(&x2, &x1).coeff(1).is_zero());
    let sq = star.star(&x1.pow(2), &x2.pow(2));
    assert_eq!(sq.coeff(1), &(&x1 * &x2).scale(&s(4)));
    assert_eq!(sq.coeff(2), &Polynomial::constant(&m, s(2)));
    assert_eq!(star.poisson_bracket(&x1, &x2).unwrap(), Polynomial::constant(&m, Scalar::i() * Scalar::ratio(1, 2)));
}

#[test]
fn exp_star_matches_direct_expansion() {
    let (m, fields) = euler_fields();
    let a_mat = vec![vec![s(1), s(2)], vec![s(-1), s(0)]];
    let star = StarProduct::exp_star(&fields, &a_mat, 3).unwrap();
    let mut rng = Sampler::new(11, "exp-oracle");
    for _ in 0..20 {
        let a = rng.poly(&m);
        let b = rng.poly(&m);
        for r in 0..=3 {
            assert_eq!(star.c(r, &a, &b), exp_oracle(&fields, &a_mat, r, &a, &b), "r = {r}");
        }
    }
}

#[test]
fn exp_star_is_associative_and_unital() {
    let (m, fields) = euler_fields();
    let configs = [
        StarProduct::exp_star(&fields, &[vec![s(1), s(2)], vec![s(-1), s(0)]], 3).unwrap(),
        moyal(3),
        StarProduct::constant_coefficient(&m, &[vec![s(1), Scalar::i()], vec![s(-3), Scalar::ratio(1, 2)]], 3).unwrap(),
    ];
    for (n, star) in configs.iter().enumerate() {
        assert!(star.is_unital());
        let mut rng = Sampler::new(5, &format!("assoc-{n}"));
        let one = Polynomial::one(&m);
        for _ in 0..50 {
            let (a, b, c) = (rng.poly(&m), rng.poly(&m), rng.poly(&m));
            for r in 0..=3 {
                assert!(star.associativity_defect(&a, &b, &c, r).is_zero(), "config {n}, order {r}");
            }
            assert_eq!(star.star(&one, &a), FormalSeries::constant(3, a.clone()));
            assert_eq!(star.star(&a, &one), FormalSeries::constant(3, a.clone()));
            assert_eq!(star.star(&a, &b).coeff(0), &(&a * &b));
        }
        for r in 0..=3 {
            assert!(star.associator(r).is_zero());
        }
    }
}

#[test]
fn zero_matrix_gives_pointwise_product() {
    let m = Space::coordinates("x", 2);
    let star = StarProduct::constant_coefficient(&m, &[vec![s(0), s(0)], vec![s(0), s(0)]], 3).unwrap();
    let mut rng = Sampler::new(2, "zero");
    for _ in 0..20 {
        let (a, b) = (rng.poly(&m), rng.poly(&m));
        assert_eq!(star.star(&a, &b), FormalSeries::constant(3, &a * &b));
    }
}

#[test]
fn corrupted_second_order_is_caught() {
    let star = moyal(3);
    let m = star.space().clone();
    let bad = star.with_cochain(2, star.cochain(2).scale(&s(2)));
    assert!(!bad.associator(2).is_zero());
    let mut rng = Sampler::new(3, "corrupt");
    let inputs = rng.polys(&m, 12);
    let mut found = false;
    'outer: for a in &inputs {
        for b in &inputs {
            for c in &inputs {
                assert!(bad.associativity_defect(a, b, c, 1).is_zero());
                if !bad.associativity_defect(a, b, c, 2).is_zero() {
                    found = true;
                    break 'outer;
                }
            }
        }
    }
    assert!(found, "no witness triple for the corrupted C₂");
}

#[test]
fn poisson_bracket_properties() {
    let (m, fields) = euler_fields();
    let stars = [moyal(2), StarProduct::exp_star(&fields, &[vec![s(0), s(1)], vec![s(-1), s(0)]], 2).unwrap()];
    for star in &stars {
        let mut rng = Sampler::new(9, "poisson");
        for _ in 0..20 {
            let (f, g, h) = (rng.poly(&m), rng.poly(&m), rng.poly(&m));
            let pb = |a: &Polynomial, b: &Polynomial| star.poisson_bracket(a, b).unwrap();
            assert!(pb(&f, &f).is_zero());
            assert_eq!(pb(&f, &g), -&pb(&g, &f));
            assert_eq!(pb(&f, &(&g * &h)), &(&pb(&f, &g) * &h) + &(&g * &pb(&f, &h)));
            let jac = &(&pb(&f, &pb(&g, &h)) + &pb(&g, &pb(&h, &f))) + &pb(&h, &pb(&f, &g));
            assert!(jac.is_zero());
        }
    }
    assert!(StarProduct::trivial(&m, 0).poisson_bracket(&Polynomial::var(&m, 0), &Polynomial::var(&m, 1)).is_err());
}

fn random_equivalence(rng: &mut Sampler, m: &Space, cap: usize) -> EquivalenceOp {
    let one = Polynomial::one(m);
    let mut ops = vec![DiffOp::identity(m)];
    for _ in 0..cap {
        let d = rng.diffop(m, 2);
        let c = d.apply(&one);
        ops.push(d.sub(&DiffOp::multiplication(&c)));
    }
    EquivalenceOp::new(ops).unwrap()
}

#[test]
fn equivalences_preserve_bracket_unit_and_associativity() {
    let star = moyal(3);
    let m = star.space().clone();
    let mut rng = Sampler::new(4, "equivalence").with_degree(2).with_terms(2);
    assert_eq!(star.apply_equivalence(&EquivalenceOp::identity(&m, 3)).unwrap(), star);
    for _ in 0..5 {
        let t = random_equivalence(&mut rng, &m, 3);
        let sp = star.apply_equivalence(&t).unwrap();
        assert!(sp.is_unital());
        assert_eq!(sp.poisson_cochain().unwrap(), star.poisson_cochain().unwrap());
        for r in 0..=3 {
            assert!(sp.associator(r).is_zero());
        }
        // T(f ⋆' g) = T f ⋆ T g
        for _ in 0..5 {
            let (f, g) = (rng.poly(&m), rng.poly(&m));
            let lhs = t.apply(&sp.star(&f, &g));
            let tf = t.apply(&FormalSeries::constant(3, f.clone()));
            let tg = t.apply(&FormalSeries::constant(3, g.clone()));
            assert_eq!(lhs, star.multiply(&tf, &tg).unwrap());
        }
    }
    let bad = EquivalenceOp::new(vec![DiffOp::partial(&m, 0)]);
    assert!(bad.is_err());
}

#[test]
fn squared_parameter_kills_the_bracket() {
    let star = moyal(3).reparametrize(2);
    let m = star.space().clone();
    assert!(star.poisson_cochain().unwrap().is_zero());
    assert_eq!(star.cochain(2), moyal(3).cochain(1));
    for r in 0..=3 {
        assert!(star.associator(r).is_zero());
    }
    assert!(star.poisson_bracket(&Polynomial::var(&m, 0), &Polynomial::var(&m, 1)).unwrap().is_zero());
}
