//! Seeded verification suites. Each returns a [`Report`] with one entry per
//! identity; the CLI and the acceptance runner are thin wrappers.
//!
//! Deformation suites work on the base `ℝ²` with a constant-coefficient star
//! product and the trivial bundle `ℝ² × ℝ`; flat horizontal lifts come from
//! the gauge family.

use serde_json::json;

use crate::cohomology::{hkr_compare, Truncation};
use crate::deformation::{
    build_bimodule_from_sp, check_sp_properties, curvature, lift_star_product, modify_bimodule, obstruction_e,
    obstruction_r, sp_bracket_of, subalgebra_bracket, twisted_bracket, witness_of, BimoduleStructure, HorizontalLift,
    OperatorCochain, QModifier, SPBracket, Witness,
};
use crate::diffop::{DiffOp, Projection};
use crate::error::{Error, Result};
use crate::hochschild::{antisymmetrize, check_cocycle, class_of, hochschild_differential, CocycleCheck};
use crate::koszul::{g_tilde, increasing_tuples, BarChain, BarComplex, KoszulChain, KoszulCochain};
use crate::multidiff::{ModuleValue, MultiDiffOp};
use crate::poly::{MultiIndex, Polynomial, Space};
use crate::report::{Report, Table};
use crate::sample::{derive_seed, Sampler};
use crate::scalar::Scalar;
use crate::star::{PoissonStructure, StarProduct};

/// Parses `"0 1; 0 0"` (rows separated by `;`, entries by spaces or commas)
/// into a square matrix of scalars such as `1/2` or `-i`.
pub fn parse_matrix(src: &str) -> Result<Vec<Vec<Scalar>>> {
    let empty = Space::new(Vec::new(), 0);
    let rows: Vec<Vec<Scalar>> = src
        .split(';')
        .map(|row| {
            row.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|e| !e.is_empty())
                .map(|e| {
                    let p = Polynomial::parse(&empty, e).map_err(|_| Error::Config(format!("bad matrix entry `{e}`")))?;
                    Ok(p.constant_term())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!("matrix `{src}` is not square")));
    }
    Ok(rows)
}

fn matrix_string(a: &[Vec<Scalar>]) -> String {
    a.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join("; ")
}

fn cocycle_witness<V: ModuleValue>(phi: &MultiDiffOp<V>) -> Option<String> {
    match check_cocycle(phi) {
        CocycleCheck::Closed => None,
        CocycleCheck::Witness { args, residual } => {
            let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            Some(format!("δφ({}) = {residual}", args.join(", ")))
        }
    }
}

/// First failing sample, as a check outcome.
fn first_failure<T>(items: impl IntoIterator<Item = T>, mut test: impl FnMut(T) -> Option<String>) -> Option<String> {
    items.into_iter().find_map(&mut test)
}

/// Like [`first_failure`] for fallible tests; an error counts as a failure.
fn holds<T: Copy>(
    items: impl IntoIterator<Item = T>,
    mut test: impl FnMut(T) -> Result<bool>,
    show: impl Fn(T) -> String,
) -> Option<String> {
    items.into_iter().find_map(|x| match test(x) {
        Ok(true) => None,
        Ok(false) => Some(show(x)),
        Err(e) => Some(format!("{}: {e}", show(x))),
    })
}

/// `assoc`: associativity, unit and Poisson-bracket identities of the
/// constant-coefficient star product with matrix `a`.
pub fn assoc(a: &[Vec<Scalar>], order: usize, samples: usize, seed: u64) -> Result<Report> {
    let space = Space::coordinates("x", a.len());
    let star = StarProduct::constant_coefficient(&space, a, order)?;
    let mut report = Report::new("assoc", json!({"A": matrix_string(a), "order": order, "samples": samples}), seed);
    let mut rng = Sampler::new(seed, "assoc");
    let triples: Vec<[Polynomial; 3]> = (0..samples).map(|_| [rng.poly(&space), rng.poly(&space), rng.poly(&space)]).collect();
    for r in 0..=order {
        let w = first_failure(&triples, |[a, b, c]| {
            let d = star.associativity_defect(a, b, c, r);
            (!d.is_zero()).then(|| format!("a = {a}, b = {b}, c = {c}: defect {d}"))
        });
        report.check(format!("associativity defect at order {r}"), w);
    }
    report.pass_if("unital: C_r(1, b) = C_r(a, 1) = 0", star.is_unital(), || "a cochain sees constants".into());
    let w = first_failure(&triples, |[a, b, _]| {
        let p = star.star(a, b);
        (p.coeff(0) != &(a * b)).then(|| format!("a = {a}, b = {b}"))
    });
    report.check("a ⋆ b = ab mod λ", w);
    if order >= 1 {
        let pb = |f: &Polynomial, g: &Polynomial| star.poisson_bracket(f, g).expect("order ≥ 1");
        let w = first_failure(&triples, |[f, g, _]| (pb(f, g) != -&pb(g, f)).then(|| format!("f = {f}, g = {g}")));
        report.check("Poisson bracket antisymmetry", w);
        let w = first_failure(&triples, |[f, g, h]| {
            let lhs = pb(f, &(g * h));
            (lhs != &(&pb(f, g) * h) + &(g * &pb(f, h))).then(|| format!("f = {f}, g = {g}, h = {h}"))
        });
        report.check("Poisson bracket Leibniz rule", w);
        let w = first_failure(&triples, |[f, g, h]| {
            let j = &(&pb(f, &pb(g, h)) + &pb(g, &pb(h, f))) + &pb(h, &pb(f, g));
            (!j.is_zero()).then(|| format!("f = {f}, g = {g}, h = {h}: {j}"))
        });
        report.check("Poisson bracket Jacobi identity", w);
    }
    Ok(report)
}

struct Fibered {
    m: Space,
    p: Space,
    proj: Projection,
    star: StarProduct,
    poisson: PoissonStructure,
}

fn fibered(order: usize) -> Result<Fibered> {
    let m = Space::coordinates("x", 2);
    let p = Space::fibered("y", 3, 2);
    let proj = Projection::new(&m, &p)?;
    let a = vec![vec![Scalar::zero(), Scalar::one()], vec![Scalar::zero(), Scalar::zero()]];
    let star = StarProduct::constant_coefficient(&m, &a, order)?;
    let poisson = star.poisson_structure()?;
    Ok(Fibered { m, p, proj, star, poisson })
}

fn gauge_lift(fx: &Fibered, seed: u64, config: usize) -> Result<HorizontalLift> {
    let mut rng = Sampler::new(seed, &format!("gauge-{config}")).with_degree(2).with_terms(2);
    let c = [Scalar::from_int(rng.int(-2, 2)), Scalar::from_int(rng.int(-2, 2))];
    let g = rng.poly(&fx.m);
    let p = rng.poly_in(&fx.p, &[2]);
    HorizontalLift::gauge(&fx.proj, &c, &g, &p)
}

fn equivalence_series(rng: &mut Sampler, space: &Space, cap: usize) -> Vec<DiffOp> {
    let mut t = vec![DiffOp::identity(space)];
    t.extend((0..cap).map(|_| rng.diffop(space, 1)));
    t
}

fn witness_string(w: &Witness) -> String {
    w.to_string()
}

fn module_witness(b: &BimoduleStructure, order: usize) -> Option<String> {
    b.check_to_order(order).first().map(|(what, w)| format!("{what}: {w}"))
}

/// Aggregates per-configuration outcomes into one check.
struct Tally {
    name: String,
    witness: Option<String>,
}

impl Tally {
    fn new(name: impl Into<String>) -> Self {
        Tally { name: name.into(), witness: None }
    }

    fn record(&mut self, config: usize, w: Option<String>) {
        if self.witness.is_none() {
            self.witness = w.map(|w| format!("config {config}: {w}"));
        }
    }

    fn fail(&mut self, config: usize, e: Error) {
        self.record(config, Some(e.to_string()));
    }

    fn finish(self, report: &mut Report) {
        report.check(self.name, self.witness);
    }
}

/// A closed operator cochain `G̃η + δD` with vertical `η`.
fn closed_perturbation(fx: &Fibered, rng: &mut Sampler) -> Result<OperatorCochain> {
    let v = rng.diffop(&fx.p, 1).vertical_part();
    let eta = KoszulCochain::from_terms(&fx.proj, 1, [(vec![rng.index(2)], v)])?;
    let d = rng.diffop(&fx.p, 1);
    Ok(g_tilde(&eta).add(&hochschild_differential(&MultiDiffOp::constant(&fx.proj, d))))
}

/// `obstruction`: closedness of `R_r` and `E_r` over `configs` seeded
/// module structures, and that the next order solves them.
pub fn obstruction(order: usize, configs: usize, seed: u64) -> Result<Report> {
    if order < 1 {
        return Err(Error::Config("obstruction needs --order ≥ 1".into()));
    }
    let fx = fibered(order)?;
    let mut report = Report::new("obstruction", json!({"order": order, "configs": configs}), seed);
    let mut rng = Sampler::new(seed, "obstruction").with_degree(1).with_terms(2);
    let mut r_closed = Tally::new("δR_r = 0");
    let mut r_solved = Tally::new("δL_{r+1} = R_r on extendable structures");
    let mut e_closed = Tally::new("δE_r = 0");
    let mut e_solved = Tally::new("δT_{r+1} = −E_r");
    for c in 0..configs {
        let mut run = || -> Result<()> {
            let lift = gauge_lift(&fx, seed, c)?;
            let b = build_bimodule_from_sp(&fx.star, &lift.bracket(&fx.poisson))?;
            let t = equivalence_series(&mut rng, &fx.p, order);
            let base = b.left().clone();
            let ms = base.conjugate(&t)?;
            if c % 2 == 0 {
                for r in 0..order {
                    let obs = obstruction_r(&ms, r)?;
                    r_closed.record(c, cocycle_witness(&obs).map(|w| format!("r = {r}: {w}")));
                    let diff = hochschild_differential(ms.op(r + 1)).sub(&obs);
                    r_solved.record(c, witness_of(&diff, r).map(|w| witness_string(&w)));
                }
            } else {
                let pert = closed_perturbation(&fx, &mut rng)?;
                // a closed first-order perturbation keeps R_1 closed
                let pm = ms.with_op(1, ms.op(1).add(&pert)).truncate(2);
                let obs = obstruction_r(&pm, 1)?;
                r_closed.record(c, cocycle_witness(&obs).map(|w| format!("perturbed, r = 1: {w}")));
            }
            for r in 0..order {
                let e = obstruction_e(&base, &ms, &t, r)?;
                e_closed.record(c, cocycle_witness(&e).map(|w| format!("r = {r}: {w}")));
                let dt = hochschild_differential(&MultiDiffOp::constant(&fx.proj, t[r + 1].clone()));
                e_solved.record(c, witness_of(&e.add(&dt), r).map(|w| witness_string(&w)));
            }
            Ok(())
        };
        if let Err(e) = run() {
            r_closed.fail(c, e);
        }
    }
    for t in [r_closed, r_solved, e_closed, e_solved] {
        t.finish(&mut report);
    }
    Ok(report)
}

fn sample_triples(rng: &mut Sampler, fx: &Fibered, n: usize) -> Vec<(Polynomial, Polynomial, Polynomial)> {
    (0..n).map(|_| (rng.poly(&fx.m), rng.poly(&fx.m), rng.poly(&fx.p))).collect()
}

fn sp_witness(name: &str, w: &Option<Witness>) -> Option<String> {
    w.as_ref().map(|w| format!("{name}: {w}"))
}

/// `sp-check`: sP-bracket identities of `sp_bracket_of` outputs, vanishing
/// curvature, and the twisted negative control.
pub fn sp_check(configs: usize, samples: usize, seed: u64) -> Result<Report> {
    let fx = fibered(1)?;
    let identity = Projection::identity(&fx.m);
    let pc = fx.poisson.cochain(&identity);
    let mut report = Report::new("sp-check", json!({"configs": configs, "samples": samples}), seed);
    let mut rng = Sampler::new(seed, "sp-check");
    let triples = sample_triples(&mut rng, &fx, samples);
    let mut tallies = [
        Tally::new("sp_bracket_of: (i) derivation in a"),
        Tally::new("sp_bracket_of: (ii) Leibniz over pr*"),
        Tally::new("sp_bracket_of: (iii) Jacobi"),
        Tally::new("fiber-preserving and natural"),
        Tally::new("curvature vanishes on samples"),
    ];
    for c in 0..configs {
        let br = match gauge_lift(&fx, seed, c).and_then(|l| build_bimodule_from_sp(&fx.star, &l.bracket(&fx.poisson))).and_then(|b| sp_bracket_of(&b)) {
            Ok(br) => br,
            Err(e) => {
                tallies[0].fail(c, e);
                continue;
            }
        };
        let rep = check_sp_properties(&br, &pc);
        tallies[0].record(c, sp_witness("i", &rep.derivation));
        tallies[1].record(c, sp_witness("ii", &rep.leibniz));
        tallies[2].record(c, sp_witness("iii", &rep.jacobi));
        tallies[3].record(c, sp_witness("constants", &rep.constants).or(sp_witness("fiber", &rep.fiber_preserving)).or(sp_witness("natural", &rep.natural)));
        let w = first_failure(&triples, |(a, b, f)| {
            let k = curvature(&br, &fx.poisson, a, b, f);
            (!k.is_zero()).then(|| format!("a = {a}, b = {b}, f = {f}: {k}"))
        });
        tallies[4].record(c, w);
    }
    for t in tallies {
        t.finish(&mut report);
    }

    let twisted = twisted_bracket(&HorizontalLift::trivial(&fx.proj).bracket(&fx.poisson))?;
    let rep = check_sp_properties(&twisted, &pc);
    let detected = match &rep.jacobi {
        Some(w) => !curvature(&twisted, &fx.poisson, &w.args[0], &w.args[1], &w.f).is_zero(),
        None => false,
    };
    report.pass_if("twisted control: Jacobi fails with nonzero curvature witness", detected, || "no witness found".into());
    report.pass_if("twisted control: derivation and Leibniz still hold", rep.derivation.is_none() && rep.leibniz.is_none(), || "unexpected failure".into());
    let zero = check_sp_properties(&SPBracket::zero(&fx.proj), &PoissonStructure::zero(&fx.m).cochain(&identity));
    report.pass_if("zero bracket over zero Poisson structure", zero == Default::default(), || format!("{zero:?}"));
    Ok(report)
}

/// `bimodule`: build, verify and modify bimodule deformations.
pub fn bimodule(order: usize, configs: usize, samples: usize, seed: u64) -> Result<Report> {
    if order < 1 {
        return Err(Error::Config("bimodule needs --order ≥ 1".into()));
    }
    let fx = fibered(order)?;
    let mut report = Report::new("bimodule", json!({"order": order, "configs": configs, "samples": samples}), seed);
    let mut rng = Sampler::new(seed, "bimodule");
    let mut valid = Tally::new(format!("flat-lift bimodule: module and compatibility to order {order}"));
    let mut recovers = Tally::new("sp_bracket_of recovers the bracket");
    let mut fiber = Tally::new("fiber-preserving: a • 1 = pr*a and 1 •' a = pr*a");
    let mut two_stars = Tally::new("a • pr*b = pr*(a ⋆ b) = pr*a •' b");
    let mut invariant = Tally::new("sP-bracket invariant under bimodule equivalence");
    let mut teq = Sampler::new(seed, "bimodule-equivalence").with_degree(1).with_terms(2);
    for c in 0..configs {
        let built = gauge_lift(&fx, seed, c).and_then(|l| {
            let br = l.bracket(&fx.poisson);
            Ok((build_bimodule_from_sp(&fx.star, &br)?, br))
        });
        let (b, br) = match built {
            Ok(x) => x,
            Err(e) => {
                valid.fail(c, e);
                continue;
            }
        };
        valid.record(c, module_witness(&b, order));
        recovers.record(c, match sp_bracket_of(&b) {
            Ok(x) if x == br => None,
            Ok(_) => Some("different bracket".into()),
            Err(e) => Some(e.to_string()),
        });
        let fp = b.left().is_fiber_preserving() && b.right().is_fiber_preserving();
        fiber.record(c, (!fp).then(|| "a • 1 ≠ pr*a".into()));
        let w = first_failure(0..samples, |_| {
            let (a, q) = (rng.poly(&fx.m), rng.poly(&fx.m));
            let expected = fx.star.star(&a, &q).map(|x| fx.proj.pullback(x));
            let ok = b.left().act(&a, &fx.proj.pullback(&q)) == expected && b.right().act(&q, &fx.proj.pullback(&a)) == expected;
            (!ok).then(|| format!("a = {a}, b = {q}"))
        });
        two_stars.record(c, w);
        let t = equivalence_series(&mut teq, &fx.p, order);
        invariant.record(c, match b.conjugate(&t).and_then(|bt| Ok((sp_bracket_of(&bt)?, module_witness(&bt, order)))) {
            Ok((x, None)) if x == br => None,
            Ok((_, Some(w))) => Some(format!("conjugate is not a bimodule: {w}")),
            Ok(_) => Some("bracket changed".into()),
            Err(e) => Some(e.to_string()),
        });
    }
    for t in [valid, recovers, fiber, two_stars, invariant] {
        t.finish(&mut report);
    }

    let br = HorizontalLift::trivial(&fx.proj).bracket(&fx.poisson);
    let b = build_bimodule_from_sp(&fx.star, &br)?;
    let dv = DiffOp::partial(&fx.p, 2);
    let q = QModifier::new(vec![(DiffOp::partial(&fx.m, 0), dv.clone()), (DiffOp::partial(&fx.m, 1), dv.compose(&dv))]);
    match modify_bimodule(&b, &q, 1) {
        Ok(b2) => {
            report.check(format!("e^(λQ): module and compatibility to order {order}"), module_witness(&b2, order));
            report.pass_if("e^(λQ): right module unchanged", b2.right() == b.right(), || "right module differs".into());
            let half_i = Scalar::i() * Scalar::ratio(1, 2);
            let shift = MultiDiffOp::from_terms(
                &fx.proj,
                1,
                q.pairs().iter().enumerate().map(|(i, (_, d))| (vec![MultiIndex::unit(2, i)], d.scale(&half_i))),
            );
            let expected = br.add(&SPBracket::new(shift)?);
            let got = sp_bracket_of(&b2);
            let w = match &got {
                Ok(x) => witness_of(&x.op().sub(expected.op()), 0).map(|w| w.to_string()),
                Err(e) => Some(e.to_string()),
            };
            report.check("e^(λQ): sP-bracket shifted by (i/2) pr*E_i(a) D_i(f)", w);
        }
        Err(e) => report.check("e^(λQ): modification accepted", Some(e.to_string())),
    }
    match modify_bimodule(&b, &q, 2) {
        Ok(b3) => {
            let ok = b3.right() == b.right() && b3.left() != b.left() && sp_bracket_of(&b3).map(|x| x == br).unwrap_or(false);
            report.pass_if("e^(λ²Q): same right module and bracket, new left module", ok, || "unexpected change".into());
            report.check(format!("e^(λ²Q): module and compatibility to order {order}"), module_witness(&b3, order));
        }
        Err(e) => report.check("e^(λ²Q): modification accepted", Some(e.to_string())),
    }
    let d1 = DiffOp::partial(&fx.m, 0);
    let invalid = [
        QModifier::new(vec![(d1.compose(&d1), dv.clone())]),
        QModifier::new(vec![(d1.clone(), DiffOp::partial(&fx.p, 0))]),
        QModifier::new(vec![(d1.clone(), dv.clone()), (d1.clone(), dv.left_mul(&Polynomial::var(&fx.p, 2)))]),
    ];
    let accepted = invalid.iter().position(|q| modify_bimodule(&b, q, 1).is_ok());
    report.check("invalid modifiers rejected", accepted.map(|i| format!("modifier {} accepted", i + 1)));
    Ok(report)
}

/// `subalgebra`: lifted star products contain the base as a subalgebra.
pub fn subalgebra(order: usize, configs: usize, samples: usize, seed: u64) -> Result<Report> {
    let fx = fibered(order)?;
    let flat = fx.p.flattened();
    let identity = Projection::identity(&fx.m);
    let mut report = Report::new("subalgebra", json!({"order": order, "configs": configs, "samples": samples}), seed);
    let mut rng = Sampler::new(seed, "subalgebra");
    let mut assoc_t = Tally::new(format!("lifted star product associative to order {order}"));
    let mut sub_t = Tally::new("pr*(a ⋆ b) = pr*a ⋆_P pr*b");
    let mut pb_t = Tally::new("pr*{a, b} = {pr*a, pr*b}_P");
    let mut unit_t = Tally::new("pr*a ⋆_P 1 = pr*a");
    let mut br_t = Tally::new("induced sP-bracket is the lift bracket and satisfies the identities");
    let mut curv_t = Tally::new("curvature of the induced lift vanishes");
    let up = |a: &Polynomial| fx.proj.pullback(a).with_space(&flat).expect("same names");
    for c in 0..configs {
        let lifted = gauge_lift(&fx, seed, c).and_then(|l| Ok((lift_star_product(&fx.star, &l)?, l)));
        let (sp, lift) = match lifted {
            Ok(x) => x,
            Err(e) => {
                assoc_t.fail(c, e);
                continue;
            }
        };
        assoc_t.record(c, (0..=order).find(|&r| !sp.associator(r).is_zero()).map(|r| format!("associator at order {r}")));
        let pairs: Vec<(Polynomial, Polynomial)> = (0..samples).map(|_| (rng.poly(&fx.m), rng.poly(&fx.m))).collect();
        sub_t.record(c, first_failure(&pairs, |(a, b)| {
            (sp.star(&up(a), &up(b)) != fx.star.star(a, b).map(up)).then(|| format!("a = {a}, b = {b}"))
        }));
        if order >= 1 {
            pb_t.record(c, holds(
                &pairs,
                |(a, b)| Ok(sp.poisson_bracket(&up(a), &up(b))? == up(&fx.poisson.bracket(a, b))),
                |(a, b)| format!("a = {a}, b = {b}"),
            ));
        }
        let one = Polynomial::one(&flat);
        unit_t.record(c, first_failure(&pairs, |(a, _)| {
            (sp.star(&up(a), &one) != crate::series::FormalSeries::constant(order, up(a))).then(|| format!("a = {a}"))
        }));
        if order >= 1 {
            match subalgebra_bracket(&sp, &fx.proj) {
                Ok(br) => {
                    let ok = br == lift.bracket(&fx.poisson) && check_sp_properties(&br, &fx.poisson.cochain(&identity)).is_sp_bracket();
                    br_t.record(c, (!ok).then(|| "bracket differs or fails an identity".into()));
                    curv_t.record(c, first_failure(0..samples, |_| {
                        let (a, b, f) = (rng.poly(&fx.m), rng.poly(&fx.m), rng.poly(&fx.p));
                        let k = curvature(&br, &fx.poisson, &a, &b, &f);
                        (!k.is_zero()).then(|| format!("a = {a}, b = {b}, f = {f}: {k}"))
                    }));
                }
                Err(e) => br_t.fail(c, e),
            }
        }
    }
    let mut tallies = vec![assoc_t, sub_t, unit_t];
    if order >= 1 {
        tallies.extend([pb_t, br_t, curv_t]);
    }
    for t in tallies {
        t.finish(&mut report);
    }
    let bent = HorizontalLift::new(
        &fx.proj,
        vec![DiffOp::partial(&fx.p, 0).add(&DiffOp::partial(&fx.p, 2).left_mul(&Polynomial::var(&fx.p, 1))), DiffOp::partial(&fx.p, 1)],
    )?;
    let rejected = matches!(lift_star_product(&fx.star, &bent), Err(Error::NonFlat { .. }));
    report.pass_if("non-flat lift rejected", rejected, || "non-flat lift accepted".into());
    Ok(report)
}

fn random_chain(bar: &BarComplex, rng: &mut Sampler, k: usize) -> BarChain {
    bar.chain(k, rng.poly(bar.space(k))).expect("sampled on the right space")
}

fn random_koszul(bar: &BarComplex, rng: &mut Sampler, k: usize) -> KoszulChain {
    let terms: Vec<_> = increasing_tuples(bar.m(), k).into_iter().map(|i| (i, rng.poly(bar.pair()))).collect();
    bar.koszul_chain(k, terms).expect("sampled on the pair space")
}

/// `chainmaps`: bar and Koszul identities in degrees `0..=degree`.
pub fn chainmaps(m: usize, degree: usize, samples: usize, seed: u64) -> Result<Report> {
    if m == 0 {
        return Err(Error::Config("chainmaps needs --m ≥ 1".into()));
    }
    let bar = BarComplex::new(m, degree + 1);
    let mut report = Report::new("chainmaps", json!({"m": m, "degree": degree, "samples": samples}), seed);
    for k in 0..=degree {
        let mut rng = Sampler::new(derive_seed(seed, &format!("chainmaps-{k}")), "chains").with_degree(2).with_terms(3);
        let chains: Vec<BarChain> = (0..samples).map(|_| random_chain(&bar, &mut rng, k)).collect();
        let show = |c: &BarChain| format!("χ = {}", c.poly());
        if k >= 1 {
            let w = holds(
                &chains,
                |chi| {
                    let d = bar.bar_differential(chi)?;
                    Ok(if k >= 2 { bar.bar_differential(&d)?.is_zero() } else { bar.augmentation(&d)?.is_zero() })
                },
                show,
            );
            report.check(format!("bar: ∂² = 0 (degree {k})"), w);
        }
        let w = holds(
            &chains,
            |chi| {
                let dh = bar.bar_differential(&bar.bar_homotopy(chi))?;
                let rest = if k == 0 { bar.unit(&bar.augmentation(chi)?) } else { bar.bar_homotopy(&bar.bar_differential(chi)?) };
                Ok(&dh.add(&rest) == chi)
            },
            show,
        );
        report.check(format!("bar: ∂h + h∂ = id (degree {k})"), w);
        if k >= 1 {
            let w = holds(
                &chains,
                |chi| Ok(bar.koszul_differential(&bar.chain_map_g(chi))? == bar.chain_map_g(&bar.bar_differential(chi)?)),
                show,
            );
            report.check(format!("G is a chain map (degree {k})"), w);
        }
        let w = first_failure(&chains, |chi| {
            let theta = bar.theta(chi);
            (theta != bar.chain_map_f(&bar.chain_map_g(chi)) || bar.theta(&theta) != theta).then(|| show(chi))
        });
        report.check(format!("Θ = F∘G and Θ² = Θ (degree {k})"), w);

        if k <= m {
            let koszul: Vec<KoszulChain> = (0..samples).map(|_| random_koszul(&bar, &mut rng, k)).collect();
            let showk = |w: &KoszulChain| format!("ω = {:?}", w.terms().map(|(i, p)| format!("{i:?}: {p}")).collect::<Vec<_>>());
            if k >= 1 {
                let w = holds(
                    &koszul,
                    |om| {
                        let d = bar.koszul_differential(om)?;
                        Ok(if k >= 2 { bar.koszul_differential(&d)?.is_zero() } else { bar.koszul_augmentation(&d)?.is_zero() })
                    },
                    showk,
                );
                report.check(format!("Koszul: ∂² = 0 (degree {k})"), w);
                let w = holds(
                    &koszul,
                    |om| Ok(bar.bar_differential(&bar.chain_map_f(om))? == bar.chain_map_f(&bar.koszul_differential(om)?)),
                    showk,
                );
                report.check(format!("F is a chain map (degree {k})"), w);
            }
            let w = holds(
                &koszul,
                |om| {
                    let hd = if k == 0 {
                        bar.koszul_unit(&bar.koszul_augmentation(om)?)
                    } else {
                        bar.koszul_homotopy(&bar.koszul_differential(om)?)
                    };
                    let sum = if k < m { bar.koszul_differential(&bar.koszul_homotopy(om))?.add(&hd) } else { hd };
                    Ok(&sum == om)
                },
                showk,
            );
            report.check(format!("Koszul: ∂h + h∂ = id (degree {k})"), w);
            let basis = increasing_tuples(m, k);
            let w = first_failure(0..samples.max(basis.len()), |s| {
                let idx = basis[s % basis.len()].clone();
                let om = bar.koszul_chain(k, [(idx, rng.poly(bar.pair()))]).expect("sampled on the pair space");
                (bar.chain_map_g(&bar.chain_map_f(&om)) != om).then(|| showk(&om))
            });
            report.check(format!("G∘F = id on every basis element (degree {k})"), w);
            let w = first_failure(&koszul, |om| {
                let f = bar.chain_map_f(om);
                (bar.theta(&f) != f).then(|| showk(om))
            });
            report.check(format!("Θ fixes the image of F (degree {k})"), w);
        }
    }
    Ok(report)
}

/// `classes`: `G̃` lands in cocycles, `class_of` inverts it, and
/// antisymmetrization annihilates coboundaries.
pub fn classes(samples: usize, seed: u64) -> Result<Report> {
    let mut report = Report::new("classes", json!({"samples": samples}), seed);
    let mut rng = Sampler::new(seed, "classes").with_degree(2).with_terms(3);
    let proj = Projection::new(&Space::coordinates("x", 3), &Space::fibered("y", 3, 1))?;
    let flat = Space::coordinates("x", 3);
    let id = Projection::identity(&flat);
    let mut cocycle = None;
    let mut inverse = None;
    let mut alt = None;
    for s in 0..samples {
        let k = s % 3;
        let terms: Vec<_> = increasing_tuples(3, k)
            .into_iter()
            .filter(|i| i.iter().all(|&j| j >= proj.rank()))
            .map(|i| (i, rng.diffop(proj.total(), 2).vertical_part()))
            .collect();
        let eta = KoszulCochain::from_terms(&proj, k, terms)?;
        let g = g_tilde(&eta);
        if cocycle.is_none() {
            cocycle = cocycle_witness(&g).map(|w| format!("η = {eta:?}: {w}"));
        }
        let shifted = if k > 0 { g.add(&hochschild_differential(&rng.diffop_cochain(&proj, k - 1, 1))) } else { g.clone() };
        if inverse.is_none() {
            inverse = match class_of(&shifted) {
                Ok(c) if c == eta => None,
                Ok(c) => Some(format!("η = {eta:?}, class = {c:?}")),
                Err(e) => Some(e.to_string()),
            };
        }
        let fterms: Vec<_> = increasing_tuples(3, k).into_iter().map(|i| (i, rng.poly(&flat))).collect();
        let feta = KoszulCochain::from_terms(&id, k, fterms)?;
        if inverse.is_none() {
            inverse = match class_of(&g_tilde(&feta)) {
                Ok(c) if c == feta => None,
                Ok(c) => Some(format!("η = {feta:?}, class = {c:?}")),
                Err(e) => Some(e.to_string()),
            };
        }
        let psi = rng.function_cochain(&id, k, 2);
        if alt.is_none() {
            let d = antisymmetrize(&hochschild_differential(&psi));
            alt = (!d.is_zero()).then(|| format!("ψ = {psi:?}"));
        }
    }
    report.check("G̃ outputs are Hochschild cocycles", cocycle);
    report.check("class_of ∘ G̃ = id modulo coboundaries", inverse);
    report.check("antisymmetrization annihilates coboundaries", alt);
    Ok(report)
}

/// `hkr`: truncated cohomology against the closed-form count.
pub fn hkr(t: &Truncation, budget: usize, seed: u64) -> Result<Report> {
    let cmp = hkr_compare(t, budget)?;
    let params = json!({"m": t.m, "k": t.k, "n": t.n, "d": t.d, "o": t.o, "module": t.module.name(), "budget": budget});
    let mut report = Report::new("hkr", params, seed);
    let rows = cmp
        .rows
        .iter()
        .map(|r| vec![format!("H^{}", r.degree), r.direct.to_string(), r.predicted.to_string(), if r.matches() { "yes" } else { "no" }.into()])
        .collect();
    report.table(Table { name: "cohomology dimensions".into(), columns: vec!["degree".into(), "direct".into(), "closed-form".into(), "match".into()], rows });
    for r in &cmp.rows {
        report.pass_if(format!("dim H^{} = closed form", r.degree), r.matches(), || format!("direct {} vs closed form {}", r.direct, r.predicted));
    }
    let rep = &cmp.report;
    report.pass_if("δ_K² = 0 on the truncation", rep.squares_to_zero, || "nonzero square".into());
    report.pass_if("per-block ranks sum to the full rank", rep.block_ranks_agree, || "rank mismatch".into());
    report.pass_if("representatives map to Hochschild cocycles", rep.representatives_closed, || "a representative is not closed".into());
    Ok(report)
}
