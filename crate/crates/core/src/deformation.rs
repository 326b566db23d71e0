//! Module and bimodule deformations of functions on a total space `P` over
//! a star product on the base `M`, their obstructions, sP-brackets and
//! horizontal lifts.
//!
//! A module structure is stored as operator-valued cochains: `L_r` maps `a`
//! to the differential operator `f ↦ L_r(a, f)` on `P`.

use std::collections::BTreeMap;
use std::fmt;

use crate::diffop::{DiffOp, Projection};
use crate::error::{Error, Result};
use crate::hochschild::nonvanishing_arguments;
use crate::multidiff::MultiDiffOp;
use crate::poly::{MultiIndex, Polynomial, Space};
use crate::scalar::Scalar;
use crate::series::FormalSeries;
use crate::star::{series_inverse, Bidiff, PoissonStructure, StarProduct};

/// Cochains on `M` with values in differential operators on `P`.
pub type OperatorCochain = MultiDiffOp<DiffOp>;

/// Arguments, a test function and the nonzero value of some residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub order: usize,
    pub args: Vec<Polynomial>,
    pub f: Polynomial,
    pub value: Polynomial,
}

impl fmt::Display for Witness {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|a| format!("({a})")).collect();
        write!(out, "order {} at args [{}], f = {}: {}", self.order, args.join(", "), self.f, self.value)
    }
}

/// A function on which a nonzero operator does not vanish: `y^J` for a
/// symbol `J` minimal under the componentwise order.
fn nonvanishing_function(d: &DiffOp) -> Option<Polynomial> {
    let keys: Vec<&MultiIndex> = d.terms().map(|(j, _)| j).collect();
    let below = |a: &MultiIndex, b: &MultiIndex| a.as_slice().iter().zip(b.as_slice()).all(|(p, q)| p <= q);
    let j = keys.iter().find(|j| !keys.iter().any(|o| o != *j && below(o, j)))?;
    Some(Polynomial::monomial(d.space(), (*j).clone(), Scalar::one()))
}

/// A witness for a nonzero operator cochain, or `None` if it vanishes.
pub fn witness_of(d: &OperatorCochain, order: usize) -> Option<Witness> {
    let args = nonvanishing_arguments(d)?;
    let op = d.eval(&args);
    let f = nonvanishing_function(&op).expect("nonzero operator");
    let value = op.apply(&f);
    Some(Witness { order, args, f, value })
}

fn multiplication_cochain(c: &MultiDiffOp<Polynomial>) -> OperatorCochain {
    MultiDiffOp::from_terms(c.proj(), c.arity(), c.terms().map(|(k, v)| (k.clone(), DiffOp::multiplication(v))))
}

/// Pull the values of a cochain on `M` back along `proj`.
fn pulled_back(c: &Bidiff, proj: &Projection) -> MultiDiffOp<Polynomial> {
    MultiDiffOp::from_terms(proj, c.arity(), c.terms().map(|(k, v)| (k.clone(), proj.pullback(v))))
}

fn neg() -> Scalar {
    Scalar::from_int(-1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `a • f = Σ λʳ L_r(a)(f)` (left) or `f •' a = Σ λʳ R_r(a)(f)` (right).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleStructure {
    side: Side,
    star: StarProduct,
    proj: Projection,
    ops: Vec<OperatorCochain>,
}

impl ModuleStructure {
    /// `L₀(a) = pr*a`.
    pub fn undeformed_action(proj: &Projection) -> OperatorCochain {
        let z = MultiIndex::zero(proj.base().dim());
        MultiDiffOp::from_terms(proj, 1, [(vec![z], DiffOp::identity(proj.total()))])
    }

    /// `L₀(a) = pr*a` and `L_r = 0` up to the cap of the star product.
    pub fn trivial(side: Side, star: &StarProduct, proj: &Projection) -> Self {
        let mut ops = vec![Self::undeformed_action(proj)];
        ops.extend((1..=star.order_cap()).map(|_| MultiDiffOp::zero(proj, 1)));
        ModuleStructure { side, star: star.clone(), proj: proj.clone(), ops }
    }

    pub fn new(side: Side, star: &StarProduct, proj: &Projection, ops: Vec<OperatorCochain>) -> Result<Self> {
        star.space().ensure_same(proj.base())?;
        if ops.is_empty() || ops[0] != Self::undeformed_action(proj) {
            return Err(Error::Precondition("L_0 must be multiplication by pr*a".into()));
        }
        if ops.len() > star.order_cap() + 1 {
            return Err(Error::OrderCap { requested: ops.len() - 1, cap: star.order_cap() });
        }
        for op in &ops {
            if op.arity() != 1 {
                return Err(Error::Arity { expected: 1, found: op.arity() });
            }
            if op.proj() != proj {
                return Err(Error::Precondition("module cochains live on another projection".into()));
            }
        }
        Ok(ModuleStructure { side, star: star.clone(), proj: proj.clone(), ops })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn star(&self) -> &StarProduct {
        &self.star
    }

    pub fn proj(&self) -> &Projection {
        &self.proj
    }

    pub fn order_cap(&self) -> usize {
        self.ops.len() - 1
    }

    pub fn op(&self, r: usize) -> &OperatorCochain {
        &self.ops[r]
    }

    pub fn ops(&self) -> &[OperatorCochain] {
        &self.ops
    }

    pub fn with_op(&self, r: usize, op: OperatorCochain) -> Self {
        let mut out = self.clone();
        out.ops[r] = op;
        out
    }

    pub fn truncate(&self, cap: usize) -> Self {
        let mut out = self.clone();
        out.ops.truncate(cap.min(self.order_cap()) + 1);
        out
    }

    /// `a • f` (or `f •' a`) as a truncated series.
    pub fn act(&self, a: &Polynomial, f: &Polynomial) -> FormalSeries<Polynomial> {
        let coeffs = self.ops.iter().map(|op| op.at(a).apply(f)).collect();
        FormalSeries::new(self.order_cap(), coeffs, Polynomial::zero(self.proj.total()))
    }

    /// λˢ-coefficient of `L(a⋆b) − L(a)∘L(b)` (left) or
    /// `R(a⋆b) − R(b)∘R(a)` (right) as an arity-2 cochain.
    pub fn axiom_defect(&self, s: usize) -> OperatorCochain {
        let mut out = MultiDiffOp::zero(&self.proj, 2);
        for r in 0..=s.min(self.order_cap()) {
            let t = s - r;
            if t <= self.star.order_cap() {
                out.add_assign_ref(&self.ops[r].insert(0, self.star.cochain(t)));
            }
            if t <= self.order_cap() {
                let prod = self.ops[r].cup(&self.ops[t]);
                let prod = match self.side {
                    Side::Left => prod,
                    Side::Right => prod.permute(&[1, 0]),
                };
                out.add_assign_ref(&prod.scale(&neg()));
            }
        }
        out
    }

    /// Defects at every order `≤ r`; empty iff the module axiom holds there.
    pub fn check_to_order(&self, r: usize) -> Vec<Witness> {
        (0..=r).filter_map(|s| witness_of(&self.axiom_defect(s), s)).collect()
    }

    /// `a • 1 = pr*a`.
    pub fn is_fiber_preserving(&self) -> bool {
        self.ops[1..].iter().all(|op| op.at_one().is_zero())
    }

    /// `T ∘ L(a) ∘ T⁻¹` for `T = id + λT₁ + …` on `P`.
    pub fn conjugate(&self, t: &[DiffOp]) -> Result<Self> {
        check_series(t, self.proj.total())?;
        let cap = self.order_cap().min(t.len() - 1);
        let tinv = series_inverse(&t[..=cap]);
        let mut ops = Vec::with_capacity(cap + 1);
        for s in 0..=cap {
            let mut acc = MultiDiffOp::zero(&self.proj, 1);
            for p in 0..=s {
                for q in 0..=s - p {
                    let u = s - p - q;
                    let mut term = self.ops[q].map_values(|v| v.compose(&tinv[u]));
                    if p > 0 {
                        term = term.postcompose(&t[p]);
                    }
                    acc.add_assign_ref(&term);
                }
            }
            ops.push(acc);
        }
        Ok(ModuleStructure { side: self.side, star: self.star.clone(), proj: self.proj.clone(), ops })
    }
}

fn check_series(t: &[DiffOp], space: &Space) -> Result<()> {
    match t.first() {
        Some(t0) if t0 == &DiffOp::identity(space) => {}
        _ => return Err(Error::Precondition("T_0 must be the identity".into())),
    }
    for op in t {
        space.ensure_same(op.space())?;
    }
    Ok(())
}

/// The obstruction to extending a left module structure valid to order
/// `r`: `R_r(a, b) = Σ_{k=0}^{r} L_k(C_{r+1−k}(a, b)) − Σ_{k=1}^{r} L_k(a)∘L_{r+1−k}(b)`.
/// A next order exists iff `δL_{r+1} = R_r` is solvable.
pub fn obstruction_r(ms: &ModuleStructure, r: usize) -> Result<OperatorCochain> {
    if ms.side != Side::Left {
        return Err(Error::Precondition("obstructions are computed for left modules".into()));
    }
    if r > ms.order_cap() {
        return Err(Error::OrderCap { requested: r, cap: ms.order_cap() });
    }
    if r + 1 > ms.star.order_cap() {
        return Err(Error::OrderCap { requested: r + 1, cap: ms.star.order_cap() });
    }
    let partial = ms.truncate(r);
    if let Some(w) = partial.check_to_order(r).into_iter().next() {
        return Err(Error::NotAModule { order: w.order, witness: w.to_string() });
    }
    Ok(partial.axiom_defect(r + 1))
}

/// λ^q-coefficient of `L'(a)∘T − T∘L(a)`.
pub fn equivalence_defect(ms: &ModuleStructure, other: &ModuleStructure, t: &[DiffOp], q: usize) -> OperatorCochain {
    let mut out = MultiDiffOp::zero(&ms.proj, 1);
    for s in 0..=q.min(t.len() - 1) {
        let j = q - s;
        if j <= other.order_cap() {
            out.add_assign_ref(&other.ops[j].map_values(|v| v.compose(&t[s])));
        }
        if j <= ms.order_cap() {
            out.add_assign_ref(&ms.ops[j].postcompose(&t[s]).scale(&neg()));
        }
    }
    out
}

/// The obstruction to extending an equivalence `T₀…T_r` with
/// `T∘L(a) = L'(a)∘T` up to order `r`:
/// `E_r(a) = Σ_{s=0}^{r} (L'_{r+1−s}(a)∘T_s − T_s∘L_{r+1−s}(a))`.
/// `T_{r+1}` exists iff `δT_{r+1} = −E_r` is solvable.
pub fn obstruction_e(ms: &ModuleStructure, other: &ModuleStructure, t: &[DiffOp], r: usize) -> Result<OperatorCochain> {
    check_series(t, ms.proj.total())?;
    if ms.proj != other.proj || ms.side != other.side {
        return Err(Error::Precondition("structures live on different projections or sides".into()));
    }
    if t.len() < r + 1 {
        return Err(Error::OrderCap { requested: r, cap: t.len() - 1 });
    }
    let cap = ms.order_cap().min(other.order_cap());
    if r + 1 > cap {
        return Err(Error::OrderCap { requested: r + 1, cap });
    }
    let t = &t[..=r];
    for q in 0..=r {
        if let Some(w) = witness_of(&equivalence_defect(ms, other, t, q), q) {
            return Err(Error::NotAnEquivalence { order: q, witness: w.to_string() });
        }
    }
    Ok(equivalence_defect(ms, other, t, r + 1))
}

/// A left and a right module structure over the same star product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimoduleStructure {
    left: ModuleStructure,
    right: ModuleStructure,
}

impl BimoduleStructure {
    pub fn new(left: ModuleStructure, right: ModuleStructure) -> Result<Self> {
        if left.side != Side::Left || right.side != Side::Right {
            return Err(Error::Precondition("expected a left and a right module".into()));
        }
        if left.star != right.star || left.proj != right.proj {
            return Err(Error::Precondition("left and right modules use different data".into()));
        }
        Ok(BimoduleStructure { left, right })
    }

    pub fn trivial(star: &StarProduct, proj: &Projection) -> Self {
        BimoduleStructure {
            left: ModuleStructure::trivial(Side::Left, star, proj),
            right: ModuleStructure::trivial(Side::Right, star, proj),
        }
    }

    pub fn left(&self) -> &ModuleStructure {
        &self.left
    }

    pub fn right(&self) -> &ModuleStructure {
        &self.right
    }

    pub fn order_cap(&self) -> usize {
        self.left.order_cap().min(self.right.order_cap())
    }

    /// λˢ-coefficient of `(a•f)•'b − a•(f•'b)`, i.e. `R(b)∘L(a) − L(a)∘R(b)`.
    pub fn compatibility_defect(&self, s: usize) -> OperatorCochain {
        let mut out = MultiDiffOp::zero(&self.left.proj, 2);
        for r in 0..=s.min(self.order_cap()) {
            let t = s - r;
            if t > self.order_cap() {
                continue;
            }
            let rl = self.right.ops[t].cup(&self.left.ops[r]).permute(&[1, 0]);
            let lr = self.left.ops[r].cup(&self.right.ops[t]);
            out.add_assign_ref(&rl.sub(&lr));
        }
        out
    }

    /// All module and compatibility defects to order `r`, labelled.
    pub fn check_to_order(&self, r: usize) -> Vec<(&'static str, Witness)> {
        let mut out: Vec<(&'static str, Witness)> = Vec::new();
        out.extend(self.left.check_to_order(r).into_iter().map(|w| ("left module", w)));
        out.extend(self.right.check_to_order(r).into_iter().map(|w| ("right module", w)));
        for s in 0..=r {
            if let Some(w) = witness_of(&self.compatibility_defect(s), s) {
                out.push(("compatibility", w));
            }
        }
        out
    }

    pub fn conjugate(&self, t: &[DiffOp]) -> Result<Self> {
        Ok(BimoduleStructure { left: self.left.conjugate(t)?, right: self.right.conjugate(t)? })
    }
}

/// `⦃a, f⦄` stored as the operator-valued cochain `a ↦ ⦃a, ·⦄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPBracket {
    op: OperatorCochain,
}

impl SPBracket {
    pub fn new(op: OperatorCochain) -> Result<Self> {
        if op.arity() != 1 {
            return Err(Error::Arity { expected: 1, found: op.arity() });
        }
        Ok(SPBracket { op })
    }

    pub fn zero(proj: &Projection) -> Self {
        SPBracket { op: MultiDiffOp::zero(proj, 1) }
    }

    pub fn op(&self) -> &OperatorCochain {
        &self.op
    }

    pub fn proj(&self) -> &Projection {
        self.op.proj()
    }

    pub fn at(&self, a: &Polynomial) -> DiffOp {
        self.op.at(a)
    }

    pub fn eval(&self, a: &Polynomial, f: &Polynomial) -> Polynomial {
        self.at(a).apply(f)
    }

    pub fn add(&self, other: &SPBracket) -> SPBracket {
        SPBracket { op: self.op.add(&other.op) }
    }

    /// Each `⦃a, ·⦄` is a vector field (a derivation of functions on `P`).
    pub fn is_natural(&self) -> bool {
        self.op.terms().all(|(_, v)| v.terms().all(|(j, _)| j.order() == 1))
    }

    /// `⦃a, 1⦄ = 0`.
    pub fn annihilates_constants(&self) -> bool {
        self.op.at_one().is_zero()
    }
}

/// Residual witnesses of the sP-bracket identities; `None` means the
/// identity holds exactly.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpReport {
    /// `⦃ab, f⦄ = pr*a⦃b, f⦄ + pr*b⦃a, f⦄`
    pub derivation: Option<Witness>,
    /// `⦃a, pr*b f⦄ = pr*{a, b} f + pr*b⦃a, f⦄`
    pub leibniz: Option<Witness>,
    /// `⦃a, ⦃b, f⦄⦄ − ⦃b, ⦃a, f⦄⦄ − ⦃{a, b}, f⦄ = 0`
    pub jacobi: Option<Witness>,
    /// `⦃a, 1⦄ = 0`
    pub constants: Option<Witness>,
    /// `⦃a, pr*b⦄ = pr*{a, b}`
    pub fiber_preserving: Option<Witness>,
    /// `⦃a, fg⦄ = ⦃a, f⦄g + f⦃a, g⦄`
    pub natural: Option<Witness>,
}

impl SpReport {
    /// The three defining identities of an sP-bracket.
    pub fn is_sp_bracket(&self) -> bool {
        self.derivation.is_none() && self.leibniz.is_none() && self.jacobi.is_none()
    }
}

/// The Jacobi-type residual `⦃a, ⦃b, ·⦄⦄ − ⦃b, ⦃a, ·⦄⦄ − ⦃{a, b}, ·⦄` as an
/// arity-2 cochain.
pub fn jacobi_residual(br: &SPBracket, poisson: &Bidiff) -> OperatorCochain {
    let ab = br.op.cup(&br.op);
    ab.sub(&ab.permute(&[1, 0])).sub(&br.op.insert(0, poisson))
}

/// Checks the sP-bracket identities symbolically against the Poisson
/// bracket `poisson` on `M` (an arity-2 cochain over the identity).
pub fn check_sp_properties(br: &SPBracket, poisson: &Bidiff) -> SpReport {
    let proj = br.proj();
    let op = &br.op;
    let left = op.left_action();
    let derivation = op.merge_slots(0).sub(&left).sub(&left.permute(&[1, 0]));
    let pb = pulled_back(poisson, proj);
    let leibniz = op.right_action().sub(&multiplication_cochain(&pb)).sub(&left.permute(&[1, 0]));
    let jacobi = jacobi_residual(br, poisson);
    let constants = multiplication_cochain(&op.at_one());
    let fiber = multiplication_cochain(&op.right_action().at_one().sub(&pb));
    let natural = match op.terms().find(|(_, v)| v.terms().any(|(j, _)| j.order() != 1)) {
        None => None,
        Some((key, v)) => {
            let base = proj.base();
            let args = vec![Polynomial::monomial(base, key[0].clone(), Scalar::one())];
            let bad: DiffOp = DiffOp::from_terms(v.space(), v.terms().filter(|(j, _)| j.order() != 1).map(|(j, c)| (j.clone(), c.clone())));
            let f = nonvanishing_function(&bad).expect("nonzero");
            // a derivation D satisfies D(f²) = 2 f D(f)
            let fsq = &f * &f;
            let d = op.at(&args[0]);
            let value = &d.apply(&fsq) - &(&f * &d.apply(&f)).scale(&Scalar::from_int(2));
            Some(Witness { order: 0, args, f, value })
        }
    };
    SpReport {
        derivation: witness_of(&derivation, 0),
        leibniz: witness_of(&leibniz, 0),
        jacobi: witness_of(&jacobi, 0),
        constants: witness_of(&constants, 0),
        fiber_preserving: witness_of(&fiber, 0),
        natural,
    }
}

/// `R(X_a, X_b)(f) = ⦃a, ⦃b, f⦄⦄ − ⦃b, ⦃a, f⦄⦄ − ⦃{a, b}, f⦄`.
pub fn curvature(br: &SPBracket, poisson: &PoissonStructure, a: &Polynomial, b: &Polynomial, f: &Polynomial) -> Polynomial {
    let ab = br.eval(a, &br.eval(b, f));
    let ba = br.eval(b, &br.eval(a, f));
    let pab = br.eval(&poisson.bracket(a, b), f);
    &(&ab - &ba) - &pab
}

/// `⦃a, f⦄ = (i/2)(L₁(a, f) − R₁(f, a))`, with the sP identities checked
/// against the Poisson bracket of the star product.
pub fn sp_bracket_of(b: &BimoduleStructure) -> Result<SPBracket> {
    if b.order_cap() < 1 {
        return Err(Error::OrderCap { requested: 1, cap: b.order_cap() });
    }
    let half_i = Scalar::i() * Scalar::ratio(1, 2);
    let br = SPBracket { op: b.left.ops[1].sub(&b.right.ops[1]).scale(&half_i) };
    let report = check_sp_properties(&br, &b.left.star.poisson_cochain()?);
    for (name, w) in [("i", &report.derivation), ("ii", &report.leibniz), ("iii", &report.jacobi)] {
        if let Some(w) = w {
            return Err(Error::BracketProperty { property: name.into(), witness: w.to_string() });
        }
    }
    Ok(br)
}

/// Lifts `∂^h_j` of the coordinate fields of `M` to first-order operators
/// on `P` projecting to them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalLift {
    proj: Projection,
    fields: Vec<DiffOp>,
}

impl HorizontalLift {
    pub fn new(proj: &Projection, fields: Vec<DiffOp>) -> Result<Self> {
        let m = proj.base().dim();
        if fields.len() != m {
            return Err(Error::Arity { expected: m, found: fields.len() });
        }
        for (j, x) in fields.iter().enumerate() {
            proj.total().ensure_same(x.space())?;
            if x.terms().any(|(k, _)| k.order() != 1) {
                return Err(Error::NotNatural { witness: format!("lift of ∂{} is not a vector field", j + 1) });
            }
            for i in 0..m {
                let image = x.apply(&proj.pullback(&Polynomial::var(proj.base(), i)));
                let expected = if i == j { Polynomial::one(proj.total()) } else { Polynomial::zero(proj.total()) };
                if image != expected {
                    return Err(Error::Precondition(format!("lift of ∂{} does not project to it", j + 1)));
                }
            }
        }
        Ok(HorizontalLift { proj: proj.clone(), fields })
    }

    /// `∂^h_j = ∂_{y_j}`.
    pub fn trivial(proj: &Projection) -> Self {
        let fields = (0..proj.base().dim()).map(|j| DiffOp::partial(proj.total(), j)).collect();
        HorizontalLift { proj: proj.clone(), fields }
    }

    /// `∂^h_j = ∂_{y_j} + (c_j + pr*∂_j g) · p · ∂_v` with `v` the first
    /// fiber coordinate and `p` a function of the fiber coordinates. These
    /// lifts commute for every choice of `c`, `g` and `p`.
    pub fn gauge(proj: &Projection, c: &[Scalar], g: &Polynomial, p: &Polynomial) -> Result<Self> {
        let m = proj.base().dim();
        let total = proj.total();
        if c.len() != m {
            return Err(Error::Arity { expected: m, found: c.len() });
        }
        if total.dim() == m {
            return Err(Error::Precondition("gauge lifts need a fiber coordinate".into()));
        }
        proj.base().ensure_same(g.space())?;
        total.ensure_same(p.space())?;
        if (0..m).any(|j| !p.derivative(j).is_zero()) {
            return Err(Error::Precondition("p must depend on fiber coordinates only".into()));
        }
        let vertical = DiffOp::monomial(MultiIndex::unit(total.dim(), m), p.clone());
        let fields = (0..m)
            .map(|j| {
                let alpha = &Polynomial::constant(total, c[j].clone()) + &proj.pullback(&g.derivative(j));
                DiffOp::partial(total, j).add(&vertical.left_mul(&alpha))
            })
            .collect();
        HorizontalLift::new(proj, fields)
    }

    /// `∂^h_j = Σ_i ω_{ji} ⦃xⁱ, ·⦄` with `ω = π⁻¹`.
    pub fn from_bracket(br: &SPBracket, poisson: &PoissonStructure) -> Result<Self> {
        if !br.is_natural() {
            return Err(Error::NotNatural { witness: "⦃a, ·⦄ is not a vector field".into() });
        }
        let proj = br.proj();
        let omega = poisson.symplectic_form()?;
        let m = proj.base().dim();
        let hams: Vec<DiffOp> = (0..m).map(|i| br.at(&Polynomial::var(proj.base(), i))).collect();
        let fields = (0..m)
            .map(|j| {
                let mut acc = DiffOp::zero(proj.total());
                for (i, h) in hams.iter().enumerate() {
                    if !omega[j][i].is_zero() {
                        acc.add_assign_ref(&h.scale(&omega[j][i]));
                    }
                }
                acc
            })
            .collect();
        HorizontalLift::new(proj, fields)
    }

    pub fn proj(&self) -> &Projection {
        &self.proj
    }

    pub fn fields(&self) -> &[DiffOp] {
        &self.fields
    }

    /// First pair of lifts that fail to commute, with their commutator.
    pub fn curvature_witness(&self) -> Option<(usize, usize, DiffOp)> {
        for i in 0..self.fields.len() {
            for j in i + 1..self.fields.len() {
                let c = self.fields[i].commutator(&self.fields[j]);
                if !c.is_zero() {
                    return Some((i, j, c));
                }
            }
        }
        None
    }

    pub fn is_flat(&self) -> bool {
        self.curvature_witness().is_none()
    }

    fn ensure_flat(&self) -> Result<()> {
        match self.curvature_witness() {
            None => Ok(()),
            Some((i, j, c)) => Err(Error::NonFlat { witness: format!("[∂h{}, ∂h{}] = {c}", i + 1, j + 1) }),
        }
    }

    /// `⦃a, f⦄ = π^{ij} pr*(∂_i a) ∂^h_j f`.
    pub fn bracket(&self, poisson: &PoissonStructure) -> SPBracket {
        let m = self.proj.base().dim();
        let pi = poisson.tensor();
        let mut op = MultiDiffOp::zero(&self.proj, 1);
        for (i, row) in pi.iter().enumerate() {
            let mut v = DiffOp::zero(self.proj.total());
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    v.add_assign_ref(&self.fields[j].scale(c));
                }
            }
            op.add_term(vec![MultiIndex::unit(m, i)], &v);
        }
        SPBracket { op }
    }

    /// `Σ c_J ∂^J ↦ Σ pr*c_J (∂^h)^J`, an algebra morphism when the lift is flat.
    pub fn lift(&self, d: &DiffOp) -> DiffOp {
        d.substitute_fields(self.proj.total(), |c| self.proj.pullback(c), &self.fields)
    }

    /// Lift a bidifferential operator on `M` in both slots, giving one on
    /// `P` (with every coordinate of `P` treated as base).
    pub fn lift_bidiff(&self, c: &Bidiff) -> Bidiff {
        let flat = self.proj.total().flattened();
        let fproj = Projection::identity(&flat);
        let mut cache: BTreeMap<MultiIndex, DiffOp> = BTreeMap::new();
        let mut word = |i: &MultiIndex| {
            cache
                .entry(i.clone())
                .or_insert_with(|| self.lift(&DiffOp::monomial(i.clone(), Polynomial::one(self.proj.base()))))
                .clone()
        };
        let mut out = MultiDiffOp::zero(&fproj, c.arity());
        for (key, v) in c.terms() {
            let lifted: Vec<DiffOp> = key.iter().map(&mut word).collect();
            let coeff = self.proj.pullback(v);
            let mut partial: Vec<(Vec<MultiIndex>, Polynomial)> = vec![(Vec::new(), coeff)];
            for d in &lifted {
                let mut next = Vec::new();
                for (k, p) in &partial {
                    for (j, a) in d.terms() {
                        let mut nk = k.clone();
                        nk.push(j.clone());
                        next.push((nk, p * a));
                    }
                }
                partial = next;
            }
            for (k, p) in partial {
                out.add_term(k, &p.with_space(&flat).expect("same coordinates"));
            }
        }
        out
    }
}

/// `Σ c_J ∂^J ↦ Σ pr*c_J (∂^h)^J` for the horizontal lift determined by an
/// sP-bracket; the bracket must satisfy the Jacobi-type identity.
pub fn lift_diffop(d: &DiffOp, br: &SPBracket, poisson: &PoissonStructure) -> Result<DiffOp> {
    let report = check_sp_properties(br, &poisson.cochain(&Projection::identity(br.proj().base())));
    for (name, w) in [("i", &report.derivation), ("ii", &report.leibniz), ("iii", &report.jacobi)] {
        if let Some(w) = w {
            return Err(Error::BracketProperty { property: name.into(), witness: w.to_string() });
        }
    }
    let lift = HorizontalLift::from_bracket(br, poisson)?;
    lift.ensure_flat()?;
    br.proj().base().ensure_same(d.space())?;
    Ok(lift.lift(d))
}

/// `⦃a, f⦄ + y¹·pr*(∂₁a)·∂_v f` with `v` the first fiber coordinate: a
/// bracket that keeps the derivation properties but breaks Jacobi.
pub fn twisted_bracket(br: &SPBracket) -> Result<SPBracket> {
    let proj = br.proj();
    let (m, total) = (proj.base().dim(), proj.total());
    if total.dim() == m {
        return Err(Error::Precondition("the twist needs a fiber coordinate".into()));
    }
    let twist = DiffOp::monomial(MultiIndex::unit(total.dim(), m), Polynomial::var(total, 0));
    let extra = MultiDiffOp::from_terms(proj, 1, [(vec![MultiIndex::unit(m, 0)], twist)]);
    Ok(SPBracket { op: br.op.add(&extra) })
}

/// `L_i(a) = C_i(a, ·)ʰ` and `R_i(a) = C_i(·, a)ʰ` for the horizontal lift
/// determined by `br`.
pub fn build_bimodule_from_sp(star: &StarProduct, br: &SPBracket) -> Result<BimoduleStructure> {
    let poisson = star.poisson_structure()?;
    let report = check_sp_properties(br, &star.poisson_cochain()?);
    for (name, w) in [("i", &report.derivation), ("ii", &report.leibniz), ("iii", &report.jacobi)] {
        if let Some(w) = w {
            return Err(Error::BracketProperty { property: name.into(), witness: w.to_string() });
        }
    }
    let proj = br.proj();
    let degenerate = poisson.tensor().iter().flatten().all(Scalar::is_zero);
    let lift = if degenerate && br.op.is_zero() {
        // with π = 0 every flat lift yields a bimodule with zero bracket
        HorizontalLift::trivial(proj)
    } else {
        HorizontalLift::from_bracket(br, &poisson)?
    };
    lift.ensure_flat()?;
    let base = proj.base();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for c in star.cochains() {
        let mut l: BTreeMap<MultiIndex, DiffOp> = BTreeMap::new();
        let mut r: BTreeMap<MultiIndex, DiffOp> = BTreeMap::new();
        for (key, v) in c.terms() {
            l.entry(key[0].clone()).or_insert_with(|| DiffOp::zero(base)).add_term(key[1].clone(), v);
            r.entry(key[1].clone()).or_insert_with(|| DiffOp::zero(base)).add_term(key[0].clone(), v);
        }
        left.push(MultiDiffOp::from_terms(proj, 1, l.into_iter().map(|(k, d)| (vec![k], lift.lift(&d)))));
        right.push(MultiDiffOp::from_terms(proj, 1, r.into_iter().map(|(k, d)| (vec![k], lift.lift(&d)))));
    }
    BimoduleStructure::new(
        ModuleStructure::new(Side::Left, star, proj, left)?,
        ModuleStructure::new(Side::Right, star, proj, right)?,
    )
}

/// `Q = Σ E_i ⊗ D_i` with derivations `E_i` of the star product and
/// bimodule homomorphisms `D_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QModifier {
    pairs: Vec<(DiffOp, DiffOp)>,
}

impl QModifier {
    pub fn new(pairs: Vec<(DiffOp, DiffOp)>) -> Self {
        QModifier { pairs }
    }

    pub fn pairs(&self) -> &[(DiffOp, DiffOp)] {
        &self.pairs
    }

    pub fn validate(&self, b: &BimoduleStructure) -> Result<()> {
        let star = b.left.star();
        let proj = b.left.proj();
        for (i, (e, d)) in self.pairs.iter().enumerate() {
            let fail = |what: &str| Error::Precondition(format!("pair {}: {what}", i + 1));
            proj.base().ensure_same(e.space())?;
            proj.total().ensure_same(d.space())?;
            for (r, c) in star.cochains().iter().enumerate() {
                let defect = c.postcompose(e).sub(&c.precompose(0, e)).sub(&c.precompose(1, e));
                if !defect.is_zero() {
                    return Err(fail(&format!("E is not a derivation of the star product at order {r}")));
                }
            }
            for (side, ms) in [("left", &b.left), ("right", &b.right)] {
                for (r, op) in ms.ops().iter().enumerate() {
                    if op.postcompose(d) != op.map_values(|v| v.compose(d)) {
                        return Err(fail(&format!("D does not commute with the {side} action at order {r}")));
                    }
                }
            }
            for (j, (e2, d2)) in self.pairs.iter().enumerate().skip(i + 1) {
                if !e.commutator(e2).is_zero() || !d.commutator(d2).is_zero() {
                    return Err(fail(&format!("does not commute with pair {}", j + 1)));
                }
            }
        }
        Ok(())
    }
}

fn words(p: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..p).map(move |i| {
                    let mut w = w.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

/// Replace the left action by `l ∘ exp(λᵉ Q)`, keeping the right action.
pub fn modify_bimodule(b: &BimoduleStructure, q: &QModifier, power: usize) -> Result<BimoduleStructure> {
    if power == 0 {
        return Err(Error::Precondition("the exponent must carry at least one λ".into()));
    }
    q.validate(b)?;
    let left = &b.left;
    let cap = left.order_cap();
    let proj = left.proj();
    let p = q.pairs.len();
    let mut ops: Vec<OperatorCochain> = (0..=cap).map(|_| MultiDiffOp::zero(proj, 1)).collect();
    for n in 0..=cap / power {
        let weight = Scalar::inv_factorial(n as u32);
        for w in words(p, n) {
            let mut e = DiffOp::identity(proj.base());
            let mut d = DiffOp::identity(proj.total());
            for &i in &w {
                e = e.compose(&q.pairs[i].0);
                d = d.compose(&q.pairs[i].1);
            }
            for v in 0..=cap - n * power {
                let term = left.ops[v].precompose(0, &e).map_values(|x| x.compose(&d));
                ops[v + n * power].add_assign_ref(&term.scale(&weight));
            }
        }
    }
    BimoduleStructure::new(ModuleStructure::new(Side::Left, left.star(), proj, ops)?, b.right.clone())
}

/// The star product on `P` obtained by lifting every `C_r` in both slots;
/// it lives on the flattened total space.
pub fn lift_star_product(star: &StarProduct, lift: &HorizontalLift) -> Result<StarProduct> {
    lift.proj.base().ensure_same(star.space())?;
    lift.ensure_flat()?;
    let cochains: Vec<Bidiff> = star.cochains().iter().map(|c| lift.lift_bidiff(c)).collect();
    StarProduct::from_cochains(&lift.proj.total().flattened(), cochains)
}

/// `⦃a, f⦄ = {pr*a, f}_P` for a star product on the flattened total space.
pub fn subalgebra_bracket(star_p: &StarProduct, proj: &Projection) -> Result<SPBracket> {
    let pc = star_p.poisson_cochain()?;
    let mut op = MultiDiffOp::zero(proj, 1);
    for (key, v) in pc.terms() {
        let Some(k) = proj.base_index(&key[0]) else { continue };
        let v = v.with_space(proj.total())?;
        op.add_term(vec![k], &DiffOp::monomial(key[1].clone(), v));
    }
    Ok(SPBracket { op })
}
