//! Star products `a ⋆ b = Σ λʳ C_r(a, b)` on a flat base, equivalences and
//! the induced Poisson structure.

use std::collections::BTreeMap;

use crate::diffop::{DiffOp, Projection};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::multidiff::MultiDiffOp;
use crate::poly::{MultiIndex, Polynomial, Space};
use crate::scalar::Scalar;
use crate::series::FormalSeries;

pub type Bidiff = MultiDiffOp<Polynomial>;

/// A formal deformation of the pointwise product on polynomials of `M`,
/// truncated at `order_cap`. Associativity is checked, never assumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarProduct {
    space: Space,
    cochains: Vec<Bidiff>,
}

impl StarProduct {
    /// The undeformed product with all higher cochains zero.
    pub fn trivial(space: &Space, order_cap: usize) -> Self {
        let proj = Projection::identity(space);
        let mut cochains = vec![MultiDiffOp::product(space)];
        cochains.extend((1..=order_cap).map(|_| MultiDiffOp::zero(&proj, 2)));
        StarProduct { space: space.clone(), cochains }
    }

    /// `cochains[0]` must be the pointwise product.
    pub fn from_cochains(space: &Space, cochains: Vec<Bidiff>) -> Result<Self> {
        if cochains.first() != Some(&MultiDiffOp::product(space)) {
            return Err(Error::Precondition("C_0 must be the pointwise product".into()));
        }
        if cochains.iter().any(|c| c.arity() != 2 || c.proj() != &Projection::identity(space)) {
            return Err(Error::Precondition("star product cochains must be bidifferential on M".into()));
        }
        Ok(StarProduct { space: space.clone(), cochains })
    }

    /// `a ⋆ b = μ ∘ exp(λ Σ A^{ij} X_i ⊗ X_j)(a ⊗ b)` for pairwise commuting
    /// vector fields `X_i` without constant term.
    pub fn exp_star(fields: &[DiffOp], a: &[Vec<Scalar>], order_cap: usize) -> Result<Self> {
        let p = fields.len();
        let space = match fields.first() {
            Some(f) => f.space().clone(),
            None => return Err(Error::Precondition("need at least one vector field".into())),
        };
        if a.len() != p || a.iter().any(|row| row.len() != p) {
            return Err(Error::Arity { expected: p, found: a.len() });
        }
        for (i, x) in fields.iter().enumerate() {
            space.ensure_same(x.space())?;
            if x.terms().any(|(j, _)| j.order() != 1) {
                return Err(Error::Precondition(format!("X{} is not a vector field", i + 1)));
            }
        }
        for i in 0..p {
            for j in i + 1..p {
                if !fields[i].commutator(&fields[j]).is_zero() {
                    return Err(Error::NonCommutingFields { i: i + 1, j: j + 1 });
                }
            }
        }
        let proj = Projection::identity(&space);
        let id = DiffOp::identity(&space);
        let mut level: BTreeMap<(DiffOp, DiffOp), Scalar> = BTreeMap::new();
        level.insert((id.clone(), id), Scalar::one());
        let mut cochains = vec![MultiDiffOp::product(&space)];
        for r in 1..=order_cap {
            let mut next: BTreeMap<(DiffOp, DiffOp), Scalar> = BTreeMap::new();
            for ((l, rt), c) in &level {
                for (i, row) in a.iter().enumerate() {
                    for (j, aij) in row.iter().enumerate() {
                        if aij.is_zero() {
                            continue;
                        }
                        let key = (fields[i].compose(l), fields[j].compose(rt));
                        let e = next.entry(key).or_default();
                        *e += &(c * aij);
                    }
                }
            }
            next.retain(|_, c| !c.is_zero());
            level = next;
            let norm = Scalar::inv_factorial(r as u32);
            let mut cr = MultiDiffOp::zero(&proj, 2);
            for ((l, rt), c) in &level {
                let w = c * &norm;
                for (i, pi) in l.terms() {
                    for (j, qj) in rt.terms() {
                        cr.add_term(vec![i.clone(), j.clone()], &(pi * qj).scale(&w));
                    }
                }
            }
            cochains.push(cr);
        }
        Ok(StarProduct { space, cochains })
    }

    /// Moyal-type product on `ℝ^m` from constant `A`: `X_i = ∂_i`.
    pub fn constant_coefficient(space: &Space, a: &[Vec<Scalar>], order_cap: usize) -> Result<Self> {
        let fields: Vec<DiffOp> = (0..space.dim()).map(|i| DiffOp::partial(space, i)).collect();
        StarProduct::exp_star(&fields, a, order_cap)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn order_cap(&self) -> usize {
        self.cochains.len() - 1
    }

    pub fn cochain(&self, r: usize) -> &Bidiff {
        &self.cochains[r]
    }

    pub fn cochains(&self) -> &[Bidiff] {
        &self.cochains
    }

    /// Replace `C_r` (used to build negative controls).
    pub fn with_cochain(&self, r: usize, c: Bidiff) -> Self {
        let mut out = self.clone();
        out.cochains[r] = c;
        out
    }

    pub fn truncate(&self, cap: usize) -> Self {
        StarProduct { space: self.space.clone(), cochains: self.cochains[..=cap.min(self.order_cap())].to_vec() }
    }

    /// `C_r(a, b)`; zero above the cap.
    pub fn c(&self, r: usize, a: &Polynomial, b: &Polynomial) -> Polynomial {
        match self.cochains.get(r) {
            Some(c) => c.eval(&[a.clone(), b.clone()]),
            None => Polynomial::zero(&self.space),
        }
    }

    /// `a ⋆ b` as a truncated series.
    pub fn star(&self, a: &Polynomial, b: &Polynomial) -> FormalSeries<Polynomial> {
        let coeffs = (0..=self.order_cap()).map(|r| self.c(r, a, b)).collect();
        FormalSeries::new(self.order_cap(), coeffs, Polynomial::zero(&self.space))
    }

    /// Product of series, truncated at the smallest cap involved.
    pub fn multiply(
        &self,
        f: &FormalSeries<Polynomial>,
        g: &FormalSeries<Polynomial>,
    ) -> Result<FormalSeries<Polynomial>> {
        self.space.ensure_same(f.coeff(0).space())?;
        self.space.ensure_same(g.coeff(0).space())?;
        let f = f.truncate(self.order_cap());
        Ok(f.cauchy(
            g,
            Polynomial::zero(&self.space),
            |acc, v| acc.add_assign_ref(&v),
            |a, b, s| (s <= self.order_cap()).then(|| self.c(s, a, b)),
        ))
    }

    /// λʳ-coefficient of `(a⋆b)⋆c − a⋆(b⋆c)`.
    pub fn associativity_defect(&self, a: &Polynomial, b: &Polynomial, c: &Polynomial, r: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.space);
        for s in 0..=r {
            let t = r - s;
            out.add_assign_ref(&self.c(s, &self.c(t, a, b), c));
            out.add_scaled(&self.c(s, a, &self.c(t, b, c)), &Scalar::from_int(-1));
        }
        out
    }

    /// The associator at order `r` as a tridifferential operator; it is zero
    /// iff the product is associative at that order for all inputs.
    pub fn associator(&self, r: usize) -> MultiDiffOp<Polynomial> {
        let proj = Projection::identity(&self.space);
        let mut out = MultiDiffOp::zero(&proj, 3);
        for s in 0..=r {
            let (cs, ct) = (&self.cochains[s], &self.cochains[r - s]);
            out.add_assign_ref(&cs.insert(0, ct));
            out.add_assign_ref(&cs.insert(1, ct).scale(&Scalar::from_int(-1)));
        }
        out
    }

    /// `C_r(1, ·) = C_r(·, 1) = 0` for all `r ≥ 1`.
    pub fn is_unital(&self) -> bool {
        self.cochains[1..]
            .iter()
            .all(|c| c.terms().all(|(k, _)| !k[0].is_zero() && !k[1].is_zero()))
    }

    /// `C_r` has order at most `r` in each argument.
    pub fn is_natural(&self) -> bool {
        self.cochains.iter().enumerate().all(|(r, c)| c.orders().iter().all(|&o| o as usize <= r))
    }

    /// `{f, g} = (i/2)(C₁(f, g) − C₁(g, f))`.
    pub fn poisson_bracket(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        Ok(self.poisson_cochain()?.eval(&[f.clone(), g.clone()]))
    }

    pub fn poisson_cochain(&self) -> Result<Bidiff> {
        if self.order_cap() == 0 {
            return Err(Error::OrderCap { requested: 1, cap: 0 });
        }
        let c1 = &self.cochains[1];
        Ok(c1.sub(&c1.permute(&[1, 0])).scale(&(Scalar::i() * Scalar::ratio(1, 2))))
    }

    /// The constant Poisson tensor `π^{ij} = {xⁱ, xʲ}`; fails if the bracket
    /// is not constant-coefficient.
    pub fn poisson_structure(&self) -> Result<PoissonStructure> {
        let n = self.space.dim();
        let mut pi = vec![vec![Scalar::zero(); n]; n];
        for (i, row) in pi.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let b = self.poisson_bracket(&Polynomial::var(&self.space, i), &Polynomial::var(&self.space, j))?;
                if !b.is_constant() {
                    return Err(Error::Precondition("Poisson tensor is not constant".into()));
                }
                *v = b.constant_term();
            }
        }
        let ps = PoissonStructure::new(&self.space, pi)?;
        // the bracket must be the bivector bracket, not just agree on coordinates
        let proj = Projection::identity(&self.space);
        if self.poisson_cochain()? != ps.cochain(&proj) {
            return Err(Error::Precondition("first-order bracket is not a constant bivector".into()));
        }
        Ok(ps)
    }

    /// `f ⋆' g = T⁻¹(T f ⋆ T g)`, computed symbolically order by order.
    pub fn apply_equivalence(&self, t: &EquivalenceOp) -> Result<Self> {
        self.space.ensure_same(&t.space)?;
        let cap = self.order_cap().min(t.order_cap());
        let tinv = t.inverse();
        let proj = Projection::identity(&self.space);
        let mut cochains = vec![MultiDiffOp::product(&self.space)];
        for r in 1..=cap {
            let mut cr = MultiDiffOp::zero(&proj, 2);
            for p in 0..=r {
                for u in 0..=r - p {
                    for s in 0..=r - p - u {
                        let q = r - p - u - s;
                        let mut term = self.cochains[u].clone();
                        if s > 0 {
                            term = term.precompose(0, &t.ops[s]);
                        }
                        if q > 0 {
                            term = term.precompose(1, &t.ops[q]);
                        }
                        if p > 0 {
                            term = term.postcompose(&tinv[p]);
                        }
                        cr.add_assign_ref(&term);
                    }
                }
            }
            cochains.push(cr);
        }
        Ok(StarProduct { space: self.space.clone(), cochains })
    }

    /// Substitute `λ ↦ λᵉ`: `C'_{re} = C_r`, keeping the cap.
    pub fn reparametrize(&self, e: usize) -> Self {
        assert!(e >= 1);
        let proj = Projection::identity(&self.space);
        let cap = self.order_cap();
        let mut cochains: Vec<Bidiff> = (0..=cap).map(|_| MultiDiffOp::zero(&proj, 2)).collect();
        for (r, c) in self.cochains.iter().enumerate() {
            if r * e <= cap {
                cochains[r * e] = c.clone();
            }
        }
        StarProduct { space: self.space.clone(), cochains }
    }
}

/// `T = id + λT₁ + λ²T₂ + …` with `Tᵣ(1) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceOp {
    space: Space,
    ops: Vec<DiffOp>,
}

impl EquivalenceOp {
    pub fn new(ops: Vec<DiffOp>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::Precondition("empty equivalence".into()));
        };
        let space = first.space().clone();
        if first != &DiffOp::identity(&space) {
            return Err(Error::Precondition("T_0 must be the identity".into()));
        }
        let one = Polynomial::one(&space);
        for (r, t) in ops.iter().enumerate().skip(1) {
            space.ensure_same(t.space())?;
            if !t.apply(&one).is_zero() {
                return Err(Error::Precondition(format!("T_{r}(1) ≠ 0")));
            }
        }
        Ok(EquivalenceOp { space, ops })
    }

    pub fn identity(space: &Space, order_cap: usize) -> Self {
        let mut ops = vec![DiffOp::identity(space)];
        ops.extend((0..order_cap).map(|_| DiffOp::zero(space)));
        EquivalenceOp { space: space.clone(), ops }
    }

    pub fn order_cap(&self) -> usize {
        self.ops.len() - 1
    }

    pub fn ops(&self) -> &[DiffOp] {
        &self.ops
    }

    pub fn inverse(&self) -> Vec<DiffOp> {
        series_inverse(&self.ops)
    }

    /// `T(f)` for a series `f`.
    pub fn apply(&self, f: &FormalSeries<Polynomial>) -> FormalSeries<Polynomial> {
        let cap = self.order_cap().min(f.order_cap());
        let coeffs = (0..=cap)
            .map(|r| {
                let mut acc = Polynomial::zero(&self.space);
                for s in 0..=r {
                    acc.add_assign_ref(&self.ops[s].apply(f.coeff(r - s)));
                }
                acc
            })
            .collect();
        FormalSeries::new(cap, coeffs, Polynomial::zero(&self.space))
    }
}

/// Series inverse of `id + λT₁ + λ²T₂ + …` (the first entry is ignored and
/// taken to be the identity): `(T⁻¹)_r = −Σ_{s=1}^{r} T_s ∘ (T⁻¹)_{r−s}`.
pub fn series_inverse(ops: &[DiffOp]) -> Vec<DiffOp> {
    let space = ops[0].space();
    let mut inv = vec![DiffOp::identity(space)];
    for r in 1..ops.len() {
        let mut acc = DiffOp::zero(space);
        for s in 1..=r {
            acc.add_assign_ref(&ops[s].compose(&inv[r - s]));
        }
        inv.push(acc.scale(&Scalar::from_int(-1)));
    }
    inv
}

/// A constant Poisson bivector `π` on `M`: `{a, b} = π^{ij} ∂_i a ∂_j b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    space: Space,
    pi: Vec<Vec<Scalar>>,
}

impl PoissonStructure {
    pub fn new(space: &Space, pi: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = space.dim();
        if pi.len() != n || pi.iter().any(|r| r.len() != n) {
            return Err(Error::Arity { expected: n, found: pi.len() });
        }
        for i in 0..n {
            for j in 0..n {
                if pi[i][j] != -&pi[j][i] {
                    return Err(Error::Precondition("Poisson tensor must be antisymmetric".into()));
                }
            }
        }
        Ok(PoissonStructure { space: space.clone(), pi })
    }

    pub fn zero(space: &Space) -> Self {
        let n = space.dim();
        PoissonStructure { space: space.clone(), pi: vec![vec![Scalar::zero(); n]; n] }
    }

    /// `{x^{2i−1}, x^{2i}} = c` on `ℝ^{2n}`.
    pub fn standard(space: &Space, c: Scalar) -> Result<Self> {
        let n = space.dim();
        if !n.is_multiple_of(2) {
            return Err(Error::Precondition("symplectic base must be even-dimensional".into()));
        }
        let mut pi = vec![vec![Scalar::zero(); n]; n];
        for i in (0..n).step_by(2) {
            pi[i][i + 1] = c.clone();
            pi[i + 1][i] = -&c;
        }
        PoissonStructure::new(space, pi)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn tensor(&self) -> &[Vec<Scalar>] {
        &self.pi
    }

    pub fn bracket(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        self.hamiltonian(a).apply(b)
    }

    /// `X_a = π^{ij} ∂_i a ∂_j`, so that `X_a b = {a, b}`.
    pub fn hamiltonian(&self, a: &Polynomial) -> DiffOp {
        let n = self.space.dim();
        let mut out = DiffOp::zero(&self.space);
        for i in 0..n {
            let da = a.derivative(i);
            if da.is_zero() {
                continue;
            }
            for j in 0..n {
                if !self.pi[i][j].is_zero() {
                    out.add_term(MultiIndex::unit(n, j), &da.scale(&self.pi[i][j]));
                }
            }
        }
        out
    }

    /// The bracket as a bidifferential operator over `proj`'s base.
    pub fn cochain(&self, proj: &Projection) -> Bidiff {
        let n = self.space.dim();
        let mut out = MultiDiffOp::zero(proj, 2);
        let one = Polynomial::one(proj.total());
        for i in 0..n {
            for j in 0..n {
                out.add_term(vec![MultiIndex::unit(n, i), MultiIndex::unit(n, j)], &one.scale(&self.pi[i][j]));
            }
        }
        out
    }

    /// `ω = π⁻¹`; fails for degenerate `π`.
    pub fn symplectic_form(&self) -> Result<Vec<Vec<Scalar>>> {
        let m = Matrix::from_rows(self.pi.clone());
        let inv = m.inverse().map_err(|_| Error::Precondition("Poisson tensor is degenerate".into()))?;
        Ok((0..inv.rows()).map(|i| inv.row(i).to_vec()).collect())
    }
}
