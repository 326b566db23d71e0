//! Differential operators with polynomial coefficients and the coordinate
//! projection `pr: N → M` used to pull functions back.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Polynomial, Space};
use crate::scalar::Scalar;

/// `Σ_J c_J ∂^J` with coefficients written to the left of the derivatives.
///
/// The normal form is unique, so structural equality is operator equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiffOp {
    space: Space,
    terms: BTreeMap<MultiIndex, Polynomial>,
}

impl DiffOp {
    pub fn zero(space: &Space) -> Self {
        DiffOp { space: space.clone(), terms: BTreeMap::new() }
    }

    pub fn identity(space: &Space) -> Self {
        DiffOp::multiplication(&Polynomial::one(space))
    }

    /// Multiplication by `p`.
    pub fn multiplication(p: &Polynomial) -> Self {
        DiffOp::monomial(MultiIndex::zero(p.space().dim()), p.clone())
    }

    /// `∂/∂x_i`.
    pub fn partial(space: &Space, i: usize) -> Self {
        DiffOp::monomial(MultiIndex::unit(space.dim(), i), Polynomial::one(space))
    }

    /// `coeff · ∂^j`.
    pub fn monomial(j: MultiIndex, coeff: Polynomial) -> Self {
        let mut d = DiffOp::zero(coeff.space());
        d.add_term(j, &coeff);
        d
    }

    pub fn from_terms<I>(space: &Space, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Polynomial)>,
    {
        let mut d = DiffOp::zero(space);
        for (j, c) in terms {
            d.add_term(j, &c);
        }
        d
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Polynomial)> {
        self.terms.iter()
    }

    pub fn coeff(&self, j: &MultiIndex) -> Polynomial {
        self.terms.get(j).cloned().unwrap_or_else(|| Polynomial::zero(&self.space))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order; `None` for the zero operator.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::order).max()
    }

    pub fn add_term(&mut self, j: MultiIndex, c: &Polynomial) {
        assert_eq!(c.space(), &self.space, "coefficient lives on a different space");
        assert_eq!(j.len(), self.space.dim());
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(j).or_insert_with(|| Polynomial::zero(&self.space));
        entry.add_assign_ref(c);
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_assign_ref(&mut self, other: &DiffOp) {
        for (j, c) in &other.terms {
            self.add_term(j.clone(), c);
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn checked_add(&self, other: &DiffOp) -> Result<DiffOp> {
        self.space.ensure_same(&other.space)?;
        Ok(self.add(other))
    }

    pub fn scale(&self, s: &Scalar) -> DiffOp {
        if s.is_zero() {
            return DiffOp::zero(&self.space);
        }
        DiffOp {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(j, c)| (j.clone(), c.scale(s))).collect(),
        }
    }

    /// `p · D`.
    pub fn left_mul(&self, p: &Polynomial) -> DiffOp {
        let mut out = DiffOp::zero(&self.space);
        for (j, c) in &self.terms {
            out.add_term(j.clone(), &(p * c));
        }
        out
    }

    /// `D(f) = Σ c_J ∂^J f`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        assert_eq!(f.space(), &self.space, "operator and function live on different spaces");
        let mut out = Polynomial::zero(&self.space);
        for (j, c) in &self.terms {
            let d = f.derivative_multi(j);
            if !d.is_zero() {
                out.add_assign_ref(&(c * &d));
            }
        }
        out
    }

    pub fn checked_apply(&self, f: &Polynomial) -> Result<Polynomial> {
        self.space.ensure_same(f.space())?;
        Ok(self.apply(f))
    }

    /// `D ∘ E`, renormalized by the Leibniz rule.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        assert_eq!(self.space, other.space, "composing operators on different spaces");
        let mut out = DiffOp::zero(&self.space);
        for (j, c) in &self.terms {
            for (k, e) in &other.terms {
                for l in j.sub_indices() {
                    let de = e.derivative_multi(&l);
                    if de.is_zero() {
                        continue;
                    }
                    let rest = j.checked_sub(&l).expect("sub index");
                    let coef = Scalar::from_int(j.binomial(&l) as i64);
                    out.add_term(rest.add(k), &(c * &de).scale(&coef));
                }
            }
        }
        out
    }

    pub fn checked_compose(&self, other: &DiffOp) -> Result<DiffOp> {
        self.space.ensure_same(&other.space)?;
        Ok(self.compose(other))
    }

    /// `[D, E] = D∘E − E∘D`.
    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        self.compose(other).sub(&other.compose(self))
    }

    /// `D ∘ g = Σ_L (∂^L g) · D_L` with `D_L = Σ_K C(K, L) c_K ∂^{K−L}`.
    /// Returns the pairs `(L, D_L)` with `D_L ≠ 0`.
    pub fn right_mul_expansion(&self) -> Vec<(MultiIndex, DiffOp)> {
        let mut acc: BTreeMap<MultiIndex, DiffOp> = BTreeMap::new();
        for (k, c) in &self.terms {
            for l in k.sub_indices() {
                let rest = k.checked_sub(&l).expect("sub index");
                let coef = Scalar::from_int(k.binomial(&l) as i64);
                acc.entry(l)
                    .or_insert_with(|| DiffOp::zero(&self.space))
                    .add_term(rest, &c.scale(&coef));
            }
        }
        acc.into_iter().filter(|(_, d)| !d.is_zero()).collect()
    }

    /// Split into the part whose derivatives only involve fiber coordinates
    /// and the remainder (at least one base derivative).
    pub fn vertical_split(&self) -> (DiffOp, DiffOp) {
        let k = self.space.base_rank();
        let mut ver = DiffOp::zero(&self.space);
        let mut hor = DiffOp::zero(&self.space);
        for (j, c) in &self.terms {
            if j.as_slice()[..k].iter().all(|&e| e == 0) {
                ver.add_term(j.clone(), c);
            } else {
                hor.add_term(j.clone(), c);
            }
        }
        (ver, hor)
    }

    pub fn vertical_part(&self) -> DiffOp {
        self.vertical_split().0
    }

    /// Substitute operators for the coordinate derivatives:
    /// `Σ c_J ∂^J ↦ Σ coeff_map(c_J) · Π_j fields[j]^{J_j}`. Used for lifts,
    /// where the fields are expected to commute.
    pub fn substitute_fields(
        &self,
        target: &Space,
        mut coeff_map: impl FnMut(&Polynomial) -> Polynomial,
        fields: &[DiffOp],
    ) -> DiffOp {
        assert_eq!(fields.len(), self.space.dim());
        let mut out = DiffOp::zero(target);
        for (j, c) in &self.terms {
            let mut word = DiffOp::multiplication(&coeff_map(c));
            for (i, &e) in j.as_slice().iter().enumerate() {
                for _ in 0..e {
                    word = word.compose(&fields[i]);
                }
            }
            out.add_assign_ref(&word);
        }
        out
    }
}

impl fmt::Display for DiffOp {
    /// `(coeff)*D[x1^2*x2] + …`, highest symbols first; `0` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j.is_zero() {
                write!(f, "({c})")?;
            } else {
                let sym = Polynomial::monomial(&self.space, j.clone(), Scalar::one());
                write!(f, "({c})*D[{sym}]")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The coordinate projection `pr: N → M`, `(y¹…yⁿ) ↦ (y¹…y^k, 0…0)` where
/// `k` is the base rank of `N`. Pullback sends `xⁱ ↦ yⁱ` for `i ≤ k` and
/// `xⁱ ↦ 0` otherwise.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Projection {
    source: Space,
    target: Space,
}

impl Projection {
    /// `base` is `M` (dimension `m`), `total` is `N` whose base rank `k`
    /// must satisfy `k ≤ m`.
    pub fn new(base: &Space, total: &Space) -> Result<Self> {
        if total.base_rank() > base.dim() {
            return Err(Error::Precondition(format!(
                "projection rank {} exceeds base dimension {}",
                total.base_rank(),
                base.dim()
            )));
        }
        Ok(Projection { source: base.clone(), target: total.clone() })
    }

    /// The identity of `M` (every coordinate of `M` is a base coordinate).
    /// Panics unless every coordinate of `space` is a base coordinate.
    pub fn identity(space: &Space) -> Self {
        assert_eq!(space.base_rank(), space.dim(), "identity projection needs a pure base space");
        Projection { source: space.clone(), target: space.clone() }
    }

    /// The base `M`.
    pub fn base(&self) -> &Space {
        &self.source
    }

    /// The total space `N`.
    pub fn total(&self) -> &Space {
        &self.target
    }

    pub fn rank(&self) -> usize {
        self.target.base_rank()
    }

    pub fn pullback(&self, a: &Polynomial) -> Polynomial {
        assert_eq!(a.space(), &self.source, "pullback of a function on the wrong space");
        let k = self.rank();
        let map: Vec<Option<usize>> = (0..self.source.dim()).map(|i| (i < k).then_some(i)).collect();
        a.reindex(&self.target, &map)
    }

    pub fn checked_pullback(&self, a: &Polynomial) -> Result<Polynomial> {
        self.source.ensure_same(a.space())?;
        Ok(self.pullback(a))
    }

    /// Multi-index on `M` for a derivative on `N` supported on base
    /// coordinates; `None` if a fiber coordinate is differentiated.
    pub fn base_index(&self, l: &MultiIndex) -> Option<MultiIndex> {
        let k = self.rank();
        l.supported_below(k).then(|| l.resized(self.source.dim()))
    }

    /// The multi-index on `N` matching a base multi-index on `M`, or `None`
    /// if it touches coordinates that are killed by the pullback.
    pub fn lift_index(&self, i: &MultiIndex) -> Option<MultiIndex> {
        let k = self.rank();
        i.supported_below(k).then(|| i.resized(self.target.dim()))
    }
}
