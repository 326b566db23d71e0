//! Sparse multivariate polynomials over [`Scalar`].
//!
//! Polynomials are the computable stand-in for smooth functions. Every
//! polynomial lives on a [`Space`], an ordered list of coordinate names whose
//! first `base_rank` entries are "base" coordinates and the rest "fiber"
//! coordinates. Terms are kept in a [`BTreeMap`] keyed by [`MultiIndex`] in
//! graded lexicographic order, zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct SpaceData {
    names: Vec<String>,
    base_rank: usize,
}

/// An ordered set of named coordinates, split into base and fiber parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Space(Arc<SpaceData>);

impl Space {
    /// Panics if `base_rank > names.len()` or names repeat.
    pub fn new(names: Vec<String>, base_rank: usize) -> Self {
        assert!(base_rank <= names.len(), "base rank exceeds dimension");
        for (i, a) in names.iter().enumerate() {
            assert!(!names[..i].contains(a), "duplicate coordinate `{a}`");
        }
        Space(Arc::new(SpaceData { names, base_rank }))
    }

    /// `prefix1, …, prefixN`, all of them base coordinates.
    pub fn coordinates(prefix: &str, n: usize) -> Self {
        Space::fibered(prefix, n, n)
    }

    /// `prefix1, …, prefixN` with the first `k` declared as base coordinates.
    pub fn fibered(prefix: &str, n: usize, k: usize) -> Self {
        Space::new((1..=n).map(|i| format!("{prefix}{i}")).collect(), k)
    }

    pub fn dim(&self) -> usize {
        self.0.names.len()
    }

    pub fn base_rank(&self) -> usize {
        self.0.base_rank
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    pub fn is_base(&self, i: usize) -> bool {
        i < self.0.base_rank
    }

    /// The same coordinates with every coordinate counted as base.
    pub fn flattened(&self) -> Space {
        Space::new(self.names().to_vec(), self.dim())
    }

    pub(crate) fn ensure_same(&self, other: &Space) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.0.names.join(","),
                right: other.0.names.join(","),
            })
        }
    }
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space[{}|{}]", self.0.names.join(","), self.0.base_rank)
    }
}

/// Exponent vector, one entry per coordinate of the ambient space.
///
/// Ordered graded-lexicographically: total degree first, then the exponent of
/// the first coordinate, and so on.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(SmallVec<[u32; 8]>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = MultiIndex::zero(n);
        m.0[i] = 1;
        m
    }

    pub fn from_slice(e: &[u32]) -> Self {
        MultiIndex(SmallVec::from_slice(e))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, e: u32) {
        self.0[i] = e;
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` if `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = SmallVec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    /// Product of binomials `C(self, other)`; zero unless `other ≤ self`.
    pub fn binomial(&self, other: &MultiIndex) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| crate::scalar::binomial(a, b))
            .product()
    }

    /// `I!` as a product of factorials.
    pub fn factorial(&self) -> u64 {
        self.0
            .iter()
            .map(|&e| (1..=u64::from(e)).product::<u64>())
            .product()
    }

    /// All `L ≤ self` componentwise, in a fixed order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(SmallVec::new())];
        for &e in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for prefix in &out {
                for j in 0..=e {
                    let mut p = prefix.clone();
                    p.0.push(j);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }

    /// All exponent vectors of length `n` with total order ≤ `max`.
    pub fn all_up_to(n: usize, max: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = MultiIndex::zero(n);
        fn rec(i: usize, left: u32, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
            if i == cur.len() {
                out.push(cur.clone());
                return;
            }
            for e in 0..=left {
                cur.0[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur.0[i] = 0;
        }
        rec(0, max, &mut cur, &mut out);
        out.sort();
        out
    }

    /// Restrict to the first `k` entries (padding or truncating to length `k`).
    pub fn resized(&self, k: usize) -> MultiIndex {
        let mut v: SmallVec<[u32; 8]> = self.0.iter().copied().take(k).collect();
        v.resize(k, 0);
        MultiIndex(v)
    }

    /// True if every nonzero entry sits at a position `< k`.
    pub fn supported_below(&self, k: usize) -> bool {
        self.0.iter().skip(k).all(|&e| e == 0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.0.len().cmp(&other.0.len()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// A polynomial on a [`Space`] with [`Scalar`] coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    space: Space,
    terms: BTreeMap<MultiIndex, Scalar>,
}

impl Polynomial {
    pub fn zero(space: &Space) -> Self {
        Polynomial { space: space.clone(), terms: BTreeMap::new() }
    }

    pub fn one(space: &Space) -> Self {
        Polynomial::constant(space, Scalar::one())
    }

    pub fn constant(space: &Space, c: Scalar) -> Self {
        Polynomial::monomial(space, MultiIndex::zero(space.dim()), c)
    }

    pub fn monomial(space: &Space, exps: MultiIndex, c: Scalar) -> Self {
        assert_eq!(exps.len(), space.dim(), "exponent length does not match space");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Polynomial { space: space.clone(), terms }
    }

    /// The `i`-th coordinate function.
    pub fn var(space: &Space, i: usize) -> Self {
        Polynomial::monomial(space, MultiIndex::unit(space.dim(), i), Scalar::one())
    }

    pub fn var_named(space: &Space, name: &str) -> Result<Self> {
        let i = space.index_of(name).ok_or_else(|| Error::UnknownVariable(name.into()))?;
        Ok(Polynomial::var(space, i))
    }

    /// Build from `(exponents, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I>(space: &Space, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        let mut p = Polynomial::zero(space);
        for (e, c) in terms {
            assert_eq!(e.len(), space.dim(), "exponent length does not match space");
            p.add_term(e, &c);
        }
        p
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Scalar)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &MultiIndex) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&MultiIndex::zero(self.space.dim()))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_zero())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.order()).max()
    }

    /// Degree in the variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Adds `c·x^e` in place.
    pub fn add_term(&mut self, e: MultiIndex, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Polynomial) {
        assert_same(&self.space, &other.space);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, s: &Scalar) {
        assert_same(&self.space, &other.space);
        if s.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            self.add_term(e.clone(), &(c * s));
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.space.ensure_same(&other.space)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.space.ensure_same(&other.space)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.space.ensure_same(&other.space)?;
        Ok(self * other)
    }

    pub fn scale(&self, s: &Scalar) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(&self.space);
        }
        Polynomial {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.space);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `∂p/∂x_i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.space);
        for (e, c) in &self.terms {
            let k = e[i];
            if k == 0 {
                continue;
            }
            let mut f = e.clone();
            f.set(i, k - 1);
            out.add_term(f, &(c * &Scalar::from_int(i64::from(k))));
        }
        out
    }

    pub fn derivative_named(&self, name: &str) -> Result<Polynomial> {
        let i = self.space.index_of(name).ok_or_else(|| Error::UnknownVariable(name.into()))?;
        Ok(self.derivative(i))
    }

    /// `∂^J p` for a multi-index `J` on this space.
    pub fn derivative_multi(&self, j: &MultiIndex) -> Polynomial {
        assert_eq!(j.len(), self.space.dim());
        let mut out = Polynomial::zero(&self.space);
        for (e, c) in &self.terms {
            let Some(rest) = e.checked_sub(j) else { continue };
            // e!/(e-j)! falling factorial
            let mut f: i64 = 1;
            for (a, b) in e.as_slice().iter().zip(j.as_slice()) {
                for t in 0..*b {
                    f *= i64::from(a - t);
                }
            }
            out.add_term(rest, &(c * &Scalar::from_int(f)));
        }
        out
    }

    /// Moves variables around without arithmetic: variable `i` becomes
    /// `target` variable `map[i]`, or is set to zero when `map[i]` is `None`.
    /// Several source variables may land on the same target variable.
    pub fn reindex(&self, target: &Space, map: &[Option<usize>]) -> Polynomial {
        assert_eq!(map.len(), self.space.dim());
        let mut out = Polynomial::zero(target);
        'terms: for (e, c) in &self.terms {
            let mut f = MultiIndex::zero(target.dim());
            for (i, &k) in e.as_slice().iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => f.set(j, f[j] + k),
                    None => continue 'terms,
                }
            }
            out.add_term(f, c);
        }
        out
    }

    /// Composition `p(images[0], …, images[n-1])` with images on `target`.
    pub fn substitute(&self, target: &Space, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.space.dim() {
            return Err(Error::Arity { expected: self.space.dim(), found: images.len() });
        }
        for im in images {
            target.ensure_same(&im.space)?;
        }
        // cache powers of each image
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|im| vec![Polynomial::one(target), im.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (i, &k) in e.as_slice().iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][k as usize];
                if term.is_zero() {
                    break;
                }
            }
            out.add_assign_ref(&term);
        }
        Ok(out)
    }

    /// Substitution driven by coordinate names. Every coordinate of `self`
    /// must be mapped; the images live on `target` and are typically affine,
    /// e.g. `w ↦ t·w + (1-t)·v`.
    pub fn substitute_affine(
        &self,
        target: &Space,
        map: &BTreeMap<String, Polynomial>,
    ) -> Result<Polynomial> {
        let images = self
            .space
            .names()
            .iter()
            .map(|n| map.get(n).cloned().ok_or_else(|| Error::UnmappedVariable(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        self.substitute(target, &images)
    }

    /// Iterated integral over the ordered simplex `1 ≥ t₁ ≥ … ≥ t_k ≥ 0`,
    /// `params = [t₁, …, t_k]` given by name. The result lives on the space
    /// obtained by deleting the parameters.
    pub fn integrate_simplex(&self, params: &[&str]) -> Result<Polynomial> {
        let idx = params
            .iter()
            .map(|n| self.space.index_of(n).ok_or_else(|| Error::UnknownVariable((*n).into())))
            .collect::<Result<Vec<_>>>()?;
        let keep: Vec<usize> = (0..self.space.dim()).filter(|i| !idx.contains(i)).collect();
        let base_rank = keep.iter().filter(|&&i| self.space.is_base(i)).count();
        let target = Space::new(keep.iter().map(|&i| self.space.name(i).to_string()).collect(), base_rank);
        Ok(self.integrate_simplex_into(&idx, &target))
    }

    /// Like [`Polynomial::integrate_simplex`] but with parameter positions and
    /// the (already built) target space supplied by the caller. `target`
    /// must list the remaining coordinates in their original order.
    pub fn integrate_simplex_into(&self, params: &[usize], target: &Space) -> Polynomial {
        let mut out = Polynomial::zero(target);
        let keep: Vec<usize> = (0..self.space.dim()).filter(|i| !params.contains(i)).collect();
        debug_assert_eq!(keep.len(), target.dim());
        for (e, c) in &self.terms {
            // innermost first: ∫_0^{t_{j-1}} t_j^a dt_j = t_{j-1}^{a+1}/(a+1)
            let mut coef = c.clone();
            let mut carry: u32 = 0;
            for &p in params.iter().rev() {
                let a = e[p] + carry;
                coef = &coef * &Scalar::ratio(1, i64::from(a) + 1);
                carry = a + 1;
            }
            let f = MultiIndex::from_slice(&keep.iter().map(|&i| e[i]).collect::<Vec<_>>());
            out.add_term(f, &coef);
        }
        out
    }

    /// Evaluate at a point given as scalars.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.space.dim());
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.as_slice().iter().enumerate() {
                if k > 0 {
                    t = &t * &point[i].pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Parse the canonical text form, e.g. `x1^2*x2 - 1/2*i*x1 + 3`.
    pub fn parse(space: &Space, src: &str) -> Result<Polynomial> {
        crate::parse::parse_polynomial(space, src)
    }

    /// Same polynomial viewed on a different space with identical names.
    pub fn with_space(&self, space: &Space) -> Result<Polynomial> {
        if space.names() != self.space.names() {
            return Err(Error::SpaceMismatch {
                left: self.space.names().join(","),
                right: space.names().join(","),
            });
        }
        Ok(Polynomial { space: space.clone(), terms: self.terms.clone() })
    }
}

#[track_caller]
fn assert_same(a: &Space, b: &Space) {
    if a != b {
        panic!("{}", Error::SpaceMismatch { left: a.names().join(","), right: b.names().join(",") });
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::from_int(-1));
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_same(&self.space, &rhs.space);
        let mut out = Polynomial::zero(&self.space);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.add(e2), &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&Scalar::from_int(-1))
    }
}

macro_rules! forward_poly {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}

forward_poly!(Add, add);
forward_poly!(Sub, sub);
forward_poly!(Mul, mul);

fn fmt_monomial(space: &Space, e: &MultiIndex) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.as_slice().iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(space.name(i).to_string()),
            _ => parts.push(format!("{}^{}", space.name(i), k)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    /// Terms in descending graded-lex order, explicit rational coefficients,
    /// `i` for the imaginary unit; `0` for the zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono = fmt_monomial(&self.space, e);
            let zero = num_rational::BigRational::from_integer(0.into());
            let (neg, mag) = if (c.is_real() && c.re() < &zero) || (c.re().is_zero_ref() && c.im() < &zero) {
                (true, -c)
            } else {
                (false, c.clone())
            };
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono
            } else {
                format!("{mag}*{mono}")
            };
            match (first, neg) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

trait ZeroRef {
    fn is_zero_ref(&self) -> bool;
}

impl ZeroRef for num_rational::BigRational {
    fn is_zero_ref(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Space {
        Space::coordinates("x", 2)
    }

    #[test]
    fn difference_of_squares() {
        let s = xy();
        let x1 = Polynomial::var(&s, 0);
        let one = Polynomial::one(&s);
        let p = (&x1 + &one) * (&x1 - &one);
        assert_eq!(p.to_string(), "x1^2 - 1");
        assert_eq!(&p + &Polynomial::zero(&s), p);
    }

    #[test]
    fn rational_coefficient_product() {
        let s = xy();
        let a = Polynomial::var(&s, 0).scale(&Scalar::ratio(1, 2));
        let b = Polynomial::var(&s, 1).scale(&Scalar::ratio(2, 3));
        // independent route: (1·x1)(2·x2) = 2 x1x2, then divide by 2·3
        let scaled = (Polynomial::var(&s, 0) * Polynomial::var(&s, 1).scale(&Scalar::from_int(2)))
            .scale(&Scalar::ratio(1, 6));
        assert_eq!(&a * &b, scaled);
        assert_eq!((&a * &b).to_string(), "1/3*x1*x2");
    }

    #[test]
    fn mismatched_spaces_error() {
        let a = Polynomial::var(&xy(), 0);
        let b = Polynomial::var(&Space::coordinates("y", 2), 0);
        assert!(matches!(a.checked_add(&b), Err(Error::SpaceMismatch { .. })));
        assert!(a.checked_mul(&b).is_err());
    }

    #[test]
    fn partial_derivatives() {
        let s = xy();
        let x1 = Polynomial::var(&s, 0);
        let x2 = Polynomial::var(&s, 1);
        assert_eq!(x1.pow(3).derivative(0), x1.pow(2).scale(&Scalar::from_int(3)));
        assert_eq!((&x1 * &x2).derivative_named("x2").unwrap(), x1);
        assert!(Polynomial::constant(&s, Scalar::from_int(7)).derivative(0).is_zero());
        assert!(matches!(x1.derivative_named("z"), Err(Error::UnknownVariable(_))));
        let p = x1.pow(3) * x2.pow(2);
        assert_eq!(p.derivative_multi(&MultiIndex::from_slice(&[2, 1])), p.derivative(0).derivative(0).derivative(1));
    }

    #[test]
    fn affine_substitution() {
        let src = Space::new(vec!["w".into()], 1);
        let tgt = Space::new(vec!["t".into(), "v".into(), "w".into()], 3);
        let t = Polynomial::var(&tgt, 0);
        let v = Polynomial::var(&tgt, 1);
        let w = Polynomial::var(&tgt, 2);
        let one = Polynomial::one(&tgt);
        let img = &(&t * &w) + &(&(&one - &t) * &v);
        let mut map = BTreeMap::new();
        map.insert("w".to_string(), img);
        let p = Polynomial::var(&src, 0).pow(2);
        let got = p.substitute_affine(&tgt, &map).unwrap();
        let s = &one - &t;
        let expected = &(&(&t.pow(2) * &w.pow(2)) + &(&(&t * &s) * &(&v * &w)).scale(&Scalar::from_int(2)))
            + &(&s.pow(2) * &v.pow(2));
        assert_eq!(got, expected);

        // missing image
        let empty = BTreeMap::new();
        assert!(matches!(p.substitute_affine(&tgt, &empty), Err(Error::UnmappedVariable(_))));
    }

    #[test]
    fn diagonal_evaluation_vanishes() {
        let s = Space::new(vec!["q1".into(), "v1".into()], 2);
        let tgt = Space::new(vec!["v1".into()], 1);
        let p = &Polynomial::var(&s, 0) - &Polynomial::var(&s, 1);
        let v = Polynomial::var(&tgt, 0);
        let mut map = BTreeMap::new();
        map.insert("q1".to_string(), v.clone());
        map.insert("v1".to_string(), v);
        assert!(p.substitute_affine(&tgt, &map).unwrap().is_zero());
    }

    #[test]
    fn simplex_integrals() {
        let s = Space::new(vec!["t1".into(), "t2".into(), "v".into(), "w".into()], 4);
        let one = Polynomial::one(&s);
        assert_eq!(one.integrate_simplex(&["t1", "t2"]).unwrap().constant_term(), Scalar::ratio(1, 2));
        let t1 = Polynomial::var(&s, 0);
        assert_eq!(t1.integrate_simplex(&["t1"]).unwrap().to_string(), "1/2");
        // 2(t1 v + (1 - t1) w) -> v + w
        let v = Polynomial::var(&s, 2);
        let w = Polynomial::var(&s, 3);
        let p = (&(&t1 * &v) + &(&(&one - &t1) * &w)).scale(&Scalar::from_int(2));
        assert_eq!(p.integrate_simplex(&["t1"]).unwrap().to_string(), "v + w");
    }

    #[test]
    fn grlex_order() {
        let a = MultiIndex::from_slice(&[0, 2]);
        let b = MultiIndex::from_slice(&[1, 0]);
        let c = MultiIndex::from_slice(&[1, 1]);
        assert!(b < a && a < c);
        assert_eq!(MultiIndex::all_up_to(2, 2).len(), 6);
    }

    #[test]
    fn rendering_signs() {
        let s = xy();
        let p = Polynomial::parse(&s, "-x1^2 + 1/2*i*x2 - i - 3*x1*x2").unwrap();
        assert_eq!(p.to_string(), "-x1^2 - 3*x1*x2 + 1/2*i*x2 - i");
    }
}
