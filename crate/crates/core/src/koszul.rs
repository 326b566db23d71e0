//! Bar and Koszul resolutions of polynomial functions on `V = ℝᵐ`, the
//! comparison maps between them, and the cochain-level bridges to
//! multidifferential Hochschild cochains.
//!
//! A bar chain of degree `k` is a polynomial on `V^{k+2}` with coordinate
//! blocks `(v, q₁…q_k, w)`. A Koszul chain of degree `k` is a family of
//! polynomials on `V × V` indexed by increasing `k`-tuples, standing for
//! `Σ_I p_I(v, w) e^I`.

use std::collections::BTreeMap;
use std::fmt;

use crate::diffop::Projection;
use crate::error::{Error, Result};
use crate::multidiff::{ModuleValue, MultiDiffOp};
use crate::poly::{MultiIndex, Polynomial, Space};
use crate::scalar::Scalar;

/// All permutations of `0..k` with their signs, in lexicographic order.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let mut inversions = 0;
            for i in 0..k {
                for j in i + 1..k {
                    if p[i] > p[j] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

/// Sort an index tuple, returning the sign of the sorting permutation, or
/// `None` if an index repeats (the wedge vanishes).
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Increasing `k`-tuples from `0..m`.
pub fn increasing_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// All `k`-tuples from `0..m` with pairwise distinct entries.
fn distinct_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for inc in increasing_tuples(m, k) {
        for (p, _) in permutations(k) {
            out.push(p.iter().map(|&i| inc[i]).collect());
        }
    }
    out.sort();
    out
}

fn signed(s: i64) -> Scalar {
    Scalar::from_int(s)
}

/// Element of `V^{k+2}` in block form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BarChain {
    degree: usize,
    poly: Polynomial,
}

impl BarChain {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn add(&self, other: &BarChain) -> BarChain {
        assert_eq!(self.degree, other.degree);
        BarChain { degree: self.degree, poly: &self.poly + &other.poly }
    }

    pub fn sub(&self, other: &BarChain) -> BarChain {
        assert_eq!(self.degree, other.degree);
        BarChain { degree: self.degree, poly: &self.poly - &other.poly }
    }
}

/// `Σ_I p_I(v, w) e^I` over increasing tuples `I`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KoszulChain {
    degree: usize,
    terms: BTreeMap<Vec<usize>, Polynomial>,
}

impl KoszulChain {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Polynomial)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> Option<&Polynomial> {
        self.terms.get(idx)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · e^{idx}` for an arbitrary (not necessarily sorted) tuple.
    pub fn add_wedge(&mut self, idx: &[usize], c: &Polynomial) {
        assert_eq!(idx.len(), self.degree);
        let Some((sorted, sign)) = sort_with_sign(idx) else { return };
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(sorted).or_insert_with(|| Polynomial::zero(c.space()));
        e.add_scaled(c, &signed(sign));
        self.terms.retain(|_, p| !p.is_zero());
    }

    pub fn add(&self, other: &KoszulChain) -> KoszulChain {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (i, p) in &other.terms {
            out.add_wedge(i, p);
        }
        out
    }

    pub fn sub(&self, other: &KoszulChain) -> KoszulChain {
        let neg = KoszulChain {
            degree: other.degree,
            terms: other.terms.iter().map(|(i, p)| (i.clone(), -p)).collect(),
        };
        self.add(&neg)
    }
}

/// The spaces and maps of both resolutions for a fixed `m`.
#[derive(Clone, Debug)]
pub struct BarComplex {
    m: usize,
    base: Space,
    spaces: Vec<Space>,
    integration: Vec<Space>,
}

impl BarComplex {
    /// Supports chains up to degree `max_degree + 1` (homotopies raise degree).
    pub fn new(m: usize, max_degree: usize) -> Self {
        let base = Space::coordinates("v", m);
        let mut spaces = Vec::new();
        let mut integration = Vec::new();
        for k in 0..=max_degree + 1 {
            let mut names: Vec<String> = (1..=m).map(|c| format!("v{c}")).collect();
            for j in 1..=k {
                names.extend((1..=m).map(|c| format!("q{j}_{c}")));
            }
            names.extend((1..=m).map(|c| format!("w{c}")));
            let dim = names.len();
            spaces.push(Space::new(names, dim));
            let mut tnames: Vec<String> = (1..=m).map(|c| format!("v{c}")).collect();
            tnames.extend((1..=m).map(|c| format!("w{c}")));
            tnames.extend((1..=k.max(1)).map(|j| format!("t{j}")));
            let dim = tnames.len();
            integration.push(Space::new(tnames, dim));
        }
        BarComplex { m, base, spaces, integration }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_degree(&self) -> usize {
        self.spaces.len() - 2
    }

    /// `V` with coordinates `v1…vm`.
    pub fn base(&self) -> &Space {
        &self.base
    }

    /// `V^{k+2}`.
    pub fn space(&self, k: usize) -> &Space {
        &self.spaces[k]
    }

    /// `V × V`, the space of Koszul chain coefficients.
    pub fn pair(&self) -> &Space {
        &self.spaces[0]
    }

    fn coord(&self, block: usize, c: usize) -> usize {
        block * self.m + c
    }

    pub fn chain(&self, degree: usize, poly: Polynomial) -> Result<BarChain> {
        self.space(degree).ensure_same(poly.space())?;
        Ok(BarChain { degree, poly })
    }

    pub fn zero_chain(&self, degree: usize) -> BarChain {
        BarChain { degree, poly: Polynomial::zero(self.space(degree)) }
    }

    pub fn koszul_zero(&self, degree: usize) -> KoszulChain {
        KoszulChain { degree, terms: BTreeMap::new() }
    }

    pub fn koszul_chain<I>(&self, degree: usize, terms: I) -> Result<KoszulChain>
    where
        I: IntoIterator<Item = (Vec<usize>, Polynomial)>,
    {
        let mut out = self.koszul_zero(degree);
        for (idx, p) in terms {
            self.pair().ensure_same(p.space())?;
            if idx.len() != degree || idx.iter().any(|&i| i >= self.m) {
                return Err(Error::Precondition(format!("bad wedge index {idx:?}")));
            }
            out.add_wedge(&idx, &p);
        }
        Ok(out)
    }

    /// `χ ↦ Π a_j(q_j)`, the chain `1 ⊗ a₁ ⊗ ⋯ ⊗ a_k ⊗ 1`.
    pub fn tensor(&self, args: &[Polynomial]) -> BarChain {
        let k = args.len();
        let target = self.space(k);
        let mut p = Polynomial::one(target);
        for (j, a) in args.iter().enumerate() {
            let map: Vec<Option<usize>> = (0..self.m).map(|c| Some(self.coord(j + 1, c))).collect();
            p = &p * &a.reindex(target, &map);
        }
        BarChain { degree: k, poly: p }
    }

    /// Reindex a polynomial on `V^{k+2}` into `V^{k'+2}` by a block map.
    fn move_blocks(&self, p: &Polynomial, target_degree: usize, block_map: &[usize]) -> Polynomial {
        let target = self.space(target_degree);
        let mut map = Vec::with_capacity(p.space().dim());
        for &b in block_map {
            for c in 0..self.m {
                map.push(Some(self.coord(b, c)));
            }
        }
        p.reindex(target, &map)
    }

    /// `∂_X χ = Σ_{i=0}^{k} (−1)ⁱ χ(…, q_i, q_i, …)` (block `i` repeated).
    pub fn bar_differential(&self, chi: &BarChain) -> Result<BarChain> {
        let k = chi.degree;
        if k == 0 {
            return Err(Error::Precondition("degree-0 bar chains use the augmentation".into()));
        }
        let mut out = Polynomial::zero(self.space(k - 1));
        for i in 0..=k {
            let blocks: Vec<usize> = (0..k + 2).map(|b| if b <= i { b } else { b - 1 }).collect();
            let face = self.move_blocks(&chi.poly, k - 1, &blocks);
            out.add_scaled(&face, &signed(if i % 2 == 0 { 1 } else { -1 }));
        }
        Ok(BarChain { degree: k - 1, poly: out })
    }

    /// `ε(χ)(v) = χ(v, v)`.
    pub fn augmentation(&self, chi: &BarChain) -> Result<Polynomial> {
        if chi.degree != 0 {
            return Err(Error::Precondition("augmentation is defined on degree 0".into()));
        }
        let map: Vec<Option<usize>> = (0..2 * self.m).map(|i| Some(i % self.m)).collect();
        Ok(chi.poly.reindex(&self.base, &map))
    }

    /// `η(a)(v, w) = a(v)`.
    pub fn unit(&self, a: &Polynomial) -> BarChain {
        let map: Vec<Option<usize>> = (0..self.m).map(Some).collect();
        BarChain { degree: 0, poly: a.reindex(self.pair(), &map) }
    }

    /// `(hχ)(v, q₁…q_{k+1}, w) = −(−1)ᵏ χ(v, q₁…q_{k+1})`.
    pub fn bar_homotopy(&self, chi: &BarChain) -> BarChain {
        let k = chi.degree;
        let blocks: Vec<usize> = (0..k + 2).collect();
        let p = self.move_blocks(&chi.poly, k + 1, &blocks);
        let sign = if k.is_multiple_of(2) { -1 } else { 1 };
        BarChain { degree: k + 1, poly: p.scale(&signed(sign)) }
    }

    /// `(∂_K ω)(v, w) = ω(v, w)(v − w, …)`.
    pub fn koszul_differential(&self, omega: &KoszulChain) -> Result<KoszulChain> {
        let k = omega.degree;
        if k == 0 {
            return Err(Error::Precondition("degree-0 Koszul chains use the augmentation".into()));
        }
        let pair = self.pair();
        let mut out = self.koszul_zero(k - 1);
        for (idx, p) in &omega.terms {
            for (b, &i) in idx.iter().enumerate() {
                let xi = &Polynomial::var(pair, i) - &Polynomial::var(pair, self.m + i);
                let mut rest = idx.clone();
                rest.remove(b);
                let sign = if b % 2 == 0 { 1 } else { -1 };
                out.add_wedge(&rest, &(&xi * p).scale(&signed(sign)));
            }
        }
        Ok(out)
    }

    /// `ε(ω)(v) = ω(v, v)` on degree 0.
    pub fn koszul_augmentation(&self, omega: &KoszulChain) -> Result<Polynomial> {
        if omega.degree != 0 {
            return Err(Error::Precondition("augmentation is defined on degree 0".into()));
        }
        let p = omega.terms.get(&Vec::new()).cloned().unwrap_or_else(|| Polynomial::zero(self.pair()));
        self.augmentation(&BarChain { degree: 0, poly: p })
    }

    /// `η(a) = a(v) e^∅`.
    pub fn koszul_unit(&self, a: &Polynomial) -> KoszulChain {
        let mut out = self.koszul_zero(0);
        out.add_wedge(&[], &self.unit(a).poly);
        out
    }

    /// `(h_K ω)(v, w) = −Σ_j e^j ∧ ∫₀¹ tᵏ ∂ω/∂wʲ(v, tw + (1−t)v) dt`.
    pub fn koszul_homotopy(&self, omega: &KoszulChain) -> KoszulChain {
        let k = omega.degree;
        let ispace = &self.integration[0];
        let t = Polynomial::var(ispace, 2 * self.m);
        let one = Polynomial::one(ispace);
        let images: Vec<Polynomial> = (0..2 * self.m)
            .map(|i| {
                if i < self.m {
                    Polynomial::var(ispace, i)
                } else {
                    // w ↦ t·w + (1 − t)·v
                    &(&t * &Polynomial::var(ispace, i)) + &(&(&one - &t) * &Polynomial::var(ispace, i - self.m))
                }
            })
            .collect();
        let weight = t.pow(k as u32);
        let params = [2 * self.m];
        let mut out = self.koszul_zero(k + 1);
        for (idx, p) in &omega.terms {
            for j in 0..self.m {
                if idx.contains(&j) {
                    continue;
                }
                let d = p.derivative(self.m + j);
                if d.is_zero() {
                    continue;
                }
                let sub = d.substitute(ispace, &images).expect("images live on the integration space");
                let integral = (&sub * &weight).integrate_simplex_into(&params, self.pair());
                let mut wedge = vec![j];
                wedge.extend(idx.iter().copied());
                out.add_wedge(&wedge, &(-&integral));
            }
        }
        out
    }

    /// `F(ω)(v, q₁…q_k, w) = ω(v, w)(q₁ − v, …, q_k − v)`.
    pub fn chain_map_f(&self, omega: &KoszulChain) -> BarChain {
        let k = omega.degree;
        let target = self.space(k);
        let mut out = Polynomial::zero(target);
        let mut blocks = vec![0usize];
        blocks.push(k + 1);
        for (idx, p) in &omega.terms {
            let coeff = self.move_blocks(p, k, &blocks);
            // e^I(x₁…x_k) = det[x_l^{i_b}]
            let mut det = Polynomial::zero(target);
            for (sigma, sign) in permutations(k) {
                let mut prod = Polynomial::one(target);
                for (l, &s) in sigma.iter().enumerate() {
                    let i = idx[s];
                    let x = &Polynomial::var(target, self.coord(l + 1, i)) - &Polynomial::var(target, self.coord(0, i));
                    prod = &prod * &x;
                }
                det.add_scaled(&prod, &signed(sign));
            }
            out.add_assign_ref(&(&coeff * &det));
        }
        BarChain { degree: k, poly: out }
    }

    /// `∫_{1≥t₁≥…≥t_k≥0} ∂^kχ/∂q₁^{i₁}⋯∂q_k^{i_k}(v, t₁v+(1−t₁)w, …, w)`
    /// as a polynomial on `V × V`.
    fn g_integral(&self, chi: &BarChain, idx: &[usize]) -> Polynomial {
        let k = chi.degree;
        let mut d = chi.poly.clone();
        for (l, &i) in idx.iter().enumerate() {
            d = d.derivative(self.coord(l + 1, i));
            if d.is_zero() {
                return Polynomial::zero(self.pair());
            }
        }
        let ispace = &self.integration[k];
        let one = Polynomial::one(ispace);
        let v = |c: usize| Polynomial::var(ispace, c);
        let w = |c: usize| Polynomial::var(ispace, self.m + c);
        let mut images = Vec::with_capacity(self.space(k).dim());
        for c in 0..self.m {
            images.push(v(c));
        }
        for l in 0..k {
            let t = Polynomial::var(ispace, 2 * self.m + l);
            for c in 0..self.m {
                images.push(&(&t * &v(c)) + &(&(&one - &t) * &w(c)));
            }
        }
        for c in 0..self.m {
            images.push(w(c));
        }
        let sub = d.substitute(ispace, &images).expect("images live on the integration space");
        let params: Vec<usize> = (0..k).map(|l| 2 * self.m + l).collect();
        sub.integrate_simplex_into(&params, self.pair())
    }

    /// `G(χ) = Σ_{i₁…i_k} e^{i₁}∧⋯∧e^{i_k} · (simplex integral of mixed q-partials)`.
    pub fn chain_map_g(&self, chi: &BarChain) -> KoszulChain {
        let k = chi.degree;
        let mut out = self.koszul_zero(k);
        if k == 0 {
            out.add_wedge(&[], &chi.poly);
            return out;
        }
        for idx in distinct_tuples(self.m, k) {
            let integral = self.g_integral(chi, &idx);
            out.add_wedge(&idx, &integral);
        }
        out
    }

    /// The explicit projection
    /// `Θχ = Σ_{i} Σ_σ sign(σ) Π_l (q_l − v)^{i_{σ(l)}} · ∫ ∂^kχ/∂q^{i}(…)`.
    pub fn theta(&self, chi: &BarChain) -> BarChain {
        let k = chi.degree;
        if k == 0 {
            return chi.clone();
        }
        let target = self.space(k);
        let blocks = [0usize, k + 1];
        let perms = permutations(k);
        let mut out = Polynomial::zero(target);
        for idx in distinct_tuples(self.m, k) {
            let integral = self.g_integral(chi, &idx);
            if integral.is_zero() {
                continue;
            }
            let lifted = self.move_blocks(&integral, k, &blocks);
            for (sigma, sign) in &perms {
                let mut prod = lifted.clone();
                for l in 0..k {
                    let i = idx[sigma[l]];
                    let x = &Polynomial::var(target, self.coord(l + 1, i)) - &Polynomial::var(target, self.coord(0, i));
                    prod = &prod * &x;
                }
                out.add_scaled(&prod, &signed(*sign));
            }
        }
        BarChain { degree: k, poly: out }
    }
}

/// `Hom_{A^e}(K_k, 𝓜) ≅ Λᵏ(ℝᵐ) ⊗ 𝓜`: module elements indexed by increasing
/// tuples.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KoszulCochain<V: ModuleValue> {
    proj: Projection,
    degree: usize,
    terms: BTreeMap<Vec<usize>, V>,
}

impl<V: ModuleValue> KoszulCochain<V> {
    pub fn zero(proj: &Projection, degree: usize) -> Self {
        KoszulCochain { proj: proj.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(proj: &Projection, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, V)>,
    {
        let m = proj.base().dim();
        let mut out = KoszulCochain::zero(proj, degree);
        for (idx, v) in terms {
            if idx.len() != degree || idx.iter().any(|&i| i >= m) {
                return Err(Error::Precondition(format!("bad wedge index {idx:?}")));
            }
            proj.total().ensure_same(v.value_space())?;
            out.add_wedge(&idx, &v);
        }
        Ok(out)
    }

    pub fn proj(&self) -> &Projection {
        &self.proj
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &V)> {
        self.terms.iter()
    }

    pub fn get(&self, idx: &[usize]) -> Option<&V> {
        self.terms.get(idx)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_wedge(&mut self, idx: &[usize], v: &V) {
        let Some((sorted, sign)) = sort_with_sign(idx) else { return };
        if v.is_zero() {
            return;
        }
        let v = v.scale(&signed(sign));
        match self.terms.entry(sorted) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&v);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, v) in &other.terms {
            out.add_wedge(i, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, v) in &other.terms {
            out.add_wedge(i, &v.scale(&Scalar::from_int(-1)));
        }
        out
    }

    /// `φ(Σ_I p_I e^I) = Σ_I p_I · φ(e^I)` where `p(v, w)` acts through the
    /// bimodule structure (`v` on the left, `w` on the right).
    pub fn eval_chain(&self, bar: &BarComplex, omega: &KoszulChain) -> V {
        assert_eq!(omega.degree, self.degree);
        let m = bar.m();
        let base = self.proj.base();
        let mut out = V::zero_on(self.proj.total());
        for (idx, p) in omega.terms() {
            let Some(phi) = self.terms.get(idx) else { continue };
            for (e, c) in p.terms() {
                let left = MultiIndex::from_slice(&e.as_slice()[..m]);
                let right = MultiIndex::from_slice(&e.as_slice()[m..]);
                let a = Polynomial::monomial(base, left, c.clone());
                let b = Polynomial::monomial(base, right, Scalar::one());
                let v = right_mul(phi, &b, &self.proj).left_mul(&self.proj.pullback(&a));
                out.add_assign_ref(&v);
            }
        }
        out
    }
}

impl<V: ModuleValue> fmt::Debug for KoszulCochain<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(i, v)| {
                let idx: Vec<String> = i.iter().map(|j| format!("e{}", j + 1)).collect();
                format!("{} ⊗ {v}", if idx.is_empty() { "1".to_string() } else { idx.join("∧") })
            })
            .collect();
        write!(f, "KoszulCochain<{}>{{{}}}", self.degree, parts.join(" + "))
    }
}

/// `v · pr*b` through the right module action.
pub fn right_mul<V: ModuleValue>(v: &V, b: &Polynomial, proj: &Projection) -> V {
    let mut out = V::zero_on(proj.total());
    for (l, vl) in v.right_pullback_expansion(proj) {
        let d = b.derivative_multi(&l);
        if !d.is_zero() {
            out.add_assign_ref(&vl.left_mul(&proj.pullback(&d)));
        }
    }
    out
}

/// `G̃(φ)(a₁…a_k) = Σ (∂_{i₁}a₁)⋯(∂_{i_k}a_k) · φ(e^{i₁}∧⋯∧e^{i_k})`.
pub fn g_tilde<V: ModuleValue>(phi: &KoszulCochain<V>) -> MultiDiffOp<V> {
    let m = phi.proj.base().dim();
    let k = phi.degree;
    let mut out = MultiDiffOp::zero(&phi.proj, k);
    for (idx, v) in &phi.terms {
        for (sigma, sign) in permutations(k) {
            let key: Vec<MultiIndex> = sigma.iter().map(|&s| MultiIndex::unit(m, idx[s])).collect();
            out.add_term(key, &v.scale(&signed(sign)));
        }
    }
    out
}

/// An `A^e`-linear cochain on the bar complex in local form:
/// `ψ(χ) = Σ pr*(Δ* ∂_{q₁}^{I₁}⋯∂_{q_k}^{I_k}∂_w^J χ) · ψ^{I₁…I_k J}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BarCochain<V: ModuleValue> {
    proj: Projection,
    degree: usize,
    terms: BTreeMap<(Vec<MultiIndex>, MultiIndex), V>,
}

impl<V: ModuleValue> BarCochain<V> {
    pub fn from_terms<I>(proj: &Projection, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = ((Vec<MultiIndex>, MultiIndex), V)>,
    {
        let mut out = BarCochain { proj: proj.clone(), degree, terms: BTreeMap::new() };
        for (key, v) in terms {
            assert_eq!(key.0.len(), degree);
            out.add_term(key, &v);
        }
        out
    }

    fn add_term(&mut self, key: (Vec<MultiIndex>, MultiIndex), v: &V) {
        if v.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(v);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Vec<MultiIndex>, MultiIndex), &V)> {
        self.terms.iter()
    }

    /// `ψ(χ)` for a bar chain of matching degree.
    pub fn eval(&self, bar: &BarComplex, chi: &BarChain) -> V {
        assert_eq!(chi.degree, self.degree);
        let m = bar.m();
        let k = self.degree;
        let diag: Vec<Option<usize>> = (0..(k + 2) * m).map(|i| Some(i % m)).collect();
        let base = self.proj.base();
        let mut out = V::zero_on(self.proj.total());
        for ((is, j), v) in &self.terms {
            let mut d = chi.poly.clone();
            for (l, i) in is.iter().enumerate() {
                for c in 0..m {
                    for _ in 0..i[c] {
                        d = d.derivative(bar.coord(l + 1, c));
                    }
                }
            }
            for c in 0..m {
                for _ in 0..j[c] {
                    d = d.derivative(bar.coord(k + 1, c));
                }
            }
            if d.is_zero() {
                continue;
            }
            let on_m = d.reindex(base, &diag);
            out.add_assign_ref(&v.left_mul(&self.proj.pullback(&on_m)));
        }
        out
    }
}

/// `(Ξψ)(a₁…a_k) = ψ(1 ⊗ a₁ ⊗ ⋯ ⊗ a_k ⊗ 1)`: keep the terms without
/// `w`-derivatives.
pub fn xi<V: ModuleValue>(psi: &BarCochain<V>) -> Result<MultiDiffOp<V>> {
    let phi = xi_unchecked(psi);
    if &xi_inverse(&phi) != psi {
        return Err(Error::NotAeLinear);
    }
    Ok(phi)
}

fn xi_unchecked<V: ModuleValue>(psi: &BarCochain<V>) -> MultiDiffOp<V> {
    let mut out = MultiDiffOp::zero(&psi.proj, psi.degree);
    for ((is, j), v) in &psi.terms {
        if j.is_zero() {
            out.add_term(is.clone(), v);
        }
    }
    out
}

/// `Ξ⁻¹φ(a₀ ⊗ a₁ ⊗ ⋯ ⊗ a_{k+1}) = a₀ · φ(a₁…a_k) · a_{k+1}`; the right
/// action contributes the `w`-derivatives.
pub fn xi_inverse<V: ModuleValue>(phi: &MultiDiffOp<V>) -> BarCochain<V> {
    let mut out = BarCochain { proj: phi.proj().clone(), degree: phi.arity(), terms: BTreeMap::new() };
    for (is, v) in phi.terms() {
        for (l, vl) in v.right_pullback_expansion(phi.proj()) {
            out.add_term((is.clone(), l), &vl);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|(_, s)| s).sum::<i64>(), 0);
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
        assert_eq!(increasing_tuples(4, 2).len(), 6);
    }

    #[test]
    fn bar_differential_degree_one() {
        let bar = BarComplex::new(1, 2);
        let s = bar.space(1).clone();
        let chi = bar.chain(1, Polynomial::var(&s, 1)).unwrap();
        let d = bar.bar_differential(&chi).unwrap();
        assert_eq!(d.poly().to_string(), "v1 - w1");
        let c = bar.chain(1, Polynomial::constant(&s, Scalar::from_int(5))).unwrap();
        assert!(bar.bar_differential(&c).unwrap().is_zero());
        assert!(bar.bar_differential(&bar.zero_chain(0)).is_err());
    }

    #[test]
    fn bar_homotopy_degree_zero_by_hand() {
        let bar = BarComplex::new(1, 2);
        let chi = bar.chain(0, Polynomial::var(bar.pair(), 1)).unwrap();
        let h = bar.bar_homotopy(&chi);
        assert_eq!(h.poly().to_string(), "-q1_1");
        let back = bar.bar_differential(&h).unwrap().add(&bar.unit(&bar.augmentation(&chi).unwrap()));
        assert_eq!(back, chi);
    }

    #[test]
    fn koszul_differential_on_basis() {
        let bar = BarComplex::new(2, 2);
        let pair = bar.pair().clone();
        let one = Polynomial::one(&pair);
        let e1 = bar.koszul_chain(1, [(vec![0], one.clone())]).unwrap();
        let d = bar.koszul_differential(&e1).unwrap();
        assert_eq!(d.coeff(&[]).unwrap().to_string(), "v1 - w1");
        let e12 = bar.koszul_chain(2, [(vec![0, 1], one)]).unwrap();
        let d = bar.koszul_differential(&e12).unwrap();
        assert_eq!(d.coeff(&[1]).unwrap().to_string(), "v1 - w1");
        assert_eq!(d.coeff(&[0]).unwrap().to_string(), "-v2 + w2");
    }

    #[test]
    fn koszul_homotopy_by_hand() {
        let bar = BarComplex::new(1, 2);
        let pair = bar.pair().clone();
        let w = Polynomial::var(&pair, 1);
        let omega = bar.koszul_chain(0, [(vec![], w.clone())]).unwrap();
        let h = bar.koszul_homotopy(&omega);
        assert_eq!(h.coeff(&[0]).unwrap().to_string(), "-1");
        let dh = bar.koszul_differential(&h).unwrap();
        assert_eq!(dh.coeff(&[]).unwrap().to_string(), "-v1 + w1");
        let v = Polynomial::var(&pair, 0);
        let constant_in_w = bar.koszul_chain(0, [(vec![], v)]).unwrap();
        assert!(bar.koszul_homotopy(&constant_in_w).is_zero());
    }

    #[test]
    fn f_and_g_by_hand() {
        let bar = BarComplex::new(2, 2);
        let one = Polynomial::one(bar.pair());
        let e1 = bar.koszul_chain(1, [(vec![0], one.clone())]).unwrap();
        assert_eq!(bar.chain_map_f(&e1).poly().to_string(), "-v1 + q1_1");
        let unit = bar.koszul_chain(0, [(vec![], one.clone())]).unwrap();
        assert_eq!(bar.chain_map_f(&unit).poly(), &one);

        let bar1 = BarComplex::new(1, 2);
        let s = bar1.space(1).clone();
        let q = Polynomial::var(&s, 1);
        let g = bar1.chain_map_g(&bar1.chain(1, q.pow(2)).unwrap());
        assert_eq!(g.coeff(&[0]).unwrap().to_string(), "v1 + w1");
        let no_q = bar1.chain(1, Polynomial::var(&s, 0).pow(2)).unwrap();
        assert!(bar1.chain_map_g(&no_q).is_zero());
    }
}
