//! Multidifferential operators `C^∞(M)^k → 𝓜` in local form
//! `φ(a₁…a_k) = Σ pr*(∂^{I₁}a₁)⋯pr*(∂^{I_k}a_k) · φ_{I₁…I_k}`,
//! with values in functions on `N` or differential operators on `N`.
//!
//! The local form is unique, so two cochains are equal as maps iff their term
//! maps agree; this is what makes symbolic identity checks meaningful.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;

use crate::diffop::{DiffOp, Projection};
use crate::poly::{MultiIndex, Polynomial, Space};
use crate::scalar::Scalar;

/// Values a multidifferential operator can take: `C^∞(N)` (a symmetric
/// bimodule) or `DiffOp(N)` with `(a·D·b)(f) = pr*a·D(pr*b·f)`.
pub trait ModuleValue: Clone + PartialEq + Eq + Hash + Ord + fmt::Debug + fmt::Display {
    /// True for the function module, where left and right actions agree.
    const SYMMETRIC: bool;
    const TAG: &'static str;

    fn zero_on(space: &Space) -> Self;
    fn one_on(space: &Space) -> Self;
    fn value_space(&self) -> &Space;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn scale(&self, s: &Scalar) -> Self;
    /// `p · v`.
    fn left_mul(&self, p: &Polynomial) -> Self;
    /// `v ∘ pr*b = Σ_L pr*(∂^L b) · v_L`, `L` a multi-index on `M`.
    fn right_pullback_expansion(&self, proj: &Projection) -> Vec<(MultiIndex, Self)>;
    /// `∂^K ∘ v` for a multi-index on `N`.
    fn derive_left(&self, k: &MultiIndex) -> Self;
    /// Product of functions or composition of operators.
    fn compose(&self, other: &Self) -> Self;
    /// Drop everything that is not vertical (identity for functions).
    fn vertical_projection(&self) -> Self;
}

impl ModuleValue for Polynomial {
    const SYMMETRIC: bool = true;
    const TAG: &'static str = "functions";

    fn zero_on(space: &Space) -> Self {
        Polynomial::zero(space)
    }
    fn one_on(space: &Space) -> Self {
        Polynomial::one(space)
    }
    fn value_space(&self) -> &Space {
        self.space()
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        Polynomial::add_assign_ref(self, other)
    }
    fn scale(&self, s: &Scalar) -> Self {
        Polynomial::scale(self, s)
    }
    fn left_mul(&self, p: &Polynomial) -> Self {
        p * self
    }
    fn right_pullback_expansion(&self, proj: &Projection) -> Vec<(MultiIndex, Self)> {
        vec![(MultiIndex::zero(proj.base().dim()), self.clone())]
    }
    fn derive_left(&self, k: &MultiIndex) -> Self {
        self.derivative_multi(k)
    }
    fn compose(&self, other: &Self) -> Self {
        self * other
    }
    fn vertical_projection(&self) -> Self {
        self.clone()
    }
}

impl ModuleValue for DiffOp {
    const SYMMETRIC: bool = false;
    const TAG: &'static str = "diffops";

    fn zero_on(space: &Space) -> Self {
        DiffOp::zero(space)
    }
    fn one_on(space: &Space) -> Self {
        DiffOp::identity(space)
    }
    fn value_space(&self) -> &Space {
        self.space()
    }
    fn is_zero(&self) -> bool {
        DiffOp::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        DiffOp::add_assign_ref(self, other)
    }
    fn scale(&self, s: &Scalar) -> Self {
        DiffOp::scale(self, s)
    }
    fn left_mul(&self, p: &Polynomial) -> Self {
        DiffOp::left_mul(self, p)
    }
    fn right_pullback_expansion(&self, proj: &Projection) -> Vec<(MultiIndex, Self)> {
        self.right_mul_expansion()
            .into_iter()
            .filter_map(|(l, d)| proj.base_index(&l).map(|lm| (lm, d)))
            .collect()
    }
    fn derive_left(&self, k: &MultiIndex) -> Self {
        DiffOp::monomial(k.clone(), Polynomial::one(self.space())).compose(self)
    }
    fn compose(&self, other: &Self) -> Self {
        DiffOp::compose(self, other)
    }
    fn vertical_projection(&self) -> Self {
        self.vertical_part()
    }
}

/// All ways to write `i = l₀ + l₁ + … + l_{parts−1}` with the multinomial
/// weight `Π_c i_c! / Π_j (l_j)_c!`.
pub fn distributions(i: &MultiIndex, parts: usize) -> Vec<(Vec<MultiIndex>, u64)> {
    let n = i.len();
    let mut out = vec![(vec![MultiIndex::zero(n); parts], 1u64)];
    for c in 0..n {
        let total = i[c];
        if total == 0 {
            continue;
        }
        let splits = compositions(total, parts);
        let mut next = Vec::with_capacity(out.len() * splits.len());
        for (ls, w) in &out {
            for (split, sw) in &splits {
                let mut ls = ls.clone();
                for (j, &e) in split.iter().enumerate() {
                    ls[j].set(c, e);
                }
                next.push((ls, w * sw));
            }
        }
        out = next;
    }
    out
}

fn compositions(total: u32, parts: usize) -> Vec<(Vec<u32>, u64)> {
    if parts == 1 {
        return vec![(vec![total], 1)];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for (mut rest, w) in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push((rest, w * crate::scalar::binomial(total, first)));
        }
    }
    out
}

/// A `k`-ary multidifferential operator on `M` with values in `V` over `N`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiDiffOp<V: ModuleValue> {
    proj: Projection,
    arity: usize,
    terms: BTreeMap<Vec<MultiIndex>, V>,
}

impl<V: ModuleValue> MultiDiffOp<V> {
    pub fn zero(proj: &Projection, arity: usize) -> Self {
        MultiDiffOp { proj: proj.clone(), arity, terms: BTreeMap::new() }
    }

    /// Degree-0 cochain: a bare module element.
    pub fn constant(proj: &Projection, v: V) -> Self {
        let mut out = MultiDiffOp::zero(proj, 0);
        out.add_term(Vec::new(), &v);
        out
    }

    pub fn from_terms<I>(proj: &Projection, arity: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<MultiIndex>, V)>,
    {
        let mut out = MultiDiffOp::zero(proj, arity);
        for (k, v) in terms {
            out.add_term(k, &v);
        }
        out
    }

    pub fn proj(&self) -> &Projection {
        &self.proj
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<MultiIndex>, &V)> {
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

    pub fn get(&self, key: &[MultiIndex]) -> Option<&V> {
        self.terms.get(key)
    }

    /// Highest derivative order in each argument.
    pub fn orders(&self) -> Vec<u32> {
        let mut out = vec![0; self.arity];
        for key in self.terms.keys() {
            for (o, i) in out.iter_mut().zip(key) {
                *o = (*o).max(i.order());
            }
        }
        out
    }

    pub fn add_term(&mut self, key: Vec<MultiIndex>, v: &V) {
        assert_eq!(key.len(), self.arity, "term key has wrong arity");
        debug_assert!(key.iter().all(|i| i.len() == self.proj.base().dim()));
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

    pub fn add_assign_ref(&mut self, other: &Self) {
        assert_eq!(self.arity, other.arity, "adding cochains of different degree");
        assert_eq!(self.proj, other.proj, "adding cochains over different projections");
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = MultiDiffOp::zero(&self.proj, self.arity);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &v.scale(s));
        }
        out
    }

    pub fn map_values(&self, mut f: impl FnMut(&V) -> V) -> Self {
        let mut out = MultiDiffOp::zero(&self.proj, self.arity);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &f(v));
        }
        out
    }

    /// `φ(a₁…a_k)`.
    pub fn eval(&self, args: &[Polynomial]) -> V {
        assert_eq!(args.len(), self.arity, "wrong number of arguments");
        let mut cache: Vec<BTreeMap<MultiIndex, Polynomial>> = vec![BTreeMap::new(); self.arity];
        let mut out = V::zero_on(self.proj.total());
        for (key, v) in &self.terms {
            let mut factor = Polynomial::one(self.proj.total());
            for (j, i) in key.iter().enumerate() {
                let p = cache[j]
                    .entry(i.clone())
                    .or_insert_with(|| self.proj.pullback(&args[j].derivative_multi(i)));
                factor = &factor * p;
                if factor.is_zero() {
                    break;
                }
            }
            if !factor.is_zero() {
                out.add_assign_ref(&v.left_mul(&factor));
            }
        }
        out
    }

    /// `(a₀, a₁…a_k) ↦ pr*a₀ · φ(a₁…a_k)`.
    pub fn left_action(&self) -> Self {
        let zero = MultiIndex::zero(self.proj.base().dim());
        let mut out = MultiDiffOp::zero(&self.proj, self.arity + 1);
        for (k, v) in &self.terms {
            let mut key = Vec::with_capacity(self.arity + 1);
            key.push(zero.clone());
            key.extend(k.iter().cloned());
            out.add_term(key, v);
        }
        out
    }

    /// `(a₁…a_k, b) ↦ φ(a₁…a_k) · b`, the right action on values.
    pub fn right_action(&self) -> Self {
        let mut out = MultiDiffOp::zero(&self.proj, self.arity + 1);
        for (k, v) in &self.terms {
            for (l, vl) in v.right_pullback_expansion(&self.proj) {
                let mut key = k.clone();
                key.push(l);
                out.add_term(key, &vl);
            }
        }
        out
    }

    /// Insert a function-valued cochain `ψ` on `M` into argument `slot`:
    /// `φ(…, ψ(b₁…b_p), …)`.
    pub fn insert(&self, slot: usize, psi: &MultiDiffOp<Polynomial>) -> Self {
        assert!(slot < self.arity, "slot out of range");
        assert_eq!(psi.proj.base(), self.proj.base(), "inserted cochain lives on another base");
        assert_eq!(psi.proj.total(), psi.proj.base(), "inserted cochain must be M-valued");
        let p = psi.arity;
        let arity = self.arity - 1 + p;
        let mut out = MultiDiffOp::zero(&self.proj, arity);
        let mut dist_cache: BTreeMap<MultiIndex, Vec<(Vec<MultiIndex>, u64)>> = BTreeMap::new();
        for (key, v) in &self.terms {
            let i = &key[slot];
            let dists = dist_cache.entry(i.clone()).or_insert_with(|| distributions(i, p + 1));
            for (jkey, c) in &psi.terms {
                for (ls, w) in dists.iter() {
                    let dc = c.derivative_multi(&ls[0]);
                    if dc.is_zero() {
                        continue;
                    }
                    let factor = self.proj.pullback(&dc).scale(&Scalar::from_int(*w as i64));
                    if factor.is_zero() {
                        continue;
                    }
                    let mut nk = Vec::with_capacity(arity);
                    nk.extend(key[..slot].iter().cloned());
                    for (t, jj) in jkey.iter().enumerate() {
                        nk.push(jj.add(&ls[t + 1]));
                    }
                    nk.extend(key[slot + 1..].iter().cloned());
                    out.add_term(nk, &v.left_mul(&factor));
                }
            }
        }
        out
    }

    /// `φ(…, P a_slot, …)` for a differential operator `P` on `M`.
    pub fn precompose(&self, slot: usize, op: &DiffOp) -> Self {
        self.insert(slot, &MultiDiffOp::<Polynomial>::from_operator(op))
    }

    /// `φ(…, a_slot · a_{slot+1}, …)`.
    pub fn merge_slots(&self, slot: usize) -> Self {
        let m = self.proj.base();
        let prod = MultiDiffOp::<Polynomial>::product(m);
        self.insert(slot, &prod)
    }

    /// `D ∘ φ` for a differential operator `D` on `N`.
    pub fn postcompose(&self, d: &DiffOp) -> Self {
        assert_eq!(d.space(), self.proj.total(), "operator on the wrong space");
        let mut out = MultiDiffOp::zero(&self.proj, self.arity);
        for (key, v) in &self.terms {
            for (kk, ck) in d.terms() {
                for (ls, w) in distributions(kk, self.arity + 1) {
                    let mut nk = Vec::with_capacity(self.arity);
                    let mut ok = true;
                    for (j, i) in key.iter().enumerate() {
                        match self.proj.base_index(&ls[j + 1]) {
                            Some(lm) => nk.push(i.add(&lm)),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let dv = v.derive_left(&ls[0]);
                    if dv.is_zero() {
                        continue;
                    }
                    out.add_term(nk, &dv.left_mul(&ck.scale(&Scalar::from_int(w as i64))));
                }
            }
        }
        out
    }

    /// `(a…, b…) ↦ φ(a…) ∘ ψ(b…)` (product of values for functions).
    pub fn cup(&self, other: &Self) -> Self {
        assert_eq!(self.proj, other.proj);
        let arity = self.arity + other.arity;
        let mut out = MultiDiffOp::zero(&self.proj, arity);
        for (k1, v1) in &self.terms {
            let expansion = v1.right_pullback_expansion(&self.proj);
            for (k2, v2) in &other.terms {
                for (l, v1l) in &expansion {
                    let val = v1l.compose(v2);
                    if val.is_zero() {
                        continue;
                    }
                    if other.arity == 0 {
                        if l.is_zero() {
                            out.add_term(k1.clone(), &val);
                        }
                        continue;
                    }
                    // ∂^L of the product of pulled-back factors of ψ
                    for (ls, w) in distributions(l, other.arity) {
                        let mut key = k1.clone();
                        for (t, j) in k2.iter().enumerate() {
                            key.push(j.add(&ls[t]));
                        }
                        out.add_term(key, &val.scale(&Scalar::from_int(w as i64)));
                    }
                }
            }
        }
        out
    }

    /// `(a₁…a_k) ↦ φ(a_{σ(1)}…a_{σ(k)})`.
    pub fn permute(&self, sigma: &[usize]) -> Self {
        assert_eq!(sigma.len(), self.arity);
        let mut out = MultiDiffOp::zero(&self.proj, self.arity);
        for (k, v) in &self.terms {
            // argument a_{σ(j)} sits in slot j, so a_i sees I_{σ⁻¹(i)}
            let mut nk = vec![MultiIndex::default(); self.arity];
            for (j, &s) in sigma.iter().enumerate() {
                nk[s] = k[j].clone();
            }
            out.add_term(nk, v);
        }
        out
    }

    pub fn vertical_projection(&self) -> Self {
        self.map_values(V::vertical_projection)
    }

    /// One line per term: `[I₁|…|I_k] value`.
    pub fn render_terms(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(k, v)| {
                let idx: Vec<String> = k
                    .iter()
                    .map(|i| i.as_slice().iter().map(u32::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                format!("[{}] {}", idx.join("|"), v)
            })
            .collect()
    }
}

impl MultiDiffOp<Polynomial> {
    /// `a ↦ P(a)` for a differential operator on a pure base space.
    pub fn from_operator(op: &DiffOp) -> Self {
        let proj = Projection::identity(op.space());
        let mut out = MultiDiffOp::zero(&proj, 1);
        for (j, c) in op.terms() {
            out.add_term(vec![j.clone()], c);
        }
        out
    }

    /// The pointwise product `(a, b) ↦ ab` on `M`.
    pub fn product(m: &Space) -> Self {
        let proj = Projection::identity(m);
        let z = MultiIndex::zero(m.dim());
        MultiDiffOp::from_terms(&proj, 2, [(vec![z.clone(), z], Polynomial::one(m))])
    }
}

impl MultiDiffOp<DiffOp> {
    /// `φ(a₁…a_k)(f)`.
    pub fn apply(&self, args: &[Polynomial], f: &Polynomial) -> Polynomial {
        self.eval(args).apply(f)
    }

    /// The function-valued cochain `φ(…)(1)`.
    pub fn at_one(&self) -> MultiDiffOp<Polynomial> {
        let mut out = MultiDiffOp::zero(&self.proj, self.arity);
        let one = Polynomial::one(self.proj.total());
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &v.apply(&one));
        }
        out
    }

    /// For an arity-1 cochain, freeze the argument: the operator `φ(a)`.
    pub fn at(&self, a: &Polynomial) -> DiffOp {
        self.eval(std::slice::from_ref(a))
    }
}

impl<V: ModuleValue> fmt::Debug for MultiDiffOp<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiDiffOp<{}>{{{}}}", self.arity, self.render_terms().join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distributions_count_and_weights() {
        let i = MultiIndex::from_slice(&[2, 1]);
        let d = distributions(&i, 2);
        assert_eq!(d.len(), 6);
        // Σ weights = parts^{|I|}
        assert_eq!(d.iter().map(|(_, w)| w).sum::<u64>(), 8);
    }

    #[test]
    fn degree_zero_and_identity_values() {
        let m = Space::coordinates("x", 1);
        let n = Space::fibered("y", 2, 1);
        let pr = Projection::new(&m, &n).unwrap();
        let d = DiffOp::partial(&n, 1);
        let phi = MultiDiffOp::constant(&pr, d.clone());
        let f = Polynomial::parse(&n, "y1*y2^2").unwrap();
        assert_eq!(phi.apply(&[], &f), d.apply(&f));

        let z = MultiIndex::from_slice(&[1]);
        let psi = MultiDiffOp::from_terms(&pr, 1, [(vec![z], DiffOp::identity(&n))]);
        assert_eq!(psi.at(&Polynomial::var(&m, 0)), DiffOp::identity(&n));
    }

    #[test]
    fn merge_slots_matches_evaluation() {
        let m = Space::coordinates("x", 2);
        let pr = Projection::identity(&m);
        let i1 = MultiIndex::from_slice(&[2, 0]);
        let i2 = MultiIndex::from_slice(&[0, 1]);
        let phi = MultiDiffOp::from_terms(&pr, 2, [(vec![i1, i2], Polynomial::var(&m, 1))]);
        let merged = phi.merge_slots(0);
        let a = Polynomial::parse(&m, "x1^2*x2 + 3*x1").unwrap();
        let b = Polynomial::parse(&m, "x1*x2 - 1").unwrap();
        let c = Polynomial::parse(&m, "x2^2 + x1").unwrap();
        assert_eq!(merged.eval(&[a.clone(), b.clone(), c.clone()]), phi.eval(&[&a * &b, c]));
    }

    #[test]
    fn postcompose_matches_evaluation() {
        let m = Space::coordinates("x", 2);
        let n = Space::fibered("y", 3, 1);
        let pr = Projection::new(&m, &n).unwrap();
        let phi = MultiDiffOp::from_terms(
            &pr,
            2,
            [
                (vec![MultiIndex::from_slice(&[1, 0]), MultiIndex::from_slice(&[0, 0])], DiffOp::partial(&n, 2)),
                (vec![MultiIndex::from_slice(&[0, 1]), MultiIndex::from_slice(&[1, 0])], DiffOp::multiplication(&Polynomial::var(&n, 1))),
            ],
        );
        let d = DiffOp::from_terms(
            &n,
            [
                (MultiIndex::from_slice(&[1, 1, 0]), Polynomial::var(&n, 2)),
                (MultiIndex::from_slice(&[2, 0, 0]), Polynomial::one(&n)),
            ],
        );
        let comp = phi.postcompose(&d);
        let a = Polynomial::parse(&m, "x1^3 + x1*x2").unwrap();
        let b = Polynomial::parse(&m, "x1^2*x2 - x2").unwrap();
        let f = Polynomial::parse(&n, "y1*y2*y3 + y3^2").unwrap();
        assert_eq!(comp.apply(&[a.clone(), b.clone()], &f), d.apply(&phi.apply(&[a, b], &f)));
    }

    #[test]
    fn cup_and_right_action_match_evaluation() {
        let m = Space::coordinates("x", 1);
        let n = Space::fibered("y", 2, 1);
        let pr = Projection::new(&m, &n).unwrap();
        let phi = MultiDiffOp::from_terms(
            &pr,
            1,
            [(vec![MultiIndex::from_slice(&[1])], DiffOp::from_terms(&n, [(MultiIndex::from_slice(&[2, 1]), Polynomial::var(&n, 1))]))],
        );
        let psi = MultiDiffOp::from_terms(
            &pr,
            2,
            [(vec![MultiIndex::from_slice(&[0]), MultiIndex::from_slice(&[2])], DiffOp::partial(&n, 0))],
        );
        let a = Polynomial::parse(&m, "x1^3 + 2*x1").unwrap();
        let b = Polynomial::parse(&m, "x1^4").unwrap();
        let c = Polynomial::parse(&m, "x1^2 - x1").unwrap();
        let cup = phi.cup(&psi);
        assert_eq!(cup.eval(&[a.clone(), b.clone(), c.clone()]), phi.at(&a).compose(&psi.eval(&[b.clone(), c.clone()])));
        let r = phi.right_action();
        let pb = DiffOp::multiplication(&pr.pullback(&b));
        assert_eq!(r.eval(&[a.clone(), b]), phi.at(&a).compose(&pb));
    }

    #[test]
    fn permute_swaps_arguments() {
        let m = Space::coordinates("x", 2);
        let pr = Projection::identity(&m);
        let phi = MultiDiffOp::from_terms(
            &pr,
            2,
            [(vec![MultiIndex::from_slice(&[1, 0]), MultiIndex::from_slice(&[0, 1])], Polynomial::one(&m))],
        );
        let a = Polynomial::parse(&m, "x1^2").unwrap();
        let b = Polynomial::parse(&m, "x2^3").unwrap();
        let swapped = phi.permute(&[1, 0]);
        assert_eq!(swapped.eval(&[a.clone(), b.clone()]), phi.eval(&[b, a]));
    }
}
