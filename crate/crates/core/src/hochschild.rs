//! Differential Hochschild cochains with values in functions or
//! differential operators, the Hochschild differential and the
//! antisymmetrization class map.

use crate::error::{Error, Result};
use crate::koszul::{increasing_tuples, permutations, KoszulCochain};
use crate::multidiff::{ModuleValue, MultiDiffOp};
use crate::poly::{MultiIndex, Polynomial};
use crate::scalar::Scalar;

/// A degree-`k` cochain is a `k`-ary multidifferential operator.
pub type HochschildCochain<V> = MultiDiffOp<V>;

/// `(δφ)(a₀…a_k) = a₀·φ(a₁…a_k) + Σᵢ (−1)ⁱ φ(…, a_{i−1}aᵢ, …) + (−1)^{k+1} φ(a₀…a_{k−1})·a_k`.
pub fn hochschild_differential<V: ModuleValue>(phi: &MultiDiffOp<V>) -> MultiDiffOp<V> {
    let k = phi.arity();
    let mut out = phi.left_action();
    for i in 1..=k {
        let face = phi.merge_slots(i - 1);
        if i % 2 == 0 {
            out.add_assign_ref(&face);
        } else {
            out.add_assign_ref(&face.scale(&Scalar::from_int(-1)));
        }
    }
    let right = phi.right_action();
    if k.is_multiple_of(2) {
        out.add_assign_ref(&right.scale(&Scalar::from_int(-1)));
    } else {
        out.add_assign_ref(&right);
    }
    out
}

/// Arguments on which a nonzero multidifferential operator does not vanish.
///
/// A key minimal for the componentwise order is hit only by itself when
/// each argument is the matching monomial, so the value there is
/// `I! · φ_I ≠ 0`.
pub fn nonvanishing_arguments<V: ModuleValue>(phi: &MultiDiffOp<V>) -> Option<Vec<Polynomial>> {
    let keys: Vec<&Vec<MultiIndex>> = phi.terms().map(|(k, _)| k).collect();
    let below = |a: &Vec<MultiIndex>, b: &Vec<MultiIndex>| {
        a.iter().zip(b).all(|(x, y)| x.as_slice().iter().zip(y.as_slice()).all(|(p, q)| p <= q))
    };
    let minimal = keys.iter().find(|k| !keys.iter().any(|o| o != *k && below(o, k)))?;
    let base = phi.proj().base();
    Some(minimal.iter().map(|i| Polynomial::monomial(base, i.clone(), Scalar::one())).collect())
}

/// Outcome of a cocycle test: either closed, or arguments with a nonzero
/// residual `δφ(args)`.
#[derive(Clone, Debug, PartialEq)]
pub enum CocycleCheck<V> {
    Closed,
    Witness { args: Vec<Polynomial>, residual: V },
}

impl<V> CocycleCheck<V> {
    pub fn is_closed(&self) -> bool {
        matches!(self, CocycleCheck::Closed)
    }
}

pub fn check_cocycle<V: ModuleValue>(phi: &MultiDiffOp<V>) -> CocycleCheck<V> {
    let d = hochschild_differential(phi);
    match nonvanishing_arguments(&d) {
        None => CocycleCheck::Closed,
        Some(args) => {
            let residual = d.eval(&args);
            debug_assert!(!residual.is_zero());
            CocycleCheck::Witness { args, residual }
        }
    }
}

pub fn is_cocycle<V: ModuleValue>(phi: &MultiDiffOp<V>) -> bool {
    check_cocycle(phi).is_closed()
}

/// `Alt(φ)(a₁…a_k) = (1/k!) Σ_σ sign(σ) φ(a_{σ(1)}…a_{σ(k)})`.
pub fn antisymmetrize<V: ModuleValue>(phi: &MultiDiffOp<V>) -> MultiDiffOp<V> {
    let k = phi.arity();
    let mut out = MultiDiffOp::zero(phi.proj(), k);
    for (sigma, sign) in permutations(k) {
        let p = phi.permute(&sigma);
        out.add_assign_ref(&p.scale(&Scalar::from_int(sign)));
    }
    out.scale(&Scalar::inv_factorial(k as u32))
}

/// The Koszul representative of the class of a closed cochain.
///
/// Values are projected to their vertical part, the result is
/// antisymmetrized and read off at the first-order keys `(e_{i₁}…e_{i_k})`.
/// Wedges containing a direction of the image of the projection span the
/// ideal of coboundaries and are dropped.
pub fn class_of<V: ModuleValue>(phi: &MultiDiffOp<V>) -> Result<KoszulCochain<V>> {
    if let CocycleCheck::Witness { args, residual } = check_cocycle(phi) {
        let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
        return Err(Error::NotACocycle { witness: format!("δφ({}) = {residual}", args.join(", ")) });
    }
    let proj = phi.proj();
    let m = proj.base().dim();
    let rank = if V::SYMMETRIC { 0 } else { proj.rank() };
    let alt = antisymmetrize(&phi.vertical_projection());
    let k = phi.arity();
    let mut terms = Vec::new();
    for idx in increasing_tuples(m, k) {
        if idx.iter().any(|&i| i < rank) {
            continue;
        }
        let key: Vec<MultiIndex> = idx.iter().map(|&i| MultiIndex::unit(m, i)).collect();
        if let Some(v) = alt.get(&key) {
            terms.push((idx, v.clone()));
        }
    }
    KoszulCochain::from_terms(proj, k, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::{DiffOp, Projection};
    use crate::koszul::g_tilde;
    use crate::poly::Space;

    #[test]
    fn derivations_are_closed() {
        let s = Space::coordinates("x", 1);
        let proj = Projection::identity(&s);
        let d = MultiDiffOp::<Polynomial>::from_operator(&DiffOp::partial(&s, 0));
        assert!(hochschild_differential(&d).is_zero());
        assert!(hochschild_differential(&MultiDiffOp::constant(&proj, Polynomial::var(&s, 0))).is_zero());
    }

    #[test]
    fn second_derivative_is_not_closed() {
        let s = Space::coordinates("x", 1);
        let d2 = DiffOp::partial(&s, 0).compose(&DiffOp::partial(&s, 0));
        let phi = MultiDiffOp::<Polynomial>::from_operator(&d2);
        let dphi = hochschild_differential(&phi);
        assert_eq!(dphi.render_terms(), vec!["[1|1] -2".to_string()]);
        match check_cocycle(&phi) {
            CocycleCheck::Witness { args, residual } => {
                let x = Polynomial::var(&s, 0);
                assert_eq!(args, vec![x.clone(), x]);
                assert_eq!(residual.to_string(), "-2");
            }
            CocycleCheck::Closed => panic!("∂² is not a derivation"),
        }
        assert!(matches!(class_of(&phi), Err(Error::NotACocycle { .. })));
    }

    #[test]
    fn antisymmetrize_two_term() {
        let s = Space::coordinates("x", 2);
        let proj = Projection::identity(&s);
        let f = Polynomial::var(&s, 0);
        let phi = MultiDiffOp::from_terms(&proj, 2, [(vec![MultiIndex::unit(2, 0), MultiIndex::unit(2, 1)], f.clone())]);
        let alt = antisymmetrize(&phi);
        let half = f.scale(&Scalar::ratio(1, 2));
        assert_eq!(alt.get(&[MultiIndex::unit(2, 0), MultiIndex::unit(2, 1)]), Some(&half));
        assert_eq!(alt.get(&[MultiIndex::unit(2, 1), MultiIndex::unit(2, 0)]), Some(&-&half));
        assert_eq!(antisymmetrize(&alt), alt);
    }

    #[test]
    fn transverse_derivation_class() {
        let m = Space::coordinates("x", 2);
        let n = Space::fibered("y", 2, 1);
        let proj = Projection::new(&m, &n).unwrap();
        let dver = DiffOp::partial(&n, 1);
        let phi = MultiDiffOp::from_terms(&proj, 1, [(vec![MultiIndex::unit(2, 1)], dver.clone())]);
        let class = class_of(&phi).unwrap();
        assert_eq!(class.get(&[1]), Some(&dver));
        assert_eq!(g_tilde(&class), phi);
    }
}
