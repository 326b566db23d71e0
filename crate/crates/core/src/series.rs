//! Formal power series in the deformation parameter λ, truncated at a cap.

use crate::poly::{Polynomial, Space};
use crate::scalar::Scalar;

/// `c₀ + c₁λ + … + c_Nλᴺ` with everything above `N = order_cap` discarded.
///
/// Binary operations truncate at the smaller of the two caps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalSeries<T> {
    order_cap: usize,
    coeffs: Vec<T>,
}

impl<T: Clone> FormalSeries<T> {
    /// Missing coefficients are filled with `zero`, extra ones are dropped.
    pub fn new(order_cap: usize, mut coeffs: Vec<T>, zero: T) -> Self {
        coeffs.truncate(order_cap + 1);
        coeffs.resize(order_cap + 1, zero);
        FormalSeries { order_cap, coeffs }
    }

    pub fn order_cap(&self) -> usize {
        self.order_cap
    }

    pub fn coeff(&self, r: usize) -> &T {
        &self.coeffs[r]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn truncate(&self, cap: usize) -> Self {
        let cap = cap.min(self.order_cap);
        FormalSeries { order_cap: cap, coeffs: self.coeffs[..=cap].to_vec() }
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> FormalSeries<U> {
        FormalSeries { order_cap: self.order_cap, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Coefficientwise combination, truncated at the smaller cap.
    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(&T, &T) -> T) -> Self {
        let cap = self.order_cap.min(other.order_cap);
        FormalSeries {
            order_cap: cap,
            coeffs: (0..=cap).map(|r| f(&self.coeffs[r], &other.coeffs[r])).collect(),
        }
    }

    /// Cauchy product `Σ_r λʳ Σ_{p+q=r} mul(p, q)(aₚ, b_q)`, where `mul` may
    /// depend on the orders (star products insert `C_s` for extra orders).
    pub fn cauchy<U: Clone, V: Clone>(
        &self,
        other: &FormalSeries<U>,
        zero: V,
        mut add: impl FnMut(&mut V, V),
        mut mul: impl FnMut(&T, &U, usize) -> Option<V>,
    ) -> FormalSeries<V> {
        let cap = self.order_cap.min(other.order_cap);
        let mut coeffs = vec![zero; cap + 1];
        for p in 0..=cap {
            for q in 0..=cap - p {
                for s in 0..=cap - p - q {
                    if let Some(v) = mul(&self.coeffs[p], &other.coeffs[q], s) {
                        add(&mut coeffs[p + q + s], v);
                    }
                }
            }
        }
        FormalSeries { order_cap: cap, coeffs }
    }
}

impl FormalSeries<Polynomial> {
    pub fn constant(order_cap: usize, p: Polynomial) -> Self {
        let zero = Polynomial::zero(p.space());
        FormalSeries::new(order_cap, vec![p], zero)
    }

    pub fn zero(space: &Space, order_cap: usize) -> Self {
        FormalSeries::new(order_cap, Vec::new(), Polynomial::zero(space))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        self.map(|c| c.scale(s))
    }

    /// Undeformed product of series.
    pub fn mul(&self, other: &Self) -> Self {
        let zero = Polynomial::zero(self.coeffs[0].space());
        self.cauchy(other, zero, |acc, v| acc.add_assign_ref(&v), |a, b, s| (s == 0).then(|| a * b))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Polynomial::is_zero)
    }

    /// Substitute `λ ↦ λᵉ`, keeping the cap.
    pub fn reparametrize(&self, e: usize) -> Self {
        let zero = Polynomial::zero(self.coeffs[0].space());
        let mut coeffs = vec![zero.clone(); self.order_cap + 1];
        for (r, c) in self.coeffs.iter().enumerate() {
            if r * e <= self.order_cap {
                coeffs[r * e] = c.clone();
            }
        }
        FormalSeries::new(self.order_cap, coeffs, zero)
    }
}
