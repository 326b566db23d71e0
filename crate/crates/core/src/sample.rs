//! Seeded pseudo-random test inputs.
//!
//! Every check derives its own generator from the run seed and its name, so
//! adding or reordering checks never changes the inputs of another check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffop::{DiffOp, Projection};
use crate::multidiff::MultiDiffOp;
use crate::poly::{MultiIndex, Polynomial, Space};
use crate::scalar::Scalar;

/// Mix a run seed with a label (FNV-1a followed by a splitmix finalizer).
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub struct Sampler {
    rng: ChaCha8Rng,
    max_degree: u32,
    max_terms: usize,
    complex: bool,
}

impl Sampler {
    pub fn new(seed: u64, label: &str) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(derive_seed(seed, label)),
            max_degree: 3,
            max_terms: 4,
            complex: false,
        }
    }

    pub fn with_degree(mut self, d: u32) -> Self {
        self.max_degree = d;
        self
    }

    pub fn with_terms(mut self, t: usize) -> Self {
        self.max_terms = t.max(1);
        self
    }

    /// Allow Gaussian (non-real) coefficients.
    pub fn complex(mut self, yes: bool) -> Self {
        self.complex = yes;
        self
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Small nonzero coefficient: integers in `[-3, 3]` over `1` or `2`,
    /// occasionally with an imaginary part.
    pub fn scalar(&mut self) -> Scalar {
        loop {
            let num = self.int(-3, 3);
            let den = if self.rng.gen_bool(0.25) { 2 } else { 1 };
            let mut s = Scalar::ratio(num, den);
            if self.complex && self.rng.gen_bool(0.25) {
                s = &s + &(&Scalar::i() * &Scalar::from_int(self.int(-2, 2)));
            }
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn monomial(&mut self, n: usize, degree: u32) -> MultiIndex {
        let mut e = MultiIndex::zero(n);
        if n == 0 {
            return e;
        }
        for _ in 0..degree {
            let i = self.index(n);
            e.set(i, e[i] + 1);
        }
        e
    }

    /// Random polynomial of degree ≤ the configured bound.
    pub fn poly(&mut self, space: &Space) -> Polynomial {
        let terms = self.rng.gen_range(1..=self.max_terms);
        let mut p = Polynomial::zero(space);
        for _ in 0..terms {
            let d = self.rng.gen_range(0..=self.max_degree);
            let e = self.monomial(space.dim(), d);
            let c = self.scalar();
            p.add_term(e, &c);
        }
        p
    }

    /// Random polynomial using only the given coordinates.
    pub fn poly_in(&mut self, space: &Space, vars: &[usize]) -> Polynomial {
        let terms = self.rng.gen_range(1..=self.max_terms);
        let mut p = Polynomial::zero(space);
        for _ in 0..terms {
            let d = self.rng.gen_range(0..=self.max_degree);
            let mut e = MultiIndex::zero(space.dim());
            if !vars.is_empty() {
                for _ in 0..d {
                    let i = vars[self.index(vars.len())];
                    e.set(i, e[i] + 1);
                }
            }
            let c = self.scalar();
            p.add_term(e, &c);
        }
        p
    }

    /// Random differential operator of order ≤ `order`.
    pub fn diffop(&mut self, space: &Space, order: u32) -> DiffOp {
        let terms = self.rng.gen_range(1..=self.max_terms);
        let mut d = DiffOp::zero(space);
        for _ in 0..terms {
            let o = self.rng.gen_range(0..=order);
            let j = self.monomial(space.dim(), o);
            let c = self.poly(space);
            d.add_term(j, &c);
        }
        d
    }

    fn keys(&mut self, n: usize, arity: usize, order: u32) -> Vec<MultiIndex> {
        (0..arity)
            .map(|_| {
                let o = self.rng.gen_range(0..=order);
                self.monomial(n, o)
            })
            .collect()
    }

    /// Random function-valued cochain with argument orders ≤ `order`.
    pub fn function_cochain(&mut self, proj: &Projection, arity: usize, order: u32) -> MultiDiffOp<Polynomial> {
        let terms = self.rng.gen_range(1..=self.max_terms);
        let mut out = MultiDiffOp::zero(proj, arity);
        for _ in 0..terms {
            let key = self.keys(proj.base().dim(), arity, order);
            let v = self.poly(proj.total());
            out.add_term(key, &v);
        }
        out
    }

    /// Random operator-valued cochain with argument and value orders ≤ `order`.
    pub fn diffop_cochain(&mut self, proj: &Projection, arity: usize, order: u32) -> MultiDiffOp<DiffOp> {
        let terms = self.rng.gen_range(1..=self.max_terms);
        let mut out = MultiDiffOp::zero(proj, arity);
        for _ in 0..terms {
            let key = self.keys(proj.base().dim(), arity, order);
            let v = self.diffop(proj.total(), order);
            out.add_term(key, &v);
        }
        out
    }

    /// `count` inputs: the coordinate functions and their pairwise products
    /// come first (they expose low-order witnesses), then random ones.
    pub fn polys(&mut self, space: &Space, count: usize) -> Vec<Polynomial> {
        let mut out = Vec::with_capacity(count);
        for i in 0..space.dim() {
            out.push(Polynomial::var(space, i));
        }
        for i in 0..space.dim() {
            for j in i..space.dim() {
                out.push(&Polynomial::var(space, i) * &Polynomial::var(space, j));
            }
        }
        out.truncate(count / 2);
        while out.len() < count {
            out.push(self.poly(space));
        }
        out
    }
}
