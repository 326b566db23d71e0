//! Truncated Hochschild cohomology of functions on `M = ℝᵐ` with values in
//! functions or differential operators on `N = ℝⁿ`, computed on the Koszul
//! side by exact ranks.
//!
//! `pr : N → M` is the projection onto the first `k` coordinates followed by
//! the inclusion into `ℝᵐ`. Cochains of degree `j` are `Λʲ(ℝᵐ) ⊗ 𝓜` and
//! the differential is `e^I ⊗ D ↦ Σ_i eⁱ∧e^I ⊗ (pr*xⁱ·D − D·pr*xⁱ)`.
//!
//! The window keeps coefficients of degree `≤ d` and operators `y^α ∂^J`
//! with `|J| + #{i ∈ I : i < k} ≤ o`. The differential trades one base
//! derivative for one base wedge factor, so this weight is preserved and
//! every graded block is a complete finite complex.

use std::collections::BTreeMap;
use std::fmt;

use crate::diffop::{DiffOp, Projection};
use crate::error::{Error, Result};
use crate::hochschild::is_cocycle;
use crate::koszul::{g_tilde, increasing_tuples, right_mul, KoszulCochain};
use crate::linalg::Matrix;
use crate::multidiff::ModuleValue;
use crate::poly::{MultiIndex, Polynomial, Space};
use crate::scalar::{binomial, Scalar};

/// `δ_K(e^I ⊗ f) = Σ_i eⁱ ∧ e^I ⊗ (xⁱ·f − f·xⁱ)`.
pub fn koszul_hom_differential<V: ModuleValue>(phi: &KoszulCochain<V>) -> KoszulCochain<V> {
    let proj = phi.proj();
    let base = proj.base();
    let mut out = KoszulCochain::zero(proj, phi.degree() + 1);
    for i in 0..base.dim() {
        let xi = Polynomial::var(base, i);
        let pxi = proj.pullback(&xi);
        for (idx, v) in phi.terms() {
            let mut c = v.left_mul(&pxi);
            c.add_assign_ref(&right_mul(v, &xi, proj).scale(&Scalar::from_int(-1)));
            let mut wedge = vec![i];
            wedge.extend(idx.iter().copied());
            out.add_wedge(&wedge, &c);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModuleKind {
    Functions,
    DiffOps,
}

impl ModuleKind {
    pub fn name(self) -> &'static str {
        match self {
            ModuleKind::Functions => "functions",
            ModuleKind::DiffOps => "diffop",
        }
    }
}

impl std::str::FromStr for ModuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "functions" | "function" | "fun" => Ok(ModuleKind::Functions),
            "diffop" | "diffops" => Ok(ModuleKind::DiffOps),
            other => Err(Error::Config(format!("unknown module `{other}` (expected functions or diffop)"))),
        }
    }
}

/// A finite window onto the cochain complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub d: u32,
    pub o: u32,
    pub module: ModuleKind,
}

impl Truncation {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::Config("m and n must be positive".into()));
        }
        if self.k > self.m.min(self.n) {
            return Err(Error::Config(format!("k = {} exceeds min(m, n) = {}", self.k, self.m.min(self.n))));
        }
        Ok(())
    }

    /// An upper bound on the number of basis elements in all degrees.
    pub fn size_estimate(&self) -> usize {
        let coeffs = binomial((self.n as u32) + self.d, self.d) as usize;
        let symbols = match self.module {
            ModuleKind::Functions => 1,
            ModuleKind::DiffOps => binomial((self.n as u32) + self.o, self.o) as usize,
        };
        (1usize << self.m) * coeffs * symbols
    }

    /// `C(m, j)·C(n+d, d)` for functions and
    /// `C(m−k, j)·C(n+d, d)·C(n−k+o, o)` for differential operators.
    pub fn closed_form(&self, j: usize) -> usize {
        let coeffs = binomial((self.n as u32) + self.d, self.d) as usize;
        match self.module {
            ModuleKind::Functions => binomial(self.m as u32, j as u32) as usize * coeffs,
            ModuleKind::DiffOps => {
                let wedge = binomial((self.m - self.k) as u32, j as u32) as usize;
                let symbols = binomial((self.n - self.k) as u32 + self.o, self.o) as usize;
                wedge * coeffs * symbols
            }
        }
    }

    fn projection(&self) -> Projection {
        let base = Space::coordinates("x", self.m);
        let total = Space::fibered("y", self.n, self.k);
        Projection::new(&base, &total).expect("k ≤ m")
    }
}

/// Basis coordinates of a module value: `(α, J) ↦ c` for `c·y^α ∂^J`.
trait Monomials: ModuleValue {
    fn monomials(&self) -> Vec<((MultiIndex, MultiIndex), Scalar)>;
}

impl Monomials for Polynomial {
    fn monomials(&self) -> Vec<((MultiIndex, MultiIndex), Scalar)> {
        let z = MultiIndex::zero(self.space().dim());
        self.terms().map(|(a, c)| ((a.clone(), z.clone()), c.clone())).collect()
    }
}

impl Monomials for DiffOp {
    fn monomials(&self) -> Vec<((MultiIndex, MultiIndex), Scalar)> {
        let mut out = Vec::new();
        for (j, p) in self.terms() {
            for (a, c) in p.terms() {
                out.push(((a.clone(), j.clone()), c.clone()));
            }
        }
        out
    }
}

type BasisKey = (Vec<usize>, MultiIndex, MultiIndex);
/// `(fiber wedge indices, coefficient exponent, vertical symbol, weight)`.
type BlockKey = (Vec<usize>, MultiIndex, MultiIndex, u32);

struct Basis<V: ModuleValue> {
    elements: Vec<(BasisKey, KoszulCochain<V>)>,
    index: BTreeMap<BasisKey, usize>,
    blocks: BTreeMap<BlockKey, Vec<usize>>,
}

fn block_key(t: &Truncation, key: &BasisKey) -> BlockKey {
    let (idx, alpha, j) = key;
    let fiber: Vec<usize> = idx.iter().copied().filter(|&i| i >= t.k).collect();
    let base_wedge = (idx.len() - fiber.len()) as u32;
    let mut ver = j.clone();
    let mut base_order = 0;
    for i in 0..t.k {
        base_order += ver[i];
        ver.set(i, 0);
    }
    (fiber, alpha.clone(), ver, base_order + base_wedge)
}

fn build_basis<V: Monomials>(t: &Truncation, proj: &Projection, degree: usize, make: &dyn Fn(&MultiIndex, &MultiIndex) -> V) -> Basis<V> {
    let mut elements = Vec::new();
    let max_order = if V::SYMMETRIC { 0 } else { t.o };
    let alphas = MultiIndex::all_up_to(t.n, t.d);
    for idx in increasing_tuples(t.m, degree) {
        let base_count = idx.iter().filter(|&&i| i < t.k).count() as u32;
        let budget = if V::SYMMETRIC { 0 } else if base_count > max_order { continue } else { max_order - base_count };
        let symbols = MultiIndex::all_up_to(t.n, budget);
        for alpha in &alphas {
            for j in &symbols {
                let v = make(alpha, j);
                let phi = KoszulCochain::from_terms(proj, degree, [(idx.clone(), v)]).expect("valid basis element");
                elements.push(((idx.clone(), alpha.clone(), j.clone()), phi));
            }
        }
    }
    let index = elements.iter().enumerate().map(|(i, (k, _))| (k.clone(), i)).collect();
    let mut blocks: BTreeMap<BlockKey, Vec<usize>> = BTreeMap::new();
    for (i, (k, _)) in elements.iter().enumerate() {
        blocks.entry(block_key(t, k)).or_default().push(i);
    }
    Basis { elements, index, blocks }
}

fn coordinates<V: Monomials>(phi: &KoszulCochain<V>, basis: &Basis<V>) -> Result<Vec<(usize, Scalar)>> {
    let mut out = Vec::new();
    for (idx, v) in phi.terms() {
        for ((alpha, j), c) in v.monomials() {
            let key = (idx.clone(), alpha, j);
            let Some(&pos) = basis.index.get(&key) else {
                return Err(Error::Precondition(format!("differential leaves the truncation at {key:?}")));
            };
            out.push((pos, c));
        }
    }
    Ok(out)
}

/// Sparse columns of `δ_K : C^j → C^{j+1}`.
fn differential_columns<V: Monomials>(from: &Basis<V>, to: &Basis<V>) -> Result<Vec<Vec<(usize, Scalar)>>> {
    from.elements.iter().map(|(_, phi)| coordinates(&koszul_hom_differential(phi), to)).collect()
}

fn submatrix(cols: &[Vec<(usize, Scalar)>], col_ids: &[usize], row_ids: &[usize]) -> Matrix {
    let row_pos: BTreeMap<usize, usize> = row_ids.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut m = Matrix::zeros(row_ids.len(), col_ids.len());
    for (c, &col) in col_ids.iter().enumerate() {
        for (r, v) in &cols[col] {
            let Some(&rp) = row_pos.get(r) else {
                panic!("differential leaves its graded block");
            };
            let cur = m.get(rp, c) + v;
            m.set(rp, c, cur);
        }
    }
    m
}

/// Dimensions and representatives of truncated cohomology in every degree.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyReport {
    pub truncation: Truncation,
    pub cochain_dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub dims: Vec<usize>,
    /// Rendered representatives per degree.
    pub representatives: Vec<Vec<String>>,
    /// `G̃` of every representative is a Hochschild cocycle.
    pub representatives_closed: bool,
    /// `δ_K² = 0` on every basis element.
    pub squares_to_zero: bool,
    /// Per-block ranks sum to the rank of the whole differential.
    pub block_ranks_agree: bool,
}

pub const DEFAULT_BUDGET: usize = 20_000;

pub fn truncated_cohomology(t: &Truncation, budget: usize) -> Result<CohomologyReport> {
    t.validate()?;
    let estimate = t.size_estimate();
    if estimate > budget {
        return Err(Error::Budget { estimate, budget });
    }
    let proj = t.projection();
    match t.module {
        ModuleKind::Functions => {
            let make = |alpha: &MultiIndex, _: &MultiIndex| Polynomial::monomial(proj.total(), alpha.clone(), Scalar::one());
            compute(t, &proj, &make)
        }
        ModuleKind::DiffOps => {
            let make = |alpha: &MultiIndex, j: &MultiIndex| {
                DiffOp::monomial(j.clone(), Polynomial::monomial(proj.total(), alpha.clone(), Scalar::one()))
            };
            compute(t, &proj, &make)
        }
    }
}

fn compute<V: Monomials>(t: &Truncation, proj: &Projection, make: &dyn Fn(&MultiIndex, &MultiIndex) -> V) -> Result<CohomologyReport> {
    let bases: Vec<Basis<V>> = (0..=t.m + 1).map(|j| build_basis(t, proj, j, make)).collect();
    let columns: Vec<Vec<Vec<(usize, Scalar)>>> =
        (0..=t.m).map(|j| differential_columns(&bases[j], &bases[j + 1])).collect::<Result<_>>()?;

    let mut squares_to_zero = true;
    for j in 0..t.m {
        for (_, phi) in &bases[j].elements {
            if !koszul_hom_differential(&koszul_hom_differential(phi)).is_zero() {
                squares_to_zero = false;
            }
        }
    }

    let mut ranks = Vec::new();
    let mut block_ranks_agree = true;
    let mut block_kernels: Vec<BTreeMap<BlockKey, Vec<Vec<Scalar>>>> = Vec::new();
    let mut block_images: Vec<BTreeMap<BlockKey, Matrix>> = Vec::new();
    for j in 0..=t.m {
        let mut total = 0;
        let mut kernels = BTreeMap::new();
        let mut images = BTreeMap::new();
        for (key, ids) in &bases[j].blocks {
            let rows = bases[j + 1].blocks.get(key).cloned().unwrap_or_default();
            let mat = submatrix(&columns[j], ids, &rows);
            total += mat.rank();
            kernels.insert(key.clone(), mat.nullspace());
            images.insert(key.clone(), mat);
        }
        let full = submatrix(&columns[j], &(0..bases[j].elements.len()).collect::<Vec<_>>(), &(0..bases[j + 1].elements.len()).collect::<Vec<_>>());
        if full.rank() != total {
            block_ranks_agree = false;
        }
        ranks.push(total);
        block_kernels.push(kernels);
        block_images.push(images);
    }

    let mut dims = Vec::new();
    let mut representatives = Vec::new();
    let mut representatives_closed = true;
    for j in 0..=t.m {
        let incoming = if j == 0 { 0 } else { ranks[j - 1] };
        dims.push(bases[j].elements.len() - ranks[j] - incoming);
        let mut reps = Vec::new();
        for (key, ids) in &bases[j].blocks {
            // image of the block under the previous differential, as columns in block coordinates
            let mut spanning: Vec<Vec<Scalar>> = Vec::new();
            if j > 0 {
                if let Some(img) = block_images[j - 1].get(key) {
                    for c in 0..img.cols() {
                        spanning.push((0..img.rows()).map(|r| img.get(r, c).clone()).collect());
                    }
                }
            }
            let mut rank = Matrix::from_rows(spanning.clone()).rank();
            for v in &block_kernels[j][key] {
                spanning.push(v.clone());
                let r = Matrix::from_rows(spanning.clone()).rank();
                if r == rank {
                    spanning.pop();
                    continue;
                }
                rank = r;
                let mut phi = KoszulCochain::zero(proj, j);
                for (c, &id) in v.iter().zip(ids) {
                    if !c.is_zero() {
                        phi = phi.add(&scale_cochain(&bases[j].elements[id].1, c));
                    }
                }
                if !is_cocycle(&g_tilde(&phi)) {
                    representatives_closed = false;
                }
                reps.push(format!("{phi:?}"));
            }
        }
        representatives.push(reps);
    }
    Ok(CohomologyReport {
        truncation: *t,
        cochain_dims: bases[..=t.m].iter().map(|b| b.elements.len()).collect(),
        ranks,
        dims,
        representatives,
        representatives_closed,
        squares_to_zero,
        block_ranks_agree,
    })
}

fn scale_cochain<V: ModuleValue>(phi: &KoszulCochain<V>, c: &Scalar) -> KoszulCochain<V> {
    let terms: Vec<(Vec<usize>, V)> = phi.terms().map(|(i, v)| (i.clone(), v.scale(c))).collect();
    KoszulCochain::from_terms(phi.proj(), phi.degree(), terms).expect("same shape")
}

/// One row per degree: rank computation against the closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HkrRow {
    pub degree: usize,
    pub direct: usize,
    pub predicted: usize,
}

impl HkrRow {
    pub fn matches(&self) -> bool {
        self.direct == self.predicted
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HkrComparison {
    pub report: CohomologyReport,
    pub rows: Vec<HkrRow>,
}

impl HkrComparison {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(HkrRow::matches)
    }
}

pub fn hkr_compare(t: &Truncation, budget: usize) -> Result<HkrComparison> {
    let report = truncated_cohomology(t, budget)?;
    let rows = report
        .dims
        .iter()
        .enumerate()
        .map(|(j, &direct)| HkrRow { degree: j, direct, predicted: t.closed_form(j) })
        .collect();
    Ok(HkrComparison { report, rows })
}

impl fmt::Display for HkrComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.report.truncation;
        writeln!(f, "module={} m={} k={} n={} d={} o={}", t.module.name(), t.m, t.k, t.n, t.d, t.o)?;
        writeln!(f, "{:>6} {:>8} {:>8} {:>6}", "degree", "direct", "closed", "match")?;
        for r in &self.rows {
            writeln!(f, "{:>6} {:>8} {:>8} {:>6}", r.degree, r.direct, r.predicted, if r.matches() { "yes" } else { "NO" })?;
        }
        Ok(())
    }
}
