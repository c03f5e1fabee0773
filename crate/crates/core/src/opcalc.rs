//! Operator-valued twisted pseudo-differential calculus Op^τ_β on finite groups.
//!
//! A symbol assigns a d_ξ×d_ξ matrix f(x, ξ) to every point x and irrep ξ. The
//! quantization is unitary from the symbol space, with inner product
//! Σₓ Σ_ξ (d_ξ/|G|) Tr[f g*], onto Hilbert–Schmidt matrices on ℓ²(G).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::Cochain;
use crate::dual::{hs_inner, trace_of_product, CMat, UnitaryDual, C64};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, FiniteTau};

/// f(x, ξ), stored x-major: `blocks[x * |Ĝ| + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpSymbol {
    order: usize,
    dims: Vec<usize>,
    blocks: Vec<CMat>,
}

impl OpSymbol {
    pub fn new(group: &FiniteGroup, dual: &UnitaryDual, blocks: Vec<CMat>) -> Result<Self> {
        let dims = dual.dims();
        if blocks.len() != group.order() * dims.len() {
            return Err(Error::Shape(format!("{} blocks for {}×{} points", blocks.len(), group.order(), dims.len())));
        }
        for (i, b) in blocks.iter().enumerate() {
            let d = dims[i % dims.len()];
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::Shape(format!("block {i} is {}×{}, expected {d}×{d}", b.nrows(), b.ncols())));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("symbol block {i}")));
            }
        }
        Ok(Self { order: group.order(), dims, blocks })
    }

    pub fn from_fn(group: &FiniteGroup, dual: &UnitaryDual, mut f: impl FnMut(usize, usize) -> CMat) -> Self {
        let dims = dual.dims();
        let m = dims.len();
        let blocks = (0..group.order() * m).map(|i| f(i / m, i % m)).collect();
        Self { order: group.order(), dims, blocks }
    }

    /// f(x, ξ) = Id.
    pub fn identity(group: &FiniteGroup, dual: &UnitaryDual) -> Self {
        Self::from_fn(group, dual, |_, k| CMat::identity(dual.dims()[k], dual.dims()[k]))
    }

    pub fn random(group: &FiniteGroup, dual: &UnitaryDual, rng: &mut impl Rng) -> Self {
        let dims = dual.dims();
        Self::from_fn(group, dual, |_, k| CMat::from_fn(dims[k], dims[k], |_, _| crate::random_c64(rng)))
    }

    /// a ⊗ φ: f(x, ξ) = a(x) φ(ξ).
    pub fn tensor(group: &FiniteGroup, dual: &UnitaryDual, a: &[C64], phi: &crate::dual::OperatorField) -> Self {
        Self::from_fn(group, dual, |x, k| &phi.blocks[k] * a[x])
    }

    #[inline]
    pub fn block(&self, x: usize, k: usize) -> &CMat {
        &self.blocks[x * self.dims.len() + k]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    /// Σₓ Σ_ξ w_ξ Tr[f(x,ξ) g(x,ξ)*]
    pub fn inner(&self, other: &Self, dual: &UnitaryDual) -> C64 {
        let m = self.dims.len();
        self.blocks.iter().zip(&other.blocks).enumerate().map(|(i, (a, b))| hs_inner(a, b) * dual.weight(i % m)).sum()
    }

    pub fn norm(&self, dual: &UnitaryDual) -> f64 {
        self.inner(self, dual).re.max(0.0).sqrt()
    }

    /// Largest entrywise difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { order: self.order, dims: self.dims.clone(), blocks: self.blocks.iter().map(|b| b * c).collect() }
    }

    /// f^★(x, ξ) = f(x, ξ)*
    pub fn blockwise_adjoint(&self) -> Self {
        Self { order: self.order, dims: self.dims.clone(), blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    fn check(&self, group: &FiniteGroup, dual: &UnitaryDual) -> Result<()> {
        if self.order != group.order() || self.dims != dual.dims() {
            return Err(Error::BackendMismatch("symbol does not match the group and dual".into()));
        }
        Ok(())
    }
}

/// Field over (ξ, x) on the dual side, `blocks[k * |G| + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSymbol {
    order: usize,
    blocks: Vec<CMat>,
}

impl DualSymbol {
    #[inline]
    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, k: usize, x: usize) -> &CMat {
        &self.blocks[k * self.order + x]
    }

    /// Σ_ξ Σₓ w_ξ Tr[φ(ξ,x) ψ(ξ,x)*]
    pub fn inner(&self, other: &Self, dual: &UnitaryDual) -> C64 {
        self.blocks.iter().zip(&other.blocks).enumerate().map(|(i, (a, b))| hs_inner(a, b) * dual.weight(i / self.order)).sum()
    }
}

struct Ctx<'a> {
    g: &'a FiniteGroup,
    dual: &'a UnitaryDual,
    beta: &'a Cochain,
    tau: &'a FiniteTau,
}

fn ctx<'a>(g: &'a FiniteGroup, dual: &'a UnitaryDual, beta: &'a Cochain, tau: &'a FiniteTau) -> Result<Ctx<'a>> {
    if dual.group_order() != g.order() {
        return Err(Error::BackendMismatch("dual belongs to a different group".into()));
    }
    if beta.degree() != 1 || beta.order() != g.order() {
        return Err(Error::BackendMismatch("β must be a 1-cochain over the same group".into()));
    }
    if tau.0.len() != g.order() || tau.0.iter().any(|&t| t >= g.order()) {
        return Err(Error::UnsupportedTau(format!("table {:?} does not fit a group of order {}", tau.0, g.order())));
    }
    Ok(Ctx { g, dual, beta, tau })
}

fn check_square(g: &FiniteGroup, t: &CMat) -> Result<()> {
    if t.nrows() != g.order() || t.ncols() != g.order() {
        return Err(Error::Shape(format!("operator is {}×{}, expected {2}×{2}", t.nrows(), t.ncols(), g.order())));
    }
    Ok(())
}

/// (id ⊗ 𝓕⁻¹)f as a two-variable function a(p, z), row-major in p.
fn amplitude(c: &Ctx, f: &OpSymbol) -> Vec<C64> {
    let n = c.g.order();
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for p in 0..n {
        for z in 0..n {
            a[p * n + z] = c
                .dual
                .irreps()
                .iter()
                .enumerate()
                .map(|(k, r)| trace_of_product(r.at(z), f.block(p, k)) * c.dual.weight(k))
                .sum();
        }
    }
    a
}

/// (id ⊗ 𝓕)a for a two-variable function a(p, z).
fn symbol_from_amplitude(c: &Ctx, a: &[C64]) -> OpSymbol {
    let n = c.g.order();
    OpSymbol::from_fn(c.g, c.dual, |p, k| {
        let r = &c.dual.irreps()[k];
        let mut acc = CMat::zeros(r.dim(), r.dim());
        for z in 0..n {
            acc += r.at(z).adjoint() * a[p * n + z];
        }
        acc
    })
}

/// K(x, y) = β(x; xy⁻¹) Σ_ξ w_ξ Tr[ξ(xy⁻¹) f(τ(xy⁻¹)⁻¹x, ξ)]
pub fn kernel(group: &FiniteGroup, dual: &UnitaryDual, f: &OpSymbol, beta: &Cochain, tau: &FiniteTau) -> Result<CMat> {
    let c = ctx(group, dual, beta, tau)?;
    f.check(group, dual)?;
    let g = c.g;
    let n = g.order();
    let a = amplitude(&c, f);
    Ok(CMat::from_fn(n, n, |x, y| {
        let z = g.mul(x, g.inv(y));
        c.beta.at1(x, z) * a[g.mul(g.inv(c.tau.at(z)), x) * n + z]
    }))
}

/// Op^τ_β(f). With counting measure the operator matrix is the kernel itself.
pub fn op(group: &FiniteGroup, dual: &UnitaryDual, f: &OpSymbol, beta: &Cochain, tau: &FiniteTau) -> Result<CMat> {
    kernel(group, dual, f, beta, tau)
}

/// Inverse of `op`.
pub fn symbol_of(group: &FiniteGroup, dual: &UnitaryDual, t: &CMat, beta: &Cochain, tau: &FiniteTau) -> Result<OpSymbol> {
    let c = ctx(group, dual, beta, tau)?;
    check_square(group, t)?;
    let g = c.g;
    let n = g.order();
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for p in 0..n {
        for z in 0..n {
            let q = g.mul(c.tau.at(z), p);
            a[p * n + z] = t[(q, g.mul(g.inv(z), q))] * c.beta.at1(q, z).conj();
        }
    }
    Ok(symbol_from_amplitude(&c, &a))
}

/// f #^τ_γ g, realized through kernels.
pub fn compose_symbols(group: &FiniteGroup, dual: &UnitaryDual, f: &OpSymbol, h: &OpSymbol, beta: &Cochain, tau: &FiniteTau) -> Result<OpSymbol> {
    let prod = op(group, dual, f, beta, tau)? * op(group, dual, h, beta, tau)?;
    symbol_of(group, dual, &prod, beta, tau)
}

/// f^#, the symbol of Op(f)*.
pub fn involute_symbol(group: &FiniteGroup, dual: &UnitaryDual, f: &OpSymbol, beta: &Cochain, tau: &FiniteTau) -> Result<OpSymbol> {
    let adj = op(group, dual, f, beta, tau)?.adjoint();
    symbol_of(group, dual, &adj, beta, tau)
}

/// Λ_{u,v}: w ↦ ⟨w, u⟩ v.
pub fn rank_one(u: &[C64], v: &[C64]) -> CMat {
    CMat::from_fn(v.len(), u.len(), |x, y| v[x] * u[y].conj())
}

fn check_vec(g: &FiniteGroup, u: &[C64]) -> Result<()> {
    if u.len() != g.order() {
        return Err(Error::Shape(format!("vector of length {} on a group of order {}", u.len(), g.order())));
    }
    Ok(())
}

/// 𝒱_{u,v}, the symbol of the rank-one operator Λ_{u,v}.
pub fn wigner(group: &FiniteGroup, dual: &UnitaryDual, u: &[C64], v: &[C64], beta: &Cochain, tau: &FiniteTau) -> Result<OpSymbol> {
    check_vec(group, u)?;
    check_vec(group, v)?;
    symbol_of(group, dual, &rank_one(u, v), beta, tau)
}

/// The same transform summed directly:
/// 𝒱(x, ξ) = Σ_y conj β(τ(y)x; y) v(τ(y)x) conj u(y⁻¹τ(y)x) ξ(y)*.
pub fn wigner_direct(group: &FiniteGroup, dual: &UnitaryDual, u: &[C64], v: &[C64], beta: &Cochain, tau: &FiniteTau) -> Result<OpSymbol> {
    let c = ctx(group, dual, beta, tau)?;
    check_vec(group, u)?;
    check_vec(group, v)?;
    let g = c.g;
    Ok(OpSymbol::from_fn(g, dual, |x, k| {
        let r = &dual.irreps()[k];
        let mut acc = CMat::zeros(r.dim(), r.dim());
        for y in g.elements() {
            let tyx = g.mul(c.tau.at(y), x);
            let w = c.beta.at1(tyx, y).conj() * v[tyx] * u[g.mul(g.inv(y), tyx)].conj();
            acc += r.at(y).adjoint() * w;
        }
        acc
    }))
}

/// (𝓕 ⊗ 𝓕⁻¹)f: Fourier transform in x of the amplitude of f.
pub fn dual_transform(group: &FiniteGroup, dual: &UnitaryDual, f: &OpSymbol) -> Result<DualSymbol> {
    f.check(group, dual)?;
    let one = Cochain::one(group, 1);
    let tau = FiniteTau(vec![group.identity(); group.order()]);
    let c = ctx(group, dual, &one, &tau)?;
    let a = amplitude(&c, f);
    Ok(fourier_first(&c, &a))
}

fn fourier_first(c: &Ctx, a: &[C64]) -> DualSymbol {
    let n = c.g.order();
    let mut blocks = Vec::with_capacity(c.dual.len() * n);
    for r in c.dual.irreps() {
        for x in 0..n {
            let mut acc = CMat::zeros(r.dim(), r.dim());
            for z in 0..n {
                acc += r.at(z).adjoint() * a[z * n + x];
            }
            blocks.push(acc);
        }
    }
    DualSymbol { order: n, blocks }
}

/// 𝒲_{u,v}(ξ, x) = Σ_z conj β(τ(x)z; x) v(τ(x)z) conj u(x⁻¹τ(x)z) ξ(z)*.
pub fn fourier_wigner(group: &FiniteGroup, dual: &UnitaryDual, u: &[C64], v: &[C64], beta: &Cochain, tau: &FiniteTau) -> Result<DualSymbol> {
    let c = ctx(group, dual, beta, tau)?;
    check_vec(group, u)?;
    check_vec(group, v)?;
    let g = c.g;
    let n = g.order();
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for z in 0..n {
        for x in 0..n {
            let q = g.mul(c.tau.at(x), z);
            a[z * n + x] = c.beta.at1(q, x).conj() * v[q] * u[g.mul(g.inv(x), q)].conj();
        }
    }
    Ok(fourier_first(&c, &a))
}

/// The τ-twisted Weyl system on ℓ²(G) ⊗ ℂ^{d_ξ}, basis index y·d_ξ + i:
/// [W(ξ,x)Θ](y) = conj β(y; x) ξ(y)* ξ(τ(x)) Θ(x⁻¹y).
pub fn weyl(group: &FiniteGroup, dual: &UnitaryDual, k: usize, x: usize, beta: &Cochain, tau: &FiniteTau) -> Result<CMat> {
    let c = ctx(group, dual, beta, tau)?;
    let r = dual.irreps().get(k).ok_or_else(|| Error::InvalidDual(format!("no irrep with index {k}")))?;
    let g = c.g;
    let d = r.dim();
    let n = g.order();
    let txi = r.at(c.tau.at(x));
    let mut w = CMat::zeros(n * d, n * d);
    for y in 0..n {
        let block = r.at(y).adjoint() * txi * c.beta.at1(y, x).conj();
        let col = g.mul(g.inv(x), y);
        w.view_mut((y * d, col * d), (d, d)).copy_from(&block);
    }
    Ok(w)
}

/// [U_β(x)u](y) = conj β(y; x) u(x⁻¹y)
pub fn u_op(group: &FiniteGroup, beta: &Cochain, x: usize) -> Result<CMat> {
    if beta.degree() != 1 || beta.order() != group.order() {
        return Err(Error::BackendMismatch("β must be a 1-cochain over the same group".into()));
    }
    let n = group.order();
    let xi = group.inv(x);
    let mut m = CMat::zeros(n, n);
    for y in 0..n {
        m[(y, group.mul(xi, y))] = beta.at1(y, x).conj();
    }
    Ok(m)
}

/// [V(ξ)Θ](y) = ξ(y)* Θ(y) on ℓ²(G) ⊗ ℂ^{d_ξ}.
pub fn v_op(group: &FiniteGroup, dual: &UnitaryDual, k: usize) -> Result<CMat> {
    if dual.group_order() != group.order() {
        return Err(Error::BackendMismatch("dual belongs to a different group".into()));
    }
    let r = dual.irreps().get(k).ok_or_else(|| Error::InvalidDual(format!("no irrep with index {k}")))?;
    let d = r.dim();
    let n = group.order();
    let mut m = CMat::zeros(n * d, n * d);
    for y in 0..n {
        m.view_mut((y * d, y * d), (d, d)).copy_from(&r.at(y).adjoint());
    }
    Ok(m)
}

/// [Conv_β(w)u](q) = Σ_z β(q; z) w(z) u(z⁻¹q)
pub fn twisted_convolution(group: &FiniteGroup, w: &[C64], beta: &Cochain) -> Result<CMat> {
    check_vec(group, w)?;
    if beta.degree() != 1 || beta.order() != group.order() {
        return Err(Error::BackendMismatch("β must be a 1-cochain over the same group".into()));
    }
    let n = group.order();
    let mut m = CMat::zeros(n, n);
    for q in 0..n {
        for z in 0..n {
            m[(q, group.mul(group.inv(z), q))] += beta.at1(q, z) * w[z];
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub tau_symmetric: bool,
    /// max over (q, z) of |γ(q; z, z⁻¹) − 1| for γ = δ¹β.
    pub gamma_inverse_defect: f64,
    /// max over random f of the entrywise gap between Op(f^★) and Op(f)*.
    pub adjoint_defect: f64,
}

impl SymmetryReport {
    pub fn adjoint_holds(&self, tol: f64) -> bool {
        self.adjoint_defect < tol
    }
}

/// Checks the conditions under which the blockwise adjoint of the symbol
/// quantizes to the operator adjoint, and measures that identity on `trials` random symbols.
pub fn symmetric_check(
    group: &FiniteGroup,
    dual: &UnitaryDual,
    beta: &Cochain,
    tau: &FiniteTau,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<SymmetryReport> {
    let c = ctx(group, dual, beta, tau)?;
    let g = c.g;
    let tau_symmetric = tau.is_symmetric(g);
    let mut gamma_inverse_defect: f64 = 0.0;
    for q in g.elements() {
        for z in g.elements() {
            // γ(q; z, z⁻¹) = β(z⁻¹q; z⁻¹) β(q; z) for normalized β
            let v = beta.at1(g.mul(g.inv(z), q), g.inv(z)) * beta.at1(q, z);
            gamma_inverse_defect = gamma_inverse_defect.max((v - 1.0).norm());
        }
    }
    let mut adjoint_defect: f64 = 0.0;
    for _ in 0..trials {
        let f = OpSymbol::random(g, dual, rng);
        let lhs = op(g, dual, &f.blockwise_adjoint(), beta, tau)?;
        let rhs = op(g, dual, &f, beta, tau)?.adjoint();
        adjoint_defect = adjoint_defect.max(crate::dual::max_abs(&(lhs - rhs)));
    }
    Ok(SymmetryReport { tau_symmetric, gamma_inverse_defect, adjoint_defect })
}

/// Serialized symbol: for each x, the per-irrep blocks as row-major (re, im) lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpSymbolSpec {
    pub points: Vec<Vec<Vec<(f64, f64)>>>,
}

impl OpSymbolSpec {
    pub fn build(&self, group: &FiniteGroup, dual: &UnitaryDual) -> Result<OpSymbol> {
        let dims = dual.dims();
        if self.points.len() != group.order() || self.points.iter().any(|p| p.len() != dims.len()) {
            return Err(Error::Shape("symbol file does not match the group and dual".into()));
        }
        let mut blocks = Vec::new();
        for p in &self.points {
            for (k, b) in p.iter().enumerate() {
                let d = dims[k];
                if b.len() != d * d {
                    return Err(Error::Shape(format!("block of {} entries, expected {}", b.len(), d * d)));
                }
                blocks.push(CMat::from_row_iterator(d, d, b.iter().map(|&(re, im)| C64::new(re, im))));
            }
        }
        OpSymbol::new(group, dual, blocks)
    }

    pub fn describe(f: &OpSymbol) -> Self {
        let m = f.dims.len();
        Self {
            points: f
                .blocks
                .chunks(m)
                .map(|p| p.iter().map(|b| b.transpose().iter().map(|z| (z.re, z.im)).collect()).collect())
                .collect(),
        }
    }
}

/// Dense complex matrix as CSV, one row per line, each entry as `re,im`.
pub fn matrix_to_csv(m: &CMat) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.17e},{:.17e}", m[(i, j)].re, m[(i, j)].im)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
