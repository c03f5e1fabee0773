//! Scalar quantization of symbols on G × 𝔤* for nilpotent Lie groups in exponential
//! coordinates, truncated to a grid.
//!
//! The kernel is K(x, y) = β(x; z) a(τ(z)⁻¹x, z) with z = xy⁻¹ and
//! a(p, z) = (2π)⁻ⁿ ∫ e^{i⟨log z|𝒳⟩} s(p, 𝒳) d𝒳, the latter either in closed form
//! or as the dual-lattice sum. All group arguments are exact BCH products.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dual::{CMat, C64};
use crate::error::{Error, Result};
use crate::fields::{MagneticField, OneForm};
use crate::geometry::magnetic_trivialization;
use crate::grid::{fft_all_axes, Grid};
use crate::group::{Coords, NilpotentLieGroup, TauMap};
use crate::quadrature::Quadrature;

pub trait ScalarSymbol: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, p: &[f64], xi: &[f64]) -> C64;

    /// Closed form of (2π)⁻ⁿ ∫ e^{i⟨z|𝒳⟩} s(p, 𝒳) d𝒳, when known.
    fn amplitude(&self, _p: &[f64], _z: &[f64]) -> Option<C64> {
        None
    }
}

/// s(p, 𝒳) = c · exp(−|p − p₀|²/(2w²)) · exp(−σ²|𝒳 − 𝒳₀|²/2)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSymbol {
    pub scale: f64,
    pub center: Vec<f64>,
    pub width: f64,
    pub sigma: f64,
    #[serde(default)]
    pub momentum: Option<Vec<f64>>,
}

impl GaussianSymbol {
    pub fn new(dim: usize, scale: f64, width: f64, sigma: f64) -> Self {
        Self { scale, center: vec![0.0; dim], width, sigma, momentum: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.sigma > 0.0 && self.scale.is_finite()) {
            return Err(Error::Config("Gaussian symbol needs positive widths and a finite scale".into()));
        }
        if self.momentum.as_ref().is_some_and(|m| m.len() != self.center.len()) {
            return Err(Error::Config("momentum and center differ in dimension".into()));
        }
        Ok(())
    }

    fn envelope(&self, p: &[f64]) -> f64 {
        let r2: f64 = p.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        self.scale * (-r2 / (2.0 * self.width * self.width)).exp()
    }

    fn momentum_at(&self, i: usize) -> f64 {
        self.momentum.as_ref().map_or(0.0, |m| m[i])
    }
}

impl ScalarSymbol for GaussianSymbol {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn eval(&self, p: &[f64], xi: &[f64]) -> C64 {
        let r2: f64 = xi.iter().enumerate().map(|(i, v)| (v - self.momentum_at(i)).powi(2)).sum();
        C64::new(self.envelope(p) * (-self.sigma * self.sigma * r2 / 2.0).exp(), 0.0)
    }

    fn amplitude(&self, p: &[f64], z: &[f64]) -> Option<C64> {
        let n = self.dim() as i32;
        let s2 = self.sigma * self.sigma;
        let z2: f64 = z.iter().map(|v| v * v).sum();
        let phase: f64 = z.iter().enumerate().map(|(i, v)| v * self.momentum_at(i)).sum();
        let mag = self.envelope(p) * (2.0 * std::f64::consts::PI * s2).powf(-n as f64 / 2.0) * (-z2 / (2.0 * s2)).exp();
        Some(C64::from_polar(mag, phase))
    }
}

/// Symbol given by a closure.
#[derive(Clone)]
pub struct FnSymbol {
    pub dim: usize,
    pub f: Arc<dyn Fn(&[f64], &[f64]) -> C64 + Send + Sync>,
}

impl ScalarSymbol for FnSymbol {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, p: &[f64], xi: &[f64]) -> C64 {
        (self.f)(p, xi)
    }
}

/// Hides any closed-form amplitude so the dual-lattice sum is used.
pub struct QuadratureOnly<S>(pub S);

impl<S: ScalarSymbol> ScalarSymbol for QuadratureOnly<S> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, p: &[f64], xi: &[f64]) -> C64 {
        self.0.eval(p, xi)
    }
}

/// The 1-cochain β used by the quantization.
#[derive(Clone)]
pub enum LieTrivialization {
    One,
    /// β^A(q; x) = exp(i Γ^A[[q, x⁻¹q]])
    Magnetic { a: Arc<dyn OneForm>, rule: Quadrature },
}

impl std::fmt::Debug for LieTrivialization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LieTrivialization::One => write!(f, "One"),
            LieTrivialization::Magnetic { rule, .. } => write!(f, "Magnetic(order {})", rule.segment.order()),
        }
    }
}

impl LieTrivialization {
    pub fn magnetic(field: &MagneticField, rule: Quadrature) -> Self {
        LieTrivialization::Magnetic { a: field.a.clone(), rule }
    }

    pub fn eval(&self, g: &NilpotentLieGroup, q: &[f64], x: &[f64]) -> Result<C64> {
        match self {
            LieTrivialization::One => Ok(C64::new(1.0, 0.0)),
            LieTrivialization::Magnetic { a, rule } => magnetic_trivialization(g, a.as_ref(), q, x, rule),
        }
    }
}

/// Fraction of Σ|s|² carried by the outermost layer of the primal or dual lattice.
pub fn boundary_mass(grid: &Grid, s: &dyn ScalarSymbol) -> f64 {
    let n = grid.per_axis();
    let edge = |idx: usize| grid.multi(idx).iter().any(|&i| i == 0 || i == n - 1);
    let sample = |p: usize| -> (f64, f64) {
        let x = grid.point(p);
        let mut total = 0.0;
        let mut outer = 0.0;
        for k in 0..grid.len() {
            let v = s.eval(&x, &grid.dual_point(k)).norm_sqr();
            total += v;
            if edge(p) || edge(k) {
                outer += v;
            }
        }
        (total, outer)
    };
    let (total, outer) = (0..grid.len()).into_par_iter().map(sample).reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    if total == 0.0 {
        0.0
    } else {
        outer / total
    }
}

/// Linear ordering parameter τ(x) = c·x on an Abelian group.
fn linear_tau(tau: &TauMap) -> Option<f64> {
    match tau {
        TauMap::ConstantIdentity => Some(0.0),
        TauMap::Half => Some(0.5),
        TauMap::Identity => Some(1.0),
        _ => None,
    }
}

pub struct ScalarQuantizer<'a> {
    pub group: &'a NilpotentLieGroup,
    pub grid: &'a Grid,
    pub beta: &'a LieTrivialization,
    pub tau: &'a TauMap,
}

impl<'a> ScalarQuantizer<'a> {
    pub fn new(group: &'a NilpotentLieGroup, grid: &'a Grid, beta: &'a LieTrivialization, tau: &'a TauMap) -> Result<Self> {
        if group.dim() != grid.dim() {
            return Err(Error::GridMismatch(format!("group of dimension {} on a {}-dimensional grid", group.dim(), grid.dim())));
        }
        if let LieTrivialization::Magnetic { a, .. } = beta {
            if a.dim() != group.dim() {
                return Err(Error::GridMismatch("potential dimension differs from the group".into()));
            }
        }
        if matches!(tau, TauMap::Table(_)) {
            return Err(Error::UnsupportedTau("table maps need a finite group".into()));
        }
        Ok(Self { group, grid, beta, tau })
    }

    fn check_symbol(&self, s: &dyn ScalarSymbol) -> Result<()> {
        if s.dim() != self.grid.dim() {
            return Err(Error::GridMismatch(format!("symbol of dimension {} on a {}-dimensional grid", s.dim(), self.grid.dim())));
        }
        Ok(())
    }

    /// a(p, z) in closed form, or by the dual-lattice sum.
    pub fn amplitude(&self, s: &dyn ScalarSymbol, p: &[f64], z: &[f64]) -> Result<C64> {
        let log_z = self.group.log(z);
        if let Some(v) = s.amplitude(p, &log_z) {
            return finite(v);
        }
        let w = self.grid.dual_weight();
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..self.grid.len() {
            let xi = self.grid.dual_point(k);
            let ph: f64 = log_z.iter().zip(&xi).map(|(a, b)| a * b).sum();
            acc += s.eval(p, &xi) * C64::from_polar(1.0, ph);
        }
        finite(acc * w)
    }

    /// K(x, y) at arbitrary group points.
    pub fn kernel_at(&self, s: &dyn ScalarSymbol, x: &[f64], y: &[f64]) -> Result<C64> {
        let g = self.group;
        let z = g.mul(x, &g.inv(y));
        let tz = self.tau.apply_lie(g, &z)?;
        let p = g.left_div(&tz, x);
        Ok(self.beta.eval(g, x, &z)? * self.amplitude(s, &p, &z)?)
    }

    /// Kernel restricted to `rows × cols` (flat grid indices).
    pub fn kernel(&self, s: &dyn ScalarSymbol, rows: &[usize], cols: &[usize]) -> Result<CMat> {
        self.check_symbol(s)?;
        let grid = self.grid;
        let cols_pts: Vec<Coords> = cols.iter().map(|&j| grid.point(j)).collect();
        let data: Vec<Vec<C64>> = rows
            .par_iter()
            .map(|&i| {
                let x = grid.point(i);
                cols_pts.iter().map(|y| self.kernel_at(s, &x, y)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(CMat::from_fn(rows.len(), cols.len(), |r, c| data[r][c]))
    }

    /// Operator matrix K·hⁿ on the whole grid.
    pub fn operator(&self, s: &dyn ScalarSymbol) -> Result<CMat> {
        let all: Vec<usize> = (0..self.grid.len()).collect();
        Ok(self.kernel(s, &all, &all)? * C64::new(self.grid.cell_weight(), 0.0))
    }

    /// Kernel on the box `[lo, hi)ⁿ` for Abelian groups with τ(x) = c·x, c ∈ {0, ½, 1}.
    /// One FFT over the dual lattice per value of p yields a(p, ·) on every lattice z.
    /// Rows and columns are the box points in row-major order.
    pub fn kernel_fft(&self, s: &dyn ScalarSymbol, lo: usize, hi: usize) -> Result<CMat> {
        self.check_symbol(s)?;
        if !self.group.is_abelian() {
            return Err(Error::UnsupportedTau("the FFT path needs an Abelian group".into()));
        }
        let c = linear_tau(self.tau).ok_or_else(|| Error::UnsupportedTau(format!("{:?} is not linear", self.tau)))?;
        let grid = self.grid;
        let (n, dim) = (grid.per_axis(), grid.dim());
        if lo >= hi || hi > n {
            return Err(Error::GridMismatch(format!("box [{lo}, {hi}) does not fit {n} points per axis")));
        }
        let side = hi - lo;
        let box_len = side.pow(dim as u32);
        let box_multi = |b: usize| -> Vec<usize> {
            let mut m = vec![0; dim];
            let mut r = b;
            for a in (0..dim).rev() {
                m[a] = lo + r % side;
                r /= side;
            }
            m
        };
        // key per axis: 2(1−c)i + 2cj, so that p = −L + key·h/2
        let (ci, cj) = ((2.0 * (1.0 - c)) as usize, (2.0 * c) as usize);
        let mut groups: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
        let box_points: Vec<Vec<usize>> = (0..box_len).map(box_multi).collect();
        for (r, mi) in box_points.iter().enumerate() {
            for (col, mj) in box_points.iter().enumerate() {
                let key: Vec<usize> = (0..dim).map(|a| ci * mi[a] + cj * mj[a]).collect();
                groups.entry(key).or_default().push((r, col));
            }
        }
        let dual_pts: Vec<Coords> = (0..grid.len()).map(|k| grid.dual_point(k)).collect();
        let w = grid.dual_weight();
        let h = grid.spacing();
        let l = grid.half_width();
        let results: Vec<Vec<(usize, usize, C64)>> = groups
            .into_par_iter()
            .map(|(key, pairs)| {
                let p: Coords = key.iter().map(|&k| -l + k as f64 * h / 2.0).collect();
                let mut data: Vec<C64> = dual_pts.iter().map(|xi| s.eval(&p, xi)).collect();
                // a(p, m h) = w (−1)^{Σm} Σₖ e^{2πi⟨m,k⟩/N} s(p, 𝒳ₖ)
                fft_all_axes(&mut data, n, dim, true, &mut FftPlanner::new());
                pairs
                    .into_iter()
                    .map(|(r, col)| {
                        let (mi, mj) = (&box_points[r], &box_points[col]);
                        let x: Coords = mi.iter().map(|&i| grid.axis_point(i)).collect();
                        let y: Coords = mj.iter().map(|&j| grid.axis_point(j)).collect();
                        let z: Coords = x.iter().zip(&y).map(|(a, b)| a - b).collect();
                        let mut idx = 0;
                        let mut sign = 1.0;
                        for a in 0..dim {
                            let m = mi[a] as isize - mj[a] as isize;
                            idx = idx * n + m.rem_euclid(n as isize) as usize;
                            if m.rem_euclid(2) == 1 {
                                sign = -sign;
                            }
                        }
                        let amp = data[idx] * (w * sign);
                        let beta = self.beta.eval(self.group, &x, &z)?;
                        Ok((r, col, beta * amp))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut k = CMat::zeros(box_len, box_len);
        for chunk in results {
            for (r, col, v) in chunk {
                k[(r, col)] = v;
            }
        }
        Ok(k)
    }

    /// Flat grid indices of the box `[lo, hi)ⁿ`, in the order used by [`Self::kernel_fft`].
    pub fn box_indices(&self, lo: usize, hi: usize) -> Vec<usize> {
        let dim = self.grid.dim();
        let side = hi - lo;
        (0..side.pow(dim as u32))
            .map(|b| {
                let mut m = vec![0; dim];
                let mut r = b;
                for a in (0..dim).rev() {
                    m[a] = lo + r % side;
                    r /= side;
                }
                self.grid.flat(&m)
            })
            .collect()
    }
}

fn finite(v: C64) -> Result<C64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("symbol evaluation".into()))
    }
}

/// Magnetic quantization: β = β^A and the symmetric ordering τ(x) = exp(½ log x).
pub fn magnetic_op(group: &NilpotentLieGroup, grid: &Grid, field: &MagneticField, s: &dyn ScalarSymbol, rule: &Quadrature) -> Result<CMat> {
    let beta = LieTrivialization::magnetic(field, rule.clone());
    let tau = TauMap::Half;
    ScalarQuantizer::new(group, grid, &beta, &tau)?.operator(s)
}

/// Kernel values with β divided out, b(i, j) = K(xᵢ, xⱼ)/β(xᵢ; xᵢxⱼ⁻¹), on the full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSymbol {
    pub grid: Grid,
    pub values: CMat,
}

impl SampledSymbol {
    pub fn from_kernel(q: &ScalarQuantizer, kernel: &CMat) -> Result<Self> {
        let grid = q.grid;
        if kernel.nrows() != grid.len() || kernel.ncols() != grid.len() {
            return Err(Error::GridMismatch("kernel does not cover the grid".into()));
        }
        let g = q.group;
        let pts: Vec<Coords> = (0..grid.len()).map(|i| grid.point(i)).collect();
        let mut values = kernel.clone();
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                let z = g.mul(&pts[i], &g.inv(&pts[j]));
                values[(i, j)] *= q.beta.eval(g, &pts[i], &z)?.conj();
            }
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn kernel(&self, q: &ScalarQuantizer) -> Result<CMat> {
        let g = q.group;
        let pts: Vec<Coords> = (0..self.grid.len()).map(|i| self.grid.point(i)).collect();
        let mut k = self.values.clone();
        for i in 0..self.grid.len() {
            for j in 0..self.grid.len() {
                let z = g.mul(&pts[i], &g.inv(&pts[j]));
                k[(i, j)] *= q.beta.eval(g, &pts[i], &z)?;
            }
        }
        Ok(k)
    }

    /// Symbol samples s(xᵢ, 𝒳ₖ) for τ ≡ e on an Abelian group, reading a(xᵢ, m h)
    /// off the periodic lattice difference m ≡ i − j (mod N).
    pub fn to_symbol_kn(&self) -> Result<Vec<C64>> {
        let grid = &self.grid;
        let (n, dim) = (grid.per_axis(), grid.dim());
        let len = grid.len();
        let mut out = vec![C64::new(0.0, 0.0); len * len];
        for i in 0..len {
            let mi = grid.multi(i);
            // a(xᵢ, m h) indexed by m mod N, then 𝐅 in z on the lattice
            let mut a = vec![C64::new(0.0, 0.0); len];
            for (m, slot) in a.iter_mut().enumerate() {
                let mm = grid.multi(m);
                let mj: Vec<usize> = (0..dim).map(|ax| (mi[ax] + n - mm[ax]) % n).collect();
                *slot = self.values[(i, grid.flat(&mj))];
            }
            // s(p, 𝒳ₖ) = hⁿ Σ_m e^{−i m h 𝒳ₖ} a(p, m h) = hⁿ (−1)^{Σm} Σ_m e^{−2πi⟨m,k⟩/N} a
            for (m, v) in a.iter_mut().enumerate() {
                if grid.multi(m).iter().sum::<usize>() % 2 == 1 {
                    *v = -*v;
                }
            }
            fft_all_axes(&mut a, n, dim, false, &mut FftPlanner::new());
            for (k, v) in a.into_iter().enumerate() {
                out[i * len + k] = v * grid.cell_weight();
            }
        }
        Ok(out)
    }
}

/// 𝐫 ♮ 𝐬, sampled: the symbol whose kernel is the grid-weighted product Ker(𝐫)∙Ker(𝐬).
pub fn compose_scalar(q: &ScalarQuantizer, r: &dyn ScalarSymbol, s: &dyn ScalarSymbol) -> Result<SampledSymbol> {
    let all: Vec<usize> = (0..q.grid.len()).collect();
    let kr = q.kernel(r, &all, &all)?;
    let ks = q.kernel(s, &all, &all)?;
    SampledSymbol::from_kernel(q, &(kr * ks * C64::new(q.grid.cell_weight(), 0.0)))
}

/// Operator whose row q has a single entry `phase[q]` in column `target[q]`;
/// `None` marks rows whose source point left the truncated grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialOp {
    pub target: Vec<Option<usize>>,
    pub phase: Vec<C64>,
}

impl MonomialOp {
    pub fn identity(len: usize) -> Self {
        Self { target: (0..len).map(Some).collect(), phase: vec![C64::new(1.0, 0.0); len] }
    }

    pub fn diagonal(phase: Vec<C64>) -> Self {
        Self { target: (0..phase.len()).map(Some).collect(), phase }
    }

    /// self ∘ other
    pub fn then(&self, other: &Self) -> Self {
        let mut target = Vec::with_capacity(self.target.len());
        let mut phase = Vec::with_capacity(self.target.len());
        for (t, p) in self.target.iter().zip(&self.phase) {
            match t.and_then(|t| other.target[t].map(|u| (u, other.phase[t]))) {
                Some((u, q)) => {
                    target.push(Some(u));
                    phase.push(p * q);
                }
                None => {
                    target.push(None);
                    phase.push(C64::new(0.0, 0.0));
                }
            }
        }
        Self { target, phase }
    }

    pub fn scale_rows(&self, f: &[C64]) -> Self {
        Self { target: self.target.clone(), phase: self.phase.iter().zip(f).map(|(a, b)| a * b).collect() }
    }

    pub fn apply(&self, u: &[C64]) -> Vec<C64> {
        self.target.iter().zip(&self.phase).map(|(t, p)| t.map_or(C64::new(0.0, 0.0), |t| p * u[t])).collect()
    }

    pub fn to_matrix(&self) -> CMat {
        let n = self.target.len();
        let mut m = CMat::zeros(n, n);
        for (q, (t, p)) in self.target.iter().zip(&self.phase).enumerate() {
            if let Some(t) = t {
                m[(q, *t)] = *p;
            }
        }
        m
    }

    /// Largest gap over `rows` where both operators are defined; rows where exactly
    /// one is defined count as infinite, differing targets as 2.
    pub fn defect(&self, other: &Self, rows: &[usize]) -> f64 {
        rows.iter()
            .map(|&q| match (self.target[q], other.target[q]) {
                (Some(a), Some(b)) if a == b => (self.phase[q] - other.phase[q]).norm(),
                (Some(_), Some(_)) => 2.0,
                (None, None) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

/// Tolerance, in units of the spacing, for recognizing lattice points.
pub const LATTICE_TOL: f64 = 1e-9;

/// x⁻¹q lands on the lattice for every lattice point q.
pub fn is_lattice_compatible(group: &NilpotentLieGroup, grid: &Grid, x: &[f64]) -> bool {
    (0..grid.len()).all(|q| grid.locate(&group.left_div(x, &grid.point(q)), LATTICE_TOL).is_ok())
}

/// [𝐖(x, 𝒳)u](q) = β(q; x) e^{i⟨log[τ(x)⁻¹q]|𝒳⟩} u(x⁻¹q)
pub fn scalar_weyl(q: &ScalarQuantizer, x: &[f64], xi: &[f64]) -> Result<MonomialOp> {
    let (g, grid) = (q.group, q.grid);
    if x.len() != g.dim() || xi.len() != g.dim() {
        return Err(Error::GridMismatch("element and covector must match the group dimension".into()));
    }
    let tx = q.tau.apply_lie(g, x)?;
    let rows: Vec<(Option<usize>, C64)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = grid.point(i);
            let src = g.left_div(x, &p);
            let t = grid.locate(&src, LATTICE_TOL).map_err(|_| Error::OffLattice(x.to_vec()))?;
            let arg = g.log(&g.left_div(&tx, &p));
            let ph: f64 = arg.iter().zip(xi).map(|(a, b)| a * b).sum();
            Ok((t, q.beta.eval(g, &p, x)? * C64::from_polar(1.0, ph)))
        })
        .collect::<Result<_>>()?;
    let (target, phase) = rows.into_iter().unzip();
    Ok(MonomialOp { target, phase })
}

/// 𝐔_β(x) = 𝐖(x, 0)
pub fn u_weyl(q: &ScalarQuantizer, x: &[f64]) -> Result<MonomialOp> {
    scalar_weyl(q, x, &vec![0.0; x.len()])
}

/// 𝐕(𝒳) = 𝐖(e, 𝒳)
pub fn v_weyl(q: &ScalarQuantizer, xi: &[f64]) -> Result<MonomialOp> {
    scalar_weyl(q, &q.group.identity(), xi)
}

/// Δ(x, 𝒳)(q) = e^{i⟨log(x⁻¹q) − log q|𝒳⟩}, the multiplier in 𝐔(x)𝐕(𝒳) = Δ 𝐕(𝒳)𝐔(x).
pub fn weyl_commutator(group: &NilpotentLieGroup, grid: &Grid, x: &[f64], xi: &[f64]) -> Vec<C64> {
    (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            let d = group.left_div(x, &p);
            let ph: f64 = d.iter().zip(&p).zip(xi).map(|((a, b), c)| (a - b) * c).sum();
            C64::from_polar(1.0, ph)
        })
        .collect()
}

/// Symbol selection in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolSpec {
    Gaussian(GaussianSymbol),
}

impl SymbolSpec {
    pub fn build(&self, dim: usize) -> Result<Arc<dyn ScalarSymbol>> {
        match self {
            SymbolSpec::Gaussian(s) => {
                s.validate()?;
                if s.center.len() != dim {
                    return Err(Error::Config(format!("symbol center has {} entries for dimension {dim}", s.center.len())));
                }
                Ok(Arc::new(s.clone()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::max_abs;

    fn plane(n: usize) -> (NilpotentLieGroup, Grid) {
        (NilpotentLieGroup::abelian(2), Grid::new(2, 3.0, n).unwrap())
    }

    #[test]
    fn gaussian_amplitude_matches_lattice_sum() {
        let g = NilpotentLieGroup::abelian(1);
        let grid = Grid::new(1, 8.0, 64).unwrap();
        let s = GaussianSymbol { momentum: Some(vec![0.7]), ..GaussianSymbol::new(1, 1.3, 2.0, 0.8) };
        let beta = LieTrivialization::One;
        let tau = TauMap::Half;
        let q = ScalarQuantizer::new(&g, &grid, &beta, &tau).unwrap();
        for (p, z) in [(0.3, 0.0), (-1.0, 1.5), (2.0, -2.5)] {
            let exact = q.amplitude(&s, &[p], &[z]).unwrap();
            let numeric = q.amplitude(&QuadratureOnly(s.clone()), &[p], &[z]).unwrap();
            assert!((exact - numeric).norm() < 1e-10, "{exact} {numeric}");
        }
    }

    #[test]
    fn fft_path_matches_direct_path() {
        let (g, grid) = plane(8);
        let s = QuadratureOnly(GaussianSymbol { momentum: Some(vec![0.4, -0.2]), ..GaussianSymbol::new(2, 1.0, 1.5, 0.7) });
        let field = MagneticField::constant_planar(0.6);
        let beta = LieTrivialization::magnetic(&field, Quadrature::default());
        for tau in [TauMap::ConstantIdentity, TauMap::Half, TauMap::Identity] {
            let q = ScalarQuantizer::new(&g, &grid, &beta, &tau).unwrap();
            let idx = q.box_indices(1, 7);
            let direct = q.kernel(&s, &idx, &idx).unwrap();
            let fast = q.kernel_fft(&s, 1, 7).unwrap();
            assert!(max_abs(&(direct - fast)) < 1e-12, "{tau:?}");
        }
    }

    #[test]
    fn x_independent_symbol_with_trivial_ordering_is_a_multiplier() {
        let g = NilpotentLieGroup::heisenberg();
        let grid = Grid::new(3, 2.0, 4).unwrap();
        let s = FnSymbol { dim: 3, f: Arc::new(|p: &[f64], _: &[f64]| C64::new(1.0 + p[0], p[2])) };
        let beta = LieTrivialization::One;
        let tau = TauMap::ConstantIdentity;
        let q = ScalarQuantizer::new(&g, &grid, &beta, &tau).unwrap();
        let m = q.operator(&s).unwrap();
        let diag: Vec<C64> = (0..grid.len()).map(|i| s.eval(&grid.point(i), &[0.0; 3])).collect();
        assert!(max_abs(&(m - crate::crossed::rho(&diag))) < 1e-12);
    }

    #[test]
    fn grid_plancherel_for_the_kernel() {
        let (g, grid) = plane(6);
        let s = FnSymbol { dim: 2, f: Arc::new(|p: &[f64], xi: &[f64]| C64::new((p[0] * xi[1]).sin(), p[1] - xi[0] * 0.3)) };
        let beta = LieTrivialization::One;
        let tau = TauMap::ConstantIdentity;
        let q = ScalarQuantizer::new(&g, &grid, &beta, &tau).unwrap();
        let m = q.operator(&s).unwrap();
        let hs: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        let sym: f64 = (0..grid.len())
            .flat_map(|i| (0..grid.len()).map(move |k| (i, k)))
            .map(|(i, k)| s.eval(&grid.point(i), &grid.dual_point(k)).norm_sqr())
            .sum::<f64>()
            * grid.cell_weight()
            * grid.dual_weight();
        assert!((hs - sym).abs() < 1e-10 * sym);
    }

    #[test]
    fn sampled_symbol_roundtrip() {
        let (g, grid) = plane(4);
        let s = FnSymbol { dim: 2, f: Arc::new(|p: &[f64], xi: &[f64]| C64::new(p[0] + xi[1], (p[1] * xi[0]).cos())) };
        let field = MagneticField::constant_planar(0.4);
        let beta = LieTrivialization::magnetic(&field, Quadrature::default());
        let tau = TauMap::ConstantIdentity;
        let q = ScalarQuantizer::new(&g, &grid, &beta, &tau).unwrap();
        let all: Vec<usize> = (0..grid.len()).collect();
        let k = q.kernel(&s, &all, &all).unwrap();
        let sampled = SampledSymbol::from_kernel(&q, &k).unwrap();
        assert!(max_abs(&(sampled.kernel(&q).unwrap() - &k)) < 1e-12);
        let table = sampled.to_symbol_kn().unwrap();
        for i in 0..grid.len() {
            for kk in 0..grid.len() {
                assert!((table[i * grid.len() + kk] - s.eval(&grid.point(i), &grid.dual_point(kk))).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn monomial_algebra() {
        let a = MonomialOp { target: vec![Some(1), Some(2), None], phase: vec![C64::new(0.0, 1.0), C64::new(2.0, 0.0), C64::new(0.0, 0.0)] };
        let b = MonomialOp { target: vec![Some(0), Some(0), Some(1)], phase: vec![C64::new(1.0, 0.0), C64::new(3.0, 0.0), C64::new(5.0, 0.0)] };
        let ab = a.then(&b);
        assert!(max_abs(&(ab.to_matrix() - a.to_matrix() * b.to_matrix())) < 1e-15);
        let u = vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)];
        assert_eq!(a.apply(&u), vec![C64::new(0.0, 2.0), C64::new(6.0, 0.0), C64::new(0.0, 0.0)]);
        assert_eq!(MonomialOp::identity(3).defect(&MonomialOp::identity(3), &[0, 1, 2]), 0.0);
    }

    #[test]
    fn weyl_identity_and_planar_commutator() {
        let (g, grid) = plane(8);
        let beta = LieTrivialization::One;
        let tau = TauMap::Half;
        let q = ScalarQuantizer::new(&g, &grid, &beta, &tau).unwrap();
        let all: Vec<usize> = (0..grid.len()).collect();
        let w = scalar_weyl(&q, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(w.defect(&MonomialOp::identity(grid.len()), &all), 0.0);
        let d = weyl_commutator(&g, &grid, &[0.75, -1.5], &[0.3, 1.1]);
        let expected = C64::from_polar(1.0, -(0.75 * 0.3 - 1.5 * 1.1));
        assert!(d.iter().all(|z| (z - expected).norm() < 1e-14));
    }

    #[test]
    fn lattice_compatibility_on_heisenberg() {
        let g = NilpotentLieGroup::heisenberg();
        let grid = Grid::new(3, 4.0, 16).unwrap();
        assert!(is_lattice_compatible(&g, &grid, &[0.0, 0.0, 1.5]));
        assert!(is_lattice_compatible(&g, &grid, &[2.0, -4.0, 0.5]));
        assert!(!is_lattice_compatible(&g, &grid, &[1.0, 0.0, 0.0]));
        let beta = LieTrivialization::One;
        let tau = TauMap::Half;
        let q = ScalarQuantizer::new(&g, &grid, &beta, &tau).unwrap();
        assert!(matches!(u_weyl(&q, &[1.0, 0.0, 0.0]), Err(Error::OffLattice(_))));
    }

    #[test]
    fn boundary_mass_flags_wide_symbols() {
        let grid = Grid::new(1, 4.0, 16).unwrap();
        let narrow = GaussianSymbol::new(1, 1.0, 0.7, 1.0);
        let wide = GaussianSymbol::new(1, 1.0, 20.0, 1.0);
        assert!(boundary_mass(&grid, &narrow) < 1e-6);
        assert!(boundary_mass(&grid, &wide) > 1e-2);
    }
}
