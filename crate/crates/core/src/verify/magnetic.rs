//! Magnetic checks on ℝ² and the Heisenberg group: geometry of circulations and
//! fluxes, and the quantized operators on truncated grids.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::{max_abs, C64};
use crate::error::{Error, Result};
use crate::fields::{MagneticField, Poly, PolyOneForm};
use crate::geometry::{cocycle_defect, delta_beta, magnetic_cocycle, stokes_residual};
use crate::grid::{Grid, GridSpec};
use crate::group::{Coords, NilpotentLieGroup, TauMap};
use crate::quadrature::{Quadrature, DEFAULT_SEGMENT_ORDER, DEFAULT_TRIANGLE_ORDER};
use crate::report::{timed, CheckResult};
use crate::scalar::{u_weyl, v_weyl, weyl_commutator, GaussianSymbol, LieTrivialization, MonomialOp, QuadratureOnly, ScalarQuantizer, ScalarSymbol};
use crate::verify::finite::name_seed;

pub const LIE_GROUPS: [&str; 2] = ["R2", "H1"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MagneticConfig {
    /// Random argument tuples per geometric identity.
    pub samples: usize,
    /// Gauss–Legendre order on segments.
    pub order: usize,
    /// Order per axis of the collapsed triangle rule.
    pub triangle_order: usize,
    pub r2_grid: GridSpec,
    pub h1_grid: GridSpec,
    /// Grid for the Weyl relations on H₁; its spacing must divide 2.
    pub h1_weyl_grid: GridSpec,
    /// Fraction of L defining the interior box.
    pub interior: f64,
    /// Replaces every tolerance when set.
    pub tol: Option<f64>,
}

impl Default for MagneticConfig {
    fn default() -> Self {
        Self {
            samples: 200,
            order: DEFAULT_SEGMENT_ORDER,
            triangle_order: DEFAULT_TRIANGLE_ORDER,
            r2_grid: GridSpec { l: 8.0, n: 64 },
            h1_grid: GridSpec { l: 6.0, n: 32 },
            h1_weyl_grid: GridSpec { l: 4.0, n: 16 },
            interior: 0.5,
            tol: None,
        }
    }
}

impl MagneticConfig {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn rule(&self) -> Result<Quadrature> {
        Quadrature::new(self.order, self.triangle_order)
    }
}

pub const CONSTANT_COCYCLE_TOL: f64 = 1e-12;
pub const STOKES_TOL: f64 = 1e-12;
pub const COCYCLE_IDENTITY_TOL: f64 = 1e-8;
pub const GAUGE_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const WEYL_KERNEL_TOL: f64 = 1e-8;
pub const WEYL_RELATION_TOL: f64 = 1e-10;
/// Residuals at or below this level count as converged in refinement studies.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;
/// Quadrature order for the non-polynomial field.
pub const SMOOTH_ORDER: usize = 16;
const PLANAR_B: f64 = 0.7;

fn point(rng: &mut impl Rng, dim: usize, r: f64) -> Coords {
    (0..dim).map(|_| rng.random_range(-r..r)).collect()
}

/// Potential on ℝ² with non-constant field B = 0.7 + 0.06x² − 0.02xy.
pub fn planar_field() -> MagneticField {
    let m = Poly::monomial;
    let a = PolyOneForm::new(vec![
        m(-0.5 * PLANAR_B, [0, 1, 0, 0]).add(&m(0.01, [1, 2, 0, 0])),
        m(0.5 * PLANAR_B, [1, 0, 0, 0]).add(&m(0.02, [3, 0, 0, 0])),
    ])
    .expect("two components");
    MagneticField::from_poly("planar+cubic", a)
}

/// Gauge functions used for the covariance checks.
pub fn gauge_function(dim: usize) -> Poly {
    let m = Poly::monomial;
    match dim {
        2 => m(0.05, [2, 1, 0, 0]).add(&m(-0.02, [0, 3, 0, 0])).add(&m(0.3, [1, 0, 0, 0])),
        _ => m(0.04, [1, 1, 1, 0]).add(&m(-0.03, [1, 0, 2, 0])).add(&m(0.2, [0, 1, 0, 0])),
    }
}

/// The real Gaussian used for Hermiticity and gauge checks.
pub fn real_gaussian(dim: usize) -> GaussianSymbol {
    GaussianSymbol::new(dim, 1.0, 2.0, 1.0)
}

/// A Gaussian with a momentum shift, so its kernel is complex.
pub fn moving_gaussian(dim: usize) -> GaussianSymbol {
    let mut s = GaussianSymbol::new(dim, 1.3, 1.7, 0.9);
    s.center = (0..dim).map(|i| 0.25 * (i as f64 + 1.0)).collect();
    s.momentum = Some((0..dim).map(|i| if i % 2 == 0 { 0.6 } else { -0.4 }).collect());
    s
}

/// The Weyl kernel of a Gaussian on ℝⁿ in closed form, written out independently
/// of the amplitude routine: K(x, y) = s̃((x + y)/2, x − y).
pub fn gaussian_weyl_kernel(s: &GaussianSymbol, x: &[f64], y: &[f64]) -> C64 {
    let n = x.len();
    let mut r2 = 0.0;
    let mut z2 = 0.0;
    let mut ph = 0.0;
    for i in 0..n {
        let mid = 0.5 * (x[i] + y[i]) - s.center[i];
        let z = x[i] - y[i];
        r2 += mid * mid;
        z2 += z * z;
        ph += z * s.momentum.as_ref().map_or(0.0, |m| m[i]);
    }
    let s2 = s.sigma * s.sigma;
    let mag = s.scale * (-r2 / (2.0 * s.width * s.width)).exp() * (2.0 * std::f64::consts::PI * s2).powf(-(n as f64) / 2.0) * (-z2 / (2.0 * s2)).exp();
    C64::from_polar(mag, ph)
}

fn lie(name: &str) -> Result<NilpotentLieGroup> {
    NilpotentLieGroup::by_name(name)
}

fn field_for(name: &str) -> MagneticField {
    if name == "R2" {
        planar_field()
    } else {
        MagneticField::cubic3()
    }
}

fn max_over<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<f64> + Sync + Send) -> Result<f64> {
    items.par_iter().map(f).try_reduce(|| 0.0, |a, b| Ok(if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) }))
}

fn stokes_max(g: &NilpotentLieGroup, field: &MagneticField, rule: &Quadrature, tuples: &[[Coords; 3]]) -> Result<f64> {
    max_over(tuples, |[q, x, y]| Ok(stokes_residual(g, field.a.as_ref(), field.b.as_ref(), q, x, y, rule)?.abs()))
}

/// Circulations, fluxes and the magnetic cocycle.
pub fn geometry_suite(groups: &[&str], cfg: &MagneticConfig, seed: u64) -> Result<Vec<CheckResult>> {
    let rule = cfg.rule()?;
    let mut out = Vec::new();
    for &name in groups {
        let g = lie(name)?;
        let dim = g.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(name_seed(seed, &format!("geometry/{name}")));
        let radius = if dim == 2 { 3.0 } else { 2.0 };
        let triples: Vec<[Coords; 3]> =
            (0..cfg.samples).map(|_| [point(&mut rng, dim, radius), point(&mut rng, dim, radius), point(&mut rng, dim, radius)]).collect();
        let quads: Vec<[Coords; 4]> = (0..cfg.samples)
            .map(|_| [point(&mut rng, dim, radius), point(&mut rng, dim, radius), point(&mut rng, dim, radius), point(&mut rng, dim, radius)])
            .collect();
        let field = field_for(name);
        let id = |s: &str| format!("{name}.{s}");

        if dim == 2 {
            let constant = MagneticField::constant_planar(PLANAR_B);
            out.push(timed("magnetic", &id("constant_cocycle"), "a constant field gives γ(q; x, y) = exp(iB(x, y)/2)", cfg.tol(CONSTANT_COCYCLE_TOL), || {
                max_over(&triples, |[q, x, y]| {
                    let c = magnetic_cocycle(&g, constant.b.as_ref(), q, x, y, &rule)?;
                    let bxy = PLANAR_B * (x[0] * y[1] - x[1] * y[0]);
                    Ok((c - C64::from_polar(1.0, bxy / 2.0)).norm())
                })
            })?);
            out.push(timed("magnetic", &id("stokes.linear"), "Stokes residual for the linear potential of a constant field", cfg.tol(STOKES_TOL), || {
                stokes_max(&g, &constant, &rule, &triples)
            })?);
        }

        out.push(timed("magnetic", &id("stokes.cubic"), "Stokes residual for a cubic potential", cfg.tol(STOKES_TOL), || stokes_max(&g, &field, &rule, &triples))?);

        if dim == 3 {
            let mut residuals = Vec::new();
            for m in [4, 8, 16] {
                let r = Quadrature::uniform(m)?;
                let c = timed("magnetic", &format!("{name}.stokes.cubic.order{m:02}"), "Stokes residual for the cubic potential at this order", cfg.tol(STOKES_TOL), || {
                    stokes_max(&g, &field, &r, &triples)
                })?;
                residuals.push(c.max_defect);
                out.push(c);
            }
            // with a polynomial potential every order here is exact, so the residuals sit at roundoff
            let excess = residuals.windows(2).map(|w| (w[1] - w[0].max(ROUNDOFF_FLOOR)).max(0.0)).fold(0.0, f64::max);
            out.push(CheckResult::new(
                "magnetic",
                &id("stokes.cubic.refinement"),
                "cubic potential: residual non-increasing under 4→8→16 refinement, up to the roundoff floor",
                excess,
                ROUNDOFF_FLOOR,
            ));

            let smooth = MagneticField::smooth3();
            let wide: Vec<[Coords; 3]> = (0..cfg.samples).map(|_| [point(&mut rng, 3, 3.0), point(&mut rng, 3, 3.0), point(&mut rng, 3, 3.0)]).collect();
            let mut rs = Vec::new();
            for m in [4, 8, 16] {
                rs.push(stokes_max(&g, &smooth, &Quadrature::uniform(m)?, &wide)?);
            }
            // ratio of successive residuals; converged levels count as decreasing
            let ratio = rs.windows(2).map(|w| if w[1] <= ROUNDOFF_FLOOR { 0.0 } else { w[1] / w[0] }).fold(0.0, f64::max);
            out.push(CheckResult::new(
                "magnetic",
                &id("stokes.smooth.refinement"),
                &format!("trigonometric potential: residual strictly decreases under 4→8→16 refinement ({:.1e}, {:.1e}, {:.1e})", rs[0], rs[1], rs[2]),
                ratio,
                1.0,
            ));

            // order 8 leaves quadrature error near 1e-4 for this field; see the refinement row
            let fine = Quadrature::uniform(SMOOTH_ORDER)?;
            out.push(timed("magnetic", &id("cocycle.smooth"), "cocycle identity of γ^B for a trigonometric field, order 16 rules", cfg.tol(COCYCLE_IDENTITY_TOL), || {
                max_over(&quads, |[q, x, y, z]| cocycle_defect(&g, smooth.b.as_ref(), q, x, y, z, &fine))
            })?);
        }

        out.push(timed("magnetic", &id("cocycle.cubic"), "cocycle identity of γ^B at random argument tuples", cfg.tol(COCYCLE_IDENTITY_TOL), || {
            max_over(&quads, |[q, x, y, z]| cocycle_defect(&g, field.b.as_ref(), q, x, y, z, &rule))
        })?);

        out.push(timed("magnetic", &id("trivialization"), "the coboundary of β^A is γ^{dA}", cfg.tol(COCYCLE_IDENTITY_TOL), || {
            max_over(&triples, |[q, x, y]| {
                Ok((delta_beta(&g, field.a.as_ref(), q, x, y, &rule)? - magnetic_cocycle(&g, field.b.as_ref(), q, x, y, &rule)?).norm())
            })
        })?);
    }
    Ok(out)
}

fn grid_for(name: &str, cfg: &MagneticConfig, dim: usize) -> Result<Grid> {
    let spec = if name == "R2" { cfg.r2_grid } else { cfg.h1_grid };
    Grid::new(dim, spec.l, spec.n)
}

fn interior_points(grid: &Grid, frac: f64) -> Vec<Coords> {
    grid.interior(frac).into_iter().map(|i| grid.point(i)).collect()
}

/// Quantized operators on truncated grids.
pub fn operator_suite(groups: &[&str], cfg: &MagneticConfig, seed: u64) -> Result<Vec<CheckResult>> {
    let rule = cfg.rule()?;
    let mut out = Vec::new();
    for &name in groups {
        let g = lie(name)?;
        let dim = g.dim();
        let grid = grid_for(name, cfg, dim)?;
        let id = |s: &str| format!("{name}.{s}");
        let field = field_for(name);
        let psi = gauge_function(dim);
        let gauged = field.gauge_transform(&psi);
        let beta = LieTrivialization::magnetic(&field, rule.clone());
        let beta_g = LieTrivialization::magnetic(&gauged, rule.clone());
        let half = TauMap::Half;
        let q = ScalarQuantizer::new(&g, &grid, &beta, &half)?;
        let qg = ScalarQuantizer::new(&g, &grid, &beta_g, &half)?;
        let s = real_gaussian(dim);
        // ℝ² is scanned on the whole grid, H₁ on the interior box
        let pts: Vec<Coords> = if dim == 2 { (0..grid.len()).map(|i| grid.point(i)).collect() } else { interior_points(&grid, cfg.interior) };
        let region = if dim == 2 { "whole grid" } else { "interior half" };

        out.push(timed("magnetic_op", &id("gauge"), &format!("A → A + dψ multiplies the kernel by exp(i(ψ(y) − ψ(x))), {region}"), cfg.tol(GAUGE_TOL), || {
            max_over(&pts, |x| {
                let px = psi.eval(x);
                let mut m: f64 = 0.0;
                for y in &pts {
                    let k = q.kernel_at(&s, x, y)?;
                    let kg = qg.kernel_at(&s, x, y)?;
                    m = m.max((kg - k * C64::from_polar(1.0, psi.eval(y) - px)).norm());
                }
                Ok(m)
            })
        })?);

        out.push(timed("magnetic_op", &id("hermitian"), &format!("a real symbol with symmetric ordering gives a Hermitian kernel, {region}"), cfg.tol(HERMITIAN_TOL), || {
            let idx: Vec<usize> = (0..pts.len()).collect();
            max_over(&idx, |&i| {
                let mut m: f64 = 0.0;
                for j in i..pts.len() {
                    let a = q.kernel_at(&s, &pts[i], &pts[j])?;
                    let b = q.kernel_at(&s, &pts[j], &pts[i])?;
                    m = m.max((a - b.conj()).norm());
                }
                Ok(m)
            })
        })?);

        let zero = LieTrivialization::One;
        let q0 = ScalarQuantizer::new(&g, &grid, &zero, &half)?;
        let moving = moving_gaussian(dim);
        if g.is_abelian() {
            out.push(timed("magnetic_op", &id("weyl_kernel"), "A = 0, τ(x) = x/2: lattice kernel equals the closed-form Weyl kernel on the interior half", cfg.tol(WEYL_KERNEL_TOL), || {
                let (lo, hi) = grid.interior_range(cfg.interior);
                let k = q0.kernel_fft(&QuadratureOnly(moving.clone()), lo, hi)?;
                let idx = q0.box_indices(lo, hi);
                let pts: Vec<Coords> = idx.iter().map(|&i| grid.point(i)).collect();
                let mut m: f64 = 0.0;
                for (r, x) in pts.iter().enumerate() {
                    for (c, y) in pts.iter().enumerate() {
                        m = m.max((k[(r, c)] - gaussian_weyl_kernel(&moving, x, y)).norm());
                    }
                }
                Ok(m)
            })?);
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(name_seed(seed, &format!("operator/{name}")));
            let inner = interior_points(&grid, cfg.interior);
            let pairs: Vec<(Coords, Coords)> = (0..cfg.samples)
                .map(|_| (inner[rng.random_range(0..inner.len())].clone(), inner[rng.random_range(0..inner.len())].clone()))
                .collect();
            out.push(timed(
                "magnetic_op",
                &id("weyl_kernel_sampled"),
                "A = 0, τ(x) = x/2: dual-lattice amplitude equals the closed form at random interior pairs",
                cfg.tol(WEYL_KERNEL_TOL),
                || {
                    let numeric = QuadratureOnly(moving.clone());
                    max_over(&pairs, |(x, y)| Ok((q0.kernel_at(&numeric, x, y)? - q0.kernel_at(&moving, x, y)?).norm()))
                },
            )?);
        }
    }
    Ok(out)
}

fn defined_rows(a: &MonomialOp, b: &MonomialOp) -> Vec<usize> {
    (0..a.target.len()).filter(|&q| a.target[q].is_some() && b.target[q].is_some()).collect()
}

/// Weyl relations for β^A on an H₁ grid whose spacing divides 2, at lattice-compatible
/// elements x = (2a, 2b, c·h).
pub fn weyl_relations(cfg: &MagneticConfig, seed: u64) -> Result<Vec<CheckResult>> {
    let g = NilpotentLieGroup::heisenberg();
    let spec = cfg.h1_weyl_grid;
    let grid = Grid::new(3, spec.l, spec.n)?;
    let h = grid.spacing();
    if (2.0 / h - (2.0 / h).round()).abs() > 1e-12 {
        return Err(Error::Config(format!("Weyl relations need a spacing dividing 2, got {h}")));
    }
    let field = MagneticField::cubic3();
    let rule = cfg.rule()?;
    let beta = LieTrivialization::magnetic(&field, rule.clone());
    let half = TauMap::Half;
    let q = ScalarQuantizer::new(&g, &grid, &beta, &half)?;
    let mut rng = ChaCha8Rng::seed_from_u64(name_seed(seed, "weyl/H1"));
    let elem = |rng: &mut ChaCha8Rng| -> Coords {
        vec![2.0 * rng.random_range(-1..=1) as f64, 2.0 * rng.random_range(-1..=1) as f64, h * rng.random_range(-3..=3) as f64].into()
    };
    let covec = |rng: &mut ChaCha8Rng| -> Coords { (0..3).map(|_| rng.random_range(-1.5..1.5)).collect() };
    let trials = 6;
    let cases: Vec<(Coords, Coords, Coords, Coords)> = (0..trials).map(|_| (elem(&mut rng), elem(&mut rng), covec(&mut rng), covec(&mut rng))).collect();
    let tol = cfg.tol(WEYL_RELATION_TOL);
    let mut out = Vec::new();

    out.push(timed("weyl", "H1.uu", "U(x)U(y) = γ^B(·; x, y) U(xy) on rows where both sides are defined", tol, || {
        let mut m: f64 = 0.0;
        for (x, y, _, _) in &cases {
            let lhs = u_weyl(&q, x)?.then(&u_weyl(&q, y)?);
            let gxy: Vec<C64> = (0..grid.len())
                .map(|i| magnetic_cocycle(&g, field.b.as_ref(), &grid.point(i), x, y, &rule))
                .collect::<Result<_>>()?;
            let rhs = MonomialOp::diagonal(gxy).then(&u_weyl(&q, &g.mul(x, y))?);
            let rows = defined_rows(&lhs, &rhs);
            if rows.is_empty() {
                return Ok(f64::INFINITY);
            }
            m = m.max(lhs.defect(&rhs, &rows));
        }
        Ok(m)
    })?);

    out.push(timed("weyl", "H1.vv", "V(𝒳)V(𝒴) = V(𝒳 + 𝒴)", tol, || {
        let all: Vec<usize> = (0..grid.len()).collect();
        let mut m: f64 = 0.0;
        for (_, _, a, b) in &cases {
            let sum: Coords = a.iter().zip(b).map(|(p, r)| p + r).collect();
            m = m.max(v_weyl(&q, a)?.then(&v_weyl(&q, b)?).defect(&v_weyl(&q, &sum)?, &all));
        }
        Ok(m)
    })?);

    out.push(timed("weyl", "H1.uv", "U(x)V(𝒳) = Δ(x, 𝒳) V(𝒳)U(x)", tol, || {
        let mut m: f64 = 0.0;
        for (x, _, a, _) in &cases {
            let lhs = u_weyl(&q, x)?.then(&v_weyl(&q, a)?);
            let rhs = MonomialOp::diagonal(weyl_commutator(&g, &grid, x, a)).then(&v_weyl(&q, a)?.then(&u_weyl(&q, x)?));
            let rows = defined_rows(&lhs, &rhs);
            m = m.max(lhs.defect(&rhs, &rows));
        }
        Ok(m)
    })?);

    out.push(timed("weyl", "H1.unitary_phases", "Weyl operators carry unimodular phases", tol, || {
        let mut m: f64 = 0.0;
        for (x, _, a, _) in &cases {
            let w = crate::scalar::scalar_weyl(&q, x, a)?;
            for (t, p) in w.target.iter().zip(&w.phase) {
                if t.is_some() {
                    m = m.max((p.norm() - 1.0).abs());
                }
            }
        }
        Ok(m)
    })?);
    Ok(out)
}

/// Largest entrywise gap between two kernels; used by tests and the demo.
pub fn kernel_gap(a: &crate::dual::CMat, b: &crate::dual::CMat) -> f64 {
    max_abs(&(a - b))
}

/// The symbols used by the operator suite, for reuse in configs and demos.
pub fn suite_symbols(dim: usize) -> (Arc<dyn ScalarSymbol>, Arc<dyn ScalarSymbol>) {
    (Arc::new(real_gaussian(dim)), Arc::new(moving_gaussian(dim)))
}
