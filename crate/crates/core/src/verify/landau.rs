//! Constant magnetic field on the plane: the Landau setting, where the twisted
//! translations form a projective representation with phase e^{iB(x, y)/2}.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{CMat, C64};
use crate::error::{Error, Result};
use crate::fields::{MagneticField, Poly};
use crate::grid::{Grid, GridSpec};
use crate::group::{Coords, NilpotentLieGroup, TauMap};
use crate::report::{timed, SuiteReport};
use crate::scalar::{u_weyl, LieTrivialization, MonomialOp, ScalarQuantizer};
use crate::verify::finite::name_seed;
use crate::verify::magnetic::{real_gaussian, GAUGE_TOL, HERMITIAN_TOL, WEYL_RELATION_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LandauConfig {
    /// Field strength.
    pub b: f64,
    pub grid: GridSpec,
    pub order: usize,
    /// Random lattice pairs for the translation relations.
    pub pairs: usize,
}

impl Default for LandauConfig {
    fn default() -> Self {
        Self { b: 1.0, grid: GridSpec { l: 6.0, n: 24 }, order: 8, pairs: 12 }
    }
}

pub struct LandauOutcome {
    pub report: SuiteReport,
    pub grid: Grid,
    /// Kernel of the quantized real Gaussian in the symmetric gauge, grid-indexed.
    pub kernel: CMat,
}

fn rows_defined(a: &MonomialOp, b: &MonomialOp) -> Vec<usize> {
    (0..a.target.len()).filter(|&i| a.target[i].is_some() && b.target[i].is_some()).collect()
}

pub fn run_landau(cfg: &LandauConfig, seed: u64) -> Result<LandauOutcome> {
    if !cfg.b.is_finite() {
        return Err(Error::Config("field strength must be finite".into()));
    }
    let g = NilpotentLieGroup::abelian(2);
    let grid = Grid::new(2, cfg.grid.l, cfg.grid.n)?;
    let h = grid.spacing();
    let rule = crate::quadrature::Quadrature::new(cfg.order, crate::quadrature::DEFAULT_TRIANGLE_ORDER)?;
    let symmetric = MagneticField::constant_planar(cfg.b);
    // A_sym + dψ = (−b y, 0), the Landau gauge
    let psi = Poly::monomial(-0.5 * cfg.b, [1, 1, 0, 0]);
    let landau = symmetric.gauge_transform(&psi);
    let beta = LieTrivialization::magnetic(&symmetric, rule.clone());
    let beta_l = LieTrivialization::magnetic(&landau, rule);
    let half = TauMap::Half;
    let q = ScalarQuantizer::new(&g, &grid, &beta, &half)?;
    let ql = ScalarQuantizer::new(&g, &grid, &beta_l, &half)?;
    let s = real_gaussian(2);
    let all: Vec<usize> = (0..grid.len()).collect();
    let kernel = q.kernel(&s, &all, &all)?;
    let kernel_l = ql.kernel(&s, &all, &all)?;

    let mut out = Vec::new();
    out.push(timed("landau", "hermitian", "real symbol, τ(x) = x/2: K(x, y) = conj K(y, x) on the whole grid", HERMITIAN_TOL, || {
        Ok(crate::dual::max_abs(&(&kernel - kernel.adjoint())))
    })?);
    out.push(timed("landau", "gauge", "symmetric to Landau gauge: K' = e^{i(ψ(y) − ψ(x))} K on the whole grid", GAUGE_TOL, || {
        let mut m: f64 = 0.0;
        for i in 0..grid.len() {
            let px = psi.eval(&grid.point(i));
            for j in 0..grid.len() {
                let ph = C64::from_polar(1.0, psi.eval(&grid.point(j)) - px);
                m = m.max((kernel_l[(i, j)] - kernel[(i, j)] * ph).norm());
            }
        }
        Ok(m)
    })?);

    let mut rng = ChaCha8Rng::seed_from_u64(name_seed(seed, "landau"));
    let span = (grid.per_axis() / 4) as i64;
    let mut elem = || -> Coords { (0..2).map(|_| h * rng.random_range(-span..=span) as f64).collect() };
    let pairs: Vec<(Coords, Coords)> = (0..cfg.pairs.max(1)).map(|_| (elem(), elem())).collect();
    let area = |x: &[f64], y: &[f64]| cfg.b * (x[0] * y[1] - x[1] * y[0]);

    out.push(timed("landau", "translations", "U(x)U(y) = e^{iB(x, y)/2} U(x + y) for lattice x, y", WEYL_RELATION_TOL, || {
        let mut m: f64 = 0.0;
        for (x, y) in &pairs {
            let lhs = u_weyl(&q, x)?.then(&u_weyl(&q, y)?);
            let xy: Coords = x.iter().zip(y.iter()).map(|(a, b)| a + b).collect();
            let mut rhs = u_weyl(&q, &xy)?;
            let c = C64::from_polar(1.0, area(x, y) / 2.0);
            rhs.phase.iter_mut().for_each(|p| *p *= c);
            m = m.max(lhs.defect(&rhs, &rows_defined(&lhs, &rhs)));
        }
        Ok(m)
    })?);
    out.push(timed("landau", "commutator", "U(x)U(y) = e^{iB(x, y)} U(y)U(x) for lattice x, y", WEYL_RELATION_TOL, || {
        let mut m: f64 = 0.0;
        for (x, y) in &pairs {
            let lhs = u_weyl(&q, x)?.then(&u_weyl(&q, y)?);
            let mut rhs = u_weyl(&q, y)?.then(&u_weyl(&q, x)?);
            let c = C64::from_polar(1.0, area(x, y));
            rhs.phase.iter_mut().for_each(|p| *p *= c);
            m = m.max(lhs.defect(&rhs, &rows_defined(&lhs, &rhs)));
        }
        Ok(m)
    })?);

    Ok(LandauOutcome { report: SuiteReport::new(seed, out), grid, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_landau_run_passes() {
        let cfg = LandauConfig { grid: GridSpec { l: 3.0, n: 12 }, pairs: 4, ..Default::default() };
        let o = run_landau(&cfg, 5).unwrap();
        assert!(o.report.all_pass(), "{}", o.report.summary());
        assert_eq!(o.kernel.nrows(), 144);
    }

    #[test]
    fn wrong_phase_is_detected() {
        // a field of strength 1 checked against relations for strength 2 must fail
        let g = NilpotentLieGroup::abelian(2);
        let grid = Grid::new(2, 3.0, 12).unwrap();
        let f = MagneticField::constant_planar(1.0);
        let beta = LieTrivialization::magnetic(&f, Default::default());
        let q = ScalarQuantizer::new(&g, &grid, &beta, &TauMap::Half).unwrap();
        let (x, y) = (vec![0.5, 0.0], vec![0.0, 0.5]);
        let lhs = u_weyl(&q, &x).unwrap().then(&u_weyl(&q, &y).unwrap());
        let mut rhs = u_weyl(&q, &[0.5, 0.5]).unwrap();
        rhs.phase.iter_mut().for_each(|p| *p *= C64::from_polar(1.0, 2.0 * 0.25 / 2.0));
        assert!(lhs.defect(&rhs, &rows_defined(&lhs, &rhs)) > 1e-2);
    }
}
