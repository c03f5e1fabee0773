//! Segments and triangles in exponential coordinates, circulations of one-forms,
//! fluxes of two-forms, and the magnetic cochains built from them.

use crate::dual::C64;
use crate::error::{Error, Result};
use crate::fields::{OneForm, TwoForm};
use crate::group::{Coords, NilpotentLieGroup};
use crate::quadrature::Quadrature;

/// [x, y]_s = exp[(1 − s) log x + s log y]
pub fn segment(g: &NilpotentLieGroup, x: &[f64], y: &[f64], s: f64) -> Coords {
    let (lx, ly) = (g.log(x), g.log(y));
    g.exp(&lx.iter().zip(&ly).map(|(a, b)| (1.0 - s) * a + s * b).collect::<Coords>())
}

/// ⟨x, y, z⟩_{t,s} = exp[log x + t(log y − log x) + s(log z − log y)]
pub fn triangle(g: &NilpotentLieGroup, x: &[f64], y: &[f64], z: &[f64], t: f64, s: f64) -> Coords {
    let (lx, ly, lz) = (g.log(x), g.log(y), g.log(z));
    g.exp(&(0..lx.len()).map(|i| lx[i] + t * (ly[i] - lx[i]) + s * (lz[i] - ly[i])).collect::<Coords>())
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

/// Γ^A[[x, y]] = ∫₀¹ ⟨log y − log x | A([x, y]_s)⟩ ds
pub fn circulation(g: &NilpotentLieGroup, a: &dyn OneForm, x: &[f64], y: &[f64], rule: &Quadrature) -> Result<f64> {
    let (lx, ly) = (g.log(x), g.log(y));
    let d: Coords = ly.iter().zip(&lx).map(|(b, a)| b - a).collect();
    let mut p: Coords = lx.clone();
    let v = rule.segment.integrate(|s| {
        for i in 0..p.len() {
            p[i] = lx[i] + s * d[i];
        }
        a.eval(&p).iter().zip(&d).map(|(ai, di)| ai * di).sum()
    });
    finite(v, "circulation")
}

/// Γ^B⟨⟨x, y, z⟩⟩ = ∫₀¹dt ∫₀ᵗds B(⟨x,y,z⟩_{t,s})(log x − log y, log x − log z)
pub fn flux(g: &NilpotentLieGroup, b: &dyn TwoForm, x: &[f64], y: &[f64], z: &[f64], rule: &Quadrature) -> Result<f64> {
    let (lx, ly, lz) = (g.log(x), g.log(y), g.log(z));
    let n = lx.len();
    let u: Coords = (0..n).map(|i| lx[i] - ly[i]).collect();
    let w: Coords = (0..n).map(|i| lx[i] - lz[i]).collect();
    let mut p: Coords = lx.clone();
    let v = rule.triangle.integrate(|t, s| {
        for i in 0..n {
            p[i] = lx[i] + t * (ly[i] - lx[i]) + s * (lz[i] - ly[i]);
        }
        b.pair(&p, &u, &w)
    });
    finite(v, "flux")
}

/// The three corners q, x⁻¹q, y⁻¹x⁻¹q.
fn corners(g: &NilpotentLieGroup, q: &[f64], x: &[f64], y: &[f64]) -> (Coords, Coords) {
    let xq = g.left_div(x, q);
    let yxq = g.left_div(y, &xq);
    (xq, yxq)
}

/// γ^B(q; x, y) = exp(i Γ^B⟨⟨q, x⁻¹q, y⁻¹x⁻¹q⟩⟩)
pub fn magnetic_cocycle(g: &NilpotentLieGroup, b: &dyn TwoForm, q: &[f64], x: &[f64], y: &[f64], rule: &Quadrature) -> Result<C64> {
    let (xq, yxq) = corners(g, q, x, y);
    Ok(C64::from_polar(1.0, flux(g, b, q, &xq, &yxq, rule)?))
}

/// β^A(q; x) = exp(i Γ^A[[q, x⁻¹q]])
pub fn magnetic_trivialization(g: &NilpotentLieGroup, a: &dyn OneForm, q: &[f64], x: &[f64], rule: &Quadrature) -> Result<C64> {
    let xq = g.left_div(x, q);
    Ok(C64::from_polar(1.0, circulation(g, a, q, &xq, rule)?))
}

/// Flux through the triangle (q, x⁻¹q, y⁻¹x⁻¹q) minus the circulation around its
/// boundary, traversed q → x⁻¹q → y⁻¹x⁻¹q → q. Vanishes when B = dA.
pub fn stokes_residual(
    g: &NilpotentLieGroup,
    a: &dyn OneForm,
    b: &dyn TwoForm,
    q: &[f64],
    x: &[f64],
    y: &[f64],
    rule: &Quadrature,
) -> Result<f64> {
    let (xq, yxq) = corners(g, q, x, y);
    let fl = flux(g, b, q, &xq, &yxq, rule)?;
    let boundary = circulation(g, a, q, &xq, rule)? + circulation(g, a, &xq, &yxq, rule)? - circulation(g, a, q, &yxq, rule)?;
    Ok(fl - boundary)
}

/// δ¹(β^A)(q; x, y) = β^A(x⁻¹q; y) β^A(q; x) β^A(q; xy)⁻¹
pub fn delta_beta(g: &NilpotentLieGroup, a: &dyn OneForm, q: &[f64], x: &[f64], y: &[f64], rule: &Quadrature) -> Result<C64> {
    let xq = g.left_div(x, q);
    Ok(magnetic_trivialization(g, a, &xq, y, rule)?
        * magnetic_trivialization(g, a, q, x, rule)?
        * magnetic_trivialization(g, a, q, &g.mul(x, y), rule)?.conj())
}

/// |δ²γ^B − 1| at (q; x, y, z), i.e. the defect of
/// γ(x⁻¹q; y, z) γ(q; x, yz) = γ(q; x, y) γ(q; xy, z).
pub fn cocycle_defect(g: &NilpotentLieGroup, b: &dyn TwoForm, q: &[f64], x: &[f64], y: &[f64], z: &[f64], rule: &Quadrature) -> Result<f64> {
    let xq = g.left_div(x, q);
    let lhs = magnetic_cocycle(g, b, &xq, y, z, rule)? * magnetic_cocycle(g, b, q, x, &g.mul(y, z), rule)?;
    let rhs = magnetic_cocycle(g, b, q, x, y, rule)? * magnetic_cocycle(g, b, q, &g.mul(x, y), z, rule)?;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{MagneticField, PolyTwoForm};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_point(rng: &mut impl Rng, n: usize, r: f64) -> Coords {
        (0..n).map(|_| rng.random_range(-r..r)).collect()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn segment_endpoints_and_reversal() {
        let g = NilpotentLieGroup::heisenberg();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (x, y) = (rand_point(&mut rng, 3, 2.0), rand_point(&mut rng, 3, 2.0));
        assert!(close(&segment(&g, &x, &y, 0.0), &x, 1e-15));
        assert!(close(&segment(&g, &x, &y, 1.0), &y, 1e-15));
        assert!(close(&segment(&g, &x, &x, 0.37), &x, 1e-15));
        assert!(close(&segment(&g, &y, &x, 0.3), &segment(&g, &x, &y, 0.7), 1e-15));
    }

    #[test]
    fn segments_from_identity_are_one_parameter_subgroups() {
        let g = NilpotentLieGroup::heisenberg();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = g.identity();
        for _ in 0..20 {
            let y = rand_point(&mut rng, 3, 2.0);
            let (s, t) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let lhs = segment(&g, &e, &y, s + t);
            let rhs = g.mul(&segment(&g, &e, &y, s), &segment(&g, &e, &y, t));
            assert!(close(&lhs, &rhs, 1e-13));
        }
    }

    #[test]
    fn planar_midpoint_and_triangle() {
        let g = NilpotentLieGroup::abelian(2);
        assert!(close(&segment(&g, &[0.0, 2.0], &[4.0, -2.0], 0.5), &[2.0, 0.0], 1e-15));
        let p = triangle(&g, &[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], 0.5, 0.25);
        assert!(close(&p, &[0.5, 0.25], 1e-15));
    }

    #[test]
    fn triangle_corners_and_diagonal() {
        let g = NilpotentLieGroup::heisenberg();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (x, y, z) = (rand_point(&mut rng, 3, 2.0), rand_point(&mut rng, 3, 2.0), rand_point(&mut rng, 3, 2.0));
        assert!(close(&triangle(&g, &x, &y, &z, 0.0, 0.0), &x, 1e-15));
        assert!(close(&triangle(&g, &x, &y, &z, 1.0, 0.0), &y, 1e-15));
        assert!(close(&triangle(&g, &x, &y, &z, 1.0, 1.0), &z, 1e-15));
        let t = 0.41;
        assert!(close(&triangle(&g, &x, &y, &z, t, t), &segment(&g, &x, &z, t), 1e-15));
    }

    #[test]
    fn circulation_identities() {
        let g = NilpotentLieGroup::heisenberg();
        let rule = Quadrature::default();
        let f = MagneticField::cubic3();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (x, y) = (rand_point(&mut rng, 3, 2.0), rand_point(&mut rng, 3, 2.0));
        assert_eq!(circulation(&g, f.a.as_ref(), &x, &x, &rule).unwrap(), 0.0);
        let fwd = circulation(&g, f.a.as_ref(), &x, &y, &rule).unwrap();
        let back = circulation(&g, f.a.as_ref(), &y, &x, &rule).unwrap();
        assert_abs_diff_eq!(fwd, -back, epsilon = 1e-13);
        // constant A: ⟨log y − log x | A⟩
        let a = crate::fields::PolyOneForm::new(vec![
            crate::fields::Poly::constant(0.5),
            crate::fields::Poly::constant(-1.0),
            crate::fields::Poly::constant(2.0),
        ])
        .unwrap();
        let v = circulation(&g, &a, &x, &y, &Quadrature::uniform(1).unwrap()).unwrap();
        assert_abs_diff_eq!(v, 0.5 * (y[0] - x[0]) - (y[1] - x[1]) + 2.0 * (y[2] - x[2]), epsilon = 1e-14);
    }

    #[test]
    fn constant_flux_is_half_the_pairing() {
        let g = NilpotentLieGroup::heisenberg();
        let b0 = [0.0, 0.8, -0.3, -0.8, 0.0, 1.1, 0.3, -1.1, 0.0];
        let b = PolyTwoForm::constant(&b0, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (x, y, z) = (rand_point(&mut rng, 3, 2.0), rand_point(&mut rng, 3, 2.0), rand_point(&mut rng, 3, 2.0));
        let u: Vec<f64> = (0..3).map(|i| x[i] - y[i]).collect();
        let w: Vec<f64> = (0..3).map(|i| x[i] - z[i]).collect();
        let expected = 0.5 * b.pair(&x, &u, &w);
        assert_abs_diff_eq!(flux(&g, &b, &x, &y, &z, &Quadrature::uniform(1).unwrap()).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(flux(&g, &b, &x, &y, &y, &Quadrature::default()).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn planar_constant_field_cocycle() {
        let g = NilpotentLieGroup::abelian(2);
        let f = MagneticField::constant_planar(0.9);
        let rule = Quadrature::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let (q, x, y) = (rand_point(&mut rng, 2, 3.0), rand_point(&mut rng, 2, 3.0), rand_point(&mut rng, 2, 3.0));
            let c = magnetic_cocycle(&g, f.b.as_ref(), &q, &x, &y, &rule).unwrap();
            let bxy = 0.9 * (x[0] * y[1] - x[1] * y[0]);
            assert!((c - C64::from_polar(1.0, bxy / 2.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn cocycle_normalization() {
        let g = NilpotentLieGroup::heisenberg();
        let f = MagneticField::cubic3();
        let rule = Quadrature::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = g.identity();
        let (q, x) = (rand_point(&mut rng, 3, 2.0), rand_point(&mut rng, 3, 2.0));
        let one = C64::new(1.0, 0.0);
        assert!((magnetic_cocycle(&g, f.b.as_ref(), &q, &x, &e, &rule).unwrap() - one).norm() < 1e-15);
        assert!((magnetic_cocycle(&g, f.b.as_ref(), &q, &e, &x, &rule).unwrap() - one).norm() < 1e-15);
        assert!((magnetic_cocycle(&g, f.b.as_ref(), &q, &x, &g.inv(&x), &rule).unwrap() - one).norm() < 1e-13);
        assert_eq!(magnetic_trivialization(&g, f.a.as_ref(), &q, &e, &rule).unwrap(), one);
    }

    #[test]
    fn pure_gauge_trivialization() {
        let g = NilpotentLieGroup::heisenberg();
        let psi = crate::fields::Poly::monomial(0.3, [1, 1, 0, 0]).add(&crate::fields::Poly::monomial(-0.1, [0, 0, 2, 0]));
        let a = crate::fields::PolyOneForm::gradient(&psi, 3);
        let rule = Quadrature::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let (q, x) = (rand_point(&mut rng, 3, 2.0), rand_point(&mut rng, 3, 2.0));
            let xq = g.left_div(&x, &q);
            let expected = C64::from_polar(1.0, psi.eval(&xq) - psi.eval(&q));
            assert!((magnetic_trivialization(&g, &a, &q, &x, &rule).unwrap() - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn stokes_for_linear_potential_on_the_plane() {
        let g = NilpotentLieGroup::abelian(2);
        let f = MagneticField::constant_planar(1.7);
        let rule = Quadrature::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let (q, x, y) = (rand_point(&mut rng, 2, 3.0), rand_point(&mut rng, 2, 3.0), rand_point(&mut rng, 2, 3.0));
            let r = stokes_residual(&g, f.a.as_ref(), f.b.as_ref(), &q, &x, &y, &rule).unwrap();
            assert!(r.abs() < 1e-12, "{r}");
        }
        let z = MagneticField::zero(2);
        assert_eq!(stokes_residual(&g, z.a.as_ref(), z.b.as_ref(), &[1.0, 2.0], &[0.5, 0.1], &[-1.0, 0.3], &rule).unwrap(), 0.0);
    }
}
