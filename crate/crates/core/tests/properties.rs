//! Randomized invariants. Structured data (cochains, symbols) is drawn from a
//! proptest-chosen seed; scalar inputs are drawn by proptest directly.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistquant::cohomology::{coboundary, gauge_between, trivialize, Cochain};
use twistquant::dual::{fourier, inverse_fourier, max_abs, UnitaryDual, C64};
use twistquant::fields::{MagneticField, PolyOneForm};
use twistquant::geometry::{magnetic_cocycle, stokes_residual};
use twistquant::group::{FiniteGroup, FiniteTau, NilpotentLieGroup};
use twistquant::opcalc::{compose_symbols, op, symbol_of, OpSymbol};
use twistquant::quadrature::GaussLegendre;
use twistquant::random_c64;

const GROUPS: [&str; 7] = ["Z2", "Z3", "Z5", "Z6", "S3", "D4", "Q8"];

fn setup(gi: usize) -> (FiniteGroup, UnitaryDual) {
    let g = FiniteGroup::by_name(GROUPS[gi]).unwrap();
    let d = UnitaryDual::shipped(&g).unwrap();
    (g, d)
}

fn random_tau(g: &FiniteGroup, rng: &mut ChaCha8Rng) -> FiniteTau {
    use rand::Rng;
    FiniteTau(g.elements().map(|_| rng.random_range(0..g.order())).collect())
}

fn unit_gap(c: &Cochain) -> f64 {
    c.values().iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plancherel_and_inversion(gi in 0..GROUPS.len(), seed in any::<u64>()) {
        let (g, dual) = setup(gi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<C64> = g.elements().map(|_| random_c64(&mut rng)).collect();
        let uh = fourier(&g, &dual, &u).unwrap();
        let l2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((uh.norm_sqr(&dual) - l2).abs() < 1e-12 * l2.max(1.0));
        let back = inverse_fourier(&g, &dual, &uh).unwrap();
        prop_assert!(back.iter().zip(&u).all(|(a, b)| (a - b).norm() < 1e-13));
    }

    #[test]
    fn coboundary_squares_to_one(gi in 0..GROUPS.len(), degree in 0usize..3, seed in any::<u64>()) {
        let (g, _) = setup(gi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nu = Cochain::random(&g, degree, &mut rng);
        let dd = coboundary(&g, &coboundary(&g, &nu).unwrap()).unwrap();
        prop_assert!(unit_gap(&dd) < 1e-13);
    }

    #[test]
    fn trivialization_inverts_the_coboundary(gi in 0..GROUPS.len(), seed in any::<u64>()) {
        let (g, _) = setup(gi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gamma = coboundary(&g, &Cochain::random(&g, 1, &mut rng)).unwrap();
        let beta = trivialize(&g, &gamma).unwrap();
        prop_assert!(coboundary(&g, &beta).unwrap().distance(&gamma).unwrap() < 1e-13);
    }

    #[test]
    fn gauge_between_recovers_the_gauge(gi in 0..GROUPS.len(), seed in any::<u64>()) {
        let (g, _) = setup(gi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b1 = Cochain::random(&g, 1, &mut rng);
        let a = Cochain::random(&g, 0, &mut rng);
        let b2 = coboundary(&g, &a).unwrap().mul(&b1).unwrap();
        let found = gauge_between(&g, &b1, &b2).unwrap();
        let rebuilt = coboundary(&g, &found).unwrap().mul(&b1).unwrap();
        prop_assert!(rebuilt.distance(&b2).unwrap() < 1e-13);
        // unique up to a constant phase
        let ratio: Vec<C64> = found.values().iter().zip(a.values()).map(|(f, a)| f / a).collect();
        prop_assert!(ratio.iter().all(|r| (r - ratio[0]).norm() < 1e-12));
    }

    #[test]
    fn quantization_is_invertible_and_multiplicative(gi in 0..GROUPS.len(), seed in any::<u64>()) {
        let (g, dual) = setup(gi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta = Cochain::random(&g, 1, &mut rng);
        let tau = random_tau(&g, &mut rng);
        let f = OpSymbol::random(&g, &dual, &mut rng);
        let h = OpSymbol::random(&g, &dual, &mut rng);
        let of = op(&g, &dual, &f, &beta, &tau).unwrap();
        prop_assert!(symbol_of(&g, &dual, &of, &beta, &tau).unwrap().distance(&f) < 1e-12);
        let fh = compose_symbols(&g, &dual, &f, &h, &beta, &tau).unwrap();
        let gap = max_abs(&(op(&g, &dual, &fh, &beta, &tau).unwrap() - of * op(&g, &dual, &h, &beta, &tau).unwrap()));
        prop_assert!(gap < 1e-12);
    }

    #[test]
    fn heisenberg_group_laws(
        x in prop::array::uniform3(-3.0f64..3.0),
        y in prop::array::uniform3(-3.0f64..3.0),
        z in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let g = NilpotentLieGroup::heisenberg();
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(p, q)| (p - q).abs() < 1e-12);
        prop_assert!(close(&g.mul(&g.mul(&x, &y), &z), &g.mul(&x, &g.mul(&y, &z))));
        prop_assert!(close(&g.mul(&x, &g.inv(&x)), &g.identity()));
        prop_assert!(close(&g.left_div(&x, &g.mul(&x, &y)), &y));
        // central extension of ℝ²: the first two coordinates add
        let xy = g.mul(&x, &y);
        prop_assert!((xy[0] - x[0] - y[0]).abs() < 1e-12 && (xy[1] - x[1] - y[1]).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials(m in 1usize..12, coeffs in prop::collection::vec(-2.0f64..2.0, 1..24)) {
        let rule = GaussLegendre::new(m).unwrap();
        let deg = coeffs.len().min(2 * m) ;
        let c = &coeffs[..deg];
        let exact: f64 = c.iter().enumerate().map(|(k, a)| a / (k as f64 + 1.0)).sum();
        let got = rule.integrate(|t| c.iter().rev().fold(0.0, |acc, a| acc * t + a));
        prop_assert!((got - exact).abs() < 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn constant_field_cocycle_is_the_half_area(
        b in -2.0f64..2.0,
        q in prop::array::uniform2(-4.0f64..4.0),
        x in prop::array::uniform2(-4.0f64..4.0),
        y in prop::array::uniform2(-4.0f64..4.0),
    ) {
        let g = NilpotentLieGroup::abelian(2);
        let field = MagneticField::constant_planar(b);
        let rule = Default::default();
        let c = magnetic_cocycle(&g, field.b.as_ref(), &q, &x, &y, &rule).unwrap();
        let area = b * (x[0] * y[1] - x[1] * y[0]);
        prop_assert!((c - C64::from_polar(1.0, area / 2.0)).norm() < 1e-12);
        prop_assert!(stokes_residual(&g, field.a.as_ref(), field.b.as_ref(), &q, &x, &y, &rule).unwrap().abs() < 1e-12);
    }

    #[test]
    fn stokes_holds_for_random_linear_potentials_on_h1(
        b0 in prop::array::uniform3(-1.0f64..1.0),
        q in prop::array::uniform3(-2.0f64..2.0),
        x in prop::array::uniform3(-2.0f64..2.0),
        y in prop::array::uniform3(-2.0f64..2.0),
    ) {
        let g = NilpotentLieGroup::heisenberg();
        // antisymmetric B₀ from three entries
        let m = [0.0, b0[0], b0[1], -b0[0], 0.0, b0[2], -b0[1], -b0[2], 0.0];
        let a = PolyOneForm::linear_potential(&m, &[0.3, -0.2, 0.1]).unwrap();
        let field = MagneticField::from_poly("linear", a);
        let r = stokes_residual(&g, field.a.as_ref(), field.b.as_ref(), &q, &x, &y, &Default::default()).unwrap();
        prop_assert!(r.abs() < 1e-12);
    }
}
