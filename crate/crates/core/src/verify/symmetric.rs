//! Symmetric ordering maps on finite groups and the blockwise-adjoint identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::Cochain;
use crate::dual::{UnitaryDual, C64};
use crate::error::Result;
use crate::group::{symmetric_search, FiniteGroup, FiniteTau, TauMap, SYMMETRIC_SEARCH_CAP};
use crate::opcalc::symmetric_check;
use crate::report::CheckResult;
use crate::verify::finite::name_seed;

/// Gap below which a counterexample would be indistinguishable from roundoff.
pub const COUNTEREXAMPLE_THRESHOLD: f64 = 1e-3;

/// A normalized 1-cochain with γ(q; z, z⁻¹) = 1: β(q; z) is free on one element of
/// each pair {z, z⁻¹} and β(p; z⁻¹) = conj β(zp; z) on the other. For z = z⁻¹ the
/// same relation ties β(zq; z) to β(q; z).
pub fn inverse_compatible_beta(g: &FiniteGroup, rng: &mut impl Rng) -> Result<Cochain> {
    let n = g.order();
    let e = g.identity();
    let mut table = vec![C64::new(0.0, 0.0); n * n];
    let mut done = vec![false; n];
    for z in g.elements() {
        if done[z] {
            continue;
        }
        let zi = g.inv(z);
        done[z] = true;
        done[zi] = true;
        if z == e {
            for q in g.elements() {
                table[q * n + z] = C64::new(1.0, 0.0);
            }
            continue;
        }
        for q in g.elements() {
            table[q * n + z] = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        }
        if zi == z {
            // q ↦ zq pairs the points without fixed points
            for q in g.elements() {
                if q < g.mul(z, q) {
                    table[g.mul(z, q) * n + z] = table[q * n + z].conj();
                }
            }
        } else {
            for p in g.elements() {
                table[p * n + zi] = table[g.mul(z, p) * n + z].conj();
            }
        }
    }
    Cochain::new(g, 1, table)
}

pub fn symmetric_suite(groups: &[&str], trials: usize, seed: u64, tol: f64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for name in groups {
        let g = FiniteGroup::by_name(name)?;
        let dual = UnitaryDual::shipped(&g)?;
        let mut rng = ChaCha8Rng::seed_from_u64(name_seed(seed, &format!("symmetric/{name}")));
        let found = symmetric_search(&g, SYMMETRIC_SEARCH_CAP)?;
        let Some(TauMap::Table(t)) = found else {
            let involution = g.elements().any(|x| x != g.identity() && g.inv(x) == x);
            // absence is only consistent when an element of order two exists
            out.push(CheckResult::new(
                "symmetric",
                &format!("{name}.search"),
                "no map with τ(x) = x·τ(x⁻¹) exists",
                if involution { 0.0 } else { 1.0 },
                0.5,
            ));
            continue;
        };
        let tau = FiniteTau(t.clone());
        let violations = g.elements().filter(|&x| tau.at(x) != g.mul(x, tau.at(g.inv(x)))).count();
        out.push(CheckResult::new(
            "symmetric",
            &format!("{name}.search"),
            &format!("symmetric map found, τ = {t:?}"),
            violations as f64,
            0.5,
        ));

        let mut defect: f64 = 0.0;
        for beta in [Cochain::one(&g, 1), inverse_compatible_beta(&g, &mut rng)?, inverse_compatible_beta(&g, &mut rng)?] {
            let rep = symmetric_check(&g, &dual, &beta, &tau, trials, &mut rng)?;
            defect = defect.max(rep.adjoint_defect).max(rep.gamma_inverse_defect);
        }
        out.push(CheckResult::new(
            "symmetric",
            &format!("{name}.adjoint"),
            "blockwise adjoint quantizes to the operator adjoint when τ is symmetric and γ(z, z⁻¹) = 1",
            defect,
            tol,
        ));

        let generic = Cochain::random(&g, 1, &mut rng);
        let rep = symmetric_check(&g, &dual, &generic, &tau, trials, &mut rng)?;
        out.push(CheckResult::witness(
            "symmetric",
            &format!("{name}.counterexample"),
            "a generic β breaks the adjoint identity",
            rep.adjoint_defect,
            COUNTEREXAMPLE_THRESHOLD,
        ));
    }
    Ok(out)
}
