//! The operator-valued calculus on ℤ_N against the scalar calculus built on the DFT.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cohomology::Cochain;
use crate::cyclic::{CyclicCalculus, CyclicSymbol};
use crate::dual::{max_abs, CMat, UnitaryDual};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::opcalc::{compose_symbols, involute_symbol, op, OpSymbol};
use crate::report::CheckResult;
use crate::verify::finite::{name_seed, random_tau, Acc};

pub const CROSS_ORDER: usize = 8;
pub const CROSS_PAIRS: usize = 10;

fn to_op(g: &FiniteGroup, dual: &UnitaryDual, s: &CyclicSymbol) -> OpSymbol {
    OpSymbol::from_fn(g, dual, |x, k| CMat::from_element(1, 1, s.get(x, k)))
}

fn gap(a: &OpSymbol, s: &CyclicSymbol) -> f64 {
    let n = s.n;
    (0..n).flat_map(|x| (0..n).map(move |k| (x, k))).map(|(x, k)| (a.block(x, k)[(0, 0)] - s.get(x, k)).norm()).fold(0.0, f64::max)
}

pub fn cross_suite(n: usize, pairs: usize, seed: u64, tol: f64) -> Result<Vec<CheckResult>> {
    let g = FiniteGroup::cyclic(n);
    let dual = UnitaryDual::shipped(&g)?;
    if dual.dims().iter().any(|&d| d != 1) {
        return Err(Error::InvalidDual("the cyclic dual must consist of characters".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(name_seed(seed, &format!("cross/Z{n}")));
    let mut acc = Acc::default();
    for _ in 0..pairs {
        let beta = Cochain::random(&g, 1, &mut rng);
        let tau = random_tau(&g, &mut rng);
        let calc = CyclicCalculus::new(n, beta.values().to_vec(), tau.0.clone())?;
        let r = CyclicSymbol::random(n, &mut rng);
        let s = CyclicSymbol::random(n, &mut rng);
        let (ro, so) = (to_op(&g, &dual, &r), to_op(&g, &dual, &s));
        acc.run("kernel", "both calculi give the same operator", || Ok(max_abs(&(op(&g, &dual, &ro, &beta, &tau)? - calc.kernel(&r)))))?;
        acc.run("product", "both calculi give the same composition product", || {
            Ok(gap(&compose_symbols(&g, &dual, &ro, &so, &beta, &tau)?, &calc.compose(&r, &s)))
        })?;
        acc.run("involution", "both calculi give the same involution", || Ok(gap(&involute_symbol(&g, &dual, &ro, &beta, &tau)?, &calc.involution(&r))))?;
    }
    Ok(acc.finish("cross", &format!("Z{n}."), tol))
}
