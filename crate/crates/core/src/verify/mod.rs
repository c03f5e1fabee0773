//! Verification suites. Each returns one [`CheckResult`](crate::report::CheckResult)
//! per identity with the largest defect seen.

pub mod cross;
pub mod finite;
pub mod landau;
pub mod magnetic;
pub mod symmetric;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::SuiteReport;

pub use landau::{run_landau, LandauConfig, LandauOutcome};
pub use magnetic::MagneticConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FiniteConfig {
    pub groups: Vec<String>,
    /// Random instances per group and identity.
    pub instances: usize,
    pub tol: f64,
    /// Random symbols per β in the symmetric-ordering checks.
    pub symmetric_trials: usize,
    pub cross_order: usize,
    pub cross_pairs: usize,
}

impl Default for FiniteConfig {
    fn default() -> Self {
        Self {
            groups: finite::FINITE_GROUPS.iter().map(|s| s.to_string()).collect(),
            instances: finite::DEFAULT_INSTANCES,
            tol: finite::DEFAULT_TOL,
            symmetric_trials: 8,
            cross_order: cross::CROSS_ORDER,
            cross_pairs: cross::CROSS_PAIRS,
        }
    }
}

/// Every finite-group identity, the symmetric-ordering checks and the ℤ_N cross-check.
pub fn verify_finite(cfg: &FiniteConfig, seed: u64) -> Result<SuiteReport> {
    if cfg.instances == 0 {
        return Err(Error::Config("at least one instance per identity is needed".into()));
    }
    let names: Vec<&str> = cfg.groups.iter().map(String::as_str).collect();
    let mut results = finite::finite_suite(&names, cfg.instances, seed, cfg.tol)?;
    results.extend(symmetric::symmetric_suite(&names, cfg.symmetric_trials, seed, cfg.tol)?);
    if cfg.cross_pairs > 0 {
        results.extend(cross::cross_suite(cfg.cross_order, cfg.cross_pairs, seed, cfg.tol)?);
    }
    Ok(SuiteReport::new(seed, results))
}

/// Geometry, operator and Weyl-relation checks on the selected Lie groups.
pub fn verify_magnetic(groups: &[&str], cfg: &MagneticConfig, seed: u64) -> Result<SuiteReport> {
    for g in groups {
        if !magnetic::LIE_GROUPS.contains(g) {
            return Err(Error::Config(format!("magnetic suites run on R2 and H1, not {g}")));
        }
    }
    let mut results = magnetic::geometry_suite(groups, cfg, seed)?;
    results.extend(magnetic::operator_suite(groups, cfg, seed)?);
    if groups.contains(&"H1") {
        results.extend(magnetic::weyl_relations(cfg, seed)?);
    }
    Ok(SuiteReport::new(seed, results))
}

/// Caps the global thread pool at `TWISTQUANT_THREADS` when that variable is set.
/// Later calls are no-ops.
pub fn init_threads_from_env() -> Result<Option<usize>> {
    let Ok(v) = std::env::var("TWISTQUANT_THREADS") else {
        return Ok(None);
    };
    let n: usize = v.trim().parse().map_err(|_| Error::Config(format!("TWISTQUANT_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Error::Config("TWISTQUANT_THREADS must be positive".into()));
    }
    // fails only if the pool is already built
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}
