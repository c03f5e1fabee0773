//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! verdicts are always printed; exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twistquant::cohomology::Cochain;
use twistquant::dual::{UnitaryDual, C64};
use twistquant::group::{symmetric_search, FiniteGroup, FiniteTau, TauMap};
use twistquant::opcalc::symmetric_check;
use twistquant::report::CheckResult;
use twistquant::verify::{cross, finite, magnetic, MagneticConfig};

const SEED: u64 = 20240917;

const FINITE_TOL: f64 = 1e-12;
const FINITE_INSTANCES: usize = 24;
const FINITE_BUDGET: Duration = Duration::from_secs(60);

const SYMMETRIC_TOL: f64 = 1e-12;
const WITNESS_THRESHOLD: f64 = 1e-3;

const CONSTANT_COCYCLE_TOL: f64 = 1e-12;
const STOKES_TOL: f64 = 1e-12;
const COCYCLE_TOL: f64 = 1e-8;
const ROUNDOFF_FLOOR: f64 = 1e-13;
const GEOMETRY_SAMPLES: usize = 200;
const GEOMETRY_BUDGET: Duration = Duration::from_secs(120);

const GAUGE_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const WEYL_KERNEL_TOL: f64 = 1e-8;
const OPERATOR_BUDGET: Duration = Duration::from_secs(600);

const CROSS_TOL: f64 = 1e-12;

type Verdict = Result<String, String>;

fn main() {
    let criteria: [(&str, fn() -> Verdict); 6] = [
        ("1 finite-group exact suite", finite_suite),
        ("2 symmetric quantization", symmetric_quantization),
        ("3 magnetic geometry", magnetic_geometry),
        ("4 magnetic operators", magnetic_operators),
        ("5 cross-backend consistency", cross_backend),
        ("6 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {name}: PASS ({secs:.1} s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({secs:.1} s) {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn by_id(results: &[CheckResult]) -> BTreeMap<String, &CheckResult> {
    results.iter().map(|r| (format!("{}/{}", r.suite, r.id), r)).collect()
}

/// Every `ids` entry is present, passed, and was held to a tolerance no looser than `tol`.
fn require(map: &BTreeMap<String, &CheckResult>, ids: &[String], tol: f64) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for id in ids {
        let r = map.get(id).ok_or_else(|| format!("missing check {id}"))?;
        if r.tolerance > tol {
            return Err(format!("{id} ran at tolerance {:e}, looser than {tol:e}", r.tolerance));
        }
        if !(r.pass && r.max_defect < tol) {
            return Err(format!("{id}: defect {:e} (tol {tol:e})", r.max_defect));
        }
        worst = worst.max(r.max_defect);
    }
    Ok(worst)
}

fn budget(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t < limit {
        Ok(())
    } else {
        Err(format!("took {:.1} s, budget {} s", t.as_secs_f64(), limit.as_secs()))
    }
}

fn finite_suite() -> Verdict {
    const IDS: [&str; 20] = [
        "dual.selfcheck",
        "dual.plancherel",
        "cochain.delta_squared",
        "cochain.trivialize",
        "cochain.gauge",
        "crossed.associativity",
        "crossed.involution",
        "crossed.schrodinger",
        "crossed.covariance",
        "crossed.retau",
        "crossed.untwist",
        "crossed.gauge",
        "opcalc.bijective",
        "opcalc.unitary",
        "opcalc.crossed",
        "opcalc.hstar",
        "opcalc.wigner",
        "opcalc.fourier_wigner",
        "opcalc.weyl",
        "opcalc.integrated",
    ];
    let start = Instant::now();
    let results = finite::finite_suite(&finite::FINITE_GROUPS, FINITE_INSTANCES, SEED, FINITE_TOL).map_err(|e| e.to_string())?;
    budget(start, FINITE_BUDGET)?;
    let map = by_id(&results);
    let ids: Vec<String> = finite::FINITE_GROUPS
        .iter()
        .flat_map(|g| IDS.iter().chain(["opcalc.factorization"].iter()).map(move |i| format!("finite/{g}.{i}")))
        .collect();
    let worst = require(&map, &ids, FINITE_TOL)?;
    if let Some(bad) = results.iter().find(|r| !r.pass) {
        return Err(format!("{}/{} failed", bad.suite, bad.id));
    }
    Ok(format!("{} checks on {} groups, {FINITE_INSTANCES} instances each, max defect {worst:.2e}", ids.len(), finite::FINITE_GROUPS.len()))
}

/// All maps ℤ_n → ℤ_n with τ(x) = x + τ(−x), by enumeration in modular arithmetic.
fn symmetric_maps_oracle(n: usize) -> Vec<Vec<usize>> {
    let total = n.pow(n as u32);
    (0..total)
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let v = code % n;
                    code /= n;
                    v
                })
                .collect::<Vec<usize>>()
        })
        .filter(|t| (0..n).all(|x| t[x] == (x + t[(n - x) % n]) % n))
        .collect()
}

/// β on ℤ₃ with β(q; 0) = 1, random β(q; 1), and β(p; 2) = conj β(p + 1; 1).
fn inverse_compatible_z3(g: &FiniteGroup, rng: &mut ChaCha8Rng) -> Cochain {
    let theta: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    Cochain::from_fn(g, 1, |q, xs| match xs[0] {
        0 => C64::new(1.0, 0.0),
        1 => C64::from_polar(1.0, theta[q]),
        _ => C64::from_polar(1.0, -theta[(q + 1) % 3]),
    })
    .expect("valid cochain")
}

fn symmetric_quantization() -> Verdict {
    let z2 = symmetric_maps_oracle(2);
    if !z2.is_empty() {
        return Err(format!("oracle found symmetric maps on Z2: {z2:?}"));
    }
    let g2 = FiniteGroup::cyclic(2);
    if symmetric_search(&g2, 12).map_err(|e| e.to_string())?.is_some() {
        return Err("search reported a symmetric map on Z2".into());
    }
    let z3 = symmetric_maps_oracle(3);
    let square = vec![0, 2, 1];
    if !z3.contains(&square) {
        return Err(format!("oracle maps on Z3 {z3:?} miss x ↦ x²"));
    }
    let g3 = FiniteGroup::cyclic(3);
    // element labels of the library's ℤ₃ must be residues for the comparison to mean anything
    if (0..3).any(|a| (0..3).any(|b| g3.mul(a, b) != (a + b) % 3)) {
        return Err("Z3 is not labelled by residues".into());
    }
    let found = match symmetric_search(&g3, 12).map_err(|e| e.to_string())? {
        Some(TauMap::Table(t)) => t,
        other => return Err(format!("search on Z3 returned {other:?}")),
    };
    if !z3.contains(&found) {
        return Err(format!("search returned {found:?}, not among the oracle's {z3:?}"));
    }
    let tau = FiniteTau(square);
    let dual = UnitaryDual::shipped(&g3).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut adjoint: f64 = 0.0;
    for _ in 0..8 {
        let beta = inverse_compatible_z3(&g3, &mut rng);
        let r = symmetric_check(&g3, &dual, &beta, &tau, 8, &mut rng).map_err(|e| e.to_string())?;
        if r.gamma_inverse_defect > SYMMETRIC_TOL {
            return Err(format!("constructed β has γ(z, z⁻¹) defect {:e}", r.gamma_inverse_defect));
        }
        adjoint = adjoint.max(r.adjoint_defect);
    }
    if !(adjoint < SYMMETRIC_TOL) {
        return Err(format!("Op(f★) vs Op(f)* defect {adjoint:e}"));
    }
    // generic β: γ(z, z⁻¹) ≠ 1 and the adjoint identity must visibly fail
    let mut witness: f64 = f64::INFINITY;
    for _ in 0..4 {
        let beta = Cochain::random(&g3, 1, &mut rng);
        let r = symmetric_check(&g3, &dual, &beta, &tau, 4, &mut rng).map_err(|e| e.to_string())?;
        if r.gamma_inverse_defect <= WITNESS_THRESHOLD {
            return Err("random β unexpectedly satisfies γ(z, z⁻¹) = 1".into());
        }
        witness = witness.min(r.adjoint_defect);
    }
    if !(witness > WITNESS_THRESHOLD) {
        return Err(format!("counterexample defect {witness:e} not above {WITNESS_THRESHOLD:e}"));
    }
    Ok(format!(
        "Z2 has no symmetric map, Z3 has {} including x ↦ x²; adjoint defect {adjoint:.2e}, weakest counterexample {witness:.2e}",
        z3.len()
    ))
}

fn magnetic_geometry() -> Verdict {
    let cfg = MagneticConfig { samples: GEOMETRY_SAMPLES, order: 8, ..Default::default() };
    let start = Instant::now();
    let results = magnetic::geometry_suite(&magnetic::LIE_GROUPS, &cfg, SEED).map_err(|e| e.to_string())?;
    budget(start, GEOMETRY_BUDGET)?;
    let map = by_id(&results);
    let s = |ids: &[&str]| ids.iter().map(|i| format!("magnetic/{i}")).collect::<Vec<_>>();
    let constant = require(&map, &s(&["R2.constant_cocycle"]), CONSTANT_COCYCLE_TOL)?;
    let stokes = require(&map, &s(&["R2.stokes.linear", "R2.stokes.cubic", "H1.stokes.cubic"]), STOKES_TOL)?;
    let cocycle = require(&map, &s(&["R2.cocycle.cubic", "H1.cocycle.cubic"]), COCYCLE_TOL)?;
    let orders: Vec<f64> = ["04", "08", "16"]
        .iter()
        .map(|o| map.get(&format!("magnetic/H1.stokes.cubic.order{o}")).map(|r| r.max_defect).ok_or(format!("missing order {o}")))
        .collect::<Result<_, _>>()?;
    if !orders.windows(2).all(|w| w[1] <= w[0].max(ROUNDOFF_FLOOR)) {
        return Err(format!("cubic Stokes residuals {orders:?} increase under refinement"));
    }
    require(&map, &s(&["H1.stokes.smooth.refinement"]), 1.0)?;
    Ok(format!(
        "constant cocycle {constant:.2e}, Stokes {stokes:.2e}, cocycle identity {cocycle:.2e}, cubic residuals 4/8/16: {:.1e}/{:.1e}/{:.1e}",
        orders[0], orders[1], orders[2]
    ))
}

fn magnetic_operators() -> Verdict {
    let cfg = MagneticConfig::default();
    let start = Instant::now();
    let results = magnetic::operator_suite(&magnetic::LIE_GROUPS, &cfg, SEED).map_err(|e| e.to_string())?;
    budget(start, OPERATOR_BUDGET)?;
    let map = by_id(&results);
    let s = |ids: &[&str]| ids.iter().map(|i| format!("magnetic_op/{i}")).collect::<Vec<_>>();
    let gauge = require(&map, &s(&["R2.gauge", "H1.gauge"]), GAUGE_TOL)?;
    let herm = require(&map, &s(&["R2.hermitian", "H1.hermitian"]), HERMITIAN_TOL)?;
    let weyl = require(&map, &s(&["R2.weyl_kernel", "H1.weyl_kernel_sampled"]), WEYL_KERNEL_TOL)?;
    Ok(format!(
        "R2 L={} N={}, H1 L={} N={}: gauge {gauge:.2e}, Hermitian {herm:.2e}, Weyl kernel {weyl:.2e}",
        cfg.r2_grid.l, cfg.r2_grid.n, cfg.h1_grid.l, cfg.h1_grid.n
    ))
}

fn cross_backend() -> Verdict {
    let results = cross::cross_suite(8, 10, SEED, CROSS_TOL).map_err(|e| e.to_string())?;
    let map = by_id(&results);
    let ids: Vec<String> = ["kernel", "product", "involution"].iter().map(|i| format!("cross/Z8.{i}")).collect();
    let worst = require(&map, &ids, CROSS_TOL)?;
    Ok(format!("Z8, 10 pairs, max defect {worst:.2e}"))
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_twistquant"))
            .args(["verify-finite", "--seed", "7", "--timing", "--out"])
            .arg(&path)
            .stdout(std::process::Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("verify-finite exited with {status}"));
        }
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        for r in v["results"].as_array_mut().ok_or("no results array")? {
            r.as_object_mut().ok_or("result is not an object")?.remove("wall_ms");
        }
        serde_json::to_vec(&v).map_err(|e| e.to_string())
    };
    let (a, b) = (run("a.json")?, run("b.json")?);
    if a != b {
        return Err("reports differ".into());
    }
    Ok(format!("two runs with seed 7 agree byte for byte ({} bytes without wall times)", a.len()))
}
