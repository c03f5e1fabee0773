use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use twistquant::cohomology::{coboundary, is_cocycle, pseudo_trivialize, trivialize, Cochain, COCYCLE_TOL};
use twistquant::config::{group_by_name, read_json, write_text, CochainFile, ExperimentConfig, GroupRef, TauSpec};
use twistquant::dual::{max_abs, UnitaryDual};
use twistquant::error::{Error, Result};
use twistquant::fields::FieldSpec;
use twistquant::grid::{Grid, GridSpec};
use twistquant::group::{FiniteGroup, GroupModel};
use twistquant::opcalc::{compose_symbols, kernel, matrix_to_csv, op, symbol_of, OpSymbolSpec};
use twistquant::quadrature::{Quadrature, QuadratureSpec};
use twistquant::report::{timed, CheckResult, SuiteReport};
use twistquant::scalar::{boundary_mass, LieTrivialization, ScalarQuantizer, SampledSymbol, SymbolSpec};
use twistquant::verify::{self, magnetic, LandauConfig, MagneticConfig};

const DEFAULT_SEED: u64 = 0;
/// Largest grid `quantize` assembles densely.
const MAX_QUANTIZE_POINTS: usize = 4096;
const ROUNDTRIP_TOL: f64 = 1e-12;
/// Fraction of |s|² allowed on the outer lattice layer before leakage is reported.
const BOUNDARY_MASS_TOL: f64 = 1e-3;

#[derive(Parser)]
#[command(name = "twistquant", version, about = "Twisted pseudo-differential calculus: verification suites and kernel dumps")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON, or TOML by extension); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replaces the default tolerance of every check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// JSON report destination.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Keep wall times in the JSON report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Clone, Default)]
struct GridArgs {
    #[arg(long = "grid-l")]
    grid_l: Option<f64>,
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    /// Gauss–Legendre order on segments.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Every finite-group identity, symmetric orderings and the ℤ_N cross-check.
    VerifyFinite {
        /// Repeatable; defaults to Z2 Z3 Z6 S3 D4 Q8.
        #[arg(long)]
        group: Vec<String>,
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Magnetic geometry, operator and Weyl-relation checks on R2 and H1.
    VerifyMagnetic {
        /// R2, H1 or all.
        #[arg(long, default_value = "all")]
        group: String,
        #[command(flatten)]
        grid: GridArgs,
        /// Random argument tuples per geometric identity.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Quantize a symbol and dump its kernel as CSV.
    Quantize {
        #[arg(long)]
        group: Option<String>,
        /// Operator-valued symbol (finite groups).
        #[arg(long)]
        symbol: Option<PathBuf>,
        /// β (degree 1) or γ (degree 2, replaced by its pseudo-trivialization); default β ≡ 1.
        #[arg(long)]
        cochain: Option<PathBuf>,
        /// identity, constant_identity, half, symmetric, or a comma-separated table.
        #[arg(long)]
        tau: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
        /// Kernel CSV destination, one row per line with entries re,im.
        #[arg(long)]
        kernel_out: Option<PathBuf>,
    },
    /// Twisted product of two finite-group symbols.
    Compose {
        #[arg(long)]
        group: Option<String>,
        /// Exactly two symbol files.
        #[arg(long, num_args = 2, required = true)]
        symbol: Vec<PathBuf>,
        #[arg(long)]
        cochain: Option<PathBuf>,
        #[arg(long)]
        tau: Option<String>,
        /// Destination of the product symbol.
        #[arg(long)]
        product: PathBuf,
    },
    /// Certify a cochain file as a cocycle, or trivialize it.
    #[command(group(ArgGroup::new("mode").required(true).args(["check", "trivialize"])))]
    Cocycle {
        #[arg(long, value_name = "FILE")]
        check: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        trivialize: Option<PathBuf>,
        /// Overrides the group named in the file.
        #[arg(long)]
        group: Option<String>,
        /// Destination of the trivializing cochain.
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Constant field on the plane, end to end.
    DemoLandau {
        /// Field strength.
        #[arg(long)]
        b: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        kernel_out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotACocycle { .. } | Error::NotCohomologous { .. } => 1,
        Error::Config(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::InvalidGroup(_)
        | Error::InvalidDual(_)
        | Error::InvalidCochain(_)
        | Error::Shape(_)
        | Error::GridMismatch(_)
        | Error::UnsupportedTau(_)
        | Error::SearchTooLarge { .. } => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<SuiteReport> {
    verify::init_threads_from_env()?;
    let common = &cli.common;
    let cfg = &load(common)?;
    let report = match cli.cmd {
        Cmd::VerifyFinite { group, instances } => {
            let mut fc = cfg.finite.clone().unwrap_or_default();
            if !group.is_empty() {
                fc.groups = group;
            }
            if let Some(n) = instances {
                fc.instances = n;
            }
            if let Some(t) = common.tol.or(cfg.tolerance) {
                fc.tol = t;
            }
            verify::verify_finite(&fc, seed(common, cfg))?
        }
        Cmd::VerifyMagnetic { group, grid, samples } => verify_magnetic(common, cfg, &group, &grid, samples)?,
        Cmd::Quantize { group, symbol, cochain, tau, grid, kernel_out } => quantize(common, cfg, group, symbol, cochain, tau, &grid, kernel_out)?,
        Cmd::Compose { group, symbol, cochain, tau, product } => compose(common, cfg, group, &symbol, cochain, tau, &product)?,
        Cmd::Cocycle { check, trivialize, group, write } => cocycle(common, cfg, check, trivialize, group, write)?,
        Cmd::DemoLandau { b, grid, kernel_out } => landau(common, cfg, b, &grid, kernel_out)?,
    };
    println!("{}", report.summary());
    let failed = report.failures().count();
    println!("{} checks, {} failed, seed {}", report.results.len(), failed, report.seed);
    if let Some(path) = &common.out {
        write_text(path, &report.to_json(common.timing))?;
    }
    Ok(report)
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(t) = common.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Config(format!("--tol must be positive, got {t}")));
        }
    }
    Ok(cfg)
}

fn seed(common: &Common, cfg: &ExperimentConfig) -> u64 {
    common.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED)
}

fn tol_or(common: &Common, cfg: &ExperimentConfig, default: f64) -> f64 {
    common.tol.or(cfg.tolerance).unwrap_or(default)
}

fn override_grid(spec: &mut GridSpec, g: &GridArgs) {
    if let Some(l) = g.grid_l {
        spec.l = l;
    }
    if let Some(n) = g.grid_n {
        spec.n = n;
    }
}

fn verify_magnetic(common: &Common, cfg: &ExperimentConfig, group: &str, grid: &GridArgs, samples: Option<usize>) -> Result<SuiteReport> {
    let mut mc: MagneticConfig = cfg.magnetic.clone().unwrap_or_default();
    let groups: Vec<&str> = match group {
        "all" => magnetic::LIE_GROUPS.to_vec(),
        "R2" => vec!["R2"],
        "H1" => vec!["H1"],
        other => return Err(Error::Config(format!("--group takes R2, H1 or all, not {other}"))),
    };
    if groups.contains(&"R2") {
        override_grid(&mut mc.r2_grid, grid);
    }
    if groups.contains(&"H1") {
        override_grid(&mut mc.h1_grid, grid);
    }
    if let Some(o) = grid.order {
        mc.order = o;
    }
    if let Some(s) = samples {
        mc.samples = s;
    }
    if let Some(t) = common.tol.or(cfg.tolerance) {
        mc.tol = Some(t);
    }
    verify::verify_magnetic(&groups, &mc, seed(common, cfg))
}

fn finite_group(flag: Option<&str>, cfg: &ExperimentConfig) -> Result<FiniteGroup> {
    let model = match (flag, &cfg.group) {
        (Some(name), _) => group_by_name(name)?,
        (None, Some(g)) => g.build()?,
        (None, None) => return Err(Error::Config("no group given; pass --group or set it in the config".into())),
    };
    match model {
        GroupModel::Finite(g) => Ok(g),
        GroupModel::Nilpotent(g) => Err(Error::Config(format!("{} is not a finite group", g.name()))),
    }
}

/// β from a cochain file: degree 1 as is, degree 2 through its pseudo-trivialization.
fn load_beta(g: &FiniteGroup, path: Option<&Path>) -> Result<Cochain> {
    let Some(path) = path else { return Ok(Cochain::one(g, 1)) };
    let file: CochainFile = read_json(path)?;
    let c = file.build(g)?;
    match c.degree() {
        1 => Ok(c),
        2 => pseudo_trivialize(g, &c),
        d => Err(Error::InvalidCochain(format!("expected degree 1 or 2, got {d}"))),
    }
}

fn tau_choice(flag: Option<String>, cfg: &ExperimentConfig, default: &str) -> Result<TauSpec> {
    match (flag, &cfg.tau) {
        (Some(s), _) => TauSpec::parse(&s),
        (None, Some(t)) => Ok(t.clone()),
        (None, None) => TauSpec::parse(default),
    }
}

#[allow(clippy::too_many_arguments)]
fn quantize(
    common: &Common,
    cfg: &ExperimentConfig,
    group: Option<String>,
    symbol: Option<PathBuf>,
    cochain: Option<PathBuf>,
    tau: Option<String>,
    grid_args: &GridArgs,
    kernel_out: Option<PathBuf>,
) -> Result<SuiteReport> {
    let model = match (group.as_deref(), &cfg.group) {
        (Some(name), _) => group_by_name(name)?,
        (None, Some(g)) => g.build()?,
        (None, None) => return Err(Error::Config("no group given; pass --group or set it in the config".into())),
    };
    let seed = seed(common, cfg);
    match model {
        GroupModel::Finite(g) => {
            let path = symbol.ok_or_else(|| Error::Config("finite groups need --symbol".into()))?;
            let dual = UnitaryDual::shipped(&g)?;
            let spec: OpSymbolSpec = read_json(&path)?;
            let f = spec.build(&g, &dual)?;
            let beta = load_beta(&g, cochain.as_deref())?;
            let t = tau_choice(tau, cfg, "identity")?.on_finite(&g)?;
            let k = kernel(&g, &dual, &f, &beta, &t)?;
            if let Some(p) = &kernel_out {
                write_text(p, &matrix_to_csv(&k))?;
            }
            let tol = tol_or(common, cfg, ROUNDTRIP_TOL);
            let r = timed("quantize", &format!("{}.roundtrip", g.name()), "the symbol is recovered from its operator", tol, || {
                let t_op = op(&g, &dual, &f, &beta, &t)?;
                Ok(symbol_of(&g, &dual, &t_op, &beta, &t)?.distance(&f))
            })?;
            Ok(SuiteReport::new(seed, vec![r]))
        }
        GroupModel::Nilpotent(g) => {
            if symbol.is_some() || cochain.is_some() {
                return Err(Error::Config("Lie groups take the field and symbol from the config".into()));
            }
            let default = if g.dim() <= 2 { GridSpec { l: 12.0, n: 24 } } else { GridSpec { l: 8.0, n: 16 } };
            let mut spec = cfg.grid.unwrap_or(default);
            override_grid(&mut spec, grid_args);
            let grid = Grid::new(g.dim(), spec.l, spec.n)?;
            if grid.len() > MAX_QUANTIZE_POINTS {
                return Err(Error::Config(format!("{} grid points exceed the dense limit {MAX_QUANTIZE_POINTS}", grid.len())));
            }
            let mut qs = cfg.quadrature.unwrap_or_default();
            if let Some(o) = grid_args.order {
                qs = QuadratureSpec { segment_order: o, ..qs };
            }
            let rule: Quadrature = qs.build()?;
            let field = cfg.field.clone().unwrap_or(FieldSpec::Zero).build(g.dim())?;
            let s = cfg.symbol.clone().unwrap_or(SymbolSpec::Gaussian(magnetic::real_gaussian(g.dim()))).build(g.dim())?;
            let tau_map = tau_choice(tau, cfg, "half")?.build(&GroupModel::Nilpotent(g.clone()))?;
            let beta = LieTrivialization::magnetic(&field, rule);
            let q = ScalarQuantizer::new(&g, &grid, &beta, &tau_map)?;
            let all: Vec<usize> = (0..grid.len()).collect();
            let k = q.kernel(s.as_ref(), &all, &all)?;
            if let Some(p) = &kernel_out {
                write_text(p, &matrix_to_csv(&k))?;
            }
            let id = |x: &str| format!("{}.{x}", g.name());
            let roundtrip = timed("quantize", &id("roundtrip"), "dividing out β and restoring it returns the kernel", tol_or(common, cfg, ROUNDTRIP_TOL), || {
                let sampled = SampledSymbol::from_kernel(&q, &k)?;
                Ok(max_abs(&(sampled.kernel(&q)? - &k)))
            })?;
            let leak = timed("quantize", &id("boundary_mass"), "share of |s|² on the outer primal or dual lattice layer", BOUNDARY_MASS_TOL, || {
                Ok(boundary_mass(&grid, s.as_ref()))
            })?;
            Ok(SuiteReport::new(seed, vec![roundtrip, leak]))
        }
    }
}

fn compose(
    common: &Common,
    cfg: &ExperimentConfig,
    group: Option<String>,
    symbols: &[PathBuf],
    cochain: Option<PathBuf>,
    tau: Option<String>,
    product: &Path,
) -> Result<SuiteReport> {
    let g = finite_group(group.as_deref(), cfg)?;
    let dual = UnitaryDual::shipped(&g)?;
    let f: OpSymbolSpec = read_json(&symbols[0])?;
    let h: OpSymbolSpec = read_json(&symbols[1])?;
    let (f, h) = (f.build(&g, &dual)?, h.build(&g, &dual)?);
    let beta = load_beta(&g, cochain.as_deref())?;
    let t = tau_choice(tau, cfg, "identity")?.on_finite(&g)?;
    let fh = compose_symbols(&g, &dual, &f, &h, &beta, &t)?;
    write_text(product, &serde_json::to_string_pretty(&OpSymbolSpec::describe(&fh))?)?;
    let r = timed("compose", &format!("{}.product", g.name()), "Op(f ♯ h) = Op(f) Op(h)", tol_or(common, cfg, ROUNDTRIP_TOL), || {
        let lhs = op(&g, &dual, &fh, &beta, &t)?;
        let rhs = op(&g, &dual, &f, &beta, &t)? * op(&g, &dual, &h, &beta, &t)?;
        Ok(max_abs(&(lhs - rhs)))
    })?;
    Ok(SuiteReport::new(seed(common, cfg), vec![r]))
}

fn cocycle(
    common: &Common,
    cfg: &ExperimentConfig,
    check: Option<PathBuf>,
    triv: Option<PathBuf>,
    group: Option<String>,
    write: Option<PathBuf>,
) -> Result<SuiteReport> {
    let path = check.as_ref().or(triv.as_ref()).expect("clap enforces one mode");
    let file: CochainFile = read_json(path)?;
    let flag = group.as_deref().or(match &cfg.group {
        Some(GroupRef::Name(n)) => Some(n.as_str()),
        _ => None,
    });
    let g = file.resolve_group(flag)?;
    let c = file.build(&g)?;
    let tol = tol_or(common, cfg, COCYCLE_TOL);
    let mut out: Vec<CheckResult> = Vec::new();
    let verdict = is_cocycle(&g, &c, tol)?;
    out.push(CheckResult::new("cocycle", &format!("{}.degree{}.cocycle", g.name(), c.degree()), "δν ≡ 1", verdict.max_defect, tol));
    if triv.is_some() {
        if !verdict.holds {
            print_partial(&out, seed(common, cfg));
            return Err(Error::NotACocycle { defect: verdict.max_defect });
        }
        let nu = trivialize(&g, &c)?;
        let d = coboundary(&g, &nu)?.distance(&c)?;
        out.push(CheckResult::new("cocycle", &format!("{}.degree{}.trivialize", g.name(), c.degree()), "δ(trivialize(ν)) = ν", d, tol));
        let text = serde_json::to_string_pretty(&CochainFile::describe(&g, &nu))?;
        match &write {
            Some(p) => write_text(p, &text)?,
            None => println!("{text}"),
        }
    }
    Ok(SuiteReport::new(seed(common, cfg), out))
}

fn print_partial(results: &[CheckResult], seed: u64) {
    println!("{}", SuiteReport::new(seed, results.to_vec()).summary());
}

fn landau(common: &Common, cfg: &ExperimentConfig, b: Option<f64>, grid: &GridArgs, kernel_out: Option<PathBuf>) -> Result<SuiteReport> {
    let mut lc: LandauConfig = cfg.landau.clone().unwrap_or_default();
    if let Some(b) = b {
        lc.b = b;
    }
    override_grid(&mut lc.grid, grid);
    if let Some(o) = grid.order {
        lc.order = o;
    }
    let outcome = verify::run_landau(&lc, seed(common, cfg))?;
    if let Some(p) = &kernel_out {
        write_text(p, &matrix_to_csv(&outcome.kernel))?;
    }
    let mut report = outcome.report;
    if let Some(t) = common.tol.or(cfg.tolerance) {
        for r in &mut report.results {
            *r = CheckResult { wall_ms: r.wall_ms, ..CheckResult::new(&r.suite, &r.id, &r.anchor, r.max_defect, t) };
        }
    }
    Ok(report)
}
