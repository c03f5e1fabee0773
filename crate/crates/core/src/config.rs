//! Experiment configuration and file loading.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cohomology::{Cochain, CochainSpec};
use crate::error::{Error, Result};
use crate::fields::FieldSpec;
use crate::grid::GridSpec;
use crate::group::{symmetric_search, symmetric_tau, FiniteGroup, FiniteTau, GroupModel, GroupSpec, NilpotentLieGroup, TauMap, SYMMETRIC_SEARCH_CAP};
use crate::quadrature::QuadratureSpec;
use crate::scalar::SymbolSpec;
use crate::verify::{FiniteConfig, LandauConfig, MagneticConfig};

/// A group given by name (`Z6`, `S3`, `D4`, `Q8`, `R2`, `H1`, ...) or in full.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Spec(GroupSpec),
}

impl GroupRef {
    pub fn build(&self) -> Result<GroupModel> {
        match self {
            GroupRef::Name(n) => group_by_name(n),
            GroupRef::Spec(s) => s.build(),
        }
    }
}

pub fn group_by_name(name: &str) -> Result<GroupModel> {
    match NilpotentLieGroup::by_name(name) {
        Ok(g) => Ok(GroupModel::Nilpotent(g)),
        Err(_) => Ok(GroupModel::Finite(FiniteGroup::by_name(name)?)),
    }
}

/// Ordering map: `identity`, `constant_identity`, `half`, or a table on a finite group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSpec {
    Named(TauName),
    Table(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauName {
    Identity,
    ConstantIdentity,
    Half,
    /// τ(x) = x·τ(x⁻¹): the half map on Lie groups, found by search on finite groups.
    Symmetric,
}

impl TauSpec {
    pub fn build(&self, g: &GroupModel) -> Result<TauMap> {
        Ok(match self {
            TauSpec::Named(TauName::Identity) => TauMap::Identity,
            TauSpec::Named(TauName::ConstantIdentity) => TauMap::ConstantIdentity,
            TauSpec::Named(TauName::Half) => TauMap::Half,
            TauSpec::Named(TauName::Symmetric) => match g {
                GroupModel::Finite(fg) => symmetric_search(fg, SYMMETRIC_SEARCH_CAP)?
                    .ok_or_else(|| Error::UnsupportedTau(format!("{} admits no symmetric map", fg.name())))?,
                GroupModel::Nilpotent(_) => symmetric_tau(g)?,
            },
            TauSpec::Table(t) => TauMap::Table(t.clone()),
        })
    }

    /// Parses the command-line form: a name, or comma-separated table entries.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "identity" | "id" => Ok(TauSpec::Named(TauName::Identity)),
            "constant_identity" | "constant-identity" | "e" => Ok(TauSpec::Named(TauName::ConstantIdentity)),
            "half" => Ok(TauSpec::Named(TauName::Half)),
            "symmetric" => Ok(TauSpec::Named(TauName::Symmetric)),
            other => other
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(TauSpec::Table)
                .map_err(|_| Error::Config(format!("unrecognized ordering map {other:?}"))),
        }
    }

    pub fn on_finite(&self, g: &FiniteGroup) -> Result<FiniteTau> {
        self.build(&GroupModel::Finite(g.clone()))?.on_finite(g)
    }
}

/// Everything a subcommand may read from a config file. Fields a subcommand does not
/// use are ignored by it; command-line flags override file values.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: Option<GroupRef>,
    pub grid: Option<GridSpec>,
    pub field: Option<FieldSpec>,
    pub tau: Option<TauSpec>,
    pub symbol: Option<SymbolSpec>,
    pub tolerance: Option<f64>,
    pub quadrature: Option<QuadratureSpec>,
    pub seed: Option<u64>,
    pub finite: Option<FiniteConfig>,
    pub magnetic: Option<MagneticConfig>,
    pub landau: Option<LandauConfig>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let c: Self = read_json(path)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!("tolerance must be positive, got {t}")));
            }
        }
        if let Some(g) = self.grid {
            if !(g.l.is_finite() && g.l > 0.0) || g.n < 2 || g.n % 2 != 0 {
                return Err(Error::Config(format!("grid {{L: {}, N: {}}} needs L > 0 and even N ≥ 2", g.l, g.n)));
            }
        }
        Ok(())
    }
}

/// Reads JSON, or TOML when the extension is `.toml`.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let bad = |e: &dyn std::fmt::Display| Error::Config(format!("{}: {e}", path.display()));
    if path.extension().is_some_and(|x| x.eq_ignore_ascii_case("toml")) {
        toml::from_str(&text).map_err(|e| bad(&e))
    } else {
        serde_json::from_str(&text).map_err(|e| bad(&e))
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Cochain file, optionally naming its group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochainFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub degree: usize,
    pub values: Vec<(f64, f64)>,
}

impl CochainFile {
    pub fn spec(&self) -> CochainSpec {
        CochainSpec { degree: self.degree, values: self.values.clone() }
    }

    /// The group named in the file, else the cyclic group whose order fits the data.
    pub fn resolve_group(&self, flag: Option<&str>) -> Result<FiniteGroup> {
        if let Some(name) = flag.or(self.group.as_deref()) {
            return FiniteGroup::by_name(name);
        }
        let len = self.values.len();
        let k = self.degree as u32 + 1;
        (1..=len)
            .find(|n| n.checked_pow(k) == Some(len))
            .map(FiniteGroup::cyclic)
            .ok_or_else(|| Error::Config(format!("{len} values do not fit a degree-{} cochain on any cyclic group", self.degree)))
    }

    pub fn build(&self, g: &FiniteGroup) -> Result<Cochain> {
        self.spec().build(g)
    }

    pub fn describe(group: &FiniteGroup, c: &Cochain) -> Self {
        let s = CochainSpec::describe(c);
        Self { group: Some(group.name().to_string()), degree: s.degree, values: s.values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_parsing() {
        assert_eq!(TauSpec::parse("half").unwrap(), TauSpec::Named(TauName::Half));
        assert_eq!(TauSpec::parse("0, 2,1").unwrap(), TauSpec::Table(vec![0, 2, 1]));
        assert!(TauSpec::parse("sideways").is_err());
        let t: TauSpec = serde_json::from_str("\"constant_identity\"").unwrap();
        assert_eq!(t, TauSpec::Named(TauName::ConstantIdentity));
        let sym = TauSpec::parse("symmetric").unwrap();
        assert_eq!(sym.on_finite(&FiniteGroup::cyclic(3)).unwrap(), FiniteTau(vec![0, 2, 1]));
        assert!(matches!(sym.on_finite(&FiniteGroup::cyclic(2)), Err(Error::UnsupportedTau(_))));
    }

    #[test]
    fn toml_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "group = \"R2\"\nseed = 3\ntau = \"half\"\n[grid]\nL = 4.0\nN = 8\n").unwrap();
        let c = ExperimentConfig::load(&p).unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.grid.unwrap().n, 8);
    }

    #[test]
    fn config_roundtrip_and_rejection() {
        let text = r#"{"group": "H1", "grid": {"L": 4.0, "N": 16}, "field": {"kind": "cubic"}, "tau": "half",
                       "magnetic": {"samples": 10}}"#;
        let c: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert!(matches!(c.group.as_ref().unwrap().build().unwrap(), GroupModel::Nilpotent(_)));
        assert_eq!(c.magnetic.as_ref().unwrap().samples, 10);
        assert_eq!(c.magnetic.as_ref().unwrap().order, 8);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"gird": {}}"#).is_err());
        let bad = ExperimentConfig { tolerance: Some(-1.0), ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cochain_group_inference() {
        let f = CochainFile { group: None, degree: 2, values: vec![(1.0, 0.0); 27] };
        assert_eq!(f.resolve_group(None).unwrap().order(), 3);
        assert_eq!(f.resolve_group(Some("S3")).unwrap().order(), 6);
        let odd = CochainFile { group: None, degree: 1, values: vec![(1.0, 0.0); 5] };
        assert!(odd.resolve_group(None).is_err());
    }
}
