//! Run configuration: grading groups, seed, sample counts and suite selection.

use std::path::{Path, PathBuf};

use hv_core::foundations::{FieldMode, GroupInstance, GroupKind, Scalar};
use hv_core::{Error, Result};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// Environment variable consulted when no `--config` is given.
pub const CONFIG_ENV: &str = "HV_CONFIG";

pub const DEFAULT_SEED: u64 = 20_240_917;

pub const ALL_SUITES: [&str; 7] = [
    "jacobi",
    "cocycles",
    "oracles",
    "derivations",
    "automorphisms",
    "lifts",
    "group-laws",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Name(String),
    Mode { mode: String, d: Option<u64> },
}

impl FieldSpec {
    fn resolve(&self) -> Result<FieldMode> {
        let (mode, d) = match self {
            FieldSpec::Name(m) => (m.as_str(), None),
            FieldSpec::Mode { mode, d } => (mode.as_str(), *d),
        };
        match (mode, d) {
            ("rational", _) => Ok(FieldMode::Rational),
            ("quadratic", Some(d)) => Ok(FieldMode::Quadratic(d)),
            ("quadratic", None) => Err(Error::Config("quadratic field needs \"d\"".into())),
            (m, _) => Err(Error::Config(format!("unknown field mode {m:?}"))),
        }
    }
}

/// A pairing value: a scalar literal such as `"sqrt(2)"`, or a
/// `[rational, surd]` pair read in the configured quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairingEntry {
    Literal(String),
    Parts([String; 2]),
}

impl PairingEntry {
    fn resolve(&self, field: FieldMode) -> Result<Scalar> {
        match self {
            PairingEntry::Literal(s) => s.parse(),
            PairingEntry::Parts([r, s]) => {
                let parse = |t: &str| -> Result<BigRational> {
                    t.parse::<Scalar>()?
                        .as_rational()
                        .ok_or_else(|| Error::NotRational(t.to_string()))
                };
                let (r, s) = (parse(r)?, parse(s)?);
                match field {
                    FieldMode::Quadratic(d) => Scalar::quadratic(r, s, d),
                    FieldMode::Rational if s == BigRational::from_integer(0.into()) => Ok(Scalar::from_rational(r)),
                    FieldMode::Rational => Err(Error::FieldMismatch("surd part in a rational field".into())),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub group: String,
    #[serde(default)]
    pub pairing: Option<Vec<PairingEntry>>,
    #[serde(default)]
    pub field: Option<FieldSpec>,
}

impl GroupSpec {
    pub fn integers() -> Self {
        GroupSpec {
            group: "Z".into(),
            pairing: None,
            field: None,
        }
    }

    pub fn lattice_sqrt2() -> Self {
        GroupSpec {
            group: "Z2".into(),
            pairing: Some(vec![
                PairingEntry::Literal("1".into()),
                PairingEntry::Literal("sqrt(2)".into()),
            ]),
            field: Some(FieldSpec::Mode {
                mode: "quadratic".into(),
                d: Some(2),
            }),
        }
    }

    /// Builds the group instance; the pairing defaults to `1` on every
    /// generator, which is nondegenerate only on `Z` and `Q`.
    pub fn build(&self) -> Result<GroupInstance> {
        let kind: GroupKind = self.group.parse()?;
        let field = match &self.field {
            Some(f) => f.resolve()?,
            None => FieldMode::Rational,
        };
        let pairing = match &self.pairing {
            Some(p) => p.iter().map(|e| e.resolve(field)).collect::<Result<Vec<_>>>()?,
            None => vec![Scalar::one(); kind.rank()],
        };
        GroupInstance::new(kind, pairing, field)
    }
}

/// Replacement polynomials for the canonical cocycles, lowest degree first.
/// Used by mutation tests; `psi2` is the only hook.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corruption {
    #[serde(default)]
    pub psi2: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// A single group, flattened into the top level.
    #[serde(flatten)]
    pub group: Option<GroupSpec>,
    /// Several groups; each selected suite runs once per group.
    #[serde(default)]
    pub groups: Option<Vec<GroupSpec>>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Overrides every per-check sample count.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub probe_radius: Option<i64>,
    #[serde(default)]
    pub suites: Option<Vec<String>>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub corrupt: Option<Corruption>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            group: None,
            groups: Some(vec![GroupSpec::integers(), GroupSpec::lattice_sqrt2()]),
            seed: Some(DEFAULT_SEED),
            samples: None,
            probe_radius: None,
            suites: None,
            output: None,
            corrupt: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// `--config`, then `HV_CONFIG`, then the built-in default.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn group_specs(&self) -> Vec<GroupSpec> {
        match (&self.groups, &self.group) {
            (Some(gs), _) => gs.clone(),
            (None, Some(g)) => vec![g.clone()],
            (None, None) => vec![GroupSpec::integers()],
        }
    }

    pub fn groups(&self) -> Result<Vec<(String, GroupInstance)>> {
        self.group_specs()
            .iter()
            .map(|s| Ok((describe(s), s.build()?)))
            .collect()
    }

    /// The group used by single-shot commands: the first configured group.
    pub fn primary_group(&self) -> Result<GroupInstance> {
        self.group_specs()[0].build()
    }

    pub fn suites(&self) -> Result<Vec<String>> {
        let list = match &self.suites {
            Some(s) => s.clone(),
            None => ALL_SUITES.iter().map(|s| s.to_string()).collect(),
        };
        for s in &list {
            if !ALL_SUITES.contains(&s.as_str()) {
                return Err(Error::Config(format!("unknown suite {s:?}")));
            }
        }
        Ok(list)
    }
}

/// A short label such as `Z` or `Z2[1,sqrt(2)]`.
pub fn describe(spec: &GroupSpec) -> String {
    match spec.build() {
        Ok(g) => {
            let values: Vec<String> = g.pairing_values().iter().map(|v| v.to_string()).collect();
            format!("{}[{}]", g.kind().name(), values.join(","))
        }
        Err(_) => spec.group.clone(),
    }
}
