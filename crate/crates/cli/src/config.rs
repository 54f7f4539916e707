//! Job configuration: a JSON document plus command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tadic_core::{Geometry, PrecisionProfile, TowerInput};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Lfun,
    Oracle,
    Compare,
    Slopes,
    Selfcheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Lfun => "lfun",
            Command::Oracle => "oracle",
            Command::Compare => "compare",
            Command::Slopes => "slopes",
            Command::Selfcheck => "selfcheck",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryName {
    AffineLine,
    Torus,
}

impl From<GeometryName> for Geometry {
    fn from(g: GeometryName) -> Self {
        match g {
            GeometryName::AffineLine => Geometry::AffineLine,
            GeometryName::Torus => Geometry::Torus,
        }
    }
}

impl FromStr for GeometryName {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "affine-line" | "affine" | "a1" | "line" => Ok(GeometryName::AffineLine),
            "torus" | "gm" | "g-m" => Ok(GeometryName::Torus),
            other => Err(CliError::Usage(format!("unknown geometry '{other}' (use affine-line or torus)"))),
        }
    }
}

impl fmt::Display for GeometryName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryName::AffineLine => "affine-line",
            GeometryName::Torus => "torus",
        })
    }
}

/// Parse `"u:c,u:c,..."` into exponent/coefficient pairs. An empty string
/// is the zero polynomial.
pub fn parse_terms(s: &str) -> Result<BTreeMap<i64, i64>, CliError> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (u, c) = part
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("term '{part}' is not of the form exponent:coefficient")))?;
        let u: i64 = u.trim().parse().map_err(|_| CliError::Usage(format!("bad exponent in '{part}'")))?;
        let c: i64 = c.trim().parse().map_err(|_| CliError::Usage(format!("bad coefficient in '{part}'")))?;
        *out.entry(u).or_insert(0) += c;
    }
    Ok(out)
}

/// Everything a run needs. Optional fields are filled in automatically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub p: u64,
    pub geometry: GeometryName,
    /// Exponent to integer coefficient.
    #[serde(default)]
    pub f: BTreeMap<i64, i64>,
    /// p-adic precision.
    pub a: u32,
    /// T-adic precision.
    pub b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_degree: Option<usize>,
    pub smax: usize,
    pub dmax: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<u32>,
    /// Block size for the slope decomposition; defaults to `deg f`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_degree: Option<usize>,
    /// Basis weight `c`; defaults to `deg f`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unweighted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Command-line overrides; `None` leaves the config value alone.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// JSON job configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u64>,
    /// affine-line or torus.
    #[arg(long)]
    pub geometry: Option<String>,
    /// Polynomial as "u:c,u:c,...", e.g. "1:1,-1:1" for x + 1/x.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// p-adic precision a.
    #[arg(long = "prec-p")]
    pub prec_p: Option<u32>,
    /// T-adic precision b.
    #[arg(long = "prec-T")]
    pub prec_t: Option<usize>,
    /// Truncation degree in s.
    #[arg(long = "s-degree")]
    pub s_degree: Option<usize>,
    /// Largest enumeration degree.
    #[arg(long = "d-max")]
    pub d_max: Option<usize>,
    /// Basis truncation in x (default: automatic).
    #[arg(long = "x-degree")]
    pub x_degree: Option<usize>,
    /// Extra p-adic working digits (default: automatic).
    #[arg(long)]
    pub guard: Option<u32>,
    #[arg(long = "block-degree")]
    pub block_degree: Option<usize>,
    /// Basis weight c (default: deg f).
    #[arg(long)]
    pub weight: Option<u64>,
    /// Use the unweighted monomial basis.
    #[arg(long)]
    pub unweighted: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Merge a config file (if any) with overrides. Without a file, `p`,
    /// `geometry`, `a`, `b`, `smax` and `dmax` must all be given as flags.
    pub fn resolve(command: Command, o: &Overrides) -> Result<Self, CliError> {
        let base = match &o.config {
            Some(path) => Some(Self::from_path(path)?),
            None => None,
        };
        let missing = |name: &str| CliError::Usage(format!("missing --{name} (or a --config providing it)"));
        let geometry = match (&o.geometry, &base) {
            (Some(g), _) => g.parse()?,
            (None, Some(b)) => b.geometry,
            (None, None) => return Err(missing("geometry")),
        };
        let f = match (&o.f, &base) {
            (Some(s), _) => parse_terms(s)?,
            (None, Some(b)) => b.f.clone(),
            (None, None) => BTreeMap::new(),
        };
        macro_rules! pick {
            ($flag:expr, $field:ident, $name:expr) => {
                match ($flag, &base) {
                    (Some(v), _) => v,
                    (None, Some(b)) => b.$field,
                    (None, None) => return Err(missing($name)),
                }
            };
        }
        let cfg = JobConfig {
            command: Some(command),
            p: pick!(o.p, p, "p"),
            geometry,
            f,
            a: pick!(o.prec_p, a, "prec-p"),
            b: pick!(o.prec_t, b, "prec-T"),
            x_degree: o.x_degree.or(base.as_ref().and_then(|b| b.x_degree)),
            smax: pick!(o.s_degree, smax, "s-degree"),
            dmax: pick!(o.d_max, dmax, "d-max"),
            guard: o.guard.or(base.as_ref().and_then(|b| b.guard)),
            block_degree: o.block_degree.or(base.as_ref().and_then(|b| b.block_degree)),
            weight: o.weight.or(base.as_ref().and_then(|b| b.weight)),
            unweighted: o.unweighted || base.as_ref().is_some_and(|b| b.unweighted),
            out: o.out.clone().or(base.as_ref().and_then(|b| b.out.clone())),
        };
        cfg.tower()?;
        cfg.profile()?;
        Ok(cfg)
    }

    pub fn tower(&self) -> Result<TowerInput, CliError> {
        Ok(TowerInput::new(self.p, self.geometry.into(), self.f.iter().map(|(&u, &c)| (u, c)))?)
    }

    /// The precision profile with automatic guard and x-degree where not
    /// given.
    pub fn profile(&self) -> Result<PrecisionProfile, CliError> {
        let tower = self.tower()?;
        let mut prof = PrecisionProfile::auto(self.p, self.a, self.b, self.smax, self.dmax, tower.degree())?;
        if let Some(g) = self.guard {
            prof.guard = g;
        }
        if let Some(x) = self.x_degree {
            prof.x_degree = x;
        }
        prof.validate()?;
        Ok(prof)
    }
}
