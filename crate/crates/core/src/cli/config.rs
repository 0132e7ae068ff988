//! Run configuration: method strings, TOML files and the manifest echo.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{Family, MethodSpec};
use crate::lasso::{PenaltyKind, PenaltySpec};
use crate::simlab::DgpConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Simulate,
    Grid,
    Apply,
    Replicate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    #[default]
    Csv,
    Json,
    Both,
}

impl Emit {
    pub fn csv(self) -> bool {
        matches!(self, Emit::Csv | Emit::Both)
    }
    pub fn json(self) -> bool {
        matches!(self, Emit::Json | Emit::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    Tau,
    Alpha,
}

/// Everything a job needs; echoed into the manifest so the job can be
/// re-run from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Replication recipe name (`replicate` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dgp: Option<DgpConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub psi_d_grid: Vec<f64>,
    pub methods: Vec<MethodSpec>,
    pub reps: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub emit: Emit,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweeps: Vec<Sweep>,
    /// Refit without this control (`apply`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drop_var: Option<String>,
    /// Report per-equation t-statistics of this control (`apply`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track_var: Option<String>,
    #[serde(default = "default_level")]
    pub level: f64,
}

fn default_level() -> f64 {
    crate::estimators::DEFAULT_LEVEL
}

impl RunConfig {
    pub fn new(command: Command, out_dir: PathBuf) -> Self {
        RunConfig {
            command,
            preset: None,
            dgp: None,
            rho_grid: vec![],
            psi_d_grid: vec![],
            methods: vec![],
            reps: 1,
            seed: 0,
            data_path: None,
            out_dir,
            emit: Emit::Csv,
            sweeps: vec![],
            drop_var: None,
            track_var: None,
            level: default_level(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::Config("reps must be >= 1".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Config(format!("level must lie in (0, 1), got {}", self.level)));
        }
        for m in &self.methods {
            m.validate()?;
        }
        match self.command {
            Command::Simulate | Command::Grid => {
                let dgp = self
                    .dgp
                    .as_ref()
                    .ok_or_else(|| Error::Config("a DGP is required".into()))?;
                dgp.validate()?;
                if self.reps < 2 {
                    return Err(Error::Config("simulation needs reps >= 2".into()));
                }
                if self.methods.is_empty() {
                    return Err(Error::Config("no methods given".into()));
                }
                if self.command == Command::Grid
                    && (self.rho_grid.is_empty() || self.psi_d_grid.is_empty())
                {
                    return Err(Error::Config("grid needs rho_grid and psi_d_grid".into()));
                }
            }
            Command::Apply => {
                if self.data_path.is_none() {
                    return Err(Error::Config("apply needs a data file".into()));
                }
                if self.methods.is_empty() && self.sweeps.is_empty() {
                    return Err(Error::Config("no methods given".into()));
                }
            }
            Command::Replicate => {
                if self.preset.is_none() {
                    return Err(Error::Config("replicate needs a preset".into()));
                }
            }
        }
        Ok(())
    }
}

/// Parse a penalty token: `bya`, `bcch`, `min`, `1se` or a number (a
/// fixed penalty), with optional `*SCALE` suffix, e.g. `min*2.5`.
pub fn parse_penalty(token: &str) -> Result<PenaltySpec> {
    let (base, scale) = match token.split_once('*') {
        Some((b, s)) => (
            b,
            s.parse::<f64>()
                .map_err(|_| Error::Usage(format!("bad penalty scale in `{token}`")))?,
        ),
        None => (token, 1.0),
    };
    let spec = match base {
        "bya" => PenaltySpec::bya(),
        "bcch" => PenaltySpec::bcch(),
        "min" => PenaltySpec::cv_min(),
        "1se" => PenaltySpec::cv_1se(),
        other => match other.parse::<f64>() {
            Ok(l) => PenaltySpec::fixed(l),
            Err(_) => return Err(Error::Usage(format!("unknown penalty `{token}`"))),
        },
    };
    let spec = spec.with_scale(scale);
    spec.validate().map_err(|e| Error::Usage(e.to_string()))?;
    Ok(spec)
}

/// Parse `FAMILY[:TUNING]`, e.g. `post_double_lasso:min`, `autometrics:0.05`
/// or `ols_all`.
pub fn parse_method(text: &str) -> Result<MethodSpec> {
    let (name, tuning) = match text.split_once(':') {
        Some((n, t)) => (n, Some(t)),
        None => (text, None),
    };
    let family =
        Family::from_name(name).ok_or_else(|| Error::Usage(format!("unknown method `{name}`")))?;
    if family.is_lasso() {
        let pen = parse_penalty(tuning.ok_or_else(|| {
            Error::Usage(format!("`{name}` needs a penalty, e.g. `{name}:min`"))
        })?)?;
        MethodSpec::from_parts(family, Some(pen), None)
    } else if family.is_gets() {
        let a = tuning
            .ok_or_else(|| Error::Usage(format!("`{name}` needs alpha, e.g. `{name}:0.05`")))?
            .parse::<f64>()
            .map_err(|_| Error::Usage(format!("bad alpha in `{text}`")))?;
        MethodSpec::from_parts(family, None, Some(a))
    } else if tuning.is_some() {
        Err(Error::Usage(format!("`{name}` takes no tuning")))
    } else {
        MethodSpec::from_parts(family, None, None)
    }
    .map_err(|e| match e {
        Error::Config(m) => Error::Usage(m),
        other => other,
    })
}

/// Inverse of [`parse_method`].
pub fn method_string(m: &MethodSpec) -> String {
    let name = m.family.name();
    if let Some(p) = &m.penalty {
        let base = match p.kind {
            PenaltyKind::Fixed => format!("{}", p.lambda.unwrap_or(0.0)),
            PenaltyKind::Bya => "bya".into(),
            PenaltyKind::Bcch => "bcch".into(),
            PenaltyKind::CvMin => "min".into(),
            PenaltyKind::Cv1se => "1se".into(),
        };
        if p.scale != 1.0 {
            format!("{name}:{base}*{}", p.scale)
        } else {
            format!("{name}:{base}")
        }
    } else if let Some(g) = &m.gets {
        format!("{name}:{}", g.alpha)
    } else {
        name.to_string()
    }
}

/// One command section of a TOML configuration file. Keys mirror the CLI
/// flags; DGP keys sit next to them.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSection {
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub emit: Option<Emit>,
    pub methods: Option<Vec<String>>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub rho: Option<f64>,
    pub sigma2_eps: Option<f64>,
    pub sigma2_eta: Option<f64>,
    pub psi_y: Option<f64>,
    pub psi_d: Option<f64>,
    pub n_relevant: Option<usize>,
    pub delta: Option<f64>,
    pub rho_grid: Option<Vec<f64>>,
    pub psi_d_grid: Option<Vec<f64>>,
    pub data: Option<PathBuf>,
    pub level: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub simulate: FileSection,
    #[serde(default)]
    pub grid: FileSection,
    #[serde(default)]
    pub apply: FileSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(toml::from_str(&text)?)
    }

    pub fn section(&self, command: Command) -> &FileSection {
        match command {
            Command::Simulate => &self.simulate,
            Command::Grid => &self.grid,
            _ => &self.apply,
        }
    }
}

impl FileSection {
    /// DGP from the section, falling back to the baseline design for any
    /// missing key.
    pub fn dgp(&self) -> DgpConfig {
        let base = DgpConfig::new(400, 210, 0.0, 2.5, 4.0);
        DgpConfig {
            n: self.n.unwrap_or(base.n),
            p: self.p.unwrap_or(base.p),
            rho: self.rho.unwrap_or(base.rho),
            sigma2_eps: self.sigma2_eps.unwrap_or(base.sigma2_eps),
            sigma2_eta: self.sigma2_eta.unwrap_or(base.sigma2_eta),
            psi_y: self.psi_y.unwrap_or(base.psi_y),
            psi_d: self.psi_d.unwrap_or(base.psi_d),
            n_relevant: self.n_relevant.unwrap_or(base.n_relevant),
            delta: self.delta.unwrap_or(base.delta),
        }
    }

    pub fn methods(&self) -> Result<Vec<MethodSpec>> {
        self.methods
            .iter()
            .flatten()
            .map(|m| parse_method(m))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_strings_round_trip() {
        for s in [
            "post_double_lasso:min",
            "post_lasso:bya",
            "post_double_adaptive_lasso:1se*0.5",
            "post_double_autometrics:0.05",
            "autometrics:0.01",
            "ols_all",
            "post_lasso:0.25",
        ] {
            assert_eq!(method_string(&parse_method(s).unwrap()), s);
        }
    }

    #[test]
    fn bad_methods_are_usage_errors() {
        for s in ["lasso:min", "post_lasso", "autometrics", "ols_none:0.1", "post_lasso:big"] {
            assert!(matches!(parse_method(s), Err(Error::Usage(_))), "{s}");
        }
    }

    #[test]
    fn file_sections() {
        let f: ConfigFile = toml::from_str(
            "[simulate]\nreps = 5\nn = 100\np = 20\nmethods = [\"ols_all\"]\n[grid]\nrho_grid = [0.0, 0.5]\n",
        )
        .unwrap();
        assert_eq!(f.simulate.reps, Some(5));
        assert_eq!(f.simulate.dgp().n, 100);
        assert_eq!(f.simulate.dgp().psi_y, 2.5);
        assert_eq!(f.grid.rho_grid.as_deref(), Some(&[0.0, 0.5][..]));
        assert!(toml::from_str::<ConfigFile>("[simulate]\nbogus = 1\n").is_err());
    }
}
