//! Run configuration: a TOML file naming the data CSV, the signature, the
//! scaling factors and an optional shape constraint.
//!
//! The data CSV has a `x,y[,z]` row per knot (an optional header line is
//! skipped). When the CSV has no `z` column the config must supply one.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::ConfigError;
use crate::model::{ContractionMode, ExtendedDataSet, FactorFunction, ScalingFamily, Signature};
use crate::shape::{Line, ShapeMode, ShapeSpec, DEFAULT_OMEGA};

/// One factor per subinterval: a bare number is a constant factor, a pair
/// `[c0, c1]` is the affine factor `c0 + c1 * x`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum FactorEntry {
    Constant(f64),
    Affine([f64; 2]),
}

impl From<FactorEntry> for FactorFunction {
    fn from(e: FactorEntry) -> Self {
        match e {
            FactorEntry::Constant(c0) => FactorFunction::constant(c0),
            FactorEntry::Affine([c0, c1]) => FactorFunction::affine(c0, c1),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorsConfig {
    pub p: Vec<FactorEntry>,
    pub q: Vec<FactorEntry>,
    pub p_tilde: Vec<FactorEntry>,
    pub q_tilde: Vec<FactorEntry>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineConfig {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeConfig {
    Rectangle {
        k1: f64,
        k2: f64,
        k1_tilde: f64,
        k2_tilde: f64,
    },
    Positivity,
    LinesBelow {
        lines: Vec<LineConfig>,
    },
    LinesAbove {
        lines: Vec<LineConfig>,
    },
    LinesBetween {
        lower: Vec<LineConfig>,
        upper: Vec<LineConfig>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContractionConfig {
    Strict,
    Relaxed,
}

impl Default for ContractionConfig {
    fn default() -> Self {
        ContractionConfig::Strict
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderConfig {
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_depth() -> u32 {
    6
}

fn default_tol() -> f64 {
    1e-9
}

fn default_samples() -> usize {
    100_000
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            depth: default_depth(),
            tol: default_tol(),
            samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    /// CSV path, relative to the config file.
    pub data: PathBuf,
    pub signature: Vec<u8>,
    /// Hidden coordinates, required when the CSV has two columns.
    #[serde(default)]
    pub z: Option<Vec<f64>>,
    #[serde(default)]
    pub contraction: ContractionConfig,
    #[serde(default)]
    pub omega: Option<f64>,
    pub factors: FactorsConfig,
    #[serde(default)]
    pub shape: Option<ShapeConfig>,
    #[serde(default)]
    pub render: RenderConfig,
}

/// Fully resolved run: validated data plus everything needed to build the
/// system and evaluate shape bounds.
#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub name: String,
    pub data: ExtendedDataSet,
    pub sig: Signature,
    pub fam: ScalingFamily,
    pub mode: ContractionMode,
    pub omega: f64,
    pub shape: Option<ShapeSpec>,
    pub render: RenderConfig,
}

pub fn load_config(path: &Path) -> Result<LoadedRun, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let cfg: RunConfig = toml::from_str(&text).map_err(|source| ConfigError::Toml {
        path: path.display().to_string(),
        source,
    })?;
    resolve(cfg, path.parent().unwrap_or(Path::new(".")))
}

/// Resolves a parsed config against `base` (directory for relative paths).
pub fn resolve(cfg: RunConfig, base: &Path) -> Result<LoadedRun, ConfigError> {
    let csv_path = if cfg.data.is_absolute() {
        cfg.data.clone()
    } else {
        base.join(&cfg.data)
    };
    let (x, y, z_csv) = read_data_csv(&csv_path)?;
    let z = match (z_csv, cfg.z) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::Invalid(
                "z given both in the CSV and in the config".into(),
            ))
        }
        (Some(z), None) => z,
        (None, Some(z)) => z,
        (None, None) => vec![0.0; x.len()],
    };
    let data = ExtendedDataSet::new(x, y, z)?;
    let sig = Signature::new(cfg.signature)?;
    let to_funcs = |v: &[FactorEntry]| v.iter().map(|&e| e.into()).collect();
    let fam = ScalingFamily {
        p: to_funcs(&cfg.factors.p),
        q: to_funcs(&cfg.factors.q),
        p_tilde: to_funcs(&cfg.factors.p_tilde),
        q_tilde: to_funcs(&cfg.factors.q_tilde),
    };
    let mode = match cfg.contraction {
        ContractionConfig::Strict => ContractionMode::Strict,
        ContractionConfig::Relaxed => ContractionMode::Relaxed,
    };
    let omega = cfg.omega.unwrap_or(DEFAULT_OMEGA);
    let shape = cfg.shape.map(|s| ShapeSpec {
        omega,
        mode: match s {
            ShapeConfig::Rectangle { k1, k2, k1_tilde, k2_tilde } => ShapeMode::Rectangle {
                k1,
                k2,
                k1_tilde,
                k2_tilde,
            },
            ShapeConfig::Positivity => ShapeMode::Positivity,
            ShapeConfig::LinesBelow { lines } => ShapeMode::LinesBelow {
                lines: to_lines(&lines),
            },
            ShapeConfig::LinesAbove { lines } => ShapeMode::LinesAbove {
                lines: to_lines(&lines),
            },
            ShapeConfig::LinesBetween { lower, upper } => ShapeMode::LinesBetween {
                lower: to_lines(&lower),
                upper: to_lines(&upper),
            },
        },
    });
    Ok(LoadedRun {
        name: cfg.name,
        data,
        sig,
        fam,
        mode,
        omega,
        shape,
        render: cfg.render,
    })
}

fn to_lines(v: &[LineConfig]) -> Vec<Line> {
    v.iter()
        .map(|l| Line {
            slope: l.slope,
            intercept: l.intercept,
        })
        .collect()
}

/// Reads `x,y[,z]` rows; a non-numeric first line is treated as a header.
pub fn read_data_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Option<Vec<f64>>), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let err = |line: usize, msg: String| ConfigError::Csv {
        path: path.display().to_string(),
        line,
        msg,
    };
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut z = Vec::new();
    let mut cols: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if x.is_empty() && cols.is_none() && fields.iter().any(|f| f.parse::<f64>().is_err()) {
            continue; // header
        }
        if !(2..=3).contains(&fields.len()) {
            return Err(err(idx + 1, format!("expected 2 or 3 columns, got {}", fields.len())));
        }
        match cols {
            None => cols = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(err(idx + 1, "inconsistent column count".into()))
            }
            _ => {}
        }
        let mut parsed = fields.iter().map(|f| {
            f.parse::<f64>()
                .map_err(|e| err(idx + 1, format!("bad number {f:?}: {e}")))
        });
        x.push(parsed.next().unwrap()?);
        y.push(parsed.next().unwrap()?);
        if let Some(v) = parsed.next() {
            z.push(v?);
        }
    }
    if x.is_empty() {
        return Err(err(0, "no data rows".into()));
    }
    Ok((x, y, if z.is_empty() { None } else { Some(z) }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("zipfif-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn loads_a_three_column_csv_and_full_config() {
        let csv = write_temp(
            "full.csv",
            "x,y,z\n-1,-4,-3\n-0.5,2,1\n0,0,-2\n0.5,3,4\n1,-2,2\n",
        );
        let toml_text = format!(
            r#"
name = "demo"
data = "{}"
signature = [0, 1, 0, 1]
omega = 0.9

[factors]
p = [0.5, -0.18, 0.53, -0.17]
q = [0.17, -0.054, 0.053, -0.034]
p_tilde = [0.36, -0.21, 0.33, -0.18]
q_tilde = [0.29, -0.05, 0.22, -0.14]

[shape]
mode = "rectangle"
k1 = -10.0
k2 = 10.0
k1_tilde = -6.0
k2_tilde = 8.0
"#,
            csv.display()
        );
        let cfg = write_temp("full.toml", &toml_text);
        let run = load_config(&cfg).unwrap();
        assert_eq!(run.name, "demo");
        assert_eq!(run.data.n(), 4);
        assert_eq!(run.omega, 0.9);
        assert_eq!(run.mode, ContractionMode::Strict);
        assert!(matches!(
            run.shape.unwrap().mode,
            ShapeMode::Rectangle { k1: -10.0, .. }
        ));
    }

    #[test]
    fn two_column_csv_takes_z_from_the_config() {
        let csv = write_temp("twocol.csv", "0,1\n0.5,2\n1,0\n");
        let toml_text = format!(
            r#"
name = "twocol"
data = "{}"
signature = [0, 1]
z = [0.5, 1.5, 0.25]
contraction = "relaxed"

[factors]
p = [0.3, [0.1, 0.05]]
q = [0.0, 0.0]
p_tilde = [0.0, 0.0]
q_tilde = [0.2, 0.2]
"#,
            csv.display()
        );
        let cfg = write_temp("twocol.toml", &toml_text);
        let run = load_config(&cfg).unwrap();
        assert_eq!(run.data.z(), &[0.5, 1.5, 0.25]);
        assert_eq!(run.mode, ContractionMode::Relaxed);
        assert_eq!(run.fam.p[1].c1, 0.05);
        assert_eq!(run.omega, DEFAULT_OMEGA);
    }

    #[test]
    fn rejects_duplicate_z() {
        let csv = write_temp("dupz.csv", "0,1,0\n0.5,2,0\n1,0,0\n");
        let toml_text = format!(
            r#"
name = "dup"
data = "{}"
signature = [0, 1]
z = [0.0, 0.0, 0.0]

[factors]
p = [0.0, 0.0]
q = [0.0, 0.0]
p_tilde = [0.0, 0.0]
q_tilde = [0.0, 0.0]
"#,
            csv.display()
        );
        let cfg = write_temp("dupz.toml", &toml_text);
        assert!(matches!(
            load_config(&cfg),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_csv() {
        let cfg = write_temp("bad.toml", "name = \"x\"\nbogus = 1\n");
        assert!(matches!(load_config(&cfg), Err(ConfigError::Toml { .. })));

        let csv = write_temp("bad.csv", "0,1\n0.5\n");
        assert!(matches!(
            read_data_csv(&csv),
            Err(ConfigError::Csv { line: 2, .. })
        ));
    }
}
