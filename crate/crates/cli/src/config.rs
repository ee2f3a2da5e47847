//! Run configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tmk::zoo::{self, ConnectionEntry, CustomConnection, RhoSpec, WeylSpec};
use tmk::{Model, SampleSpec};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub samples: SampleSpec,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// `RunConfig` before the model object is dispatched on its `kind`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: serde_json::Value,
    samples: SampleSpec,
    #[serde(default)]
    checks: Vec<Check>,
    #[serde(default)]
    output: Option<OutputConfig>,
}

/// Optional suites attached to a `classify` run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Symplectic,
    Oracle,
    Identities,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Statistical(StatisticalConfig),
    RhoNormalForm(NormalFormConfig),
    Weyl(WeylConfig),
    Custom(CustomConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatisticalConfig {
    /// Matrix size of `ρ`.
    pub n: usize,
    /// One symmetric `n x n` matrix per parameter.
    pub basis: Vec<Vec<Vec<f64>>>,
    pub domain_box: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalFormConfig {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "box")]
    pub domain_box: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylConfig {
    pub n: usize,
    pub r: f64,
    /// Defaults to the positive flat value for the round sphere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    /// Rows of expression strings.
    pub metric: Vec<Vec<String>>,
    pub connection: CustomConnectionConfig,
    #[serde(rename = "box")]
    pub domain_box: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CustomConnectionConfig {
    LeviCivita,
    Flat,
    Entries(Vec<ConnectionEntry>),
}

impl WeylConfig {
    pub fn spec(&self) -> WeylSpec {
        let k = self.k.unwrap_or_else(|| {
            let n = self.n.max(3);
            let s_n = ((n - 1) * (n - 2)) as f64 / (self.r * self.r);
            zoo::flat_k_for(n, s_n).map(|(k, _)| k).unwrap_or(0.0)
        });
        WeylSpec::new(self.n, self.r, k, self.lambda)
    }
}

fn config_error(pointer: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        pointer: pointer.into(),
        message: message.into(),
    }
}

impl ModelConfig {
    /// Parse the `model` object, keeping JSON pointers below `/model`.
    pub fn from_value(mut value: serde_json::Value) -> Result<ModelConfig, CliError> {
        let obj = value
            .as_object_mut()
            .ok_or_else(|| config_error("/model", "expected an object"))?;
        let kind = match obj.remove("kind") {
            Some(serde_json::Value::String(k)) => k,
            Some(_) => return Err(config_error("/model/kind", "expected a string")),
            None => return Err(config_error("/model/kind", "missing field `kind`")),
        };
        fn part<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, CliError> {
            serde_path_to_error::deserialize(v).map_err(|e| CliError::Config {
                pointer: format!("/model{}", pointer(e.path())),
                message: e.inner().to_string(),
            })
        }
        match kind.as_str() {
            "statistical" => Ok(ModelConfig::Statistical(part(value)?)),
            "rho_normal_form" => Ok(ModelConfig::RhoNormalForm(part(value)?)),
            "weyl" => Ok(ModelConfig::Weyl(part(value)?)),
            "custom" => Ok(ModelConfig::Custom(part(value)?)),
            other => Err(config_error(
                "/model/kind",
                format!("unknown model kind `{other}`, expected statistical, rho_normal_form, weyl or custom"),
            )),
        }
    }

    pub fn build(&self) -> Result<Model, CliError> {
        match self {
            ModelConfig::Statistical(c) => {
                let n = c.n;
                let mut flat = Vec::with_capacity(c.basis.len());
                for (a, b) in c.basis.iter().enumerate() {
                    if b.len() != n || b.iter().any(|row| row.len() != n) {
                        return Err(config_error(format!("/model/basis/{a}"), format!("expected a {n} x {n} matrix")));
                    }
                    flat.push(b.iter().flatten().copied().collect());
                }
                let spec = RhoSpec {
                    n,
                    basis: flat,
                    domain_box: c.domain_box.clone(),
                };
                Ok(zoo::build_statistical_model(&spec)?)
            }
            ModelConfig::RhoNormalForm(c) => {
                let spec = zoo::build_rho_normal_form(c.a, c.b, c.domain_box)?;
                let mut m = zoo::build_statistical_model(&spec)?;
                m.name = format!("rho_normal_form(a={}, b={})", c.a, c.b);
                Ok(m)
            }
            ModelConfig::Weyl(c) => Ok(zoo::weyl(&c.spec())?),
            ModelConfig::Custom(c) => {
                let n = c.n;
                if c.metric.len() != n || c.metric.iter().any(|row| row.len() != n) {
                    return Err(config_error("/model/metric", format!("expected {n} rows of {n} expressions")));
                }
                let exprs: Vec<String> = c.metric.iter().flatten().cloned().collect();
                let conn = match &c.connection {
                    CustomConnectionConfig::LeviCivita => CustomConnection::LeviCivita,
                    CustomConnectionConfig::Flat => CustomConnection::Flat,
                    CustomConnectionConfig::Entries(e) => CustomConnection::Entries(e.clone()),
                };
                let mut m = zoo::build_custom(n, &exprs, &conn, c.domain_box.clone())?;
                if let Some(name) = &c.name {
                    m.name = name.clone();
                }
                Ok(m)
            }
        }
    }
}

/// JSON pointer for a serde path.
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| CliError::Config {
            pointer: pointer(e.path()),
            message: e.inner().to_string(),
        })?;
        let cfg = RunConfig {
            model: ModelConfig::from_value(raw.model)?,
            samples: raw.samples,
            checks: raw.checks,
            output: raw.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        RunConfig::from_json(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.samples.count == 0 {
            return Err(CliError::Config {
                pointer: "/samples/count".into(),
                message: "count must be at least 1".into(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointer_names_the_bad_field() {
        let err = RunConfig::from_json(r#"{"model": {"kind": "weyl", "n": "three", "r": 1, "lambda": 0}, "samples": {"seed": 1, "count": 2}}"#)
            .unwrap_err();
        match err {
            CliError::Config { pointer, .. } => assert_eq!(pointer, "/model/n"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seed_is_required() {
        let err = RunConfig::from_json(r#"{"model": {"kind": "weyl", "n": 3, "r": 1, "lambda": 0}, "samples": {"count": 2}}"#)
            .unwrap_err();
        assert!(matches!(err, CliError::Config { .. }));
    }

    #[test]
    fn weyl_k_defaults_to_flat_value() {
        let m = WeylConfig {
            n: 3,
            r: 1.0,
            k: None,
            lambda: 0.0,
        };
        assert!((m.spec().k - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_kind_and_field() {
        let err = RunConfig::from_json(r#"{"model": {"kind": "sphere"}, "samples": {"seed": 1, "count": 2}}"#).unwrap_err();
        assert!(matches!(err, CliError::Config { ref pointer, .. } if pointer == "/model/kind"));
        let err = RunConfig::from_json(
            r#"{"model": {"kind": "weyl", "n": 3, "r": 1, "lambda": 0, "mu": 1}, "samples": {"seed": 1, "count": 2}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Config { ref pointer, .. } if pointer.starts_with("/model")), "{err}");
    }

    #[test]
    fn zero_count_rejected() {
        let err = RunConfig::from_json(r#"{"model": {"kind": "weyl", "n": 3, "r": 1, "lambda": 0}, "samples": {"seed": 1, "count": 0}}"#)
            .unwrap_err();
        match err {
            CliError::Config { pointer, .. } => assert_eq!(pointer, "/samples/count"),
            other => panic!("{other:?}"),
        }
    }
}
