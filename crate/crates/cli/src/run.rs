//! The three commands.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;
use tmk::bundle::classify::{StructureReport, FLAG_TOL};
use tmk::geometry::{identity_residuals, IdentityResiduals};
use tmk::symplectic::{symplectic_match, SymplecticMatch};
use tmk::zoo::{self, Model};

use crate::config::{Check, Format, ModelConfig, RunConfig};
use crate::output::json_bytes;
use crate::CliError;

/// Serialised result and the exit code it calls for.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub exit_code: i32,
    pub format: Format,
}

const IDENTITY_TOL: f64 = 1e-9;

/// 2 when a report carries violations or a requested suite failed.
pub fn exit_code_for(clean: bool) -> i32 {
    if clean {
        0
    } else {
        2
    }
}

const ORACLE_KEYS: [&str; 4] = [
    "curvature_lifted_vs_oracle",
    "ricci_lifted_vs_oracle",
    "d_omega_lifted_vs_oracle",
    "nijenhuis_lifted_vs_oracle",
];

#[derive(Debug, Clone, Serialize)]
pub struct OracleSuite {
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleSuite {
    fn from_report(r: &StructureReport) -> OracleSuite {
        let residuals: BTreeMap<String, f64> = ORACLE_KEYS.iter().map(|k| (k.to_string(), r.residual(k))).collect();
        let pass = residuals.values().all(|v| *v <= FLAG_TOL);
        OracleSuite {
            residuals,
            tolerance: FLAG_TOL,
            pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitySuite {
    /// Suprema over the sampled base points.
    pub residuals: IdentityResiduals,
    pub tolerance: f64,
    pub pass: bool,
}

fn identity_suite(model: &Model, cfg: &RunConfig) -> Result<IdentitySuite, CliError> {
    let mut worst: Option<IdentityResiduals> = None;
    for p in cfg.samples.points(model.dim(), &model.base_box)? {
        let r = identity_residuals(&model.metric, &model.connection, &p.x).map_err(|e| e.at_sample(&p.coords()))?;
        worst = Some(match worst {
            None => r,
            Some(w) => IdentityResiduals {
                dual_torsion: w.dual_torsion.max(r.dual_torsion),
                dual_curvature: w.dual_curvature.max(r.dual_curvature),
                involution: w.involution.max(r.involution),
                first_bianchi: match (w.first_bianchi, r.first_bianchi) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    _ => None,
                },
                levi_civita: w.levi_civita.max(r.levi_civita),
            },
        });
    }
    let residuals = worst.expect("sample count is at least 1");
    Ok(IdentitySuite {
        pass: residuals.max() <= IDENTITY_TOL,
        residuals,
        tolerance: IDENTITY_TOL,
    })
}

#[derive(Serialize)]
struct ClassifyOutput<'a> {
    #[serde(flatten)]
    report: &'a StructureReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    symplectic: Option<SymplecticMatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleSuite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    identities: Option<IdentitySuite>,
}

pub fn classify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.model.build()?;
    let mut report = tmk::classify(&model, &cfg.samples)?;
    let (mut symplectic, mut oracle, mut identities) = (None, None, None);
    let mut extra = Vec::new();
    for check in &cfg.checks {
        match check {
            Check::Symplectic => {
                let m = symplectic_match(&model, &cfg.samples)?;
                if !m.matches_torsion {
                    extra.push("symplectic match disagrees with the dual torsion".to_string());
                }
                symplectic = Some(m);
            }
            Check::Oracle => {
                let s = OracleSuite::from_report(&report);
                if !s.pass {
                    extra.push("oracle suite failed".to_string());
                }
                oracle = Some(s);
            }
            Check::Identities => {
                let s = identity_suite(&model, cfg)?;
                if !s.pass {
                    extra.push("identity suite failed".to_string());
                }
                identities = Some(s);
            }
        }
    }
    report.violations.extend(extra);
    let out = ClassifyOutput {
        report: &report,
        symplectic,
        oracle,
        identities,
    };
    Ok(Outcome {
        bytes: json_bytes("classify", &out),
        exit_code: exit_code_for(report.violations.is_empty()),
        format: Format::Json,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Oracle,
    Identities,
    All,
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Suite, CliError> {
        match s {
            "oracle" => Ok(Suite::Oracle),
            "identities" => Ok(Suite::Identities),
            "all" => Ok(Suite::All),
            other => Err(CliError::Argument(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Serialize)]
struct VerifyOutput {
    model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleSuite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    identities: Option<IdentitySuite>,
    pass: bool,
}

pub fn verify(cfg: &RunConfig, suite: Suite) -> Result<Outcome, CliError> {
    let model = cfg.model.build()?;
    let oracle = match suite {
        Suite::Oracle | Suite::All => Some(OracleSuite::from_report(&tmk::classify(&model, &cfg.samples)?)),
        Suite::Identities => None,
    };
    let identities = match suite {
        Suite::Identities | Suite::All => Some(identity_suite(&model, cfg)?),
        Suite::Oracle => None,
    };
    let pass = oracle.as_ref().map_or(true, |s| s.pass) && identities.as_ref().map_or(true, |s| s.pass);
    let out = VerifyOutput {
        model: model.name.clone(),
        oracle,
        identities,
        pass,
    };
    Ok(Outcome {
        bytes: json_bytes("verify", &out),
        exit_code: exit_code_for(pass),
        format: Format::Json,
    })
}

/// Inclusive grid `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let v = self.start + i as f64 * self.step;
                (v * 1e9).round() / 1e9
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Grid, CliError> {
        let bad = || CliError::Argument(format!("grid `{s}` is not of the form start:stop:step"));
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
            return Err(bad());
        }
        Ok(Grid { start, stop, step })
    }
}

#[derive(Debug, Serialize)]
struct ScanRow {
    lambda: f64,
    status: &'static str,
    einstein_residual: Option<f64>,
    einstein_constant: Option<f64>,
    einstein: Option<bool>,
    signature_pos: Option<usize>,
    signature_neg: Option<usize>,
    violations: usize,
}

pub fn scan_lambda(cfg: &RunConfig, grid: &Grid) -> Result<Outcome, CliError> {
    let base = match &cfg.model {
        ModelConfig::Weyl(c) => c.spec(),
        _ => {
            return Err(CliError::Config {
                pointer: "/model/kind".into(),
                message: "scan-lambda needs a weyl model".into(),
            })
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for lambda in grid.values() {
        let mut spec = base;
        spec.lambda = lambda;
        let row = match zoo::weyl(&spec) {
            Err(tmk::Error::DegenerateLambda(_)) => ScanRow {
                lambda,
                status: "degenerate",
                einstein_residual: None,
                einstein_constant: None,
                einstein: None,
                signature_pos: None,
                signature_neg: None,
                violations: 0,
            },
            Err(e) => return Err(e.into()),
            Ok(model) => {
                let r = tmk::classify(&model, &cfg.samples)?;
                ScanRow {
                    lambda,
                    status: "ok",
                    einstein_residual: Some(r.residual("einstein")),
                    einstein_constant: r.einstein_constant_estimate,
                    einstein: Some(r.flag("einstein")),
                    signature_pos: Some(r.signature[0]),
                    signature_neg: Some(r.signature[1]),
                    violations: r.violations.len(),
                }
            }
        };
        w.serialize(&row).map_err(|e| CliError::Argument(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Argument(e.to_string()))?;
    Ok(Outcome {
        bytes,
        exit_code: 0,
        format: Format::Csv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "-3:1:0.5".parse().unwrap();
        assert_eq!(g.values(), vec![-3.0, -2.5, -2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!("1:0:1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
    }

    #[test]
    fn failed_suite_maps_to_two() {
        assert_eq!(exit_code_for(true), 0);
        assert_eq!(exit_code_for(false), 2);
    }

    #[test]
    fn suite_names() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("everything".parse::<Suite>().is_err());
    }
}
