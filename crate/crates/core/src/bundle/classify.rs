//! Classification of the structure `(J, g̃)` induced by a model over a seeded
//! sample set.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::lifted::{e_condition_totals, CurvaturePattern, FormPattern, Lifted, RicciPattern};
use crate::bundle::oracle::{BundleCurvature, BundleJets};
use crate::bundle::sampling::SampleSpec;
use crate::bundle::{connection_matrix, frame_from_matrix, kahler_form_from, Lift, LiftedFrame, TangentPoint};
use crate::error::Result;
use crate::geometry::{koszul_forms, tensor_norm_sq, unit_vectors, LocalGeometry};
use crate::symplectic::pullback_form_at;
use crate::zoo::Model;

/// Residuals at or below this count as zero.
pub const FLAG_TOL: f64 = 1e-8;
/// Residuals at or above this count as definitely nonzero.
pub const NONZERO_TOL: f64 = 1e-3;

/// A classification flag and the residual that decided it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagEntry {
    pub value: bool,
    pub residual: String,
    pub measured: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub model: String,
    pub dim: usize,
    pub flags: BTreeMap<String, FlagEntry>,
    /// Suprema over the samples.
    pub residuals: BTreeMap<String, f64>,
    /// Least-squares `c` in `Ric̃ ≈ c g̃` over all samples.
    pub einstein_constant_estimate: Option<f64>,
    /// Least-squares `c'` in `β ≈ c' g` over all samples.
    pub hesse_einstein_constant_estimate: Option<f64>,
    /// Range of the holomorphic sectional curvature over the samples.
    pub holomorphic_sectional_curvature: Option<[f64; 2]>,
    /// Eigenvalue sign counts of `g` at the first sample.
    pub signature: [usize; 2],
    pub conventions: BTreeMap<String, String>,
    /// Consistency failures between flags, residuals and the theory.
    pub violations: Vec<String>,
    pub sample_spec: SampleSpec,
}

impl StructureReport {
    /// Value of a flag; panics on an unknown name.
    pub fn flag(&self, name: &str) -> bool {
        self.flags[name].value
    }

    pub fn residual(&self, name: &str) -> f64 {
        self.residuals[name]
    }
}

/// Everything measured at one sample.
#[derive(Debug, Clone)]
pub struct SampleResult {
    pub residuals: BTreeMap<&'static str, f64>,
    pub ricci: DMatrix<f64>,
    pub sasaki: DMatrix<f64>,
    pub beta: DMatrix<f64>,
    pub metric: DMatrix<f64>,
    pub holomorphic: Option<f64>,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

fn lifts(frame: &LiftedFrame, vs: &[&[f64]], kinds: &[Lift]) -> Vec<Vec<f64>> {
    vs.iter().zip(kinds).map(|(v, k)| frame.lift(v, *k)).collect()
}

/// Base index tuples of length `rank`.
fn tuples(n: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    crate::geometry::multi_indices(n, rank)
}

/// `sup |lifted − oracle| / (1 + sup |oracle|)` over all basis combinations
/// of the six curvature patterns.
pub fn curvature_mismatch(local: &LocalGeometry, curv: &BundleCurvature, frame: &LiftedFrame, xi: &[f64]) -> f64 {
    let lifted = Lifted::new(local, xi);
    let basis = unit_vectors(local.n);
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for pattern in CurvaturePattern::ALL {
        for idx in tuples(local.n, 4) {
            let (z, w, x, y) = (&basis[idx[0]], &basis[idx[1]], &basis[idx[2]], &basis[idx[3]]);
            let l = lifted.curvature(pattern, z, w, x, y);
            let v = lifts(frame, &[z, w, x, y], &pattern.lifts());
            let o = curv.riemann_g_apply(&v[0], &v[1], &v[2], &v[3]);
            diff = diff.max((l - o).abs());
            scale = scale.max(o.abs());
        }
    }
    diff / (1.0 + scale)
}

pub fn ricci_mismatch(local: &LocalGeometry, curv: &BundleCurvature, frame: &LiftedFrame, xi: &[f64]) -> f64 {
    let lifted = Lifted::new(local, xi);
    let basis = unit_vectors(local.n);
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for pattern in RicciPattern::ALL {
        for idx in tuples(local.n, 2) {
            let (x, y) = (&basis[idx[0]], &basis[idx[1]]);
            let l = lifted.ricci(pattern, x, y);
            let v = lifts(frame, &[x, y], &pattern.lifts());
            let o = curv.ricci_apply(&v[0], &v[1]);
            diff = diff.max((l - o).abs());
            scale = scale.max(o.abs());
        }
    }
    diff / (1.0 + scale)
}

fn d_omega_mismatch(local: &LocalGeometry, jets: &BundleJets, frame: &LiftedFrame, xi: &[f64]) -> f64 {
    let lifted = Lifted::new(local, xi);
    let basis = unit_vectors(local.n);
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for pattern in FormPattern::ALL {
        for idx in tuples(local.n, 3) {
            let (x, y, z) = (&basis[idx[0]], &basis[idx[1]], &basis[idx[2]]);
            let l = lifted.d_omega(pattern, x, y, z);
            let v = lifts(frame, &[x, y, z], &pattern.lifts());
            let o = jets.d_omega(&v[0], &v[1], &v[2]);
            diff = diff.max((l - o).abs());
            scale = scale.max(o.abs());
        }
    }
    diff / (1.0 + scale)
}

fn nijenhuis_mismatch(local: &LocalGeometry, jets: &BundleJets, frame: &LiftedFrame, xi: &[f64]) -> f64 {
    let lifted = Lifted::new(local, xi);
    let basis = unit_vectors(local.n);
    let n = local.n;
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for idx in tuples(n, 2) {
        let (x, y) = (&basis[idx[0]], &basis[idx[1]]);
        let (h, v) = lifted.nijenhuis(x, y);
        let chart: Vec<f64> = frame
            .lift(&h, Lift::H)
            .iter()
            .zip(frame.lift(&v, Lift::V))
            .map(|(a, b)| a + b)
            .collect();
        let o = jets.nijenhuis(&frame.lift(x, Lift::H), &frame.lift(y, Lift::H));
        for (a, b) in chart.iter().zip(&o) {
            diff = diff.max((a - b).abs());
            scale = scale.max(b.abs());
        }
    }
    diff / (1.0 + scale)
}

/// All measurements at one tangent point.
pub fn evaluate_sample(model: &Model, p: &TangentPoint) -> Result<SampleResult> {
    let (g, d) = (&*model.metric, &*model.connection);
    let n = model.dim();
    let m = 2 * n;
    let local = LocalGeometry::new(g, d, &p.x)?;
    let jets = BundleJets::new(g, d, p, 2)?;
    let curv = BundleCurvature::from_jets(&jets, p)?;
    let a = connection_matrix(&local.gamma, &p.xi);
    let frame = frame_from_matrix(&a);
    let gm = local.metric_matrix();

    let mut r: BTreeMap<&'static str, f64> = BTreeMap::new();
    let torsion_d = local.torsion.max_abs();
    let curvature_d = local.curvature.max_abs();
    let torsion_dstar = local.dual_torsion.max_abs();
    let curvature_dstar = local.dual_curvature.max_abs();
    r.insert("torsion_d", torsion_d);
    r.insert("curvature_d", curvature_d);
    r.insert("torsion_dstar", torsion_dstar);
    r.insert("curvature_dstar", curvature_dstar);
    r.insert("flatness_d", torsion_d.max(curvature_d));
    r.insert("flatness_dstar", torsion_dstar.max(curvature_dstar));
    r.insert("hessian", torsion_d.max(curvature_d).max(torsion_dstar).max(curvature_dstar));

    let chart = unit_vectors(m);
    let mut d_omega = 0.0f64;
    for idx in tuples(m, 3) {
        d_omega = d_omega.max(jets.d_omega(&chart[idx[0]], &chart[idx[1]], &chart[idx[2]]).abs());
    }
    r.insert("d_omega", d_omega);
    let mut nij = 0.0f64;
    for idx in tuples(m, 2) {
        let v = jets.nijenhuis(&chart[idx[0]], &chart[idx[1]]);
        nij = nij.max(v.iter().fold(0.0, |acc, x| acc.max(x.abs())));
    }
    r.insert("nijenhuis", nij);

    r.insert("curvature_lifted_vs_oracle", curvature_mismatch(&local, &curv, &frame, &p.xi));
    r.insert("ricci_lifted_vs_oracle", ricci_mismatch(&local, &curv, &frame, &p.xi));
    r.insert("d_omega_lifted_vs_oracle", d_omega_mismatch(&local, &jets, &frame, &p.xi));
    r.insert("nijenhuis_lifted_vs_oracle", nijenhuis_mismatch(&local, &jets, &frame, &p.xi));

    let gt = &curv.metric;
    let j = &curv.complex;
    let scale = 1.0 + max_abs(gt);
    r.insert("hermitian", max_abs(&(j.transpose() * gt * j - gt)) / scale);
    r.insert("complex_square", max_abs(&(j * j + DMatrix::identity(m, m))));
    let omega = kahler_form_from(&gm, &a);
    r.insert("kahler_form_consistency", max_abs(&(j.transpose() * gt - &omega)) / scale);
    r.insert("kahler_form_antisymmetry", max_abs(&(&omega + omega.transpose())));

    let ric = &curv.ricci;
    let ric_scale = 1.0 + max_abs(ric);
    r.insert("ricci_symmetry", max_abs(&(ric - ric.transpose())) / ric_scale);
    let jr = j.transpose() * ric * j;
    r.insert("ricci_j_invariance", max_abs(&(&jr - ric)) / ric_scale);
    r.insert("ricci_j_anti_invariance", max_abs(&(&jr + ric)) / ric_scale);

    let norm = tensor_norm_sq(&local.g, &local.curvature)?;
    let (left, right) = e_condition_totals(&local);
    r.insert("curvature_norm_sq", norm.abs());
    r.insert("e_condition_left", (left + 0.5 * norm).abs() / (1.0 + norm.abs()));
    r.insert("e_condition_right", (right - 0.25 * norm).abs() / (1.0 + norm.abs()));

    let pb = pullback_form_at(g, p)?;
    r.insert("symplectic_deviation", max_abs(&(pb - &omega)));

    let eig = gm.clone().symmetric_eigen().eigenvalues;
    r.insert("metric_min_eigenvalue", eig.iter().fold(f64::INFINITY, |a, v| a.min(*v)));

    let (_, beta) = koszul_forms(g, d, &p.x)?;
    let beta = DMatrix::from_fn(n, n, |i, k| beta.get(&[i, k]));

    let u = frame.lift(&unit_vectors(n)[0], Lift::H);
    let holomorphic = curv.holomorphic_sectional(&u).ok();

    Ok(SampleResult {
        residuals: r,
        ricci: ric.clone(),
        sasaki: gt.clone(),
        beta,
        metric: gm,
        holomorphic,
    })
}

/// Least-squares `c` with `a ≈ c b` over matching matrices, and the
/// largest entry of `a − c b`.
pub fn proportionality(pairs: &[(&DMatrix<f64>, &DMatrix<f64>)]) -> (f64, f64) {
    let (num, den) = pairs.iter().fold((0.0, 0.0), |(n, d), (a, b)| (n + a.dot(b), d + b.dot(b)));
    let c = if den > 0.0 { num / den } else { 0.0 };
    let res = pairs.iter().map(|(a, b)| max_abs(&(*a - *b * c))).fold(0.0, f64::max);
    (c, res)
}

fn conventions() -> BTreeMap<String, String> {
    let mut c = BTreeMap::new();
    let mut put = |k: &str, v: &str| {
        c.insert(k.to_string(), v.to_string());
    };
    put("curvature", "R(d_i, d_j) d_k = R^l_kij d_l; R_g(W, Z, X, Y) = g(R(X, Y)Z, W)");
    put("second_covariant_derivative", "(D^2_{XZ} g)(Y, W) = (D_X (D g))(Z, Y, W)");
    put("trace_dual_torsion", "Tr(T*)(X) = Tr{Z -> T*(Z, X)}");
    put("frame_sums", "sums over orthonormal frames evaluated as g^{ab} contractions");
    put("ricci", "Ric(X, Y) = Tr{Z -> R(Z, Y)X}");
    put("lifted_vs_oracle", "|lifted - oracle| / (1 + sup|oracle|) over coordinate basis tuples");
    c
}

/// Classify the structure induced by `model` over the samples of `spec`.
/// Samples are evaluated in parallel; the reduction is sequential in sample
/// order, so the report does not depend on scheduling.
pub fn classify(model: &Model, spec: &SampleSpec) -> Result<StructureReport> {
    let n = model.dim();
    let points = spec.points(n, &model.base_box)?;
    let results: Vec<SampleResult> = points
        .par_iter()
        .map(|p| evaluate_sample(model, p).map_err(|e| e.at_sample(&p.coords())))
        .collect::<Result<Vec<_>>>()?;

    let mut residuals: BTreeMap<String, f64> = BTreeMap::new();
    for res in &results {
        for (k, v) in &res.residuals {
            let e = residuals.entry(k.to_string()).or_insert(f64::NEG_INFINITY);
            *e = if *k == "metric_min_eigenvalue" {
                if e.is_infinite() {
                    *v
                } else {
                    e.min(*v)
                }
            } else {
                e.max(*v)
            };
        }
    }

    let ric_pairs: Vec<_> = results.iter().map(|r| (&r.ricci, &r.sasaki)).collect();
    let (c, einstein) = proportionality(&ric_pairs);
    residuals.insert("einstein".into(), einstein);
    let beta_pairs: Vec<_> = results.iter().map(|r| (&r.beta, &r.metric)).collect();
    let (c_beta, hesse) = proportionality(&beta_pairs);
    residuals.insert("hesse_einstein".into(), hesse);

    let hol: Vec<f64> = results.iter().filter_map(|r| r.holomorphic).collect();
    let holomorphic = if hol.is_empty() {
        None
    } else {
        Some([
            hol.iter().copied().fold(f64::INFINITY, f64::min),
            hol.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ])
    };

    let first = &results[0].metric;
    let sig = crate::geometry::signature(first);

    let get = |k: &str| residuals[k];
    let zero = |k: &str| get(k) <= FLAG_TOL;
    let mut flags = BTreeMap::new();
    let mut put = |name: &str, value: bool, key: &str| {
        flags.insert(
            name.to_string(),
            FlagEntry {
                value,
                residual: key.to_string(),
                measured: residuals[key],
            },
        );
    };
    let torsion_d_zero = zero("torsion_d");
    let torsion_dstar_zero = zero("torsion_dstar");
    let flat_d = zero("flatness_d");
    let flat_dstar = zero("flatness_dstar");
    let almost_kahler = torsion_dstar_zero;
    let kahler = almost_kahler && flat_d;
    let hessian = flat_d && flat_dstar;
    let einstein_flag = zero("einstein");
    put("torsion_d_zero", torsion_d_zero, "torsion_d");
    put("torsion_dstar_zero", torsion_dstar_zero, "torsion_dstar");
    put("flat_d", flat_d, "flatness_d");
    put("flat_dstar", flat_dstar, "flatness_dstar");
    put("almost_kahler", almost_kahler, "d_omega");
    put("kahler", kahler, "nijenhuis");
    put("hessian", hessian, "hessian");
    put("einstein_necessary_rd_zero", zero("curvature_d"), "curvature_d");
    put("einstein", einstein_flag, "einstein");
    put("hesse_einstein", hessian && zero("hesse_einstein"), "hesse_einstein");
    put("pseudo_riemannian", sig.1 > 0, "metric_min_eigenvalue");

    let mut violations = Vec::new();
    let mut check = |cond: bool, msg: &str| {
        if cond {
            violations.push(msg.to_string());
        }
    };
    check(almost_kahler && get("d_omega") > FLAG_TOL, "almost_kahler set but d_omega is not zero");
    check(
        get("torsion_dstar") >= NONZERO_TOL && get("d_omega") <= FLAG_TOL,
        "dual torsion is nonzero but d_omega vanishes",
    );
    check(kahler && get("nijenhuis") > FLAG_TOL, "kahler set but the Nijenhuis tensor is not zero");
    check(
        get("flatness_d") >= NONZERO_TOL && get("nijenhuis") <= FLAG_TOL,
        "D is not flat but the Nijenhuis tensor vanishes",
    );
    check(flat_d && get("nijenhuis") > FLAG_TOL, "D is flat but the Nijenhuis tensor is not zero");
    check(
        einstein_flag && get("curvature_d") > 1e-6,
        "Sasaki metric is Einstein while the curvature of D is not zero",
    );
    check(
        (get("symplectic_deviation") <= 1e-10 && get("torsion_dstar") >= NONZERO_TOL)
            || (get("symplectic_deviation") >= NONZERO_TOL && get("torsion_dstar") <= 1e-10),
        "pull-back of the canonical form disagrees with the dual torsion",
    );
    for key in [
        "curvature_lifted_vs_oracle",
        "ricci_lifted_vs_oracle",
        "d_omega_lifted_vs_oracle",
        "nijenhuis_lifted_vs_oracle",
    ] {
        check(get(key) > FLAG_TOL, &format!("{key} exceeds {FLAG_TOL:e}"));
    }
    check(get("hermitian") > 1e-10, "J is not g~-orthogonal");
    check(get("ricci_symmetry") > 1e-10, "oracle Ricci tensor is not symmetric");

    Ok(StructureReport {
        model: model.name.clone(),
        dim: n,
        flags,
        residuals,
        einstein_constant_estimate: Some(c),
        hesse_einstein_constant_estimate: Some(c_beta),
        holomorphic_sectional_curvature: holomorphic,
        signature: [sig.0, sig.1],
        conventions: conventions(),
        violations,
        sample_spec: spec.resolved(&model.base_box),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn euclidean_is_kahler_and_flat() {
        let r = classify(&zoo::euclidean(2), &SampleSpec::new(1, 3)).unwrap();
        for f in ["torsion_d_zero", "torsion_dstar_zero", "flat_d", "flat_dstar", "kahler", "hessian"] {
            assert!(r.flag(f), "{f}");
        }
        assert_eq!(r.einstein_constant_estimate, Some(0.0));
        assert!(r.violations.is_empty(), "{:?}", r.violations);
    }

    #[test]
    fn torsionful_dual_is_not_almost_kahler() {
        let r = classify(&zoo::torsionful_dual(), &SampleSpec::new(2, 3)).unwrap();
        assert!(r.flag("torsion_d_zero"));
        assert!(!r.flag("torsion_dstar_zero"));
        assert!(!r.flag("almost_kahler"));
        assert!(r.violations.is_empty(), "{:?}", r.violations);
    }

    #[test]
    fn ak_non_kahler_configuration() {
        let r = classify(&zoo::ak_non_kahler(), &SampleSpec::new(3, 3)).unwrap();
        assert!(r.flag("flat_dstar"));
        assert!(r.flag("torsion_dstar_zero"));
        assert!(r.flag("almost_kahler"));
        assert!(!r.flag("kahler"));
        assert!(r.violations.is_empty(), "{:?}", r.violations);
    }
}
