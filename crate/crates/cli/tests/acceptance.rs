//! One PASS/FAIL line per acceptance criterion.
//!
//! Every criterion runs even when an earlier one fails; the test fails at the
//! end if any did. Run with `--nocapture` to see the table on success.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmk::bundle::classify::evaluate_sample;
use tmk::bundle::lifted::{CurvaturePattern, Lifted, RicciPattern};
use tmk::bundle::oracle::{BundleCurvature, BundleJets};
use tmk::bundle::{lift_frame, Lift};
use tmk::geometry::{identity_residuals, unit_vectors};
use tmk::symplectic::symplectic_match;
use tmk::zoo::{self, WeylSpec};
use tmk::{classify, ConnectionField, LocalGeometry, Model, SampleSpec};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn weyl_lambda0() -> Model {
    zoo::weyl(&WeylSpec::new(3, 1.0, 0.7, 0.0)).unwrap()
}

fn oracle_models() -> Vec<Model> {
    vec![zoo::euclidean(2), zoo::exp_diagonal(), weyl_lambda0()]
}

/// Worst relative error between lifted formulas and the chart oracle on
/// random vectors, for either the Ricci or the full curvature components.
fn lifted_vs_oracle(ricci: bool) -> (f64, f64) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for model in oracle_models() {
        let n = model.dim();
        for p in SampleSpec::new(5, 5).points(n, &model.base_box).unwrap() {
            let geo = LocalGeometry::new(&model.metric, &model.connection, &p.x).unwrap();
            let curv = BundleCurvature::new(&model.metric, &model.connection, &p).unwrap();
            let frame = lift_frame(&model.connection, &p).unwrap();
            let lifted = Lifted::new(&geo, &p.xi);
            for _ in 0..4 {
                let v: Vec<Vec<f64>> = (0..4).map(|_| random_vec(&mut rng, n)).collect();
                let pairs: Vec<(f64, f64)> = if ricci {
                    RicciPattern::ALL
                        .iter()
                        .map(|pat| {
                            let k = pat.lifts();
                            (
                                lifted.ricci(*pat, &v[0], &v[1]),
                                curv.ricci_apply(&frame.lift(&v[0], k[0]), &frame.lift(&v[1], k[1])),
                            )
                        })
                        .collect()
                } else {
                    CurvaturePattern::ALL
                        .iter()
                        .map(|pat| {
                            let k = pat.lifts();
                            let l: Vec<Vec<f64>> = (0..4).map(|i| frame.lift(&v[i], k[i])).collect();
                            (
                                lifted.curvature(*pat, &v[0], &v[1], &v[2], &v[3]),
                                curv.riemann_g_apply(&l[0], &l[1], &l[2], &l[3]),
                            )
                        })
                        .collect()
                };
                for (l, o) in pairs {
                    worst = worst.max((l - o).abs() / o.abs().max(1.0));
                }
            }
        }
    }
    (worst, start.elapsed().as_secs_f64())
}

fn criterion_1() -> Outcome {
    let (err, secs) = lifted_vs_oracle(true);
    check(err <= 1e-8 && secs < 60.0, format!("max rel err {err:.2e}, {secs:.1} s"))
}

fn criterion_2() -> Outcome {
    let (err, secs) = lifted_vs_oracle(false);
    check(err <= 1e-8, format!("max rel err {err:.2e} over six patterns, {secs:.1} s"))
}

fn criterion_3() -> Outcome {
    let spec = SampleSpec::new(3, 5);
    let hess = classify(&zoo::exp_diagonal(), &spec).unwrap().residual("d_omega");
    let model = zoo::torsionful_dual();
    let e = unit_vectors(2);
    let mut worst = 0.0f64;
    for p in spec.points(2, &model.base_box).unwrap() {
        let jets = BundleJets::new(&model.metric, &model.connection, &p, 2).unwrap();
        let frame = lift_frame(&model.connection, &p).unwrap();
        let v = jets.d_omega(&frame.lift(&e[1], Lift::H), &frame.lift(&e[0], Lift::H), &frame.lift(&e[1], Lift::V));
        worst = worst.max((v + 1.0).abs());
    }
    check(
        hess <= 1e-10 && worst <= 1e-12,
        format!("Hessian sup|dΩ| {hess:.2e}; |dΩ(∂₂ᴴ,∂₁ᴴ,∂₂ⱽ) + 1| {worst:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let spec = SampleSpec::new(4, 6);
    let mut detail = Vec::new();
    let mut ok = true;
    for m in [zoo::euclidean(2), zoo::exp_diagonal(), zoo::rho_t_identity(2)] {
        let r = classify(&m, &spec).unwrap();
        let nij = r.residual("nijenhuis");
        ok &= r.residual("flatness_d") <= 1e-8 && nij <= 1e-12;
        detail.push(format!("{} N {nij:.1e}", m.name));
    }
    for m in [zoo::unit_sphere(), zoo::torsionful_dual(), zoo::random_model(3, 2), weyl_lambda0()] {
        let r = classify(&m, &spec).unwrap();
        if r.residual("flatness_d") >= 1e-3 {
            let nij = r.residual("nijenhuis");
            ok &= nij >= 1e-3;
            detail.push(format!("{} N {nij:.1e}", m.name));
        }
    }
    check(ok, detail.join("; "))
}

fn criterion_5() -> Outcome {
    let r = classify(&zoo::unit_sphere(), &SampleSpec::new(5, 6)).unwrap();
    let j = r.residual("ricci_j_invariance");
    let (l, rt) = (r.residual("e_condition_left"), r.residual("e_condition_right"));
    let norm = r.residual("curvature_norm_sq");
    check(
        j >= 1e-3 && l <= 1e-8 && rt <= 1e-8 && norm > 1e-3,
        format!("J-invariance {j:.3}; |R|² {norm:.3}; E-condition residuals {l:.1e}, {rt:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let (k, _) = zoo::flat_k_for(3, 2.0).unwrap();
    let target = 2.0 * 2f64.sqrt();
    let curvature_at = |k: f64| {
        let m = zoo::weyl(&WeylSpec::new(3, 1.0, k, 0.0)).unwrap();
        SampleSpec::new(6, 4)
            .points(3, &m.base_box)
            .unwrap()
            .iter()
            .map(|p| LocalGeometry::new(&m.metric, &m.base_connection, &p.x).unwrap().curvature.max_abs())
            .fold(0.0, f64::max)
    };
    let flat = curvature_at(target);
    let spec = SampleSpec::new(7, 4);
    let mut einstein_at = Vec::new();
    let mut c_at_minus2 = f64::NAN;
    for i in 0..=8 {
        let lambda = -3.0 + 0.5 * i as f64;
        if lambda == -1.0 {
            continue;
        }
        let r = classify(&zoo::weyl(&WeylSpec::new(3, 1.0, k, lambda)).unwrap(), &spec).unwrap();
        if r.residual("einstein") <= 1e-8 {
            einstein_at.push(lambda);
        }
        if lambda == -2.0 {
            c_at_minus2 = r.einstein_constant_estimate.unwrap_or(f64::NAN);
        }
    }
    let x = [0.2, 1.1, 0.7];
    let (hh, vv) = zoo::weyl_ricci_closed_form(&WeylSpec::new(3, 1.0, k, -2.0), &x).unwrap();
    let g = tmk::MetricField::value(&zoo::weyl(&WeylSpec::new(3, 1.0, k, -2.0)).unwrap().metric, &x).unwrap();
    let closed = [hh[(0, 0)] / g[(0, 0)], hh[(1, 1)] / g[(1, 1)], vv[(2, 2)] / g[(2, 2)]];
    let agree = closed.iter().all(|c| (c - c_at_minus2).abs() <= 1e-6);
    check(
        (k.abs() - target).abs() <= 1e-12
            && flat <= 1e-9
            && einstein_at == [-2.0]
            && (c_at_minus2 - 6.0).abs() <= 1e-6
            && agree,
        format!(
            "flat_k_for(3,2) = ±{k:.6} (want ±{target:.6}); ‖R^D‖ at k=2√2 {flat:.2e}; \
             Einstein at λ ∈ {einstein_at:?}; c(−2) = {c_at_minus2:.6} (want 6); closed form {closed:.6?}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let mut worst = 0.0f64;
    let mut built = 0;
    while built < 10 {
        let (a, b) = (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        let Ok(spec) = zoo::build_rho_normal_form(a, b, [[1.0, 2.0], [1.0, 2.0]]) else {
            continue;
        };
        let model = zoo::build_statistical_model(&spec).unwrap();
        for p in SampleSpec::new(built as u64, 4).points(4, &model.base_box).unwrap() {
            let s = evaluate_sample(&model, &p).unwrap();
            let rel = (&s.beta - &s.metric * 3.0).norm() / s.metric.norm();
            worst = worst.max(rel);
        }
        built += 1;
    }
    let r = classify(&zoo::rho_t_identity(2), &SampleSpec::new(8, 20)).unwrap();
    let [lo, hi] = r.holomorphic_sectional_curvature.unwrap_or([f64::NAN; 2]);
    let spread = (hi - lo).abs() / lo.abs().max(hi.abs());
    check(
        worst <= 1e-8 && r.flag("kahler") && r.flag("hesse_einstein") && spread <= 1e-8,
        format!(
            "‖β* − 3g‖/‖g‖ {worst:.1e} over 10 models; ρ = tI₂ kahler {} hesse_einstein {}, H ∈ [{lo:.6}, {hi:.6}]",
            r.flag("kahler"),
            r.flag("hesse_einstein")
        ),
    )
}

fn criterion_8() -> Outcome {
    let nf = zoo::build_statistical_model(&zoo::build_rho_normal_form(0.2, -0.1, [[1.0, 2.0], [1.0, 2.0]]).unwrap()).unwrap();
    let mut worst = 0.0f64;
    for model in [zoo::exp_diagonal(), zoo::rho_t_identity(2), nf] {
        let n = model.dim();
        let e = unit_vectors(n);
        for p in SampleSpec::new(9, 3).points(n, &model.base_box).unwrap() {
            let s = evaluate_sample(&model, &p).unwrap();
            let frame = lift_frame(&model.connection, &p).unwrap();
            let ric = |u: &[f64], v: &[f64]| -> f64 {
                (0..2 * n).map(|a| (0..2 * n).map(|b| u[a] * s.ricci[(a, b)] * v[b]).sum::<f64>()).sum()
            };
            let scale = 1.0 + s.beta.amax();
            for i in 0..n {
                for j in 0..n {
                    let (hi, hj) = (frame.lift(&e[i], Lift::H), frame.lift(&e[j], Lift::H));
                    let (vi, vj) = (frame.lift(&e[i], Lift::V), frame.lift(&e[j], Lift::V));
                    let beta = s.beta[(i, j)];
                    worst = worst
                        .max((ric(&hi, &hj) + beta).abs() / scale)
                        .max((ric(&vi, &vj) + beta).abs() / scale)
                        .max(ric(&hi, &vj).abs() / scale);
                }
            }
        }
    }
    check(worst <= 1e-9, format!("max deviation {worst:.1e} on three Hessian models"))
}

fn criterion_9() -> Outcome {
    let spec = SampleSpec::new(10, 5);
    let models = vec![
        zoo::euclidean(2),
        zoo::exp_diagonal(),
        zoo::unit_sphere(),
        zoo::ak_non_kahler(),
        zoo::rho_t_identity(2),
        zoo::weyl(&WeylSpec::new(3, 1.0, 2.0, -2.0)).unwrap(),
        zoo::random_model(4, 2),
        zoo::torsionful_dual(),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for m in &models {
        let s = symplectic_match(m, &spec).unwrap();
        ok &= (s.deviation <= 1e-10) == (s.torsion_dstar <= 1e-10);
        if m.name == "torsionful_dual" {
            ok &= s.deviation >= 1e-3;
        }
        detail.push(format!("{} {:.1e}/{:.1e}", m.name, s.deviation, s.torsion_dstar));
    }
    check(ok, format!("deviation/T*: {}", detail.join(", ")))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut worst = [0.0f64; 5];
    let mut bianchi_trials = 0;
    for trial in 0..200u64 {
        let n = 2 + (trial % 3) as usize;
        let model = zoo::random_model(1000 + trial, n);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.9..0.9)).collect();
        let r = identity_residuals(&model.metric, &model.connection, &x).unwrap();
        // the Levi-Civita connection of the same metric is torsion-free
        let lc = std::sync::Arc::new(ConnectionField::LeviCivita(model.metric.clone()));
        let s = identity_residuals(&model.metric, &lc, &x).unwrap();
        let b = s.first_bianchi.expect("Levi-Civita is torsion-free");
        bianchi_trials += 1;
        for (w, v) in worst.iter_mut().zip([
            r.dual_torsion.max(s.dual_torsion),
            r.dual_curvature.max(s.dual_curvature),
            r.involution.max(s.involution),
            b,
            r.levi_civita,
        ]) {
            *w = w.max(v);
        }
    }
    check(
        worst.iter().all(|w| *w <= 1e-9) && bianchi_trials == 200,
        format!(
            "dualT {:.1e}, dualR {:.1e}, involution {:.1e}, Bianchi {:.1e}, ∇g {:.1e} over 200 trials",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn criterion_11() -> Outcome {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut detail = Vec::new();
    let mut ok = true;
    for name in ["euclidean", "weyl_lambda_minus2", "rho_ab"] {
        let cfg = root.join("configs").join(format!("{name}.json"));
        let run = || Command::new(env!("CARGO_BIN_EXE_tmk")).arg("classify").arg(&cfg).output().unwrap();
        let (a, b) = (run(), run());
        let golden: serde_json::Value =
            serde_json::from_slice(&std::fs::read(root.join("tests/golden").join(format!("{name}.json"))).unwrap()).unwrap();
        let got: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        let same = a.stdout == b.stdout && a.status.code() == Some(0);
        let flags_match = got["flags"] == golden["flags"] && got["signature"] == golden["signature"] && got["violations"] == golden["violations"];
        ok &= same && flags_match;
        detail.push(format!("{name}: identical {same}, golden {flags_match}"));
    }
    check(ok, detail.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Ricci lifted vs oracle", criterion_1),
        ("curvature lifted vs oracle", criterion_2),
        ("dΩ on Hessian and torsionful-dual models", criterion_3),
        ("Nijenhuis vs flatness", criterion_4),
        ("sphere J-invariance and E-condition", criterion_5),
        ("flat Weyl k and λ = −2 Einstein constant", criterion_6),
        ("normal forms and ρ = tI₂", criterion_7),
        ("Hessian Ricci = −β", criterion_8),
        ("symplectic match vs dual torsion", criterion_9),
        ("identity suites", criterion_10),
        ("CLI determinism and goldens", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d}", i + 1),
            Err(d) => {
                println!("criterion {:>2} FAIL  {name}: {d}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
