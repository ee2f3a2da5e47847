//! Comparison of the Kähler form on `TM` with the pull-back of the canonical
//! symplectic form `Σ dx^i ∧ dz_i` of `T*M` under `X ↦ g(X, ·)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bundle::{kahler_form_chart, TangentPoint};
use crate::error::{Error, Result};
use crate::geometry::{torsion, ConnectionField, MetricField};
use crate::jet::ScalarJet;
use crate::zoo::Model;
use crate::SampleSpec;

/// Chart components of the pulled-back form, as jets in `2n` variables.
fn pullback_jets(g: &MetricField, p: &TangentPoint, order: u8) -> Result<Vec<ScalarJet>> {
    let n = g.dim();
    let m = 2 * n;
    let gj: Vec<ScalarJet> = g.jets(&p.x, order + 1)?.iter().map(|j| j.embed(m)).collect();
    let y: Vec<ScalarJet> = (0..n).map(|k| ScalarJet::variable(m, order, n + k, p.xi[k])).collect();
    let zero = ScalarJet::zero(m, order);
    let mut out = vec![zero.clone(); m * m];
    for i in 0..n {
        for j in 0..n {
            let mut xx = zero.clone();
            for k in 0..n {
                let d = gj[i * n + k].partial(j) - gj[j * n + k].partial(i);
                xx += &(d * &y[k]);
            }
            out[i * m + j] = xx;
            out[i * m + n + j] = gj[i * n + j].truncate(order);
            out[(n + j) * m + i] = -gj[i * n + j].truncate(order);
        }
    }
    Ok(out)
}

/// `φ_g*(Ω*)` at `p` in the induced chart.
pub fn pullback_form_at(g: &MetricField, p: &TangentPoint) -> Result<DMatrix<f64>> {
    if p.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: p.dim(),
        });
    }
    let m = 2 * g.dim();
    let jets = pullback_jets(g, p, 0)?;
    Ok(DMatrix::from_fn(m, m, |r, c| jets[r * m + c].value()))
}

/// Largest `|dφ_g*(Ω*)|` over coordinate triples at `p`.
pub fn pullback_closedness(g: &MetricField, p: &TangentPoint) -> Result<f64> {
    let m = 2 * g.dim();
    let jets = pullback_jets(g, p, 1)?;
    let d = |a: usize, b: usize, c: usize| jets[b * m + c].d1(a);
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                worst = worst.max((d(a, b, c) + d(b, c, a) + d(c, a, b)).abs());
            }
        }
    }
    Ok(worst)
}

/// Left minus right side of the matching condition,
/// `C_ijk = ∂_j g_ik − ∂_i g_jk − Σ_l (Γ^l_jk g_li − Γ^l_ik g_lj)`, stored
/// `[i][j][k]`.
pub fn matching_condition(g: &MetricField, d: &ConnectionField, x: &[f64]) -> Result<Vec<f64>> {
    let n = g.dim();
    let gj = g.jets(x, 1)?;
    let gamma = crate::geometry::connection_coefficients(d, x)?;
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = gj[i * n + k].d1(j) - gj[j * n + k].d1(i);
                for l in 0..n {
                    v -= gamma.get(&[l, j, k]) * gj[l * n + i].value() - gamma.get(&[l, i, k]) * gj[l * n + j].value();
                }
                out[(i * n + j) * n + k] = v;
            }
        }
    }
    Ok(out)
}

/// Outcome of [`symplectic_match`] over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymplecticMatch {
    /// `sup ‖φ_g*(Ω*) − Ω‖`.
    pub deviation: f64,
    /// `sup ‖T^{D*}‖`.
    pub torsion_dstar: f64,
    /// `sup |dφ_g*(Ω*)|`.
    pub closedness: f64,
    /// `sup` of the difference between the deviation matrix and the
    /// matching condition contracted with `y`.
    pub condition_residual: f64,
    /// Whether `deviation ≤ 1e-10` agrees with `torsion_dstar ≤ 1e-10`.
    pub matches_torsion: bool,
}

pub const MATCH_TOL: f64 = 1e-10;

pub fn symplectic_match(model: &Model, spec: &SampleSpec) -> Result<SymplecticMatch> {
    let n = model.dim();
    let (g, d) = (&*model.metric, &*model.connection);
    let mut out = SymplecticMatch {
        deviation: 0.0,
        torsion_dstar: 0.0,
        closedness: 0.0,
        condition_residual: 0.0,
        matches_torsion: true,
    };
    for p in spec.points(n, &model.base_box)? {
        let run = || -> Result<(f64, f64, f64, f64)> {
            let pb = pullback_form_at(g, &p)?;
            let om = kahler_form_chart(g, d, &p)?;
            let diff = &pb - &om;
            let cond = matching_condition(g, d, &p.x)?;
            let mut cres = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let c: f64 = (0..n).map(|k| cond[(i * n + j) * n + k] * p.xi[k]).sum();
                    cres = cres.max((diff[(i, j)] - c).abs());
                }
            }
            let dual = ConnectionField::Dual {
                metric: model.metric.clone(),
                base: model.connection.clone(),
            };
            let ts = torsion(&dual, &p.x)?.max_abs();
            Ok((diff.abs().max(), ts, pullback_closedness(g, &p)?, cres))
        };
        let (dev, ts, closed, cres) = run().map_err(|e| e.at_sample(&p.coords()))?;
        out.deviation = out.deviation.max(dev);
        out.torsion_dstar = out.torsion_dstar.max(ts);
        out.closedness = out.closedness.max(closed);
        out.condition_residual = out.condition_residual.max(cres);
    }
    out.matches_torsion = (out.deviation <= MATCH_TOL) == (out.torsion_dstar <= MATCH_TOL);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn euclidean_pullback_is_standard() {
        let m = zoo::euclidean(2);
        let p = TangentPoint::new(vec![0.2, 0.3], vec![1.0, -2.0]).unwrap();
        let pb = pullback_form_at(&m.metric, &p).unwrap();
        let om = kahler_form_chart(&m.metric, &m.connection, &p).unwrap();
        assert_eq!(pb, om);
    }

    #[test]
    fn exp_diagonal_xx_block_vanishes() {
        let m = zoo::exp_diagonal();
        let p = TangentPoint::new(vec![0.1, -0.4], vec![1.0, 1.0]).unwrap();
        let pb = pullback_form_at(&m.metric, &p).unwrap();
        assert!(pb.view((0, 0), (2, 2)).abs().max() < 1e-15);
        assert_eq!(pb.transpose(), -pb);
    }

    #[test]
    fn match_follows_dual_torsion() {
        let spec = SampleSpec::new(3, 5);
        let hess = symplectic_match(&zoo::exp_diagonal(), &spec).unwrap();
        assert!(hess.deviation <= MATCH_TOL && hess.torsion_dstar <= MATCH_TOL);
        let bad = symplectic_match(&zoo::torsionful_dual(), &spec).unwrap();
        assert!(bad.deviation >= 1e-3 && bad.matches_torsion);
        let lc = symplectic_match(&zoo::unit_sphere(), &spec).unwrap();
        assert!(lc.deviation <= MATCH_TOL, "{}", lc.deviation);
        for r in [hess, bad, lc] {
            assert!(r.closedness < 1e-9 && r.condition_residual < 1e-10);
        }
    }
}
