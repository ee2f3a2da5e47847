//! Pointwise residuals of the standard identities between a connection, its
//! dual and the metric.

use std::sync::Arc;

use serde::Serialize;

use super::{connection_coefficients, cov_deriv_metric, torsion, ConnectionField, LocalGeometry, MetricField};
use crate::error::Result;

/// Largest absolute violation of each identity at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `g(T*(X,Y),Z) = (D_X g)(Y,Z) − (D_Y g)(X,Z) + g(T(X,Y),Z)`.
    pub dual_torsion: f64,
    /// `R*_g(Z,W,X,Y) = −R_g(W,Z,X,Y)`.
    pub dual_curvature: f64,
    /// `(D*)* = D`.
    pub involution: f64,
    /// Cyclic sum of `R(X,Y)Z`; `None` when `D` has torsion.
    pub first_bianchi: Option<f64>,
    /// `∇g = 0` and `T^∇ = 0` for the Levi-Civita connection.
    pub levi_civita: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [
            self.dual_torsion,
            self.dual_curvature,
            self.involution,
            self.first_bianchi.unwrap_or(0.0),
            self.levi_civita,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Torsion below this is treated as zero when deciding whether the first
/// Bianchi identity applies.
const TORSION_FREE: f64 = 1e-12;

pub fn identity_residuals(g: &Arc<MetricField>, d: &Arc<ConnectionField>, x: &[f64]) -> Result<IdentityResiduals> {
    let geo = LocalGeometry::new(g, d, x)?;
    let n = geo.n;
    let gv = &geo.g;

    let mut dual_torsion = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut lhs = 0.0;
                let mut t = 0.0;
                for l in 0..n {
                    lhs += geo.dual_torsion.get(&[l, a, b]) * gv.get(&[l, c]);
                    t += geo.torsion.get(&[l, a, b]) * gv.get(&[l, c]);
                }
                let rhs = geo.dg.get(&[a, b, c]) - geo.dg.get(&[b, a, c]) + t;
                dual_torsion = dual_torsion.max((lhs - rhs).abs());
            }
        }
    }

    let mut dual_curvature = 0.0f64;
    for idx in super::multi_indices(n, 4) {
        let (z, w, a, b) = (idx[0], idx[1], idx[2], idx[3]);
        let lhs = geo.dual_curvature_g.get(&[z, w, a, b]);
        let rhs = -geo.curvature_g.get(&[w, z, a, b]);
        dual_curvature = dual_curvature.max((lhs - rhs).abs());
    }

    let twice = ConnectionField::Dual {
        metric: g.clone(),
        base: Arc::new(ConnectionField::Dual {
            metric: g.clone(),
            base: d.clone(),
        }),
    };
    let involution = connection_coefficients(&twice, x)?.max_abs_diff(&geo.gamma);

    let first_bianchi = if geo.torsion.max_abs() <= TORSION_FREE {
        let r = &geo.curvature;
        let mut worst = 0.0f64;
        for idx in super::multi_indices(n, 4) {
            let (l, k, i, j) = (idx[0], idx[1], idx[2], idx[3]);
            let s = r.get(&[l, k, i, j]) + r.get(&[l, i, j, k]) + r.get(&[l, j, k, i]);
            worst = worst.max(s.abs());
        }
        Some(worst)
    } else {
        None
    };

    let lc = ConnectionField::LeviCivita(g.clone());
    let levi_civita = cov_deriv_metric(g, &lc, x)?.max_abs().max(torsion(&lc, x)?.max_abs());

    Ok(IdentityResiduals {
        dual_torsion,
        dual_curvature,
        involution,
        first_bianchi,
        levi_civita,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn identities_hold_on_zoo_models() {
        for m in [zoo::exp_diagonal(), zoo::unit_sphere(), zoo::torsionful_dual(), zoo::random_model(4, 3)] {
            let x: Vec<f64> = m.base_box.base.iter().map(|[lo, hi]| 0.5 * (lo + hi) + 0.1).collect();
            let r = identity_residuals(&m.metric, &m.connection, &x).unwrap();
            assert!(r.max() < 1e-9, "{}: {r:?}", m.name);
        }
    }

    #[test]
    fn bianchi_skipped_with_torsion() {
        let m = zoo::ak_non_kahler();
        let r = identity_residuals(&m.metric, &m.connection, &[0.1, 0.2]).unwrap();
        assert!(r.first_bianchi.is_none());
    }
}
