//! Brute-force geometry of the Sasaki metric as a plain `2n`-dimensional
//! metric in induced coordinates. The chart components of `g̃`, `J` and `Ω`
//! are assembled as jets in all `2n` variables, after which Levi-Civita,
//! curvature and Ricci follow from the generic routines in
//! [`crate::geometry`].

use nalgebra::DMatrix;

use crate::bundle::TangentPoint;
use crate::error::{Error, Result};
use crate::geometry::{
    curvature_jets, levi_civita_jets, lower_curvature, ConnectionField, MetricField, Slot, TensorValue,
};
use crate::jet::ScalarJet;

/// Chart fields on `TM` near a point, as jets in `2n` variables.
#[derive(Debug, Clone)]
pub struct BundleJets {
    pub n: usize,
    /// `g̃_ab`, row-major `2n x 2n`.
    pub metric: Vec<ScalarJet>,
    /// `J^a_b`.
    pub complex: Vec<ScalarJet>,
    /// `Ω_ab = J^c_a g̃_cb`.
    pub kahler: Vec<ScalarJet>,
}

impl BundleJets {
    pub fn new(g: &MetricField, d: &ConnectionField, p: &TangentPoint, order: u8) -> Result<BundleJets> {
        let n = g.dim();
        if d.dim() != n || p.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.dim(),
            });
        }
        let m = 2 * n;
        let gj: Vec<ScalarJet> = g.jets(&p.x, order)?.iter().map(|j| j.embed(m)).collect();
        let c = d.eval(&p.x, order)?;
        let gamma: Vec<ScalarJet> = c.jets().iter().map(|j| j.embed(m)).collect();
        let y: Vec<ScalarJet> = (0..n).map(|k| ScalarJet::variable(m, order, n + k, p.xi[k])).collect();
        let zero = ScalarJet::zero(m, order);

        // A^k_i = Γ^k_ij y^j, stored [k][i]
        let a: Vec<ScalarJet> = (0..n * n)
            .map(|ki| {
                let (k, i) = (ki / n, ki % n);
                (0..n).fold(zero.clone(), |acc, j| acc + &gamma[(k * n + i) * n + j] * &y[j])
            })
            .collect();
        let mat_mul = |l: &dyn Fn(usize, usize) -> ScalarJet, r: &dyn Fn(usize, usize) -> ScalarJet| -> Vec<ScalarJet> {
            (0..n * n)
                .map(|ij| {
                    let (i, j) = (ij / n, ij % n);
                    (0..n).fold(zero.clone(), |acc, k| acc + l(i, k) * r(k, j))
                })
                .collect()
        };
        let gm = |i: usize, j: usize| gj[i * n + j].clone();
        let am = |i: usize, j: usize| a[i * n + j].clone();
        let at = |i: usize, j: usize| a[j * n + i].clone();
        let ga = mat_mul(&gm, &am);
        let ga_ref = |i: usize, j: usize| ga[i * n + j].clone();
        let atga = mat_mul(&at, &ga_ref);
        let aa = mat_mul(&am, &am);

        let mut metric = vec![zero.clone(); m * m];
        let mut complex = vec![zero.clone(); m * m];
        for i in 0..n {
            for j in 0..n {
                metric[i * m + j] = &gj[i * n + j] + &atga[i * n + j];
                metric[i * m + n + j] = ga[j * n + i].clone();
                metric[(n + i) * m + j] = ga[i * n + j].clone();
                metric[(n + i) * m + n + j] = gj[i * n + j].clone();

                let delta = (i == j) as u8 as f64;
                complex[i * m + j] = -&a[i * n + j];
                complex[i * m + n + j] = ScalarJet::constant(m, order, -delta);
                complex[(n + i) * m + j] = &aa[i * n + j] + delta;
                complex[(n + i) * m + n + j] = a[i * n + j].clone();
            }
        }
        let kahler = (0..m * m)
            .map(|ab| {
                let (a_, b) = (ab / m, ab % m);
                (0..m).fold(zero.clone(), |acc, c| acc + &complex[c * m + a_] * &metric[c * m + b])
            })
            .collect();
        Ok(BundleJets {
            n,
            metric,
            complex,
            kahler,
        })
    }

    fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn metric_value(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |r, c| self.metric[r * m + c].value())
    }

    pub fn complex_value(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |r, c| self.complex[r * m + c].value())
    }

    pub fn kahler_value(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |r, c| self.kahler[r * m + c].value())
    }

    /// `dΩ(u, v, w) = u^a v^b w^c (∂_a Ω_bc + ∂_b Ω_ca + ∂_c Ω_ab)`.
    pub fn d_omega(&self, u: &[f64], v: &[f64], w: &[f64]) -> f64 {
        let m = self.dim();
        let d = |a: usize, b: usize, c: usize| self.kahler[b * m + c].d1(a);
        let mut acc = 0.0;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let coef = u[a] * v[b] * w[c];
                    if coef != 0.0 {
                        acc += coef * (d(a, b, c) + d(b, c, a) + d(c, a, b));
                    }
                }
            }
        }
        acc
    }

    /// Nijenhuis tensor `N(u, v)` of `J` for chart vectors `u`, `v`.
    pub fn nijenhuis(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let jv = |a: usize, b: usize| self.complex[a * m + b].value();
        let dj = |c: usize, a: usize, b: usize| self.complex[a * m + b].d1(c);
        let apply = |vec: &[f64]| -> Vec<f64> { (0..m).map(|a| (0..m).map(|b| jv(a, b) * vec[b]).sum()).collect() };
        let ju = apply(u);
        let jvv = apply(v);
        // directional derivative of J along s applied to t: (∂_s J) t
        let dir = |s: &[f64], t: &[f64]| -> Vec<f64> {
            (0..m)
                .map(|a| {
                    let mut acc = 0.0;
                    for c in 0..m {
                        if s[c] == 0.0 {
                            continue;
                        }
                        for b in 0..m {
                            acc += s[c] * dj(c, a, b) * t[b];
                        }
                    }
                    acc
                })
                .collect()
        };
        let t1 = dir(&ju, v);
        let t2 = dir(&jvv, u);
        let t3 = apply(&dir(v, u));
        let t4 = apply(&dir(u, v));
        (0..m).map(|a| t1[a] - t2[a] + t3[a] - t4[a]).collect()
    }
}

/// Riemann and Ricci tensors of `g̃` at a point of `TM`.
#[derive(Debug, Clone)]
pub struct BundleCurvature {
    pub metric: DMatrix<f64>,
    pub complex: DMatrix<f64>,
    /// `R̃^l_kij`.
    pub riemann: TensorValue,
    /// `R̃_g̃(W, Z, X, Y) = g̃(R̃(X, Y)Z, W)`.
    pub riemann_g: TensorValue,
    /// `Ric(X, Y) = Tr{Z ↦ R̃(Z, Y)X}`.
    pub ricci: DMatrix<f64>,
}

impl BundleCurvature {
    pub fn new(g: &MetricField, d: &ConnectionField, p: &TangentPoint) -> Result<BundleCurvature> {
        let jets = BundleJets::new(g, d, p, 2)?;
        Self::from_jets(&jets, p)
    }

    pub fn from_jets(jets: &BundleJets, p: &TangentPoint) -> Result<BundleCurvature> {
        let m = 2 * jets.n;
        let coords = p.coords();
        let lc = levi_civita_jets(&jets.metric, m, &coords)?;
        let riemann = curvature_jets(&lc).value(&coords);
        let metric = jets.metric_value();
        let gt = TensorValue::from_fn(vec![Slot::Down, Slot::Down], m, &coords, |i| metric[(i[0], i[1])]);
        let riemann_g = lower_curvature(&gt, &riemann);
        let ric = riemann.contract(0, 2)?;
        let ricci = DMatrix::from_fn(m, m, |a, b| ric.get(&[a, b]));
        Ok(BundleCurvature {
            metric,
            complex: jets.complex_value(),
            riemann,
            riemann_g,
            ricci,
        })
    }

    /// `R̃_g̃(w, z, x, y)` on chart vectors.
    pub fn riemann_g_apply(&self, w: &[f64], z: &[f64], x: &[f64], y: &[f64]) -> f64 {
        self.riemann_g.apply(&[w, z, x, y])
    }

    pub fn ricci_apply(&self, u: &[f64], v: &[f64]) -> f64 {
        let m = self.ricci.nrows();
        let mut acc = 0.0;
        for a in 0..m {
            for b in 0..m {
                acc += u[a] * self.ricci[(a, b)] * v[b];
            }
        }
        acc
    }

    /// Holomorphic sectional curvature of the plane `span{u, Ju}`.
    pub fn holomorphic_sectional(&self, u: &[f64]) -> Result<f64> {
        let m = u.len();
        let ju: Vec<f64> = (0..m).map(|a| (0..m).map(|b| self.complex[(a, b)] * u[b]).sum()).collect();
        let ip = |a: &[f64], b: &[f64]| -> f64 {
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..m {
                    acc += a[i] * self.metric[(i, j)] * b[j];
                }
            }
            acc
        };
        let denom = ip(u, u) * ip(&ju, &ju) - ip(u, &ju).powi(2);
        let scale = ip(u, u).abs().max(ip(&ju, &ju).abs()).max(1e-300);
        if denom.abs() <= 1e-12 * scale * scale {
            return Err(Error::NullVector);
        }
        Ok(self.riemann_g_apply(u, &ju, u, &ju) / denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn euclidean_oracle_is_flat() {
        let m = zoo::euclidean(2);
        let p = TangentPoint::new(vec![0.1, 0.2], vec![1.0, -1.0]).unwrap();
        let c = BundleCurvature::new(&m.metric, &m.connection, &p).unwrap();
        assert!(c.riemann.max_abs() == 0.0);
        assert!(c.ricci.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn jet_values_match_closed_forms() {
        let m = zoo::unit_sphere();
        let p = TangentPoint::new(vec![0.8, 0.3], vec![0.4, 1.1]).unwrap();
        let jets = BundleJets::new(&m.metric, &m.connection, &p, 1).unwrap();
        let gt = crate::bundle::sasaki_metric_chart(&m.metric, &m.connection, &p).unwrap();
        let om = crate::bundle::kahler_form_chart(&m.metric, &m.connection, &p).unwrap();
        assert!((jets.metric_value() - gt).abs().max() < 1e-14);
        assert!((jets.kahler_value() - om).abs().max() < 1e-14);
    }

    #[test]
    fn oracle_ricci_is_symmetric() {
        let m = zoo::unit_sphere();
        let p = TangentPoint::new(vec![1.2, 0.3], vec![0.7, -0.4]).unwrap();
        let c = BundleCurvature::new(&m.metric, &m.connection, &p).unwrap();
        assert!((&c.ricci - c.ricci.transpose()).abs().max() < 1e-10);
    }

    #[test]
    fn null_vector_is_rejected() {
        let m = zoo::euclidean(2);
        let p = TangentPoint::new(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        let c = BundleCurvature::new(&m.metric, &m.connection, &p).unwrap();
        assert_eq!(c.holomorphic_sectional(&[0.0; 4]), Err(Error::NullVector));
    }
}
