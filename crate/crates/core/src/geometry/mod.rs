//! Base-manifold geometry: metrics, affine connections and the tensors
//! built from them at a point.
//!
//! Index conventions used everywhere in the crate:
//!
//! * `Γ^k_ij` is stored `[k][i][j]` with `D_{∂i} ∂j = Γ^k_ij ∂k`;
//! * `R(∂i, ∂j)∂k = R^l_kij ∂l`, stored `[l][k][i][j]`;
//! * `R_g(W, Z, X, Y) = g(R(X, Y)Z, W)`, stored `[w][k][i][j]`;
//! * a covariant derivative prepends its derivative slot, so
//!   `(D_X T)(..)` is `DT[X][..]` and `(D²_{XZ} g)(Y, W)` is `DDg[X][Z][Y][W]`.

pub mod connection;
pub mod identities;
pub mod metric;
pub mod tensor;

use crate::error::{Error, Result};
use crate::jet::ScalarJet;

pub use connection::{
    cov_deriv_jets, curvature_jets, dual_jets, levi_civita_jets, torsion_jets, ConnectionField,
    ConnectionJets,
};
pub use identities::{identity_residuals, IdentityResiduals};
pub use metric::{inverse_jets, signature, MetricField};
pub use tensor::{multi_indices, JetTensor, Slot, TensorValue};

use Slot::{Down, Up};

fn metric_tensor(g: &MetricField, x: &[f64], order: u8) -> Result<JetTensor> {
    Ok(JetTensor::new(vec![Down, Down], g.dim(), g.jets(x, order)?))
}

fn check_dims(g: &MetricField, d: &ConnectionField, x: &[f64]) -> Result<()> {
    if g.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: d.dim(),
        });
    }
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: x.len(),
        });
    }
    Ok(())
}

/// Christoffel symbols of `g` at `x`.
pub fn levi_civita(g: &MetricField, x: &[f64]) -> Result<TensorValue> {
    let c = levi_civita_jets(&g.jets(x, 1)?, g.dim(), x)?;
    Ok(c.as_tensor().value(x))
}

/// Coefficients of a connection at `x`.
pub fn connection_coefficients(d: &ConnectionField, x: &[f64]) -> Result<TensorValue> {
    Ok(d.eval(x, 0)?.as_tensor().value(x))
}

pub fn torsion(d: &ConnectionField, x: &[f64]) -> Result<TensorValue> {
    Ok(torsion_jets(&d.eval(x, 0)?).value(x))
}

pub fn curvature(d: &ConnectionField, x: &[f64]) -> Result<TensorValue> {
    Ok(curvature_jets(&d.eval(x, 1)?).value(x))
}

/// `R_g(W, Z, X, Y) = g(R(X, Y)Z, W)` from `R^l_kij`.
pub fn lower_curvature(g: &TensorValue, r: &TensorValue) -> TensorValue {
    let n = g.dim();
    TensorValue::from_fn(vec![Down; 4], n, r.base_point(), |idx| {
        (0..n).map(|l| g.get(&[idx[0], l]) * r.get(&[l, idx[1], idx[2], idx[3]])).sum()
    })
}

/// Covariant derivative of the metric, `Dg[d][i][j] = (D_{∂d} g)(∂i, ∂j)`.
pub fn cov_deriv_metric(g: &MetricField, d: &ConnectionField, x: &[f64]) -> Result<TensorValue> {
    check_dims(g, d, x)?;
    let c = d.eval(x, 0)?;
    Ok(cov_deriv_jets(&c, &metric_tensor(g, x, 1)?)?.value(x))
}

/// `γ = Γ(D) − Γ(∇)` and its trace `Tr(γ)_j = γ^i_ij`.
pub fn gamma_diff(d: &ConnectionField, g: &MetricField, x: &[f64]) -> Result<(TensorValue, TensorValue)> {
    check_dims(g, d, x)?;
    let gamma = connection_coefficients(d, x)?;
    let lc = levi_civita(g, x)?;
    let n = g.dim();
    let diff = TensorValue::from_fn(vec![Up, Down, Down], n, x, |idx| gamma.get(idx) - lc.get(idx));
    let trace = diff.contract(0, 1)?;
    Ok((diff, trace))
}

/// First and second Koszul forms of `(g, D)` at `x`:
/// `α_i = ∂_i log √|det g| − Γ^k_ik` and `β_ij = (D_i α)_j`.
pub fn koszul_forms(g: &MetricField, d: &ConnectionField, x: &[f64]) -> Result<(TensorValue, TensorValue)> {
    check_dims(g, d, x)?;
    let n = g.dim();
    let gj = g.jets(x, 2)?;
    let c = d.eval(x, 1)?;
    let (alpha, _) = koszul_alpha_jets(&gj, &c, n, x)?;
    let beta = cov_deriv_jets(&c, &alpha)?;
    Ok((alpha.value(x), beta.value(x)))
}

/// `α` as a jet 1-form one order below `g`; also returns `g⁻¹`.
fn koszul_alpha_jets(
    g: &[ScalarJet],
    c: &ConnectionJets,
    n: usize,
    x: &[f64],
) -> Result<(JetTensor, Vec<ScalarJet>)> {
    let ginv = inverse_jets(g, n, x)?;
    let order = g[0].order() - 1;
    let alpha = JetTensor::from_fn(vec![Down], n, |idx| {
        let i = idx[0];
        let mut acc = ScalarJet::zero(g[0].dim(), order);
        // ∂_i log √|det g| = ½ g^{ab} ∂_i g_ab
        for a in 0..n {
            for b in 0..n {
                acc += &(ginv[a * n + b].truncate(order) * g[a * n + b].partial(i) * 0.5);
            }
        }
        for k in 0..n {
            acc -= &c.get(k, i, k).truncate(order);
        }
        acc
    });
    Ok((alpha, ginv))
}

/// Full contraction of `t` with itself, raising and lowering with `g`.
pub fn tensor_norm_sq(g: &TensorValue, t: &TensorValue) -> Result<f64> {
    let n = g.dim();
    let gm = nalgebra::DMatrix::from_fn(n, n, |i, j| g.get(&[i, j]));
    let inv = gm
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric(g.base_point().to_vec()))?;
    let rank = t.rank();
    let variance = t.variance().to_vec();
    // t^♯ : raise every down slot, lower every up slot; then pair with t.
    let mut partner = t.clone();
    for s in 0..rank {
        let prev = partner.clone();
        partner = TensorValue::from_fn(variance.clone(), n, t.base_point(), |idx| {
            let mut moved = idx.to_vec();
            (0..n)
                .map(|m| {
                    moved[s] = m;
                    let w = match variance[s] {
                        Down => inv[(idx[s], m)],
                        Up => gm[(idx[s], m)],
                    };
                    w * prev.get(&moved)
                })
                .sum()
        });
    }
    Ok(t.entries().iter().zip(partner.entries()).map(|(a, b)| a * b).sum())
}

/// Every pointwise tensor of `(g, D)` that the lifted formulas use, evaluated
/// once at a base point.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub n: usize,
    pub x: Vec<f64>,
    pub g: TensorValue,
    pub ginv: TensorValue,
    /// `Γ` of `D`.
    pub gamma: TensorValue,
    pub torsion: TensorValue,
    pub curvature: TensorValue,
    pub curvature_g: TensorValue,
    pub dg: TensorValue,
    pub ddg: TensorValue,
    /// `DR[d][l][k][i][j] = (D_{∂d} R)^l_kij`.
    pub dr: TensorValue,
    pub lc_gamma: TensorValue,
    pub lc_curvature_g: TensorValue,
    /// `Ric^∇(X, Y) = Tr{Z ↦ R^∇(Z, Y)X}`.
    pub lc_ricci: TensorValue,
    pub gamma_diff: TensorValue,
    pub trace_gamma: TensorValue,
    pub dual_gamma: TensorValue,
    pub dual_torsion: TensorValue,
    pub dual_curvature: TensorValue,
    pub dual_curvature_g: TensorValue,
    /// `Tr(T*)(X) = Tr{Z ↦ T*(Z, X)}`.
    pub trace_dual_torsion: TensorValue,
}

impl LocalGeometry {
    pub fn new(g: &MetricField, d: &ConnectionField, x: &[f64]) -> Result<LocalGeometry> {
        check_dims(g, d, x)?;
        let n = g.dim();
        let gj = g.jets(x, 3)?;
        let c = d.eval(x, 2)?;
        let ginv_j = inverse_jets(&gj, n, x)?;
        let gt = JetTensor::new(vec![Down, Down], n, gj.clone());

        let r = curvature_jets(&c);
        let dg = cov_deriv_jets(&c, &gt)?;
        let ddg = cov_deriv_jets(&c, &dg)?;
        let dr = cov_deriv_jets(&c, &r)?;

        let lc = levi_civita_jets(&gj, n, x)?;
        let lc_r = curvature_jets(&lc);
        let dual = dual_jets(&gj, &c, x)?;
        let dual_r = curvature_jets(&dual);

        let gv = gt.value(x);
        let curvature = r.value(x);
        let lc_curv = lc_r.value(x);
        let lc_gamma = lc.as_tensor().value(x);
        let gamma = c.as_tensor().value(x);
        let gamma_diff = TensorValue::from_fn(vec![Up, Down, Down], n, x, |idx| gamma.get(idx) - lc_gamma.get(idx));
        let dual_torsion = torsion_jets(&dual).value(x);
        let dual_curvature = dual_r.value(x);
        Ok(LocalGeometry {
            n,
            x: x.to_vec(),
            ginv: JetTensor::new(vec![Up, Up], n, ginv_j).value(x),
            torsion: torsion_jets(&c).value(x),
            curvature_g: lower_curvature(&gv, &curvature),
            curvature,
            dg: dg.value(x),
            ddg: ddg.value(x),
            dr: dr.value(x),
            lc_curvature_g: lower_curvature(&gv, &lc_curv),
            lc_ricci: lc_curv.contract(0, 2)?,
            lc_gamma,
            trace_gamma: gamma_diff.contract(0, 1)?,
            gamma_diff,
            gamma,
            dual_gamma: dual.as_tensor().value(x),
            trace_dual_torsion: dual_torsion.contract(0, 1)?,
            dual_torsion,
            dual_curvature_g: lower_curvature(&gv, &dual_curvature),
            dual_curvature,
            g: gv,
        })
    }

    pub fn metric_matrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.g.get(&[i, j]))
    }

    /// `g(u, v)`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.g.apply(&[u, v])
    }

    /// `Σ_i A(e_i) B(e_i)` over a `g`-orthonormal frame, as `g^{ab} A_a B_b`.
    pub fn frame_sum(&self, a: impl Fn(&[f64]) -> f64, b: impl Fn(&[f64]) -> f64) -> f64 {
        let n = self.n;
        let basis = unit_vectors(n);
        let av: Vec<f64> = basis.iter().map(|e| a(e)).collect();
        let bv: Vec<f64> = basis.iter().map(|e| b(e)).collect();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let w = self.ginv.get(&[i, j]);
                if w != 0.0 {
                    acc += w * av[i] * bv[j];
                }
            }
        }
        acc
    }

    /// `Σ_i A(e_i, e_i)` for a bilinear `A`, as `g^{ab} A(∂a, ∂b)`.
    pub fn frame_trace(&self, a: impl Fn(&[f64], &[f64]) -> f64) -> f64 {
        let n = self.n;
        let basis = unit_vectors(n);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let w = self.ginv.get(&[i, j]);
                if w != 0.0 {
                    acc += w * a(&basis[i], &basis[j]);
                }
            }
        }
        acc
    }
}

/// Coordinate basis of `R^n`.
pub fn unit_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect()
}

/// `T(u, v)` for a `(1,2)` tensor stored `[k][i][j]`.
pub fn vector_valued(t: &TensorValue, u: &[f64], v: &[f64]) -> Vec<f64> {
    let n = t.dim();
    (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for i in 0..n {
                if u[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    acc += t.get(&[k, i, j]) * u[i] * v[j];
                }
            }
            acc
        })
        .collect()
}

/// `R(x, y)z` from `R^l_kij`.
pub fn curvature_apply(r: &TensorValue, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let n = r.dim();
    (0..n)
        .map(|l| {
            let mut acc = 0.0;
            for k in 0..n {
                if z[k] == 0.0 {
                    continue;
                }
                for i in 0..n {
                    if x[i] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        acc += r.get(&[l, k, i, j]) * z[k] * x[i] * y[j];
                    }
                }
            }
            acc
        })
        .collect()
}
