//! The tangent bundle `TM` in induced coordinates `(x, y)`: lifts, the
//! almost complex structure `J`, the Sasaki metric and the Kähler form.
//!
//! Chart vectors on `TM` are `2n` arrays, base part first. With
//! `A^k_i = Γ^k_ij ξ^j` the horizontal lift of `X` is `(X, −AX)` and its
//! vertical lift is `(0, X)`.

pub mod classify;
pub mod lifted;
pub mod oracle;
pub mod sampling;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConnectionField, MetricField};

/// A point of `TM`: base point `x` and fibre coordinates `y = ξ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentPoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl TangentPoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Result<TangentPoint> {
        if x.len() != xi.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: xi.len(),
            });
        }
        Ok(TangentPoint { x, xi })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Induced coordinates `(x¹..xⁿ, y¹..yⁿ)`.
    pub fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(&self.xi).copied().collect()
    }
}

/// Which lift of a base vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lift {
    H,
    V,
}

/// `A^k_i = Γ^k_ij ξ^j` as an `n x n` matrix.
pub fn connection_matrix(gamma: &crate::geometry::TensorValue, xi: &[f64]) -> DMatrix<f64> {
    let n = xi.len();
    DMatrix::from_fn(n, n, |k, i| (0..n).map(|j| gamma.get(&[k, i, j]) * xi[j]).sum())
}

/// Chart coordinates of `(∂i)^H` and `(∂i)^V`, one row per `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedFrame {
    pub horizontal: DMatrix<f64>,
    pub vertical: DMatrix<f64>,
}

impl LiftedFrame {
    pub fn dim(&self) -> usize {
        self.horizontal.nrows()
    }

    /// The `2n x 2n` matrix whose columns are `H_1..H_n, V_1..V_n`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(2 * n, 2 * n, |r, c| {
            if c < n {
                self.horizontal[(c, r)]
            } else {
                self.vertical[(c - n, r)]
            }
        })
    }

    /// Chart coordinates of the lift of a base vector.
    pub fn lift(&self, v: &[f64], kind: Lift) -> Vec<f64> {
        let rows = match kind {
            Lift::H => &self.horizontal,
            Lift::V => &self.vertical,
        };
        let n = self.dim();
        (0..2 * n).map(|c| (0..n).map(|i| v[i] * rows[(i, c)]).sum()).collect()
    }

    /// Split a chart vector into the base vectors of its horizontal and
    /// vertical parts.
    pub fn decompose(&self, w: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let h = w[..n].to_vec();
        // w_y = −A h + v  and row i of `horizontal` holds −A e_i in its y part
        let v = (0..n)
            .map(|k| w[n + k] - (0..n).map(|i| h[i] * self.horizontal[(i, n + k)]).sum::<f64>())
            .collect();
        (h, v)
    }
}

pub fn lift_frame(d: &ConnectionField, p: &TangentPoint) -> Result<LiftedFrame> {
    let gamma = crate::geometry::connection_coefficients(d, &p.x)?;
    Ok(frame_from_matrix(&connection_matrix(&gamma, &p.xi)))
}

/// Lifted frame for a given connection matrix `A`.
pub fn frame_from_matrix(a: &DMatrix<f64>) -> LiftedFrame {
    let n = a.nrows();
    let horizontal = DMatrix::from_fn(n, 2 * n, |i, c| {
        if c < n {
            (c == i) as u8 as f64
        } else {
            -a[(c - n, i)]
        }
    });
    let vertical = DMatrix::from_fn(n, 2 * n, |i, c| (c == n + i) as u8 as f64);
    LiftedFrame { horizontal, vertical }
}

fn blocks(xx: DMatrix<f64>, xy: DMatrix<f64>, yx: DMatrix<f64>, yy: DMatrix<f64>) -> DMatrix<f64> {
    let n = xx.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
        (true, true) => xx[(r, c)],
        (true, false) => xy[(r, c - n)],
        (false, true) => yx[(r - n, c)],
        (false, false) => yy[(r - n, c - n)],
    })
}

/// Sasaki metric in the induced chart:
/// `[[g + AᵀgA, Aᵀg], [gA, g]]`.
pub fn sasaki_metric_from(g: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
    let ga = g * a;
    blocks(g + a.transpose() * &ga, a.transpose() * g, ga, g.clone())
}

/// `J` in the induced chart: `[[−A, −I], [I + A², A]]`.
pub fn almost_complex_from(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    blocks(-a, -&id, &id + a * a, a.clone())
}

/// Kähler form `Ω(u, v) = g̃(Ju, v)` in closed form.
pub fn kahler_form_from(g: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let ga = g * a;
    blocks(&ga - ga.transpose(), g.clone(), -g, DMatrix::zeros(n, n))
}

fn base_data(g: &MetricField, d: &ConnectionField, p: &TangentPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if p.dim() != g.dim() || g.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: p.dim(),
        });
    }
    let gm = g.value(&p.x)?;
    let gamma = crate::geometry::connection_coefficients(d, &p.x)?;
    Ok((gm, connection_matrix(&gamma, &p.xi)))
}

pub fn sasaki_metric_chart(g: &MetricField, d: &ConnectionField, p: &TangentPoint) -> Result<DMatrix<f64>> {
    let (gm, a) = base_data(g, d, p)?;
    crate::geometry::metric::check_nondegenerate(&gm, &p.x)?;
    Ok(sasaki_metric_from(&gm, &a))
}

pub fn almost_complex_chart(d: &ConnectionField, p: &TangentPoint) -> Result<DMatrix<f64>> {
    let gamma = crate::geometry::connection_coefficients(d, &p.x)?;
    Ok(almost_complex_from(&connection_matrix(&gamma, &p.xi)))
}

pub fn kahler_form_chart(g: &MetricField, d: &ConnectionField, p: &TangentPoint) -> Result<DMatrix<f64>> {
    let (gm, a) = base_data(g, d, p)?;
    Ok(kahler_form_from(&gm, &a))
}
