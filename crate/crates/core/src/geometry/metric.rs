use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{eval_field, Expr};
use crate::jet::{invert_matrix, ScalarJet};

/// Relative determinant threshold below which a metric counts as singular.
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
enum MetricSource {
    Exprs(Vec<Expr>),
    /// Fisher metric of the Gaussian family induced by a linear map
    /// `rho(xi) = sum_a xi^a B_a`, in coordinates `(theta, xi)`.
    Fisher { size: usize, basis: Vec<Vec<f64>> },
}

/// A metric `g_ij(x)` on a chart, evaluable as jets.
#[derive(Debug, Clone)]
pub struct MetricField {
    n: usize,
    source: MetricSource,
    positive_definite_hint: bool,
}

impl MetricField {
    /// Metric from a row-major `n x n` matrix of expressions. Symmetry is
    /// checked structurally first and numerically at sample points by
    /// [`MetricField::check_symmetric_at`].
    pub fn from_exprs(n: usize, components: Vec<Expr>, positive_definite_hint: bool) -> Result<MetricField> {
        if components.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: components.len(),
            });
        }
        if let Some(max) = components.iter().filter_map(Expr::max_coord).max() {
            if max >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: max + 1,
                });
            }
        }
        Ok(MetricField {
            n,
            source: MetricSource::Exprs(components),
            positive_definite_hint,
        })
    }

    /// Fisher metric on `(theta in R^size, xi in R^m)` for the basis
    /// matrices `B_a` (each row-major `size x size`).
    pub fn fisher(size: usize, basis: Vec<Vec<f64>>) -> MetricField {
        MetricField {
            n: size + basis.len(),
            source: MetricSource::Fisher { size, basis },
            positive_definite_hint: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn positive_definite_hint(&self) -> bool {
        self.positive_definite_hint
    }

    pub fn expressions(&self) -> Option<&[Expr]> {
        match &self.source {
            MetricSource::Exprs(e) => Some(e),
            MetricSource::Fisher { .. } => None,
        }
    }

    /// Components as jets of the given order, row-major.
    pub fn jets(&self, x: &[f64], order: u8) -> Result<Vec<ScalarJet>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        match &self.source {
            MetricSource::Exprs(e) => eval_field(e, self.n, x, order),
            MetricSource::Fisher { size, basis } => fisher_jets(*size, basis, x, order),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let jets = self.jets(x, 0)?;
        Ok(DMatrix::from_iterator(self.n, self.n, jets.iter().map(|j| j.value())).transpose())
    }

    /// Numerical symmetry check at `x`.
    pub fn check_symmetric_at(&self, x: &[f64]) -> Result<()> {
        let g = self.value(x)?;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let (a, b) = (g[(i, j)], g[(j, i)]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::AsymmetricMetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Fails with `SingularMetric` when `det g` vanishes at `x`.
    pub fn check_nondegenerate_at(&self, x: &[f64]) -> Result<()> {
        let g = self.value(x)?;
        check_nondegenerate(&g, x)
    }
}

pub(crate) fn check_nondegenerate(g: &DMatrix<f64>, x: &[f64]) -> Result<()> {
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let det = g.determinant();
    if scale == 0.0 || !det.is_finite() || det.abs() <= SINGULAR_TOL * scale.powi(g.nrows() as i32) {
        return Err(Error::SingularMetric(x.to_vec()));
    }
    Ok(())
}

/// Inverse metric jets; `SingularMetric` if the value matrix is singular.
pub fn inverse_jets(g: &[ScalarJet], n: usize, x: &[f64]) -> Result<Vec<ScalarJet>> {
    let vals = DMatrix::from_iterator(n, n, g.iter().map(|j| j.value()));
    check_nondegenerate(&vals, x)?;
    invert_matrix(g, n).ok_or_else(|| Error::SingularMetric(x.to_vec()))
}

/// Signature `(positive, negative)` eigenvalue counts of a symmetric matrix.
pub fn signature(g: &DMatrix<f64>) -> (usize, usize) {
    let eig = g.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pos = eig.eigenvalues.iter().filter(|v| **v > 1e-12 * scale).count();
    let neg = eig.eigenvalues.iter().filter(|v| **v < -1e-12 * scale).count();
    (pos, neg)
}

// Hessian of phi = (theta^T P theta - log det rho) / 2 with P = rho^{-1},
// written out in closed form so the jets stay exact to order 3:
//   g_{theta theta} = P
//   g_{theta_a xi_b} = -(P B_b P theta)_a
//   g_{xi_a xi_b} = v_a^T P v_b + tr(P B_a P B_b) / 2,   v_a = B_a P theta
fn fisher_jets(size: usize, basis: &[Vec<f64>], x: &[f64], order: u8) -> Result<Vec<ScalarJet>> {
    let m = basis.len();
    let dim = size + m;
    let vars: Vec<ScalarJet> = (0..dim).map(|i| ScalarJet::variable(dim, order, i, x[i])).collect();
    let theta = &vars[..size];
    let xi = &vars[size..];
    let rho: Vec<ScalarJet> = (0..size * size)
        .map(|idx| {
            basis
                .iter()
                .zip(xi)
                .fold(ScalarJet::zero(dim, order), |acc, (b, v)| acc + v * b[idx])
        })
        .collect();
    let rho_vals = DMatrix::from_iterator(size, size, rho.iter().map(|j| j.value()));
    if rho_vals.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite(x[size..].to_vec()));
    }
    let p = invert_matrix(&rho, size).ok_or_else(|| Error::NotPositiveDefinite(x[size..].to_vec()))?;

    let mat_vec = |mat: &[ScalarJet], v: &[ScalarJet]| -> Vec<ScalarJet> {
        (0..size)
            .map(|r| (0..size).fold(ScalarJet::zero(dim, order), |acc, c| acc + &mat[r * size + c] * &v[c]))
            .collect()
    };
    let const_mat_vec = |b: &[f64], v: &[ScalarJet]| -> Vec<ScalarJet> {
        (0..size)
            .map(|r| (0..size).fold(ScalarJet::zero(dim, order), |acc, c| acc + &v[c] * b[r * size + c]))
            .collect()
    };
    let dot = |a: &[ScalarJet], b: &[ScalarJet]| a.iter().zip(b).fold(ScalarJet::zero(dim, order), |acc, (u, v)| acc + u * v);

    let u = mat_vec(&p, theta);
    let v: Vec<Vec<ScalarJet>> = basis.iter().map(|b| const_mat_vec(b, &u)).collect();
    let pv: Vec<Vec<ScalarJet>> = v.iter().map(|va| mat_vec(&p, va)).collect();
    // P B_a as full matrices for the trace term
    let pb: Vec<Vec<ScalarJet>> = basis
        .iter()
        .map(|b| {
            (0..size * size)
                .map(|idx| {
                    let (r, c) = (idx / size, idx % size);
                    (0..size).fold(ScalarJet::zero(dim, order), |acc, k| acc + &p[r * size + k] * b[k * size + c])
                })
                .collect()
        })
        .collect();

    let mut g = vec![ScalarJet::zero(dim, order); dim * dim];
    for a in 0..size {
        for b in 0..size {
            g[a * dim + b] = p[a * size + b].clone();
        }
    }
    for a in 0..size {
        for beta in 0..m {
            let e = -&pv[beta][a];
            g[a * dim + size + beta] = e.clone();
            g[(size + beta) * dim + a] = e;
        }
    }
    for alpha in 0..m {
        for beta in alpha..m {
            let mut tr = ScalarJet::zero(dim, order);
            for r in 0..size {
                for c in 0..size {
                    tr += &(&pb[alpha][r * size + c] * &pb[beta][c * size + r]);
                }
            }
            let e = dot(&v[alpha], &pv[beta]) + tr * 0.5;
            g[(size + alpha) * dim + size + beta] = e.clone();
            g[(size + beta) * dim + size + alpha] = e;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn exprs(src: &[&str], n: usize) -> Vec<Expr> {
        src.iter().map(|s| parse_expr(s, n).unwrap()).collect()
    }

    #[test]
    fn fisher_one_dimensional_matches_hand_hessian() {
        // rho(t) = t: phi = (theta^2 / t - log t) / 2
        let g = MetricField::fisher(1, vec![vec![1.0]]);
        let v = g.value(&[0.0, 1.0]).unwrap();
        assert!((v[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((v[(1, 1)] - 0.5).abs() < 1e-15);
        assert_eq!(v[(0, 1)], 0.0);
    }

    #[test]
    fn fisher_matches_expression_hessian() {
        // same potential written as an expression, differentiated by jets
        let phi = parse_expr("(x1*x1/x2 - log(x2)) / 2", 2).unwrap();
        let g = MetricField::fisher(1, vec![vec![1.0]]);
        let x = [0.7, 1.3];
        let jet = phi.eval_jet(&x, 3).unwrap();
        let gj = g.jets(&x, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((gj[i * 2 + j].value() - jet.d2(i, j)).abs() < 1e-13);
                for k in 0..2 {
                    assert!((gj[i * 2 + j].d1(k) - jet.d3(i, j, k)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fisher_rejects_indefinite_rho() {
        let g = MetricField::fisher(1, vec![vec![1.0]]);
        assert!(matches!(g.jets(&[0.0, -1.0], 0), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn singular_metric_detected() {
        let g = MetricField::from_exprs(2, exprs(&["1", "1", "1", "1"], 2), false).unwrap();
        assert!(matches!(g.check_nondegenerate_at(&[0.0, 0.0]), Err(Error::SingularMetric(_))));
    }

    #[test]
    fn asymmetric_metric_detected() {
        let g = MetricField::from_exprs(2, exprs(&["1", "x1", "0", "1"], 2), false).unwrap();
        assert!(g.check_symmetric_at(&[0.0, 0.0]).is_ok());
        assert_eq!(g.check_symmetric_at(&[0.5, 0.0]), Err(Error::AsymmetricMetric { row: 0, col: 1 }));
    }

    #[test]
    fn signature_counts() {
        let m = DMatrix::from_row_slice(3, 3, &[-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        assert_eq!(signature(&m), (2, 1));
    }
}
