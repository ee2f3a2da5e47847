use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::metric::{inverse_jets, MetricField};
use crate::geometry::tensor::{JetTensor, Slot};
use crate::jet::{ScalarJet, MAX_ORDER};

/// An affine connection on a chart, `D_{∂i} ∂j = Γ^k_ij ∂k`. No symmetry of
/// the coefficients is assumed.
#[derive(Debug, Clone)]
pub enum ConnectionField {
    /// Explicit coefficients, stored `[k][i][j]` row-major.
    Coefficients { n: usize, gamma: Vec<Expr> },
    LeviCivita(Arc<MetricField>),
    /// The dual of `base` with respect to `metric`.
    Dual {
        metric: Arc<MetricField>,
        base: Arc<ConnectionField>,
    },
    /// `base` plus a (1,2) tensor field given by expressions `[k][i][j]`.
    Shifted {
        base: Arc<ConnectionField>,
        shift: Vec<Expr>,
    },
}

/// Connection coefficients near a point as jets, `[k][i][j]`.
#[derive(Debug, Clone)]
pub struct ConnectionJets {
    n: usize,
    gamma: Vec<ScalarJet>,
}

impl ConnectionJets {
    pub fn new(n: usize, gamma: Vec<ScalarJet>) -> ConnectionJets {
        assert_eq!(gamma.len(), n * n * n);
        ConnectionJets { n, gamma }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u8 {
        self.gamma.iter().map(|j| j.order()).min().unwrap_or(MAX_ORDER)
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &ScalarJet {
        &self.gamma[(k * self.n + i) * self.n + j]
    }

    pub fn jets(&self) -> &[ScalarJet] {
        &self.gamma
    }

    pub fn as_tensor(&self) -> JetTensor {
        JetTensor::new(vec![Slot::Up, Slot::Down, Slot::Down], self.n, self.gamma.clone())
    }
}

impl ConnectionField {
    pub fn from_exprs(n: usize, gamma: Vec<Expr>) -> Result<ConnectionField> {
        if gamma.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                found: gamma.len(),
            });
        }
        Ok(ConnectionField::Coefficients { n, gamma })
    }

    /// The standard flat connection of the chart, `Γ = 0`.
    pub fn flat(n: usize) -> ConnectionField {
        ConnectionField::Coefficients {
            n,
            gamma: vec![Expr::Num(0.0); n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConnectionField::Coefficients { n, .. } => *n,
            ConnectionField::LeviCivita(g) => g.dim(),
            ConnectionField::Dual { metric, .. } => metric.dim(),
            ConnectionField::Shifted { base, .. } => base.dim(),
        }
    }

    /// Highest jet order this field can deliver.
    pub fn max_order(&self) -> u8 {
        match self {
            ConnectionField::Coefficients { .. } => MAX_ORDER,
            ConnectionField::LeviCivita(_) => MAX_ORDER - 1,
            ConnectionField::Dual { base, .. } => base.max_order().min(MAX_ORDER - 1),
            ConnectionField::Shifted { base, .. } => base.max_order(),
        }
    }

    pub fn eval(&self, x: &[f64], order: u8) -> Result<ConnectionJets> {
        if order > self.max_order() {
            return Err(Error::OrderExceeded {
                requested: order,
                available: self.max_order(),
            });
        }
        match self {
            ConnectionField::Coefficients { n, gamma } => {
                if x.len() != *n {
                    return Err(Error::DimensionMismatch {
                        expected: *n,
                        found: x.len(),
                    });
                }
                let jets = gamma
                    .iter()
                    .enumerate()
                    .map(|(idx, e)| {
                        e.eval_jet(x, order).map_err(|source| Error::Component {
                            row: idx / (n * n),
                            col: idx % (n * n),
                            source: Box::new(source),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ConnectionJets::new(*n, jets))
            }
            ConnectionField::LeviCivita(g) => {
                let gj = g.jets(x, order + 1)?;
                levi_civita_jets(&gj, g.dim(), x)
            }
            ConnectionField::Dual { metric, base } => {
                let gj = metric.jets(x, order + 1)?;
                let bj = base.eval(x, order)?;
                dual_jets(&gj, &bj, x)
            }
            ConnectionField::Shifted { base, shift } => {
                let bj = base.eval(x, order)?;
                let n = bj.dim();
                let gamma = bj
                    .gamma
                    .iter()
                    .zip(shift)
                    .map(|(b, s)| Ok(b + &s.eval_jet(x, order)?))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ConnectionJets::new(n, gamma))
            }
        }
    }
}

/// Christoffel symbols from metric jets; the result is one order lower.
pub fn levi_civita_jets(g: &[ScalarJet], n: usize, x: &[f64]) -> Result<ConnectionJets> {
    let ginv = inverse_jets(g, n, x)?;
    let dg = |i: usize, j: usize, l: usize| g[i * n + j].partial(l);
    // first kind: Γ_{l,ij} = (∂_i g_jl + ∂_j g_il - ∂_l g_ij) / 2
    let mut first = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                first.push((dg(j, l, i) + dg(i, l, j) - dg(i, j, l)) * 0.5);
            }
        }
    }
    let order = first[0].order();
    let dim = g[0].dim();
    let mut gamma = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = ScalarJet::zero(dim, order);
                for l in 0..n {
                    acc += &(&ginv[k * n + l] * &first[(l * n + i) * n + j]);
                }
                gamma.push(acc);
            }
        }
    }
    Ok(ConnectionJets::new(n, gamma))
}

/// Dual connection coefficients `Γ*^k_ij = g^{kl}(∂_i g_jl − Γ^m_il g_jm)`.
pub fn dual_jets(g: &[ScalarJet], base: &ConnectionJets, x: &[f64]) -> Result<ConnectionJets> {
    let n = base.dim();
    let ginv = inverse_jets(g, n, x)?;
    let order = base.order().min(g[0].order().saturating_sub(1));
    let dim = g[0].dim();
    let mut lowered = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let mut acc = g[j * n + l].partial(i).truncate(order);
                for m in 0..n {
                    acc -= &(base.get(m, i, l) * &g[j * n + m]);
                }
                lowered.push(acc);
            }
        }
    }
    let mut gamma = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = ScalarJet::zero(dim, order);
                for l in 0..n {
                    acc += &(&ginv[k * n + l] * &lowered[(i * n + j) * n + l]);
                }
                gamma.push(acc);
            }
        }
    }
    Ok(ConnectionJets::new(n, gamma))
}

/// `T^k_ij = Γ^k_ij − Γ^k_ji`, same order as the input.
pub fn torsion_jets(c: &ConnectionJets) -> JetTensor {
    JetTensor::from_fn(vec![Slot::Up, Slot::Down, Slot::Down], c.dim(), |idx| {
        c.get(idx[0], idx[1], idx[2]) - c.get(idx[0], idx[2], idx[1])
    })
}

/// `R^l_kij` with `R(∂_i, ∂_j)∂_k = R^l_kij ∂_l`; one order lower than `c`.
pub fn curvature_jets(c: &ConnectionJets) -> JetTensor {
    let n = c.dim();
    let order = c.order() - 1;
    let slots = vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down];
    JetTensor::from_fn(slots, n, |idx| {
        let (l, k, i, j) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = c.get(l, j, k).partial(i) - c.get(l, i, k).partial(j);
        for m in 0..n {
            acc += &(&c.get(l, i, m).truncate(order) * &c.get(m, j, k).truncate(order));
            acc -= &(&c.get(l, j, m).truncate(order) * &c.get(m, i, k).truncate(order));
        }
        acc
    })
}

/// Covariant derivative of a jet tensor field. The derivative index becomes
/// the new first (covariant) slot: `out[d][..] = (D_{∂d} T)[..]`.
pub fn cov_deriv_jets(c: &ConnectionJets, t: &JetTensor) -> Result<JetTensor> {
    let available = t.order();
    if available == 0 {
        return Err(Error::OrderExceeded {
            requested: 1,
            available: 0,
        });
    }
    let n = c.dim();
    let order = (available - 1).min(c.order());
    let rank = t.rank();
    let mut slots = vec![Slot::Down];
    slots.extend_from_slice(t.variance());
    let variance = t.variance().to_vec();
    Ok(JetTensor::from_fn(slots, n, |idx| {
        let d = idx[0];
        let orig = &idx[1..];
        let mut acc = t.get(orig).partial(d).truncate(order);
        let mut moved = orig.to_vec();
        for s in 0..rank {
            for m in 0..n {
                moved[s] = m;
                let comp = t.get(&moved).truncate(order);
                match variance[s] {
                    Slot::Up => acc += &(c.get(orig[s], d, m).truncate(order) * comp),
                    Slot::Down => acc -= &(c.get(m, d, orig[s]).truncate(order) * comp),
                }
            }
            moved[s] = orig[s];
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn metric(src: &[&str], n: usize) -> Arc<MetricField> {
        let e = src.iter().map(|s| parse_expr(s, n).unwrap()).collect();
        Arc::new(MetricField::from_exprs(n, e, true).unwrap())
    }

    fn coeffs(n: usize, entries: &[((usize, usize, usize), &str)]) -> ConnectionField {
        let mut gamma = vec![Expr::Num(0.0); n * n * n];
        for ((k, i, j), s) in entries {
            gamma[(k * n + i) * n + j] = parse_expr(s, n).unwrap();
        }
        ConnectionField::from_exprs(n, gamma).unwrap()
    }

    #[test]
    fn euclidean_christoffels_vanish() {
        let g = metric(&["1", "0", "0", "1"], 2);
        let c = ConnectionField::LeviCivita(g).eval(&[0.3, 0.1], 2).unwrap();
        assert!(c.jets().iter().all(|j| j.value() == 0.0));
    }

    #[test]
    fn exp_diagonal_christoffels() {
        let g = metric(&["exp(x1)", "0", "0", "exp(x2)"], 2);
        let c = ConnectionField::LeviCivita(g).eval(&[0.0, 0.0], 1).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let want = if k == i && i == j { 0.5 } else { 0.0 };
                    assert!((c.get(k, i, j).value() - want).abs() < 1e-15, "{k}{i}{j}");
                }
            }
        }
    }

    #[test]
    fn dual_of_single_entry_connection() {
        // g = I, Γ^1_22 = 1 (zero-based Γ[0][1][1]) => only Γ*^2_21 = -1
        let g = metric(&["1", "0", "0", "1"], 2);
        let d = Arc::new(coeffs(2, &[((0, 1, 1), "1")]));
        let dual = ConnectionField::Dual { metric: g, base: d }.eval(&[0.2, 0.4], 1).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let want = if (k, i, j) == (1, 1, 0) { -1.0 } else { 0.0 };
                    assert_eq!(dual.get(k, i, j).value(), want, "{k}{i}{j}");
                }
            }
        }
        let t = torsion_jets(&dual);
        assert_eq!(t.get(&[1, 1, 0]).value(), -1.0);
        assert_eq!(t.get(&[1, 0, 1]).value(), 1.0);
    }

    #[test]
    fn constant_connection_can_be_flat() {
        let c = coeffs(2, &[((1, 0, 0), "-1")]).eval(&[0.0, 0.0], 2).unwrap();
        let r = curvature_jets(&c);
        assert!(r.comps().iter().all(|j| j.value() == 0.0));
    }

    #[test]
    fn torsion_of_single_entry() {
        let c = coeffs(2, &[((0, 0, 1), "1")]).eval(&[0.0, 0.0], 0).unwrap();
        let t = torsion_jets(&c);
        assert_eq!(t.get(&[0, 0, 1]).value(), 1.0);
        assert_eq!(t.get(&[0, 1, 0]).value(), -1.0);
    }

    #[test]
    fn unit_sphere_has_unit_sectional_curvature() {
        let g = metric(&["1", "0", "0", "sin(x1)*sin(x1)"], 2);
        for x in [[0.7, 0.2], [1.3, -2.0], [2.2, 0.9]] {
            let gv = g.value(&x).unwrap();
            let c = ConnectionField::LeviCivita(g.clone()).eval(&x, 1).unwrap();
            let r = curvature_jets(&c);
            // K = g(R(e1,e2)e2, e1) / det g
            let num: f64 = (0..2).map(|l| gv[(0, l)] * r.get(&[l, 1, 0, 1]).value()).sum();
            let k = num / gv.determinant();
            assert!((k - 1.0).abs() < 1e-12, "K = {k}");
        }
    }

    #[test]
    fn levi_civita_is_metric_compatible() {
        let g = metric(&["2 + sin(x1)", "0.3*x2", "0.3*x2", "1 + x1*x1"], 2);
        let x = [0.4, -0.6];
        let gj = g.jets(&x, 2).unwrap();
        let c = ConnectionField::LeviCivita(g).eval(&x, 1).unwrap();
        let gt = JetTensor::new(vec![Slot::Down, Slot::Down], 2, gj);
        let dg = cov_deriv_jets(&c, &gt).unwrap();
        assert!(dg.comps().iter().all(|j| j.value().abs() < 1e-14));
    }

    #[test]
    fn order_is_capped() {
        let g = metric(&["1", "0", "0", "1"], 2);
        let lc = ConnectionField::LeviCivita(g);
        assert!(matches!(lc.eval(&[0.0, 0.0], 3), Err(Error::OrderExceeded { .. })));
    }
}
