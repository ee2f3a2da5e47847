//! Truncated Taylor jets over chart coordinates.
//!
//! A [`ScalarJet`] carries a value together with all partial derivatives up to
//! a fixed order (at most [`MAX_ORDER`]) with respect to `dim` chart
//! coordinates. Arithmetic propagates the derivatives exactly through the
//! product and chain rules, so any field assembled from jets is evaluated with
//! exact partials up to rounding.
//!
//! Derivative slots are stored densely: `hess` as a `dim x dim` row-major
//! array and `third` as a `dim^3` array. Both are kept fully symmetric.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Highest derivative order a jet can carry.
pub const MAX_ORDER: u8 = 3;

#[derive(Clone, PartialEq)]
pub struct ScalarJet {
    dim: usize,
    order: u8,
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
    third: Vec<f64>,
}

impl fmt::Debug for ScalarJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarJet")
            .field("order", &self.order)
            .field("value", &self.value)
            .field("grad", &self.grad)
            .finish_non_exhaustive()
    }
}

impl ScalarJet {
    /// A constant jet: all derivatives vanish.
    pub fn constant(dim: usize, order: u8, value: f64) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let len = |k: u8| if order >= k { dim.pow(k as u32) } else { 0 };
        ScalarJet {
            dim,
            order,
            value,
            grad: vec![0.0; len(1)],
            hess: vec![0.0; len(2)],
            third: vec![0.0; len(3)],
        }
    }

    /// The coordinate function `x^index` evaluated at `value`.
    pub fn variable(dim: usize, order: u8, index: usize, value: f64) -> Self {
        assert!(index < dim, "variable index {index} out of range for dim {dim}");
        let mut jet = Self::constant(dim, order, value);
        if order >= 1 {
            jet.grad[index] = 1.0;
        }
        jet
    }

    pub fn zero(dim: usize, order: u8) -> Self {
        Self::constant(dim, order, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// First partials; empty for order-0 jets.
    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn d1(&self, i: usize) -> f64 {
        assert!(self.order >= 1, "first derivative requested from order-0 jet");
        self.grad[i]
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        assert!(self.order >= 2, "second derivative requested from order-{} jet", self.order);
        self.hess[i * self.dim + j]
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        assert!(self.order >= 3, "third derivative requested from order-{} jet", self.order);
        self.third[(i * self.dim + j) * self.dim + k]
    }

    /// The jet of `∂f/∂x^i`, one order lower.
    pub fn partial(&self, i: usize) -> ScalarJet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let n = self.dim;
        let mut out = ScalarJet::constant(n, self.order - 1, self.grad[i]);
        if out.order >= 1 {
            out.grad.copy_from_slice(&self.hess[i * n..(i + 1) * n]);
        }
        if out.order >= 2 {
            out.hess.copy_from_slice(&self.third[i * n * n..(i + 1) * n * n]);
        }
        out
    }

    /// Drop derivative slots above `order`.
    pub fn truncate(&self, order: u8) -> ScalarJet {
        if order >= self.order {
            return self.clone();
        }
        let mut out = self.clone();
        out.order = order;
        if order < 3 {
            out.third.clear();
        }
        if order < 2 {
            out.hess.clear();
        }
        if order < 1 {
            out.grad.clear();
        }
        out
    }

    /// Re-express the jet in a larger chart whose first `self.dim`
    /// coordinates are the current ones; the jet is constant along the rest.
    pub fn embed(&self, new_dim: usize) -> ScalarJet {
        assert!(new_dim >= self.dim);
        let n = self.dim;
        let mut out = ScalarJet::constant(new_dim, self.order, self.value);
        for i in 0..n {
            if self.order >= 1 {
                out.grad[i] = self.grad[i];
            }
            for j in 0..n {
                if self.order >= 2 {
                    out.hess[i * new_dim + j] = self.hess[i * n + j];
                }
                for k in 0..n {
                    if self.order >= 3 {
                        out.third[(i * new_dim + j) * new_dim + k] = self.third[(i * n + j) * n + k];
                    }
                }
            }
        }
        out
    }

    /// Apply a scalar function given its value and first three derivatives at
    /// `self.value()`.
    pub fn compose(&self, f0: f64, f1: f64, f2: f64, f3: f64) -> ScalarJet {
        let n = self.dim;
        let mut out = ScalarJet::constant(n, self.order, f0);
        if self.order >= 1 {
            for i in 0..n {
                out.grad[i] = f1 * self.grad[i];
            }
        }
        if self.order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.hess[i * n + j] = f1 * self.hess[i * n + j] + f2 * self.grad[i] * self.grad[j];
                }
            }
        }
        if self.order >= 3 {
            let (g, h) = (&self.grad, &self.hess);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.third[(i * n + j) * n + k] = f1 * self.third[(i * n + j) * n + k]
                            + f2 * (h[i * n + j] * g[k] + h[i * n + k] * g[j] + h[j * n + k] * g[i])
                            + f3 * g[i] * g[j] * g[k];
                    }
                }
            }
        }
        out
    }

    pub fn recip(&self) -> ScalarJet {
        let v = self.value;
        self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v), -6.0 / (v * v * v * v))
    }

    pub fn exp(&self) -> ScalarJet {
        let e = self.value.exp();
        self.compose(e, e, e, e)
    }

    /// Natural logarithm; the caller guarantees a positive value.
    pub fn ln(&self) -> ScalarJet {
        let v = self.value;
        self.compose(v.ln(), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn sqrt(&self) -> ScalarJet {
        let s = self.value.sqrt();
        let v = self.value;
        self.compose(s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v))
    }

    pub fn sin(&self) -> ScalarJet {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s, -c)
    }

    pub fn cos(&self) -> ScalarJet {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c, s)
    }

    /// Real power `u^e`. Integer exponents are evaluated with `powi` so that
    /// non-positive bases stay exact; vanishing falling-factorial
    /// coefficients short-circuit to zero.
    pub fn powf(&self, e: f64) -> ScalarJet {
        let u = self.value;
        let integer = e.fract() == 0.0 && e.abs() < i32::MAX as f64;
        let pw = |p: f64| if integer { u.powi(p as i32) } else { u.powf(p) };
        let term = |coef: f64, p: f64| if coef == 0.0 { 0.0 } else { coef * pw(p) };
        self.compose(
            pw(e),
            term(e, e - 1.0),
            term(e * (e - 1.0), e - 2.0),
            term(e * (e - 1.0) * (e - 2.0), e - 3.0),
        )
    }

    /// True when the value and every derivative slot are exactly zero.
    pub fn is_zero(&self) -> bool {
        self.value == 0.0
            && self.grad.iter().all(|v| *v == 0.0)
            && self.hess.iter().all(|v| *v == 0.0)
            && self.third.iter().all(|v| *v == 0.0)
    }

    pub fn scale(&self, c: f64) -> ScalarJet {
        ScalarJet {
            dim: self.dim,
            order: self.order,
            value: self.value * c,
            grad: self.grad.iter().map(|v| v * c).collect(),
            hess: self.hess.iter().map(|v| v * c).collect(),
            third: self.third.iter().map(|v| v * c).collect(),
        }
    }

    fn zip(&self, other: &ScalarJet, f: impl Fn(f64, f64) -> f64) -> ScalarJet {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
        let order = self.order.min(other.order);
        let a = self.truncate(order);
        let b = other.truncate(order);
        ScalarJet {
            dim: self.dim,
            order,
            value: f(a.value, b.value),
            grad: a.grad.iter().zip(&b.grad).map(|(x, y)| f(*x, *y)).collect(),
            hess: a.hess.iter().zip(&b.hess).map(|(x, y)| f(*x, *y)).collect(),
            third: a.third.iter().zip(&b.third).map(|(x, y)| f(*x, *y)).collect(),
        }
    }

    fn product(&self, other: &ScalarJet) -> ScalarJet {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
        let n = self.dim;
        let order = self.order.min(other.order);
        let (a, b) = (self, other);
        let mut out = ScalarJet::constant(n, order, a.value * b.value);
        if order >= 1 {
            for i in 0..n {
                out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
            }
        }
        if order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    let ij = i * n + j;
                    out.hess[ij] = a.hess[ij] * b.value
                        + a.grad[i] * b.grad[j]
                        + a.grad[j] * b.grad[i]
                        + a.value * b.hess[ij];
                }
            }
        }
        if order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let ijk = (i * n + j) * n + k;
                        out.third[ijk] = a.third[ijk] * b.value
                            + a.hess[i * n + j] * b.grad[k]
                            + a.hess[i * n + k] * b.grad[j]
                            + a.hess[j * n + k] * b.grad[i]
                            + a.grad[i] * b.hess[j * n + k]
                            + a.grad[j] * b.hess[i * n + k]
                            + a.grad[k] * b.hess[i * n + j]
                            + a.value * b.third[ijk];
                    }
                }
            }
        }
        out
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&ScalarJet> for &ScalarJet {
            type Output = ScalarJet;
            fn $method(self, rhs: &ScalarJet) -> ScalarJet {
                let f: fn(&ScalarJet, &ScalarJet) -> ScalarJet = $body;
                f(self, rhs)
            }
        }
        impl $trait<ScalarJet> for ScalarJet {
            type Output = ScalarJet;
            fn $method(self, rhs: ScalarJet) -> ScalarJet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ScalarJet> for ScalarJet {
            type Output = ScalarJet;
            fn $method(self, rhs: &ScalarJet) -> ScalarJet {
                (&self).$method(rhs)
            }
        }
        impl $trait<ScalarJet> for &ScalarJet {
            type Output = ScalarJet;
            fn $method(self, rhs: ScalarJet) -> ScalarJet {
                self.$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a.zip(b, |x, y| x + y));
jet_binop!(Sub, sub, |a, b| a.zip(b, |x, y| x - y));
jet_binop!(Mul, mul, |a, b| a.product(b));
jet_binop!(Div, div, |a, b| a.product(&b.recip()));

impl Add<f64> for &ScalarJet {
    type Output = ScalarJet;
    fn add(self, rhs: f64) -> ScalarJet {
        let mut out = self.clone();
        out.value += rhs;
        out
    }
}

impl Add<f64> for ScalarJet {
    type Output = ScalarJet;
    fn add(mut self, rhs: f64) -> ScalarJet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for ScalarJet {
    type Output = ScalarJet;
    fn sub(mut self, rhs: f64) -> ScalarJet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for &ScalarJet {
    type Output = ScalarJet;
    fn mul(self, rhs: f64) -> ScalarJet {
        self.scale(rhs)
    }
}

impl Mul<f64> for ScalarJet {
    type Output = ScalarJet;
    fn mul(self, rhs: f64) -> ScalarJet {
        self.scale(rhs)
    }
}

impl Neg for &ScalarJet {
    type Output = ScalarJet;
    fn neg(self) -> ScalarJet {
        self.scale(-1.0)
    }
}

impl Neg for ScalarJet {
    type Output = ScalarJet;
    fn neg(self) -> ScalarJet {
        self.scale(-1.0)
    }
}

impl AddAssign<&ScalarJet> for ScalarJet {
    fn add_assign(&mut self, rhs: &ScalarJet) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&ScalarJet> for ScalarJet {
    fn sub_assign(&mut self, rhs: &ScalarJet) {
        *self = &*self - rhs;
    }
}

/// Invert a square matrix of jets by Gauss-Jordan elimination with partial
/// pivoting on the values. Returns `None` when a pivot value vanishes.
pub fn invert_matrix(m: &[ScalarJet], n: usize) -> Option<Vec<ScalarJet>> {
    assert_eq!(m.len(), n * n);
    let dim = m[0].dim();
    let order = m.iter().map(|j| j.order()).min().unwrap_or(0);
    let mut a: Vec<ScalarJet> = m.iter().map(|j| j.truncate(order)).collect();
    let mut inv: Vec<ScalarJet> = (0..n * n)
        .map(|idx| ScalarJet::constant(dim, order, if idx / n == idx % n { 1.0 } else { 0.0 }))
        .collect();
    let scale = m.iter().map(|j| j.value().abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| {
                a[r1 * n + col].value().abs().total_cmp(&a[r2 * n + col].value().abs())
            })
            .unwrap();
        if a[pivot * n + col].value().abs() <= 1e-14 * scale {
            return None;
        }
        if pivot != col {
            for c in 0..n {
                a.swap(pivot * n + c, col * n + c);
                inv.swap(pivot * n + c, col * n + c);
            }
        }
        let p = a[col * n + col].recip();
        for c in 0..n {
            a[col * n + c] = &a[col * n + c] * &p;
            inv[col * n + c] = &inv[col * n + c] * &p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r * n + col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..n {
                let t = &factor * &a[col * n + c];
                a[r * n + c] -= &t;
                let t = &factor * &inv[col * n + c];
                inv[r * n + c] -= &t;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn exp_at_zero_has_unit_derivatives() {
        let x = ScalarJet::variable(1, 3, 0, 0.0);
        let e = x.exp();
        assert_eq!(e.value(), 1.0);
        assert_eq!(e.d1(0), 1.0);
        assert_eq!(e.d2(0, 0), 1.0);
        assert_eq!(e.d3(0, 0, 0), 1.0);
    }

    #[test]
    fn bilinear_product() {
        let x = ScalarJet::variable(2, 3, 0, 2.0);
        let y = ScalarJet::variable(2, 3, 1, 3.0);
        let p = &x * &y;
        assert_eq!(p.value(), 6.0);
        assert_eq!(p.grad(), &[3.0, 2.0]);
        assert_eq!(p.d2(0, 1), 1.0);
        assert_eq!(p.d2(1, 0), 1.0);
        assert_eq!(p.d2(0, 0), 0.0);
        assert_eq!(p.d3(0, 0, 1), 0.0);
    }

    #[test]
    fn partial_lowers_order() {
        // f = x^2 y at (1, 2): ∂x f = 2xy
        let x = ScalarJet::variable(2, 3, 0, 1.0);
        let y = ScalarJet::variable(2, 3, 1, 2.0);
        let f = &(&x * &x) * &y;
        let fx = f.partial(0);
        assert_eq!(fx.order(), 2);
        assert!(close(fx.value(), 4.0));
        assert!(close(fx.d1(0), 4.0));
        assert!(close(fx.d1(1), 2.0));
        assert!(close(fx.d2(0, 1), 2.0));
    }

    #[test]
    fn quotient_matches_hand_derivatives() {
        // f = 1 / x at x = 2: f' = -1/4, f'' = 1/4, f''' = -3/8
        let x = ScalarJet::variable(1, 3, 0, 2.0);
        let one = ScalarJet::constant(1, 3, 1.0);
        let f = &one / &x;
        assert!(close(f.d1(0), -0.25));
        assert!(close(f.d2(0, 0), 0.25));
        assert!(close(f.d3(0, 0, 0), -0.375));
    }

    #[test]
    fn integer_power_at_zero_base() {
        let x = ScalarJet::variable(1, 3, 0, 0.0);
        let f = x.powf(2.0);
        assert_eq!(f.value(), 0.0);
        assert_eq!(f.d1(0), 0.0);
        assert_eq!(f.d2(0, 0), 2.0);
        assert_eq!(f.d3(0, 0, 0), 0.0);
    }

    #[test]
    fn mixed_orders_truncate_to_minimum() {
        let a = ScalarJet::variable(2, 3, 0, 1.0);
        let b = ScalarJet::variable(2, 1, 1, 1.0);
        assert_eq!((&a + &b).order(), 1);
        assert_eq!((&a * &b).order(), 1);
    }

    #[test]
    fn embed_keeps_derivatives_in_leading_slots() {
        let x = ScalarJet::variable(2, 2, 1, 0.5).sin();
        let e = x.embed(4);
        assert_eq!(e.dim(), 4);
        assert!(close(e.d1(1), 0.5f64.cos()));
        assert_eq!(e.d1(3), 0.0);
        assert!(close(e.d2(1, 1), -(0.5f64.sin())));
    }

    #[test]
    fn matrix_inverse_of_jets() {
        // M = [[x, 1], [0, y]] at (2, 4); (M^-1)_00 = 1/x
        let x = ScalarJet::variable(2, 2, 0, 2.0);
        let y = ScalarJet::variable(2, 2, 1, 4.0);
        let one = ScalarJet::constant(2, 2, 1.0);
        let zero = ScalarJet::zero(2, 2);
        let inv = invert_matrix(&[x.clone(), one, zero, y.clone()], 2).unwrap();
        assert!(close(inv[0].value(), 0.5));
        assert!(close(inv[0].d1(0), -0.25));
        // (M^-1)_01 = -1/(x y)
        assert!(close(inv[1].value(), -0.125));
        assert!(close(inv[1].d1(0), 1.0 / 16.0));
        assert!(close(inv[1].d2(0, 1), -1.0 / 64.0));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let one = ScalarJet::constant(1, 1, 1.0);
        assert!(invert_matrix(&[one.clone(), one.clone(), one.clone(), one], 2).is_none());
    }
}
