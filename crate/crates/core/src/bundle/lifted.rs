//! Closed-form curvature, Ricci, `dΩ` and Nijenhuis values of the Sasaki
//! structure, written in terms of base-manifold tensors of `(g, D)`.
//!
//! Sums over an orthonormal frame `Σ_i A(e_i) B(e_i)` are evaluated as
//! `g^{ab} A(∂a) B(∂b)`, which also covers indefinite `g`.

use serde::{Deserialize, Serialize};

use crate::bundle::Lift;
use crate::geometry::{curvature_apply, unit_vectors, vector_valued, LocalGeometry};

/// Lift pattern of the four slots of `R̃_g̃(Z, W, X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurvaturePattern {
    Hhhh,
    Hvvv,
    Vvvv,
    Hvhh,
    Vvhh,
    Hvhv,
}

impl CurvaturePattern {
    pub const ALL: [CurvaturePattern; 6] = [
        CurvaturePattern::Hhhh,
        CurvaturePattern::Hvvv,
        CurvaturePattern::Vvvv,
        CurvaturePattern::Hvhh,
        CurvaturePattern::Vvhh,
        CurvaturePattern::Hvhv,
    ];

    pub fn lifts(self) -> [Lift; 4] {
        use Lift::{H, V};
        match self {
            CurvaturePattern::Hhhh => [H, H, H, H],
            CurvaturePattern::Hvvv => [H, V, V, V],
            CurvaturePattern::Vvvv => [V, V, V, V],
            CurvaturePattern::Hvhh => [H, V, H, H],
            CurvaturePattern::Vvhh => [V, V, H, H],
            CurvaturePattern::Hvhv => [H, V, H, V],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CurvaturePattern::Hhhh => "HHHH",
            CurvaturePattern::Hvvv => "HVVV",
            CurvaturePattern::Vvvv => "VVVV",
            CurvaturePattern::Hvhh => "HVHH",
            CurvaturePattern::Vvhh => "VVHH",
            CurvaturePattern::Hvhv => "HVHV",
        }
    }
}

/// Lift pattern of `Ric̃(X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RicciPattern {
    Hh,
    Vv,
    Hv,
}

impl RicciPattern {
    pub const ALL: [RicciPattern; 3] = [RicciPattern::Hh, RicciPattern::Vv, RicciPattern::Hv];

    pub fn lifts(self) -> [Lift; 2] {
        match self {
            RicciPattern::Hh => [Lift::H, Lift::H],
            RicciPattern::Vv => [Lift::V, Lift::V],
            RicciPattern::Hv => [Lift::H, Lift::V],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RicciPattern::Hh => "HH",
            RicciPattern::Vv => "VV",
            RicciPattern::Hv => "HV",
        }
    }
}

/// Lift pattern of `dΩ(X, Y, Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormPattern {
    Hhh,
    Hhv,
    Hvv,
    Vvv,
}

impl FormPattern {
    pub const ALL: [FormPattern; 4] = [FormPattern::Hhh, FormPattern::Hhv, FormPattern::Hvv, FormPattern::Vvv];

    pub fn lifts(self) -> [Lift; 3] {
        use Lift::{H, V};
        match self {
            FormPattern::Hhh => [H, H, H],
            FormPattern::Hhv => [H, H, V],
            FormPattern::Hvv => [H, V, V],
            FormPattern::Vvv => [V, V, V],
        }
    }
}

/// Pointwise evaluator of the lifted formulas at `(x, ξ)`.
pub struct Lifted<'a> {
    pub geo: &'a LocalGeometry,
    pub xi: &'a [f64],
}

impl<'a> Lifted<'a> {
    pub fn new(geo: &'a LocalGeometry, xi: &'a [f64]) -> Lifted<'a> {
        assert_eq!(geo.n, xi.len());
        Lifted { geo, xi }
    }

    fn g(&self, u: &[f64], v: &[f64]) -> f64 {
        self.geo.inner(u, v)
    }

    /// `R^D_g(w, z, x, y)`.
    fn rg(&self, w: &[f64], z: &[f64], x: &[f64], y: &[f64]) -> f64 {
        self.geo.curvature_g.apply(&[w, z, x, y])
    }

    /// `R^D(x, y)z`.
    fn r(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        curvature_apply(&self.geo.curvature, x, y, z)
    }

    /// `(D_d g)(u, v)`.
    fn dg(&self, d: &[f64], u: &[f64], v: &[f64]) -> f64 {
        self.geo.dg.apply(&[d, u, v])
    }

    /// `(D²_{xz} g)(u, v)`.
    fn ddg(&self, x: &[f64], z: &[f64], u: &[f64], v: &[f64]) -> f64 {
        self.geo.ddg.apply(&[x, z, u, v])
    }

    /// `(D_d R)(x, y)w`.
    fn dr(&self, d: &[f64], x: &[f64], y: &[f64], w: &[f64]) -> Vec<f64> {
        let n = self.geo.n;
        (0..n)
            .map(|l| {
                let mut acc = 0.0;
                for a in 0..n {
                    if d[a] == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        if w[k] == 0.0 {
                            continue;
                        }
                        for i in 0..n {
                            if x[i] == 0.0 {
                                continue;
                            }
                            for j in 0..n {
                                acc += self.geo.dr.get(&[a, l, k, i, j]) * d[a] * w[k] * x[i] * y[j];
                            }
                        }
                    }
                }
                acc
            })
            .collect()
    }

    fn gamma_diff(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        vector_valued(&self.geo.gamma_diff, u, v)
    }

    fn frame_sum(&self, a: impl Fn(&[f64]) -> f64, b: impl Fn(&[f64]) -> f64) -> f64 {
        self.geo.frame_sum(a, b)
    }

    /// `R̃_g̃(Z, W, X, Y)` with the lifts given by `pattern`.
    pub fn curvature(&self, pattern: CurvaturePattern, z: &[f64], w: &[f64], x: &[f64], y: &[f64]) -> f64 {
        let xi = self.xi;
        match pattern {
            CurvaturePattern::Hhhh => {
                let lc = self.geo.lc_curvature_g.apply(&[z, w, x, y]);
                lc - 0.5 * self.rg(&self.r(z, w, xi), xi, x, y)
                    - 0.25 * (self.rg(&self.r(x, z, xi), xi, y, w) - self.rg(&self.r(y, z, xi), xi, x, w))
            }
            CurvaturePattern::Hvvv => {
                0.25 * (self.frame_sum(|e| self.dg(e, y, w), |e| self.rg(x, xi, z, e))
                    - self.frame_sum(|e| self.dg(e, x, w), |e| self.rg(y, xi, z, e)))
            }
            CurvaturePattern::Vvvv => {
                -0.25
                    * (self.frame_sum(|e| self.dg(e, x, z), |e| self.dg(e, y, w))
                        - self.frame_sum(|e| self.dg(e, y, z), |e| self.dg(e, x, w)))
            }
            // Derived from the Koszul formula on the lifted frame; valid for
            // any D, including torsion and non-parallel curvature.
            CurvaturePattern::Hvhh => {
                let t = vector_valued(&self.geo.torsion, x, y);
                let rg = |a: &[f64], b: &[f64]| self.g(&self.r(a, b, xi), w);
                let dr = self.g(&self.dr(x, y, z, xi), w) - self.g(&self.dr(y, x, z, xi), w);
                0.5 * dr
                    + 0.25 * (self.dg(x, &self.r(y, z, xi), w) - self.dg(y, &self.r(x, z, xi), w))
                    + 0.5 * rg(&t, z)
                    + 0.5 * (rg(y, &self.gamma_diff(x, z)) - rg(x, &self.gamma_diff(y, z)))
                    - 0.5 * self.dg(z, &self.r(x, y, xi), w)
            }
            CurvaturePattern::Vvhh => {
                0.5 * (self.rg(z, w, x, y) - self.rg(w, z, x, y))
                    - 0.25
                        * (self.frame_sum(|e| self.rg(z, xi, x, e), |e| self.rg(w, xi, y, e))
                            - self.frame_sum(|e| self.rg(w, xi, x, e), |e| self.rg(z, xi, y, e)))
                    - 0.25
                        * (self.frame_sum(|e| self.dg(x, z, e), |e| self.dg(y, w, e))
                            - self.frame_sum(|e| self.dg(x, w, e), |e| self.dg(y, z, e)))
            }
            CurvaturePattern::Hvhv => {
                0.5 * self.rg(w, y, z, x) - 0.5 * self.ddg(x, z, y, w) - 0.5 * self.dg(&self.gamma_diff(x, z), y, w)
                    + 0.25 * self.frame_sum(|e| self.rg(w, xi, x, e), |e| self.rg(y, xi, z, e))
                    + 0.25 * self.frame_sum(|e| self.dg(x, w, e), |e| self.dg(z, y, e))
            }
        }
    }

    /// `Ric̃(X, Y)` with the lifts given by `pattern`.
    pub fn ricci(&self, pattern: RicciPattern, x: &[f64], y: &[f64]) -> f64 {
        let xi = self.xi;
        let geo = self.geo;
        match pattern {
            RicciPattern::Hh => {
                let lc = geo.lc_ricci.apply(&[x, y]);
                let t1 = geo.frame_trace(|e, f| self.rg(&self.r(x, e, xi), xi, y, f));
                let gsum: Vec<f64> = self
                    .gamma_diff(x, y)
                    .iter()
                    .zip(self.gamma_diff(y, x))
                    .map(|(a, b)| a + b)
                    .collect();
                let t2 = geo.frame_trace(|e, f| self.ddg(x, y, e, f) + self.ddg(y, x, e, f) + self.dg(&gsum, e, f));
                let t3 = double_trace(geo, |e1, f1, e2, f2| self.dg(x, e1, e2) * self.dg(y, f1, f2));
                lc - 0.5 * t1 - 0.25 * t2 + 0.25 * t3
            }
            RicciPattern::Vv => {
                let t1 = double_trace(geo, |e1, f1, e2, f2| self.rg(x, xi, e1, e2) * self.rg(y, xi, f1, f2));
                let tr = &geo.trace_dual_torsion;
                let t2 = geo.frame_trace(|e, f| self.ddg(e, f, x, y) - self.dg(e, x, y) * tr.apply(&[f]));
                let t3 = double_trace(geo, |e1, f1, e2, f2| self.dg(e1, x, e2) * self.dg(f1, y, f2));
                0.25 * t1 - 0.5 * t2 + 0.5 * t3
            }
            // Trace of the HVHH and HVVV components over both halves of the frame.
            RicciPattern::Hv => geo.frame_trace(|e, f| {
                self.curvature(CurvaturePattern::Hvhh, e, y, f, x) + self.curvature(CurvaturePattern::Hvvv, x, e, y, f)
            }),
        }
    }

    /// `dΩ(X, Y, Z)` with the lifts given by `pattern`.
    pub fn d_omega(&self, pattern: FormPattern, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        let xi = self.xi;
        let rs = |a: &[f64], b: &[f64], c: &[f64]| self.geo.dual_curvature_g.apply(&[xi, a, b, c]);
        match pattern {
            FormPattern::Hhh => rs(x, y, z) + rs(y, z, x) + rs(z, x, y),
            FormPattern::Hhv => self.g(&vector_valued(&self.geo.dual_torsion, x, y), z),
            FormPattern::Hvv | FormPattern::Vvv => 0.0,
        }
    }

    /// `N(X^H, Y^H) = T(X, Y)^H + (R(X, Y)ξ)^V`, as (horizontal, vertical)
    /// base vectors.
    pub fn nijenhuis(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (vector_valued(&self.geo.torsion, x, y), self.r(x, y, self.xi))
    }

    /// Left side of the `ξ`-dependent Ricci condition,
    /// `−½ Σ_i R_g(R(X, e_i)ξ, ξ, Y, e_i)`.
    pub fn e_condition_left(&self, x: &[f64], y: &[f64]) -> f64 {
        let xi = self.xi;
        -0.5 * self.geo.frame_trace(|e, f| self.rg(&self.r(x, e, xi), xi, y, f))
    }

    /// Right side without the sign, `¼ Σ_ij R_g(X, ξ, e_i, e_j) R_g(Y, ξ, e_i, e_j)`.
    pub fn e_condition_right(&self, x: &[f64], y: &[f64]) -> f64 {
        let xi = self.xi;
        0.25 * double_trace(self.geo, |e1, f1, e2, f2| self.rg(x, xi, e1, e2) * self.rg(y, xi, f1, f2))
    }
}

/// `Σ_ij A(e_i, e_j) B(e_i, e_j)` as `g^{ab} g^{cd} F(∂a, ∂b, ∂c, ∂d)` where
/// `F(e1, f1, e2, f2) = A(e1, e2) B(f1, f2)`.
fn double_trace(geo: &LocalGeometry, f: impl Fn(&[f64], &[f64], &[f64], &[f64]) -> f64) -> f64 {
    let n = geo.n;
    let basis = unit_vectors(n);
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            let wab = geo.ginv.get(&[a, b]);
            if wab == 0.0 {
                continue;
            }
            for c in 0..n {
                for d in 0..n {
                    let wcd = geo.ginv.get(&[c, d]);
                    if wcd == 0.0 {
                        continue;
                    }
                    acc += wab * wcd * f(&basis[a], &basis[b], &basis[c], &basis[d]);
                }
            }
        }
    }
    acc
}

/// Totals of both sides of the `ξ`-dependent Ricci condition over a
/// `g`-orthonormal frame, with `X = Y = e_i` and `ξ = e_j` summed.
/// Returns `(left, right)`, contracted directly in coordinates.
pub fn e_condition_totals(geo: &LocalGeometry) -> (f64, f64) {
    let n = geo.n;
    let gi = |a: usize, b: usize| geo.ginv.get(&[a, b]);
    let r = &geo.curvature;
    let rg = &geo.curvature_g;
    // left = −½ g^{xy} g^{sv} g^{ab} R^l_{s x a} R_g[l][v][y][b]
    let mut left = 0.0;
    for x in 0..n {
        for a in 0..n {
            for s in 0..n {
                for l in 0..n {
                    let rl = r.get(&[l, s, x, a]);
                    if rl == 0.0 {
                        continue;
                    }
                    for y in 0..n {
                        for b in 0..n {
                            for v in 0..n {
                                left += gi(x, y) * gi(s, v) * gi(a, b) * rl * rg.get(&[l, v, y, b]);
                            }
                        }
                    }
                }
            }
        }
    }
    // right = ¼ g^{xy} g^{sv} g^{ac} g^{bd} R_g[x][s][a][b] R_g[y][v][c][d]
    let mut raised = vec![0.0; n.pow(4)];
    for y in 0..n {
        for v in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut acc = 0.0;
                    for x in 0..n {
                        for s in 0..n {
                            for a in 0..n {
                                for b in 0..n {
                                    acc += gi(x, y) * gi(s, v) * gi(a, c) * gi(b, d) * rg.get(&[x, s, a, b]);
                                }
                            }
                        }
                    }
                    raised[((y * n + v) * n + c) * n + d] = acc;
                }
            }
        }
    }
    let right: f64 = raised.iter().zip(rg.entries()).map(|(u, w)| u * w).sum();
    (-0.5 * left, 0.25 * right)
}
