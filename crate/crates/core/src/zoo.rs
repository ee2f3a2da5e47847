//! Concrete `(g, D)` families: Weyl products, statistical models induced by
//! matrix-valued linear maps, a handful of small demonstration models and
//! expression-defined custom models.
//!
//! A [`Model`] carries the pair that builds the structure on `TM`. For the
//! statistical and Weyl families this is the dual connection, not the
//! original flat or Weyl connection; the latter is kept in
//! [`Model::base_connection`].

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::sampling::SampleBox;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::geometry::{ConnectionField, MetricField};

#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub metric: Arc<MetricField>,
    /// The connection whose lifts define `J` and the Sasaki metric.
    pub connection: Arc<ConnectionField>,
    /// The connection the family is defined by; equal to `connection` unless
    /// the family passes to a dual.
    pub base_connection: Arc<ConnectionField>,
    pub base_box: SampleBox,
}

impl Model {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    fn plain(name: &str, metric: MetricField, connection: ConnectionField, base: Vec<[f64; 2]>) -> Model {
        let c = Arc::new(connection);
        Model {
            name: name.to_string(),
            metric: Arc::new(metric),
            connection: c.clone(),
            base_connection: c,
            base_box: SampleBox::new(base),
        }
    }
}

fn exprs(src: &[&str], n: usize) -> Vec<Expr> {
    src.iter().map(|s| parse_expr(s, n).expect("built-in expression parses")).collect()
}

fn identity_exprs(n: usize) -> Vec<Expr> {
    (0..n * n).map(|ij| Expr::Num((ij / n == ij % n) as u8 as f64)).collect()
}

fn single_entry(n: usize, k: usize, i: usize, j: usize, v: f64) -> ConnectionField {
    let mut gamma = vec![Expr::Num(0.0); n * n * n];
    gamma[(k * n + i) * n + j] = Expr::Num(v);
    ConnectionField::Coefficients { n, gamma }
}

/// `ℝⁿ` with `g = I` and `Γ = 0`.
pub fn euclidean(n: usize) -> Model {
    let g = MetricField::from_exprs(n, identity_exprs(n), true).expect("identity metric");
    Model::plain("euclidean", g, ConnectionField::flat(n), vec![[-1.0, 1.0]; n])
}

/// `g = diag(e^{x1}, e^{x2})` with the flat connection: a Hessian metric
/// with potential `e^{x1} + e^{x2}`.
pub fn exp_diagonal() -> Model {
    let g = MetricField::from_exprs(2, exprs(&["exp(x1)", "0", "0", "exp(x2)"], 2), true).expect("metric");
    Model::plain("exp_diagonal", g, ConnectionField::flat(2), vec![[-1.0, 1.0]; 2])
}

/// Unit sphere in polar coordinates with its Levi-Civita connection.
pub fn unit_sphere() -> Model {
    let g = Arc::new(MetricField::from_exprs(2, exprs(&["1", "0", "0", "sin(x1)*sin(x1)"], 2), true).expect("metric"));
    let c = Arc::new(ConnectionField::LeviCivita(g.clone()));
    Model {
        name: "unit_sphere".into(),
        metric: g,
        connection: c.clone(),
        base_connection: c,
        base_box: SampleBox::new(vec![[0.3, std::f64::consts::PI - 0.3], [-3.0, 3.0]]),
    }
}

/// `g = I₂` with the single coefficient `Γ¹₁₂ = 1`: torsion never vanishes
/// while the dual connection is flat.
pub fn ak_non_kahler() -> Model {
    let g = MetricField::from_exprs(2, identity_exprs(2), true).expect("metric");
    Model::plain("ak_non_kahler", g, single_entry(2, 0, 0, 1, 1.0), vec![[-1.0, 1.0]; 2])
}

/// `g = I₂` with the single coefficient `Γ¹₂₂ = 1`; its dual has torsion.
pub fn torsionful_dual() -> Model {
    let g = MetricField::from_exprs(2, identity_exprs(2), true).expect("metric");
    Model::plain("torsionful_dual", g, single_entry(2, 0, 1, 1, 1.0), vec![[-1.0, 1.0]; 2])
}

/// A random smooth pair on `[-1, 1]ⁿ`: a diagonally dominant metric and a
/// connection with no symmetry, both built from trigonometric and linear
/// terms.
pub fn random_model(seed: u64, n: usize) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coef = |s: f64| rng.gen_range(-s..s);
    let mut g = vec![Expr::Num(0.0); n * n];
    let off = 0.6 / n.max(2) as f64;
    for i in 0..n {
        for j in i..n {
            let a = coef(1.0);
            let b = coef(1.5);
            let c = (j + i) % n;
            let e = if i == j {
                2.0 + coef(0.3) * (Expr::coord(c) * b + a).sin() + coef(0.2) * Expr::coord(i)
            } else {
                off * (Expr::coord(c) * b + a).cos() * coef(1.0)
            };
            g[i * n + j] = e.clone();
            g[j * n + i] = e;
        }
    }
    let gamma = (0..n * n * n)
        .map(|idx| {
            let a = idx % n;
            let b = (idx / n + 1) % n;
            coef(1.0) + coef(0.8) * Expr::coord(a) + coef(0.5) * (Expr::coord(b) * coef(1.2)).cos()
        })
        .collect();
    let metric = MetricField::from_exprs(n, g, true).expect("random metric");
    Model::plain(
        "random",
        metric,
        ConnectionField::Coefficients { n, gamma },
        vec![[-1.0, 1.0]; n],
    )
}

// ---------------------------------------------------------------------------
// Weyl products

/// `S¹ × S^{n−1}(r)` with `ω = k dθ` and the deformation parameter `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylSpec {
    pub n: usize,
    pub r: f64,
    pub k: f64,
    pub lambda: f64,
}

impl WeylSpec {
    pub fn new(n: usize, r: f64, k: f64, lambda: f64) -> WeylSpec {
        WeylSpec { n, r, k, lambda }
    }
}

/// Fields of a Weyl model, with the original Weyl connection kept apart.
#[derive(Debug, Clone)]
pub struct WeylModel {
    /// Product metric `g`.
    pub base_metric: Arc<MetricField>,
    /// `g_λ = g + λ dθ²`.
    pub metric: Arc<MetricField>,
    /// The torsion-free `D` with `Dg = ω ⊗ g`.
    pub weyl: Arc<ConnectionField>,
    /// `D*_λ`, the dual of `D` with respect to `g_λ`.
    pub dual: Arc<ConnectionField>,
}

fn weyl_metric_exprs(spec: &WeylSpec, lambda: f64) -> Vec<Expr> {
    let n = spec.n;
    let r2 = spec.r * spec.r;
    let mut g = vec![Expr::Num(0.0); n * n];
    g[0] = Expr::Num(1.0 + lambda);
    for k in 1..n {
        let mut e = Expr::Num(r2);
        for m in 1..k {
            e = e * Expr::coord(m).sin() * Expr::coord(m).sin();
        }
        g[k * n + k] = e;
    }
    g
}

fn validate_weyl(spec: &WeylSpec) -> Result<()> {
    if spec.n < 3 {
        return Err(Error::DimensionTooSmall(spec.n));
    }
    if !(spec.r.is_finite() && spec.r > 0.0) {
        return Err(Error::ChartSingularity(format!("sphere radius {} is not positive", spec.r)));
    }
    if !spec.k.is_finite() || !spec.lambda.is_finite() {
        return Err(Error::Domain("k and lambda must be finite".into()));
    }
    if (spec.lambda + 1.0).abs() < 1e-12 {
        return Err(Error::DegenerateLambda(spec.lambda));
    }
    Ok(())
}

pub fn build_weyl_product(spec: &WeylSpec) -> Result<WeylModel> {
    validate_weyl(spec)?;
    let n = spec.n;
    let base_exprs = weyl_metric_exprs(spec, 0.0);
    let base = Arc::new(MetricField::from_exprs(n, base_exprs.clone(), true)?);
    let metric = Arc::new(MetricField::from_exprs(
        n,
        weyl_metric_exprs(spec, spec.lambda),
        spec.lambda > -1.0,
    )?);
    // γ^c_ab = −½ k (δ_a0 δ^c_b + δ_b0 δ^c_a − g_ab δ^c_0)
    let k = spec.k;
    let mut shift = vec![Expr::Num(0.0); n * n * n];
    for c in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut terms = 0.0;
                if a == 0 && c == b {
                    terms += 1.0;
                }
                if b == 0 && c == a {
                    terms += 1.0;
                }
                let mut e = Expr::Num(-0.5 * k * terms);
                if c == 0 && a == b {
                    e = e + 0.5 * k * base_exprs[a * n + b].clone();
                }
                shift[(c * n + a) * n + b] = e;
            }
        }
    }
    let weyl = Arc::new(ConnectionField::Shifted {
        base: Arc::new(ConnectionField::LeviCivita(base.clone())),
        shift,
    });
    let dual = Arc::new(ConnectionField::Dual {
        metric: metric.clone(),
        base: weyl.clone(),
    });
    Ok(WeylModel {
        base_metric: base,
        metric,
        weyl,
        dual,
    })
}

/// Sample box keeping every polar angle away from the poles.
pub fn weyl_box(n: usize) -> SampleBox {
    let mut b = vec![[-1.0, 1.0]];
    b.extend(std::iter::repeat([0.3, std::f64::consts::PI - 0.3]).take(n - 1));
    SampleBox::new(b)
}

/// The model `(g_λ, D*_λ)` whose tangent bundle carries the almost Kähler
/// family.
pub fn weyl(spec: &WeylSpec) -> Result<Model> {
    let w = build_weyl_product(spec)?;
    Ok(Model {
        name: format!("weyl(n={}, r={}, k={}, lambda={})", spec.n, spec.r, spec.k, spec.lambda),
        metric: w.metric,
        connection: w.dual,
        base_connection: w.weyl,
        base_box: weyl_box(spec.n),
    })
}

/// Values of `k` for which the Weyl connection on `S¹ × N` is flat, where
/// `N` has dimension `n − 1` and constant curvature with scalar curvature
/// `s_n`: `k = ±2 √(s_N / ((n−1)(n−2)))`.
pub fn flat_k_for(n: usize, s_n: f64) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let k = 2.0 * (s_n / ((n - 1) * (n - 2)) as f64).sqrt();
    Ok((k, -k))
}

/// Closed-form Ricci tensor of the Weyl family on horizontal/horizontal and
/// vertical/vertical lifts, as `n x n` matrices at base point `x`.
pub fn weyl_ricci_closed_form(spec: &WeylSpec, x: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    validate_weyl(spec)?;
    let n = spec.n as f64;
    let l = spec.lambda;
    let w2 = spec.k * spec.k;
    let g = MetricField::from_exprs(spec.n, weyl_metric_exprs(spec, l), false)?.value(x)?;
    let mut ww = DMatrix::zeros(spec.n, spec.n);
    ww[(0, 0)] = w2;
    let hh = &g * (w2 / 8.0 * (2.0 * (n - 2.0) - l * l / (l + 1.0))) + &ww * ((l + 2.0) * (l - 2.0 * (n - 1.0)) / 8.0);
    let vv = &g * (w2 / 8.0 * (l * l + 2.0 * l - 2.0 * n) / (l + 1.0)) - &ww * (n * l * (l + 2.0) / 8.0);
    Ok((hh, vv))
}

// ---------------------------------------------------------------------------
// Statistical models

/// A linear map `ρ(ξ) = Σ ξ^a B_a` into symmetric `n x n` matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoSpec {
    /// Matrix size.
    pub n: usize,
    /// Row-major `n x n` matrices, one per parameter.
    pub basis: Vec<Vec<f64>>,
    pub domain_box: Vec<[f64; 2]>,
}

impl RhoSpec {
    pub fn m(&self) -> usize {
        self.basis.len()
    }

    pub fn rho(&self, xi: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |r, c| self.basis.iter().zip(xi).map(|(b, v)| b[r * n + c] * v).sum())
    }

    fn validate_shape(&self) -> Result<()> {
        let n = self.n;
        if n == 0 || self.basis.is_empty() {
            return Err(Error::DimensionTooSmall(n.min(self.basis.len())));
        }
        if self.domain_box.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: self.domain_box.len(),
            });
        }
        for b in &self.basis {
            if b.len() != n * n {
                return Err(Error::DimensionMismatch {
                    expected: n * n,
                    found: b.len(),
                });
            }
            for r in 0..n {
                for c in r + 1..n {
                    if b[r * n + c] != b[c * n + r] {
                        return Err(Error::AsymmetricMetric { row: r, col: c });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_injective(&self) -> Result<()> {
        let stacked = DMatrix::from_fn(self.n * self.n, self.m(), |r, c| self.basis[c][r]);
        let sv = stacked.singular_values();
        let top = sv.iter().fold(0.0f64, |a, v| a.max(*v));
        let low = sv.iter().fold(f64::INFINITY, |a, v| a.min(*v));
        if self.m() > self.n * self.n || top == 0.0 || low <= 1e-12 * top {
            return Err(Error::SingularRho);
        }
        Ok(())
    }

    fn corners(&self) -> Vec<Vec<f64>> {
        let m = self.m();
        (0..1usize << m)
            .map(|mask| (0..m).map(|a| self.domain_box[a][(mask >> a) & 1]).collect())
            .collect()
    }

    /// Positive definiteness on the whole box. The set of parameters with
    /// `ρ(ξ)` positive definite is convex, so the corners decide.
    pub fn check_domain(&self) -> Result<()> {
        for c in self.corners() {
            if self.rho(&c).cholesky().is_none() {
                return Err(Error::NotPositiveDefinite(c));
            }
        }
        Ok(())
    }
}

fn statistical_box(spec: &RhoSpec) -> SampleBox {
    let mut b = vec![[-1.0, 1.0]; spec.n];
    b.extend_from_slice(&spec.domain_box);
    SampleBox::new(b)
}

/// The Fisher metric on `(θ, ξ)` paired with the dual of the flat
/// connection; the flat connection itself is the base connection.
pub fn build_statistical_model(spec: &RhoSpec) -> Result<Model> {
    spec.validate_shape()?;
    spec.check_injective()?;
    spec.check_domain()?;
    let metric = Arc::new(MetricField::fisher(spec.n, spec.basis.clone()));
    let flat = Arc::new(ConnectionField::flat(spec.n + spec.m()));
    Ok(Model {
        name: format!("statistical(n={}, m={})", spec.n, spec.m()),
        connection: Arc::new(ConnectionField::Dual {
            metric: metric.clone(),
            base: flat.clone(),
        }),
        base_connection: flat,
        metric,
        base_box: statistical_box(spec),
    })
}

/// `ρ(t) = t Iₙ` on `t ∈ [1/2, 2]`.
pub fn rho_t_identity(n: usize) -> Model {
    let basis = vec![(0..n * n).map(|ij| (ij / n == ij % n) as u8 as f64).collect()];
    let spec = RhoSpec {
        n,
        basis,
        domain_box: vec![[0.5, 2.0]],
    };
    let mut m = build_statistical_model(&spec).expect("t I_n is positive definite for t > 0");
    m.name = format!("rho_t_identity(n={n})");
    m
}

const GRID: usize = 9;

/// `ρ(ξ¹, ξ²) = [[ξ¹, aξ¹ + bξ²], [aξ¹ + bξ², ξ²]]`. When the requested box
/// is not entirely admissible, it is shrunk to the largest grid sub-box
/// whose corners are admissible.
pub fn build_rho_normal_form(a: f64, b: f64, domain_box: [[f64; 2]; 2]) -> Result<RhoSpec> {
    let mut spec = RhoSpec {
        n: 2,
        basis: vec![vec![1.0, a, a, 0.0], vec![0.0, b, b, 1.0]],
        domain_box: domain_box.to_vec(),
    };
    spec.validate_shape()?;
    if spec.check_domain().is_ok() {
        return Ok(spec);
    }
    let axis = |iv: [f64; 2]| -> Vec<f64> {
        (0..GRID)
            .map(|t| iv[0] + (iv[1] - iv[0]) * t as f64 / (GRID - 1) as f64)
            .collect()
    };
    let (u, v) = (axis(domain_box[0]), axis(domain_box[1]));
    let ok: Vec<Vec<bool>> = u
        .iter()
        .map(|&p| v.iter().map(|&q| spec.rho(&[p, q]).cholesky().is_some()).collect())
        .collect();
    let mut best: Option<(usize, [usize; 4])> = None;
    for i0 in 0..GRID {
        for i1 in i0 + 1..GRID {
            for j0 in 0..GRID {
                for j1 in j0 + 1..GRID {
                    if ok[i0][j0] && ok[i0][j1] && ok[i1][j0] && ok[i1][j1] {
                        let area = (i1 - i0) * (j1 - j0);
                        if best.map_or(true, |(a, _)| area > a) {
                            best = Some((area, [i0, i1, j0, j1]));
                        }
                    }
                }
            }
        }
    }
    let (_, [i0, i1, j0, j1]) = best.ok_or(Error::EmptyDomain)?;
    spec.domain_box = vec![[u[i0], u[i1]], [v[j0], v[j1]]];
    Ok(spec)
}

/// Affine change of coordinates `(θ, ξ) ↦ (Aθ, Lξ)` taking a statistical
/// model on `2 x 2` matrices to the normal form with parameters `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormReduction {
    pub a: f64,
    pub b: f64,
    /// 1 when the diagonal entries of `ρ` are independent, 2 when a
    /// congruence `ρ ↦ AρAᵀ` is needed first.
    pub case: u8,
    pub theta_map: DMatrix<f64>,
    pub xi_map: DMatrix<f64>,
}

impl NormalFormReduction {
    /// Jacobian of the map in `(θ, ξ)` coordinates.
    pub fn jacobian(&self) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(4, 4);
        j.view_mut((0, 0), (2, 2)).copy_from(&self.theta_map);
        j.view_mut((2, 2), (2, 2)).copy_from(&self.xi_map);
        j
    }

    pub fn map_point(&self, p: &[f64]) -> Vec<f64> {
        let th = &self.theta_map * DMatrix::from_column_slice(2, 1, &p[..2]);
        let xi = &self.xi_map * DMatrix::from_column_slice(2, 1, &p[2..]);
        th.iter().chain(xi.iter()).copied().collect()
    }

    /// The normal-form map with the reduced parameters.
    pub fn normal_form(&self) -> RhoSpec {
        RhoSpec {
            n: 2,
            basis: vec![vec![1.0, self.a, self.a, 0.0], vec![0.0, self.b, self.b, 1.0]],
            domain_box: vec![[0.0, 0.0]; 2],
        }
    }
}

/// Congruences tried, in order, when the diagonal of `ρ` is degenerate.
const CONGRUENCES: [[f64; 4]; 5] = [
    [1.0, 1.0, 0.0, 1.0],
    [1.0, 0.0, 1.0, 1.0],
    [1.0, -1.0, 0.0, 1.0],
    [2.0, 1.0, 1.0, 1.0],
    [1.0, 2.0, -1.0, 1.0],
];

pub fn reduce_to_normal_form(spec: &RhoSpec) -> Result<NormalFormReduction> {
    if spec.n != 2 || spec.m() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: if spec.n != 2 { spec.n } else { spec.m() },
        });
    }
    spec.validate_shape()?;
    spec.check_injective()?;
    let attempt = |a_mat: &DMatrix<f64>| -> Option<(DMatrix<f64>, f64, f64)> {
        let congr: Vec<DMatrix<f64>> = spec
            .basis
            .iter()
            .map(|b| a_mat * DMatrix::from_row_slice(2, 2, b) * a_mat.transpose())
            .collect();
        let l = DMatrix::from_row_slice(2, 2, &[congr[0][(0, 0)], congr[1][(0, 0)], congr[0][(1, 1)], congr[1][(1, 1)]]);
        let scale = l.abs().max();
        if scale == 0.0 || l.determinant().abs() <= 1e-10 * scale * scale {
            return None;
        }
        let inv = l.clone().try_inverse()?;
        let c = DMatrix::from_row_slice(1, 2, &[congr[0][(0, 1)], congr[1][(0, 1)]]);
        let ab = c * inv;
        Some((l, ab[(0, 0)], ab[(0, 1)]))
    };
    let id = DMatrix::identity(2, 2);
    if let Some((l, a, b)) = attempt(&id) {
        return Ok(NormalFormReduction {
            a,
            b,
            case: 1,
            theta_map: id,
            xi_map: l,
        });
    }
    for c in CONGRUENCES {
        let a_mat = DMatrix::from_row_slice(2, 2, &c);
        if let Some((l, a, b)) = attempt(&a_mat) {
            return Ok(NormalFormReduction {
                a,
                b,
                case: 2,
                theta_map: a_mat,
                xi_map: l,
            });
        }
    }
    Err(Error::SingularRho)
}

/// Random injective `ρ` on `2 x 2` matrices together with a box on which it
/// is positive definite.
pub fn random_rho(seed: u64) -> RhoSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut sym = || {
            let (p, q, r) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            vec![p, q, q, r]
        };
        let basis = vec![sym(), sym()];
        let center = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let half = 0.1;
        let spec = RhoSpec {
            n: 2,
            basis,
            domain_box: vec![[center[0] - half, center[0] + half], [center[1] - half, center[1] + half]],
        };
        if spec.check_injective().is_ok() && spec.check_domain().is_ok() {
            // keep away from the boundary of the positive cone
            let min_eig = spec
                .corners()
                .iter()
                .map(|c| spec.rho(c).symmetric_eigenvalues().min())
                .fold(f64::INFINITY, f64::min);
            if min_eig > 0.05 {
                return spec;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Custom models

/// Connection of a custom model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CustomConnection {
    LeviCivita,
    Flat,
    /// Nonzero coefficients `Γ^k_ij`, indices 1-based.
    Entries(Vec<ConnectionEntry>),
}

/// One nonzero Christoffel symbol Γ^k_ij; indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionEntry {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub expr: String,
}

fn grid_points(domain_box: &[[f64; 2]]) -> Vec<Vec<f64>> {
    let n = domain_box.len();
    let total = 3usize.pow(n as u32);
    (0..total)
        .map(|mut flat| {
            (0..n)
                .map(|a| {
                    let t = flat % 3;
                    flat /= 3;
                    let [lo, hi] = domain_box[a];
                    lo + (hi - lo) * t as f64 / 2.0
                })
                .collect()
        })
        .collect()
}

/// Model from expression strings; `g` is row-major `n x n`.
pub fn build_custom(
    n: usize,
    g_exprs: &[String],
    connection: &CustomConnection,
    domain_box: Vec<[f64; 2]>,
) -> Result<Model> {
    if n == 0 || n > 8 {
        return Err(Error::DimensionMismatch { expected: 8, found: n });
    }
    if domain_box.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: domain_box.len(),
        });
    }
    let parsed = g_exprs
        .iter()
        .enumerate()
        .map(|(idx, s)| {
            parse_expr(s, n).map_err(|e| Error::Component {
                row: idx / n,
                col: idx % n,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let metric = Arc::new(MetricField::from_exprs(n, parsed, false)?);
    for p in grid_points(&domain_box) {
        metric.check_symmetric_at(&p)?;
        metric.check_nondegenerate_at(&p)?;
    }
    let conn = match connection {
        CustomConnection::LeviCivita => ConnectionField::LeviCivita(metric.clone()),
        CustomConnection::Flat => ConnectionField::flat(n),
        CustomConnection::Entries(entries) => {
            let mut gamma = vec![Expr::Num(0.0); n * n * n];
            for e in entries {
                if [e.k, e.i, e.j].iter().any(|&v| v == 0 || v > n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: e.k.max(e.i).max(e.j),
                    });
                }
                let idx = ((e.k - 1) * n + e.i - 1) * n + e.j - 1;
                gamma[idx] = parse_expr(&e.expr, n)?;
            }
            ConnectionField::Coefficients { n, gamma }
        }
    };
    let c = Arc::new(conn);
    Ok(Model {
        name: "custom".into(),
        metric,
        connection: c.clone(),
        base_connection: c,
        base_box: SampleBox::new(domain_box),
    })
}
