//! Product-space primal–dual solver for composite problems
//! `min_x f(x) + g(Lx)` with quadratic `f` and `g`.
//!
//! The saddle-point system is recast as the monotone inclusion
//! `0 ∈ (𝐀 + 𝐁)(x, y)` on the product space, with
//!
//! ```text
//! 𝐀: (x, y) ↦ (Lᵀy, −Lx)          (skew, ‖𝐀‖ = ‖L‖),
//! 𝐁: (x, y) ↦ ∂f(x) × ∂g*(y)      (μ-strongly monotone, μ = min{σ, 1/β_g}),
//! ```
//!
//! where `σ = λ_min(P)` is the strong-convexity constant of
//! `f(x) = ½xᵀPx + qᵀx` and `β_g = λ_max(S)` the gradient Lipschitz
//! constant of `g(y) = ½yᵀSy + tᵀy`. Douglas–Rachford applied to `(𝐀, 𝐁)`
//! then contracts linearly with factor `rate_skew_strong(‖L‖, μ)`, and the
//! shadow of its fixed point is the saddle point `(x★, y★)`.
//!
//! Both `f` and `g` are restricted to quadratics so that every resolvent
//! is a cached linear solve and every conjugate is explicit; the resolvent
//! of `∂g* = (∂g)⁻¹` is evaluated through the inverse-resolvent identity
//! `J_{γA⁻¹}(w) = w − γ·J_{γ⁻¹A}(w/γ)`, which never forms `S⁻¹` and is
//! valid for `S` merely positive semidefinite.

use crate::engine::{self, DRConfig, EngineError, IterationTrace};
use crate::operators::{operator_norm, symmetric_eig_extremes, OperatorError, OperatorKind, OperatorSpec};
use crate::quadform::PropertyTag;
use crate::rates::{rate_primal_dual, RateError};
use crate::{Matrix, Vector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from problem construction or solving.
#[derive(Debug, Error)]
pub enum PDError {
    #[error("invalid composite problem: {0}")]
    InvalidProblem(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("conjugate value undefined: {0}")]
    ConjugateUndefined(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Rate(#[from] RateError),
}

/// `min_x ½xᵀPx + qᵀx + ½(Lx)ᵀS(Lx) + tᵀ(Lx)` with `P ≻ 0`, `S ⪰ 0`
/// nonzero, `L ≠ 0`.
///
/// The spectral data `σ = λ_min(P)`, `β_g = λ_max(S)`, and `‖L‖` are
/// computed at construction (power iteration, relative tolerance 1e−12)
/// rather than taken on trust, so the product-space strong-monotonicity
/// constant `μ = min{σ, 1/β_g}` always matches the actual problem.
#[derive(Debug, Clone)]
pub struct CompositeProblem {
    p: Matrix,
    q: Vector,
    s: Matrix,
    t: Vector,
    l: Matrix,
    sigma: f64,
    beta_g: f64,
    norm_l: f64,
}

fn check_symmetric(name: &str, m: &Matrix) -> Result<(), PDError> {
    if m.nrows() != m.ncols() {
        return Err(PDError::InvalidProblem(format!(
            "{name} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(PDError::InvalidProblem(format!(
            "{name} contains non-finite entries"
        )));
    }
    let defect = (m - m.transpose()).amax();
    if defect > 1e-12 * m.amax().max(1.0) {
        return Err(PDError::InvalidProblem(format!(
            "{name} must be symmetric (defect {defect:.3e})"
        )));
    }
    Ok(())
}

impl CompositeProblem {
    pub fn new(p: Matrix, q: Vector, s: Matrix, t: Vector, l: Matrix) -> Result<Self, PDError> {
        check_symmetric("P", &p)?;
        check_symmetric("S", &s)?;
        let nx = p.nrows();
        let ny = s.nrows();
        if q.len() != nx {
            return Err(PDError::DimensionMismatch {
                expected: nx,
                got: q.len(),
            });
        }
        if t.len() != ny {
            return Err(PDError::DimensionMismatch {
                expected: ny,
                got: t.len(),
            });
        }
        if l.ncols() != nx || l.nrows() != ny {
            return Err(PDError::InvalidProblem(format!(
                "L must be {ny}x{nx} to map x-space into y-space, got {}x{}",
                l.nrows(),
                l.ncols()
            )));
        }
        if l.iter().any(|v| !v.is_finite()) || q.iter().any(|v| !v.is_finite())
            || t.iter().any(|v| !v.is_finite())
        {
            return Err(PDError::InvalidProblem("non-finite entries".into()));
        }
        if l.amax() == 0.0 {
            return Err(PDError::InvalidProblem(
                "coupling matrix L must be nonzero".into(),
            ));
        }

        let (p_min, p_max) = symmetric_eig_extremes(&p)?;
        if p_min <= 1e-12 * p_max.abs().max(1.0) {
            return Err(PDError::InvalidProblem(format!(
                "P must be positive definite; smallest eigenvalue ≈ {p_min:.3e}"
            )));
        }
        let (s_min, s_max) = if s.amax() == 0.0 {
            (0.0, 0.0)
        } else {
            symmetric_eig_extremes(&s)?
        };
        if s_min < -1e-9 * s_max.abs().max(1.0) {
            return Err(PDError::InvalidProblem(format!(
                "S must be positive semidefinite; smallest eigenvalue ≈ {s_min:.3e}"
            )));
        }
        if s_max <= 0.0 {
            return Err(PDError::InvalidProblem(
                "S must be nonzero: the gradient of g needs a positive Lipschitz constant".into(),
            ));
        }
        let norm_l = operator_norm(&l)?;
        Ok(Self {
            p,
            q,
            s,
            t,
            l,
            sigma: p_min,
            beta_g: s_max,
            norm_l,
        })
    }

    /// Primal dimension (length of `x`).
    pub fn nx(&self) -> usize {
        self.p.nrows()
    }

    /// Dual dimension (length of `y`).
    pub fn ny(&self) -> usize {
        self.s.nrows()
    }

    /// Strong-convexity constant of `f`: `λ_min(P)`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Gradient Lipschitz constant of `g`: `λ_max(S)`.
    pub fn beta_g(&self) -> f64 {
        self.beta_g
    }

    /// Coupling norm `‖L‖`.
    pub fn norm_l(&self) -> f64 {
        self.norm_l
    }

    /// Product-space strong-monotonicity constant `μ = min{σ, 1/β_g}`.
    pub fn mu(&self) -> f64 {
        self.sigma.min(1.0 / self.beta_g)
    }

    pub fn p_matrix(&self) -> &Matrix {
        &self.p
    }

    pub fn q_vector(&self) -> &Vector {
        &self.q
    }

    pub fn s_matrix(&self) -> &Matrix {
        &self.s
    }

    pub fn t_vector(&self) -> &Vector {
        &self.t
    }

    pub fn l_matrix(&self) -> &Matrix {
        &self.l
    }

    fn check_xy(&self, x: &Vector, y: &Vector) -> Result<(), PDError> {
        if x.len() != self.nx() {
            return Err(PDError::DimensionMismatch {
                expected: self.nx(),
                got: x.len(),
            });
        }
        if y.len() != self.ny() {
            return Err(PDError::DimensionMismatch {
                expected: self.ny(),
                got: y.len(),
            });
        }
        Ok(())
    }

    /// `f(x) = ½xᵀPx + qᵀx`.
    pub fn f_val(&self, x: &Vector) -> f64 {
        0.5 * (x.transpose() * &self.p * x)[(0, 0)] + self.q.dot(x)
    }

    /// `g(y) = ½yᵀSy + tᵀy`.
    pub fn g_val(&self, y: &Vector) -> f64 {
        0.5 * (y.transpose() * &self.s * y)[(0, 0)] + self.t.dot(y)
    }

    /// Convex conjugate `f*(u) = ½(u−q)ᵀP⁻¹(u−q)` (finite everywhere since
    /// `P ≻ 0`).
    pub fn f_conj(&self, u: &Vector) -> Result<f64, PDError> {
        let chol = self
            .p
            .clone()
            .cholesky()
            .ok_or_else(|| PDError::InvalidProblem("P lost positive definiteness".into()))?;
        let d = u - &self.q;
        Ok(0.5 * d.dot(&chol.solve(&d)))
    }

    /// Convex conjugate `g*(v) = ½(v−t)ᵀS⁺(v−t)` when `v − t ∈ range S`,
    /// `+∞` (an error) otherwise.
    pub fn g_conj(&self, v: &Vector) -> Result<f64, PDError> {
        let d = v - &self.t;
        if let Some(chol) = self.s.clone().cholesky() {
            return Ok(0.5 * d.dot(&chol.solve(&d)));
        }
        // Singular S: pseudo-inverse with an explicit range check.
        let pinv = self
            .s
            .clone()
            .pseudo_inverse(1e-12 * self.beta_g)
            .map_err(|e| PDError::ConjugateUndefined(e.to_string()))?;
        let w = &pinv * &d;
        let range_defect = (&self.s * &w - &d).norm();
        if range_defect > 1e-8 * d.norm().max(1.0) {
            return Err(PDError::ConjugateUndefined(format!(
                "argument lies outside range S (defect {range_defect:.3e}): g* is +∞ there"
            )));
        }
        Ok(0.5 * d.dot(&w))
    }

    /// Duality gap `f(x) + g(Lx) + f*(−Lᵀy) + g*(y)`; zero exactly at the
    /// saddle point, positive elsewhere (up to rounding).
    pub fn duality_gap(&self, x: &Vector, y: &Vector) -> Result<f64, PDError> {
        self.check_xy(x, y)?;
        let lx = &self.l * x;
        let neg_lt_y = -(self.l.transpose() * y);
        Ok(self.f_val(x) + self.g_val(&lx) + self.f_conj(&neg_lt_y)? + self.g_conj(y)?)
    }
}

/// Solution bundle: primal/dual points, the a-priori contraction factor,
/// the full engine trace, and the optimality residual at the output.
#[derive(Debug, Clone)]
pub struct PDSolution {
    pub x_star: Vector,
    pub y_star: Vector,
    /// `rate_skew_strong(‖L‖, min{σ, 1/β_g})` at the run's step length.
    pub rate_bound: f64,
    pub trace: IterationTrace,
    pub kkt_residual: f64,
}

/// Builds the product-space pair: `opA = SkewFromL(L)` claiming
/// `{Monotone, Lipschitz(‖L‖)}` and `opB = ∂f × ∂g*` claiming
/// `{Monotone, StronglyMonotone(min{σ, 1/β_g})}`. Both claim sets are
/// sample-validated at construction.
pub fn build_inclusion(p: &CompositeProblem) -> Result<(OperatorSpec, OperatorSpec), PDError> {
    let op_a = OperatorSpec::new(
        OperatorKind::SkewFromL(p.l.clone()),
        vec![PropertyTag::Monotone, PropertyTag::Lipschitz(p.norm_l)],
    )?;
    let grad_f = OperatorSpec::new(
        OperatorKind::QuadraticGradient(p.p.clone(), p.q.clone()),
        vec![PropertyTag::Monotone],
    )?;
    let grad_g_conj = OperatorSpec::new(
        OperatorKind::Inverse(Box::new(OperatorSpec::new(
            OperatorKind::QuadraticGradient(p.s.clone(), p.t.clone()),
            vec![PropertyTag::Monotone],
        )?)),
        vec![PropertyTag::Monotone],
    )?;
    let op_b = OperatorSpec::new(
        OperatorKind::ProductPair(Box::new(grad_f), Box::new(grad_g_conj)),
        vec![PropertyTag::Monotone, PropertyTag::StronglyMonotone(p.mu())],
    )?;
    Ok((op_a, op_b))
}

/// Optimality residual `‖Px + q + Lᵀy‖ + ‖y − (S(Lx) + t)‖`: stationarity
/// of the primal problem plus consistency of the dual variable with `∇g`
/// at `Lx`. Zero exactly at the unique saddle point.
pub fn kkt_residual(p: &CompositeProblem, x: &Vector, y: &Vector) -> Result<f64, PDError> {
    p.check_xy(x, y)?;
    let stationarity = (&p.p * x + &p.q + p.l.transpose() * y).norm();
    let linkage = (y - (&p.s * (&p.l * x) + &p.t)).norm();
    Ok(stationarity + linkage)
}

/// Runs Douglas–Rachford on the product-space pair and reads the saddle
/// point off the shadow sequence (`J_𝐀` of the fixed point when the
/// resolvent of `𝐀` is applied first, `J_𝐁` in the swapped order — both
/// converge to the same zero of `𝐀 + 𝐁`).
///
/// Non-convergence is reported in the returned trace, not as an error.
pub fn solve(p: &CompositeProblem, cfg: &DRConfig) -> Result<PDSolution, PDError> {
    let (op_a, op_b) = build_inclusion(p)?;
    let total = p.nx() + p.ny();
    if cfg.x0.len() != total {
        return Err(PDError::DimensionMismatch {
            expected: total,
            got: cfg.x0.len(),
        });
    }
    let res = engine::run(&op_a, &op_b, cfg)?;
    let x_star = res.shadow_point.rows(0, p.nx()).into_owned();
    let y_star = res.shadow_point.rows(p.nx(), p.ny()).into_owned();
    let rate_bound = rate_primal_dual(p.norm_l, p.sigma, p.beta_g, cfg.gamma)?.value;
    let kkt = kkt_residual(p, &x_star, &y_star)?;
    Ok(PDSolution {
        x_star,
        y_star,
        rate_bound,
        trace: res.trace,
        kkt_residual: kkt,
    })
}

/// Wire format for problem ingestion:
/// `{"P": [[…]], "q": […], "S": [[…]], "t": […], "L": [[…]]}`
/// (matrices as row-major nested arrays).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemJson {
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    pub q: Vec<f64>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<f64>>,
    pub t: Vec<f64>,
    #[serde(rename = "L")]
    pub l: Vec<Vec<f64>>,
}

fn matrix_from_rows(name: &str, rows: &[Vec<f64>]) -> Result<Matrix, PDError> {
    if rows.is_empty() {
        return Err(PDError::InvalidProblem(format!("{name} must be non-empty")));
    }
    let ncols = rows[0].len();
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(PDError::InvalidProblem(format!(
            "{name} rows must be non-empty and of equal length"
        )));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(Matrix::from_row_slice(rows.len(), ncols, &flat))
}

impl TryFrom<&ProblemJson> for CompositeProblem {
    type Error = PDError;

    fn try_from(j: &ProblemJson) -> Result<Self, PDError> {
        CompositeProblem::new(
            matrix_from_rows("P", &j.p)?,
            Vector::from_column_slice(&j.q),
            matrix_from_rows("S", &j.s)?,
            Vector::from_column_slice(&j.t),
            matrix_from_rows("L", &j.l)?,
        )
    }
}

impl From<&CompositeProblem> for ProblemJson {
    fn from(p: &CompositeProblem) -> Self {
        let rows = |m: &Matrix| {
            (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect()
        };
        ProblemJson {
            p: rows(&p.p),
            q: p.q.iter().copied().collect(),
            s: rows(&p.s),
            t: p.t.iter().copied().collect(),
            l: rows(&p.l),
        }
    }
}

/// Wire format for solution export:
/// `{"x": […], "y": […], "rate_bound": r, "iters": n, "kkt": v}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionJson {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub rate_bound: f64,
    pub iters: usize,
    pub kkt: f64,
}

impl From<&PDSolution> for SolutionJson {
    fn from(s: &PDSolution) -> Self {
        SolutionJson {
            x: s.x_star.iter().copied().collect(),
            y: s.y_star.iter().copied().collect(),
            rate_bound: s.rate_bound,
            iters: s.trace.iterations_used,
            kkt: s.kkt_residual,
        }
    }
}
