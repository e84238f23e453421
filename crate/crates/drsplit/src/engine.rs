//! The Douglas–Rachford iteration: both operator orders, iteration traces,
//! fixed-point detection, and empirical linear-rate estimation.
//!
//! One step of the standard order maps `x` to
//!
//! ```text
//! z = J_{γA}(x),   u = J_{γB}(2z − x),   x⁺ = x + u − z,
//! ```
//!
//! which is `x⁺ = ½(x + R_{γB} R_{γA} x)`. The swapped order applies the
//! resolvent of `B` first. The update identity `x⁺ − x = u − z` makes the
//! step norm equal to the γ-scaled inclusion residual: `(x−z)/γ ∈ A z` and
//! `(2z−x−u)/γ ∈ B u` sum to `(z−u)/γ`, so `‖x⁺ − x‖ = γ‖Ãz + B̃u‖` for the
//! canonical selections. Small steps therefore certify that the shadow
//! point nearly solves `0 ∈ (A+B)z`.
//!
//! Convergence guarantees are keyed to the *declared* property tags of the
//! inputs — the engine never assumes the composition `−R_B R_A` is averaged
//! (it can fail to be, even for a nonexpansive composition of a skew
//! reflector with `−Id`). Each run records which closed-form contraction
//! factor, if any, applies.

use crate::operators::{OperatorError, OperatorSpec};
use crate::quadform::PropertyTag;
use crate::rates::{
    rate_case_a, rate_case_b, rate_case_c, rate_lip_strong, rate_skew_strong, RateReport,
};
use crate::Vector;
use thiserror::Error;

/// Errors from configuring or running the iteration.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("operand dimension {got} does not match operator dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("trace has {len} iterates; rate estimation needs at least 10")]
    TraceTooShort { len: usize },
    #[error("only {count} usable step norms in the fit window; need at least 3")]
    TooFewUsablePoints { count: usize },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Which resolvent the iteration applies first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// `T = ½(Id + R_B R_A)`: the resolvent of `A` is applied first.
    BAfterA,
    /// `T̃ = ½(Id + R_A R_B)`: the resolvent of `B` is applied first.
    AAfterB,
}

/// Configuration of one Douglas–Rachford run.
#[derive(Debug, Clone)]
pub struct DRConfig {
    pub order: Order,
    /// Step length γ > 0 applied to both operators.
    pub gamma: f64,
    pub max_iter: usize,
    /// Relative stopping tolerance: stop when `‖x⁺ − x‖ ≤ tol·max(1, ‖x‖)`.
    pub tol: f64,
    pub x0: Vector,
}

impl DRConfig {
    /// A configuration with the default stopping rule
    /// (`tol = 1e−10`, `max_iter = 100 000`).
    pub fn new(order: Order, gamma: f64, x0: Vector) -> Self {
        Self {
            order,
            gamma,
            max_iter: 100_000,
            tol: 1e-10,
            x0,
        }
    }

    fn validate(&self) -> Result<(), EngineError> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(EngineError::InvalidConfig(format!(
                "gamma must be finite and > 0, got {}",
                self.gamma
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(EngineError::InvalidConfig(format!(
                "tol must be finite and > 0, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(EngineError::InvalidConfig(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Full record of a run.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    /// `x_0, x_1, …, x_N` (one more entry than steps taken).
    pub iterates: Vec<Vector>,
    /// Shadow sequence: the first-applied resolvent at each iterate
    /// (`J_{γA} x_n` for [`Order::BAfterA`], `J_{γB} x_n` otherwise).
    pub shadow: Vec<Vector>,
    /// `‖x_{n+1} − x_n‖` for each step taken.
    pub step_norms: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
    /// The closed-form contraction factor that provably governs this run,
    /// selected from the declared property tags of the operators — `None`
    /// when no implemented rate case covers the configuration.
    pub guarantee: Option<RateReport>,
}

/// Outcome of [`run`].
#[derive(Debug, Clone)]
pub struct RunResult {
    pub trace: IterationTrace,
    /// Final iterate `x_N`: the fixed-point estimate of `T`.
    pub fixed_point: Vector,
    /// Shadow of the final iterate: the estimate of the unique zero of
    /// `A + B` in the contraction cases.
    pub shadow_point: Vector,
}

/// Empirical linear-rate fit from a trace.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    /// Estimated one-step contraction factor (slope of the log step norms,
    /// exponentiated).
    pub r_emp: f64,
    /// Half-open index range `[start, end)` of step norms used for the fit.
    pub window: (usize, usize),
    /// RMSE of the least-squares fit in log space.
    pub residual: f64,
}

fn resolvents(
    op_a: &OperatorSpec,
    op_b: &OperatorSpec,
    x: &Vector,
    cfg: &DRConfig,
) -> Result<(Vector, Vector), EngineError> {
    let (first, second) = match cfg.order {
        Order::BAfterA => (op_a, op_b),
        Order::AAfterB => (op_b, op_a),
    };
    let z = first.resolvent(x, cfg.gamma)?;
    let u = second.resolvent(&(2.0 * &z - x), cfg.gamma)?;
    Ok((z, u))
}

fn check_run_dims(
    op_a: &OperatorSpec,
    op_b: &OperatorSpec,
    x: &Vector,
) -> Result<(), EngineError> {
    if op_a.dim() != op_b.dim() {
        return Err(EngineError::DimensionMismatch {
            expected: op_a.dim(),
            got: op_b.dim(),
        });
    }
    if x.len() != op_a.dim() {
        return Err(EngineError::DimensionMismatch {
            expected: op_a.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// One Douglas–Rachford step from `x`:
/// `½(x + R_{γB} R_{γA} x)` for [`Order::BAfterA`], the mirrored
/// composition for [`Order::AAfterB`].
pub fn dr_step(
    op_a: &OperatorSpec,
    op_b: &OperatorSpec,
    x: &Vector,
    cfg: &DRConfig,
) -> Result<Vector, EngineError> {
    cfg.validate()?;
    check_run_dims(op_a, op_b, x)?;
    let (z, u) = resolvents(op_a, op_b, x, cfg)?;
    Ok(x + u - z)
}

/// γ-scaled inclusion residual at `x`: `‖z − u‖` where `z` and `u` are the
/// two partial resolvents of the step from `x`. By the resolvent identity
/// this equals `γ‖Ã z + B̃ u‖` for the canonical selections, so a small
/// value certifies `z ≈ u` nearly solves `0 ∈ (A+B)z`.
pub fn fixed_point_residual(
    op_a: &OperatorSpec,
    op_b: &OperatorSpec,
    x: &Vector,
    cfg: &DRConfig,
) -> Result<f64, EngineError> {
    cfg.validate()?;
    check_run_dims(op_a, op_b, x)?;
    let (z, u) = resolvents(op_a, op_b, x, cfg)?;
    Ok((z - u).norm())
}

fn claimed_strong(op: &OperatorSpec) -> Option<f64> {
    op.claimed().iter().find_map(|t| match t {
        PropertyTag::StronglyMonotone(mu) => Some(*mu),
        _ => None,
    })
}

fn claimed_lipschitz(op: &OperatorSpec) -> Option<f64> {
    op.claimed().iter().find_map(|t| match t {
        PropertyTag::Lipschitz(beta) => Some(*beta),
        _ => None,
    })
}

/// Cocoercivity claim, returned as the Lipschitz-side constant β (the tag
/// stores `1/β`).
fn claimed_coco_beta(op: &OperatorSpec) -> Option<f64> {
    op.claimed().iter().find_map(|t| match t {
        PropertyTag::Cocoercive(c) => Some(1.0 / c),
        _ => None,
    })
}

fn claims_monotone(op: &OperatorSpec) -> bool {
    op.claimed().iter().any(|t| {
        matches!(
            t,
            PropertyTag::Monotone
                | PropertyTag::StronglyMonotone(_)
                | PropertyTag::Cocoercive(_)
        )
    })
}

/// Contraction factors applicable to `½(Id + R_second R_first)` based on
/// the declared tags of the two operators, smallest first.
fn canonical_candidates(first: &OperatorSpec, second: &OperatorSpec, gamma: f64) -> Vec<RateReport> {
    let mut out = Vec::new();
    let mu_second = claimed_strong(second);
    let mu_first = claimed_strong(first);
    let lip_first = claimed_lipschitz(first);
    let coco_first = claimed_coco_beta(first);

    // Skew first operator + strongly monotone second: the improved rate.
    if let (true, Some(beta), Some(mu)) = (first.is_skew(), lip_first, mu_second) {
        if let Ok(r) = rate_skew_strong(beta, mu, gamma) {
            out.push(r);
        }
    }
    // Monotone Lipschitz first + strongly monotone second: the main rate.
    if let (true, Some(beta), Some(mu)) = (claims_monotone(first), lip_first, mu_second) {
        if let Ok(r) = rate_lip_strong(beta, mu, gamma) {
            out.push(r);
        }
    }
    // Classical case (a): cocoercive first, strongly monotone second.
    if let (Some(beta), Some(mu)) = (coco_first, mu_second) {
        if let Ok(r) = rate_case_a(mu, beta, gamma) {
            out.push(r);
        }
    }
    // Classical case (b): first operator cocoercive and strongly monotone.
    if let (Some(beta), Some(mu)) = (coco_first, mu_first) {
        if let Ok(r) = rate_case_b(mu, beta, gamma) {
            out.push(r);
        }
    }
    // Classical case (c): first operator Lipschitz and strongly monotone.
    if let (Some(beta), Some(mu)) = (lip_first, mu_first) {
        if let Ok(r) = rate_case_c(mu, beta, gamma) {
            out.push(r);
        }
    }
    out
}

/// The strongest (smallest) contraction factor provably covering a run, or
/// `None` when no implemented result applies.
///
/// For [`Order::BAfterA`] the candidates come from the declared tags of
/// `(A, B)` directly. For [`Order::AAfterB`], `½(Id + R_A R_B)` is the
/// standard operator for the *renamed* pair `(B, A)`, so the same candidate
/// list applies with the roles swapped; additionally, when `A` is monotone,
/// β-Lipschitz **and linear** and `B` is μ-strongly monotone, the swapped
/// composition contracts with the main rate `r(β, μ)` even though `A` acts
/// second. A nonlinear `A` in the swapped order gets no rate from that
/// route (the linear proof does not carry over), so such runs may report
/// `None`.
pub fn guarantee_for(
    op_a: &OperatorSpec,
    op_b: &OperatorSpec,
    order: Order,
    gamma: f64,
) -> Option<RateReport> {
    let mut candidates = match order {
        Order::BAfterA => canonical_candidates(op_a, op_b, gamma),
        Order::AAfterB => {
            let mut c = canonical_candidates(op_b, op_a, gamma);
            if op_a.is_linear() {
                if let (true, Some(beta), Some(mu)) = (
                    claims_monotone(op_a),
                    claimed_lipschitz(op_a),
                    claimed_strong(op_b),
                ) {
                    if let Ok(r) = rate_lip_strong(beta, mu, gamma) {
                        c.push(r);
                    }
                }
            }
            c
        }
    };
    candidates.sort_by(|a, b| a.value.total_cmp(&b.value));
    candidates.into_iter().next()
}

/// Iterates `x_{n+1} = ½(x_n + R R x_n)` from `cfg.x0` until the relative
/// step norm drops below `cfg.tol` or `cfg.max_iter` steps have been taken.
///
/// Non-convergence is not an error: it is returned as `converged = false`
/// with the full trace. In the contraction cases `Fix T` is a singleton,
/// so the fixed point is independent of `x0` up to tolerance.
pub fn run(
    op_a: &OperatorSpec,
    op_b: &OperatorSpec,
    cfg: &DRConfig,
) -> Result<RunResult, EngineError> {
    cfg.validate()?;
    check_run_dims(op_a, op_b, &cfg.x0)?;

    let guarantee = guarantee_for(op_a, op_b, cfg.order, cfg.gamma);
    let mut iterates = vec![cfg.x0.clone()];
    let mut shadow = Vec::new();
    let mut step_norms = Vec::new();
    let mut converged = false;

    let mut x = cfg.x0.clone();
    while step_norms.len() < cfg.max_iter {
        let (z, u) = resolvents(op_a, op_b, &x, cfg)?;
        let next = &x + &u - &z;
        let step = (&next - &x).norm();
        shadow.push(z);
        step_norms.push(step);
        iterates.push(next.clone());
        let done = step <= cfg.tol * x.norm().max(1.0);
        x = next;
        if done {
            converged = true;
            break;
        }
    }
    // Shadow of the final iterate, so `shadow` covers every stored iterate.
    let (z_final, _) = resolvents(op_a, op_b, &x, cfg)?;
    shadow.push(z_final.clone());

    let iterations_used = step_norms.len();
    Ok(RunResult {
        trace: IterationTrace {
            iterates,
            shadow,
            step_norms,
            converged,
            iterations_used,
            guarantee,
        },
        fixed_point: x,
        shadow_point: z_final,
    })
}

/// Least-squares estimate of the empirical linear rate from the tail of a
/// trace.
///
/// Fits `log s_n ≈ c + n·log r` over the last `tail_fraction` of the step
/// norms, excluding steps below `100·ε·‖x̄‖` (numerical floor) and exact
/// zeros. Requires ≥ 10 iterates in the trace and ≥ 3 usable points.
pub fn estimate_rate(trace: &IterationTrace, tail_fraction: f64) -> Result<RateFit, EngineError> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(EngineError::InvalidConfig(format!(
            "tail_fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    if trace.iterates.len() < 10 {
        return Err(EngineError::TraceTooShort {
            len: trace.iterates.len(),
        });
    }
    let n_steps = trace.step_norms.len();
    let window_len = ((n_steps as f64) * tail_fraction).ceil() as usize;
    let start = n_steps - window_len.min(n_steps);
    let floor = match trace.iterates.last() {
        Some(x_bar) => 100.0 * f64::EPSILON * x_bar.norm(),
        None => 0.0,
    };

    let points: Vec<(f64, f64)> = trace.step_norms[start..]
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > floor && s > 0.0)
        .map(|(i, &s)| ((start + i) as f64, s.ln()))
        .collect();
    if points.len() < 3 {
        return Err(EngineError::TooFewUsablePoints {
            count: points.len(),
        });
    }

    let n = points.len() as f64;
    let sum_x: f64 = points.iter().map(|p| p.0).sum();
    let sum_y: f64 = points.iter().map(|p| p.1).sum();
    let sum_xx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sum_xy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sum_xx - sum_x * sum_x;
    if denom <= 0.0 {
        return Err(EngineError::TooFewUsablePoints { count: points.len() });
    }
    let slope = (n * sum_xy - sum_x * sum_y) / denom;
    let intercept = (sum_y - slope * sum_x) / n;
    let mse: f64 = points
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum::<f64>()
        / n;

    Ok(RateFit {
        r_emp: slope.exp(),
        window: (start, n_steps),
        residual: mse.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::OperatorKind;
    use crate::rates::RateCase;
    use crate::Matrix;
    use approx::assert_abs_diff_eq;

    fn rotation(beta: f64) -> OperatorSpec {
        OperatorSpec::new(
            OperatorKind::Rotation2(beta),
            vec![PropertyTag::Monotone, PropertyTag::Lipschitz(beta)],
        )
        .unwrap()
    }

    /// `μ·Id + N_V` on R², with V the second coordinate axis.
    fn axis_cone(mu: f64) -> OperatorSpec {
        let mut claims = vec![PropertyTag::Monotone];
        if mu > 0.0 {
            claims.push(PropertyTag::StronglyMonotone(mu));
        }
        OperatorSpec::new(
            OperatorKind::ScaledIdPlusNormalConeSubspace {
                mu,
                basis: Matrix::from_column_slice(2, 1, &[0.0, 1.0]),
            },
            claims,
        )
        .unwrap()
    }

    /// The normal cone of `{0}` in R²: resolvent is the zero map.
    fn zero_set_cone() -> OperatorSpec {
        OperatorSpec::new(
            OperatorKind::ScaledIdPlusNormalConeSubspace {
                mu: 0.0,
                basis: Matrix::zeros(2, 0),
            },
            vec![PropertyTag::Monotone],
        )
        .unwrap()
    }

    fn cfg(order: Order, gamma: f64, x0: &[f64]) -> DRConfig {
        DRConfig::new(order, gamma, Vector::from_column_slice(x0))
    }

    #[test]
    fn step_for_rotation_against_zero_set_is_half_id_plus_a() {
        // With A the unit rotation, R_A = −A and R_B = −Id, so one step is
        // ½(Id + A)x.
        let op_a = rotation(1.0);
        let op_b = zero_set_cone();
        let c = cfg(Order::BAfterA, 1.0, &[1.0, 0.0]);
        let x = Vector::from_column_slice(&[1.0, 0.0]);
        let stepped = dr_step(&op_a, &op_b, &x, &c).unwrap();
        let ax = op_a.apply(&x).unwrap();
        let expect = 0.5 * (&x + ax);
        assert_abs_diff_eq!((stepped - expect).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn step_fixes_fixed_points() {
        // (0,0) is the fixed point of the rotation/axis-cone pair.
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        let c = cfg(Order::BAfterA, 1.0, &[0.0, 0.0]);
        let x = Vector::zeros(2);
        let stepped = dr_step(&op_a, &op_b, &x, &c).unwrap();
        assert_abs_diff_eq!(stepped.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn step_matches_closed_form_matrix() {
        // At β = μ = 1 the iteration matrix is ½·[[1,1],[0,1]].
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        let c = cfg(Order::BAfterA, 1.0, &[1.0, 0.0]);
        let x = Vector::from_column_slice(&[1.0, 0.0]);
        let stepped = dr_step(&op_a, &op_b, &x, &c).unwrap();
        assert_abs_diff_eq!(stepped[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(stepped[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn run_rotation_axis_cone_converges_to_origin() {
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        let mut c = cfg(Order::BAfterA, 1.0, &[3.0, -2.0]);
        c.tol = 1e-12;
        let res = run(&op_a, &op_b, &c).unwrap();
        assert!(res.trace.converged);
        assert!(res.fixed_point.norm() <= 1e-10);
        assert!(res.shadow_point.norm() <= 1e-10);
        // The guarantee picks the skew-improved factor (√5+1)/4.
        let g = res.trace.guarantee.as_ref().unwrap();
        assert_eq!(g.case, RateCase::SkewStrong);
        assert_abs_diff_eq!(g.value, (5.0_f64.sqrt() + 1.0) / 4.0, epsilon = 1e-14);
        // Banach contraction ⟹ step norms non-increasing (up to rounding).
        for w in res.trace.step_norms.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9));
        }
        // Trace shape.
        assert_eq!(res.trace.iterates.len(), res.trace.iterations_used + 1);
        assert_eq!(res.trace.shadow.len(), res.trace.iterates.len());
        assert_eq!(res.trace.step_norms.len(), res.trace.iterations_used);
        // Final inclusion residual within a small multiple of tol.
        let resid = fixed_point_residual(&op_a, &op_b, &res.fixed_point, &c).unwrap();
        assert!(resid <= 10.0 * c.tol);
    }

    #[test]
    fn run_prox_iteration_finds_zero_of_b() {
        // A = 0: the scheme reduces to the proximal iteration for B,
        // converging to zer(B) = {b} for Bx = x − b.
        let b_vec = Vector::from_column_slice(&[2.0, -1.0, 0.5]);
        let op_a = OperatorSpec::new(
            OperatorKind::DenseLinear(Matrix::zeros(3, 3)),
            vec![PropertyTag::Monotone],
        )
        .unwrap();
        let op_b = OperatorSpec::new(
            OperatorKind::QuadraticGradient(Matrix::identity(3, 3), -b_vec.clone()),
            vec![
                PropertyTag::Monotone,
                PropertyTag::StronglyMonotone(1.0),
                PropertyTag::Lipschitz(1.0),
            ],
        )
        .unwrap();
        let mut c = DRConfig::new(Order::BAfterA, 1.0, Vector::zeros(3));
        c.tol = 1e-13;
        let res = run(&op_a, &op_b, &c).unwrap();
        assert!(res.trace.converged);
        assert!((res.fixed_point - &b_vec).norm() <= 1e-9);
        assert!((res.shadow_point - &b_vec).norm() <= 1e-9);
    }

    #[test]
    fn run_from_fixed_point_stops_immediately() {
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        let c = cfg(Order::BAfterA, 1.0, &[0.0, 0.0]);
        let res = run(&op_a, &op_b, &c).unwrap();
        assert!(res.trace.converged);
        assert_eq!(res.trace.iterations_used, 1);
        assert!(res.trace.step_norms[0] <= 1e-15);
    }

    #[test]
    fn run_reports_non_convergence_without_error() {
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        let mut c = cfg(Order::BAfterA, 1.0, &[10.0, 10.0]);
        c.max_iter = 3;
        c.tol = 1e-16;
        let res = run(&op_a, &op_b, &c).unwrap();
        assert!(!res.trace.converged);
        assert_eq!(res.trace.iterations_used, 3);
    }

    #[test]
    fn swapped_order_guarantees() {
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        // Linear A: the swapped order keeps the main (not skew) rate.
        let g = guarantee_for(&op_a, &op_b, Order::AAfterB, 1.0).unwrap();
        assert_eq!(g.case, RateCase::LipStrongMain);
        assert_abs_diff_eq!(g.value, (6.0_f64.sqrt() + 1.0) / 4.0, epsilon = 1e-14);
        // Nonlinear A (affine quadratic gradient) in the swapped order with
        // no applicable renamed-pair case: no guarantee.
        let affine = OperatorSpec::new(
            OperatorKind::QuadraticGradient(
                Matrix::zeros(2, 2),
                Vector::from_column_slice(&[1.0, 0.0]),
            ),
            vec![PropertyTag::Monotone, PropertyTag::Lipschitz(1e-6)],
        )
        .unwrap();
        assert!(guarantee_for(&affine, &op_b, Order::AAfterB, 1.0).is_none());
        // …but the renamed pair (B, A) can still supply one: a cocoercive B
        // against a strongly monotone (nonlinear) A is classical case (a).
        let coco_b = OperatorSpec::new(
            OperatorKind::QuadraticGradient(2.0 * Matrix::identity(2, 2), Vector::zeros(2)),
            vec![PropertyTag::Cocoercive(0.5), PropertyTag::Lipschitz(2.0)],
        )
        .unwrap();
        let strong_cone = axis_cone(1.0);
        let g = guarantee_for(&strong_cone, &coco_b, Order::AAfterB, 1.0).unwrap();
        assert_eq!(g.case, RateCase::CocoStrongA);
        assert_abs_diff_eq!(g.value, 0.75, epsilon = 1e-14);
    }

    #[test]
    fn canonical_guarantee_prefers_smallest_factor() {
        // A strongly monotone, cocoercive and Lipschitz first operator makes
        // cases (b) and (c) both applicable; the selection takes the min.
        let first = OperatorSpec::new(
            OperatorKind::QuadraticGradient(Matrix::identity(2, 2), Vector::zeros(2)),
            vec![
                PropertyTag::StronglyMonotone(1.0),
                PropertyTag::Lipschitz(1.0),
                PropertyTag::Cocoercive(1.0),
            ],
        )
        .unwrap();
        let second = axis_cone(1.0);
        let g = guarantee_for(&first, &second, Order::BAfterA, 1.0).unwrap();
        // Candidates at (μ, β) = (1, 1): skew requires a skew kind (no);
        // main (√6+1)/4 ≈ 0.86; case a 2/3; cases b and c both ½ → min ½.
        assert_abs_diff_eq!(g.value, 0.5, epsilon = 1e-14);
        assert!(matches!(
            g.case,
            RateCase::StrongCocoB | RateCase::StrongLipC
        ));
    }

    #[test]
    fn guarantee_respects_gamma() {
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        let g_half = guarantee_for(&op_a, &op_b, Order::BAfterA, 0.5).unwrap();
        assert_abs_diff_eq!(
            g_half.value,
            rate_skew_strong(0.5, 0.5, 1.0).unwrap().value,
            epsilon = 1e-14
        );
    }

    #[test]
    fn sampled_step_ratios_respect_guarantee() {
        use rand::{Rng, SeedableRng};
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        let c = cfg(Order::BAfterA, 1.0, &[0.0, 0.0]);
        let rate = guarantee_for(&op_a, &op_b, c.order, c.gamma).unwrap().value;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x = Vector::from_fn(2, |_, _| rng.gen_range(-5.0..5.0));
            let y = Vector::from_fn(2, |_, _| rng.gen_range(-5.0..5.0));
            let d = (&x - &y).norm();
            if d < 1e-9 {
                continue;
            }
            let tx = dr_step(&op_a, &op_b, &x, &c).unwrap();
            let ty = dr_step(&op_a, &op_b, &y, &c).unwrap();
            assert!((tx - ty).norm() / d <= rate + 1e-8);
        }
    }

    #[test]
    fn estimate_rate_exact_geometric_sequence() {
        let rho = 0.5_f64;
        let n = 50;
        let trace = IterationTrace {
            iterates: vec![Vector::zeros(2); n + 1],
            shadow: vec![Vector::zeros(2); n + 1],
            step_norms: (0..n).map(|k| rho.powi(k as i32)).collect(),
            converged: true,
            iterations_used: n,
            guarantee: None,
        };
        let fit = estimate_rate(&trace, 0.5).unwrap();
        assert_abs_diff_eq!(fit.r_emp, rho, epsilon = 1e-12);
        assert!(fit.residual <= 1e-10);
        assert_eq!(fit.window, (25, 50));
    }

    #[test]
    fn estimate_rate_known_spectral_radius() {
        // Steps generated by a non-normal linear map with spectral radius ½.
        let m = Matrix::from_row_slice(2, 2, &[0.45, 0.3, 0.0, 0.5]);
        let mut x = Vector::from_column_slice(&[1.0, 1.0]);
        let mut iterates = vec![x.clone()];
        let mut step_norms = Vec::new();
        for _ in 0..60 {
            let next = &m * &x;
            step_norms.push((&next - &x).norm());
            iterates.push(next.clone());
            x = next;
        }
        let trace = IterationTrace {
            shadow: iterates.clone(),
            iterates,
            step_norms,
            converged: true,
            iterations_used: 60,
            guarantee: None,
        };
        let fit = estimate_rate(&trace, 0.5).unwrap();
        assert!((fit.r_emp - 0.5).abs() <= 0.01, "r_emp = {}", fit.r_emp);
    }

    #[test]
    fn estimate_rate_rejects_bad_inputs() {
        let short = IterationTrace {
            iterates: vec![Vector::zeros(1); 5],
            shadow: vec![Vector::zeros(1); 5],
            step_norms: vec![0.5; 4],
            converged: false,
            iterations_used: 4,
            guarantee: None,
        };
        assert!(matches!(
            estimate_rate(&short, 0.5),
            Err(EngineError::TraceTooShort { len: 5 })
        ));
        let ok = IterationTrace {
            iterates: vec![Vector::zeros(1); 20],
            shadow: vec![Vector::zeros(1); 20],
            step_norms: vec![0.0; 19],
            converged: false,
            iterations_used: 19,
            guarantee: None,
        };
        assert!(matches!(
            estimate_rate(&ok, 0.0),
            Err(EngineError::InvalidConfig(_))
        ));
        assert!(matches!(
            estimate_rate(&ok, 1.5),
            Err(EngineError::InvalidConfig(_))
        ));
        // All-zero steps leave no usable points.
        assert!(matches!(
            estimate_rate(&ok, 1.0),
            Err(EngineError::TooFewUsablePoints { count: 0 })
        ));
    }

    #[test]
    fn empirical_rate_of_real_run_respects_guarantee() {
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        let mut c = cfg(Order::BAfterA, 1.0, &[5.0, 3.0]);
        c.tol = 1e-12;
        let res = run(&op_a, &op_b, &c).unwrap();
        let fit = estimate_rate(&res.trace, 0.5).unwrap();
        let bound = res.trace.guarantee.as_ref().unwrap().value;
        assert!(
            fit.r_emp <= bound + 0.01,
            "r_emp = {} vs bound = {}",
            fit.r_emp,
            bound
        );
    }

    #[test]
    fn orders_agree_on_the_zero_for_linear_a() {
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        let mut c1 = cfg(Order::BAfterA, 1.0, &[2.0, 2.0]);
        c1.tol = 1e-12;
        let mut c2 = c1.clone();
        c2.order = Order::AAfterB;
        let r1 = run(&op_a, &op_b, &c1).unwrap();
        let r2 = run(&op_a, &op_b, &c2).unwrap();
        assert!(r1.trace.converged && r2.trace.converged);
        assert!(
            (r1.shadow_point - r2.shadow_point).norm() <= 10.0 * c1.tol,
            "shadow points must agree across orders"
        );
    }

    #[test]
    fn runs_share_operators_across_threads() {
        let op_a = rotation(1.0);
        let op_b = axis_cone(1.0);
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|k| {
                    let (a, b) = (&op_a, &op_b);
                    s.spawn(move || {
                        let c = DRConfig::new(
                            Order::BAfterA,
                            1.0,
                            Vector::from_column_slice(&[k as f64 + 1.0, -(k as f64)]),
                        );
                        run(a, b, &c).unwrap().fixed_point.norm()
                    })
                })
                .collect();
            for h in handles {
                assert!(h.join().unwrap() <= 1e-8);
            }
        });
    }

    #[test]
    fn dimension_and_config_errors() {
        let op_a = rotation(1.0);
        let op_b = OperatorSpec::new(
            OperatorKind::DenseLinear(Matrix::zeros(3, 3)),
            vec![PropertyTag::Monotone],
        )
        .unwrap();
        let c = cfg(Order::BAfterA, 1.0, &[1.0, 0.0]);
        assert!(matches!(
            dr_step(&op_a, &op_b, &Vector::zeros(2), &c),
            Err(EngineError::DimensionMismatch { .. })
        ));
        let bad_gamma = DRConfig {
            gamma: -1.0,
            ..cfg(Order::BAfterA, 1.0, &[1.0, 0.0])
        };
        assert!(matches!(
            dr_step(&op_a, &op_a, &Vector::zeros(2), &bad_gamma),
            Err(EngineError::InvalidConfig(_))
        ));
        let zero_iter = DRConfig {
            max_iter: 0,
            ..cfg(Order::BAfterA, 1.0, &[1.0, 0.0])
        };
        assert!(matches!(
            run(&op_a, &op_a, &zero_iter),
            Err(EngineError::InvalidConfig(_))
        ));
    }
}
