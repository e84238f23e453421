//! Concrete finite-dimensional monotone operators with closed-form
//! resolvents.
//!
//! An [`OperatorSpec`] couples an operator realization ([`OperatorKind`])
//! with a list of claimed properties ([`PropertyTag`]). Construction
//! fail-fast validates every claim empirically: graph pairs are sampled
//! through the resolvent (which is defined even for set-valued kinds) and
//! the property's quadratic form must evaluate nonnegative on all of them,
//! up to [`VALIDATION_TOL`]. A spec that survives construction can therefore
//! be fed to rate formulas keyed to its tags without silent misuse.
//!
//! Resolvents `J_{γA} = (Id + γA)⁻¹` are exact linear solves; the dense
//! factorization behind each one is computed once per `(operator, γ)` and
//! cached (write-once, shareable across threads). Problem sizes are
//! desk-scale, so dense factorizations are appropriate.

use crate::quadform::{self, GraphSample, PropertyTag, QuadFormError};
use crate::{Matrix, Vector};
use nalgebra::{Cholesky, Dyn, LU};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Absolute tolerance for empirical claim validation and graph checks.
///
/// Graph samples are standard-normal with desk-scale dimensions, so form
/// evaluations are O(10²) at most and exact properties hold up to a few
/// hundred ulps; 1e−9 leaves orders of magnitude of headroom while still
/// refuting any materially false claim.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Default number of sampled graph pairs for construction-time validation.
pub const DEFAULT_VALIDATION_SAMPLES: usize = 200;

/// Default RNG seed for construction-time validation.
pub const DEFAULT_VALIDATION_SEED: u64 = 42;

/// Errors raised by operator construction and evaluation.
#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid operator parameter: {0}")]
    InvalidParameter(String),
    #[error("claimed property \"{tag}\" failed empirical validation (worst margin {worst_margin:.3e})")]
    ClaimValidationFailed { tag: String, worst_margin: f64 },
    #[error("operator norm of the zero matrix is requested but the context requires a nonzero matrix")]
    ZeroMatrix,
    #[error("singular linear system in a resolvent solve; this violates the monotonicity invariants of the construction")]
    SingularSystem,
    #[error("operator does not support single-valued forward application: {0}")]
    NotForwardApplicable(String),
    #[error("step length gamma must be finite and > 0, got {0}")]
    InvalidGamma(f64),
    #[error(transparent)]
    QuadForm(#[from] QuadFormError),
}

/// The realization of an operator.
#[derive(Debug, Clone)]
pub enum OperatorKind {
    /// `x ↦ Ax` for a square matrix `A`.
    DenseLinear(Matrix),
    /// The product-space skew operator `(x, y) ↦ (Lᵀy, −Lx)` built from an
    /// `m×n` matrix `L`; acts on dimension `n + m`.
    SkewFromL(Matrix),
    /// The planar rotation `β·[[0, 1], [−1, 0]]`, β > 0.
    Rotation2(f64),
    /// Gradient `x ↦ Qx + c` of the convex quadratic `½xᵀQx + cᵀx`
    /// (`Q` symmetric positive semidefinite).
    QuadraticGradient(Matrix, Vector),
    /// `μ·Id + N_C` for a subspace `C` spanned by the orthonormal columns
    /// of `basis` (zero columns give `C = {0}`), μ ≥ 0. The resolvent is
    /// `x ↦ P_C(x)/(1 + γμ)`.
    ScaledIdPlusNormalConeSubspace { mu: f64, basis: Matrix },
    /// The inverse `A⁻¹` of another operator; its resolvent is evaluated
    /// through the exact identity `J_{γA⁻¹}(x) = x − γ·J_{γ⁻¹A}(x/γ)`,
    /// so only the inner operator's resolvent is ever solved.
    Inverse(Box<OperatorSpec>),
    /// Block-diagonal pairing acting on stacked vectors.
    ProductPair(Box<OperatorSpec>, Box<OperatorSpec>),
}

/// Cached dense factorization for one `(operator, γ)` pair.
enum Factor {
    Lu(LU<f64, Dyn, Dyn>),
    Chol(Cholesky<f64, Dyn>),
    /// For the skew product-space kind: Cholesky of `Id + γ²LᵀL` plus the
    /// transpose of `L`, reused on every solve.
    SkewChol {
        chol: Cholesky<f64, Dyn>,
        lt: Matrix,
    },
}

/// A monotone operator with validated property claims.
pub struct OperatorSpec {
    kind: OperatorKind,
    claimed: Vec<PropertyTag>,
    dim: usize,
    cache: Mutex<HashMap<u64, Arc<Factor>>>,
}

impl std::fmt::Debug for OperatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorSpec")
            .field("kind", &self.kind)
            .field("claimed", &self.claimed)
            .field("dim", &self.dim)
            .finish()
    }
}

impl Clone for OperatorSpec {
    fn clone(&self) -> Self {
        Self {
            kind: self.kind.clone(),
            claimed: self.claimed.clone(),
            dim: self.dim,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

fn kind_dim(kind: &OperatorKind) -> Result<usize, OperatorError> {
    match kind {
        OperatorKind::DenseLinear(a) => {
            if a.nrows() != a.ncols() {
                return Err(OperatorError::InvalidParameter(format!(
                    "DenseLinear matrix must be square, got {}×{}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            Ok(a.nrows())
        }
        OperatorKind::SkewFromL(l) => Ok(l.ncols() + l.nrows()),
        OperatorKind::Rotation2(_) => Ok(2),
        OperatorKind::QuadraticGradient(q, _) => Ok(q.nrows()),
        OperatorKind::ScaledIdPlusNormalConeSubspace { basis, .. } => Ok(basis.nrows()),
        OperatorKind::Inverse(inner) => Ok(inner.dim()),
        OperatorKind::ProductPair(a, b) => Ok(a.dim() + b.dim()),
    }
}

fn check_finite_matrix(m: &Matrix, what: &str) -> Result<(), OperatorError> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(OperatorError::InvalidParameter(format!(
            "{what} contains non-finite entries"
        )));
    }
    Ok(())
}

fn check_structural(kind: &OperatorKind) -> Result<(), OperatorError> {
    match kind {
        OperatorKind::DenseLinear(a) => check_finite_matrix(a, "DenseLinear matrix"),
        OperatorKind::SkewFromL(l) => check_finite_matrix(l, "SkewFromL matrix"),
        OperatorKind::Rotation2(beta) => {
            if !(beta.is_finite() && *beta > 0.0) {
                return Err(OperatorError::InvalidParameter(format!(
                    "Rotation2 scale must be finite and > 0, got {beta}"
                )));
            }
            Ok(())
        }
        OperatorKind::QuadraticGradient(q, c) => {
            check_finite_matrix(q, "QuadraticGradient matrix")?;
            if q.nrows() != q.ncols() {
                return Err(OperatorError::InvalidParameter(
                    "QuadraticGradient matrix must be square".into(),
                ));
            }
            if c.len() != q.nrows() {
                return Err(OperatorError::DimensionMismatch {
                    expected: q.nrows(),
                    got: c.len(),
                });
            }
            let scale = q.amax().max(1.0);
            let sym_defect = (q - q.transpose()).amax();
            if sym_defect > 1e-12 * scale {
                return Err(OperatorError::InvalidParameter(format!(
                    "QuadraticGradient matrix must be symmetric (defect {sym_defect:.3e})"
                )));
            }
            // Positive semidefiniteness: a PSD matrix shifted by a small
            // positive multiple of the identity is positive definite, so its
            // Cholesky factorization must succeed.
            let n = q.nrows();
            let shifted = q + Matrix::identity(n, n) * (1e-10 * scale);
            if Cholesky::new(shifted).is_none() {
                return Err(OperatorError::InvalidParameter(
                    "QuadraticGradient matrix must be positive semidefinite".into(),
                ));
            }
            Ok(())
        }
        OperatorKind::ScaledIdPlusNormalConeSubspace { mu, basis } => {
            if !(mu.is_finite() && *mu >= 0.0) {
                return Err(OperatorError::InvalidParameter(format!(
                    "subspace-cone scale μ must be finite and ≥ 0, got {mu}"
                )));
            }
            check_finite_matrix(basis, "subspace basis")?;
            if basis.nrows() == 0 {
                return Err(OperatorError::InvalidParameter(
                    "subspace basis must have ambient dimension ≥ 1".into(),
                ));
            }
            if basis.ncols() > basis.nrows() {
                return Err(OperatorError::InvalidParameter(
                    "subspace basis cannot have more columns than rows".into(),
                ));
            }
            if basis.ncols() > 0 {
                let k = basis.ncols();
                let gram_defect = (basis.transpose() * basis - Matrix::identity(k, k)).amax();
                if gram_defect > 1e-10 {
                    return Err(OperatorError::InvalidParameter(format!(
                        "subspace basis columns must be orthonormal (defect {gram_defect:.3e})"
                    )));
                }
            }
            Ok(())
        }
        OperatorKind::Inverse(_) | OperatorKind::ProductPair(..) => Ok(()), // children validated at their own construction
    }
}

impl OperatorSpec {
    /// Builds an operator and validates every claimed property empirically
    /// on [`DEFAULT_VALIDATION_SAMPLES`] sampled graph pairs (seed
    /// [`DEFAULT_VALIDATION_SEED`]). A failed claim is a hard error.
    pub fn new(kind: OperatorKind, claimed: Vec<PropertyTag>) -> Result<Self, OperatorError> {
        let spec = Self::new_unchecked(kind, claimed)?;
        let report = validate_claims(&spec, DEFAULT_VALIDATION_SAMPLES, DEFAULT_VALIDATION_SEED)?;
        if let Some(check) = report.checks.iter().find(|c| !c.passed) {
            return Err(OperatorError::ClaimValidationFailed {
                tag: check.tag.to_string(),
                worst_margin: check.worst_margin,
            });
        }
        Ok(spec)
    }

    /// Builds an operator with structural validation only, skipping the
    /// empirical claim check. Intended for diagnostics (e.g. asking
    /// [`validate_claims`] to refute a deliberately false claim).
    pub fn new_unchecked(
        kind: OperatorKind,
        claimed: Vec<PropertyTag>,
    ) -> Result<Self, OperatorError> {
        check_structural(&kind)?;
        for tag in &claimed {
            tag.validate()?;
        }
        let dim = kind_dim(&kind)?;
        Ok(Self {
            kind,
            claimed,
            dim,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// The operator's realization.
    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    /// The claimed properties.
    pub fn claimed(&self) -> &[PropertyTag] {
        &self.claimed
    }

    /// Ambient dimension the operator acts on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the operator is a linear map (set-valued or affine kinds are
    /// not; a quadratic gradient is linear exactly when its offset is zero).
    pub fn is_linear(&self) -> bool {
        match &self.kind {
            OperatorKind::DenseLinear(_) | OperatorKind::SkewFromL(_) | OperatorKind::Rotation2(_) => {
                true
            }
            OperatorKind::QuadraticGradient(_, c) => c.amax() == 0.0,
            OperatorKind::ScaledIdPlusNormalConeSubspace { basis, .. } => {
                // N_C vanishes only when C is the whole space.
                basis.ncols() == basis.nrows()
            }
            OperatorKind::Inverse(inner) => inner.is_linear(),
            OperatorKind::ProductPair(a, b) => a.is_linear() && b.is_linear(),
        }
    }

    /// Whether the operator is a skew linear map (`⟨x, Ax⟩ = 0` for all x).
    pub fn is_skew(&self) -> bool {
        match &self.kind {
            OperatorKind::SkewFromL(_) | OperatorKind::Rotation2(_) => true,
            OperatorKind::DenseLinear(a) => {
                (a + a.transpose()).amax() <= 1e-12 * a.amax().max(1.0)
            }
            OperatorKind::QuadraticGradient(q, c) => c.amax() == 0.0 && q.amax() == 0.0,
            OperatorKind::ScaledIdPlusNormalConeSubspace { .. } => false,
            OperatorKind::Inverse(inner) => inner.is_skew() && inner.is_linear(),
            OperatorKind::ProductPair(a, b) => a.is_skew() && b.is_skew(),
        }
    }

    fn check_dim(&self, x: &Vector) -> Result<(), OperatorError> {
        if x.len() != self.dim {
            return Err(OperatorError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn factor_for(&self, gamma: f64) -> Result<Option<Arc<Factor>>, OperatorError> {
        let needs_factor = matches!(
            self.kind,
            OperatorKind::DenseLinear(_)
                | OperatorKind::SkewFromL(_)
                | OperatorKind::QuadraticGradient(..)
        );
        if !needs_factor {
            return Ok(None);
        }
        let key = gamma.to_bits();
        let mut cache = self.cache.lock().expect("resolvent cache poisoned");
        if let Some(f) = cache.get(&key) {
            return Ok(Some(Arc::clone(f)));
        }
        let factor = match &self.kind {
            OperatorKind::DenseLinear(a) => {
                let n = a.nrows();
                Factor::Lu((Matrix::identity(n, n) + a * gamma).lu())
            }
            OperatorKind::SkewFromL(l) => {
                let n = l.ncols();
                let lt = l.transpose();
                let system = Matrix::identity(n, n) + (&lt * l) * (gamma * gamma);
                let chol = Cholesky::new(system).ok_or(OperatorError::SingularSystem)?;
                Factor::SkewChol { chol, lt }
            }
            OperatorKind::QuadraticGradient(q, _) => {
                let n = q.nrows();
                let chol = Cholesky::new(Matrix::identity(n, n) + q * gamma)
                    .ok_or(OperatorError::SingularSystem)?;
                Factor::Chol(chol)
            }
            _ => unreachable!(),
        };
        let factor = Arc::new(factor);
        cache.insert(key, Arc::clone(&factor));
        Ok(Some(factor))
    }

    /// The resolvent `J_{γA}(x)`: the unique `y` with `x ∈ y + γ·A(y)`.
    pub fn resolvent(&self, x: &Vector, gamma: f64) -> Result<Vector, OperatorError> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(OperatorError::InvalidGamma(gamma));
        }
        self.check_dim(x)?;
        match &self.kind {
            OperatorKind::DenseLinear(_) => {
                let factor = self.factor_for(gamma)?.expect("factor present");
                let Factor::Lu(lu) = factor.as_ref() else {
                    unreachable!()
                };
                lu.solve(x).ok_or(OperatorError::SingularSystem)
            }
            OperatorKind::SkewFromL(l) => {
                let factor = self.factor_for(gamma)?.expect("factor present");
                let Factor::SkewChol { chol, lt } = factor.as_ref() else {
                    unreachable!()
                };
                let n = l.ncols();
                let m = l.nrows();
                let w1 = x.rows(0, n).into_owned();
                let w2 = x.rows(n, m).into_owned();
                let rhs = &w1 - (lt * &w2) * gamma;
                let xx = chol.solve(&rhs);
                let y = &w2 + (l * &xx) * gamma;
                let mut z = Vector::zeros(n + m);
                z.rows_mut(0, n).copy_from(&xx);
                z.rows_mut(n, m).copy_from(&y);
                Ok(z)
            }
            OperatorKind::Rotation2(beta) => {
                let gb = gamma * beta;
                let d = 1.0 + gb * gb;
                Ok(Vector::from_vec(vec![
                    (x[0] - gb * x[1]) / d,
                    (gb * x[0] + x[1]) / d,
                ]))
            }
            OperatorKind::QuadraticGradient(_, c) => {
                let factor = self.factor_for(gamma)?.expect("factor present");
                let Factor::Chol(chol) = factor.as_ref() else {
                    unreachable!()
                };
                Ok(chol.solve(&(x - c * gamma)))
            }
            OperatorKind::ScaledIdPlusNormalConeSubspace { mu, basis } => {
                let projected = if basis.ncols() == 0 {
                    Vector::zeros(self.dim)
                } else {
                    basis * (basis.transpose() * x)
                };
                Ok(projected / (1.0 + gamma * mu))
            }
            OperatorKind::Inverse(inner) => {
                // J_{γA⁻¹}(x) = x − γ·J_{γ⁻¹A}(x/γ).
                let inner_res = inner.resolvent(&(x / gamma), 1.0 / gamma)?;
                Ok(x - inner_res * gamma)
            }
            OperatorKind::ProductPair(a, b) => {
                let (na, nb) = (a.dim(), b.dim());
                let ya = a.resolvent(&x.rows(0, na).into_owned(), gamma)?;
                let yb = b.resolvent(&x.rows(na, nb).into_owned(), gamma)?;
                let mut y = Vector::zeros(na + nb);
                y.rows_mut(0, na).copy_from(&ya);
                y.rows_mut(na, nb).copy_from(&yb);
                Ok(y)
            }
        }
    }

    /// The reflected resolvent `R_{γA}(x) = 2·J_{γA}(x) − x`.
    pub fn reflected_resolvent(&self, x: &Vector, gamma: f64) -> Result<Vector, OperatorError> {
        Ok(self.resolvent(x, gamma)? * 2.0 - x)
    }

    /// Single-valued forward application `A(x)` where defined.
    ///
    /// Set-valued kinds (a normal cone of a proper subspace, the inverse of
    /// a non-injective map) return [`OperatorError::NotForwardApplicable`].
    pub fn apply(&self, x: &Vector) -> Result<Vector, OperatorError> {
        self.check_dim(x)?;
        match &self.kind {
            OperatorKind::DenseLinear(a) => Ok(a * x),
            OperatorKind::SkewFromL(l) => {
                let n = l.ncols();
                let m = l.nrows();
                let xx = x.rows(0, n).into_owned();
                let y = x.rows(n, m).into_owned();
                let mut out = Vector::zeros(n + m);
                out.rows_mut(0, n).copy_from(&(l.transpose() * &y));
                out.rows_mut(n, m).copy_from(&(-(l * &xx)));
                Ok(out)
            }
            OperatorKind::Rotation2(beta) => {
                Ok(Vector::from_vec(vec![beta * x[1], -beta * x[0]]))
            }
            OperatorKind::QuadraticGradient(q, c) => Ok(q * x + c),
            OperatorKind::ScaledIdPlusNormalConeSubspace { mu, basis } => {
                if basis.ncols() == basis.nrows() {
                    Ok(x * *mu)
                } else {
                    Err(OperatorError::NotForwardApplicable(
                        "normal cone of a proper subspace is set-valued".into(),
                    ))
                }
            }
            OperatorKind::Inverse(inner) => match inner.kind() {
                OperatorKind::DenseLinear(a) => a
                    .clone()
                    .lu()
                    .solve(x)
                    .ok_or_else(|| not_invertible("DenseLinear")),
                OperatorKind::QuadraticGradient(q, c) => q
                    .clone()
                    .lu()
                    .solve(&(x - c))
                    .ok_or_else(|| not_invertible("QuadraticGradient")),
                _ => Err(OperatorError::NotForwardApplicable(
                    "inverse kind supports forward application only for invertible linear/affine inners"
                        .into(),
                )),
            },
            OperatorKind::ProductPair(a, b) => {
                let (na, nb) = (a.dim(), b.dim());
                let ya = a.apply(&x.rows(0, na).into_owned())?;
                let yb = b.apply(&x.rows(na, nb).into_owned())?;
                let mut y = Vector::zeros(na + nb);
                y.rows_mut(0, na).copy_from(&ya);
                y.rows_mut(na, nb).copy_from(&yb);
                Ok(y)
            }
        }
    }
}

fn not_invertible(what: &str) -> OperatorError {
    OperatorError::NotForwardApplicable(format!("{what} inner operator is singular"))
}

/// Standalone block-elimination resolvent of the product-space skew
/// operator `(x, y) ↦ (Lᵀy, −Lx)`: solves `(Id + γ𝐀)z = w` via
/// `(Id + γ²LᵀL)x = w₁ − γLᵀw₂`, then `y = w₂ + γLx`.
///
/// For repeated solves at a fixed `(L, γ)`, prefer an
/// [`OperatorKind::SkewFromL`] spec, which caches the factorization.
pub fn skew_product_resolvent(l: &Matrix, w: &Vector, gamma: f64) -> Result<Vector, OperatorError> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(OperatorError::InvalidGamma(gamma));
    }
    let spec = OperatorSpec::new_unchecked(OperatorKind::SkewFromL(l.clone()), vec![])?;
    spec.resolvent(w, gamma)
}

/// Largest singular value of `L`, by power iteration on `LᵀL` to relative
/// tolerance 1e−12 on the Rayleigh quotient.
///
/// Errors on the zero matrix (callers require a nonzero `L`).
pub fn operator_norm(l: &Matrix) -> Result<f64, OperatorError> {
    if l.amax() == 0.0 {
        return Err(OperatorError::ZeroMatrix);
    }
    let gram = l.transpose() * l;
    let lambda = power_iteration_symmetric(&gram)?;
    Ok(lambda.max(0.0).sqrt())
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration with a deterministic start vector, relative tolerance 1e−12.
fn power_iteration_symmetric(s: &Matrix) -> Result<f64, OperatorError> {
    let n = s.nrows();
    if s.amax() == 0.0 {
        return Ok(0.0);
    }
    // Deterministic, generically positioned start vector.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut v = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    v /= v.norm();
    let mut lambda_old = f64::INFINITY;
    for _ in 0..200_000 {
        let sv = s * &v;
        let lambda = v.dot(&sv);
        let norm = sv.norm();
        if norm == 0.0 {
            // v landed exactly in the kernel; restart from a shifted vector.
            v = Vector::from_fn(n, |i, _| 1.0 + i as f64);
            v /= v.norm();
            lambda_old = f64::INFINITY;
            continue;
        }
        v = sv / norm;
        if (lambda - lambda_old).abs() <= 1e-12 * lambda.abs().max(1e-300) {
            return Ok(lambda);
        }
        lambda_old = lambda;
    }
    // Rayleigh quotients of a symmetric PSD matrix converge monotonically;
    // reaching the cap still yields a sound lower estimate.
    Ok(lambda_old)
}

/// Smallest and largest eigenvalues of a symmetric matrix via two power
/// iterations (the smallest through the spectral shift `λmax·Id − S`).
pub fn symmetric_eig_extremes(s: &Matrix) -> Result<(f64, f64), OperatorError> {
    let scale = s.amax().max(1.0);
    if (s - s.transpose()).amax() > 1e-12 * scale {
        return Err(OperatorError::InvalidParameter(
            "eigenvalue extremes require a symmetric matrix".into(),
        ));
    }
    let n = s.nrows();
    // ‖S‖₂ bound so that the shift makes the spectrum nonnegative even for
    // indefinite S: use λmax(S) when S is PSD-like, else the Frobenius bound.
    let shift = s.norm();
    let shifted_up = Matrix::identity(n, n) * shift + s;
    // eigenvalues of shift·Id + S lie in [shift + λmin, shift + λmax] ⊆ [0, 2·shift].
    let lambda_max = power_iteration_symmetric(&shifted_up)? - shift;
    let shifted_down = Matrix::identity(n, n) * shift - s;
    let lambda_min = shift - power_iteration_symmetric(&shifted_down)?;
    Ok((lambda_min, lambda_max))
}

/// Samples `n_pairs` graph pairs of `op` through its resolvent at γ = 1:
/// for a standard-normal `w`, the point `(x, u) = (J_A w, w − J_A w)` lies
/// on `gra A` exactly.
pub fn sample_graph(
    op: &OperatorSpec,
    n_pairs: usize,
    seed: u64,
) -> Result<GraphSample, OperatorError> {
    if n_pairs == 0 {
        return Err(OperatorError::InvalidParameter(
            "graph sampling needs at least one pair".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(2 * n_pairs);
    for _ in 0..2 * n_pairs {
        let w = Vector::from_fn(op.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = op.resolvent(&w, 1.0)?;
        let u = &w - &x;
        points.push((x, u));
    }
    let mut pairs = Vec::with_capacity(n_pairs);
    for chunk in points.chunks_exact(2) {
        pairs.push((chunk[0].clone(), chunk[1].clone()));
    }
    Ok(GraphSample::new(pairs)?)
}

/// Outcome of checking one claimed property on a graph sample.
#[derive(Debug, Clone)]
pub struct ClaimCheck {
    pub tag: PropertyTag,
    pub passed: bool,
    /// Smallest quadratic-form value observed over the sample; the claim
    /// passes when this is ≥ −[`VALIDATION_TOL`].
    pub worst_margin: f64,
}

/// Per-tag validation report.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<ClaimCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Empirically checks every claimed tag of `op` on `n_samples` sampled
/// graph pairs, reporting pass/fail and the worst margin per tag.
pub fn validate_claims(
    op: &OperatorSpec,
    n_samples: usize,
    seed: u64,
) -> Result<ValidationReport, OperatorError> {
    if op.claimed().is_empty() {
        return Ok(ValidationReport { checks: vec![] });
    }
    let sample = sample_graph(op, n_samples.max(1), seed)?;
    let checks = op
        .claimed()
        .iter()
        .map(|&tag| {
            let l = quadform::l_matrix(tag);
            let worst_margin = quadform::worst_margin(&l, &sample);
            ClaimCheck {
                tag,
                passed: worst_margin >= -VALIDATION_TOL,
                worst_margin,
            }
        })
        .collect();
    Ok(ValidationReport { checks })
}
