//! Quadratic-form calculus for operator properties.
//!
//! A property of an operator `A` (strong monotonicity, Lipschitz continuity,
//! cocoercivity, averagedness) is encoded as a symmetric 2×2 matrix `L`
//! through the graph inequality
//!
//! ```text
//! a11·‖x−y‖² + 2·a12·⟨x−y, u−v⟩ + a22·‖u−v‖² ≥ 0   for all (x,u), (y,v) ∈ gra A.
//! ```
//!
//! Because the graphs of the resolvent `J_A = (Id+A)⁻¹` and the reflected
//! resolvent `R_A = 2J_A − Id` are invertible linear images of `gra A`,
//!
//! ```text
//! gra A = { (u, x−u)            | (x,u) ∈ gra J_A }
//!       = { ½(x+u, x−u)         | (x,u) ∈ gra R_A },
//! ```
//!
//! the same property becomes a quadratic-form inequality in resolvent
//! coordinates with matrix `M = SᵀLS`, `S = [[0,1],[1,−1]]`, and in
//! reflected-resolvent coordinates with matrix `N = SᵀLS`, `S = [[1,1],[1,−1]]`
//! (a positive overall scaling of the matrix leaves the inequality
//! unchanged, so the harmless factor ½ per coordinate in the second graph
//! map is dropped). [`to_resolvent_form`] and [`to_reflected_form`] perform
//! exactly these congruences; [`to_inverse_form`] swaps the roles of point
//! and value, giving the matrix of the same inequality on `gra A⁻¹`.
//!
//! [`check_conic_identity`] machine-checks the nonnegative matrix
//! combinations that the rate derivations rest on, and [`holds_on_sample`]
//! tests a quadratic-form inequality empirically on sampled graph pairs.

use crate::Vector;
use thiserror::Error;

/// Errors for quadratic-form construction and sampling.
#[derive(Debug, Error)]
pub enum QuadFormError {
    /// A property tag carries a parameter outside its admissible range.
    #[error("invalid property tag {0}: {1}")]
    InvalidTag(String, String),
    /// A graph sample mixes vectors of different dimensions.
    #[error("graph sample dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A graph sample contains no pairs.
    #[error("graph sample is empty")]
    EmptySample,
}

/// Symmetric 2×2 matrix `[[a11, a12], [a12, a22]]` encoding the graph
/// inequality `a11‖x−y‖² + 2a12⟨x−y, u−v⟩ + a22‖u−v‖² ≥ 0`.
///
/// Entries are always finite; constructors panic on NaN/∞ inputs, which can
/// only arise from caller bugs (the calculus itself is closed over finite
/// parameter values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadForm2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl QuadForm2 {
    /// Builds the form, checking that all entries are finite.
    pub fn new(a11: f64, a12: f64, a22: f64) -> Self {
        assert!(
            a11.is_finite() && a12.is_finite() && a22.is_finite(),
            "QuadForm2 entries must be finite, got [[{a11}, {a12}], [{a12}, {a22}]]"
        );
        Self { a11, a12, a22 }
    }

    /// The zero form.
    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// Evaluates the quadratic form on a difference pair
    /// `(dx, du) = (x−y, u−v)`.
    pub fn eval(&self, dx: &Vector, du: &Vector) -> f64 {
        self.a11 * dx.norm_squared() + 2.0 * self.a12 * dx.dot(du) + self.a22 * du.norm_squared()
    }

    /// Congruence transform `SᵀLS` for a 2×2 matrix `S = [[s11, s12], [s21, s22]]`.
    ///
    /// Congruences preserve the inequality up to the substitution of graph
    /// coordinates that `S` encodes.
    pub fn congruence(&self, s: [[f64; 2]; 2]) -> Self {
        let [[s11, s12], [s21, s22]] = s;
        // T = L·S with L = [[a11, a12], [a12, a22]].
        let t11 = self.a11 * s11 + self.a12 * s21;
        let t12 = self.a11 * s12 + self.a12 * s22;
        let t21 = self.a12 * s11 + self.a22 * s21;
        let t22 = self.a12 * s12 + self.a22 * s22;
        // M = Sᵀ·T; m12 = m21 holds automatically for symmetric L.
        let m11 = s11 * t11 + s21 * t21;
        let m12 = s11 * t12 + s21 * t22;
        let m22 = s12 * t12 + s22 * t22;
        Self::new(m11, m12, m22)
    }

    /// Scales the form by `c` (the inequality is unchanged for `c > 0`).
    pub fn scale(&self, c: f64) -> Self {
        Self::new(c * self.a11, c * self.a12, c * self.a22)
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.a11 + other.a11,
            self.a12 + other.a12,
            self.a22 + other.a22,
        )
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.a11 - other.a11,
            self.a12 - other.a12,
            self.a22 - other.a22,
        )
    }

    /// Largest absolute entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a11 - other.a11)
            .abs()
            .max((self.a12 - other.a12).abs())
            .max((self.a22 - other.a22).abs())
    }

    /// Entrywise equality within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Whether the matrix is positive semidefinite within `tol`
    /// (diagonal entries and determinant nonnegative up to `tol`-sized slack).
    pub fn is_psd(&self, tol: f64) -> bool {
        let det = self.a11 * self.a22 - self.a12 * self.a12;
        let scale = 1.0_f64.max(self.a11.abs()).max(self.a22.abs());
        self.a11 >= -tol && self.a22 >= -tol && det >= -tol * scale
    }
}

/// An operator property with its parameter.
///
/// `Monotone` is the μ = 0 case of `StronglyMonotone` and shares its
/// matrices, but stays a distinct tag so reports and errors read naturally.
/// `Cocoercive` stores the cocoercivity constant itself: `Cocoercive(c)`
/// means `⟨x−y, u−v⟩ ≥ c‖u−v‖²` on the graph, i.e. c = 1/β for the implied
/// Lipschitz constant β of the single-valued case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropertyTag {
    Monotone,
    /// μ-strong monotonicity, μ > 0.
    StronglyMonotone(f64),
    /// β-Lipschitz continuity, β > 0.
    Lipschitz(f64),
    /// (1/β)-cocoercivity, parameterized by the constant 1/β > 0.
    Cocoercive(f64),
    /// α-averagedness, α ∈ (0, 1).
    Averaged(f64),
}

impl std::fmt::Display for PropertyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PropertyTag::Monotone => write!(f, "monotone"),
            PropertyTag::StronglyMonotone(mu) => write!(f, "{mu}-strongly monotone"),
            PropertyTag::Lipschitz(beta) => write!(f, "{beta}-Lipschitz"),
            PropertyTag::Cocoercive(inv_beta) => write!(f, "{inv_beta}-cocoercive"),
            PropertyTag::Averaged(alpha) => write!(f, "{alpha}-averaged"),
        }
    }
}

impl PropertyTag {
    /// Checks the parameter range: strictly positive constants, α ∈ (0, 1).
    pub fn validate(&self) -> Result<(), QuadFormError> {
        let bad = |what: &str| {
            Err(QuadFormError::InvalidTag(
                format!("{self:?}"),
                what.to_string(),
            ))
        };
        match *self {
            PropertyTag::Monotone => Ok(()),
            PropertyTag::StronglyMonotone(mu) if !(mu > 0.0 && mu.is_finite()) => {
                bad("μ must be finite and > 0")
            }
            PropertyTag::Lipschitz(beta) if !(beta > 0.0 && beta.is_finite()) => {
                bad("β must be finite and > 0")
            }
            PropertyTag::Cocoercive(c) if !(c > 0.0 && c.is_finite()) => {
                bad("cocoercivity constant must be finite and > 0")
            }
            PropertyTag::Averaged(alpha) if !(alpha > 0.0 && alpha < 1.0) => {
                bad("α must lie strictly inside (0, 1)")
            }
            _ => Ok(()),
        }
    }
}

/// The property matrix `L` in operator coordinates:
///
/// | property              | L                                   |
/// |-----------------------|-------------------------------------|
/// | monotone              | `[[0, 1], [1, 0]]`                  |
/// | μ-strongly monotone   | `[[−2μ, 1], [1, 0]]`                |
/// | β-Lipschitz           | `[[β², 0], [0, −1]]`                |
/// | (1/β)-cocoercive      | `[[0, β], [β, −2]]`                 |
/// | α-averaged            | `[[2α−1, 1−α], [1−α, −1]]`          |
///
/// # Panics
/// On an invalid tag (see [`PropertyTag::validate`]); invalid tags cannot
/// arise from operators constructed through [`crate::operators`].
pub fn l_matrix(tag: PropertyTag) -> QuadForm2 {
    tag.validate()
        .unwrap_or_else(|e| panic!("l_matrix precondition: {e}"));
    match tag {
        PropertyTag::Monotone => QuadForm2::new(0.0, 1.0, 0.0),
        PropertyTag::StronglyMonotone(mu) => QuadForm2::new(-2.0 * mu, 1.0, 0.0),
        PropertyTag::Lipschitz(beta) => QuadForm2::new(beta * beta, 0.0, -1.0),
        PropertyTag::Cocoercive(inv_beta) => {
            let beta = 1.0 / inv_beta;
            QuadForm2::new(0.0, beta, -2.0)
        }
        PropertyTag::Averaged(alpha) => {
            QuadForm2::new(2.0 * alpha - 1.0, 1.0 - alpha, -1.0)
        }
    }
}

/// Transforms an operator-coordinates form `L` to resolvent coordinates:
/// `M = SᵀLS` with `S = [[0, 1], [1, −1]]`.
///
/// If `L` holds on `gra A`, then `M` holds on `gra J_A`, and conversely.
pub fn to_resolvent_form(l: &QuadForm2) -> QuadForm2 {
    l.congruence([[0.0, 1.0], [1.0, -1.0]])
}

/// Transforms an operator-coordinates form `L` to reflected-resolvent
/// coordinates: `N = SᵀLS` with `S = [[1, 1], [1, −1]]`.
///
/// If `L` holds on `gra A`, then `N` holds on `gra R_A`, and conversely.
/// The output is the plain congruence; where a normalized multiple is
/// conventionally displayed (forms are scale-invariant as inequalities),
/// the congruence may differ from that display by a positive factor.
pub fn to_reflected_form(l: &QuadForm2) -> QuadForm2 {
    l.congruence([[1.0, 1.0], [1.0, -1.0]])
}

/// The matrix of the same inequality read on `gra A⁻¹`: point and value
/// swap roles, so `a11` and `a22` swap while `a12` is unchanged.
pub fn to_inverse_form(l: &QuadForm2) -> QuadForm2 {
    QuadForm2::new(l.a22, l.a12, l.a11)
}

/// Checks the matrix identity `target = Σᵢ coeffᵢ·mᵢ` entrywise within `tol`.
///
/// The rate derivations combine property matrices with nonnegative
/// coefficients (a conic combination of valid graph inequalities is again a
/// valid graph inequality); this helper machine-checks each such identity.
///
/// # Panics
/// If any coefficient is negative or non-finite, or `tol ≤ 0` (caller bug).
pub fn check_conic_identity(target: &QuadForm2, terms: &[(f64, QuadForm2)], tol: f64) -> bool {
    assert!(tol > 0.0, "check_conic_identity: tol must be > 0");
    for (c, _) in terms {
        assert!(
            c.is_finite() && *c >= 0.0,
            "check_conic_identity: coefficients must be nonnegative, got {c}"
        );
    }
    let mut sum = QuadForm2::zero();
    for (c, m) in terms {
        sum = sum.add(&m.scale(*c));
    }
    target.approx_eq(&sum, tol)
}

/// A finite sample of graph pairs `((x, u), (y, v))` with `(x, u)` and
/// `(y, v)` drawn from the graph of one operator.
#[derive(Debug, Clone)]
pub struct GraphSample {
    pairs: Vec<((Vector, Vector), (Vector, Vector))>,
    dim: usize,
}

impl GraphSample {
    /// Builds a sample, validating non-emptiness and dimension consistency.
    pub fn new(pairs: Vec<((Vector, Vector), (Vector, Vector))>) -> Result<Self, QuadFormError> {
        let Some((first, _)) = pairs.first() else {
            return Err(QuadFormError::EmptySample);
        };
        let dim = first.0.len();
        for ((x, u), (y, v)) in &pairs {
            for w in [x, u, y, v] {
                if w.len() != dim {
                    return Err(QuadFormError::DimensionMismatch {
                        expected: dim,
                        got: w.len(),
                    });
                }
            }
        }
        Ok(Self { pairs, dim })
    }

    /// Common dimension of all sampled vectors.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of graph pairs.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// Whether the sample is empty (never true for a constructed sample).
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Iterates over the pairs.
    pub fn iter(&self) -> impl Iterator<Item = &((Vector, Vector), (Vector, Vector))> {
        self.pairs.iter()
    }
}

/// Smallest value of the quadratic form over all pairs in the sample.
///
/// The inequality "holds" on the sample when this margin is ≥ −tol.
pub fn worst_margin(q: &QuadForm2, sample: &GraphSample) -> f64 {
    sample
        .iter()
        .map(|((x, u), (y, v))| q.eval(&(x - y), &(u - v)))
        .fold(f64::INFINITY, f64::min)
}

/// Whether the quadratic-form inequality evaluates ≥ −tol on every pair of
/// the sample.
///
/// Sampling can refute a claimed property but only corroborate a true one;
/// the tolerance absorbs floating-point rounding in the evaluations.
pub fn holds_on_sample(q: &QuadForm2, sample: &GraphSample, tol: f64) -> bool {
    worst_margin(q, sample) >= -tol
}
