//! Machine verification of every matrix identity, congruence, and sampled
//! inequality the closed-form rates rest on.
//!
//! Each check is pure computation: congruences of the property table,
//! conic combinations that diagonalize the reflected-resolvent bounds,
//! PSD dominance certificates, sampled operator inequalities on random
//! conforming operators, the rotation counterexample showing the composed
//! reflector need not be averaged, and the sharpness oracle matching the
//! closed-form skew rate against an SVD. The CLI `verify` subcommand prints
//! one line per check and fails if any check fails.

use crate::engine::{self, DRConfig, Order};
use crate::operators::{operator_norm, OperatorKind, OperatorSpec};
use crate::quadform::{
    check_conic_identity, l_matrix, to_reflected_form, to_resolvent_form, PropertyTag, QuadForm2,
};
use crate::rates::{
    lambda_hypo, optimal_gamma, rate_case_b, rate_case_c, rate_lip_strong, rate_skew_strong,
    reflected_factor_strong_coco, reflected_factor_strong_lip, spectral_norm_t_sharp,
    step_length_quintic_residual,
};
use crate::{Matrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Outcome of a single verification check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    /// Stable identifier, printed in the pass/fail table.
    pub name: &'static str,
    pub passed: bool,
    /// Human-readable summary: worst deviation or margin observed.
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

/// True iff every check passed.
pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

const N_DRAWS: usize = 20;
const CONGRUENCE_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-9;
const SAMPLED_MARGIN: f64 = -1e-9;
const N_SAMPLED_OPS: usize = 5;
const N_SAMPLED_PAIRS: usize = 2000;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..hi.log10()))
}

fn gaussian_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Matrix {
    Matrix::from_fn(n, m, |_, _| rng.sample(StandardNormal))
}

/// A random monotone matrix with operator norm exactly β: skew part plus a
/// small PSD symmetric part, rescaled.
fn random_monotone_lipschitz(rng: &mut ChaCha8Rng, dim: usize, beta: f64) -> Matrix {
    let k = gaussian_matrix(rng, dim, dim);
    let skew = 0.5 * (&k - k.transpose());
    let g = gaussian_matrix(rng, dim, dim);
    let psd = 0.3 / dim as f64 * (g.transpose() * &g);
    let m0 = skew + psd;
    let norm = operator_norm(&m0).expect("nonzero by construction");
    (beta / norm) * m0
}

/// A random skew matrix with operator norm exactly β.
fn random_skew(rng: &mut ChaCha8Rng, dim: usize, beta: f64) -> Matrix {
    let k = gaussian_matrix(rng, dim, dim);
    let skew = 0.5 * (&k - k.transpose());
    let norm = operator_norm(&skew).expect("nonzero by construction");
    (beta / norm) * skew
}

// ---------------------------------------------------------------------------
// Property-table congruences
// ---------------------------------------------------------------------------

struct TableRow {
    name_resolvent: &'static str,
    name_reflected: &'static str,
    tag: fn(&mut ChaCha8Rng) -> PropertyTag,
    /// Expected resolvent-coordinates matrix for the drawn parameter.
    expect_m: fn(PropertyTag) -> QuadForm2,
    /// Expected reflected-coordinates congruence (including any positive
    /// factor relating it to the conventionally displayed normalization).
    expect_n: fn(PropertyTag) -> QuadForm2,
}

fn param_of(tag: PropertyTag) -> f64 {
    match tag {
        PropertyTag::Monotone => 0.0,
        PropertyTag::StronglyMonotone(mu) => mu,
        PropertyTag::Lipschitz(beta) => beta,
        PropertyTag::Cocoercive(c) => 1.0 / c,
        PropertyTag::Averaged(alpha) => alpha,
    }
}

fn table_rows() -> Vec<TableRow> {
    vec![
        TableRow {
            name_resolvent: "table-resolvent-monotone",
            name_reflected: "table-reflected-monotone",
            tag: |_| PropertyTag::Monotone,
            expect_m: |_| QuadForm2::new(0.0, 1.0, -2.0),
            expect_n: |_| QuadForm2::new(1.0, 0.0, -1.0).scale(2.0),
        },
        TableRow {
            name_resolvent: "table-resolvent-strongly-monotone",
            name_reflected: "table-reflected-strongly-monotone",
            tag: |rng| PropertyTag::StronglyMonotone(log_uniform(rng, 0.1, 10.0)),
            expect_m: |t| {
                let mu = param_of(t);
                QuadForm2::new(0.0, 1.0, -2.0 * mu - 2.0)
            },
            expect_n: |t| {
                let mu = param_of(t);
                QuadForm2::new(1.0 - mu, -mu, -1.0 - mu).scale(2.0)
            },
        },
        TableRow {
            name_resolvent: "table-resolvent-lipschitz",
            name_reflected: "table-reflected-lipschitz",
            tag: |rng| PropertyTag::Lipschitz(log_uniform(rng, 0.1, 10.0)),
            expect_m: |t| {
                let b = param_of(t);
                QuadForm2::new(-1.0, 1.0, b * b - 1.0)
            },
            expect_n: |t| {
                let b = param_of(t);
                QuadForm2::new(b * b - 1.0, b * b + 1.0, b * b - 1.0)
            },
        },
        TableRow {
            name_resolvent: "table-resolvent-cocoercive",
            name_reflected: "table-reflected-cocoercive",
            tag: |rng| PropertyTag::Cocoercive(1.0 / log_uniform(rng, 0.1, 10.0)),
            expect_m: |t| {
                let b = param_of(t);
                QuadForm2::new(-2.0, b + 2.0, -2.0 * b - 2.0)
            },
            // The congruence is β times the conventionally displayed
            // (2/β)-normalized row; as an inequality the two are equivalent.
            expect_n: |t| {
                let b = param_of(t);
                QuadForm2::new(b - 1.0, 1.0, -b - 1.0).scale(2.0)
            },
        },
        TableRow {
            name_resolvent: "table-resolvent-averaged",
            name_reflected: "table-reflected-averaged",
            tag: |rng| PropertyTag::Averaged(rng.gen_range(0.02..0.98)),
            expect_m: |t| {
                let a = param_of(t);
                QuadForm2::new(-1.0, 2.0 - a, 4.0 * a - 4.0)
            },
            expect_n: |t| {
                let a = param_of(t);
                QuadForm2::new(0.0, a, -2.0 * (1.0 - a)).scale(2.0)
            },
        },
    ]
}

fn check_table_congruences(rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) {
    for row in table_rows() {
        let mut worst_m = 0.0_f64;
        let mut worst_n = 0.0_f64;
        for _ in 0..N_DRAWS {
            let tag = (row.tag)(rng);
            let l = l_matrix(tag);
            worst_m = worst_m.max(to_resolvent_form(&l).max_abs_diff(&(row.expect_m)(tag)));
            worst_n = worst_n.max(to_reflected_form(&l).max_abs_diff(&(row.expect_n)(tag)));
        }
        out.push(CheckResult::new(
            row.name_resolvent,
            worst_m <= CONGRUENCE_TOL,
            format!("worst entry deviation {worst_m:.3e} over {N_DRAWS} draws"),
        ));
        out.push(CheckResult::new(
            row.name_reflected,
            worst_n <= CONGRUENCE_TOL,
            format!("worst entry deviation {worst_n:.3e} over {N_DRAWS} draws"),
        ));
    }
}

// ---------------------------------------------------------------------------
// Conic matrix identities behind the rate derivations
// ---------------------------------------------------------------------------

/// Reflected congruence halved: the `[[1−μ,−μ],[−μ,−1−μ]]`-style rows the
/// diagonalizations combine.
fn half_reflected(tag: PropertyTag) -> QuadForm2 {
    to_reflected_form(&l_matrix(tag)).scale(0.5)
}

fn check_conic_identities(rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) {
    let mut coco_ok = true;
    let mut strong_coco_ok = true;
    let mut strong_lip_ok = true;
    let mut factor_sub_worst = 0.0_f64;
    let mut avg_ok = true;
    let mut psd_ok = true;
    let mut displacement_ok = true;
    let mut displacement_diag_ok = true;
    let mut hypo_norm_ok = true;
    let mut hypo_decomp_ok = true;
    let mut lambda_link_worst = 0.0_f64;

    for _ in 0..N_DRAWS {
        let mu = log_uniform(rng, 0.1, 10.0);
        let beta_raw = log_uniform(rng, 0.1, 10.0);
        // The classical combinations assume β ≥ μ.
        let beta = beta_raw.max(mu * (1.0 + rng.gen_range(0.0..2.0)));
        let alpha = rng.gen_range(0.02..0.98);
        let lam = rng.gen_range(-0.99..0.99);

        // Strong monotonicity + Lipschitz continuity combine into
        // (μ/β²)-cocoercivity: (β²/μ)·L_sm + 2·L_lip = L_coco(β²/μ).
        let target = l_matrix(PropertyTag::Cocoercive(mu / (beta * beta)));
        coco_ok &= check_conic_identity(
            &target,
            &[
                (beta * beta / mu, l_matrix(PropertyTag::StronglyMonotone(mu))),
                (2.0, l_matrix(PropertyTag::Lipschitz(beta))),
            ],
            IDENTITY_TOL,
        );

        // Reflected-factor diagonalization, cocoercive + strongly monotone:
        // diag(1−2μ+μβ, −(1+2μ+μβ)) = N_sm/2 + μ·N_coco/2.
        let t_b = QuadForm2::new(1.0 - 2.0 * mu + mu * beta, 0.0, -(1.0 + 2.0 * mu + mu * beta));
        strong_coco_ok &= check_conic_identity(
            &t_b,
            &[
                (1.0, half_reflected(PropertyTag::StronglyMonotone(mu))),
                (mu, half_reflected(PropertyTag::Cocoercive(1.0 / beta))),
            ],
            IDENTITY_TOL,
        );

        // Reflected-factor diagonalization, Lipschitz + strongly monotone:
        // diag(1−2μ+β², −(1+2μ+β²)) = (β²+1)·N_sm/2 + μ·N_lip.
        let t_c = QuadForm2::new(
            1.0 - 2.0 * mu + beta * beta,
            0.0,
            -(1.0 + 2.0 * mu + beta * beta),
        );
        strong_lip_ok &= check_conic_identity(
            &t_c,
            &[
                (
                    beta * beta + 1.0,
                    half_reflected(PropertyTag::StronglyMonotone(mu)),
                ),
                (mu, to_reflected_form(&l_matrix(PropertyTag::Lipschitz(beta)))),
            ],
            IDENTITY_TOL,
        );

        // Scalar substitution: the Lipschitz-case factor is the cocoercive-
        // case factor evaluated at β ↦ β²/μ (β ≥ μ by construction above).
        let kc = reflected_factor_strong_lip(mu, beta).unwrap();
        let kb = reflected_factor_strong_coco(mu, beta * beta / mu).unwrap();
        factor_sub_worst = factor_sub_worst.max((kc - kb).abs());

        // Reflected-factor diagonalization, averaged + strongly monotone
        // (μ < 1 required for a contraction, but the identity is algebraic):
        // diag(α(1−μ), −(α(1−μ)+2μ)) = α·N_sm/2 + μ·N_avg/2.
        let t_avg = QuadForm2::new(alpha * (1.0 - mu), 0.0, -(alpha * (1.0 - mu) + 2.0 * mu));
        avg_ok &= check_conic_identity(
            &t_avg,
            &[
                (alpha, half_reflected(PropertyTag::StronglyMonotone(mu))),
                (mu, half_reflected(PropertyTag::Averaged(alpha))),
            ],
            IDENTITY_TOL,
        );

        // PSD dominance certifying (1+β)-expansiveness of J⁻¹:
        // diag(−1, (1+β)²) = ((β+1)/β)·M_lip + (1/β)·vvᵀ, v = (1, −(β+1)).
        let d = QuadForm2::new(-1.0, 0.0, (1.0 + beta) * (1.0 + beta));
        let rank_one = QuadForm2::new(1.0, -(beta + 1.0), (beta + 1.0) * (beta + 1.0));
        psd_ok &= check_conic_identity(
            &d,
            &[
                (
                    (beta + 1.0) / beta,
                    to_resolvent_form(&l_matrix(PropertyTag::Lipschitz(beta))),
                ),
                (1.0 / beta, rank_one),
            ],
            IDENTITY_TOL,
        ) && rank_one.is_psd(IDENTITY_TOL);

        // Displacement congruence: diag(−1, β²) in operator coordinates
        // becomes [[β², −β²],[β²−1]]-style in resolvent coordinates.
        let disp = to_resolvent_form(&QuadForm2::new(-1.0, 0.0, beta * beta));
        displacement_ok &= disp.max_abs_diff(&QuadForm2::new(
            beta * beta,
            -beta * beta,
            beta * beta - 1.0,
        )) <= IDENTITY_TOL;

        // …and adding β²·(firm nonexpansiveness) diagonalizes it:
        // diag(β², −(1+β²)) = disp + β²·M_mono.
        displacement_diag_ok &= check_conic_identity(
            &QuadForm2::new(beta * beta, 0.0, -(1.0 + beta * beta)),
            &[
                (1.0, disp),
                (beta * beta, to_resolvent_form(&l_matrix(PropertyTag::Monotone))),
            ],
            IDENTITY_TOL,
        );

        // Normalization congruence used to read hypomonotonicity of the
        // composition off the fixed-point map: Sᵀ[[λ−1,1],[1,0]]S = [[4λ,2],[2,0]]
        // with S = [[2,0],[1,1]].
        let hypo = QuadForm2::new(lam - 1.0, 1.0, 0.0).congruence([[2.0, 0.0], [1.0, 1.0]]);
        hypo_norm_ok &=
            hypo.max_abs_diff(&QuadForm2::new(4.0 * lam, 2.0, 0.0)) <= IDENTITY_TOL;

        // Hypomonotonicity decomposition for the composed reflector: with
        // 2m = 1/(1+β)² + 1/(1+β²),
        // [[−2m,1],[1,0]] = M_lip/(1+β²) + β²·M_mono/(1+β²) + D/(1+β)².
        let two_m = 1.0 / ((1.0 + beta) * (1.0 + beta)) + 1.0 / (1.0 + beta * beta);
        let target = QuadForm2::new(-two_m, 1.0, 0.0);
        hypo_decomp_ok &= check_conic_identity(
            &target,
            &[
                (
                    1.0 / (1.0 + beta * beta),
                    to_resolvent_form(&l_matrix(PropertyTag::Lipschitz(beta))),
                ),
                (
                    beta * beta / (1.0 + beta * beta),
                    to_resolvent_form(&l_matrix(PropertyTag::Monotone)),
                ),
                (1.0 / ((1.0 + beta) * (1.0 + beta)), d),
            ],
            IDENTITY_TOL,
        );
        // The certified constant matches the closed-form λ(β) = 1 − 2m.
        lambda_link_worst =
            lambda_link_worst.max((lambda_hypo(beta).unwrap() - (1.0 - two_m)).abs());
    }

    out.push(CheckResult::new(
        "conic-cocoercivity-from-strong-and-lipschitz",
        coco_ok,
        format!("conic combination closes to {IDENTITY_TOL:.0e} at {N_DRAWS} draws"),
    ));
    out.push(CheckResult::new(
        "conic-reflected-strong-coco-diagonalization",
        strong_coco_ok,
        format!("diagonalized contraction certificate at {N_DRAWS} draws"),
    ));
    out.push(CheckResult::new(
        "conic-reflected-strong-lipschitz-diagonalization",
        strong_lip_ok,
        format!("diagonalized contraction certificate at {N_DRAWS} draws"),
    ));
    out.push(CheckResult::new(
        "scalar-reflected-factor-substitution",
        factor_sub_worst <= 1e-12,
        format!("worst |κ_lip(μ,β) − κ_coco(μ,β²/μ)| = {factor_sub_worst:.3e}"),
    ));
    out.push(CheckResult::new(
        "conic-reflected-averaged-diagonalization",
        avg_ok,
        format!("diagonalized contraction certificate at {N_DRAWS} draws"),
    ));
    out.push(CheckResult::new(
        "psd-expansiveness-dominance",
        psd_ok,
        "rank-one PSD remainder certifies the (1+β)-expansiveness bound".into(),
    ));
    out.push(CheckResult::new(
        "congruence-displacement-lipschitz",
        displacement_ok,
        "operator-coordinates displacement bound transforms entrywise".into(),
    ));
    out.push(CheckResult::new(
        "conic-displacement-diagonalization",
        displacement_diag_ok,
        "displacement bound + firm nonexpansiveness diagonalize".into(),
    ));
    out.push(CheckResult::new(
        "congruence-hypomonotonicity-normalization",
        hypo_norm_ok,
        "fixed-point-map normalization congruence closes".into(),
    ));
    out.push(CheckResult::new(
        "conic-hypomonotonicity-decomposition",
        hypo_decomp_ok && lambda_link_worst <= 1e-12,
        format!(
            "three-term certificate closes; worst |λ(β) − (1−2m)| = {lambda_link_worst:.3e}"
        ),
    ));
}

// ---------------------------------------------------------------------------
// Sampled operator inequalities
// ---------------------------------------------------------------------------

struct SampledWorst {
    expansiveness: f64,
    displacement: f64,
    reflected_hypo: f64,
}

fn sampled_monotone_lipschitz(rng: &mut ChaCha8Rng) -> SampledWorst {
    let mut worst = SampledWorst {
        expansiveness: f64::INFINITY,
        displacement: f64::INFINITY,
        reflected_hypo: f64::INFINITY,
    };
    for _ in 0..N_SAMPLED_OPS {
        let beta = log_uniform(rng, 0.2, 5.0);
        let dim = rng.gen_range(2..=6);
        let a = random_monotone_lipschitz(rng, dim, beta);
        let op = OperatorSpec::new(
            OperatorKind::DenseLinear(a),
            vec![PropertyTag::Monotone, PropertyTag::Lipschitz(beta)],
        )
        .expect("constructed to satisfy its claims");
        let lam = lambda_hypo(beta).unwrap();
        for _ in 0..N_SAMPLED_PAIRS {
            let x = gaussian_vector(rng, dim);
            let y = gaussian_vector(rng, dim);
            let dx = &x - &y;
            let nx2 = dx.norm_squared();
            if nx2 < 1e-20 {
                continue;
            }
            let dj = op.resolvent(&x, 1.0).unwrap() - op.resolvent(&y, 1.0).unwrap();
            let dr = 2.0 * &dj - &dx;
            // ‖x−y‖ ≤ (1+β)‖Jx−Jy‖, squared and normalized.
            let m1 = ((1.0 + beta) * (1.0 + beta) * dj.norm_squared() - nx2) / nx2;
            // ‖(Id−J)x−(Id−J)y‖² ≤ β²/(1+β²)·‖x−y‖².
            let m2 = (beta * beta / (1.0 + beta * beta) * nx2 - (&dx - &dj).norm_squared()) / nx2;
            // ⟨x−y, R x−R y⟩ ≥ −λ(β)‖x−y‖².
            let m3 = (dx.dot(&dr) + lam * nx2) / nx2;
            worst.expansiveness = worst.expansiveness.min(m1);
            worst.displacement = worst.displacement.min(m2);
            worst.reflected_hypo = worst.reflected_hypo.min(m3);
        }
    }
    worst
}

struct SkewWorst {
    isometry: f64,
    resolvent_lower: f64,
    resolvent_inner: f64,
    reflected_inner: f64,
}

fn sampled_skew(rng: &mut ChaCha8Rng) -> SkewWorst {
    let mut worst = SkewWorst {
        isometry: 0.0,
        resolvent_lower: f64::INFINITY,
        resolvent_inner: f64::INFINITY,
        reflected_inner: f64::INFINITY,
    };
    for k in 0..N_SAMPLED_OPS {
        let beta = log_uniform(rng, 0.2, 5.0);
        let (op, dim) = if k % 2 == 0 {
            let dim = rng.gen_range(2..=6);
            (
                OperatorSpec::new(
                    OperatorKind::DenseLinear(random_skew(rng, dim, beta)),
                    vec![PropertyTag::Monotone, PropertyTag::Lipschitz(beta)],
                )
                .expect("skew matrices satisfy these claims"),
                dim,
            )
        } else {
            (
                OperatorSpec::new(
                    OperatorKind::Rotation2(beta),
                    vec![PropertyTag::Monotone, PropertyTag::Lipschitz(beta)],
                )
                .expect("rotations satisfy these claims"),
                2,
            )
        };
        let bound = 1.0 / (1.0 + beta * beta);
        for _ in 0..N_SAMPLED_PAIRS {
            let x = gaussian_vector(rng, dim);
            let y = gaussian_vector(rng, dim);
            let nx2 = x.norm_squared();
            if nx2 < 1e-20 || (&x - &y).norm() < 1e-10 {
                continue;
            }
            let jx = op.resolvent(&x, 1.0).unwrap();
            let rx = 2.0 * &jx - &x;
            // R is an isometry for skew linear operators.
            let ry = op.reflected_resolvent(&y, 1.0).unwrap();
            let iso = ((&rx - &ry).norm() - (&x - &y).norm()).abs() / (&x - &y).norm();
            worst.isometry = worst.isometry.max(iso);
            // ‖x‖² ≤ (1+β²)‖J x‖².
            let m1 = ((1.0 + beta * beta) * jx.norm_squared() - nx2) / nx2;
            // ⟨x, Jx⟩ ≥ ‖x‖²/(1+β²).
            let m2 = (x.dot(&jx) - bound * nx2) / nx2;
            // ⟨x, Rx⟩ ≥ (2/(1+β²) − 1)‖x‖².
            let m3 = (x.dot(&rx) - (2.0 * bound - 1.0) * nx2) / nx2;
            worst.resolvent_lower = worst.resolvent_lower.min(m1);
            worst.resolvent_inner = worst.resolvent_inner.min(m2);
            worst.reflected_inner = worst.reflected_inner.min(m3);
        }
    }
    worst
}

fn check_sampled_inequalities(rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) {
    let ml = sampled_monotone_lipschitz(rng);
    out.push(CheckResult::new(
        "sampled-resolvent-expansiveness",
        ml.expansiveness >= SAMPLED_MARGIN,
        format!("worst margin {:.3e}", ml.expansiveness),
    ));
    out.push(CheckResult::new(
        "sampled-displacement-contraction",
        ml.displacement >= SAMPLED_MARGIN,
        format!("worst margin {:.3e}", ml.displacement),
    ));
    out.push(CheckResult::new(
        "sampled-reflected-hypomonotonicity",
        ml.reflected_hypo >= SAMPLED_MARGIN,
        format!("worst margin {:.3e}", ml.reflected_hypo),
    ));

    let sk = sampled_skew(rng);
    out.push(CheckResult::new(
        "skew-reflected-isometry",
        sk.isometry <= 1e-10,
        format!("worst relative isometry defect {:.3e}", sk.isometry),
    ));
    out.push(CheckResult::new(
        "sampled-skew-resolvent-lower-bound",
        sk.resolvent_lower >= SAMPLED_MARGIN,
        format!("worst margin {:.3e}", sk.resolvent_lower),
    ));
    out.push(CheckResult::new(
        "sampled-skew-resolvent-inner-product",
        sk.resolvent_inner >= SAMPLED_MARGIN,
        format!("worst margin {:.3e}", sk.resolvent_inner),
    ));
    out.push(CheckResult::new(
        "sampled-skew-reflected-inner-product",
        sk.reflected_inner >= SAMPLED_MARGIN,
        format!("worst margin {:.3e}", sk.reflected_inner),
    ));
}

// ---------------------------------------------------------------------------
// The rotation counterexample: nonexpansive composition, never averaged
// ---------------------------------------------------------------------------

fn check_rotation_counterexample(out: &mut Vec<CheckResult>) {
    let rot = OperatorSpec::new(
        OperatorKind::Rotation2(1.0),
        vec![PropertyTag::Monotone, PropertyTag::Lipschitz(1.0)],
    )
    .unwrap();
    let zero_cone = OperatorSpec::new(
        OperatorKind::ScaledIdPlusNormalConeSubspace {
            mu: 0.0,
            basis: Matrix::zeros(2, 0),
        },
        vec![PropertyTag::Monotone],
    )
    .unwrap();

    // −R_B R_A = −A: assemble the composition columnwise and compare.
    let mut comp = Matrix::zeros(2, 2);
    let mut neg_a = Matrix::zeros(2, 2);
    for j in 0..2 {
        let e = Vector::from_fn(2, |i, _| if i == j { 1.0 } else { 0.0 });
        let ra = rot.reflected_resolvent(&e, 1.0).unwrap();
        let col = -zero_cone.reflected_resolvent(&ra, 1.0).unwrap();
        comp.set_column(j, &col);
        neg_a.set_column(j, &(-rot.apply(&e).unwrap()));
    }
    let comp_dev = (&comp - &neg_a).amax();
    out.push(CheckResult::new(
        "rotation-composition-identity",
        comp_dev <= 1e-13,
        format!("‖(−R_B R_A) − (−A)‖_max = {comp_dev:.3e}"),
    ));

    // −A is nonexpansive but α-averaged for no α: the deaveraged map
    // (N − (1−α)Id)/α has norm √(1 + (1−α)²)/α > 1 on the whole grid.
    let mut all_exceed = true;
    let mut worst_formula_dev = 0.0_f64;
    let mut alpha = 0.01;
    while alpha <= 0.99 + 1e-12 {
        let m = (&comp - (1.0 - alpha) * Matrix::identity(2, 2)) / alpha;
        let norm = operator_norm(&m).unwrap();
        let closed = (1.0 + (1.0 - alpha) * (1.0 - alpha)).sqrt() / alpha;
        worst_formula_dev = worst_formula_dev.max((norm - closed).abs());
        if norm <= 1.0 {
            all_exceed = false;
        }
        alpha += 0.01;
    }
    out.push(CheckResult::new(
        "rotation-composition-never-averaged",
        all_exceed && worst_formula_dev <= 1e-9,
        format!(
            "deaveraged norm > 1 for all α in (0,1); worst |norm − √(1+(1−α)²)/α| = {worst_formula_dev:.3e}"
        ),
    ));
}

// ---------------------------------------------------------------------------
// Sharpness, closed-form iteration matrix, rate consistency, dominance
// ---------------------------------------------------------------------------

fn check_sharpness_grid(out: &mut Vec<CheckResult>) {
    let mut worst = 0.0_f64;
    for i in 0..10 {
        for j in 0..10 {
            let beta = 10f64.powf(-1.0 + 2.0 * i as f64 / 9.0);
            let mu = 10f64.powf(-1.0 + 2.0 * j as f64 / 9.0);
            let r = rate_skew_strong(beta, mu, 1.0).unwrap().value;
            let t = spectral_norm_t_sharp(beta, mu).unwrap();
            worst = worst.max((r - t).abs());
        }
    }
    out.push(CheckResult::new(
        "sharpness-grid",
        worst <= 1e-9,
        format!("worst |rate − ‖T‖| = {worst:.3e} on a 10×10 log grid"),
    ));
}

fn check_iteration_matrix(rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) {
    let mut worst = 0.0_f64;
    for _ in 0..N_DRAWS {
        let beta = log_uniform(rng, 0.1, 10.0);
        let mu = log_uniform(rng, 0.1, 10.0);
        let rot = OperatorSpec::new(
            OperatorKind::Rotation2(beta),
            vec![PropertyTag::Monotone, PropertyTag::Lipschitz(beta)],
        )
        .unwrap();
        let cone = OperatorSpec::new(
            OperatorKind::ScaledIdPlusNormalConeSubspace {
                mu,
                basis: Matrix::from_column_slice(2, 1, &[0.0, 1.0]),
            },
            vec![PropertyTag::Monotone, PropertyTag::StronglyMonotone(mu)],
        )
        .unwrap();
        let cfg = DRConfig::new(Order::BAfterA, 1.0, Vector::zeros(2));
        let s = 1.0 / (beta * beta + 1.0);
        let t = Matrix::from_row_slice(
            2,
            2,
            &[
                s * beta * beta,
                s * beta,
                s * beta * (1.0 - mu) / (1.0 + mu),
                s * (1.0 + beta * beta * mu) / (1.0 + mu),
            ],
        );
        for j in 0..2 {
            let e = Vector::from_fn(2, |i, _| if i == j { 1.0 } else { 0.0 });
            let stepped = engine::dr_step(&rot, &cone, &e, &cfg).unwrap();
            worst = worst.max((stepped - t.column(j).into_owned()).amax());
        }
    }
    out.push(CheckResult::new(
        "iteration-matrix-closed-form",
        worst <= 1e-12,
        format!("worst entry deviation {worst:.3e} over {N_DRAWS} draws"),
    ));
}

fn check_classical_consistency(rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) {
    let mut worst = 0.0_f64;
    for _ in 0..N_DRAWS {
        let mu = log_uniform(rng, 0.1, 10.0);
        let beta = mu * (1.0 + rng.gen_range(0.0..9.0));
        let rb = rate_case_b(mu, beta, 1.0).unwrap().value;
        let kb = reflected_factor_strong_coco(mu, beta).unwrap();
        worst = worst.max((rb - (0.5 + 0.5 * kb)).abs());
        let rc = rate_case_c(mu, beta, 1.0).unwrap().value;
        let kc = reflected_factor_strong_lip(mu, beta).unwrap();
        worst = worst.max((rc - (0.5 + 0.5 * kc)).abs());
    }
    out.push(CheckResult::new(
        "classical-rate-consistency",
        worst <= 1e-14,
        format!("worst |rate − (½ + ½κ)| = {worst:.3e}"),
    ));
}

fn check_rate_dominance(out: &mut Vec<CheckResult>) {
    let mut worst_margin = f64::INFINITY;
    for i in 0..20 {
        for j in 0..20 {
            let beta = 10f64.powf(-1.0 + 2.0 * i as f64 / 19.0);
            let mu = 10f64.powf(-1.0 + 2.0 * j as f64 / 19.0);
            let skew = rate_skew_strong(beta, mu, 1.0).unwrap().value;
            let lip = rate_lip_strong(beta, mu, 1.0).unwrap().value;
            worst_margin = worst_margin.min(lip - skew);
        }
    }
    out.push(CheckResult::new(
        "rate-dominance-grid",
        worst_margin >= 0.0,
        format!("min(main − skew) = {worst_margin:.3e} ≥ 0 on a 20×20 grid"),
    ));
}

fn check_step_length_stationarity(out: &mut Vec<CheckResult>) {
    let sweep = optimal_gamma(1.0, 1.0, 1e-8).unwrap();
    let resid = step_length_quintic_residual(sweep.gamma_star).abs();
    let at_one = rate_skew_strong(1.0, 1.0, 1.0).unwrap().value;
    out.push(CheckResult::new(
        "step-length-stationarity",
        resid <= 1e-4 && sweep.rate_at_star < at_one,
        format!(
            "γ* = {:.9}, |quintic(γ*)| = {resid:.3e}, rate {:.9} < rate(γ=1) {at_one:.9}",
            sweep.gamma_star, sweep.rate_at_star
        ),
    ));
}

/// Runs the complete verification suite with the given RNG seed for the
/// sampled checks; every deterministic identity is independent of the seed.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    check_table_congruences(&mut rng, &mut out);
    check_conic_identities(&mut rng, &mut out);
    check_sampled_inequalities(&mut rng, &mut out);
    check_rotation_counterexample(&mut out);
    check_sharpness_grid(&mut out);
    check_iteration_matrix(&mut rng, &mut out);
    check_classical_consistency(&mut rng, &mut out);
    check_rate_dominance(&mut out);
    check_step_length_stationarity(&mut out);
    out
}
