//! Property tests for the composite-problem front end: randomized solves
//! against the normal-equations oracle, optimality residuals, duality-gap
//! nonnegativity, order independence, and wire-format round trips.

use drsplit::engine::{estimate_rate, DRConfig, Order};
use drsplit::primal_dual::{
    kkt_residual, solve, CompositeProblem, ProblemJson, SolutionJson,
};
use drsplit::{Matrix, Vector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn randn_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn randn_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn random_problem(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> CompositeProblem {
    let gp = randn_matrix(rng, nx, nx);
    let p = gp.transpose() * &gp * (1.0 / nx as f64) + Matrix::identity(nx, nx) * 0.4;
    let gs = randn_matrix(rng, ny, ny);
    let s = gs.transpose() * &gs * (1.0 / ny as f64) + Matrix::identity(ny, ny) * 0.2;
    let l = randn_matrix(rng, ny, nx);
    let q = randn_vector(rng, nx);
    let t = randn_vector(rng, ny);
    CompositeProblem::new(p, q, s, t, l).unwrap()
}

/// Saddle point by direct linear algebra: x* solves
/// (P + LᵀSL)x = −(q + Lᵀt), then y* = S(Lx*) + t.
fn oracle(p: &CompositeProblem) -> (Vector, Vector) {
    let l = p.l_matrix();
    let lhs = p.p_matrix() + l.transpose() * p.s_matrix() * l;
    let rhs = -(p.q_vector() + l.transpose() * p.t_vector());
    let x = lhs.lu().solve(&rhs).expect("positive definite");
    let y = p.s_matrix() * (l * &x) + p.t_vector();
    (x, y)
}

#[test]
fn random_solves_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for trial in 0..8 {
        let nx = rng.gen_range(1..=10);
        let ny = rng.gen_range(1..=10);
        let problem = random_problem(&mut rng, nx, ny);
        let (x_star, y_star) = oracle(&problem);

        let mut cfg = DRConfig::new(Order::BAfterA, 1.0, Vector::zeros(nx + ny));
        cfg.tol = 1e-12;
        let sol = solve(&problem, &cfg).unwrap();
        assert!(sol.trace.converged, "trial {trial} did not converge");

        assert!(
            (&sol.x_star - &x_star).amax() <= 1e-7,
            "trial {trial}: x deviates by {}",
            (&sol.x_star - &x_star).amax()
        );
        assert!(
            (&sol.y_star - &y_star).amax() <= 1e-7,
            "trial {trial}: y deviates by {}",
            (&sol.y_star - &y_star).amax()
        );
        assert!(sol.kkt_residual <= 1e-7);
        assert!(problem.duality_gap(&sol.x_star, &sol.y_star).unwrap().abs() <= 1e-6);

        assert!(sol.rate_bound > 0.0 && sol.rate_bound < 1.0);
        if let Ok(fit) = estimate_rate(&sol.trace, 0.5) {
            assert!(
                fit.r_emp <= sol.rate_bound + 0.01,
                "trial {trial}: empirical {} vs bound {}",
                fit.r_emp,
                sol.rate_bound
            );
        }
    }
}

#[test]
fn both_orders_reach_the_same_saddle_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let problem = random_problem(&mut rng, 4, 3);
    let mut solutions = Vec::new();
    for order in [Order::BAfterA, Order::AAfterB] {
        let mut cfg = DRConfig::new(order, 0.8, Vector::zeros(7));
        cfg.tol = 1e-12;
        solutions.push(solve(&problem, &cfg).unwrap());
    }
    assert!((&solutions[0].x_star - &solutions[1].x_star).amax() <= 1e-9);
    assert!((&solutions[0].y_star - &solutions[1].y_star).amax() <= 1e-9);
}

/// With L nearly zero the coupling disappears: x* ≈ −P⁻¹q and y* ≈ t.
#[test]
fn vanishing_coupling_decouples_the_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let nx = 3;
    let gp = randn_matrix(&mut rng, nx, nx);
    let p = gp.transpose() * &gp * (1.0 / nx as f64) + Matrix::identity(nx, nx) * 0.5;
    let q = randn_vector(&mut rng, nx);
    let s = Matrix::identity(nx, nx);
    let t = randn_vector(&mut rng, nx);
    let l = Matrix::identity(nx, nx) * 1e-8;
    let problem = CompositeProblem::new(p.clone(), q.clone(), s, t.clone(), l).unwrap();

    let mut cfg = DRConfig::new(Order::BAfterA, 1.0, Vector::zeros(2 * nx));
    cfg.tol = 1e-13;
    let sol = solve(&problem, &cfg).unwrap();
    let x_free = p.lu().solve(&(-&q)).unwrap();
    assert!((&sol.x_star - x_free).amax() <= 1e-6);
    assert!((&sol.y_star - t).amax() <= 1e-6);
}

/// Fenchel–Young: the duality gap is nonnegative everywhere, zero only
/// near the saddle point, and the KKT residual detects perturbations.
#[test]
fn gap_and_kkt_behave_like_merit_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let problem = random_problem(&mut rng, 4, 4);
    let (x_star, y_star) = oracle(&problem);

    assert!(kkt_residual(&problem, &x_star, &y_star).unwrap() <= 1e-10);
    for _ in 0..20 {
        let x = randn_vector(&mut rng, 4);
        let y = randn_vector(&mut rng, 4);
        let gap = problem.duality_gap(&x, &y).unwrap();
        assert!(gap >= -1e-9, "gap {gap} negative");
    }
    let delta = 1e-3;
    let mut x_off = x_star.clone();
    x_off[0] += delta;
    let r = kkt_residual(&problem, &x_off, &y_star).unwrap();
    assert!(r >= 0.1 * delta, "residual {r} too flat near the saddle");
}

#[test]
fn wire_formats_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let problem = random_problem(&mut rng, 3, 2);
    let dto = ProblemJson::from(&problem);
    let text = serde_json::to_string(&dto).unwrap();
    for key in ["\"P\"", "\"q\"", "\"S\"", "\"t\"", "\"L\""] {
        assert!(text.contains(key), "missing {key}");
    }
    let parsed: ProblemJson = serde_json::from_str(&text).unwrap();
    let rebuilt = CompositeProblem::try_from(&parsed).unwrap();
    // Text round trips are exact on write but the default JSON float
    // parser may be one ulp off on read, so compare to machine precision
    // rather than bitwise.
    assert!((rebuilt.p_matrix() - problem.p_matrix()).amax() <= 1e-14);
    assert!((rebuilt.l_matrix() - problem.l_matrix()).amax() <= 1e-14);
    assert!((rebuilt.t_vector() - problem.t_vector()).amax() <= 1e-14);

    let mut cfg = DRConfig::new(Order::BAfterA, 1.0, Vector::zeros(5));
    cfg.tol = 1e-10;
    let sol = solve(&problem, &cfg).unwrap();
    let sol_dto = SolutionJson::from(&sol);
    let sol_text = serde_json::to_string(&sol_dto).unwrap();
    for key in ["\"x\"", "\"y\"", "\"rate_bound\"", "\"iters\"", "\"kkt\""] {
        assert!(sol_text.contains(key), "missing {key}");
    }
    let back: SolutionJson = serde_json::from_str(&sol_text).unwrap();
    assert_eq!(back.iters, sol.trace.iterations_used);
}
