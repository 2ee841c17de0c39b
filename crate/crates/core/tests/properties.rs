//! Property tests: estimator invariants and the randomized
//! symbolic-vs-finite-difference derivative check.

use blowup_core::blowup::{estimate_x_star, EstimateMethod};
use blowup_core::expr::{parse, BinaryOp, Binding, Expression, UnaryOp, Var};
use blowup_core::ode::{StopReason, Trajectory};
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tail_traj(xs: Vec<f64>) -> Trajectory {
    let n = xs.len();
    let params = (0..n).map(|k| 0.1 * k as f64).collect();
    let states = xs.iter().flat_map(|x| [*x, 1.0]).collect();
    Trajectory::from_samples(
        vec!["x".into(), "y".into()],
        params,
        states,
        StopReason::StepBudget,
    )
    .unwrap()
}

proptest! {
    /// Aitken is exact on geometric tails: x_k = x* - c r^k.
    #[test]
    fn aitken_exact_on_geometric_sequences(
        x_star in -3.0f64..3.0,
        c in 0.05f64..2.0,
        r in 0.1f64..0.9,
        n in 20usize..60,
    ) {
        let xs: Vec<f64> = (0..n).map(|k| x_star - c * r.powi(k as i32)).collect();
        // skip tails that have already collapsed to the limit at f64 resolution
        prop_assume!(c * r.powi(n as i32 - 1) > 1e-13 * (1.0 + x_star.abs()));
        let est = estimate_x_star(&tail_traj(xs)).unwrap();
        let tol = 1e-12 * (1.0 + x_star.abs());
        prop_assert!(
            (est.x_star - x_star).abs() <= tol,
            "estimate {} vs {} (err {:.3e})", est.x_star, x_star, (est.x_star - x_star).abs()
        );
        prop_assert_eq!(est.method, EstimateMethod::Aitken);
    }

    /// Estimating on (x_k + c) returns x* + c.
    #[test]
    fn aitken_shift_equivariance(
        shift in -10.0f64..10.0,
        c in 0.05f64..2.0,
        r in 0.15f64..0.85,
    ) {
        let xs: Vec<f64> = (0..40).map(|k| 1.0 - c * r.powi(k)).collect();
        prop_assume!(c * r.powi(39) > 1e-12);
        let shifted: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let e1 = estimate_x_star(&tail_traj(xs)).unwrap();
        let e2 = estimate_x_star(&tail_traj(shifted)).unwrap();
        prop_assert!(
            (e2.x_star - shift - e1.x_star).abs() <= 1e-9 * (1.0 + shift.abs()),
            "{} vs {} + {}", e2.x_star, e1.x_star, shift
        );
    }
}

// ---------------------------------------------------------------------------
// randomized expression trees: derivative vs central finite difference
// ---------------------------------------------------------------------------

const VARS: [Var; 3] = [Var::X, Var::Y, Var::T];

fn random_tree(rng: &mut ChaCha8Rng, depth: usize) -> Expression {
    if depth == 0 || rng.gen_range(0..10) < 2 {
        return if rng.gen_bool(0.5) {
            Expression::Constant(rng.gen_range(0.5..2.5))
        } else {
            Expression::Variable(VARS[rng.gen_range(0..3)])
        };
    }
    if rng.gen_bool(0.35) {
        let op = match rng.gen_range(0..6) {
            0 | 1 => UnaryOp::Neg,
            2 => UnaryOp::Abs,
            3 => UnaryOp::Sqrt,
            4 => UnaryOp::Exp,
            _ => UnaryOp::Ln,
        };
        Expression::Unary(op, Box::new(random_tree(rng, depth - 1)))
    } else {
        let op = match rng.gen_range(0..5) {
            0 => BinaryOp::Add,
            1 => BinaryOp::Sub,
            2 => BinaryOp::Mul,
            3 => BinaryOp::Div,
            _ => BinaryOp::Pow,
        };
        let left = random_tree(rng, depth - 1);
        // keep exponents constant, matching how the transforms use powers
        let right = if op == BinaryOp::Pow {
            Expression::Constant(rng.gen_range(0.5..2.5))
        } else {
            random_tree(rng, depth - 1)
        };
        Expression::Binary(op, Box::new(left), Box::new(right))
    }
}

fn random_binding(rng: &mut ChaCha8Rng) -> Binding {
    Binding::xyt(
        rng.gen_range(0.4..1.6),
        rng.gen_range(0.4..1.6),
        rng.gen_range(0.4..1.6),
    )
}

fn central_fd(e: &Expression, v: Var, b: &Binding, h: f64) -> Option<f64> {
    let base = b.get(v)?;
    let plus = e.eval(&b.with(v, base + h)).ok()?;
    let minus = e.eval(&b.with(v, base - h)).ok()?;
    Some((plus - minus) / (2.0 * h))
}

/// 100 random trees of depth <= 6, each validated at 10 bindings away from
/// domain boundaries: |sym - fd| <= 1e-6 (1 + |fd|). Bindings where the
/// expression leaves its domain, explodes, or sits near a kink of |.| are
/// resampled (detected by disagreement between two fd step sizes).
#[test]
fn symbolic_derivative_matches_finite_differences_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dec0de);
    let mut trees_done = 0usize;
    let mut tree_attempts = 0usize;

    while trees_done < 100 {
        tree_attempts += 1;
        assert!(
            tree_attempts < 5000,
            "generator failed to produce enough usable trees"
        );
        let tree = random_tree(&mut rng, 6);
        let derivs: Vec<Expression> = VARS.iter().map(|v| tree.differentiate(*v)).collect();

        let mut bindings_done = 0usize;
        let mut binding_attempts = 0usize;
        while bindings_done < 10 && binding_attempts < 300 {
            binding_attempts += 1;
            let b = random_binding(&mut rng);
            let value = match tree.eval(&b) {
                Ok(v) if v.abs() < 1e6 => v,
                _ => continue,
            };
            assert!(value.is_finite(), "eval returned non-finite without error");

            let mut all_vars_checked = true;
            for (v, d) in VARS.iter().zip(&derivs) {
                let fd1 = central_fd(&tree, *v, &b, 1e-6);
                let fd2 = central_fd(&tree, *v, &b, 1e-5);
                let (fd1, fd2) = match (fd1, fd2) {
                    (Some(a), Some(c)) => (a, c),
                    _ => {
                        all_vars_checked = false;
                        break;
                    }
                };
                // near a kink (or wildly curved region) the two step sizes
                // disagree; such points are outside the check's domain
                if (fd1 - fd2).abs() > 1e-4 * (1.0 + fd1.abs()) || fd1.abs() > 1e8 {
                    all_vars_checked = false;
                    break;
                }
                let sym = match d.eval(&b) {
                    Ok(s) => s,
                    Err(_) => {
                        all_vars_checked = false;
                        break;
                    }
                };
                assert!(
                    (sym - fd1).abs() <= 1e-6 * (1.0 + fd1.abs()),
                    "tree {tree}: d/d{} = {} vs fd {} at {:?}",
                    v.name(),
                    sym,
                    fd1,
                    b
                );
            }
            if all_vars_checked {
                bindings_done += 1;
            }
        }
        if bindings_done == 10 {
            trees_done += 1;
        }
    }
}

/// Printing then re-parsing reproduces random trees node for node.
/// (Generator constants are non-negative, matching what the parser itself
/// can produce.)
#[test]
fn random_trees_survive_print_parse_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf00d);
    for _ in 0..300 {
        let tree = random_tree(&mut rng, 5);
        let printed = tree.to_string();
        let reparsed =
            parse(&printed).unwrap_or_else(|e| panic!("{printed:?} (from {tree:?}): {e}"));
        assert_eq!(reparsed, tree, "printed form {printed:?}");
    }
}

/// parse(print(parse(s))) == parse(s) over a corpus of grammar-valid inputs.
#[test]
fn corpus_round_trip_idempotence() {
    let corpus = [
        "y^2",
        "2*y^3",
        "1/y",
        "t/y",
        "(1+abs(y^2)^2)^0.5",
        "(1+abs(t)^2+abs(2*y^3)^2)^0.5",
        "x - y - t",
        "x^-2",
        "-x^2",
        "exp(-(x^2))",
        "sign(y)*sqrt(abs(y))",
        "ln(1+exp(x))",
    ];
    for src in corpus {
        let once = parse(src).unwrap();
        let again = parse(&once.to_string()).unwrap();
        assert_eq!(once, again, "{src}");
    }
}
