use aggad::prelude::*;
use aggad::verify::programs::Program;
use aggad::verify::{dot, dot_product_check, with_scratch_tape};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn masked(p: &Program, v: Vec<f64>) -> Vec<f64> {
    v.into_iter()
        .zip(p.flat_active())
        .map(|(x, a)| if a { x } else { 0.0 })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn all_tapes_agree_bitwise(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Program::random(&mut rng, 5, 50);
        let x = p.sample_inputs(&mut rng);
        let xdot = masked(&p, p.sample_inputs(&mut rng));
        let ybar = p.sample_inputs(&mut rng);
        let reference = p.run(TapeKind::JacobianLinear, &x, &xdot, &ybar);
        for kind in TapeKind::ALL {
            let run = p.run(kind, &x, &xdot, &ybar);
            prop_assert_eq!(&run, &reference, "{}", kind);
        }
    }

    #[test]
    fn dot_product_identity_holds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Program::random(&mut rng, 10, 10);
        let x = p.sample_inputs(&mut rng);
        let xdot = masked(&p, p.sample_inputs(&mut rng));
        let ybar = p.sample_inputs(&mut rng);
        for kind in TapeKind::ALL {
            let run = p.run(kind, &x, &xdot, &ybar);
            let (err, ok) = dot_product_check(dot(&ybar, &run.ydot), dot(&run.xbar, &xdot));
            prop_assert!(ok, "{}: {:e}", kind, err);
        }
    }
}

#[test]
fn linear_program_dot_product_is_exact() {
    for kind in TapeKind::ALL {
        let (lhs, rhs) = with_scratch_tape(kind, || {
            tape::with_active_tape(|t| t.set_tangent_tracking(true)).unwrap();
            let mut x = ActiveReal::new(0.7);
            x.register_input().unwrap();
            x.set_tangent(0.25).unwrap();
            let y = ActiveReal::from_expr(3.0 * &x);
            y.set_gradient(2.0).unwrap();
            tape::evaluate_reverse().unwrap();
            (2.0 * y.tangent(), x.gradient() * 0.25)
        });
        assert_eq!(lhs, 3.0 * 0.25 * 2.0);
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn passive_branches_contribute_nothing() {
    for kind in TapeKind::ALL {
        let (xbar, pbar) = with_scratch_tape(kind, || {
            let mut x = ActiveReal::new(0.5);
            x.register_input().unwrap();
            let p = ActiveReal::new(2.0);
            let q = ActiveReal::from_expr(sin(&p) * 4.0);
            let y = ActiveReal::from_expr(&x * &q + exp(&p));
            y.set_gradient(1.0).unwrap();
            tape::evaluate_reverse().unwrap();
            (x.gradient(), p.gradient())
        });
        assert_eq!(xbar, 2.0f64.sin() * 4.0);
        assert_eq!(pbar, 0.0);
    }
}

#[test]
fn recording_twice_gives_the_same_adjoints() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let p = Program::random(&mut rng, 40, 40);
    let x = p.sample_inputs(&mut rng);
    let zeros = vec![0.0; p.width()];
    let ybar = p.sample_inputs(&mut rng);
    for kind in TapeKind::ALL {
        assert_eq!(
            p.run(kind, &x, &zeros, &ybar),
            p.run(kind, &x, &zeros, &ybar)
        );
    }
}
