use aggad::tape::TapeKind;
use aggad_burgers::check::{gate_config, gradient_check};
use aggad_burgers::{evaluate, initial_field, BurgersConfig, Mode};

fn config(grid: usize, iterations: usize, mode: Mode, tape: TapeKind) -> BurgersConfig {
    BurgersConfig {
        grid,
        iterations,
        mode,
        tape,
        repetitions: 1,
        ..Default::default()
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn real_gradient_matches_finite_differences_on_every_tape() {
    for kind in TapeKind::ALL {
        let report = gradient_check(&gate_config(Mode::Real, kind)).unwrap();
        assert!(report.passed(), "{}", report.to_text());
    }
}

#[test]
fn complex_gradients_match_finite_differences() {
    for mode in [Mode::ComplexHandled, Mode::ComplexUnhandled] {
        let report = gradient_check(&gate_config(mode, TapeKind::JacobianLinear)).unwrap();
        assert!(report.passed(), "{}", report.to_text());
    }
}

#[test]
fn handled_and_unhandled_agree() {
    for kind in TapeKind::ALL {
        let h = config(15, 4, Mode::ComplexHandled, kind);
        let u = h.with_mode(Mode::ComplexUnhandled);
        let eh = evaluate(&h, &initial_field(&h)).unwrap();
        let eu = evaluate(&u, &initial_field(&u)).unwrap();
        assert!(relative(eh.value, eu.value) <= 1e-10);
        let scale = eh.gradient.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        for (a, b) in eh.gradient.iter().zip(&eu.gradient) {
            assert!((a - b).abs() <= 1e-10 * scale, "{kind}: {a} vs {b}");
        }
    }
}

#[test]
fn results_do_not_depend_on_the_tape() {
    for mode in Mode::ALL {
        let base = config(15, 4, mode, TapeKind::JacobianLinear);
        let reference = evaluate(&base, &initial_field(&base)).unwrap();
        for kind in TapeKind::ALL {
            let c = base.with_tape(kind);
            let e = evaluate(&c, &initial_field(&c)).unwrap();
            assert!(relative(e.value, reference.value) <= 1e-12, "{mode} {kind}");
            for (a, b) in e.gradient.iter().zip(&reference.gradient) {
                assert!(
                    relative(*a, *b) <= 1e-12 || a == b,
                    "{mode} {kind}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn jacobian_tape_records_two_statements_per_complex_update() {
    let count = |tape: TapeKind, iterations: usize| {
        let c = config(11, iterations, Mode::ComplexHandled, tape);
        evaluate(&c, &initial_field(&c))
            .unwrap()
            .statistics
            .statements()
    };
    for (jacobian, primal) in [
        (TapeKind::JacobianLinear, TapeKind::PrimalLinear),
        (TapeKind::JacobianReuse, TapeKind::PrimalReuse),
    ] {
        let dj = count(jacobian, 3) - count(jacobian, 0);
        let dp = count(primal, 3) - count(primal, 0);
        assert_eq!(dp, 3 * 2 * 9 * 9);
        assert_eq!(dj, 2 * dp);
    }
}

#[test]
fn recorded_bytes_scale_with_interior_points() {
    for mode in Mode::ALL {
        for kind in TapeKind::ALL {
            let bytes = |grid: usize| {
                let c = config(grid, 2, mode, kind);
                evaluate(&c, &initial_field(&c))
                    .unwrap()
                    .statistics
                    .recorded_bytes() as f64
            };
            let ratio = bytes(41) / bytes(21);
            let expected = (39.0 * 39.0) / (19.0 * 19.0);
            assert!(
                relative(ratio, expected) <= 0.1,
                "{mode} {kind}: {ratio} vs {expected}"
            );
        }
    }
}

#[test]
fn complex_mode_doubles_the_gradient_length() {
    let r = config(5, 1, Mode::Real, TapeKind::PrimalLinear);
    let c = r.with_mode(Mode::ComplexHandled);
    assert_eq!(
        evaluate(&r, &initial_field(&r)).unwrap().gradient.len(),
        2 * 25
    );
    assert_eq!(
        evaluate(&c, &initial_field(&c)).unwrap().gradient.len(),
        2 * 2 * 25
    );
}
