//! Named error paths: vanishing denominators carry the vanishing expression,
//! convergence failures and domain misses surface as typed errors.

use qgarnier::error::Error;
use qgarnier::matrices::second_solution;
use qgarnier::qhyper::{eval_x, x_coeff};
use qgarnier::scalar::{bits_for_digits, pow10_neg};
use qgarnier::specialization::{tau_c_step, DerivedGen};
use qgarnier::weyl::{apply_generator, Token};
use qgarnier::{CParams, PhiState, Scalar, SpecialState};

fn s(n: i64, d: i64) -> Scalar {
    Scalar::from_ratio(n, d)
}

#[test]
fn reflection_names_the_vanishing_factor() {
    // phi_{0,1} = -1 makes 1 + phi_{0,1} vanish inside r_0
    let rows = vec![
        [s(2, 1), s(-1, 1)],
        [s(3, 1), s(1, 2)],
        [s(5, 1), s(1, 3)],
        [s(7, 1), s(1, 5)],
    ];
    let state = PhiState::new(1, rows).unwrap();
    match apply_generator(Token::R(0), &state) {
        Err(Error::DivisionByZero(what)) => assert!(what.contains("1+phi"), "{what}"),
        other => panic!("expected DivisionByZero, got {other:?}"),
    }
}

#[test]
fn riccati_step_names_t_zero() {
    // all alpha = 1 with prod(evens) = q c = 1 gives T_j = 1 - 1 = 0
    let one = Scalar::one();
    let cp = CParams::new(
        1,
        vec![one.clone(), one.clone()],
        vec![one.clone(), one.clone()],
        one.clone(),
        one.clone(),
    )
    .unwrap();
    let state = SpecialState::new(vec![s(2, 1), s(1, 2)], cp).unwrap();
    match tau_c_step(&state) {
        Err(Error::DivisionByZero(what)) => assert!(what.starts_with("T_"), "{what}"),
        other => panic!("expected DivisionByZero(T_j), got {other:?}"),
    }
}

#[test]
fn x_coeff_rejects_b_on_the_q_lattice() {
    // b_1 = 1/q makes the (q b_1;q)_k factor vanish at k >= 1
    let q = s(1, 2);
    let cp = CParams::new(
        1,
        vec![s(1, 3), s(1, 5)],
        vec![s(2, 1), q.clone()],
        s(1, 4),
        q,
    )
    .unwrap();
    assert!(x_coeff(0, &cp).is_ok());
    match x_coeff(2, &cp) {
        Err(Error::DivisionByZero(what)) => assert!(what.contains(";q)"), "{what}"),
        other => panic!("expected DivisionByZero, got {other:?}"),
    }
}

#[test]
fn eval_x_reports_non_convergence() {
    // q c = 3/2 > 1: term ratios stay above the acceptance ceiling
    let prec = bits_for_digits(60);
    let tol = pow10_neg(40, prec);
    let q = s(1, 2);
    let cp = CParams::new(
        1,
        vec![s(1, 3), s(1, 5)],
        vec![s(1, 7), q.clone()],
        s(3, 1),
        q,
    )
    .unwrap();
    assert!(matches!(eval_x(&cp, &tol), Err(Error::NonConvergent { .. })));
}

#[test]
fn pi2_second_solution_guards_its_convergence_condition() {
    // b_1 > a_1 a_2 violates the stated condition
    let prec = bits_for_digits(60);
    let tol = pow10_neg(40, prec);
    let q = s(1, 2);
    let cp = CParams::new(
        1,
        vec![s(5, 16), s(7, 16)],
        vec![s(11, 16), q.clone()],
        s(1, 4),
        q,
    )
    .unwrap()
    .to_real(prec)
    .unwrap();
    match second_solution(DerivedGen::Pi2, &cp, &tol) {
        Err(Error::DomainError(what)) => assert!(what.contains("pi_2"), "{what}"),
        other => panic!("expected DomainError, got {other:?}"),
    }
}

#[test]
fn state_rejects_zero_entries() {
    let rows = vec![
        [s(0, 1), s(1, 1)],
        [s(3, 1), s(1, 2)],
        [s(5, 1), s(1, 3)],
        [s(7, 1), s(1, 5)],
    ];
    assert!(matches!(PhiState::new(1, rows), Err(Error::DomainError(_))));
}

#[test]
fn special_state_enforces_product_constraint_exactly() {
    let q = s(1, 2);
    let cp = CParams::new(
        1,
        vec![s(5, 16), s(7, 16)],
        vec![s(11, 16), q.clone()],
        s(1, 4),
        q,
    )
    .unwrap();
    // prod(evens) must equal (-1)^{n+1} q c = 1/8 for n = 1
    assert!(SpecialState::new(vec![s(1, 2), s(1, 4)], cp.clone()).is_ok());
    assert!(matches!(
        SpecialState::new(vec![s(1, 2), s(1, 3)], cp),
        Err(Error::ConstraintViolated(_))
    ));
}
