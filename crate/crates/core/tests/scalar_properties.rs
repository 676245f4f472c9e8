//! Property tests for the scalar kernel: the q-factorial recurrence, the
//! eps-limit homomorphism laws, and exact/numeric backend agreement.

use num::{BigRational, Zero};
use proptest::prelude::*;

use qgarnier::scalar::{bits_for_digits, pow10_neg, qpoch, BigReal, EpsRational, PolyQ, Scalar};

fn qr(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-50i64..=50, 1i64..=50).prop_map(|(n, d)| qr(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    (prop_oneof![-50i64..=-1, 1i64..=50], 1i64..=50).prop_map(|(n, d)| qr(n, d))
}

/// eps-rationals with a unit constant term in the denominator, so the
/// eps -> 0 limit exists.
fn eps_value() -> impl Strategy<Value = EpsRational> {
    (
        proptest::collection::vec(rational(), 1..4),
        proptest::collection::vec(rational(), 0..3),
        nonzero_rational(),
    )
        .prop_filter_map("nonzero denominator at 0", |(num, den_tail, den0)| {
            let num = PolyQ::from_coeffs(num);
            let mut den_coeffs = vec![den0];
            den_coeffs.extend(den_tail);
            let den = PolyQ::from_coeffs(den_coeffs);
            EpsRational::new(num, den).ok()
        })
}

proptest! {
    #[test]
    fn qpoch_recurrence(an in -20i64..=20, ad in 1i64..=20, qn in -20i64..=20, qd in 1i64..=20, k in 0usize..8) {
        let a = Scalar::Exact(qr(an, ad));
        let q = Scalar::Exact(qr(qn, qd));
        let lhs = qpoch(&a, &q, k + 1).unwrap();
        let qk = q.powi(k as i64).unwrap();
        let rhs = qpoch(&a, &q, k).unwrap()
            .try_mul(&Scalar::one().try_sub(&qk.try_mul(&a).unwrap()).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn limit_is_additive_and_multiplicative(u in eps_value(), v in eps_value()) {
        let lu = u.limit_eps0().unwrap();
        let lv = v.limit_eps0().unwrap();
        let sum = u.add(&v).unwrap();
        prop_assert_eq!(sum.limit_eps0().unwrap(), &lu + &lv);
        let prod = u.mul(&v).unwrap();
        prop_assert_eq!(prod.limit_eps0().unwrap(), &lu * &lv);
    }

    #[test]
    fn limit_respects_division(u in eps_value(), v in eps_value()) {
        let lv = v.limit_eps0().unwrap();
        prop_assume!(!lv.is_zero());
        let lu = u.limit_eps0().unwrap();
        let quot = u.div(&v).unwrap();
        prop_assert_eq!(quot.limit_eps0().unwrap(), lu / lv);
    }

    #[test]
    fn backends_agree(xn in -99i64..=99, xd in 1i64..=99, yn in prop_oneof![-99i64..=-1, 1i64..=99], yd in 1i64..=99) {
        // numeric arithmetic reproduces exact arithmetic to 10^{-P+5}
        let digits = 60u32;
        let prec = bits_for_digits(digits);
        let gap = pow10_neg(digits - 5, prec);
        let x = qr(xn, xd);
        let y = qr(yn, yd);
        let xr = BigReal::from_rational(&x, prec);
        let yr = BigReal::from_rational(&y, prec);
        for (exact, real) in [
            (&x + &y, xr.add(&yr)),
            (&x - &y, xr.sub(&yr)),
            (&x * &y, xr.mul(&yr)),
            (&x / &y, xr.div(&yr)),
        ] {
            let want = BigReal::from_rational(&exact, prec);
            prop_assert!(
                real.sub(&want).abs().compare(&gap) == std::cmp::Ordering::Less,
                "exact {exact} vs numeric {real}"
            );
        }
    }
}
