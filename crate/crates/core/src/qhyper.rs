//! Evaluation of the basic hypergeometric vector x, its exact series
//! coefficients, the q-Lauricella vector y, and the transformation and
//! solution identities tying them together.

use crate::error::{Error, Result};
use crate::matrices::sigma_prime_split;
use crate::scalar::{qpoch_inf, BigReal, QPochConfig, Scalar};
use crate::specialization::{
    derived_params, tau_c_step, translation_on_cparams, CParams, DerivedGen, SpecialState,
};

const MAX_TERMS: usize = 10_000;
/// Term-ratio ceiling for accepting the geometric tail bound.
const RHO_CEIL: f64 = 0.999;

/// Truncation evidence for a series evaluation.
#[derive(Clone, Debug)]
pub struct TruncationReport {
    pub terms: usize,
    pub rho_hat: f64,
    pub bound: f64,
    pub converged: bool,
}

/// A vector of series values with its truncation evidence (worst component).
#[derive(Clone, Debug)]
pub struct HgVector {
    pub vals: Vec<BigReal>,
    pub trunc: TruncationReport,
}

/// The exact k-th series coefficient vector: x = sum_k x_k c^k with
/// x_{k,j} = q^k prod_{l<=n-j+1}(1-a_l) prod_{l>n-j+1}(1-b_l)
///           prod_{l<=n-j+1} (q a_l;q)_k/(q b_l;q)_k
///           prod_{l>n-j+1} (a_l;q)_k/(b_l;q)_k  (last products up to n+1).
pub fn x_coeff(k: usize, cp: &CParams) -> Result<Vec<Scalar>> {
    let n = cp.order() as i64;
    let mut out = Vec::with_capacity(cp.order() + 1);
    for j in 1..=n + 1 {
        let mut v = cp.q.powi(k as i64)?;
        for l in 1..=n - j + 1 {
            v = v.try_mul(&Scalar::one().try_sub(&cp.a_ext(l)?)?)?;
        }
        for l in n - j + 2..=n {
            v = v.try_mul(&Scalar::one().try_sub(&cp.b_ext(l)?)?)?;
        }
        for m in 0..k as i64 {
            for l in 1..=n + 1 {
                let p = if l <= n - j + 1 {
                    cp.q.powi(m + 1)?
                } else {
                    cp.q.powi(m)?
                };
                v = v.try_mul(&Scalar::one().try_sub(&p.try_mul(&cp.a_ext(l)?)?)?)?;
                let den = Scalar::one().try_sub(&p.try_mul(&cp.b_ext(l)?)?)?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero(format!("(b_{l};q)_{k} factor")));
                }
                v = v.try_div(&den, "(b_l;q)_k")?;
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Sums each component until the windowed geometric tail bound drops below
/// `tol`; the 5-ratio window guards against pre-asymptotic transients.
pub fn eval_x(cp: &CParams, tol: &BigReal) -> Result<HgVector> {
    let prec = tol.prec();
    let cp = cp.to_real(prec)?;
    let n = cp.order() as i64;
    let q = cp.q.to_real(prec)?;
    let c = cp.c.to_real(prec)?;
    let one = BigReal::one(prec);
    let qc = q.mul(&c);

    let mut vals = Vec::with_capacity(cp.order() + 1);
    let mut worst = TruncationReport {
        terms: 0,
        rho_hat: 0.0,
        bound: 0.0,
        converged: true,
    };
    for j in 1..=n + 1 {
        let mut pref = one.clone();
        for l in 1..=n - j + 1 {
            pref = pref.mul(&one.sub(&cp.a_ext(l)?.to_real(prec)?));
        }
        for l in n - j + 2..=n {
            pref = pref.mul(&one.sub(&cp.b_ext(l)?.to_real(prec)?));
        }
        // (value, true when the Pochhammer argument carries an extra q)
        let uppers: Vec<(BigReal, bool)> = (1..=n + 1)
            .map(|l| Ok((cp.a_ext(l)?.to_real(prec)?, l <= n - j + 1)))
            .collect::<Result<_>>()?;
        let lowers: Vec<(BigReal, bool)> = (1..=n + 1)
            .map(|l| Ok((cp.b_ext(l)?.to_real(prec)?, l <= n - j + 1)))
            .collect::<Result<_>>()?;

        let mut sum = BigReal::zero(prec);
        let mut term = one.clone();
        let mut qk = one.clone(); // q^k
        let ceil = BigReal::from_f64(RHO_CEIL, prec);
        let mut window: Vec<BigReal> = Vec::with_capacity(5);
        let mut done = false;
        for k in 0..MAX_TERMS {
            sum = sum.add(&term);
            // term_{k+1} / term_k
            let mut f = qc.clone();
            for (a, shifted) in &uppers {
                let p = if *shifted { qk.mul(&q) } else { qk.clone() };
                f = f.mul(&one.sub(&p.mul(a)));
            }
            for (b, shifted) in &lowers {
                let p = if *shifted { qk.mul(&q) } else { qk.clone() };
                let den = one.sub(&p.mul(b));
                if den.is_zero() {
                    return Err(Error::DivisionByZero(format!("(b;q) factor at k={k}")));
                }
                f = f.div(&den);
            }
            term = term.mul(&f);
            qk = qk.mul(&q);
            if window.len() == 5 {
                window.remove(0);
            }
            window.push(f.abs());
            let mut rho = BigReal::zero(prec);
            for r in &window {
                if r.compare(&rho) == std::cmp::Ordering::Greater {
                    rho = r.clone();
                }
            }
            if window.len() >= 5 && rho.compare(&ceil) == std::cmp::Ordering::Less {
                let bound = term.abs().mul(&rho).div(&one.sub(&rho));
                if bound.compare(tol) == std::cmp::Ordering::Less {
                    sum = sum.add(&term);
                    let rep = TruncationReport {
                        terms: k + 2,
                        rho_hat: rho.to_f64(),
                        bound: bound.to_f64(),
                        converged: true,
                    };
                    if rep.terms > worst.terms {
                        worst = rep;
                    }
                    done = true;
                    break;
                }
            }
        }
        if !done {
            return Err(Error::NonConvergent {
                terms: MAX_TERMS,
                bound: f64::NAN,
            });
        }
        vals.push(pref.mul(&sum));
    }
    Ok(HgVector { vals, trunc: worst })
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for head in 0..=total {
        for mut tail in compositions(total - head, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(head);
            v.append(&mut tail);
            out.push(v);
        }
    }
    out
}

/// The n-fold q-Lauricella sum, truncated by total-degree shells; the shell
/// bound is (lattice points on the next shell) x (max term on this shell)
/// x rho/(1-rho) with rho the windowed shell-decay ratio.
pub fn eval_y(cp: &CParams, tol: &BigReal) -> Result<HgVector> {
    let prec = tol.prec();
    let cp = cp.to_real(prec)?;
    let n = cp.order();
    let nn = n as i64;
    let q = cp.q.to_real(prec)?;
    let c = cp.c.to_real(prec)?;
    let one = BigReal::one(prec);

    for l in 1..=nn {
        if cp.a_ext(l)?.to_real(prec)?.abs().compare(&one) != std::cmp::Ordering::Less {
            return Err(Error::DomainError(
                "q-Lauricella sum needs |a_l| < 1".into(),
            ));
        }
    }

    let a: Vec<BigReal> = (1..=nn)
        .map(|l| cp.a_ext(l)?.to_real(prec))
        .collect::<Result<_>>()?;
    let b: Vec<BigReal> = (1..=nn)
        .map(|l| cp.b_ext(l)?.to_real(prec))
        .collect::<Result<_>>()?;
    let an1c = cp.a_ext(nn + 1)?.to_real(prec)?.mul(&c);

    // cumulative caches:
    // head[k] = (q c;q)_k / (q a_{n+1} c;q)_k
    // dee[l][k] = (b_l/a_l;q)_k / (q;q)_k * a_l^k
    // qpk[k] = q^k
    let mut head: Vec<BigReal> = vec![one.clone()];
    let mut dee: Vec<Vec<BigReal>> = vec![vec![one.clone()]; n];
    let mut qpk: Vec<BigReal> = vec![one.clone()];

    let mut sums = vec![BigReal::zero(prec); n + 1];
    let mut shell_mags: Vec<BigReal> = Vec::new();
    let mut report = TruncationReport {
        terms: 0,
        rho_hat: 0.0,
        bound: 0.0,
        converged: false,
    };
    let ceil = BigReal::from_f64(RHO_CEIL, prec);

    for shell in 0..MAX_TERMS {
        if shell > 0 {
            let k = shell - 1;
            let qk1 = qpk[k].mul(&q);
            let den = one.sub(&qk1.mul(&an1c));
            if den.is_zero() {
                return Err(Error::DivisionByZero("(q a_{n+1} c;q) factor".into()));
            }
            head.push(head[k].mul(&one.sub(&qk1.mul(&c))).div(&den));
            for (l, d) in dee.iter_mut().enumerate() {
                let num = one.sub(&qpk[k].mul(&b[l]).div(&a[l]));
                let den = one.sub(&qk1);
                let next = d[k].mul(&num).div(&den).mul(&a[l]);
                d.push(next);
            }
            qpk.push(qk1);
        }

        let mut mag = BigReal::zero(prec);
        for combo in compositions(shell, n) {
            let mut base = head[shell].clone();
            for (l, &kl) in combo.iter().enumerate() {
                base = base.mul(&dee[l][kl]);
            }
            for j in 1..=nn + 1 {
                // component j carries q^{k_l} for l <= n-j+1
                let qexp: usize = combo
                    .iter()
                    .enumerate()
                    .filter(|(l0, _)| (*l0 as i64 + 1) <= nn - j + 1)
                    .map(|(_, &kl)| kl)
                    .sum();
                let term = base.mul(&qpk[qexp.min(shell)]);
                sums[(j - 1) as usize] = sums[(j - 1) as usize].add(&term);
                let t = term.abs();
                if t.compare(&mag) == std::cmp::Ordering::Greater {
                    mag = t;
                }
            }
        }

        shell_mags.push(mag.clone());
        if shell_mags.len() >= 4 {
            let w = &shell_mags[shell_mags.len() - 3..];
            let mut rho = BigReal::zero(prec);
            for i in 1..w.len() {
                if !w[i - 1].is_zero() {
                    let r = w[i].div(&w[i - 1]);
                    if r.compare(&rho) == std::cmp::Ordering::Greater {
                        rho = r;
                    }
                }
            }
            let points = BigReal::from_i64(((shell + 2).pow(n as u32 - 1)).max(1) as i64, prec);
            if rho.compare(&ceil) == std::cmp::Ordering::Less {
                let bound = mag.mul(&points).mul(&rho).div(&one.sub(&rho));
                if bound.compare(tol) == std::cmp::Ordering::Less {
                    report = TruncationReport {
                        terms: shell + 1,
                        rho_hat: rho.to_f64(),
                        bound: bound.to_f64(),
                        converged: true,
                    };
                    break;
                }
            }
        }
    }
    if !report.converged {
        return Err(Error::NonConvergent {
            terms: MAX_TERMS,
            bound: f64::NAN,
        });
    }
    Ok(HgVector {
        vals: sums,
        trunc: report,
    })
}

fn poch_inf(a: &BigReal, q: &Scalar, tol: &BigReal) -> Result<BigReal> {
    let cfg = QPochConfig::new(q.clone(), tol.clone(), MAX_TERMS)?;
    Ok(qpoch_inf(a, &cfg)?.0)
}

/// Componentwise residual of the multi-sum/single-sum transformation:
/// y_j against the infinite-product prefactor times the x_j series part.
pub fn andrews_residual(cp: &CParams, tol: &BigReal) -> Result<BigReal> {
    let prec = tol.prec();
    let cp = cp.to_real(prec)?;
    let nn = cp.order() as i64;
    let one = BigReal::one(prec);
    let y = eval_y(&cp, tol)?;
    let x = eval_x(&cp, tol)?;
    let q = cp.q.to_real(prec)?;
    let c = cp.c.to_real(prec)?;
    let mut worst = BigReal::zero(prec);
    for j in 1..=nn + 1 {
        let mut num = poch_inf(&q.mul(&c), &cp.q, tol)?;
        for l in 1..=nn - j + 1 {
            num = num.mul(&poch_inf(&q.mul(&cp.b_ext(l)?.to_real(prec)?), &cp.q, tol)?);
        }
        for l in nn - j + 2..=nn {
            num = num.mul(&poch_inf(&cp.b_ext(l)?.to_real(prec)?, &cp.q, tol)?);
        }
        let mut den = poch_inf(
            &q.mul(&cp.a_ext(nn + 1)?.to_real(prec)?).mul(&c),
            &cp.q,
            tol,
        )?;
        for l in 1..=nn - j + 1 {
            den = den.mul(&poch_inf(&q.mul(&cp.a_ext(l)?.to_real(prec)?), &cp.q, tol)?);
        }
        for l in nn - j + 2..=nn {
            den = den.mul(&poch_inf(&cp.a_ext(l)?.to_real(prec)?, &cp.q, tol)?);
        }
        // series part of x_j = x_j / prefactor
        let mut pref = one.clone();
        for l in 1..=nn - j + 1 {
            pref = pref.mul(&one.sub(&cp.a_ext(l)?.to_real(prec)?));
        }
        for l in nn - j + 2..=nn {
            pref = pref.mul(&one.sub(&cp.b_ext(l)?.to_real(prec)?));
        }
        if pref.is_zero() {
            return Err(Error::DivisionByZero(
                "series prefactor (some a_l = 1)".into(),
            ));
        }
        let rhs = num.div(&den).mul(&x.vals[(j - 1) as usize]).div(&pref);
        let d = y.vals[(j - 1) as usize].sub(&rhs).abs();
        if d.compare(&worst) == std::cmp::Ordering::Greater {
            worst = d;
        }
    }
    Ok(worst)
}

/// Builds the q-Riccati phase point from x-ratios
/// (phi_{2j,0} = -x_{j+2}/x_{j+1}, phi_{2n,0} = -q c x_1/x_{n+1}),
/// steps it with the closed T-quotient flow, and compares against the same
/// ratios at the shifted parameters. Returns the max componentwise deviation.
pub fn riccati_residual(cp: &CParams, tol: &BigReal) -> Result<BigReal> {
    let prec = tol.prec();
    let cp = cp.to_real(prec)?;
    let n = cp.order();
    let state_from = |params: &CParams| -> Result<SpecialState> {
        let x = eval_x(params, tol)?;
        for v in &x.vals {
            if v.is_zero() {
                return Err(Error::DivisionByZero("a vanishing x component".into()));
            }
        }
        let mut even = Vec::with_capacity(n + 1);
        for j in 0..n {
            even.push(Scalar::Real(x.vals[j + 1].div(&x.vals[j]).neg()));
        }
        let qc = params.q.to_real(prec)?.mul(&params.c.to_real(prec)?);
        even.push(Scalar::Real(qc.mul(&x.vals[0]).div(&x.vals[n]).neg()));
        SpecialState::new(even, params.clone())
    };
    let s0 = state_from(&cp)?;
    // product constraint holds to series accuracy by construction
    let stepped = tau_c_step(&s0)?;
    let shifted = translation_on_cparams(DerivedGen::TauC, &cp)?;
    let s1 = state_from(&shifted)?;
    let mut worst = BigReal::zero(prec);
    for j in 0..=n as i64 {
        let d = stepped
            .even(j)
            .to_real(prec)?
            .sub(&s1.even(j).to_real(prec)?)
            .abs();
        if d.compare(&worst) == std::cmp::Ordering::Greater {
            worst = d;
        }
    }
    Ok(worst)
}

/// Exact verification of the coefficient recurrences behind the sigma'
/// system: x_0(sigma'(c)) = M_{sigma',0} x_0(c) and, for k = 1..kmax,
/// q^{-k} x_k(sigma'(c)) = q^{-k+1} x_{k-1}(sigma'(c))
///                        + M_{sigma',0} x_k(c) + M_{sigma',1} x_{k-1}(c).
pub fn sigma_prime_recurrences(cp: &CParams, kmax: usize) -> Result<()> {
    let (m0, m1) = sigma_prime_split(cp)?;
    let image = derived_params(DerivedGen::SigmaPrime, cp)?;
    let x0 = x_coeff(0, cp)?;
    let x0s = x_coeff(0, &image)?;
    if m0.matvec(&x0)? != x0s {
        return Err(Error::ConstraintViolated(
            "k = 0 coefficient identity".into(),
        ));
    }
    let mut xk_prev = x0;
    let mut xk_prev_img = x0s;
    for k in 1..=kmax {
        let xk = x_coeff(k, cp)?;
        let xk_img = x_coeff(k, &image)?;
        let qk = cp.q.powi(-(k as i64))?;
        let qk1 = cp.q.powi(-(k as i64) + 1)?;
        let lhs: Vec<Scalar> = xk_img
            .iter()
            .map(|v| v.try_mul(&qk))
            .collect::<Result<_>>()?;
        let t1: Vec<Scalar> = xk_prev_img
            .iter()
            .map(|v| v.try_mul(&qk1))
            .collect::<Result<_>>()?;
        let t2 = m0.matvec(&xk)?;
        let t3 = m1.matvec(&xk_prev)?;
        for r in 0..lhs.len() {
            let rhs = t1[r].try_add(&t2[r])?.try_add(&t3[r])?;
            if lhs[r] != rhs {
                return Err(Error::ConstraintViolated(format!(
                    "coefficient recurrence fails at k = {k}, row {r}"
                )));
            }
        }
        xk_prev = xk;
        xk_prev_img = xk_img;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{bits_for_digits, pow10_neg};
    use crate::specialization::sample_exact_cparams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::cmp::Ordering::Less;

    fn spec_sample_n1() -> CParams {
        CParams::new(
            1,
            vec![Scalar::from_ratio(1, 3), Scalar::from_ratio(1, 5)],
            vec![Scalar::from_ratio(1, 7), Scalar::from_ratio(1, 2)],
            Scalar::from_ratio(1, 4),
            Scalar::from_ratio(1, 2),
        )
        .unwrap()
    }

    #[test]
    fn x_coeff_k0() {
        let cp = spec_sample_n1();
        let x0 = x_coeff(0, &cp).unwrap();
        assert_eq!(x0[0], Scalar::one().try_sub(cp.a(1)).unwrap());
        assert_eq!(x0[1], Scalar::one().try_sub(cp.b(1)).unwrap());
    }

    #[test]
    fn x_coeff_balanced_parameters() {
        // a_l = b_l for all l: x_{k,j} = q^k prod (1 - a_l)
        let q = Scalar::from_ratio(1, 2);
        let vals = vec![Scalar::from_ratio(1, 3), q.clone()];
        let cp = CParams::new(1, vals.clone(), vals, Scalar::from_ratio(1, 4), q).unwrap();
        for k in 0..4usize {
            let xk = x_coeff(k, &cp).unwrap();
            let want =
                cp.q.powi(k as i64)
                    .unwrap()
                    .try_mul(&Scalar::one().try_sub(cp.a(1)).unwrap())
                    .unwrap();
            assert_eq!(xk[0], want);
            assert_eq!(xk[1], want);
        }
    }

    #[test]
    fn x_coeff_partial_sums_approach_eval_x() {
        // 200-term brute-force partial sums against the bounded evaluator
        let prec = bits_for_digits(60);
        let tol = pow10_neg(45, prec);
        let cp = spec_sample_n1();
        let x = eval_x(&cp, &tol).unwrap();
        let cp_num = cp.to_real(prec).unwrap();
        let mut acc = vec![BigReal::zero(prec); 2];
        let mut cpow = BigReal::one(prec);
        let c = cp.c.to_real(prec).unwrap();
        for k in 0..200usize {
            let xk = x_coeff(k, &cp_num).unwrap();
            for (j, v) in xk.iter().enumerate() {
                acc[j] = acc[j].add(&v.to_real(prec).unwrap().mul(&cpow));
            }
            cpow = cpow.mul(&c);
        }
        for (a, b) in acc.iter().zip(x.vals.iter()) {
            assert!(a.sub(b).abs().compare(&pow10_neg(45, prec)) == Less);
        }
    }

    #[test]
    fn eval_x_c_zero_and_geometric() {
        let prec = bits_for_digits(60);
        let tol = pow10_neg(45, prec);
        // c = 0 keeps only the k = 0 term
        let q = Scalar::from_ratio(1, 2);
        let cp = CParams::unchecked(
            1,
            vec![Scalar::from_ratio(1, 3), Scalar::from_ratio(1, 5)],
            vec![Scalar::from_ratio(1, 7), q.clone()],
            Scalar::zero(),
            q.clone(),
        )
        .unwrap();
        let x = eval_x(&cp, &tol).unwrap();
        let want0 = Scalar::one()
            .try_sub(cp.a(1))
            .unwrap()
            .to_real(prec)
            .unwrap();
        assert!(x.vals[0].sub(&want0).abs().compare(&tol) == Less);
        // a_l = b_l: x_j = prod(1-a_l)/(1 - q c)
        let vals = vec![Scalar::from_ratio(1, 3), q.clone()];
        let cp = CParams::new(1, vals.clone(), vals, Scalar::from_ratio(1, 4), q).unwrap();
        let x = eval_x(&cp, &tol).unwrap();
        let one = BigReal::one(prec);
        let want = Scalar::one()
            .try_sub(cp.a(1))
            .unwrap()
            .to_real(prec)
            .unwrap()
            .div(&one.sub(&Scalar::from_ratio(1, 8).to_real(prec).unwrap()));
        for v in &x.vals {
            assert!(v.sub(&want).abs().compare(&tol) == Less);
        }
    }

    #[test]
    fn eval_x_reference_values() {
        // frozen against a 600-term partial-sum evaluation at 100 digits
        let prec = bits_for_digits(60);
        let tol = pow10_neg(45, prec);
        let x = eval_x(&spec_sample_n1(), &tol).unwrap();
        let want1 = BigReal::from_f64(0.805_978_864_712_662_1, prec);
        let want2 = BigReal::from_f64(1.011_076_525_365_154_8, prec);
        assert!(x.vals[0].sub(&want1).abs().compare(&pow10_neg(15, prec)) == Less);
        assert!(x.vals[1].sub(&want2).abs().compare(&pow10_neg(15, prec)) == Less);
        assert!(x.trunc.converged);
        // term ratios approach q c = 1/8
        assert!((x.trunc.rho_hat - 0.125).abs() < 0.01);
    }

    #[test]
    fn precision_scaling_self_consistency() {
        let cp = spec_sample_n1();
        let p1 = bits_for_digits(60);
        let p2 = bits_for_digits(120);
        let x1 = eval_x(&cp, &pow10_neg(45, p1)).unwrap();
        let x2 = eval_x(&cp, &pow10_neg(90, p2)).unwrap();
        for (a, b) in x1.vals.iter().zip(x2.vals.iter()) {
            assert!(a.sub(b).abs().compare(&pow10_neg(44, p1)) == Less);
        }
    }

    #[test]
    fn eval_y_balanced_is_one() {
        // b_l = a_l for l <= n kills every k != 0 term
        let prec = bits_for_digits(60);
        let tol = pow10_neg(40, prec);
        let q = Scalar::from_ratio(1, 2);
        let cp = CParams::new(
            1,
            vec![Scalar::from_ratio(1, 3), Scalar::from_ratio(1, 5)],
            vec![Scalar::from_ratio(1, 3), q.clone()],
            Scalar::from_ratio(1, 4),
            q,
        )
        .unwrap();
        let y = eval_y(&cp, &tol).unwrap();
        let one = BigReal::one(prec);
        for v in &y.vals {
            assert!(v.sub(&one).abs().compare(&tol) == Less);
        }
    }

    #[test]
    fn eval_y_matches_direct_single_sum() {
        // n = 1: y_j = sum_k (qc;q)_k/(q a_2 c;q)_k (b_1/a_1;q)_k/(q;q)_k z^k
        // with z = q a_1 for j = 1 and z = a_1 for j = 2
        let prec = bits_for_digits(60);
        let tol = pow10_neg(40, prec);
        let cp = spec_sample_n1();
        let y = eval_y(&cp, &tol).unwrap();
        let q = cp.q.to_real(prec).unwrap();
        let c = cp.c.to_real(prec).unwrap();
        let one = BigReal::one(prec);
        for (j, z) in [
            cp.a(1).to_real(prec).unwrap().mul(&q),
            cp.a(1).to_real(prec).unwrap(),
        ]
        .iter()
        .enumerate()
        {
            let mut sum = BigReal::zero(prec);
            let mut head = one.clone();
            let mut dfac = one.clone();
            let mut zp = one.clone();
            let ba = cp
                .b(1)
                .to_real(prec)
                .unwrap()
                .div(&cp.a(1).to_real(prec).unwrap());
            let a2c = cp.a(2).to_real(prec).unwrap().mul(&c);
            for k in 0..200i64 {
                sum = sum.add(&head.mul(&dfac).mul(&zp));
                let qk1 = q.powi(k + 1);
                head = head
                    .mul(&one.sub(&qk1.mul(&c)))
                    .div(&one.sub(&qk1.mul(&a2c)));
                dfac = dfac.mul(&one.sub(&q.powi(k).mul(&ba))).div(&one.sub(&qk1));
                zp = zp.mul(z);
            }
            assert!(
                y.vals[j].sub(&sum).abs().compare(&pow10_neg(38, prec)) == Less,
                "j={j}"
            );
        }
    }

    #[test]
    fn andrews_small_samples() {
        let prec = bits_for_digits(60);
        let tol = pow10_neg(38, prec);
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for n in 1..=2usize {
            let cp = sample_exact_cparams(n, &mut rng).unwrap();
            let r = andrews_residual(&cp, &tol).unwrap();
            assert!(r.compare(&pow10_neg(30, prec)) == Less, "n={n} r={r}");
        }
    }

    #[test]
    fn riccati_solution_residual() {
        let prec = bits_for_digits(60);
        let tol = pow10_neg(45, prec);
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for n in 1..=2usize {
            let cp = sample_exact_cparams(n, &mut rng).unwrap();
            let r = riccati_residual(&cp, &tol).unwrap();
            assert!(r.compare(&pow10_neg(35, prec)) == Less, "n={n} r={r}");
        }
    }

    #[test]
    fn sigma_prime_recurrences_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for n in 1..=2usize {
            let cp = sample_exact_cparams(n, &mut rng).unwrap();
            sigma_prime_recurrences(&cp, 5).unwrap();
        }
    }
}
