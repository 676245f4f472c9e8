//! The higher-order q-Riccati step and the diagonal parameter actions of the
//! three translation families.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::specialization::{alphas_from_cparams, CParams, SpecialState};

use super::derived::DerivedGen;

/// T_j evaluated on a phase-space point. Index bookkeeping: all interior
/// factors carry the 2j shift,
///   T_j = prod_{l<n} alpha_{2j+2l+1} * prod_{l<=n} alpha_{2l}
///       + sum_{k=1}^{n} (-1)^k (1 - alpha_{2j+2k-1})
///             * prod_{l=k}^{n-1} alpha_{2j+2l+1}
///             * prod_{l=0}^{k-1} phi_{2j+2l,0}
///             * prod_{l=k}^{n} alpha_{2j+2l}
///       + (-1)^n prod_{l<=n} phi_{2l,0}.
pub fn t_poly(j: i64, s: &SpecialState) -> Result<Scalar> {
    let n = s.params.order() as i64;
    let alpha = alphas_from_cparams(&s.params)?;
    let m = alpha.len() as i64;
    let al = |k: i64| -> &Scalar { &alpha[(((k % m) + m) % m) as usize] };

    let mut first = Scalar::one();
    for l in 0..n {
        first = first.try_mul(al(2 * j + 2 * l + 1))?;
    }
    for l in 0..=n {
        first = first.try_mul(al(2 * l))?;
    }
    let mut total = first;

    for k in 1..=n {
        let mut term = Scalar::one().try_sub(al(2 * j + 2 * k - 1))?;
        if k % 2 == 1 {
            term = term.neg();
        }
        for l in k..n {
            term = term.try_mul(al(2 * j + 2 * l + 1))?;
        }
        for l in 0..k {
            term = term.try_mul(s.even(j + l))?;
        }
        for l in k..=n {
            term = term.try_mul(al(2 * j + 2 * l))?;
        }
        total = total.try_add(&term)?;
    }

    let mut last = Scalar::one();
    for l in 0..=n {
        last = last.try_mul(s.even(l))?;
    }
    if n % 2 == 1 {
        last = last.neg();
    }
    total.try_add(&last)
}

/// One step of the q-Riccati flow:
/// phi_{2j,0} -> phi_{2j,0} T_{j+1} / (alpha_{2j-1} alpha_{2j} T_j),
/// with c -> c/q on the parameters.
pub fn tau_c_step(s: &SpecialState) -> Result<SpecialState> {
    let n = s.params.order() as i64;
    let alpha = alphas_from_cparams(&s.params)?;
    let m = alpha.len() as i64;
    let al = |k: i64| -> &Scalar { &alpha[(((k % m) + m) % m) as usize] };

    let t: Vec<Scalar> = (0..=n + 1).map(|j| t_poly(j, s)).collect::<Result<_>>()?;
    let mut even = Vec::with_capacity(s.even.len());
    for j in 0..=n {
        let tj = &t[j as usize];
        if tj.is_zero() {
            return Err(Error::DivisionByZero(format!("T_{j}")));
        }
        let den = al(2 * j - 1).try_mul(al(2 * j))?.try_mul(tj)?;
        even.push(
            s.even(j)
                .try_mul(&t[(j + 1) as usize])?
                .try_div(&den, "alpha alpha T_j")?,
        );
    }
    let params = translation_on_cparams(DerivedGen::TauC, &s.params)?;
    Ok(SpecialState { even, params })
}

/// Diagonal q-shift actions:
/// tau_c fixes (a, b) and sends c -> c/q;
/// tau_i sends a_k -> q^{-delta_{ik}} a_k;
/// tau_{i,j} sends a_k -> q^{delta_{j,n+1} - delta_{ik}} a_k and
/// b_k -> q^{delta_{j,n+1} - delta_{jk}} b_k.
pub fn translation_on_cparams(t: DerivedGen, cp: &CParams) -> Result<CParams> {
    let nn = cp.order() as i64;
    let a: Vec<Scalar> = (1..=nn + 1).map(|k| cp.a_ext(k)).collect::<Result<_>>()?;
    let b: Vec<Scalar> = (1..=nn + 1).map(|k| cp.b_ext(k)).collect::<Result<_>>()?;
    match t {
        DerivedGen::TauC => {
            let c = cp.c.try_div(&cp.q, "q")?;
            Ok(cp.with_values(a, b, c))
        }
        DerivedGen::TauI(i) => {
            if i < 1 || i > nn + 1 {
                return Err(Error::ConfigError(format!(
                    "tau_i index {i} out of 1..=n+1"
                )));
            }
            let a = a
                .into_iter()
                .enumerate()
                .map(|(k0, v)| {
                    if k0 as i64 + 1 == i {
                        v.try_div(&cp.q, "q")
                    } else {
                        Ok(v)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(cp.with_values(a, b, cp.c.clone()))
        }
        DerivedGen::TauIJ(i, j) => {
            if !(1..=nn + 1).contains(&i) || !(1..=nn + 1).contains(&j) {
                return Err(Error::ConfigError(format!(
                    "tau_ij indices ({i},{j}) out of range"
                )));
            }
            let boost = j == nn + 1;
            let a = a
                .into_iter()
                .enumerate()
                .map(|(k0, mut v)| {
                    if boost {
                        v = v.try_mul(&cp.q)?;
                    }
                    if k0 as i64 + 1 == i {
                        v = v.try_div(&cp.q, "q")?;
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            let b = b
                .into_iter()
                .enumerate()
                .map(|(k0, mut v)| {
                    if boost {
                        v = v.try_mul(&cp.q)?;
                    }
                    if k0 as i64 + 1 == j {
                        v = v.try_div(&cp.q, "q")?;
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(cp.with_values(a, b, cp.c.clone()))
        }
        other => Err(Error::ConfigError(format!(
            "{other:?} is not a translation"
        ))),
    }
}
