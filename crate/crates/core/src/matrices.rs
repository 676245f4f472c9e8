//! The (n+1)x(n+1) matrices attached to the derived generators, the cocycle
//! composition rule, translation matrices, and the residual checkers for the
//! linear q-difference systems they satisfy.
//!
//! Cocycle convention: for a word [t1, ..., tk] the matrix is accumulated as
//! M := gen(t, params) * M with params advanced by each token, so that
//! x(params_after_word) = M * x(params).

use crate::error::{Error, Result};
use crate::qhyper::{eval_x, HgVector};
use crate::scalar::{log_base_q, BigReal, Scalar};
use crate::specialization::{
    derived_params, derived_params_inv, translation_on_cparams, CParams, DerivedGen,
};

/// Dense square matrix of scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat(pub Vec<Vec<Scalar>>);

impl Mat {
    pub fn zero(dim: usize) -> Self {
        Mat(vec![vec![Scalar::zero(); dim]; dim])
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for j in 0..dim {
            m.0[j][j] = Scalar::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// 1-based entry accessors matching the E_{j1,j2} basis convention.
    pub fn set(&mut self, j1: usize, j2: usize, v: Scalar) {
        self.0[j1 - 1][j2 - 1] = v;
    }

    pub fn get(&self, j1: usize, j2: usize) -> &Scalar {
        &self.0[j1 - 1][j2 - 1]
    }

    pub fn mul(&self, rhs: &Mat) -> Result<Mat> {
        let d = self.dim();
        let mut out = Mat::zero(d);
        for r in 0..d {
            for c in 0..d {
                let mut acc = Scalar::zero();
                for k in 0..d {
                    acc = acc.try_add(&self.0[r][k].try_mul(&rhs.0[k][c])?)?;
                }
                out.0[r][c] = acc;
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let mut out = Vec::with_capacity(self.dim());
        for row in &self.0 {
            let mut acc = Scalar::zero();
            for (e, x) in row.iter().zip(v) {
                acc = acc.try_add(&e.try_mul(x)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Result<Mat> {
        let mut out = self.clone();
        for row in &mut out.0 {
            for e in row {
                *e = e.try_mul(s)?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Mat) -> Result<Mat> {
        let mut out = self.clone();
        for (r, row) in out.0.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = e.try_sub(&rhs.0[r][c])?;
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan inverse; also returns the determinant.
    pub fn inverse(&self) -> Result<(Mat, Scalar)> {
        let d = self.dim();
        let mut a = self.clone();
        let mut inv = Mat::identity(d);
        let mut det = Scalar::one();
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| !a.0[r][col].is_zero())
                .ok_or_else(|| Error::DivisionByZero("singular matrix".into()))?;
            if pivot != col {
                a.0.swap(pivot, col);
                inv.0.swap(pivot, col);
                det = det.neg();
            }
            let p = a.0[col][col].clone();
            det = det.try_mul(&p)?;
            for c in 0..d {
                a.0[col][c] = a.0[col][c].try_div(&p, "pivot")?;
                inv.0[col][c] = inv.0[col][c].try_div(&p, "pivot")?;
            }
            for r in 0..d {
                if r == col || a.0[r][col].is_zero() {
                    continue;
                }
                let f = a.0[r][col].clone();
                for c in 0..d {
                    a.0[r][c] = a.0[r][c].try_sub(&f.try_mul(&a.0[col][c])?)?;
                    inv.0[r][c] = inv.0[r][c].try_sub(&f.try_mul(&inv.0[col][c])?)?;
                }
            }
        }
        Ok((inv, det))
    }

    /// Max-abs entry, numeric backend.
    pub fn inf_norm(&self, prec: usize) -> Result<BigReal> {
        let mut best = BigReal::zero(prec);
        for row in &self.0 {
            for e in row {
                let v = e.to_real(prec)?.abs();
                if v.compare(&best) == std::cmp::Ordering::Greater {
                    best = v;
                }
            }
        }
        Ok(best)
    }
}

pub fn vec_inf_norm(v: &[Scalar], prec: usize) -> Result<BigReal> {
    let mut best = BigReal::zero(prec);
    for e in v {
        let x = e.to_real(prec)?.abs();
        if x.compare(&best) == std::cmp::Ordering::Greater {
            best = x;
        }
    }
    Ok(best)
}

/// A generator matrix c^gamma * core, with the prefactor exponent kept
/// separate from the rational core.
#[derive(Clone, Debug)]
pub struct QMatrix {
    pub gamma: Scalar,
    pub core: Mat,
    pub params: CParams,
}

impl QMatrix {
    /// Materializes c^gamma * core (identity on the core when gamma = 0).
    pub fn value(&self) -> Result<Mat> {
        if self.gamma.is_zero() {
            return Ok(self.core.clone());
        }
        let gamma = self
            .gamma
            .as_real()
            .ok_or_else(|| Error::DomainError("prefactor exponent must be numeric".into()))?;
        let c = self.params.c.to_real(gamma.prec())?;
        let pref = Scalar::Real(c.pow(gamma)?);
        self.core.scale(&pref)
    }
}

fn div_checked(num: Scalar, den: Scalar, what: &str) -> Result<Scalar> {
    if den.is_zero() {
        return Err(Error::DivisionByZero(what.to_string()));
    }
    num.try_div(&den, what)
}

/// Prefactor-free core of a generator matrix; exact over rational inputs.
/// Only p'_0..p'_n and pi_1 are needed in stripped form.
pub fn tilde_matrix(g: DerivedGen, cp: &CParams) -> Result<Mat> {
    let n = cp.order();
    let nn = n as i64;
    let dim = n + 1;
    let mut m = Mat::zero(dim);
    match g {
        DerivedGen::PPrime(i0) => {
            let i = ((i0 % (nn + 1)) + nn + 1) % (nn + 1);
            if i == 0 {
                for j in 1..=n {
                    m.set(j, j, Scalar::one());
                }
                let d = cp.b_ext(1)?.try_sub(&cp.a_ext(1)?)?;
                m.set(
                    dim,
                    dim,
                    div_checked(cp.b_ext(0)?.try_sub(&cp.a_ext(1)?)?, d.clone(), "b_1 - a_1")?,
                );
                m.set(
                    dim,
                    dim - 1,
                    div_checked(cp.b_ext(1)?.try_sub(&cp.b_ext(0)?)?, d, "b_1 - a_1")?,
                );
            } else if i == nn {
                let d = cp.b_ext(nn + 1)?.try_sub(&cp.a_ext(nn + 1)?)?;
                m.set(
                    1,
                    1,
                    div_checked(
                        cp.b_ext(nn)?.try_sub(&cp.a_ext(nn + 1)?)?,
                        d.clone(),
                        "b_{n+1} - a_{n+1}",
                    )?,
                );
                for j in 2..=dim {
                    m.set(j, j, Scalar::one());
                }
                let qc = cp.q.try_mul(&cp.c)?;
                m.set(
                    1,
                    dim,
                    div_checked(
                        cp.b_ext(nn + 1)?.try_sub(&cp.b_ext(nn)?)?,
                        d,
                        "b_{n+1} - a_{n+1}",
                    )?
                    .try_div(&qc, "q c")?,
                );
            } else {
                let iu = i as usize;
                for j in 1..=n - iu {
                    m.set(j, j, Scalar::one());
                }
                let d = cp.b_ext(i + 1)?.try_sub(&cp.a_ext(i + 1)?)?;
                m.set(
                    n - iu + 1,
                    n - iu + 1,
                    div_checked(
                        cp.b_ext(i)?.try_sub(&cp.a_ext(i + 1)?)?,
                        d.clone(),
                        "b_{i+1} - a_{i+1}",
                    )?,
                );
                for j in n - iu + 2..=dim {
                    m.set(j, j, Scalar::one());
                }
                m.set(
                    n - iu + 1,
                    n - iu,
                    div_checked(
                        cp.b_ext(i + 1)?.try_sub(&cp.b_ext(i)?)?,
                        d,
                        "b_{i+1} - a_{i+1}",
                    )?,
                );
            }
        }
        DerivedGen::Pi1 => {
            for j in 1..=n {
                m.set(j, j + 1, Scalar::one());
            }
            m.set(dim, 1, cp.q.try_mul(&cp.c)?);
        }
        other => {
            return Err(Error::ConfigError(format!(
                "{other:?} has no stripped form"
            )));
        }
    }
    Ok(m)
}

/// Numeric prefactor exponent log_q(base).
fn gamma_of(base: &Scalar, cp: &CParams) -> Result<Scalar> {
    let q = cp
        .q
        .as_real()
        .ok_or_else(|| Error::DomainError("prefactor exponent needs the numeric backend".into()))?;
    Ok(Scalar::Real(log_base_q(&base.to_real(q.prec())?, q)?))
}

/// Builds the matrix attached to a single derived generator at `cp`, with
/// the c^gamma prefactor exponent recorded separately. Translation tokens
/// yield their composite matrix with gamma = 0.
pub fn gen_matrix(g: DerivedGen, cp: &CParams) -> Result<QMatrix> {
    let n = cp.order();
    let nn = n as i64;
    let dim = n + 1;
    let mut core = Mat::zero(dim);
    let mut gamma = Scalar::zero();
    match g {
        DerivedGen::P(i0) => {
            let i = ((i0 % (nn + 1)) + nn + 1) % (nn + 1);
            if i == 0 {
                let d = cp.a_ext(1)?.try_sub(&cp.b_ext(0)?)?;
                let diag =
                    div_checked(cp.a_ext(0)?.try_sub(&cp.b_ext(0)?)?, d.clone(), "a_1 - b_0")?;
                for j in 1..=n {
                    core.set(j, j, diag.clone());
                }
                core.set(dim, dim, Scalar::one());
                let qc = cp.q.try_mul(&cp.c)?;
                let corner = div_checked(cp.a_ext(0)?.try_sub(&cp.a_ext(1)?)?, d, "a_1 - b_0")?
                    .try_mul(&qc)?;
                core.set(dim, 1, core.get(dim, 1).try_add(&corner)?);
            } else {
                let iu = i as usize;
                for j in 1..=n - iu {
                    core.set(j, j, Scalar::one());
                }
                let d = cp.a_ext(i)?.try_sub(&cp.b_ext(i)?)?;
                core.set(
                    n - iu + 1,
                    n - iu + 1,
                    div_checked(
                        cp.a_ext(i + 1)?.try_sub(&cp.b_ext(i)?)?,
                        d.clone(),
                        "a_i - b_i",
                    )?,
                );
                for j in n - iu + 2..=dim {
                    core.set(j, j, Scalar::one());
                }
                core.set(
                    n - iu + 1,
                    n - iu + 2,
                    div_checked(cp.a_ext(i)?.try_sub(&cp.a_ext(i + 1)?)?, d, "a_i - b_i")?,
                );
            }
        }
        DerivedGen::PPrime(i0) => {
            let i = ((i0 % (nn + 1)) + nn + 1) % (nn + 1);
            core = tilde_matrix(DerivedGen::PPrime(i), cp)?;
            if i == 0 {
                gamma = gamma_of(&cp.b_ext(1)?, cp)?;
            } else if i == nn {
                gamma = gamma_of(&cp.b_ext(nn)?.try_div(&cp.q, "q")?, cp)?;
            }
        }
        DerivedGen::Sigma => {
            let a0b0 = cp.a_ext(0)?.try_sub(&cp.b_ext(0)?)?;
            for j in 1..=dim {
                let jj = nn - j as i64 + 1;
                let d = cp.a_ext(jj)?.try_sub(&cp.b_ext(jj)?)?;
                core.set(
                    j,
                    j,
                    div_checked(
                        cp.b_ext(jj)?.try_mul(&a0b0)?,
                        d.clone(),
                        "a_{n-j+1} - b_{n-j+1}",
                    )?,
                );
                if j <= n {
                    core.set(
                        j,
                        j + 1,
                        div_checked(cp.a_ext(jj)?.try_mul(&a0b0)?, d, "a_{n-j+1} - b_{n-j+1}")?
                            .neg(),
                    );
                }
            }
            let corner = cp.a_ext(nn + 1)?.try_mul(&cp.c)?.neg();
            core.set(dim, 1, core.get(dim, 1).try_add(&corner)?);
        }
        DerivedGen::SigmaPrime => {
            let d = cp.a_ext(1)?.try_sub(&cp.b_ext(0)?)?;
            let omc = Scalar::one().try_sub(&cp.c)?;
            if d.is_zero() || omc.is_zero() {
                return Err(Error::DivisionByZero("(a_1 - b_0)(1 - c)".into()));
            }
            for j1 in 1..=dim {
                for j2 in 1..=dim {
                    let jj = nn - j2 as i64 + 2;
                    let mut v = cp
                        .a_ext(jj)?
                        .try_sub(&cp.b_ext(jj - 1)?)?
                        .try_div(&d, "a_1 - b_0")?
                        .try_div(&omc, "1 - c")?;
                    if j2 < j1 {
                        v = v.try_mul(&cp.c)?;
                    }
                    core.set(j1, j2, v);
                }
            }
        }
        DerivedGen::Pi1 => {
            core = tilde_matrix(DerivedGen::Pi1, cp)?;
            gamma = gamma_of(&cp.b_ext(nn)?.try_div(&cp.q, "q")?, cp)?;
        }
        DerivedGen::Pi2 => {
            gamma = gamma_of(&cp.q.try_mul(&cp.a_ext(nn - 1)?)?, cp)?;
            core.set(1, 2, Scalar::one());
            core.set(2, 1, cp.b_ext(nn)?.try_div(&cp.a_ext(nn)?, "a_n")?);
            for j in 3..=dim {
                let mut f = cp
                    .b_ext(nn)?
                    .try_div(&cp.a_ext(nn)?.try_mul(&cp.a_ext(nn + 1)?)?, "a_n a_{n+1}")?;
                for l in 1..=(j as i64 - 3) {
                    f = f.try_mul(&cp.b_ext(l)?)?.try_div(&cp.a_ext(l)?, "a_l")?;
                }
                f = f.try_div(&cp.c, "c")?;
                core.set(j, dim + 3 - j, f);
            }
        }
        DerivedGen::TauC => {
            let omc = Scalar::one().try_sub(&cp.c)?;
            if omc.is_zero() {
                return Err(Error::DivisionByZero("1 - c".into()));
            }
            for j1 in 1..=dim {
                for j2 in 1..=dim {
                    let jj = nn - j2 as i64 + 1;
                    let v = if j1 == j2 {
                        cp.b_ext(jj)?.try_sub(&cp.a_ext(jj + 1)?.try_mul(&cp.c)?)?
                    } else {
                        let base = cp.b_ext(jj)?.try_sub(&cp.a_ext(jj + 1)?)?;
                        if j2 < j1 {
                            base.try_mul(&cp.c)?
                        } else {
                            base
                        }
                    };
                    core.set(j1, j2, v.try_div(&omc, "1 - c")?);
                }
            }
        }
        DerivedGen::TauI(i) => {
            let (m, _) = tau_i_matrix(i, cp)?;
            core = m;
        }
        DerivedGen::TauIJ(i, j) => {
            let (m, _) = tau_ij_matrix(i, j, cp)?;
            core = m;
        }
    }
    Ok(QMatrix {
        gamma,
        core,
        params: cp.clone(),
    })
}

/// Rebuilds the matrix of `target` at the parameter image g(cp).
pub fn act_on_matrix(g: DerivedGen, target: DerivedGen, cp: &CParams) -> Result<QMatrix> {
    gen_matrix(target, &derived_params(g, cp)?)
}

/// Cocycle product along a word of derived generators; returns the
/// materialized matrix and the end of the parameter orbit.
///
/// Experimental for mixed words: the linear system x(w(c)) = M_w x(c) is
/// asserted by the suites only for words in <p_0..p_n, p'_1..p'_{n-1}> and
/// sigma, sigma'; the product itself is defined for any word.
pub fn word_matrix(word: &[DerivedGen], cp: &CParams) -> Result<(Mat, CParams)> {
    let mut m = Mat::identity(cp.order() + 1);
    let mut cur = cp.clone();
    for (step, &g) in word.iter().enumerate() {
        let qm = gen_matrix(g, &cur).map_err(|e| match e {
            Error::DivisionByZero(w) => Error::DivisionByZero(format!("{w} at word step {step}")),
            other => other,
        })?;
        m = qm.value()?.mul(&m)?;
        cur = derived_params(g, &cur)?;
    }
    Ok((m, cur))
}

/// M_{tau_i} as the ordered product p_i..p_{i+n-1}(M_sigma) x ... x M_{p_i}.
pub fn tau_i_matrix(i: i64, cp: &CParams) -> Result<(Mat, CParams)> {
    let n = cp.order() as i64;
    let mut word: Vec<DerivedGen> = (0..n).map(|k| DerivedGen::P(i + k)).collect();
    word.push(DerivedGen::Sigma);
    word_matrix(&word, cp)
}

/// The normalization scalar Delta_{i,j}.
pub fn delta_ij(i: i64, j: i64, cp: &CParams) -> Result<Scalar> {
    let n = cp.order() as i64;
    let one = Scalar::one();
    if j != n + 1 {
        let num = one.try_sub(&cp.b_ext(j)?)?;
        let den = if i == 1 {
            one.try_sub(&cp.a_ext(1)?.try_div(&cp.q, "q")?)?
        } else {
            one.try_sub(&cp.a_ext(1)?)?
        };
        return div_checked(num, den, "Delta denominator");
    }
    let mut prod = cp.q.clone();
    for l in 1..=n {
        let num = one.try_sub(&cp.a_ext(l + 1)?)?;
        let den = one.try_sub(&cp.q.try_mul(&cp.b_ext(l)?)?)?;
        prod = prod.try_mul(&div_checked(num, den, "1 - q b_l")?)?;
    }
    if i != 1 {
        let num = one.try_sub(&cp.a_ext(i)?.try_div(&cp.q, "q")?)?;
        let den = one.try_sub(&cp.a_ext(i)?)?;
        prod = prod.try_mul(&div_checked(num, den, "1 - a_i")?)?;
    }
    Ok(prod)
}

/// M_{tau_{i,j}}: the ordered word product divided by Delta_{i,j}.
pub fn tau_ij_matrix(i: i64, j: i64, cp: &CParams) -> Result<(Mat, CParams)> {
    let n = cp.order() as i64;
    if !(1..=n + 1).contains(&i) || !(1..=n + 1).contains(&j) {
        return Err(Error::ConfigError(format!(
            "tau_ij indices ({i},{j}) out of range"
        )));
    }
    let mut word: Vec<DerivedGen> = (0..n).map(|k| DerivedGen::P(i + k)).collect();
    for k in j..=n {
        word.push(DerivedGen::PPrime(k));
    }
    word.push(DerivedGen::Pi1);
    for k in 1..j {
        word.push(DerivedGen::PPrime(k));
    }
    let (m, end) = word_matrix(&word, cp)?;
    let delta = delta_ij(i, j, cp)?;
    if delta.is_zero() {
        return Err(Error::DivisionByZero("Delta_{i,j}".into()));
    }
    Ok((m.scale(&delta.inv("Delta_{i,j}")?)?, end))
}

/// ||x(end) - M x(cp)||_inf / ||x(cp)||_inf for the word's parameter orbit.
pub fn solution_residual(word: &[DerivedGen], cp: &CParams, tol: &BigReal) -> Result<BigReal> {
    let (m, end) = word_matrix(word, cp)?;
    residual_against(&m, &end, cp, tol)
}

fn residual_against(m: &Mat, end: &CParams, cp: &CParams, tol: &BigReal) -> Result<BigReal> {
    let prec = tol.prec();
    let x0 = eval_x(cp, tol)?;
    let x1 = eval_x(end, tol)?;
    let x0s: Vec<Scalar> = x0.vals.iter().cloned().map(Scalar::Real).collect();
    let mx = m.matvec(&x0s)?;
    let mut worst = BigReal::zero(prec);
    for (got, want) in mx.iter().zip(x1.vals.iter()) {
        let d = got.to_real(prec)?.sub(want).abs();
        if d.compare(&worst) == std::cmp::Ordering::Greater {
            worst = d;
        }
    }
    Ok(worst.div(&vec_inf_norm(&x0s, prec)?))
}

/// tau_{i,j} residual with the matrix built through the Delta-normalized
/// product.
pub fn tau_ij_residual(i: i64, j: i64, cp: &CParams, tol: &BigReal) -> Result<BigReal> {
    let (m, end) = tau_ij_matrix(i, j, cp)?;
    residual_against(&m, &end, cp, tol)
}

/// Second solution z(c) = g^{-1}(M_g) x(g^{-1}(c)) for g in
/// {p'_0, p'_n, pi_1, pi_2}: checks z solves the same linear system as x and
/// measures non-proportionality against x.
pub fn second_solution(
    g: DerivedGen,
    cp: &CParams,
    tol: &BigReal,
) -> Result<(HgVector, BigReal, BigReal)> {
    let n = cp.order() as i64;
    let prec = tol.prec();
    if let DerivedGen::Pi2 = g {
        // stated convergence condition |b_1...b_n| < |a_1...a_{n+1}|
        let mut pb = Scalar::one();
        for l in 1..=n {
            pb = pb.try_mul(&cp.b_ext(l)?)?;
        }
        let mut pa = Scalar::one();
        for l in 1..=n + 1 {
            pa = pa.try_mul(&cp.a_ext(l)?)?;
        }
        if pb.to_real(prec)?.abs().compare(&pa.to_real(prec)?.abs()) != std::cmp::Ordering::Less {
            return Err(Error::DomainError(
                "pi_2 second solution needs |b_1..b_n| < |a_1..a_{n+1}|".into(),
            ));
        }
    }

    let z_at = |params: &CParams| -> Result<Vec<Scalar>> {
        let inv = derived_params_inv(g, params)?;
        let qm = gen_matrix(g, &inv)?;
        let x = eval_x(&inv, tol)?;
        qm.value()?
            .matvec(&x.vals.into_iter().map(Scalar::Real).collect::<Vec<_>>())
    };

    let z0 = z_at(cp)?;
    let shifted = translation_on_cparams(DerivedGen::TauC, cp)?;
    let z1 = z_at(&shifted)?;
    let mtc = gen_matrix(DerivedGen::TauC, cp)?.value()?;
    let mz = mtc.matvec(&z0)?;
    let mut worst = BigReal::zero(prec);
    for (got, want) in mz.iter().zip(z1.iter()) {
        let d = got.to_real(prec)?.sub(&want.to_real(prec)?).abs();
        if d.compare(&worst) == std::cmp::Ordering::Greater {
            worst = d;
        }
    }
    let residual = worst.div(&vec_inf_norm(&z0, prec)?);

    let x0 = eval_x(cp, tol)?;
    let ratios: Vec<BigReal> = z0
        .iter()
        .zip(x0.vals.iter())
        .map(|(z, x)| Ok(z.to_real(prec)?.div(x)))
        .collect::<Result<_>>()?;
    let mut gap = BigReal::zero(prec);
    for a in &ratios {
        for b in &ratios {
            let d = a.sub(b).abs();
            if d.compare(&gap) == std::cmp::Ordering::Greater {
                gap = d;
            }
        }
    }
    let z_vec = HgVector {
        vals: z0.iter().map(|v| v.to_real(prec)).collect::<Result<_>>()?,
        trunc: x0.trunc,
    };
    Ok((z_vec, residual, gap))
}

/// Residual of x(p'_n pi_1(c)) = (1-a_0)/(1-b_n) p'_n(M_{pi_1}) M_{p'_n} x(c).
pub fn lemma_pn_pi1_residual(cp: &CParams, tol: &BigReal) -> Result<BigReal> {
    let n = cp.order() as i64;
    let prec = tol.prec();
    let (m, end) = word_matrix(&[DerivedGen::PPrime(n), DerivedGen::Pi1], cp)?;
    let one = Scalar::one();
    let factor = one
        .try_sub(&cp.a_ext(0)?)?
        .try_div(&one.try_sub(&cp.b_ext(n)?)?, "1 - b_n")?;
    let x0 = eval_x(cp, tol)?;
    let x1 = eval_x(&end, tol)?;
    let x0s: Vec<Scalar> = x0.vals.iter().cloned().map(Scalar::Real).collect();
    let mx = m.scale(&factor)?.matvec(&x0s)?;
    let mut worst = BigReal::zero(prec);
    for (got, want) in mx.iter().zip(x1.vals.iter()) {
        let d = got.to_real(prec)?.sub(want).abs();
        if d.compare(&worst) == std::cmp::Ordering::Greater {
            worst = d;
        }
    }
    Ok(worst.div(&vec_inf_norm(&x0s, prec)?))
}

/// The three exact prefactor-stripped identity families: p'_i-inverses, the
/// (n+1)-st power of the stripped pi_1 matrix, and the braid-type exchange
/// with pi_1. All over exact rationals.
pub fn tilde_identities(cp: &CParams) -> Result<()> {
    let n = cp.order();
    let nn = n as i64;
    let dim = n + 1;
    let id = Mat::identity(dim);
    for i in 0..=nn {
        let m = tilde_matrix(DerivedGen::PPrime(i), cp)?;
        let at = derived_params(DerivedGen::PPrime(i), cp)?;
        let m_img = tilde_matrix(DerivedGen::PPrime(i), &at)?;
        if m_img.mul(&m)? != id {
            return Err(Error::ConstraintViolated(format!(
                "p'_{i}(tilde M) tilde M != I"
            )));
        }
    }
    let mp = tilde_matrix(DerivedGen::Pi1, cp)?;
    let mut pw = Mat::identity(dim);
    for _ in 0..dim {
        pw = mp.mul(&pw)?;
    }
    let qc = cp.q.try_mul(&cp.c)?;
    if pw != id.scale(&qc)? {
        return Err(Error::ConstraintViolated(
            "tilde M_{pi_1}^{n+1} != q c I".into(),
        ));
    }
    let pi1_params = derived_params(DerivedGen::Pi1, cp)?;
    for i in 0..=nn {
        let lhs = mp.mul(&tilde_matrix(DerivedGen::PPrime(i), cp)?)?;
        let rhs = tilde_matrix(DerivedGen::PPrime(i + 1), &pi1_params)?.mul(&mp)?;
        if lhs != rhs {
            return Err(Error::ConstraintViolated(format!(
                "tilde braid identity fails at i = {i}"
            )));
        }
    }
    Ok(())
}

/// Relative matrix-norm residual of the proof-level identity
/// tau_c^{-1}(M_{tau_c}^{-1}) = tau_c^{-1}(M_{pi_2}^{-1}) pi_2(M_{tau_c}) M_{pi_2}.
pub fn pi2_proof_identity_residual(cp: &CParams, tol: &BigReal) -> Result<BigReal> {
    let prec = tol.prec();
    let back = derived_params_inv(DerivedGen::TauC, cp)?;
    let lhs = gen_matrix(DerivedGen::TauC, &back)?.value()?.inverse()?.0;
    let m_pi2_back = gen_matrix(DerivedGen::Pi2, &back)?.value()?.inverse()?.0;
    let m_tc_img = gen_matrix(DerivedGen::TauC, &derived_params(DerivedGen::Pi2, cp)?)?.value()?;
    let m_pi2 = gen_matrix(DerivedGen::Pi2, cp)?.value()?;
    let rhs = m_pi2_back.mul(&m_tc_img)?.mul(&m_pi2)?;
    Ok(lhs.sub(&rhs)?.inf_norm(prec)?.div(&lhs.inf_norm(prec)?))
}

/// (M_{sigma',0}, M_{sigma',1}) with (1-c) M_{sigma'} = M_0 + c M_1; exact
/// over rational parameters.
pub fn sigma_prime_split(cp: &CParams) -> Result<(Mat, Mat)> {
    let n = cp.order();
    let nn = n as i64;
    let dim = n + 1;
    let d = cp.a_ext(1)?.try_sub(&cp.b_ext(0)?)?;
    if d.is_zero() {
        return Err(Error::DivisionByZero("a_1 - b_0".into()));
    }
    let mut m0 = Mat::zero(dim);
    let mut m1 = Mat::zero(dim);
    for j1 in 1..=dim {
        for j2 in 1..=dim {
            let jj = nn - j2 as i64 + 2;
            let v = cp
                .a_ext(jj)?
                .try_sub(&cp.b_ext(jj - 1)?)?
                .try_div(&d, "a_1 - b_0")?;
            if j2 >= j1 {
                m0.set(j1, j2, v);
            } else {
                m1.set(j1, j2, v);
            }
        }
    }
    Ok((m0, m1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::bits_for_digits;
    use crate::specialization::sample_exact_cparams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real_params(n: usize, seed: u64, prec: usize) -> CParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample_exact_cparams(n, &mut rng)
            .unwrap()
            .to_real(prec)
            .unwrap()
    }

    #[test]
    fn tau_c_core_n1() {
        // (1-c) core = [[b_1 - a_2 c, 1 - a_1], [(b_1 - a_2) c, 1 - a_1 c]]
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let cp = sample_exact_cparams(1, &mut rng).unwrap();
        let m = gen_matrix(DerivedGen::TauC, &cp).unwrap();
        let omc = Scalar::one().try_sub(&cp.c).unwrap();
        let scaled = m.core.scale(&omc).unwrap();
        let a1 = cp.a(1).clone();
        let a2 = cp.a(2).clone();
        let b1 = cp.b(1).clone();
        assert_eq!(
            scaled.get(1, 1),
            &b1.try_sub(&a2.try_mul(&cp.c).unwrap()).unwrap()
        );
        assert_eq!(scaled.get(1, 2), &Scalar::one().try_sub(&a1).unwrap());
        assert_eq!(
            scaled.get(2, 1),
            &b1.try_sub(&a2).unwrap().try_mul(&cp.c).unwrap()
        );
        assert_eq!(
            scaled.get(2, 2),
            &Scalar::one().try_sub(&a1.try_mul(&cp.c).unwrap()).unwrap()
        );
    }

    #[test]
    fn pi1_matrix_n1() {
        let prec = bits_for_digits(60);
        let cp = real_params(1, 42, prec);
        let m = gen_matrix(DerivedGen::Pi1, &cp).unwrap();
        // gamma = log_q(q^{-1} b_1), core = E_{1,2} + q c E_{2,1}
        let want_gamma = log_base_q(
            &cp.b(1)
                .to_real(prec)
                .unwrap()
                .div(&cp.q.to_real(prec).unwrap()),
            cp.q.as_real().unwrap(),
        )
        .unwrap();
        assert_eq!(m.gamma.as_real().unwrap(), &want_gamma);
        assert!(m.core.get(1, 2).is_one());
        assert_eq!(m.core.get(2, 1), &cp.q.try_mul(&cp.c).unwrap());
        assert!(m.core.get(1, 1).is_zero());
    }

    #[test]
    fn p_at_equal_a_is_identity() {
        // a_i = a_{i+1} makes M_{p_i} the identity
        let q = Scalar::from_ratio(1, 2);
        let a = vec![
            Scalar::from_ratio(3, 16),
            Scalar::from_ratio(3, 16),
            Scalar::from_ratio(7, 16),
        ];
        let b = vec![
            Scalar::from_ratio(5, 16),
            Scalar::from_ratio(9, 16),
            q.clone(),
        ];
        let cp = CParams::new(2, a, b, Scalar::from_ratio(1, 4), q).unwrap();
        let m = gen_matrix(DerivedGen::P(1), &cp).unwrap();
        assert_eq!(m.core, Mat::identity(3));
    }

    #[test]
    fn involution_inverse_check() {
        let prec = bits_for_digits(60);
        let tol = crate::scalar::pow10_neg(45, prec);
        for n in 1..=2usize {
            let cp = real_params(n, 43 + n as u64, prec);
            for i in 1..=n as i64 {
                let m = gen_matrix(DerivedGen::P(i), &cp).unwrap().value().unwrap();
                let at = derived_params(DerivedGen::P(i), &cp).unwrap();
                let m2 = gen_matrix(DerivedGen::P(i), &at).unwrap().value().unwrap();
                let prod = m2.mul(&m).unwrap();
                let diff = prod
                    .sub(&Mat::identity(n + 1))
                    .unwrap()
                    .inf_norm(prec)
                    .unwrap();
                assert!(
                    diff.compare(&tol) == std::cmp::Ordering::Less,
                    "p_{i} n={n}"
                );
            }
        }
    }

    #[test]
    fn empty_word_is_identity() {
        let prec = bits_for_digits(60);
        let cp = real_params(1, 44, prec);
        let (m, end) = word_matrix(&[], &cp).unwrap();
        assert_eq!(m, Mat::identity(2));
        assert_eq!(end, cp);
    }

    #[test]
    fn tau_c_equals_cocycle_product() {
        let prec = bits_for_digits(60);
        let tol = crate::scalar::pow10_neg(44, prec);
        for n in 1..=2usize {
            let cp = real_params(n, 45 + n as u64, prec);
            let closed = gen_matrix(DerivedGen::TauC, &cp).unwrap().value().unwrap();
            let (prod, end) =
                word_matrix(&[DerivedGen::SigmaPrime, DerivedGen::Sigma], &cp).unwrap();
            let diff = closed.sub(&prod).unwrap().inf_norm(prec).unwrap();
            assert!(diff.compare(&tol) == std::cmp::Ordering::Less, "n={n}");
            assert_eq!(
                end.c,
                translation_on_cparams(DerivedGen::TauC, &cp).unwrap().c
            );
        }
    }

    #[test]
    fn tilde_identities_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for n in 1..=2usize {
            let cp = sample_exact_cparams(n, &mut rng).unwrap();
            tilde_identities(&cp).unwrap();
        }
    }

    #[test]
    fn delta_examples() {
        let q = Scalar::from_ratio(1, 2);
        let cp = CParams::new(
            2,
            vec![
                Scalar::from_ratio(3, 16),
                Scalar::from_ratio(5, 16),
                Scalar::from_ratio(7, 16),
            ],
            vec![
                Scalar::from_ratio(9, 16),
                Scalar::from_ratio(11, 16),
                q.clone(),
            ],
            Scalar::from_ratio(1, 4),
            q,
        )
        .unwrap();
        // Delta_{1,2} = (1 - b_2) / (1 - q^{-1} a_1)
        let d = delta_ij(1, 2, &cp).unwrap();
        let want = Scalar::one()
            .try_sub(cp.b(2))
            .unwrap()
            .try_div(
                &Scalar::one()
                    .try_sub(&cp.a(1).try_div(&cp.q, "q").unwrap())
                    .unwrap(),
                "den",
            )
            .unwrap();
        assert_eq!(d, want);
    }
}
