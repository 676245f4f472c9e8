//! The specialization layer: the (2n+3)-parameter tuple (a, b, c), the locus
//! phi_{2j+1,0} = -alpha_{2j+1}, phi_{2j+1,1} = -1, the derived generators
//! acting on it, and the q-Riccati flow.

mod derived;
mod riccati;

pub use derived::{
    apply_derived_closed, derived_params, derived_params_inv, derived_word,
    preserves_specialization, preserves_specialization_word, DerivedGen, PreservationReport,
};
pub use riccati::{t_poly, tau_c_step, translation_on_cparams};

use num::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{QRat, Scalar};
use crate::weyl::{ObservableParams, PhiState};

/// The parameter tuple (a_1..a_{n+1}, b_1..b_{n+1}, c) with b_{n+1} = q and
/// the two-sided index extension a_{j+n+1} = q a_j, b_{j+n+1} = q b_j.
#[derive(Clone, Debug, PartialEq)]
pub struct CParams {
    n: usize,
    a: Vec<Scalar>,
    b: Vec<Scalar>,
    pub c: Scalar,
    pub q: Scalar,
}

impl CParams {
    /// Validating constructor; `b` must end with q. In the numeric backend
    /// this also checks the convergence domain 0 < q < 1, a,b > 0, 0 < c < 1/q.
    pub fn new(n: usize, a: Vec<Scalar>, b: Vec<Scalar>, c: Scalar, q: Scalar) -> Result<Self> {
        let cp = Self::unchecked(n, a, b, c, q)?;
        if matches!(cp.q, Scalar::Real(_)) {
            cp.check_numeric_domain()?;
        }
        Ok(cp)
    }

    /// Convergence-domain validation: 0 < q < 1, a,b > 0, 0 < c < 1/q.
    pub fn check_numeric_domain(&self) -> Result<()> {
        let prec = match &self.q {
            Scalar::Real(qr) => qr.prec(),
            _ => 128,
        };
        let one = crate::scalar::BigReal::one(prec);
        let ord = std::cmp::Ordering::Less;
        let qr = self.q.to_real(prec)?;
        if qr.is_negative() || qr.is_zero() || qr.compare(&one) != ord {
            return Err(Error::DomainError("q must lie in (0,1)".into()));
        }
        for v in self.a.iter().chain(self.b.iter()) {
            let vr = v.to_real(prec)?;
            if vr.is_negative() || vr.is_zero() {
                return Err(Error::DomainError("a and b must be positive".into()));
            }
        }
        let cr = self.c.to_real(prec)?;
        if cr.is_negative() || cr.is_zero() || cr.mul(&qr).compare(&one) != ord {
            return Err(Error::DomainError("c must lie in (0, 1/q)".into()));
        }
        Ok(())
    }

    /// Structural checks only (used along parameter orbits, which may leave
    /// the convergence domain without invalidating the algebra).
    pub(crate) fn unchecked(
        n: usize,
        a: Vec<Scalar>,
        b: Vec<Scalar>,
        c: Scalar,
        q: Scalar,
    ) -> Result<Self> {
        if n < 1 || a.len() != n + 1 || b.len() != n + 1 {
            return Err(Error::ConfigError("a and b must have n+1 entries".into()));
        }
        if b[n] != q {
            return Err(Error::ConstraintViolated("b_{n+1} must equal q".into()));
        }
        Ok(CParams { n, a, b, c, q })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// a_j for 1 <= j <= n+1 (stored range).
    pub fn a(&self, j: usize) -> &Scalar {
        &self.a[j - 1]
    }

    pub fn b(&self, j: usize) -> &Scalar {
        &self.b[j - 1]
    }

    fn ext(&self, vals: &[Scalar], j: i64) -> Result<Scalar> {
        let period = self.n as i64 + 1;
        let mut k = j;
        let mut shifts: i64 = 0;
        while k < 1 {
            k += period;
            shifts -= 1;
        }
        while k > period {
            k -= period;
            shifts += 1;
        }
        self.q.powi(shifts)?.try_mul(&vals[(k - 1) as usize])
    }

    /// a_j for any integer j via the two-sided extension.
    pub fn a_ext(&self, j: i64) -> Result<Scalar> {
        self.ext(&self.a, j)
    }

    /// b_j for any integer j; in particular b_0 = 1.
    pub fn b_ext(&self, j: i64) -> Result<Scalar> {
        self.ext(&self.b, j)
    }

    pub(crate) fn with_values(&self, a: Vec<Scalar>, b: Vec<Scalar>, c: Scalar) -> CParams {
        CParams {
            n: self.n,
            a,
            b,
            c,
            q: self.q.clone(),
        }
    }

    /// Converts all stored values to the numeric backend at `prec` bits.
    pub fn to_real(&self, prec: usize) -> Result<CParams> {
        let conv = |v: &Scalar| v.to_real(prec).map(Scalar::Real);
        Ok(CParams {
            n: self.n,
            a: self.a.iter().map(conv).collect::<Result<_>>()?,
            b: self.b.iter().map(conv).collect::<Result<_>>()?,
            c: conv(&self.c)?,
            q: conv(&self.q)?,
        })
    }
}

impl Scalar {
    /// Integer power, exact on rationals and by squaring on reals.
    pub fn powi(&self, e: i64) -> Result<Scalar> {
        if let Scalar::Real(x) = self {
            return Ok(Scalar::Real(x.powi(e)));
        }
        let mut acc = Scalar::one();
        let (mut base, mut k) = if e < 0 {
            (self.inv("base of negative power")?, -e)
        } else {
            (self.clone(), e)
        };
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            base = base.try_mul(&base)?;
            k >>= 1;
        }
        Ok(acc)
    }
}

/// alpha_{2j-2} = b_{n-j+1}/a_{n-j+1}, alpha_{2j-1} = a_{n-j+1}/b_{n-j},
/// for j = 0..n, indices reduced mod 2n+2.
pub fn alphas_from_cparams(cp: &CParams) -> Result<Vec<Scalar>> {
    let n = cp.order() as i64;
    let m = (2 * n + 2) as usize;
    let mut alpha = vec![Scalar::zero(); m];
    for j in 0..=n {
        let even = (((2 * j - 2) % (2 * n + 2)) + 2 * n + 2) as usize % m;
        let odd = (((2 * j - 1) % (2 * n + 2)) + 2 * n + 2) as usize % m;
        alpha[even] = cp
            .b_ext(n - j + 1)?
            .try_div(&cp.a_ext(n - j + 1)?, "a_{n-j+1}")?;
        alpha[odd] = cp.a_ext(n - j + 1)?.try_div(&cp.b_ext(n - j)?, "b_{n-j}")?;
    }
    Ok(alpha)
}

/// beta_0 = q c prod_{l=1}^{n+1} a_l / b_{l-1}.
pub fn beta0_from_cparams(cp: &CParams) -> Result<Scalar> {
    let mut out = cp.q.try_mul(&cp.c)?;
    for l in 1..=(cp.order() as i64 + 1) {
        out = out
            .try_mul(&cp.a_ext(l)?)?
            .try_div(&cp.b_ext(l - 1)?, "b_{l-1}")?;
    }
    Ok(out)
}

/// Inverse of [`cparams_from_observables`]; returns the full observable set.
pub fn observables_from_cparams(cp: &CParams) -> Result<ObservableParams> {
    let alpha = alphas_from_cparams(cp)?;
    let beta0 = beta0_from_cparams(cp)?;
    let qval = alpha
        .iter()
        .try_fold(Scalar::one(), |acc, a| acc.try_mul(a))?;
    let beta1 = qval.try_div(&beta0, "beta_0")?;
    let mut odd = Scalar::one();
    for j in 0..=cp.order() as i64 {
        odd = odd.try_mul(&alpha[(2 * j + 1) as usize % alpha.len()])?;
    }
    let betap0 = beta0.try_div(&odd, "prod alpha_odd")?;
    let betap1 = qval.try_div(&betap0, "beta'_0")?;
    Ok(ObservableParams {
        alpha,
        beta: [beta0, beta1],
        betap: [betap0, betap1],
        qval,
    })
}

/// a_j = prod_{l=2n-2j+1}^{2n-1} alpha_l, b_j = prod_{l=2n-2j}^{2n-1} alpha_l,
/// c = beta_0 / (q prod alpha_odd); requires the constraint
/// beta'_0 = beta_0 / prod alpha_{2j+1}.
pub fn cparams_from_observables(obs: &ObservableParams, n: usize) -> Result<CParams> {
    let m = 2 * n + 2;
    if obs.alpha.len() != m {
        return Err(Error::ConfigError(format!("expected {m} alphas")));
    }
    let mut odd = Scalar::one();
    for j in 0..=n as i64 {
        odd = odd.try_mul(&obs.alpha[(2 * j + 1) as usize % m])?;
    }
    let expected = obs.beta[0].try_div(&odd, "prod alpha_odd")?;
    if expected != obs.betap[0] {
        return Err(Error::ConstraintViolated(
            "beta'_0 != beta_0 / prod alpha_{2j+1}".into(),
        ));
    }
    let alpha_at =
        |l: i64| -> &Scalar { &obs.alpha[(((l % m as i64) + m as i64) % m as i64) as usize] };
    let nn = n as i64;
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for j in 1..=nn + 1 {
        let mut pa = Scalar::one();
        for l in (2 * nn - 2 * j + 1)..=(2 * nn - 1) {
            pa = pa.try_mul(alpha_at(l))?;
        }
        a.push(pa);
        let mut pb = Scalar::one();
        for l in (2 * nn - 2 * j)..=(2 * nn - 1) {
            pb = pb.try_mul(alpha_at(l))?;
        }
        b.push(pb);
    }
    let c = obs.beta[0].try_div(&obs.qval.try_mul(&odd)?, "q * prod alpha_odd")?;
    CParams::unchecked(n, a, b, c, obs.qval.clone())
}

/// A point of the q-Riccati phase space: the even dependent variables
/// phi_{2j,0} together with the parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialState {
    pub even: Vec<Scalar>,
    pub params: CParams,
}

impl SpecialState {
    pub fn new(even: Vec<Scalar>, params: CParams) -> Result<Self> {
        if even.len() != params.order() + 1 {
            return Err(Error::ConfigError("need n+1 even values".into()));
        }
        let s = SpecialState { even, params };
        if s.even.iter().all(|v| matches!(v, Scalar::Exact(_))) && !s.product_defect()?.is_zero() {
            return Err(Error::ConstraintViolated(
                "prod phi_{2j,0} != (-1)^{n+1} q c".into(),
            ));
        }
        Ok(s)
    }

    pub fn even(&self, j: i64) -> &Scalar {
        let p = self.even.len() as i64;
        &self.even[(((j % p) + p) % p) as usize]
    }

    /// prod even - (-1)^{n+1} q c; zero when the product constraint holds.
    pub fn product_defect(&self) -> Result<Scalar> {
        let mut prod = Scalar::one();
        for v in &self.even {
            prod = prod.try_mul(v)?;
        }
        let mut rhs = self.params.q.try_mul(&self.params.c)?;
        if self.params.order().is_multiple_of(2) {
            // (-1)^{n+1}
            rhs = rhs.neg();
        }
        prod.try_sub(&rhs)
    }
}

/// Builds a perturbed full state over the eps-rational backend:
/// phi_{2j+1,0} = -alpha_{2j+1} + eps t_j, phi_{2j+1,1} = -1 + eps u_j,
/// even entries free with the last pinned by the product constraint.
pub fn specialize(cp: &CParams, evens_free: &[QRat], t: &[QRat], u: &[QRat]) -> Result<PhiState> {
    let n = cp.order();
    if evens_free.len() != n || t.len() != n + 1 || u.len() != n + 1 {
        return Err(Error::ConfigError(
            "need n free evens and n+1 directions".into(),
        ));
    }
    if t.iter().chain(u.iter()).any(|v| v.is_zero()) {
        return Err(Error::ConfigError(
            "direction entries must be nonzero".into(),
        ));
    }
    let alpha = alphas_from_cparams(cp)?;
    let alpha_q: Vec<QRat> = alpha
        .iter()
        .map(|a| {
            a.as_exact()
                .cloned()
                .ok_or(Error::DomainError("exact parameters required".into()))
        })
        .collect::<Result<_>>()?;
    let qc =
        cp.q.try_mul(&cp.c)?
            .as_exact()
            .cloned()
            .ok_or(Error::DomainError("exact parameters required".into()))?;
    let mut evens: Vec<QRat> = evens_free.to_vec();
    let mut prod = QRat::one();
    for v in &evens {
        prod *= v;
    }
    let sign: QRat = if n.is_multiple_of(2) {
        -QRat::one()
    } else {
        QRat::one()
    };
    evens.push(sign * qc / prod);

    let m = 2 * n + 2;
    let mut rows = vec![[Scalar::zero(), Scalar::zero()]; m];
    for j in 0..=n {
        let a_even = &alpha_q[2 * j];
        let a_odd = &alpha_q[(2 * j + 1) % m];
        rows[2 * j] = [
            Scalar::Perturb(crate::scalar::EpsRational::from_rational(evens[j].clone())),
            Scalar::Perturb(crate::scalar::EpsRational::from_rational(
                a_even / &evens[j],
            )),
        ];
        rows[(2 * j + 1) % m] = [
            Scalar::Perturb(crate::scalar::EpsRational::linear(-a_odd, t[j].clone())),
            Scalar::Perturb(crate::scalar::EpsRational::linear(
                -QRat::one(),
                u[j].clone(),
            )),
        ];
    }
    PhiState::new(n, rows)
}

/// Draws exact parameters in the sampling domain used throughout the suites:
/// q = 1/2, a and b distinct values k/16 with 3 <= k <= 13 and k != 8
/// (a_l = q is a Delta-normalization pole and b_n = q makes p'_n act
/// trivially, collapsing its second solution onto x), c in {1/8, 1/4, 3/8}.
pub fn sample_exact_cparams<R: Rng>(n: usize, rng: &mut R) -> Result<CParams> {
    for _ in 0..1000 {
        let q = Scalar::from_ratio(1, 2);
        let mut pool: Vec<i64> = (3..=13).filter(|&k| k != 8).collect();
        for k in (1..pool.len()).rev() {
            pool.swap(k, rng.gen_range(0..=k));
        }
        if pool.len() < 2 * n + 1 {
            return Err(Error::ConfigError(
                "n too large for the sampling pool".into(),
            ));
        }
        let a: Vec<Scalar> = (0..n + 1)
            .map(|i| Scalar::from_ratio(pool[i], 16))
            .collect();
        let mut b: Vec<Scalar> = (0..n)
            .map(|i| Scalar::from_ratio(pool[n + 1 + i], 16))
            .collect();
        b.push(q.clone());
        let c = Scalar::from_ratio(rng.gen_range(1..=3), 8);
        let cp = CParams::unchecked(n, a, b, c, q)?;
        if cparams_is_degenerate(&cp)? {
            continue;
        }
        return Ok(cp);
    }
    Err(Error::SamplerExhausted(1000))
}

/// Degeneracies excluded by the samplers: a_i = b_i, a_1 = b_0 = 1,
/// b_l = a_l after extension collisions, c = 1.
pub(crate) fn cparams_is_degenerate(cp: &CParams) -> Result<bool> {
    let n = cp.order() as i64;
    for i in 0..=n + 1 {
        if cp.a_ext(i)? == cp.b_ext(i)? {
            return Ok(true);
        }
    }
    if cp.a_ext(1)? == cp.b_ext(0)? {
        return Ok(true);
    }
    if cp.c.is_one() {
        return Ok(true);
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{observables, qrat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_cparams(n: usize) -> CParams {
        // all alpha = 1, beta_0 = q = 1 -> a_j = b_j = 1, c = 1
        let one = Scalar::one();
        CParams::unchecked(
            n,
            vec![one.clone(); n + 1],
            vec![one.clone(); n + 1],
            one.clone(),
            one,
        )
        .unwrap()
    }

    #[test]
    fn unit_point() {
        let cp = unit_cparams(1);
        let obs = observables_from_cparams(&cp).unwrap();
        assert!(obs.alpha.iter().all(|a| a.is_one()));
        assert!(obs.beta[0].is_one());
        let back = cparams_from_observables(&obs, 1).unwrap();
        assert_eq!(back, cp);
    }

    #[test]
    fn two_sided_extension() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cp = sample_exact_cparams(2, &mut rng).unwrap();
        assert!(cp.b_ext(0).unwrap().is_one());
        assert_eq!(
            cp.a_ext(0).unwrap(),
            cp.a(3).clone().try_div(&cp.q, "q").unwrap()
        );
        assert_eq!(cp.a_ext(5).unwrap(), cp.q.try_mul(cp.a(2)).unwrap());
        assert_eq!(cp.b_ext(-1).unwrap(), cp.b(2).try_div(&cp.q, "q").unwrap());
    }

    #[test]
    fn n1_product_bounds() {
        // a_1 = alpha_1, a_2 = alpha_3 alpha_0 alpha_1, b_1 = alpha_0 alpha_1, b_2 = q
        let alpha: Vec<Scalar> = [2, 3, 5, 7].iter().map(|&x| Scalar::from_int(x)).collect();
        let qval = Scalar::from_int(210);
        let beta0 = Scalar::from_int(42); // arbitrary but constraint-consistent
        let betap0 = beta0
            .try_div(&(alpha[1].try_mul(&alpha[3]).unwrap()), "x")
            .unwrap();
        let betap1 = qval.try_div(&betap0, "x").unwrap();
        let beta1 = qval.try_div(&beta0, "x").unwrap();
        let obs = ObservableParams {
            alpha: alpha.clone(),
            beta: [beta0, beta1],
            betap: [betap0, betap1],
            qval,
        };
        let cp = cparams_from_observables(&obs, 1).unwrap();
        assert_eq!(cp.a(1), &Scalar::from_int(3));
        assert_eq!(cp.a(2), &Scalar::from_int(42)); // 7*2*3
        assert_eq!(cp.b(1), &Scalar::from_int(6)); // 2*3
        assert_eq!(cp.b(2), &Scalar::from_int(210));
        let round = observables_from_cparams(&cp).unwrap();
        assert_eq!(round, obs);
    }

    #[test]
    fn constraint_violation_detected() {
        let alpha: Vec<Scalar> = [2, 3, 5, 7].iter().map(|&x| Scalar::from_int(x)).collect();
        let obs = ObservableParams {
            alpha,
            beta: [Scalar::from_int(42), Scalar::from_int(5)],
            betap: [Scalar::from_int(3), Scalar::from_int(70)],
            qval: Scalar::from_int(210),
        };
        assert!(matches!(
            cparams_from_observables(&obs, 1),
            Err(Error::ConstraintViolated(_))
        ));
    }

    #[test]
    fn roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=2 {
            let cp = sample_exact_cparams(n, &mut rng).unwrap();
            let obs = observables_from_cparams(&cp).unwrap();
            let back = cparams_from_observables(&obs, n).unwrap();
            assert_eq!(back, cp);
            // prod alpha = q
            assert_eq!(obs.qval, cp.q);
        }
    }

    #[test]
    fn specialize_on_locus() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 1..=2usize {
            let cp = sample_exact_cparams(n, &mut rng).unwrap();
            let evens: Vec<QRat> = (0..n).map(|_| qrat(rng.gen_range(2..9), 7)).collect();
            let t: Vec<QRat> = (0..=n).map(|_| qrat(rng.gen_range(1..5), 3)).collect();
            let u: Vec<QRat> = (0..=n).map(|_| qrat(rng.gen_range(1..5), 4)).collect();
            let st = specialize(&cp, &evens, &t, &u).unwrap();
            // obs at eps = 0 reproduce the cp observables
            let obs = observables(&st).unwrap();
            let want = observables_from_cparams(&cp).unwrap();
            for (got, expect) in obs.alpha.iter().zip(want.alpha.iter()) {
                assert_eq!(&got.limit_eps0().unwrap(), expect);
            }
            assert_eq!(obs.beta[0].limit_eps0().unwrap(), want.beta[0]);
            // Q-sum identity on the locus: sum_k prod phi_{2j+l,1} at eps=0
            // equals 1 + (-1)^n prod phi_{2l,1}
            let sums = crate::weyl::q_sums(&st).unwrap();
            let mut prod_even_col1 = Scalar::one();
            for j in 0..=n as i64 {
                prod_even_col1 = prod_even_col1.try_mul(st.get(2 * j, 1)).unwrap();
            }
            let sign = if n % 2 == 0 {
                Scalar::one()
            } else {
                -Scalar::one()
            };
            let expect = Scalar::one() + sign * prod_even_col1;
            for j in 0..=n as i64 {
                assert_eq!(
                    sums.q[(2 * j) as usize][1].limit_eps0().unwrap(),
                    expect.limit_eps0().unwrap()
                );
            }
        }
    }

    #[test]
    fn eps_free_state_sits_on_locus() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let cp = sample_exact_cparams(1, &mut rng).unwrap();
        let st = specialize(
            &cp,
            &[qrat(2, 3)],
            &[qrat(1, 2), qrat(1, 3)],
            &[qrat(1, 5), qrat(2, 7)],
        )
        .unwrap();
        let alpha = alphas_from_cparams(&cp).unwrap();
        for j in 0..=1i64 {
            let v = st.get(2 * j + 1, 1).clone();
            // constant part is exactly -1
            let at0 = v.limit_eps0().unwrap();
            assert_eq!(at0, -Scalar::one());
            let a = st.get(2 * j + 1, 0).limit_eps0().unwrap();
            assert_eq!(a, alpha[(2 * j + 1) as usize].neg());
        }
    }
}
