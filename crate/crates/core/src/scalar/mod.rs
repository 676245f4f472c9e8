//! Scalar values in one of three computational fields: exact rationals,
//! exact rational functions in a perturbation symbol eps, and
//! arbitrary-precision reals. Arithmetic promotes exact rationals into
//! either of the other two backends; eps-rationals and reals never mix.

pub mod eps;
pub mod real;

use std::fmt;

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};
pub use eps::{EpsRational, PolyQ, EPS_DEGREE_CAP};
pub use real::{bits_for_digits, pow10_neg, BigReal};

pub type QRat = BigRational;

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(QRat),
    Perturb(EpsRational),
    Real(BigReal),
}

use Scalar::*;

impl Scalar {
    pub fn from_int(x: i64) -> Self {
        Exact(QRat::from_integer(x.into()))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Exact(QRat::new(n.into(), d.into()))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn real_from_rational(r: &QRat, prec_bits: usize) -> Self {
        Real(BigReal::from_rational(r, prec_bits))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Exact(r) => r.is_zero(),
            Perturb(p) => p.is_zero(),
            Real(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Exact(r) => r.is_one(),
            Perturb(p) => p == &EpsRational::from_rational(QRat::one()),
            Real(x) => x.sub(&BigReal::one(x.prec())).is_zero(),
        }
    }

    pub fn as_exact(&self) -> Option<&QRat> {
        match self {
            Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<&BigReal> {
        match self {
            Real(x) => Some(x),
            _ => None,
        }
    }

    /// Numeric view: exact rationals convert at `prec`; reals pass through.
    pub fn to_real(&self, prec: usize) -> Result<BigReal> {
        match self {
            Exact(r) => Ok(BigReal::from_rational(r, prec)),
            Real(x) => Ok(x.clone()),
            Perturb(_) => Err(Error::DomainError("eps-rational used as a number".into())),
        }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        Ok(match (self, rhs) {
            (Exact(a), Exact(b)) => Exact(a + b),
            (Perturb(a), Perturb(b)) => Perturb(a.add(b)?),
            (Exact(a), Perturb(b)) => Perturb(EpsRational::from_rational(a.clone()).add(b)?),
            (Perturb(a), Exact(b)) => Perturb(a.add(&EpsRational::from_rational(b.clone()))?),
            (Real(a), Real(b)) => Real(a.add(b)),
            (Exact(a), Real(b)) => Real(BigReal::from_rational(a, b.prec()).add(b)),
            (Real(a), Exact(b)) => Real(a.add(&BigReal::from_rational(b, a.prec()))),
            _ => {
                return Err(Error::DomainError(
                    "mixing eps-rational and real scalars".into(),
                ))
            }
        })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&rhs.neg())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        Ok(match (self, rhs) {
            (Exact(a), Exact(b)) => Exact(a * b),
            (Perturb(a), Perturb(b)) => Perturb(a.mul(b)?),
            (Exact(a), Perturb(b)) => Perturb(EpsRational::from_rational(a.clone()).mul(b)?),
            (Perturb(a), Exact(b)) => Perturb(a.mul(&EpsRational::from_rational(b.clone()))?),
            (Real(a), Real(b)) => Real(a.mul(b)),
            (Exact(a), Real(b)) => Real(BigReal::from_rational(a, b.prec()).mul(b)),
            (Real(a), Exact(b)) => Real(a.mul(&BigReal::from_rational(b, a.prec()))),
            _ => {
                return Err(Error::DomainError(
                    "mixing eps-rational and real scalars".into(),
                ))
            }
        })
    }

    /// Division; `what` names the denominator in the error.
    pub fn try_div(&self, rhs: &Self, what: &str) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero(what.to_string()));
        }
        Ok(match (self, rhs) {
            (Exact(a), Exact(b)) => Exact(a / b),
            (Perturb(a), Perturb(b)) => Perturb(a.div(b)?),
            (Exact(a), Perturb(b)) => Perturb(EpsRational::from_rational(a.clone()).div(b)?),
            (Perturb(a), Exact(b)) => Perturb(a.div(&EpsRational::from_rational(b.clone()))?),
            (Real(a), Real(b)) => Real(a.div(b)),
            (Exact(a), Real(b)) => Real(BigReal::from_rational(a, b.prec()).div(b)),
            (Real(a), Exact(b)) => Real(a.div(&BigReal::from_rational(b, a.prec()))),
            _ => {
                return Err(Error::DomainError(
                    "mixing eps-rational and real scalars".into(),
                ))
            }
        })
    }

    pub fn neg(&self) -> Self {
        match self {
            Exact(r) => Exact(-r),
            Perturb(p) => Perturb(p.neg()),
            Real(x) => Real(x.neg()),
        }
    }

    pub fn inv(&self, what: &str) -> Result<Self> {
        Scalar::one().try_div(self, what)
    }

    /// The value at eps = 0 of an eps-rational (identity on the other
    /// backends, matching the field-homomorphism reading).
    pub fn limit_eps0(&self) -> Result<Scalar> {
        match self {
            Perturb(p) => Ok(Exact(p.limit_eps0()?)),
            other => Ok(other.clone()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exact(r) => write!(f, "{r}"),
            Perturb(p) => write!(f, "{p}"),
            Real(x) => write!(f, "{x}"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar arithmetic")
            }
        }
        impl std::ops::$trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_binop!(Add, add, try_add);
scalar_binop!(Sub, sub, try_sub);
scalar_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}

/// Convergence-control knobs for infinite q-products.
#[derive(Clone, Debug)]
pub struct QPochConfig {
    pub q: Scalar,
    pub tol: BigReal,
    pub max_terms: usize,
}

impl QPochConfig {
    pub fn new(q: Scalar, tol: BigReal, max_terms: usize) -> Result<Self> {
        if tol.is_zero() || tol.is_negative() {
            return Err(Error::ConfigError("tolerance must be positive".into()));
        }
        if max_terms == 0 {
            return Err(Error::ConfigError("max_terms must be at least 1".into()));
        }
        Ok(QPochConfig { q, tol, max_terms })
    }
}

/// Finite q-shifted factorial (a;q)_k = prod_{m<k} (1 - q^m a).
pub fn qpoch(a: &Scalar, q: &Scalar, k: usize) -> Result<Scalar> {
    let mut out = Scalar::one();
    let mut qm = Scalar::one();
    for _ in 0..k {
        out = out.try_mul(&Scalar::one().try_sub(&qm.try_mul(a)?)?)?;
        qm = qm.try_mul(q)?;
    }
    Ok(out)
}

/// Infinite product (a;q)_inf, truncated when the multiplicative tail is
/// provably within `tol` of 1; returns the value and the number of factors.
pub fn qpoch_inf(a: &BigReal, cfg: &QPochConfig) -> Result<(BigReal, usize)> {
    let prec = a.prec();
    let q = cfg.q.to_real(prec)?;
    let one = BigReal::one(prec);
    if q.abs().compare(&one) != std::cmp::Ordering::Less {
        return Err(Error::DomainError("|q| must be below 1".into()));
    }
    let inv_gap = one.sub(&q.abs());
    let mut prod = one.clone();
    let mut qm = one.clone();
    for m in 0..cfg.max_terms {
        prod = prod.mul(&one.sub(&qm.mul(a)));
        qm = qm.mul(&q);
        // |log tail| <= |a| q^{m+1} / (1-|q|) once |q^{m+1} a| < 1/2
        let tail = qm.mul(a).abs().div(&inv_gap);
        if tail.compare(&cfg.tol) == std::cmp::Ordering::Less && m >= 4 {
            return Ok((prod, m + 1));
        }
    }
    Err(Error::NonConvergent {
        terms: cfg.max_terms,
        bound: f64::NAN,
    })
}

/// log_q(b) = ln b / ln q for 0 < q < 1, b > 0.
pub fn log_base_q(b: &BigReal, q: &BigReal) -> Result<BigReal> {
    let one = BigReal::one(b.prec().max(q.prec()));
    if q.is_negative() || q.is_zero() || q.compare(&one) != std::cmp::Ordering::Less {
        return Err(Error::DomainError("q must lie in (0,1)".into()));
    }
    if b.is_negative() || b.is_zero() {
        return Err(Error::DomainError(
            "log base q of a non-positive value".into(),
        ));
    }
    Ok(b.ln()?.div(&q.ln()?))
}
