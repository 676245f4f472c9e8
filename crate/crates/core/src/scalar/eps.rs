//! Rational functions in a formal perturbation symbol eps, with exact
//! rational coefficients. Values are kept in canonical form: numerator and
//! denominator coprime, denominator monic.

use std::fmt;

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};

/// Reduced degree cap; exceeding it after reduction signals an unexpectedly
/// deep cancellation somewhere upstream.
pub const EPS_DEGREE_CAP: usize = 64;

/// Dense univariate polynomial over Q; no trailing zero coefficients
/// (the zero polynomial is the empty vector).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyQ(Vec<BigRational>);

impl PolyQ {
    pub fn zero() -> Self {
        PolyQ(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            PolyQ(vec![c])
        }
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = PolyQ(coeffs);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while matches!(self.0.last(), Some(c) if c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.0.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval_at_zero(&self) -> BigRational {
        self.coeff(0)
    }

    fn leading(&self) -> &BigRational {
        self.0
            .last()
            .expect("leading coefficient of zero polynomial")
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.0.len().max(rhs.0.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        PolyQ(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PolyQ(self.0.iter().map(|x| x * c).collect())
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lead = self.leading().clone();
        self.scale(&lead.recip())
    }

    /// Polynomial remainder; divisor must be nonzero.
    fn rem(&self, d: &Self) -> Self {
        let mut r = self.clone();
        let dl = d.leading().clone();
        while !r.is_zero() && r.degree() >= d.degree() {
            let shift = r.degree() - d.degree();
            let factor = r.leading() / &dl;
            let mut sub = vec![BigRational::zero(); shift];
            sub.extend(d.0.iter().map(|c| c * &factor));
            r = r.sub(&PolyQ::from_coeffs(sub));
        }
        r
    }

    /// Exact quotient when the division is known to be exact.
    fn div_exact(&self, d: &Self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut r = self.clone();
        let dl = d.leading().clone();
        let mut q = vec![BigRational::zero(); self.degree() - d.degree() + 1];
        while !r.is_zero() && r.degree() >= d.degree() {
            let shift = r.degree() - d.degree();
            let factor = r.leading() / &dl;
            q[shift] = factor.clone();
            let mut sub = vec![BigRational::zero(); shift];
            sub.extend(d.0.iter().map(|c| c * &factor));
            r = r.sub(&PolyQ::from_coeffs(sub));
        }
        debug_assert!(r.is_zero(), "inexact polynomial division");
        Self::from_coeffs(q)
    }

    /// Monic gcd by the Euclidean algorithm.
    fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.monic();
        let mut b = rhs.monic();
        while !b.is_zero() {
            let r = a.rem(&b).monic();
            a = b;
            b = r;
        }
        a
    }
}

/// A ratio of two polynomials in eps, canonical (coprime, monic denominator).
#[derive(Clone, Debug, PartialEq)]
pub struct EpsRational {
    num: PolyQ,
    den: PolyQ,
}

impl EpsRational {
    pub fn from_rational(c: BigRational) -> Self {
        EpsRational {
            num: PolyQ::constant(c),
            den: PolyQ::constant(BigRational::one()),
        }
    }

    /// c0 + c1*eps
    pub fn linear(c0: BigRational, c1: BigRational) -> Self {
        EpsRational {
            num: PolyQ::from_coeffs(vec![c0, c1]),
            den: PolyQ::constant(BigRational::one()),
        }
    }

    pub fn new(num: PolyQ, den: PolyQ) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("eps-rational denominator".into()));
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_zero() || g.degree() == 0 {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        let lead = den.leading().clone();
        den = den.scale(&lead.recip());
        num = num.scale(&lead.recip());
        let d = num.degree().max(den.degree());
        if d > EPS_DEGREE_CAP {
            return Err(Error::DegreeCapExceeded {
                degree: d,
                cap: EPS_DEGREE_CAP,
            });
        }
        Ok(EpsRational { num, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        Self::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        EpsRational {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Self::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero("eps-rational value".into()));
        }
        Self::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    /// The value at eps = 0. In canonical form the denominator is coprime to
    /// the numerator, so a vanishing constant term of the denominator is a
    /// genuine pole.
    pub fn limit_eps0(&self) -> Result<BigRational> {
        let d0 = self.den.eval_at_zero();
        if d0.is_zero() {
            return Err(Error::PoleAtZero(format!(
                "num deg {}, den deg {}",
                self.num.degree(),
                self.den.degree()
            )));
        }
        Ok(self.num.eval_at_zero() / d0)
    }

    /// True when the value is a constant (degree-0 numerator and denominator).
    pub fn is_constant(&self) -> bool {
        self.num.degree() == 0 && self.den.degree() == 0 || self.is_zero()
    }
}

impl fmt::Display for EpsRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &PolyQ| {
            if p.is_zero() {
                return "0".to_string();
            }
            p.0.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| match k {
                    0 => format!("{c}"),
                    1 => format!("{c}*eps"),
                    _ => format!("{c}*eps^{k}"),
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        if self.den.degree() == 0 && self.den.coeff(0).is_one() {
            write!(f, "{}", show(&self.num))
        } else {
            write!(f, "({}) / ({})", show(&self.num), show(&self.den))
        }
    }
}
