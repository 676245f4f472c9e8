//! Arbitrary-precision reals backed by `astro-float`, with the working
//! precision carried on every value.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode};
use num::bigint::Sign;
use num::{BigInt, BigRational};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Bits needed for `digits` decimal digits, plus guard bits.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32
}

/// Sign/mantissa/exponent real number; `prec` (bits) travels with the value
/// and binary operations widen to the larger operand precision.
#[derive(Clone, Debug)]
pub struct BigReal {
    f: BigFloat,
    prec: usize,
}

impl BigReal {
    pub fn from_f64(x: f64, prec: usize) -> Self {
        BigReal {
            f: BigFloat::from_f64(x, prec),
            prec,
        }
    }

    pub fn from_i64(x: i64, prec: usize) -> Self {
        BigReal {
            f: BigFloat::from_i64(x, prec),
            prec,
        }
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    /// Exact conversion of a big integer, then rounded to `prec`.
    fn from_bigint(x: &BigInt, prec: usize) -> BigFloat {
        let (sign, digits) = x.to_u64_digits();
        // wide enough to hold the integer exactly before the final rounding
        let wide = prec.max(64 * digits.len() + 64);
        let base = BigFloat::from_u64(u64::MAX, wide).add(&BigFloat::from_u64(1, wide), wide, RM);
        let mut acc = BigFloat::from_u64(0, wide);
        for d in digits.iter().rev() {
            acc = acc
                .mul(&base, wide, RM)
                .add(&BigFloat::from_u64(*d, wide), wide, RM);
        }
        if sign == Sign::Minus {
            acc = acc.neg();
        }
        acc
    }

    pub fn from_rational(r: &BigRational, prec: usize) -> Self {
        let num = Self::from_bigint(r.numer(), prec);
        let den = Self::from_bigint(r.denom(), prec);
        BigReal {
            f: num.div(&den, prec, RM),
            prec,
        }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    fn join(&self, rhs: &Self) -> usize {
        self.prec.max(rhs.prec)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.join(rhs);
        BigReal {
            f: self.f.add(&rhs.f, p, RM),
            prec: p,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.join(rhs);
        BigReal {
            f: self.f.sub(&rhs.f, p, RM),
            prec: p,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.join(rhs);
        BigReal {
            f: self.f.mul(&rhs.f, p, RM),
            prec: p,
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.join(rhs);
        BigReal {
            f: self.f.div(&rhs.f, p, RM),
            prec: p,
        }
    }

    pub fn neg(&self) -> Self {
        BigReal {
            f: self.f.clone().neg(),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        BigReal {
            f: self.f.abs(),
            prec: self.prec,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.f.is_negative()
    }

    pub fn ln(&self) -> Result<Self> {
        if self.is_zero() || self.is_negative() {
            return Err(Error::DomainError("ln of a non-positive value".into()));
        }
        let f = CONSTS.with(|cc| self.f.ln(self.prec, RM, &mut cc.borrow_mut()));
        Ok(BigReal { f, prec: self.prec })
    }

    pub fn exp(&self) -> Self {
        let f = CONSTS.with(|cc| self.f.exp(self.prec, RM, &mut cc.borrow_mut()));
        BigReal { f, prec: self.prec }
    }

    /// self^e for real exponents; requires self > 0.
    pub fn pow(&self, e: &Self) -> Result<Self> {
        if self.is_zero() || self.is_negative() {
            return Err(Error::DomainError("pow of a non-positive base".into()));
        }
        let p = self.join(e);
        let f = CONSTS.with(|cc| self.f.pow(&e.f, p, RM, &mut cc.borrow_mut()));
        Ok(BigReal { f, prec: p })
    }

    /// Integer power by repeated squaring (no positivity requirement).
    pub fn powi(&self, mut e: i64) -> Self {
        let mut base = if e < 0 {
            e = -e;
            BigReal::one(self.prec).div(self)
        } else {
            self.clone()
        };
        let mut acc = BigReal::one(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        // astro-float formats reliably; round-trip through a short decimal
        format!("{}", self.f).parse::<f64>().unwrap_or(f64::NAN)
    }

    pub fn compare(&self, rhs: &Self) -> Ordering {
        match self.f.cmp(&rhs.f) {
            Some(o) => match o {
                x if x < 0 => Ordering::Less,
                0 => Ordering::Equal,
                _ => Ordering::Greater,
            },
            None => Ordering::Equal,
        }
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Equal
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{}", self.f)
    }
}

/// 10^(-k) at the given precision, for tolerance arithmetic.
pub fn pow10_neg(k: u32, prec: usize) -> BigReal {
    BigReal::from_i64(10, prec).powi(-(k as i64))
}
