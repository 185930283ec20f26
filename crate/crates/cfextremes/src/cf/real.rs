//! Digit extraction from reals known only up to a rigorous error interval.
//!
//! A "high-precision real" here is an exact rational interval `[lo, hi]`
//! guaranteed to contain the true value. Each expansion step takes the
//! integer part of the reciprocal interval; a digit is emitted only when the
//! whole reciprocal interval sits inside one integer step, so a wrong digit
//! is impossible — the alternative is a precision error.

use num::bigint::BigUint;
use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::{expand_rational, CFWord};

/// A real in `[0, 1)` represented by exact rational bounds `lo <= x <= hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealInterval {
    lo: Rational,
    hi: Rational,
}

impl RealInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("interval bounds out of order: {lo} > {hi}")));
        }
        if lo.is_negative() || hi >= Rational::one() {
            return Err(Error::domain("real interval must lie inside [0, 1)"));
        }
        Ok(RealInterval { lo, hi })
    }

    /// An exactly known rational value.
    pub fn point(x: Rational) -> Result<Self> {
        Self::new(x.clone(), x)
    }

    /// `[mantissa, mantissa + err_ulps] / 2^scale_bits`.
    pub fn from_dyadic(mantissa: BigUint, err_ulps: BigUint, scale_bits: u32) -> Result<Self> {
        let denom = BigInt::one() << scale_bits;
        let lo = Rational::new(BigInt::from(mantissa.clone()), denom.clone());
        let hi = Rational::new(BigInt::from(mantissa + err_ulps), denom);
        Self::new(lo, hi)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Midpoint as `f64`, for diagnostics and empirical statistics.
    pub fn approx_f64(&self) -> f64 {
        crate::rational::to_f64(&self.lo)
    }
}

/// The result of expanding a real: the digits found, and whether the
/// expansion terminated exactly (the value was rational with at most the
/// requested number of digits).
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub word: CFWord,
    pub terminated: bool,
}

/// First `n` partial quotients of a rigorously bounded real in `(0, 1)`.
///
/// `precision_bits` is the precision contract: the input interval must be at
/// least that narrow, and `precision_bits >= 4n + 64` must hold (typical
/// digits consume just under 4 bits of denominator each; the slack keeps the
/// abort rate negligible for Gauss-typical inputs). If the reciprocal
/// interval ever straddles an integer boundary the function aborts with a
/// precision error rather than emit an uncertain digit.
pub fn expand_real(x: &RealInterval, n: usize, precision_bits: u32) -> Result<Expansion> {
    if n == 0 {
        return Err(Error::domain("digit count must be >= 1"));
    }
    if (precision_bits as usize) < 4 * n + 64 {
        return Err(Error::precision(format!(
            "precision_bits = {precision_bits} below the required 4n + 64 = {}",
            4 * n + 64
        )));
    }
    if !x.hi.is_positive() {
        return Err(Error::domain("real must be positive"));
    }
    // width <= 2^-precision_bits, checked exactly
    let width = x.width();
    if !width.is_zero() {
        let scaled = width * Rational::new(BigInt::one() << precision_bits, BigInt::one());
        if scaled > Rational::one() {
            return Err(Error::precision(format!(
                "input interval wider than 2^-{precision_bits}"
            )));
        }
    }

    if x.is_point() {
        return expand_exact_point(&x.lo, n);
    }

    // Unreduced numerator/denominator pairs; each step is a Euclidean
    // division so the operands only shrink.
    let mut lo_num = x.lo.numer().magnitude().clone();
    let mut lo_den = x.lo.denom().magnitude().clone();
    let mut hi_num = x.hi.numer().magnitude().clone();
    let mut hi_den = x.hi.denom().magnitude().clone();

    let mut digits: Vec<BigUint> = Vec::with_capacity(n);
    while digits.len() < n {
        if lo_num.is_zero() {
            return Err(Error::precision(format!(
                "interval touches 0 after {} digits",
                digits.len()
            )));
        }
        // 1/x ranges over [hi_den/hi_num, lo_den/lo_num]
        let (a, rem) = hi_den.div_rem(&hi_num);
        debug_assert!(!a.is_zero(), "x must stay below 1");
        // the digit is certain only if 1/lo < a + 1
        let bound = (&a + BigUint::one()) * &lo_num;
        if lo_den >= bound {
            return Err(Error::precision(format!(
                "digit {} is ambiguous: reciprocal interval spans an integer",
                digits.len() + 1
            )));
        }
        // next interval endpoints swap roles:
        //   lo' = 1/hi - a = rem/hi_num,  hi' = 1/lo - a = (lo_den - a lo_num)/lo_num
        let new_hi_num = &lo_den - &a * &lo_num;
        let new_hi_den = std::mem::replace(&mut lo_num, rem);
        lo_den = std::mem::replace(&mut hi_num, new_hi_num);
        hi_den = new_hi_den;
        digits.push(a);
    }
    Ok(Expansion {
        word: CFWord::new(digits)?,
        terminated: false,
    })
}

fn expand_exact_point(x: &Rational, n: usize) -> Result<Expansion> {
    if !x.is_positive() || *x >= Rational::one() {
        return Err(Error::domain("exact real must lie in (0, 1)"));
    }
    let full = expand_rational(x)?;
    if full.len() <= n {
        Ok(Expansion {
            word: full,
            terminated: true,
        })
    } else {
        Ok(Expansion {
            word: full.prefix(n)?,
            terminated: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{cylinder_interval, evaluate_cf};
    use crate::rational::ratio;
    use proptest::prelude::*;

    /// Interval for sqrt(k) - m with `bits` of precision, via the exact
    /// integer square root: s = floor(sqrt(k 4^bits)) brackets sqrt(k).
    fn surd_interval(k: u64, minus: u64, over: u64, bits: u32) -> RealInterval {
        let scaled = BigUint::from(k) << (2 * bits);
        let s = scaled.sqrt();
        let shift = BigUint::from(minus) << bits;
        let lo = Rational::new(
            BigInt::from(&s - &shift),
            BigInt::from(BigUint::from(over) << bits),
        );
        let hi = Rational::new(
            BigInt::from(&s + BigUint::one() - shift),
            BigInt::from(BigUint::from(over) << bits),
        );
        RealInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn sqrt2_minus_1_gives_all_twos() {
        // x = sqrt(2) - 1 is the fixed point of x -> 1/x - 2
        let x = surd_interval(2, 1, 1, 256);
        let exp = expand_real(&x, 5, 84).unwrap();
        assert_eq!(exp.word, CFWord::from_u64s(&[2, 2, 2, 2, 2]).unwrap());
        assert!(!exp.terminated);

        let exp = expand_real(&x, 40, 224).unwrap();
        assert!(exp.word.digits().iter().all(|d| *d == BigUint::from(2u32)));
    }

    #[test]
    fn golden_ratio_gives_all_ones() {
        // x = (sqrt(5) - 1)/2 is the fixed point of x -> 1/x - 1
        let x = surd_interval(5, 1, 2, 256);
        let exp = expand_real(&x, 5, 84).unwrap();
        assert_eq!(exp.word, CFWord::from_u64s(&[1, 1, 1, 1, 1]).unwrap());
    }

    #[test]
    fn exact_rational_terminates_with_flag() {
        let x = RealInterval::point(ratio(1, 2)).unwrap();
        let exp = expand_real(&x, 3, 128).unwrap();
        assert_eq!(exp.word, CFWord::from_u64s(&[2]).unwrap());
        assert!(exp.terminated);

        // enough digits available: no termination
        let x = RealInterval::point(ratio(5, 7)).unwrap();
        let exp = expand_real(&x, 2, 128).unwrap();
        assert_eq!(exp.word, CFWord::from_u64s(&[1, 2]).unwrap());
        assert!(!exp.terminated);
    }

    #[test]
    fn ambiguous_digit_is_a_precision_error_not_a_wrong_digit() {
        // interval straddling 1/2: the first digit could be 1 or 2
        let eps = ratio(1, 1 << 30) * ratio(1, 1 << 30) * ratio(1, 1 << 30);
        let x = RealInterval::new(ratio(1, 2) - &eps, ratio(1, 2) + &eps).unwrap();
        match expand_real(&x, 1, 68) {
            Err(Error::Precision(_)) => {}
            other => panic!("expected precision error, got {other:?}"),
        }
    }

    #[test]
    fn precision_budget_is_enforced() {
        let x = RealInterval::point(ratio(1, 3)).unwrap();
        assert!(matches!(expand_real(&x, 100, 64), Err(Error::Precision(_))));
        // too-wide interval rejected
        let wide = RealInterval::new(ratio(1, 4), ratio(1, 3)).unwrap();
        assert!(matches!(expand_real(&wide, 1, 68), Err(Error::Precision(_))));
    }

    proptest! {
        /// expand_real on the exact value reproduces the canonical digits.
        #[test]
        fn prop_point_expansion_reproduces_word(ds in proptest::collection::vec(1u64..500, 1..10)) {
            let w = CFWord::from_u64s(&ds).unwrap().canonicalize();
            let v = evaluate_cf(&w);
            if v.is_positive() && v < Rational::one() {
                let n = w.len();
                let x = RealInterval::point(v).unwrap();
                let exp = expand_real(&x, n, (4 * n + 64) as u32).unwrap();
                prop_assert_eq!(exp.word, w);
                prop_assert!(exp.terminated);
            }
        }

        /// Any point strictly inside a cylinder starts with that cylinder's digits;
        /// a narrow interval around it must reproduce them exactly.
        #[test]
        fn prop_interval_inside_cylinder_reproduces_digits(ds in proptest::collection::vec(1u64..50, 1..8)) {
            let w = CFWord::from_u64s(&ds).unwrap();
            let (iv, len) = cylinder_interval(&w);
            // midpoint of the cylinder, fattened by a tiny exact margin
            let mid = (&iv.left + &iv.right) / Rational::from_integer(2.into());
            let margin = len * ratio(1, u64::MAX) * ratio(1, u64::MAX) * ratio(1, u64::MAX);
            let x = RealInterval::new(&mid - &margin, &mid + &margin).unwrap();
            let n = w.len();
            if let Ok(exp) = expand_real(&x, n, (4 * n + 64) as u32) {
                prop_assert_eq!(exp.word.digits(), w.digits());
            }
        }
    }
}
