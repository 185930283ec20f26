//! Exact rationals and the few float bridges the rest of the crate needs.
//!
//! All exact arithmetic is carried by [`num::BigRational`]; the type keeps a
//! positive denominator and a fully reduced fraction after every operation,
//! which is exactly the invariant the domain types require.

use num::bigint::{BigInt, BigUint, Sign};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision fraction.
pub type Rational = BigRational;

/// `p/q` from unsigned parts.
pub fn ratio(p: u64, q: u64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses the `"num/den"` wire form (also accepts a bare integer).
pub fn parse_ratio(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::domain(format!("invalid rational {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::domain(format!("invalid rational {s:?}")))?;
    if den.is_zero() {
        return Err(Error::domain(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Serializes as `"num/den"`; rationals never lose precision on the wire.
pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// The exact dyadic rational equal to a finite `f64`.
pub fn from_f64_exact(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::domain(format!("{x} is not finite")))
}

/// Natural log of a positive big integer, accurate to a few ulps even when
/// the integer exceeds the `f64` range.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().expect("fits in f64").ln();
    }
    // n = m * 2^(bits-53) with m holding the top 53 bits.
    let shift = bits - 53;
    let m = (n >> shift).to_f64().expect("53-bit mantissa");
    m.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational, computed from the exact numerator and
/// denominator and rounded once at the end.
pub fn ln_rational(r: &Rational) -> f64 {
    debug_assert!(r.is_positive(), "ln of non-positive rational");
    let (num, den) = (r.numer(), r.denom());
    ln_biguint(num.magnitude()) - ln_biguint(den.magnitude())
}

/// Best-effort `f64` for a rational of any magnitude.
pub fn to_f64(r: &Rational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() || r.numer().bits() > 1023 {
            return x;
        }
    }
    let sign = match r.numer().sign() {
        Sign::Minus => -1.0,
        Sign::NoSign => return 0.0,
        Sign::Plus => 1.0,
    };
    sign * ln_rational(&r.abs()).exp()
}

/// Floor of a non-negative rational as a big natural.
pub fn floor_to_biguint(r: &Rational) -> Result<BigUint> {
    if r.is_negative() {
        return Err(Error::domain(format!("floor of negative {r}")));
    }
    Ok(r.floor().numer().magnitude().clone())
}

/// Ceiling of a non-negative rational as a big natural.
pub fn ceil_to_biguint(r: &Rational) -> Result<BigUint> {
    if r.is_negative() {
        return Err(Error::domain(format!("ceil of negative {r}")));
    }
    Ok(r.ceil().numer().magnitude().clone())
}

pub fn one() -> Rational {
    Rational::one()
}

/// Serde helper: rationals go over the wire as `"num/den"` strings.
pub fn serialize_ratio<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

/// Serde helper for `Option<Rational>`.
pub fn serialize_opt_ratio<S: serde::Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&format_ratio(r)),
        None => s.serialize_none(),
    }
}
