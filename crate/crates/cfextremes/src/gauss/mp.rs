//! Fixed-point arithmetic for the sampler: `2^u - 1` evaluated with rigorous
//! directed rounding at thousands of bits.
//!
//! Values are integers at scale `2^-P`. Every routine returns a floor
//! approximation together with an error bound in ulps, so the caller can
//! hand the result to the expansion code as an honest enclosure.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::BigUint;
use num::{One, Zero};
use rand::RngCore;

use crate::cf::RealInterval;

/// Guard bits kept beyond the requested precision; the series and product
/// errors stay far below 2^guard ulps.
const GUARD_BITS: u32 = 64;

/// `ln 2 * 2^scale` as `[value, value + 2]`, from `ln 2 = 2 atanh(1/3)`:
/// every series term is a pair of exact small divisions, so the whole
/// computation is linear in the bit size.
fn ln2_fixed_uncached(scale: u32) -> BigUint {
    let work = scale + 32;
    // p_j = 2 / 3^(2j+1) at scale `work`; term_j = p_j / (2j+1)
    let mut p = (BigUint::one() << (work + 1)) / 3u32;
    let mut acc = BigUint::zero();
    let mut j = 0u64;
    while !p.is_zero() {
        acc += &p / (2 * j + 1);
        p /= 9u32;
        j += 1;
    }
    // Each term under-counts by < 3 ulps at the working scale and the
    // dropped tail is below one working ulp; with j <= work/3 terms the
    // total undershoot stays below 3j + 2 < 2^32, i.e. below 2 output ulps.
    acc >> 32
}

fn ln2_fixed(scale: u32) -> Arc<BigUint> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<BigUint>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&scale) {
        return v.clone();
    }
    let computed = Arc::new(ln2_fixed_uncached(scale));
    cache
        .lock()
        .unwrap()
        .entry(scale)
        .or_insert(computed)
        .clone()
}

/// `e^(z/2^scale) * 2^scale` as `[acc, acc + err]`; requires `z/2^scale < 1`.
fn exp_fixed(z: &BigUint, scale: u32) -> (BigUint, u64) {
    debug_assert!(z.bits() <= scale as u64, "exp argument must be below 1");
    let mut acc = BigUint::one() << scale;
    let mut term = BigUint::one() << scale;
    let mut k = 0u64;
    while !term.is_zero() {
        k += 1;
        term = ((&term * z) >> scale) / k;
        acc += &term;
    }
    // Per-term undershoot e_k <= 0.7 e_(k-1) + 2 stays below 7 ulps; the
    // dropped tail is below 24 ulps.
    (acc, 7 * k + 24)
}

/// `x = 2^(u / 2^precision_bits) - 1` as a rigorous dyadic enclosure of
/// width far below `2^-precision_bits`. Requires `0 < u < 2^precision_bits`.
pub fn pow2_minus_one(u: &BigUint, precision_bits: u32) -> RealInterval {
    assert!(!u.is_zero(), "u must be positive");
    assert!(
        u.bits() <= precision_bits as u64,
        "u must lie below 2^precision_bits"
    );
    let scale = precision_bits + GUARD_BITS;
    let ln2 = ln2_fixed(scale);
    // z = floor(u ln2 / 2^B) is within 3 ulps below the exact u ln 2 2^(P-B)
    let z = (u * ln2.as_ref()) >> precision_bits;
    let (acc, err) = exp_fixed(&z, scale);
    // undo the 1 in 2^u = 1 + (2^u - 1); the +8 covers the z truncation
    let mantissa = acc - (BigUint::one() << scale);
    RealInterval::from_dyadic(mantissa, BigUint::from(err + 8), scale)
        .expect("sampler enclosure is a valid interval in [0,1)")
}

/// Draws `u` uniform on the dyadics `{1, ..., 2^B - 1} / 2^B` (zero is
/// resampled) and returns `2^u - 1`, which has distribution function
/// `log2(1 + x)`: exactly the Gauss measure.
pub fn sample_gauss(rng: &mut impl RngCore, precision_bits: u32) -> RealInterval {
    assert!(precision_bits >= 8, "precision_bits must be at least 8");
    let nbytes = ((precision_bits + 7) / 8) as usize;
    let drop_bits = (8 * nbytes) as u32 - precision_bits;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        let u = BigUint::from_bytes_le(&buf) >> drop_bits;
        if !u.is_zero() {
            return pow2_minus_one(&u, precision_bits);
        }
    }
}
