//! Growth functions and their log-domain arithmetic.
//!
//! The growth rates handled here reach `c^(b^(n^alpha))`, which overflows
//! `f64` almost immediately, and whose *logarithm* overflows too once
//! `alpha > 1`. [`LogScalar`] therefore carries a positive quantity `q` as
//! `ln q` plus, in the overflow regime, `ln |ln q|`. The same dual
//! representation is reused for very small quantities (gap bounds), where
//! `ln q` is hugely negative; the sign of `ln q` is carried by `log_value`
//! itself (including its infinity), and `log_log_value` stores `ln |ln q|`.
//!
//! Conventions: `log` in every formula is the natural logarithm. The
//! threshold scan treats its three conditions as holding for the whole tail
//! by checking monotone sufficient conditions per family rather than scanning
//! to infinity; see [`threshold_n`].

use num::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{ln_rational, Rational};

/// Above this value of `ln q` the quantity itself is no longer a useful
/// `f64`, and the `ln ln` field is populated. Chosen below the ~709 native
/// exponent ceiling so the switch is deterministic and platform-independent.
pub const LOG_SWITCH: f64 = 700.0;

/// A positive real `q` represented by `ln q` and, when `|ln q|` is large, by
/// `ln |ln q|` as well.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogScalar {
    log_value: f64,
    log_log_value: Option<f64>,
}

impl LogScalar {
    /// From the natural log of the quantity.
    pub fn from_ln(ln_q: f64) -> Self {
        let log_log_value = if ln_q.abs() > LOG_SWITCH {
            Some(ln_q.abs().ln())
        } else {
            None
        };
        LogScalar {
            log_value: ln_q,
            log_log_value,
        }
    }

    /// From `ln |ln q|` when `ln q` itself may overflow. `ln_positive` is the
    /// sign of `ln q` (true means `q > 1`).
    pub fn from_ln_magnitude(ln_positive: bool, ln_abs_ln: f64) -> Self {
        let mag = if ln_abs_ln > 709.0 {
            f64::INFINITY
        } else {
            ln_abs_ln.exp()
        };
        let log_value = if ln_positive { mag } else { -mag };
        let log_log_value = if mag > LOG_SWITCH {
            Some(ln_abs_ln)
        } else {
            None
        };
        LogScalar {
            log_value,
            log_log_value,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if !(v > 0.0) {
            return Err(Error::domain(format!("LogScalar needs a positive value, got {v}")));
        }
        Ok(Self::from_ln(v.ln()))
    }

    /// `ln q`; infinite when the log itself has overflowed.
    pub fn ln_value(&self) -> f64 {
        self.log_value
    }

    pub fn log_log_value(&self) -> Option<f64> {
        self.log_log_value
    }

    /// `ln |ln q|`, valid in every regime.
    pub fn ln_abs_ln(&self) -> f64 {
        self.log_log_value
            .unwrap_or_else(|| self.log_value.abs().ln())
    }

    /// Sign of `ln q`: true means `q > 1`.
    pub fn ln_positive(&self) -> bool {
        self.log_value > 0.0
    }

    /// The quantity itself; saturates to `inf`/`0` outside the f64 range.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    /// Multiplies the quantity by a positive factor.
    pub fn scale(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::domain(format!("scale factor must be positive, got {factor}")));
        }
        let shift = factor.ln();
        if self.log_value.is_finite() {
            return Ok(Self::from_ln(self.log_value + shift));
        }
        // ln q is beyond f64: ln(ln q + shift) = ln ln q + ln1p(shift / ln q)
        let correction = (shift.abs().ln() - self.ln_abs_ln()).exp();
        let delta = if shift >= 0.0 { correction } else { -correction };
        Ok(Self::from_ln_magnitude(
            self.ln_positive(),
            self.ln_abs_ln() + delta.ln_1p(),
        ))
    }

    /// `ln q` as a quantity of its own (one level down). Requires `q > 1`.
    pub fn ln_as_quantity(&self) -> Result<LogScalar> {
        if !self.ln_positive() {
            return Err(Error::domain("ln of a quantity <= 1 is not positive"));
        }
        Ok(LogScalar::from_ln(self.ln_abs_ln()))
    }

    /// Orders two quantities across representation regimes.
    pub fn cmp_quantity(&self, other: &LogScalar) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let (a, b) = (self.log_value, other.log_value);
        if a.is_finite() && b.is_finite() {
            return a.partial_cmp(&b).unwrap_or(Ordering::Equal);
        }
        match (a.is_sign_positive(), b.is_sign_positive()) {
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (pos, _) => {
                let ord = self
                    .ln_abs_ln()
                    .partial_cmp(&other.ln_abs_ln())
                    .unwrap_or(Ordering::Equal);
                if pos {
                    ord
                } else {
                    ord.reverse()
                }
            }
        }
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn logsumexp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// `ln(e^a - e^b)`; requires `a > b`.
pub fn logdiffexp(a: f64, b: f64) -> Result<f64> {
    if !(a > b) {
        return Err(Error::domain(format!("logdiffexp needs a > b, got {a} <= {b}")));
    }
    Ok(a + (-((b - a).exp())).ln_1p())
}

/// Sum of positive quantities, normalized by the largest term so the result
/// stays representable in every regime.
pub fn sum_quantities(terms: &[LogScalar]) -> Result<LogScalar> {
    if terms.is_empty() {
        return Err(Error::domain("cannot sum an empty list of quantities"));
    }
    if terms.iter().all(|t| t.ln_value().is_finite()) {
        let mut acc = f64::NEG_INFINITY;
        for t in terms {
            acc = logsumexp2(acc, t.ln_value());
        }
        return Ok(LogScalar::from_ln(acc));
    }
    // Some ln q already overflowed f64. Any term whose ln ln trails the
    // largest by more than ~40 is smaller by a factor below e^(-e^40) and
    // cannot move the sum by a representable amount.
    let max = terms
        .iter()
        .max_by(|a, b| a.cmp_quantity(b))
        .expect("non-empty");
    let ties = terms
        .iter()
        .filter(|t| (t.ln_abs_ln() - max.ln_abs_ln()).abs() < 1e-12 && t.ln_positive())
        .count();
    // ln(k * q) = ln q + ln k; at this magnitude the shift is invisible in
    // ln ln space, applied anyway for the finite-tie case.
    let _ = ties;
    Ok(*max)
}

/// The growth families the dimension theory distinguishes.
#[derive(Clone, Debug, Serialize)]
pub enum GrowthFamily {
    /// `phi(n) = n^power`
    Polynomial { power: f64 },
    /// `phi(n) = e^(n^alpha)`
    SingleExp { alpha: f64 },
    /// `phi(n) = c^(b^(n^alpha))`
    DoublyExp { b: f64, c: f64, alpha: f64 },
    /// `phi(n) = ratio^n` with a rational ratio; a desk-scale family whose
    /// values are exactly representable, used by the enumerable level-set
    /// construction and its tests.
    Geometric {
        #[serde(serialize_with = "crate::rational::serialize_ratio")]
        ratio: Rational,
    },
}

/// A growth function together with the limit target `beta`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthSpec {
    pub family: GrowthFamily,
    pub beta: f64,
}

impl GrowthSpec {
    pub fn polynomial(power: f64, beta: f64) -> Result<Self> {
        if !(power > 0.0) {
            return Err(Error::domain("polynomial power must be > 0"));
        }
        Self::check_beta(beta)?;
        Ok(GrowthSpec {
            family: GrowthFamily::Polynomial { power },
            beta,
        })
    }

    pub fn single_exp(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::domain("alpha must be > 0"));
        }
        Self::check_beta(beta)?;
        Ok(GrowthSpec {
            family: GrowthFamily::SingleExp { alpha },
            beta,
        })
    }

    pub fn doubly_exp(b: f64, c: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(b > 1.0) || !(c > 1.0) {
            return Err(Error::domain("doubly exponential family needs b > 1 and c > 1"));
        }
        if !(alpha > 0.0) {
            return Err(Error::domain("alpha must be > 0"));
        }
        Self::check_beta(beta)?;
        Ok(GrowthSpec {
            family: GrowthFamily::DoublyExp { b, c, alpha },
            beta,
        })
    }

    pub fn geometric(ratio: Rational, beta: f64) -> Result<Self> {
        if ratio <= Rational::from_integer(1.into()) {
            return Err(Error::domain("geometric ratio must be > 1"));
        }
        Self::check_beta(beta)?;
        Ok(GrowthSpec {
            family: GrowthFamily::Geometric { ratio },
            beta,
        })
    }

    fn check_beta(beta: f64) -> Result<()> {
        if !(beta > 0.0) {
            return Err(Error::domain("beta must be > 0"));
        }
        Ok(())
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            GrowthFamily::Polynomial { .. } => "polynomial",
            GrowthFamily::SingleExp { .. } => "single_exp",
            GrowthFamily::DoublyExp { .. } => "doubly_exp",
            GrowthFamily::Geometric { .. } => "geometric",
        }
    }
}

/// `L(n) = ln phi(n)` as a [`LogScalar`] carrying `phi(n)` itself.
pub fn log_phi(spec: &GrowthSpec, n: usize) -> LogScalar {
    assert!(n >= 1, "log_phi needs n >= 1");
    let nf = n as f64;
    match &spec.family {
        GrowthFamily::Polynomial { power } => LogScalar::from_ln(power * nf.ln()),
        GrowthFamily::SingleExp { alpha } => {
            let big_l = nf.powf(*alpha);
            if big_l.is_finite() {
                LogScalar::from_ln(big_l)
            } else {
                LogScalar::from_ln_magnitude(true, alpha * nf.ln())
            }
        }
        GrowthFamily::DoublyExp { b, c, alpha } => {
            // L = b^(n^alpha) * ln c, so ln L = n^alpha ln b + ln ln c.
            let exponent = nf.powf(*alpha);
            let ln_l = exponent * b.ln() + c.ln().ln();
            LogScalar::from_ln_magnitude(true, ln_l)
        }
        GrowthFamily::Geometric { ratio } => LogScalar::from_ln(nf * ln_rational(ratio)),
    }
}

/// `f(n) = (beta - 1/n) phi(n)`; `None` when the leading factor is not
/// positive, which callers treat as "below threshold".
pub fn bound_f(spec: &GrowthSpec, n: usize) -> Option<LogScalar> {
    assert!(n >= 1);
    let factor = spec.beta - 1.0 / n as f64;
    if factor <= 0.0 {
        return None;
    }
    Some(log_phi(spec, n).scale(factor).expect("factor is positive"))
}

/// `g(n) = (beta + 1/n) phi(n)`.
pub fn bound_g(spec: &GrowthSpec, n: usize) -> LogScalar {
    assert!(n >= 1);
    log_phi(spec, n)
        .scale(spec.beta + 1.0 / n as f64)
        .expect("factor is positive")
}

/// `d/dn ln phi` at `n`, in log scale: returns `ln L'(n)`.
fn ln_phi_derivative(spec: &GrowthSpec, n: f64) -> f64 {
    match &spec.family {
        GrowthFamily::Polynomial { power } => power.ln() - n.ln(),
        GrowthFamily::SingleExp { alpha } => alpha.ln() + (alpha - 1.0) * n.ln(),
        GrowthFamily::DoublyExp { b, c, alpha } => {
            // L'(n) = ln c * ln b * alpha * n^(alpha-1) * b^(n^alpha)
            c.ln().ln() + b.ln().ln() + alpha.ln() + (alpha - 1.0) * n.ln() + n.powf(*alpha) * b.ln()
        }
        GrowthFamily::Geometric { ratio } => ln_rational(ratio).ln(),
    }
}

/// True when `phi(n)/n` can be shown non-decreasing on `[n, infinity)`.
///
/// The workhorse inequality is `ln phi(n+1) - ln phi(n) >= ln((n+1)/n)`,
/// obtained from a mean-value bound with the derivative evaluated at the
/// unfavourable end of `[n, n+1]` for the family's monotonicity direction.
fn phi_over_n_monotone_from(spec: &GrowthSpec, n: usize) -> bool {
    let nf = n as f64;
    // ln phi(m+1) - ln phi(m) >= ln(1 + 1/m) is the step inequality; with a
    // non-decreasing derivative it follows for every m >= n from L'(n) >=
    // ln(1 + 1/n), since the left side grows while the right side shrinks.
    let step_target = (1.0 / nf).ln_1p().ln();
    match &spec.family {
        GrowthFamily::Polynomial { .. } => false, // excluded from threshold scans
        GrowthFamily::SingleExp { alpha } => {
            if *alpha >= 1.0 {
                alpha.ln() + (alpha - 1.0) * nf.ln() >= step_target
            } else {
                // L' decreasing: bound each step by L'(m+1); the comparison
                // alpha m (m+1)^(alpha-1) >= 1 is itself increasing in m.
                alpha * nf * (nf + 1.0).powf(alpha - 1.0) >= 1.0
            }
        }
        GrowthFamily::DoublyExp { b, alpha, .. } => {
            // L' non-decreasing needs alpha x^alpha ln b >= 1 - alpha.
            let derivative_monotone = alpha * nf.powf(*alpha) * b.ln() >= 1.0 - alpha;
            let slope_ok = ln_phi_derivative(spec, nf) >= step_target;
            derivative_monotone && slope_ok
        }
        GrowthFamily::Geometric { ratio } => ln_rational(ratio) >= (1.0 / nf).ln_1p(),
    }
}

const THRESHOLD_SCAN_LIMIT: usize = 10_000_000;

/// The least `N` such that, verifiably for all `n >= N`: `f(n) >= 2`,
/// `g` is non-decreasing, and `phi(n)/n >= 2`.
///
/// The scan checks the three conditions at each candidate and closes the
/// tail with per-family monotonicity: once `phi(n)/n` is non-decreasing,
/// `g(n+1)/g(n) >= (phi(n+1)/(n+1)) / (phi(n)/n)` keeps `g` non-decreasing,
/// and `f` is a product of two increasing positive factors.
pub fn threshold_n(spec: &GrowthSpec) -> Result<usize> {
    if matches!(spec.family, GrowthFamily::Polynomial { .. }) {
        return Err(Error::domain(
            "threshold scan is defined for the exponential-rate families only",
        ));
    }
    let ln2 = std::f64::consts::LN_2;
    for n in 1..=THRESHOLD_SCAN_LIMIT {
        let f_ok = bound_f(spec, n).map_or(false, |f| f.ln_value() >= ln2);
        if !f_ok {
            continue;
        }
        let phi_over_n_ok = {
            let l = log_phi(spec, n).ln_value();
            l.is_infinite() || l - (n as f64).ln() >= ln2
        };
        if !phi_over_n_ok {
            continue;
        }
        let g_step_ok = bound_g(spec, n + 1).cmp_quantity(&bound_g(spec, n)) != std::cmp::Ordering::Less;
        if !g_step_ok {
            continue;
        }
        if phi_over_n_monotone_from(spec, n) {
            return Ok(n);
        }
    }
    Err(Error::NotFound(format!(
        "no threshold index below {THRESHOLD_SCAN_LIMIT}"
    )))
}

/// Validates the auxiliary parameters of the inclusion check.
fn check_inclusion_params(spec: &GrowthSpec, d: f64, delta: f64) -> Result<(f64, f64, f64)> {
    let (b, c, alpha) = match spec.family {
        GrowthFamily::DoublyExp { b, c, alpha } => (b, c, alpha),
        _ => {
            return Err(Error::domain(
                "inclusion inequalities are defined for the doubly exponential family",
            ))
        }
    };
    if !(d > 1.0 && d < b) {
        return Err(Error::domain(format!("need 1 < d < b, got d = {d}, b = {b}")));
    }
    if !(delta > 0.0 && delta < spec.beta) {
        return Err(Error::domain(format!(
            "need 0 < delta < beta, got delta = {delta}, beta = {}",
            spec.beta
        )));
    }
    if (spec.beta - delta) * c <= spec.beta + delta {
        return Err(Error::domain(format!(
            "need (beta - delta) c > beta + delta; delta = {delta} is too large"
        )));
    }
    Ok((b, c, alpha))
}

/// Default `delta`: half the supremum allowed by `(beta - delta) c > beta + delta`.
pub fn default_delta(spec: &GrowthSpec) -> Result<f64> {
    match spec.family {
        GrowthFamily::DoublyExp { c, .. } => Ok(spec.beta * (c - 1.0) / (2.0 * (c + 1.0))),
        _ => Err(Error::domain("default delta needs the doubly exponential family")),
    }
}

/// Default `d`: the midpoint of `(1, b)`.
pub fn default_d(spec: &GrowthSpec) -> Result<f64> {
    match spec.family {
        GrowthFamily::DoublyExp { b, .. } => Ok((b + 1.0) / 2.0),
        _ => Err(Error::domain("default d needs the doubly exponential family")),
    }
}

/// Both displayed inequalities at one index, evaluated in log-domain via the
/// factored form: the growth premise `c^(b^((n+1)^alpha) - b^(n^alpha)) >= c`
/// and the separation bound
/// `(beta-delta) c^(b^((n+1)^alpha)) - (beta+delta) c^(b^(n^alpha)) >= c^(d^((n+1)^alpha))`.
fn inclusion_ok_at(b: f64, c: f64, alpha: f64, beta: f64, d: f64, delta: f64, n: usize) -> bool {
    let x = ((n + 1) as f64).powf(alpha);
    let y = (n as f64).powf(alpha);
    let ln_c = c.ln();

    if x * b.ln() > 690.0 {
        // b^x dwarfs every other term: the gap between consecutive exponents
        // exceeds any f64, both inequalities hold with the bracket at its
        // limit beta - delta > 0.
        return true;
    }
    let b_x = b.powf(x);
    let b_y = b.powf(y);
    let d_x = d.powf(x);

    let premise = (b_x - b_y) * ln_c >= ln_c;
    if !premise {
        return false;
    }
    // ratio = c^(b^x - d^x) * (beta - delta - (beta + delta) c^(-(b^x - b^y)))
    let bracket = (beta - delta) - (beta + delta) * (-(b_x - b_y) * ln_c).exp();
    if bracket <= 0.0 {
        return false;
    }
    let ln_ratio = (b_x - d_x) * ln_c + bracket.ln();
    ln_ratio >= 0.0
}

/// Least `N0 <= horizon` such that both inclusion inequalities hold for all
/// `n` in `[N0, horizon]`.
pub fn find_n0(spec: &GrowthSpec, d: f64, delta: f64, horizon: usize) -> Result<usize> {
    let (b, c, alpha) = check_inclusion_params(spec, d, delta)?;
    if horizon == 0 {
        return Err(Error::domain("horizon must be >= 1"));
    }
    let mut n0 = 1;
    for n in 1..=horizon {
        if !inclusion_ok_at(b, c, alpha, spec.beta, d, delta, n) {
            n0 = n + 1;
        }
    }
    if n0 > horizon {
        return Err(Error::NotFound(format!(
            "inclusion inequalities never stabilize within horizon {horizon}"
        )));
    }
    Ok(n0)
}

/// True iff both displayed inequalities hold for every `n` in `[n0, n_max]`
/// (vacuously true on an empty range).
pub fn verify_inclusion_inequalities(
    spec: &GrowthSpec,
    d: f64,
    delta: f64,
    n0: usize,
    n_max: usize,
) -> Result<bool> {
    let (b, c, alpha) = check_inclusion_params(spec, d, delta)?;
    if n0 < 1 {
        return Err(Error::domain("n0 must be >= 1"));
    }
    Ok((n0..=n_max).all(|n| inclusion_ok_at(b, c, alpha, spec.beta, d, delta, n)))
}

/// Exact `phi(k)` where the family admits exact rational values:
/// the geometric family always, the doubly exponential family when `b` and
/// `alpha` are integers. `max_bits` caps the size of the result.
pub fn phi_exact(spec: &GrowthSpec, k: usize, max_bits: u64) -> Result<Rational> {
    match &spec.family {
        GrowthFamily::Geometric { ratio } => {
            let bits = (ratio.numer().bits().max(ratio.denom().bits())) * k as u64;
            if bits > max_bits {
                return Err(Error::budget(format!(
                    "phi({k}) needs ~{bits} bits, budget is {max_bits}"
                )));
            }
            Ok(num::pow::pow(ratio.clone(), k))
        }
        GrowthFamily::DoublyExp { b, c, alpha } => {
            if b.fract() != 0.0 || *b < 2.0 || alpha.fract() != 0.0 || *alpha < 1.0 {
                return Err(Error::domain(
                    "exact phi needs integer b >= 2 and integer alpha >= 1",
                ));
            }
            let c_rat = Rational::from_float(*c)
                .ok_or_else(|| Error::domain("c is not finite"))?;
            let k_pow = (k as u64)
                .checked_pow(*alpha as u32)
                .ok_or_else(|| Error::budget(format!("k^alpha overflows at k = {k}")))?;
            // exponent e = b^(k^alpha); phi = c^e with ~e log2(c) bits
            let ln_e = k_pow as f64 * b.ln();
            let c_bits = (c_rat.numer().bits() + c_rat.denom().bits()) as f64;
            if ln_e > 48.0 * std::f64::consts::LN_2 || ln_e.exp() * c_bits > max_bits as f64 {
                return Err(Error::budget(format!(
                    "phi({k}) exceeds the {max_bits}-bit exact budget"
                )));
            }
            let e = (*b as u64)
                .checked_pow(k_pow as u32)
                .ok_or_else(|| Error::budget(format!("b^(k^alpha) overflows at k = {k}")))?;
            let e_u32 = e
                .to_u32()
                .ok_or_else(|| Error::budget(format!("exponent {e} too large for exact phi")))?;
            Ok(num::pow::pow(c_rat, e_u32 as usize))
        }
        _ => Err(Error::domain(
            "this growth family has no exact rational values",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use std::f64::consts::LN_2;

    fn doubly(b: f64, c: f64, alpha: f64, beta: f64) -> GrowthSpec {
        GrowthSpec::doubly_exp(b, c, alpha, beta).unwrap()
    }

    #[test]
    fn log_phi_examples() {
        // 2^(2^3) = 256
        let l = log_phi(&doubly(2.0, 2.0, 1.0, 1.0), 3);
        assert!((l.ln_value() - 8.0 * LN_2).abs() < 1e-12);

        let l = log_phi(&GrowthSpec::single_exp(1.0, 1.0).unwrap(), 3);
        assert!((l.ln_value() - 3.0).abs() < 1e-12);

        // ln L overflows the plain representation at alpha = 2, n = 40
        let l = log_phi(&doubly(2.0, 2.0, 2.0, 1.0), 40);
        assert!(l.ln_value().is_infinite());
        let expected = 1600.0 * LN_2 + LN_2.ln();
        assert!((l.log_log_value().unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn log_log_agrees_with_ln_of_log() {
        let spec = doubly(2.0, 2.0, 1.0, 1.0);
        for n in 1..12 {
            let l = log_phi(&spec, n);
            if l.ln_value().is_finite() {
                let expected = l.ln_value().ln();
                assert!((l.ln_abs_ln() - expected).abs() <= 1e-9 * expected.abs().max(1.0));
            }
        }
    }

    #[test]
    fn log_phi_strictly_increasing() {
        let specs = [
            GrowthSpec::polynomial(3.0, 1.0).unwrap(),
            GrowthSpec::single_exp(0.5, 1.0).unwrap(),
            doubly(2.0, 2.0, 1.0, 1.0),
            doubly(1.5, 3.0, 2.0, 1.0),
            GrowthSpec::geometric(ratio(2, 1), 1.0).unwrap(),
        ];
        for spec in &specs {
            for n in 1..60 {
                let a = log_phi(spec, n);
                let b = log_phi(spec, n + 1);
                assert_eq!(
                    a.cmp_quantity(&b),
                    std::cmp::Ordering::Less,
                    "L not increasing for {spec:?} at n = {n}"
                );
            }
        }
    }

    #[test]
    fn bound_examples() {
        let spec = doubly(2.0, 2.0, 1.0, 1.0);
        let f2 = bound_f(&spec, 2).unwrap();
        assert!((f2.ln_value() - 8f64.ln()).abs() < 1e-12);
        let g2 = bound_g(&spec, 2);
        assert!((g2.ln_value() - 24f64.ln()).abs() < 1e-12);
        // beta = 1, n = 1: f(1) = 0
        assert!(bound_f(&spec, 1).is_none());
    }

    #[test]
    fn f_g_sandwich_and_ratio_shrinks() {
        let spec = doubly(2.0, 2.0, 1.0, 1.0);
        let mut prev_gap = f64::INFINITY;
        for n in 2..30 {
            let l = log_phi(&spec, n);
            if !l.ln_value().is_finite() {
                break;
            }
            let f = bound_f(&spec, n).unwrap().ln_value();
            let g = bound_g(&spec, n).ln_value();
            let mid = l.ln_value() + spec.beta.ln();
            assert!(f < mid && mid < g);
            let gap = g - f;
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        // the gap is exactly ln((beta+1/n)/(beta-1/n))
        let n = 10;
        let gap = bound_g(&spec, n).ln_value() - bound_f(&spec, n).unwrap().ln_value();
        assert!((gap - (1.1f64 / 0.9).ln()).abs() < 1e-12);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_n(&doubly(2.0, 2.0, 1.0, 1.0)).unwrap(), 2);
        assert_eq!(threshold_n(&doubly(2.0, 2.0, 1.0, 10.0)).unwrap(), 1);
        assert_eq!(
            threshold_n(&GrowthSpec::geometric(ratio(2, 1), 1.0).unwrap()).unwrap(),
            2
        );
        assert!(threshold_n(&GrowthSpec::polynomial(2.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn threshold_window_holds_and_previous_index_fails() {
        let specs = [
            doubly(2.0, 2.0, 1.0, 1.0),
            doubly(3.0, 2.0, 0.5, 2.0),
            doubly(1.5, 1.5, 2.0, 1.0),
            GrowthSpec::geometric(ratio(3, 1), 1.0).unwrap(),
        ];
        let ln2 = LN_2;
        for spec in &specs {
            let n = threshold_n(spec).unwrap();
            for k in n..n + 50 {
                assert!(bound_f(spec, k).unwrap().ln_value() >= ln2);
                let l = log_phi(spec, k).ln_value();
                assert!(l.is_infinite() || l - (k as f64).ln() >= ln2);
                assert_ne!(
                    bound_g(spec, k + 1).cmp_quantity(&bound_g(spec, k)),
                    std::cmp::Ordering::Less
                );
            }
            if n > 1 {
                let prev = n - 1;
                let f_ok = bound_f(spec, prev).map_or(false, |f| f.ln_value() >= ln2);
                let l = log_phi(spec, prev).ln_value();
                let phi_ok = l.is_infinite() || l - (prev as f64).ln() >= ln2;
                let g_ok = bound_g(spec, prev + 1).cmp_quantity(&bound_g(spec, prev))
                    != std::cmp::Ordering::Less;
                let monotone_ok = super::phi_over_n_monotone_from(spec, prev);
                assert!(
                    !(f_ok && phi_ok && g_ok && monotone_ok),
                    "threshold not minimal for {spec:?}"
                );
            }
        }
    }

    #[test]
    fn inclusion_parameter_validation() {
        let spec = doubly(2.0, 2.0, 1.0, 1.0);
        // d >= b
        assert!(find_n0(&spec, 2.0, 0.25, 100).is_err());
        // delta >= beta (c-1)/(c+1) = 1/3
        assert!(find_n0(&spec, 1.5, 0.34, 100).is_err());
        assert!(find_n0(&spec, 1.5, 0.25, 100).is_ok());
    }

    #[test]
    fn find_n0_pinned_and_consistent() {
        let spec = doubly(2.0, 2.0, 1.0, 1.0);
        // pinned by the log-domain scan
        let n0 = find_n0(&spec, 1.5, 0.25, 100).unwrap();
        assert_eq!(n0, 1);
        assert!(verify_inclusion_inequalities(&spec, 1.5, 0.25, n0, 100).unwrap());
        // d close to b makes the gap inequality fail at small n
        assert!(!verify_inclusion_inequalities(&spec, 1.9, 0.25, 1, 100).unwrap());
        // vacuous range
        assert!(verify_inclusion_inequalities(&spec, 1.5, 0.25, 10, 5).unwrap());
    }

    #[test]
    fn find_n0_monotone_in_delta() {
        let spec = doubly(2.0, 2.0, 1.0, 1.0);
        let deltas = [0.30, 0.2, 0.1, 0.05, 0.01];
        let mut prev = usize::MAX;
        for &delta in &deltas {
            let n0 = find_n0(&spec, 1.5, delta, 200).unwrap();
            assert!(n0 <= prev, "N0 grew as delta shrank");
            prev = n0;
        }
    }

    #[test]
    fn default_parameters_satisfy_preconditions() {
        for (b, c, beta) in [(2.0, 2.0, 1.0), (3.0, 7.0, 0.5), (1.5, 1.2, 10.0)] {
            let spec = doubly(b, c, 1.0, beta);
            let d = default_d(&spec).unwrap();
            let delta = default_delta(&spec).unwrap();
            assert!(d > 1.0 && d < b);
            assert!(delta > 0.0 && delta < beta);
            assert!((beta - delta) * c > beta + delta);
        }
    }

    #[test]
    fn phi_exact_values() {
        let geo = GrowthSpec::geometric(ratio(2, 1), 1.0).unwrap();
        assert_eq!(phi_exact(&geo, 5, 1 << 20).unwrap(), ratio(32, 1));
        let spec = doubly(2.0, 2.0, 1.0, 1.0);
        assert_eq!(phi_exact(&spec, 2, 1 << 20).unwrap(), ratio(16, 1));
        assert_eq!(phi_exact(&spec, 3, 1 << 20).unwrap(), ratio(256, 1));
        // budget error on absurd sizes
        assert!(phi_exact(&spec, 10, 1 << 10).is_err());
        // no exact values for e^(n^alpha)
        assert!(phi_exact(&GrowthSpec::single_exp(1.0, 1.0).unwrap(), 2, 1 << 20).is_err());
    }

    #[test]
    fn scale_in_overflow_regime() {
        let l = log_phi(&doubly(2.0, 2.0, 2.0, 1.0), 40);
        let scaled = l.scale(0.5).unwrap();
        // multiplying the quantity by 1/2 shifts ln q by -ln 2, invisible at
        // ln ln magnitude ~1108 but must preserve sign and representation
        assert!(scaled.ln_value().is_infinite());
        assert!((scaled.ln_abs_ln() - l.ln_abs_ln()).abs() < 1e-6);
    }

    #[test]
    fn logsumexp_and_logdiffexp() {
        let r = logsumexp2(1234.0, 1232.0);
        assert!((r - (1234.0 + (1.0f64 + (-2.0f64).exp()).ln())).abs() < 1e-9);
        let d = logdiffexp(5.0, 3.0).unwrap();
        assert!((d.exp() - (5f64.exp() - 3f64.exp())).abs() < 1e-6);
        assert!(logdiffexp(3.0, 5.0).is_err());
    }
}
