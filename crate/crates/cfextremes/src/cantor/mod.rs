//! The nested level-set construction behind the dimension lower bound.
//!
//! Digits are pinned per position: free up to `floor(phi(k)/k) + 1` before
//! the threshold index, and inside `[ceil(f(k)), floor(g(k))]` from it on.
//! A level-`n` interval is the closed hull of its admissible child
//! cylinders; child counts `m_n` and sibling-gap bounds `eps_n` feed the
//! dimension formula. Desk-scale families enumerate the tree with exact
//! rational endpoints; genuine doubly exponential parameters run in
//! log-only mode (counts and gaps, no nodes).

mod tree;

pub use tree::{build_levels, verify_separation, LevelMeta, LevelTree, MassAssignment, TreeNode};

use num::bigint::BigUint;
use num::{BigInt, One, Signed};

use crate::error::{Error, Result};
use crate::growth::{
    bound_f, bound_g, log_phi, logsumexp2, phi_exact, threshold_n, GrowthSpec, LogScalar,
};
use crate::rational::{ceil_to_biguint, floor_to_biguint, Rational};

/// Default cap on exact-mode enumeration.
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

/// Bit budget for a single exact `phi(k)` value.
const PHI_EXACT_BIT_BUDGET: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelMode {
    Exact,
    LogOnly,
}

/// Parameters of the construction: a growth spec, the threshold index, and
/// the arithmetic mode.
#[derive(Clone, Debug)]
pub struct ConstructionParams {
    pub spec: GrowthSpec,
    pub n_threshold: usize,
    pub mode: LevelMode,
}

impl ConstructionParams {
    pub fn new(spec: GrowthSpec, n_threshold: usize, mode: LevelMode) -> Result<Self> {
        if n_threshold == 0 {
            return Err(Error::domain("threshold index must be >= 1"));
        }
        Ok(ConstructionParams {
            spec,
            n_threshold,
            mode,
        })
    }

    /// Takes the threshold from the growth module's scan.
    pub fn with_auto_threshold(spec: GrowthSpec, mode: LevelMode) -> Result<Self> {
        let n = threshold_n(&spec)?;
        Self::new(spec, n, mode)
    }

    pub(crate) fn beta_rational(&self) -> Result<Rational> {
        crate::rational::from_f64_exact(self.spec.beta)
    }

    pub(crate) fn phi_exact(&self, k: usize) -> Result<Rational> {
        phi_exact(&self.spec, k, PHI_EXACT_BIT_BUDGET)
    }
}

/// The admissible digit range at one position.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolRange {
    Exact { lo: BigUint, hi: BigUint },
    Log { ln_lo: f64, ln_hi: f64 },
}

impl SymbolRange {
    pub fn exact_width(&self) -> Option<BigUint> {
        match self {
            SymbolRange::Exact { lo, hi } => Some(hi - lo + BigUint::one()),
            SymbolRange::Log { .. } => None,
        }
    }
}

/// Digit range at position `k`: `[1, floor(phi(k)/k) + 1]` below the
/// threshold, `[ceil(f(k)), floor(g(k))]` from it on.
pub fn symbol_range(params: &ConstructionParams, k: usize) -> Result<SymbolRange> {
    if k == 0 {
        return Err(Error::domain("symbol positions start at 1"));
    }
    let n = params.n_threshold;
    match params.mode {
        LevelMode::Exact => {
            let phi = params.phi_exact(k)?;
            let kq = Rational::from_integer(BigInt::from(k));
            if k < n {
                let hi = floor_to_biguint(&(phi / &kq))? + BigUint::one();
                Ok(SymbolRange::Exact {
                    lo: BigUint::one(),
                    hi,
                })
            } else {
                let beta = params.beta_rational()?;
                let f = (&beta - kq.recip()) * &phi;
                let g = (&beta + kq.recip()) * &phi;
                if !f.is_positive() {
                    return Err(Error::domain(format!(
                        "f({k}) is not positive; the threshold index is too small"
                    )));
                }
                let lo = ceil_to_biguint(&f)?;
                let hi = floor_to_biguint(&g)?;
                if lo > hi {
                    return Err(Error::domain(format!(
                        "empty digit range at position {k}: ceil(f) > floor(g)"
                    )));
                }
                Ok(SymbolRange::Exact { lo, hi })
            }
        }
        LevelMode::LogOnly => {
            if k < n {
                let ln_m = count_m(params, k)?.ln_value();
                Ok(SymbolRange::Log {
                    ln_lo: 0.0,
                    ln_hi: ln_m,
                })
            } else {
                let f = bound_f(&params.spec, k).ok_or_else(|| {
                    Error::domain(format!(
                        "f({k}) is not positive; the threshold index is too small"
                    ))
                })?;
                let g = bound_g(&params.spec, k);
                Ok(SymbolRange::Log {
                    ln_lo: f.ln_value(),
                    ln_hi: g.ln_value(),
                })
            }
        }
    }
}

/// Per-level child-count lower bound.
#[derive(Clone, Debug, PartialEq)]
pub enum CountM {
    Exact(BigUint),
    Log(LogScalar),
}

impl CountM {
    /// `ln m_n` in every representation.
    pub fn ln_value(&self) -> f64 {
        match self {
            CountM::Exact(m) => crate::rational::ln_biguint(m),
            CountM::Log(l) => l.ln_value(),
        }
    }

    pub fn as_log_scalar(&self) -> LogScalar {
        match self {
            CountM::Exact(m) => LogScalar::from_ln(crate::rational::ln_biguint(m)),
            CountM::Log(l) => *l,
        }
    }
}

/// `m_n = floor(phi(n)/n) + 1`, exactly when representable, otherwise in
/// log scale as `ln m_n ~ L(n) - ln n`.
pub fn count_m(params: &ConstructionParams, n: usize) -> Result<CountM> {
    if n == 0 {
        return Err(Error::domain("level counts start at 1"));
    }
    if let Ok(phi) = params.phi_exact(n) {
        let m = floor_to_biguint(&(phi / Rational::from_integer(BigInt::from(n))))? + BigUint::one();
        return Ok(CountM::Exact(m));
    }
    let l = log_phi(&params.spec, n);
    if l.ln_value().is_finite() {
        // ln(phi/n + 1), the +1 mattering only at desk scale
        let ln_ratio = l.ln_value() - (n as f64).ln();
        Ok(CountM::Log(LogScalar::from_ln(logsumexp2(ln_ratio, 0.0))))
    } else {
        // ln m ~ L - ln n; the shift is invisible at this magnitude
        Ok(CountM::Log(l))
    }
}

/// `ln eps_n` for the sibling-gap bound
/// `eps_n = 2^-(2n+3) (prod_(k<N) (phi(k)/k + 1) * prod_(N<=k<=n) (beta + 1/k) phi(k))^-2`,
/// extended below the threshold by truncating the second product.
pub fn gap_epsilon_log(params: &ConstructionParams, n: usize) -> Result<LogScalar> {
    if n == 0 {
        return Err(Error::domain("gap bounds start at level 1"));
    }
    // |ln eps_n| = (2n+3) ln 2 + 2 sum(log factors), accumulated as a
    // positive quantity so the alpha > 1 regime stays representable.
    let mut terms: Vec<LogScalar> = Vec::with_capacity(n + 1);
    terms.push(LogScalar::from_value((2 * n + 3) as f64 * std::f64::consts::LN_2)?);
    for k in 1..=n {
        let term = if k < params.n_threshold {
            // ln(phi(k)/k + 1)
            let l = log_phi(&params.spec, k);
            if l.ln_value().is_finite() {
                LogScalar::from_ln(logsumexp2(l.ln_value() - (k as f64).ln(), 0.0).ln())
            } else {
                l.ln_as_quantity()?
            }
        } else {
            // ln((beta + 1/k) phi(k)) = ln(beta + 1/k) + L(k)
            let g = bound_g(&params.spec, k);
            g.ln_as_quantity()?
        };
        terms.push(term.scale(2.0)?);
    }
    let magnitude = crate::growth::sum_quantities(&terms)?;
    Ok(LogScalar::from_ln_magnitude(false, magnitude.ln_value()))
}

/// Exact rational `eps_n`; the oracle for the log path at desk scale.
pub fn gap_epsilon_exact(params: &ConstructionParams, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::domain("gap bounds start at level 1"));
    }
    let mut product = Rational::one();
    for k in 1..=n {
        let phi = params.phi_exact(k)?;
        let kq = Rational::from_integer(BigInt::from(k));
        let factor = if k < params.n_threshold {
            phi / &kq + Rational::one()
        } else {
            (params.beta_rational()? + kq.recip()) * phi
        };
        product *= factor;
    }
    let squared = &product * &product;
    let pow2 = Rational::new(BigInt::one(), BigInt::one() << (2 * n + 3));
    Ok(pow2 / squared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ratio, to_f64};

    fn doubly_params() -> ConstructionParams {
        // (b=2, c=2, alpha=1, beta=1) has threshold 2
        let spec = GrowthSpec::doubly_exp(2.0, 2.0, 1.0, 1.0).unwrap();
        ConstructionParams::with_auto_threshold(spec, LevelMode::Exact).unwrap()
    }

    pub(super) fn surrogate_params() -> ConstructionParams {
        // phi(n) = 2^n, beta = 1: threshold 2, enumerable to depth 4+
        let spec = GrowthSpec::geometric(ratio(2, 1), 1.0).unwrap();
        ConstructionParams::with_auto_threshold(spec, LevelMode::Exact).unwrap()
    }

    fn exact_range(params: &ConstructionParams, k: usize) -> (u64, u64) {
        match symbol_range(params, k).unwrap() {
            SymbolRange::Exact { lo, hi } => (
                lo.to_string().parse().unwrap(),
                hi.to_string().parse().unwrap(),
            ),
            SymbolRange::Log { .. } => panic!("expected exact range"),
        }
    }

    #[test]
    fn symbol_range_examples() {
        let params = doubly_params();
        assert_eq!(params.n_threshold, 2);
        assert_eq!(exact_range(&params, 1), (1, 5));
        assert_eq!(exact_range(&params, 2), (8, 24));
        assert_eq!(exact_range(&params, 3), (171, 341));
    }

    #[test]
    fn count_m_examples() {
        let params = doubly_params();
        let values: Vec<u64> = (1..=3)
            .map(|n| match count_m(&params, n).unwrap() {
                CountM::Exact(m) => m.to_string().parse().unwrap(),
                CountM::Log(_) => panic!("expected exact count"),
            })
            .collect();
        assert_eq!(values, vec![5, 9, 86]);
    }

    #[test]
    fn count_m_log_mode_matches_exact_at_desk_scale() {
        let params = doubly_params();
        for n in 1..=4 {
            let exact = count_m(&params, n).unwrap().ln_value();
            let l = log_phi(&params.spec, n).ln_value() - (n as f64).ln();
            let approx = logsumexp2(l, 0.0);
            // the log path models m ~ phi/n + 1 without the floor
            assert!((exact - approx).abs() < 0.2, "n = {n}: {exact} vs {approx}");
        }
    }

    #[test]
    fn gap_epsilon_exact_value() {
        // eps_2 = 2^-7 (5 * 24)^-2 = 1/1843200
        let params = doubly_params();
        let eps = gap_epsilon_exact(&params, 2).unwrap();
        assert_eq!(eps, ratio(1, 1_843_200));
        let log = gap_epsilon_log(&params, 2).unwrap();
        let expected = to_f64(&eps).ln();
        assert!(
            (log.ln_value() - expected).abs() <= 1e-12 * expected.abs(),
            "{} vs {}",
            log.ln_value(),
            expected
        );
    }

    #[test]
    fn gap_epsilon_log_matches_exact_oracle() {
        for params in [doubly_params(), surrogate_params()] {
            for n in 1..=4 {
                let exactlog = crate::rational::ln_rational(&gap_epsilon_exact(&params, n).unwrap());
                let log = gap_epsilon_log(&params, n).unwrap().ln_value();
                assert!(
                    (log - exactlog).abs() <= 1e-9 * exactlog.abs(),
                    "level {n}: {log} vs {exactlog}"
                );
            }
        }
    }

    #[test]
    fn gap_epsilon_strictly_decreasing() {
        let spec = GrowthSpec::doubly_exp(2.0, 2.0, 1.0, 1.0).unwrap();
        let params =
            ConstructionParams::with_auto_threshold(spec, LevelMode::LogOnly).unwrap();
        let mut prev = f64::INFINITY;
        for n in params.n_threshold..params.n_threshold + 100 {
            let ln_eps = gap_epsilon_log(&params, n).unwrap().ln_value();
            assert!(ln_eps < prev, "eps did not shrink at level {n}");
            prev = ln_eps;
        }
    }

    #[test]
    fn gap_epsilon_log_only_regime_pinned() {
        // alpha = 2 at n = 40: ln eps is far beyond f64, the ln-ln field rules
        let spec = GrowthSpec::doubly_exp(2.0, 2.0, 2.0, 1.0).unwrap();
        let params = ConstructionParams::new(spec, 2, LevelMode::LogOnly).unwrap();
        let eps = gap_epsilon_log(&params, 40).unwrap();
        assert!(eps.ln_value() == f64::NEG_INFINITY);
        // |ln eps| ~ 2 L(40) = 2^1601 ln 2: ln|ln eps| ~ 1601 ln 2 + ln ln 2
        let expected = 1601.0 * std::f64::consts::LN_2 + std::f64::consts::LN_2.ln();
        assert!(
            (eps.ln_abs_ln() - expected).abs() < 1e-3,
            "{} vs {}",
            eps.ln_abs_ln(),
            expected
        );
    }

    #[test]
    fn surrogate_ranges_and_counts() {
        let params = surrogate_params();
        assert_eq!(params.n_threshold, 2);
        assert_eq!(exact_range(&params, 1), (1, 3));
        assert_eq!(exact_range(&params, 2), (2, 6));
        assert_eq!(exact_range(&params, 3), (6, 10));
        assert_eq!(exact_range(&params, 4), (12, 20));
        assert_eq!(exact_range(&params, 5), (26, 38));
        let ms: Vec<u64> = (1..=5)
            .map(|n| match count_m(&params, n).unwrap() {
                CountM::Exact(m) => m.to_string().parse().unwrap(),
                CountM::Log(_) => panic!(),
            })
            .collect();
        assert_eq!(ms, vec![3, 3, 3, 5, 7]);
    }

    #[test]
    fn log_only_mode_reports_log_ranges() {
        let spec = GrowthSpec::doubly_exp(2.0, 2.0, 2.0, 1.0).unwrap();
        let params = ConstructionParams::with_auto_threshold(spec, LevelMode::LogOnly).unwrap();
        match symbol_range(&params, 3).unwrap() {
            SymbolRange::Log { ln_lo, ln_hi } => {
                assert!(ln_lo < ln_hi);
                assert!(ln_lo > 0.0);
                // ln f(3) = ln(2/3) + 2^9 ln 2
                let expected = (2.0f64 / 3.0).ln() + 512.0 * std::f64::consts::LN_2;
                assert!((ln_lo - expected).abs() < 1e-9);
            }
            SymbolRange::Exact { .. } => panic!("expected log range"),
        }
        // far out the endpoints coincide at f64 granularity but stay ordered
        match symbol_range(&params, 30).unwrap() {
            SymbolRange::Log { ln_lo, ln_hi } => assert!(ln_lo <= ln_hi),
            SymbolRange::Exact { .. } => panic!("expected log range"),
        }
    }
}
