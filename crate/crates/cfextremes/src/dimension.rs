//! Dimension formulas: the closed-form table, the nested-construction lower
//! bound, the remark-style liminf formula, the upper-bound table, and an
//! empirical box-counting estimator.
//!
//! The liminf formulas are approximated by the minimum of the partial ratios
//! over a tail window (by default `[n_max/2, n_max]`); the ratios involved
//! are eventually monotone, so the tail minimum converges to the liminf.
//! Sums are evaluated in log scale, normalized by the largest term, so the
//! regimes where even `ln phi(n)` overflows stay exact to f64 precision.

use num::bigint::BigUint;
use num::{BigInt, One, Signed, Zero};
use serde::Serialize;

use crate::cf::Interval;
use crate::error::{Error, Result};
use crate::growth::{log_phi, logdiffexp, logsumexp2, GrowthFamily, GrowthSpec, LogScalar};
use crate::rational::{from_f64_exact, to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimMethod {
    ClosedForm,
    Lemma46,
    Remark,
    BoxCount,
    WangWuUpper,
}

/// A dimension value in `[0, 1]` with its provenance and, for the numeric
/// methods, the partial ratios documenting convergence.
#[derive(Clone, Debug, Serialize)]
pub struct DimEstimate {
    pub value: f64,
    #[serde(serialize_with = "crate::rational::serialize_opt_ratio")]
    pub exact: Option<Rational>,
    pub method: DimMethod,
    pub partials: Vec<(usize, f64)>,
}

impl DimEstimate {
    fn exact_value(value: Rational, method: DimMethod) -> DimEstimate {
        DimEstimate {
            value: to_f64(&value),
            exact: Some(value),
            method,
            partials: Vec::new(),
        }
    }
}

/// Minimum over the tail window `[n_max/2, n_max]` (or the given window),
/// used as the finite-horizon stand-in for a liminf.
fn tail_window_min(partials: &[(usize, f64)], n_max: usize, window_start: Option<usize>) -> f64 {
    let start = window_start.unwrap_or(n_max / 2).max(partials.first().map_or(1, |p| p.0));
    partials
        .iter()
        .filter(|(n, _)| *n >= start)
        .map(|(_, r)| *r)
        .fold(f64::INFINITY, f64::min)
        .clamp(0.0, 1.0)
}

/// The nested-construction lower bound
/// `liminf log(m_1 ... m_(n-1)) / (-log(m_n eps_n))`, evaluated from the
/// per-level counts and gap bounds (1-indexed: `log_m[0]` describes level 1).
pub fn lemma46_bound(
    log_m: &[LogScalar],
    log_eps: &[LogScalar],
    n_max: usize,
    window_start: Option<usize>,
) -> Result<DimEstimate> {
    if n_max < 2 {
        return Err(Error::domain("need n_max >= 2 for at least one ratio"));
    }
    if log_m.len() < n_max || log_eps.len() < n_max {
        return Err(Error::domain(format!(
            "need {n_max} counts and gaps, got {} and {}",
            log_m.len(),
            log_eps.len()
        )));
    }
    let ln2 = std::f64::consts::LN_2;
    for (i, m) in log_m.iter().take(n_max).enumerate() {
        if m.ln_value() < ln2 - 1e-12 && !m.ln_value().is_infinite() {
            return Err(Error::domain(format!("m_{} is below 2", i + 1)));
        }
    }
    for (i, pair) in log_eps.windows(2).take(n_max - 1).enumerate() {
        if pair[1].cmp_quantity(&pair[0]) != std::cmp::Ordering::Less {
            return Err(Error::domain(format!(
                "gap bounds must strictly decrease, violated at level {}",
                i + 2
            )));
        }
        if pair[0].ln_positive() {
            return Err(Error::domain(format!("eps_{} is not below 1", i + 1)));
        }
    }

    let mut partials = Vec::with_capacity(n_max - 1);
    // running ln of the numerator sum(k < n) ln m_k
    let mut ln_num = f64::NEG_INFINITY;
    for n in 2..=n_max {
        ln_num = logsumexp2(ln_num, log_m[n - 2].ln_as_quantity()?.ln_value());
        // denominator: |ln eps_n| - ln m_n as positive quantities
        let eps = log_eps[n - 1];
        if eps.ln_positive() {
            return Err(Error::domain(format!("eps_{n} is not below 1")));
        }
        let ln_den = logdiffexp(eps.ln_abs_ln(), log_m[n - 1].ln_as_quantity()?.ln_value())
            .map_err(|_| Error::domain(format!("m_{n} eps_{n} is not below 1")))?;
        let ratio = (ln_num - ln_den).exp();
        partials.push((n, ratio));
    }
    let value = tail_window_min(&partials, n_max, window_start);
    Ok(DimEstimate {
        value,
        exact: None,
        method: DimMethod::Lemma46,
        partials,
    })
}

/// The growth-only lower bound
/// `liminf sum(k<=n) L(k) / (2 sum(k<=n) L(k) + L(n+1))` with `L = ln phi`.
pub fn remark_bound(
    spec: &GrowthSpec,
    n_max: usize,
    window_start: Option<usize>,
) -> Result<DimEstimate> {
    if n_max < 1 {
        return Err(Error::domain("need n_max >= 1"));
    }
    let ln2 = std::f64::consts::LN_2;
    let mut partials = Vec::with_capacity(n_max);
    // ln of sum(k<=n) L(k); L(1) can be 0 (phi(1) = 1), a harmless -inf term
    let mut ln_sum = f64::NEG_INFINITY;
    for n in 1..=n_max {
        let l_n = log_phi(spec, n);
        if l_n.ln_positive() {
            ln_sum = logsumexp2(ln_sum, l_n.ln_as_quantity()?.ln_value());
        }
        let l_next = log_phi(spec, n + 1);
        let ln_l_next = if l_next.ln_positive() {
            l_next.ln_as_quantity()?.ln_value()
        } else {
            f64::NEG_INFINITY
        };
        let ln_den = logsumexp2(ln2 + ln_sum, ln_l_next);
        let ratio = if ln_sum == f64::NEG_INFINITY {
            0.0
        } else {
            (ln_sum - ln_den).exp()
        };
        partials.push((n, ratio));
    }
    let value = tail_window_min(&partials, n_max, window_start);
    Ok(DimEstimate {
        value,
        exact: None,
        method: DimMethod::Remark,
        partials,
    })
}

/// The closed-form dimension table, exact rationals throughout:
/// polynomial growth keeps full dimension; `e^(n^alpha)` is 1 below the
/// critical exponent 1/2 and 1/2 from it on; `c^(b^(n^alpha))` is 1/2 below
/// `alpha = 1`, `1/(b+1)` at it, 0 above it; geometric growth (a single
/// exponential rate) is 1/2.
pub fn closed_form_dim(spec: &GrowthSpec) -> DimEstimate {
    let one = Rational::one();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let value = match &spec.family {
        GrowthFamily::Polynomial { .. } => one,
        GrowthFamily::SingleExp { alpha } => {
            if *alpha < 0.5 {
                one
            } else {
                half
            }
        }
        GrowthFamily::DoublyExp { b, alpha, .. } => {
            if *alpha < 1.0 {
                half
            } else if *alpha == 1.0 {
                // 1/(b+1); b is treated as the exact dyadic it is
                (from_f64_exact(*b).expect("b is finite") + Rational::one()).recip()
            } else {
                Rational::zero()
            }
        }
        GrowthFamily::Geometric { .. } => half,
    };
    DimEstimate::exact_value(value, DimMethod::ClosedForm)
}

/// The upper-bound table for the set of points whose digits exceed
/// `c^(b^(n^alpha))` infinitely often; coincides with [`closed_form_dim`] on
/// the doubly exponential family.
pub fn wang_wu_upper(spec: &GrowthSpec) -> Result<DimEstimate> {
    let GrowthFamily::DoublyExp { b, alpha, .. } = &spec.family else {
        return Err(Error::domain(
            "the upper-bound table applies to the doubly exponential family",
        ));
    };
    let value = if *alpha < 1.0 {
        Rational::new(BigInt::one(), BigInt::from(2))
    } else if *alpha == 1.0 {
        (from_f64_exact(*b).expect("b is finite") + Rational::one()).recip()
    } else {
        Rational::zero()
    };
    let estimate = DimEstimate::exact_value(value, DimMethod::WangWuUpper);
    debug_assert!(
        estimate.exact.as_ref().unwrap() >= closed_form_dim(spec).exact.as_ref().unwrap(),
        "the upper bound must dominate the closed form"
    );
    Ok(estimate)
}

/// Least-squares box-counting estimate over exact rational grids anchored
/// at 0. A box counts if its closed intersection with the union has positive
/// length or contains an interval endpoint; scales must be reciprocals of
/// integers (dyadic or triadic in practice), at least 4 of them spanning at
/// least 3 octaves.
pub fn box_count_dim(intervals: &[Interval], scales: &[Rational]) -> Result<DimEstimate> {
    if scales.len() < 4 {
        return Err(Error::domain("need at least 4 scales"));
    }
    let mut denominators = Vec::with_capacity(scales.len());
    for s in scales {
        if !s.is_positive() || *s >= Rational::one() || !s.numer().is_one() {
            return Err(Error::domain(format!(
                "scales must be reciprocals of integers in (0,1), got {s}"
            )));
        }
        denominators.push(s.denom().magnitude().clone());
    }
    let d_min = denominators.iter().min().unwrap();
    let d_max = denominators.iter().max().unwrap();
    if d_max < &(d_min * BigUint::from(8u32)) {
        return Err(Error::domain("scales must span at least 3 octaves"));
    }
    let mut sorted: Vec<&Interval> = intervals.iter().collect();
    sorted.sort_by(|a, b| a.left.cmp(&b.left));
    for pair in sorted.windows(2) {
        if pair[0].right > pair[1].left {
            return Err(Error::domain("intervals must be pairwise disjoint"));
        }
    }
    if intervals.is_empty() {
        return Err(Error::domain("need at least one interval"));
    }
    for iv in intervals {
        if iv.left < Rational::zero() || iv.right > Rational::one() {
            return Err(Error::domain("intervals must lie inside [0, 1]"));
        }
    }

    let mut partials = Vec::with_capacity(scales.len());
    let mut xs = Vec::with_capacity(scales.len());
    let mut ys = Vec::with_capacity(scales.len());
    for (idx, d) in denominators.iter().enumerate() {
        let count = count_boxes(&sorted, d);
        let x = crate::rational::ln_biguint(d);
        let y = (count as f64).ln();
        partials.push((idx, y / x));
        xs.push(x);
        ys.push(y);
    }
    // least squares slope of ln N against ln(1/delta)
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let var: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let slope = (cov / var).clamp(0.0, 1.0);
    Ok(DimEstimate {
        value: slope,
        exact: None,
        method: DimMethod::BoxCount,
        partials,
    })
}

/// Number of grid boxes of size `1/d` meeting the union, by exact rational
/// index arithmetic.
fn count_boxes(sorted: &[&Interval], d: &BigUint) -> u64 {
    let d_int = BigInt::from(d.clone());
    let mut count: u64 = 0;
    let mut last_counted: Option<BigInt> = None;
    for iv in sorted {
        let scaled_left = &iv.left * &d_int;
        let scaled_right = &iv.right * &d_int;
        // boxes with positive-length intersection: floor(l d) ..= ceil(r d) - 1
        let mut first = scaled_left.floor().numer().clone();
        let last = scaled_right.ceil().numer() - BigInt::one();
        // grid-aligned endpoints extend the touched range by the tie rule
        if scaled_left.is_integer() && first > BigInt::zero() {
            first -= 1;
        }
        let mut last = last;
        if scaled_right.is_integer() && scaled_right.numer() < &d_int {
            last += 1;
        }
        let mut lo = first;
        if let Some(prev) = &last_counted {
            if lo <= *prev {
                lo = prev + 1;
            }
        }
        if lo <= last {
            let span = (&last - &lo + BigInt::one())
                .to_string()
                .parse::<u64>()
                .unwrap_or(u64::MAX);
            count += span;
            last_counted = Some(last)
        }
    }
    count
}

/// One row of the dimension-curve table.
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub family: &'static str,
    pub power: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub method: &'static str,
    #[serde(serialize_with = "crate::rational::serialize_ratio")]
    pub dimension_exact: Rational,
    pub dimension: f64,
}

/// Evaluates the closed-form dimension over a parameter grid.
pub fn dim_curve(specs: &[GrowthSpec]) -> Vec<CurvePoint> {
    specs
        .iter()
        .map(|spec| {
            let dim = closed_form_dim(spec);
            let exact = dim.exact.clone().expect("closed form is exact");
            let (power, b, c, alpha) = match &spec.family {
                GrowthFamily::Polynomial { power } => (Some(*power), None, None, None),
                GrowthFamily::SingleExp { alpha } => (None, None, None, Some(*alpha)),
                GrowthFamily::DoublyExp { b, c, alpha } => {
                    (None, Some(*b), Some(*c), Some(*alpha))
                }
                GrowthFamily::Geometric { ratio } => {
                    (None, None, Some(to_f64(ratio)), None)
                }
            };
            CurvePoint {
                family: spec.family_name(),
                power,
                b,
                c,
                alpha,
                beta: spec.beta,
                method: "closed_form",
                dimension: dim.value,
                dimension_exact: exact,
            }
        })
        .collect()
}

/// CSV projection of [`dim_curve`] with a fixed column order.
pub fn write_dim_curve_csv<W: std::io::Write>(points: &[CurvePoint], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "family,power,b,c,alpha,beta,method,dimension_exact,dimension")?;
    for p in points {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            p.family,
            opt(p.power),
            opt(p.b),
            opt(p.c),
            opt(p.alpha),
            p.beta,
            p.method,
            crate::rational::format_ratio(&p.dimension_exact),
            p.dimension
        )?;
    }
    Ok(())
}
