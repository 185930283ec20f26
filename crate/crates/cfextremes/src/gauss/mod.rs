//! Gauss-measure computations and seeded Monte Carlo for the extreme-value
//! statistics of continued-fraction digits.
//!
//! The invariant measure has density `1/((1+x) ln 2)` on `(0,1)`. Sampling
//! uses the inverse CDF `x = 2^u - 1` with `u` uniform, which is exact,
//! branch-free, and arbitrarily precise; each trial derives an independent
//! substream from `(seed, trial_index)` so results are bit-identical no
//! matter how many workers run the trials.
//!
//! `log` means the natural logarithm throughout, matching the `1/log 2`
//! normalization of the measure.

mod mp;

pub use mp::{pow2_minus_one, sample_gauss};

use num::bigint::BigUint;
use num::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{expand_real, running_stats, Interval};
use crate::error::{Error, Result};
use crate::rational::{ln_biguint, ln_rational, Rational};

/// Gauss measure of an interval inside `[0, 1]`:
/// `(1/ln 2) ln((1 + right)/(1 + left))`, computed from the exact rational
/// endpoints and rounded once.
pub fn gauss_measure(interval: &Interval) -> Result<f64> {
    if interval.left < Rational::zero() || interval.right > Rational::one() {
        return Err(Error::domain(format!(
            "gauss_measure needs an interval inside [0,1], got [{}, {}]",
            interval.left, interval.right
        )));
    }
    let one = Rational::one();
    let ratio = (&one + &interval.right) / (&one + &interval.left);
    Ok(ln_rational(&ratio) / std::f64::consts::LN_2)
}

/// Parameters of one simulation run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SimConfig {
    pub n_digits: usize,
    pub trials: usize,
    pub seed: u64,
    pub precision_bits: u32,
}

impl SimConfig {
    pub fn new(n_digits: usize, trials: usize, seed: u64, precision_bits: u32) -> Result<Self> {
        if n_digits == 0 {
            return Err(Error::domain("n_digits must be >= 1"));
        }
        if trials == 0 {
            return Err(Error::domain("trials must be >= 1"));
        }
        let needed = 4 * n_digits + 64;
        if (precision_bits as usize) < needed {
            return Err(Error::domain(format!(
                "precision_bits = {precision_bits} below 4 n_digits + 64 = {needed}"
            )));
        }
        Ok(SimConfig {
            n_digits,
            trials,
            seed,
            precision_bits,
        })
    }

    /// The minimal precision the digit count requires.
    pub fn with_default_precision(n_digits: usize, trials: usize, seed: u64) -> Result<Self> {
        Self::new(n_digits, trials, seed, (4 * n_digits + 64) as u32)
    }
}

/// Extreme statistics of one trial: the maximum and the sum of the first
/// `n` partial quotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremeSample {
    pub trial_index: usize,
    pub t_n: BigUint,
    pub s_n: BigUint,
    pub n: usize,
}

/// A trial whose expansion aborted; reported, never silently dropped.
#[derive(Clone, Debug)]
pub struct TrialFailure {
    pub trial_index: usize,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct SimulationResult {
    pub config: SimConfig,
    pub samples: Vec<ExtremeSample>,
    pub failures: Vec<TrialFailure>,
}

fn run_trial(config: &SimConfig, trial: usize) -> std::result::Result<ExtremeSample, TrialFailure> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial as u64);
    let x = sample_gauss(&mut rng, config.precision_bits);
    let expansion = expand_real(&x, config.n_digits, config.precision_bits).map_err(|e| TrialFailure {
        trial_index: trial,
        message: e.to_string(),
    })?;
    if expansion.word.len() < config.n_digits {
        // the sampled value hit an exact rational; astronomically unlikely
        return Err(TrialFailure {
            trial_index: trial,
            message: format!("expansion terminated after {} digits", expansion.word.len()),
        });
    }
    let (t_n, s_n) = running_stats(&expansion.word).pop().expect("non-empty word");
    Ok(ExtremeSample {
        trial_index: trial,
        t_n,
        s_n,
        n: config.n_digits,
    })
}

/// Runs every trial of the configuration. The output is a deterministic
/// function of the config alone: trials fan out across a worker pool and
/// merge by trial index, so the worker count never changes the result.
/// Fails if more than 0.1% of trials abort.
pub fn simulate_extremes(config: &SimConfig) -> Result<SimulationResult> {
    simulate_extremes_with_workers(config, None)
}

/// [`simulate_extremes`] with an explicit worker count (`None` = all cores).
///
/// Trials run on a dedicated pool with large stacks: bigint division is
/// recursive above ~4k bits and overflows default worker stacks at the
/// precisions long runs need.
pub fn simulate_extremes_with_workers(
    config: &SimConfig,
    workers: Option<usize>,
) -> Result<SimulationResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .stack_size(32 * 1024 * 1024)
        .build()
        .map_err(|e| Error::domain(format!("cannot build worker pool: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, t))
            .collect()
    });
    let mut samples = Vec::with_capacity(config.trials);
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(s) => samples.push(s),
            Err(f) => failures.push(f),
        }
    }
    if failures.len() * 1000 > config.trials {
        return Err(Error::precision(format!(
            "{} of {} trials aborted (limit is 0.1%)",
            failures.len(),
            config.trials
        )));
    }
    Ok(SimulationResult {
        config: *config,
        samples,
        failures,
    })
}

/// One row of the limit-law comparison table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CdfComparison {
    pub y: f64,
    pub empirical: f64,
    pub theoretical: f64,
    pub abs_diff: f64,
}

/// Empirical `P(T_n ln 2 / n < y)` against the limit `e^(-1/y)`.
pub fn galambos_cdf_compare(samples: &[ExtremeSample], ys: &[f64]) -> Result<Vec<CdfComparison>> {
    if samples.is_empty() {
        return Err(Error::domain("no samples to compare"));
    }
    let n = samples[0].n;
    if samples.iter().any(|s| s.n != n) {
        return Err(Error::domain("samples must share one n"));
    }
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::domain("every y must be positive"));
    }
    let scale = std::f64::consts::LN_2 / n as f64;
    let stats: Vec<f64> = samples
        .iter()
        .map(|s| s.t_n.to_f64().unwrap_or(f64::INFINITY) * scale)
        .collect();
    Ok(ys
        .iter()
        .map(|&y| {
            let hits = stats.iter().filter(|&&v| v < y).count();
            let empirical = hits as f64 / stats.len() as f64;
            let theoretical = (-1.0 / y).exp();
            CdfComparison {
                y,
                empirical,
                theoretical,
                abs_diff: (empirical - theoretical).abs(),
            }
        })
        .collect())
}

/// `(S_n - T_n) / (n ln n)`; concentrates near `1/ln 2` as `n` grows.
pub fn trimmed_sum_stat(sample: &ExtremeSample) -> Result<f64> {
    if sample.n < 2 {
        return Err(Error::domain("trimmed sum needs n >= 2"));
    }
    let trimmed = &sample.s_n - &sample.t_n;
    let nf = sample.n as f64;
    Ok(trimmed.to_f64().unwrap_or(f64::INFINITY) / (nf * nf.ln()))
}

/// `ln T_n / ln n`; an informational diagnostic whose almost-sure limit is 1.
pub fn log_ratio_stat(sample: &ExtremeSample) -> Result<f64> {
    if sample.n < 3 {
        return Err(Error::domain("log ratio needs n >= 3"));
    }
    if sample.t_n.is_zero() {
        return Err(Error::domain("T_n must be >= 1"));
    }
    Ok(ln_biguint(&sample.t_n) / (sample.n as f64).ln())
}

/// The limiting constant of the trimmed-sum law.
pub const TRIMMED_SUM_LIMIT: f64 = 1.0 / std::f64::consts::LN_2;

/// Sample table as CSV with columns
/// `trial,n,t_n,s_n,trimmed_stat,log_ratio` (empty cells where a statistic
/// is undefined for small `n`).
pub fn write_samples_csv<W: std::io::Write>(samples: &[ExtremeSample], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "trial,n,t_n,s_n,trimmed_stat,log_ratio")?;
    for s in samples {
        let trimmed = trimmed_sum_stat(s).map(|v| v.to_string()).unwrap_or_default();
        let log_ratio = log_ratio_stat(s).map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.trial_index, s.n, s.t_n, s.s_n, trimmed, log_ratio
        )?;
    }
    Ok(())
}

/// Summary statistics used by the comparison report.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub kind: &'static str,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub precision_bits: u32,
    pub failures: usize,
    pub comparisons: Vec<CdfComparison>,
    pub trimmed_sum_constant: f64,
    pub trimmed_sum_median: f64,
    pub log_ratio_median: f64,
    /// Running extremes of the iterated-logarithm diagnostics; liminf/limsup
    /// laws are reported, not acceptance-tested.
    pub log_ratio_min: f64,
    pub log_ratio_max: f64,
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

impl SimulationReport {
    pub fn from_result(result: &SimulationResult, ys: &[f64]) -> Result<SimulationReport> {
        let comparisons = galambos_cdf_compare(&result.samples, ys)?;
        let mut trimmed: Vec<f64> = result
            .samples
            .iter()
            .filter_map(|s| trimmed_sum_stat(s).ok())
            .collect();
        let mut ratios: Vec<f64> = result
            .samples
            .iter()
            .filter_map(|s| log_ratio_stat(s).ok())
            .collect();
        let (min, max) = ratios
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        Ok(SimulationReport {
            schema_version: 1,
            kind: "simulation_report",
            n: result.config.n_digits,
            trials: result.config.trials,
            seed: result.config.seed,
            precision_bits: result.config.precision_bits,
            failures: result.failures.len(),
            comparisons,
            trimmed_sum_constant: TRIMMED_SUM_LIMIT,
            trimmed_sum_median: median(&mut trimmed),
            log_ratio_median: median(&mut ratios),
            log_ratio_min: min,
            log_ratio_max: max,
        })
    }
}
