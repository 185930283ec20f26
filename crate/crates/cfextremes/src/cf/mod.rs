//! Exact continued-fraction arithmetic.
//!
//! A number in `(0,1)` has the expansion `1/(a_1 + 1/(a_2 + ...))` with
//! positive integer partial quotients `a_k`. This module evaluates finite
//! words exactly, expands rationals and rigorously-bounded reals, produces
//! the convergents `p_k/q_k`, and computes cylinder intervals together with
//! the running maximum `T_k` and running sum `S_k` of the digits.
//!
//! Finite rationals have two expansions (`[..., a]` and `[..., a-1, 1]`);
//! every expansion routine here emits the canonical one, whose last digit is
//! at least 2 whenever the word has length at least 2.

mod real;

pub use real::{expand_real, Expansion, RealInterval};

use num::bigint::BigUint;
use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite word of partial quotients; every digit is at least 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CFWord {
    digits: Vec<BigUint>,
}

impl CFWord {
    pub fn new(digits: Vec<BigUint>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::domain("empty continued fraction word"));
        }
        if digits.iter().any(|d| d.is_zero()) {
            return Err(Error::domain("partial quotients must be >= 1"));
        }
        Ok(CFWord { digits })
    }

    pub fn from_u64s(digits: &[u64]) -> Result<Self> {
        Self::new(digits.iter().map(|&d| BigUint::from(d)).collect())
    }

    pub fn digits(&self) -> &[BigUint] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prefix(&self, k: usize) -> Result<CFWord> {
        if k == 0 || k > self.len() {
            return Err(Error::domain(format!("prefix length {k} out of range")));
        }
        Ok(CFWord {
            digits: self.digits[..k].to_vec(),
        })
    }

    /// Appends one digit; used to walk down a cylinder tree.
    pub fn child(&self, digit: BigUint) -> Result<CFWord> {
        if digit.is_zero() {
            return Err(Error::domain("partial quotients must be >= 1"));
        }
        let mut digits = self.digits.clone();
        digits.push(digit);
        Ok(CFWord { digits })
    }

    /// True when the word is the canonical expansion of its value.
    pub fn is_canonical(&self) -> bool {
        self.len() == 1 || !self.digits.last().unwrap().is_one()
    }

    /// Rewrites `[..., a, 1]` as `[..., a+1]`.
    pub fn canonicalize(mut self) -> CFWord {
        if self.len() >= 2 && self.digits.last().unwrap().is_one() {
            self.digits.pop();
            let last = self.digits.last_mut().unwrap();
            *last += 1u32;
        }
        self
    }
}

impl std::fmt::Display for CFWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// An interval with exact rational endpoints and per-endpoint closure tags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub left: Rational,
    pub right: Rational,
    pub left_closed: bool,
    pub right_closed: bool,
}

impl Interval {
    pub fn open(left: Rational, right: Rational) -> Result<Self> {
        Self::new(left, right, false, false)
    }

    pub fn closed(left: Rational, right: Rational) -> Result<Self> {
        Self::new(left, right, true, true)
    }

    pub fn new(left: Rational, right: Rational, left_closed: bool, right_closed: bool) -> Result<Self> {
        if left >= right {
            return Err(Error::domain(format!(
                "interval endpoints out of order: {left} >= {right}"
            )));
        }
        Ok(Interval {
            left,
            right,
            left_closed,
            right_closed,
        })
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    /// Containment of closures; closure tags do not affect lengths or gaps.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    /// Whether the closed hulls intersect.
    pub fn meets(&self, other: &Interval) -> bool {
        !(self.right < other.left || other.right < self.left)
    }
}

/// One convergent `p_k/q_k` of a word, with `gcd(p, q) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentPair {
    pub p: BigUint,
    pub q: BigUint,
    pub index: usize,
}

impl ConvergentPair {
    pub fn value(&self) -> Rational {
        Rational::new(BigInt::from(self.p.clone()), BigInt::from(self.q.clone()))
    }
}

/// Convergents `(p_k, q_k)` for `k = 1..=n` via the standard recursion
/// `p_k = a_k p_{k-1} + p_{k-2}`, `q_k = a_k q_{k-1} + q_{k-2}` with
/// `p_{-1} = 1, q_{-1} = 0, p_0 = 0, q_0 = 1`.
pub fn convergents(word: &CFWord) -> Vec<ConvergentPair> {
    let mut out = Vec::with_capacity(word.len());
    let (mut p_prev, mut q_prev) = (BigUint::one(), BigUint::zero());
    let (mut p, mut q) = (BigUint::zero(), BigUint::one());
    for (i, a) in word.digits().iter().enumerate() {
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(ConvergentPair {
            p: p.clone(),
            q: q.clone(),
            index: i + 1,
        });
    }
    out
}

/// Exact value of the finite continued fraction; equals its last convergent.
pub fn evaluate_cf(word: &CFWord) -> Rational {
    let last = convergents(word).pop().expect("word is non-empty");
    last.value()
}

/// Canonical expansion of a rational in `(0,1)` by the Euclidean algorithm.
pub fn expand_rational(r: &Rational) -> Result<CFWord> {
    if !r.is_positive() || *r >= Rational::one() {
        return Err(Error::domain(format!("expand_rational needs 0 < r < 1, got {r}")));
    }
    let mut p = r.numer().magnitude().clone();
    let mut q = r.denom().magnitude().clone();
    let mut digits = Vec::new();
    while !p.is_zero() {
        let (a, rem) = num::Integer::div_rem(&q, &p);
        digits.push(a);
        q = std::mem::replace(&mut p, rem);
    }
    // The Euclidean algorithm cannot emit a trailing 1 from a reduced
    // fraction strictly inside (0,1), so the word is already canonical.
    debug_assert!(digits.len() == 1 || !digits.last().unwrap().is_one());
    CFWord::new(digits)
}

/// Running `(T_k, S_k)` pairs: maximum and sum of the first `k` digits.
pub fn running_stats(word: &CFWord) -> Vec<(BigUint, BigUint)> {
    let mut out = Vec::with_capacity(word.len());
    let mut max = BigUint::zero();
    let mut sum = BigUint::zero();
    for a in word.digits() {
        if *a > max {
            max = a.clone();
        }
        sum += a;
        out.push((max.clone(), sum.clone()));
    }
    out
}

/// The cylinder of all reals whose expansion starts with `word`, plus its
/// exact length `1/(q_n (q_n + q_{n-1}))`.
///
/// The endpoints are `p_n/q_n` and `(p_n + p_{n-1})/(q_n + q_{n-1})`;
/// `p_n/q_n` is the left endpoint exactly when `n` is even. Cylinders are
/// returned open: endpoint membership is measure-zero and irrelevant to the
/// lengths and gaps computed from them.
pub fn cylinder_interval(word: &CFWord) -> (Interval, Rational) {
    let convs = convergents(word);
    let n = word.len();
    let (p, q) = {
        let last = &convs[n - 1];
        (last.p.clone(), last.q.clone())
    };
    let (p_prev, q_prev) = if n >= 2 {
        let prev = &convs[n - 2];
        (prev.p.clone(), prev.q.clone())
    } else {
        (BigUint::zero(), BigUint::one())
    };

    let conv_end = Rational::new(BigInt::from(p.clone()), BigInt::from(q.clone()));
    let mediant_end = Rational::new(
        BigInt::from(&p + &p_prev),
        BigInt::from(&q + &q_prev),
    );
    let (left, right) = if n % 2 == 0 {
        (conv_end, mediant_end)
    } else {
        (mediant_end, conv_end)
    };
    let length = Rational::new(
        BigInt::one(),
        BigInt::from(&q * (&q + &q_prev)),
    );
    let interval = Interval::open(left, right).expect("cylinder endpoints are ordered");
    debug_assert_eq!(interval.length(), length);
    (interval, length)
}

/// Checks `prod a_k <= q_n <= prod (a_k + 1)` exactly.
pub fn check_qn_bounds(word: &CFWord) -> bool {
    let q_n = convergents(word).pop().expect("word is non-empty").q;
    let mut lower = BigUint::one();
    let mut upper = BigUint::one();
    for a in word.digits() {
        lower *= a;
        upper *= a + 1u32;
    }
    lower <= q_n && q_n <= upper
}
