//! Exact continued-fraction machinery with three consumers layered on top:
//! seeded Gauss-measure Monte Carlo for the extreme-value statistics of the
//! partial quotients, an enumerable Cantor-type level-set construction with
//! exact interval endpoints, and the dimension formulas (closed-form table,
//! nested-construction lower bound, box counting) that go with it.
//!
//! Everything that can be exact is exact: rationals never round, cylinder
//! endpoints and gaps are compared with integer arithmetic, and sampled reals
//! carry rigorous error intervals so that a continued-fraction digit is
//! either certain or an explicit precision error. Quantities that outgrow
//! `f64` (doubly exponential growth does so immediately) move to log and
//! log-log scale; see [`growth::LogScalar`].

pub mod cantor;
pub mod cf;
pub mod dimension;
pub mod error;
pub mod gauss;
pub mod growth;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
