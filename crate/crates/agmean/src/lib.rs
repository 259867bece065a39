//! Complete elliptic integrals, classical and arithmetic-geometric means,
//! and the sharp thresholds at which a two-parameter mean family overtakes
//! the arithmetic-geometric and logarithmic means.
//!
//! The library has four layers:
//!
//! * [`elliptic`]: the complete elliptic integrals `K` and `E`, the Gauss
//!   hypergeometric series behind them, and the inverse hyperbolic tangent.
//! * [`means`]: harmonic, geometric, arithmetic, logarithmic and
//!   arithmetic-geometric means of a positive pair, plus the blended mean
//!   `Q_{t,s}` built from geometric and arithmetic parts.
//! * [`bounds`]: the threshold curves `t(s)`, the auxiliary functions whose
//!   sign settles each comparison, and their power series.
//! * [`verify`]: seeded sampling suites that exercise every identity and
//!   inequality above and report counterexamples when a claim fails.
//!
//! With the default `parallel` feature the verification suites evaluate
//! sample points on a rayon thread pool; aggregation is order insensitive,
//! so parallel and sequential runs produce identical reports.

mod error;

pub mod bounds;
pub mod elliptic;
pub mod means;
pub mod verify;

pub use bounds::{BoundKind, BoundParams, LemmaParams};
pub use elliptic::{Modulus, SeriesConfig, SeriesSum};
pub use error::{Error, Result};
pub use means::{AgmTrace, PositivePair};
pub use verify::{SampleSpec, VerifyReport};
