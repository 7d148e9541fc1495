//! Certified computational number theory around Robin's and Lagarias's
//! divisor-sum criteria.
//!
//! Every comparison that involves a transcendental quantity goes through the
//! interval engine in [`realnum`]: a verdict is either backed by disjoint
//! enclosures or reported as unresolved, never guessed from a float.
//!
//! * [`primes`] sieving, Chebyshev's θ and the auxiliary `A(x)` bound.
//! * [`divisors`] factorizations, σ and its residue-class variants, `f(n)`.
//! * [`abundant`] critical-ε stream and (odd) colossally abundant numbers.
//! * [`criteria`] harmonic numbers, Robin/Lagarias checks, range scans and
//!   numeric lemma verification.
//! * [`growth`] the growth factor `g(n, k, p)` and the CA-like construction.
//! * [`constants`] γ, the Meissel–Mertens constant and the mod-4 limits.

pub mod abundant;
pub mod constants;
pub mod criteria;
pub mod divisors;
mod error;
pub mod growth;
pub mod primes;
pub mod realnum;

pub use error::{Error, Result};

pub use abundant::{AbundantRecord, CriticalEpsilon, Parity};
pub use divisors::{CheckReport, Factorization, Verdict};
pub use primes::PrimeTable;
pub use realnum::{Evaluator, RealExpr, RealInterval};
