//! Certified real arithmetic.
//!
//! Real quantities are represented symbolically by [`RealExpr`] and observed
//! only through outward-rounded [`RealInterval`] enclosures. An [`Evaluator`]
//! re-evaluates at doubling precision until the enclosure is narrow enough to
//! decide the question asked, or the precision ceiling is reached.

pub mod consts;
mod expr;
mod interval;

use rug::{Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};

pub use expr::{NamedConst, RealExpr};
pub use interval::{float_to_decimal, rational_to_decimal, Fault, RealInterval};
pub(crate) use interval::{down, up};


pub const DEFAULT_START_BITS: u32 = 64;
pub const DEFAULT_CEILING_BITS: u32 = 4096;

/// Outcome of comparing two reals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    /// The enclosures still overlapped at the precision ceiling.
    Unresolved,
}

/// A decided (or undecided) comparison together with the enclosures used.
#[derive(Clone, Debug, Serialize)]
pub struct Decision {
    pub ordering: Comparison,
    pub lhs: RealInterval,
    pub rhs: RealInterval,
    pub precision_bits: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub precision_bits: u32,
    pub enclosure: Option<RealInterval>,
    pub note: String,
}

/// Record of the precision schedule tried during one evaluation.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EvalTrace {
    pub expression: String,
    pub steps: Vec<TraceStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Evaluator {
    start_bits: u32,
    ceiling_bits: u32,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator { start_bits: DEFAULT_START_BITS, ceiling_bits: DEFAULT_CEILING_BITS }
    }
}

impl Evaluator {
    pub fn new(ceiling_bits: u32) -> Self {
        let ceiling_bits = ceiling_bits.max(2);
        Evaluator { start_bits: DEFAULT_START_BITS.min(ceiling_bits), ceiling_bits }
    }

    pub fn with_start(mut self, start_bits: u32) -> Self {
        self.start_bits = start_bits.clamp(2, self.ceiling_bits);
        self
    }

    pub fn ceiling_bits(&self) -> u32 {
        self.ceiling_bits
    }

    pub fn start_bits(&self) -> u32 {
        self.start_bits
    }

    /// Precisions tried in order: start, 2·start, … , ceiling.
    pub fn schedule(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut p = self.start_bits;
        while p < self.ceiling_bits {
            out.push(p);
            p = p.saturating_mul(2);
        }
        out.push(self.ceiling_bits);
        out
    }

    /// Runs `attempt` at each scheduled precision until it yields a value.
    /// `Ok(None)` and [`Fault::Indeterminate`] mean "try again with more bits".
    pub fn escalate<T>(
        &self,
        what: &str,
        mut attempt: impl FnMut(u32) -> std::result::Result<Option<T>, Fault>,
    ) -> Result<T> {
        for bits in self.schedule() {
            match attempt(bits) {
                Ok(Some(v)) => return Ok(v),
                Ok(None) | Err(Fault::Indeterminate) => {}
                Err(Fault::Domain(msg)) => return Err(Error::Domain(msg)),
            }
        }
        Err(Error::PrecisionExhausted { bits: self.ceiling_bits, detail: what.to_string() })
    }

    /// Enclosure of `expr` with width at most `target_width`.
    pub fn eval(&self, expr: &RealExpr, target_width: &Rational) -> Result<RealInterval> {
        self.eval_traced(expr, target_width).0
    }

    pub fn eval_traced(&self, expr: &RealExpr, target_width: &Rational) -> (Result<RealInterval>, EvalTrace) {
        let canon = expr.canonical();
        let mut trace = EvalTrace { expression: canon.to_string(), steps: Vec::new() };
        let result = self.escalate(&format!("enclosing {canon} to width {target_width}"), |bits| {
            match canon.interval_at(bits) {
                Ok(iv) => {
                    let ok = iv.width_exact() <= *target_width;
                    trace.steps.push(TraceStep {
                        precision_bits: bits,
                        note: if ok { "accepted" } else { "too wide" }.to_string(),
                        enclosure: Some(iv.clone()),
                    });
                    Ok(ok.then_some(iv))
                }
                Err(f) => {
                    trace.steps.push(TraceStep {
                        precision_bits: bits,
                        enclosure: None,
                        note: match &f {
                            Fault::Domain(m) => format!("domain error: {m}"),
                            Fault::Indeterminate => "indeterminate".to_string(),
                        },
                    });
                    Err(f)
                }
            }
        });
        (result, trace)
    }

    /// Enclosure at a single fixed precision.
    pub fn enclose_at(&self, expr: &RealExpr, bits: u32) -> Result<RealInterval> {
        expr.canonical().interval_at(bits).map_err(|f| match f {
            Fault::Domain(m) => Error::Domain(m),
            Fault::Indeterminate => Error::PrecisionExhausted { bits, detail: format!("enclosing {expr}") },
        })
    }

    /// Compares two reals. `Equal` is reported only when the canonical forms
    /// coincide; otherwise precision is raised until the enclosures separate.
    pub fn compare(&self, a: &RealExpr, b: &RealExpr) -> Comparison {
        match self.decide(a, b) {
            Ok(d) => d.ordering,
            Err(_) => Comparison::Unresolved,
        }
    }

    /// Like [`compare`](Self::compare) but returns the enclosures that
    /// justified the answer. Domain errors propagate.
    pub fn decide(&self, a: &RealExpr, b: &RealExpr) -> Result<Decision> {
        let (ca, cb) = (a.canonical(), b.canonical());
        if ca == cb {
            let bits = self.start_bits;
            let iv = ca.interval_at(bits).map_err(fault_to_error)?;
            return Ok(Decision { ordering: Comparison::Equal, lhs: iv.clone(), rhs: iv, precision_bits: bits });
        }
        let mut last = None;
        let res = self.escalate("comparison", |bits| {
            let x = ca.interval_at(bits)?;
            let y = cb.interval_at(bits)?;
            let ord = if x.certainly_lt(&y) {
                Some(Comparison::Less)
            } else if y.certainly_lt(&x) {
                Some(Comparison::Greater)
            } else {
                None
            };
            let d = Decision { ordering: ord.unwrap_or(Comparison::Unresolved), lhs: x, rhs: y, precision_bits: bits };
            if ord.is_some() {
                Ok(Some(d))
            } else {
                last = Some(d);
                Ok(None)
            }
        });
        match res {
            Ok(d) => Ok(d),
            Err(Error::PrecisionExhausted { .. }) if last.is_some() => Ok(last.unwrap()),
            Err(e) => Err(e),
        }
    }

    /// Sign of a real: `Less` for negative, `Greater` for positive.
    pub fn sign(&self, e: &RealExpr) -> Comparison {
        self.compare(e, &RealExpr::int(0))
    }

    /// Exact floor. Integer-valued canonical forms are returned directly;
    /// otherwise the enclosure must lie strictly between two integers.
    pub fn floor_exact(&self, e: &RealExpr) -> Result<Integer> {
        let canon = e.canonical();
        if let Some(r) = canon.as_rational() {
            return Ok(r.floor().into_numer_denom().0);
        }
        let mut last: Option<RealInterval> = None;
        let res = self.escalate("floor", |bits| {
            let iv = canon.interval_at(bits)?;
            let (a, b) = iv.floors();
            if a == b {
                return Ok(Some(a));
            }
            last = Some(iv);
            Ok(None)
        });
        match res {
            Err(Error::PrecisionExhausted { bits, .. }) if last.is_some() => {
                let iv = last.unwrap();
                let (lo, hi) = iv.decimal_bounds(25);
                Err(Error::UnresolvedFloor { bits, lo, hi })
            }
            other => other,
        }
    }

    /// Exact ceiling, by symmetry with [`floor_exact`](Self::floor_exact).
    pub fn ceil_exact(&self, e: &RealExpr) -> Result<Integer> {
        Ok(-self.floor_exact(&-e.clone())?)
    }
}

fn fault_to_error(f: Fault) -> Error {
    match f {
        Fault::Domain(m) => Error::Domain(m),
        Fault::Indeterminate => Error::Domain("indeterminate evaluation".into()),
    }
}
