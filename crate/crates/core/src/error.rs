use alloc::vec::Vec;

use thiserror::Error;

use crate::closed_form::DomainViolation;
use crate::params::{ParamViolation, Scenario};
use crate::poly::PolyError;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(#[from] ParamViolation),

    #[error("usage-based contract requires a per-unit fee w")]
    MissingFee,

    #[error("{scenario}: parameters outside the validity domain: {}", list_violations(.violations))]
    Domain {
        scenario: Scenario,
        violations: Vec<DomainViolation>,
    },

    #[error(
        "printed {scenario} forms are specialized to alpha=1, q=2, k=0.5, mu=1 \
         ({detail}); use the oracle solver for other parameters"
    )]
    NotAtCalibration {
        scenario: Scenario,
        detail: &'static str,
    },

    #[error("{stage} stationarity system is singular (determinant {determinant:e})")]
    Degenerate {
        stage: &'static str,
        determinant: f64,
    },

    #[error("no stationary point found from any start (best residual {best_residual:e})")]
    NoStationaryPoint { best_residual: f64 },

    #[error("best-response iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("cannot reconcile {closed} against {oracle}")]
    ScenarioMismatch { closed: Scenario, oracle: Scenario },

    #[error("cannot reconcile outcomes computed at different parameters")]
    ParamsMismatch,

    #[error("invalid solver options: {0}")]
    InvalidOptions(&'static str),

    #[error("evaluation failed at {param} = {value}: {reason}")]
    Evaluation {
        param: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("stencil point {param} = {value} failed: {source}")]
    Stencil {
        param: &'static str,
        value: f64,
        source: alloc::boxed::Box<Error>,
    },

    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn list_violations(v: &[DomainViolation]) -> alloc::string::String {
    use core::fmt::Write;
    let mut out = alloc::string::String::new();
    for (i, item) in v.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        let _ = write!(out, "{item}");
    }
    out
}
