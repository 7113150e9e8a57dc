//! Two-stage manufacturer/platform innovation game for IoT smart products.
//!
//! A manufacturer sets the retail price `p` and a hardware innovation level
//! `h`; a platform sets its software innovation level `s` and, under a
//! usage-based contract, a per-unit service fee `w`. Under a revenue-sharing
//! contract the sale revenue is split `r : 1 - r` instead. The manufacturer
//! may be overconfident about how strongly consumers value innovation.
//!
//! The crate is split along the lines of the verification workflow:
//!
//! - [`params`] and [`model`]: exogenous parameters, decisions, demand and
//!   the four scenario profit functionals.
//! - [`closed_form`]: the published equilibrium expressions, evaluated
//!   verbatim and audited against first-order conditions.
//! - [`oracle`]: an independent backward-induction solver with grid
//!   certification, plus reconciliation of closed forms against it.
//! - [`statics`]: numeric derivatives, threshold scans, region maps and the
//!   proposition suites.
//! - [`poly`]: real-root isolation for the boundary polynomials.
//! - [`figures`]: the data series behind the published figures.
//!
//! Everything here is pure and allocation-only; file formats and the CLI
//! live in the `smartgame` crate.

#![no_std]

extern crate alloc;

pub mod closed_form;
pub mod error;
pub mod figures;
pub mod model;
pub mod oracle;
pub mod outcome;
pub mod params;
pub mod poly;
pub mod stage;
pub mod statics;

pub use error::{Error, Result};
pub use outcome::{EquilibriumOutcome, Method, SocDiagnostics, StageCurvature};
pub use params::{
    Contract, Decisions, ModelParams, ParamName, ParamViolation, Rationality, Scenario, Viewpoint,
};
