//! Equilibrium outcome records and their diagnostics.

use alloc::vec::Vec;
use core::fmt;

use crate::closed_form::{AuxiliaryValues, DomainViolation};
use crate::error::Result;
use crate::model::{expected_demands, manufacturer_profit, platform_profit, DemandBundle};
use crate::params::{Contract, Decisions, ModelParams, Scenario, Viewpoint};
use crate::stage::{self, det2, Leader, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Equilibrium quantities that closed forms and the oracle both report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    P,
    W,
    H,
    S,
    PiM,
    PiP,
}

impl Variable {
    pub const ALL: [Variable; 6] = [
        Variable::P,
        Variable::W,
        Variable::H,
        Variable::S,
        Variable::PiM,
        Variable::PiP,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variable::P => "p",
            Variable::W => "w",
            Variable::H => "h",
            Variable::S => "s",
            Variable::PiM => "pi_m",
            Variable::PiP => "pi_p",
        }
    }

    /// Variables that exist for a contract (`w` only under usage pricing).
    pub fn for_contract(contract: Contract) -> Vec<Variable> {
        Variable::ALL
            .iter()
            .copied()
            .filter(|v| *v != Variable::W || contract == Contract::UsageBased)
            .collect()
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Curvature of one stage objective. `dim` is 1 for a revenue-sharing
/// platform (only `s`), else 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageCurvature {
    pub dim: usize,
    pub diagonal: [f64; 2],
    pub determinant: f64,
}

impl StageCurvature {
    pub fn from_matrix(m: &Mat2) -> Self {
        StageCurvature {
            dim: 2,
            diagonal: [m[0][0], m[1][1]],
            determinant: det2(m),
        }
    }

    pub fn scalar(v: f64) -> Self {
        StageCurvature {
            dim: 1,
            diagonal: [v, 0.0],
            determinant: v,
        }
    }

    pub fn strictly_concave(&self) -> bool {
        match self.dim {
            1 => self.diagonal[0] < 0.0,
            _ => self.diagonal[0] < 0.0 && self.diagonal[1] < 0.0 && self.determinant > 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocDiagnostics {
    pub follower: StageCurvature,
    /// Absent when the follower stage is singular.
    pub leader: Option<StageCurvature>,
}

impl SocDiagnostics {
    pub fn strictly_concave(&self) -> bool {
        self.follower.strictly_concave() && self.leader.is_some_and(|l| l.strictly_concave())
    }
}

/// Local grid certification result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certification {
    pub follower_max_improvement: f64,
    pub leader_max_improvement: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Profits exactly as a printed closed form states them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedProfits {
    pub pi_m: f64,
    pub pi_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumOutcome {
    pub scenario: Scenario,
    pub params: ModelParams,
    pub decisions: Decisions,
    /// Objective demand at the decisions.
    pub demands: DemandBundle,
    pub pi_m_perceived: f64,
    pub pi_m_realized: f64,
    pub pi_p: f64,
    pub pi_sc: f64,
    pub printed: Option<PrintedProfits>,
    pub aux: Option<AuxiliaryValues>,
    pub foc_residual_max: f64,
    pub follower_residual: f64,
    pub leader_residual: Option<f64>,
    pub soc: SocDiagnostics,
    pub feasible: bool,
    pub method: Method,
    pub certification: Option<Certification>,
    pub domain_warnings: Vec<DomainViolation>,
}

impl EquilibriumOutcome {
    /// Value of a reported variable. Profits come from the printed
    /// expressions when present, else from the profit functionals (the
    /// manufacturer's own, i.e. perceived, objective).
    pub fn value(&self, v: Variable) -> Option<f64> {
        match v {
            Variable::P => Some(self.decisions.p),
            Variable::W => self.decisions.w,
            Variable::H => Some(self.decisions.h),
            Variable::S => Some(self.decisions.s),
            Variable::PiM => Some(self.printed.map_or(self.pi_m_perceived, |x| x.pi_m)),
            Variable::PiP => Some(self.printed.map_or(self.pi_p, |x| x.pi_p)),
        }
    }

    /// Same as [`value`](Self::value) but profits always come from the
    /// profit functionals evaluated at the reported decisions.
    pub fn evaluated(&self, v: Variable) -> Option<f64> {
        match v {
            Variable::PiM => Some(self.pi_m_perceived),
            Variable::PiP => Some(self.pi_p),
            _ => self.value(v),
        }
    }
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().map(|x| libm::fabs(*x)).fold(0.0, f64::max)
}

/// Builds an outcome at given decisions, computing profits and the
/// sequential-game FOC residuals and curvature.
pub(crate) fn assemble(
    scenario: Scenario,
    params: &ModelParams,
    decisions: Decisions,
    method: Method,
    printed: Option<PrintedProfits>,
    aux: Option<AuxiliaryValues>,
    domain_warnings: Vec<DomainViolation>,
) -> Result<EquilibriumOutcome> {
    let demands = expected_demands(params, &decisions, Viewpoint::Objective);
    let pi_m_perceived = manufacturer_profit(scenario, params, &decisions, Viewpoint::ManufacturerPerceived)?;
    let pi_m_realized = manufacturer_profit(scenario, params, &decisions, Viewpoint::Objective)?;
    let pi_p = platform_profit(scenario, params, &decisions)?;

    let follower_residual = max_abs(&stage::manufacturer_gradient(scenario, params, &decisions));
    let lead = Leader {
        w: decisions.w.unwrap_or(0.0),
        s: decisions.s,
    };
    let leader_residual = stage::leader_gradient(scenario, params, lead)
        .ok()
        .map(|g| match scenario.contract {
            Contract::UsageBased => max_abs(&g),
            Contract::RevenueShare => libm::fabs(g[1]),
        });
    let leader_soc = stage::leader_hessian(scenario, params).ok().map(|h| match scenario.contract {
        Contract::UsageBased => StageCurvature::from_matrix(&h),
        Contract::RevenueShare => StageCurvature::scalar(h[1][1]),
    });
    let soc = SocDiagnostics {
        follower: StageCurvature::from_matrix(&stage::manufacturer_hessian(scenario, params)),
        leader: leader_soc,
    };
    Ok(EquilibriumOutcome {
        scenario,
        params: *params,
        decisions,
        demands,
        pi_m_perceived,
        pi_m_realized,
        pi_p,
        pi_sc: pi_m_realized + pi_p,
        printed,
        aux,
        foc_residual_max: f64::max(follower_residual, leader_residual.unwrap_or(0.0)),
        follower_residual,
        leader_residual,
        soc,
        feasible: demands.feasible,
        method,
        certification: None,
        domain_warnings,
    })
}
