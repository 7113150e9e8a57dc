//! Expected demand and the scenario profit functionals.
//!
//! Every profit integrand is affine in the innovation sensitivity `beta`, so
//! expectations are taken by substituting the mean sensitivity. The same
//! functionals are exposed at a fixed `beta` so that Monte Carlo averages can
//! be compared against the closed expectations.

use crate::error::{Error, Result};
use crate::params::{Contract, Decisions, ModelParams, Rationality, Scenario, Viewpoint};

/// Expected demand split by consumer segment, with the purchase thresholds
/// at the sensitivity used for the evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandBundle {
    /// Privacy-insensitive segment (shares data with the platform).
    pub e_d_i: f64,
    /// Privacy-sensitive segment.
    pub e_d_s: f64,
    pub e_d_t: f64,
    pub gamma_i: f64,
    pub gamma_s: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub gamma_i: f64,
    pub gamma_s: f64,
    pub feasible: bool,
}

pub fn sensitivity(params: &ModelParams, viewpoint: Viewpoint) -> f64 {
    match viewpoint {
        Viewpoint::Objective => params.mu,
        Viewpoint::ManufacturerPerceived => params.perceived_mu(),
    }
}

/// Demand at an explicit mean sensitivity `m`.
pub fn demands_at(params: &ModelParams, d: &Decisions, m: f64) -> DemandBundle {
    let ModelParams {
        alpha, q, lambda, ..
    } = *params;
    let e_d_t = (q - d.p + m * (d.h + alpha * lambda * d.s)) / q;
    let gamma_i = (d.p - m * (d.h + alpha * d.s)) / q;
    let gamma_s = (d.p - m * d.h) / q;
    let e_d_i = lambda * (1.0 - gamma_i);
    let e_d_s = (1.0 - lambda) * (1.0 - gamma_s);
    DemandBundle {
        e_d_i,
        e_d_s,
        e_d_t,
        gamma_i,
        gamma_s,
        feasible: in_unit(gamma_i) && in_unit(gamma_s),
    }
}

fn in_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

pub fn expected_demands(params: &ModelParams, d: &Decisions, viewpoint: Viewpoint) -> DemandBundle {
    demands_at(params, d, sensitivity(params, viewpoint))
}

/// Purchase thresholds at the objective mean sensitivity.
pub fn purchase_thresholds(params: &ModelParams, d: &Decisions) -> Thresholds {
    let b = demands_at(params, d, params.mu);
    Thresholds {
        gamma_i: b.gamma_i,
        gamma_s: b.gamma_s,
        feasible: b.feasible,
    }
}

fn fee(contract: Contract, d: &Decisions) -> Result<f64> {
    match contract {
        Contract::UsageBased => d.w.ok_or(Error::MissingFee),
        Contract::RevenueShare => Ok(0.0),
    }
}

/// Manufacturer payoff when demand is driven by mean sensitivity `m`.
pub fn manufacturer_payoff(
    contract: Contract,
    params: &ModelParams,
    d: &Decisions,
    m: f64,
) -> Result<f64> {
    let w = fee(contract, d)?;
    let dt = demands_at(params, d, m).e_d_t;
    let revenue = match contract {
        Contract::UsageBased => (d.p - w) * dt,
        Contract::RevenueShare => params.share_r * d.p * dt,
    };
    Ok(revenue - params.k * d.h * d.h)
}

/// Platform payoff when demand is driven by mean sensitivity `m`.
pub fn platform_payoff(contract: Contract, params: &ModelParams, d: &Decisions, m: f64) -> Result<f64> {
    let w = fee(contract, d)?;
    let b = demands_at(params, d, m);
    let revenue = match contract {
        Contract::UsageBased => w * b.e_d_t,
        Contract::RevenueShare => (1.0 - params.share_r) * d.p * b.e_d_t,
    };
    Ok(revenue - params.k * d.s * d.s + params.theta * d.s * b.e_d_i)
}

/// Manufacturer profit. For an overconfident manufacturer the perceived
/// viewpoint gives the objective it optimizes and the objective viewpoint
/// gives realized profit; for a rational one both coincide.
pub fn manufacturer_profit(
    scenario: Scenario,
    params: &ModelParams,
    d: &Decisions,
    viewpoint: Viewpoint,
) -> Result<f64> {
    params.validate()?;
    let m = match (scenario.rationality, viewpoint) {
        (Rationality::Overconfident, Viewpoint::ManufacturerPerceived) => params.perceived_mu(),
        _ => params.mu,
    };
    manufacturer_payoff(scenario.contract, params, d, m)
}

/// Platform profit; the platform always holds objective beliefs.
pub fn platform_profit(scenario: Scenario, params: &ModelParams, d: &Decisions) -> Result<f64> {
    params.validate()?;
    platform_payoff(scenario.contract, params, d, params.mu)
}

/// Realized manufacturer profit plus platform profit.
pub fn supply_chain_profit(scenario: Scenario, params: &ModelParams, d: &Decisions) -> Result<f64> {
    Ok(manufacturer_profit(scenario, params, d, Viewpoint::Objective)?
        + platform_profit(scenario, params, d)?)
}

/// Per-draw integrands for one sensitivity draw `beta`:
/// `(perceived manufacturer, realized manufacturer, platform)`.
/// The perceived draw is shifted by the overconfidence bias `mu*(eps' - 1)`.
pub fn payoffs_at_draw(
    scenario: Scenario,
    params: &ModelParams,
    d: &Decisions,
    beta: f64,
) -> Result<(f64, f64, f64)> {
    let bias = match scenario.rationality {
        Rationality::Rational => 0.0,
        Rationality::Overconfident => params.mu * (params.epsilon_prime - 1.0),
    };
    Ok((
        manufacturer_payoff(scenario.contract, params, d, beta + bias)?,
        manufacturer_payoff(scenario.contract, params, d, beta)?,
        platform_payoff(scenario.contract, params, d, beta)?,
    ))
}
