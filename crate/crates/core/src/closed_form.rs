//! Published equilibrium expressions, evaluated exactly as printed.
//!
//! Nothing here is corrected. Each outcome carries its own FOC residuals
//! and curvature so that a defective expression shows up as a large
//! residual and, through [`crate::oracle::reconcile`], as a ledgered
//! mismatch. The overconfidence forms are specialized to one calibration
//! (see [`is_reference_calibration`]).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::outcome::{assemble, EquilibriumOutcome, Method, PrintedProfits, Variable};
use crate::params::{Contract, Decisions, ModelParams, ParamViolation, Rationality, Scenario};
use crate::poly::{poly_root, PolySpec};

/// Shorthands the printed rational equilibria are written in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliaryValues {
    pub a_val: f64,
    pub b_val: f64,
    pub c_val: f64,
    pub d_val: f64,
}

pub fn auxiliary_values(params: &ModelParams) -> AuxiliaryValues {
    let ModelParams {
        alpha: al,
        q,
        k,
        theta: th,
        lambda: la,
        mu,
        share_r: r,
        ..
    } = *params;
    let a_val = al * th * (la - 1.0) * la * mu;
    let b_val = k
        * q
        * (8.0 * k * q - th * th * la * la
            + 2.0 * al * th * (4.0 - 3.0 * la) * la * mu
            + (2.0 + al * al * la * la) * mu * mu);
    let mu3 = mu * mu * mu;
    let c_val = 16.0 * k * k * k * q * q * q
        + r * r * al * th * (1.0 - la) * la * mu3 * mu * mu
        + k * q * r * mu3 * (2.0 * al * th * (4.0 - 3.0 * la) * la + r * mu)
        - 4.0 * k * k * q * q
            * mu
            * (2.0 * r * mu + al * la * (2.0 * th * (2.0 - la) + (1.0 - r) * al * la * mu));
    let d_val = 4.0 * k * k * q * q + r * al * th * (1.0 - la) * la * mu3
        - k * q * mu * (al * th * (4.0 - 3.0 * la) * la + r * mu);
    AuxiliaryValues {
        a_val,
        b_val,
        c_val,
        d_val,
    }
}

/// A bound of the validity domain that a parameter point breaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainViolation {
    Invalid(ParamViolation),
    MuAboveBound { mu: f64, bound: f64, contract: Contract },
    ThetaAboveHalfMu { theta: f64, half_mu: f64 },
    EpsilonAtOrAboveTwo { epsilon_prime: f64 },
    EpsilonAboveEps2 { epsilon_prime: f64, bound: f64 },
    EpsilonAboveEps1 { epsilon_prime: f64, bound: f64 },
}

impl fmt::Display for DomainViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainViolation::Invalid(v) => write!(f, "{v}"),
            DomainViolation::MuAboveBound {
                mu,
                bound,
                contract,
            } => write!(f, "mu = {mu} exceeds the {contract} bound {bound:.6}"),
            DomainViolation::ThetaAboveHalfMu { theta, half_mu } => {
                write!(f, "theta <= mu/2 violated (theta {theta}, mu/2 {half_mu})")
            }
            DomainViolation::EpsilonAtOrAboveTwo { epsilon_prime } => {
                write!(f, "epsilon_prime = {epsilon_prime} must be < 2")
            }
            DomainViolation::EpsilonAboveEps2 {
                epsilon_prime,
                bound,
            } => write!(f, "epsilon_prime = {epsilon_prime} must be < eps2 = {bound:.6}"),
            DomainViolation::EpsilonAboveEps1 {
                epsilon_prime,
                bound,
            } => write!(f, "epsilon_prime = {epsilon_prime} must be < eps1 = {bound:.6}"),
        }
    }
}

pub fn eps1_spec() -> PolySpec {
    PolySpec {
        coefficients: vec![64.0, 30.0, -38.0, -17.0, 1.0],
        root_index: 3,
        bracket: None,
    }
}

/// Upper overconfidence bound of the revenue-sharing game at θ = 0.4, λ = 0.5.
pub fn eps1() -> f64 {
    poly_root(&eps1_spec()).expect("quartic has four real roots")
}

pub fn eps2_spec(theta: f64, lambda: f64) -> PolySpec {
    let (t, l) = (theta, lambda);
    let tl = t * l;
    let l2 = l * l;
    PolySpec {
        coefficients: vec![
            -12.0 + 12.0 * tl + 4.0 * l2 - 6.0 * t * l2 + 2.0 * tl * tl,
            -12.0 + 4.0 * l + 14.0 * tl - 4.0 * l2 - 10.0 * t * l2 + 3.0 * tl * tl,
            4.0 + 2.0 * l - tl - 2.0 * l2 - t * l2,
            4.0 - 2.0 * l - 4.0 * tl + 2.0 * l2 + 4.0 * t * l2 - tl * tl,
            -tl + t * l2,
        ],
        root_index: 3,
        bracket: None,
    }
}

/// Upper overconfidence bound of the usage-based game.
pub fn eps2(theta: f64, lambda: f64) -> Result<f64> {
    Ok(poly_root(&eps2_spec(theta, lambda))?)
}

pub fn mu_bound_revenue_spec() -> PolySpec {
    PolySpec {
        coefficients: vec![-28.0, 0.0, 24.0, 0.0, 1.0],
        root_index: 2,
        bracket: None,
    }
}

pub fn mu_bound_revenue() -> f64 {
    poly_root(&mu_bound_revenue_spec()).expect("quartic has two real roots")
}

pub fn mu_bound_usage() -> f64 {
    2.0 / libm::sqrt(3.0)
}

/// Difference `π_m^un − π_m^rn` in λ at r = 0.3 (manufacturer contract choice).
pub fn prop2_crossing_spec() -> PolySpec {
    PolySpec {
        coefficients: vec![
            -791453125.0,
            1266325000.0,
            -2159597500.0,
            1882375000.0,
            602171925.0,
            -945883300.0,
            836904192.0,
            -251924024.0,
            11038532.0,
        ],
        root_index: 2,
        bracket: None,
    }
}

/// Sign change of `∂s^ro/∂ε` in ε at r = 0.15.
pub fn prop4_crossing_spec() -> PolySpec {
    PolySpec {
        coefficients: vec![24144000.0, 1424000.0, -18204600.0, 280800.0, 5700.0, 2385.0, 10152.0],
        root_index: 3,
        bracket: None,
    }
}

/// Sign change of `s^ro − s^rn` in ε at r = 0.125.
pub fn prop6_crossing_spec() -> PolySpec {
    PolySpec {
        coefficients: vec![-120928.0, 54144.0, 36349.0, 993.0],
        root_index: 3,
        bracket: None,
    }
}

fn near(a: f64, b: f64) -> bool {
    libm::fabs(a - b) <= 1e-12
}

/// The calibration at which the printed overconfidence equilibria are
/// stationary points: α = 1, q = 2, k = 0.5, μ = 1.
pub fn is_reference_calibration(params: &ModelParams) -> bool {
    near(params.alpha, 1.0) && near(params.q, 2.0) && near(params.k, 0.5) && near(params.mu, 1.0)
}

fn specialized_eps_setting(params: &ModelParams) -> bool {
    near(params.alpha, 1.0) && near(params.k, 0.5) && near(params.mu, 1.0)
}

/// Every broken validity bound for the scenario. The ε bounds were derived
/// for α = 1, k = 0.5, μ = 1 and are only applied there.
pub fn domain_check(params: &ModelParams, scenario: Scenario) -> Vec<DomainViolation> {
    let mut out = Vec::new();
    match params.validate() {
        Ok(()) | Err(ParamViolation::ThetaAboveHalfMu { .. }) => {}
        Err(e) => {
            out.push(DomainViolation::Invalid(e));
            return out;
        }
    }
    let bound = match scenario.contract {
        Contract::UsageBased => mu_bound_usage(),
        Contract::RevenueShare => mu_bound_revenue(),
    };
    if params.mu >= bound {
        out.push(DomainViolation::MuAboveBound {
            mu: params.mu,
            bound,
            contract: scenario.contract,
        });
    }
    if params.theta > params.mu / 2.0 {
        out.push(DomainViolation::ThetaAboveHalfMu {
            theta: params.theta,
            half_mu: params.mu / 2.0,
        });
    }
    if scenario.rationality == Rationality::Overconfident && specialized_eps_setting(params) {
        let e = params.epsilon_prime;
        if e >= 2.0 {
            out.push(DomainViolation::EpsilonAtOrAboveTwo { epsilon_prime: e });
        }
        match scenario.contract {
            Contract::UsageBased => {
                if let Ok(b) = eps2(params.theta, params.lambda) {
                    if e >= b {
                        out.push(DomainViolation::EpsilonAboveEps2 {
                            epsilon_prime: e,
                            bound: b,
                        });
                    }
                }
            }
            Contract::RevenueShare => {
                if near(params.theta, 0.4) && near(params.lambda, 0.5) {
                    let b = eps1();
                    if e >= b {
                        out.push(DomainViolation::EpsilonAboveEps1 {
                            epsilon_prime: e,
                            bound: b,
                        });
                    }
                }
            }
        }
    }
    out
}

fn require_domain(params: &ModelParams, scenario: Scenario) -> Result<()> {
    let v = domain_check(params, scenario);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Domain {
            scenario,
            violations: v,
        })
    }
}

/// Printed rational usage-based equilibrium. ε′ is ignored.
pub fn lemma1_equilibrium(params: &ModelParams) -> Result<EquilibriumOutcome> {
    require_domain(params, Scenario::UN)?;
    let ModelParams {
        alpha: al,
        q,
        k,
        theta: th,
        lambda: la,
        mu,
        ..
    } = *params;
    let aux = auxiliary_values(params);
    let (a, b) = (aux.a_val, aux.b_val);
    let den = -2.0 * mu * mu * a + b;
    let inner = th * th * la * la + mu * mu + al * th * la * mu;
    let p = q * (6.0 * k * k * q * q - a * mu * mu - k * q * (inner - 5.0 * a)) / den;
    let h = q * mu * (k * q + a) / den;
    let w = q * (4.0 * k * k * q * q - a * mu * mu - k * q * (inner - 3.0 * a)) / den;
    let s = k * q * q * la * (th + al * mu) / den;
    let pi_m = k * q * q * (k * q + a) * (k * q + a) * (4.0 * k * q - mu * mu) / (den * den);
    let pi_p = q * mu * (k * q + a) / den;
    assemble(
        Scenario::UN,
        params,
        Decisions::usage(p, w, h, s),
        Method::ClosedForm,
        Some(PrintedProfits { pi_m, pi_p }),
        Some(aux),
        Vec::new(),
    )
}

/// Printed rational revenue-sharing equilibrium with `r = share_r`.
pub fn lemma2_equilibrium(params: &ModelParams) -> Result<EquilibriumOutcome> {
    require_domain(params, Scenario::RN)?;
    let ModelParams {
        alpha: al,
        q,
        k,
        theta: th,
        lambda: la,
        mu,
        share_r: r,
        ..
    } = *params;
    let aux = auxiliary_values(params);
    let (c, d) = (aux.c_val, aux.d_val);
    let p = 2.0 * k * q * q * d / c;
    let h = q * r * mu * d / c;
    let s = k * q * q * la * (4.0 * k * q * (th + (1.0 - r) * al * mu) - r * th * mu * mu) / c;
    let pi_m = k * q * q * r * (r * mu * mu - 4.0 * k * q) * d * d / (c * c);
    let pi_p = k * k * q * q * q
        * (4.0 * k * q * (1.0 - r) + th * la * (th * la + 4.0 * (1.0 - r) * al * (la - 1.0) * mu))
        / c;
    assemble(
        Scenario::RN,
        params,
        Decisions::revenue(p, h, s),
        Method::ClosedForm,
        Some(PrintedProfits { pi_m, pi_p }),
        Some(aux),
        Vec::new(),
    )
}

fn require_calibration(params: &ModelParams, scenario: Scenario) -> Result<()> {
    params.validate()?;
    if !is_reference_calibration(params) {
        return Err(Error::NotAtCalibration {
            scenario,
            detail: "alpha, q, k or mu differs",
        });
    }
    require_domain(params, scenario)
}

/// Printed overconfident usage-based equilibrium in (ε′, θ, λ).
pub fn usage_overconfident_equilibrium(params: &ModelParams) -> Result<EquilibriumOutcome> {
    require_calibration(params, Scenario::UO)?;
    let (th, la, e) = (params.theta, params.lambda, params.epsilon_prime);
    let e1 = 1.0 + e;
    let la2 = la * la;
    let den = -4.0 * e1 * (2.0 + e) + 4.0 * e1 * (2.0 + e) * th * la
        + (4.0 + e1 * e1 * (-4.0 + th) * th) * la2;
    let x = 2.0 * e1 - 2.0 * e1 * th * la + (-2.0 + th + e * (2.0 + (2.0 + e) * th)) * la2;
    let p = (-4.0 * e1 * (-6.0 + e * e)
        + 4.0 * e1 * (-6.0 + e * e) * th * la
        + 2.0
            * (4.0 * (-1.0 + e) - 2.0 * (-3.0 + e) * e1 * e1 * th + (-2.0 + e) * e1 * e1 * th * th)
            * la2)
        / ((-2.0 + e) * den);
    let h = 2.0 * e * x / ((-2.0 + e) * den);
    let w = 2.0 * e1 * (-2.0 * (2.0 + e) + 2.0 * (2.0 + e) * th * la + e1 * (-2.0 + th) * th * la2)
        / den;
    let s = -2.0 * e1 * (2.0 + th + e * th) * la / den;
    let pi_m = -2.0 * (2.0 + e) * x * x / ((-2.0 + e) * den * den);
    let pi_p = -2.0 * e1 * e1 * (1.0 + th * (-1.0 + la) * la) / den;
    assemble(
        Scenario::UO,
        params,
        Decisions::usage(p, w, h, s),
        Method::ClosedForm,
        Some(PrintedProfits { pi_m, pi_p }),
        None,
        Vec::new(),
    )
}

/// Printed overconfident revenue-sharing equilibrium in (ε′, θ, λ, r).
pub fn revenue_overconfident_equilibrium(params: &ModelParams) -> Result<EquilibriumOutcome> {
    require_calibration(params, Scenario::RO)?;
    let (th, la, e, ro) = (
        params.theta,
        params.lambda,
        params.epsilon_prime,
        params.share_r,
    );
    let la2 = la * la;
    let g = -4.0 + ro * e * e;
    let den = g * g - g * g * th * la
        + e * (-4.0 * (-1.0 + ro) * (-2.0 + e) + (-2.0 + ro * e) * g * th) * la2;
    let tail = 2.0 * (-1.0 + ro) * (-1.0 + e) + (-6.0 + ro * e * (1.0 + e)) * th;
    let y = 8.0 - 8.0 * th * la + e * (-2.0 * ro * e + 2.0 * ro * e * th * la - tail * la2);
    let z = -2.0 + ro * (-1.0 + e) * e;
    let p = (16.0 - 4.0 * ro * e * e + 4.0 * (-4.0 + ro * e * e) * th * la - 2.0 * e * tail * la2) / den;
    let h = ro * e * y / den;
    let s = (2.0 * (-1.0 + ro) * (-4.0 + ro * (-1.0 + e) * e * e) + z * g * th) * la / den;
    let v = -8.0 + 8.0 * th * la + e * (2.0 * ro * e - 2.0 * ro * e * th * la + tail * la2);
    let pi_m = -(ro * g * v * v) / (2.0 * den);
    let pi_p = (8.0 * (-1.0 + ro) * z - 8.0 * (-1.0 + ro) * z * th * la
        + (4.0 * (-1.0 + ro) * (-1.0 + ro) * (-1.0 + e) * (-1.0 + e)
            + 4.0 * (-1.0 + ro) * (1.0 + e) * z * th
            + z * z * th * th)
            * la2)
        / (2.0 * den);
    assemble(
        Scenario::RO,
        params,
        Decisions::revenue(p, h, s),
        Method::ClosedForm,
        Some(PrintedProfits { pi_m, pi_p }),
        None,
        Vec::new(),
    )
}

/// Dispatches to the printed equilibrium of a scenario.
pub fn closed_form_equilibrium(scenario: Scenario, params: &ModelParams) -> Result<EquilibriumOutcome> {
    match (scenario.contract, scenario.rationality) {
        (Contract::UsageBased, Rationality::Rational) => lemma1_equilibrium(params),
        (Contract::RevenueShare, Rationality::Rational) => lemma2_equilibrium(params),
        (Contract::UsageBased, Rationality::Overconfident) => usage_overconfident_equilibrium(params),
        (Contract::RevenueShare, Rationality::Overconfident) => revenue_overconfident_equilibrium(params),
    }
}

/// Printed variables known to disagree with the backward-induction
/// stationary point. Each is established by the reconciliation tests.
pub fn known_mismatches(scenario: Scenario) -> &'static [Variable] {
    match (scenario.contract, scenario.rationality) {
        (Contract::UsageBased, Rationality::Rational) => &[
            Variable::P,
            Variable::W,
            Variable::H,
            Variable::S,
            Variable::PiM,
            Variable::PiP,
        ],
        (Contract::RevenueShare, Rationality::Rational) => &[
            Variable::P,
            Variable::H,
            Variable::S,
            Variable::PiM,
            Variable::PiP,
        ],
        (Contract::UsageBased, Rationality::Overconfident) => &[],
        (Contract::RevenueShare, Rationality::Overconfident) => &[Variable::PiM],
    }
}

/// Printed λ-derivatives of the rational usage-based equilibrium, written
/// in (θ, λ, μ) at α = 1, k = 0.5, q = 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPartials {
    pub p: f64,
    pub w: f64,
    pub h: f64,
    pub s: f64,
    pub pi_m: f64,
    pub pi_p: f64,
}

pub fn printed_lambda_partials(theta: f64, lambda: f64, mu: f64) -> LambdaPartials {
    let (t, l, m) = (theta, lambda, mu);
    let m2 = m * m;
    let dd = -8.0 + t * t * l * l + (2.0 + l * l) * m2 + 2.0 * t * l * m * (4.0 - m2 + l * (-3.0 + m2));
    let dd2 = dd * dd;
    let g = -2.0 + t * l * m;
    let tm2 = (t + m) * (t + m);
    LambdaPartials {
        h: -2.0 * l * m * tm2 * g / dd2,
        p: 2.0 * l * g * (4.0 * t * m - m2 * (-6.0 + m2) + t * t * (-2.0 + m2)) / dd2,
        w: 2.0 * l * g * (t * t - m2) * (-4.0 + m2) / dd2,
        s: 2.0 * (t + m) * (8.0 + t * t * l * l + (-2.0 + l * l) * m2 + 2.0 * t * l * l * m * (-3.0 + m2))
            / dd2,
        pi_m: -4.0 * l * tm2 * g * (1.0 + t * (-1.0 + l) * l * m) * (-4.0 + m2) / (dd2 * dd),
        pi_p: 2.0 * l * tm2 * g / dd2,
    }
}

/// Printed λ-derivatives whose sign disagrees with the stationary point.
pub const KNOWN_PARTIAL_MISMATCHES: [Variable; 3] = [Variable::P, Variable::W, Variable::PiP];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamName;

    #[test]
    fn benchmark_aux() {
        let p = ModelParams::text_benchmark();
        let a = auxiliary_values(&p);
        assert!((a.a_val + 0.1).abs() < 1e-15);
        assert!((a.b_val - 1.3025).abs() < 1e-14);
        assert!((-2.0 * a.a_val + a.b_val - 1.5025).abs() < 1e-14);
    }

    #[test]
    fn lemma1_benchmark_values() {
        let o = lemma1_equilibrium(&ModelParams::text_benchmark()).unwrap();
        assert!((o.decisions.h - 0.075 / 1.5025).abs() < 1e-14);
        assert!((o.decisions.s - 0.0875 / 1.5025).abs() < 1e-14);
        // Known defects: the fee is negative and the printed platform profit
        // repeats the hardware expression.
        assert!(o.decisions.w.unwrap() < 0.0);
        assert_eq!(o.printed.unwrap().pi_p, o.decisions.h);
        assert!(o.foc_residual_max > 1e-3);
    }

    #[test]
    fn s_vanishes_without_data_customers() {
        let base = ModelParams::reference().with(ParamName::Lambda, 0.0);
        assert_eq!(lemma1_equilibrium(&base).unwrap().decisions.s, 0.0);
        assert_eq!(lemma2_equilibrium(&base).unwrap().decisions.s, 0.0);
        let e = base.with(ParamName::EpsilonPrime, 1.3);
        assert_eq!(usage_overconfident_equilibrium(&e).unwrap().decisions.s, 0.0);
        assert_eq!(revenue_overconfident_equilibrium(&e).unwrap().decisions.s, 0.0);
    }

    #[test]
    fn overconfident_forms_are_stationary_at_reference() {
        let base = ModelParams::reference().with(ParamName::EpsilonPrime, 1.2);
        let uo = usage_overconfident_equilibrium(&base).unwrap();
        assert!(uo.foc_residual_max < 1e-12, "{}", uo.foc_residual_max);
        let ro = revenue_overconfident_equilibrium(&base.with(ParamName::ShareR, 0.3)).unwrap();
        assert!(ro.foc_residual_max < 1e-12, "{}", ro.foc_residual_max);
        assert!((uo.printed.unwrap().pi_m - uo.pi_m_perceived).abs() < 1e-12);
    }

    #[test]
    fn overconfident_forms_reject_other_calibrations() {
        let p = ModelParams::text_benchmark().with(ParamName::EpsilonPrime, 1.2);
        assert!(matches!(
            usage_overconfident_equilibrium(&p),
            Err(Error::NotAtCalibration { .. })
        ));
    }

    #[test]
    fn eps_bound_enforced() {
        let p = ModelParams::reference().with(ParamName::EpsilonPrime, 1.4);
        assert!(matches!(
            revenue_overconfident_equilibrium(&p),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn domain_examples() {
        let p = ModelParams::text_benchmark();
        assert!(domain_check(&p, Scenario::UN).is_empty());
        let v = domain_check(&p.with(ParamName::Mu, 1.1), Scenario::RN);
        assert!(matches!(v[0], DomainViolation::MuAboveBound { bound, .. } if (bound - 1.0562).abs() < 1e-3));
        let v = domain_check(&p.with(ParamName::Theta, 0.6), Scenario::UN);
        assert_eq!(
            v,
            [DomainViolation::ThetaAboveHalfMu {
                theta: 0.6,
                half_mu: 0.5
            }]
        );
        assert!(!domain_check(&p.with(ParamName::Mu, 1.2), Scenario::UN).is_empty());
    }

    #[test]
    fn root_constants() {
        assert!((eps1() - 1.3287874789772205).abs() < 1e-12);
        assert!((eps2(0.4, 0.5).unwrap() - 1.637853).abs() < 1e-5);
        assert!((mu_bound_revenue() - libm::sqrt(-12.0 + libm::sqrt(172.0))).abs() < 1e-12);
    }

    #[test]
    fn aux_is_nonpositive() {
        for i in 0..=10 {
            let l = i as f64 / 10.0;
            let p = ModelParams::reference().with(ParamName::Lambda, l);
            assert!(auxiliary_values(&p).a_val <= 0.0);
        }
    }
}
