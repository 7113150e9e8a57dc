//! Exogenous parameters, scenarios and decision vectors.

use core::fmt;
use core::str::FromStr;

use thiserror::Error;

/// Names of the exogenous parameters, as used by sweeps and derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamName {
    Alpha,
    Q,
    K,
    Theta,
    Lambda,
    Mu,
    EpsilonPrime,
    ShareR,
    Sigma2,
    BetaHat,
}

impl ParamName {
    pub const ALL: [ParamName; 10] = [
        ParamName::Alpha,
        ParamName::Q,
        ParamName::K,
        ParamName::Theta,
        ParamName::Lambda,
        ParamName::Mu,
        ParamName::EpsilonPrime,
        ParamName::ShareR,
        ParamName::Sigma2,
        ParamName::BetaHat,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Alpha => "alpha",
            ParamName::Q => "q",
            ParamName::K => "k",
            ParamName::Theta => "theta",
            ParamName::Lambda => "lambda",
            ParamName::Mu => "mu",
            ParamName::EpsilonPrime => "epsilon_prime",
            ParamName::ShareR => "r",
            ParamName::Sigma2 => "sigma2",
            ParamName::BetaHat => "beta_hat",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown parameter name")]
pub struct UnknownParam;

impl FromStr for ParamName {
    type Err = UnknownParam;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "alpha" => ParamName::Alpha,
            "q" => ParamName::Q,
            "k" => ParamName::K,
            "theta" => ParamName::Theta,
            "lambda" => ParamName::Lambda,
            "mu" => ParamName::Mu,
            "epsilon_prime" | "eps" | "epsilon" => ParamName::EpsilonPrime,
            "r" | "share_r" => ParamName::ShareR,
            "sigma2" => ParamName::Sigma2,
            "beta_hat" => ParamName::BetaHat,
            _ => return Err(UnknownParam),
        })
    }
}

/// A broken parameter bound.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ParamViolation {
    #[error("{0} must be finite")]
    NotFinite(ParamName),
    #[error("{0} must be > 0 (got {1})")]
    NotPositive(ParamName, f64),
    #[error("{0} must be >= 0 (got {1})")]
    Negative(ParamName, f64),
    #[error("lambda must lie in [0, 1] (got {0})")]
    LambdaOutOfRange(f64),
    #[error("r must lie in (0, 1) (got {0})")]
    ShareOutOfRange(f64),
    #[error("epsilon_prime must be >= 1 (got {0})")]
    EpsilonBelowOne(f64),
    #[error("beta_hat must exceed mu (beta_hat {beta_hat}, mu {mu})")]
    BetaHatNotAboveMu { beta_hat: f64, mu: f64 },
    #[error("theta must satisfy θ ≤ μ/2 (theta {theta}, mu/2 {half_mu})")]
    ThetaAboveHalfMu { theta: f64, half_mu: f64 },
}

/// All exogenous quantities of the game.
///
/// Fields are public for convenience; every solver re-validates before use.
/// `epsilon_prime` is the normalized overconfidence level: the manufacturer
/// believes the mean innovation sensitivity is `mu * epsilon_prime`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub q: f64,
    pub k: f64,
    pub theta: f64,
    pub lambda: f64,
    pub mu: f64,
    pub epsilon_prime: f64,
    pub share_r: f64,
    pub sigma2: f64,
    pub beta_hat: f64,
}

impl ModelParams {
    /// The calibration under which the printed specialized equilibria and
    /// every published threshold are stationary points of the game:
    /// alpha = 1, q = 2, k = 0.5, mu = 1, theta = 0.4, lambda = 0.5.
    pub fn reference() -> Self {
        Self::with_mu_defaults(1.0, 2.0, 0.5, 0.4, 0.5, 1.0, 1.0, 0.3)
    }

    /// The parameter values as stated in the text (q = 0.5). At mu = 1 the
    /// manufacturer's stage is exactly singular here (4kq = mu^2).
    pub fn text_benchmark() -> Self {
        Self::with_mu_defaults(1.0, 0.5, 0.5, 0.4, 0.5, 1.0, 1.0, 0.3)
    }

    /// Builds a validated record; `sigma2` and `beta_hat` default to the
    /// moments of Uniform(0, 2 mu).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        q: f64,
        k: f64,
        theta: f64,
        lambda: f64,
        mu: f64,
        epsilon_prime: f64,
        share_r: f64,
    ) -> Result<Self, ParamViolation> {
        let p = Self::with_mu_defaults(alpha, q, k, theta, lambda, mu, epsilon_prime, share_r);
        p.validate()?;
        Ok(p)
    }

    #[allow(clippy::too_many_arguments)]
    fn with_mu_defaults(
        alpha: f64,
        q: f64,
        k: f64,
        theta: f64,
        lambda: f64,
        mu: f64,
        epsilon_prime: f64,
        share_r: f64,
    ) -> Self {
        ModelParams {
            alpha,
            q,
            k,
            theta,
            lambda,
            mu,
            epsilon_prime,
            share_r,
            sigma2: mu * mu / 3.0,
            beta_hat: 2.0 * mu,
        }
    }

    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::Alpha => self.alpha,
            ParamName::Q => self.q,
            ParamName::K => self.k,
            ParamName::Theta => self.theta,
            ParamName::Lambda => self.lambda,
            ParamName::Mu => self.mu,
            ParamName::EpsilonPrime => self.epsilon_prime,
            ParamName::ShareR => self.share_r,
            ParamName::Sigma2 => self.sigma2,
            ParamName::BetaHat => self.beta_hat,
        }
    }

    /// Sets one field without validating.
    pub fn set(&mut self, name: ParamName, value: f64) {
        let slot = match name {
            ParamName::Alpha => &mut self.alpha,
            ParamName::Q => &mut self.q,
            ParamName::K => &mut self.k,
            ParamName::Theta => &mut self.theta,
            ParamName::Lambda => &mut self.lambda,
            ParamName::Mu => &mut self.mu,
            ParamName::EpsilonPrime => &mut self.epsilon_prime,
            ParamName::ShareR => &mut self.share_r,
            ParamName::Sigma2 => &mut self.sigma2,
            ParamName::BetaHat => &mut self.beta_hat,
        };
        *slot = value;
    }

    /// Copy with one field replaced. When `mu` changes, `beta_hat` is kept
    /// above it by re-deriving the uniform defaults if it would fall short.
    pub fn with(mut self, name: ParamName, value: f64) -> Self {
        self.set(name, value);
        if name == ParamName::Mu && self.beta_hat <= self.mu {
            self.beta_hat = 2.0 * self.mu;
            self.sigma2 = self.mu * self.mu / 3.0;
        }
        self
    }

    pub fn validate(&self) -> Result<(), ParamViolation> {
        for name in ParamName::ALL {
            if !self.get(name).is_finite() {
                return Err(ParamViolation::NotFinite(name));
            }
        }
        for name in [ParamName::Alpha, ParamName::Q, ParamName::K, ParamName::Mu] {
            let v = self.get(name);
            if v <= 0.0 {
                return Err(ParamViolation::NotPositive(name, v));
            }
        }
        for name in [ParamName::Theta, ParamName::Sigma2] {
            let v = self.get(name);
            if v < 0.0 {
                return Err(ParamViolation::Negative(name, v));
            }
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(ParamViolation::LambdaOutOfRange(self.lambda));
        }
        if !(self.share_r > 0.0 && self.share_r < 1.0) {
            return Err(ParamViolation::ShareOutOfRange(self.share_r));
        }
        if self.epsilon_prime < 1.0 {
            return Err(ParamViolation::EpsilonBelowOne(self.epsilon_prime));
        }
        if self.beta_hat <= self.mu {
            return Err(ParamViolation::BetaHatNotAboveMu {
                beta_hat: self.beta_hat,
                mu: self.mu,
            });
        }
        if self.theta > self.mu / 2.0 {
            return Err(ParamViolation::ThetaAboveHalfMu {
                theta: self.theta,
                half_mu: self.mu / 2.0,
            });
        }
        Ok(())
    }

    /// Mean innovation sensitivity the manufacturer acts on.
    pub fn perceived_mu(&self) -> f64 {
        self.mu * self.epsilon_prime
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Contract {
    UsageBased,
    RevenueShare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rationality {
    Rational,
    Overconfident,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scenario {
    pub contract: Contract,
    pub rationality: Rationality,
}

impl Scenario {
    pub const UN: Scenario = Scenario::new(Contract::UsageBased, Rationality::Rational);
    pub const RN: Scenario = Scenario::new(Contract::RevenueShare, Rationality::Rational);
    pub const UO: Scenario = Scenario::new(Contract::UsageBased, Rationality::Overconfident);
    pub const RO: Scenario = Scenario::new(Contract::RevenueShare, Rationality::Overconfident);
    pub const ALL: [Scenario; 4] = [Scenario::UN, Scenario::RN, Scenario::UO, Scenario::RO];

    pub const fn new(contract: Contract, rationality: Rationality) -> Self {
        Scenario {
            contract,
            rationality,
        }
    }

    pub fn tag(self) -> &'static str {
        match (self.contract, self.rationality) {
            (Contract::UsageBased, Rationality::Rational) => "un",
            (Contract::RevenueShare, Rationality::Rational) => "rn",
            (Contract::UsageBased, Rationality::Overconfident) => "uo",
            (Contract::RevenueShare, Rationality::Overconfident) => "ro",
        }
    }

    pub fn uses_fee(self) -> bool {
        self.contract == Contract::UsageBased
    }

    /// The same contract with a rational manufacturer.
    pub fn rational(self) -> Self {
        Scenario::new(self.contract, Rationality::Rational)
    }

    /// Mean sensitivity behind the manufacturer's own objective.
    pub fn manufacturer_mu(self, params: &ModelParams) -> f64 {
        match self.rationality {
            Rationality::Rational => params.mu,
            Rationality::Overconfident => params.perceived_mu(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown scenario (expected un, rn, uo or ro)")]
pub struct UnknownScenario;

impl FromStr for Scenario {
    type Err = UnknownScenario;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "un" => Scenario::UN,
            "rn" => Scenario::RN,
            "uo" => Scenario::UO,
            "ro" => Scenario::RO,
            _ => return Err(UnknownScenario),
        })
    }
}

impl fmt::Display for Contract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Contract::UsageBased => "usage",
            Contract::RevenueShare => "revenue",
        })
    }
}

impl fmt::Display for Rationality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rationality::Rational => "rational",
            Rationality::Overconfident => "overconfident",
        })
    }
}

/// Whose belief about innovation sensitivity a demand evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Viewpoint {
    Objective,
    ManufacturerPerceived,
}

/// One scenario's choice vector. `w` is only meaningful under the
/// usage-based contract and is ignored everywhere else.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Decisions {
    pub p: f64,
    pub w: Option<f64>,
    pub h: f64,
    pub s: f64,
}

impl Decisions {
    pub fn usage(p: f64, w: f64, h: f64, s: f64) -> Self {
        Decisions {
            p,
            w: Some(w),
            h,
            s,
        }
    }

    pub fn revenue(p: f64, h: f64, s: f64) -> Self {
        Decisions { p, w: None, h, s }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        assert!(ModelParams::reference().validate().is_ok());
        assert!(ModelParams::text_benchmark().validate().is_ok());
    }

    #[test]
    fn theta_cap_is_enforced() {
        let p = ModelParams::text_benchmark().with(ParamName::Theta, 0.6);
        assert!(matches!(
            p.validate(),
            Err(ParamViolation::ThetaAboveHalfMu { .. })
        ));
    }

    #[test]
    fn bounds_are_named() {
        let base = ModelParams::reference();
        assert_eq!(
            base.with(ParamName::Lambda, 1.5).validate(),
            Err(ParamViolation::LambdaOutOfRange(1.5))
        );
        assert_eq!(
            base.with(ParamName::ShareR, 1.0).validate(),
            Err(ParamViolation::ShareOutOfRange(1.0))
        );
        assert_eq!(
            base.with(ParamName::EpsilonPrime, 0.9).validate(),
            Err(ParamViolation::EpsilonBelowOne(0.9))
        );
        assert!(matches!(
            base.with(ParamName::K, 0.0).validate(),
            Err(ParamViolation::NotPositive(ParamName::K, _))
        ));
        assert!(matches!(
            base.with(ParamName::Q, f64::NAN).validate(),
            Err(ParamViolation::NotFinite(ParamName::Q))
        ));
    }

    #[test]
    fn raising_mu_keeps_support_above_mean() {
        let p = ModelParams::reference().with(ParamName::Mu, 5.0);
        assert!(p.beta_hat > p.mu);
    }

    #[test]
    fn scenario_tags_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(sc.tag().parse::<Scenario>().unwrap(), sc);
        }
        assert!("xx".parse::<Scenario>().is_err());
    }

    #[test]
    fn param_names_round_trip() {
        for name in ParamName::ALL {
            assert_eq!(name.as_str().parse::<ParamName>().unwrap(), name);
        }
    }
}
