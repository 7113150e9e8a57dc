#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use smartgame_core::model::{manufacturer_profit, platform_profit};
use smartgame_core::params::{Decisions, ModelParams, ParamName, Scenario, Viewpoint};
use smartgame_core::oracle::well_posed;

/// Random parameters for which the scenario's game is well posed: valid,
/// inside the domain checks, follower away from singularity, and both
/// stages strictly concave.
pub fn valid_point(rng: &mut ChaCha8Rng, scenario: Scenario) -> ModelParams {
    loop {
        let mu = rng.random_range(0.3..1.2);
        let mut p = ModelParams::reference();
        p.alpha = rng.random_range(0.5..1.5);
        p.q = rng.random_range(0.5..3.0);
        p.k = rng.random_range(0.3..1.0);
        p.mu = mu;
        p.sigma2 = mu * mu / 3.0;
        p.beta_hat = 2.0 * mu;
        p.theta = rng.random_range(0.0..mu / 2.0);
        p.lambda = rng.random_range(0.0..1.0);
        p.share_r = rng.random_range(0.05..0.95);
        p.epsilon_prime = if scenario.rational() == scenario {
            1.0
        } else {
            rng.random_range(1.0..1.5)
        };
        if well_posed(scenario, &p) {
            return p;
        }
    }
}

/// Gradient and Hessian of a quadratic in two variables from unit-step
/// differences at the origin; exact up to rounding for quadratics.
fn fit2<F: Fn(f64, f64) -> f64>(f: F) -> ([f64; 2], [[f64; 2]; 2]) {
    let f00 = f(0.0, 0.0);
    let g = [(f(1.0, 0.0) - f(-1.0, 0.0)) / 2.0, (f(0.0, 1.0) - f(0.0, -1.0)) / 2.0];
    let hxx = f(1.0, 0.0) - 2.0 * f00 + f(-1.0, 0.0);
    let hyy = f(0.0, 1.0) - 2.0 * f00 + f(0.0, -1.0);
    let hxy = (f(1.0, 1.0) - f(1.0, -1.0) - f(-1.0, 1.0) + f(-1.0, -1.0)) / 4.0;
    (g, [[hxx, hxy], [hxy, hyy]])
}

fn argmax2<F: Fn(f64, f64) -> f64>(f: F) -> (f64, f64) {
    let (g, h) = fit2(f);
    let det = h[0][0] * h[1][1] - h[0][1] * h[0][1];
    let x = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
    let y = -(-h[1][0] * g[0] + h[0][0] * g[1]) / det;
    (x, y)
}

fn argmax1<F: Fn(f64) -> f64>(f: F) -> f64 {
    let g = (f(1.0) - f(-1.0)) / 2.0;
    let h = f(1.0) - 2.0 * f(0.0) + f(-1.0);
    -g / h
}

/// Backward induction by fitting each stage's quadratic payoff from
/// profit evaluations alone.
pub fn reference_solve(scenario: Scenario, p: &ModelParams) -> Decisions {
    let fee = scenario.uses_fee();
    let follower = |w: f64, s: f64| {
        let (pp, hh) = argmax2(|x, y| {
            let d = Decisions {
                p: x,
                w: fee.then_some(w),
                h: y,
                s,
            };
            manufacturer_profit(scenario, p, &d, Viewpoint::ManufacturerPerceived).unwrap()
        });
        Decisions {
            p: pp,
            w: fee.then_some(w),
            h: hh,
            s,
        }
    };
    let leader = |w: f64, s: f64| platform_profit(scenario, p, &follower(w, s)).unwrap();
    if fee {
        let (w, s) = argmax2(leader);
        follower(w, s)
    } else {
        follower(0.0, argmax1(|s| leader(0.0, s)))
    }
}

pub fn reference_params() -> ModelParams {
    ModelParams::reference()
}

pub fn at(r: f64, eps: f64) -> ModelParams {
    ModelParams::reference()
        .with(ParamName::ShareR, r)
        .with(ParamName::EpsilonPrime, eps)
}
