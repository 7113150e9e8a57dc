//! Stage-level calculus shared by the closed-form audit and the oracle.
//!
//! Both profits are quadratic in the decisions, so the manufacturer's
//! stationarity conditions are a 2×2 linear system in `(p, h)` and every
//! gradient and Hessian below is exact.

use crate::error::{Error, Result};
use crate::model::demands_at;
use crate::params::{Contract, Decisions, ModelParams, Scenario};

pub type Mat2 = [[f64; 2]; 2];

/// The platform's decision vector as the manufacturer sees it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leader {
    pub w: f64,
    pub s: f64,
}

/// `M [p, h]^T = rhs + B [w, s]^T` at a leader point, for mean sensitivity `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FollowerSystem {
    pub matrix: Mat2,
    pub rhs: [f64; 2],
    pub coupling: Mat2,
}

pub fn follower_system(contract: Contract, params: &ModelParams, m: f64) -> FollowerSystem {
    let ModelParams {
        alpha,
        q,
        k,
        lambda,
        share_r: r,
        ..
    } = *params;
    match contract {
        Contract::UsageBased => FollowerSystem {
            matrix: [[2.0, -m], [-m, 2.0 * k * q]],
            rhs: [q, 0.0],
            coupling: [[1.0, m * alpha * lambda], [-m, 0.0]],
        },
        Contract::RevenueShare => FollowerSystem {
            matrix: [[2.0, -m], [-r * m, 2.0 * k * q]],
            rhs: [q, 0.0],
            coupling: [[0.0, m * alpha * lambda], [0.0, 0.0]],
        },
    }
}

pub fn det2(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn inverse(a: &Mat2, stage: &'static str) -> Result<Mat2> {
    let det = det2(a);
    let scale = libm::fabs(a[0][0] * a[1][1]) + libm::fabs(a[0][1] * a[1][0]);
    if libm::fabs(det) <= 1e-12 * f64::max(scale, 1.0) {
        return Err(Error::Degenerate {
            stage,
            determinant: det,
        });
    }
    Ok([
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ])
}

pub fn mul_vec(a: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// The manufacturer's stationary `(p, h)` and the Jacobian `d(p,h)/d(w,s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FollowerResponse {
    pub p: f64,
    pub h: f64,
    pub jacobian: Mat2,
}

pub fn follower_response(scenario: Scenario, params: &ModelParams, lead: Leader) -> Result<FollowerResponse> {
    let m = scenario.manufacturer_mu(params);
    let sys = follower_system(scenario.contract, params, m);
    let inv = inverse(&sys.matrix, "manufacturer")?;
    let b = mul_vec(&sys.coupling, [lead.w, lead.s]);
    let [p, h] = mul_vec(&inv, [sys.rhs[0] + b[0], sys.rhs[1] + b[1]]);
    Ok(FollowerResponse {
        p,
        h,
        jacobian: mul(&inv, &sys.coupling),
    })
}

pub fn fee_of(contract: Contract, w: f64) -> Option<f64> {
    match contract {
        Contract::UsageBased => Some(w),
        Contract::RevenueShare => None,
    }
}

/// Analytic `(∂π_m/∂p, ∂π_m/∂h)` of the manufacturer's own objective.
pub fn manufacturer_gradient(scenario: Scenario, params: &ModelParams, d: &Decisions) -> [f64; 2] {
    let m = scenario.manufacturer_mu(params);
    let ModelParams {
        alpha,
        q,
        k,
        lambda,
        share_r: r,
        ..
    } = *params;
    let core = q - 2.0 * d.p + m * d.h + m * alpha * lambda * d.s;
    match scenario.contract {
        Contract::UsageBased => {
            let w = d.w.unwrap_or(0.0);
            [(core + w) / q, m * (d.p - w) / q - 2.0 * k * d.h]
        }
        Contract::RevenueShare => [r * core / q, r * m * d.p / q - 2.0 * k * d.h],
    }
}

pub fn manufacturer_hessian(scenario: Scenario, params: &ModelParams) -> Mat2 {
    let m = scenario.manufacturer_mu(params);
    let (q, k) = (params.q, params.k);
    let c = match scenario.contract {
        Contract::UsageBased => 1.0,
        Contract::RevenueShare => params.share_r,
    };
    [[-2.0 * c / q, c * m / q], [c * m / q, -2.0 * k]]
}

/// Analytic partials of platform profit in `(p, h, w, s)`.
pub fn platform_partials(contract: Contract, params: &ModelParams, d: &Decisions) -> [f64; 4] {
    let ModelParams {
        alpha,
        q,
        k,
        theta,
        lambda,
        mu,
        share_r: r,
        ..
    } = *params;
    let b = demands_at(params, d, mu);
    let data_p = -theta * d.s * lambda / q;
    let data_h = theta * d.s * lambda * mu / q;
    let data_s = -2.0 * k * d.s + theta * b.e_d_i + theta * d.s * lambda * mu * alpha / q;
    match contract {
        Contract::UsageBased => {
            let w = d.w.unwrap_or(0.0);
            [
                -w / q + data_p,
                w * mu / q + data_h,
                b.e_d_t,
                w * mu * alpha * lambda / q + data_s,
            ]
        }
        Contract::RevenueShare => {
            let g = 1.0 - r;
            [
                g * (b.e_d_t - d.p / q) + data_p,
                g * d.p * mu / q + data_h,
                0.0,
                g * d.p * mu * alpha * lambda / q + data_s,
            ]
        }
    }
}

/// Constant Hessian of platform profit in `(p, h, w, s)`.
pub fn platform_hessian(contract: Contract, params: &ModelParams) -> [[f64; 4]; 4] {
    let ModelParams {
        alpha,
        q,
        k,
        theta,
        lambda,
        mu,
        share_r: r,
        ..
    } = *params;
    let mut h = [[0.0; 4]; 4];
    let ss = -2.0 * k + 2.0 * theta * lambda * mu * alpha / q;
    let ps = -theta * lambda / q;
    let hs = theta * lambda * mu / q;
    match contract {
        Contract::UsageBased => {
            h[0][2] = -1.0 / q;
            h[1][2] = mu / q;
            h[2][3] = mu * alpha * lambda / q;
            h[0][3] = ps;
        }
        Contract::RevenueShare => {
            let g = 1.0 - r;
            h[0][0] = -2.0 * g / q;
            h[0][1] = g * mu / q;
            h[0][3] = g * mu * alpha * lambda / q + ps;
        }
    }
    h[1][3] = hs;
    h[3][3] = ss;
    for i in 0..4 {
        for j in 0..i {
            h[i][j] = h[j][i];
        }
    }
    h
}

/// Gradient of the platform's reduced objective `Φ(w, s) = π_p(BR(w,s), w, s)`.
/// Under revenue sharing only the `s` component is meaningful.
pub fn leader_gradient(scenario: Scenario, params: &ModelParams, lead: Leader) -> Result<[f64; 2]> {
    let br = follower_response(scenario, params, lead)?;
    let d = Decisions {
        p: br.p,
        w: fee_of(scenario.contract, lead.w),
        h: br.h,
        s: lead.s,
    };
    let g = platform_partials(scenario.contract, params, &d);
    let j = br.jacobian;
    Ok([
        g[2] + g[0] * j[0][0] + g[1] * j[1][0],
        g[3] + g[0] * j[0][1] + g[1] * j[1][1],
    ])
}

/// Constant Hessian of the reduced leader objective.
pub fn leader_hessian(scenario: Scenario, params: &ModelParams) -> Result<Mat2> {
    let br = follower_response(scenario, params, Leader { w: 0.0, s: 0.0 })?;
    let j = br.jacobian;
    // Columns of the map (w, s) -> (p, h, w, s).
    let t = [[j[0][0], j[0][1]], [j[1][0], j[1][1]], [1.0, 0.0], [0.0, 1.0]];
    let hp = platform_hessian(scenario.contract, params);
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = 0.0;
            for i in 0..4 {
                for jj in 0..4 {
                    acc += t[i][a] * hp[i][jj] * t[jj][b];
                }
            }
            out[a][b] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{manufacturer_payoff, platform_payoff};
    use crate::params::ParamName;

    fn probe() -> ModelParams {
        ModelParams::reference()
            .with(ParamName::EpsilonPrime, 1.2)
            .with(ParamName::ShareR, 0.4)
    }

    fn fd<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let h = 1e-5;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn benchmark_follower_is_singular() {
        let p = ModelParams::text_benchmark();
        let r = follower_response(Scenario::UN, &p, Leader { w: 0.1, s: 0.0625 });
        assert!(matches!(r, Err(Error::Degenerate { .. })));
    }

    #[test]
    fn follower_example() {
        let p = ModelParams::text_benchmark().with(ParamName::Mu, 0.9).with(ParamName::Theta, 0.4);
        let r = follower_response(Scenario::UN, &p, Leader { w: 0.1, s: 0.0 }).unwrap();
        assert!((r.h - 0.9 * 0.4 / 0.19).abs() < 1e-12);
    }

    #[test]
    fn manufacturer_gradient_matches_fd() {
        let p = probe();
        for sc in Scenario::ALL {
            let d = Decisions {
                p: 1.1,
                w: fee_of(sc.contract, 0.3),
                h: 0.4,
                s: 0.2,
            };
            let m = sc.manufacturer_mu(&p);
            let g = manufacturer_gradient(sc, &p, &d);
            let gp = fd(|x| manufacturer_payoff(sc.contract, &p, &Decisions { p: x, ..d }, m).unwrap(), d.p);
            let gh = fd(|x| manufacturer_payoff(sc.contract, &p, &Decisions { h: x, ..d }, m).unwrap(), d.h);
            assert!((g[0] - gp).abs() < 1e-8 && (g[1] - gh).abs() < 1e-8, "{sc}");
        }
    }

    #[test]
    fn platform_partials_match_fd() {
        let p = probe();
        for c in [Contract::UsageBased, Contract::RevenueShare] {
            let d = Decisions {
                p: 1.1,
                w: fee_of(c, 0.3),
                h: 0.4,
                s: 0.2,
            };
            let g = platform_partials(c, &p, &d);
            let f = |d: Decisions| platform_payoff(c, &p, &d, p.mu).unwrap();
            assert!((g[0] - fd(|x| f(Decisions { p: x, ..d }), d.p)).abs() < 1e-8);
            assert!((g[1] - fd(|x| f(Decisions { h: x, ..d }), d.h)).abs() < 1e-8);
            assert!((g[3] - fd(|x| f(Decisions { s: x, ..d }), d.s)).abs() < 1e-8);
            if c == Contract::UsageBased {
                assert!((g[2] - fd(|x| f(Decisions { w: Some(x), ..d }), 0.3)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn leader_gradient_matches_fd_of_reduced_objective() {
        let p = probe();
        for sc in Scenario::ALL {
            let phi = |w: f64, s: f64| {
                let br = follower_response(sc, &p, Leader { w, s }).unwrap();
                let d = Decisions {
                    p: br.p,
                    w: fee_of(sc.contract, w),
                    h: br.h,
                    s,
                };
                platform_payoff(sc.contract, &p, &d, p.mu).unwrap()
            };
            let g = leader_gradient(sc, &p, Leader { w: 0.3, s: 0.2 }).unwrap();
            assert!((g[1] - fd(|s| phi(0.3, s), 0.2)).abs() < 1e-7, "{sc}");
            if sc.uses_fee() {
                assert!((g[0] - fd(|w| phi(w, 0.2), 0.3)).abs() < 1e-7, "{sc}");
            }
            let h = leader_hessian(sc, &p).unwrap();
            let g2 = leader_gradient(sc, &p, Leader { w: 0.3, s: 0.2 + 1e-3 }).unwrap();
            assert!(((g2[1] - g[1]) / 1e-3 - h[1][1]).abs() < 1e-7, "{sc}");
        }
    }
}
