//! Data series behind the published figures, on the reference calibration.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::closed_form::{closed_form_equilibrium, eps1};
use crate::error::{Error, Result};
use crate::oracle::{stackelberg_solve, SolveOptions};
use crate::params::{ModelParams, ParamName, Scenario};
use crate::statics::interior;

pub const SAMPLES: usize = 101;
pub const FIG3_SHARE: f64 = 0.3;
pub const FIG4_SHARES: [f64; 3] = [0.3, 0.5, 0.7];
/// 0.125 sits beside the published shares so the s-crossing is visible.
pub const FIG5_SHARES: [f64; 4] = [0.1, 0.125, 0.2, 0.3];

/// A table sharing one axis column; every row has `columns.len()` values.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub id: u8,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureData {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn figure(id: u8, opts: &SolveOptions) -> Result<FigureData> {
    match id {
        3 => figure3(opts),
        4 => figure4(),
        5 => figure5(opts),
        _ => Err(Error::InvalidOptions("figure id must be 3, 4 or 5")),
    }
}

/// π_m under both contracts against λ.
fn figure3(opts: &SolveOptions) -> Result<FigureData> {
    let base = ModelParams::reference().with(ParamName::ShareR, FIG3_SHARE);
    let mut rows = Vec::with_capacity(SAMPLES);
    for l in interior(0.0, 1.0, SAMPLES) {
        let p = base.with(ParamName::Lambda, l);
        let un = stackelberg_solve(Scenario::UN, &p, opts)?;
        let rn = stackelberg_solve(Scenario::RN, &p, opts)?;
        rows.push(vec![l, un.pi_m_perceived, rn.pi_m_perceived]);
    }
    Ok(FigureData {
        id: 3,
        columns: vec!["lambda".into(), "pi_m_un".into(), "pi_m_rn".into()],
        rows,
    })
}

/// s^ro against ε′ for several shares.
fn figure4() -> Result<FigureData> {
    let base = ModelParams::reference();
    let mut columns = vec![String::from("epsilon_prime")];
    columns.extend(FIG4_SHARES.iter().map(|r| format!("s_ro_r{r}")));
    let mut rows = Vec::with_capacity(SAMPLES);
    for e in interior(1.0, eps1(), SAMPLES) {
        let mut row = vec![e];
        for r in FIG4_SHARES {
            let p = base.with(ParamName::ShareR, r).with(ParamName::EpsilonPrime, e);
            row.push(closed_form_equilibrium(Scenario::RO, &p)?.decisions.s);
        }
        rows.push(row);
    }
    Ok(FigureData { id: 4, columns, rows })
}

/// s^ro beside s^rn against ε′ with r_n = r_o.
fn figure5(opts: &SolveOptions) -> Result<FigureData> {
    let base = ModelParams::reference();
    let mut columns = vec![String::from("epsilon_prime")];
    for r in FIG5_SHARES {
        columns.push(format!("s_ro_r{r}"));
        columns.push(format!("s_rn_r{r}"));
    }
    // The rational benchmark does not depend on ε′.
    let mut s_rn = Vec::with_capacity(FIG5_SHARES.len());
    for r in FIG5_SHARES {
        s_rn.push(stackelberg_solve(Scenario::RN, &base.with(ParamName::ShareR, r), opts)?.decisions.s);
    }
    let mut rows = Vec::with_capacity(SAMPLES);
    for e in interior(1.0, eps1(), SAMPLES) {
        let mut row = vec![e];
        for (r, rn) in FIG5_SHARES.iter().zip(&s_rn) {
            let p = base.with(ParamName::ShareR, *r).with(ParamName::EpsilonPrime, e);
            row.push(closed_form_equilibrium(Scenario::RO, &p)?.decisions.s);
            row.push(*rn);
        }
        rows.push(row);
    }
    Ok(FigureData { id: 5, columns, rows })
}
