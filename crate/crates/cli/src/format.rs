//! Fixed float and CSV formatting for byte-stable output.

use std::io::Write;

use anyhow::Result;
use smartgame_core::oracle::ReconciliationReport;
use smartgame_core::{EquilibriumOutcome, Method};

pub const SIGNIFICANT: usize = 12;

pub const SOLVE_HEADER: [&str; 27] = [
    "scenario",
    "contract",
    "rationality",
    "alpha",
    "q",
    "k",
    "theta",
    "lambda",
    "mu",
    "epsilon_prime",
    "r",
    "method",
    "p",
    "w",
    "h",
    "s",
    "e_d_i",
    "e_d_s",
    "e_d_t",
    "gamma_i",
    "gamma_s",
    "feasible",
    "pi_m_perceived",
    "pi_m_realized",
    "pi_p",
    "pi_sc",
    "foc_residual_max",
];

pub const LEDGER_HEADER: [&str; 7] = ["scenario", "variable", "closed", "oracle", "abs_gap", "rel_gap", "verdict"];

/// `%.12g`: shortest of fixed or scientific, trailing zeros dropped.
pub fn fmt_g(x: f64) -> String {
    fmt_g_digits(x, SIGNIFICANT)
}

pub fn fmt_g_digits(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let digits = digits.max(1);
    // Round first so the exponent reflects the printed mantissa.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn method_str(m: Method) -> &'static str {
    m.as_str()
}

pub fn contract_str(o: &EquilibriumOutcome) -> &'static str {
    if o.scenario.uses_fee() {
        "usage"
    } else {
        "revenue"
    }
}

pub fn solve_record(o: &EquilibriumOutcome) -> Vec<String> {
    let p = &o.params;
    let d = &o.decisions;
    let dm = &o.demands;
    let rationality = if o.scenario.rational() == o.scenario {
        "rational"
    } else {
        "overconfident"
    };
    vec![
        o.scenario.tag().into(),
        contract_str(o).into(),
        rationality.into(),
        fmt_g(p.alpha),
        fmt_g(p.q),
        fmt_g(p.k),
        fmt_g(p.theta),
        fmt_g(p.lambda),
        fmt_g(p.mu),
        fmt_g(p.epsilon_prime),
        fmt_g(p.share_r),
        method_str(o.method).into(),
        fmt_g(d.p),
        d.w.map(fmt_g).unwrap_or_default(),
        fmt_g(d.h),
        fmt_g(d.s),
        fmt_g(dm.e_d_i),
        fmt_g(dm.e_d_s),
        fmt_g(dm.e_d_t),
        fmt_g(dm.gamma_i),
        fmt_g(dm.gamma_s),
        dm.feasible.to_string(),
        fmt_g(o.pi_m_perceived),
        fmt_g(o.pi_m_realized),
        fmt_g(o.pi_p),
        fmt_g(o.pi_sc),
        fmt_g(o.foc_residual_max),
    ]
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_outcomes<W: Write>(out: W, outcomes: &[EquilibriumOutcome]) -> Result<()> {
    let rows: Vec<Vec<String>> = outcomes.iter().map(solve_record).collect();
    write_table(out, &SOLVE_HEADER, &rows)
}

pub fn write_ledger<W: Write>(out: W, reports: &[ReconciliationReport]) -> Result<()> {
    let mut rows = Vec::new();
    for rep in reports {
        for e in &rep.entries {
            let verdict = match (e.verdict.as_str(), e.documented) {
                ("Mismatch", true) => "Mismatch(documented)",
                (v, _) => v,
            };
            rows.push(vec![
                rep.scenario.tag().into(),
                e.variable.as_str().into(),
                fmt_g(e.closed),
                fmt_g(e.oracle),
                fmt_g(e.abs_gap),
                fmt_g(e.rel_gap),
                verdict.into(),
            ]);
        }
    }
    write_table(out, &LEDGER_HEADER, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(0.049916805324459), "0.0499168053245");
        assert_eq!(fmt_g(2.0), "2");
        assert_eq!(fmt_g(-0.5), "-0.5");
        assert_eq!(fmt_g(1e-12), "1e-12");
        assert_eq!(fmt_g(1.5e-5), "1.5e-05");
        assert_eq!(fmt_g(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(999999999999.5), "1e+12");
    }
}
