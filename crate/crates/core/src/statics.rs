//! Comparative statics: numeric derivatives, certified sign-change scans,
//! sign region maps, boundary discovery and the proposition suites.
//!
//! Claims are judged with the printed closed forms. A claim that involves a
//! printed quantity catalogued as disagreeing with the oracle is judged
//! again with the oracle, whose verdict governs; the closed-form violation
//! count stays in the report.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::closed_form::{closed_form_equilibrium, eps1, eps2, known_mismatches, mu_bound_revenue, mu_bound_usage};
use crate::error::{Error, Result};
use crate::oracle::{stackelberg_solve, SolveOptions};
use crate::outcome::{EquilibriumOutcome, Method, Variable};
use crate::params::{Contract, ModelParams, ParamName, Scenario};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluator {
    ClosedForm,
    Oracle(SolveOptions),
}

impl Evaluator {
    pub fn method(&self) -> Method {
        match self {
            Evaluator::ClosedForm => Method::ClosedForm,
            Evaluator::Oracle(_) => Method::Oracle,
        }
    }

    pub fn outcome(&self, scenario: Scenario, params: &ModelParams) -> Result<EquilibriumOutcome> {
        match self {
            Evaluator::ClosedForm => closed_form_equilibrium(scenario, params),
            Evaluator::Oracle(opts) => stackelberg_solve(scenario, params, opts),
        }
    }
}

/// What can be read off an equilibrium. `PiM` is the manufacturer's own
/// (perceived) objective, printed where a closed form prints it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    P,
    W,
    H,
    S,
    PiM,
    PiMRealized,
    PiP,
}

impl Observable {
    pub fn as_str(self) -> &'static str {
        match self {
            Observable::P => "p",
            Observable::W => "w",
            Observable::H => "h",
            Observable::S => "s",
            Observable::PiM => "pi_m",
            Observable::PiMRealized => "pi_m_realized",
            Observable::PiP => "pi_p",
        }
    }

    /// The printed variable behind the observable.
    pub fn variable(self) -> Variable {
        match self {
            Observable::P => Variable::P,
            Observable::W => Variable::W,
            Observable::H => Variable::H,
            Observable::S => Variable::S,
            Observable::PiM | Observable::PiMRealized => Variable::PiM,
            Observable::PiP => Variable::PiP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantity {
    pub scenario: Scenario,
    pub observable: Observable,
}

impl Quantity {
    pub const fn new(scenario: Scenario, observable: Observable) -> Self {
        Quantity {
            scenario,
            observable,
        }
    }

    fn is_catalogued(&self) -> bool {
        known_mismatches(self.scenario).contains(&self.observable.variable())
    }
}

pub fn observe(outcome: &EquilibriumOutcome, obs: Observable) -> Result<f64> {
    let v = match obs {
        Observable::PiMRealized => Some(outcome.pi_m_realized),
        o => outcome.value(o.variable()),
    };
    v.ok_or(Error::Evaluation {
        param: "w",
        value: f64::NAN,
        reason: "no fee under revenue sharing",
    })
}

pub fn evaluate(q: Quantity, params: &ModelParams, ev: &Evaluator) -> Result<f64> {
    observe(&ev.outcome(q.scenario, params)?, q.observable)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimate {
    pub central: f64,
    pub richardson: f64,
    pub step: f64,
    /// Central and Richardson estimates disagree beyond 1e-4 relative.
    pub unstable: bool,
}

const AGREEMENT: f64 = 1e-4;
const DERIVATIVE_FLOOR: f64 = 1e-9;

fn estimate(d_h: f64, d_half: f64, step: f64) -> DerivativeEstimate {
    let richardson = (4.0 * d_half - d_h) / 3.0;
    let unstable = !(libm::fabs(d_h - richardson) <= AGREEMENT * f64::max(libm::fabs(richardson), DERIVATIVE_FLOOR));
    DerivativeEstimate {
        central: d_h,
        richardson,
        step,
        unstable,
    }
}

pub fn default_step(params: &ModelParams, wrt: ParamName) -> f64 {
    1e-4 * f64::max(1.0, libm::fabs(params.get(wrt)))
}

/// Self-test hook: derivative of a plain function.
pub fn probe_partial<F: Fn(f64) -> f64>(f: F, x: f64, step: f64) -> DerivativeEstimate {
    let d_h = (f(x + step) - f(x - step)) / (2.0 * step);
    let d_half = (f(x + step / 2.0) - f(x - step / 2.0)) / step;
    estimate(d_h, d_half, step)
}

/// Central differences of several functionals of one parameter point.
/// `f` returns one value per functional.
pub fn partials_with<F>(f: F, params: &ModelParams, wrt: ParamName, step: f64) -> Result<Vec<DerivativeEstimate>>
where
    F: Fn(&ModelParams) -> Result<Vec<f64>>,
{
    let x = params.get(wrt);
    let mut vals: Vec<Vec<f64>> = Vec::with_capacity(4);
    for off in [step, -step, step / 2.0, -step / 2.0] {
        let at = x + off;
        let p = params.with(wrt, at);
        let stencil_err = |source: Error| Error::Stencil {
            param: wrt.as_str(),
            value: at,
            source: Box::new(source),
        };
        p.validate().map_err(|e| stencil_err(e.into()))?;
        vals.push(f(&p).map_err(stencil_err)?);
    }
    Ok((0..vals[0].len())
        .map(|i| {
            let d_h = (vals[0][i] - vals[1][i]) / (2.0 * step);
            let d_half = (vals[2][i] - vals[3][i]) / step;
            estimate(d_h, d_half, step)
        })
        .collect())
}

/// Derivatives of several observables of one scenario's equilibrium.
pub fn outcome_partials(
    scenario: Scenario,
    params: &ModelParams,
    wrt: ParamName,
    step: Option<f64>,
    ev: &Evaluator,
    observables: &[Observable],
) -> Result<Vec<DerivativeEstimate>> {
    let step = step.unwrap_or_else(|| default_step(params, wrt));
    partials_with(
        |p| {
            let o = ev.outcome(scenario, p)?;
            observables.iter().map(|obs| observe(&o, *obs)).collect()
        },
        params,
        wrt,
        step,
    )
}

pub fn numeric_partial(
    q: Quantity,
    params: &ModelParams,
    wrt: ParamName,
    step: Option<f64>,
    ev: &Evaluator,
) -> Result<DerivativeEstimate> {
    Ok(outcome_partials(q.scenario, params, wrt, step, ev, &[q.observable])?[0])
}

/// A certified sign change: `f(lo)` and `f(hi)` have opposite signs and
/// `hi - lo` is at most the refinement tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub at: f64,
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

pub const CROSSING_TOL: f64 = 1e-8;

fn positive(x: f64) -> bool {
    x >= 0.0
}

pub fn bisect_crossing<F>(f: &mut F, mut lo: f64, mut hi: f64, mut f_lo: f64, mut f_hi: f64) -> Result<Crossing>
where
    F: FnMut(f64) -> Result<f64>,
{
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if positive(fm) == positive(f_lo) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    Ok(Crossing {
        at: 0.5 * (lo + hi),
        lo,
        hi,
        f_lo,
        f_hi,
    })
}

/// Scans `resolution + 1` equally spaced points of `[lo, hi]` and refines
/// every sign change by bisection.
pub fn scan_crossings<F>(mut f: F, lo: f64, hi: f64, resolution: usize) -> Result<Vec<Crossing>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = resolution.max(1);
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let mut ys = Vec::with_capacity(xs.len());
    for &x in &xs {
        ys.push(f(x)?);
    }
    let mut out = Vec::new();
    for i in 0..n {
        if positive(ys[i]) != positive(ys[i + 1]) {
            out.push(bisect_crossing(&mut f, xs[i], xs[i + 1], ys[i], ys[i + 1])?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantityPair {
    pub first: Quantity,
    pub second: Quantity,
}

/// Crossings of `first − second` as one parameter varies over `bracket`.
pub fn threshold_scan(
    pair: QuantityPair,
    base: &ModelParams,
    vary: ParamName,
    bracket: (f64, f64),
    resolution: usize,
    ev: &Evaluator,
) -> Result<Vec<Crossing>> {
    scan_crossings(
        |x| {
            let p = base.with(vary, x);
            Ok(evaluate(pair.first, &p, ev)? - evaluate(pair.second, &p, ev)?)
        },
        bracket.0,
        bracket.1,
        resolution,
    )
}

/// Qualitative shape of a sign sequence along one grid column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnPattern {
    Positive,
    Negative,
    PositiveThenNegative,
    NegativeThenPositive,
    Multiple,
}

impl ColumnPattern {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnPattern::Positive => "positive",
            ColumnPattern::Negative => "negative",
            ColumnPattern::PositiveThenNegative => "positive-then-negative",
            ColumnPattern::NegativeThenPositive => "negative-then-positive",
            ColumnPattern::Multiple => "multiple",
        }
    }

    pub fn classify(signs: &[i8]) -> Self {
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        match (changes, signs.first().copied().unwrap_or(1)) {
            (0, s) if s >= 0 => ColumnPattern::Positive,
            (0, _) => ColumnPattern::Negative,
            (1, s) if s >= 0 => ColumnPattern::PositiveThenNegative,
            (1, _) => ColumnPattern::NegativeThenPositive,
            _ => ColumnPattern::Multiple,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionColumn {
    pub x: f64,
    pub signs: Vec<i8>,
    pub pattern: ColumnPattern,
    pub crossings: Vec<Crossing>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub x_param: ParamName,
    pub y_param: ParamName,
    pub ys: Vec<f64>,
    pub columns: Vec<RegionColumn>,
}

/// A change of column pattern between two neighbouring grid columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternChange {
    pub x_before: f64,
    pub x_after: f64,
    pub from: ColumnPattern,
    pub to: ColumnPattern,
}

impl RegionMap {
    pub fn pattern_changes(&self) -> Vec<PatternChange> {
        self.columns
            .windows(2)
            .filter(|w| w[0].pattern != w[1].pattern)
            .map(|w| PatternChange {
                x_before: w[0].x,
                x_after: w[1].x,
                from: w[0].pattern,
                to: w[1].pattern,
            })
            .collect()
    }

    pub fn column_at(&self, x: f64) -> Option<&RegionColumn> {
        self.columns.iter().find(|c| c.x == x)
    }
}

/// Evaluates the sign of `f(x, y)` on the grid and refines each column's
/// sign changes in `y` by bisection.
pub fn region_map<F>(f: F, x_param: ParamName, xs: &[f64], y_param: ParamName, ys: &[f64]) -> Result<RegionMap>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let mut columns = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut vals = Vec::with_capacity(ys.len());
        for &y in ys {
            vals.push(f(x, y)?);
        }
        let signs: Vec<i8> = vals.iter().map(|v| if positive(*v) { 1 } else { -1 }).collect();
        let mut crossings = Vec::new();
        let mut g = |y: f64| f(x, y);
        for i in 1..ys.len() {
            if signs[i] != signs[i - 1] {
                crossings.push(bisect_crossing(&mut g, ys[i - 1], ys[i], vals[i - 1], vals[i])?);
            }
        }
        columns.push(RegionColumn {
            x,
            pattern: ColumnPattern::classify(&signs),
            signs,
            crossings,
        });
    }
    Ok(RegionMap {
        x_param,
        y_param,
        ys: ys.to_vec(),
        columns,
    })
}

/// `n` interior points of `(lo, hi)`.
pub fn interior(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64).collect()
}

const EDGE: f64 = 1e-3;

/// Boundary constants of the published propositions, discovered on the
/// reference calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet {
    pub r_n1: Option<Crossing>,
    pub r_n2: Option<Crossing>,
    pub r_n3: Option<Crossing>,
    pub r_n4: Option<Crossing>,
    pub r_o1: Option<Crossing>,
    pub r_o2: Option<Crossing>,
    /// Upper edge of the r band where `s^ro − s^rn` changes sign in ε.
    pub r_s_band_hi: Option<Crossing>,
    pub eps_1: f64,
    pub eps_2: f64,
    pub lambda_1_of_rn: Vec<(f64, f64)>,
    pub lambda_2_of_rn: Vec<(f64, f64)>,
    pub eps_of_ro: Vec<(f64, f64)>,
}

fn first_crossing<F: FnMut(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, res: usize) -> Result<Option<Crossing>> {
    Ok(scan_crossings(f, lo, hi, res)?.first().copied())
}

fn profit_gap(
    base: &ModelParams,
    r: f64,
    lambda: f64,
    obs: Observable,
    ev: &Evaluator,
) -> Result<f64> {
    let p = base.with(ParamName::ShareR, r).with(ParamName::Lambda, lambda);
    Ok(evaluate(Quantity::new(Scenario::UN, obs), &p, ev)? - evaluate(Quantity::new(Scenario::RN, obs), &p, ev)?)
}

/// `∂s^ro/∂ε` at `(r, ε)` on the printed forms.
pub fn ds_ro_deps(base: &ModelParams, r: f64, eps: f64) -> Result<f64> {
    let p = base.with(ParamName::ShareR, r).with(ParamName::EpsilonPrime, eps);
    Ok(numeric_partial(
        Quantity::new(Scenario::RO, Observable::S),
        &p,
        ParamName::EpsilonPrime,
        None,
        &Evaluator::ClosedForm,
    )?
    .richardson)
}

/// `s^ro − s^rn` at `(r, ε)`, printed `s^ro` against the oracle `s^rn`.
pub fn s_gap(base: &ModelParams, r: f64, eps: f64, opts: &SolveOptions) -> Result<f64> {
    let p = base.with(ParamName::ShareR, r).with(ParamName::EpsilonPrime, eps);
    Ok(closed_form_equilibrium(Scenario::RO, &p)?.decisions.s - stackelberg_solve(Scenario::RN, &p, opts)?.decisions.s)
}

/// Locates every published boundary on the reference calibration.
/// `samples` sets the scan resolution and the number of curve samples.
pub fn discover_thresholds(opts: &SolveOptions, samples: usize) -> Result<ThresholdSet> {
    let base = ModelParams::reference();
    let ev = Evaluator::Oracle(*opts);
    let e1 = eps1();
    let (rlo, rhi) = (0.01, 0.99);
    let res = samples.max(2);

    // Manufacturer: the high-λ end turns first, then the low-λ end.
    let r_n1 = first_crossing(|r| profit_gap(&base, r, 1.0, Observable::PiM, &ev), rlo, rhi, res)?;
    let r_n2 = first_crossing(|r| profit_gap(&base, r, 0.0, Observable::PiM, &ev), rlo, rhi, res)?;
    // Platform: the low-λ end turns first.
    let r_n3 = first_crossing(|r| profit_gap(&base, r, 0.0, Observable::PiP, &ev), rlo, rhi, res)?;
    let r_n4 = first_crossing(|r| profit_gap(&base, r, 1.0, Observable::PiP, &ev), rlo, rhi, res)?;

    let r_o1 = first_crossing(|r| ds_ro_deps(&base, r, 1.0 + EDGE), rlo, rhi, res)?;
    let r_o2 = first_crossing(|r| ds_ro_deps(&base, r, e1 - EDGE), rlo, rhi, res)?;
    let r_s_band_hi = first_crossing(|r| s_gap(&base, r, e1 - EDGE, opts), rlo, rhi, res)?;

    let curve = |band: (Option<Crossing>, Option<Crossing>), obs: Observable| -> Result<Vec<(f64, f64)>> {
        let (Some(a), Some(b)) = band else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for r in interior(a.at.min(b.at), a.at.max(b.at), samples) {
            if let Some(c) = first_crossing(|l| profit_gap(&base, r, l, obs, &ev), 0.0, 1.0, res)? {
                out.push((r, c.at));
            }
        }
        Ok(out)
    };
    let lambda_1_of_rn = curve((r_n1, r_n2), Observable::PiM)?;
    let lambda_2_of_rn = curve((r_n3, r_n4), Observable::PiP)?;

    let mut eps_of_ro = Vec::new();
    if let (Some(a), Some(b)) = (r_o1, r_o2) {
        for r in interior(a.at, b.at, samples) {
            if let Some(c) = first_crossing(|e| ds_ro_deps(&base, r, e), 1.0 + EDGE, e1 - EDGE, res)? {
                eps_of_ro.push((r, c.at));
            }
        }
    }
    Ok(ThresholdSet {
        r_n1,
        r_n2,
        r_n3,
        r_n4,
        r_o1,
        r_o2,
        r_s_band_hi,
        eps_1: e1,
        eps_2: eps2(base.theta, base.lambda)?,
        lambda_1_of_rn,
        lambda_2_of_rn,
        eps_of_ro,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub coords: Vec<(ParamName, f64)>,
    pub note: Option<&'static str>,
}

impl GridPoint {
    fn of(coords: &[(ParamName, f64)]) -> Self {
        GridPoint {
            coords: coords.to_vec(),
            note: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimResult {
    pub name: String,
    /// Non-governing claims are reported but do not affect the verdict.
    pub governing: bool,
    pub evaluator: Method,
    pub checked: usize,
    pub passed: usize,
    pub violations: Vec<GridPoint>,
    pub unstable: Vec<GridPoint>,
    pub failed: Vec<GridPoint>,
    pub out_of_domain: usize,
    /// Set when the oracle took over from the closed forms.
    pub closed_form_violations: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteVerdict {
    Confirmed,
    Violated,
    Mixed,
}

impl SuiteVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            SuiteVerdict::Confirmed => "Confirmed",
            SuiteVerdict::Violated => "Violated",
            SuiteVerdict::Mixed => "Mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropositionReport {
    pub id: u8,
    pub grid: String,
    pub claims: Vec<ClaimResult>,
    pub notes: Vec<String>,
    pub verdict: SuiteVerdict,
}

impl PropositionReport {
    fn new(id: u8, grid: String, claims: Vec<ClaimResult>, notes: Vec<String>) -> Self {
        let gov = claims.iter().filter(|c| c.governing);
        let verdict = if gov.clone().any(|c| !c.violations.is_empty()) {
            SuiteVerdict::Violated
        } else if gov.clone().any(|c| !c.unstable.is_empty() || !c.failed.is_empty()) {
            SuiteVerdict::Mixed
        } else {
            SuiteVerdict::Confirmed
        };
        PropositionReport {
            id,
            grid,
            claims,
            notes,
            verdict,
        }
    }
}

/// Grid settings for a proposition suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Points per axis.
    pub points: usize,
    /// Overrides the ε′ axis; points outside the claimed range are
    /// counted as out of domain.
    pub epsilon_range: Option<(f64, f64)>,
    pub solve: SolveOptions,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 101,
            epsilon_range: None,
            solve: SolveOptions::fast(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PointCheck {
    Pass,
    Fail,
    Unstable,
}

struct ClaimDef {
    name: String,
    catalogued: bool,
    governing: bool,
}

impl ClaimDef {
    fn new(name: String, quantities: &[Quantity], governing: bool) -> Self {
        ClaimDef {
            name,
            catalogued: quantities.iter().any(|q| q.is_catalogued()),
            governing,
        }
    }
}

struct Point {
    coords: GridPoint,
    params: ModelParams,
    in_domain: bool,
}

fn tally(def: &ClaimDef, points: &[Point], results: &[Result<Vec<PointCheck>>], idx: usize, method: Method) -> ClaimResult {
    let mut out = ClaimResult {
        name: def.name.clone(),
        governing: def.governing,
        evaluator: method,
        checked: 0,
        passed: 0,
        violations: Vec::new(),
        unstable: Vec::new(),
        failed: Vec::new(),
        out_of_domain: 0,
        closed_form_violations: None,
    };
    for (pt, res) in points.iter().zip(results) {
        if !pt.in_domain {
            out.out_of_domain += 1;
            continue;
        }
        out.checked += 1;
        match res {
            Ok(checks) => match checks[idx] {
                PointCheck::Pass => out.passed += 1,
                PointCheck::Fail => out.violations.push(pt.coords.clone()),
                PointCheck::Unstable => out.unstable.push(pt.coords.clone()),
            },
            Err(_) => out.failed.push(pt.coords.clone()),
        }
    }
    out
}

fn run_point_claims<F>(defs: &[ClaimDef], points: &[Point], opts: &SolveOptions, eval: F) -> Vec<ClaimResult>
where
    F: Fn(&ModelParams, &Evaluator) -> Result<Vec<PointCheck>>,
{
    let run = |ev: &Evaluator| -> Vec<Result<Vec<PointCheck>>> {
        points
            .iter()
            .map(|pt| if pt.in_domain { eval(&pt.params, ev) } else { Ok(Vec::new()) })
            .collect()
    };
    let closed = run(&Evaluator::ClosedForm);
    let mut claims: Vec<ClaimResult> = defs
        .iter()
        .enumerate()
        .map(|(i, d)| tally(d, points, &closed, i, Method::ClosedForm))
        .collect();
    if defs.iter().any(|d| d.catalogued) {
        let oracle = run(&Evaluator::Oracle(*opts));
        for (i, d) in defs.iter().enumerate() {
            if d.catalogued {
                let before = claims[i].violations.len();
                claims[i] = tally(d, points, &oracle, i, Method::Oracle);
                claims[i].closed_form_violations = Some(before);
            }
        }
    }
    claims
}

fn sign_check(est: &DerivativeEstimate, want_positive: bool) -> PointCheck {
    if est.unstable {
        PointCheck::Unstable
    } else if (est.richardson > 0.0) == want_positive && est.richardson != 0.0 {
        PointCheck::Pass
    } else {
        PointCheck::Fail
    }
}

fn order_check(a: f64, b: f64) -> PointCheck {
    if a > b {
        PointCheck::Pass
    } else {
        PointCheck::Fail
    }
}

/// Structural claim on a region map: column patterns must appear in the
/// given order along x, and each of `required` must appear at least once.
fn structure_claim(
    name: String,
    map: &Result<RegionMap>,
    order: &[ColumnPattern],
    required: &[ColumnPattern],
    method: Method,
    governing: bool,
) -> ClaimResult {
    let mut out = ClaimResult {
        name,
        governing,
        evaluator: method,
        checked: 0,
        passed: 0,
        violations: Vec::new(),
        unstable: Vec::new(),
        failed: Vec::new(),
        out_of_domain: 0,
        closed_form_violations: None,
    };
    let map = match map {
        Ok(m) => m,
        Err(_) => {
            out.failed.push(GridPoint {
                coords: Vec::new(),
                note: Some("region map evaluation failed"),
            });
            return out;
        }
    };
    let mut rank = 0;
    for col in &map.columns {
        out.checked += 1;
        let pt = GridPoint::of(&[(map.x_param, col.x)]);
        match order.iter().position(|p| *p == col.pattern) {
            Some(r) if r >= rank => {
                rank = r;
                out.passed += 1;
            }
            Some(_) => out.violations.push(GridPoint {
                note: Some("pattern out of order"),
                ..pt
            }),
            None => out.violations.push(GridPoint {
                note: Some("unexpected pattern"),
                ..pt
            }),
        }
    }
    for req in required {
        if !map.columns.iter().any(|c| c.pattern == *req) {
            out.violations.push(GridPoint {
                coords: Vec::new(),
                note: Some(req.as_str()),
            });
        }
    }
    out
}

/// Inserts columns between neighbours whose patterns skip a regime of
/// `order`, so bands narrower than the grid spacing are still seen.
fn refine_skips<F>(map: &mut RegionMap, order: &[ColumnPattern], build: &F) -> Result<()>
where
    F: Fn(&[f64]) -> Result<RegionMap>,
{
    const SUBDIVISIONS: usize = 16;
    const DEPTH: usize = 4;
    let rank = |p: ColumnPattern| order.iter().position(|q| *q == p);
    for _ in 0..DEPTH {
        let gaps: Vec<(f64, f64)> = map
            .columns
            .windows(2)
            .filter(|w| matches!((rank(w[0].pattern), rank(w[1].pattern)), (Some(a), Some(b)) if b > a + 1))
            .map(|w| (w[0].x, w[1].x))
            .collect();
        if gaps.is_empty() {
            break;
        }
        for (a, b) in gaps {
            map.columns.extend(build(&interior(a, b, SUBDIVISIONS))?.columns);
        }
        map.columns.sort_by(|a, b| a.x.total_cmp(&b.x));
    }
    Ok(())
}

fn structure_with_fallback<F>(
    name: String,
    catalogued: bool,
    opts: &SolveOptions,
    xs: &[f64],
    order: &[ColumnPattern],
    required: &[ColumnPattern],
    build: F,
) -> (ClaimResult, Option<RegionMap>)
where
    F: Fn(&Evaluator, &[f64]) -> Result<RegionMap>,
{
    let make = |ev: Evaluator| {
        let mut map = build(&ev, xs)?;
        refine_skips(&mut map, order, &|sub: &[f64]| build(&ev, sub))?;
        Ok(map)
    };
    let closed_map = make(Evaluator::ClosedForm);
    let closed = structure_claim(name.clone(), &closed_map, order, required, Method::ClosedForm, true);
    if catalogued {
        let map = make(Evaluator::Oracle(*opts));
        let mut c = structure_claim(name, &map, order, required, Method::Oracle, true);
        c.closed_form_violations = Some(closed.violations.len() + closed.failed.len());
        (c, map.ok())
    } else {
        (closed, closed_map.ok())
    }
}

fn epsilon_axis(grid: &GridSpec, hi: f64) -> Vec<(f64, bool)> {
    match grid.epsilon_range {
        None => interior(1.0, hi, grid.points).into_iter().map(|e| (e, true)).collect(),
        Some((a, b)) => interior(a, b, grid.points)
            .into_iter()
            .map(|e| (e, e > 1.0 && e < hi))
            .collect(),
    }
}

fn point(params: ModelParams, coords: &[(ParamName, f64)], in_domain: bool) -> Point {
    Point {
        coords: GridPoint::of(coords),
        params,
        in_domain,
    }
}

fn crossing_note(label: &str, map: &Option<RegionMap>, from: ColumnPattern, to: ColumnPattern) -> Option<String> {
    let m = map.as_ref()?;
    m.pattern_changes()
        .iter()
        .find(|c| c.from == from && c.to == to)
        .map(|c| format!("{label} in ({:.6}, {:.6})", c.x_before, c.x_after))
}

/// Runs the sign and ordering claims of one proposition.
pub fn proposition_suite(id: u8, grid: &GridSpec) -> Result<PropositionReport> {
    if grid.points == 0 {
        return Err(Error::InvalidOptions("grid needs at least one point per axis"));
    }
    grid.solve.validate()?;
    match id {
        1 => Ok(prop1(grid)),
        2 => Ok(prop2(grid)),
        3 => prop3(grid),
        4 => Ok(prop4(grid)),
        5 => prop5(grid),
        6 => prop6(grid),
        _ => Err(Error::InvalidOptions("proposition id must be 1..6")),
    }
}

fn prop1(grid: &GridSpec) -> PropositionReport {
    let base = ModelParams::reference().with(ParamName::ShareR, 0.3);
    let n = grid.points;
    let sets: [(Scenario, &[Observable]); 2] = [
        (
            Scenario::UN,
            &[
                Observable::P,
                Observable::W,
                Observable::H,
                Observable::S,
                Observable::PiM,
                Observable::PiP,
            ],
        ),
        (
            Scenario::RN,
            &[Observable::P, Observable::H, Observable::S, Observable::PiM, Observable::PiP],
        ),
    ];
    let mut claims = Vec::new();
    for (sc, obs) in sets {
        let bound = match sc.contract {
            Contract::UsageBased => mu_bound_usage(),
            Contract::RevenueShare => mu_bound_revenue(),
        };
        let mut points = Vec::new();
        for &l in &interior(0.0, 1.0, n) {
            for &m in &interior(0.0, bound, n) {
                let p = base
                    .with(ParamName::Mu, m)
                    .with(ParamName::Theta, m / 4.0)
                    .with(ParamName::Lambda, l);
                points.push(point(p, &[(ParamName::Lambda, l), (ParamName::Mu, m)], true));
            }
        }
        let defs: Vec<ClaimDef> = obs
            .iter()
            .map(|o| {
                ClaimDef::new(
                    format!("{sc}: d{}/dlambda > 0", o.as_str()),
                    &[Quantity::new(sc, *o)],
                    true,
                )
            })
            .collect();
        claims.extend(run_point_claims(&defs, &points, &grid.solve, |p, ev| {
            let est = outcome_partials(sc, p, ParamName::Lambda, None, ev, obs)?;
            Ok(est.iter().map(|e| sign_check(e, true)).collect())
        }));
    }
    PropositionReport::new(
        1,
        format!("lambda x mu interior {n}x{n}, mu below the contract bound, theta = mu/4, alpha=1, q=2, k=0.5, r=0.3"),
        claims,
        Vec::new(),
    )
}

fn prop2(grid: &GridSpec) -> PropositionReport {
    use ColumnPattern::*;
    let base = ModelParams::reference();
    let n = grid.points;
    let rs = interior(0.0, 1.0, n);
    let lambdas: Vec<f64> = (0..n.max(2)).map(|i| i as f64 / (n.max(2) - 1) as f64).collect();
    let mut claims = Vec::new();
    let mut notes = Vec::new();
    for (label, obs, order) in [
        ("manufacturer", Observable::PiM, [Positive, PositiveThenNegative, Negative]),
        ("platform", Observable::PiP, [Negative, PositiveThenNegative, Positive]),
    ] {
        let quantities = [Quantity::new(Scenario::UN, obs), Quantity::new(Scenario::RN, obs)];
        let catalogued = quantities.iter().any(|q| q.is_catalogued());
        let build = |ev: &Evaluator, xs: &[f64]| {
            region_map(
                |r, l| profit_gap(&base, r, l, obs, ev),
                ParamName::ShareR,
                xs,
                ParamName::Lambda,
                &lambdas,
            )
        };
        let (claim, map) = structure_with_fallback(
            format!("{label}: sign of {0}^un - {0}^rn in lambda follows the three r regimes", obs.as_str()),
            catalogued,
            &grid.solve,
            &rs,
            &order,
            &order,
            build,
        );
        let method = claim.evaluator;
        claims.push(claim);
        // Restatement: the preferred contract flips at most once along λ.
        let mut once = ClaimResult {
            name: format!("{label}: at most one certified crossing in lambda per r"),
            governing: true,
            evaluator: method,
            checked: 0,
            passed: 0,
            violations: Vec::new(),
            unstable: Vec::new(),
            failed: Vec::new(),
            out_of_domain: 0,
            closed_form_violations: None,
        };
        match &map {
            Some(m) => {
                for col in &m.columns {
                    once.checked += 1;
                    if col.crossings.len() <= 1 {
                        once.passed += 1;
                    } else {
                        once.violations.push(GridPoint::of(&[(ParamName::ShareR, col.x)]));
                    }
                }
            }
            None => once.failed.push(GridPoint {
                coords: Vec::new(),
                note: Some("region map evaluation failed"),
            }),
        }
        claims.push(once);
        let (lo_name, hi_name) = if label == "manufacturer" {
            ("r_n1", "r_n2")
        } else {
            ("r_n3", "r_n4")
        };
        notes.extend(crossing_note(lo_name, &map, order[0], order[1]));
        notes.extend(crossing_note(hi_name, &map, order[1], order[2]));
    }
    PropositionReport::new(
        2,
        format!("r interior {n} x lambda in [0,1] {} points, reference calibration", lambdas.len()),
        claims,
        notes,
    )
}

fn prop3(grid: &GridSpec) -> Result<PropositionReport> {
    let base = ModelParams::reference();
    let obs = [Observable::P, Observable::W, Observable::H, Observable::S];
    let want = [true, false, true, false];
    let mut points = Vec::new();
    for i in 1..=9 {
        let l = i as f64 / 10.0;
        let hi = eps2(base.theta, l)?;
        for (e, ok) in epsilon_axis(grid, hi) {
            let p = base.with(ParamName::Lambda, l).with(ParamName::EpsilonPrime, e);
            points.push(point(p, &[(ParamName::Lambda, l), (ParamName::EpsilonPrime, e)], ok));
        }
    }
    let defs: Vec<ClaimDef> = obs
        .iter()
        .zip(want)
        .map(|(o, pos)| {
            ClaimDef::new(
                format!("uo: d{}/deps {} 0", o.as_str(), if pos { ">" } else { "<" }),
                &[Quantity::new(Scenario::UO, *o)],
                true,
            )
        })
        .collect();
    let claims = run_point_claims(&defs, &points, &grid.solve, |p, ev| {
        let est = outcome_partials(Scenario::UO, p, ParamName::EpsilonPrime, None, ev, &obs)?;
        Ok(est.iter().zip(want).map(|(e, w)| sign_check(e, w)).collect())
    });
    Ok(PropositionReport::new(
        3,
        format!("lambda in {{0.1..0.9}} x eps' interior {} points of (1, eps2(lambda)), theta=0.4", grid.points),
        claims,
        Vec::new(),
    ))
}

fn prop4(grid: &GridSpec) -> PropositionReport {
    use ColumnPattern::*;
    let base = ModelParams::reference();
    let e1 = eps1();
    let rs = interior(0.0, 1.0, grid.points);
    let eps_axis = epsilon_axis(grid, e1);
    let obs = [Observable::P, Observable::H];
    let mut points = Vec::new();
    for &r in &rs {
        for &(e, ok) in &eps_axis {
            let p = base.with(ParamName::ShareR, r).with(ParamName::EpsilonPrime, e);
            points.push(point(p, &[(ParamName::ShareR, r), (ParamName::EpsilonPrime, e)], ok));
        }
    }
    let defs: Vec<ClaimDef> = obs
        .iter()
        .map(|o| ClaimDef::new(format!("ro: d{}/deps > 0", o.as_str()), &[Quantity::new(Scenario::RO, *o)], true))
        .collect();
    let mut claims = run_point_claims(&defs, &points, &grid.solve, |p, ev| {
        let est = outcome_partials(Scenario::RO, p, ParamName::EpsilonPrime, None, ev, &obs)?;
        Ok(est.iter().map(|e| sign_check(e, true)).collect())
    });
    let ys: Vec<f64> = eps_axis.iter().filter(|(_, ok)| *ok).map(|(e, _)| *e).collect();
    let order = [Negative, PositiveThenNegative, Positive];
    let (claim, map) = structure_with_fallback(
        "ro: ds/deps decreasing, then rise-then-fall, then increasing as r grows".into(),
        Quantity::new(Scenario::RO, Observable::S).is_catalogued(),
        &grid.solve,
        &rs,
        &order,
        &[PositiveThenNegative, Positive],
        |_, xs| region_map(|r, e| ds_ro_deps(&base, r, e), ParamName::ShareR, xs, ParamName::EpsilonPrime, &ys),
    );
    claims.push(claim);
    let mut notes = Vec::new();
    notes.extend(crossing_note("r_o1", &map, Negative, PositiveThenNegative));
    notes.extend(crossing_note("r_o2", &map, PositiveThenNegative, Positive));
    PropositionReport::new(
        4,
        format!("r interior {0} x eps' interior {0} of (1, eps1), theta=0.4, lambda=0.5", grid.points),
        claims,
        notes,
    )
}

fn prop5(grid: &GridSpec) -> Result<PropositionReport> {
    let base = ModelParams::reference();
    let hi = eps2(base.theta, base.lambda)?;
    let points: Vec<Point> = epsilon_axis(grid, hi)
        .into_iter()
        .map(|(e, ok)| {
            let p = if e >= 1.0 { base.with(ParamName::EpsilonPrime, e) } else { base };
            point(p, &[(ParamName::EpsilonPrime, e)], ok)
        })
        .collect();
    let (uo, un) = (Scenario::UO, Scenario::UN);
    let q = |sc, o| Quantity::new(sc, o);
    let defs = [
        ClaimDef::new("h^uo > h^un".into(), &[q(uo, Observable::H), q(un, Observable::H)], true),
        ClaimDef::new("s^uo < s^un".into(), &[q(uo, Observable::S), q(un, Observable::S)], true),
        ClaimDef::new("pi_m^uo > pi_m^un (perceived)".into(), &[q(uo, Observable::PiM), q(un, Observable::PiM)], true),
        ClaimDef::new("pi_p^uo > pi_p^un".into(), &[q(uo, Observable::PiP), q(un, Observable::PiP)], true),
        ClaimDef::new(
            "pi_m^uo > pi_m^un (realized)".into(),
            &[q(uo, Observable::PiM), q(un, Observable::PiM)],
            false,
        ),
    ];
    let claims = run_point_claims(&defs, &points, &grid.solve, |p, ev| {
        let a = ev.outcome(uo, p)?;
        let b = ev.outcome(un, p)?;
        let v = |o: &EquilibriumOutcome, x| observe(o, x);
        Ok(alloc::vec![
            order_check(v(&a, Observable::H)?, v(&b, Observable::H)?),
            order_check(v(&b, Observable::S)?, v(&a, Observable::S)?),
            order_check(v(&a, Observable::PiM)?, v(&b, Observable::PiM)?),
            order_check(v(&a, Observable::PiP)?, v(&b, Observable::PiP)?),
            order_check(a.pi_m_realized, b.pi_m_realized),
        ])
    });
    Ok(PropositionReport::new(
        5,
        format!("eps' interior {} points of (1, eps2 = {hi:.6}), theta=0.4, lambda=0.5", grid.points),
        claims,
        Vec::new(),
    ))
}

fn prop6(grid: &GridSpec) -> Result<PropositionReport> {
    use ColumnPattern::*;
    let base = ModelParams::reference();
    let e1 = eps1();
    let rs = interior(0.0, 1.0, grid.points);
    let eps_axis = epsilon_axis(grid, e1);
    // The stated r intervals start where s^ro first rises above s^rn just
    // past ε′ = 1, i.e. where ∂s^ro/∂ε′ at the lower edge turns positive.
    let band_lo = first_crossing(|r| ds_ro_deps(&base, r, 1.0 + EDGE), 0.01, 0.99, 98)?
        .map(|c| c.at)
        .unwrap_or(0.0);
    let (mut inside, mut below) = (Vec::new(), Vec::new());
    for &r in &rs {
        for &(e, ok) in &eps_axis {
            let p = base
                .with(ParamName::ShareR, r)
                .with(ParamName::EpsilonPrime, e.max(1.0));
            let pt = point(p, &[(ParamName::ShareR, r), (ParamName::EpsilonPrime, e)], ok);
            if r > band_lo {
                inside.push(pt);
            } else {
                below.push(pt);
            }
        }
    }
    let (ro, rn) = (Scenario::RO, Scenario::RN);
    let q = |sc, o| Quantity::new(sc, o);
    let defs = |governing: bool, suffix: &str| {
        [
            ClaimDef::new(format!("h^ro > h^rn{suffix}"), &[q(ro, Observable::H), q(rn, Observable::H)], governing),
            ClaimDef::new(
                format!("pi_m^ro > pi_m^rn (perceived){suffix}"),
                &[q(ro, Observable::PiM), q(rn, Observable::PiM)],
                governing,
            ),
            ClaimDef::new(format!("pi_p^ro > pi_p^rn{suffix}"), &[q(ro, Observable::PiP), q(rn, Observable::PiP)], governing),
            ClaimDef::new(
                format!("pi_m^ro > pi_m^rn (realized){suffix}"),
                &[q(ro, Observable::PiM), q(rn, Observable::PiM)],
                false,
            ),
        ]
    };
    let eval = |p: &ModelParams, ev: &Evaluator| {
        let a = ev.outcome(ro, p)?;
        let b = ev.outcome(rn, p)?;
        let v = |o: &EquilibriumOutcome, x| observe(o, x);
        Ok(alloc::vec![
            order_check(v(&a, Observable::H)?, v(&b, Observable::H)?),
            order_check(v(&a, Observable::PiM)?, v(&b, Observable::PiM)?),
            order_check(v(&a, Observable::PiP)?, v(&b, Observable::PiP)?),
            order_check(a.pi_m_realized, b.pi_m_realized),
        ])
    };
    let mut claims = run_point_claims(&defs(true, ""), &inside, &grid.solve, eval);
    if !below.is_empty() {
        claims.extend(run_point_claims(
            &defs(false, " [r below the stated intervals]"),
            &below,
            &grid.solve,
            eval,
        ));
    }
    let ys: Vec<f64> = eps_axis.iter().filter(|(_, ok)| *ok).map(|(e, _)| *e).collect();
    let order = [Negative, PositiveThenNegative, Positive];
    let (claim, map) = structure_with_fallback(
        "sign of s^ro - s^rn in eps': positive-then-negative inside the band, positive above it".into(),
        true,
        &grid.solve,
        &rs,
        &order,
        &[PositiveThenNegative, Positive],
        |ev, xs| {
            region_map(
                |r, e| {
                    let p = base.with(ParamName::ShareR, r).with(ParamName::EpsilonPrime, e);
                    Ok(evaluate(q(ro, Observable::S), &p, ev)? - evaluate(q(rn, Observable::S), &p, ev)?)
                },
                ParamName::ShareR,
                xs,
                ParamName::EpsilonPrime,
                &ys,
            )
        },
    );
    claims.push(claim);
    let mut notes = Vec::new();
    notes.extend(crossing_note("band lower edge", &map, Negative, PositiveThenNegative));
    notes.extend(crossing_note("band upper edge", &map, PositiveThenNegative, Positive));
    if let Some(m) = &map {
        let below = m.columns.iter().take_while(|c| c.pattern == Negative).count();
        if below > 0 {
            notes.push(format!(
                "{below} r column(s) below the band have s^ro < s^rn throughout (outside the stated intervals)"
            ));
        }
    }
    notes.push(format!("orderings judged for r > {band_lo:.6}"));
    Ok(PropositionReport::new(
        6,
        format!("r interior {0} x eps' interior {0} of (1, eps1), r_n = r_o, theta=0.4, lambda=0.5", grid.points),
        claims,
        notes,
    ))
}
