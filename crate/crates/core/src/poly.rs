//! Real-root isolation for small dense polynomials.
//!
//! Roots of `P` are isolated between consecutive real roots of `P'`
//! (found recursively), where `P` is monotone, so each such interval holds
//! at most one root and a sign change brackets it exactly. Brackets are
//! refined by bisection and polished with safeguarded Newton steps.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("polynomial needs at least one coefficient")]
    Empty,
    #[error("leading coefficient must be nonzero")]
    ZeroLeading,
    #[error("constant polynomial has no roots")]
    Constant,
    #[error("root index is 1-based")]
    ZeroIndex,
    #[error("coefficients must be finite")]
    NotFinite,
    #[error("requested root {requested} but only {found} real root(s) exist")]
    TooFewRoots { requested: usize, found: usize },
}

/// A polynomial with coefficients in ascending degree order, and which of
/// its ascending-sorted real roots is wanted.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySpec {
    pub coefficients: Vec<f64>,
    pub root_index: usize,
    pub bracket: Option<(f64, f64)>,
}

impl PolySpec {
    pub fn new(coefficients: Vec<f64>, root_index: usize) -> Result<Self, PolyError> {
        let spec = PolySpec {
            coefficients,
            root_index,
            bracket: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_bracket(mut self, lo: f64, hi: f64) -> Self {
        self.bracket = Some((lo, hi));
        self
    }

    pub fn validate(&self) -> Result<(), PolyError> {
        let c = &self.coefficients;
        if c.is_empty() {
            return Err(PolyError::Empty);
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(PolyError::NotFinite);
        }
        if *c.last().unwrap() == 0.0 {
            return Err(PolyError::ZeroLeading);
        }
        if c.len() == 1 {
            return Err(PolyError::Constant);
        }
        if self.root_index == 0 {
            return Err(PolyError::ZeroIndex);
        }
        Ok(())
    }
}

pub fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

pub fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

/// `1 + max |a_i / a_n|`: every real root lies strictly inside `(-R, R)`.
pub fn cauchy_bound(c: &[f64]) -> f64 {
    let lead = c[c.len() - 1];
    1.0 + c[..c.len() - 1]
        .iter()
        .map(|a| libm::fabs(a / lead))
        .fold(0.0, f64::max)
}

/// All distinct real roots, ascending. `c` must have a nonzero leading
/// coefficient and degree ≥ 1.
pub fn real_roots(c: &[f64]) -> Vec<f64> {
    let bound = cauchy_bound(c);
    roots_in(c, -bound, bound)
}

fn roots_in(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let n = c.len() - 1;
    if n == 1 {
        let x = -c[0] / c[1];
        return if x > lo && x < hi {
            alloc::vec![x]
        } else {
            Vec::new()
        };
    }
    // Breakpoints: critical points of c inside (lo, hi).
    let mut knots = Vec::with_capacity(n + 1);
    knots.push(lo);
    knots.extend(roots_in(&derivative(c), lo, hi));
    knots.push(hi);

    let scale = c.iter().map(|a| libm::fabs(*a)).fold(0.0, f64::max);
    let touch = 1e-13 * scale;
    let mut out: Vec<f64> = Vec::new();
    for win in knots.windows(2) {
        let (a, b) = (win[0], win[1]);
        let (fa, fb) = (eval(c, a), eval(c, b));
        if fa == 0.0 {
            push_distinct(&mut out, a);
        }
        if fa * fb < 0.0 {
            push_distinct(&mut out, refine(c, a, b, fa));
        }
    }
    // Critical points where the polynomial only touches zero.
    for &k in &knots[1..knots.len() - 1] {
        if libm::fabs(eval(c, k)) <= touch {
            push_distinct(&mut out, k);
        }
    }
    let fh = eval(c, hi);
    if fh == 0.0 {
        push_distinct(&mut out, hi);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.retain(|x| *x > lo && *x < hi);
    out
}

fn push_distinct(out: &mut Vec<f64>, x: f64) {
    if !out
        .iter()
        .any(|y| libm::fabs(y - x) <= 1e-12 * f64::max(1.0, libm::fabs(x)))
    {
        out.push(x);
    }
}

fn refine(c: &[f64], mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = eval(c, m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let mut x = 0.5 * (a + b);
    let dc = derivative(c);
    for _ in 0..4 {
        let d = eval(&dc, x);
        if d == 0.0 {
            break;
        }
        let next = x - eval(c, x) / d;
        if next < a || next > b || libm::fabs(eval(c, next)) >= libm::fabs(eval(c, x)) {
            break;
        }
        x = next;
    }
    x
}

/// The `root_index`-th ascending real root (restricted to `bracket` if set).
pub fn poly_root(spec: &PolySpec) -> Result<f64, PolyError> {
    spec.validate()?;
    let mut roots = real_roots(&spec.coefficients);
    if let Some((lo, hi)) = spec.bracket {
        roots.retain(|x| *x >= lo && *x <= hi);
    }
    roots
        .get(spec.root_index - 1)
        .copied()
        .ok_or(PolyError::TooFewRoots {
            requested: spec.root_index,
            found: roots.len(),
        })
}
