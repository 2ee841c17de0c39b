//! Heuristic admissibility check for a regularizing function `g`.
//!
//! The non-local transformation needs `g > 0` on the domain, `g → ∞` as
//! `y → ∞`, and `f/g → k` with `k > 0` constant (the limiting case `k = ∞`
//! is allowed); a ratio that vanishes is a violation. These are asymptotic
//! statements, so the check probes a finite grid and classifies trends
//! rather than proving anything: positivity on the grid, growth of `g`
//! across a geometric `y`-ladder, and the log–log slope of `f/g` on the
//! upper half of the ladder. A trend the probe cannot resolve is reported
//! as inconclusive instead of guessed.

use crate::error::{Error, Result};
use crate::expr::Binding;
use crate::transform::{CauchyProblem, GChoice, Order};

/// Probe layout: `x` spans `[x0, x0 + x_span]`, `y` runs a geometric ladder
/// from `max(y0, 1)` up to `y_max`. For second-order problems the derivative
/// component is tied to `t = y^2`, the profile of a first-order pole (the
/// worked second-order examples satisfy `t = y^2` exactly).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGrid {
    pub x_span: f64,
    pub x_count: usize,
    pub y_max: f64,
    pub y_count: usize,
    /// `g` must grow by at least this factor across the ladder.
    pub growth_factor: f64,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        ProbeGrid {
            x_span: 1.0,
            x_count: 5,
            y_max: 1e4,
            y_count: 17,
            growth_factor: 10.0,
        }
    }
}

/// Classified behaviour of `f/g` along the ladder.
#[derive(Debug, Clone, PartialEq)]
pub enum RatioTrend {
    /// `f/g` levels off at a positive constant `k`.
    Bounded { k: f64 },
    /// `f/g → ∞` (`k = ∞`, allowed).
    Diverging,
    /// `f/g → 0`: violates the conditions on `g`.
    Vanishing,
    /// The probe could not classify the trend.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Admissible,
    Violation,
    Inconclusive,
}

/// An evaluation failure at one probe point; recorded, never fatal.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeFailure {
    pub x: f64,
    pub y: f64,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// `g > 0` at every probe point that evaluated.
    pub positivity_ok: bool,
    /// `g` grew by at least the configured factor across the ladder.
    pub growth_ok: bool,
    /// Observed `g(top) / g(bottom)`.
    pub observed_growth: f64,
    pub ratio: RatioTrend,
    pub probe_errors: Vec<ProbeFailure>,
}

impl AdmissibilityReport {
    pub fn verdict(&self) -> Verdict {
        if !self.positivity_ok || !self.growth_ok || self.ratio == RatioTrend::Vanishing {
            return Verdict::Violation;
        }
        match self.ratio {
            RatioTrend::Bounded { .. } | RatioTrend::Diverging => Verdict::Admissible,
            RatioTrend::Inconclusive => Verdict::Inconclusive,
            RatioTrend::Vanishing => Verdict::Violation,
        }
    }
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(values[values.len() / 2])
}

/// Probe `g` for the conditions above. Evaluation errors at probe points are
/// collected in the report; only a grid too degenerate to probe at all is a
/// hard error.
pub fn check_g_admissibility(
    p: &CauchyProblem,
    g: &GChoice,
    grid: &ProbeGrid,
) -> Result<AdmissibilityReport> {
    if grid.y_count < 4 || grid.x_count == 0 || !(grid.y_max > p.y0().max(1.0)) {
        return Err(Error::InvalidConfig("degenerate probe grid".into()));
    }
    let g_expr = g.expression(p.order(), p.f())?;
    let f_expr = p.f().clone();

    let y_lo = p.y0().max(1.0);
    let ladder_ratio = (grid.y_max / y_lo).powf(1.0 / (grid.y_count as f64 - 1.0));
    let xs: Vec<f64> = (0..grid.x_count)
        .map(|i| p.x0() + grid.x_span * (i as f64) / ((grid.x_count.max(2) - 1) as f64))
        .collect();

    let mut probe_errors = Vec::new();
    let mut positivity_ok = true;
    // per ladder level: median over x of g and of f/g
    let mut g_levels: Vec<(f64, f64)> = Vec::new(); // (y, median g)
    let mut r_levels: Vec<(f64, f64)> = Vec::new(); // (y, median f/g)

    for level in 0..grid.y_count {
        let y = y_lo * ladder_ratio.powi(level as i32);
        let mut g_vals = Vec::new();
        let mut r_vals = Vec::new();
        for &x in &xs {
            let b = match p.order() {
                Order::One => Binding::xy(x, y),
                Order::Two => Binding::xyt(x, y, y * y),
            };
            let gv = match g_expr.eval(&b) {
                Ok(v) => v,
                Err(e) => {
                    probe_errors.push(ProbeFailure {
                        x,
                        y,
                        error: e.into(),
                    });
                    continue;
                }
            };
            if gv <= 0.0 {
                positivity_ok = false;
            }
            g_vals.push(gv);
            match f_expr.eval(&b) {
                Ok(fv) => {
                    if gv != 0.0 {
                        r_vals.push(fv / gv);
                    }
                }
                Err(e) => probe_errors.push(ProbeFailure {
                    x,
                    y,
                    error: e.into(),
                }),
            }
        }
        if let Some(m) = median(&mut g_vals) {
            g_levels.push((y, m));
        }
        if let Some(m) = median(&mut r_vals) {
            r_levels.push((y, m));
        }
    }

    let (growth_ok, observed_growth) = match (g_levels.first(), g_levels.last()) {
        (Some((_, g_bot)), Some((_, g_top))) if *g_bot > 0.0 && g_levels.len() >= 2 => {
            let factor = g_top / g_bot;
            (factor >= grid.growth_factor, factor)
        }
        _ => (false, f64::NAN),
    };

    let ratio = classify_ratio(&r_levels);

    Ok(AdmissibilityReport {
        positivity_ok,
        growth_ok,
        observed_growth,
        ratio,
        probe_errors,
    })
}

/// Log–log slope of `f/g` against `y` over the upper half of the ladder:
/// clearly positive means diverging, clearly negative means vanishing,
/// flat means bounded with `k` read off the top level.
fn classify_ratio(levels: &[(f64, f64)]) -> RatioTrend {
    if levels.len() < 4 {
        return RatioTrend::Inconclusive;
    }
    let upper = &levels[levels.len() / 2..];
    let (y_a, r_a) = upper[0];
    let (y_b, r_b) = *upper.last().unwrap();
    if !(r_a > 0.0) || !(r_b > 0.0) || y_b <= y_a {
        return RatioTrend::Inconclusive;
    }
    let slope = (r_b.ln() - r_a.ln()) / (y_b.ln() - y_a.ln());
    if !slope.is_finite() {
        return RatioTrend::Inconclusive;
    }
    if slope > 0.2 {
        RatioTrend::Diverging
    } else if slope < -0.2 {
        RatioTrend::Vanishing
    } else {
        RatioTrend::Bounded { k: r_b }
    }
}
