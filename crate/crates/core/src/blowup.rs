//! Blow-up point estimation and singularity fitting.
//!
//! The transformed systems approach `x* = lim x(parameter)` with vanishing
//! slope, so the blow-up abscissa is recovered by extrapolating the x-tail
//! of a trajectory. The extrapolation engine is Aitken Δ², which is exact on
//! geometrically convergent sequences — precisely the tails the non-local
//! transformation produces — and needs no convergence model.
//!
//! Aitken is applied to the last `m` samples directly when those samples
//! resolve the tail's curvature. Algebraically convergent tails (the
//! differential transformation's `x ≈ x* − c·t^{-α}`) converge so slowly
//! that adjacent late samples are indistinguishable from an arithmetic
//! progression at f64 resolution; for those the estimator instead draws `m`
//! samples on a geometric parameter ladder (values interpolated from the
//! dense trajectory by cubic Lagrange), which turns `c·t^{-α}` into an
//! exactly geometric sequence that Δ² again extrapolates cleanly.
//!
//! The reported uncertainty, `|estimate − last x| + |last increment|`, is a
//! heuristic diagnostic of how far the tail still had to go, not a
//! statistical bound.

use crate::error::{Error, Result};
use crate::ode::Trajectory;

/// How the returned `x_star` was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    /// Aitken Δ² extrapolation (consecutive tail or geometric ladder).
    Aitken,
    /// The sequence had already converged (or could not be accelerated);
    /// the last sample was returned.
    LastValue,
}

/// Estimated blow-up point with diagnostics. `amplitude`/`exponent` stay
/// `None` until [`fit_power_law`] fills them (see [`analyze`]).
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupEstimate {
    pub x_star: f64,
    /// `|estimate − last x| + |last increment|`; heuristic, not a bound.
    pub uncertainty: f64,
    /// `A` in `y ≈ A |x* − x|^{-β}`.
    pub amplitude: Option<f64>,
    /// `β > 0` in `y ≈ A |x* − x|^{-β}`.
    pub exponent: Option<f64>,
    pub method: EstimateMethod,
    pub samples_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    /// Tail length `m`: consecutive samples (and ladder rungs) to use.
    pub tail: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions { tail: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Fraction of trailing samples considered by the fit window.
    pub window_fraction: f64,
    /// Minimum number of usable in-window samples.
    pub min_samples: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            window_fraction: 0.25,
            min_samples: 10,
        }
    }
}

/// Estimate `x*` from the x-component tail of `traj` with default options.
pub fn estimate_x_star(traj: &Trajectory) -> Result<BlowupEstimate> {
    estimate_x_star_with(traj, &EstimateOptions::default())
}

pub fn estimate_x_star_with(traj: &Trajectory, opts: &EstimateOptions) -> Result<BlowupEstimate> {
    if opts.tail < 5 {
        return Err(Error::InvalidConfig(format!(
            "tail length {} must be at least 5",
            opts.tail
        )));
    }
    let xs = traj.component(0);
    if xs.len() < 5 {
        return Err(Error::TooFewSamples {
            have: xs.len(),
            need: 5,
        });
    }
    for (i, w) in xs.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(Error::NonMonotoneX { index: i + 1 });
        }
    }

    let m = opts.tail.min(xs.len());
    let tail = &xs[xs.len() - m..];
    let last = xs[xs.len() - 1];
    let last_inc = (xs[xs.len() - 1] - xs[xs.len() - 2]).abs();
    let scale = tail.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);

    let finish = |value: f64, method: EstimateMethod| BlowupEstimate {
        x_star: value,
        uncertainty: (value - last).abs() + last_inc,
        amplitude: None,
        exponent: None,
        method,
        samples_used: m,
    };

    // Plateau: the tail is constant at f64 resolution.
    if tail
        .windows(2)
        .all(|w| (w[1] - w[0]).abs() <= 4.0 * f64::EPSILON * scale)
    {
        return Ok(finish(last, EstimateMethod::LastValue));
    }

    // Consecutive tail, one Δ² pass. On a geometric tail every accelerated
    // value equals the limit; a flat pass certifies the extrapolation.
    if let Some(first_pass) = aitken_pass(tail) {
        if first_pass.len() >= 2 {
            let lo = first_pass.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = first_pass.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= 1e-9 * scale {
                let v = *first_pass.last().unwrap();
                if v >= last {
                    return Ok(finish(v, EstimateMethod::Aitken));
                }
            }
        }
    }

    // Slow tail: geometric parameter ladder.
    if let Some(vals) = ladder_samples(traj, &xs, m) {
        if let Some(v) = iterated_aitken(&vals) {
            if v > last && v.is_finite() {
                return Ok(finish(v, EstimateMethod::Aitken));
            }
        }
    }

    // Fall back to iterating on the consecutive tail.
    if let Some(v) = iterated_aitken(tail) {
        if v > last && v.is_finite() {
            return Ok(finish(v, EstimateMethod::Aitken));
        }
    }

    Ok(finish(last, EstimateMethod::LastValue))
}

/// One Δ² pass; `None` when a denominator degenerates (sequence already
/// converged at f64 resolution) or a value overflows.
fn aitken_pass(seq: &[f64]) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(seq.len().saturating_sub(2));
    for w in seq.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let d2 = c - b;
        let den = d2 - (b - a);
        let scale = a.abs().max(b.abs()).max(c.abs()).max(1e-300);
        if den.abs() <= 4.0 * f64::EPSILON * scale {
            return None;
        }
        let v = c - d2 * d2 / den;
        if !v.is_finite() {
            return None;
        }
        out.push(v);
    }
    Some(out)
}

/// Iterated Δ²: repeat passes while each pass's endpoint moves by less than
/// the previous one did (further passes on noisy data drift, so stop at the
/// first increase).
fn iterated_aitken(seq: &[f64]) -> Option<f64> {
    let mut current = seq.to_vec();
    let mut chosen: Option<f64> = None;
    let mut prev_change = f64::INFINITY;
    let mut prev_end = *seq.last()?;
    while current.len() >= 3 {
        let next = aitken_pass(&current)?;
        if next.is_empty() {
            break;
        }
        let cand = *next.last().unwrap();
        let change = (cand - prev_end).abs();
        if chosen.is_none() || change <= prev_change {
            chosen = Some(cand);
            prev_change = change;
            prev_end = cand;
            current = next;
        } else {
            break;
        }
    }
    chosen
}

/// `m` x-values at parameters `p_end / ratio^j`, cubic-interpolated from the
/// dense equidistant trajectory, in increasing parameter order. Requires an
/// all-positive geometric span; returns `None` when the trajectory is too
/// short to build one.
fn ladder_samples(traj: &Trajectory, xs: &[f64], m: usize) -> Option<Vec<f64>> {
    let n = traj.len() - 1;
    if n < 2 * m || n < 4 {
        return None;
    }
    let p0 = traj.param(0);
    let p_end = traj.param(n);
    let h = traj.param(1) - p0;
    let p_lo = p0 + 2.0 * h;
    if p_lo <= 0.0 || p_end <= p_lo * (1.0 + 1e-12) {
        return None;
    }
    let ratio = (p_end / p_lo).powf(1.0 / (m as f64 - 1.0));
    if !(ratio > 1.0 + 1e-12) {
        return None;
    }
    let mut vals = Vec::with_capacity(m);
    for j in (0..m).rev() {
        let target = p_end / ratio.powi(j as i32);
        vals.push(cubic_interpolate(p0, h, xs, target));
    }
    Some(vals)
}

/// 4-point Lagrange interpolation of the equidistantly sampled series
/// `xs[k] = x(p0 + k h)` at `target`.
fn cubic_interpolate(p0: f64, h: f64, xs: &[f64], target: f64) -> f64 {
    let n = xs.len() - 1;
    let fi = (target - p0) / h;
    let base = (fi.floor() as isize).clamp(1, n as isize - 2) as usize;
    let i0 = base - 1;
    let mut value = 0.0;
    for j in 0..4 {
        let pj = p0 + ((i0 + j) as f64) * h;
        let mut lj = 1.0;
        for k in 0..4 {
            if k != j {
                let pk = p0 + ((i0 + k) as f64) * h;
                lj *= (target - pk) / (pj - pk);
            }
        }
        value += xs[i0 + j] * lj;
    }
    value
}

/// Least-squares fit of `ln y` against `−ln(x* − x)` over the trailing
/// window: the slope is `β`, the intercept is `ln A` in
/// `y ≈ A |x* − x|^{-β}`.
pub fn fit_power_law(traj: &Trajectory, x_star: f64) -> Result<(f64, f64)> {
    fit_power_law_with(traj, x_star, &FitOptions::default())
}

pub fn fit_power_law_with(traj: &Trajectory, x_star: f64, opts: &FitOptions) -> Result<(f64, f64)> {
    let xs = traj.component(0);
    let ys = traj.component(1);
    let x_last = *xs.last().unwrap();
    if !(x_star > x_last) {
        return Err(Error::XStarNotBeyondData { x_star, x_last });
    }
    let n = xs.len();
    let window = ((n as f64) * opts.window_fraction).floor().max(1.0) as usize;
    let lo = n - window.min(n);

    // exclude samples whose gap to x* is at rounding noise
    let gap_floor = 10.0 * f64::EPSILON * x_star.abs();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    for i in lo..n {
        let gap = x_star - xs[i];
        if gap >= gap_floor && ys[i] > 0.0 {
            us.push(-gap.ln());
            vs.push(ys[i].ln());
        }
    }
    if us.len() < opts.min_samples {
        return Err(Error::FitWindowTooSmall {
            have: us.len(),
            need: opts.min_samples,
        });
    }

    let nf = us.len() as f64;
    let u_mean = us.iter().sum::<f64>() / nf;
    let v_mean = vs.iter().sum::<f64>() / nf;
    let mut suu = 0.0;
    let mut suv = 0.0;
    for (u, v) in us.iter().zip(&vs) {
        suu += (u - u_mean) * (u - u_mean);
        suv += (u - u_mean) * (v - v_mean);
    }
    if suu == 0.0 {
        return Err(Error::FitWindowTooSmall {
            have: 1,
            need: opts.min_samples,
        });
    }
    let beta = suv / suu;
    let amplitude = (v_mean - beta * u_mean).exp();
    if !(beta > 0.0) {
        return Err(Error::NonPositiveExponent { beta });
    }
    Ok((amplitude, beta))
}

/// Estimate `x*` and fit the power law in one go.
pub fn analyze(traj: &Trajectory) -> Result<BlowupEstimate> {
    let mut est = estimate_x_star(traj)?;
    let (a, beta) = fit_power_law(traj, est.x_star)?;
    est.amplitude = Some(a);
    est.exponent = Some(beta);
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{StopReason, Trajectory};

    fn traj_xy(params: Vec<f64>, xs: Vec<f64>, ys: Vec<f64>) -> Trajectory {
        let states: Vec<f64> = xs.iter().zip(&ys).flat_map(|(x, y)| [*x, *y]).collect();
        Trajectory::from_samples(
            vec!["x".into(), "y".into()],
            params,
            states,
            StopReason::StepBudget,
        )
        .unwrap()
    }

    fn tail_traj(xs: Vec<f64>) -> Trajectory {
        let n = xs.len();
        let ys = vec![1.0; n];
        let params = (0..n).map(|k| 0.2 * k as f64).collect();
        traj_xy(params, xs, ys)
    }

    #[test]
    fn exact_geometric_tail_is_recovered_to_machine_precision() {
        // Example 2 closed form: x_k = 1 - e^{-0.2 k}
        let xs: Vec<f64> = (0..71).map(|k| 1.0 - (-0.2 * k as f64).exp()).collect();
        let est = estimate_x_star(&tail_traj(xs)).unwrap();
        assert!(
            (est.x_star - 1.0).abs() <= 1e-9,
            "err {}",
            (est.x_star - 1.0).abs()
        );
        assert_eq!(est.method, EstimateMethod::Aitken);
        assert!(est.uncertainty <= 2e-6);
        assert_eq!(est.samples_used, 8);
    }

    #[test]
    fn algebraic_tail_is_recovered_via_ladder() {
        // Example 1 parametric closed form to t = 1e4: x = 1 - 1/sqrt(t).
        // Aitken on adjacent samples sees almost no curvature here; the
        // geometric ladder restores exactness.
        let params: Vec<f64> = (0..49_996).map(|k| 1.0 + 0.2 * k as f64).collect();
        let xs: Vec<f64> = params.iter().map(|t| 1.0 - 1.0 / t.sqrt()).collect();
        let n = xs.len();
        let traj = traj_xy(params, xs, vec![1.0; n]);
        let est = estimate_x_star(&traj).unwrap();
        assert!((est.x_star - 1.0).abs() <= 5e-3, "coarse bound");
        assert!(
            (est.x_star - 1.0).abs() <= 1e-6,
            "ladder accuracy: {}",
            est.x_star
        );
        assert_eq!(est.method, EstimateMethod::Aitken);
    }

    #[test]
    fn constant_tail_returns_last_value_with_zero_uncertainty() {
        let est = estimate_x_star(&tail_traj(vec![0.7; 6])).unwrap();
        assert_eq!(est.x_star, 0.7);
        assert_eq!(est.uncertainty, 0.0);
        assert_eq!(est.method, EstimateMethod::LastValue);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let xs = vec![0.0, 0.1, 0.2, 0.3];
        assert!(matches!(
            estimate_x_star(&tail_traj(xs)),
            Err(Error::TooFewSamples { have: 4, need: 5 })
        ));
    }

    #[test]
    fn decreasing_tail_is_an_error() {
        let xs = vec![0.0, 0.2, 0.15, 0.3, 0.4, 0.5];
        assert!(matches!(
            estimate_x_star(&tail_traj(xs)),
            Err(Error::NonMonotoneX { index: 2 })
        ));
    }

    #[test]
    fn shifted_geometric_tail() {
        let xs: Vec<f64> = (0..40).map(|k| 5.25 - 0.7 * 0.6f64.powi(k)).collect();
        let est = estimate_x_star(&tail_traj(xs)).unwrap();
        assert!((est.x_star - 5.25).abs() <= 1e-10);
    }

    #[test]
    fn fit_recovers_first_order_pole() {
        // y = 1/(1-x) sampled along the Example 2 closed form
        let params: Vec<f64> = (0..71).map(|k| 0.2 * k as f64).collect();
        let xs: Vec<f64> = params.iter().map(|xi| 1.0 - (-xi).exp()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 - x)).collect();
        let (a, beta) = fit_power_law(&traj_xy(params, xs, ys), 1.0).unwrap();
        assert!((beta - 1.0).abs() <= 0.02, "beta = {beta}");
        assert!((a - 1.0).abs() <= 0.02, "A = {a}");
        // exact data: far tighter than the contract requires
        assert!((beta - 1.0).abs() <= 1e-9);
        assert!((a - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn fit_recovers_second_order_pole() {
        let params: Vec<f64> = (0..71).map(|k| 0.2 * k as f64).collect();
        let xs: Vec<f64> = params.iter().map(|xi| 1.0 - (-xi).exp()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (1.0 - x).powi(-2)).collect();
        let (_, beta) = fit_power_law(&traj_xy(params, xs, ys), 1.0).unwrap();
        assert!((beta - 2.0).abs() <= 0.02, "beta = {beta}");
    }

    #[test]
    fn fit_recovers_assorted_exponents_within_one_percent() {
        for beta_true in [0.5, 1.0, 2.0, 3.0] {
            let params: Vec<f64> = (0..71).map(|k| 0.2 * k as f64).collect();
            let xs: Vec<f64> = params.iter().map(|xi| 1.0 - (-xi).exp()).collect();
            let ys: Vec<f64> = xs.iter().map(|x| (1.0 - x).powf(-beta_true)).collect();
            let (_, beta) = fit_power_law(&traj_xy(params, xs, ys), 1.0).unwrap();
            assert!(
                (beta - beta_true).abs() <= 0.01 * beta_true,
                "beta {beta} vs {beta_true}"
            );
        }
    }

    #[test]
    fn fit_requires_x_star_beyond_data() {
        let params: Vec<f64> = (0..30).map(|k| 0.2 * k as f64).collect();
        let xs: Vec<f64> = params.iter().map(|xi| 1.0 - (-xi).exp()).collect();
        let ys = vec![2.0; 30];
        let err = fit_power_law(&traj_xy(params, xs, ys), 0.5).unwrap_err();
        assert!(matches!(err, Error::XStarNotBeyondData { .. }));
    }

    #[test]
    fn fit_requires_enough_window_samples() {
        let params: Vec<f64> = (0..12).map(|k| 0.2 * k as f64).collect();
        let xs: Vec<f64> = params.iter().map(|xi| 1.0 - (-xi).exp()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 - x)).collect();
        // window fraction 0.25 of 12 samples leaves 3 usable points
        let err = fit_power_law(&traj_xy(params, xs, ys), 1.0).unwrap_err();
        assert!(matches!(err, Error::FitWindowTooSmall { .. }));
    }

    #[test]
    fn fit_skips_samples_at_rounding_distance() {
        // last sample sits essentially at x*; it must be filtered out, and
        // the fit still succeeds on the remaining window
        let mut params: Vec<f64> = (0..60).map(|k| 0.2 * k as f64).collect();
        let mut xs: Vec<f64> = params.iter().map(|xi| 1.0 - (-xi).exp()).collect();
        params.push(12.2);
        xs.push(1.0 - 1e-15); // below the 10*eps*x_star filter floor
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 - x).max(1e-18)).collect();
        let (_, beta) = fit_power_law(&traj_xy(params, xs, ys), 1.0).unwrap();
        assert!((beta - 1.0).abs() < 0.02);
    }

    #[test]
    fn analyze_fills_amplitude_and_exponent() {
        let params: Vec<f64> = (0..71).map(|k| 0.2 * k as f64).collect();
        let xs: Vec<f64> = params.iter().map(|xi| 1.0 - (-xi).exp()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 - x)).collect();
        let x_last = *xs.last().unwrap();
        let est = analyze(&traj_xy(params, xs, ys)).unwrap();
        assert!(est.amplitude.is_some());
        assert!(est.exponent.is_some());
        assert!(est.x_star > x_last);
    }
}
