//! Fixed-step classical fourth-order Runge–Kutta integration.
//!
//! This is deliberately the plainest possible integrator: the transformed
//! systems this crate produces are free of singular points and approach
//! their limits with vanishing slope, so the reference experiments use
//! classical RK4 with a fixed step and nothing fancier. No adaptive error
//! control, no dense output.
//!
//! The parameter of sample `k` is computed as `start + k·h` (not by repeated
//! addition), so trajectories of equal configuration are bitwise identical
//! and never skip or duplicate a step.

use crate::error::{Error, Result};

/// Right-hand side contract: fills `out` with the derivative of `state` at
/// parameter `p`. May fail (domain error, singular transform denominator).
pub type RhsFn = dyn Fn(f64, &[f64], &mut [f64]) -> Result<()> + Send + Sync;

/// A first-order coupled ODE system `u' = F(p, u)` with initial data.
pub struct OdeSystem {
    names: Vec<String>,
    start: f64,
    initial: Vec<f64>,
    rhs: Box<RhsFn>,
}

impl std::fmt::Debug for OdeSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OdeSystem")
            .field("names", &self.names)
            .field("start", &self.start)
            .field("initial", &self.initial)
            .finish_non_exhaustive()
    }
}

impl OdeSystem {
    /// `names` labels the state components (e.g. `["x", "y"]`); they must be
    /// unique and as many as there are initial values.
    pub fn new(names: Vec<String>, start: f64, initial: Vec<f64>, rhs: Box<RhsFn>) -> Result<Self> {
        if names.len() != initial.len() {
            return Err(Error::InvalidConfig(format!(
                "{} component names for {} initial values",
                names.len(),
                initial.len()
            )));
        }
        if names.is_empty() {
            return Err(Error::InvalidConfig("empty system".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate component name {n:?}"
                )));
            }
        }
        if !start.is_finite() || initial.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite initial data".into()));
        }
        Ok(OdeSystem {
            names,
            start,
            initial,
            rhs,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn eval_rhs(&self, p: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(state.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        (self.rhs)(p, state, out)
    }
}

/// When to stop integrating. At least one of the step budget and the
/// parameter bound is always finite (the step budget has a default cap).
#[derive(Debug, Clone, PartialEq)]
pub struct StopRule {
    max_steps: usize,
    max_param: Option<f64>,
    derivative_decay: f64,
}

impl Default for StopRule {
    /// 10^7 steps, no parameter bound, ε_stop = 1e-8 on the x-component
    /// derivative. The decay threshold realizes "integrate until x stops
    /// moving"; its value is a convention, not derived from the method.
    fn default() -> Self {
        StopRule {
            max_steps: 10_000_000,
            max_param: None,
            derivative_decay: 1e-8,
        }
    }
}

impl StopRule {
    pub fn with_max_steps(mut self, n: usize) -> Self {
        self.max_steps = n;
        self
    }

    pub fn with_max_param(mut self, p: f64) -> Self {
        self.max_param = Some(p);
        self
    }

    /// Threshold on |x'| below which the run is considered converged.
    /// Zero disables the check.
    pub fn with_derivative_decay(mut self, eps: f64) -> Self {
        self.derivative_decay = eps;
        self
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn max_param(&self) -> Option<f64> {
        self.max_param
    }

    pub fn derivative_decay(&self) -> f64 {
        self.derivative_decay
    }

    fn validate(&self) -> Result<()> {
        if let Some(p) = self.max_param {
            if !p.is_finite() {
                return Err(Error::InvalidConfig("non-finite parameter bound".into()));
            }
        }
        if !(self.derivative_decay >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "derivative decay threshold {} must be >= 0",
                self.derivative_decay
            )));
        }
        Ok(())
    }

    /// Number of steps allowed by the parameter bound when stepping from
    /// `start` with step `h`. The bound is inclusive up to a relative slack
    /// of 1e-9·h, so `xi_max = 14` with `h = 0.2` yields exactly 70 steps
    /// even though 70·0.2 rounds a hair above 14.
    fn allowed_steps(&self, start: f64, h: f64) -> usize {
        let by_param = match self.max_param {
            None => usize::MAX,
            Some(bound) => {
                if bound <= start {
                    0
                } else {
                    let n = (bound - start) / h + 1e-9;
                    if n >= usize::MAX as f64 {
                        usize::MAX
                    } else {
                        n.floor() as usize
                    }
                }
            }
        };
        self.max_steps.min(by_param)
    }
}

/// Why an integration ended.
#[derive(Debug, Clone, PartialEq)]
pub enum StopReason {
    /// The step budget was exhausted.
    StepBudget,
    /// The next step would exceed the parameter bound.
    ParameterBound,
    /// |x'| fell below the decay threshold: the run has converged.
    DerivativeDecay,
    /// The right-hand side failed (or produced a non-finite state); the
    /// trajectory holds everything accepted before the failure.
    RhsError(Error),
}

/// Ordered samples `(parameter, state)` of one integration, stored densely
/// (the `x*` extrapolation and the power-law fit both need the tail at full
/// resolution). States are kept in one flat buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    names: Vec<String>,
    params: Vec<f64>,
    states: Vec<f64>,
    reason: StopReason,
}

impl Trajectory {
    /// Assemble a trajectory from raw samples. Parameters must strictly
    /// increase and states must be finite; mainly useful for feeding
    /// synthetic tails to the blow-up estimator.
    pub fn from_samples(
        names: Vec<String>,
        params: Vec<f64>,
        states: Vec<f64>,
        reason: StopReason,
    ) -> Result<Self> {
        let dim = names.len();
        if dim == 0 || params.is_empty() || states.len() != params.len() * dim {
            return Err(Error::InvalidConfig("inconsistent sample buffers".into()));
        }
        if params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "parameters must strictly increase".into(),
            ));
        }
        if states.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite state sample".into()));
        }
        Ok(Trajectory {
            dim,
            names,
            params,
            states,
            reason,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Number of samples (steps taken + 1).
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.params.len() - 1
    }

    pub fn reason(&self) -> &StopReason {
        &self.reason
    }

    pub fn param(&self, i: usize) -> f64 {
        self.params[i]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last_param(&self) -> f64 {
        *self.params.last().unwrap()
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// Values of one state component along the trajectory.
    pub fn component(&self, idx: usize) -> Vec<f64> {
        assert!(idx < self.dim);
        self.states
            .iter()
            .skip(idx)
            .step_by(self.dim)
            .copied()
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.params
            .iter()
            .copied()
            .zip(self.states.chunks_exact(self.dim))
    }
}

/// One classical RK4 step of size `h` from `(p, state)`: four right-hand-side
/// evaluations combined with weights 1/6, 1/3, 1/3, 1/6.
pub fn rk4_step(sys: &OdeSystem, p: f64, state: &[f64], h: f64) -> Result<Vec<f64>> {
    check_step(h)?;
    if state.len() != sys.dim() {
        return Err(Error::InvalidConfig(format!(
            "state has {} components, system has {}",
            state.len(),
            sys.dim()
        )));
    }
    if state.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { param: p });
    }
    let mut scratch = StageBuffers::new(sys.dim());
    sys.eval_rhs(p, state, &mut scratch.k1)?;
    let mut next = vec![0.0; sys.dim()];
    rk4_advance(sys, p, state, h, &mut scratch, &mut next)?;
    Ok(next)
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "step size {h} must be positive and finite"
        )));
    }
    Ok(())
}

// Stage storage reused across steps; million-step runs would otherwise spend
// a noticeable share of their time in the allocator.
struct StageBuffers {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
}

impl StageBuffers {
    fn new(n: usize) -> Self {
        StageBuffers {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            stage: vec![0.0; n],
        }
    }
}

/// Completes an RK4 step given the already-evaluated first stage in
/// `scratch.k1`, writing the advanced state into `next`.
fn rk4_advance(
    sys: &OdeSystem,
    p: f64,
    state: &[f64],
    h: f64,
    scratch: &mut StageBuffers,
    next: &mut [f64],
) -> Result<()> {
    fn fill_stage(stage: &mut [f64], state: &[f64], weight: f64, k: &[f64]) {
        for ((s, u), ki) in stage.iter_mut().zip(state).zip(k) {
            *s = u + weight * ki;
        }
    }

    fill_stage(&mut scratch.stage, state, 0.5 * h, &scratch.k1);
    sys.eval_rhs(p + 0.5 * h, &scratch.stage, &mut scratch.k2)?;
    fill_stage(&mut scratch.stage, state, 0.5 * h, &scratch.k2);
    sys.eval_rhs(p + 0.5 * h, &scratch.stage, &mut scratch.k3)?;
    fill_stage(&mut scratch.stage, state, h, &scratch.k3);
    sys.eval_rhs(p + h, &scratch.stage, &mut scratch.k4)?;

    for i in 0..sys.dim() {
        next[i] = state[i]
            + h / 6.0 * (scratch.k1[i] + 2.0 * scratch.k2[i] + 2.0 * scratch.k3[i] + scratch.k4[i]);
    }
    Ok(())
}

/// Integrate `sys` with fixed step `h` until `stop` fires.
///
/// Every accepted step is recorded. A right-hand-side failure after at least
/// one completed step yields a partial trajectory with
/// [`StopReason::RhsError`]; a failure before the first step completes is an
/// error ([`Error::NoSteps`]).
pub fn integrate(sys: &OdeSystem, h: f64, stop: &StopRule) -> Result<Trajectory> {
    check_step(h)?;
    stop.validate()?;

    let n = sys.dim();
    let start = sys.start();
    let allowed = stop.allowed_steps(start, h);

    let mut params = Vec::new();
    let mut states = Vec::new();
    params.push(start);
    states.extend_from_slice(sys.initial());

    let mut state = sys.initial().to_vec();
    let mut next = vec![0.0; n];
    let mut scratch = StageBuffers::new(n);
    let mut k = 0usize;

    let reason = loop {
        if k == allowed {
            break if allowed == stop.max_steps() {
                StopReason::StepBudget
            } else {
                StopReason::ParameterBound
            };
        }
        let p = start + (k as f64) * h;
        // first stage doubles as the derivative-decay probe
        if let Err(e) = sys.eval_rhs(p, &state, &mut scratch.k1) {
            if k == 0 {
                return Err(Error::NoSteps(Box::new(e)));
            }
            break StopReason::RhsError(e);
        }
        if stop.derivative_decay() > 0.0 && scratch.k1[0].abs() < stop.derivative_decay() {
            break StopReason::DerivativeDecay;
        }
        if let Err(e) = rk4_advance(sys, p, &state, h, &mut scratch, &mut next) {
            if k == 0 {
                return Err(Error::NoSteps(Box::new(e)));
            }
            break StopReason::RhsError(e);
        }
        if next.iter().any(|v| !v.is_finite()) {
            let e = Error::NonFiniteState { param: p + h };
            if k == 0 {
                return Err(Error::NoSteps(Box::new(e)));
            }
            break StopReason::RhsError(e);
        }
        k += 1;
        params.push(start + (k as f64) * h);
        states.extend_from_slice(&next);
        state.copy_from_slice(&next);
    };

    Ok(Trajectory {
        dim: n,
        names: sys.names().to_vec(),
        params,
        states,
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(
        names: &[&str],
        start: f64,
        initial: &[f64],
        rhs: impl Fn(f64, &[f64], &mut [f64]) -> Result<()> + Send + Sync + 'static,
    ) -> OdeSystem {
        OdeSystem::new(
            names.iter().map(|s| s.to_string()).collect(),
            start,
            initial.to_vec(),
            Box::new(rhs),
        )
        .unwrap()
    }

    /// Example 2 system: x' = 1/y, y' = y.
    fn ex2() -> OdeSystem {
        system(&["x", "y"], 0.0, &[0.0, 1.0], |_p, u, out| {
            if u[1] == 0.0 {
                return Err(crate::expr::EvalError::DivisionByZero.into());
            }
            out[0] = 1.0 / u[1];
            out[1] = u[1];
            Ok(())
        })
    }

    /// Example 1 transformed system: x' = 1/(2 t y), y' = 1/(2 y).
    fn ex1_diff() -> OdeSystem {
        system(&["x", "y"], 1.0, &[0.0, 1.0], |p, u, out| {
            out[0] = 1.0 / (2.0 * p * u[1]);
            out[1] = 1.0 / (2.0 * u[1]);
            Ok(())
        })
    }

    #[test]
    fn constant_rhs_step_is_exact() {
        let sys = system(&["x", "y"], 0.0, &[0.0, 5.0], |_p, _u, out| {
            out[0] = 1.0;
            out[1] = 0.0;
            Ok(())
        });
        let next = rk4_step(&sys, 0.0, &[0.0, 5.0], 0.2).unwrap();
        assert_eq!(next, vec![0.2, 5.0]);
    }

    #[test]
    fn one_step_on_example_2_matches_exact_solution() {
        // oracle: exact solution x = 1 - e^-xi, y = e^xi
        let sys = ex2();
        let next = rk4_step(&sys, 0.0, &[0.0, 1.0], 0.2).unwrap();
        let exact = [1.0 - (-0.2f64).exp(), 0.2f64.exp()];
        assert!(
            (next[0] - exact[0]).abs() <= 1e-5,
            "x: {} vs {}",
            next[0],
            exact[0]
        );
        assert!(
            (next[1] - exact[1]).abs() <= 1e-5,
            "y: {} vs {}",
            next[1],
            exact[1]
        );
        // frozen values (0.18127..., 1.22140...)
        assert!((next[0] - 0.1812771408516089).abs() < 1e-12);
        assert!((next[1] - 1.2214).abs() < 1e-12);
    }

    #[test]
    fn rhs_error_surfaces_from_step() {
        let sys = ex2();
        let err = rk4_step(&sys, 0.0, &[0.0, 0.0], 0.2).unwrap_err();
        assert_eq!(err, Error::Eval(crate::expr::EvalError::DivisionByZero));
    }

    #[test]
    fn step_validates_inputs() {
        let sys = ex2();
        assert!(rk4_step(&sys, 0.0, &[0.0, 1.0], 0.0).is_err());
        assert!(rk4_step(&sys, 0.0, &[0.0, 1.0], -0.1).is_err());
        assert!(rk4_step(&sys, 0.0, &[0.0], 0.1).is_err());
        assert!(rk4_step(&sys, 0.0, &[0.0, f64::NAN], 0.1).is_err());
    }

    #[test]
    fn integrate_example_2_to_xi_14() {
        // oracle: exact x(14) = 1 - e^-14; RK4 at h=0.2 carries ~5.4e-5 of
        // accumulated truncation (computed independently and frozen here)
        let sys = ex2();
        let stop = StopRule::default()
            .with_max_param(14.0)
            .with_derivative_decay(0.0);
        let traj = integrate(&sys, 0.2, &stop).unwrap();
        assert_eq!(traj.steps(), 70);
        assert_eq!(*traj.reason(), StopReason::ParameterBound);
        let x_end = traj.last_state()[0];
        let exact = 1.0 - (-14.0f64).exp();
        assert!(
            (x_end - exact).abs() <= 6e-5,
            "err = {}",
            (x_end - exact).abs()
        );
        assert!((x_end - 1.0000529164259098).abs() <= 1e-9);
    }

    #[test]
    fn derivative_decay_stops_immediately() {
        let sys = system(&["x", "y"], 0.0, &[0.0, 1.0], |_p, _u, out| {
            out[0] = 0.05;
            out[1] = 1.0;
            Ok(())
        });
        let stop = StopRule::default().with_derivative_decay(0.1);
        let traj = integrate(&sys, 0.2, &stop).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(*traj.reason(), StopReason::DerivativeDecay);
    }

    #[test]
    fn example_1_transformed_tracks_sqrt_t() {
        // oracle: exact parametric solution x = 1 - t^-1/2, y = sqrt(t)
        let sys = ex1_diff();
        let stop = StopRule::default()
            .with_max_param(100.0)
            .with_derivative_decay(0.0);
        let traj = integrate(&sys, 0.2, &stop).unwrap();
        let mut max_err: f64 = 0.0;
        for (t, u) in traj.iter() {
            max_err = max_err.max((u[1] - t.sqrt()).abs());
        }
        assert!(max_err <= 1e-4, "max |y - sqrt(t)| = {max_err}");
        // the independently computed value is 2.38e-7; keep a regression bound
        assert!(max_err <= 1e-6);
    }

    #[test]
    fn partial_trajectory_on_mid_run_rhs_failure() {
        // fails once x exceeds 0.5
        let sys = system(&["x", "y"], 0.0, &[0.0, 1.0], |_p, u, out| {
            if u[0] > 0.5 {
                return Err(Error::NonFiniteState { param: u[0] });
            }
            out[0] = 1.0;
            out[1] = 0.0;
            Ok(())
        });
        let stop = StopRule::default()
            .with_max_param(10.0)
            .with_derivative_decay(0.0);
        let traj = integrate(&sys, 0.2, &stop).unwrap();
        assert!(matches!(traj.reason(), StopReason::RhsError(_)));
        assert!(traj.len() > 1);
    }

    #[test]
    fn immediate_rhs_failure_is_an_error() {
        let sys = system(&["x", "y"], 0.0, &[0.0, 1.0], |_p, _u, _out| {
            Err(Error::NonFiniteState { param: 0.0 })
        });
        let stop = StopRule::default().with_max_param(10.0);
        assert!(matches!(
            integrate(&sys, 0.2, &stop),
            Err(Error::NoSteps(_))
        ));
    }

    #[test]
    fn parameters_are_start_plus_k_h_exactly() {
        let sys = ex2();
        let stop = StopRule::default()
            .with_max_param(2.0)
            .with_derivative_decay(0.0);
        let traj = integrate(&sys, 0.2, &stop).unwrap();
        assert_eq!(traj.len(), 11);
        for (k, p) in traj.params().iter().enumerate() {
            assert_eq!(*p, (k as f64) * 0.2, "sample {k}");
        }
    }

    #[test]
    fn step_budget_reason() {
        let sys = ex2();
        let stop = StopRule::default()
            .with_max_steps(5)
            .with_derivative_decay(0.0);
        let traj = integrate(&sys, 0.2, &stop).unwrap();
        assert_eq!(traj.steps(), 5);
        assert_eq!(*traj.reason(), StopReason::StepBudget);
    }

    #[test]
    fn integration_is_deterministic() {
        let stop = StopRule::default()
            .with_max_param(6.0)
            .with_derivative_decay(0.0);
        let a = integrate(&ex2(), 0.2, &stop).unwrap();
        let b = integrate(&ex2(), 0.2, &stop).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fourth_order_convergence_on_example_2() {
        // global error at xi = 2 shrinks by 16 +- 3 when h halves
        let exact_x = 1.0 - (-2.0f64).exp();
        let exact_y = 2.0f64.exp();
        let err = |h: f64| {
            let stop = StopRule::default()
                .with_max_param(2.0)
                .with_derivative_decay(0.0);
            let traj = integrate(&ex2(), h, &stop).unwrap();
            let s = traj.last_state();
            (s[0] - exact_x).abs().max((s[1] - exact_y).abs())
        };
        let e1 = err(0.2);
        let e2 = err(0.1);
        let e3 = err(0.05);
        let r12 = e1 / e2;
        let r23 = e2 / e3;
        assert!((13.0..=19.0).contains(&r12), "ratio {r12}");
        assert!((13.0..=19.0).contains(&r23), "ratio {r23}");
    }

    #[test]
    fn trajectory_component_extraction() {
        let sys = ex2();
        let stop = StopRule::default()
            .with_max_param(1.0)
            .with_derivative_decay(0.0);
        let traj = integrate(&sys, 0.2, &stop).unwrap();
        let xs = traj.component(0);
        let ys = traj.component(1);
        assert_eq!(xs.len(), traj.len());
        assert_eq!(xs[0], 0.0);
        assert_eq!(ys[0], 1.0);
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn systems_and_trajectories_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<OdeSystem>();
        assert_send_sync::<Trajectory>();
        assert_send_sync::<crate::expr::Expression>();
    }

    #[test]
    fn system_construction_validation() {
        let mk = |names: &[&str], init: &[f64]| {
            OdeSystem::new(
                names.iter().map(|s| s.to_string()).collect(),
                0.0,
                init.to_vec(),
                Box::new(|_, _, _| Ok(())),
            )
        };
        assert!(mk(&["x", "y"], &[0.0]).is_err());
        assert!(mk(&["x", "x"], &[0.0, 1.0]).is_err());
        assert!(mk(&[], &[]).is_err());
        assert!(mk(&["x"], &[f64::INFINITY]).is_err());
    }
}
