//! `blowup compare`: two transforms of one problem on an equal step budget.
//!
//! Both sides integrate exactly `--steps` steps (derivative decay is
//! disabled so the budgets really are equal) and the table lists, per step,
//! each side's x value and its distance to the reference blow-up point:
//! the exact one for built-in problems, otherwise the better of the two
//! Aitken estimates.

use crate::config::{
    build_transform, CliError, CliResult, GKindArg, MethodArg, MethodArgs, ProblemArgs,
};
use crate::output::{g17, jnum, Format, OutputArgs};
use blowup_core::blowup::estimate_x_star;
use blowup_core::ode::{integrate, StopRule, Trajectory};
use clap::Args;
use std::io::Write;

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    /// Method for side a.
    #[arg(long, value_enum, default_value_t = MethodArg::Differential)]
    pub method_a: MethodArg,

    /// Method for side b.
    #[arg(long, value_enum, default_value_t = MethodArg::Nonlocal)]
    pub method_b: MethodArg,

    /// g-choice for side a (when non-local).
    #[arg(long, value_enum)]
    pub g_a: Option<GKindArg>,

    /// g-choice for side b (when non-local).
    #[arg(long, value_enum)]
    pub g_b: Option<GKindArg>,

    /// Exponent s for arc-length g.
    #[arg(long, default_value_t = 2.0)]
    pub g_s: f64,

    /// Expression for custom g.
    #[arg(long)]
    pub g_expr: Option<String>,

    /// Fixed RK4 step size.
    #[arg(long, default_value_t = 0.2)]
    pub h: f64,

    /// Step budget for both sides.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(args: &CompareArgs) -> CliResult<()> {
    let built = args.problem.build()?;
    let shared = MethodArgs {
        method: None,
        g: None,
        g_s: args.g_s,
        g_expr: args.g_expr.clone(),
    };
    let g_a = shared.g_choice_from(args.g_a, &built)?;
    let g_b = shared.g_choice_from(args.g_b, &built)?;

    let side = |method: MethodArg, g| -> CliResult<Trajectory> {
        let sys = build_transform(&built, method, g)?;
        let stop = StopRule::default()
            .with_max_steps(args.steps)
            .with_derivative_decay(0.0);
        Ok(integrate(sys.system(), args.h, &stop)?)
    };
    let traj_a = side(args.method_a, g_a)?;
    let traj_b = side(args.method_b, g_b)?;

    let est_a = estimate_x_star(&traj_a).ok();
    let est_b = estimate_x_star(&traj_b).ok();

    // reference: exact x* for built-ins, else the estimate with the
    // smaller reported uncertainty
    let x_ref = match &built.builtin {
        Some(test) => test.x_star(),
        None => match (&est_a, &est_b) {
            (Some(a), Some(b)) => {
                if a.uncertainty <= b.uncertainty {
                    a.x_star
                } else {
                    b.x_star
                }
            }
            (Some(a), None) => a.x_star,
            (None, Some(b)) => b.x_star,
            (None, None) => {
                return Err(CliError::Usage(
                    "neither side produced a blow-up estimate to compare against".into(),
                ))
            }
        },
    };

    let mut w = args.output.table_writer()?;
    let rows = traj_a.len().min(traj_b.len());
    match args.output.format {
        Format::Csv => {
            writeln!(w, "step,param_a,x_a,err_a,param_b,x_b,err_b")?;
            for k in 0..rows {
                let (pa, xa) = (traj_a.param(k), traj_a.state(k)[0]);
                let (pb, xb) = (traj_b.param(k), traj_b.state(k)[0]);
                writeln!(
                    w,
                    "{k},{},{},{},{},{},{}",
                    g17(pa),
                    g17(xa),
                    g17((xa - x_ref).abs()),
                    g17(pb),
                    g17(xb),
                    g17((xb - x_ref).abs()),
                )?;
            }
        }
        Format::JsonLines => {
            for k in 0..rows {
                let (pa, xa) = (traj_a.param(k), traj_a.state(k)[0]);
                let (pb, xb) = (traj_b.param(k), traj_b.state(k)[0]);
                writeln!(
                    w,
                    "{{\"step\":{k},\"param_a\":{},\"x_a\":{},\"err_a\":{},\"param_b\":{},\"x_b\":{},\"err_b\":{}}}",
                    jnum(pa),
                    jnum(xa),
                    jnum((xa - x_ref).abs()),
                    jnum(pb),
                    jnum(xb),
                    jnum((xb - x_ref).abs()),
                )?;
            }
        }
    }
    w.flush().map_err(CliError::Io)?;

    let end_err_a = (traj_a.last_state()[0] - x_ref).abs();
    let end_err_b = (traj_b.last_state()[0] - x_ref).abs();
    let better = if end_err_a < end_err_b {
        "a"
    } else if end_err_b < end_err_a {
        "b"
    } else {
        "tie"
    };
    println!(
        "{{\"x_star_ref\":{},\"x_star_a\":{},\"x_star_b\":{},\"end_err_a\":{},\"end_err_b\":{},\"better\":\"{better}\",\"steps\":{}}}",
        jnum(x_ref),
        est_a.map(|e| jnum(e.x_star)).unwrap_or_else(|| "null".into()),
        est_b.map(|e| jnum(e.x_star)).unwrap_or_else(|| "null".into()),
        jnum(end_err_a),
        jnum(end_err_b),
        args.steps,
    );
    Ok(())
}
