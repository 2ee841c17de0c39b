//! `blowup sweep`: convergence study over a ladder of step sizes.
//!
//! Each step size integrates to the same parameter bound; the error is the
//! max-norm distance between the final state and the problem's recorded
//! exact transformed solution, and consecutive ladder entries yield the
//! empirical order `ln(e_i/e_{i+1}) / ln(h_i/h_{i+1})`.

use crate::config::{build_transform, CliError, CliResult, MethodArgs, ProblemArgs};
use crate::output::{g17, jnum, Format, OutputArgs};
use blowup_core::ode::{integrate, StopRule};
use clap::Args;
use std::io::Write;

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    #[command(flatten)]
    pub method: MethodArgs,

    /// Comma-separated step sizes, e.g. 0.2,0.1,0.05.
    #[arg(long, value_delimiter = ',', required = true)]
    pub h_list: Vec<f64>,

    /// Upper bound on the parameter t (differential method).
    #[arg(long, conflicts_with = "xi_max")]
    pub t_max: Option<f64>,

    /// Upper bound on the parameter xi (non-local method).
    #[arg(long)]
    pub xi_max: Option<f64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(args: &SweepArgs) -> CliResult<()> {
    if args.h_list.len() < 2 {
        return Err(CliError::Usage(
            "sweep needs at least two step sizes in --h-list".into(),
        ));
    }
    let built = args.problem.build()?;
    let test = built.builtin.as_ref().ok_or_else(|| {
        CliError::Usage("sweep compares against exact solutions and requires --problem".into())
    })?;
    let bound = args
        .t_max
        .or(args.xi_max)
        .ok_or_else(|| CliError::Usage("sweep requires --t-max or --xi-max".into()))?;
    let method = args.method.resolve_method(&built)?;
    let g = args.method.resolve_g(&built)?;

    let mut errors = Vec::with_capacity(args.h_list.len());
    for &h in &args.h_list {
        let sys = build_transform(&built, method, g.clone())?;
        let stop = StopRule::default()
            .with_max_param(bound)
            .with_derivative_decay(0.0);
        let traj = integrate(sys.system(), h, &stop)?;
        let p_end = traj.last_param();
        let exact = test.exact_transformed_state(method.kind(), p_end)?;
        let err = traj
            .last_state()
            .iter()
            .zip(&exact)
            .map(|(got, want)| (got - want).abs())
            .fold(0.0f64, f64::max);
        errors.push((h, traj.steps(), err));
    }

    let mut orders: Vec<Option<f64>> = vec![None];
    for w in errors.windows(2) {
        let (h1, _, e1) = w[0];
        let (h2, _, e2) = w[1];
        let order = if e1 > 0.0 && e2 > 0.0 && h1 != h2 {
            Some((e1 / e2).ln() / (h1 / h2).ln())
        } else {
            None
        };
        orders.push(order);
    }

    let mut w = args.output.table_writer()?;
    match args.output.format {
        Format::Csv => {
            writeln!(w, "h,steps,error,order")?;
            for ((h, steps, err), order) in errors.iter().zip(&orders) {
                let order_cell = order.map(g17).unwrap_or_default();
                writeln!(w, "{},{steps},{},{order_cell}", g17(*h), g17(*err))?;
            }
        }
        Format::JsonLines => {
            for ((h, steps, err), order) in errors.iter().zip(&orders) {
                writeln!(
                    w,
                    "{{\"h\":{},\"steps\":{steps},\"error\":{},\"order\":{}}}",
                    jnum(*h),
                    jnum(*err),
                    order.map(jnum).unwrap_or_else(|| "null".into()),
                )?;
            }
        }
    }
    w.flush().map_err(CliError::Io)?;

    let order_list = orders
        .iter()
        .flatten()
        .map(|o| jnum(*o))
        .collect::<Vec<_>>()
        .join(",");
    println!("{{\"orders\":[{order_list}]}}");
    Ok(())
}
