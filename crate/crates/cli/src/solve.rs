//! `blowup solve`: integrate, estimate x*, fit the singularity.

use crate::config::{build_transform, CliError, CliResult, MethodArgs, ProblemArgs, StopArgs};
use crate::output::{summary_json, write_plot_script, write_trajectory, OutputArgs};
use blowup_core::blowup::analyze;
use blowup_core::ode::{integrate, StopReason};
use clap::Args;

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    #[command(flatten)]
    pub method: MethodArgs,

    #[command(flatten)]
    pub stop: StopArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(args: &SolveArgs) -> CliResult<()> {
    if args.output.plot_script && args.output.out.is_none() {
        return Err(CliError::Usage("--plot-script requires --out".into()));
    }
    let built = args.problem.build()?;
    let method = args.method.resolve_method(&built)?;
    let g = args.method.resolve_g(&built)?;
    let system = build_transform(&built, method, g)?;

    let traj = integrate(system.system(), args.stop.h, &args.stop.stop_rule())?;

    // write the (possibly partial) trajectory before failing on anything else
    let mut w = args.output.table_writer()?;
    write_trajectory(&mut w, &traj, args.output.format)?;
    w.flush().map_err(CliError::Io)?;
    if let (true, Some(path)) = (args.output.plot_script, &args.output.out) {
        write_plot_script(path)?;
    }

    if let StopReason::RhsError(inner) = traj.reason() {
        return Err(CliError::Core(inner.clone()));
    }

    let est = analyze(&traj)?;
    println!("{}", summary_json(&est, &traj));
    Ok(())
}
