//! Deterministic table and summary writers.
//!
//! CSV cells are written with 17 significant digits (`{:.16e}`), '.' decimal
//! separator, so values round-trip exactly and reruns reproduce files byte
//! for byte. JSON values use Rust's shortest-round-trip float formatting,
//! which is equally lossless.

use blowup_core::blowup::BlowupEstimate;
use blowup_core::ode::{StopReason, Trajectory};
use clap::ValueEnum;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    JsonLines,
}

/// Output target selection shared by the commands.
#[derive(Debug, clap::Args)]
pub struct OutputArgs {
    /// Table format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the table to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Also write a gnuplot script next to --out.
    #[arg(long, default_value_t = false)]
    pub plot_script: bool,
}

impl OutputArgs {
    /// Writer for the table: the file if `--out` was given, else stdout.
    pub fn table_writer(&self) -> io::Result<Box<dyn Write>> {
        match &self.out {
            Some(path) => Ok(Box::new(BufWriter::new(File::create(path)?))),
            None => Ok(Box::new(io::stdout().lock())),
        }
    }
}

pub fn g17(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON fragment for an f64: shortest representation that round-trips,
/// always a valid JSON number.
pub fn jnum(v: f64) -> String {
    if v.is_finite() {
        let s = format!("{v}");
        // `Display` omits the fractional part for integral floats
        if s.contains('.') || s.contains('e') || s.contains("inf") {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        "null".to_string()
    }
}

pub fn reason_str(reason: &StopReason) -> &'static str {
    match reason {
        StopReason::StepBudget => "step-budget",
        StopReason::ParameterBound => "parameter-bound",
        StopReason::DerivativeDecay => "derivative-decay",
        StopReason::RhsError(_) => "rhs-error",
    }
}

/// Trajectory table: columns `param,x,y[,t]`.
pub fn write_trajectory(w: &mut dyn Write, traj: &Trajectory, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            write!(w, "param")?;
            for name in traj.names() {
                write!(w, ",{name}")?;
            }
            writeln!(w)?;
            for (p, state) in traj.iter() {
                write!(w, "{}", g17(p))?;
                for v in state {
                    write!(w, ",{}", g17(*v))?;
                }
                writeln!(w)?;
            }
        }
        Format::JsonLines => {
            for (p, state) in traj.iter() {
                write!(w, "{{\"param\":{}", jnum(p))?;
                for (name, v) in traj.names().iter().zip(state) {
                    write!(w, ",\"{name}\":{}", jnum(*v))?;
                }
                writeln!(w, "}}")?;
            }
        }
    }
    Ok(())
}

/// The one-line summary record printed to stdout after a solve.
pub fn summary_json(est: &BlowupEstimate, traj: &Trajectory) -> String {
    format!(
        "{{\"x_star\":{},\"uncertainty\":{},\"A\":{},\"beta\":{},\"steps\":{},\"reason\":\"{}\"}}",
        jnum(est.x_star),
        jnum(est.uncertainty),
        est.amplitude.map(jnum).unwrap_or_else(|| "null".into()),
        est.exponent.map(jnum).unwrap_or_else(|| "null".into()),
        traj.steps(),
        reason_str(traj.reason()),
    )
}

/// Companion gnuplot script: solution curve y(x) and the approach of x to
/// its limit against the integration parameter.
pub fn write_plot_script(csv_path: &Path) -> io::Result<PathBuf> {
    let script_path = csv_path.with_extension("gnuplot");
    let data = csv_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| csv_path.display().to_string());
    let mut f = BufWriter::new(File::create(&script_path)?);
    writeln!(f, "#!/usr/bin/env gnuplot")?;
    writeln!(f, "set datafile separator \",\"")?;
    writeln!(f, "set key autotitle columnhead")?;
    writeln!(f, "set terminal pngcairo size 1200,500")?;
    writeln!(f, "set output \"{data}.png\"")?;
    writeln!(f, "set multiplot layout 1,2")?;
    writeln!(f, "set xlabel \"x\"; set ylabel \"y\"")?;
    writeln!(f, "plot \"{data}\" using 2:3 with lines title \"y(x)\"")?;
    writeln!(f, "set xlabel \"parameter\"; set ylabel \"x\"")?;
    writeln!(
        f,
        "plot \"{data}\" using 1:2 with lines title \"x(parameter)\""
    )?;
    writeln!(f, "unset multiplot")?;
    f.flush()?;
    Ok(script_path)
}
