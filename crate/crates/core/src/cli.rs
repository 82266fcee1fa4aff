//! Command-line entry point.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::adaptivity::CriterionMode;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::runner::{run_scenario, RunOptions};
use crate::scenarios::{builtin, NAMES};

#[derive(Debug, Parser)]
#[command(name = "pdccm", version, about = "Adaptive PD/CCM coupling for 2D dynamic fracture")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CriterionArg {
    Bond,
    Strength,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run a scenario and write snapshots and series to a directory.
    Run {
        /// Config file, or `builtin:<name>`.
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: PathBuf,
        /// Override the config's damage criterion.
        #[arg(long)]
        criterion: Option<CriterionArg>,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Check a config and print the resolved values.
    Validate {
        #[arg(long)]
        config: String,
    },
    /// Print wave speeds and the critical time step.
    Speeds {
        #[arg(long)]
        config: String,
    },
    /// Bundled scenarios.
    Scenarios {
        #[command(subcommand)]
        cmd: ScenarioCmd,
    },
}

#[derive(Debug, Subcommand)]
enum ScenarioCmd {
    List,
    /// Print a bundled config as TOML.
    Show { name: String },
}

fn load(source: &str) -> Result<ScenarioConfig> {
    match source.strip_prefix("builtin:") {
        Some(name) => builtin(name).ok_or_else(|| {
            Error::validation(
                "known scenario",
                format!("no builtin scenario `{name}`; try `pdccm scenarios list`"),
            )
        }),
        None => ScenarioConfig::load(Path::new(source)),
    }
}

/// Exit status for an error: 2 for a runtime abort, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Instability { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn cli_main<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 1;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Result<()> {
    let io = |e| Error::io("<stdout>", e);
    match cmd {
        Cmd::Run {
            config,
            out: dir,
            criterion,
            max_steps,
        } => {
            let cfg = load(&config)?;
            let opts = RunOptions {
                out: Some(dir.clone()),
                max_steps,
                criterion: criterion.map(|c| match c {
                    CriterionArg::Bond => CriterionMode::BrokenBond,
                    CriterionArg::Strength => CriterionMode::Strength,
                }),
            };
            let run = run_scenario(&cfg, &opts)?;
            let s = &run.summary;
            writeln!(
                out,
                "{}: {} steps, t = {:e} s, {:.1} s wall, {} dofs ({} PD), {} broken bonds, max {} crack tips -> {}",
                s.name,
                s.steps,
                s.t_end,
                s.wall_s,
                s.n_dofs,
                s.pd_dofs,
                s.total_broken,
                s.max_tips,
                dir.display()
            )
            .map_err(io)?;
        }
        Cmd::Validate { config } => {
            let cfg = load(&config)?;
            let (_, r) = cfg.validate()?;
            writeln!(
                out,
                "{}: ok\n  nodes {}  elements {}\n  dx {} mm  delta {} mm  l {} mm  L {} mm\n  dt {:e} s  dt_cr {:e} s  steps {}\n  s_crit {:e}  tau0 {:e}\n  r_p {} mm  R_p {} mm",
                cfg.name, r.n_nodes, r.n_elements, r.dx, r.delta, r.l, r.min_edge, r.dt, r.dt_cr, r.n_steps, r.s_crit, r.tau0, r.r_p, r.big_r_p
            )
            .map_err(io)?;
        }
        Cmd::Speeds { config } => {
            let cfg = load(&config)?;
            let (_, r) = cfg.validate()?;
            writeln!(
                out,
                "C   = {:.4e} mm/s\nC_S = {:.4e} mm/s\nC_R = {:.4e} mm/s\ndt_cr = {:.4e} s",
                r.c, r.c_s, r.c_r, r.dt_cr
            )
            .map_err(io)?;
        }
        Cmd::Scenarios { cmd: ScenarioCmd::List } => {
            for name in NAMES {
                let c = builtin(name).expect("listed scenario exists");
                writeln!(out, "{name:<26} {}", c.description).map_err(io)?;
            }
        }
        Cmd::Scenarios {
            cmd: ScenarioCmd::Show { name },
        } => {
            let c = load(&format!("builtin:{name}"))?;
            write!(out, "{}", c.to_toml()).map_err(io)?;
        }
    }
    Ok(())
}
