//! `servo-forge`: design tracking controllers, simulate them under input
//! saturation, and audit sensitivity integrals of loop gains.
//!
//! Exit codes: 0 ok, 1 audit residual above tolerance, 2 usage or I/O,
//! 3 infeasible design, 4 simulation divergence, 5 unstable closed loop.

mod commands;
mod failure;
mod files;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use servo_forge::sim::{SignalSpec, DEFAULT_HORIZON, DEFAULT_STEP};
use servo_forge::Polynomial;

use crate::commands::{DesignRequest, SimulateRequest, Which};
use crate::failure::{CliResult, Failure};
use crate::parse::{Perturbation, PoleList};

#[derive(Parser)]
#[command(name = "servo-forge", version, about = "Tracking controller design, simulation and sensitivity audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a controller and write it as JSON.
    Design {
        #[command(subcommand)]
        method: Method,
    },
    /// Simulate a plant with a controller file and write the trace as CSV.
    Simulate(SimulateArgs),
    /// Compare numeric and closed-form sensitivity integrals of a loop gain.
    Audit(AuditArgs),
}

#[derive(Subcommand)]
enum Method {
    /// Internal model: error-driven compensator containing d(p).
    Im(ObserverDesign),
    /// Extended estimator: observer of plant plus signal generator.
    Xest(ObserverDesign),
    /// Model following: feedforward from a signal model plus state feedback.
    Mf(CommonDesign),
}

#[derive(Args)]
struct CommonDesign {
    /// Plant file: {"f","g","h"[,"j","gw"]} or {"num","den"}.
    #[arg(long)]
    plant: PathBuf,
    /// Non-leading coefficients of the monic d(p), highest power first ("0,1" is p^2 + 1).
    #[arg(long = "d", value_name = "COEFFS", allow_hyphen_values = true, value_parser = parse::monic_tail)]
    d: Polynomial,
    /// Control poles, comma-separated a+bi values.
    #[arg(long, allow_hyphen_values = true)]
    control_poles: PoleList,
    /// Output controller file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ObserverDesign {
    #[command(flatten)]
    common: CommonDesign,
    /// Estimator poles, comma-separated a+bi values.
    #[arg(long, allow_hyphen_values = true)]
    estimator_poles: PoleList,
}

#[derive(Args)]
struct SimulateArgs {
    /// Nominal plant file the controller was designed on.
    #[arg(long)]
    plant: PathBuf,
    /// Controller file written by `design`.
    #[arg(long)]
    controller: PathBuf,
    /// Reference, kind:amplitude[:frequency][:start].
    #[arg(long = "ref", default_value = "sine:1:1", allow_hyphen_values = true)]
    reference: SignalSpec,
    /// Disturbance, same syntax as --ref.
    #[arg(long = "dist", default_value = "zero", allow_hyphen_values = true)]
    disturbance: SignalSpec,
    /// Symmetric limit on the plant input; "inf" disables the clamp.
    #[arg(long, default_value_t = 1.0)]
    sat: f64,
    /// Horizon in seconds.
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    tend: f64,
    /// Fixed integration step in seconds.
    #[arg(long, default_value_t = DEFAULT_STEP)]
    dt: f64,
    /// Trailing fraction of the horizon used for the steady-state error.
    #[arg(long, default_value_t = 0.2)]
    window: f64,
    /// Override a plant entry, matrix:row,col:value with 0-based indices.
    #[arg(long, allow_hyphen_values = true)]
    perturb: Vec<Perturbation>,
    /// Output CSV; stdout when omitted (the summary then goes to stderr).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Loop gain file: {"num","den"} or a square state-space system.
    #[arg(long = "loop", value_name = "FILE")]
    loop_file: PathBuf,
    /// sensitivity, complementary, both, or nmp:<z0>.
    #[arg(long, default_value = "both")]
    which: Which,
    /// Largest accepted |numeric - closed form|.
    #[arg(long, env = "SERVO_FORGE_TOL", default_value_t = 1e-2)]
    tol: f64,
}

fn design(method: Method) -> CliResult<()> {
    let (name, common, estimator_poles) = match method {
        Method::Im(a) => ("im", a.common, a.estimator_poles.0),
        Method::Xest(a) => ("xest", a.common, a.estimator_poles.0),
        Method::Mf(a) => ("mf", a, Vec::new()),
    };
    commands::design(DesignRequest {
        method: name,
        plant: &common.plant,
        d: common.d,
        control_poles: common.control_poles.0,
        estimator_poles,
        out: common.out.as_deref(),
    })
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Design { method } => design(method),
        Command::Simulate(a) => {
            if a.sat.is_nan() || a.sat <= 0.0 {
                return Err(Failure::usage(format!("--sat must be positive, got {}", a.sat)));
            }
            commands::simulate_cmd(SimulateRequest {
                plant: &a.plant,
                controller: &a.controller,
                reference: a.reference,
                disturbance: a.disturbance,
                sat: a.sat,
                t_end: a.tend,
                h: a.dt,
                window: a.window,
                perturb: &a.perturb,
                out: a.out,
            })
        }
        Command::Audit(a) => {
            if a.tol.is_nan() || a.tol < 0.0 {
                return Err(Failure::usage(format!("--tol must be non-negative, got {}", a.tol)));
            }
            commands::audit(&a.loop_file, a.which, a.tol)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            log::debug!("{f}");
            f.report()
        }
    }
}
