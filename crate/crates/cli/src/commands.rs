use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;
use servo_forge::exogenous::SignalModel;
use servo_forge::extended_estimator::{design_xest, realize_closed_loop_xest};
use servo_forge::internal_model::{design_im, realize_closed_loop_im};
use servo_forge::lti::StateSpace;
use servo_forge::model_following::{design_mf, mf_residuals, realize_closed_loop_mf};
use servo_forge::numlin::{eigenvalues, sort_spectrum, spectrum_distance};
use servo_forge::sensitivity::{audit_complementary, audit_nmp, audit_sensitivity, Value};
use servo_forge::sim::{simulate, steady_state_error, ClosedLoop, SignalSpec};
use servo_forge::{Complex, Polynomial};

use crate::failure::{CliResult, Failure, Kind};
use crate::files::{self, Controller};
use crate::parse::Perturbation;

/// Writes one line to stdout; a closed pipe is not an error.
fn emit(text: &str) -> CliResult<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::new(Kind::Io, format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn pairs(v: &[Complex]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub struct DesignRequest<'a> {
    pub method: &'a str,
    pub plant: &'a Path,
    pub d: Polynomial,
    pub control_poles: Vec<Complex>,
    pub estimator_poles: Vec<Complex>,
    pub out: Option<&'a Path>,
}

/// Designs a controller, writes it, and prints the achieved spectrum of the
/// unsaturated closed loop next to the requested one.
pub fn design(req: DesignRequest<'_>) -> CliResult<()> {
    let plant = files::read_plant(req.plant)?;
    let model = SignalModel::new(req.d)?;
    let (ctrl, mut requested) = match req.method {
        "im" => {
            let c = design_im(&plant, &model, &req.control_poles, &req.estimator_poles)?;
            let mut want = req.control_poles.clone();
            want.extend(&req.estimator_poles);
            (Controller::Im(c), want)
        }
        "xest" => {
            let c = design_xest(&plant, &model, &req.control_poles, &req.estimator_poles)?;
            let mut want = req.control_poles.clone();
            want.extend(&req.estimator_poles);
            (Controller::Xest(c), want)
        }
        "mf" => {
            let c = design_mf(&plant, &model, &req.control_poles)?;
            // The model generator runs in open loop alongside the plant.
            let mut want = req.control_poles.clone();
            want.extend(eigenvalues(&model.a)?);
            (Controller::Mf(c), want)
        }
        other => return Err(Failure::usage(format!("unknown design method `{other}`"))),
    };
    let cl = realize(&plant, &ctrl, f64::INFINITY)?;
    let mut achieved = eigenvalues(&cl.linear_matrix())?;
    sort_spectrum(&mut achieved);
    sort_spectrum(&mut requested);
    let mismatch = spectrum_distance(&achieved, &requested);
    let text = serde_json::to_string_pretty(&ctrl.to_json()).expect("plain JSON");
    match req.out {
        Some(path) => files::write_text(path, &(text + "\n"))?,
        None => emit(&text)?,
    }
    let mut summary = json!({
        "method": ctrl.method(),
        "requested": pairs(&requested),
        "achieved": pairs(&achieved),
        "max_mismatch": mismatch,
    });
    if let Controller::Mf(c) = &ctrl {
        let (sylvester, output) = mf_residuals(&plant, &c.model.a, &c.model.c, &c.m, &c.n_ff);
        summary["residuals"] = json!({ "fm_ma_gn": sylvester, "hm_c": output });
    }
    if let Some(path) = req.out {
        summary["output"] = json!(path.display().to_string());
        emit(&summary.to_string())?;
    } else {
        eprintln!("{summary}");
    }
    log::info!("{} design placed {} poles, max mismatch {mismatch:.3e}", ctrl.method(), achieved.len());
    Ok(())
}

fn realize(plant: &StateSpace, ctrl: &Controller, sat: f64) -> CliResult<ClosedLoop> {
    Ok(match ctrl {
        Controller::Im(c) => realize_closed_loop_im(plant, c, sat)?,
        Controller::Xest(c) => realize_closed_loop_xest(plant, c, sat)?,
        Controller::Mf(c) => realize_closed_loop_mf(plant, c, sat)?,
    })
}

pub struct SimulateRequest<'a> {
    pub plant: &'a Path,
    pub controller: &'a Path,
    pub reference: SignalSpec,
    pub disturbance: SignalSpec,
    pub sat: f64,
    pub t_end: f64,
    pub h: f64,
    pub window: f64,
    pub perturb: &'a [Perturbation],
    pub out: Option<PathBuf>,
}

/// Simulates the controller (built on the nominal plant) against the
/// possibly perturbed plant and writes the trace as CSV.
pub fn simulate_cmd(req: SimulateRequest<'_>) -> CliResult<()> {
    let nominal = files::read_plant(req.plant)?;
    let ctrl = files::read_controller(req.controller, &nominal)?;
    let actual = files::perturb(&nominal, req.perturb)?;
    let cl = realize(&actual, &ctrl, req.sat)?;
    let trace = simulate(&cl, &req.reference, &req.disturbance, req.t_end, req.h)?;
    let sse = steady_state_error(&trace, req.window)?;
    let t_end = trace.t.last().copied().unwrap_or(0.0);
    let summary = json!({
        "method": ctrl.method(),
        "steady_state_error": sse,
        "window": [t_end * (1.0 - req.window), t_end],
        "samples": trace.len(),
        "h": trace.h,
        "integrator": trace.method,
        "max_abs_u": trace.u.iter().fold(0.0f64, |m, u| m.max(u.abs())),
        "saturation": if req.sat.is_finite() { json!(req.sat) } else { json!("inf") },
    });
    match &req.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| Failure::io(path, e))?;
            let mut w = BufWriter::new(file);
            trace.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| Failure::io(path, e))?;
            emit(&summary.to_string())?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            match trace.write_csv(&mut w).and_then(|_| w.flush()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    return Err(Failure::new(Kind::Io, format!("stdout: {e}")));
                }
                _ => {}
            }
            eprintln!("{summary}");
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Which {
    Sensitivity,
    Complementary,
    Both,
    Nmp(Complex),
}

impl std::str::FromStr for Which {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "sensitivity" => Ok(Which::Sensitivity),
            "complementary" => Ok(Which::Complementary),
            "both" => Ok(Which::Both),
            other => match other.strip_prefix("nmp:") {
                Some(z) => Ok(Which::Nmp(crate::parse::complex(z)?)),
                None => Err(format!("unknown integral `{other}` (sensitivity, complementary, both, nmp:<z0>)")),
            },
        }
    }
}

fn exceeds(residual: Value, tol: f64) -> bool {
    match residual {
        Value::Finite(r) => r.is_nan() || r.abs() > tol,
        Value::Infinite => true,
    }
}

/// Prints the report(s) and fails with the residual kind when any residual
/// is above `tol`.
pub fn audit(path: &Path, which: Which, tol: f64) -> CliResult<()> {
    let l = files::read_loop(path)?;
    let (report, worst) = match which {
        Which::Sensitivity => {
            let r = audit_sensitivity(&l)?;
            (serde_json::to_value(&r), r.residual)
        }
        Which::Complementary => {
            let r = audit_complementary(&l)?;
            (serde_json::to_value(&r), r.residual)
        }
        Which::Both => {
            let s = audit_sensitivity(&l)?;
            let t = audit_complementary(&l)?;
            let worst = if exceeds(s.residual, tol) { s.residual } else { t.residual };
            (Ok(json!({ "sensitivity": s, "complementary": t })), worst)
        }
        Which::Nmp(z0) => {
            let r = audit_nmp(&l, z0)?;
            (serde_json::to_value(&r), Value::Finite(r.residual))
        }
    };
    let report = report.expect("report JSON is plain data");
    emit(&serde_json::to_string_pretty(&report).expect("plain JSON"))?;
    if exceeds(worst, tol) {
        let shown = match worst {
            Value::Finite(r) => format!("{r:.3e}"),
            Value::Infinite => "inf".into(),
        };
        return Err(Failure::new(Kind::Residual, format!("residual {shown} exceeds tolerance {tol:e}"))
            .with_detail(json!({ "residual": worst, "tol": tol })));
    }
    Ok(())
}
