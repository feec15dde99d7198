//! Reading plants, loops and controllers; writing outputs.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value as Json;
use servo_forge::extended_estimator::{XestController, XestControllerJson};
use servo_forge::internal_model::{ImController, ImControllerJson};
use servo_forge::lti::{LoopGain, RationalSiso, StateSpace};
use servo_forge::model_following::{MfController, MfControllerJson};

use crate::failure::{CliResult, Failure, Kind};
use crate::parse::{Perturbation, Target};

pub fn read_json(path: &Path) -> CliResult<Json> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(Kind::Usage, format!("{}: {e}", path.display())))
}

fn decode<T: DeserializeOwned>(path: &Path, json: Json) -> CliResult<T> {
    serde_json::from_value(json).map_err(|e| Failure::new(Kind::Usage, format!("{}: {e}", path.display())))
}

/// Plant in state-space form or as a `num`/`den` transfer function.
pub fn read_plant(path: &Path) -> CliResult<StateSpace> {
    let json = read_json(path)?;
    if json.get("num").is_some() {
        let tf: RationalSiso = decode(path, json)?;
        Ok(tf.to_state_space()?)
    } else {
        decode(path, json)
    }
}

pub fn read_loop(path: &Path) -> CliResult<LoopGain> {
    decode(path, read_json(path)?)
}

/// Applies entry overrides in order.
pub fn perturb(plant: &StateSpace, overrides: &[Perturbation]) -> CliResult<StateSpace> {
    let mut out = plant.clone();
    for p in overrides {
        let m = match p.target {
            Target::F => &mut out.f,
            Target::G => &mut out.g,
            Target::H => &mut out.h,
        };
        if p.row >= m.nrows() || p.col >= m.ncols() {
            return Err(Failure::usage(format!(
                "perturbation ({}, {}) is outside a {}x{} matrix",
                p.row,
                p.col,
                m.nrows(),
                m.ncols()
            )));
        }
        m[(p.row, p.col)] = p.value;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Controller {
    Im(ImController),
    Xest(XestController),
    Mf(MfController),
}

impl Controller {
    pub fn method(&self) -> &'static str {
        match self {
            Controller::Im(_) => "im",
            Controller::Xest(_) => "xest",
            Controller::Mf(_) => "mf",
        }
    }

    pub fn to_json(&self) -> Json {
        let value = match self {
            Controller::Im(c) => serde_json::to_value(ImControllerJson::from(c)),
            Controller::Xest(c) => serde_json::to_value(XestControllerJson::from(c)),
            Controller::Mf(c) => serde_json::to_value(MfControllerJson::from(c)),
        };
        value.expect("controller JSON is plain numbers")
    }
}

/// Controller file, recognised by its keys and rebuilt around `plant`.
pub fn read_controller(path: &Path, plant: &StateSpace) -> CliResult<Controller> {
    let json = read_json(path)?;
    let has = |k: &str| json.get(k).is_some();
    if has("kz") {
        Ok(Controller::Im(decode::<ImControllerJson>(path, json)?.into_controller(plant)?))
    } else if has("kzx") {
        Ok(Controller::Xest(decode::<XestControllerJson>(path, json)?.into_controller(plant)?))
    } else if has("k") && has("m") && has("n") {
        Ok(Controller::Mf(decode::<MfControllerJson>(path, json)?.into_controller(plant)?))
    } else {
        Err(Failure::usage(format!("{}: not a controller file (expected kz, kzx, or k/m/n keys)", path.display())))
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    let mut file = fs::File::create(path).map_err(|e| Failure::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Failure::io(path, e))
}
