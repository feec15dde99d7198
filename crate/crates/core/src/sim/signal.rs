use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Zero,
    Step,
    Sine,
}

/// Reference or disturbance waveform, switched on at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub amplitude: f64,
    pub frequency: f64,
    pub start: f64,
}

impl SignalSpec {
    pub fn zero() -> Self {
        Self { kind: SignalKind::Zero, amplitude: 0.0, frequency: 0.0, start: 0.0 }
    }

    pub fn step(amplitude: f64, start: f64) -> Result<Self> {
        Self { kind: SignalKind::Step, amplitude, frequency: 0.0, start }.validated()
    }

    pub fn sine(amplitude: f64, frequency: f64, start: f64) -> Result<Self> {
        Self { kind: SignalKind::Sine, amplitude, frequency, start }.validated()
    }

    fn validated(self) -> Result<Self> {
        if !self.amplitude.is_finite() || !self.start.is_finite() {
            return Err(Error::Invalid("signal amplitude and start time must be finite".into()));
        }
        if self.kind == SignalKind::Sine && !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(Error::Invalid(format!("sine frequency must be positive, got {}", self.frequency)));
        }
        Ok(self)
    }

    pub fn with_start(self, start: f64) -> Result<Self> {
        Self { start, ..self }.validated()
    }

    pub fn is_zero(&self) -> bool {
        self.kind == SignalKind::Zero || self.amplitude == 0.0
    }
}

/// Value of the waveform at time `t`.
pub fn gen_signal(spec: &SignalSpec, t: f64) -> f64 {
    if t < spec.start {
        return 0.0;
    }
    match spec.kind {
        SignalKind::Zero => 0.0,
        SignalKind::Step => spec.amplitude,
        SignalKind::Sine => spec.amplitude * (spec.frequency * (t - spec.start)).sin(),
    }
}

/// Parses `kind:amplitude[:frequency][:start]`.
///
/// `zero` takes no fields. For `step` a third field is the start time
/// (`step:1:5`); a four-field step form `step:1:0:5` is also accepted with
/// the frequency slot ignored. `sine` needs a frequency.
impl FromStr for SignalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let num = |i: usize, what: &str| -> Result<f64> {
            parts[i]
                .parse::<f64>()
                .map_err(|_| Error::Invalid(format!("signal `{s}`: {what} `{}` is not a number", parts[i])))
        };
        match (parts[0].to_ascii_lowercase().as_str(), parts.len()) {
            ("zero", 1) => Ok(Self::zero()),
            ("zero", _) => Err(Error::Invalid(format!("signal `{s}`: zero takes no parameters"))),
            ("step", 2) => Self::step(num(1, "amplitude")?, 0.0),
            ("step", 3) => Self::step(num(1, "amplitude")?, num(2, "start")?),
            ("step", 4) => Self::step(num(1, "amplitude")?, num(3, "start")?),
            ("sine", 3) => Self::sine(num(1, "amplitude")?, num(2, "frequency")?, 0.0),
            ("sine", 4) => Self::sine(num(1, "amplitude")?, num(2, "frequency")?, num(3, "start")?),
            ("step" | "sine", _) => {
                Err(Error::Invalid(format!("signal `{s}`: expected kind:amplitude[:frequency][:start]")))
            }
            (other, _) => Err(Error::Invalid(format!("unknown signal kind `{other}` (zero, step, sine)"))),
        }
    }
}

impl fmt::Display for SignalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SignalKind::Zero => write!(f, "zero"),
            SignalKind::Step => write!(f, "step:{}:{}", self.amplitude, self.start),
            SignalKind::Sine => write!(f, "sine:{}:{}:{}", self.amplitude, self.frequency, self.start),
        }
    }
}
