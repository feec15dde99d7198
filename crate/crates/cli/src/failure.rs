use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use servo_forge::Error;

/// Process-level failure categories and their exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Io,
    Usage,
    Infeasible,
    Divergence,
    Unstable,
    Residual,
    Numerical,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Io => "io",
            Kind::Usage => "usage",
            Kind::Infeasible => "infeasible",
            Kind::Divergence => "divergence",
            Kind::Unstable => "unstable",
            Kind::Residual => "residual",
            Kind::Numerical => "numerical",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Kind::Io | Kind::Usage => 2,
            Kind::Infeasible => 3,
            Kind::Divergence => 4,
            Kind::Unstable => 5,
            Kind::Residual | Kind::Numerical => 1,
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
    pub detail: serde_json::Value,
}

impl Failure {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into(), detail: serde_json::Value::Null }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(Kind::Usage, message)
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(Kind::Io, format!("{}: {err}", path.display()))
    }

    pub fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = detail;
        self
    }

    /// Writes the structured error to stderr and returns the exit code.
    pub fn report(&self) -> ExitCode {
        let mut body = serde_json::json!({ "kind": self.kind.name(), "message": self.message });
        if !self.detail.is_null() {
            body["detail"] = self.detail.clone();
        }
        eprintln!("{}", serde_json::json!({ "error": body }));
        ExitCode::from(self.kind.exit_code())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.name(), self.message)
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let message = err.to_string();
        match err {
            Error::Uncontrollable { .. } | Error::Unobservable { .. } | Error::Infeasible(_) => {
                Failure::new(Kind::Infeasible, message)
            }
            Error::Divergence { time } => {
                Failure::new(Kind::Divergence, message).with_detail(serde_json::json!({ "time": time }))
            }
            Error::Unstable { poles } => {
                let poles: Vec<[f64; 2]> = poles.iter().map(|p| [p.re, p.im]).collect();
                Failure::new(Kind::Unstable, message).with_detail(serde_json::json!({ "poles": poles }))
            }
            Error::ClosedLoopPoleOnAxis { .. } => Failure::new(Kind::Unstable, message),
            Error::Numerical(_) | Error::Singular { .. } | Error::DegenerateSystem => {
                Failure::new(Kind::Numerical, message)
            }
            Error::Dimension(_)
            | Error::Domain(_)
            | Error::Invalid(_)
            | Error::PoleProximity { .. }
            | Error::UnsupportedType(_) => Failure::new(Kind::Usage, message),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;
