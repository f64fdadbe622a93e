use pathmorse::digraph::DigraphError;
use pathmorse::flow::FlowError;
use pathmorse::homology::HomologyError;
use pathmorse::morse::MorseError;
use serde::Serialize;

/// Exit status 1 for domain errors, 2 for I/O and parse errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub reason: String,
    pub detail: String,
    #[serde(skip)]
    pub domain: bool,
}

impl CliError {
    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        let reason = format!("cannot read {}: {e}", path.display());
        Self {
            kind: "io",
            detail: reason.clone(),
            reason,
            domain: false,
        }
    }

    fn parse(detail: String) -> Self {
        Self {
            kind: "parse",
            reason: detail.clone(),
            detail,
            domain: false,
        }
    }

    fn domain(kind: &'static str, reason: String, detail: String) -> Self {
        Self {
            kind,
            reason,
            detail,
            domain: true,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.domain {
            1
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            status: &'static str,
            exit_code: u8,
            #[serde(flatten)]
            error: &'a CliError,
        }
        serde_json::to_string(&Doc {
            status: "error",
            exit_code: self.exit_code(),
            error: self,
        })
        .expect("error documents serialize")
    }
}

impl From<DigraphError> for CliError {
    fn from(e: DigraphError) -> Self {
        Self::parse(e.to_string())
    }
}

impl From<MorseError> for CliError {
    fn from(e: MorseError) -> Self {
        let detail = e.to_string();
        match &e {
            MorseError::NotMorse(v) => Self::domain("not-morse", v.reason().to_string(), detail),
            MorseError::NotMorseOnClosure(v) => {
                Self::domain("not-morse-on-closure", v.reason().to_string(), detail)
            }
            MorseError::ConditionStar(w) => {
                Self::domain("condition-star", w.reason().to_string(), detail)
            }
            MorseError::VertexOnCycle(_) => Self::domain("vertex-on-cycle", detail.clone(), detail),
            MorseError::DomainMismatch { .. }
            | MorseError::NegativeValue(_)
            | MorseError::NonPositiveValue(_)
            | MorseError::MalformedValue { .. }
            | MorseError::MissingValue(_)
            | MorseError::UnknownVertex(_)
            | MorseError::DuplicateValue(_) => Self::parse(detail),
        }
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Morse(m) => m.into(),
            other => Self::domain("internal", other.to_string(), other.to_string()),
        }
    }
}

impl From<HomologyError> for CliError {
    fn from(e: HomologyError) -> Self {
        match e {
            HomologyError::Morse(m) => m.into(),
            HomologyError::Flow(f) => f.into(),
            HomologyError::AgreementViolation { .. } => {
                Self::domain("agreement-violation", e.to_string(), e.to_string())
            }
            other => Self::domain("internal", other.to_string(), other.to_string()),
        }
    }
}

impl From<pathmorse::linalg::LinalgError> for CliError {
    fn from(e: pathmorse::linalg::LinalgError) -> Self {
        Self::domain("internal", e.to_string(), e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self {
            kind: "io",
            reason: e.to_string(),
            detail: e.to_string(),
            domain: false,
        }
    }
}

pub fn usage(detail: impl Into<String>) -> CliError {
    CliError::parse(detail.into())
}
