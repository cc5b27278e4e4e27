use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown basis element `{name}`")]
    UnknownBasis { line: usize, name: String },

    #[error("line {line}: antisymmetry conflict for [{x},{y}]")]
    AntisymmetryConflict { line: usize, x: String, y: String },

    #[error("line {line}: duplicate bracket declaration [{x},{y}]")]
    DuplicateBracket { line: usize, x: String, y: String },

    #[error("expression: {0}")]
    Eval(String),

    #[error("matrix exponential overflow (norm {0:e})")]
    Overflow(f64),

    #[error("division by vanishing component {0}")]
    VanishingComponent(String),

    #[error("jet order {have} is below polynomial degree {need}")]
    JetOrder { have: usize, need: usize },

    #[error("representation table has no entry for `{0}`")]
    MissingRepEntry(String),

    #[error("grid: {0}")]
    Grid(String),

    #[error("aliasing guard: {0}")]
    Aliasing(String),

    #[error("symbol `{0}` is singular and has no separable kernel data")]
    SingularSymbol(String),

    #[error("model: {0}")]
    Model(String),

    #[error("no witness branch covers the target: {0}")]
    NoBranch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub fn eval(message: impl Into<String>) -> Self {
        Error::Eval(message.into())
    }

    /// File and parse problems, as opposed to failed checks.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::UnknownBasis { .. }
                | Error::AntisymmetryConflict { .. }
                | Error::DuplicateBracket { .. }
                | Error::Io(_)
                | Error::Json(_)
                | Error::Model(_)
        )
    }
}
