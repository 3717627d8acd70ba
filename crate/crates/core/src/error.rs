use thiserror::Error;

/// Errors raised by the measure, generator, inequality and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("argument {value} is outside the domain of generator {generator}")]
    Domain { generator: String, value: f64 },

    #[error("value {value} is outside the range of generator {generator}")]
    Range { generator: String, value: f64 },

    #[error("product space of {x_atoms} x {y_atoms} atoms overflows")]
    Size { x_atoms: usize, y_atoms: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
