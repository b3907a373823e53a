use thiserror::Error;

/// Errors produced by grid construction, the solver and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unknown tableau `{0}`")]
    UnknownTableau(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid tableau: {0}")]
    Tableau(String),

    #[error("stage {stage} did not converge after {iterations} iterations (last increment {increment:.3e})")]
    StageSolver {
        stage: usize,
        iterations: usize,
        increment: f64,
    },

    #[error("stage {stage} diverged at iteration {iteration} (non-finite iterate)")]
    Divergence { stage: usize, iteration: usize },

    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid data: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical solver, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::StageSolver { .. } | Error::Divergence { .. } => true,
            Error::Step { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
