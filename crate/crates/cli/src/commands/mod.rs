pub mod align;
pub mod evaluate;
pub mod perturb;

use otalign::Error;

/// Pipeline stage names used in error reporting.
#[derive(Debug, Clone, Copy)]
pub enum Stage {
    Config,
    LoadData,
    Train,
    WriteOutputs,
    Evaluate,
    Perturb,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::LoadData => "load-data",
            Stage::Train => "train",
            Stage::WriteOutputs => "write-outputs",
            Stage::Evaluate => "evaluate",
            Stage::Perturb => "perturb",
        };
        f.write_str(s)
    }
}

/// An error tagged with the stage it came from.
#[derive(Debug)]
pub struct StagedError {
    pub stage: Stage,
    pub error: Error,
}

impl StagedError {
    pub fn exit_code(&self) -> i32 {
        match self.error {
            Error::Config(_) => 2,
            Error::Parse { .. }
            | Error::Range(_)
            | Error::Shape(_)
            | Error::Checkpoint(_)
            | Error::Io(_) => 3,
            Error::Numeric(_) | Error::NonConvergence { .. } => 4,
        }
    }
}

impl std::fmt::Display for StagedError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error [stage={}]: {}", self.stage, self.error)
    }
}

pub trait StageExt<T> {
    fn at(self, stage: Stage) -> Result<T, StagedError>;
}

impl<T> StageExt<T> for Result<T, Error> {
    fn at(self, stage: Stage) -> Result<T, StagedError> {
        self.map_err(|error| StagedError { stage, error })
    }
}
