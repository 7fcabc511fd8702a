//! Command failures mapped onto process exit codes: 1 for failed checks,
//! 2 for validation problems, 3 for numerical-quality rejections.

use gqp_core::Error;

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
    ChecksFailed { failed: usize, total: usize },
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::ChecksFailed { .. } => 1,
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => m.clone(),
            Failure::ChecksFailed { failed, total } => {
                format!("{failed} of {total} checks failed")
            }
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        if e.is_invalid_input() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

pub fn validation(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}
