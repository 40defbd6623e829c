use serde::Serialize;

/// Failure categories, each with its own exit code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    /// Bad input: config, arguments or model invariants.
    Validation,
    /// A numerical procedure failed on valid input.
    Numerical,
    /// Reading or writing files.
    Io,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { category: Category::Validation, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { category: Category::Numerical, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { category: Category::Io, message: message.into() }
    }

    /// 1 for validation and IO, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self.category {
            Category::Numerical => 2,
            Category::Validation | Category::Io => 1,
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "error": self.category, "message": self.message }).to_string()
    }
}

impl From<sinr_core::Error> for CliError {
    fn from(e: sinr_core::Error) -> Self {
        if e.is_numerical() {
            Self::numerical(e.to_string())
        } else {
            Self::validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::io(e.to_string())
    }
}
