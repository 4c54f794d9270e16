//! Reading formulas and traces, writing records, and mapping failures to
//! exit codes.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Args;
use ctmtl::formula::parse_formula;
use ctmtl::{TimedWord, F};
use serde_json::Value;

/// Exit statuses.
pub const OK: u8 = 0;
pub const VIOLATION: u8 = 1;
pub const USAGE: u8 = 2;
/// The solver ran out of budget before reaching a verdict.
pub const RESOURCE: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: &'static str,
    pub message: String,
    pub status: u8,
}

impl Failure {
    pub fn usage(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            status: USAGE,
        }
    }

    pub fn violation(message: impl Into<String>) -> Self {
        Self {
            code: "property.violation",
            message: message.into(),
            status: VIOLATION,
        }
    }

    pub fn report(&self) -> ExitCode {
        eprintln!("error[{}]: {}", self.code, self.message);
        ExitCode::from(self.status)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

/// Module errors carry a qualified code; all of them are input problems.
macro_rules! input_error {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::usage(e.code(), e.to_string())
            }
        }
    )*};
}

input_error!(
    ctmtl::formula::ParseError,
    ctmtl::word::WordError,
    ctmtl::transform::TransformError,
    ctmtl::witness::WitnessError
);

impl From<ctmtl::game::GameError> for Failure {
    fn from(e: ctmtl::game::GameError) -> Self {
        let status = match e {
            ctmtl::game::GameError::BudgetExceeded { .. } => RESOURCE,
            _ => USAGE,
        };
        Failure {
            code: e.code(),
            message: e.to_string(),
            status,
        }
    }
}

pub type Result<T> = std::result::Result<T, Failure>;

fn read_source(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage("io.read", format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::usage("io.read", format!("{}: {e}", path.display())))
}

#[derive(Debug, Args)]
pub struct FormulaArg {
    /// File holding the formula (`-` for stdin)
    #[arg(long, short = 'f', value_name = "PATH", conflicts_with = "expr")]
    pub formula: Option<PathBuf>,
    /// The formula itself
    #[arg(long = "expr", short = 'e', value_name = "FORMULA")]
    pub expr: Option<String>,
}

impl FormulaArg {
    pub fn given(&self) -> bool {
        self.formula.is_some() || self.expr.is_some()
    }

    pub fn load(&self) -> Result<F> {
        let text = match (&self.formula, &self.expr) {
            (Some(p), _) => read_source(p)?,
            (None, Some(e)) => e.clone(),
            (None, None) => return Err(Failure::usage("cli.usage", "a formula is required (--formula PATH or -e FORMULA)")),
        };
        Ok(parse_formula(text.trim())?)
    }
}

pub fn load_trace(path: &Path) -> Result<TimedWord> {
    TimedWord::parse_trace(&read_source(path)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

/// Human text or one JSON record per line.
#[derive(Debug, Clone, Copy)]
pub struct Out {
    pub json: bool,
}

impl Out {
    pub fn emit(&self, human: impl FnOnce() -> String, record: impl FnOnce() -> Value) {
        let mut stdout = io::stdout().lock();
        let text = if self.json {
            record().to_string()
        } else {
            human()
        };
        // A closed pipe is not worth a panic.
        let _ = writeln!(stdout, "{}", text.trim_end_matches('\n'));
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Failure::usage("io.write", format!("{}: {e}", path.display())))
}
