use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use supercrit::{Precision, ProblemSpec, Tolerances, Variant};

use crate::output::num;

pub const PRECISION_ENV: &str = "SUPERCRIT_PRECISION";

/// Everything that determines the output of one invocation.
///
/// Serialized into the leading comment line of every CSV file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: u32,
    #[serde(serialize_with = "num")]
    pub p: f64,
    #[serde(serialize_with = "num")]
    pub q: f64,
    pub variant: Variant,
    pub precision_bits: u32,
    #[serde(serialize_with = "num")]
    pub rel_tol: f64,
    #[serde(serialize_with = "num")]
    pub abs_tol: f64,
    #[serde(serialize_with = "num")]
    pub root_tol: f64,
    #[serde(serialize_with = "num")]
    pub r_classify: f64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub meta: Option<PathBuf>,
    /// Subcommand-specific settings, already formatted.
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn validate(&self) -> supercrit::Result<()> {
        self.spec()?;
        Tolerances::new(self.rel_tol, self.abs_tol, self.root_tol)?;
        Precision::from_bits(self.precision_bits)?;
        if self.workers == 0 {
            return Err(supercrit::Error::InvalidArgument("worker budget must be at least 1".into()));
        }
        Ok(())
    }

    pub fn spec(&self) -> supercrit::Result<ProblemSpec> {
        ProblemSpec::new(self.n, self.p, self.q, self.variant)
    }

    pub fn precision(&self) -> Precision {
        Precision::from_bits(self.precision_bits).unwrap_or(Precision::Double)
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances { rel_tol: self.rel_tol, abs_tol: self.abs_tol, root_tol: self.root_tol }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }
}

/// Default precision in bits from the environment, read once at startup.
pub fn precision_from_env() -> supercrit::Result<Option<u32>> {
    match std::env::var(PRECISION_ENV) {
        Err(_) => Ok(None),
        Ok(s) => {
            let s = s.trim().to_ascii_lowercase();
            let bits = match s.as_str() {
                "double" => 64,
                other => other.parse::<u32>().map_err(|_| {
                    supercrit::Error::InvalidArgument(format!("{PRECISION_ENV} must be a bit count, got `{other}`"))
                })?,
            };
            Precision::from_bits(bits)?;
            Ok(Some(bits))
        }
    }
}
