//! Job description read from JSON.
//!
//! Complex numbers are two-element arrays `[re, im]`, the Fock exponent is
//! a number or the string `"inf"`, and every object rejects unknown keys.

use std::fmt;

use fock_wco::{AffineSymbol, Cx, FockParams, Tolerance, Weight, WeightedComposition};
use serde::{Deserialize, Serialize};

pub type Pair = [f64; 2];

fn cx(p: Pair) -> Cx {
    Cx::new(p[0], p[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    /// u(z) = u0·exp(conj(w)·z).
    Kernel {
        u0: Pair,
        #[serde(default)]
        w: Pair,
    },
    /// u(z) = exp(a0 + a1·z + a2·z²).
    ExpQuad {
        #[serde(default)]
        a0: Pair,
        #[serde(default)]
        a1: Pair,
        #[serde(default)]
        a2: Pair,
    },
    /// Polynomial with the given Taylor coefficients at 0.
    Taylor { coeffs: Vec<Pair> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub a: Pair,
    pub b: Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum InfTag {
    #[serde(rename = "inf")]
    Inf,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PSpec {
    Finite(f64),
    Infinite(InfTag),
}

impl Default for PSpec {
    fn default() -> Self {
        PSpec::Finite(2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Classify,
    Spectrum,
    Ergodic,
    Verify,
    Matrix,
}

impl Task {
    pub const ALL: [Task; 5] = [Task::Classify, Task::Spectrum, Task::Ergodic, Task::Verify, Task::Matrix];

    pub fn name(&self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Spectrum => "spectrum",
            Task::Ergodic => "ergodic",
            Task::Verify => "verify",
            Task::Matrix => "matrix",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// Truncation dimension for norms, spectra and matrix export.
    #[serde(rename = "N")]
    pub dim: usize,
    /// Truncation dimension for Cesàro runs.
    pub cesaro_dim: usize,
    /// Number of Cesàro terms.
    pub cesaro_n: usize,
    /// Largest iterate index for norms and iterate checks.
    pub nmax: usize,
    /// Classification tolerance.
    pub tol: f64,
    /// Use exact comparisons in classification instead of `tol`.
    pub exact: bool,
    /// Seed for the random probes of `verify`.
    pub seed: u64,
    /// Largest order tried when testing for roots of unity.
    pub max_order: usize,
    /// Include wall-clock timings in the report (breaks byte identity).
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            dim: 64,
            cesaro_dim: 48,
            cesaro_n: 400,
            nmax: 5,
            tol: fock_wco::base::DEFAULT_TOL,
            exact: false,
            seed: 0,
            max_order: fock_wco::classify::DEFAULT_MAX_ORDER,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub weight: WeightSpec,
    pub symbol: SymbolSpec,
    #[serde(default)]
    pub p: PSpec,
    #[serde(default)]
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub options: Options,
}

/// A config that cannot be run; maps to exit code 2.
#[derive(Clone, Debug, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

impl JobConfig {
    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self, UsageError> {
        let cfg = Self::parse(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses without the semantic checks of [`JobConfig::validate`], so
    /// that overrides can still be applied.
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        serde_json::from_str(text).map_err(|e| usage(format!("invalid config: {e}")))
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self, UsageError> {
        let cfg: JobConfig = serde_json::from_value(v).map_err(|e| usage(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        if self.tasks.is_empty() {
            return Err(usage("task list is empty"));
        }
        let o = &self.options;
        if o.dim == 0 || o.dim > fock_wco::fockmat::MAX_BUILD_DIM {
            return Err(usage(format!("N must be in 1..={}", fock_wco::fockmat::MAX_BUILD_DIM)));
        }
        if o.cesaro_dim == 0 || o.cesaro_dim > fock_wco::fockmat::MAX_BUILD_DIM {
            return Err(usage(format!("cesaro_dim must be in 1..={}", fock_wco::fockmat::MAX_BUILD_DIM)));
        }
        if o.nmax == 0 || o.cesaro_n == 0 || o.max_order == 0 {
            return Err(usage("nmax, cesaro_n and max_order must be positive"));
        }
        if !(o.tol.is_finite() && o.tol >= 0.0) {
            return Err(usage("tol must be a finite nonnegative number"));
        }
        self.params()?;
        self.operator()?;
        Ok(())
    }

    pub fn params(&self) -> Result<FockParams, UsageError> {
        match self.p {
            PSpec::Finite(p) => FockParams::finite(p).map_err(|e| usage(e.to_string())),
            PSpec::Infinite(_) => Ok(FockParams::Infinite),
        }
    }

    pub fn tolerance(&self) -> Tolerance {
        if self.options.exact {
            Tolerance::EXACT
        } else {
            Tolerance::new(self.options.tol)
        }
    }

    pub fn operator(&self) -> Result<WeightedComposition, UsageError> {
        let weight = match &self.weight {
            WeightSpec::Kernel { u0, w } => Weight::kernel(cx(*u0), cx(*w)),
            WeightSpec::ExpQuad { a0, a1, a2 } => Weight::exp_quad(cx(*a0), cx(*a1), cx(*a2)),
            WeightSpec::Taylor { coeffs } => {
                if coeffs.is_empty() {
                    return Err(usage("taylor weight needs at least one coefficient"));
                }
                Weight::taylor(coeffs.iter().copied().map(cx).collect())
            }
        }
        .map_err(|e| usage(e.to_string()))?;
        let symbol = AffineSymbol::new(cx(self.symbol.a), cx(self.symbol.b)).map_err(|e| usage(e.to_string()))?;
        Ok(WeightedComposition::new(weight, symbol))
    }

    pub fn has(&self, t: Task) -> bool {
        self.tasks.contains(&t)
    }
}

/// Command-line overrides applied on top of a parsed config.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub nmax: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub timing: bool,
    pub tasks: Option<Vec<Task>>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut JobConfig) {
        let o = &mut cfg.options;
        if let Some(d) = self.dim {
            o.dim = d;
        }
        if let Some(n) = self.nmax {
            o.nmax = n;
        }
        if let Some(t) = self.tol {
            o.tol = t;
        }
        if let Some(s) = self.seed {
            o.seed = s;
        }
        o.timing |= self.timing;
        if let Some(t) = &self.tasks {
            cfg.tasks = t.clone();
        }
    }
}
