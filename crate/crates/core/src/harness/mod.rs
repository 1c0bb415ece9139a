//! Scenario runner: named checks that evaluate library operations and
//! compare them with closed-form expectations.

mod report;
mod scenarios;

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use report::{
    export_report, format_number, parse_report, render_csv, render_json, render_suite_json, ReportFormat, CSV_HEADER,
};

/// Registered scenario names, in suite order.
pub const SCENARIOS: [&str; 9] = [
    "claimC",
    "claimA",
    "schreier_isometry",
    "c0_blocks",
    "kp_spread",
    "centralizer_axioms",
    "couple_consistency",
    "ackermann",
    "growth_pipeline",
];

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "TWISTLAB_THREADS";

/// Relative tolerance of cells checking exact identities.
pub const EXACT_TOL: f64 = 1e-9;
/// Relative tolerance of cells backed by an iterative optimizer.
pub const OPTIMIZER_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    /// `|computed − expected| ≤ tolerance·max(1, |expected|)`.
    Eq,
    /// `computed ≤ expected + tolerance·max(1, |expected|)`.
    Le,
    /// `computed ≥ expected − tolerance·max(1, |expected|)`.
    Ge,
}

impl CellKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Eq => "eq",
            CellKind::Le => "le",
            CellKind::Ge => "ge",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "eq" => Ok(CellKind::Eq),
            "le" => Ok(CellKind::Le),
            "ge" => Ok(CellKind::Ge),
            other => Err(Error::Parse(format!("unknown cell kind '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub name: String,
    pub inputs: String,
    pub computed: f64,
    pub expected: f64,
    pub kind: CellKind,
    pub tolerance: f64,
    pub pass: bool,
    /// Error text when the cell could not be evaluated.
    pub diagnostic: Option<String>,
}

impl Cell {
    pub fn new(name: impl Into<String>, inputs: impl Into<String>, computed: f64, expected: f64, kind: CellKind, tolerance: f64) -> Self {
        let slack = tolerance * expected.abs().max(1.0);
        let pass = match kind {
            CellKind::Eq => (computed - expected).abs() <= slack || computed == expected,
            CellKind::Le => computed <= expected + slack,
            CellKind::Ge => computed >= expected - slack,
        };
        Self {
            name: name.into(),
            inputs: inputs.into(),
            computed,
            expected,
            kind,
            tolerance,
            pass,
            diagnostic: None,
        }
    }

    pub fn eq(name: impl Into<String>, inputs: impl Into<String>, computed: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(name, inputs, computed, expected, CellKind::Eq, tolerance)
    }

    pub fn le(name: impl Into<String>, inputs: impl Into<String>, computed: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(name, inputs, computed, expected, CellKind::Le, tolerance)
    }

    pub fn ge(name: impl Into<String>, inputs: impl Into<String>, computed: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(name, inputs, computed, expected, CellKind::Ge, tolerance)
    }

    /// A boolean check reported as `1` against an expected `1`.
    pub fn check(name: impl Into<String>, inputs: impl Into<String>, ok: bool) -> Self {
        Self::eq(name, inputs, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    fn failed(name: String, inputs: String, err: &Error) -> Self {
        Self {
            name,
            inputs,
            computed: f64::NAN,
            expected: f64::NAN,
            kind: CellKind::Eq,
            tolerance: 0.0,
            pass: false,
            diagnostic: Some(err.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioResult {
    pub name: String,
    pub seed: u64,
    pub cells: Vec<Cell>,
    /// Wall-clock time; not part of the JSON report.
    pub runtime_ms: u64,
}

impl ScenarioResult {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }
}

/// Scenario parameters. Unset fields take each scenario's defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub n: Option<Vec<u64>>,
    pub limit: Option<u64>,
    pub seed: u64,
    /// Constant of the twisted-distance chain.
    pub eta: f64,
    /// Self-duality constant of the twisted sum.
    pub lambda: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self { n: None, limit: None, seed: 0, eta: 1.0, lambda: 1.0 }
    }
}

impl Params {
    fn n_or(&self, default: &[u64]) -> Vec<u64> {
        self.n.clone().unwrap_or_else(|| default.to_vec())
    }

    fn limit_or(&self, default: u64) -> u64 {
        self.limit.unwrap_or(default)
    }
}

/// A unit of work producing cells. `run` receives a seed derived from the
/// master seed and the job position.
pub(crate) struct Job {
    name: String,
    inputs: String,
    run: Box<dyn Fn(u64) -> Result<Vec<Cell>> + Send + Sync>,
}

impl Job {
    pub(crate) fn new<F>(name: impl Into<String>, inputs: impl Into<String>, run: F) -> Self
    where
        F: Fn(u64) -> Result<Vec<Cell>> + Send + Sync + 'static,
    {
        Self { name: name.into(), inputs: inputs.into(), run: Box::new(run) }
    }
}

/// SplitMix64 finalizer over `(seed, index)`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Worker pool sized by `TWISTLAB_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// Runs one registered scenario.
pub fn run_scenario(name: &str, params: &Params) -> Result<ScenarioResult> {
    let jobs = scenarios::jobs(name, params)?;
    let start = Instant::now();
    let seed = params.seed;
    let cells: Vec<Vec<Cell>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| {
            (job.run)(sub_seed(seed, i as u64)).unwrap_or_else(|e| vec![Cell::failed(job.name.clone(), job.inputs.clone(), &e)])
        })
        .collect();
    Ok(ScenarioResult {
        name: name.to_string(),
        seed,
        cells: cells.into_iter().flatten().collect(),
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

/// Runs every registered scenario with `params`.
pub fn run_suite(params: &Params) -> Result<Vec<ScenarioResult>> {
    SCENARIOS.iter().map(|name| run_scenario(name, params)).collect()
}
