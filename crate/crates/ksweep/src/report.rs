//! Report types emitted by the commands. JSON is the primary form; text is
//! rendered from the JSON value.

use ksweep_core::positivity::{PositivityVerdict, ProbeBudget};
use ksweep_core::stable::{ClassificationEvidence, DecompositionReport, JordanClass};
use ksweep_core::suites::{Counterexample, Suite, SuiteOutcome};
use ksweep_core::ComplexVector;
use serde::{Deserialize, Serialize};

use crate::formats::BipartiteFile;
use crate::text;

pub trait Report: Serialize {
    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports hold finite values");
        s.push('\n');
        s
    }

    fn to_text(&self) -> String {
        text::render(&serde_json::to_value(self).expect("reports hold finite values"))
    }

    /// Reason the report counts as a failed check, if it does.
    fn failure(&self) -> Option<String> {
        None
    }
}

/// Options shared by every command.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: f64,
    pub seed: u64,
    pub budget: ProbeBudget,
}

impl Default for Settings {
    fn default() -> Self {
        Self { tol: ksweep_core::DEFAULT_TOL, seed: 42, budget: ProbeBudget::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsDefect {
    /// `"S"` or `"S∘t"`.
    pub map: String,
    pub probe: String,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub min_eigenvalue: f64,
    pub negative_eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub map: String,
    pub n: usize,
    pub settings: Settings,
    pub bistochastic: bool,
    pub positivity: PositivityVerdict,
    pub completely_positive: bool,
    pub completely_copositive: bool,
    pub ks_defects: Vec<KsDefect>,
    pub stable_dimension: Option<usize>,
    pub jordan_class: Option<JordanClass>,
    pub decomposition: Option<DecompositionReport>,
    pub evidence: Option<ClassificationEvidence>,
    pub witness: WitnessSummary,
    pub notes: Vec<String>,
}

impl Report for AnalysisReport {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub state: String,
    pub value: f64,
    pub ppt: bool,
    pub detected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub lambda: f64,
    pub rho0: String,
    pub state: BipartiteFile,
    pub witness_value: f64,
    pub ppt: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub map: String,
    pub tol: f64,
    pub witness: BipartiteFile,
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub negative_eigenvalues: Vec<f64>,
    pub negative_eigenvectors: Vec<ComplexVector>,
    pub evaluation: Option<Evaluation>,
    pub certificate: Option<Certificate>,
}

impl Report for WitnessReport {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub settings: Settings,
    pub state: String,
    pub items: Vec<DemoItem>,
    pub passed: bool,
}

impl Report for DemoReport {
    fn to_text(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            let mark = if item.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{mark}  {}: {}\n", item.name, item.detail));
        }
        let passed = self.items.iter().filter(|i| i.passed).count();
        out.push_str(&format!("{passed}/{} checks passed\n", self.items.len()));
        out
    }

    fn failure(&self) -> Option<String> {
        self.items.iter().find(|i| !i.passed).map(|i| format!("check '{}' failed: {}", i.name, i.detail))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub trials: usize,
    pub master_seed: u64,
    pub tol: f64,
    pub passed: bool,
    pub failures: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn new(outcome: SuiteOutcome, tol: f64) -> Self {
        Self {
            suite: outcome.suite,
            trials: outcome.trials,
            master_seed: outcome.master_seed,
            tol,
            passed: outcome.passed(),
            failures: outcome.failures,
        }
    }
}

impl Report for VerifyReport {
    fn failure(&self) -> Option<String> {
        self.failures.first().map(|c| {
            format!(
                "{} of {} trials of '{}' failed; first at trial {} (seed {}): {}",
                self.failures.len(),
                self.trials,
                self.suite,
                c.trial,
                c.seed,
                c.detail
            )
        })
    }
}
