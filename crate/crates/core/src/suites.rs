//! Seeded property suites over random bistochastic maps.
//!
//! Trial `i` of a run with master seed `m` uses seed `derive_seed(m, i)`, so
//! trials are independent and may run in any order or in parallel.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::eig::is_psd;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::positivity::{
    is_bistochastic, is_completely_positive, max_hs_gain, positivity_probe, ProbeBudget,
};
use crate::random::{derive_seed, gaussian_hermitian, random_unitary, seeded_rng, unit_vector};
use crate::stable::{
    classify_jordan_subalgebra, compute_stable_subspace, conditional_expectation, verify_stable_structure,
    JordanClass,
};
use crate::superop::SuperOperator;
use crate::witness::build_witness;
use crate::zoo::{random_bistochastic, random_kraus_map, rotate_subspace, subalgebra, two_block_map, zero_trace_residual};

/// Residual bound for the structural clauses checked by [`Suite::Structure`].
pub const STRUCTURE_TOL: f64 = 1e-8;
/// Subspace distance bound for [`Suite::Roundtrip`].
pub const ROUNDTRIP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Suite {
    /// Structural clauses of the stable subspace on random maps.
    Structure,
    /// HS contraction and adjoint bistochasticity on random maps.
    Contraction,
    /// CP test against PSD-ness of the witness on Kraus maps and their
    /// transposition composites.
    ChoiCp,
    /// Conditional expectation onto a rotated canonical subalgebra recovers
    /// the subalgebra as its stable subspace.
    Roundtrip,
    /// The zero-trace identity of the two-block map at random `η ∈ C²`.
    ZeroTrace,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Structure, Suite::Contraction, Suite::ChoiCp, Suite::Roundtrip, Suite::ZeroTrace];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::Contraction => "contraction",
            Suite::ChoiCp => "choi-cp",
            Suite::Roundtrip => "roundtrip",
            Suite::ZeroTrace => "zero-trace",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    /// Accepts [`Suite::name`] values; `prop1` is kept as an alias of
    /// `structure`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "prop1" {
            return Ok(Suite::Structure);
        }
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

/// A failing trial, with enough to reproduce it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Counterexample {
    pub trial: usize,
    pub seed: u64,
    pub detail: String,
    /// Action matrix of the map under test, when there is one.
    pub map_action: Option<ComplexMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub trials: usize,
    pub master_seed: u64,
    pub failures: Vec<Counterexample>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Collects per-trial results (in any order) into an outcome sorted by
    /// trial index.
    pub fn from_trials(
        suite: Suite,
        trials: usize,
        master_seed: u64,
        results: impl IntoIterator<Item = Option<Counterexample>>,
    ) -> Self {
        let mut failures: Vec<Counterexample> = results.into_iter().flatten().collect();
        failures.sort_by_key(|c| c.trial);
        Self { suite, trials, master_seed, failures }
    }
}

fn fail(trial: usize, seed: u64, detail: String, map: Option<&SuperOperator>) -> Option<Counterexample> {
    Some(Counterexample { trial, seed, detail, map_action: map.map(|s| s.action().clone()) })
}

/// Runs trial `trial` of `suite`; `None` means it passed.
pub fn run_trial(suite: Suite, trial: usize, master_seed: u64, tol: f64) -> Option<Counterexample> {
    let seed = derive_seed(master_seed, trial as u64);
    match suite {
        Suite::Structure => structure_trial(trial, seed, tol),
        Suite::Contraction => contraction_trial(trial, seed, tol),
        Suite::ChoiCp => choi_cp_trial(trial, seed, tol),
        Suite::Roundtrip => roundtrip_trial(trial, seed, tol),
        Suite::ZeroTrace => zero_trace_trial(trial, seed, tol),
    }
}

/// Runs `trials` trials sequentially.
pub fn run_suite(suite: Suite, trials: usize, master_seed: u64, tol: f64) -> SuiteOutcome {
    SuiteOutcome::from_trials(suite, trials, master_seed, (0..trials).map(|t| run_trial(suite, t, master_seed, tol)))
}

fn components_for(seed: u64) -> usize {
    1 + (seed % 4) as usize
}

fn structure_trial(trial: usize, seed: u64, tol: f64) -> Option<Counterexample> {
    let s = match random_bistochastic(3, components_for(seed), seed) {
        Ok(s) => s,
        Err(e) => return fail(trial, seed, format!("{e}"), None),
    };
    let k = match compute_stable_subspace(&s, tol) {
        Ok(k) => k,
        Err(e) => return fail(trial, seed, format!("{e}"), Some(&s)),
    };
    match verify_stable_structure(&s, &k, 8, seed, STRUCTURE_TOL) {
        Ok(report) if report.all_passed => None,
        Ok(report) => {
            let bad: Vec<String> = report
                .clauses
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{} ({:e})", c.clause, c.residual))
                .collect();
            fail(trial, seed, format!("clauses failed: {}", bad.join(", ")), Some(&s))
        }
        Err(e) => fail(trial, seed, format!("{e}"), Some(&s)),
    }
}

fn contraction_trial(trial: usize, seed: u64, tol: f64) -> Option<Counterexample> {
    let s = match random_bistochastic(3, components_for(seed), seed) {
        Ok(s) => s,
        Err(e) => return fail(trial, seed, format!("{e}"), None),
    };
    if !is_bistochastic(&s, tol) || !is_bistochastic(&s.adjoint(), tol) {
        return fail(trial, seed, "map or its adjoint is not bistochastic".into(), Some(&s));
    }
    let gain = max_hs_gain(&s, 64, seed);
    if gain > 1.0 + tol {
        return fail(trial, seed, format!("HS norm grows by a factor {gain}"), Some(&s));
    }
    let mut rng = seeded_rng(seed ^ 0xa5a5);
    for _ in 0..16 {
        let a = gaussian_hermitian(&mut rng, 3);
        let lhs = s.apply(&a).expect("3×3").hs_norm();
        if lhs > a.hs_norm() + tol {
            return fail(trial, seed, format!("Hermitian input grows: {lhs} > {}", a.hs_norm()), Some(&s));
        }
    }
    None
}

fn choi_cp_trial(trial: usize, seed: u64, tol: f64) -> Option<Counterexample> {
    let kraus = match random_kraus_map(3, components_for(seed), seed) {
        Ok(s) => s,
        Err(e) => return fail(trial, seed, format!("{e}"), None),
    };
    let (s, expect_cp) = if trial.is_multiple_of(2) {
        (kraus, Some(true))
    } else {
        (kraus.compose(&SuperOperator::transposition(3)).expect("same n"), None)
    };
    let cp = is_completely_positive(&s, tol);
    let witness_psd = match build_witness(&s, tol) {
        Ok(w) => is_psd(&w.matrix, tol),
        Err(e) => return fail(trial, seed, format!("{e}"), Some(&s)),
    };
    if cp != witness_psd {
        return fail(trial, seed, format!("CP test says {cp}, witness PSD test says {witness_psd}"), Some(&s));
    }
    if let Some(expected) = expect_cp {
        if cp != expected {
            return fail(trial, seed, "Kraus map not recognized as CP".into(), Some(&s));
        }
    }
    None
}

fn roundtrip_trial(trial: usize, seed: u64, tol: f64) -> Option<Counterexample> {
    let class = JordanClass::ALL[trial % JordanClass::ALL.len()];
    let u = random_unitary(&mut seeded_rng(seed), 3);
    let k = match subalgebra(class).and_then(|k| rotate_subspace(&k, &u)) {
        Ok(k) => k,
        Err(e) => return fail(trial, seed, format!("{e}"), None),
    };
    let e = match conditional_expectation(&k, tol) {
        Ok(e) => e,
        Err(err) => return fail(trial, seed, format!("{err}"), None),
    };
    if !is_bistochastic(&e, tol) {
        return fail(trial, seed, "conditional expectation is not bistochastic".into(), Some(&e));
    }
    let verdict = positivity_probe(&e, &ProbeBudget::quick(), seed, tol);
    if verdict.violation_found() {
        return fail(trial, seed, format!("positivity violated ({})", verdict.min_value), Some(&e));
    }
    let stable = match compute_stable_subspace(&e, tol) {
        Ok(s) => s,
        Err(err) => return fail(trial, seed, format!("{err}"), Some(&e)),
    };
    let distance = stable.distance(&k).unwrap_or(f64::INFINITY);
    if distance > ROUNDTRIP_TOL {
        return fail(trial, seed, format!("{class}: stable subspace at distance {distance:e}"), Some(&e));
    }
    match classify_jordan_subalgebra(&stable, 1e-8) {
        Ok(c) if c == class => None,
        Ok(c) => fail(trial, seed, format!("expected class {class}, classified as {c}"), Some(&e)),
        Err(err) => fail(trial, seed, format!("{err}"), Some(&e)),
    }
}

fn zero_trace_trial(trial: usize, seed: u64, tol: f64) -> Option<Counterexample> {
    let v = unit_vector(&mut seeded_rng(seed), 2);
    let eta: [C64; 2] = [v[0], v[1]];
    match zero_trace_residual(&two_block_map(), eta) {
        Ok(r) if r <= tol => None,
        Ok(r) => fail(trial, seed, format!("residual {r:e} at eta = ({}, {})", eta[0], eta[1]), None),
        Err(e) => fail(trial, seed, format!("{e}"), None),
    }
}
