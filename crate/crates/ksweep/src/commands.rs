use std::f64::consts::FRAC_1_SQRT_2;
use std::thread;

use ksweep_core::positivity::{
    is_bistochastic, is_completely_copositive, is_completely_positive, kadison_schwarz_defect,
    positivity_probe, random_unit_vectors, ProbeBudget,
};
use ksweep_core::stable::{
    classification_evidence, compute_stable_subspace, conditional_expectation, decompose,
    HSSubspace, JordanClass,
};
use ksweep_core::suites::{run_trial, Suite, SuiteOutcome};
use ksweep_core::witness::{
    build_witness, construct_detected_state, evaluate, is_ppt, negative_eigenspace, DensityMatrix,
};
use ksweep_core::zoo::{choi_map, two_block_map, zero_trace_residual};
use ksweep_core::{
    is_psd, partial_transpose, ComplexMatrix, Error, SuperOperator, C64,
};

use crate::error::{CliError, CliResult};
use crate::formats::{load_map, load_state, BipartiteFile};
use crate::report::{
    AnalysisReport, Certificate, DemoItem, DemoReport, Evaluation, KsDefect, Settings,
    VerifyReport, WitnessReport, WitnessSummary,
};

/// Parses `quick`, `default` or `<grid>,<restarts>,<steps>`.
pub fn parse_budget(s: &str) -> Result<ProbeBudget, String> {
    match s {
        "quick" => Ok(ProbeBudget::quick()),
        "default" => Ok(ProbeBudget::default()),
        _ => {
            let parts: Vec<&str> = s.split(',').collect();
            let nums: Vec<usize> = parts
                .iter()
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| format!("invalid budget '{s}'"))?;
            match nums.as_slice() {
                &[grid_points, restarts, descent_steps] => Ok(ProbeBudget { grid_points, restarts, descent_steps }),
                _ => Err(format!("budget must be quick, default or <grid>,<restarts>,<steps>; got '{s}'")),
            }
        }
    }
}

fn p12() -> ComplexMatrix {
    ComplexMatrix::diag_real(&[1.0, 1.0, 0.0])
}

fn ks_probes(s: &SuperOperator) -> CliResult<Vec<KsDefect>> {
    let b1 = &p12() + &ComplexMatrix::unit(3, 2, 1);
    let b2 = &p12() + &ComplexMatrix::unit(3, 2, 0);
    let st = s.compose(&SuperOperator::transposition(3)).map_err(CliError::numerical)?;
    Ok(vec![
        KsDefect {
            map: "S".into(),
            probe: "P12+E32".into(),
            defect: kadison_schwarz_defect(s, &b1).map_err(CliError::numerical)?,
        },
        KsDefect {
            map: "S∘t".into(),
            probe: "P12+E31".into(),
            defect: kadison_schwarz_defect(&st, &b2).map_err(CliError::numerical)?,
        },
    ])
}

pub fn analyze(source: &str, settings: &Settings) -> CliResult<AnalysisReport> {
    let tol = settings.tol;
    let s = load_map(source, tol)?;
    let n = s.n();
    let mut notes = Vec::new();

    let bistochastic = is_bistochastic(&s, tol);
    let positivity = positivity_probe(&s, &settings.budget, settings.seed, tol);
    let ks_defects = if n == 3 { ks_probes(&s)? } else { Vec::new() };

    let (decomposition, evidence) = if bistochastic {
        let d = decompose(&s, tol).map_err(CliError::numerical)?;
        if d.cap_hit {
            notes.push("stable subspace search reached its iteration cap".into());
        }
        let ev = if n == 3 { Some(classification_evidence(&s, tol).map_err(CliError::numerical)?) } else { None };
        (Some(d), ev)
    } else {
        notes.push("map is not bistochastic: stable subspace not computed".into());
        (None, None)
    };

    let w = build_witness(&s, tol).map_err(CliError::input)?;
    let (negative_eigenvalues, _) = negative_eigenspace(&w, tol);

    Ok(AnalysisReport {
        map: source.to_string(),
        n,
        settings: *settings,
        bistochastic,
        positivity,
        completely_positive: is_completely_positive(&s, tol),
        completely_copositive: is_completely_copositive(&s, tol),
        ks_defects,
        stable_dimension: decomposition.as_ref().map(|d| d.stable.dim()),
        jordan_class: decomposition.as_ref().map(|d| d.jordan_class),
        decomposition,
        evidence,
        witness: WitnessSummary { min_eigenvalue: w.min_eigenvalue(), negative_eigenvalues },
        notes,
    })
}

/// Options of the `witness` command.
#[derive(Clone, Debug)]
pub struct WitnessOptions {
    pub state: Option<String>,
    pub construct: bool,
    pub lambda: f64,
    pub rho0: String,
}

pub fn witness(source: &str, opts: &WitnessOptions, tol: f64) -> CliResult<WitnessReport> {
    let s = load_map(source, tol)?;
    let n = s.n();
    let d = n * n;
    let w = build_witness(&s, tol).map_err(CliError::input)?;
    let (negative_eigenvalues, negative_eigenvectors) = negative_eigenspace(&w, tol);

    let evaluation = match &opts.state {
        Some(name) => {
            let (rho, dims) = load_state(name, d, tol)?;
            if rho.dim() != d || dims != (n, n) {
                return Err(CliError::Input(format!(
                    "state '{name}' is {0}x{0} with dims {dims:?}, witness needs {n}x{n}",
                    rho.dim()
                )));
            }
            let value = evaluate(&w, &rho, tol).map_err(CliError::numerical)?;
            let ppt = is_ppt(&rho, dims, tol).map_err(CliError::numerical)?;
            Some(Evaluation { state: name.clone(), value, ppt, detected: value < 0.0 })
        }
        None => None,
    };

    let certificate = if opts.construct {
        let (rho0, _) = load_state(&opts.rho0, d, tol)?;
        let cert = construct_detected_state(&w, &rho0, opts.lambda, tol).map_err(|e| match e {
            Error::NoNegativeEigenvalue { .. } | Error::DetectionFailed { .. } => CliError::Assertion(e.to_string()),
            other => CliError::input(other),
        })?;
        cert.verify(&w, tol).map_err(CliError::numerical)?;
        Some(Certificate {
            lambda: opts.lambda,
            rho0: opts.rho0.clone(),
            state: BipartiteFile::new(cert.state.matrix().clone(), (n, n)),
            witness_value: cert.witness_value,
            ppt: cert.ppt,
        })
    } else {
        None
    };

    Ok(WitnessReport {
        map: source.to_string(),
        tol,
        psd: w.is_psd(tol),
        min_eigenvalue: w.min_eigenvalue(),
        witness: BipartiteFile::new(w.matrix, (n, n)),
        negative_eigenvalues,
        negative_eigenvectors,
        evaluation,
        certificate,
    })
}

struct Checks {
    items: Vec<DemoItem>,
}

impl Checks {
    fn record(&mut self, name: &str, result: CliResult<(bool, String)>) {
        let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.items.push(DemoItem { name: name.into(), passed, detail });
    }
}

fn witness_matrix_expected() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(9, 9);
    for (i, x) in [(0, 0.5), (1, 0.5), (3, 0.5), (4, 0.5), (8, 1.0)] {
        m[(i, i)] = C64::new(x, 0.0);
    }
    for (i, j) in [(0, 8), (8, 0), (5, 7), (7, 5)] {
        m[(i, j)] = C64::new(FRAC_1_SQRT_2, 0.0);
    }
    m
}

/// Reproduces the reference values for the two-block map, its witness and
/// the PPT entangled state. `state` replaces the built-in state file.
pub fn demo(settings: &Settings, state: Option<&str>) -> CliResult<DemoReport> {
    let tol = settings.tol;
    let s = two_block_map();
    let w = build_witness(&s, tol).map_err(CliError::numerical)?;
    let rho = match state {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?;
            let file: BipartiteFile =
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
            if file.dims()? != (3, 3) {
                return Err(CliError::Input(format!("{path}: expected a 3x3 bipartite state")));
            }
            file.matrix
        }
        None => ksweep_core::witness::ppt_entangled_state().matrix().clone(),
    };
    let mut c = Checks { items: Vec::new() };

    c.record("witness-matrix", {
        let dev = (&w.matrix - &witness_matrix_expected()).max_abs();
        Ok((dev <= 1e-12, format!("max entrywise deviation {dev:.1e}")))
    });

    c.record("witness-min-eigenvalue", {
        let (values, vectors) = negative_eigenspace(&w, tol);
        match (values.first(), vectors.first()) {
            (Some(&lam), Some(v)) => {
                let off_support: f64 =
                    (0..9).filter(|i| *i != 5 && *i != 7).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
                Ok((
                    (lam + FRAC_1_SQRT_2).abs() <= 1e-10 && values.len() == 1 && off_support <= 1e-10,
                    format!("{lam:.12} (expected -1/sqrt 2), eigenvector weight off indices 6, 8: {off_support:.1e}"),
                ))
            }
            _ => Ok((false, "no negative eigenvalue".into())),
        }
    });

    c.record("ppt-state", {
        let trace = rho.trace();
        let psd = rho.is_hermitian(1e-12) && is_psd(&rho, tol);
        let ppt = partial_transpose(&rho, (3, 3)).map(|pt| is_psd(&pt, tol)).map_err(CliError::numerical)?;
        let trace_ok = (trace - C64::new(1.0, 0.0)).norm() <= 1e-12;
        Ok((psd && ppt && trace_ok, format!("PSD {psd}, trace {:.12}, PPT {ppt}", trace.re)))
    });

    c.record("witness-value", {
        let value = (&w.matrix * &rho).trace().re;
        let expected = (2.0 - 2.0 * 2f64.sqrt()) / 7.0;
        Ok((
            (value - expected).abs() <= 1e-12 && value < 0.0,
            format!("Tr(W rho) = {value:.15} (expected 2/7 - 2 sqrt 2/7 = {expected:.15})"),
        ))
    });

    c.record("stable-subspace", {
        let k = compute_stable_subspace(&s, tol).map_err(CliError::numerical)?;
        let r12 = k.residual(&p12()).map_err(CliError::numerical)?;
        let r3 = k.residual(&ComplexMatrix::unit(3, 2, 2)).map_err(CliError::numerical)?;
        let class = ksweep_core::stable::classify_jordan_subalgebra(&k, 1e-8).map_err(CliError::numerical)?;
        Ok((
            k.dim() == 2 && r12 <= 1e-9 && r3 <= 1e-9 && class == JordanClass::TwoBlock,
            format!("dim {}, residuals {r12:.1e}/{r3:.1e}, class {class}", k.dim()),
        ))
    });

    c.record("limit-map", {
        let k = HSSubspace::from_spanning(3, &[p12(), ComplexMatrix::unit(3, 2, 2)], 1e-9).map_err(CliError::numerical)?;
        let e = conditional_expectation(&k, 1e-9).map_err(CliError::numerical)?;
        let mut worst: f64 = 0.0;
        for k in 1..=30u32 {
            let dist = s.power(k).sub(&e).map_err(CliError::numerical)?.operator_norm();
            worst = worst.max(dist / (2.0 * 2f64.powf(-(k as f64) / 2.0)));
        }
        let far = s.power(60).sub(&e).map_err(CliError::numerical)?.operator_norm();
        Ok((worst <= 1.0 && far <= 1e-9, format!("max distance/bound over k = 1..30: {worst:.3}, distance at k = 60: {far:.1e}")))
    });

    c.record("kadison-schwarz", {
        let defects = ks_probes(&s)?;
        let ok = defects.iter().all(|d| d.defect < -1e-6);
        let listed: Vec<String> = defects.iter().map(|d| format!("{} at {}: {:.6}", d.map, d.probe, d.defect)).collect();
        Ok((ok, listed.join(", ")))
    });

    c.record("not-decomposable", {
        let cp = is_completely_positive(&s, tol);
        let cocp = is_completely_copositive(&s, tol);
        Ok((!cp && !cocp, format!("CP {cp}, co-CP {cocp}")))
    });

    c.record("positivity-probe", {
        let v = positivity_probe(&s, &settings.budget, settings.seed, tol);
        Ok((!v.violation_found(), format!("no violation found; min eigenvalue seen {:.3e}", v.min_value)))
    });

    c.record("zero-trace-identity", {
        let mut worst: f64 = 0.0;
        for v in random_unit_vectors(2, 200, settings.seed) {
            worst = worst.max(zero_trace_residual(&s, [v[0], v[1]]).map_err(CliError::numerical)?);
        }
        Ok((worst <= 1e-9, format!("max residual over 200 unit vectors {worst:.1e}")))
    });

    c.record("choi-map-ergodic", {
        let k = compute_stable_subspace(&choi_map(), tol).map_err(CliError::numerical)?;
        Ok((k.dim() == 1, format!("stable subspace dimension {}", k.dim())))
    });

    c.record("detected-state-construction", {
        let cert = construct_detected_state(&w, &DensityMatrix::maximally_mixed(9), 0.5, tol).map_err(CliError::numerical)?;
        Ok((cert.witness_value < 0.0, format!("lambda 1/2 over the maximally mixed state: Tr(W rho) = {:.6}", cert.witness_value)))
    });

    let passed = c.items.iter().all(|i| i.passed);
    Ok(DemoReport {
        settings: *settings,
        state: state.unwrap_or("ppt-entangled").to_string(),
        items: c.items,
        passed,
    })
}

/// Runs `trials` trials of `suite` on `jobs` threads; trial `i` always uses
/// the same derived seed, so the outcome does not depend on `jobs`.
pub fn verify(suite: Suite, trials: usize, jobs: usize, settings: &Settings) -> VerifyReport {
    let jobs = jobs.clamp(1, trials.max(1));
    let (seed, tol) = (settings.seed, settings.tol);
    let results = thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                scope.spawn(move || {
                    (j..trials).step_by(jobs).map(|t| run_trial(suite, t, seed, tol)).collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("trial thread panicked")).collect::<Vec<_>>()
    });
    VerifyReport::new(SuiteOutcome::from_trials(suite, trials, seed, results), tol)
}
