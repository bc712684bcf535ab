//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use ksweep_core::positivity::{
    is_bistochastic, is_completely_copositive, is_completely_positive, kadison_schwarz_defect,
    positivity_probe, random_unit_vectors, ProbeBudget,
};
use ksweep_core::stable::{
    classify_jordan_subalgebra, compute_stable_subspace, conditional_expectation, verify_stable_structure,
    HSSubspace, JordanClass,
};
use ksweep_core::witness::{build_witness, evaluate, is_ppt, ppt_entangled_state};
use ksweep_core::zoo::{
    canonical_subalgebras, choi_map, named_maps, random_bistochastic, random_kraus_map,
    two_block_map, zero_trace_residual,
};
use ksweep_core::{
    derive_seed, is_psd, min_eigenvalue, ComplexMatrix, SuperOperator, C64, DEFAULT_TOL,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e(i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::unit(3, i, j)
}

fn p12() -> ComplexMatrix {
    ComplexMatrix::diag_real(&[1.0, 1.0, 0.0])
}

fn p3() -> ComplexMatrix {
    ComplexMatrix::diag_real(&[0.0, 0.0, 1.0])
}

fn witness_value() -> Check {
    let w = build_witness(&two_block_map(), DEFAULT_TOL).map_err(|e| e.to_string())?;
    let value = evaluate(&w, &ppt_entangled_state(), 1e-12).map_err(|e| e.to_string())?;
    let expected = 2.0 / 7.0 - 2.0 * SQRT_2 / 7.0;
    ensure((value - expected).abs() <= 1e-12, format!("Tr(W rho) = {value}, expected {expected}"))?;
    Ok(format!("Tr(W rho) = {value:.15}"))
}

fn witness_matrix() -> Check {
    let w = build_witness(&two_block_map(), DEFAULT_TOL).map_err(|e| e.to_string())?;
    let mut expected = ComplexMatrix::zeros(9, 9);
    for (i, j, x) in [
        (0, 0, 0.5),
        (1, 1, 0.5),
        (3, 3, 0.5),
        (4, 4, 0.5),
        (8, 8, 1.0),
        (0, 8, FRAC_1_SQRT_2),
        (8, 0, FRAC_1_SQRT_2),
        (5, 7, FRAC_1_SQRT_2),
        (7, 5, FRAC_1_SQRT_2),
    ] {
        expected[(i, j)] = C64::new(x, 0.0);
    }
    let worst = (&w.matrix - &expected).max_abs();
    ensure(worst <= 1e-12, format!("entrywise deviation {worst:e}"))?;
    let min = w.min_eigenvalue();
    ensure((min + FRAC_1_SQRT_2).abs() <= 1e-10, format!("min eigenvalue {min}"))?;
    Ok(format!("entrywise deviation {worst:e}, min eigenvalue {min:.12}"))
}

fn stable_subspace() -> Check {
    let k = compute_stable_subspace(&two_block_map(), DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(k.dim() == 2, format!("dimension {}", k.dim()))?;
    let r12 = k.residual(&p12()).map_err(|e| e.to_string())?;
    let r3 = k.residual(&p3()).map_err(|e| e.to_string())?;
    ensure(r12 <= 1e-9 && r3 <= 1e-9, format!("residuals {r12:e}, {r3:e}"))?;
    let class = classify_jordan_subalgebra(&k, DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(class == JordanClass::TwoBlock, format!("class {class}"))?;
    Ok(format!("dim 2, residuals {r12:.1e}/{r3:.1e}, class {class}"))
}

fn limit_map() -> Check {
    let k = HSSubspace::new(3, vec![p12().scale_real(FRAC_1_SQRT_2), p3()], 1e-12).map_err(|e| e.to_string())?;
    let cond = conditional_expectation(&k, DEFAULT_TOL).map_err(|e| e.to_string())?;
    // Independent form of the limit: A ↦ ½Tr(P₁₂A)P₁₂ + Tr(P₃A)P₃.
    let oracle = SuperOperator::from_fn(3, |a| {
        let t12 = (&p12() * a).trace() * 0.5;
        let t3 = (&p3() * a).trace();
        &p12().scale(t12) + &p3().scale(t3)
    });
    let gap = (cond.action() - oracle.action()).max_abs();
    ensure(gap <= 1e-14, format!("conditional expectation differs from the limit formula by {gap:e}"))?;

    let s = two_block_map();
    let mut power = SuperOperator::identity(3);
    let mut worst_ratio: f64 = 0.0;
    for k in 1..=60u32 {
        power = power.compose(&s).map_err(|e| e.to_string())?;
        let dist = power.sub(&cond).map_err(|e| e.to_string())?.operator_norm();
        if k <= 30 {
            let bound = 2.0 * 2f64.powf(-(k as f64) / 2.0);
            ensure(dist <= bound, format!("k = {k}: distance {dist:e} > {bound:e}"))?;
            worst_ratio = worst_ratio.max(dist / bound);
        }
        if k == 60 {
            ensure(dist <= 1e-9, format!("k = 60: distance {dist:e}"))?;
        }
    }
    Ok(format!("max distance/bound over k = 1..30: {worst_ratio:.3}"))
}

fn atomicity() -> Check {
    let s = two_block_map();
    let st = s.compose(&SuperOperator::transposition(3)).map_err(|e| e.to_string())?;
    let d1 = kadison_schwarz_defect(&s, &(&p12() + &e(2, 1))).map_err(|e| e.to_string())?;
    let d2 = kadison_schwarz_defect(&st, &(&p12() + &e(2, 0))).map_err(|e| e.to_string())?;
    ensure(d1 < -1e-6 && d2 < -1e-6, format!("KS defects {d1}, {d2}"))?;
    ensure(!is_completely_positive(&s, DEFAULT_TOL), "map is CP")?;
    ensure(!is_completely_copositive(&s, DEFAULT_TOL), "map is co-CP")?;
    Ok(format!("KS defects {d1:.6}, {d2:.6}; CP false, co-CP false"))
}

fn ppt_detection() -> Check {
    let rho = ppt_entangled_state();
    ensure(is_psd(rho.matrix(), 1e-12), "state is not PSD")?;
    let trace = rho.matrix().trace();
    ensure((trace.re - 1.0).abs() <= 1e-12 && trace.im.abs() <= 1e-12, format!("trace {trace}"))?;
    ensure(is_ppt(&rho, (3, 3), DEFAULT_TOL).map_err(|e| e.to_string())?, "state is not PPT")?;
    let w = build_witness(&two_block_map(), DEFAULT_TOL).map_err(|e| e.to_string())?;
    let value = evaluate(&w, &rho, 1e-12).map_err(|e| e.to_string())?;
    ensure(value < 0.0, format!("witness value {value} is not negative"))?;
    Ok(format!("PSD, trace 1, PPT, detected at {value:.6}"))
}

fn zero_trace() -> Check {
    let s = two_block_map();
    let mut worst: f64 = 0.0;
    for v in random_unit_vectors(2, 200, 2024) {
        let eta = [v[0], v[1]];
        let r = zero_trace_residual(&s, eta).map_err(|e| e.to_string())?;
        // Closed form S(P(η,1)) = [[½·𝟏₂, υ], [υ*, 1]] with x = (−2υ, 1).
        let up = [eta[0] * FRAC_1_SQRT_2, eta[1].conj() * FRAC_1_SQRT_2];
        let mut block = ComplexMatrix::diag_real(&[0.5, 0.5, 1.0]);
        for i in 0..2 {
            block[(i, 2)] = up[i];
            block[(2, i)] = up[i].conj();
        }
        let y = [eta[0], eta[1], C64::new(1.0, 0.0)];
        let p = ComplexMatrix::from_fn(3, 3, |i, j| y[i] * y[j].conj());
        let image = s.apply(&p).map_err(|e| e.to_string())?;
        let dev = (&image - &block).max_abs();
        ensure(dev <= 1e-14, format!("S(P(eta,1)) deviates from the block form by {dev:e}"))?;
        let x = [up[0] * -2.0, up[1] * -2.0, C64::new(1.0, 0.0)];
        let mut quad = C64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                quad += x[i].conj() * block[(i, j)] * x[j];
            }
        }
        ensure(quad.norm() <= 1e-12, format!("closed form gives {quad}"))?;
        worst = worst.max(r);
    }
    ensure(worst <= 1e-9, format!("max residual {worst:e}"))?;
    Ok(format!("max residual over 200 vectors {worst:.1e}"))
}

fn structure_suite() -> Check {
    let mut maps: Vec<(String, SuperOperator)> = named_maps();
    for i in 0..50u64 {
        let seed = derive_seed(8, i);
        let components = 1 + (i % 4) as usize;
        let s = random_bistochastic(3, components, seed).map_err(|e| e.to_string())?;
        maps.push((format!("random #{i}"), s));
    }
    let mut worst: f64 = 0.0;
    for (i, (name, s)) in maps.iter().enumerate() {
        let k = compute_stable_subspace(s, DEFAULT_TOL).map_err(|e| format!("{name}: {e}"))?;
        let report = verify_stable_structure(s, &k, 8, i as u64, 1e-8).map_err(|e| format!("{name}: {e}"))?;
        if !report.all_passed {
            let bad: Vec<String> =
                report.clauses.iter().filter(|c| !c.passed).map(|c| format!("{}={:e}", c.clause, c.residual)).collect();
            return Err(format!("{name}: {}", bad.join(", ")));
        }
        worst = worst.max(report.max_residual());
    }
    Ok(format!("{} maps, max clause residual {worst:.1e}", maps.len()))
}

fn roundtrip() -> Check {
    let budget = ProbeBudget::default();
    let mut worst: f64 = 0.0;
    for (class, k) in canonical_subalgebras() {
        let cond = conditional_expectation(&k, DEFAULT_TOL).map_err(|e| e.to_string())?;
        ensure(is_bistochastic(&cond, DEFAULT_TOL), format!("{class}: not bistochastic"))?;
        let verdict = positivity_probe(&cond, &budget, 42, DEFAULT_TOL);
        ensure(!verdict.violation_found(), format!("{class}: positivity violation {}", verdict.min_value))?;
        let stable = compute_stable_subspace(&cond, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let d = stable.distance(&k).map_err(|e| e.to_string())?;
        ensure(d <= 1e-8, format!("{class}: subspace distance {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("7 subalgebras, max subspace distance {worst:.1e}"))
}

fn choi_oracle() -> Check {
    let mut disagreements = 0;
    let mut cp_count = 0;
    for i in 0..50u64 {
        let seed = derive_seed(10, i);
        let kraus = random_kraus_map(3, 1 + (i / 2 % 4) as usize, seed).map_err(|e| e.to_string())?;
        let s = if i % 2 == 0 { kraus } else { kraus.compose(&SuperOperator::transposition(3)).map_err(|e| e.to_string())? };
        let cp = is_completely_positive(&s, DEFAULT_TOL);
        let w = build_witness(&s, DEFAULT_TOL).map_err(|e| e.to_string())?;
        if cp != is_psd(&w.matrix, DEFAULT_TOL) {
            disagreements += 1;
        }
        cp_count += cp as usize;
    }
    ensure(disagreements == 0, format!("{disagreements} disagreements"))?;
    ensure(cp_count >= 25, format!("only {cp_count} CP maps among 25 Kraus maps"))?;
    Ok(format!("50 maps, {cp_count} CP, 0 disagreements"))
}

fn choi_map_check() -> Check {
    let s = choi_map();
    ensure(is_bistochastic(&s, DEFAULT_TOL), "not bistochastic")?;
    let k = compute_stable_subspace(&s, DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(k.dim() == 1, format!("stable dimension {}", k.dim()))?;
    ensure(!is_completely_positive(&s, DEFAULT_TOL), "map is CP")?;
    ensure(!is_completely_copositive(&s, DEFAULT_TOL), "map is co-CP")?;
    let choi_min = min_eigenvalue(&s.choi());
    Ok(format!("dim K = 1, Choi matrix min eigenvalue {choi_min:.4}"))
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("witness value on the PPT state", witness_value),
        ("witness matrix and its negative eigenvalue", witness_matrix),
        ("stable subspace of the two-block map", stable_subspace),
        ("powers converge to the conditional expectation", limit_map),
        ("Kadison-Schwarz violations, neither CP nor co-CP", atomicity),
        ("PPT state is detected", ppt_detection),
        ("zero-trace identity", zero_trace),
        ("structural clauses on random and zoo maps", structure_suite),
        ("conditional expectation round-trip", roundtrip),
        ("CP test agrees with witness positivity", choi_oracle),
        ("Choi map is strongly ergodic, not CP or co-CP", choi_map_check),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let ms = t.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({ms:.0} ms)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({ms:.0} ms)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1} s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
