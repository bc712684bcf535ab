//! Positivity, complete positivity and related tests for superoperators.
//!
//! Deciding positivity of a map is hard in general, so [`positivity_probe`]
//! and [`k_positivity_probe`] are refutation-only: they minimize the
//! smallest eigenvalue of `S(P_η)` and report a violating vector when one
//! turns up. A [`ProbeStatus::NoViolationFound`] verdict is evidence, not a
//! certificate.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::eig::{is_psd, jacobi, min_eigenvalue};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ComplexVector, C64};
use crate::random::{gaussian_matrix, seeded_rng, unit_vector};
use crate::superop::SuperOperator;

/// Returns `(‖S(𝟏) − 𝟏‖_HS, max_jk |Tr S(E_jk) − Tr E_jk|)`.
pub fn bistochastic_defects(s: &SuperOperator) -> (f64, f64) {
    let n = s.n();
    let id = ComplexMatrix::identity(n);
    let unit = (&s.apply(&id).expect("square identity") - &id).hs_norm();
    let mut trace: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let expected = if j == k { 1.0 } else { 0.0 };
            trace = trace.max((s.image(j, k).trace() - C64::new(expected, 0.0)).norm());
        }
    }
    (unit, trace)
}

/// Unital and trace-preserving to within `tol`.
pub fn is_bistochastic(s: &SuperOperator, tol: f64) -> bool {
    let (unit, trace) = bistochastic_defects(s);
    unit <= tol && trace <= tol
}

pub(crate) fn require_bistochastic(s: &SuperOperator, tol: f64) -> Result<()> {
    let (unit_defect, trace_defect) = bistochastic_defects(s);
    if unit_defect <= tol && trace_defect <= tol {
        Ok(())
    } else {
        Err(Error::NotBistochastic { unit_defect, trace_defect })
    }
}

/// Largest observed `‖S(A)‖_HS / ‖A‖_HS` over the matrix units and `trials`
/// seeded random matrices (half of them Hermitian).
pub fn max_hs_gain(s: &SuperOperator, trials: usize, seed: u64) -> f64 {
    let n = s.n();
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    let mut probe = |a: &ComplexMatrix| {
        let norm = a.hs_norm();
        if norm > 0.0 {
            worst = worst.max(s.apply(a).expect("n×n input").hs_norm() / norm);
        }
    };
    for j in 0..n {
        for k in 0..n {
            probe(&ComplexMatrix::unit(n, j, k));
        }
    }
    for t in 0..trials {
        let a = gaussian_matrix(&mut rng, n, n);
        probe(&if t % 2 == 0 { a.hermitian_part() } else { a });
    }
    worst
}

/// Checks `‖S(A)‖_HS ≤ ‖A‖_HS (1 + tol)` on sampled inputs. The map must be
/// bistochastic.
pub fn hs_contraction_check(s: &SuperOperator, trials: usize, seed: u64, tol: f64) -> Result<bool> {
    require_bistochastic(s, tol)?;
    Ok(max_hs_gain(s, trials, seed) <= 1.0 + tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ProbeStatus {
    ViolationFound,
    NoViolationFound,
}

/// Outcome of a positivity probe.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PositivityVerdict {
    pub status: ProbeStatus,
    /// Unit vector attaining `min_value`; present when a violation was found.
    pub witness_vector: Option<ComplexVector>,
    /// Smallest eigenvalue of `S(P_η)` seen over all probed unit `η`.
    pub min_value: f64,
}

impl PositivityVerdict {
    pub fn violation_found(&self) -> bool {
        self.status == ProbeStatus::ViolationFound
    }
}

/// Search effort for the positivity probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeBudget {
    /// Target number of deterministic grid points over unit vectors.
    pub grid_points: usize,
    /// Random starting points for local descent.
    pub restarts: usize,
    /// Maximum alternating-descent steps per start.
    pub descent_steps: usize,
}

impl Default for ProbeBudget {
    fn default() -> Self {
        Self { grid_points: 64 * 64 * 64, restarts: 200, descent_steps: 60 }
    }
}

impl ProbeBudget {
    /// Restart-only budget, for quick checks.
    pub fn quick() -> Self {
        Self { grid_points: 0, restarts: 40, descent_steps: 60 }
    }
}

/// Minimizes `λ_min((I_k ⊗ S)(ψψ*))` by alternating between the optimal
/// test vector `u` (bottom eigenvector of the image) and the optimal input
/// `ψ` (bottom eigenvector of `(I_k ⊗ S*)(uu*)`). Each half-step lowers
/// `u* (I_k ⊗ S)(ψψ*) u`, so the iteration is a monotone descent.
struct Descent<'a> {
    s: &'a SuperOperator,
    s_adj: SuperOperator,
    k: usize,
}

impl<'a> Descent<'a> {
    fn new(s: &'a SuperOperator, k: usize) -> Self {
        Self { s, s_adj: s.adjoint(), k }
    }

    fn image(&self, map: &SuperOperator, v: &ComplexVector) -> ComplexMatrix {
        if self.k == 1 {
            map.apply_rank_one(v)
        } else {
            map.apply_ampliated(self.k, &v.outer(v)).expect("kn-dimensional vector")
        }
    }

    fn value(&self, psi: &ComplexVector) -> f64 {
        min_eigenvalue(&self.image(self.s, psi))
    }

    fn run(&self, start: ComplexVector, steps: usize) -> (f64, ComplexVector) {
        let mut psi = start;
        let mut best = self.value(&psi);
        for _ in 0..steps {
            let u = jacobi(&self.image(self.s, &psi)).eigenvector(0);
            let next = jacobi(&self.image(&self.s_adj, &u)).eigenvector(0);
            let value = self.value(&next);
            if value < best {
                let gain = best - value;
                best = value;
                psi = next;
                if gain <= 1e-14 * best.abs().max(1.0) {
                    break;
                }
            } else {
                break;
            }
        }
        (best, psi)
    }
}

/// Unit vector from hyperspherical amplitude angles and relative phases.
fn grid_vector(thetas: &[f64], phases: &[f64]) -> ComplexVector {
    let n = thetas.len() + 1;
    let mut out = Vec::with_capacity(n);
    let mut sin_prod = 1.0;
    for i in 0..n {
        let amp = if i < n - 1 { sin_prod * thetas[i].cos() } else { sin_prod };
        if i < n - 1 {
            sin_prod *= thetas[i].sin();
        }
        let phase = if i == 0 { 0.0 } else { phases[i - 1] };
        out.push(C64::from_polar(amp, phase));
    }
    ComplexVector::new(out)
}

/// Deterministic grid over unit vectors of `Cⁿ` modulo global phase:
/// `n − 1` amplitude angles in `[0, π/2]` and `n − 1` phases in `[0, 2π)`,
/// each axis with `g` points where `g^(2n−2) ≤ target`.
fn unit_grid(n: usize, target: usize) -> impl Iterator<Item = ComplexVector> {
    let axes = 2 * n.saturating_sub(1);
    let per_axis = if axes == 0 || target < 2 {
        0
    } else {
        let mut g = (target as f64).powf(1.0 / axes as f64).floor() as usize;
        while g > 1 && g.checked_pow(axes as u32).is_none_or(|t| t > target) {
            g -= 1;
        }
        if g < 2 {
            0
        } else {
            g
        }
    };
    let total = if per_axis == 0 { 0 } else { per_axis.pow(axes as u32) };
    (0..total).map(move |mut idx| {
        let mut thetas = Vec::with_capacity(n - 1);
        let mut phases = Vec::with_capacity(n - 1);
        for axis in 0..axes {
            let i = idx % per_axis;
            idx /= per_axis;
            if axis < n - 1 {
                thetas.push(FRAC_PI_2 * i as f64 / (per_axis - 1) as f64);
            } else {
                phases.push(2.0 * PI * i as f64 / per_axis as f64);
            }
        }
        grid_vector(&thetas, &phases)
    })
}

fn verdict(min_value: f64, witness: ComplexVector, tol: f64) -> PositivityVerdict {
    if min_value < -tol {
        PositivityVerdict {
            status: ProbeStatus::ViolationFound,
            witness_vector: Some(witness),
            min_value,
        }
    } else {
        PositivityVerdict { status: ProbeStatus::NoViolationFound, witness_vector: None, min_value }
    }
}

const GRID_SEEDS: usize = 8;

/// Searches for a unit `η` with `S(P_η) ≱ 0`.
///
/// Scans a deterministic grid, then runs alternating descent from the best
/// grid points and from `budget.restarts` seeded random vectors. Reports a
/// violation when the smallest eigenvalue found is below `−tol`.
pub fn positivity_probe(
    s: &SuperOperator,
    budget: &ProbeBudget,
    seed: u64,
    tol: f64,
) -> PositivityVerdict {
    let n = s.n();
    let descent = Descent::new(s, 1);
    let mut best_value = f64::INFINITY;
    let mut best_vec = ComplexVector::basis(n, 0);

    // Keep the lowest few grid points as descent seeds.
    let mut seeds: Vec<(f64, ComplexVector)> = Vec::with_capacity(GRID_SEEDS + 1);
    for eta in unit_grid(n, budget.grid_points) {
        let value = descent.value(&eta);
        if seeds.len() < GRID_SEEDS || value < seeds[seeds.len() - 1].0 {
            let pos = seeds.partition_point(|(v, _)| *v <= value);
            seeds.insert(pos, (value, eta));
            seeds.truncate(GRID_SEEDS);
        }
    }
    for i in 0..n {
        let e = ComplexVector::basis(n, i);
        seeds.push((descent.value(&e), e));
    }

    let mut rng = seeded_rng(seed);
    let random_starts = (0..budget.restarts).map(|_| unit_vector(&mut rng, n)).collect::<Vec<_>>();
    for start in seeds.into_iter().map(|(_, v)| v).chain(random_starts) {
        let (value, eta) = descent.run(start, budget.descent_steps);
        if value < best_value {
            best_value = value;
            best_vec = eta;
        }
    }
    verdict(best_value, best_vec, tol)
}

/// Searches for a unit `ψ ∈ C^{kn}` with `(I_k ⊗ S)(P_ψ) ≱ 0`.
///
/// Random restarts plus the maximally entangled start `Σ eᵢ ⊗ eᵢ`; same
/// refutation-only semantics as [`positivity_probe`]. For `k = 1` this is
/// [`positivity_probe`].
pub fn k_positivity_probe(
    s: &SuperOperator,
    k: usize,
    budget: &ProbeBudget,
    seed: u64,
    tol: f64,
) -> Result<PositivityVerdict> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if k == 1 {
        return Ok(positivity_probe(s, budget, seed, tol));
    }
    let n = s.n();
    let dim = k * n;
    let descent = Descent::new(s, k);

    let mut starts = Vec::with_capacity(budget.restarts + 1);
    let mut entangled = ComplexVector::zeros(dim);
    for i in 0..k.min(n) {
        entangled[i * n + i] = C64::new(1.0, 0.0);
    }
    starts.push(entangled.normalized()?);
    let mut rng = seeded_rng(seed);
    starts.extend((0..budget.restarts.max(1)).map(|_| unit_vector(&mut rng, dim)));

    let mut best_value = f64::INFINITY;
    let mut best_vec = starts[0].clone();
    for start in starts {
        let (value, psi) = descent.run(start, budget.descent_steps);
        if value < best_value {
            best_value = value;
            best_vec = psi;
        }
    }
    Ok(verdict(best_value, best_vec, tol))
}

/// Choi's theorem: `S` is completely positive iff its Choi matrix is PSD.
pub fn is_completely_positive(s: &SuperOperator, tol: f64) -> bool {
    is_psd(&s.choi(), tol)
}

/// `S ∘ t` completely positive.
pub fn is_completely_copositive(s: &SuperOperator, tol: f64) -> bool {
    let st = s.compose(&SuperOperator::transposition(s.n())).expect("same n");
    is_psd(&st.choi(), tol)
}

/// Smallest eigenvalue of `S(B*B) − S(B)* S(B)`. Negative values mean the
/// Kadison–Schwarz inequality fails at `B`.
pub fn kadison_schwarz_defect(s: &SuperOperator, b: &ComplexMatrix) -> Result<f64> {
    let bb = b.adjoint().checked_mul(b)?;
    let sbb = s.apply(&bb)?;
    let sb = s.apply(b)?;
    let gap = &sbb - &(&sb.adjoint() * &sb);
    Ok(min_eigenvalue(&gap))
}

/// Convenience: a random vector stream for external callers needing the
/// same unit-sphere sampler as the probes.
pub fn random_unit_vectors(n: usize, count: usize, seed: u64) -> Vec<ComplexVector> {
    let mut rng = seeded_rng(seed);
    (0..count).map(|_| unit_vector(&mut rng, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_unitary;

    fn trace_map(n: usize) -> SuperOperator {
        let nf = n as f64;
        SuperOperator::from_fn(n, |a| ComplexMatrix::identity(n).scale(a.trace() / nf))
    }

    #[test]
    fn bistochastic_examples() {
        assert!(is_bistochastic(&trace_map(2), 1e-9));
        assert!(!is_bistochastic(&SuperOperator::identity(3).scale(2.0), 1e-9));
    }

    #[test]
    fn contraction_examples() {
        let u = random_unitary(&mut seeded_rng(1), 3);
        let conj = SuperOperator::conjugation(&u).unwrap();
        assert!(hs_contraction_check(&conj, 50, 1, 1e-9).unwrap());
        assert!((max_hs_gain(&conj, 50, 1) - 1.0).abs() < 1e-12);

        let tr = trace_map(2);
        let e12 = ComplexMatrix::unit(2, 0, 1);
        assert_eq!(tr.apply(&e12).unwrap().hs_norm(), 0.0);
        assert!(hs_contraction_check(&SuperOperator::identity(3).scale(2.0), 5, 1, 1e-9).is_err());
    }

    #[test]
    fn grid_covers_requested_budget() {
        assert_eq!(unit_grid(3, 64 * 64 * 64).count(), 22usize.pow(4));
        assert_eq!(unit_grid(3, 10).count(), 0);
        for v in unit_grid(2, 100).take(20) {
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn transposition_is_positive_not_two_positive() {
        let t = SuperOperator::transposition(3);
        let v = positivity_probe(&t, &ProbeBudget::quick(), 3, 1e-9);
        assert_eq!(v.status, ProbeStatus::NoViolationFound);
        let v2 = k_positivity_probe(&t, 2, &ProbeBudget::quick(), 3, 1e-9).unwrap();
        assert!(v2.violation_found());
        assert!((v2.min_value + 0.5).abs() < 1e-9);
    }

    #[test]
    fn probe_refutes_compression_minus_identity() {
        // S'(A) = 2 P₁ A P₁ − A sends P₂ to −P₂.
        let p1 = ComplexMatrix::diag_real(&[1.0, 0.0, 0.0]);
        let s = SuperOperator::from_fn(3, |a| &(&(&p1 * a) * &p1).scale_real(2.0) - a);
        let v = positivity_probe(&s, &ProbeBudget::default(), 42, 1e-9);
        assert!(v.violation_found());
        assert!((v.min_value + 1.0).abs() < 1e-9);
        let w = v.witness_vector.unwrap();
        assert!(min_eigenvalue(&s.apply_rank_one(&w)) < -1e-9);
    }

    #[test]
    fn cp_and_copositivity_of_transposition() {
        let t = SuperOperator::transposition(3);
        assert!(!is_completely_positive(&t, 1e-9));
        assert!(is_completely_copositive(&t, 1e-9));
        let u = random_unitary(&mut seeded_rng(9), 3);
        assert!(is_completely_positive(&SuperOperator::conjugation(&u).unwrap(), 1e-9));
    }

    #[test]
    fn kadison_schwarz_holds_for_homomorphisms() {
        let mut rng = seeded_rng(4);
        let u = random_unitary(&mut rng, 3);
        let conj = SuperOperator::conjugation(&u).unwrap();
        for _ in 0..10 {
            let b = gaussian_matrix(&mut rng, 3, 3);
            assert!(kadison_schwarz_defect(&conj, &b).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn k_probe_rejects_zero_k() {
        assert!(k_positivity_probe(&SuperOperator::identity(2), 0, &ProbeBudget::quick(), 0, 1e-9)
            .is_err());
    }
}
