//! Isometric-sweeping decomposition `Mₙ = K_S ⊕ K_S^⊥` of a bistochastic
//! map, Jordan-algebra checks on `K_S`, and conditional expectations.
//!
//! `K_S` is the set of `A` with `‖SᵏA‖_HS = ‖S*ᵏA‖_HS = ‖A‖_HS` for all `k`.
//! Since `S` is an HS contraction, that is the intersection over `k` of the
//! eigenvalue-one eigenspaces of `S*ᵏSᵏ` and `SᵏS*ᵏ`. The chain of
//! intersections is decreasing and constant from its first repeat on, so
//! it settles after at most `n²` steps.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::eig::jacobi;
use crate::error::{Error, Result};
use crate::matrix::{hs_inner, jordan_product, ComplexMatrix, ComplexVector, C64};
use crate::positivity::require_bistochastic;
use crate::random::{gaussian_c64, seeded_rng};
use crate::superop::SuperOperator;

/// Eigenvalues of `S*ᵏSᵏ` at or above `1 − FIX_THRESHOLD` count as fixed.
pub const FIX_THRESHOLD: f64 = 1e-9;
/// Principal-angle cosines at or above `1 − INTERSECT_THRESHOLD` count as
/// common directions when intersecting subspaces.
pub const INTERSECT_THRESHOLD: f64 = 1e-8;
/// Number of sweeping norms recorded by [`decompose`].
pub const DEFAULT_SWEEP_STEPS: usize = 20;

const VERIFY_FACTOR: f64 = 100.0;
const SAMPLE_SEED: u64 = 0x5eed;

/// Subspace of `Mₙ` with an HS-orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HSSubspace {
    n: usize,
    basis: Vec<ComplexMatrix>,
}

impl HSSubspace {
    /// Wraps a basis after checking it is HS-orthonormal to `tol`.
    pub fn new(n: usize, basis: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        check_shapes(n, &basis)?;
        if basis.len() > n * n {
            return Err(Error::InvalidArgument(format!(
                "{} basis elements exceed dim M{n} = {}",
                basis.len(),
                n * n
            )));
        }
        let mut defect: f64 = 0.0;
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((hs_inner(a, b)? - C64::new(expected, 0.0)).norm());
            }
        }
        if defect > tol {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self { n, basis })
    }

    /// Orthonormal basis of the span of `spanning`; directions with
    /// Gram eigenvalue below `tol` are dropped.
    pub fn from_spanning(n: usize, spanning: &[ComplexMatrix], tol: f64) -> Result<Self> {
        check_shapes(n, spanning)?;
        let nn = n * n;
        let mut gram = ComplexMatrix::zeros(nn, nn);
        for m in spanning {
            let v = m.vectorize();
            gram = &gram + &v.outer(&v);
        }
        let eig = jacobi(&gram);
        let scale = eig.max().max(1.0);
        let basis = (0..nn)
            .rev()
            .filter(|&i| eig.eigenvalues[i] > tol * scale)
            .map(|i| ComplexMatrix::unvectorize(&eig.eigenvector(i), n).expect("n² entries"))
            .collect();
        Ok(Self { n, basis })
    }

    pub fn full(n: usize) -> Self {
        let basis = (0..n * n).map(|idx| ComplexMatrix::unit(n, idx / n, idx % n)).collect();
        Self { n, basis }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// HS-orthogonal projector onto the subspace as an `n² × n²` matrix.
    pub fn projector(&self) -> ComplexMatrix {
        let nn = self.n * self.n;
        self.basis.iter().fold(ComplexMatrix::zeros(nn, nn), |acc, b| {
            let v = b.vectorize();
            &acc + &v.outer(&v)
        })
    }

    pub fn project(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for b in &self.basis {
            out = &out + &b.scale(hs_inner(b, a)?);
        }
        Ok(out)
    }

    /// `‖A − Π_K A‖_HS`.
    pub fn residual(&self, a: &ComplexMatrix) -> Result<f64> {
        Ok((a - &self.project(a)?).hs_norm())
    }

    /// Residual relative to `max(‖A‖_HS, tiny)`.
    pub fn relative_residual(&self, a: &ComplexMatrix) -> Result<f64> {
        let norm = a.hs_norm();
        let r = self.residual(a)?;
        Ok(if norm > 0.0 { r / norm } else { r })
    }

    /// Operator-norm distance between the two orthogonal projectors.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: format!("subspace of M{}", self.n),
                found: format!("subspace of M{}", other.n),
            });
        }
        let d = &self.projector() - &other.projector();
        let e = jacobi(&d);
        Ok(e.min().abs().max(e.max().abs()))
    }

    /// Orthonormal basis of the HS-orthogonal complement.
    pub fn complement(&self) -> Self {
        let nn = self.n * self.n;
        let q = &ComplexMatrix::identity(nn) - &self.projector();
        let eig = jacobi(&q);
        let basis = (0..nn)
            .rev()
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .map(|i| ComplexMatrix::unvectorize(&eig.eigenvector(i), self.n).expect("n² entries"))
            .collect();
        Self { n: self.n, basis }
    }

    /// Random element `Σ cᵢ bᵢ` with complex Gaussian coefficients.
    pub fn random_element(&self, seed: u64) -> ComplexMatrix {
        let mut rng = seeded_rng(seed);
        self.random_element_with(&mut rng)
    }

    fn random_element_with(&self, rng: &mut crate::random::SeededRng) -> ComplexMatrix {
        self.basis
            .iter()
            .fold(ComplexMatrix::zeros(self.n, self.n), |acc, b| &acc + &b.scale(gaussian_c64(rng)))
    }

    /// Relative distance of `𝟏` from the subspace.
    pub fn identity_residual(&self) -> f64 {
        self.relative_residual(&ComplexMatrix::identity(self.n)).expect("n×n")
    }

    /// Largest relative residual of `A*` over basis elements.
    pub fn star_closure_defect(&self) -> f64 {
        self.basis
            .iter()
            .map(|b| self.relative_residual(&b.adjoint()).expect("n×n"))
            .fold(0.0, f64::max)
    }

    /// Largest residual of `bᵢ ∘ bⱼ` over basis pairs.
    pub fn jordan_closure_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i..] {
                let p = jordan_product(a, b).expect("same shape");
                worst = worst.max(self.residual(&p).expect("n×n"));
            }
        }
        worst
    }

    /// Largest `‖bᵢbⱼ − bⱼbᵢ‖_HS` over basis pairs.
    pub fn commutator_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                worst = worst.max((&(a * b) - &(b * a)).hs_norm());
            }
        }
        worst
    }

    /// Unital, `*`-closed and closed under `∘`, each to `tol`.
    pub fn check_jordan_subalgebra(&self, tol: f64) -> Result<()> {
        let residual = self.identity_residual();
        if residual > tol {
            return Err(Error::MissingIdentity { residual });
        }
        let star = self.star_closure_defect();
        if star > tol {
            return Err(Error::NotJordanSubalgebra { reason: format!("not *-closed (defect {star:e})") });
        }
        let jordan = self.jordan_closure_defect();
        if jordan > tol {
            return Err(Error::NotJordanSubalgebra {
                reason: format!("not closed under the Jordan product (defect {jordan:e})"),
            });
        }
        Ok(())
    }
}

fn check_shapes(n: usize, mats: &[ComplexMatrix]) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    for m in mats {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", m.rows(), m.cols()),
            });
        }
    }
    Ok(())
}

/// Columns of an orthonormal basis, as a list of vectors in `C^{n²}`.
type Frame = Vec<ComplexVector>;

fn fixed_frame(g: &ComplexMatrix) -> Frame {
    let eig = jacobi(g);
    (0..g.rows())
        .filter(|&i| eig.eigenvalues[i] >= 1.0 - FIX_THRESHOLD)
        .map(|i| eig.eigenvector(i))
        .collect()
}

/// Orthonormal basis of `span(a) ∩ span(b)` from the principal angles.
fn intersect(a: &Frame, b: &Frame) -> Frame {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let cross = ComplexMatrix::from_fn(a.len(), b.len(), |i, j| a[i].dot(&b[j]));
    let h = &cross * &cross.adjoint();
    let eig = jacobi(&h);
    let cut = (1.0 - INTERSECT_THRESHOLD) * (1.0 - INTERSECT_THRESHOLD);
    let dim = a[0].dim();
    (0..a.len())
        .rev()
        .filter(|&i| eig.eigenvalues[i] >= cut)
        .map(|i| {
            let w = eig.eigenvector(i);
            let mut v = ComplexVector::zeros(dim);
            for (coef, q) in w.as_slice().iter().zip(a) {
                v.axpy(*coef, q);
            }
            v.normalized().expect("combination of orthonormal vectors")
        })
        .collect()
}

/// Result of the stable-subspace search with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StableSearch {
    pub subspace: HSSubspace,
    /// Number of powers `k` examined.
    pub iterations: usize,
    /// Whether the `4n²` cap stopped the search before the dimension had
    /// been stable for `n²` consecutive powers.
    pub cap_hit: bool,
}

/// Computes `K_S` with diagnostics; see [`compute_stable_subspace`].
pub fn stable_subspace_search(s: &SuperOperator, tol: f64) -> Result<StableSearch> {
    require_bistochastic(s, tol)?;
    let n = s.n();
    let nn = n * n;
    let cap = 4 * nn;
    let m = s.action();

    let mut frame: Frame = (0..nn).map(|i| ComplexVector::basis(nn, i)).collect();
    let mut power = ComplexMatrix::identity(nn);
    let mut unchanged = 0;
    let mut iterations = 0;
    for _ in 0..cap {
        iterations += 1;
        power = &power * m;
        let power_adj = power.adjoint();
        let before = frame.len();
        frame = intersect(&frame, &fixed_frame(&(&power_adj * &power)));
        frame = intersect(&frame, &fixed_frame(&(&power * &power_adj)));
        if frame.len() == before {
            unchanged += 1;
        } else {
            unchanged = 0;
        }
        if unchanged >= nn || frame.is_empty() {
            break;
        }
    }
    let cap_hit = unchanged < nn && !frame.is_empty();

    let basis: Vec<ComplexMatrix> =
        frame.iter().map(|v| ComplexMatrix::unvectorize(v, n).expect("n² entries")).collect();
    let subspace = HSSubspace { n, basis };
    verify_stable(s, &subspace, iterations, tol)?;
    Ok(StableSearch { subspace, iterations, cap_hit })
}

/// Re-checks `S*ᵏSᵏA = SᵏS*ᵏA = A` and `‖SᵏA‖ = ‖S*ᵏA‖ = ‖A‖` on the basis.
fn verify_stable(s: &SuperOperator, k: &HSSubspace, iterations: usize, tol: f64) -> Result<()> {
    if k.dim() == 0 {
        return Err(Error::StableVerification {
            diagnostic: "empty stable subspace; the identity must always be stable".into(),
        });
    }
    let bound = VERIFY_FACTOR * tol;
    let m = s.action();
    let mut power = ComplexMatrix::identity(m.rows());
    for step in 1..=iterations {
        power = &power * m;
        let adj = power.adjoint();
        for (idx, b) in k.basis().iter().enumerate() {
            let x = b.vectorize();
            let fx = power.mul_vec(&x)?;
            let bx = adj.mul_vec(&x)?;
            let mut rt1 = adj.mul_vec(&fx)?;
            rt1.axpy(C64::new(-1.0, 0.0), &x);
            let mut rt2 = power.mul_vec(&bx)?;
            rt2.axpy(C64::new(-1.0, 0.0), &x);
            let worst = [(fx.norm() - 1.0).abs(), (bx.norm() - 1.0).abs(), rt1.norm(), rt2.norm()]
                .into_iter()
                .fold(0.0, f64::max);
            if worst > bound {
                return Err(Error::StableVerification {
                    diagnostic: format!(
                        "basis element {idx} fails the isometry condition at k = {step} (defect {worst:e})"
                    ),
                });
            }
        }
    }
    Ok(())
}

/// The stable subspace `K_S` of a bistochastic map.
///
/// Intersects the fixed spaces of `S*ᵏSᵏ` and `SᵏS*ᵏ` for `k = 1, 2, …`
/// until the dimension has been unchanged for `n²` consecutive powers
/// (capped at `4n²`), then re-verifies the result.
pub fn compute_stable_subspace(s: &SuperOperator, tol: f64) -> Result<HSSubspace> {
    stable_subspace_search(s, tol).map(|r| r.subspace)
}

/// Spectral decomposition of a Hermitian matrix into distinct eigenvalues
/// and their orthogonal projections. Eigenvalues closer than
/// `tol·max(1, spread)` are merged.
pub fn spectral_projections(a: &ComplexMatrix, tol: f64) -> Result<Vec<(f64, ComplexMatrix)>> {
    let eig = crate::eig::hermitian_eig(a, tol)?;
    let n = a.rows();
    let spread = (eig.max() - eig.min()).abs().max(1.0);
    let mut out: Vec<(f64, ComplexMatrix)> = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.eigenvalues[end] - eig.eigenvalues[end - 1] <= tol * spread {
            end += 1;
        }
        let mean = eig.eigenvalues[start..end].iter().sum::<f64>() / (end - start) as f64;
        let mut p = ComplexMatrix::zeros(n, n);
        for i in start..end {
            let v = eig.eigenvector(i);
            p = &p + &v.outer(&v);
        }
        out.push((mean, p));
        start = end;
    }
    Ok(out)
}

/// `|A| = (A*A)^{1/2}`, with eigenvalues below `1e-12·‖A*A‖` treated as zero.
pub fn abs_value(a: &ComplexMatrix) -> ComplexMatrix {
    let aa = &a.adjoint() * a;
    let eig = jacobi(&aa);
    let floor = 1e-12 * eig.max().abs().max(f64::MIN_POSITIVE);
    eig.reconstruct_with(|x| if x <= floor { 0.0 } else { x.sqrt() })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClauseResult {
    pub clause: String,
    pub description: String,
    pub passed: bool,
    pub residual: f64,
}

/// Per-clause outcome of [`verify_stable_structure`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StructureReport {
    pub clauses: Vec<ClauseResult>,
    pub all_passed: bool,
}

impl StructureReport {
    pub fn max_residual(&self) -> f64 {
        self.clauses.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.clause == name)
    }
}

fn projection_defect(x: &ComplexMatrix, rank: f64) -> f64 {
    let idem = (&(x * x) - x).hs_norm();
    let herm = x.hermitian_defect();
    let trace = (x.trace() - C64::new(rank, 0.0)).norm();
    idem.max(herm).max(trace)
}

/// Checks the structural properties of `K_S` for a bistochastic map:
///
/// - (a) `𝟏 ∈ K`; (b) `A* ∈ K`; (c) `|A| ∈ K`; (d) `AB + BA ∈ K`;
/// - (e) the spectral projections of Hermitian `A ∈ K` lie in `K`;
/// - (f) for such a projection `P`, `S(P)` and `S*(P)` are projections of
///   the same rank;
/// - (g) for orthogonal such projections `P, Q`, `S(P)S(Q) = S*(P)S*(Q) = 0`.
///
/// Each clause runs on the basis and on `samples` seeded random elements;
/// residuals are relative and a clause passes when its residual is `≤ tol`.
pub fn verify_stable_structure(
    s: &SuperOperator,
    k: &HSSubspace,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<StructureReport> {
    if s.n() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("subspace of M{}", s.n()),
            found: format!("subspace of M{}", k.n()),
        });
    }
    let s_adj = s.adjoint();
    let mut rng = seeded_rng(seed);
    let mut elements: Vec<ComplexMatrix> = k.basis().to_vec();
    for _ in 0..samples {
        elements.push(k.random_element_with(&mut rng));
    }
    let hermitian: Vec<ComplexMatrix> = (0..samples.max(1))
        .map(|_| k.random_element_with(&mut rng).hermitian_part())
        .chain(k.basis().iter().map(|b| b.hermitian_part()))
        .filter(|h| h.hs_norm() > 1e-6)
        .collect();

    let a = k.identity_residual();

    let mut b: f64 = 0.0;
    let mut c: f64 = 0.0;
    for x in &elements {
        b = b.max(k.relative_residual(&x.adjoint())?);
        c = c.max(k.relative_residual(&abs_value(x))?);
    }

    let mut d: f64 = 0.0;
    for (i, x) in elements.iter().enumerate() {
        for y in &elements[i..] {
            let sym = &(x * y) + &(y * x);
            let scale = (x.hs_norm() * y.hs_norm()).max(f64::MIN_POSITIVE);
            d = d.max(k.residual(&sym)? / scale);
        }
    }

    let (mut e, mut f, mut g): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let spectral_tol = 1e-8;
    for h in &hermitian {
        let h = h.scale_real(1.0 / h.hs_norm());
        let family = spectral_projections(&h, spectral_tol)?;
        let mut images = Vec::with_capacity(family.len());
        for (_, p) in &family {
            let rank = p.trace().re;
            e = e.max(k.relative_residual(p)?);
            let sp = s.apply(p)?;
            let sap = s_adj.apply(p)?;
            let scale = p.hs_norm();
            f = f.max(projection_defect(&sp, rank) / scale);
            f = f.max(projection_defect(&sap, rank) / scale);
            images.push((sp, sap, scale));
        }
        for i in 0..images.len() {
            for j in (i + 1)..images.len() {
                let (spi, sapi, ni) = &images[i];
                let (spj, sapj, nj) = &images[j];
                let scale = ni * nj;
                g = g.max((spi * spj).hs_norm() / scale);
                g = g.max((sapi * sapj).hs_norm() / scale);
            }
        }
    }

    let rows = [
        ("a", "identity belongs to K", a),
        ("b", "K is closed under adjoints", b),
        ("c", "|A| belongs to K", c),
        ("d", "AB + BA belongs to K", d),
        ("e", "spectral projections of Hermitian elements belong to K", e),
        ("f", "S and S* map projections in K to projections of equal rank", f),
        ("g", "S and S* preserve orthogonality of projections in K", g),
    ];
    let clauses: Vec<ClauseResult> = rows
        .iter()
        .map(|(clause, description, residual)| ClauseResult {
            clause: (*clause).into(),
            description: (*description).into(),
            passed: *residual <= tol,
            residual: *residual,
        })
        .collect();
    let all_passed = clauses.iter().all(|c| c.passed);
    Ok(StructureReport { clauses, all_passed })
}

/// Isomorphism classes of unital Jordan `*`-subalgebras of `M₃`, keyed by
/// complex dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum JordanClass {
    /// `C𝟏`.
    Trivial,
    /// `C P₁₂ ⊕ C P₃`, two-dimensional commutative.
    TwoBlock,
    /// `C P₁ ⊕ C P₂ ⊕ C P₃`, three-dimensional commutative.
    Diagonal,
    /// `M₂ˢ ⊕ C P₃`.
    SymmetricM2PlusC,
    /// `M₂ ⊕ C P₃`.
    M2PlusC,
    /// Symmetric matrices `M₃ˢ`.
    SymmetricM3,
    /// All of `M₃`.
    Full,
    Unrecognized,
}

impl JordanClass {
    pub const ALL: [JordanClass; 7] = [
        JordanClass::Trivial,
        JordanClass::TwoBlock,
        JordanClass::Diagonal,
        JordanClass::SymmetricM2PlusC,
        JordanClass::M2PlusC,
        JordanClass::SymmetricM3,
        JordanClass::Full,
    ];

    /// Complex dimension, or `None` for [`JordanClass::Unrecognized`].
    pub fn dimension(self) -> Option<usize> {
        match self {
            JordanClass::Trivial => Some(1),
            JordanClass::TwoBlock => Some(2),
            JordanClass::Diagonal => Some(3),
            JordanClass::SymmetricM2PlusC => Some(4),
            JordanClass::M2PlusC => Some(5),
            JordanClass::SymmetricM3 => Some(6),
            JordanClass::Full => Some(9),
            JordanClass::Unrecognized => None,
        }
    }

    fn from_dimension(dim: usize) -> Self {
        JordanClass::ALL
            .into_iter()
            .find(|c| c.dimension() == Some(dim))
            .unwrap_or(JordanClass::Unrecognized)
    }

    /// Classes an extremal bistochastic map of `M₃` may have.
    pub fn allows_extremal(self) -> bool {
        matches!(self, JordanClass::Trivial | JordanClass::TwoBlock | JordanClass::Full)
    }

    pub fn label(self) -> &'static str {
        match self {
            JordanClass::Trivial => "C1",
            JordanClass::TwoBlock => "CP12+CP3",
            JordanClass::Diagonal => "CP1+CP2+CP3",
            JordanClass::SymmetricM2PlusC => "M2s+CP3",
            JordanClass::M2PlusC => "M2+CP3",
            JordanClass::SymmetricM3 => "M3s",
            JordanClass::Full => "M3",
            JordanClass::Unrecognized => "unrecognized",
        }
    }
}

impl fmt::Display for JordanClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Classifies a unital Jordan `*`-subalgebra of `M₃` by dimension.
///
/// Fails if `𝟏 ∉ K`. Returns [`JordanClass::Unrecognized`] when closure
/// under `*` or `∘` fails, when the dimension is not one of
/// `{1, 2, 3, 4, 5, 6, 9}`, or when a 2- or 3-dimensional `K` does not
/// commute.
pub fn classify_jordan_subalgebra(k: &HSSubspace, tol: f64) -> Result<JordanClass> {
    if k.n() != 3 {
        return Err(Error::InvalidArgument(format!(
            "classification covers subalgebras of M3, got M{}",
            k.n()
        )));
    }
    let residual = k.identity_residual();
    if residual > tol {
        return Err(Error::MissingIdentity { residual });
    }
    if k.star_closure_defect() > tol || k.jordan_closure_defect() > tol {
        return Ok(JordanClass::Unrecognized);
    }
    let class = JordanClass::from_dimension(k.dim());
    if matches!(class, JordanClass::TwoBlock | JordanClass::Diagonal) && k.commutator_defect() > tol {
        return Ok(JordanClass::Unrecognized);
    }
    Ok(class)
}

/// HS-orthogonal projection onto a unital Jordan `*`-subalgebra, as a map.
///
/// The result is bistochastic, self-adjoint, idempotent and positive, and
/// its stable subspace is `K` itself.
pub fn conditional_expectation(k: &HSSubspace, tol: f64) -> Result<SuperOperator> {
    k.check_jordan_subalgebra(tol)?;
    SuperOperator::from_action(k.n(), k.projector())
}

/// Output of [`decompose`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecompositionReport {
    pub stable: HSSubspace,
    pub jordan_class: JordanClass,
    /// Largest sampled `‖S(A∘B) − S(A)∘S(B)‖` and `‖S(A*) − S(A)*‖`
    /// over `A, B ∈ K`, relative to `‖A‖‖B‖`.
    pub automorphism_residual: f64,
    /// `‖Sᵏ|_{K^⊥}‖` (operator norm on the complement) for `k = 1, 2, …`.
    pub sweeping_norms: Vec<f64>,
    /// Whether `sweeping_norms` is non-increasing.
    pub sweeping_monotone: bool,
    pub iterations: usize,
    pub cap_hit: bool,
}

/// [`decompose_with`] recording [`DEFAULT_SWEEP_STEPS`] sweeping norms.
pub fn decompose(s: &SuperOperator, tol: f64) -> Result<DecompositionReport> {
    decompose_with(s, tol, DEFAULT_SWEEP_STEPS)
}

/// Splits `Mₙ = K_S ⊕ K_S^⊥`: computes `K_S`, verifies that `S` is a Jordan
/// automorphism on it, and records how fast `Sᵏ` sweeps `K_S^⊥` to zero.
pub fn decompose_with(s: &SuperOperator, tol: f64, sweep_steps: usize) -> Result<DecompositionReport> {
    let search = stable_subspace_search(s, tol)?;
    let k = search.subspace;

    let jordan_class = if k.n() == 3 {
        classify_jordan_subalgebra(&k, VERIFY_FACTOR * tol).unwrap_or(JordanClass::Unrecognized)
    } else {
        JordanClass::Unrecognized
    };

    let automorphism_residual = automorphism_residual(s, &k, 16, SAMPLE_SEED)?;
    if automorphism_residual > VERIFY_FACTOR * tol {
        return Err(Error::StableVerification {
            diagnostic: format!(
                "map is not a Jordan automorphism on the stable subspace (residual {automorphism_residual:e})"
            ),
        });
    }

    let sweeping_norms = sweeping_norms(s, &k, sweep_steps);
    let sweeping_monotone = sweeping_norms.windows(2).all(|w| w[1] <= w[0] + tol);
    Ok(DecompositionReport {
        stable: k,
        jordan_class,
        automorphism_residual,
        sweeping_norms,
        sweeping_monotone,
        iterations: search.iterations,
        cap_hit: search.cap_hit,
    })
}

fn automorphism_residual(s: &SuperOperator, k: &HSSubspace, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = seeded_rng(seed);
    let mut elements = k.basis().to_vec();
    for _ in 0..samples {
        elements.push(k.random_element_with(&mut rng));
    }
    let mut worst: f64 = 0.0;
    for (i, a) in elements.iter().enumerate() {
        let sa = s.apply(a)?;
        let na = a.hs_norm();
        let star = &s.apply(&a.adjoint())? - &sa.adjoint();
        worst = worst.max(star.hs_norm() / na);
        for b in &elements[i..] {
            let sb = s.apply(b)?;
            let lhs = s.apply(&jordan_product(a, b)?)?;
            let rhs = jordan_product(&sa, &sb)?;
            worst = worst.max((&lhs - &rhs).hs_norm() / (na * b.hs_norm()));
        }
    }
    Ok(worst)
}

/// Operator norms of `Sᵏ` restricted to `K^⊥`, `k = 1..=steps`; empty when
/// `K^⊥ = {0}`.
pub fn sweeping_norms(s: &SuperOperator, k: &HSSubspace, steps: usize) -> Vec<f64> {
    let complement = k.complement();
    if complement.dim() == 0 {
        return Vec::new();
    }
    let q = complement.projector();
    let mut power = ComplexMatrix::identity(q.rows());
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        power = &power * s.action();
        let restricted = &power * &q;
        let gram = &restricted.adjoint() * &restricted;
        out.push(jacobi(&gram).max().max(0.0).sqrt());
    }
    out
}

/// Stable-algebra class of a bistochastic map of `M₃`, read against the
/// classes an extremal map may have (`C𝟏`, `C P₁₂ ⊕ C P₃`, `M₃`).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassificationEvidence {
    pub jordan_class: JordanClass,
    pub dimension: usize,
    /// `false` means the map cannot be extremal; `true` is only consistent
    /// with extremality, not a proof of it.
    pub extremal_candidate: bool,
    pub note: String,
}

pub fn classification_evidence(s: &SuperOperator, tol: f64) -> Result<ClassificationEvidence> {
    if s.n() != 3 {
        return Err(Error::InvalidArgument(format!("expected a map on M3, got M{}", s.n())));
    }
    let k = compute_stable_subspace(s, tol)?;
    let jordan_class = classify_jordan_subalgebra(&k, VERIFY_FACTOR * tol)?;
    let extremal_candidate = jordan_class.allows_extremal();
    let note = if jordan_class == JordanClass::Trivial {
        "stable algebra C1: strongly ergodic; consistent with extremality".into()
    } else if extremal_candidate {
        format!("stable algebra {jordan_class}: consistent with extremality")
    } else {
        format!("stable algebra {jordan_class} contains three orthogonal rank-one projections: not extremal")
    };
    Ok(ClassificationEvidence { jordan_class, dimension: k.dim(), extremal_candidate, note })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p12() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, 1.0, 0.0])
    }

    fn p3() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[0.0, 0.0, 1.0])
    }

    #[test]
    fn identity_map_has_full_stable_subspace() {
        let k = compute_stable_subspace(&SuperOperator::identity(3), 1e-9).unwrap();
        assert_eq!(k.dim(), 9);
        assert_eq!(classify_jordan_subalgebra(&k, 1e-9).unwrap(), JordanClass::Full);
    }

    #[test]
    fn spectral_projections_split_p12_plus_2p3() {
        let a = &p12() + &p3().scale_real(2.0);
        let parts = spectral_projections(&a, 1e-9).unwrap();
        assert_eq!(parts.len(), 2);
        assert!((parts[0].0 - 1.0).abs() < 1e-12);
        assert!((&parts[0].1 - &p12()).hs_norm() < 1e-12);
        assert!((parts[1].0 - 2.0).abs() < 1e-12);
        assert!((&parts[1].1 - &p3()).hs_norm() < 1e-12);
    }

    #[test]
    fn classify_requires_identity() {
        let k = HSSubspace::new(3, alloc::vec![p3()], 1e-9).unwrap();
        assert!(matches!(classify_jordan_subalgebra(&k, 1e-9), Err(Error::MissingIdentity { .. })));
    }

    #[test]
    fn non_commutative_two_dim_is_unrecognized() {
        // span{𝟏, E₁₂ + E₂₁} is a commutative Jordan algebra, fine; but
        // span{𝟏, E₁₂} is not *-closed.
        let id = ComplexMatrix::identity(3);
        let k = HSSubspace::from_spanning(3, &[id, ComplexMatrix::unit(3, 0, 1)], 1e-12).unwrap();
        assert_eq!(classify_jordan_subalgebra(&k, 1e-9).unwrap(), JordanClass::Unrecognized);
    }

    #[test]
    fn rejects_non_orthonormal_basis() {
        assert!(matches!(
            HSSubspace::new(3, alloc::vec![p12()], 1e-9),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn conditional_expectation_rejects_non_algebra() {
        let k = HSSubspace::new(3, alloc::vec![ComplexMatrix::unit(3, 0, 1)], 1e-9).unwrap();
        assert!(conditional_expectation(&k, 1e-9).is_err());
    }

    #[test]
    fn abs_value_of_matrix_unit() {
        let e12 = ComplexMatrix::unit(3, 0, 1);
        assert_eq!(abs_value(&e12), ComplexMatrix::unit(3, 1, 1));
    }
}
