//! Canonical example maps, the unital Jordan subalgebras of `M₃`, and seeded
//! random generators.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ComplexVector, C64};
use crate::random::{gaussian_matrix, random_unitary, seeded_rng};
use crate::stable::{conditional_expectation, HSSubspace, JordanClass};
use crate::superop::SuperOperator;

/// Bistochastic, extremal and atomic map on `M₃` whose stable subspace is
/// `C P₁₂ ⊕ C P₃`:
///
/// ```text
///        ⎡ (a₁₁+a₂₂)/2       0        a₁₃/√2 ⎤
/// S(A) = ⎢      0       (a₁₁+a₂₂)/2   a₃₂/√2 ⎥
///        ⎣   a₃₁/√2        a₂₃/√2      a₃₃   ⎦
/// ```
pub fn two_block_map() -> SuperOperator {
    SuperOperator::from_fn(3, |a| {
        let mut out = ComplexMatrix::zeros(3, 3);
        let half_trace = (a[(0, 0)] + a[(1, 1)]) * 0.5;
        out[(0, 0)] = half_trace;
        out[(1, 1)] = half_trace;
        out[(0, 2)] = a[(0, 2)] * FRAC_1_SQRT_2;
        out[(1, 2)] = a[(2, 1)] * FRAC_1_SQRT_2;
        out[(2, 0)] = a[(2, 0)] * FRAC_1_SQRT_2;
        out[(2, 1)] = a[(1, 2)] * FRAC_1_SQRT_2;
        out[(2, 2)] = a[(2, 2)];
        out
    })
}

/// Choi's positive, non-decomposable map on `M₃`, scaled to be
/// bistochastic: `A ↦ ½(2·diag(A) + diag(a₃₃, a₁₁, a₂₂) − A)`.
pub fn choi_map() -> SuperOperator {
    SuperOperator::from_fn(3, |a| {
        ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                (a[(i, i)] + a[((i + 2) % 3, (i + 2) % 3)]) * 0.5
            } else {
                -a[(i, j)] * 0.5
            }
        })
    })
}

/// `A ↦ UAU*`, or `A ↦ UAᵗU*` when `transposed`.
pub fn jordan_automorphism(u: &ComplexMatrix, transposed: bool, tol: f64) -> Result<SuperOperator> {
    u.check_square()?;
    let n = u.rows();
    let defect = (&(&u.adjoint() * u) - &ComplexMatrix::identity(n)).hs_norm();
    if defect > tol {
        return Err(Error::NotUnitary { defect });
    }
    let conj = SuperOperator::conjugation(u)?;
    if transposed {
        conj.compose(&SuperOperator::transposition(n))
    } else {
        Ok(conj)
    }
}

/// `A ↦ Tr(A)·𝟏/n`.
pub fn trace_map(n: usize) -> SuperOperator {
    SuperOperator::from_fn(n, |a| ComplexMatrix::identity(n).scale(a.trace() / n as f64))
}

/// `A ↦ diag(a₁₁, …, aₙₙ)`.
pub fn pinching(n: usize) -> SuperOperator {
    SuperOperator::from_fn(n, |a| ComplexMatrix::from_fn(n, n, |i, j| if i == j { a[(i, i)] } else { C64::new(0.0, 0.0) }))
}

fn symmetric_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    (&ComplexMatrix::unit(n, i, j) + &ComplexMatrix::unit(n, j, i)).scale_real(FRAC_1_SQRT_2)
}

fn diag_unit(n: usize, entries: &[usize]) -> ComplexMatrix {
    let mut d = vec![0.0; n];
    let w = 1.0 / (entries.len() as f64).sqrt();
    for &i in entries {
        d[i] = w;
    }
    ComplexMatrix::diag_real(&d)
}

/// Orthonormal basis of the given subalgebra class of `M₃`, in its standard
/// position.
pub fn subalgebra(class: JordanClass) -> Result<HSSubspace> {
    let e = |i, j| ComplexMatrix::unit(3, i, j);
    let basis = match class {
        JordanClass::Trivial => vec![diag_unit(3, &[0, 1, 2])],
        JordanClass::TwoBlock => vec![diag_unit(3, &[0, 1]), e(2, 2)],
        JordanClass::Diagonal => vec![e(0, 0), e(1, 1), e(2, 2)],
        JordanClass::SymmetricM2PlusC => vec![e(0, 0), e(1, 1), symmetric_unit(3, 0, 1), e(2, 2)],
        JordanClass::M2PlusC => vec![e(0, 0), e(0, 1), e(1, 0), e(1, 1), e(2, 2)],
        JordanClass::SymmetricM3 => vec![
            e(0, 0),
            e(1, 1),
            e(2, 2),
            symmetric_unit(3, 0, 1),
            symmetric_unit(3, 0, 2),
            symmetric_unit(3, 1, 2),
        ],
        JordanClass::Full => return Ok(HSSubspace::full(3)),
        JordanClass::Unrecognized => {
            return Err(Error::InvalidArgument("no canonical basis for an unrecognized class".into()))
        }
    };
    HSSubspace::new(3, basis, 1e-12)
}

/// The seven unital Jordan `*`-subalgebras of `M₃` up to isomorphism, in
/// order of dimension `1, 2, 3, 4, 5, 6, 9`.
pub fn canonical_subalgebras() -> Vec<(JordanClass, HSSubspace)> {
    JordanClass::ALL
        .iter()
        .map(|&c| (c, subalgebra(c).expect("canonical classes have bases")))
        .collect()
}

/// `V·K·V*` for a unitary `V`.
pub fn rotate_subspace(k: &HSSubspace, v: &ComplexMatrix) -> Result<HSSubspace> {
    let va = v.adjoint();
    let rotated: Vec<ComplexMatrix> = k.basis().iter().map(|b| &(v * b) * &va).collect();
    HSSubspace::new(k.n(), rotated, 1e-10)
}

/// Scalar, diagonal or full subalgebra of `Mₙ`, for generators at `n ≠ 3`.
fn generic_subalgebra(n: usize, kind: u32) -> HSSubspace {
    match kind {
        0 => HSSubspace::new(n, vec![diag_unit(n, &(0..n).collect::<Vec<_>>())], 1e-12).expect("unit norm"),
        1 => HSSubspace::new(n, (0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect(), 1e-12).expect("orthonormal"),
        _ => HSSubspace::full(n),
    }
}

/// Convex combination of `components` random bistochastic maps. Component 0
/// is a unitary conjugation; the rest are conjugations, transposed
/// conjugations, or conditional expectations onto randomly rotated
/// subalgebras. Weights are uniform on the simplex. Deterministic per seed.
pub fn random_bistochastic(n: usize, components: usize, seed: u64) -> Result<SuperOperator> {
    if n == 0 || components == 0 {
        return Err(Error::InvalidArgument("need n ≥ 1 and at least one component".into()));
    }
    let mut rng = seeded_rng(seed);
    let weights: Vec<f64> = (0..components).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = SuperOperator::from_action(n, ComplexMatrix::zeros(n * n, n * n))?;
    for (c, w) in weights.iter().enumerate() {
        let kind = if c == 0 { 0 } else { rng.random_range(0..3u32) };
        let u = random_unitary(&mut rng, n);
        let term = match kind {
            0 => SuperOperator::conjugation(&u)?,
            1 => jordan_automorphism(&u, true, 1e-9)?,
            _ => {
                let k = if n == 3 {
                    let class = JordanClass::ALL[rng.random_range(0..JordanClass::ALL.len())];
                    subalgebra(class)?
                } else {
                    generic_subalgebra(n, rng.random_range(0..3u32))
                };
                conditional_expectation(&rotate_subspace(&k, &u)?, 1e-9)?
            }
        };
        acc = acc.add(&term.scale(w / total))?;
    }
    Ok(acc)
}

/// `A ↦ Σ KᵢAKᵢ*` with `count` complex Gaussian Kraus operators; completely
/// positive, generally neither unital nor trace-preserving.
pub fn random_kraus_map(n: usize, count: usize, seed: u64) -> Result<SuperOperator> {
    let mut rng = seeded_rng(seed);
    let scale = 1.0 / ((n * count.max(1)) as f64).sqrt();
    let kraus: Vec<ComplexMatrix> = (0..count).map(|_| gaussian_matrix(&mut rng, n, n).scale_real(scale)).collect();
    SuperOperator::from_kraus(&kraus)
}

/// `Tr[P(−2υ, ‖η‖²) · S(P(η, 1))]` for `η ∈ C²`, where `P(ξ) = ξξ*` on
/// `C³` and `υ = (P̂₁η + P̂₂η̄)/√2`. Vanishes identically for
/// [`two_block_map`].
pub fn zero_trace_residual(s: &SuperOperator, eta: [C64; 2]) -> Result<f64> {
    if s.n() != 3 {
        return Err(Error::InvalidArgument(format!("expected a map on M3, got M{}", s.n())));
    }
    let norm2 = eta[0].norm_sqr() + eta[1].norm_sqr();
    let upsilon = [eta[0] * FRAC_1_SQRT_2, eta[1].conj() * FRAC_1_SQRT_2];
    let x = ComplexVector::new(vec![upsilon[0] * -2.0, upsilon[1] * -2.0, C64::new(norm2, 0.0)]);
    let y = ComplexVector::new(vec![eta[0], eta[1], C64::new(1.0, 0.0)]);
    let image = s.apply(&y.outer(&y))?;
    let v = image.mul_vec(&x)?;
    Ok(x.dot(&v).norm())
}

/// Named maps available from the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum MapSpec {
    TwoBlock,
    Choi,
    Transpose { n: usize },
    Identity { n: usize },
    UnitaryConj { n: usize, seed: u64 },
    Trace { n: usize },
    Pinching { n: usize },
    Random { n: usize, components: usize, seed: u64 },
}

impl MapSpec {
    /// Names accepted by [`MapSpec::from_str`].
    pub const NAMES: [&'static str; 7] =
        ["two-block", "choi", "transpose", "identity", "unitary-conj", "trace", "pinching"];

    pub fn build(&self) -> Result<SuperOperator> {
        Ok(match *self {
            MapSpec::TwoBlock => two_block_map(),
            MapSpec::Choi => choi_map(),
            MapSpec::Transpose { n } => SuperOperator::transposition(n),
            MapSpec::Identity { n } => SuperOperator::identity(n),
            MapSpec::UnitaryConj { n, seed } => SuperOperator::conjugation(&random_unitary(&mut seeded_rng(seed), n))?,
            MapSpec::Trace { n } => trace_map(n),
            MapSpec::Pinching { n } => pinching(n),
            MapSpec::Random { n, components, seed } => random_bistochastic(n, components, seed)?,
        })
    }

    pub fn n(&self) -> usize {
        match *self {
            MapSpec::TwoBlock | MapSpec::Choi => 3,
            MapSpec::Transpose { n }
            | MapSpec::Identity { n }
            | MapSpec::UnitaryConj { n, .. }
            | MapSpec::Trace { n }
            | MapSpec::Pinching { n }
            | MapSpec::Random { n, .. } => n,
        }
    }
}

impl FromStr for MapSpec {
    type Err = Error;

    /// Parses a zoo name; all named maps act on `M₃`. `random:<components>:<seed>`
    /// selects [`random_bistochastic`].
    fn from_str(name: &str) -> Result<Self> {
        let n = 3;
        Ok(match name {
            "two-block" | "paper-s" => MapSpec::TwoBlock,
            "choi" => MapSpec::Choi,
            "transpose" => MapSpec::Transpose { n },
            "identity" => MapSpec::Identity { n },
            "unitary-conj" => MapSpec::UnitaryConj { n, seed: 7 },
            "trace" => MapSpec::Trace { n },
            "pinching" => MapSpec::Pinching { n },
            other => {
                let parts: Vec<&str> = other.split(':').collect();
                match parts.as_slice() {
                    ["random", c, s] => {
                        let components = c.parse().map_err(|_| unknown(other))?;
                        let seed = s.parse().map_err(|_| unknown(other))?;
                        MapSpec::Random { n, components, seed }
                    }
                    _ => return Err(unknown(other)),
                }
            }
        })
    }
}

fn unknown(name: &str) -> Error {
    Error::InvalidArgument(format!("unknown map '{name}'"))
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::TwoBlock => f.write_str("two-block"),
            MapSpec::Choi => f.write_str("choi"),
            MapSpec::Transpose { .. } => f.write_str("transpose"),
            MapSpec::Identity { .. } => f.write_str("identity"),
            MapSpec::UnitaryConj { .. } => f.write_str("unitary-conj"),
            MapSpec::Trace { .. } => f.write_str("trace"),
            MapSpec::Pinching { .. } => f.write_str("pinching"),
            MapSpec::Random { components, seed, .. } => write!(f, "random:{components}:{seed}"),
        }
    }
}

/// Every named zoo map with its name.
pub fn named_maps() -> Vec<(String, SuperOperator)> {
    MapSpec::NAMES
        .iter()
        .map(|name| {
            let spec: MapSpec = name.parse().expect("listed names parse");
            (String::from(*name), spec.build().expect("zoo maps build"))
        })
        .collect()
}
