//! Choi–Jamiołkowski entanglement witnesses `W_S = Σ E_ij ⊗ S(E_ij)`, PPT
//! tests, and construction of states a witness detects.

use alloc::format;
use alloc::vec::Vec;


use crate::eig::{is_psd, jacobi};
use crate::error::{Error, Result};
use crate::matrix::{partial_transpose, ComplexMatrix, ComplexVector, C64};
use crate::superop::SuperOperator;

/// Stored and recomputed witness values must agree to this tolerance.
pub const CERTIFICATE_TOL: f64 = 1e-12;

/// Witness matrix on `Cⁿ ⊗ Cⁿ`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    pub n: usize,
    pub matrix: ComplexMatrix,
}

impl Witness {
    pub fn min_eigenvalue(&self) -> f64 {
        jacobi(&self.matrix).min()
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        is_psd(&self.matrix, tol)
    }
}

/// Positive semidefinite matrix of unit trace.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and `Tr ρ = 1`, each to `tol`.
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotDensityMatrix { reason: "matrix is not square".into() });
        }
        if !matrix.is_hermitian(tol) {
            return Err(Error::NotDensityMatrix {
                reason: format!("not Hermitian (defect {:e})", matrix.hermitian_defect()),
            });
        }
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::NotDensityMatrix { reason: format!("trace {} differs from 1", trace.re) });
        }
        let min = jacobi(&matrix).min();
        if min < -tol {
            return Err(Error::NotDensityMatrix { reason: format!("negative eigenvalue {min:e}") });
        }
        Ok(Self { matrix })
    }

    /// `ξξ*/‖ξ‖²`.
    pub fn pure(xi: &ComplexVector) -> Result<Self> {
        let v = xi.normalized()?;
        Ok(Self { matrix: v.outer(&v) })
    }

    /// `𝟏/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Raw {
            matrix: ComplexMatrix,
        }
        let raw = Raw::deserialize(d)?;
        DensityMatrix::new(raw.matrix, crate::DEFAULT_TOL).map_err(serde::de::Error::custom)
    }
}

/// A state together with the witness value that detects it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectionCertificate {
    pub state: DensityMatrix,
    pub witness_value: f64,
    pub ppt: bool,
}

impl DetectionCertificate {
    /// Recomputes `Tr(Wρ)` and the PPT flag and checks both against the
    /// stored values; the value must also be negative.
    pub fn verify(&self, w: &Witness, tol: f64) -> Result<()> {
        let value = evaluate(w, &self.state, tol)?;
        if (value - self.witness_value).abs() > CERTIFICATE_TOL {
            return Err(Error::InvalidArgument(format!(
                "stored witness value {} does not match recomputed {value}",
                self.witness_value
            )));
        }
        if value >= 0.0 {
            return Err(Error::DetectionFailed { value });
        }
        if is_ppt(&self.state, (w.n, w.n), tol)? != self.ppt {
            return Err(Error::InvalidArgument("stored PPT flag does not match".into()));
        }
        Ok(())
    }
}

/// `W_S = Σ E_ij ⊗ S(E_ij)`, the Choi matrix of `S`.
pub fn build_witness(s: &SuperOperator, tol: f64) -> Result<Witness> {
    if !s.is_hermiticity_preserving(tol) {
        return Err(Error::NotHermiticityPreserving { defect: s.hermiticity_defect() });
    }
    Ok(Witness { n: s.n(), matrix: s.choi() })
}

/// `Re Tr(Wρ)`; fails if the imaginary part exceeds `tol`.
pub fn evaluate(w: &Witness, rho: &DensityMatrix, tol: f64) -> Result<f64> {
    let (a, b) = (&w.matrix, rho.matrix());
    if !a.same_shape(b) {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0} state", a.rows()),
            found: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    let d = a.rows();
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            sum += a[(i, j)] * b[(j, i)];
        }
    }
    if sum.im.abs() > tol * a.hs_norm().max(1.0) {
        return Err(Error::InvalidArgument(format!("Tr(W rho) has imaginary part {:e}", sum.im)));
    }
    Ok(sum.re)
}

/// Whether the partial transpose on the second factor is PSD to `tol`.
pub fn is_ppt(rho: &DensityMatrix, dims: (usize, usize), tol: f64) -> Result<bool> {
    Ok(is_psd(&partial_transpose(rho.matrix(), dims)?, tol))
}

/// Eigenpairs of `W` with eigenvalue below `−tol`, ascending.
pub fn negative_eigenspace(w: &Witness, tol: f64) -> (Vec<f64>, Vec<ComplexVector>) {
    let eig = jacobi(&w.matrix);
    eig.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam < -tol)
        .map(|(i, &lam)| (lam, eig.eigenvector(i)))
        .unzip()
}

/// Builds `ρ = λ P_v + (1 − λ) ρ₀′` where `v` is the eigenvector of the
/// most negative eigenvalue of `W` and `ρ₀′` is `ρ₀` compressed to `v^⊥`
/// and renormalized. For `λ = 1`, `ρ₀` is ignored.
///
/// Fails if `W` has no eigenvalue below `−tol`, if `ρ₀` lives entirely on
/// `v`, or if the resulting state is not detected (`Tr(Wρ) ≥ 0`).
pub fn construct_detected_state(
    w: &Witness,
    rho0: &DensityMatrix,
    lambda: f64,
    tol: f64,
) -> Result<DetectionCertificate> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidArgument(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    let (_, vectors) = negative_eigenspace(w, tol);
    let v = match vectors.first() {
        Some(v) => v,
        None => return Err(Error::NoNegativeEigenvalue { min_eigenvalue: w.min_eigenvalue() }),
    };
    let d = w.matrix.rows();
    let pv = v.outer(v);
    let mut rho = pv.scale_real(lambda);
    if lambda < 1.0 {
        if rho0.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d} state"),
                found: format!("{0}x{0}", rho0.dim()),
            });
        }
        let q = &ComplexMatrix::identity(d) - &pv;
        let compressed = &(&q * rho0.matrix()) * &q;
        let weight = compressed.trace().re;
        if weight <= tol {
            return Err(Error::InvalidArgument(
                "rho0 has no weight off the negative eigenvector".into(),
            ));
        }
        rho = &rho + &compressed.scale_real((1.0 - lambda) / weight);
    }
    let state = DensityMatrix { matrix: rho.hermitian_part() };
    let witness_value = evaluate(w, &state, tol)?;
    if witness_value >= 0.0 {
        return Err(Error::DetectionFailed { value: witness_value });
    }
    let ppt = is_ppt(&state, (w.n, w.n), tol)?;
    Ok(DetectionCertificate { state, witness_value, ppt })
}

fn sparse_state(scale: f64, diag: &[usize], off: &[(usize, usize, f64)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(9, 9);
    for &i in diag {
        m[(i, i)] = C64::new(scale, 0.0);
    }
    for &(i, j, x) in off {
        m[(i, j)] = C64::new(scale * x, 0.0);
        m[(j, i)] = C64::new(scale * x, 0.0);
    }
    m
}

/// The PPT entangled state on `C³ ⊗ C³` detected by the witness of
/// [`crate::zoo::two_block_map`]: weight `1/7` on the diagonal entries
/// `0, 2, 4, 5, 6, 7, 8` and `−1/7` on the couplings `(0, 8)` and `(5, 7)`.
pub fn ppt_entangled_state() -> DensityMatrix {
    DensityMatrix {
        matrix: sparse_state(1.0 / 7.0, &[0, 2, 4, 5, 6, 7, 8], &[(0, 8, -1.0), (5, 7, -1.0)]),
    }
}

/// Mixing weight and background state that make [`construct_detected_state`]
/// reproduce [`ppt_entangled_state`]: `λ = 2/7` and `ρ₀` uniform over
/// `0, 2, 4, 6, 8` with coupling `−1/5` on `(0, 8)`.
pub fn ppt_state_recipe() -> (f64, DensityMatrix) {
    let rho0 = DensityMatrix { matrix: sparse_state(0.2, &[0, 2, 4, 6, 8], &[(0, 8, -1.0)]) };
    (2.0 / 7.0, rho0)
}
