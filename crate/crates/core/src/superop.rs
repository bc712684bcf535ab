//! Linear maps `Mₙ → Mₙ` acting on the Hilbert–Schmidt space.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::eig::jacobi;
use crate::error::{Error, Result};
use crate::matrix::{tensor, ComplexMatrix, ComplexVector};

/// A linear map on `Mₙ`, stored as its `n² × n²` action matrix on
/// column-stacked vectors: `vec(S(A)) = action · vec(A)` with
/// `vec(A)[i + j·n] = A[i, j]`.
///
/// Column-stacking is an isometry for the Hilbert–Schmidt inner product, so
/// the HS adjoint `S*` is the conjugate transpose of the action matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    n: usize,
    action: ComplexMatrix,
}

impl SuperOperator {
    /// Wraps an `n² × n²` action matrix.
    pub fn from_action(n: usize, action: ComplexMatrix) -> Result<Self> {
        if n == 0 || action.rows() != n * n || action.cols() != n * n {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0} action matrix", n * n),
                found: format!("{}x{}", action.rows(), action.cols()),
            });
        }
        Ok(Self { n, action })
    }

    /// Map determined by the images of the matrix units. `images[j·n + k]`
    /// is `S(E_jk)` (0-based, row-major over `(j, k)`).
    pub fn from_basis_images(n: usize, images: &[ComplexMatrix]) -> Result<Self> {
        if n == 0 || images.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: format!("{} images", n * n),
                found: format!("{} images", images.len()),
            });
        }
        let nn = n * n;
        let mut action = ComplexMatrix::zeros(nn, nn);
        for j in 0..n {
            for k in 0..n {
                let img = &images[j * n + k];
                if img.rows() != n || img.cols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: format!("{n}x{n} image"),
                        found: format!("{}x{} image of E_{j}{k}", img.rows(), img.cols()),
                    });
                }
                let col = j + k * n;
                for (row, z) in img.vectorize().as_slice().iter().enumerate() {
                    action[(row, col)] = *z;
                }
            }
        }
        Ok(Self { n, action })
    }

    /// Map given by a closure, evaluated on the matrix units.
    pub fn from_fn(n: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let images: Vec<ComplexMatrix> =
            (0..n * n).map(|idx| f(&ComplexMatrix::unit(n, idx / n, idx % n))).collect();
        Self::from_basis_images(n, &images).expect("closure must map Mₙ to Mₙ")
    }

    /// Map from its Choi matrix `Σ E_ij ⊗ S(E_ij)`: block `(i, j)` is `S(E_ij)`.
    pub fn from_choi(n: usize, choi: &ComplexMatrix) -> Result<Self> {
        if n == 0 || choi.rows() != n * n || choi.cols() != n * n {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0} Choi matrix", n * n),
                found: format!("{}x{}", choi.rows(), choi.cols()),
            });
        }
        let images: Vec<ComplexMatrix> =
            (0..n * n).map(|idx| choi.block((idx / n) * n, (idx % n) * n, n, n)).collect();
        Self::from_basis_images(n, &images)
    }

    pub fn identity(n: usize) -> Self {
        Self { n, action: ComplexMatrix::identity(n * n) }
    }

    /// Transposition `t: A ↦ Aᵗ`.
    pub fn transposition(n: usize) -> Self {
        Self::from_fn(n, |a| a.transpose())
    }

    /// `A ↦ U A U*`.
    pub fn conjugation(u: &ComplexMatrix) -> Result<Self> {
        u.check_square()?;
        let ua = u.adjoint();
        Ok(Self::from_fn(u.rows(), |a| &(u * a) * &ua))
    }

    /// `A ↦ Σ K_i A K_i*`.
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidArgument("no Kraus operators".into()))?;
        first.check_square()?;
        for k in kraus {
            first.check_same_shape(k)?;
        }
        let n = first.rows();
        Ok(Self::from_fn(n, |a| {
            kraus.iter().fold(ComplexMatrix::zeros(n, n), |acc, k| &acc + &(&(k * a) * &k.adjoint()))
        }))
    }

    /// Side size `n` of `Mₙ`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn action(&self) -> &ComplexMatrix {
        &self.action
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", self.n),
                found: format!("{}x{}", a.rows(), a.cols()),
            });
        }
        let v = self.action.mul_vec(&a.vectorize())?;
        ComplexMatrix::unvectorize(&v, self.n)
    }

    /// Image of the matrix unit `E_jk`.
    pub fn image(&self, j: usize, k: usize) -> ComplexMatrix {
        let col = self.action.column(j + k * self.n);
        ComplexMatrix::unvectorize(&col, self.n).expect("column has n² entries")
    }

    /// HS adjoint: `Tr S*(A)* B = Tr A* S(B)`.
    pub fn adjoint(&self) -> Self {
        Self { n: self.n, action: self.action.adjoint() }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        Ok(Self { n: self.n, action: &self.action * &other.action })
    }

    /// `Sᵏ`, with `S⁰` the identity map.
    pub fn power(&self, k: u32) -> Self {
        let mut result = ComplexMatrix::identity(self.n * self.n);
        let mut base = self.action.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Self { n: self.n, action: result }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        Ok(Self { n: self.n, action: &self.action + &other.action })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        Ok(Self { n: self.n, action: &self.action - &other.action })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, action: self.action.scale_real(s) }
    }

    /// Operator norm on the HS space (largest singular value of the action).
    pub fn operator_norm(&self) -> f64 {
        let gram = &self.action.adjoint() * &self.action;
        jacobi(&gram).max().max(0.0).sqrt()
    }

    /// Choi matrix `Σ E_ij ⊗ S(E_ij)`; block `(i, j)` is `S(E_ij)`.
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                out = &out + &tensor(&ComplexMatrix::unit(n, i, j), &self.image(i, j));
            }
        }
        out
    }

    /// `max_jk ‖S(E_kj) − S(E_jk)*‖_HS`; zero for Hermiticity-preserving maps.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let d = &self.image(k, j) - &self.image(j, k).adjoint();
                worst = worst.max(d.hs_norm());
            }
        }
        worst
    }

    /// `S(A*) = S(A)*` for every `A`, to tolerance.
    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.action.max_abs().max(1.0)
    }

    /// Applies `I_k ⊗ S` to a `kn × kn` matrix block-wise.
    pub fn apply_ampliated(&self, k: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.n;
        if x.rows() != k * n || x.cols() != k * n {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", k * n),
                found: format!("{}x{}", x.rows(), x.cols()),
            });
        }
        let mut out = ComplexMatrix::zeros(k * n, k * n);
        for bi in 0..k {
            for bj in 0..k {
                let img = self.apply(&x.block(bi * n, bj * n, n, n))?;
                for r in 0..n {
                    for c in 0..n {
                        out[(bi * n + r, bj * n + c)] = img[(r, c)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `S(ηη*)` without forming the rank-one matrix separately.
    pub(crate) fn apply_rank_one(&self, eta: &ComplexVector) -> ComplexMatrix {
        self.apply(&eta.outer(eta)).expect("vector dimension matches n")
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: format!("map on M{}", self.n),
                found: format!("map on M{}", other.n),
            })
        }
    }
}
