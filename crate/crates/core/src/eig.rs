//! Hermitian eigendecomposition by cyclic Jacobi rotations, and the PSD
//! tests built on it.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ComplexVector, C64};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching unitary eigenvector
/// matrix (eigenvectors are its columns).
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn eigenvector(&self, i: usize) -> ComplexVector {
        self.eigenvectors.column(i)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `V diag(λ) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `V diag(f(λ)) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails with [`Error::NotHermitian`] when `‖A − A*‖ > tol·max(1, ‖A‖)`.
pub fn hermitian_eig(a: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    a.check_square()?;
    if !a.is_hermitian(tol) {
        return Err(Error::NotHermitian { defect: a.hermitian_defect() });
    }
    Ok(jacobi(&a.hermitian_part()))
}

/// Cyclic Jacobi on the Hermitian part of `a`. Input must be square.
pub(crate) fn jacobi(a: &ComplexMatrix) -> HermitianEig {
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.hs_norm();

    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEig { eigenvalues, eigenvectors }
}

/// One complex Jacobi rotation annihilating `m[p, q]`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let n = m.rows();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Skip rotations below the representable perturbation of the diagonal.
    if abs < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = C64::new(0.0, 0.0);
        m[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / abs;
    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sp = phase * s; // s·e^{iφ}
    let spc = sp.conj(); // s·e^{-iφ}

    // M ← M J with J_pp = J_qq = c, J_pq = s e^{iφ}, J_qp = −s e^{−iφ}.
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c - mkq * spc;
        m[(k, q)] = mkp * sp + mkq * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * spc;
        v[(k, q)] = vkp * sp + vkq * c;
    }
    // M ← J* M.
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c - mqk * sp;
        m[(q, k)] = mpk * spc + mqk * c;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &ComplexMatrix) -> f64 {
    jacobi(a).min()
}

fn psd_threshold(a: &ComplexMatrix, tol: f64) -> f64 {
    -tol * a.hs_norm().max(1.0)
}

/// `true` iff `A` is Hermitian to `tol` and its smallest eigenvalue is at
/// least `−tol·max(1, ‖A‖_HS)`.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> bool {
    if !a.is_square() || !a.is_hermitian(tol) {
        return false;
    }
    min_eigenvalue(a) >= psd_threshold(a, tol)
}

/// PSD test for `[[A, B], [B*, C]]` with `A` the leading `split × split`
/// corner: `A ≥ 0` and `C − B* A⁻¹ B ≥ 0`.
///
/// A singular corner (an eigenvalue within `tol·max(1, ‖M‖)` of zero) makes
/// the range condition `B ∈ ran A` part of the criterion; in that case the
/// verdict falls back to a full eigensolve.
pub fn schur_psd_check(block: &ComplexMatrix, split: usize, tol: f64) -> Result<bool> {
    block.check_square()?;
    if !block.is_hermitian(tol) {
        return Err(Error::NotHermitian { defect: block.hermitian_defect() });
    }
    let n = block.rows();
    if split == 0 || split >= n {
        return Ok(is_psd(block, tol));
    }
    let h = block.hermitian_part();
    let threshold = psd_threshold(&h, tol);
    let a = h.block(0, 0, split, split);
    let b = h.block(0, split, split, n - split);
    let c = h.block(split, split, n - split, n - split);

    let corner = jacobi(&a);
    if corner.min() < threshold {
        return Ok(false);
    }
    if corner.min() <= -threshold {
        return Ok(is_psd(&h, tol));
    }
    let a_inv = corner.reconstruct_with(|x| 1.0 / x);
    let schur = &c - &(&b.adjoint() * &(&a_inv * &b));
    Ok(min_eigenvalue(&schur) >= threshold)
}
