//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//!
//! Each rotation zeroes one off-diagonal pair `(p, q)`. Writing
//! `A[p][q] = r·e^{iφ}`, the 2×2 block is `D† R D` with `D = diag(1, e^{iφ})`
//! and `R` real symmetric, so the complex rotation is the real Givens rotation
//! diagonalizing `R` composed with the phase `D†`.

use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{re, Real, C};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues in nondecreasing order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        let n = self.vectors.dim();
        (0..n).map(|r| self.vectors.get(r, k)).collect()
    }

    /// `V f(Λ) V†`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.vectors.dim();
        let weights: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for c in r..n {
                let mut acc = C::zero();
                for (k, &w) in weights.iter().enumerate() {
                    if w != T::zero() {
                        acc += self.vectors.get(r, k) * self.vectors.get(c, k).conj() * w;
                    }
                }
                out.set(r, c, acc);
                out.set(c, r, acc.conj());
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.apply(|l| l)
    }

    /// Projector onto the span of eigenvectors with eigenvalue `> threshold`.
    pub fn projector_above(&self, threshold: T) -> ComplexMatrix<T> {
        self.apply(|l| if l > threshold { T::one() } else { T::zero() })
    }

    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.abs()).fold(T::zero(), T::max)
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Rejects non-Hermitian input and verifies the reconstruction residual
/// `‖A − VΛV†‖_max ≤ 1e−10·(1 + ‖A‖_max)` before returning.
pub fn hermitian_eigen<T: Real>(a: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let residual = a.hermiticity_residual();
    let scale = a.max_abs();
    if residual > T::tol(1e-12) * (T::one() + scale) {
        return Err(Error::NotHermitian {
            residual: residual.to_f64_lossy(),
        });
    }
    let sym = a.hermitian_part();
    let eig = jacobi(&sym)?;

    let bound = T::tol(1e-10) * (T::one() + scale);
    let err = eig.reconstruct().max_diff(&sym);
    if err > bound {
        return Err(Error::EigenResidual {
            residual: err.to_f64_lossy(),
            bound: bound.to_f64_lossy(),
        });
    }
    Ok(eig)
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<T>> {
    hermitian_eigen(a).map(|e| e.values)
}

fn jacobi<T: Real>(input: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let n = input.dim();
    let mut a: Vec<C<T>> = input.as_slice().to_vec();
    let mut v = ComplexMatrix::<T>::identity(n);
    let mut vd: Vec<C<T>> = v.as_slice().to_vec();

    let norm = input.frobenius();
    let target = T::tol(1e-14) * norm;
    let two = T::lit(2.0);

    let mut sweep = 0;
    loop {
        let off = off_diagonal(&a, n);
        if n <= 1 || norm == T::zero() || off <= target {
            break;
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::EigenNotConverged {
                sweeps: sweep,
                off: off.to_f64_lossy(),
            });
        }
        sweep += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let z = a[p * n + q];
                let r = z.norm();
                if r == T::zero() {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (two * r).atan2(aqq - app) * T::lit(0.5);
                let (s, c) = theta.sin_cos();
                let ub = (z / r).conj();
                let ubs = ub * s;
                let ubc = ub * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let nkp = akp * c - akq * ubs;
                    let nkq = akp * s + akq * ubc;
                    a[k * n + p] = nkp;
                    a[k * n + q] = nkq;
                    a[p * n + k] = nkp.conj();
                    a[q * n + k] = nkq.conj();
                }
                let cs_r = two * c * s * r;
                a[p * n + p] = re(c * c * app - cs_r + s * s * aqq);
                a[q * n + q] = re(s * s * app + cs_r + c * c * aqq);
                a[p * n + q] = C::zero();
                a[q * n + p] = C::zero();

                for k in 0..n {
                    let vkp = vd[k * n + p];
                    let vkq = vd[k * n + q];
                    vd[k * n + p] = vkp * c - vkq * ubs;
                    vd[k * n + q] = vkp * s + vkq * ubc;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.partial_cmp(&a[j * n + j].re).unwrap());
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    v = ComplexMatrix::from_fn(n, |r, k| vd[r * n + order[k]]);
    Ok(HermitianEigen { values, vectors: v })
}

fn off_diagonal<T: Real>(a: &[C<T>], n: usize) -> T {
    let mut acc = T::zero();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += a[r * n + c].norm_sqr();
            }
        }
    }
    acc.sqrt()
}
