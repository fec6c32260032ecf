use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{re, Real, C};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major storage, rejecting non-square or
    /// non-finite input.
    pub fn from_vec(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidMatrix("matrix is not square".into()));
        }
        Self::from_vec(dim, rows.into_iter().flatten().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| re(T::lit(x))).collect())
                .collect(),
        )
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = re(v);
        }
        m
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn projector(v: &[C<T>]) -> Self {
        Self::from_fn(v.len(), |r, c| v[r] * v[c].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C<T>) {
        self.data[r * self.dim + c] = v;
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C<T>] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |r, c| (self.get(r, c) + self.get(c, r).conj()) * half)
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).map(|i| self.get(i, i)).fold(C::zero(), |a, b| a + b)
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C<T> {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        let n = self.dim;
        let mut acc = C::zero();
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `max |A[r][c] − conj(A[c][r])|`.
    pub fn hermiticity_residual(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() <= T::tol(1e-12) * (T::one() + self.max_abs())
    }

    /// Largest entry-wise difference.
    pub fn max_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "max_diff dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn scale(&self, k: T) -> Self {
        self.map(|z| z * k)
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Kronecker product; no cap is applied here.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut data = vec![C::zero(); dim * dim];
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self.data[r1 * n + c1];
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..m {
                    let row = (r1 * m + r2) * dim + c1 * m;
                    let src = &other.data[r2 * m..(r2 + 1) * m];
                    for (dst, b) in data[row..row + m].iter_mut().zip(src) {
                        *dst = a * *b;
                    }
                }
            }
        }
        Self { dim, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![C::zero(); n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *o += a * *b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// `⟨v|A|v⟩`.
    pub fn quadratic_form(&self, v: &[C<T>]) -> C<T> {
        let n = self.dim;
        let mut acc = C::zero();
        for (r, vr) in v.iter().enumerate().take(n) {
            let row: C<T> = self.data[r * n..(r + 1) * n]
                .iter()
                .zip(v)
                .map(|(&a, &b)| a * b)
                .fold(C::zero(), |s, x| s + x);
            acc += vr.conj() * row;
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<T: Real> AddAssign<&ComplexMatrix<T>> for ComplexMatrix<T> {
    fn add_assign(&mut self, rhs: &ComplexMatrix<T>) {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
    }
}

impl<T: Real> SubAssign<&ComplexMatrix<T>> for ComplexMatrix<T> {
    fn sub_assign(&mut self, rhs: &ComplexMatrix<T>) {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Mul<T> for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, k: T) -> ComplexMatrix<T> {
        self.scale(k)
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}
