use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest dimension any matrix or state vector may have (16 qubits).
pub const MAX_DIM: usize = 1 << 16;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::one();
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Real-valued matrix literal, mostly for gates and tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let c = rows.first().map_or(0, |r| r.len());
        Self::from_fn(n, c, |i, j| Complex::new(T::lit(rows[i][j]), T::zero()))
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = Complex::new(*v, T::zero());
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex<T>>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        Ok(Self::from_fn(rows, cols, |r, c| columns[c][r]))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|r| self.data[r * self.cols + c]).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[Complex<T>]) {
        for (r, z) in v.iter().enumerate() {
            self.data[r * self.cols + c] = *z;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(Complex::zero(), |a, b| a + b)
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `‖self − other‖_max`; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.rows != other.rows || self.cols != other.cols {
            return T::infinity();
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// `‖self − self†‖_max`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `‖U†U − I‖_max`.
    pub fn unitary_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex::<T>::zero();
                for k in 0..n {
                    acc += self.data[k * n + i].conj() * self.data[k * n + j];
                }
                if i == j {
                    acc -= Complex::one();
                }
                dev = dev.max(acc.norm());
            }
        }
        dev
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    /// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs).expect("matrix shapes must agree")
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in &self.data[r * self.cols..(r + 1) * self.cols] {
                write!(f, "({:?}, {:?}i) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    match (rows, cols) {
        (Some(r), Some(c)) if r <= MAX_DIM && c <= MAX_DIM => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "kron of {}x{} and {}x{} exceeds dimension {MAX_DIM}",
                a.rows, a.cols, b.rows, b.cols
            )))
        }
    }
    Ok(ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    }))
}

/// Whether `‖U†U − I‖_max ≤ tol`. Non-square input is never unitary.
pub fn is_unitary<T: Real>(u: &ComplexMatrix<T>, tol: T) -> bool {
    u.unitary_deviation() <= tol
}

/// Hermitian inner product `⟨a|b⟩`.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::<f64>::identity(2);
        let i4 = kron(&i2, &i2).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_zz_keeps_eleven_positive() {
        let z = ComplexMatrix::<f64>::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let zz = kron(&z, &z).unwrap();
        let v = zz.apply(&[c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]).unwrap();
        assert_eq!(v[3], c(1.0, 0.0));
    }

    #[test]
    fn kron_hadamard_identity_on_zero_zero() {
        // (H ⊗ I)|00⟩ written out by hand: rows 0 and 2 of column 0 are 1/√2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = ComplexMatrix::<f64>::from_real_rows(&[&[s, s], &[s, -s]]);
        let hi = kron(&h, &ComplexMatrix::identity(2)).unwrap();
        let out = hi.apply(&[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        let expected = [c(s, 0.), c(0., 0.), c(s, 0.), c(0., 0.)];
        for (a, b) in out.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn kron_rejects_oversized_products() {
        let a = ComplexMatrix::<f64>::zeros(1 << 9, 1);
        let b = ComplexMatrix::<f64>::zeros(1 << 8, 1);
        assert!(matches!(kron(&a, &b), Err(Error::TooLarge(_))));
    }

    #[test]
    fn unitarity_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(is_unitary(&ComplexMatrix::<f64>::identity(4), 1e-9));
        assert!(!is_unitary(&ComplexMatrix::<f64>::diagonal(&[1.0, 2.0]), 1e-9));
        let h = ComplexMatrix::<f64>::from_real_rows(&[&[s, s], &[s, -s]]);
        assert!(is_unitary(&h, 1e-9));
        assert!(!is_unitary(&ComplexMatrix::<f64>::zeros(2, 3), 1e-9));
    }

    #[test]
    fn from_vec_rejects_nan() {
        let r = ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]);
        assert_eq!(r.unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn matmul_checks_shapes() {
        let a = ComplexMatrix::<f64>::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
    }
}
