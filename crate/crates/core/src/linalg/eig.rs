//! Dense Hermitian eigendecomposition.
//!
//! The matrix is reduced to Hermitian tridiagonal form with Householder
//! reflectors, a diagonal phase similarity makes the off-diagonal real, and the
//! resulting real symmetric tridiagonal matrix is diagonalized with the
//! implicit-shift QL iteration. Rotations are accumulated into the complex
//! transformation so the eigenvectors come out directly.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues (descending) and the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column(k)
    }

    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.values.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| {
                acc + v[(i, k)] * v[(j, k)].conj() * self.values[k]
            })
        })
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// Eigenvalues are returned in descending order. Each eigenvector is scaled so
/// that its first component of non-negligible modulus is real and positive,
/// which makes the output reproducible run to run.
pub fn hermitian_eig<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of non-square {}x{} matrix",
            h.rows(),
            h.cols()
        )));
    }
    let dev = h.hermitian_deviation();
    if dev > T::default_tolerance() * T::one().max(h.max_norm()) {
        return Err(Error::NotHermitian(dev.to_f64_lossy()));
    }
    let n = h.rows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }

    let half = T::lit(0.5);
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * half);
    let mut q = ComplexMatrix::<T>::identity(n);
    tridiagonalize(&mut a, &mut q);

    let mut d: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![T::zero(); n];
    let mut phase = Complex::<T>::one();
    for i in 0..n {
        if i > 0 {
            for r in 0..n {
                q[(r, i)] *= phase;
            }
        }
        if i + 1 < n {
            let off = a[(i + 1, i)];
            let mag = off.norm();
            e[i] = mag;
            if mag > T::zero() {
                phase = phase * (off / mag);
            }
        }
    }

    tql2(&mut d, &mut e, &mut q)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = q.column(src);
        canonical_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    Ok(HermitianEigen { values, vectors })
}

/// Rotates `v` so its first component above `√ε` in modulus is real positive.
pub fn canonical_phase<T: Real>(v: &mut [Complex<T>]) {
    let thresh = T::epsilon().sqrt();
    if let Some(lead) = v.iter().find(|z| z.norm() > thresh).copied() {
        let rot = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// In-place `A ← Q†AQ` reduction to tridiagonal form, accumulating `Q`.
fn tridiagonalize<T: Real>(a: &mut ComplexMatrix<T>, q: &mut ComplexMatrix<T>) {
    let n = a.rows();
    let two = T::lit(2.0);
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<Complex<T>> = (0..len).map(|i| a[(k + 1 + i, k)]).collect();
        let tail: T = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail <= T::min_positive_value() {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let unit = if x[0].norm() > T::zero() {
            x[0] / x[0].norm()
        } else {
            Complex::one()
        };
        let alpha = -unit * xnorm;
        let mut w = x;
        w[0] -= alpha;
        let wn = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for z in &mut w {
            *z /= wn;
        }

        // Left: rows k+1.. ← rows − 2 w (w† rows)
        for c in 0..n {
            let mut s = Complex::<T>::zero();
            for i in 0..len {
                s += w[i].conj() * a[(k + 1 + i, c)];
            }
            s = s * two;
            for i in 0..len {
                let upd = w[i] * s;
                a[(k + 1 + i, c)] -= upd;
            }
        }
        // Right on A and Q: cols k+1.. ← cols − 2 (cols w) w†
        for m in [&mut *a, &mut *q] {
            for r in 0..n {
                let mut s = Complex::<T>::zero();
                for i in 0..len {
                    s += m[(r, k + 1 + i)] * w[i];
                }
                s = s * two;
                for i in 0..len {
                    let upd = s * w[i].conj();
                    m[(r, k + 1 + i)] -= upd;
                }
            }
        }
    }
}

/// Implicit QL on the symmetric tridiagonal (`d` diagonal, `e[i] = T[i+1][i]`),
/// applying every rotation to the columns of `v`.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], v: &mut ComplexMatrix<T>) -> Result<()> {
    let n = d.len();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 100 {
                    return Err(Error::NoConvergence);
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let hk = v[(k, i + 1)];
                        let vk = v[(k, i)];
                        v[(k, i + 1)] = vk * s + hk * c;
                        v[(k, i)] = vk * c - hk * s;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::is_unitary;

    #[test]
    fn half_identity_has_double_half() {
        let m = ComplexMatrix::<f64>::diagonal(&[0.5, 0.5]);
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.values, vec![0.5, 0.5]);
    }

    #[test]
    fn sigma_x_closed_form() {
        let sx = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let eig = hermitian_eig(&sx).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] + 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = eig.vector(0);
        let v1 = eig.vector(1);
        // canonical phase: first component real positive
        assert!((v0[0] - Complex::new(s, 0.0)).norm() < 1e-14);
        assert!((v0[1] - Complex::new(s, 0.0)).norm() < 1e-14);
        assert!((v1[0] - Complex::new(s, 0.0)).norm() < 1e-14);
        assert!((v1[1] - Complex::new(-s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn complex_hermitian_three_by_three() {
        let h = ComplexMatrix::<f64>::from_vec(
            3,
            3,
            vec![
                Complex::new(2.0, 0.0),
                Complex::new(0.5, -1.0),
                Complex::new(0.0, 0.3),
                Complex::new(0.5, 1.0),
                Complex::new(-1.0, 0.0),
                Complex::new(0.25, 0.0),
                Complex::new(0.0, -0.3),
                Complex::new(0.25, 0.0),
                Complex::new(0.7, 0.0),
            ],
        )
        .unwrap();
        let eig = hermitian_eig(&h).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&h) < 1e-13);
        assert!(is_unitary(&eig.vectors, 1e-13));
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let sx = ComplexMatrix::<f32>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let eig = hermitian_eig(&sx).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-6);
    }
}
