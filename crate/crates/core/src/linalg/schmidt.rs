use num_complex::Complex;
use num_traits::Zero;

use super::eig::hermitian_eig;
use super::matrix::{inner, norm_sqr, ComplexMatrix};
use super::ortho::complete_basis;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `state = Σ_k coefficients[k] · a_vectors[k] ⊗ b_vectors[k]`.
#[derive(Clone, Debug)]
pub struct Schmidt<T> {
    /// Non-negative, descending; `min(dim_a, dim_b)` entries.
    pub coefficients: Vec<T>,
    pub a_vectors: Vec<Vec<Complex<T>>>,
    pub b_vectors: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Schmidt<T> {
    pub fn reconstruct(&self) -> Vec<Complex<T>> {
        let da = self.a_vectors.first().map_or(0, Vec::len);
        let db = self.b_vectors.first().map_or(0, Vec::len);
        let mut out = vec![Complex::zero(); da * db];
        for ((c, a), b) in self.coefficients.iter().zip(&self.a_vectors).zip(&self.b_vectors) {
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i * db + j] += x * y * *c;
                }
            }
        }
        out
    }
}

/// Schmidt decomposition of a unit vector in `C^dim_a ⊗ C^dim_b`, where the
/// amplitude of `|i⟩⊗|j⟩` sits at index `i·dim_b + j`.
pub fn schmidt_decompose<T: Real>(state: &[Complex<T>], dim_a: usize, dim_b: usize) -> Result<Schmidt<T>> {
    if state.len() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} for {dim_a}x{dim_b} split",
            state.len()
        )));
    }
    let dev = (norm_sqr(state).sqrt() - T::one()).abs();
    if dev > T::default_tolerance() {
        return Err(Error::NotNormalized(dev.to_f64_lossy()));
    }
    let m = ComplexMatrix::from_fn(dim_a, dim_b, |i, j| state[i * dim_b + j]);
    if dim_a >= dim_b {
        let (c, rows, cols) = decompose_tall(&m)?;
        Ok(Schmidt {
            coefficients: c,
            a_vectors: rows,
            b_vectors: cols,
        })
    } else {
        let (c, rows, cols) = decompose_tall(&m.transpose())?;
        Ok(Schmidt {
            coefficients: c,
            a_vectors: cols,
            b_vectors: rows,
        })
    }
}

type Triplets<T> = (Vec<T>, Vec<Vec<Complex<T>>>, Vec<Vec<Complex<T>>>);

/// `M = Σ c_k x_k y_kᵀ` for `rows ≥ cols`, via the eigenvectors of `M†M`.
fn decompose_tall<T: Real>(m: &ComplexMatrix<T>) -> Result<Triplets<T>> {
    let gram = m.adjoint().matmul(m)?;
    let eig = hermitian_eig(&gram)?;
    let k = m.cols();
    let tiny = T::epsilon() * T::lit(16.0);
    let mut coeffs = Vec::with_capacity(k);
    let mut xs: Vec<Option<Vec<Complex<T>>>> = Vec::with_capacity(k);
    let mut accepted: Vec<Vec<Complex<T>>> = Vec::new();
    let mut ys = Vec::with_capacity(k);
    for idx in 0..k {
        let v = eig.vector(idx);
        let mut w = m.apply(&v)?;
        let c = norm_sqr(&w).sqrt();
        coeffs.push(c);
        ys.push(v.iter().map(|z| z.conj()).collect::<Vec<_>>());
        if c <= tiny {
            xs.push(None);
            continue;
        }
        for q in &accepted {
            let p = inner(q, &w);
            for (a, b) in w.iter_mut().zip(q) {
                *a -= p * b;
            }
        }
        let r = norm_sqr(&w).sqrt();
        if r <= T::lit(1e-3) * c {
            xs.push(None);
            continue;
        }
        for z in &mut w {
            *z /= r;
        }
        accepted.push(w.clone());
        xs.push(Some(w));
    }
    let mut fill = complete_basis(&accepted, m.rows())?.into_iter();
    let xs = xs
        .into_iter()
        .map(|x| x.unwrap_or_else(|| fill.next().expect("completion has enough vectors")))
        .collect();
    // Column norms can reorder eigenvalue ties at round-off level only; keep
    // the eigen order but clamp to make the sequence non-increasing.
    for i in 1..coeffs.len() {
        if coeffs[i] > coeffs[i - 1] {
            coeffs[i] = coeffs[i - 1];
        }
    }
    Ok((coeffs, xs, ys))
}
