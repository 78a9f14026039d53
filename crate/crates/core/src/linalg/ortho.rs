//! Gram–Schmidt helpers: orthonormalization and deterministic basis completion.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{inner, norm_sqr};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn project_out<T: Real>(v: &mut [Complex<T>], basis: &[Vec<Complex<T>>]) {
    for q in basis {
        let c = inner(q, v);
        for (x, y) in v.iter_mut().zip(q) {
            *x -= c * y;
        }
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass. Vectors are taken
/// in the given order; a vector whose residual norm drops below `drop_tol` is
/// reported as an error since the input was expected to be independent.
pub fn orthonormalize<T: Real>(vectors: &[Vec<Complex<T>>], drop_tol: T) -> Result<Vec<Vec<Complex<T>>>> {
    let mut out: Vec<Vec<Complex<T>>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        project_out(&mut w, &out);
        project_out(&mut w, &out);
        let n = norm_sqr(&w).sqrt();
        if n <= drop_tol {
            return Err(Error::NotOrthonormal(n.to_f64_lossy()));
        }
        for z in &mut w {
            *z /= n;
        }
        out.push(w);
    }
    Ok(out)
}

/// Completes an orthonormal family to a basis of `C^dim` by running ordered
/// Gram–Schmidt over the computational basis vectors `e_0, e_1, …` and keeping
/// those with a non-negligible residual. Returns only the new vectors.
pub fn complete_basis<T: Real>(existing: &[Vec<Complex<T>>], dim: usize) -> Result<Vec<Vec<Complex<T>>>> {
    let need = dim.saturating_sub(existing.len());
    let mut all: Vec<Vec<Complex<T>>> = existing.to_vec();
    let mut added = Vec::with_capacity(need);
    let accept = T::lit(1e-3);
    for i in 0..dim {
        if added.len() == need {
            break;
        }
        // First pass uses the sparsity of e_i: ⟨q|e_i⟩ = conj(q[i]).
        let mut w = vec![Complex::<T>::zero(); dim];
        w[i] = Complex::one();
        for q in &all {
            let c = q[i].conj();
            if c.is_zero() {
                continue;
            }
            for (x, y) in w.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
        if norm_sqr(&w).sqrt() <= accept {
            continue;
        }
        project_out(&mut w, &all);
        let n = norm_sqr(&w).sqrt();
        if n <= accept {
            continue;
        }
        for z in &mut w {
            *z /= n;
        }
        all.push(w.clone());
        added.push(w);
    }
    if added.len() != need {
        return Err(Error::NotOrthonormal(f64::NAN));
    }
    Ok(added)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_of_empty_family_is_computational_basis() {
        let basis = complete_basis::<f64>(&[], 3).unwrap();
        for (i, v) in basis.iter().enumerate() {
            for (j, z) in v.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((z.re - expect).abs() < 1e-15 && z.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn completion_is_orthogonal_to_existing() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = vec![vec![Complex::new(s, 0.0), Complex::new(0.0, s), Complex::zero()]];
        let rest = complete_basis(&v, 3).unwrap();
        assert_eq!(rest.len(), 2);
        for r in &rest {
            assert!(inner(&v[0], r).norm() < 1e-14);
            assert!((norm_sqr(r) - 1.0).abs() < 1e-14);
        }
        assert!(inner(&rest[0], &rest[1]).norm() < 1e-14);
    }

    #[test]
    fn orthonormalize_rejects_dependent_vectors() {
        let a = vec![Complex::new(1.0, 0.0), Complex::zero()];
        let r = orthonormalize(&[a.clone(), a], 1e-8);
        assert!(r.is_err());
    }
}
