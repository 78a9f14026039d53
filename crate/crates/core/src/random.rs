//! Seeded randomness: named seed derivation, Gaussian amplitudes and Haar unitaries.
//!
//! Every random quantity in the crate is drawn from a `ChaCha8Rng` seeded with
//! a 64-bit value. A root seed is split into independent child seeds with
//! [`derive_seed`]: the child is `splitmix64(root ⊕ fnv1a(label) ⊕ splitmix64(index))`,
//! so streams for different labels or indices never share a generator.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{ortho::orthonormalize, ComplexMatrix};
use crate::scalar::Real;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3))
}

/// Child seed for the stream named `label`, number `index`, under `root`.
pub fn derive_seed(root: u64, label: &str, index: u64) -> u64 {
    splitmix64(root ^ fnv1a(label) ^ splitmix64(index))
}

/// One sample of a complex standard normal (independent real and imaginary parts).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im))
}

/// Haar-distributed `dim × dim` unitary: Gram–Schmidt on the columns of a
/// complex Ginibre matrix. Gram–Schmidt yields a triangular factor with a
/// positive real diagonal, which is the phase fix that makes the result Haar.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix<T>> {
    let cols: Vec<Vec<Complex<T>>> = (0..dim)
        .map(|_| (0..dim).map(|_| complex_gaussian(rng)).collect())
        .collect();
    let q = orthonormalize(&cols, T::epsilon())?;
    ComplexMatrix::from_columns(&q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_unitary;

    #[test]
    fn derived_seeds_differ_by_label_and_index() {
        let a = derive_seed(7, "trial", 0);
        assert_ne!(a, derive_seed(7, "trial", 1));
        assert_ne!(a, derive_seed(7, "payload", 0));
        assert_ne!(a, derive_seed(8, "trial", 0));
        assert_eq!(a, derive_seed(7, "trial", 0));
    }

    #[test]
    fn haar_unitary_is_unitary_and_reproducible() {
        let u: ComplexMatrix<f64> = haar_unitary(16, &mut rng_from_seed(3)).unwrap();
        assert!(is_unitary(&u, 1e-12));
        let v: ComplexMatrix<f64> = haar_unitary(16, &mut rng_from_seed(3)).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn haar_trace_second_moment() {
        // E|tr U|² = 1 for Haar U of any dimension.
        let mut rng = rng_from_seed(11);
        let trials = 2000;
        let mean: f64 = (0..trials)
            .map(|_| haar_unitary::<f64, _>(4, &mut rng).unwrap().trace().norm_sqr())
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 1.0).abs() < 0.1, "mean |tr U|² = {mean}");
    }
}
