//! Fixed single- and two-qubit gates, big-endian in their own qubit order.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

pub fn identity<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::identity(2)
}

pub fn pauli_x<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y<T: Real>() -> ComplexMatrix<T> {
    let i = Complex::<T>::i();
    ComplexMatrix::from_fn(2, 2, |r, c| match (r, c) {
        (0, 1) => -i,
        (1, 0) => i,
        _ => Complex::zero(),
    })
}

pub fn pauli_z<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn hadamard<T: Real>() -> ComplexMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]])
}

/// CNOT on two qubits with the first as control and the second as target.
pub fn cnot<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

/// Permutation matrix of a CNOT acting inside an `n`-qubit register.
pub fn cnot_on_register<T: Real>(n: usize, control: usize, target: usize) -> ComplexMatrix<T> {
    let dim = 1usize << n;
    let cbit = 1usize << (n - 1 - control);
    let tbit = 1usize << (n - 1 - target);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let row = if col & cbit != 0 { col ^ tbit } else { col };
        m[(row, col)] = Complex::one();
    }
    m
}
