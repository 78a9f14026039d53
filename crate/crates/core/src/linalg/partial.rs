//! Qubit-index bookkeeping and partial traces.
//!
//! Basis indices are big-endian: qubit 0 is the most significant bit of an
//! `n`-qubit index. A list of qubits defines a sub-index in which the first
//! listed qubit is the most significant bit.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Spreads the bits of `value` (big-endian over `qubits`) into an `n`-qubit index.
#[inline]
pub fn scatter(qubits: &[usize], n: usize, value: usize) -> usize {
    let k = qubits.len();
    let mut idx = 0;
    for (j, &q) in qubits.iter().enumerate() {
        if (value >> (k - 1 - j)) & 1 == 1 {
            idx |= 1 << (n - 1 - q);
        }
    }
    idx
}

/// Reads the bits of `index` at `qubits` into a big-endian sub-index.
#[inline]
pub fn gather(qubits: &[usize], n: usize, index: usize) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | ((index >> (n - 1 - q)) & 1))
}

/// Qubits of `0..n` not in `qubits`, ascending.
pub fn complement(qubits: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|q| !qubits.contains(q)).collect()
}

pub fn check_qubits(qubits: &[usize], n: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(Error::BadQubits(format!("qubit {q} out of range for {n} qubits")));
        }
        if qubits[..i].contains(&q) {
            return Err(Error::BadQubits(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

/// Reshapes an `n`-qubit amplitude vector into a matrix whose row index runs
/// over `rows` and column index over `cols`. Together the two lists must cover
/// every qubit exactly once.
pub fn amplitude_matrix<T: Real>(
    amps: &[Complex<T>],
    n: usize,
    rows: &[usize],
    cols: &[usize],
) -> Result<ComplexMatrix<T>> {
    if amps.len() != 1 << n {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for {n} qubits",
            amps.len()
        )));
    }
    let all: Vec<usize> = rows.iter().chain(cols).copied().collect();
    check_qubits(&all, n)?;
    if all.len() != n {
        return Err(Error::BadQubits("row and column qubits must cover the register".into()));
    }
    let row_off: Vec<usize> = (0..1 << rows.len()).map(|r| scatter(rows, n, r)).collect();
    let col_off: Vec<usize> = (0..1 << cols.len()).map(|c| scatter(cols, n, c)).collect();
    Ok(ComplexMatrix::from_fn(row_off.len(), col_off.len(), |r, c| {
        amps[row_off[r] | col_off[c]]
    }))
}

/// Reduced density matrix of a pure state on `keep` (in list order).
pub fn reduced_density<T: Real>(amps: &[Complex<T>], n: usize, keep: &[usize]) -> Result<ComplexMatrix<T>> {
    check_qubits(keep, n)?;
    let traced = complement(keep, n);
    let m = amplitude_matrix(amps, n, keep, &traced)?;
    let dim = m.rows();
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = m
                .row(i)
                .iter()
                .zip(m.row(j))
                .fold(Complex::<T>::zero(), |acc, (a, b)| acc + a * b.conj());
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
    }
    Ok(rho)
}

/// Traces `traced_out` qubits out of an `n`-qubit density matrix. The kept
/// qubits appear in ascending index order.
pub fn partial_trace<T: Real>(
    rho: &ComplexMatrix<T>,
    qubit_count: usize,
    traced_out: &[usize],
) -> Result<ComplexMatrix<T>> {
    let dim = 1usize << qubit_count;
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} density matrix for {qubit_count} qubits",
            rho.rows(),
            rho.cols()
        )));
    }
    check_qubits(traced_out, qubit_count)?;
    let tol = T::default_tolerance();
    let dev = rho.hermitian_deviation();
    if dev > tol {
        return Err(Error::NotHermitian(dev.to_f64_lossy()));
    }
    let tr = rho.trace();
    if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
        return Err(Error::NotNormalized((tr - T::one()).norm().to_f64_lossy()));
    }
    let kept = complement(traced_out, qubit_count);
    let kept_off: Vec<usize> = (0..1 << kept.len()).map(|k| scatter(&kept, qubit_count, k)).collect();
    let tr_off: Vec<usize> = (0..1 << traced_out.len())
        .map(|t| scatter(traced_out, qubit_count, t))
        .collect();
    Ok(ComplexMatrix::from_fn(kept_off.len(), kept_off.len(), |i, j| {
        tr_off.iter().fold(Complex::zero(), |acc, &t| {
            acc + rho[(kept_off[i] | t, kept_off[j] | t)]
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn projector(v: &[Complex<f64>]) -> ComplexMatrix<f64> {
        ComplexMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    #[test]
    fn scatter_and_gather_are_inverse() {
        let qs = [3, 0, 2];
        for v in 0..8 {
            assert_eq!(gather(&qs, 5, scatter(&qs, 5, v)), v);
        }
        // qubit 0 is the most significant bit
        assert_eq!(scatter(&[0], 3, 1), 0b100);
    }

    #[test]
    fn singlet_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [Complex::zero(), Complex::new(s, 0.0), Complex::new(-s, 0.0), Complex::zero()];
        let red = partial_trace(&projector(&v), 2, &[0]).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::diagonal(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn product_state_marginal() {
        let mut v = vec![Complex::zero(); 4];
        v[0] = Complex::new(1.0, 0.0);
        let red = partial_trace(&projector(&v), 2, &[1]).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::diagonal(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn ghz3_trace_two_qubits_brute_force() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![Complex::zero(); 8];
        v[0] = Complex::new(s, 0.0);
        v[7] = Complex::new(s, 0.0);
        let rho = projector(&v);
        // brute force: sum ρ[(t,k),(t,k')] over the 4 traced configurations
        let mut oracle = ComplexMatrix::<f64>::zeros(2, 2);
        for k in 0..2 {
            for kp in 0..2 {
                for t in 0..4 {
                    oracle[(k, kp)] += rho[(t * 2 + k, t * 2 + kp)];
                }
            }
        }
        let red = partial_trace(&rho, 3, &[0, 1]).unwrap();
        assert!(red.max_abs_diff(&oracle) < 1e-15);
        assert!(red.max_abs_diff(&ComplexMatrix::diagonal(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn reduced_density_matches_partial_trace() {
        let amps: Vec<Complex<f64>> = (0..8)
            .map(|i| Complex::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<_> = amps.iter().map(|z| z / n).collect();
        let a = reduced_density(&amps, 3, &[0, 2]).unwrap();
        let b = partial_trace(&projector(&amps), 3, &[1]).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let rho = ComplexMatrix::<f64>::diagonal(&[0.5, 0.5]);
        assert!(matches!(partial_trace(&rho, 2, &[0]), Err(Error::DimensionMismatch(_))));
        let skew = ComplexMatrix::<f64>::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]);
        assert!(matches!(partial_trace(&skew, 1, &[]), Err(Error::NotHermitian(_))));
        assert!(matches!(partial_trace(&rho, 1, &[1]), Err(Error::BadQubits(_))));
    }
}
