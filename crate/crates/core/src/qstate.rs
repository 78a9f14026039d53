//! Labeled multi-qubit pure states.
//!
//! Amplitude index `Σ_q bit_q · 2^(n−1−q)`: qubit 0 is the most significant bit.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::matrix::{inner, norm_sqr};
use crate::linalg::partial::{check_qubits, complement, reduced_density, scatter};
use crate::linalg::ComplexMatrix;
use crate::random::{complex_gaussian, rng_from_seed};
use crate::scalar::Real;

pub const MAX_QUBITS: usize = 16;

/// Probability below which a projection outcome is treated as unreachable.
pub const UNREACHABLE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// Wraps amplitudes that are already unit-norm within the default tolerance.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dev = (norm_sqr(&amplitudes).sqrt() - T::one()).abs();
        if dev > T::default_tolerance() {
            return Err(Error::NotNormalized(dev.to_f64_lossy()));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm = norm_sqr(&amplitudes).sqrt();
        if !norm.is_finite() || norm <= T::zero() {
            return Err(Error::NotNormalized(f64::INFINITY));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Ok(Self { n_qubits, amplitudes })
    }

    pub(crate) fn from_parts(n_qubits: usize, amplitudes: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self { n_qubits, amplitudes }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm(&self) -> T {
        norm_sqr(&self.amplitudes).sqrt()
    }

    /// Reduced density matrix on `keep`, in list order.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<ComplexMatrix<T>> {
        reduced_density(&self.amplitudes, self.n_qubits, keep)
    }

    /// `|ψ⟩⟨ψ|`; only sensible for small registers.
    pub fn density_matrix(&self) -> ComplexMatrix<T> {
        let a = &self.amplitudes;
        ComplexMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj())
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "amplitude count {len} is not a power of two ≥ 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::TooLarge(format!("{n} qubits exceeds the {MAX_QUBITS}-qubit cap")));
    }
    Ok(n)
}

/// Pure state with an Alice/Bob split of its qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelState<T> {
    pub state: PureState<T>,
    alice: Vec<usize>,
    bob: Vec<usize>,
}

impl<T: Real> ChannelState<T> {
    pub fn new(state: PureState<T>, alice: Vec<usize>, bob: Vec<usize>) -> Result<Self> {
        if alice.is_empty() || bob.is_empty() {
            return Err(Error::BadQubits("both parties need at least one qubit".into()));
        }
        let all: Vec<usize> = alice.iter().chain(&bob).copied().collect();
        check_qubits(&all, state.n_qubits())?;
        if all.len() != state.n_qubits() {
            return Err(Error::BadQubits(format!(
                "partition covers {} of {} qubits",
                all.len(),
                state.n_qubits()
            )));
        }
        Ok(Self { state, alice, bob })
    }

    /// Alice holds qubits `0..m`, Bob the rest.
    pub fn contiguous(state: PureState<T>, m: usize) -> Result<Self> {
        let n = state.n_qubits();
        if m == 0 || m >= n {
            return Err(Error::BadQubits(format!("split {m}|{} of {n} qubits", n.saturating_sub(m))));
        }
        Self::new(state, (0..m).collect(), (m..n).collect())
    }

    #[inline]
    pub fn alice(&self) -> &[usize] {
        &self.alice
    }

    #[inline]
    pub fn bob(&self) -> &[usize] {
        &self.bob
    }

    /// Alice's qubit count.
    #[inline]
    pub fn m(&self) -> usize {
        self.alice.len()
    }

    /// Bob's qubit count.
    #[inline]
    pub fn n(&self) -> usize {
        self.bob.len()
    }

    /// Same partition, new state.
    pub fn with_state(&self, state: PureState<T>) -> Result<Self> {
        Self::new(state, self.alice.clone(), self.bob.clone())
    }

    /// Applies `u_a` to Alice's qubits and `u_b` to Bob's, each in list order.
    pub fn apply_local(&self, u_a: &ComplexMatrix<T>, u_b: &ComplexMatrix<T>) -> Result<Self> {
        let s = apply_unitary(&self.state, u_a, &self.alice)?;
        let s = apply_unitary(&s, u_b, &self.bob)?;
        self.with_state(s)
    }
}

/// Label `k ∈ {1,2,3,4}` of one of the four Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BellIndex(u8);

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [BellIndex(1), BellIndex(2), BellIndex(3), BellIndex(4)];

    pub fn new(k: u8) -> Result<Self> {
        if (1..=4).contains(&k) {
            Ok(Self(k))
        } else {
            Err(Error::OutOfRange(format!("Bell index {k}")))
        }
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }
}

/// The Bell states with these signs:
/// φ¹ = (|01⟩−|10⟩)/√2, φ² = (|01⟩+|10⟩)/√2, φ³ = (|00⟩−|11⟩)/√2, φ⁴ = (|00⟩+|11⟩)/√2.
pub fn bell_state<T: Real>(k: BellIndex) -> PureState<T> {
    let s = T::FRAC_1_SQRT_2();
    let z = T::zero();
    let (a00, a01, a10, a11) = match k.0 {
        1 => (z, s, -s, z),
        2 => (z, s, s, z),
        3 => (s, z, z, -s),
        _ => (s, z, z, s),
    };
    let c = |x: T| Complex::new(x, T::zero());
    PureState::from_parts(2, vec![c(a00), c(a01), c(a10), c(a11)])
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n ≥ 2` qubits.
pub fn ghz_state<T: Real>(n: usize) -> Result<PureState<T>> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("GHZ state needs at least 2 qubits, got {n}")));
    }
    if n > MAX_QUBITS {
        return Err(Error::TooLarge(format!("{n} qubits")));
    }
    let mut amps = vec![Complex::zero(); 1 << n];
    let s = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    amps[0] = s;
    amps[(1 << n) - 1] = s;
    Ok(PureState::from_parts(n, amps))
}

/// Computational basis state for the given bits (first bit is qubit 0).
pub fn basis_state<T: Real>(bits: &[u8]) -> Result<PureState<T>> {
    if bits.is_empty() {
        return Err(Error::OutOfRange("empty bit list".into()));
    }
    if bits.len() > MAX_QUBITS {
        return Err(Error::TooLarge(format!("{} qubits", bits.len())));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::OutOfRange("bits must be 0 or 1".into()));
    }
    let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let mut amps = vec![Complex::zero(); 1 << bits.len()];
    amps[idx] = Complex::one();
    Ok(PureState::from_parts(bits.len(), amps))
}

/// Dense operators up to this dimension are checked for unitarity exactly;
/// larger ones are probed with fixed random vectors.
const EXACT_UNITARY_CHECK_DIM: usize = 256;

fn check_unitary<T: Real>(u: &ComplexMatrix<T>) -> Result<()> {
    let tol = T::default_tolerance();
    if u.rows() <= EXACT_UNITARY_CHECK_DIM {
        let dev = u.unitary_deviation();
        return if dev <= tol {
            Ok(())
        } else {
            Err(Error::NotUnitary(dev.to_f64_lossy()))
        };
    }
    // ‖U†U x − x‖ for generic x vanishes only if U†U = I.
    let adj = u.adjoint();
    let mut rng = rng_from_seed(0x5eed_cafe);
    for _ in 0..2 {
        let x: Vec<Complex<T>> = (0..u.cols()).map(|_| complex_gaussian(&mut rng)).collect();
        let nx = norm_sqr(&x).sqrt();
        let y = adj.apply(&u.apply(&x)?)?;
        let dev = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
            / nx;
        if dev > tol {
            return Err(Error::NotUnitary(dev.to_f64_lossy()));
        }
    }
    Ok(())
}

/// Applies `u` to `targets`; the first target is the operator's most
/// significant qubit.
pub fn apply_unitary<T: Real>(state: &PureState<T>, u: &ComplexMatrix<T>, targets: &[usize]) -> Result<PureState<T>> {
    let k = targets.len();
    check_qubits(targets, state.n_qubits)?;
    if k == 0 || u.rows() != 1 << k || u.cols() != 1 << k {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on {k} target qubits",
            u.rows(),
            u.cols()
        )));
    }
    check_unitary(u)?;
    Ok(apply_operator(state, u, targets))
}

/// Operator application without validation; `targets` must be valid.
pub(crate) fn apply_operator<T: Real>(state: &PureState<T>, u: &ComplexMatrix<T>, targets: &[usize]) -> PureState<T> {
    let n = state.n_qubits;
    let k = targets.len();
    let offs: Vec<usize> = (0..1 << k).map(|t| scatter(targets, n, t)).collect();
    let rest = complement(targets, n);
    let mut out = vec![Complex::zero(); state.dim()];
    let mut local = vec![Complex::zero(); 1 << k];
    for r in 0..1usize << rest.len() {
        let base = scatter(&rest, n, r);
        for (t, slot) in local.iter_mut().enumerate() {
            *slot = state.amplitudes[base | offs[t]];
        }
        for (row, &off) in offs.iter().enumerate() {
            out[base | off] = u
                .row(row)
                .iter()
                .zip(&local)
                .fold(Complex::zero(), |acc, (a, b)| acc + a * b);
        }
    }
    PureState::from_parts(n, out)
}

/// Tensor product; qubits of later factors follow those of earlier ones.
pub fn tensor<T: Real>(states: &[PureState<T>]) -> Result<PureState<T>> {
    if states.is_empty() {
        return Err(Error::OutOfRange("empty tensor product".into()));
    }
    let total: usize = states.iter().map(|s| s.n_qubits).sum();
    if total > MAX_QUBITS {
        return Err(Error::TooLarge(format!("{total} qubits exceeds the {MAX_QUBITS}-qubit cap")));
    }
    let mut amps = vec![Complex::one()];
    for s in states {
        amps = amps
            .iter()
            .flat_map(|a| s.amplitudes.iter().map(move |b| a * b))
            .collect();
    }
    Ok(PureState::from_parts(total, amps))
}

/// Result of projecting onto one basis state of a subset of qubits.
#[derive(Clone, Debug)]
pub struct Projection<T> {
    pub probability: T,
    /// `None` when the outcome is unreachable (probability below 1e-12).
    pub collapsed: Option<PureState<T>>,
}

/// Projects `targets` onto `basis[outcome]` and renormalizes. The measured
/// qubits stay in the register, left in the observed basis state.
pub fn project_and_collapse<T: Real>(
    state: &PureState<T>,
    targets: &[usize],
    basis: &[PureState<T>],
    outcome: usize,
) -> Result<Projection<T>> {
    check_qubits(targets, state.n_qubits)?;
    let k = targets.len();
    if basis.iter().any(|b| b.n_qubits != k) {
        return Err(Error::DimensionMismatch("basis states must span the target qubits".into()));
    }
    let tol = T::default_tolerance();
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let g = inner(&a.amplitudes, &b.amplitudes);
            let expect = if i == j { T::one() } else { T::zero() };
            let dev = (g - expect).norm();
            if dev > tol {
                return Err(Error::NotOrthonormal(dev.to_f64_lossy()));
            }
        }
    }
    let target = basis
        .get(outcome)
        .ok_or_else(|| Error::OutOfRange(format!("outcome {outcome} of {}", basis.len())))?;
    Ok(project_unchecked(state, targets, target))
}

pub(crate) fn project_unchecked<T: Real>(state: &PureState<T>, targets: &[usize], target: &PureState<T>) -> Projection<T> {
    let n = state.n_qubits;
    let k = targets.len();
    let offs: Vec<usize> = (0..1 << k).map(|t| scatter(targets, n, t)).collect();
    let rest = complement(targets, n);
    let bases: Vec<usize> = (0..1usize << rest.len()).map(|r| scatter(&rest, n, r)).collect();
    let comps: Vec<Complex<T>> = bases
        .iter()
        .map(|&base| {
            offs.iter()
                .zip(&target.amplitudes)
                .fold(Complex::zero(), |acc, (&off, b)| acc + b.conj() * state.amplitudes[base | off])
        })
        .collect();
    let probability = norm_sqr(&comps);
    if probability < T::lit(UNREACHABLE) {
        return Projection {
            probability,
            collapsed: None,
        };
    }
    let scale = probability.sqrt();
    let mut out = vec![Complex::zero(); state.dim()];
    for (&base, c) in bases.iter().zip(&comps) {
        for (&off, b) in offs.iter().zip(&target.amplitudes) {
            out[base | off] = b * c / scale;
        }
    }
    Projection {
        probability,
        collapsed: Some(PureState::from_parts(n, out)),
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity<T: Real>(a: &PureState<T>, b: &PureState<T>) -> Result<T> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between {} and {} qubits",
            a.n_qubits, b.n_qubits
        )));
    }
    Ok(inner(&a.amplitudes, &b.amplitudes).norm_sqr())
}

/// Haar-random `n`-qubit state from normalized complex Gaussians.
pub fn random_pure_state<T: Real>(n: usize, seed: u64) -> Result<PureState<T>> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::OutOfRange(format!("random state on {n} qubits")));
    }
    let mut rng = rng_from_seed(seed);
    let amps = (0..1usize << n).map(|_| complex_gaussian(&mut rng)).collect();
    PureState::normalized(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    type S = PureState<f64>;

    fn close(a: &S, b: &S, tol: f64) -> bool {
        a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn bell_amplitudes() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b1: S = bell_state(BellIndex::new(1).unwrap());
        let re: Vec<f64> = b1.amplitudes().iter().map(|z| z.re).collect();
        assert_eq!(re, vec![0.0, s, -s, 0.0]);
        let b4: S = bell_state(BellIndex::new(4).unwrap());
        let re: Vec<f64> = b4.amplitudes().iter().map(|z| z.re).collect();
        assert_eq!(re, vec![s, 0.0, 0.0, s]);
        for k in BellIndex::ALL {
            assert!((bell_state::<f64>(k).norm() - 1.0).abs() < 1e-15);
        }
        assert!(BellIndex::new(0).is_err());
        assert!(BellIndex::new(5).is_err());
    }

    #[test]
    fn ghz_examples() {
        let g2: S = ghz_state(2).unwrap();
        assert_eq!(g2, bell_state(BellIndex::new(4).unwrap()));
        let g3: S = ghz_state(3).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (i, z) in g3.amplitudes().iter().enumerate() {
            let expect = if i == 0 || i == 7 { s } else { 0.0 };
            assert_eq!(z.re, expect);
        }
        for n in 2..=14 {
            assert!((ghz_state::<f64>(n).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(ghz_state::<f64>(1).is_err());
    }

    #[test]
    fn basis_examples() {
        let s: S = basis_state(&[1, 0, 1]).unwrap();
        assert_eq!(s.amplitudes()[5], Complex::one());
        let z: S = basis_state(&[0, 0]).unwrap();
        assert_eq!(z.amplitudes()[0], Complex::one());
        assert!(basis_state::<f64>(&[]).is_err());
    }

    #[test]
    fn apply_examples() {
        let zz: S = basis_state(&[0, 0]).unwrap();
        let same = apply_unitary(&zz, &ComplexMatrix::identity(4), &[0, 1]).unwrap();
        assert_eq!(same, zz);
        let flipped = apply_unitary(&zz, &gates::pauli_x(), &[1]).unwrap();
        assert_eq!(flipped, basis_state(&[0, 1]).unwrap());

        // (|00⟩+|10⟩)/√2 through the 4x4 CNOT matrix by hand gives φ⁴
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = S::new(vec![
            Complex::new(s, 0.0),
            Complex::zero(),
            Complex::new(s, 0.0),
            Complex::zero(),
        ])
        .unwrap();
        let out = apply_unitary(&plus, &gates::cnot(), &[0, 1]).unwrap();
        assert!(close(&out, &bell_state(BellIndex::new(4).unwrap()), 1e-15));

        // reversed target order flips the roles of control and target
        let out = apply_unitary(&basis_state::<f64>(&[0, 1]).unwrap(), &gates::cnot(), &[1, 0]).unwrap();
        assert_eq!(out, basis_state(&[1, 1]).unwrap());
    }

    #[test]
    fn apply_rejects_bad_inputs() {
        let zz: S = basis_state(&[0, 0]).unwrap();
        let bad = ComplexMatrix::diagonal(&[1.0, 2.0]);
        assert!(matches!(apply_unitary(&zz, &bad, &[0]), Err(Error::NotUnitary(_))));
        assert!(matches!(apply_unitary(&zz, &gates::cnot(), &[0, 0]), Err(Error::BadQubits(_))));
        assert!(matches!(apply_unitary(&zz, &gates::pauli_x(), &[2]), Err(Error::BadQubits(_))));
    }

    #[test]
    fn tensor_examples() {
        let zero: S = basis_state(&[0]).unwrap();
        let one: S = basis_state(&[1]).unwrap();
        assert_eq!(tensor(&[zero.clone(), one]).unwrap(), basis_state(&[0, 1]).unwrap());
        let b1: S = bell_state(BellIndex::new(1).unwrap());
        assert!((tensor(&[b1.clone(), b1.clone()]).unwrap().norm() - 1.0).abs() < 1e-15);
        let lam = tensor(&[b1, zero]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // φ¹ ⊗ |0⟩: amplitudes at |010⟩ = +s and |100⟩ = −s
        assert_eq!(lam.amplitudes()[0b010].re, s);
        assert_eq!(lam.amplitudes()[0b100].re, -s);
        let big: S = basis_state(&[0; 9]).unwrap();
        assert!(matches!(tensor(&[big.clone(), big]), Err(Error::TooLarge(_))));
    }

    #[test]
    fn projection_examples() {
        let st: S = basis_state(&[0, 1]).unwrap();
        let zb = [basis_state(&[0]).unwrap(), basis_state(&[1]).unwrap()];
        let p = project_and_collapse(&st, &[0], &zb, 0).unwrap();
        assert!((p.probability - 1.0).abs() < 1e-15);
        assert_eq!(p.collapsed.unwrap(), st);
        let q = project_and_collapse(&st, &[0], &zb, 1).unwrap();
        assert_eq!(q.probability, 0.0);
        assert!(q.collapsed.is_none());
        assert!(matches!(project_and_collapse(&st, &[0], &zb, 2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn bell_measurement_on_teleport_input_is_uniform() {
        let psi: S = random_pure_state(1, 5).unwrap();
        let full = tensor(&[psi, bell_state(BellIndex::new(1).unwrap())]).unwrap();
        let basis: Vec<S> = BellIndex::ALL.iter().map(|&k| bell_state(k)).collect();
        for i in 0..4 {
            let p = project_and_collapse(&full, &[0, 1], &basis, i).unwrap();
            assert!((p.probability - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_rejects_non_orthonormal_basis() {
        let st: S = basis_state(&[0]).unwrap();
        let b = [basis_state(&[0]).unwrap(), basis_state(&[0]).unwrap()];
        assert!(matches!(project_and_collapse(&st, &[0], &b, 0), Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn fidelity_examples() {
        let zero: S = basis_state(&[0]).unwrap();
        let one: S = basis_state(&[1]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = S::new(vec![Complex::new(s, 0.0), Complex::new(s, 0.0)]).unwrap();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(&zero, &basis_state(&[0, 0]).unwrap()).is_err());
    }

    #[test]
    fn random_state_is_seeded_and_normalized() {
        let a: S = random_pure_state(5, 42).unwrap();
        let b: S = random_pure_state(5, 42).unwrap();
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert_ne!(a, random_pure_state(5, 43).unwrap());
    }

    #[test]
    fn haar_marginal_purity_average() {
        // Monte-Carlo oracle (2e5 numpy samples): E Tr ρ_A² = 0.8002, matching (d_A+d_B)/(d_A d_B+1).
        let trials = 1000;
        let mean: f64 = (0..trials)
            .map(|s| {
                let st: S = random_pure_state(2, s).unwrap();
                let r = st.reduced_density(&[0]).unwrap();
                (&r * &r).trace().re
            })
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 0.8).abs() < 0.02, "mean purity {mean}");
    }

    #[test]
    fn channel_partition_validation() {
        let st: S = ghz_state(3).unwrap();
        assert!(ChannelState::new(st.clone(), vec![0], vec![1, 2]).is_ok());
        assert!(ChannelState::new(st.clone(), vec![], vec![0, 1, 2]).is_err());
        assert!(ChannelState::new(st.clone(), vec![0, 1], vec![1, 2]).is_err());
        assert!(ChannelState::new(st.clone(), vec![0], vec![1]).is_err());
        assert!(ChannelState::contiguous(st, 3).is_err());
    }
}
