//! Reference channels: Bell-pair products, GHZ splits with their CNOT chains,
//! and random channels with a planted capacity.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;

use crate::capacity::MAX_OPERATOR_QUBITS;
use crate::error::{Error, Result};
use crate::gates::{cnot_on_register, pauli_y};
use crate::linalg::partial::scatter;
use crate::linalg::ComplexMatrix;
use crate::qstate::{bell_state, ghz_state, BellIndex, ChannelState, PureState, MAX_QUBITS};
use crate::random::{complex_gaussian, derive_seed, haar_unitary, rng_from_seed};
use crate::scalar::Real;

pub const MAX_BELL_PAIRS: usize = 7;
pub const MAX_GHZ_QUBITS: usize = 14;
/// Minimum spacing between distinct eigenvalues of a planted channel's
/// reduced density (and between the smallest one and zero).
pub const PLANTED_GAP: f64 = 1e-7;

/// `n` copies of `φ^k`; pair `i` is Alice's qubit `i` with Bob's qubit `n+i`.
pub fn n_bell_channel<T: Real>(n: usize, k: BellIndex) -> Result<ChannelState<T>> {
    if n == 0 || n > MAX_BELL_PAIRS {
        return Err(Error::OutOfRange(format!("{n} Bell pairs (1..={MAX_BELL_PAIRS})")));
    }
    let phi = bell_state::<T>(k);
    let total = 2 * n;
    let mut amps = vec![Complex::<T>::zero(); 1 << total];
    for code in 0..1usize << total {
        let mut a = Complex::new(T::one(), T::zero());
        for i in 0..n {
            let x = code >> (total - 1 - i) & 1;
            let y = code >> (total - 1 - n - i) & 1;
            a *= phi.amplitudes()[x << 1 | y];
            if a.is_zero() {
                break;
            }
        }
        amps[code] = a;
    }
    ChannelState::contiguous(PureState::new(amps)?, n)
}

fn check_ghz_split(n: usize, m: usize) -> Result<()> {
    if !(2..=MAX_GHZ_QUBITS).contains(&n) || m == 0 || m >= n {
        return Err(Error::OutOfRange(format!("GHZ split {m}|{} of {n} qubits", n.saturating_sub(m))));
    }
    Ok(())
}

/// GHZ(`n`) with Alice holding the first `m` qubits.
pub fn ghz_channel<T: Real>(n: usize, m: usize) -> Result<ChannelState<T>> {
    check_ghz_split(n, m)?;
    ChannelState::contiguous(ghz_state(n)?, m)
}

/// `U_A = Π_{i=2..m} C¹_i` and `U_B = Π_{i=m+1..n−1} C^n_i` (1-based, control
/// first). Together they take GHZ(`n`) to `φ⁴` on the first and last qubits
/// with every other qubit in `|0⟩`.
pub fn ghz_cnot_chain<T: Real>(n: usize, m: usize) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    check_ghz_split(n, m)?;
    let nb = n - m;
    if m.max(nb) > MAX_OPERATOR_QUBITS {
        return Err(Error::TooLarge(format!("{}-qubit CNOT chain", m.max(nb))));
    }
    let mut u_a = ComplexMatrix::identity(1 << m);
    for t in 1..m {
        u_a = &cnot_on_register::<T>(m, 0, t) * &u_a;
    }
    let mut u_b = ComplexMatrix::identity(1 << nb);
    for t in 0..nb - 1 {
        u_b = &cnot_on_register::<T>(nb, nb - 1, t) * &u_b;
    }
    Ok((u_a, u_b))
}

/// `iσy`, which maps `φ⁴` to `φ¹` when applied to the first qubit of the pair.
pub fn phi4_to_phi1<T: Real>() -> ComplexMatrix<T> {
    pauli_y().scale(Complex::new(T::zero(), T::one()))
}

/// The form `ghz_cnot_chain` reaches: `φ⁴` on qubits `(0, n−1)`, `|0⟩` elsewhere.
pub fn ghz_chain_target<T: Real>(n: usize) -> Result<PureState<T>> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::OutOfRange(format!("{n} qubits")));
    }
    let h = T::FRAC_1_SQRT_2();
    let mut amps = vec![Complex::<T>::zero(); 1 << n];
    amps[0] = Complex::new(h, T::zero());
    amps[(1 << (n - 1)) | 1] = Complex::new(h, T::zero());
    PureState::new(amps)
}

#[derive(Clone, Debug)]
pub struct PlantedChannel<T> {
    pub channel: ChannelState<T>,
    pub planted_capacity: usize,
    /// Alice's unitary that undoes the scrambling (`V_A†`).
    pub hidden_u_a: ComplexMatrix<T>,
    /// Bob's unitary that undoes the scrambling (`V_B†`).
    pub hidden_u_b: ComplexMatrix<T>,
    /// Schmidt probabilities of the residual state, descending.
    pub residual_spectrum: Vec<T>,
    pub seed: u64,
}

fn residual_spectrum<T: Real, R: Rng + ?Sized>(r: usize, scale: f64, rng: &mut R) -> Vec<T> {
    loop {
        let mut p: Vec<f64> = (0..r)
            .map(|_| complex_gaussian::<f64, _>(rng).norm_sqr())
            .collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        p.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        let spaced = p.windows(2).all(|w| (w[0] - w[1]) * scale > PLANTED_GAP);
        if spaced && p[r - 1] * scale > PLANTED_GAP {
            return p.into_iter().map(T::lit).collect();
        }
    }
}

/// A Haar-scrambled channel whose capacity is exactly `d`.
///
/// The unscrambled state has singlets on `(A_q, B_q)` for `q < d` and a
/// residual `Σ_k √p_k |k⟩|k⟩` on the remaining qubits, with `p` strictly
/// decreasing and spaced by at least [`PLANTED_GAP`] after dividing by `2^d`.
pub fn generate_planted<T: Real>(m: usize, n: usize, d: usize, seed: u64) -> Result<PlantedChannel<T>> {
    if m == 0 || n == 0 || d > m.min(n) || m + n > MAX_QUBITS {
        return Err(Error::Infeasible(format!(
            "capacity {d} on a {m}|{n} split (need 1 ≤ m, n; d ≤ min(m, n); m + n ≤ {MAX_QUBITS})"
        )));
    }
    if m.max(n) > MAX_OPERATOR_QUBITS {
        return Err(Error::TooLarge(format!(
            "{}-qubit local unitary exceeds the {MAX_OPERATOR_QUBITS}-qubit cap",
            m.max(n)
        )));
    }
    let total = m + n;
    let ra = 1usize << (m - d);
    let rb = 1usize << (n - d);
    let r = ra.min(rb);
    let block = 1usize << d;
    let spectrum: Vec<T> = if d == m.min(n) {
        vec![T::one()]
    } else {
        let mut rng = rng_from_seed(derive_seed(seed, "planted-spectrum", 0));
        residual_spectrum(r, 1.0 / block as f64, &mut rng)
    };

    let alice: Vec<usize> = (0..m).collect();
    let bob: Vec<usize> = (m..total).collect();
    let pair_a = &alice[..d];
    let pair_b = &bob[..d];
    let res_a = &alice[d..];
    let res_b = &bob[d..];
    let singlet = bell_state::<T>(BellIndex::ALL[0]);
    let mut amps = vec![Complex::<T>::zero(); 1 << total];
    let inv_block = T::one() / T::from_usize(block).unwrap_or_else(T::one);
    for (k, p) in spectrum.iter().enumerate() {
        let base = scatter(res_a, total, k) | scatter(res_b, total, k);
        let weight = (*p * inv_block).sqrt();
        // Σ over Alice's pair bits; Bob's bits are their complement.
        for x in 0..block {
            let y = (block - 1) ^ x;
            let sign = (0..d).fold(T::one(), |acc, q| {
                let xb = x >> (d - 1 - q) & 1;
                let yb = y >> (d - 1 - q) & 1;
                let amp = singlet.amplitudes()[xb << 1 | yb].re;
                if amp < T::zero() {
                    -acc
                } else {
                    acc
                }
            });
            let idx = base | scatter(pair_a, total, x) | scatter(pair_b, total, y);
            amps[idx] = Complex::new(sign * weight, T::zero());
        }
    }
    let lambda = ChannelState::contiguous(PureState::normalized(amps)?, m)?;

    let mut rng_a = rng_from_seed(derive_seed(seed, "planted-alice", 0));
    let mut rng_b = rng_from_seed(derive_seed(seed, "planted-bob", 0));
    let v_a = haar_unitary::<T, _>(1 << m, &mut rng_a)?;
    let v_b = haar_unitary::<T, _>(1 << n, &mut rng_b)?;
    let channel = lambda.apply_local(&v_a, &v_b)?;
    Ok(PlantedChannel {
        channel,
        planted_capacity: d,
        hidden_u_a: v_a.adjoint(),
        hidden_u_b: v_b.adjoint(),
        residual_spectrum: spectrum,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{analyze, assess, canonical_state, canonicalize, entanglement_entropy};
    use crate::linalg::matrix::is_unitary;
    use crate::qstate::{apply_unitary, fidelity};

    #[test]
    fn bell_channel_examples() {
        let one = n_bell_channel::<f64>(1, BellIndex::ALL[0]).unwrap();
        assert_eq!(one.alice(), &[0]);
        assert_eq!(one.bob(), &[1]);
        assert_eq!(one.state.amplitudes(), bell_state::<f64>(BellIndex::ALL[0]).amplitudes());
        let two = n_bell_channel::<f64>(2, BellIndex::ALL[3]).unwrap();
        assert!((entanglement_entropy(&two).unwrap() - 2.0).abs() < 1e-12);
        let three = n_bell_channel::<f64>(3, BellIndex::ALL[1]).unwrap();
        assert_eq!(analyze(&three, 1e-9).unwrap().capacity, 3);
        assert!(n_bell_channel::<f64>(0, BellIndex::ALL[0]).is_err());
        assert!(n_bell_channel::<f64>(8, BellIndex::ALL[0]).is_err());
    }

    #[test]
    fn ghz_entropy_and_capacity() {
        for n in 2..=8 {
            for m in 1..n {
                let ch = ghz_channel::<f64>(n, m).unwrap();
                let a = assess(&ch, 1e-9).unwrap();
                assert!((a.entropy_bits - 1.0).abs() < 1e-12);
                assert_eq!(a.capacity, 1);
            }
        }
        assert!(ghz_channel::<f64>(4, 4).is_err());
        assert!(ghz_channel::<f64>(4, 0).is_err());
        assert!(ghz_channel::<f64>(1, 1).is_err());
    }

    #[test]
    fn maximal_split_needs_no_bob_unitary() {
        let ch = ghz_channel::<f64>(5, 4).unwrap();
        let r = analyze(&ch, 1e-9).unwrap();
        assert!(r.u_b.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn cnot_chain_three_two() {
        let (u_a, u_b) = ghz_cnot_chain::<f64>(3, 2).unwrap();
        assert_eq!(u_a, cnot_on_register(2, 0, 1));
        assert_eq!(u_b, ComplexMatrix::identity(2));
    }

    #[test]
    fn cnot_chain_four_two() {
        let (u_a, u_b) = ghz_cnot_chain::<f64>(4, 2).unwrap();
        assert_eq!(u_a, cnot_on_register(2, 0, 1));
        assert_eq!(u_b, cnot_on_register(2, 1, 0));
    }

    #[test]
    fn cnot_chain_reaches_target() {
        for n in 2..=8 {
            for m in 1..n {
                let ch = ghz_channel::<f64>(n, m).unwrap();
                let (u_a, u_b) = ghz_cnot_chain(n, m).unwrap();
                assert!(is_unitary(&u_a, 1e-12) && is_unitary(&u_b, 1e-12));
                let out = ch.apply_local(&u_a, &u_b).unwrap();
                let f = fidelity(&out.state, &ghz_chain_target(n).unwrap()).unwrap();
                assert!((f - 1.0).abs() < 1e-12, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn frame_change_turns_chain_form_into_analyzer_form() {
        // With m < n − m the analyzer swaps roles and puts the singlet on
        // Bob's first qubit instead of the last, so only m ≥ n − m compares.
        for (n, m) in (2..=6).flat_map(|n| (1..n).map(move |m| (n, m))).filter(|&(n, m)| 2 * m >= n) {
            let ch = ghz_channel::<f64>(n, m).unwrap();
            let (u_a, u_b) = ghz_cnot_chain(n, m).unwrap();
            let chain = ch.apply_local(&u_a, &u_b).unwrap().state;
            let framed = apply_unitary(&chain, &phi4_to_phi1(), &[0]).unwrap();
            let r = analyze(&ch, 1e-9).unwrap();
            let analyzer = canonicalize(&ch, &r).unwrap();
            assert!((fidelity(&framed, &analyzer).unwrap() - 1.0).abs() < 1e-10, "n={n} m={m}");
        }
    }

    #[test]
    fn planted_examples() {
        let p = generate_planted::<f64>(1, 1, 1, 3).unwrap();
        assert!((entanglement_entropy(&p.channel).unwrap() - 1.0).abs() < 1e-9);
        let p = generate_planted::<f64>(3, 2, 2, 3).unwrap();
        assert_eq!(analyze(&p.channel, 1e-9).unwrap().capacity, 2);
        let p = generate_planted::<f64>(1, 1, 0, 7).unwrap();
        assert_eq!(analyze(&p.channel, 1e-9).unwrap().capacity, 0);
    }

    #[test]
    fn planted_roundtrip_small() {
        for m in 1..=3 {
            for n in 1..=3 {
                for d in 0..=m.min(n) {
                    for seed in 0..3 {
                        let p = generate_planted::<f64>(m, n, d, seed).unwrap();
                        let r = analyze(&p.channel, 1e-9).unwrap();
                        assert_eq!(r.capacity, d, "m={m} n={n} d={d} seed={seed}");
                        let got = canonicalize(&p.channel, &r).unwrap();
                        let want = canonical_state(&p.channel, &r).unwrap();
                        assert!(fidelity(&got, &want).unwrap() > 1.0 - 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn hidden_unitaries_undo_scrambling() {
        let p = generate_planted::<f64>(2, 3, 1, 5).unwrap();
        let back = p.channel.apply_local(&p.hidden_u_a, &p.hidden_u_b).unwrap();
        let r = analyze(&back, 1e-9).unwrap();
        assert_eq!(r.capacity, 1);
        // unscrambled state has a singlet on (A_0, B_0)
        let rho = back.state.reduced_density(&[0, 2]).unwrap();
        let phi = bell_state::<f64>(BellIndex::ALL[0]);
        let v = rho.apply(phi.amplitudes()).unwrap();
        let overlap = crate::linalg::inner(phi.amplitudes(), &v).re;
        assert!((overlap - 1.0).abs() < 1e-10);
    }

    #[test]
    fn planted_is_reproducible() {
        let a = generate_planted::<f64>(2, 2, 1, 42).unwrap();
        let b = generate_planted::<f64>(2, 2, 1, 42).unwrap();
        assert_eq!(a.channel.state.amplitudes(), b.channel.state.amplitudes());
    }

    #[test]
    fn planted_rejects_bad_parameters() {
        assert!(matches!(generate_planted::<f64>(2, 2, 3, 0), Err(Error::Infeasible(_))));
        assert!(matches!(generate_planted::<f64>(9, 8, 1, 0), Err(Error::Infeasible(_))));
        assert!(matches!(generate_planted::<f64>(0, 2, 0, 0), Err(Error::Infeasible(_))));
        assert!(matches!(generate_planted::<f64>(11, 2, 1, 0), Err(Error::TooLarge(_))));
    }
}
