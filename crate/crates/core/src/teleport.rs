//! Teleporting a payload through a canonicalized channel.
//!
//! Each round consumes one singlet `(A_r, B_r)` from the report's pair list:
//! Alice measures `(payload_r, A_r)`, sends the 2-bit index `i`, and Bob
//! applies `U^i` to `B_r`. The Bell-measurement round projects onto `φ^i`; the
//! circuit round applies `H_a·CNOT(a → payload)` and measures both qubits in the
//! computational basis.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use crate::capacity::{canonicalize, AnalysisReport};
use crate::error::{Error, Result};
use crate::gates;
use crate::linalg::partial::{complement, scatter};
use crate::linalg::ComplexMatrix;
use crate::qstate::{
    apply_operator, basis_state, bell_state, project_unchecked, tensor, BellIndex, ChannelState, PureState,
    MAX_QUBITS,
};
use crate::random::{derive_seed, rng_from_seed};
use crate::scalar::Real;

/// Index `i ∈ {1,2,3,4}` of a measurement outcome and its correction `U^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrectionIndex(u8);

impl CorrectionIndex {
    pub const ALL: [CorrectionIndex; 4] = [
        CorrectionIndex(1),
        CorrectionIndex(2),
        CorrectionIndex(3),
        CorrectionIndex(4),
    ];

    pub fn new(i: u8) -> Result<Self> {
        if (1..=4).contains(&i) {
            Ok(CorrectionIndex(i))
        } else {
            Err(Error::OutOfRange(format!("correction index {i}")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// The classical message, `i − 1` in binary, high bit first.
    pub fn bits(self) -> [bool; 2] {
        let v = self.0 - 1;
        [v & 2 != 0, v & 1 != 0]
    }

    pub fn from_bits(bits: [bool; 2]) -> Self {
        CorrectionIndex(1 + (bits[0] as u8) * 2 + bits[1] as u8)
    }

    fn bell(self) -> BellIndex {
        BellIndex::ALL[(self.0 - 1) as usize]
    }
}

/// Concatenated 2-bit messages, round-major.
pub fn encode_messages(messages: &[CorrectionIndex]) -> Vec<bool> {
    messages.iter().flat_map(|m| m.bits()).collect()
}

pub fn decode_messages(bits: &[bool]) -> Result<Vec<CorrectionIndex>> {
    if bits.len() % 2 != 0 {
        return Err(Error::DimensionMismatch("odd number of message bits".into()));
    }
    Ok(bits.chunks(2).map(|c| CorrectionIndex::from_bits([c[0], c[1]])).collect())
}

/// `U^i` from `{I, σz, −σx, iσy}`.
pub fn correction_operator<T: Real>(i: CorrectionIndex) -> ComplexMatrix<T> {
    match i.0 {
        1 => gates::identity(),
        2 => gates::pauli_z(),
        3 => gates::pauli_x().scale(Complex::new(-T::one(), T::zero())),
        _ => gates::pauli_y().scale(Complex::new(T::zero(), T::one())),
    }
}

/// `H_a · C^a_1` on `(1, a)`: CNOT with control `a` and target `1`, then a
/// Hadamard on `a`.
pub fn circuit_unitary<T: Real>() -> ComplexMatrix<T> {
    // CNOT with control on the second qubit: |x y⟩ → |x⊕y, y⟩
    let c = ComplexMatrix::from_fn(4, 4, |r, col| {
        let (x, y) = (col >> 1, col & 1);
        if r == ((x ^ y) << 1 | y) {
            Complex::new(T::one(), T::zero())
        } else {
            Complex::zero()
        }
    });
    let h_a = crate::linalg::kron(&gates::identity(), &gates::hadamard()).expect("4x4");
    &h_a * &c
}

/// Computational outcome `(bit_1, bit_a)` that maps to index `i`:
/// `|11⟩ → 1, |10⟩ → 2, |01⟩ → 3, |00⟩ → 4`.
pub fn chi_bits(i: CorrectionIndex) -> [u8; 2] {
    match i.0 {
        1 => [1, 1],
        2 => [1, 0],
        3 => [0, 1],
        _ => [0, 0],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Bell,
    Circuit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Forced(CorrectionIndex),
    Sample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sample,
}

/// One round's measured index and its probability conditioned on earlier rounds.
#[derive(Clone, Copy, Debug)]
pub struct RoundResult<T> {
    pub index: CorrectionIndex,
    pub probability: T,
}

#[derive(Clone, Debug)]
pub struct TeleportOutcome<T> {
    pub messages: Vec<CorrectionIndex>,
    pub branch_probability: T,
    /// Bob's `d` target qubits after correction.
    pub receiver_state: PureState<T>,
    pub payload_fidelity: T,
}

struct Round {
    payload: usize,
    alice: usize,
    bob: usize,
}

fn check_round(n: usize, q: [usize; 3]) -> Result<()> {
    if q.iter().any(|&x| x >= n) || q[0] == q[1] || q[0] == q[2] || q[1] == q[2] {
        return Err(Error::BadQubits(format!("round qubits {q:?} in a {n}-qubit register")));
    }
    Ok(())
}

fn measured_state<T: Real>(state: &PureState<T>, r: &Round, method: Method) -> PureState<T> {
    match method {
        Method::Bell => state.clone(),
        Method::Circuit => apply_operator(state, &circuit_unitary(), &[r.payload, r.alice]),
    }
}

fn outcome_vector<T: Real>(i: CorrectionIndex, method: Method) -> PureState<T> {
    match method {
        Method::Bell => bell_state(i.bell()),
        Method::Circuit => basis_state(&chi_bits(i)).expect("two bits"),
    }
}

/// Measures, then corrects; `None` when the forced outcome is unreachable.
fn forced_round<T: Real>(
    measured: &PureState<T>,
    r: &Round,
    i: CorrectionIndex,
    method: Method,
) -> (T, Option<PureState<T>>) {
    let p = project_unchecked(measured, &[r.payload, r.alice], &outcome_vector(i, method));
    let post = p
        .collapsed
        .map(|s| apply_operator(&s, &correction_operator(i), &[r.bob]));
    (p.probability, post)
}

fn sampled_round<T: Real, R: Rng + ?Sized>(
    measured: &PureState<T>,
    r: &Round,
    method: Method,
    rng: &mut R,
) -> Result<(RoundResult<T>, PureState<T>)> {
    let branches: Vec<(T, Option<PureState<T>>)> = CorrectionIndex::ALL
        .iter()
        .map(|&i| forced_round(measured, r, i, method))
        .collect();
    let total: f64 = branches.iter().map(|b| b.0.to_f64_lossy()).sum();
    let mut u = rng.random::<f64>() * total;
    let mut pick = None;
    for (k, b) in branches.iter().enumerate() {
        if b.1.is_none() {
            continue;
        }
        pick = Some(k);
        u -= b.0.to_f64_lossy();
        if u < 0.0 {
            break;
        }
    }
    let k = pick.ok_or(Error::Unreachable(total))?;
    let (probability, post) = branches.into_iter().nth(k).expect("four branches");
    Ok((
        RoundResult {
            index: CorrectionIndex::ALL[k],
            probability,
        },
        post.expect("reachable"),
    ))
}

/// One Bell-measurement round: projects `(payload, alice)` onto `φ^i` and
/// applies `U^i` to `bob`.
pub fn bell_round<T: Real, R: Rng + ?Sized>(
    state: &PureState<T>,
    payload_qubit: usize,
    alice_qubit: usize,
    bob_qubit: usize,
    outcome: Outcome,
    rng: &mut R,
) -> Result<(RoundResult<T>, PureState<T>)> {
    check_round(state.n_qubits(), [payload_qubit, alice_qubit, bob_qubit])?;
    let r = Round {
        payload: payload_qubit,
        alice: alice_qubit,
        bob: bob_qubit,
    };
    match outcome {
        Outcome::Forced(i) => match forced_round(state, &r, i, Method::Bell) {
            (p, Some(post)) => Ok((RoundResult { index: i, probability: p }, post)),
            (p, None) => Err(Error::Unreachable(p.to_f64_lossy())),
        },
        Outcome::Sample => sampled_round(state, &r, Method::Bell, rng),
    }
}

/// Bob's qubits as a state, read off the largest-weight slice of the rest.
fn restrict<T: Real>(state: &PureState<T>, keep: &[usize]) -> Result<PureState<T>> {
    let n = state.n_qubits();
    let rest = complement(keep, n);
    let offs: Vec<usize> = (0..1usize << keep.len()).map(|v| scatter(keep, n, v)).collect();
    let amps = state.amplitudes();
    let weight = |base: usize| offs.iter().map(|&o| amps[base | o].norm_sqr()).sum::<T>();
    let best = (0..1usize << rest.len())
        .map(|r| scatter(&rest, n, r))
        .max_by(|&a, &b| weight(a).partial_cmp(&weight(b)).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    PureState::normalized(offs.iter().map(|&o| amps[best | o]).collect())
}

/// `⟨ψ|ρ|ψ⟩` with `ρ` the reduced density on `keep`.
fn payload_fidelity<T: Real>(state: &PureState<T>, keep: &[usize], payload: &PureState<T>) -> Result<T> {
    let rho = state.reduced_density(keep)?;
    let v = rho.apply(payload.amplitudes())?;
    Ok(crate::linalg::inner(payload.amplitudes(), &v).re)
}

struct Prepared<T> {
    state: PureState<T>,
    rounds: Vec<Round>,
    receivers: Vec<usize>,
}

fn prepare<T: Real>(
    channel: &ChannelState<T>,
    payload: &PureState<T>,
    report: &AnalysisReport<T>,
) -> Result<Prepared<T>> {
    let d = report.capacity;
    if d == 0 {
        return Err(Error::OutOfRange("channel has zero capacity".into()));
    }
    if payload.n_qubits() != d {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit payload for a capacity-{d} channel",
            payload.n_qubits()
        )));
    }
    let n = channel.state.n_qubits();
    if n + d > MAX_QUBITS {
        return Err(Error::TooLarge(format!("{} qubits with payload", n + d)));
    }
    let canonical = canonicalize(channel, report)?;
    let state = tensor(&[payload.clone(), canonical])?;
    let rounds: Vec<Round> = report
        .pairs
        .iter()
        .enumerate()
        .map(|(r, &(a, b))| Round {
            payload: r,
            alice: a + d,
            bob: b + d,
        })
        .collect();
    let receivers = rounds.iter().map(|r| r.bob).collect();
    Ok(Prepared {
        state,
        rounds,
        receivers,
    })
}

fn finish<T: Real>(
    prep: &Prepared<T>,
    payload: &PureState<T>,
    state: &PureState<T>,
    messages: Vec<CorrectionIndex>,
    probability: T,
) -> Result<TeleportOutcome<T>> {
    Ok(TeleportOutcome {
        messages,
        branch_probability: probability,
        receiver_state: restrict(state, &prep.receivers)?,
        payload_fidelity: payload_fidelity(state, &prep.receivers, payload)?,
    })
}

fn run_branch<T: Real>(
    prep: &Prepared<T>,
    payload: &PureState<T>,
    method: Method,
    messages: &[CorrectionIndex],
) -> Result<Option<TeleportOutcome<T>>> {
    let mut state = prep.state.clone();
    let mut probability = T::one();
    for (r, &i) in prep.rounds.iter().zip(messages) {
        let measured = measured_state(&state, r, method);
        match forced_round(&measured, r, i, method) {
            (p, Some(post)) => {
                probability *= p;
                state = post;
            }
            (_, None) => return Ok(None),
        }
    }
    finish(prep, payload, &state, messages.to_vec(), probability).map(Some)
}

fn run_sampled<T: Real>(
    prep: &Prepared<T>,
    payload: &PureState<T>,
    method: Method,
    seed: u64,
) -> Result<TeleportOutcome<T>> {
    let mut rng = rng_from_seed(seed);
    let mut state = prep.state.clone();
    let mut probability = T::one();
    let mut messages = Vec::with_capacity(prep.rounds.len());
    for r in &prep.rounds {
        let measured = measured_state(&state, r, method);
        let (res, post) = sampled_round(&measured, r, method, &mut rng)?;
        probability *= res.probability;
        messages.push(res.index);
        state = post;
    }
    finish(prep, payload, &state, messages, probability)
}

fn branch_messages(d: usize, code: usize) -> Vec<CorrectionIndex> {
    (0..d)
        .map(|r| CorrectionIndex::ALL[code >> (2 * (d - 1 - r)) & 3])
        .collect()
}

/// Teleports `payload` (one qubit per unit of capacity) through the channel.
///
/// `Exhaustive` returns every reachable branch, in lexicographic order of the
/// message sequence; `Sample` returns the single branch drawn with `seed`.
pub fn teleport<T: Real>(
    channel: &ChannelState<T>,
    payload: &PureState<T>,
    report: &AnalysisReport<T>,
    method: Method,
    mode: Mode,
    seed: u64,
) -> Result<Vec<TeleportOutcome<T>>> {
    let prep = prepare(channel, payload, report)?;
    match mode {
        Mode::Sample => Ok(vec![run_sampled(&prep, payload, method, seed)?]),
        Mode::Exhaustive => {
            let d = prep.rounds.len();
            let branches: Result<Vec<Option<TeleportOutcome<T>>>> = (0..1usize << (2 * d))
                .into_par_iter()
                .map(|code| run_branch(&prep, payload, method, &branch_messages(d, code)))
                .collect();
            Ok(branches?.into_iter().flatten().collect())
        }
    }
}

pub fn teleport_bell<T: Real>(
    channel: &ChannelState<T>,
    payload: &PureState<T>,
    report: &AnalysisReport<T>,
    mode: Mode,
    seed: u64,
) -> Result<Vec<TeleportOutcome<T>>> {
    teleport(channel, payload, report, Method::Bell, mode, seed)
}

/// Measurement-free-entangler variant, one circuit per singlet.
pub fn teleport_circuit<T: Real>(
    channel: &ChannelState<T>,
    payload: &PureState<T>,
    report: &AnalysisReport<T>,
    mode: Mode,
    seed: u64,
) -> Result<Vec<TeleportOutcome<T>>> {
    teleport(channel, payload, report, Method::Circuit, mode, seed)
}

/// `trials` independent sampled runs; trial `t` uses
/// `derive_seed(seed, "teleport", t)`, so the result does not depend on
/// scheduling.
pub fn sample_trials<T: Real>(
    channel: &ChannelState<T>,
    payload: &PureState<T>,
    report: &AnalysisReport<T>,
    method: Method,
    trials: usize,
    seed: u64,
) -> Result<Vec<TeleportOutcome<T>>> {
    let prep = prepare(channel, payload, report)?;
    (0..trials as u64)
        .into_par_iter()
        .map(|t| run_sampled(&prep, payload, method, derive_seed(seed, "teleport", t)))
        .collect()
}

/// Max-norm gap between `|Ψ⟩_{1..N} ⊗ φ¹_{ab}` and
/// `−½ Σ_i φ^i_{1a} ⊗ U^i_b |Ψ⟩_{b,2..N}`, both laid out as `(1, 2..N, a, b)`.
pub fn expansion_identity_check<T: Real>(payload: &PureState<T>) -> Result<T> {
    let big_n = payload.n_qubits();
    let total = big_n + 2;
    if total > MAX_QUBITS {
        return Err(Error::TooLarge(format!("{total} qubits")));
    }
    let singlet = bell_state::<T>(BellIndex::ALL[0]);
    let lhs = tensor(&[payload.clone(), singlet])?;

    let tail = big_n - 1;
    let half = Complex::new(-T::lit(0.5), T::zero());
    let mut rhs = vec![Complex::<T>::zero(); 1 << total];
    for i in CorrectionIndex::ALL {
        let phi = bell_state::<T>(i.bell());
        let moved = apply_operator(payload, &correction_operator(i), &[0]);
        for (xy, f) in phi.amplitudes().iter().enumerate() {
            let (x1, xa) = (xy >> 1, xy & 1);
            for (k, p) in moved.amplitudes().iter().enumerate() {
                let (xb, rest) = (k >> tail, k & ((1 << tail) - 1));
                let idx = x1 << (total - 1) | rest << 2 | xa << 1 | xb;
                rhs[idx] += half * f * p;
            }
        }
    }
    Ok(lhs
        .amplitudes()
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(T::zero(), T::max))
}
