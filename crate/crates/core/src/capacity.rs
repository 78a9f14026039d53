//! Teleportation capacity of a bipartite pure channel and the local unitaries
//! that bring it to canonical form.
//!
//! One party is the *spectral* side: its reduced density `ρ` is rotated by a
//! local unitary into `η ⊗ I/2^d`, where the `d` maximally mixed qubits are the
//! last `d` qubits of that party's list. The other party, the *purifier*, then
//! maps the whole state onto `d` singlets times a canonical purification of `η`.
//! The spectral side is Bob when `m ≥ n` and Alice otherwise, so the dense
//! eigenproblem always lives on the smaller register.
//!
//! Canonical layout, with `P` the purifier's list and `S` the spectral list:
//! pair `q < d` is a singlet φ¹ on `(P[q], S[|S|−d+q])` written in (Alice, Bob)
//! order; the residual `Σ_j √η_j |j⟩_{P[d..]} |u_j⟩_{S[..|S|−d]}` uses the
//! eigenvectors `u_j` of `η` (descending) and computational labels `j` on the
//! purifier's remaining qubits.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::ortho::{complete_basis, orthonormalize};
use crate::linalg::partial::amplitude_matrix;
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianEigen, SpectrumClusters};
use crate::qstate::{apply_unitary, ChannelState, PureState};
use crate::scalar::Real;

/// Largest register, in qubits, on which a dense local unitary is synthesized.
pub const MAX_OPERATOR_QUBITS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Alice,
    Bob,
}

#[derive(Clone, Copy, Debug)]
struct Orientation<'a> {
    spectral: &'a [usize],
    purifier: &'a [usize],
    purifier_is_alice: bool,
}

impl<'a> Orientation<'a> {
    fn of<T: Real>(channel: &'a ChannelState<T>) -> Self {
        if channel.m() >= channel.n() {
            Self::bob_spectral(channel)
        } else {
            Orientation {
                spectral: channel.alice(),
                purifier: channel.bob(),
                purifier_is_alice: false,
            }
        }
    }

    fn bob_spectral<T: Real>(channel: &'a ChannelState<T>) -> Self {
        Orientation {
            spectral: channel.bob(),
            purifier: channel.alice(),
            purifier_is_alice: true,
        }
    }

    fn swapped(&self) -> bool {
        !self.purifier_is_alice
    }
}

/// Everything the analyzer learns about a channel.
#[derive(Clone, Debug)]
pub struct AnalysisReport<T> {
    /// Entanglement entropy in bits.
    pub entropy_bits: T,
    /// Number of qubits the channel teleports faithfully.
    pub capacity: usize,
    /// Alice's local unitary, on her qubits in list order.
    pub u_a: ComplexMatrix<T>,
    /// Bob's local unitary, on his qubits in list order.
    pub u_b: ComplexMatrix<T>,
    /// Residual density on the spectral side's non-uniform qubits (1×1 when
    /// the capacity uses the whole spectral side).
    pub eta: ComplexMatrix<T>,
    /// Spectrum of the spectral side's reduced density.
    pub clusters: SpectrumClusters<T>,
    /// `false`: Bob's spectrum was factorized (`m ≥ n`); `true`: Alice's.
    pub swapped: bool,
    /// Canonical position → position in the spectral party's qubit list. The
    /// first `capacity` entries are the maximally mixed qubits.
    pub relabeling: Vec<usize>,
    /// `(alice_qubit, bob_qubit)` of each singlet after `u_a ⊗ u_b`.
    pub pairs: Vec<(usize, usize)>,
    pub eps: T,
}

impl<T: Real> AnalysisReport<T> {
    pub fn spectral_side(&self) -> Side {
        if self.swapped {
            Side::Alice
        } else {
            Side::Bob
        }
    }

    /// The unitary acting on the spectral side.
    pub fn spectral_unitary(&self) -> &ComplexMatrix<T> {
        if self.swapped {
            &self.u_a
        } else {
            &self.u_b
        }
    }

    /// Re-checks the factorization this report certifies.
    pub fn verify(&self, channel: &ChannelState<T>) -> bool {
        verify_condition_on(channel, self.spectral_side(), self.spectral_unitary(), self.capacity, self.eps)
    }

    /// `η`, or `None` when no residual qubits remain on the spectral side.
    pub fn residual_density(&self) -> Option<&ComplexMatrix<T>> {
        (self.eta.rows() > 1).then_some(&self.eta)
    }
}

/// Cheap part of the analysis: entropy, spectrum and capacity.
#[derive(Clone, Debug)]
pub struct Assessment<T> {
    pub entropy_bits: T,
    pub capacity: usize,
    pub clusters: SpectrumClusters<T>,
    pub swapped: bool,
}

/// `−Σ λ log₂ λ` over the positive eigenvalues.
pub fn entropy_of_spectrum<T: Real>(values: &[T]) -> T {
    values
        .iter()
        .filter(|&&l| l > T::zero())
        .fold(T::zero(), |acc, &l| acc - l * l.log2())
}

/// Von Neumann entropy (bits) of one party's reduced density.
pub fn side_entropy<T: Real>(channel: &ChannelState<T>, side: Side) -> Result<T> {
    let qubits = match side {
        Side::Alice => channel.alice(),
        Side::Bob => channel.bob(),
    };
    if qubits.len() > MAX_OPERATOR_QUBITS {
        return Err(Error::TooLarge(format!("{} qubits on one side", qubits.len())));
    }
    let rho = channel.state.reduced_density(qubits)?;
    Ok(entropy_of_spectrum(&hermitian_eig(&rho)?.values))
}

/// Entanglement entropy `E_AB` in bits, computed on the smaller party (the
/// two sides agree for a pure state).
pub fn entanglement_entropy<T: Real>(channel: &ChannelState<T>) -> Result<T> {
    let side = if channel.m() >= channel.n() { Side::Bob } else { Side::Alice };
    side_entropy(channel, side)
}

/// Largest `d ≤ min(m, n)` such that `2^d` divides every cluster multiplicity.
pub fn max_capacity<T>(clusters: &SpectrumClusters<T>, m: usize, n: usize) -> usize {
    clusters
        .clusters
        .iter()
        .map(|c| c.two_adic_valuation() as usize)
        .min()
        .unwrap_or(0)
        .min(m.min(n))
}

fn spectral_eigen<T: Real>(channel: &ChannelState<T>, o: Orientation<'_>) -> Result<HermitianEigen<T>> {
    hermitian_eig(&channel.state.reduced_density(o.spectral)?)
}

/// Entropy, clusters and capacity without building any unitary.
pub fn assess<T: Real>(channel: &ChannelState<T>, eps: T) -> Result<Assessment<T>> {
    let o = Orientation::of(channel);
    let eig = spectral_eigen(channel, o)?;
    let clusters = SpectrumClusters::from_eigen(&eig, eps);
    Ok(Assessment {
        entropy_bits: entropy_of_spectrum(&eig.values),
        capacity: max_capacity(&clusters, channel.m(), channel.n()),
        clusters,
        swapped: o.swapped(),
    })
}

/// `η = Tr_uniform ρ′` over the last `d` qubits and `‖ρ′ − η ⊗ I/2^d‖_max`.
fn factorization<T: Real>(rho: &ComplexMatrix<T>, d: usize) -> (ComplexMatrix<T>, T) {
    let block = 1usize << d;
    let rdim = rho.rows() / block;
    let eta = ComplexMatrix::from_fn(rdim, rdim, |j, jp| {
        (0..block).fold(Complex::zero(), |acc, i| acc + rho[(j * block + i, jp * block + i)])
    });
    let inv = T::one() / T::from_usize(block).unwrap_or_else(T::one);
    let mut dev = T::zero();
    for r in 0..rho.rows() {
        for c in 0..rho.cols() {
            let ideal = if r % block == c % block {
                eta[(r / block, c / block)] * inv
            } else {
                Complex::zero()
            };
            dev = dev.max((rho[(r, c)] - ideal).norm());
        }
    }
    (eta, dev)
}

fn spectral_density_after<T: Real>(
    channel: &ChannelState<T>,
    o: Orientation<'_>,
    u_s: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let rotated = apply_unitary(&channel.state, u_s, o.spectral)?;
    rotated.reduced_density(o.spectral)
}

fn verify_oriented<T: Real>(channel: &ChannelState<T>, o: Orientation<'_>, u_s: &ComplexMatrix<T>, d: usize, eps: T) -> bool {
    let k = o.spectral.len();
    if d > k || u_s.rows() != 1 << k || u_s.cols() != 1 << k {
        return false;
    }
    if d == 0 {
        return true;
    }
    match spectral_density_after(channel, o, u_s) {
        Ok(rho) => factorization(&rho, d).1 <= eps,
        Err(_) => false,
    }
}

/// [`verify_condition`] for either party: whether `u` (on `side`'s qubits in
/// list order) factorizes that party's reduced density.
pub fn verify_condition_on<T: Real>(channel: &ChannelState<T>, side: Side, u: &ComplexMatrix<T>, d: usize, eps: T) -> bool {
    let o = match side {
        Side::Bob => Orientation::bob_spectral(channel),
        Side::Alice => Orientation {
            spectral: channel.alice(),
            purifier: channel.bob(),
            purifier_is_alice: false,
        },
    };
    verify_oriented(channel, o, u, d, eps)
}

/// Whether `U_B` factorizes Bob's reduced density as `η ⊗ I/2^d` (maximally
/// mixed part on the last `d` of Bob's qubits) within `eps` in max-norm.
pub fn verify_condition<T: Real>(channel: &ChannelState<T>, u_b: &ComplexMatrix<T>, d: usize, eps: T) -> bool {
    verify_oriented(channel, Orientation::bob_spectral(channel), u_b, d, eps)
}

/// Spectral-side unitary, `η`, and the relabeling.
type SpectralSynthesis<T> = (ComplexMatrix<T>, ComplexMatrix<T>, Vec<usize>);

fn relabeling(k: usize, d: usize) -> Vec<usize> {
    (k - d..k).chain(0..k - d).collect()
}

fn synthesize_spectral<T: Real>(
    channel: &ChannelState<T>,
    o: Orientation<'_>,
    clusters: &SpectrumClusters<T>,
    d: usize,
) -> Result<SpectralSynthesis<T>> {
    let k = o.spectral.len();
    let dim = 1usize << k;
    let admissible = max_capacity(clusters, k, k);
    if d > admissible || clusters.dimension() != dim {
        return Err(Error::Inadmissible {
            requested: d,
            admissible,
        });
    }
    let block = 1usize << d;

    let rho = channel.state.reduced_density(o.spectral)?;
    let (eta, dev) = factorization(&rho, d);
    if dev <= clusters.eps {
        return Ok((ComplexMatrix::identity(dim), eta, relabeling(k, d)));
    }

    if clusters.clusters.iter().any(|c| c.basis.len() != c.multiplicity) {
        return Err(Error::DimensionMismatch("clusters carry no eigenvectors".into()));
    }
    // Each cluster of multiplicity c·2^d claims c consecutive residual labels;
    // within a label its eigenvectors fill the 2^d uniform labels in order.
    let mut u = ComplexMatrix::zeros(dim, dim);
    let mut eta_diag = Vec::with_capacity(dim / block);
    let mut row = 0;
    for c in &clusters.clusters {
        for _ in 0..c.multiplicity / block {
            eta_diag.push(c.value * T::from_usize(block).unwrap_or_else(T::one));
        }
        for v in &c.basis {
            for (col, z) in v.iter().enumerate() {
                u[(row, col)] = z.conj();
            }
            row += 1;
        }
    }
    Ok((u, ComplexMatrix::diagonal(&eta_diag), relabeling(k, d)))
}

/// Bob-side unitary mapping the eigenbasis of `ρ_B` onto product labels
/// `|j⟩_{B′} ⊗ |i⟩_{uniform}`, together with `η` and the relabeling of Bob's
/// qubits. Returns the identity when `ρ_B` is already factorized within the
/// clustering tolerance.
pub fn synthesize_u_b<T: Real>(
    channel: &ChannelState<T>,
    clusters: &SpectrumClusters<T>,
    d: usize,
) -> Result<SpectralSynthesis<T>> {
    synthesize_spectral(channel, Orientation::bob_spectral(channel), clusters, d)
}

/// Sign and purifier index of the canonical singlet term with uniform label `i`.
fn singlet_term(i: usize, d: usize, purifier_is_alice: bool) -> (bool, usize) {
    let mask = (1usize << d) - 1;
    let ones = i.count_ones() as usize;
    // φ¹ = (|01⟩ − |10⟩)/√2 in (Alice, Bob) order: each pair contributes −1
    // when Alice's bit is 1.
    let alice_ones = if purifier_is_alice { d - ones } else { ones };
    (alice_ones % 2 == 0, mask ^ i)
}

fn eta_eigen<T: Real>(eta: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    hermitian_eig(eta)
}

fn synthesize_purifier<T: Real>(
    channel: &ChannelState<T>,
    o: Orientation<'_>,
    u_s: &ComplexMatrix<T>,
    d: usize,
    eps: T,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    let np = o.purifier.len();
    let ns = o.spectral.len();
    if np > MAX_OPERATOR_QUBITS {
        return Err(Error::TooLarge(format!(
            "{np}-qubit local unitary exceeds the {MAX_OPERATOR_QUBITS}-qubit cap"
        )));
    }
    if d > ns || d > np {
        return Err(Error::Inadmissible {
            requested: d,
            admissible: ns.min(np),
        });
    }
    let rotated = apply_unitary(&channel.state, u_s, o.spectral)?;
    let n = rotated.n_qubits();
    let m = amplitude_matrix(rotated.amplitudes(), n, o.purifier, o.spectral)?;
    let rho = rotated.reduced_density(o.spectral)?;
    let (eta, dev) = factorization(&rho, d);
    if dev > eps {
        return Err(Error::ConditionFailed(d));
    }
    let eig = eta_eigen(&eta)?;

    let block = 1usize << d;
    let pdim = 1usize << np;
    let residual_slots = 1usize << (np - d);
    let threshold = eps * T::from_usize(block).unwrap_or_else(T::one);

    let mut sources = Vec::new();
    let mut targets: Vec<(bool, usize)> = Vec::new();
    for (j, &ev) in eig.values.iter().enumerate() {
        if ev <= threshold {
            continue;
        }
        if j >= residual_slots {
            return Err(Error::Infeasible(
                "purifier has too few qubits for the residual state".into(),
            ));
        }
        let uj = eig.vector(j);
        for i in 0..block {
            // a = M · conj(u_j ⊗ e_i)
            let a: Vec<Complex<T>> = (0..pdim)
                .map(|p| {
                    uj.iter().enumerate().fold(Complex::zero(), |acc, (jp, z)| {
                        acc + m[(p, jp * block + i)] * z.conj()
                    })
                })
                .collect();
            sources.push(a);
            let (positive, pair_bits) = singlet_term(i, d, o.purifier_is_alice);
            targets.push((positive, pair_bits * residual_slots + j));
        }
    }
    let sources = orthonormalize(&sources, T::lit(1e-6))?;
    let complement = complete_basis(&sources, pdim)?;
    let mut used = vec![false; pdim];
    for &(_, p) in &targets {
        used[p] = true;
    }
    let free: Vec<usize> = (0..pdim).filter(|&p| !used[p]).collect();
    debug_assert_eq!(free.len(), complement.len());

    // W = Σ_k ±|p_k⟩⟨a_k| + Σ_l |f_l⟩⟨c_l|
    let mut w = ComplexMatrix::zeros(pdim, pdim);
    for (a, &(positive, p)) in sources.iter().zip(&targets) {
        for (col, z) in a.iter().enumerate() {
            w[(p, col)] = if positive { z.conj() } else { -z.conj() };
        }
    }
    for (c, &p) in complement.iter().zip(&free) {
        for (col, z) in c.iter().enumerate() {
            w[(p, col)] = z.conj();
        }
    }
    Ok((w, eta))
}

/// Alice-side unitary that, after `U_B`, maps the channel onto `d` singlets
/// times the canonical purification of `η` (see the module docs).
pub fn synthesize_u_a<T: Real>(channel: &ChannelState<T>, u_b: &ComplexMatrix<T>, d: usize) -> Result<ComplexMatrix<T>> {
    synthesize_purifier(channel, Orientation::bob_spectral(channel), u_b, d, T::default_tolerance()).map(|(w, _)| w)
}

fn pairs_for(o: Orientation<'_>, d: usize) -> Vec<(usize, usize)> {
    let ns = o.spectral.len();
    (0..d)
        .map(|q| {
            let p = o.purifier[q];
            let s = o.spectral[ns - d + q];
            if o.purifier_is_alice {
                (p, s)
            } else {
                (s, p)
            }
        })
        .collect()
}

/// Full pipeline: spectrum, capacity, both local unitaries.
pub fn analyze<T: Real>(channel: &ChannelState<T>, eps: T) -> Result<AnalysisReport<T>> {
    if eps <= T::zero() {
        return Err(Error::OutOfRange("clustering tolerance must be positive".into()));
    }
    let o = Orientation::of(channel);
    if o.purifier.len() > MAX_OPERATOR_QUBITS {
        return Err(Error::TooLarge(format!(
            "{}-qubit local unitary exceeds the {MAX_OPERATOR_QUBITS}-qubit cap",
            o.purifier.len()
        )));
    }
    let eig = spectral_eigen(channel, o)?;
    let clusters = SpectrumClusters::from_eigen(&eig, eps);
    let capacity = max_capacity(&clusters, channel.m(), channel.n());
    let (u_s, _, relabel) = synthesize_spectral(channel, o, &clusters, capacity)?;
    if !verify_oriented(channel, o, &u_s, capacity, eps) {
        return Err(Error::ConditionFailed(capacity));
    }
    let (u_p, eta) = synthesize_purifier(channel, o, &u_s, capacity, eps)?;
    let (u_a, u_b) = if o.purifier_is_alice { (u_p, u_s) } else { (u_s, u_p) };
    Ok(AnalysisReport {
        entropy_bits: entropy_of_spectrum(&eig.values),
        capacity,
        u_a,
        u_b,
        eta,
        clusters,
        swapped: o.swapped(),
        relabeling: relabel,
        pairs: pairs_for(o, capacity),
        eps,
    })
}

/// The canonical state `(U_A ⊗ U_B)|X⟩` should equal, up to global phase.
pub fn canonical_state<T: Real>(channel: &ChannelState<T>, report: &AnalysisReport<T>) -> Result<PureState<T>> {
    let o = if report.swapped {
        Orientation {
            spectral: channel.alice(),
            purifier: channel.bob(),
            purifier_is_alice: false,
        }
    } else {
        Orientation::bob_spectral(channel)
    };
    canonical_oriented(channel, o, report.capacity, &report.eta)
}

/// Canonical form for Bob as the spectral side with residual density `eta`.
pub fn canonical_form<T: Real>(channel: &ChannelState<T>, d: usize, eta: &ComplexMatrix<T>) -> Result<PureState<T>> {
    canonical_oriented(channel, Orientation::bob_spectral(channel), d, eta)
}

fn canonical_oriented<T: Real>(
    channel: &ChannelState<T>,
    o: Orientation<'_>,
    d: usize,
    eta: &ComplexMatrix<T>,
) -> Result<PureState<T>> {
    let np = o.purifier.len();
    let ns = o.spectral.len();
    if d > np.min(ns) || eta.rows() != 1 << (ns - d) {
        return Err(Error::DimensionMismatch("residual density does not match capacity".into()));
    }
    let eig = eta_eigen(eta)?;
    let block = 1usize << d;
    let residual_slots = 1usize << (np - d);
    let n = channel.state.n_qubits();
    let mut amps = vec![Complex::<T>::zero(); 1 << n];
    let norm = T::one() / T::from_usize(block).unwrap_or_else(T::one).sqrt();
    for (j, &ev) in eig.values.iter().enumerate() {
        if ev <= T::zero() {
            continue;
        }
        if j >= residual_slots {
            return Err(Error::Infeasible("purifier has too few qubits for the residual state".into()));
        }
        let uj = eig.vector(j);
        let weight = ev.sqrt() * norm;
        for i in 0..block {
            let (positive, pair_bits) = singlet_term(i, d, o.purifier_is_alice);
            let p = pair_bits * residual_slots + j;
            let pidx = crate::linalg::partial::scatter(o.purifier, n, p);
            let sign = if positive { weight } else { -weight };
            for (jp, z) in uj.iter().enumerate() {
                let s = jp * block + i;
                let idx = pidx | crate::linalg::partial::scatter(o.spectral, n, s);
                amps[idx] += z * sign;
            }
        }
    }
    PureState::normalized(amps)
}

/// Applies `u_a ⊗ u_b` from a report to its channel.
pub fn canonicalize<T: Real>(channel: &ChannelState<T>, report: &AnalysisReport<T>) -> Result<PureState<T>> {
    Ok(channel.apply_local(&report.u_a, &report.u_b)?.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::is_unitary;
    use crate::qstate::{basis_state, bell_state, fidelity, ghz_state, random_pure_state, tensor, BellIndex};
    use crate::random::{haar_unitary, rng_from_seed};

    type C = ChannelState<f64>;

    fn singlet() -> PureState<f64> {
        bell_state(BellIndex::new(1).unwrap())
    }

    fn bell_pairs(k: usize) -> C {
        // pair i couples qubit i (Alice) with qubit k+i (Bob)
        let t = tensor(&vec![singlet(); k]).unwrap();
        let order: Vec<usize> = (0..k).flat_map(|i| [i, k + i]).collect();
        let mut amps = vec![Complex::zero(); t.dim()];
        let n = 2 * k;
        for (idx, a) in t.amplitudes().iter().enumerate() {
            let mut dst = 0;
            for (pos, &q) in order.iter().enumerate() {
                if idx >> (n - 1 - pos) & 1 == 1 {
                    dst |= 1 << (n - 1 - q);
                }
            }
            amps[dst] = *a;
        }
        C::contiguous(PureState::new(amps).unwrap(), k).unwrap()
    }

    fn check_report(ch: &C, r: &AnalysisReport<f64>) {
        assert!(is_unitary(&r.u_a, 1e-9));
        assert!(is_unitary(&r.u_b, 1e-9));
        assert!((r.eta.trace().re - 1.0).abs() < 1e-9);
        assert!(r.eta.is_hermitian(1e-9));
        let got = canonicalize(ch, r).unwrap();
        let want = canonical_state(ch, r).unwrap();
        assert!(fidelity(&got, &want).unwrap() > 1.0 - 1e-8);
        assert!(r.verify(ch));
    }

    #[test]
    fn entropy_examples() {
        assert!((entanglement_entropy(&bell_pairs(1)).unwrap() - 1.0).abs() < 1e-12);
        for (n, m) in [(3, 1), (4, 2), (5, 3), (6, 5)] {
            let ch = C::contiguous(ghz_state(n).unwrap(), m).unwrap();
            assert!((entanglement_entropy(&ch).unwrap() - 1.0).abs() < 1e-12);
        }
        let ch = C::contiguous(basis_state(&[0, 0, 0]).unwrap(), 1).unwrap();
        assert!(entanglement_entropy(&ch).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_same_from_both_sides() {
        for seed in 0..5 {
            let ch = C::contiguous(random_pure_state(7, seed).unwrap(), 3).unwrap();
            let a = side_entropy(&ch, Side::Alice).unwrap();
            let b = side_entropy(&ch, Side::Bob).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn capacity_examples() {
        for k in 1..=3 {
            let a = assess(&bell_pairs(k), 1e-9).unwrap();
            assert_eq!(a.capacity, k);
        }
        let ghz = C::contiguous(ghz_state(5).unwrap(), 4).unwrap();
        assert_eq!(assess(&ghz, 1e-9).unwrap().capacity, 1);
        let prod = C::contiguous(basis_state(&[0, 1, 0, 0]).unwrap(), 2).unwrap();
        assert_eq!(assess(&prod, 1e-9).unwrap().capacity, 0);
    }

    #[test]
    fn u_b_identity_when_already_uniform() {
        let ch = bell_pairs(2);
        let a = assess(&ch, 1e-9).unwrap();
        let (u, eta, relabel) = synthesize_u_b(&ch, &a.clusters, 2).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        assert_eq!(eta.rows(), 1);
        assert_eq!(relabel, vec![0, 1]);
    }

    #[test]
    fn ghz4_two_two() {
        let ch = C::contiguous(ghz_state(4).unwrap(), 2).unwrap();
        let a = assess(&ch, 1e-9).unwrap();
        assert_eq!(a.clusters.multiplicities(), vec![2, 2]);
        let (u, eta, _) = synthesize_u_b(&ch, &a.clusters, 1).unwrap();
        assert!(eta.max_abs_diff(&ComplexMatrix::diagonal(&[1.0, 0.0])) < 1e-12);
        let rotated = apply_unitary(&ch.state, &u, ch.bob()).unwrap();
        let rho = rotated.reduced_density(ch.bob()).unwrap();
        assert!(rho.max_abs_diff(&ComplexMatrix::diagonal(&[0.5, 0.5, 0.0, 0.0])) < 1e-12);
        assert!(verify_condition(&ch, &u, 1, 1e-9));
        assert!(!verify_condition(&ch, &u, 2, 1e-9));
    }

    #[test]
    fn verify_examples() {
        let ch = C::contiguous(random_pure_state(4, 9).unwrap(), 2).unwrap();
        assert!(verify_condition(&ch, &ComplexMatrix::identity(4), 0, 1e-9));
        assert!(verify_condition(&bell_pairs(1), &ComplexMatrix::identity(2), 1, 1e-9));
        let prod = C::contiguous(basis_state(&[0, 0]).unwrap(), 1).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..4 {
            let u = haar_unitary::<f64, _>(2, &mut rng).unwrap();
            assert!(!verify_condition(&prod, &u, 1, 1e-9));
        }
    }

    #[test]
    fn inadmissible_capacity_rejected() {
        let ch = C::contiguous(ghz_state(4).unwrap(), 2).unwrap();
        let a = assess(&ch, 1e-9).unwrap();
        assert!(matches!(
            synthesize_u_b(&ch, &a.clusters, 2),
            Err(Error::Inadmissible { requested: 2, admissible: 1 })
        ));
    }

    #[test]
    fn u_a_is_identity_on_canonical_singlet() {
        let ch = bell_pairs(1);
        let u_b = ComplexMatrix::identity(2);
        let u_a = synthesize_u_a(&ch, &u_b, 1).unwrap();
        let out = ch.apply_local(&u_a, &u_b).unwrap();
        assert!(fidelity(&out.state, &ch.state).unwrap() > 1.0 - 1e-12);
        assert!(u_a.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn u_a_requires_condition() {
        let ch = C::contiguous(basis_state(&[0, 0]).unwrap(), 1).unwrap();
        let r = synthesize_u_a(&ch, &ComplexMatrix::identity(2), 1);
        assert!(matches!(r, Err(Error::ConditionFailed(1))));
    }

    #[test]
    fn ghz_with_alice_majority() {
        for n in 3..=6 {
            let ch = C::contiguous(ghz_state(n).unwrap(), n - 1).unwrap();
            let r = analyze(&ch, 1e-9).unwrap();
            assert_eq!(r.capacity, 1);
            assert!(!r.swapped);
            assert_eq!(r.pairs, vec![(0, n - 1)]);
            check_report(&ch, &r);
            // singlet on (0, n-1), every other qubit |0⟩
            let mut bits = vec![0u8; n];
            bits[n - 1] = 1;
            let mut want = basis_state::<f64>(&bits).unwrap().into_amplitudes();
            bits[0] = 1;
            bits[n - 1] = 0;
            let idx = bits.iter().fold(0, |acc, &b| acc << 1 | b as usize);
            want[idx] = Complex::new(-1.0, 0.0);
            let want = PureState::normalized(want).unwrap();
            let got = canonicalize(&ch, &r).unwrap();
            assert!(fidelity(&got, &want).unwrap() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn analyze_examples() {
        let ch = bell_pairs(2);
        let r = analyze(&ch, 1e-9).unwrap();
        assert!((r.entropy_bits - 2.0).abs() < 1e-12);
        assert_eq!(r.capacity, 2);
        assert!(r.residual_density().is_none());
        check_report(&ch, &r);

        let ch = C::contiguous(ghz_state(6).unwrap(), 3).unwrap();
        let r = analyze(&ch, 1e-9).unwrap();
        assert!((r.entropy_bits - 1.0).abs() < 1e-12);
        assert_eq!(r.capacity, 1);
        check_report(&ch, &r);
    }

    #[test]
    fn swaps_when_alice_is_smaller() {
        let ch = C::contiguous(ghz_state(4).unwrap(), 1).unwrap();
        let r = analyze(&ch, 1e-9).unwrap();
        assert!(r.swapped);
        assert_eq!(r.spectral_side(), Side::Alice);
        assert_eq!(r.capacity, 1);
        assert_eq!(r.pairs, vec![(0, 1)]);
        check_report(&ch, &r);
    }

    #[test]
    fn random_channels_have_no_capacity() {
        for seed in 0..5 {
            let ch = C::contiguous(random_pure_state(6, seed).unwrap(), 3).unwrap();
            let r = analyze(&ch, 1e-9).unwrap();
            assert_eq!(r.capacity, 0);
            check_report(&ch, &r);
        }
    }

    #[test]
    fn scrambled_bell_pairs_are_recovered() {
        let mut rng = rng_from_seed(11);
        let base = bell_pairs(2);
        let va = haar_unitary::<f64, _>(4, &mut rng).unwrap();
        let vb = haar_unitary::<f64, _>(4, &mut rng).unwrap();
        let ch = base.apply_local(&va, &vb).unwrap();
        let r = analyze(&ch, 1e-9).unwrap();
        assert_eq!(r.capacity, 2);
        check_report(&ch, &r);
    }

    #[test]
    fn interleaved_partition() {
        // Bell pair on qubits (0, 2) and |+⟩ on 1, Alice = {1, 2}, Bob = {0, 3}
        let s = singlet();
        let mut amps = vec![Complex::zero(); 16];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (ab, a) in s.amplitudes().iter().enumerate() {
            for q1 in 0..2 {
                for q3 in 0..1 {
                    let idx = (ab >> 1) << 3 | q1 << 2 | (ab & 1) << 1 | q3;
                    amps[idx] = a * h;
                }
            }
        }
        let st = PureState::new(amps).unwrap();
        let ch = C::new(st, vec![1, 2], vec![0, 3]).unwrap();
        let r = analyze(&ch, 1e-9).unwrap();
        assert_eq!(r.capacity, 1);
        check_report(&ch, &r);
    }

    #[test]
    fn single_precision_pipeline() {
        let ch = ChannelState::<f32>::contiguous(ghz_state(4).unwrap(), 2).unwrap();
        let r = analyze(&ch, 1e-4).unwrap();
        assert_eq!(r.capacity, 1);
        assert!(is_unitary(&r.u_a, 1e-4));
    }
}
