//! Command-line front end.
//!
//! State files are JSON:
//!
//! ```json
//! {"n_qubits": 2, "alice": [0], "bob": [1],
//!  "amplitudes": [[0.0, 0.0], [0.7071067811865476, 0.0], [-0.7071067811865476, 0.0], [0.0, 0.0]]}
//! ```
//!
//! Amplitudes are listed in big-endian basis order (qubit 0 is the most
//! significant bit). Payload files omit `alice` and `bob`.
//!
//! Exit codes: 0 success, 1 capacity shortfall (`verify`), 2 malformed input,
//! 3 state not normalized, 4 infeasible request (capacity/payload mismatch,
//! bad split, unsupported size), 5 teleportation fidelity below `1 − 1e-9`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::capacity::{analyze, assess, AnalysisReport};
use crate::corpus::{generate_planted, ghz_chain_target, ghz_channel, ghz_cnot_chain};
use crate::error::Error;
use crate::linalg::{ComplexMatrix, SpectrumClusters};
use crate::qstate::{fidelity, ChannelState, PureState};
use crate::teleport::{self, encode_messages, Method, Mode, TeleportOutcome};

pub const DEFAULT_EPS: f64 = 1e-9;
/// Norm deviation above which a loaded state is renormalized with a warning.
pub const RENORMALIZE_WARN: f64 = 1e-9;
/// Norm deviation above which a loaded state is rejected.
pub const NORM_REJECT: f64 = 1e-6;
pub const FIDELITY_FLOOR: f64 = 1.0 - 1e-9;

pub mod exit {
    pub const OK: i32 = 0;
    pub const SHORTFALL: i32 = 1;
    pub const MALFORMED: i32 = 2;
    pub const NOT_NORMALIZED: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
    pub const FIDELITY: i32 = 5;
}

#[derive(Parser, Debug)]
#[command(name = "multiport", version, about = "Teleportation capacity of bipartite multiqubit channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Entropy, capacity and eigenvalue clusters of a channel file.
    Analyze {
        /// Channel state JSON (with alice/bob partition).
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Write U_A, U_B and η to this JSON file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Teleport a payload file through a channel file.
    Teleport {
        /// Channel state JSON.
        channel: PathBuf,
        /// Payload state JSON with as many qubits as the capacity.
        payload: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Bell)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of sampled runs in sample mode.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Write a random channel with capacity exactly D.
    Generate {
        /// Alice's qubit count.
        m: usize,
        /// Bob's qubit count.
        n: usize,
        /// Planted capacity.
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file.
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Exit 0 iff the channel's capacity is at least D.
    Verify {
        /// Channel state JSON.
        file: PathBuf,
        /// Required capacity.
        d: usize,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// GHZ walkthrough: CNOT chains, canonical form, one-qubit teleportation.
    DemoGhz {
        /// Total qubit count of the GHZ state.
        n: usize,
        /// Alice's qubit count.
        m: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Bell,
    Circuit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sample,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Bell => Method::Bell,
            MethodArg::Circuit => Method::Circuit,
        }
    }
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn from_error(e: Error) -> Failure {
    let code = match e {
        Error::NotNormalized(_) => exit::NOT_NORMALIZED,
        Error::Inadmissible { .. } | Error::Infeasible(_) | Error::TooLarge(_) | Error::OutOfRange(_) => {
            exit::INFEASIBLE
        }
        Error::DimensionMismatch(_) | Error::BadQubits(_) | Error::NonFinite => exit::MALFORMED,
        _ => exit::INFEASIBLE,
    };
    Failure::new(code, e.to_string())
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob: Option<Vec<usize>>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &PureState<f64>, partition: Option<(&[usize], &[usize])>) -> Self {
        StateFile {
            n_qubits: state.n_qubits(),
            alice: partition.map(|p| p.0.to_vec()),
            bob: partition.map(|p| p.1.to_vec()),
            amplitudes: state.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_channel(channel: &ChannelState<f64>) -> Self {
        Self::from_state(&channel.state, Some((channel.alice(), channel.bob())))
    }

    /// The state, renormalized; the second value is the norm deviation when a
    /// warning is due.
    pub fn to_state(&self) -> CliResult<(PureState<f64>, Option<f64>)> {
        if self.n_qubits == 0 || self.n_qubits > crate::qstate::MAX_QUBITS {
            return Err(Failure::new(exit::MALFORMED, format!("n_qubits = {}", self.n_qubits)));
        }
        if self.amplitudes.len() != 1 << self.n_qubits {
            return Err(Failure::new(
                exit::MALFORMED,
                format!(
                    "{} amplitudes for {} qubits (expected {})",
                    self.amplitudes.len(),
                    self.n_qubits,
                    1usize << self.n_qubits
                ),
            ));
        }
        let amps: Vec<Complex<f64>> = self.amplitudes.iter().map(|&[re, im]| Complex::new(re, im)).collect();
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Failure::new(exit::MALFORMED, "non-finite amplitude"));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let dev = (norm - 1.0).abs();
        if dev > NORM_REJECT {
            return Err(Failure::new(
                exit::NOT_NORMALIZED,
                format!("state norm {norm} deviates from 1 by {dev:.3e}"),
            ));
        }
        let state = PureState::normalized(amps).map_err(from_error)?;
        Ok((state, (dev > RENORMALIZE_WARN).then_some(dev)))
    }

    pub fn to_channel(&self) -> CliResult<(ChannelState<f64>, Option<f64>)> {
        let (state, warn) = self.to_state()?;
        let (Some(alice), Some(bob)) = (&self.alice, &self.bob) else {
            return Err(Failure::new(exit::MALFORMED, "channel file needs `alice` and `bob`"));
        };
        let ch = ChannelState::new(state, alice.clone(), bob.clone())
            .map_err(|e| Failure::new(exit::MALFORMED, e.to_string()))?;
        Ok((ch, warn))
    }
}

pub fn read_state_file(path: &Path) -> CliResult<StateFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(exit::MALFORMED, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(exit::MALFORMED, format!("{}: {e}", path.display())))
}

/// Serializes with shortest round-trip float formatting, so reading the file
/// back gives the same bits.
pub fn write_state_file(path: &Path, file: &StateFile) -> CliResult<()> {
    let text = serde_json::to_string_pretty(file).expect("plain data");
    std::fs::write(path, text + "\n").map_err(|e| Failure::new(exit::INFEASIBLE, format!("{}: {e}", path.display())))
}

type JsonMatrix = Vec<Vec<[f64; 2]>>;

fn json_matrix(m: &ComplexMatrix<f64>) -> JsonMatrix {
    (0..m.rows()).map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect()).collect()
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ClusterEntry {
    pub value: f64,
    pub multiplicity: usize,
    pub two_adic_valuation: u32,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ReportFile {
    pub entropy_bits: f64,
    pub capacity: usize,
    pub eps: f64,
    pub swapped: bool,
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
    pub relabeling: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
    pub clusters: Vec<ClusterEntry>,
    pub u_a: JsonMatrix,
    pub u_b: JsonMatrix,
    pub eta: Option<JsonMatrix>,
}

fn cluster_entries(c: &SpectrumClusters<f64>) -> Vec<ClusterEntry> {
    c.clusters
        .iter()
        .map(|c| ClusterEntry {
            value: c.value,
            multiplicity: c.multiplicity,
            two_adic_valuation: c.two_adic_valuation(),
        })
        .collect()
}

impl ReportFile {
    pub fn new(channel: &ChannelState<f64>, r: &AnalysisReport<f64>) -> Self {
        ReportFile {
            entropy_bits: r.entropy_bits,
            capacity: r.capacity,
            eps: r.eps,
            swapped: r.swapped,
            alice: channel.alice().to_vec(),
            bob: channel.bob().to_vec(),
            relabeling: r.relabeling.clone(),
            pairs: r.pairs.clone(),
            clusters: cluster_entries(&r.clusters),
            u_a: json_matrix(&r.u_a),
            u_b: json_matrix(&r.u_b),
            eta: r.residual_density().map(json_matrix),
        }
    }
}

fn cluster_lines(c: &SpectrumClusters<f64>) -> String {
    let mut s = String::new();
    for e in cluster_entries(c) {
        let _ = writeln!(
            s,
            "cluster value={:.6e} multiplicity={} v2={}",
            e.value, e.multiplicity, e.two_adic_valuation
        );
    }
    s
}

fn check_eps(eps: f64) -> CliResult<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Failure::new(exit::MALFORMED, format!("--eps must be positive, got {eps}")))
    }
}

fn load_channel(path: &Path, err: &mut dyn Write) -> CliResult<ChannelState<f64>> {
    let (ch, warn) = read_state_file(path)?.to_channel()?;
    if let Some(dev) = warn {
        let _ = writeln!(err, "warning: {} renormalized (norm off by {dev:.3e})", path.display());
    }
    Ok(ch)
}

fn load_payload(path: &Path, err: &mut dyn Write) -> CliResult<PureState<f64>> {
    let (st, warn) = read_state_file(path)?.to_state()?;
    if let Some(dev) = warn {
        let _ = writeln!(err, "warning: {} renormalized (norm off by {dev:.3e})", path.display());
    }
    Ok(st)
}

fn cmd_analyze(file: &Path, eps: f64, report: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    check_eps(eps)?;
    let ch = load_channel(file, err)?;
    let a = assess(&ch, eps).map_err(from_error)?;
    let side = if a.swapped { "alice" } else { "bob" };
    let mut s = format!("entropy={:.6} capacity={}\n", a.entropy_bits, a.capacity);
    let _ = writeln!(s, "spectrum side={side} dimension={}", a.clusters.dimension());
    s += &cluster_lines(&a.clusters);
    if let Some(path) = report {
        let r = analyze(&ch, eps).map_err(from_error)?;
        let text = serde_json::to_string_pretty(&ReportFile::new(&ch, &r)).expect("plain data");
        std::fs::write(path, text + "\n")
            .map_err(|e| Failure::new(exit::INFEASIBLE, format!("{}: {e}", path.display())))?;
        let _ = writeln!(s, "report written to {}", path.display());
    }
    let _ = out.write_all(s.as_bytes());
    Ok(())
}

fn message_string(o: &TeleportOutcome<f64>) -> String {
    encode_messages(&o.messages)
        .chunks(2)
        .map(|c| format!("{}{}", c[0] as u8, c[1] as u8))
        .collect::<Vec<_>>()
        .join(" ")
}

fn branch_table(outcomes: &[TeleportOutcome<f64>]) -> (String, f64) {
    let mut s = String::new();
    let mut worst = f64::INFINITY;
    let mut total = 0.0;
    for o in outcomes {
        let idx: Vec<String> = o.messages.iter().map(|m| m.get().to_string()).collect();
        let _ = writeln!(
            s,
            "branch i=({}) bits={} probability={:.9} fidelity={:.12}",
            idx.join(","),
            message_string(o),
            o.branch_probability,
            o.payload_fidelity
        );
        worst = worst.min(o.payload_fidelity);
        total += o.branch_probability;
    }
    let _ = writeln!(
        s,
        "branches={} total_probability={:.12} min_fidelity={:.12}",
        outcomes.len(),
        total,
        worst
    );
    (s, worst)
}

#[allow(clippy::too_many_arguments)]
fn cmd_teleport(
    channel: &Path,
    payload: &Path,
    method: Method,
    mode: ModeArg,
    seed: u64,
    trials: usize,
    eps: f64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    check_eps(eps)?;
    let ch = load_channel(channel, err)?;
    let payload = load_payload(payload, err)?;
    let r = analyze(&ch, eps).map_err(from_error)?;
    if r.capacity == 0 || payload.n_qubits() != r.capacity {
        return Err(Failure::new(
            exit::INFEASIBLE,
            format!("{}-qubit payload, channel capacity {}", payload.n_qubits(), r.capacity),
        ));
    }
    let mut s = format!("capacity={} method={:?} mode={:?}\n", r.capacity, method, mode).to_lowercase();
    let worst = match mode {
        ModeArg::Exhaustive => {
            let outcomes = teleport::teleport(&ch, &payload, &r, method, Mode::Exhaustive, seed).map_err(from_error)?;
            let (table, worst) = branch_table(&outcomes);
            s += &table;
            worst
        }
        ModeArg::Sample => {
            if trials == 0 {
                return Err(Failure::new(exit::MALFORMED, "--trials must be positive"));
            }
            let runs = teleport::sample_trials(&ch, &payload, &r, method, trials, seed).map_err(from_error)?;
            let mut counts: BTreeMap<String, (usize, f64)> = BTreeMap::new();
            let mut worst = f64::INFINITY;
            for o in &runs {
                let e = counts.entry(message_string(o)).or_insert((0, o.branch_probability));
                e.0 += 1;
                worst = worst.min(o.payload_fidelity);
            }
            for (bits, (count, p)) in &counts {
                let _ = writeln!(
                    s,
                    "outcome bits={bits} count={count} frequency={:.6} probability={:.9}",
                    *count as f64 / trials as f64,
                    p
                );
            }
            let _ = writeln!(s, "trials={trials} seed={seed} min_fidelity={worst:.12}");
            worst
        }
    };
    let _ = out.write_all(s.as_bytes());
    if worst < FIDELITY_FLOOR {
        return Err(Failure::new(exit::FIDELITY, format!("min fidelity {worst:.12} below 1 - 1e-9")));
    }
    Ok(())
}

fn cmd_generate(m: usize, n: usize, d: usize, seed: u64, output: &Path, out: &mut dyn Write) -> CliResult<()> {
    let p = generate_planted::<f64>(m, n, d, seed).map_err(|e| Failure::new(exit::INFEASIBLE, e.to_string()))?;
    write_state_file(output, &StateFile::from_channel(&p.channel))?;
    let _ = writeln!(
        out,
        "planted capacity={} split={m}|{n} seed={seed} written to {}",
        p.planted_capacity,
        output.display()
    );
    Ok(())
}

fn cmd_verify(file: &Path, d: usize, eps: f64, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    check_eps(eps)?;
    let ch = load_channel(file, err)?;
    let a = assess(&ch, eps).map_err(|e| Failure::new(exit::MALFORMED, e.to_string()))?;
    let mut s = cluster_lines(&a.clusters);
    let _ = writeln!(
        s,
        "certificate min_v2={} cap=min(m,n)={} capacity={} requested={d}",
        a.clusters
            .clusters
            .iter()
            .map(|c| c.two_adic_valuation())
            .min()
            .unwrap_or(0),
        ch.m().min(ch.n()),
        a.capacity
    );
    let ok = a.capacity >= d;
    let _ = writeln!(s, "{}", if ok { "verified" } else { "shortfall" });
    let _ = out.write_all(s.as_bytes());
    if ok {
        Ok(())
    } else {
        Err(Failure::new(exit::SHORTFALL, format!("capacity {} < {d}", a.capacity)))
    }
}

fn cnot_names(controls_targets: impl Iterator<Item = (usize, usize)>) -> String {
    let v: Vec<String> = controls_targets.map(|(c, t)| format!("C({c}->{t})")).collect();
    if v.is_empty() {
        "I".into()
    } else {
        v.join(" ")
    }
}

fn demo_payload() -> PureState<f64> {
    let (s, c) = (std::f64::consts::PI / 8.0).sin_cos();
    let ph = Complex::from_polar(s, std::f64::consts::FRAC_PI_4);
    PureState::new(vec![Complex::new(c, 0.0), ph]).expect("unit norm")
}

fn cmd_demo_ghz(n: usize, m: usize, out: &mut dyn Write) -> CliResult<()> {
    let ch = ghz_channel::<f64>(n, m).map_err(|e| Failure::new(exit::INFEASIBLE, e.to_string()))?;
    let mut s = format!("GHZ({n}) split {m}|{}: Alice holds qubits 1..{m}, Bob {}..{n}\n", n - m, m + 1);
    let a = assess(&ch, DEFAULT_EPS).map_err(from_error)?;
    let _ = writeln!(s, "entropy={:.6} capacity={}", a.entropy_bits, a.capacity);

    let (u_a, u_b) = ghz_cnot_chain::<f64>(n, m).map_err(from_error)?;
    let _ = writeln!(s, "U_A = {}", cnot_names((2..=m).map(|t| (1, t))));
    let _ = writeln!(s, "U_B = {}", cnot_names((m + 1..n).map(|t| (n, t))));
    let chained = ch.apply_local(&u_a, &u_b).map_err(from_error)?;
    let f_chain = fidelity(&chained.state, &ghz_chain_target(n).map_err(from_error)?).map_err(from_error)?;
    let _ = writeln!(
        s,
        "(U_A ⊗ U_B)|GHZ⟩ = φ⁴(1,{n}) ⊗ |0…0⟩  fidelity={f_chain:.12}"
    );

    let r = analyze(&ch, DEFAULT_EPS).map_err(from_error)?;
    let pairs: Vec<String> = r.pairs.iter().map(|(a, b)| format!("({},{})", a + 1, b + 1)).collect();
    let _ = writeln!(s, "analyzer: capacity={} singlet on {}", r.capacity, pairs.join(" "));
    let outcomes = teleport::teleport_bell(&ch, &demo_payload(), &r, Mode::Exhaustive, 0).map_err(from_error)?;
    let (table, worst) = branch_table(&outcomes);
    s += &table;
    let pass = f_chain >= FIDELITY_FLOOR && a.capacity == 1 && worst >= FIDELITY_FLOOR;
    let _ = writeln!(s, "{}", if pass { "all checks passed" } else { "check failed" });
    let _ = out.write_all(s.as_bytes());
    if pass {
        Ok(())
    } else {
        Err(Failure::new(exit::FIDELITY, "GHZ demo check failed"))
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Analyze { file, eps, report } => cmd_analyze(&file, eps, report.as_deref(), out, err),
        Command::Teleport {
            channel,
            payload,
            method,
            mode,
            seed,
            trials,
            eps,
        } => cmd_teleport(&channel, &payload, method.into(), mode, seed, trials, eps, out, err),
        Command::Generate { m, n, d, seed, output } => cmd_generate(m, n, d, seed, &output, out),
        Command::Verify { file, d, eps } => cmd_verify(&file, d, eps, out, err),
        Command::DemoGhz { n, m } => cmd_demo_ghz(n, m, out),
    };
    match result {
        Ok(()) => exit::OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
