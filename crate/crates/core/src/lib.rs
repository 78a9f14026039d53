//! Teleportation capacity of bipartite multiqubit pure states.
//!
//! Given a state shared between Alice and Bob, [`capacity::analyze`] finds how
//! many qubits it teleports faithfully and the local unitaries that turn it
//! into that many singlets plus a residual. [`teleport`] runs the protocol on
//! the result, [`corpus`] builds reference and planted channels, and [`cli`]
//! is the command-line front end.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix `f64`.

pub mod capacity;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod qstate;
pub mod random;
pub mod scalar;
pub mod teleport;

pub use capacity::{analyze, assess, entanglement_entropy, verify_condition, verify_condition_on, Side};
pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix = linalg::ComplexMatrix<f64>;
pub type PureState = qstate::PureState<f64>;
pub type ChannelState = qstate::ChannelState<f64>;
pub type AnalysisReport = capacity::AnalysisReport<f64>;
pub type SpectrumClusters = linalg::SpectrumClusters<f64>;
pub type TeleportOutcome = teleport::TeleportOutcome<f64>;
pub type PlantedChannel = corpus::PlantedChannel<f64>;

pub type ComplexMatrix32 = linalg::ComplexMatrix<f32>;
pub type PureState32 = qstate::PureState<f32>;
pub type ChannelState32 = qstate::ChannelState<f32>;
