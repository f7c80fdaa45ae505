//! Leaderless consensus of networked two-link manipulators with adaptive
//! rejection of unknown sinusoidal disturbances.
//!
//! The crate is a component library plus a deterministic fixed-step
//! simulator.  Each agent is a fully actuated two-link arm
//!
//! ```text
//!     𝓜ᵢ(qᵢ) q̈ᵢ + 𝓒ᵢ(qᵢ, q̇ᵢ) q̇ᵢ + Gᵢ(qᵢ) = τᵢ + dᵢ(t)
//! ```
//!
//! disturbed by an unknown constant-plus-sinusoid signal per joint.  Agents
//! exchange information over a weighted digraph; nobody is a leader.  The
//! control stack on every agent combines
//!
//! * a distributed observer whose matrix states Sᵢ agree on an emergent
//!   group reference model and whose vectors ηᵢ synchronize under it
//!   ([`observer`]),
//! * an adaptive internal-model compensator that cancels the disturbance
//!   without knowing amplitudes, phases, or frequencies
//!   ([`internal_model`], [`controller`]),
//! * a certainty-equivalence torque law with gradient adaptation of both
//!   the dynamic parameters and the disturbance description
//!   ([`controller`]).
//!
//! [`sim`] wires the pieces into one flat ODE integrated by classical RK4 on
//! the exact time base t_k = k·dt.  Runs are bitwise deterministic: the same
//! scenario produces byte-identical CSV output regardless of thread count.
//!
//! Module map:
//!
//! * [`graph`] — digraph, Laplacian, spanning-tree and spectral analysis
//! * [`numerics`] — Sylvester/Lyapunov solves, expm, RK4, block products
//! * [`plant`] — arm dynamics, regressors, and their identities
//! * [`internal_model`] — disturbance classes and compensator synthesis
//! * [`observer`] — distributed reference-model observer
//! * [`controller`] — sliding vector, regressor assembly, torque law
//! * [`scenario`] — JSON scenario schema, validation, overrides
//! * [`sim`] — state layout, global RHS, runner, metrics, output files

pub mod controller;
pub mod error;
pub mod graph;
pub mod internal_model;
pub mod numerics;
pub mod observer;
pub mod plant;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
