//! Oracles, invariants, and property suites for the fleet simulator.
//!
//! Everything in this crate sits *outside* the control path.  Closed-form
//! solutions of the linear subsystems, the disturbance pre-images θ, the
//! true closed-loop parameter vectors, and the Lyapunov certificate all
//! live here, so the simulator crate never links against quantities the
//! controller is not supposed to know.  Deleting this crate changes no
//! trajectory.
//!
//! Layout:
//! - [`benchmark`]: the canonical five-arm fleet used by every suite.
//! - [`exact`]: closed-form oracles (consensus mixing, θ, true ω, ideal
//!   feedforward, linear flows).
//! - [`invariants`]: the compensator error ξ̂ and the Lyapunov evaluator.
//! - [`suites`]: named pass/fail check lists behind the `verify` command.

pub mod benchmark;
pub mod exact;
pub mod invariants;
pub mod suites;
