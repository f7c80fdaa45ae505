//! Crate-wide error type.
//!
//! One enum covers the whole pipeline — scenario parsing, graph analysis,
//! compensator synthesis, and integration — so that callers (notably the CLI)
//! can classify a failure with a single `match`.  The broad classes are:
//!
//! * usage / configuration problems (`Parse`, `Validation`,
//!   `InvalidParameters`, `DimensionMismatch`, `Io`),
//! * structural problems discovered during synthesis (`NoSpanningTree`,
//!   `SpectraOverlap`, `NotHurwitz`, `NotControllable`, `SingularT`,
//!   `SynthesisResidual`),
//! * runtime numerical failures (`NonFiniteState`, `SingularMass`,
//!   `Overflow`).

use std::fmt;

#[derive(Debug)]
pub enum Error {
    /// A matrix or vector argument had a shape incompatible with the
    /// operation.  `context` names the operation, `detail` the offending
    /// dimensions.
    DimensionMismatch {
        context: &'static str,
        detail: String,
    },

    /// A scenario field failed validation.  `field` is the dotted path into
    /// the scenario document (e.g. `integrator.dt`).
    Validation { field: String, message: String },

    /// The scenario file is not well-formed JSON (or does not match the
    /// schema).  Line and column are 1-based positions in the input.
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The communication digraph has no directed spanning tree, so no
    /// agreement protocol over it can converge.
    NoSpanningTree,

    /// A Sylvester equation T·Φ − M·T = R had no (reliable) solution; the
    /// spectra of Φ and M intersect, or nearly so.  `residual` is the
    /// relative equation residual of the attempted solution.
    SpectraOverlap { residual: f64 },

    /// A matrix required to be Hurwitz has an eigenvalue with nonnegative
    /// real part.
    NotHurwitz { max_real_part: f64 },

    /// A feedback pair (M, N) supplied for a compensator channel is not
    /// controllable, so the synthesis equations are degenerate.
    NotControllable,

    /// A synthesized coupling matrix T is singular or too ill-conditioned to
    /// invert (condition number reported).
    SingularT { condition: f64 },

    /// The assembled compensator data failed its internal consistency check
    /// ‖A − B − Σ Eⱼϱⱼ‖ ≤ tol.
    SynthesisResidual { residual: f64 },

    /// The inertia matrix became numerically singular during integration.
    /// Cannot occur for parameter vectors accepted by `ArmParameters::new`.
    SingularMass { det: f64 },

    /// A state component left the realm of finite floating-point numbers.
    /// `index` addresses the flat state vector; `label` is a human-readable
    /// rendering of the component when the caller knows the layout.
    NonFiniteState {
        t: f64,
        index: usize,
        label: String,
    },

    /// Physical or tuning parameters outside the admissible set.
    InvalidParameters { message: String },

    /// A matrix exponential was requested outside the documented input range
    /// (‖A·t‖ too large) or produced non-finite entries.
    Overflow { norm: f64 },

    /// Wrapped I/O error from reading or writing scenario and output files.
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { context, detail } => {
                write!(f, "dimension mismatch in {context}: {detail}")
            }
            Error::Validation { field, message } => {
                write!(f, "invalid scenario field `{field}`: {message}")
            }
            Error::Parse {
                line,
                column,
                message,
            } => {
                write!(f, "scenario parse error at line {line}, column {column}: {message}")
            }
            Error::NoSpanningTree => {
                write!(f, "communication digraph has no directed spanning tree")
            }
            Error::SpectraOverlap { residual } => write!(
                f,
                "Sylvester equation unsolvable (overlapping spectra); relative residual {residual:.3e}"
            ),
            Error::NotHurwitz { max_real_part } => write!(
                f,
                "matrix is not Hurwitz: largest eigenvalue real part {max_real_part:.6e}"
            ),
            Error::NotControllable => {
                write!(f, "compensator feedback pair (M, N) is not controllable")
            }
            Error::SingularT { condition } => write!(
                f,
                "coupling matrix T is numerically singular (condition number {condition:.3e})"
            ),
            Error::SynthesisResidual { residual } => write!(
                f,
                "compensator synthesis residual {residual:.3e} exceeds tolerance"
            ),
            Error::SingularMass { det } => {
                write!(f, "inertia matrix numerically singular (det = {det:.3e})")
            }
            Error::NonFiniteState { t, index, label } => {
                if label.is_empty() {
                    write!(f, "non-finite state component {index} at t = {t:.6}")
                } else {
                    write!(f, "non-finite state ({label}) at t = {t:.6}")
                }
            }
            Error::InvalidParameters { message } => {
                write!(f, "invalid parameters: {message}")
            }
            Error::Overflow { norm } => write!(
                f,
                "matrix exponential outside supported range (‖A·t‖₁ = {norm:.3e})"
            ),
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
