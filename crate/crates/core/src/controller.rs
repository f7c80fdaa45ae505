//! Adaptive tracking controller with internal-model disturbance rejection.
//!
//! Each agent drives its joints toward the local observer reference ηᵢ
//! through a sliding variable built from the velocity reference
//!
//! ```text
//!     q̇ᵣ = Sη − α(q − η),        s = q̇ − q̇ᵣ,
//! ```
//!
//! and applies
//!
//! ```text
//!     τ = −K s − ρ(t) ω̂ + A ξ,
//!     ω̂̇ = ρ(t)ᵀ s / λ,
//!     ξ̇ = M ξ + N τ,        ζ̇ = M ζ + P(t),
//! ```
//!
//! where ξ is the disturbance compensator, ζ a matrix filter that carries
//! the regressor of the compensator's reachable state, and ρ the combined
//! regressor for the unknown parameter vector ω = col(Θ, ϱ⊗Θ, ϱ): the arm's
//! five dynamic parameters Θ, the disturbance frequency parameters ϱ, and
//! their products.  All of ρ is computable from measured signals and the
//! frequency-independent synthesis data (M, N, Ψ, A, E_j):
//!
//! ```text
//!     P Θ = M N 𝓜s + N (𝓒s − 𝓜̇s + 𝓜q̈ᵣ + 𝓒q̇ᵣ + G)
//!     Q Θ = A N 𝓜s − (𝓜q̈ᵣ + 𝓒q̇ᵣ + G)
//!     ρ   = [ Aζ + Q │ E₁(ζ + N·Y_L) ⋯ E_l(ζ + N·Y_L) │ E₁ξ ⋯ E_lξ ]
//! ```
//!
//! with Y_L the regressor of 𝓜s.  The adaptation law makes the pair
//! (ω̃, s) passive: λ·ω̂̇ ≡ ρᵀs holds as an algebraic identity, which the
//! tests pin down along with the regressor contracts above.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::internal_model::AgentCompensatorData;
use crate::plant::{self, Regressor};

/// Tolerance for the symmetry check on the feedback gain K.
const K_SYMMETRY_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Gains
// ---------------------------------------------------------------------------

/// Controller gains shared by all agents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    /// Symmetric positive definite velocity-error feedback K.
    pub k: Matrix2<f64>,
    /// Adaptation scaling λ > 0 (Λ = λ·I on the parameter error).
    pub lambda: f64,
    /// Sliding-surface slope α > 0.
    pub alpha: f64,
}

impl Gains {
    pub fn new(k: Matrix2<f64>, lambda: f64, alpha: f64) -> Result<Self> {
        if k.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameters {
                message: "feedback gain K has non-finite entries".into(),
            });
        }
        if (k[(0, 1)] - k[(1, 0)]).abs() > K_SYMMETRY_TOL * (1.0 + k.norm()) {
            return Err(Error::InvalidParameters {
                message: format!("feedback gain K must be symmetric, got {k}"),
            });
        }
        let eigs = k.symmetric_eigenvalues();
        if !(eigs.min() > 0.0) {
            return Err(Error::InvalidParameters {
                message: format!("feedback gain K must be positive definite, eigenvalues {eigs}"),
            });
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameters {
                message: format!("adaptation scaling lambda={lambda} must be positive"),
            });
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameters {
                message: format!("sliding slope alpha={alpha} must be positive"),
            });
        }
        Ok(Gains { k, lambda, alpha })
    }

    /// Smallest eigenvalue of K (used by the dissipation analysis).
    pub fn min_k_eigenvalue(&self) -> f64 {
        self.k.symmetric_eigenvalues().min()
    }
}

// ---------------------------------------------------------------------------
// Reference signals
// ---------------------------------------------------------------------------

/// Velocity reference, its derivative, and the sliding variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSignals {
    /// q̇ᵣ = Sη − α(q − η).
    pub v: Vector2<f64>,
    /// q̈ᵣ = Ṡη + Sη̇ − α(q̇ − η̇).
    pub a: Vector2<f64>,
    /// s = q̇ − q̇ᵣ.
    pub s: Vector2<f64>,
}

/// Assemble the reference signals from the local observer state and its
/// time derivative (Ṡ, η̇ include the consensus coupling).
pub fn reference_signals(
    q: &Vector2<f64>,
    qdot: &Vector2<f64>,
    s_mat: &Matrix2<f64>,
    eta: &Vector2<f64>,
    s_mat_dot: &Matrix2<f64>,
    eta_dot: &Vector2<f64>,
    alpha: f64,
) -> ReferenceSignals {
    let v = s_mat * eta - alpha * (q - eta);
    let a = s_mat_dot * eta + s_mat * eta_dot - alpha * (qdot - eta_dot);
    ReferenceSignals { v, a, s: qdot - v }
}

// ---------------------------------------------------------------------------
// Regressor construction
// ---------------------------------------------------------------------------

fn to_dyn(y: &Regressor) -> DMatrix<f64> {
    DMatrix::from_iterator(2, 5, y.iter().copied())
}

fn check_arm_data(data: &AgentCompensatorData) -> Result<()> {
    if data.outputs != 2 {
        return Err(Error::DimensionMismatch {
            context: "controller",
            detail: format!("compensator data has {} channels, a two-joint arm needs 2", data.outputs),
        });
    }
    Ok(())
}

/// Filter input P (n_i×5): PΘ = MN·𝓜s + N(𝓒s − 𝓜̇s + 𝓜q̈ᵣ + 𝓒q̇ᵣ + G).
pub fn build_p(
    data: &AgentCompensatorData,
    gravity: f64,
    q: &Vector2<f64>,
    qdot: &Vector2<f64>,
    refs: &ReferenceSignals,
) -> Result<DMatrix<f64>> {
    check_arm_data(data)?;
    let y_l = to_dyn(&plant::regressor_l(q, &refs.s));
    let y_cs = to_dyn(&plant::regressor_cs(q, qdot, &refs.s));
    let y_mdot_s = to_dyn(&plant::regressor_mdot_s(q, qdot, &refs.s));
    let y = to_dyn(&plant::regressor_y(gravity, q, qdot, &refs.v, &refs.a));
    Ok(&data.m * (&data.n * y_l) + &data.n * (y_cs - y_mdot_s + y))
}

/// Nominal torque regressor Q (2×5): QΘ = AN·𝓜s − (𝓜q̈ᵣ + 𝓒q̇ᵣ + G).
pub fn build_q(
    data: &AgentCompensatorData,
    gravity: f64,
    q: &Vector2<f64>,
    qdot: &Vector2<f64>,
    refs: &ReferenceSignals,
) -> Result<DMatrix<f64>> {
    check_arm_data(data)?;
    let y_l = to_dyn(&plant::regressor_l(q, &refs.s));
    let y = to_dyn(&plant::regressor_y(gravity, q, qdot, &refs.v, &refs.a));
    Ok(&data.a * (&data.n * y_l) - y)
}

/// Combined regressor ρ (2×(5+6l)) for ω = col(Θ, ϱ⊗Θ, ϱ).
///
/// `q_mat` is the output of [`build_q`] at the same signals.
pub fn build_regressor(
    data: &AgentCompensatorData,
    q_mat: &DMatrix<f64>,
    zeta: &DMatrix<f64>,
    xi: &DVector<f64>,
    q: &Vector2<f64>,
    refs: &ReferenceSignals,
) -> Result<DMatrix<f64>> {
    check_arm_data(data)?;
    let l = data.sin_count;
    if zeta.shape() != (data.dim, 5) || xi.len() != data.dim {
        return Err(Error::DimensionMismatch {
            context: "build_regressor",
            detail: format!(
                "zeta {}x{}, xi {} for compensator dimension {}",
                zeta.nrows(),
                zeta.ncols(),
                xi.len(),
                data.dim
            ),
        });
    }
    let mut rho = DMatrix::zeros(2, 5 + 6 * l);
    rho.view_mut((0, 0), (2, 5)).copy_from(&(&data.a * zeta + q_mat));
    if l > 0 {
        let y_l = to_dyn(&plant::regressor_l(q, &refs.s));
        let shifted = zeta + &data.n * y_l;
        let middle = crate::numerics::tracy_singh_row(&data.e_blocks, &shifted)?;
        rho.view_mut((0, 5), (2, 5 * l)).copy_from(&middle);
        let xi_mat = DMatrix::from_column_slice(data.dim, 1, xi.as_slice());
        let tail = crate::numerics::tracy_singh_row(&data.e_blocks, &xi_mat)?;
        rho.view_mut((0, 5 + 5 * l), (2, l)).copy_from(&tail);
    }
    Ok(rho)
}

// ---------------------------------------------------------------------------
// Control and adaptation step
// ---------------------------------------------------------------------------

/// Everything the integrator needs from one agent's controller at one
/// instant: torque, adaptation rate, and the two filter derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlOutput {
    pub tau: Vector2<f64>,
    pub omega_hat_dot: DVector<f64>,
    pub xi_dot: DVector<f64>,
    pub zeta_dot: DMatrix<f64>,
    /// The regressor ρ used for this step (2×(5+6l)).
    pub regressor: DMatrix<f64>,
}

/// Evaluate the full control and adaptation law for one agent.
pub fn agent_control(
    gains: &Gains,
    data: &AgentCompensatorData,
    gravity: f64,
    q: &Vector2<f64>,
    qdot: &Vector2<f64>,
    refs: &ReferenceSignals,
    xi: &DVector<f64>,
    zeta: &DMatrix<f64>,
    omega_hat: &DVector<f64>,
) -> Result<ControlOutput> {
    let width = 5 + 6 * data.sin_count;
    if omega_hat.len() != width {
        return Err(Error::DimensionMismatch {
            context: "agent_control",
            detail: format!("omega_hat has {} entries, expected {width}", omega_hat.len()),
        });
    }
    let p = build_p(data, gravity, q, qdot, refs)?;
    let q_mat = build_q(data, gravity, q, qdot, refs)?;
    let rho = build_regressor(data, &q_mat, zeta, xi, q, refs)?;

    let feedforward = &data.a * xi; // length 2
    let correction = &rho * omega_hat; // length 2
    let tau = -gains.k * refs.s
        + Vector2::new(feedforward[0] - correction[0], feedforward[1] - correction[1]);
    let omega_hat_dot = rho.tr_mul(&refs.s) / gains.lambda;
    let xi_dot = &data.m * xi + &data.n * tau;
    let zeta_dot = &data.m * zeta + p;
    Ok(ControlOutput {
        tau,
        omega_hat_dot,
        xi_dot,
        zeta_dot,
        regressor: rho,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
