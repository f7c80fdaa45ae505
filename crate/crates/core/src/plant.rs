//! Two-link manipulator dynamics.
//!
//! Each agent is a planar, fully actuated two-revolute-joint arm
//!
//! ```text
//!     𝓜(q) q̈ + 𝓒(q, q̇) q̇ + G(q) = τ + d
//! ```
//!
//! whose matrices depend on the five-parameter vector
//! Θ = (a₁, …, a₅) of inertia/mass lumped constants, with c₂ = cos q₂,
//! s₂ = sin q₂:
//!
//! ```text
//!     𝓜 = [ a₁ + a₂ + 2a₃c₂   a₂ + a₃c₂ ]      G = g·[ a₄cos q₁ + a₅cos(q₁+q₂) ]
//!         [ a₂ + a₃c₂          a₂        ]          [ a₅cos(q₁+q₂)              ]
//!
//!     𝓒 = [ −a₃s₂q̇₂    −a₃s₂(q̇₁+q̇₂) ]
//!         [  a₃s₂q̇₁     0             ]
//! ```
//!
//! Three classical properties carry the control design and are enforced by
//! the tests here:
//!
//! 1. 𝓜(q) is symmetric positive definite with q-independent bounds
//!    (checked on a grid at construction),
//! 2. every needed combination is linear in Θ, exposed through the four
//!    regressor builders below,
//! 3. 𝓜̇ − 2𝓒 is skew-symmetric (this particular 𝓒 uses the Christoffel
//!    convention, so the property is exact, not just up to a residual).
//!
//! The regressor slate:
//!
//! * [`regressor_y`]       Y(q, q̇, v, a)·Θ = 𝓜(q)a + 𝓒(q, q̇)v + G(q)
//! * [`regressor_l`]       L(q, s)·Θ = 𝓜(q)s
//! * [`regressor_cs`]      C_s(q, q̇, s)·Θ = 𝓒(q, q̇)s
//! * [`regressor_mdot_s`]  Ṁ_s(q, q̇, s)·Θ = 𝓜̇(q, q̇)s

use nalgebra::{Matrix2, SMatrix, SVector, Vector2};

use crate::error::{Error, Result};

/// 2×5 regressor block: one torque row per joint, one column per parameter.
pub type Regressor = SMatrix<f64, 2, 5>;

/// Number of grid points for the positive-definiteness sweep over q₂.
const PD_GRID: usize = 64;

// ---------------------------------------------------------------------------
// Parameters and state
// ---------------------------------------------------------------------------

/// Lumped arm parameters Θ = (a₁..a₅) plus the gravitational acceleration.
///
/// Construction verifies that the induced inertia matrix is positive
/// definite for every joint configuration.  For this arm the worst case is
/// analytic (det 𝓜 = a₁a₂ − a₃²cos²q₂ minimized at cos²q₂ = 1), but the
/// check sweeps a grid so it keeps working if the model ever grows terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmParameters {
    theta: SVector<f64, 5>,
    gravity: f64,
}

impl ArmParameters {
    pub fn new(theta: [f64; 5], gravity: f64) -> Result<Self> {
        if theta.iter().any(|a| !a.is_finite()) || !gravity.is_finite() {
            return Err(Error::InvalidParameters {
                message: "arm parameters must be finite".into(),
            });
        }
        let candidate = ArmParameters {
            theta: SVector::from(theta),
            gravity,
        };
        for k in 0..PD_GRID {
            let q2 = 2.0 * std::f64::consts::PI * k as f64 / PD_GRID as f64;
            let m = mass_matrix(&candidate, &Vector2::new(0.0, q2));
            let eig = m.symmetric_eigenvalues();
            let min_eig = eig.min();
            if !(min_eig > 0.0) {
                return Err(Error::InvalidParameters {
                    message: format!(
                        "inertia matrix loses positive definiteness at q2 = {q2:.3} \
                         (min eigenvalue {min_eig:.3e}); Θ = {:?}",
                        theta
                    ),
                });
            }
        }
        Ok(candidate)
    }

    pub fn theta(&self) -> &SVector<f64, 5> {
        &self.theta
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }
}

/// Joint positions and velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    pub q: Vector2<f64>,
    pub qdot: Vector2<f64>,
}

// ---------------------------------------------------------------------------
// Dynamics matrices
// ---------------------------------------------------------------------------

pub fn mass_matrix(p: &ArmParameters, q: &Vector2<f64>) -> Matrix2<f64> {
    let [a1, a2, a3, _, _] = p.theta.data.0[0];
    let c2 = q[1].cos();
    Matrix2::new(a1 + a2 + 2.0 * a3 * c2, a2 + a3 * c2, a2 + a3 * c2, a2)
}

pub fn coriolis_matrix(p: &ArmParameters, q: &Vector2<f64>, qdot: &Vector2<f64>) -> Matrix2<f64> {
    let a3 = p.theta[2];
    let s2 = q[1].sin();
    Matrix2::new(
        -a3 * s2 * qdot[1],
        -a3 * s2 * (qdot[0] + qdot[1]),
        a3 * s2 * qdot[0],
        0.0,
    )
}

pub fn gravity_vector(p: &ArmParameters, q: &Vector2<f64>) -> Vector2<f64> {
    let [_, _, _, a4, a5] = p.theta.data.0[0];
    let g = p.gravity;
    let c1 = q[0].cos();
    let c12 = (q[0] + q[1]).cos();
    Vector2::new(a4 * g * c1 + a5 * g * c12, a5 * g * c12)
}

/// Time derivative of the inertia matrix along a trajectory:
/// 𝓜̇ = ∂𝓜/∂q₂ · q̇₂ = −a₃ s₂ q̇₂ · [[2, 1], [1, 0]].
pub fn mass_matrix_dot(p: &ArmParameters, q: &Vector2<f64>, qdot: &Vector2<f64>) -> Matrix2<f64> {
    let a3 = p.theta[2];
    let w = -a3 * q[1].sin() * qdot[1];
    Matrix2::new(2.0 * w, w, w, 0.0)
}

// ---------------------------------------------------------------------------
// Regressors
// ---------------------------------------------------------------------------

/// Y(q, q̇, v, a) with Y·Θ = 𝓜(q)a + 𝓒(q, q̇)v + G(q).
///
/// `v` and `a` are free velocity/acceleration arguments (reference signals
/// in the controller), not necessarily q̇ and q̈.  Gravity is a known scale,
/// not a component of Θ, hence the explicit `g` argument.
pub fn regressor_y(
    g: f64,
    q: &Vector2<f64>,
    qdot: &Vector2<f64>,
    v: &Vector2<f64>,
    a: &Vector2<f64>,
) -> Regressor {
    let (s2, c2) = q[1].sin_cos();
    let c1 = q[0].cos();
    let c12 = (q[0] + q[1]).cos();
    Regressor::from_rows(&[
        [
            a[0],
            a[0] + a[1],
            2.0 * c2 * a[0] + c2 * a[1] - s2 * qdot[1] * v[0] - s2 * (qdot[0] + qdot[1]) * v[1],
            g * c1,
            g * c12,
        ]
        .into(),
        [0.0, a[0] + a[1], c2 * a[0] + s2 * qdot[0] * v[0], 0.0, g * c12].into(),
    ])
}

/// L(q, s) with L·Θ = 𝓜(q)s.
pub fn regressor_l(q: &Vector2<f64>, s: &Vector2<f64>) -> Regressor {
    let c2 = q[1].cos();
    Regressor::from_rows(&[
        [s[0], s[0] + s[1], 2.0 * c2 * s[0] + c2 * s[1], 0.0, 0.0].into(),
        [0.0, s[0] + s[1], c2 * s[0], 0.0, 0.0].into(),
    ])
}

/// C_s(q, q̇, s) with C_s·Θ = 𝓒(q, q̇)s.
pub fn regressor_cs(q: &Vector2<f64>, qdot: &Vector2<f64>, s: &Vector2<f64>) -> Regressor {
    let s2 = q[1].sin();
    Regressor::from_rows(&[
        [
            0.0,
            0.0,
            -s2 * qdot[1] * s[0] - s2 * (qdot[0] + qdot[1]) * s[1],
            0.0,
            0.0,
        ]
        .into(),
        [0.0, 0.0, s2 * qdot[0] * s[0], 0.0, 0.0].into(),
    ])
}

/// Ṁ_s(q, q̇, s) with Ṁ_s·Θ = 𝓜̇(q, q̇)s.
pub fn regressor_mdot_s(q: &Vector2<f64>, qdot: &Vector2<f64>, s: &Vector2<f64>) -> Regressor {
    let w = -q[1].sin() * qdot[1];
    Regressor::from_rows(&[
        [0.0, 0.0, w * (2.0 * s[0] + s[1]), 0.0, 0.0].into(),
        [0.0, 0.0, w * s[0], 0.0, 0.0].into(),
    ])
}

// ---------------------------------------------------------------------------
// Forward dynamics
// ---------------------------------------------------------------------------

/// `(q̇, q̈)` under applied torque `tau` and disturbance `d`.
///
/// The inertia matrix accepted by [`ArmParameters::new`] is uniformly
/// positive definite, so the inversion cannot fail for valid parameters;
/// the guard stays because the cost is nil and the failure mode (silent
/// NaNs) is ugly.
pub fn plant_rhs(
    p: &ArmParameters,
    state: &PlantState,
    tau: &Vector2<f64>,
    d: &Vector2<f64>,
) -> Result<(Vector2<f64>, Vector2<f64>)> {
    let m = mass_matrix(p, &state.q);
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let m_inv = m.try_inverse().ok_or(Error::SingularMass { det })?;
    let rhs = tau + d
        - coriolis_matrix(p, &state.q, &state.qdot) * state.qdot
        - gravity_vector(p, &state.q);
    Ok((state.qdot, m_inv * rhs))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
