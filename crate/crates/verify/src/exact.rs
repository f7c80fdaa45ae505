//! Closed-form oracles for the linear subsystems and the ideal controller.
//!
//! The generator consensus is a linear system with matrix −μ₁𝓛 acting
//! entrywise, so its flow is a matrix exponential; the steady compensator
//! pre-image θ of an analytic disturbance follows from the coupling matrix
//! T^σ; and the combined regressor ρ admits a closed-form product with the
//! true parameter vector.  None of this is reachable from the control path
//! — it exists to catch the simulator lying.

use lagrange_swarm::internal_model::{AgentCompensatorData, ChannelInternalModel};
use lagrange_swarm::numerics::{self, OdeSystem};
use lagrange_swarm::plant::{self, ArmParameters};
use lagrange_swarm::controller::ReferenceSignals;
use lagrange_swarm::{Error, Result};
use nalgebra::{DMatrix, DVector, Matrix2, SVector, Vector2};

// ---------------------------------------------------------------------------
// Generator consensus
// ---------------------------------------------------------------------------

/// Mixing matrix E(t) = e^{−μ₁𝓛t} of the generator consensus.
///
/// The generators evolve entrywise by Ṡᵢ = μ₁·Σⱼ aᵢⱼ(Sⱼ − Sᵢ), which is
/// linear with system matrix −μ₁𝓛, so Sᵢ(t) = Σⱼ E(t)ᵢⱼ·Sⱼ(0) exactly.
pub fn s_mixing_matrix(laplacian: &DMatrix<f64>, mu1: f64, t: f64) -> Result<DMatrix<f64>> {
    numerics::expm(&(laplacian * (-mu1)), t)
}

/// Exact generators Sᵢ(t) from the seeds Sᵢ(0).
pub fn exact_generators(
    laplacian: &DMatrix<f64>,
    mu1: f64,
    seeds: &[Matrix2<f64>],
    t: f64,
) -> Result<Vec<Matrix2<f64>>> {
    let n = laplacian.nrows();
    if seeds.len() != n {
        return Err(Error::DimensionMismatch {
            context: "exact_generators",
            detail: format!("{} seeds for an {n}-vertex Laplacian", seeds.len()),
        });
    }
    let e = s_mixing_matrix(laplacian, mu1, t)?;
    Ok((0..n)
        .map(|i| {
            (0..n).fold(Matrix2::zeros(), |acc, j| acc + e[(i, j)] * seeds[j])
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Disturbance pre-image θ
// ---------------------------------------------------------------------------

/// ϑ♦(t): the channel signal and its first r−1 time derivatives.
pub fn channel_history(ch: &ChannelInternalModel, t: f64) -> DVector<f64> {
    DVector::from_fn(ch.order, |k, _| ch.channel.derivative(k, t))
}

/// θ♦(t) = −T^σ·ϑ♦(t): the steady compensator pre-image of the channel
/// disturbance.  It satisfies θ̇ = Mθ − N·d and B♦θ♦ = −d identically,
/// which is exactly why the residual internal-model state ξ − θ − … decays
/// autonomously.
pub fn channel_theta(ch: &ChannelInternalModel, t: f64) -> DVector<f64> {
    -(&ch.t_sigma * channel_history(ch, t))
}

/// Stacked θᵢ(t) across an agent's channels.
pub fn agent_theta(comp: &AgentCompensatorData, t: f64) -> DVector<f64> {
    let mut out = DVector::zeros(comp.dim);
    let mut off = 0;
    for ch in &comp.channels {
        out.rows_mut(off, ch.order).copy_from(&channel_theta(ch, t));
        off += ch.order;
    }
    out
}

/// |d(t) + B♦θ♦(t)|: how well the synthesized row B reproduces the
/// disturbance from its pre-image.  Zero in exact arithmetic.
pub fn reproduction_defect(ch: &ChannelInternalModel, t: f64) -> f64 {
    let theta = channel_theta(ch, t);
    let b_theta = if ch.order == 0 {
        0.0
    } else {
        (&ch.b_row * theta)[0]
    };
    (ch.channel.eval(t) + b_theta).abs()
}

// ---------------------------------------------------------------------------
// True closed-loop parameters
// ---------------------------------------------------------------------------

/// The true value ω = col(Θ, −ϱ⊗Θ, ϱ) of the adaptive parameter vector.
///
/// The middle block is negated: the regressor's middle column blocks are
/// Eⱼ(ζ + N·L), and B = A − Σⱼ Eⱼϱⱼ enters the ideal feedforward through
/// −B(ζ + N·L)Θ, so the coefficient multiplying EⱼζΘ-type columns is
/// −ϱⱼΘ.  See [`rho_omega_oracle`] for the identity this vector satisfies.
pub fn omega_true(theta: &SVector<f64, 5>, comp: &AgentCompensatorData) -> DVector<f64> {
    let l = comp.sin_count;
    let mut w = DVector::zeros(5 + 6 * l);
    w.rows_mut(0, 5).copy_from(theta);
    for j in 0..l {
        let rho_j = comp.rho[j];
        for k in 0..5 {
            w[5 + 5 * j + k] = -rho_j * theta[k];
        }
        w[5 + 5 * l + j] = rho_j;
    }
    w
}

/// Closed form of ρ·ω at the true parameters:
///
///   ρ ω = B(ζΘ + N·𝓜s) + (A − B)ξ − (𝓜q̈ᵣ + 𝓒q̇ᵣ + G).
///
/// Substituting into τ = −Ks − ρω̂ + Aξ at ω̂ = ω shows the ideal loop
/// cancels the arm dynamics and the disturbance up to B·ξ̂, which is the
/// error system the Lyapunov argument runs on.
pub fn rho_omega_oracle(
    params: &ArmParameters,
    comp: &AgentCompensatorData,
    q: &Vector2<f64>,
    qdot: &Vector2<f64>,
    refs: &ReferenceSignals,
    zeta: &DMatrix<f64>,
    xi: &DVector<f64>,
) -> Vector2<f64> {
    let m_mat = plant::mass_matrix(params, q);
    let c_mat = plant::coriolis_matrix(params, q, qdot);
    let g_vec = plant::gravity_vector(params, q);
    let ms = m_mat * refs.s;
    let inner = zeta * params.theta() + &comp.n * DVector::from_column_slice(ms.as_slice());
    let ideal = &comp.b * inner + (&comp.a - &comp.b) * xi;
    let nominal = m_mat * refs.a + c_mat * refs.v + g_vec;
    Vector2::new(ideal[0] - nominal[0], ideal[1] - nominal[1])
}

// ---------------------------------------------------------------------------
// Linear flows
// ---------------------------------------------------------------------------

/// A fixed linear system ẋ = A·x with closed-form flow, for integrator
/// order studies.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub a: DMatrix<f64>,
}

impl LinearSystem {
    /// Exact flow x(t) = e^{At}·x₀.
    pub fn flow(&self, x0: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        Ok(numerics::expm(&self.a, t)? * x0)
    }

    /// March RK4 at fixed `dt` to `t_end`; return the terminal global
    /// error against the exact flow.
    pub fn rk4_terminal_error(&self, x0: &DVector<f64>, t_end: f64, dt: f64) -> Result<f64> {
        let steps = (t_end / dt).round() as usize;
        let mut x = x0.clone();
        for k in 0..steps {
            x = numerics::rk4_step(self, k as f64 * dt, &x, dt)?;
        }
        Ok((x - self.flow(x0, t_end)?).norm())
    }
}

impl OdeSystem for LinearSystem {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn rhs(&self, _t: f64, x: &DVector<f64>, dxdt: &mut DVector<f64>) -> Result<()> {
        dxdt.copy_from(&(&self.a * x));
        Ok(())
    }
}

// ---------------------------------------------------------------------------
