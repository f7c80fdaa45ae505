//! Closed-loop invariants: the residual compensator error ξ̂ and the
//! Lyapunov certificate V.
//!
//! The closed loop hides an autonomous linear residual
//!
//!   ξ̂ᵢ = ξᵢ − θᵢ(t) − N·𝓜(qᵢ)sᵢ − ζᵢΘᵢ,   ξ̂̇ᵢ = Mᵢ ξ̂ᵢ,
//!
//! and the certificate
//!
//!   Vᵢ = εᵢ·ξ̂ᵢᵀ𝒬ᵢξ̂ᵢ + ½·sᵢᵀ𝓜(qᵢ)sᵢ + ½·λ‖ω̂ᵢ − ωᵢ‖²
//!
//! with 𝒬ᵢMᵢ + Mᵢᵀ𝒬ᵢ = −I and εᵢ = ‖Bᵢ‖²/λ_min(K) dissipates along
//! trajectories:
//!
//!   V̇ᵢ = −εᵢ‖ξ̂ᵢ‖² − sᵢᵀK sᵢ + sᵢᵀBᵢξ̂ᵢ
//!       ≤ −(εᵢ/2)‖ξ̂ᵢ‖² − (λ_min(K)/2)‖sᵢ‖² ≤ 0.
//!
//! The adaptation term drops out of V̇ entirely because λ·ω̂̇ = ρᵀs — the
//! passivity cancellation checked by [`LyapunovEvaluator::passivity_defect`].
//! Everything here is evaluated from raw flat simulator states.

use std::ops::Range;

use lagrange_swarm::controller;
use lagrange_swarm::numerics;
use lagrange_swarm::plant;
use lagrange_swarm::sim::SimModel;
use lagrange_swarm::Result;
use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::exact;

fn read2(xs: &[f64], r: Range<usize>) -> Vector2<f64> {
    Vector2::new(xs[r.start], xs[r.start + 1])
}

/// Sliding variable sᵢ = q̇ᵢ − q̇ᵣᵢ recomputed from the flat state (only
/// the observer values enter q̇ᵣ, not their derivatives).
pub fn sliding(model: &SimModel, i: usize, x: &DVector<f64>) -> Vector2<f64> {
    let slots = &model.layout.slots[i];
    let xs = x.as_slice();
    let refs = controller::reference_signals(
        &read2(xs, slots.q()),
        &read2(xs, slots.qdot()),
        &Matrix2::from_column_slice(&xs[slots.s_mat()]),
        &read2(xs, slots.eta()),
        &Matrix2::zeros(),
        &Vector2::zeros(),
        model.gains.alpha,
    );
    refs.s
}

/// The residual compensator error ξ̂ᵢ(t, x).
pub fn xi_hat(model: &SimModel, i: usize, t: f64, x: &DVector<f64>) -> DVector<f64> {
    let slots = &model.layout.slots[i];
    let setup = &model.agents[i];
    let xs = x.as_slice();
    let q = read2(xs, slots.q());
    let s = sliding(model, i, x);
    let xi = DVector::from_column_slice(&xs[slots.xi()]);
    let zeta = DMatrix::from_column_slice(setup.comp.dim, 5, &xs[slots.zeta()]);
    let ms = plant::mass_matrix(&setup.params, &q) * s;
    xi - exact::agent_theta(&setup.comp, t)
        - &setup.comp.n * DVector::from_column_slice(ms.as_slice())
        - zeta * setup.params.theta()
}

/// Maximum over agents of ‖FD(ξ̂ᵢ) − Mᵢξ̂ᵢ‖ at one interior sample of an
/// evenly spaced state series, with a centered difference of half-width
/// `h`.
pub fn xi_hat_filter_defect(
    model: &SimModel,
    h: f64,
    prev: &(f64, DVector<f64>),
    here: &(f64, DVector<f64>),
    next: &(f64, DVector<f64>),
) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..model.agents.len() {
        let fd = (xi_hat(model, i, next.0, &next.1) - xi_hat(model, i, prev.0, &prev.1))
            / (2.0 * h);
        let analytic = &model.agents[i].comp.m * xi_hat(model, i, here.0, &here.1);
        worst = worst.max((fd - analytic).norm());
    }
    worst
}

// ---------------------------------------------------------------------------
// Lyapunov certificate
// ---------------------------------------------------------------------------

/// Per-agent centered-difference V̇ statistics over a state series.
#[derive(Debug, Clone)]
pub struct DissipationReport {
    /// Number of interior sample instants.
    pub interior: usize,
    /// Per agent: share of interior instants with estimated V̇ᵢ ≤ tol.
    pub pass_share: Vec<f64>,
    /// Per agent: largest estimated V̇ᵢ.
    pub max_vdot: Vec<f64>,
}

impl DissipationReport {
    /// The smallest per-agent pass share.
    pub fn worst_share(&self) -> f64 {
        self.pass_share.iter().copied().fold(1.0, f64::min)
    }
}

/// Evaluates V, V̇, and the passivity cancellation for every agent of one
/// model.  Construction solves the per-agent Lyapunov equations.
#[derive(Debug, Clone)]
pub struct LyapunovEvaluator {
    q_mats: Vec<DMatrix<f64>>,
    eps: Vec<f64>,
    omegas: Vec<DVector<f64>>,
}

impl LyapunovEvaluator {
    pub fn new(model: &SimModel) -> Result<Self> {
        let mut q_mats = Vec::with_capacity(model.agents.len());
        let mut eps = Vec::with_capacity(model.agents.len());
        let mut omegas = Vec::with_capacity(model.agents.len());
        let k_min = model.gains.min_k_eigenvalue();
        for setup in &model.agents {
            q_mats.push(numerics::solve_lyapunov(&setup.comp.m)?);
            let b_norm = numerics::spectral_norm(&setup.comp.b);
            eps.push(b_norm * b_norm / k_min);
            omegas.push(exact::omega_true(setup.params.theta(), &setup.comp));
        }
        Ok(LyapunovEvaluator { q_mats, eps, omegas })
    }

    /// The true parameter vector of agent `i`.
    pub fn omega_true(&self, i: usize) -> &DVector<f64> {
        &self.omegas[i]
    }

    fn omega_tilde(&self, model: &SimModel, i: usize, x: &DVector<f64>) -> DVector<f64> {
        let slots = &model.layout.slots[i];
        DVector::from_column_slice(&x.as_slice()[slots.omega()]) - &self.omegas[i]
    }

    /// Vᵢ(t, x).
    pub fn agent_v(&self, model: &SimModel, i: usize, t: f64, x: &DVector<f64>) -> f64 {
        let setup = &model.agents[i];
        let slots = &model.layout.slots[i];
        let xs = x.as_slice();
        let q = read2(xs, slots.q());
        let s = sliding(model, i, x);
        let xh = xi_hat(model, i, t, x);
        let w_tilde = self.omega_tilde(model, i, x);
        let quad = if xh.is_empty() {
            0.0
        } else {
            xh.dot(&(&self.q_mats[i] * &xh))
        };
        self.eps[i] * quad
            + 0.5 * s.dot(&(plant::mass_matrix(&setup.params, &q) * s))
            + 0.5 * model.gains.lambda * w_tilde.norm_squared()
    }

    /// Analytic V̇ᵢ = −εᵢ‖ξ̂ᵢ‖² − sᵢᵀKsᵢ + sᵢᵀBᵢξ̂ᵢ (continuous-time).
    pub fn agent_vdot(&self, model: &SimModel, i: usize, t: f64, x: &DVector<f64>) -> f64 {
        let setup = &model.agents[i];
        let s = sliding(model, i, x);
        let xh = xi_hat(model, i, t, x);
        let b_xh = &setup.comp.b * &xh;
        -self.eps[i] * xh.norm_squared() - s.dot(&(model.gains.k * s))
            + s[0] * b_xh[0]
            + s[1] * b_xh[1]
    }

    /// Fleet total V(t, x).
    pub fn total_v(&self, model: &SimModel, t: f64, x: &DVector<f64>) -> f64 {
        (0..model.agents.len())
            .map(|i| self.agent_v(model, i, t, x))
            .sum()
    }

    /// Largest scaled adaptation-passivity defect over agents:
    /// | sᵀ(ρω̃) − λ·ω̃ᵀω̂̇ | / (1 + |sᵀρω̃| + |λ·ω̃ᵀω̂̇|).
    ///
    /// The two sides are the same bilinear form associated differently, so
    /// the defect is pure floating-point noise; scaling by the operand
    /// magnitude keeps the bound meaningful during the large early
    /// transient.
    pub fn passivity_defect(&self, model: &SimModel, t: f64, x: &DVector<f64>) -> Result<f64> {
        let evals = model.eval_fleet(t, x)?;
        let mut worst: f64 = 0.0;
        for (i, ev) in evals.iter().enumerate() {
            let w_tilde = self.omega_tilde(model, i, x);
            let rho_w = &ev.control.regressor * &w_tilde;
            let lhs = ev.refs.s[0] * rho_w[0] + ev.refs.s[1] * rho_w[1];
            let rhs = model.gains.lambda * w_tilde.dot(&ev.control.omega_hat_dot);
            worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs() + rhs.abs()));
        }
        Ok(worst)
    }

    /// Centered-difference estimate of every V̇ᵢ over an evenly spaced
    /// state series; counts the share of interior instants at which the
    /// estimate stays at or below `tol`.
    pub fn dissipation(
        &self,
        model: &SimModel,
        states: &[(f64, DVector<f64>)],
        tol: f64,
    ) -> DissipationReport {
        let n = model.agents.len();
        let k = states.len();
        if k < 3 {
            return DissipationReport {
                interior: 0,
                pass_share: vec![1.0; n],
                max_vdot: vec![f64::NEG_INFINITY; n],
            };
        }
        let h = states[1].0 - states[0].0;
        let mut pass = vec![0usize; n];
        let mut max_vdot = vec![f64::NEG_INFINITY; n];
        let mut v = vec![vec![0.0f64; k]; n];
        for (j, (t, x)) in states.iter().enumerate() {
            for i in 0..n {
                v[i][j] = self.agent_v(model, i, *t, x);
            }
        }
        for i in 0..n {
            for j in 1..k - 1 {
                let est = (v[i][j + 1] - v[i][j - 1]) / (2.0 * h);
                if est <= tol {
                    pass[i] += 1;
                }
                max_vdot[i] = max_vdot[i].max(est);
            }
        }
        let interior = k - 2;
        DissipationReport {
            interior,
            pass_share: pass.iter().map(|&p| p as f64 / interior as f64).collect(),
            max_vdot,
        }
    }
}

// ---------------------------------------------------------------------------
