//! Distributed observer that builds a common reference on every agent.
//!
//! No agent is a leader.  Instead each agent carries a local copy Sᵢ of a
//! 2×2 generator matrix and a local reference trajectory ηᵢ, and runs
//!
//! ```text
//!     Ṡᵢ = μ₁ Σⱼ a_ij (Sⱼ − Sᵢ)
//!     η̇ᵢ = Sᵢ ηᵢ + μ₂ Σⱼ a_ij (ηⱼ − ηᵢ)
//! ```
//!
//! Over a digraph with a spanning tree the generators average to
//! S* = Σᵢ uᵢ Sᵢ(0) (u the normalized left null vector of the Laplacian),
//! exponentially and independently of the nonlinear loops downstream: the
//! stacked generator dynamics are linear, S̄(t) = e^{−μ₁(𝓛⊗I₂)t} S̄(0).
//! The ηᵢ then agree on a trajectory of η̇ = S*η when the gains satisfy
//!
//! ```text
//!     μ₂ > ‖S*‖ / λ₁,        μ₁ ≥ 2(μ₂‖𝓛‖ + ‖S*‖) / λ₁,
//! ```
//!
//! with λ₁ the smallest nonzero real part of the Laplacian spectrum and
//! ‖·‖ the spectral norm.  [`check_gains`] evaluates both bounds;
//! [`observer_rhs`] is the pure right-hand side used by the integrator.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::numerics::spectral_norm;

/// Per-agent observer variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverState {
    /// Local generator copy Sᵢ.
    pub s: Matrix2<f64>,
    /// Local reference ηᵢ.
    pub eta: Vector2<f64>,
}

/// Time derivatives of all observer states under the consensus coupling.
///
/// `states[i]` belongs to vertex i of `graph`; the neighbor sums follow the
/// graph's weight convention (a_ij > 0 pulls agent i toward agent j).
/// Neighbors are accumulated in ascending j so the result is reproducible
/// to the last bit.
pub fn observer_rhs(
    graph: &DirectedGraph,
    states: &[ObserverState],
    mu1: f64,
    mu2: f64,
) -> Result<Vec<ObserverState>> {
    let n = graph.agent_count();
    if states.len() != n {
        return Err(Error::DimensionMismatch {
            context: "observer_rhs",
            detail: format!("{} states for a {n}-agent graph", states.len()),
        });
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut s_dot = Matrix2::zeros();
        let mut eta_coupling = Vector2::zeros();
        for j in 0..n {
            let w = graph.weight(i, j);
            if w > 0.0 {
                s_dot += w * (states[j].s - states[i].s);
                eta_coupling += w * (states[j].eta - states[i].eta);
            }
        }
        out.push(ObserverState {
            s: mu1 * s_dot,
            eta: states[i].s * states[i].eta + mu2 * eta_coupling,
        });
    }
    Ok(out)
}

/// Consensus generator S* = Σᵢ uᵢ Sᵢ(0) for a given left null vector u.
pub fn consensus_generator(initial: &[Matrix2<f64>], left_null: &DVector<f64>) -> Result<Matrix2<f64>> {
    if initial.len() != left_null.len() {
        return Err(Error::DimensionMismatch {
            context: "consensus_generator",
            detail: format!(
                "{} generators vs null vector of length {}",
                initial.len(),
                left_null.len()
            ),
        });
    }
    let mut s_star = Matrix2::zeros();
    for (s, &u) in initial.iter().zip(left_null.iter()) {
        s_star += u * s;
    }
    Ok(s_star)
}

/// Outcome of the observer gain conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport {
    /// Lower bound 2(μ₂‖𝓛‖ + ‖S*‖)/λ₁ that μ₁ must reach.
    pub mu1_min: f64,
    /// Lower bound ‖S*‖/λ₁ that μ₂ must exceed strictly.
    pub mu2_min: f64,
    pub mu1_ok: bool,
    pub mu2_ok: bool,
    pub s_star_norm: f64,
}

impl GainReport {
    pub fn all_ok(&self) -> bool {
        self.mu1_ok && self.mu2_ok
    }
}

/// Evaluate the gain bounds: μ₂ strictly above ‖S*‖/λ₁, μ₁ at least
/// 2(μ₂‖𝓛‖ + ‖S*‖)/λ₁.
pub fn check_gains(
    mu1: f64,
    mu2: f64,
    laplacian_norm: f64,
    lambda1: f64,
    s_star: &Matrix2<f64>,
) -> Result<GainReport> {
    if !(mu1.is_finite() && mu2.is_finite() && mu1 > 0.0 && mu2 > 0.0) {
        return Err(Error::InvalidParameters {
            message: format!("observer gains must be positive and finite, got mu1={mu1}, mu2={mu2}"),
        });
    }
    if !(lambda1 > 0.0) {
        return Err(Error::InvalidParameters {
            message: format!("spectral gap lambda1={lambda1} must be positive"),
        });
    }
    let s_star_norm = spectral_norm(&DMatrix::from_iterator(2, 2, s_star.iter().copied()));
    let mu2_min = s_star_norm / lambda1;
    let mu1_min = 2.0 * (mu2 * laplacian_norm + s_star_norm) / lambda1;
    Ok(GainReport {
        mu1_min,
        mu2_min,
        mu1_ok: mu1 >= mu1_min,
        mu2_ok: mu2 > mu2_min,
        s_star_norm,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
