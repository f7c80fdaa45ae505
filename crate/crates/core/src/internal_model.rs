//! Disturbance models and adaptive-compensator synthesis.
//!
//! Each joint of each arm sees an unknown signal from the class
//!
//! ```text
//!     d(t) = ψ₀ + Σ_k ψ_k · sin(σ_k t + φ_k),        ψ_k > 0, σ_k > 0 distinct.
//! ```
//!
//! Any such signal is the output of an autonomous linear exosystem: with
//! ϑ = col(d, ḋ, …, d^{(r−1)}) one has ϑ̇ = Φϑ, d = Ψϑ, where Φ is the
//! companion matrix of the minimal polynomial s^b·Π_k(s² + σ_k²) (b = 1
//! when a bias is present) and Ψ = e₁ᵀ.  Order r = b + 2·(number of
//! sinusoids).
//!
//! Cancelling d without knowing it works through a stable surrogate model:
//! pick a Hurwitz, controllable pair (M, N) of matching order and solve the
//! Sylvester equation
//!
//! ```text
//!     T·Φ − M·T = N·Ψ
//! ```
//!
//! (unique since σ(Φ) ⊂ iℝ and σ(M) ⊂ ℂ₋ are disjoint).  Then θ = −Tϑ
//! satisfies θ̇ = Mθ − N·d and d = −Ψ T⁻¹ θ, so the single row B = Ψ T⁻¹
//! re-expresses the disturbance through surrogate states.  The
//! zero-frequency instance of the same construction (all σ_k → 0, Φ⁰ the
//! pure shift) yields the *nominal* row A = Ψ (T⁰)⁻¹, which the controller
//! may use because it does not depend on the unknown frequencies.
//!
//! The frequency information the controller is missing is compressed into
//! the difference E = A − B.  For a channel with a single sinusoid, E is
//! exactly linear in x = σ²: the companion characteristic polynomial moves
//! by x·s^b and nothing else, so E(x) = x·E♦ with a constant row E♦.  That
//! lets [`assemble_agent`] extract E♦ by one extra Sylvester solve at unit
//! frequency and attach the scalar ϱ = σ² as the only unknown, giving the
//! adaptive parameterization A − B = Σ_j E_j ϱ_j used by the regressor.
//! Channels with several sinusoids do not decompose monomially; for those
//! the caller must provide the blocks explicitly
//! ([`assemble_agent_explicit`]).
//!
//! The true B and ϱ are carried in [`AgentCompensatorData`] for analysis
//! and verification only; the control path reads M, N, Ψ, A, and the E
//! blocks, never B or ϱ.  A closed-loop test pins that down by zeroing both
//! and comparing trajectories bit for bit.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{self, solve_sylvester};

/// Condition number above which a coupling matrix T counts as singular.
const T_CONDITION_CAP: f64 = 1e12;

/// Relative tolerance for the assembled identity ‖A − B − Σ Eⱼϱⱼ‖.
const ASSEMBLY_RESIDUAL_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Disturbance signals
// ---------------------------------------------------------------------------

/// One sinusoidal component ψ·sin(σt + φ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceTerm {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// Bias-plus-sinusoids signal on a single joint.
///
/// Construction normalizes every term to a positive amplitude (a negative
/// ψ is folded into the phase as ψ·sin(x) = −ψ·sin(x + π)) and rejects
/// zero amplitudes, non-positive frequencies, and repeated frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceChannel {
    bias: f64,
    terms: Vec<DisturbanceTerm>,
}

impl DisturbanceChannel {
    pub fn new(bias: f64, terms: Vec<DisturbanceTerm>) -> Result<Self> {
        if !bias.is_finite() {
            return Err(Error::Validation {
                field: "disturbance.bias".into(),
                message: format!("bias {bias} must be finite"),
            });
        }
        let mut normalized = Vec::with_capacity(terms.len());
        for (k, t) in terms.iter().enumerate() {
            let field = format!("disturbance.terms[{k}]");
            if !t.amplitude.is_finite() || !t.frequency.is_finite() || !t.phase.is_finite() {
                return Err(Error::Validation {
                    field,
                    message: "amplitude, frequency, and phase must be finite".into(),
                });
            }
            if t.amplitude == 0.0 {
                return Err(Error::Validation {
                    field,
                    message: "zero-amplitude term; drop it instead".into(),
                });
            }
            if !(t.frequency > 0.0) {
                return Err(Error::Validation {
                    field,
                    message: format!("frequency {} must be positive", t.frequency),
                });
            }
            let (amplitude, phase) = if t.amplitude < 0.0 {
                (-t.amplitude, t.phase + std::f64::consts::PI)
            } else {
                (t.amplitude, t.phase)
            };
            normalized.push(DisturbanceTerm {
                amplitude,
                frequency: t.frequency,
                phase,
            });
        }
        for i in 0..normalized.len() {
            for j in i + 1..normalized.len() {
                if normalized[i].frequency == normalized[j].frequency {
                    return Err(Error::Validation {
                        field: format!("disturbance.terms[{j}]"),
                        message: format!(
                            "frequency {} repeats an earlier term; merge the amplitudes",
                            normalized[j].frequency
                        ),
                    });
                }
            }
        }
        Ok(DisturbanceChannel {
            bias,
            terms: normalized,
        })
    }

    /// The identically-zero signal (empty model, order 0).
    pub fn zero() -> Self {
        DisturbanceChannel {
            bias: 0.0,
            terms: Vec::new(),
        }
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn terms(&self) -> &[DisturbanceTerm] {
        &self.terms
    }

    /// Exosystem order r = b + 2·(#terms), with b = 1 iff the bias is
    /// nonzero.  A literal zero bias does not enlarge the model.
    pub fn order(&self) -> usize {
        (self.bias != 0.0) as usize + 2 * self.terms.len()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.bias
            + self
                .terms
                .iter()
                .map(|c| c.amplitude * (c.frequency * t + c.phase).sin())
                .sum::<f64>()
    }

    /// Analytic k-th time derivative:
    /// d^{(k)} of ψ sin(σt+φ) is ψ σᵏ sin(σt + φ + kπ/2).
    pub fn derivative(&self, order: usize, t: f64) -> f64 {
        if order == 0 {
            return self.eval(t);
        }
        let quarter = order as f64 * std::f64::consts::FRAC_PI_2;
        self.terms
            .iter()
            .map(|c| {
                c.amplitude * c.frequency.powi(order as i32) * (c.frequency * t + c.phase + quarter).sin()
            })
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Companion form
// ---------------------------------------------------------------------------

/// Exosystem realization of a disturbance channel.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionForm {
    pub order: usize,
    /// Companion matrix of the minimal polynomial (r×r).
    pub phi: DMatrix<f64>,
    /// Output row Ψ = e₁ᵀ (1×r).
    pub psi: DMatrix<f64>,
    /// Minimal polynomial coefficients, ascending, including the leading 1
    /// (length r+1).
    pub coefficients: Vec<f64>,
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn companion(monic_ascending: &[f64]) -> DMatrix<f64> {
    let r = monic_ascending.len() - 1;
    let mut phi = DMatrix::zeros(r, r);
    for i in 0..r.saturating_sub(1) {
        phi[(i, i + 1)] = 1.0;
    }
    for j in 0..r {
        phi[(r - 1, j)] = -monic_ascending[j];
    }
    phi
}

/// Companion realization of a channel's minimal polynomial
/// s^b · Π_k (s² + σ_k²).
pub fn companion_form(ch: &DisturbanceChannel) -> Result<CompanionForm> {
    let mut coeffs = if ch.bias != 0.0 {
        vec![0.0, 1.0] // s
    } else {
        vec![1.0]
    };
    for term in &ch.terms {
        let s2 = term.frequency * term.frequency;
        coeffs = poly_mul(&coeffs, &[s2, 0.0, 1.0]); // (s² + σ²)
    }
    let r = coeffs.len() - 1;
    debug_assert_eq!(r, ch.order());
    let phi = companion(&coeffs);
    let mut psi = DMatrix::zeros(1, r);
    if r > 0 {
        psi[(0, 0)] = 1.0;
    }
    Ok(CompanionForm {
        order: r,
        phi,
        psi,
        coefficients: coeffs,
    })
}

// ---------------------------------------------------------------------------
// Feedback pair defaults
// ---------------------------------------------------------------------------

/// Default Hurwitz, controllable surrogate pair (M, N) of order r: M is the
/// companion matrix of (s² + 2s + 3)(s + 1)^{r−2} (just s + 1 for r = 1),
/// N the last standard basis vector.  For r = 2 this is the pair
/// M = [[0, 1], [−3, −2]], N = (0, 1)ᵀ used throughout the examples.
pub fn default_feedback(r: usize) -> (DMatrix<f64>, DVector<f64>) {
    if r == 0 {
        return (DMatrix::zeros(0, 0), DVector::zeros(0));
    }
    let poly = match r {
        1 => vec![1.0, 1.0],
        _ => {
            let mut p = vec![3.0, 2.0, 1.0];
            for _ in 0..r - 2 {
                p = poly_mul(&p, &[1.0, 1.0]);
            }
            p
        }
    };
    let m = companion(&poly);
    let mut n = DVector::zeros(r);
    n[r - 1] = 1.0;
    (m, n)
}

fn check_feedback_pair(r: usize, m: &DMatrix<f64>, n: &DVector<f64>) -> Result<()> {
    if m.nrows() != r || m.ncols() != r || n.len() != r {
        return Err(Error::DimensionMismatch {
            context: "synthesize_channel",
            detail: format!(
                "feedback pair is {}x{} / {}, channel order is {r}",
                m.nrows(),
                m.ncols(),
                n.len()
            ),
        });
    }
    if r == 0 {
        return Ok(());
    }
    if m.iter().chain(n.iter()).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameters {
            message: "feedback pair contains non-finite entries".into(),
        });
    }
    let max_re = numerics::max_eigenvalue_real_part(m);
    if max_re >= 0.0 {
        return Err(Error::NotHurwitz { max_real_part: max_re });
    }
    // Controllability: rank [N, MN, …, M^{r−1}N] = r.
    let mut ctrb = DMatrix::zeros(r, r);
    let mut col = n.clone();
    for j in 0..r {
        ctrb.set_column(j, &col);
        col = m * col;
    }
    let sv = ctrb.singular_values();
    if sv[0] == 0.0 || sv[r - 1] < 1e-9 * sv[0] {
        return Err(Error::NotControllable);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Channel synthesis
// ---------------------------------------------------------------------------

/// Everything synthesized for one joint's disturbance channel.
#[derive(Debug, Clone)]
pub struct ChannelInternalModel {
    pub channel: DisturbanceChannel,
    pub order: usize,
    pub phi: DMatrix<f64>,
    pub psi: DMatrix<f64>,
    /// Surrogate feedback pair.
    pub m: DMatrix<f64>,
    pub n: DVector<f64>,
    /// Coupling at the true frequencies and at frequency zero.
    pub t_sigma: DMatrix<f64>,
    pub t_zero: DMatrix<f64>,
    pub cond_sigma: f64,
    pub cond_zero: f64,
    /// A♦ = Ψ(T⁰)⁻¹ (1×r): frequency-independent, controller-known.
    pub a_row: DMatrix<f64>,
    /// B♦ = Ψ(T^σ)⁻¹ (1×r): depends on the true frequencies; oracle only.
    pub b_row: DMatrix<f64>,
}

fn invert_t(t: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let r = t.nrows();
    if r == 0 {
        return Ok((DMatrix::zeros(0, 0), 1.0));
    }
    let sv = t.clone().singular_values();
    let (smax, smin) = (sv[0], sv[r - 1]);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !cond.is_finite() || cond > T_CONDITION_CAP {
        return Err(Error::SingularT { condition: cond });
    }
    let inv = t
        .clone()
        .try_inverse()
        .ok_or(Error::SingularT { condition: cond })?;
    Ok((inv, cond))
}

/// Synthesize the coupling data for one channel.  `feedback` overrides the
/// default (M, N); it must be Hurwitz and controllable.
pub fn synthesize_channel(
    ch: &DisturbanceChannel,
    feedback: Option<(DMatrix<f64>, DVector<f64>)>,
) -> Result<ChannelInternalModel> {
    let form = companion_form(ch)?;
    let r = form.order;
    let (m, n) = match feedback {
        Some(pair) => pair,
        None => default_feedback(r),
    };
    check_feedback_pair(r, &m, &n)?;

    let n_psi = &n * &form.psi; // r×r (rank one)
    let t_sigma = solve_sylvester(&form.phi, &m, &n_psi)?;
    let phi_zero = companion(&{
        let mut c = vec![0.0; r + 1];
        c[r] = 1.0;
        c
    });
    let t_zero = solve_sylvester(&phi_zero, &m, &n_psi)?;

    let (t_sigma_inv, cond_sigma) = invert_t(&t_sigma)?;
    let (t_zero_inv, cond_zero) = invert_t(&t_zero)?;
    let a_row = &form.psi * t_zero_inv;
    let b_row = &form.psi * t_sigma_inv;

    Ok(ChannelInternalModel {
        channel: ch.clone(),
        order: r,
        phi: form.phi,
        psi: form.psi,
        m,
        n,
        t_sigma,
        t_zero,
        cond_sigma,
        cond_zero,
        a_row,
        b_row,
    })
}

// ---------------------------------------------------------------------------
// Per-agent assembly
// ---------------------------------------------------------------------------

/// Block-diagonal compensator data for one agent (all joints together).
///
/// With channel orders r₁..r_n and n_i = Σ r_k: M, T^σ, T⁰ are n_i×n_i,
/// N is n_i×n, Ψ, A, B are n×n_i, each E_j is n×n_i, and ϱ ∈ ℝˡ where l is
/// the number of extracted frequency parameters.
///
/// `b` and `rho` describe the *true* disturbance frequencies.  They exist
/// for verification and reporting; the torque computation must never read
/// them (the closed-loop tests enforce this by zeroing both and comparing
/// trajectories byte for byte).
#[derive(Debug, Clone)]
pub struct AgentCompensatorData {
    pub channels: Vec<ChannelInternalModel>,
    /// Total compensator dimension n_i.
    pub dim: usize,
    /// Number of joints / channels n.
    pub outputs: usize,
    /// Number of adaptive frequency parameters l.
    pub sin_count: usize,
    pub m: DMatrix<f64>,
    pub n: DMatrix<f64>,
    pub psi: DMatrix<f64>,
    pub t_sigma: DMatrix<f64>,
    pub t_zero: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub e_blocks: Vec<DMatrix<f64>>,
    pub rho: DVector<f64>,
}

fn block_offsets(channels: &[ChannelInternalModel]) -> (usize, Vec<usize>) {
    let mut offsets = Vec::with_capacity(channels.len());
    let mut acc = 0;
    for ch in channels {
        offsets.push(acc);
        acc += ch.order;
    }
    (acc, offsets)
}

fn assemble_common(channels: Vec<ChannelInternalModel>) -> AgentCompensatorData {
    let n_out = channels.len();
    let (dim, offsets) = block_offsets(&channels);
    let mut m = DMatrix::zeros(dim, dim);
    let mut n_mat = DMatrix::zeros(dim, n_out);
    let mut psi = DMatrix::zeros(n_out, dim);
    let mut t_sigma = DMatrix::zeros(dim, dim);
    let mut t_zero = DMatrix::zeros(dim, dim);
    let mut a = DMatrix::zeros(n_out, dim);
    let mut b = DMatrix::zeros(n_out, dim);
    for (k, ch) in channels.iter().enumerate() {
        let (o, r) = (offsets[k], ch.order);
        m.view_mut((o, o), (r, r)).copy_from(&ch.m);
        n_mat.view_mut((o, k), (r, 1)).copy_from(&ch.n);
        psi.view_mut((k, o), (1, r)).copy_from(&ch.psi);
        t_sigma.view_mut((o, o), (r, r)).copy_from(&ch.t_sigma);
        t_zero.view_mut((o, o), (r, r)).copy_from(&ch.t_zero);
        a.view_mut((k, o), (1, r)).copy_from(&ch.a_row);
        b.view_mut((k, o), (1, r)).copy_from(&ch.b_row);
    }
    AgentCompensatorData {
        channels,
        dim,
        outputs: n_out,
        sin_count: 0,
        m,
        n: n_mat,
        psi,
        t_sigma,
        t_zero,
        a,
        b,
        e_blocks: Vec::new(),
        rho: DVector::zeros(0),
    }
}

fn check_assembly_residual(data: &AgentCompensatorData) -> Result<()> {
    let mut recon = &data.a - &data.b;
    for (e, &r) in data.e_blocks.iter().zip(data.rho.iter()) {
        recon -= e * r;
    }
    let residual = recon.norm() / (1.0 + data.a.norm());
    if residual > ASSEMBLY_RESIDUAL_TOL {
        return Err(Error::SynthesisResidual { residual });
    }
    Ok(())
}

/// Assemble per-agent compensator data, extracting the frequency
/// parameterization A − B = Σ_j E_j ϱ_j automatically.
///
/// Automatic extraction covers channels with at most one sinusoid: value
/// E♦ = A♦ − B♦(unit frequency) via one extra Sylvester solve, ϱ = σ².
/// Exact linearity in σ² is a structural fact for companion exosystems, but
/// it is still validated at a second probe frequency (√2) and through the
/// final residual identity, so a misbehaving feedback override cannot slip
/// through.  Channels with two or more sinusoids need
/// [`assemble_agent_explicit`].
pub fn assemble_agent(channels: Vec<ChannelInternalModel>) -> Result<AgentCompensatorData> {
    let (dim, offsets) = block_offsets(&channels);
    let n_out = channels.len();
    let mut e_blocks = Vec::new();
    let mut rho = Vec::new();

    for (k, ch) in channels.iter().enumerate() {
        match ch.channel.terms().len() {
            0 => {} // bias-only or empty: A♦ = B♦, nothing to extract
            1 => {
                let sigma = ch.channel.terms()[0].frequency;
                let probe = |freq: f64| -> Result<DMatrix<f64>> {
                    let probe_ch = DisturbanceChannel::new(
                        ch.channel.bias(),
                        vec![DisturbanceTerm {
                            amplitude: 1.0,
                            frequency: freq,
                            phase: 0.0,
                        }],
                    )?;
                    let model =
                        synthesize_channel(&probe_ch, Some((ch.m.clone(), ch.n.clone())))?;
                    Ok(&ch.a_row - &model.b_row)
                };
                let e_unit = probe(1.0)?;
                let e_two = probe(std::f64::consts::SQRT_2)?;
                let lin_defect = (&e_two - &e_unit * 2.0).norm() / (1.0 + e_unit.norm());
                if lin_defect > 1e-9 {
                    return Err(Error::SynthesisResidual { residual: lin_defect });
                }
                let mut block = DMatrix::zeros(n_out, dim);
                block
                    .view_mut((k, offsets[k]), (1, ch.order))
                    .copy_from(&e_unit);
                e_blocks.push(block);
                rho.push(sigma * sigma);
            }
            terms => {
                return Err(Error::InvalidParameters {
                    message: format!(
                        "channel {k} has {terms} sinusoids; automatic frequency \
                         parameterization covers at most one — supply e_blocks and rho \
                         explicitly"
                    ),
                });
            }
        }
    }

    let mut data = assemble_common(channels);
    data.sin_count = e_blocks.len();
    data.e_blocks = e_blocks;
    data.rho = DVector::from_vec(rho);
    check_assembly_residual(&data)?;
    Ok(data)
}

/// Assembly with caller-provided frequency parameterization.  The blocks
/// are validated for shape and through the residual identity
/// ‖A − B − Σ Eⱼϱⱼ‖ ≤ 1e-10·(1 + ‖A‖).
pub fn assemble_agent_explicit(
    channels: Vec<ChannelInternalModel>,
    e_blocks: Vec<DMatrix<f64>>,
    rho: DVector<f64>,
) -> Result<AgentCompensatorData> {
    if e_blocks.len() != rho.len() {
        return Err(Error::DimensionMismatch {
            context: "assemble_agent_explicit",
            detail: format!("{} E blocks vs {} frequency parameters", e_blocks.len(), rho.len()),
        });
    }
    let (dim, _) = block_offsets(&channels);
    let n_out = channels.len();
    for (j, e) in e_blocks.iter().enumerate() {
        if e.shape() != (n_out, dim) {
            return Err(Error::DimensionMismatch {
                context: "assemble_agent_explicit",
                detail: format!(
                    "E block {j} is {}x{}, expected {n_out}x{dim}",
                    e.nrows(),
                    e.ncols()
                ),
            });
        }
    }
    let mut data = assemble_common(channels);
    data.sin_count = e_blocks.len();
    data.e_blocks = e_blocks;
    data.rho = rho;
    check_assembly_residual(&data)?;
    Ok(data)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sin_term(amp: f64, freq: f64, phase: f64) -> DisturbanceTerm {
        DisturbanceTerm {
            amplitude: amp,
            frequency: freq,
            phase,
        }
    }

    fn single_sin(amp: f64, freq: f64) -> DisturbanceChannel {
        DisturbanceChannel::new(0.0, vec![sin_term(amp, freq, 0.0)]).unwrap()
    }

    // -- signal class -------------------------------------------------------

    #[test]
    fn negative_amplitudes_fold_into_phase() {
        let ch = single_sin(-3.0, 0.7);
        assert!(ch.terms()[0].amplitude > 0.0);
        for k in 0..200 {
            let t = k as f64 * 0.05;
            let expected = -3.0 * (0.7 * t).sin();
            assert_relative_eq!(ch.eval(t), expected, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn channel_validation() {
        assert!(DisturbanceChannel::new(0.0, vec![sin_term(1.0, -0.5, 0.0)]).is_err());
        assert!(DisturbanceChannel::new(0.0, vec![sin_term(0.0, 0.5, 0.0)]).is_err());
        assert!(DisturbanceChannel::new(
            0.0,
            vec![sin_term(1.0, 0.5, 0.0), sin_term(2.0, 0.5, 1.0)]
        )
        .is_err());
        assert!(DisturbanceChannel::new(f64::NAN, vec![]).is_err());
    }

    #[test]
    fn derivatives_match_closed_form_and_finite_differences() {
        let ch = DisturbanceChannel::new(1.5, vec![sin_term(2.0, 0.8, 0.3), sin_term(-1.0, 2.2, 0.0)])
            .unwrap();
        // Closed form at order 2: −ψσ² sin(σt+φ).
        let t = 1.234f64;
        let expected = -2.0 * 0.8f64.powi(2) * (0.8 * t + 0.3).sin()
            + 1.0 * 2.2f64.powi(2) * (2.2 * t).sin();
        assert_relative_eq!(ch.derivative(2, t), expected, epsilon = 1e-12);
        // FD cross-check at orders 1..3.
        let h = 1e-5;
        for order in 1..=3 {
            let fd = (ch.derivative(order - 1, t + h) - ch.derivative(order - 1, t - h)) / (2.0 * h);
            assert_relative_eq!(ch.derivative(order, t), fd, epsilon = 1e-4, max_relative = 1e-6);
        }
    }

    #[test]
    fn order_counts_bias_structurally() {
        assert_eq!(DisturbanceChannel::zero().order(), 0);
        assert_eq!(DisturbanceChannel::new(2.0, vec![]).unwrap().order(), 1);
        assert_eq!(single_sin(1.0, 0.5).order(), 2);
        assert_eq!(
            DisturbanceChannel::new(0.5, vec![sin_term(1.0, 0.5, 0.0)])
                .unwrap()
                .order(),
            3
        );
    }

    // -- companion form -----------------------------------------------------

    #[test]
    fn companion_of_bias_plus_sin() {
        // bias + sin(2t): minimal polynomial s(s²+4) = s³ + 4s, bottom row
        // (0, −4, 0).
        let ch = DisturbanceChannel::new(1.0, vec![sin_term(1.0, 2.0, 0.0)]).unwrap();
        let form = companion_form(&ch).unwrap();
        assert_eq!(form.order, 3);
        let expected = DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, -4.0, 0.0],
        );
        assert_relative_eq!(form.phi, expected, epsilon = 1e-15);
        assert_eq!(form.coefficients, vec![0.0, 4.0, 0.0, 1.0]);
    }

    #[test]
    fn companion_of_two_sines() {
        // (s²+1)(s²+4) = s⁴ + 5s² + 4 → bottom row (−4, 0, −5, 0).
        let ch = DisturbanceChannel::new(
            0.0,
            vec![sin_term(1.0, 1.0, 0.0), sin_term(1.0, 2.0, 0.0)],
        )
        .unwrap();
        let form = companion_form(&ch).unwrap();
        assert_eq!(form.order, 4);
        assert_eq!(
            form.phi.row(3).iter().copied().collect::<Vec<_>>(),
            vec![-4.0, 0.0, -5.0, 0.0]
        );
    }

    #[test]
    fn companion_of_bias_only_is_scalar_zero() {
        let ch = DisturbanceChannel::new(2.5, vec![]).unwrap();
        let form = companion_form(&ch).unwrap();
        assert_eq!(form.order, 1);
        assert_eq!(form.phi[(0, 0)], 0.0);
    }

    /// ϑ = col(d, ḋ, …) satisfies ϑ̇ = Φϑ: check the companion against the
    /// analytic derivatives.
    #[test]
    fn companion_generates_derivative_stack() {
        let ch = DisturbanceChannel::new(0.7, vec![sin_term(1.3, 0.9, 0.4)]).unwrap();
        let form = companion_form(&ch).unwrap();
        for k in 0..50 {
            let t = 0.3 * k as f64;
            let stack = DVector::from_fn(form.order, |i, _| ch.derivative(i, t));
            let stack_dot = DVector::from_fn(form.order, |i, _| ch.derivative(i + 1, t));
            assert_relative_eq!(&form.phi * stack, stack_dot, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    // -- feedback defaults --------------------------------------------------

    #[test]
    fn default_pair_order_two_is_canonical() {
        let (m, n) = default_feedback(2);
        assert_relative_eq!(
            m,
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -3.0, -2.0]),
            epsilon = 1e-15
        );
        assert_eq!(n.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn default_pairs_are_hurwitz_and_controllable() {
        for r in 1..=6 {
            let (m, n) = default_feedback(r);
            check_feedback_pair(r, &m, &n).unwrap();
        }
        // r = 4: (s²+2s+3)(s+1)² = s⁴+4s³+8s²+8s+3.
        let (m4, _) = default_feedback(4);
        assert_eq!(
            m4.row(3).iter().copied().collect::<Vec<_>>(),
            vec![-3.0, -8.0, -8.0, -4.0]
        );
    }

    // -- channel synthesis --------------------------------------------------

    fn closed_form_t(sigma: f64) -> DMatrix<f64> {
        let x = sigma * sigma;
        let delta = (3.0 - x).powi(2) + 4.0 * x;
        DMatrix::from_row_slice(2, 2, &[3.0 - x, -2.0, 2.0 * x, 3.0 - x]) / delta
    }

    #[test]
    fn synthesis_matches_closed_form_for_single_sines() {
        for &sigma in &[0.1, 0.2, 0.5, 1.7] {
            let model = synthesize_channel(&single_sin(1.0, sigma), None).unwrap();
            assert_relative_eq!(model.t_sigma, closed_form_t(sigma), epsilon = 1e-12);
            assert_relative_eq!(
                model.t_zero,
                DMatrix::from_row_slice(2, 2, &[3.0, -2.0, 0.0, 3.0]) / 9.0,
                epsilon = 1e-13
            );
            assert_relative_eq!(
                model.a_row,
                DMatrix::from_row_slice(1, 2, &[3.0, 2.0]),
                epsilon = 1e-12
            );
            assert_relative_eq!(
                model.b_row,
                DMatrix::from_row_slice(1, 2, &[3.0 - sigma * sigma, 2.0]),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn synthesis_rejects_bad_feedback() {
        let unstable = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -3.0, 2.0]);
        let n = DVector::from_vec(vec![0.0, 1.0]);
        assert!(matches!(
            synthesize_channel(&single_sin(1.0, 0.5), Some((unstable, n.clone()))),
            Err(Error::NotHurwitz { .. })
        ));
        let diag = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let bad_n = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(
            synthesize_channel(&single_sin(1.0, 0.5), Some((diag, bad_n))),
            Err(Error::NotControllable)
        ));
        let (m, _) = default_feedback(2);
        assert!(matches!(
            synthesize_channel(&single_sin(1.0, 0.5), Some((m, DVector::zeros(3)))),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn empty_channel_synthesizes_to_empty_model() {
        let model = synthesize_channel(&DisturbanceChannel::zero(), None).unwrap();
        assert_eq!(model.order, 0);
        assert_eq!(model.t_sigma.shape(), (0, 0));
        assert_eq!(model.a_row.shape(), (1, 0));
    }

    #[test]
    fn bias_only_channel_has_equal_couplings() {
        let ch = DisturbanceChannel::new(2.0, vec![]).unwrap();
        let model = synthesize_channel(&ch, None).unwrap();
        assert_eq!(model.order, 1);
        assert_relative_eq!(model.t_sigma, model.t_zero, epsilon = 1e-15);
        assert_relative_eq!(model.a_row[(0, 0)], 1.0, epsilon = 1e-12);
    }

    // -- agent assembly -----------------------------------------------------

    #[test]
    fn two_single_sine_channels_assemble_to_selector_blocks() {
        let channels = vec![
            synthesize_channel(&single_sin(6.0, 0.1), None).unwrap(),
            synthesize_channel(&single_sin(8.0, 0.2), None).unwrap(),
        ];
        let data = assemble_agent(channels).unwrap();
        assert_eq!((data.dim, data.outputs, data.sin_count), (4, 2, 2));
        assert_relative_eq!(
            data.a,
            DMatrix::from_row_slice(2, 4, &[3.0, 2.0, 0.0, 0.0, 0.0, 0.0, 3.0, 2.0]),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            data.b,
            DMatrix::from_row_slice(2, 4, &[2.99, 2.0, 0.0, 0.0, 0.0, 0.0, 2.96, 2.0]),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            data.e_blocks[0],
            DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            epsilon = 1e-10
        );
        assert_relative_eq!(
            data.e_blocks[1],
            DMatrix::from_row_slice(2, 4, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
            epsilon = 1e-10
        );
        assert_relative_eq!(
            data.rho,
            DVector::from_vec(vec![0.01, 0.04]),
            epsilon = 1e-15
        );
        // N is the block-diagonal stack of the channel input columns.
        assert_relative_eq!(
            data.n,
            DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            epsilon = 1e-15
        );
    }

    #[test]
    fn mixed_bias_and_sine_assembly() {
        // Channel 1: bias + sin (order 3); channel 2: sin only (order 2).
        let channels = vec![
            synthesize_channel(
                &DisturbanceChannel::new(0.5, vec![sin_term(1.0, 0.4, 0.0)]).unwrap(),
                None,
            )
            .unwrap(),
            synthesize_channel(&single_sin(2.0, 1.1), None).unwrap(),
        ];
        let data = assemble_agent(channels).unwrap();
        assert_eq!((data.dim, data.sin_count), (5, 2));
        // Order-3 default M has characteristic polynomial s³+3s²+5s+3, so
        // the channel-1 difference row is (0, σ², 0) ⇒ E♦ = (0, 1, 0).
        assert_relative_eq!(
            data.e_blocks[0].view((0, 0), (1, 3)).clone_owned(),
            DMatrix::from_row_slice(1, 3, &[0.0, 1.0, 0.0]),
            epsilon = 1e-9
        );
        assert_relative_eq!(data.rho[0], 0.16, epsilon = 1e-12);
        assert_relative_eq!(data.rho[1], 1.21, epsilon = 1e-12);
        // Residual identity holds by construction; recompute it here anyway.
        let mut recon = &data.a - &data.b;
        for (e, &r) in data.e_blocks.iter().zip(data.rho.iter()) {
            recon -= e * r;
        }
        assert!(recon.norm() < 1e-10 * (1.0 + data.a.norm()));
    }

    #[test]
    fn multi_sine_channels_need_explicit_blocks() {
        let two_tone = DisturbanceChannel::new(
            0.0,
            vec![sin_term(1.0, 1.0, 0.0), sin_term(1.0, 2.0, 0.0)],
        )
        .unwrap();
        let model = synthesize_channel(&two_tone, None).unwrap();
        assert!(matches!(
            assemble_agent(vec![model.clone()]),
            Err(Error::InvalidParameters { .. })
        ));

        // (s²+σ₁²)(s²+σ₂²) − s⁴ = (σ₁²+σ₂²)s² + σ₁²σ₂², so with companion
        // (M, N = e₄) the difference A − B = coeffs·W decomposes with
        // ϱ = (σ₁²+σ₂², σ₁²σ₂²) and selector rows at positions 2 and 0.
        // Rather than hand-deriving W, recover the blocks numerically from
        // two probe syntheses and hand them to the explicit path.
        let probe = |s1: f64, s2: f64| {
            let ch = DisturbanceChannel::new(
                0.0,
                vec![sin_term(1.0, s1, 0.0), sin_term(1.0, s2, 0.0)],
            )
            .unwrap();
            let m = synthesize_channel(&ch, Some((model.m.clone(), model.n.clone()))).unwrap();
            &model.a_row - &m.b_row
        };
        // Two unknown rows x, y with f(σ₁,σ₂) = (σ₁²+σ₂²)x + σ₁²σ₂²y:
        // probe at (1, 2): 5x + 4y; at (1, 3): 10x + 9y.  Solve.
        let f12 = probe(1.0, 2.0);
        let f13 = probe(1.0, 3.0);
        let x = (&f12 * 9.0 - &f13 * 4.0) / 5.0;
        let y = (&f13 * 5.0 - &f12 * 10.0) / 5.0;
        let data = assemble_agent_explicit(
            vec![model],
            vec![x, y],
            DVector::from_vec(vec![5.0, 4.0]),
        )
        .unwrap();
        assert_eq!(data.sin_count, 2);
    }

    #[test]
    fn explicit_blocks_are_shape_and_residual_checked() {
        let model = synthesize_channel(&single_sin(1.0, 0.5), None).unwrap();
        assert!(matches!(
            assemble_agent_explicit(
                vec![model.clone()],
                vec![DMatrix::zeros(1, 3)],
                DVector::from_vec(vec![0.25])
            ),
            Err(Error::DimensionMismatch { .. })
        ));
        // Wrong ϱ: residual identity must fire.
        assert!(matches!(
            assemble_agent_explicit(
                vec![model.clone()],
                vec![DMatrix::zeros(1, 2)],
                DVector::from_vec(vec![0.25])
            ),
            Err(Error::SynthesisResidual { .. })
        ));
    }

    #[test]
    fn zero_channels_assemble_to_empty_data() {
        let channels = vec![
            synthesize_channel(&DisturbanceChannel::zero(), None).unwrap(),
            synthesize_channel(&DisturbanceChannel::zero(), None).unwrap(),
        ];
        let data = assemble_agent(channels).unwrap();
        assert_eq!((data.dim, data.outputs, data.sin_count), (0, 2, 0));
        assert_eq!(data.a.shape(), (2, 0));
    }
}
