//! Dense numerical kernels shared by every other module.
//!
//! Nothing here knows about arms, graphs, or observers; the module provides
//! exactly the four pieces of machinery the rest of the crate needs:
//!
//! * Sylvester solves  T·Φ − M·T = R  (via Kronecker linearization),
//! * Lyapunov solves  𝒬·M + Mᵀ·𝒬 = −I  for Hurwitz M,
//! * the matrix exponential  e^{A·t}  (scaling-and-squaring Padé, delegated
//!   to nalgebra's `exp`),
//! * a fixed-step classical Runge–Kutta integrator with a deterministic
//!   time base  t_k = k·dt,
//! * the row-partitioned product  E ∘ Z = [E₁Z | E₂Z | … | E_lZ]  used when
//!   assembling adaptive regressors from a list of coupling blocks.
//!
//! All routines are dense and unapologetically O(n³)–O(n⁶); the dimensions
//! involved (a handful of states per agent) make that the right trade.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Norms and eigenvalue helpers
// ---------------------------------------------------------------------------

/// Spectral norm (largest singular value) of a dense matrix.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.clone().singular_values()[0]
}

/// Largest real part over the eigenvalues of a square matrix.
pub fn max_eigenvalue_real_part(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return f64::NEG_INFINITY;
    }
    a.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// True iff every eigenvalue of `a` has strictly negative real part.
pub fn is_hurwitz(a: &DMatrix<f64>) -> bool {
    a.nrows() == 0 || max_eigenvalue_real_part(a) < 0.0
}

// ---------------------------------------------------------------------------
// Sylvester and Lyapunov solves
// ---------------------------------------------------------------------------

/// Relative residual above which a Sylvester solve is declared unreliable.
const SYLVESTER_RESIDUAL_TOL: f64 = 1e-8;

/// Solve the Sylvester equation `T·Φ − M·T = R` for `T`.
///
/// `Φ` is p×p, `M` is q×q, and `R` (hence `T`) is q×p.  The equation has a
/// unique solution exactly when Φ and M share no eigenvalue; overlap is
/// reported as [`Error::SpectraOverlap`], detected either by outright
/// singularity of the linearized system or by an excessive relative
/// residual of the computed candidate.
///
/// The implementation vectorizes columnwise:
/// `vec(TΦ) = (Φᵀ ⊗ I_q)·vec(T)` and `vec(MT) = (I_p ⊗ M)·vec(T)`, so
/// `(Φᵀ ⊗ I_q − I_p ⊗ M)·vec(T) = vec(R)` is a single dense pq×pq solve.
/// For the channel dimensions used here (p, q ≤ 6) this is exact enough and
/// far simpler than a Bartels–Stewart reduction.
pub fn solve_sylvester(
    phi: &DMatrix<f64>,
    m: &DMatrix<f64>,
    rhs: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let p = phi.nrows();
    let q = m.nrows();
    if !phi.is_square() || !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "solve_sylvester",
            detail: format!("Φ is {}x{}, M is {}x{}; both must be square",
                phi.nrows(), phi.ncols(), m.nrows(), m.ncols()),
        });
    }
    if rhs.nrows() != q || rhs.ncols() != p {
        return Err(Error::DimensionMismatch {
            context: "solve_sylvester",
            detail: format!(
                "right-hand side is {}x{}, expected {q}x{p}",
                rhs.nrows(),
                rhs.ncols()
            ),
        });
    }
    if p == 0 || q == 0 {
        return Ok(DMatrix::zeros(q, p));
    }

    let eye_p = DMatrix::<f64>::identity(p, p);
    let eye_q = DMatrix::<f64>::identity(q, q);
    let system = phi.transpose().kronecker(&eye_q) - eye_p.kronecker(m);
    let rhs_vec = DVector::from_column_slice(rhs.as_slice());

    let lu = system.full_piv_lu();
    let sol = lu
        .solve(&rhs_vec)
        .ok_or(Error::SpectraOverlap { residual: f64::INFINITY })?;
    let t = DMatrix::from_column_slice(q, p, sol.as_slice());

    // Even when the LU solve "succeeds", near-overlapping spectra show up as
    // a large equation residual; reject those too.
    let residual = (&t * phi - m * &t - rhs).norm() / rhs.norm().max(1.0);
    if !residual.is_finite() || residual > SYLVESTER_RESIDUAL_TOL {
        return Err(Error::SpectraOverlap { residual });
    }
    Ok(t)
}

/// Solve `𝒬·M + Mᵀ·𝒬 = −I` for the symmetric positive definite `𝒬`.
///
/// Requires `M` Hurwitz (checked up front; violations reported as
/// [`Error::NotHurwitz`]).  The result is explicitly symmetrized and then
/// verified positive definite via a Cholesky factorization.
pub fn solve_lyapunov(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "solve_lyapunov",
            detail: format!("M is {}x{}", m.nrows(), m.ncols()),
        });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let max_re = max_eigenvalue_real_part(m);
    if max_re >= 0.0 {
        return Err(Error::NotHurwitz { max_real_part: max_re });
    }

    // vec(𝒬M) = (Mᵀ ⊗ I)vec(𝒬),  vec(Mᵀ𝒬) = (I ⊗ Mᵀ)vec(𝒬).
    let eye = DMatrix::<f64>::identity(n, n);
    let system = m.transpose().kronecker(&eye) + eye.kronecker(&m.transpose());
    let rhs = DVector::from_column_slice((-DMatrix::<f64>::identity(n, n)).as_slice());
    let sol = system
        .full_piv_lu()
        .solve(&rhs)
        .ok_or(Error::NotHurwitz { max_real_part: max_re })?;
    let q_raw = DMatrix::from_column_slice(n, n, sol.as_slice());
    let q = (&q_raw + q_raw.transpose()) * 0.5;

    if q.clone().cholesky().is_none() {
        // A Hurwitz M always yields 𝒬 ≻ 0; reaching this means the solve
        // itself was numerically compromised.
        return Err(Error::NotHurwitz { max_real_part: max_re });
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

/// Inputs with ‖A·t‖₁ above this are rejected rather than silently squared
/// into garbage.  Well below the overflow threshold of the method, far above
/// anything the observer analysis produces.
const EXPM_NORM_CAP: f64 = 1.0e4;

fn norm_one(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential `e^{A·t}` by scaling-and-squaring with Padé
/// approximants (nalgebra's implementation of the Higham 2005 scheme).
///
/// Returns [`Error::Overflow`] when ‖A·t‖₁ exceeds the documented input
/// range or the result contains non-finite entries.
pub fn expm(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: "expm",
            detail: format!("A is {}x{}", a.nrows(), a.ncols()),
        });
    }
    let at = a * t;
    let norm = norm_one(&at);
    if !norm.is_finite() || norm > EXPM_NORM_CAP {
        return Err(Error::Overflow { norm });
    }
    let result = at.exp();
    if result.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow { norm });
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// Fixed-step RK4
// ---------------------------------------------------------------------------

/// Right-hand side of an autonomous-or-not first-order ODE ẋ = f(t, x).
///
/// Implementations write the derivative into `dxdt` (preallocated by the
/// caller to `dim()` entries) and may fail, e.g. when a state-dependent
/// matrix inversion degenerates.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, x: &DVector<f64>, dxdt: &mut DVector<f64>) -> Result<()>;
}

/// One classical fourth-order Runge–Kutta step from `(t, x)` with step `dt`.
///
/// The proposed state is checked componentwise for finiteness; the first
/// offending index is reported via [`Error::NonFiniteState`] so the caller
/// can translate it into an agent/component diagnosis.
pub fn rk4_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t: f64,
    x: &DVector<f64>,
    dt: f64,
) -> Result<DVector<f64>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameters {
            message: format!("RK4 step size must be positive and finite, got {dt}"),
        });
    }
    let n = sys.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            context: "rk4_step",
            detail: format!("state has {} entries, system expects {n}", x.len()),
        });
    }

    let mut k1 = DVector::zeros(n);
    let mut k2 = DVector::zeros(n);
    let mut k3 = DVector::zeros(n);
    let mut k4 = DVector::zeros(n);

    sys.rhs(t, x, &mut k1)?;
    let stage = x + &k1 * (dt / 2.0);
    sys.rhs(t + dt / 2.0, &stage, &mut k2)?;
    let stage = x + &k2 * (dt / 2.0);
    sys.rhs(t + dt / 2.0, &stage, &mut k3)?;
    let stage = x + &k3 * dt;
    sys.rhs(t + dt, &stage, &mut k4)?;

    let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    if let Some(idx) = next.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState {
            t: t + dt,
            index: idx,
            label: String::new(),
        });
    }
    Ok(next)
}

// ---------------------------------------------------------------------------
// Row-partitioned block product
// ---------------------------------------------------------------------------

/// Horizontal concatenation `[E₁·Z | E₂·Z | … | E_l·Z]` of per-block
/// products.  All blocks must share the same shape and their column count
/// must match `Z`'s row count.  The block list must be non-empty (callers
/// with zero blocks know the answer is an empty matrix of their preferred
/// row count and should not call in).
pub fn tracy_singh_row(blocks: &[DMatrix<f64>], z: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let first = blocks.first().ok_or(Error::DimensionMismatch {
        context: "tracy_singh_row",
        detail: "empty block list".to_string(),
    })?;
    let (rows, cols) = first.shape();
    for (j, b) in blocks.iter().enumerate() {
        if b.shape() != (rows, cols) {
            return Err(Error::DimensionMismatch {
                context: "tracy_singh_row",
                detail: format!(
                    "block {j} is {}x{}, block 0 is {rows}x{cols}",
                    b.nrows(),
                    b.ncols()
                ),
            });
        }
    }
    if z.nrows() != cols {
        return Err(Error::DimensionMismatch {
            context: "tracy_singh_row",
            detail: format!("Z has {} rows, blocks have {cols} columns", z.nrows()),
        });
    }

    let zc = z.ncols();
    let mut out = DMatrix::zeros(rows, blocks.len() * zc);
    for (j, b) in blocks.iter().enumerate() {
        out.view_mut((0, j * zc), (rows, zc)).copy_from(&(b * z));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    // -- Sylvester ----------------------------------------------------------

    /// For Φ = [[0,1],[−σ²,0]], M = [[0,1],[−3,−2]], N = (0,1)ᵀ, Ψ = (1,0),
    /// the solution of TΦ − MT = NΨ is, with Δ = (3−σ²)² + 4σ²,
    ///     T = (1/Δ)·[[3−σ², −2], [2σ², 3−σ²]],
    /// verified by direct substitution.
    fn closed_form_t(sigma: f64) -> DMatrix<f64> {
        let s2 = sigma * sigma;
        let delta = (3.0 - s2).powi(2) + 4.0 * s2;
        mat(2, 2, &[3.0 - s2, -2.0, 2.0 * s2, 3.0 - s2]) / delta
    }

    #[test]
    fn sylvester_matches_closed_form_for_oscillator_channels() {
        let m = mat(2, 2, &[0.0, 1.0, -3.0, -2.0]);
        let n_psi = mat(2, 2, &[0.0, 0.0, 1.0, 0.0]); // N·Ψ with N=(0,1)ᵀ, Ψ=(1,0)
        for &sigma in &[0.1, 0.2, 1.0, 2.5] {
            let phi = mat(2, 2, &[0.0, 1.0, -sigma * sigma, 0.0]);
            let t = solve_sylvester(&phi, &m, &n_psi).unwrap();
            let expected = closed_form_t(sigma);
            assert_relative_eq!(t, expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn sylvester_nominal_channel_solution() {
        // Zero-frequency limit: Φ⁰ = [[0,1],[0,0]] gives T⁰ = (1/9)[[3,−2],[0,3]].
        let m = mat(2, 2, &[0.0, 1.0, -3.0, -2.0]);
        let n_psi = mat(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let phi0 = mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let t0 = solve_sylvester(&phi0, &m, &n_psi).unwrap();
        let expected = mat(2, 2, &[3.0, -2.0, 0.0, 3.0]) / 9.0;
        assert_relative_eq!(t0, expected, epsilon = 1e-14);
    }

    #[test]
    fn sylvester_random_residuals_are_tiny() {
        // Spectra kept disjoint by construction: Geršgorin puts the
        // eigenvalues of Φ inside |z| ≤ 3 and those of M left of −3.
        let mut rng = ChaCha8Rng::seed_from_u64(0x51);
        for _ in 0..50 {
            let p = rng.random_range(1..5);
            let q = rng.random_range(1..5);
            let phi = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
            let m = DMatrix::from_fn(q, q, |i, j| {
                rng.random_range(-1.0..1.0) - if i == j { 6.0 } else { 0.0 }
            });
            let rhs = DMatrix::from_fn(q, p, |_, _| rng.random_range(-2.0..2.0));
            let t = solve_sylvester(&phi, &m, &rhs).unwrap();
            let res = (&t * &phi - &m * &t - &rhs).norm() / rhs.norm().max(1.0);
            assert!(res < 1e-12, "residual {res:.3e}");
        }
    }

    #[test]
    fn sylvester_detects_spectral_overlap() {
        let m = mat(2, 2, &[0.0, 1.0, -3.0, -2.0]);
        let rhs = mat(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        // Φ = M shares both eigenvalues with M.
        match solve_sylvester(&m.clone(), &m, &rhs) {
            Err(Error::SpectraOverlap { .. }) => {}
            other => panic!("expected SpectraOverlap, got {other:?}"),
        }
    }

    #[test]
    fn sylvester_rejects_bad_shapes() {
        let m = mat(2, 2, &[0.0, 1.0, -3.0, -2.0]);
        let phi = mat(3, 3, &[0.0; 9]);
        let rhs = mat(2, 2, &[0.0; 4]);
        assert!(matches!(
            solve_sylvester(&phi, &m, &rhs),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    // -- Lyapunov -----------------------------------------------------------

    #[test]
    fn lyapunov_matches_hand_solution() {
        // For M = [[0,1],[−3,−2]] the solution of 𝒬M + Mᵀ𝒬 = −I is
        // 𝒬 = [[4/3, 1/6], [1/6, 1/3]]  (solve the three scalar equations).
        let m = mat(2, 2, &[0.0, 1.0, -3.0, -2.0]);
        let q = solve_lyapunov(&m).unwrap();
        let expected = mat(2, 2, &[4.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0]);
        assert_relative_eq!(q, expected, epsilon = 1e-13);
    }

    #[test]
    fn lyapunov_random_hurwitz_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x52);
        for _ in 0..40 {
            let n = rng.random_range(1..6);
            let m = DMatrix::from_fn(n, n, |i, j| {
                rng.random_range(-1.0..1.0) - if i == j { 4.0 } else { 0.0 }
            });
            let q = solve_lyapunov(&m).unwrap();
            let res = (&q * &m + m.transpose() * &q + DMatrix::<f64>::identity(n, n)).norm();
            assert!(res < 1e-11, "residual {res:.3e}");
            assert_relative_eq!(q, q.transpose(), epsilon = 1e-14);
            assert!(q.clone().cholesky().is_some());
        }
    }

    #[test]
    fn lyapunov_rejects_unstable_matrix() {
        let m = mat(2, 2, &[0.0, 1.0, -3.0, 2.0]);
        assert!(matches!(
            solve_lyapunov(&m),
            Err(Error::NotHurwitz { .. })
        ));
    }

    // -- expm ---------------------------------------------------------------

    #[test]
    fn expm_of_planar_rotation_generator() {
        // A = [[0,1],[−4,0]] generates e^{At} = [[cos 2t, sin 2t / 2],
        // [−2 sin 2t, cos 2t]].
        let a = mat(2, 2, &[0.0, 1.0, -4.0, 0.0]);
        for &t in &[0.0, 0.3, 0.7, 2.0, -1.1] {
            let e = expm(&a, t).unwrap();
            let (s, c) = (2.0 * t).sin_cos();
            let expected = mat(2, 2, &[c, s / 2.0, -2.0 * s, c]);
            assert_relative_eq!(e, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn expm_nilpotent_shift() {
        let a = mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = expm(&a, 1.75).unwrap();
        assert_relative_eq!(e, mat(2, 2, &[1.0, 1.75, 0.0, 1.0]), epsilon = 1e-15);
    }

    #[test]
    fn expm_semigroup_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x53);
        for _ in 0..20 {
            let n = rng.random_range(1..6);
            let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let e_s = expm(&a, 0.3).unwrap();
            let e_t = expm(&a, 0.5).unwrap();
            let e_st = expm(&a, 0.8).unwrap();
            assert!((e_s * e_t - e_st).norm() < 1e-10);
        }
    }

    #[test]
    fn expm_rejects_huge_inputs() {
        let a = mat(1, 1, &[1.0]);
        assert!(matches!(expm(&a, 1e9), Err(Error::Overflow { .. })));
    }

    // -- RK4 ----------------------------------------------------------------

    struct Decay;
    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, x: &DVector<f64>, dxdt: &mut DVector<f64>) -> Result<()> {
            dxdt[0] = -x[0];
            Ok(())
        }
    }

    struct Harmonic;
    impl OdeSystem for Harmonic {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, x: &DVector<f64>, dxdt: &mut DVector<f64>) -> Result<()> {
            dxdt[0] = x[1];
            dxdt[1] = -4.0 * x[0];
            Ok(())
        }
    }

    #[test]
    fn rk4_single_decay_step() {
        // One RK4 step of ẋ = −x from 1.0 with dt = 0.1 gives exactly
        // 1 − (0.1/6)(1 + 2·0.95 + 2·0.9525 + 0.90475) = 0.9048375.
        let x = DVector::from_vec(vec![1.0]);
        let next = rk4_step(&Decay, 0.0, &x, 0.1).unwrap();
        assert_relative_eq!(next[0], 0.904_837_5, epsilon = 1e-15);
        // ... which agrees with e^{−0.1} to the expected O(dt⁵) accuracy.
        assert!((next[0] - (-0.1_f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn rk4_is_fourth_order_on_harmonic_oscillator() {
        let exact = |t: f64| {
            let (s, c) = (2.0 * t).sin_cos();
            DVector::from_vec(vec![c, -2.0 * s])
        };
        let run = |dt: f64| {
            let mut x = DVector::from_vec(vec![1.0, 0.0]);
            let steps = (1.0 / dt).round() as usize;
            for k in 0..steps {
                x = rk4_step(&Harmonic, k as f64 * dt, &x, dt).unwrap();
            }
            (x - exact(1.0)).norm()
        };
        let e_coarse = run(0.05);
        let e_fine = run(0.025);
        let ratio = e_coarse / e_fine;
        assert!(
            (12.0..=20.0).contains(&ratio),
            "error ratio {ratio:.2} outside fourth-order band (errors {e_coarse:.3e}, {e_fine:.3e})"
        );
    }

    #[test]
    fn rk4_flags_non_finite_states() {
        struct Blowup;
        impl OdeSystem for Blowup {
            fn dim(&self) -> usize {
                1
            }
            fn rhs(&self, _t: f64, x: &DVector<f64>, dxdt: &mut DVector<f64>) -> Result<()> {
                dxdt[0] = x[0] * x[0] * 1e300;
                Ok(())
            }
        }
        let x = DVector::from_vec(vec![1e10]);
        match rk4_step(&Blowup, 0.0, &x, 1.0) {
            Err(Error::NonFiniteState { index: 0, .. }) => {}
            other => panic!("expected NonFiniteState, got {other:?}"),
        }
    }

    #[test]
    fn rk4_rejects_nonpositive_dt() {
        let x = DVector::from_vec(vec![1.0]);
        assert!(rk4_step(&Decay, 0.0, &x, 0.0).is_err());
        assert!(rk4_step(&Decay, 0.0, &x, -0.1).is_err());
    }

    // -- tracy_singh_row ----------------------------------------------------

    #[test]
    fn block_row_product_small_example() {
        let e1 = mat(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let e2 = mat(2, 2, &[0.0, 1.0, 3.0, 0.0]);
        let z = mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let out = tracy_singh_row(&[e1, e2], &z).unwrap();
        let expected = mat(2, 4, &[1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 3.0, 6.0]);
        assert_relative_eq!(out, expected, epsilon = 1e-15);
    }

    #[test]
    fn block_row_product_shape_checks() {
        let e1 = mat(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let z3 = mat(3, 1, &[1.0, 2.0, 3.0]);
        assert!(matches!(
            tracy_singh_row(&[e1], &z3),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            tracy_singh_row(&[], &mat(2, 2, &[0.0; 4])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    // -- helpers ------------------------------------------------------------

    #[test]
    fn spectral_norm_of_known_matrix() {
        // [[0,1],[−4,0]] has singular values {4, 1}.
        let a = mat(2, 2, &[0.0, 1.0, -4.0, 0.0]);
        assert_relative_eq!(spectral_norm(&a), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn hurwitz_check() {
        assert!(is_hurwitz(&mat(2, 2, &[0.0, 1.0, -3.0, -2.0])));
        assert!(!is_hurwitz(&mat(2, 2, &[0.0, 1.0, -4.0, 0.0]))); // marginal
    }
}
