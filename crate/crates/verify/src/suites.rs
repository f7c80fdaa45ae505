//! Named pass/fail property suites behind the `verify` command.
//!
//! Every check is deterministic (fixed RNG seeds, fixed grids) and
//! self-contained: the benchmark fleet is rebuilt in code and no input
//! files are read.  Each check carries a one-line numeric detail so a
//! failing table points straight at the offending quantity.

use lagrange_swarm::controller::{self, Gains, ReferenceSignals};
use lagrange_swarm::internal_model::{
    synthesize_channel, DisturbanceChannel, DisturbanceTerm,
};
use lagrange_swarm::numerics::{self, OdeSystem};
use lagrange_swarm::observer::{self, ObserverState};
use lagrange_swarm::plant::{self, ArmParameters};
use lagrange_swarm::sim::{self, RunOptions};
use lagrange_swarm::Result;
use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::invariants::LyapunovEvaluator;
use crate::{benchmark, exact, invariants};

// ---------------------------------------------------------------------------
// Check plumbing
// ---------------------------------------------------------------------------

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(list: &mut Vec<CheckResult>, name: &str, passed: bool, detail: String) {
    list.push(CheckResult {
        name: name.to_string(),
        passed,
        detail,
    });
}

/// The suite names `verify` accepts (besides `all`).
pub fn suite_names() -> &'static [&'static str] {
    &["plant", "im", "observer", "controller"]
}

/// Run one suite by name.
pub fn run_suite(name: &str) -> Option<Vec<CheckResult>> {
    match name {
        "plant" => Some(plant_suite()),
        "im" => Some(im_suite()),
        "observer" => Some(observer_suite()),
        "controller" => Some(controller_suite()),
        _ => None,
    }
}

/// Every suite, in a fixed order.
pub fn all_suites() -> Vec<(&'static str, Vec<CheckResult>)> {
    suite_names()
        .iter()
        .map(|&n| (n, run_suite(n).expect("known suite")))
        .collect()
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

/// Render results as the fixed table the CLI prints.
pub fn render(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for r in results {
        s.push_str(&format!(
            "[{}] {:width$}  {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail,
            width = width
        ));
    }
    s
}

// ---------------------------------------------------------------------------
// Random fixtures
// ---------------------------------------------------------------------------

/// A random arm with positive-definite inertia (a₃ < √(a₁a₂)).
pub fn random_arm(rng: &mut StdRng) -> ArmParameters {
    let a1: f64 = rng.random_range(0.5..2.0);
    let a2: f64 = rng.random_range(0.5..2.0);
    let a3 = rng.random_range(0.05..0.9) * (a1 * a2).sqrt();
    let a4 = rng.random_range(0.2..2.0);
    let a5 = rng.random_range(0.1..1.2);
    ArmParameters::new([a1, a2, a3, a4, a5], 9.81).expect("sampled arm is valid")
}

/// A random disturbance channel: optional bias, one or two sinusoids with
/// well-separated frequencies, mixed-sign amplitudes, random phases.
pub fn random_channel(rng: &mut StdRng) -> DisturbanceChannel {
    let bias = if rng.random_bool(0.5) {
        rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 }
    } else {
        0.0
    };
    let count: usize = rng.random_range(1..=2);
    let mut freqs: Vec<f64> = Vec::new();
    while freqs.len() < count {
        let f = rng.random_range(0.05..3.0);
        if freqs.iter().all(|g| (g - f).abs() > 0.05) {
            freqs.push(f);
        }
    }
    let terms = freqs
        .iter()
        .map(|&frequency| DisturbanceTerm {
            amplitude: rng.random_range(0.2..5.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 },
            frequency,
            phase: rng.random_range(-3.1..3.1),
        })
        .collect();
    DisturbanceChannel::new(bias, terms).expect("sampled channel is valid")
}

fn rand_vec2(rng: &mut StdRng, half_width: f64) -> Vector2<f64> {
    Vector2::new(
        rng.random_range(-half_width..half_width),
        rng.random_range(-half_width..half_width),
    )
}

fn rand_refs(rng: &mut StdRng, half_width: f64) -> ReferenceSignals {
    ReferenceSignals {
        v: rand_vec2(rng, half_width),
        a: rand_vec2(rng, half_width),
        s: rand_vec2(rng, half_width),
    }
}

// ---------------------------------------------------------------------------
// Plant suite
// ---------------------------------------------------------------------------

pub fn plant_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = StdRng::seed_from_u64(0x51A7);

    // 𝓜̇ − 2𝓒 is skew-symmetric: the passivity structure of the arm.
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_arm(&mut rng);
        let q = rand_vec2(&mut rng, 3.0);
        let qdot = rand_vec2(&mut rng, 3.0);
        let x = rand_vec2(&mut rng, 1.0);
        let sk = plant::mass_matrix_dot(&p, &q, &qdot)
            - 2.0 * plant::coriolis_matrix(&p, &q, &qdot);
        worst = worst.max(x.dot(&(sk * x)).abs());
    }
    check(
        &mut out,
        "plant.skew_symmetry",
        worst < 1e-12,
        format!("max |xᵀ(𝓜̇−2𝓒)x| = {worst:.3e} over 1000 samples"),
    );

    // Each regressor factorization matches its direct evaluation.
    let mut w_y: f64 = 0.0;
    let mut w_l: f64 = 0.0;
    let mut w_cs: f64 = 0.0;
    let mut w_ms: f64 = 0.0;
    for _ in 0..500 {
        let p = random_arm(&mut rng);
        let theta = p.theta();
        let q = rand_vec2(&mut rng, 3.0);
        let qdot = rand_vec2(&mut rng, 3.0);
        let v = rand_vec2(&mut rng, 2.0);
        let a = rand_vec2(&mut rng, 2.0);
        let s = rand_vec2(&mut rng, 2.0);

        let m_mat = plant::mass_matrix(&p, &q);
        let c_mat = plant::coriolis_matrix(&p, &q, &qdot);
        let md_mat = plant::mass_matrix_dot(&p, &q, &qdot);
        let g_vec = plant::gravity_vector(&p, &q);

        w_y = w_y.max(
            (plant::regressor_y(p.gravity(), &q, &qdot, &v, &a) * theta
                - (m_mat * a + c_mat * v + g_vec))
                .norm(),
        );
        w_l = w_l.max((plant::regressor_l(&q, &s) * theta - m_mat * s).norm());
        w_cs = w_cs.max((plant::regressor_cs(&q, &qdot, &s) * theta - c_mat * s).norm());
        w_ms = w_ms.max((plant::regressor_mdot_s(&q, &qdot, &s) * theta - md_mat * s).norm());
    }
    check(&mut out, "plant.regressor_y", w_y < 1e-10, format!("max ‖YΘ − (𝓜a+𝓒v+G)‖ = {w_y:.3e} over 500 samples"));
    check(&mut out, "plant.regressor_l", w_l < 1e-10, format!("max ‖LΘ − 𝓜s‖ = {w_l:.3e} over 500 samples"));
    check(&mut out, "plant.regressor_cs", w_cs < 1e-10, format!("max ‖CsΘ − 𝓒s‖ = {w_cs:.3e} over 500 samples"));
    check(&mut out, "plant.regressor_mdot_s", w_ms < 1e-10, format!("max ‖(𝓜̇s)Θ − 𝓜̇s‖ = {w_ms:.3e} over 500 samples"));

    // Filter-input and nominal-torque regressors against their
    // assembled right-hand sides, and ρ against its closed-form product
    // with the true parameter vector.
    let setups = benchmark::setups();
    let mut w_p: f64 = 0.0;
    let mut w_q: f64 = 0.0;
    let mut w_rho: f64 = 0.0;
    for trial in 0..500 {
        let setup = &setups[trial % setups.len()];
        let comp = &setup.comp;
        let theta = setup.params.theta();
        let q = rand_vec2(&mut rng, 3.0);
        let qdot = rand_vec2(&mut rng, 3.0);
        let refs = rand_refs(&mut rng, 2.0);

        let m_mat = plant::mass_matrix(&setup.params, &q);
        let c_mat = plant::coriolis_matrix(&setup.params, &q, &qdot);
        let md_mat = plant::mass_matrix_dot(&setup.params, &q, &qdot);
        let g_vec = plant::gravity_vector(&setup.params, &q);
        let ms = m_mat * refs.s;
        let nominal = m_mat * refs.a + c_mat * refs.v + g_vec;
        let inner = c_mat * refs.s - md_mat * refs.s + nominal;

        let p_mat = controller::build_p(comp, setup.params.gravity(), &q, &qdot, &refs).unwrap();
        let p_rhs = &comp.m * (&comp.n * DVector::from_column_slice(ms.as_slice()))
            + &comp.n * DVector::from_column_slice(inner.as_slice());
        w_p = w_p.max((p_mat * theta - p_rhs).norm());

        let q_mat = controller::build_q(comp, setup.params.gravity(), &q, &qdot, &refs).unwrap();
        let q_rhs = &comp.a * (&comp.n * DVector::from_column_slice(ms.as_slice()))
            - DVector::from_column_slice(nominal.as_slice());
        w_q = w_q.max((&q_mat * theta - q_rhs).norm());

        let zeta = DMatrix::from_fn(comp.dim, 5, |_, _| rng.random_range(-2.0..2.0));
        let xi = DVector::from_fn(comp.dim, |_, _| rng.random_range(-2.0..2.0));
        let rho = controller::build_regressor(comp, &q_mat, &zeta, &xi, &q, &refs).unwrap();
        let w = exact::omega_true(theta, comp);
        let lhs = &rho * &w;
        let rhs = exact::rho_omega_oracle(&setup.params, comp, &q, &qdot, &refs, &zeta, &xi);
        w_rho = w_rho.max((Vector2::new(lhs[0], lhs[1]) - rhs).norm());
    }
    check(&mut out, "plant.regressor_p", w_p < 1e-10, format!("max ‖PΘ − rhs‖ = {w_p:.3e} over 500 samples"));
    check(&mut out, "plant.regressor_q", w_q < 1e-10, format!("max ‖QΘ − rhs‖ = {w_q:.3e} over 500 samples"));
    check(&mut out, "plant.regressor_rho_omega", w_rho < 1e-10, format!("max ‖ρω − oracle‖ = {w_rho:.3e} over 500 samples"));

    // Inertia stays positive definite across the configuration grid for
    // all five benchmark parameter vectors.
    let mut min_eig = f64::INFINITY;
    for theta in &benchmark::THETA {
        let p = ArmParameters::new(*theta, benchmark::GRAVITY).unwrap();
        for k in 0..=72 {
            let q2 = 2.0 * std::f64::consts::PI * k as f64 / 72.0;
            let m = plant::mass_matrix(&p, &Vector2::new(0.0, q2));
            min_eig = min_eig.min(m.symmetric_eigenvalues().min());
        }
    }
    check(
        &mut out,
        "plant.inertia_positive_definite",
        min_eig > 0.0,
        format!("min eigenvalue of 𝓜 over grid = {min_eig:.6}"),
    );

    out
}

// ---------------------------------------------------------------------------
// Internal-model suite
// ---------------------------------------------------------------------------

pub fn im_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();

    // Closed forms of the coupling matrices for the benchmark channels:
    // with Δ(σ) = (σ²−1)² + 8,
    //   T^σ = (1/Δ)[[3−σ², −2], [2σ², 3−σ²]],  T⁰ = (1/9)[[3, −2], [0, 3]],
    //   A♦ = [3, 2],  B♦ = [3−σ², 2].
    let mut w_tsig: f64 = 0.0;
    let mut w_tzero: f64 = 0.0;
    let mut w_a: f64 = 0.0;
    let mut w_b: f64 = 0.0;
    let mut w_syl: f64 = 0.0;
    let mut w_res: f64 = 0.0;
    let mut w_rho_freq: f64 = 0.0;
    let mut w_sel: f64 = 0.0;
    for i in 0..5 {
        let comp = benchmark::agent_comp(i);
        for ch in &comp.channels {
            let x = ch.channel.terms()[0].frequency.powi(2);
            let delta = (x - 1.0) * (x - 1.0) + 8.0;
            let t_closed = DMatrix::from_row_slice(
                2,
                2,
                &[
                    (3.0 - x) / delta,
                    -2.0 / delta,
                    2.0 * x / delta,
                    (3.0 - x) / delta,
                ],
            );
            let t0_closed =
                DMatrix::from_row_slice(2, 2, &[1.0 / 3.0, -2.0 / 9.0, 0.0, 1.0 / 3.0]);
            w_tsig = w_tsig.max((&ch.t_sigma - t_closed).norm());
            w_tzero = w_tzero.max((&ch.t_zero - t0_closed).norm());
            w_a = w_a.max((&ch.a_row - DMatrix::from_row_slice(1, 2, &[3.0, 2.0])).norm());
            w_b = w_b.max((&ch.b_row - DMatrix::from_row_slice(1, 2, &[3.0 - x, 2.0])).norm());
            w_syl = w_syl
                .max((&ch.t_sigma * &ch.phi - &ch.m * &ch.t_sigma - &ch.n * &ch.psi).norm());
        }
        let mut recon = &comp.a - &comp.b;
        for (e, &r) in comp.e_blocks.iter().zip(comp.rho.iter()) {
            recon -= e * r;
        }
        w_res = w_res.max(recon.norm() / (1.0 + comp.a.norm()));
        for (j, ch) in comp.channels.iter().enumerate() {
            let sigma = ch.channel.terms()[0].frequency;
            w_rho_freq = w_rho_freq.max((comp.rho[j] - sigma * sigma).abs());
        }
        // For the benchmark (single sinusoid, default surrogate) the E
        // blocks are exact selectors of each block's first column.
        let mut sel1 = DMatrix::zeros(2, 4);
        sel1[(0, 0)] = 1.0;
        let mut sel2 = DMatrix::zeros(2, 4);
        sel2[(1, 2)] = 1.0;
        w_sel = w_sel.max((&comp.e_blocks[0] - sel1).norm());
        w_sel = w_sel.max((&comp.e_blocks[1] - sel2).norm());
    }
    check(&mut out, "im.t_sigma_closed_form", w_tsig < 1e-12, format!("max ‖T^σ − closed form‖ = {w_tsig:.3e}"));
    check(&mut out, "im.t_zero_closed_form", w_tzero < 1e-12, format!("max ‖T⁰ − (1/9)[[3,−2],[0,3]]‖ = {w_tzero:.3e}"));
    check(&mut out, "im.a_row_closed_form", w_a < 1e-12, format!("max ‖A♦ − [3, 2]‖ = {w_a:.3e}"));
    check(&mut out, "im.b_row_closed_form", w_b < 1e-12, format!("max ‖B♦ − [3−σ², 2]‖ = {w_b:.3e}"));
    check(&mut out, "im.sylvester_residual", w_syl < 1e-12, format!("max ‖TΦ − MT − NΨ‖ = {w_syl:.3e}"));
    check(&mut out, "im.frequency_residual", w_res < 1e-10, format!("max ‖A − B − ΣEⱼϱⱼ‖/(1+‖A‖) = {w_res:.3e}"));
    check(&mut out, "im.rho_is_sigma_squared", w_rho_freq < 1e-15, format!("max |ϱⱼ − σⱼ²| = {w_rho_freq:.3e}"));
    check(&mut out, "im.e_blocks_are_selectors", w_sel < 1e-12, format!("max ‖Eⱼ − selector‖ = {w_sel:.3e}"));

    // Disturbance reproduction |d + Bθ| and the filter identity
    // θ̇ = Mθ − N·d on random channels.
    let mut rng = StdRng::seed_from_u64(0x1337);
    let mut w_rep: f64 = 0.0;
    let mut w_filt: f64 = 0.0;
    for _ in 0..20 {
        let ch = random_channel(&mut rng);
        let model = synthesize_channel(&ch, None).expect("random channel synthesizes");
        for k in 0..100 {
            let t = 40.0 * k as f64 / 99.0;
            w_rep = w_rep.max(exact::reproduction_defect(&model, t));
        }
        let t = rng.random_range(0.0..20.0);
        let hist_dot =
            DVector::from_fn(model.order, |k, _| model.channel.derivative(k + 1, t));
        let theta_dot = -(&model.t_sigma * hist_dot);
        let filt = &model.m * exact::channel_theta(&model, t) - &model.n * model.channel.eval(t);
        w_filt = w_filt.max((theta_dot - filt).norm());
    }
    check(&mut out, "im.disturbance_reproduction", w_rep < 1e-9, format!("max |d + Bθ| = {w_rep:.3e} over 20 channels × 100 instants"));
    check(&mut out, "im.theta_filter_identity", w_filt < 1e-9, format!("max ‖θ̇ − (Mθ − Nd)‖ = {w_filt:.3e} over 20 channels"));

    // The default surrogate pair synthesizes a Hurwitz M for every order
    // the channel grammar can produce (1 through 6).
    let order_channels: Vec<DisturbanceChannel> = vec![
        DisturbanceChannel::new(1.0, vec![]).unwrap(),
        benchmark::channel(1.0, 0.7),
        DisturbanceChannel::new(
            0.5,
            vec![DisturbanceTerm { amplitude: 1.0, frequency: 0.7, phase: 0.2 }],
        )
        .unwrap(),
        DisturbanceChannel::new(
            0.0,
            vec![
                DisturbanceTerm { amplitude: 1.0, frequency: 0.7, phase: 0.0 },
                DisturbanceTerm { amplitude: 2.0, frequency: 1.3, phase: 0.4 },
            ],
        )
        .unwrap(),
        DisturbanceChannel::new(
            -0.8,
            vec![
                DisturbanceTerm { amplitude: 1.0, frequency: 0.7, phase: 0.0 },
                DisturbanceTerm { amplitude: 2.0, frequency: 1.3, phase: 0.4 },
            ],
        )
        .unwrap(),
        DisturbanceChannel::new(
            0.0,
            vec![
                DisturbanceTerm { amplitude: 1.0, frequency: 0.7, phase: 0.0 },
                DisturbanceTerm { amplitude: 2.0, frequency: 1.3, phase: 0.4 },
                DisturbanceTerm { amplitude: 0.5, frequency: 2.1, phase: -0.9 },
            ],
        )
        .unwrap(),
    ];
    let mut orders_ok = true;
    let mut order_detail = String::new();
    for (expect, ch) in (1..=6).zip(order_channels.iter()) {
        match synthesize_channel(ch, None) {
            Ok(model) => {
                let ok = model.order == expect && numerics::is_hurwitz(&model.m);
                if !ok {
                    orders_ok = false;
                }
                order_detail = format!(
                    "{order_detail}r={} cond(T^σ)={:.1e}; ",
                    model.order, model.cond_sigma
                );
            }
            Err(e) => {
                orders_ok = false;
                order_detail = format!("{order_detail}r={expect} failed: {e}; ");
            }
        }
    }
    check(&mut out, "im.default_surrogates_synthesize", orders_ok, order_detail.trim_end().to_string());

    // Companion matrices carry exactly the advertised spectrum: ±iσ per
    // sinusoid plus a zero root for the bias.
    let mut w_re: f64 = 0.0;
    let mut w_im: f64 = 0.0;
    for _ in 0..20 {
        let ch = random_channel(&mut rng);
        let model = synthesize_channel(&ch, None).unwrap();
        let eig = model.phi.complex_eigenvalues();
        w_re = w_re.max(eig.iter().map(|z| z.re.abs()).fold(0.0, f64::max));
        let mut pos: Vec<f64> = eig.iter().map(|z| z.im).filter(|im| *im > 1e-9).collect();
        pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut freqs: Vec<f64> = ch.terms().iter().map(|t| t.frequency).collect();
        freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if pos.len() != freqs.len() {
            w_im = f64::INFINITY;
        } else {
            for (p, f) in pos.iter().zip(freqs.iter()) {
                w_im = w_im.max((p - f).abs());
            }
        }
    }
    check(&mut out, "im.exosystem_spectrum", w_re < 1e-9 && w_im < 1e-8, format!("max |Re| = {w_re:.3e}, max frequency defect = {w_im:.3e}"));

    out
}

// ---------------------------------------------------------------------------
// Observer suite
// ---------------------------------------------------------------------------

/// The (S, η) block of the fleet as a standalone system; it closes on
/// itself, so integrating it alone reproduces the fleet's observer exactly.
struct ObserverSubsystem {
    graph: lagrange_swarm::graph::DirectedGraph,
    mu1: f64,
    mu2: f64,
}

impl ObserverSubsystem {
    fn pack(states: &[ObserverState]) -> DVector<f64> {
        let mut x = DVector::zeros(6 * states.len());
        for (i, st) in states.iter().enumerate() {
            x.as_mut_slice()[6 * i..6 * i + 4].copy_from_slice(st.s.as_slice());
            x.as_mut_slice()[6 * i + 4..6 * i + 6].copy_from_slice(st.eta.as_slice());
        }
        x
    }

    fn unpack(x: &DVector<f64>) -> Vec<ObserverState> {
        let n = x.len() / 6;
        (0..n)
            .map(|i| ObserverState {
                s: Matrix2::from_column_slice(&x.as_slice()[6 * i..6 * i + 4]),
                eta: Vector2::new(x[6 * i + 4], x[6 * i + 5]),
            })
            .collect()
    }
}

impl OdeSystem for ObserverSubsystem {
    fn dim(&self) -> usize {
        6 * self.graph.agent_count()
    }

    fn rhs(&self, _t: f64, x: &DVector<f64>, dxdt: &mut DVector<f64>) -> Result<()> {
        let states = Self::unpack(x);
        let dots = observer::observer_rhs(&self.graph, &states, self.mu1, self.mu2)?;
        dxdt.copy_from(&Self::pack(&dots));
        Ok(())
    }
}

pub fn observer_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let graph = benchmark::graph();
    let analysis = graph.analyze().expect("benchmark graph has a spanning tree");

    let u_defect = (&analysis.left_null - benchmark::left_null()).amax();
    let u_residual = (analysis.laplacian.transpose() * &analysis.left_null).norm();
    check(
        &mut out,
        "observer.left_null_vector",
        u_defect < 1e-9 && u_residual < 1e-12,
        format!("max |u − (1/3,0,0,1/3,1/3)| = {u_defect:.3e}, ‖uᵀ𝓛‖ = {u_residual:.3e}"),
    );
    check(
        &mut out,
        "observer.spectral_gap",
        (analysis.lambda1 - 1.0).abs() < 1e-9,
        format!("λ₁ = {:.12}, ‖𝓛‖ = {:.12}", analysis.lambda1, analysis.norm),
    );

    let seeds = benchmark::initial_generators();
    let s_star = observer::consensus_generator(&seeds, &analysis.left_null)
        .expect("matching lengths");
    let s_defect = (s_star - benchmark::s_star()).norm();
    let eig = DMatrix::from_iterator(2, 2, s_star.iter().copied()).complex_eigenvalues();
    let eig_defect = eig
        .iter()
        .map(|z| (z.re.abs()).max((z.im.abs() - 2.0).abs()))
        .fold(0.0, f64::max);
    check(
        &mut out,
        "observer.emergent_generator",
        s_defect < 1e-12 && eig_defect < 1e-9,
        format!("‖S* − [[0,1],[−4,0]]‖ = {s_defect:.3e}, eigenvalue defect from ±2i = {eig_defect:.3e}"),
    );

    let report = observer::check_gains(
        benchmark::MU1,
        benchmark::MU2,
        analysis.norm,
        analysis.lambda1,
        &s_star,
    )
    .expect("valid gains");
    let mu2_min_closed = 4.0 / analysis.lambda1;
    let mu1_min_closed = 2.0 * (benchmark::MU2 * analysis.norm + 4.0) / analysis.lambda1;
    let arithmetic_ok = (report.mu2_min - mu2_min_closed).abs() < 1e-9
        && (report.mu1_min - mu1_min_closed).abs() < 1e-9
        && (report.s_star_norm - 4.0).abs() < 1e-9
        && !report.mu2_ok;
    check(
        &mut out,
        "observer.gain_bound_arithmetic",
        arithmetic_ok,
        format!(
            "bounds: μ₁ ≥ {:.3}, μ₂ > {:.3}; benchmark (μ₁, μ₂) = (2, 2) sits below the \
             sufficient μ₂ bound yet converges — the bound is conservative",
            report.mu1_min, report.mu2_min
        ),
    );

    // Integrate the (S, η) subsystem and compare against the closed-form
    // generator flow at t = 20, then ride on to the η consensus at t = 60.
    let sys = ObserverSubsystem {
        graph: graph.clone(),
        mu1: benchmark::MU1,
        mu2: benchmark::MU2,
    };
    let initial = benchmark::initial();
    let start: Vec<ObserverState> = initial
        .iter()
        .map(|a| ObserverState { s: a.s, eta: a.eta })
        .collect();
    let dt = 1e-3;
    let mut x = ObserverSubsystem::pack(&start);
    let mut at_20 = None;
    for k in 0..60_000 {
        x = numerics::rk4_step(&sys, k as f64 * dt, &x, dt).expect("linear subsystem step");
        if k + 1 == 20_000 {
            at_20 = Some(x.clone());
        }
    }
    let states_20 = ObserverSubsystem::unpack(at_20.as_ref().unwrap());
    let exact_20 = exact::exact_generators(
        &analysis.laplacian,
        benchmark::MU1,
        &seeds,
        20.0,
    )
    .expect("mixing matrix");
    let mut w_rk4: f64 = 0.0;
    let mut w_settle: f64 = 0.0;
    for (st, ex) in states_20.iter().zip(exact_20.iter()) {
        w_rk4 = w_rk4.max((st.s - ex).norm());
        w_settle = w_settle.max((st.s - benchmark::s_star()).norm());
    }
    check(&mut out, "observer.rk4_matches_expm", w_rk4 < 1e-6, format!("max ‖Sᵢ(20) − closed form‖ = {w_rk4:.3e}"));
    check(&mut out, "observer.generator_settles", w_settle < 1e-8, format!("max ‖Sᵢ(20) − S*‖ = {w_settle:.3e}"));

    let states_60 = ObserverSubsystem::unpack(&x);
    let mut eta_gap: f64 = 0.0;
    for i in 0..5 {
        for j in i + 1..5 {
            eta_gap = eta_gap.max((states_60[i].eta - states_60[j].eta).norm());
        }
    }
    check(&mut out, "observer.eta_consensus", eta_gap < 1e-4, format!("max pairwise ‖ηᵢ − ηⱼ‖ at t=60 = {eta_gap:.3e}"));

    out
}

// ---------------------------------------------------------------------------
// Controller suite
// ---------------------------------------------------------------------------

pub fn controller_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();

    // Gain validation rejects malformed matrices.
    let asym = Gains::new(Matrix2::new(40.0, 1.0, -1.0, 40.0), 0.15, 6.0);
    let indef = Gains::new(Matrix2::new(1.0, 3.0, 3.0, 1.0), 0.15, 6.0);
    let neg_lambda = Gains::new(Matrix2::identity(), -0.1, 6.0);
    let neg_alpha = Gains::new(Matrix2::identity(), 0.15, 0.0);
    check(
        &mut out,
        "controller.gain_validation",
        asym.is_err() && indef.is_err() && neg_lambda.is_err() && neg_alpha.is_err(),
        "asymmetric, indefinite, and non-positive gains all rejected".to_string(),
    );

    // Without sinusoids the combined regressor collapses to the classic
    // adaptive law: width 5 and ρ = Aζ + Q.
    let zero_comp = lagrange_swarm::internal_model::assemble_agent(vec![
        synthesize_channel(&DisturbanceChannel::zero(), None).unwrap(),
        synthesize_channel(&DisturbanceChannel::zero(), None).unwrap(),
    ])
    .unwrap();
    let mut rng = StdRng::seed_from_u64(0xC001);
    let mut w_red: f64 = 0.0;
    let mut red_shape_ok = true;
    for _ in 0..50 {
        let q = rand_vec2(&mut rng, 3.0);
        let qdot = rand_vec2(&mut rng, 3.0);
        let refs = rand_refs(&mut rng, 2.0);
        let zeta = DMatrix::zeros(0, 5);
        let xi = DVector::zeros(0);
        let q_mat = controller::build_q(&zero_comp, 9.81, &q, &qdot, &refs).unwrap();
        let rho = controller::build_regressor(&zero_comp, &q_mat, &zeta, &xi, &q, &refs).unwrap();
        if rho.shape() != (2, 5) {
            red_shape_ok = false;
        }
        w_red = w_red.max((&rho - &q_mat).norm());
    }
    check(
        &mut out,
        "controller.classic_reduction",
        red_shape_ok && w_red == 0.0,
        format!("ρ is 2×5 and ‖ρ − (Aζ + Q)‖ = {w_red:.3e} without sinusoids"),
    );

    // One three-second benchmark run backs the closed-loop checks.
    let model = benchmark::model(1e-3, 3.0, 100);
    let run = sim::run(
        &model,
        &RunOptions {
            threads: None,
            state_stride: Some(1),
        },
    );
    check(
        &mut out,
        "controller.short_run_completes",
        run.completed,
        match &run.abort {
            None => format!("3 s benchmark run, {} states recorded", run.states.as_ref().map_or(0, Vec::len)),
            Some(e) => format!("aborted: {e}"),
        },
    );
    if !run.completed {
        return out;
    }
    let states = run.states.as_ref().unwrap();

    let mut w_filter: f64 = 0.0;
    for w in states.windows(3).step_by(37) {
        w_filter = w_filter.max(invariants::xi_hat_filter_defect(&model, 1e-3, &w[0], &w[1], &w[2]));
    }
    check(
        &mut out,
        "controller.error_system_filter",
        w_filter < 1e-2,
        format!("max ‖FD(ξ̂) − Mξ̂‖ = {w_filter:.3e} at dt = 1e-3"),
    );

    let eval = LyapunovEvaluator::new(&model).expect("benchmark surrogates are Hurwitz");
    let report = eval.dissipation(&model, states, 1e-6);
    let v0 = eval.total_v(&model, states[0].0, &states[0].1);
    let (t_end, x_end) = states.last().unwrap();
    let v1 = eval.total_v(&model, *t_end, x_end);
    check(
        &mut out,
        "controller.certificate_dissipates",
        report.worst_share() >= 0.999 && v1 < v0,
        format!(
            "V̇ ≤ 1e-6 at {:.2}% of instants; V: {v0:.3} → {v1:.3}",
            report.worst_share() * 100.0
        ),
    );

    let mut w_pass: f64 = 0.0;
    for (t, x) in states.iter().step_by(211) {
        w_pass = w_pass.max(eval.passivity_defect(&model, *t, x).expect("evaluable state"));
    }
    check(
        &mut out,
        "controller.adaptation_passivity",
        w_pass < 1e-12,
        format!("max scaled |sᵀρω̃ − λω̃ᵀω̂̇| = {w_pass:.3e}"),
    );

    let max_tau = run
        .records
        .iter()
        .flat_map(|r| r.tau.iter())
        .map(|t| t.norm())
        .fold(0.0f64, f64::max);
    check(
        &mut out,
        "controller.torque_bounded",
        max_tau.is_finite() && max_tau > 0.0,
        format!("max ‖τᵢ‖ over the run = {max_tau:.3}"),
    );

    out
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for (suite, results) in all_suites() {
            assert!(!results.is_empty(), "{suite} produced no checks");
            for r in &results {
                assert!(r.passed, "{suite}: {} failed — {}", r.name, r.detail);
            }
        }
    }

    #[test]
    fn unknown_suites_are_rejected() {
        assert!(run_suite("plnt").is_none());
        assert!(run_suite("").is_none());
    }

    #[test]
    fn rendering_marks_failures() {
        let rows = vec![
            CheckResult {
                name: "a.b".into(),
                passed: true,
                detail: "fine".into(),
            },
            CheckResult {
                name: "a.long_name".into(),
                passed: false,
                detail: "broken".into(),
            },
        ];
        let table = render(&rows);
        assert!(table.contains("[PASS] a.b"));
        assert!(table.contains("[FAIL] a.long_name"));
        assert!(!all_passed(&rows));
        assert!(all_passed(&rows[..1]));
    }
}
