//! Closed-loop simulation of the networked fleet.
//!
//! The whole fleet is one flat ODE state advanced by fixed-step RK4.  Each
//! agent owns a contiguous slice laid out as
//!
//! ```text
//!     [ q(2) | q̇(2) | vec S(4) | η(2) | ξ(n_i) | vec ζ(5·n_i) | ω̂(5+6l) ]
//! ```
//!
//! (matrices column-major), so per-agent derivatives can be written into
//! disjoint sub-slices in parallel.  Determinism is a hard requirement:
//! sample times are k·dt (never accumulated), neighbor couplings are summed
//! in ascending vertex order, and no agent's arithmetic depends on thread
//! scheduling — two runs of the same model produce byte-identical CSV no
//! matter the thread count (set via [`RunOptions::threads`] or the
//! `LAGRANGE_SWARM_THREADS` environment variable).
//!
//! The per-agent compensator data carries the true frequency row B and the
//! true parameters ϱ for verification; the right-hand side never reads
//! them, which a test pins down by zeroing both and comparing trajectories
//! byte for byte.

use std::ops::Range;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rayon::prelude::*;
use serde::Serialize;

use crate::controller::{self, ControlOutput, Gains, ReferenceSignals};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::internal_model::AgentCompensatorData;
use crate::numerics::{rk4_step, OdeSystem};
use crate::observer::{self, ObserverState};
use crate::plant::{self, ArmParameters, PlantState};

/// Consensus-error threshold for the settling-time metric.
const SETTLE_E: f64 = 1e-2;
/// Pairwise-disagreement threshold for the settling-time metric.
const SETTLE_PAIR: f64 = 2e-2;
/// Maximum number of points kept in the summary disagreement curve.
const CURVE_POINTS: usize = 201;

// ---------------------------------------------------------------------------
// State layout
// ---------------------------------------------------------------------------

/// Slot ranges of one agent inside the flat state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentSlots {
    pub offset: usize,
    /// Compensator dimension n_i.
    pub comp_dim: usize,
    /// Number of adaptive frequency parameters l.
    pub sin_count: usize,
}

impl AgentSlots {
    pub fn width(&self) -> usize {
        15 + 6 * self.comp_dim + 6 * self.sin_count
    }

    pub fn q(&self) -> Range<usize> {
        self.offset..self.offset + 2
    }

    pub fn qdot(&self) -> Range<usize> {
        self.offset + 2..self.offset + 4
    }

    /// vec(S), column-major.
    pub fn s_mat(&self) -> Range<usize> {
        self.offset + 4..self.offset + 8
    }

    pub fn eta(&self) -> Range<usize> {
        self.offset + 8..self.offset + 10
    }

    pub fn xi(&self) -> Range<usize> {
        self.offset + 10..self.offset + 10 + self.comp_dim
    }

    /// vec(ζ), column-major, n_i×5.
    pub fn zeta(&self) -> Range<usize> {
        let start = self.offset + 10 + self.comp_dim;
        start..start + 5 * self.comp_dim
    }

    pub fn omega(&self) -> Range<usize> {
        let start = self.offset + 10 + 6 * self.comp_dim;
        start..start + 5 + 6 * self.sin_count
    }

    fn local_label(&self, local: usize) -> String {
        let n = self.comp_dim;
        match local {
            0 | 1 => format!("q[{local}]"),
            2 | 3 => format!("qdot[{}]", local - 2),
            4..=7 => format!("S[{},{}]", (local - 4) % 2, (local - 4) / 2),
            8 | 9 => format!("eta[{}]", local - 8),
            _ if local < 10 + n => format!("xi[{}]", local - 10),
            _ if local < 10 + 6 * n => {
                let k = local - 10 - n;
                format!("zeta[{},{}]", k % n, k / n)
            }
            _ => format!("omega[{}]", local - 10 - 6 * n),
        }
    }
}

/// Flat-state layout for the whole fleet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateLayout {
    pub slots: Vec<AgentSlots>,
    pub total: usize,
}

impl StateLayout {
    /// Layout from per-agent (compensator dimension, frequency-parameter
    /// count) pairs.
    pub fn new(shapes: &[(usize, usize)]) -> Self {
        let mut slots = Vec::with_capacity(shapes.len());
        let mut offset = 0;
        for &(comp_dim, sin_count) in shapes {
            let s = AgentSlots {
                offset,
                comp_dim,
                sin_count,
            };
            offset += s.width();
            slots.push(s);
        }
        StateLayout {
            slots,
            total: offset,
        }
    }

    /// Human-readable name of a flat-state component, e.g.
    /// `"agent 3 zeta[2,1]"` (agents 1-based, components 0-based).
    pub fn label(&self, index: usize) -> String {
        for (i, s) in self.slots.iter().enumerate() {
            if index < s.offset + s.width() {
                return format!("agent {} {}", i + 1, s.local_label(index - s.offset));
            }
        }
        format!("state[{index}]")
    }
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

/// Initial conditions of one agent's physical and observer states.  The
/// controller states ξ, ζ, ω̂ always start at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentInitial {
    pub q: Vector2<f64>,
    pub qdot: Vector2<f64>,
    pub s: Matrix2<f64>,
    pub eta: Vector2<f64>,
}

/// One agent's immutable model data.
#[derive(Debug, Clone)]
pub struct AgentSetup {
    pub params: ArmParameters,
    pub comp: AgentCompensatorData,
}

/// A fully assembled fleet: graph, agents, gains, and integration grid.
#[derive(Debug, Clone)]
pub struct SimModel {
    pub graph: DirectedGraph,
    pub agents: Vec<AgentSetup>,
    pub gains: Gains,
    pub mu1: f64,
    pub mu2: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Emit a record every `stride` steps (plus the final step).
    pub stride: usize,
    pub layout: StateLayout,
    pub initial: DVector<f64>,
}

impl SimModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        graph: DirectedGraph,
        agents: Vec<AgentSetup>,
        initial: &[AgentInitial],
        gains: Gains,
        mu1: f64,
        mu2: f64,
        dt: f64,
        t_end: f64,
        stride: usize,
    ) -> Result<Self> {
        let n = graph.agent_count();
        if agents.len() != n || initial.len() != n {
            return Err(Error::DimensionMismatch {
                context: "SimModel::new",
                detail: format!(
                    "graph has {n} vertices, got {} agents and {} initial conditions",
                    agents.len(),
                    initial.len()
                ),
            });
        }
        for (i, a) in agents.iter().enumerate() {
            if a.comp.outputs != 2 {
                return Err(Error::DimensionMismatch {
                    context: "SimModel::new",
                    detail: format!("agent {} compensator has {} channels, need 2", i + 1, a.comp.outputs),
                });
            }
        }
        if !(mu1.is_finite() && mu2.is_finite() && mu1 > 0.0 && mu2 > 0.0) {
            return Err(Error::InvalidParameters {
                message: format!("observer gains must be positive, got mu1={mu1}, mu2={mu2}"),
            });
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameters {
                message: format!("step size dt={dt} must be positive"),
            });
        }
        let steps = t_end / dt;
        if !(t_end >= 0.0) || (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::InvalidParameters {
                message: format!(
                    "horizon t_end={t_end} must be a non-negative integer multiple of dt={dt}"
                ),
            });
        }
        if stride == 0 {
            return Err(Error::InvalidParameters {
                message: "output stride must be at least 1".into(),
            });
        }
        let layout = StateLayout::new(
            &agents
                .iter()
                .map(|a| (a.comp.dim, a.comp.sin_count))
                .collect::<Vec<_>>(),
        );
        let packed = pack_initial(&layout, initial);
        Ok(SimModel {
            graph,
            agents,
            gains,
            mu1,
            mu2,
            dt,
            t_end,
            stride,
            layout,
            initial: packed,
        })
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Observer sub-states (Sᵢ, ηᵢ) extracted from the flat state.
    pub fn observer_states(&self, x: &DVector<f64>) -> Vec<ObserverState> {
        self.layout
            .slots
            .iter()
            .map(|s| ObserverState {
                s: Matrix2::from_column_slice(&x.as_slice()[s.s_mat()]),
                eta: Vector2::new(x[s.eta().start], x[s.eta().start + 1]),
            })
            .collect()
    }

    /// Everything one agent contributes at one instant.
    pub fn eval_agent(
        &self,
        t: f64,
        x: &DVector<f64>,
        i: usize,
        obs: &ObserverState,
        obs_dot: &ObserverState,
    ) -> Result<AgentEval> {
        let slots = &self.layout.slots[i];
        let setup = &self.agents[i];
        let xs = x.as_slice();
        let q = Vector2::new(xs[slots.q().start], xs[slots.q().start + 1]);
        let qdot = Vector2::new(xs[slots.qdot().start], xs[slots.qdot().start + 1]);
        let xi = DVector::from_column_slice(&xs[slots.xi()]);
        let zeta = DMatrix::from_column_slice(setup.comp.dim, 5, &xs[slots.zeta()]);
        let omega_hat = DVector::from_column_slice(&xs[slots.omega()]);

        let refs = controller::reference_signals(
            &q,
            &qdot,
            &obs.s,
            &obs.eta,
            &obs_dot.s,
            &obs_dot.eta,
            self.gains.alpha,
        );
        let control = controller::agent_control(
            &self.gains,
            &setup.comp,
            setup.params.gravity(),
            &q,
            &qdot,
            &refs,
            &xi,
            &zeta,
            &omega_hat,
        )?;
        let disturbance = Vector2::new(
            setup.comp.channels[0].channel.eval(t),
            setup.comp.channels[1].channel.eval(t),
        );
        let (_, qddot) = plant::plant_rhs(
            &setup.params,
            &PlantState { q, qdot },
            &control.tau,
            &disturbance,
        )?;
        Ok(AgentEval {
            q,
            qdot,
            qddot,
            refs,
            control,
            disturbance,
        })
    }

    /// Evaluate every agent at one instant (observer coupling included).
    pub fn eval_fleet(&self, t: f64, x: &DVector<f64>) -> Result<Vec<AgentEval>> {
        let obs = self.observer_states(x);
        let obs_dots = observer::observer_rhs(&self.graph, &obs, self.mu1, self.mu2)?;
        (0..self.agents.len())
            .map(|i| self.eval_agent(t, x, i, &obs[i], &obs_dots[i]))
            .collect()
    }
}

/// Instantaneous evaluation of one agent's closed loop: kinematic state,
/// reference signals, control output, and the resulting acceleration.
#[derive(Debug, Clone)]
pub struct AgentEval {
    pub q: Vector2<f64>,
    pub qdot: Vector2<f64>,
    pub qddot: Vector2<f64>,
    pub refs: ReferenceSignals,
    pub control: ControlOutput,
    pub disturbance: Vector2<f64>,
}

fn pack_initial(layout: &StateLayout, initial: &[AgentInitial]) -> DVector<f64> {
    let mut x = DVector::zeros(layout.total);
    for (slots, init) in layout.slots.iter().zip(initial) {
        x.as_mut_slice()[slots.q()].copy_from_slice(init.q.as_slice());
        x.as_mut_slice()[slots.qdot()].copy_from_slice(init.qdot.as_slice());
        x.as_mut_slice()[slots.s_mat()].copy_from_slice(init.s.as_slice());
        x.as_mut_slice()[slots.eta()].copy_from_slice(init.eta.as_slice());
    }
    x
}

fn write_agent_derivs(chunk: &mut [f64], slots: &AgentSlots, eval: &AgentEval, obs_dot: &ObserverState) {
    let o = slots.offset;
    let shift = |r: Range<usize>| r.start - o..r.end - o;
    chunk[shift(slots.q())].copy_from_slice(eval.qdot.as_slice());
    chunk[shift(slots.qdot())].copy_from_slice(eval.qddot.as_slice());
    chunk[shift(slots.s_mat())].copy_from_slice(obs_dot.s.as_slice());
    chunk[shift(slots.eta())].copy_from_slice(obs_dot.eta.as_slice());
    chunk[shift(slots.xi())].copy_from_slice(eval.control.xi_dot.as_slice());
    chunk[shift(slots.zeta())].copy_from_slice(eval.control.zeta_dot.as_slice());
    chunk[shift(slots.omega())].copy_from_slice(eval.control.omega_hat_dot.as_slice());
}

impl OdeSystem for SimModel {
    fn dim(&self) -> usize {
        self.layout.total
    }

    fn rhs(&self, t: f64, x: &DVector<f64>, dxdt: &mut DVector<f64>) -> Result<()> {
        let obs = self.observer_states(x);
        let obs_dots = observer::observer_rhs(&self.graph, &obs, self.mu1, self.mu2)?;

        // Disjoint per-agent output slices; agents are independent given
        // the observer coupling, so this parallelizes without any shared
        // accumulation (and therefore without any scheduling-dependent
        // floating-point reassociation).
        let mut chunks = Vec::with_capacity(self.layout.slots.len());
        let mut rest = dxdt.as_mut_slice();
        for (i, slots) in self.layout.slots.iter().enumerate() {
            let (head, tail) = rest.split_at_mut(slots.width());
            chunks.push((i, head));
            rest = tail;
        }
        chunks.into_par_iter().try_for_each(|(i, chunk)| {
            let eval = self.eval_agent(t, x, i, &obs[i], &obs_dots[i])?;
            write_agent_derivs(chunk, &self.layout.slots[i], &eval, &obs_dots[i]);
            Ok(())
        })
    }
}

// ---------------------------------------------------------------------------
// Run loop
// ---------------------------------------------------------------------------

/// Options for one simulation run.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` follows `LAGRANGE_SWARM_THREADS` or the rayon
    /// default.
    pub threads: Option<usize>,
    /// Record the raw flat state every this many steps (`None`: don't).
    pub state_stride: Option<usize>,
}

/// One emitted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub t: f64,
    pub q: Vec<Vector2<f64>>,
    pub qdot: Vec<Vector2<f64>>,
    pub eta: Vec<Vector2<f64>>,
    pub tau: Vec<Vector2<f64>>,
    /// ‖qᵢ − ηᵢ‖ per agent.
    pub e_norm: Vec<f64>,
    /// ‖q̇ᵢ − η̇ᵢ‖ per agent.
    pub edot_norm: Vec<f64>,
    /// ‖sᵢ‖ per agent.
    pub s_norm: Vec<f64>,
    /// max over pairs of ‖Sᵢ − Sⱼ‖_F.
    pub s_disagree: f64,
    /// max over pairs of ‖ηᵢ − ηⱼ‖.
    pub eta_disagree: f64,
}

/// Result of a run.  `completed` is false when the integrator aborted; the
/// records (and states, if requested) then cover the prefix before the
/// failure and `abort` carries the reason.
#[derive(Debug)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    pub states: Option<Vec<(f64, DVector<f64>)>>,
    pub completed: bool,
    pub abort: Option<Error>,
}

fn resolve_threads(opts: &RunOptions) -> Option<usize> {
    opts.threads.or_else(|| {
        std::env::var("LAGRANGE_SWARM_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

/// Integrate the model over its full horizon.
pub fn run(model: &SimModel, opts: &RunOptions) -> RunOutput {
    match resolve_threads(opts) {
        Some(threads) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(p) => p,
                Err(e) => {
                    return RunOutput {
                        records: Vec::new(),
                        states: None,
                        completed: false,
                        abort: Some(Error::InvalidParameters {
                            message: format!("cannot build {threads}-thread pool: {e}"),
                        }),
                    }
                }
            };
            pool.install(|| run_inner(model, opts))
        }
        None => run_inner(model, opts),
    }
}

fn run_inner(model: &SimModel, opts: &RunOptions) -> RunOutput {
    let n_steps = model.steps();
    let mut x = model.initial.clone();
    let mut records = Vec::with_capacity(n_steps / model.stride + 2);
    let mut states = opts.state_stride.map(|s| Vec::with_capacity(n_steps / s + 2));
    let mut abort = None;

    let emit = |t: f64, x: &DVector<f64>, records: &mut Vec<RunRecord>| -> Result<()> {
        records.push(sample(model, t, x)?);
        Ok(())
    };

    if let Err(e) = emit(0.0, &x, &mut records) {
        return RunOutput {
            records,
            states,
            completed: false,
            abort: Some(relabel(e, &model.layout)),
        };
    }
    if let Some(ref mut st) = states {
        st.push((0.0, x.clone()));
    }

    for k in 0..n_steps {
        let t = k as f64 * model.dt;
        match rk4_step(model, t, &x, model.dt) {
            Ok(next) => x = next,
            Err(e) => {
                abort = Some(relabel(e, &model.layout));
                break;
            }
        }
        let k1 = k + 1;
        let t1 = k1 as f64 * model.dt;
        if k1 % model.stride == 0 || k1 == n_steps {
            if let Err(e) = emit(t1, &x, &mut records) {
                abort = Some(relabel(e, &model.layout));
                break;
            }
        }
        if let Some(ref mut st) = states {
            let ss = opts.state_stride.unwrap();
            if k1 % ss == 0 || k1 == n_steps {
                st.push((t1, x.clone()));
            }
        }
    }

    RunOutput {
        completed: abort.is_none(),
        records,
        states,
        abort,
    }
}

fn relabel(e: Error, layout: &StateLayout) -> Error {
    match e {
        Error::NonFiniteState { t, index, .. } => Error::NonFiniteState {
            t,
            index,
            label: layout.label(index),
        },
        other => other,
    }
}

fn sample(model: &SimModel, t: f64, x: &DVector<f64>) -> Result<RunRecord> {
    let n = model.agents.len();
    let obs = model.observer_states(x);
    let obs_dots = observer::observer_rhs(&model.graph, &obs, model.mu1, model.mu2)?;
    let mut rec = RunRecord {
        t,
        q: Vec::with_capacity(n),
        qdot: Vec::with_capacity(n),
        eta: Vec::with_capacity(n),
        tau: Vec::with_capacity(n),
        e_norm: Vec::with_capacity(n),
        edot_norm: Vec::with_capacity(n),
        s_norm: Vec::with_capacity(n),
        s_disagree: 0.0,
        eta_disagree: 0.0,
    };
    for i in 0..n {
        let eval = model.eval_agent(t, x, i, &obs[i], &obs_dots[i])?;
        rec.q.push(eval.q);
        rec.qdot.push(eval.qdot);
        rec.eta.push(obs[i].eta);
        rec.tau.push(eval.control.tau);
        rec.e_norm.push((eval.q - obs[i].eta).norm());
        rec.edot_norm.push((eval.qdot - obs_dots[i].eta).norm());
        rec.s_norm.push(eval.refs.s.norm());
    }
    for i in 0..n {
        for j in i + 1..n {
            rec.s_disagree = rec.s_disagree.max((obs[i].s - obs[j].s).norm());
            rec.eta_disagree = rec.eta_disagree.max((obs[i].eta - obs[j].eta).norm());
        }
    }
    Ok(rec)
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

/// Write records as CSV.  Values are printed with `{:.16e}` so equal f64
/// bit patterns produce equal bytes; determinism checks compare the whole
/// file verbatim.
pub fn write_csv<W: std::io::Write>(out: &mut W, records: &[RunRecord]) -> Result<()> {
    let n = records.first().map_or(0, |r| r.q.len());
    let mut header = String::from("t");
    let field = |name: &str, i: usize, k: usize| format!(",{name}[{}][{}]", i + 1, k + 1);
    let scalar = |name: &str, i: usize| format!(",{name}[{}]", i + 1);
    for i in 0..n {
        header += &field("q", i, 0);
        header += &field("q", i, 1);
    }
    for i in 0..n {
        header += &field("qd", i, 0);
        header += &field("qd", i, 1);
    }
    for i in 0..n {
        header += &field("eta", i, 0);
        header += &field("eta", i, 1);
    }
    for i in 0..n {
        header += &scalar("e_norm", i);
    }
    for i in 0..n {
        header += &scalar("edot_norm", i);
    }
    for i in 0..n {
        header += &scalar("s_norm", i);
    }
    for i in 0..n {
        header += &field("tau", i, 0);
        header += &field("tau", i, 1);
    }
    header += ",S_disagree,eta_disagree\n";
    out.write_all(header.as_bytes())?;

    let mut line = String::new();
    for r in records {
        line.clear();
        line += &format!("{:.16e}", r.t);
        for v in &r.q {
            line += &format!(",{:.16e},{:.16e}", v[0], v[1]);
        }
        for v in &r.qdot {
            line += &format!(",{:.16e},{:.16e}", v[0], v[1]);
        }
        for v in &r.eta {
            line += &format!(",{:.16e},{:.16e}", v[0], v[1]);
        }
        for v in &r.e_norm {
            line += &format!(",{v:.16e}");
        }
        for v in &r.edot_norm {
            line += &format!(",{v:.16e}");
        }
        for v in &r.s_norm {
            line += &format!(",{v:.16e}");
        }
        for v in &r.tau {
            line += &format!(",{:.16e},{:.16e}", v[0], v[1]);
        }
        line += &format!(",{:.16e},{:.16e}\n", r.s_disagree, r.eta_disagree);
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Render the run as a string (convenient for determinism comparisons).
pub fn csv_string(records: &[RunRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// Emit a gnuplot script that plots consensus errors and observer
/// disagreement from `csv_name` (written next to the script).
pub fn write_gnuplot<W: std::io::Write>(out: &mut W, csv_name: &str, agents: usize) -> Result<()> {
    let n = agents;
    writeln!(out, "set datafile separator ','")?;
    writeln!(out, "set terminal pngcairo size 1280,480")?;
    writeln!(out, "set key outside")?;
    writeln!(out, "set logscale y")?;
    writeln!(out, "set xlabel 't [s]'")?;
    writeln!(out, "set output 'consensus_error.png'")?;
    writeln!(out, "set ylabel '|q_i - eta_i|'")?;
    let series: Vec<String> = (0..n)
        .map(|i| {
            format!(
                "'{csv_name}' using 1:{} with lines title 'agent {}'",
                1 + 6 * n + i + 1,
                i + 1
            )
        })
        .collect();
    writeln!(out, "plot {}", series.join(", \\\n     "))?;
    writeln!(out, "set output 'observer_disagreement.png'")?;
    writeln!(out, "set ylabel 'disagreement'")?;
    writeln!(
        out,
        "plot '{csv_name}' using 1:{} with lines title 'S', \\",
        1 + 11 * n + 1
    )?;
    writeln!(
        out,
        "     '{csv_name}' using 1:{} with lines title 'eta'",
        1 + 11 * n + 2
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Summary metrics
// ---------------------------------------------------------------------------

/// Deterministic run digest (no wall-clock times, no hostnames — the same
/// run always summarizes to the same JSON).
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub agents: usize,
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
    pub completed: bool,
    pub abort: Option<String>,
    /// First sample time after which every agent keeps ‖q−η‖ and ‖q̇−η̇‖
    /// below 1e-2.
    pub consensus_settling_time: Option<f64>,
    /// First sample time after which all pairwise ‖qᵢ−qⱼ‖ and ‖q̇ᵢ−q̇ⱼ‖
    /// stay below 2e-2.
    pub pairwise_settling_time: Option<f64>,
    pub final_max_e: f64,
    pub final_max_edot: f64,
    pub final_max_pairwise_q: f64,
    pub final_max_pairwise_qdot: f64,
    pub final_s_disagreement: f64,
    pub final_eta_disagreement: f64,
    pub max_torque: f64,
    /// (t, S disagreement, η disagreement), at most 201 points.
    pub disagreement_curve: Vec<(f64, f64, f64)>,
    pub k_min_eigenvalue: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub mu1: f64,
    pub mu2: f64,
}

fn pairwise_max(vs: &[Vector2<f64>]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            m = m.max((vs[i] - vs[j]).norm());
        }
    }
    m
}

/// Summarize a finished (or aborted) run.
pub fn summarize(model: &SimModel, output: &RunOutput) -> RunSummary {
    let recs = &output.records;
    let consensus_ok = |r: &RunRecord| {
        r.e_norm.iter().all(|&e| e <= SETTLE_E) && r.edot_norm.iter().all(|&e| e <= SETTLE_E)
    };
    let pairwise_ok =
        |r: &RunRecord| pairwise_max(&r.q) <= SETTLE_PAIR && pairwise_max(&r.qdot) <= SETTLE_PAIR;
    let settle = |ok: &dyn Fn(&RunRecord) -> bool| -> Option<f64> {
        if !output.completed {
            return None;
        }
        let mut first = None;
        for r in recs {
            if ok(r) {
                first.get_or_insert(r.t);
            } else {
                first = None;
            }
        }
        first
    };
    let last = recs.last();
    let max_torque = recs
        .iter()
        .flat_map(|r| r.tau.iter())
        .map(|t| t.abs().max())
        .fold(0.0, f64::max);
    let curve_step = recs.len().div_ceil(CURVE_POINTS).max(1);
    let mut curve: Vec<(f64, f64, f64)> = recs
        .iter()
        .step_by(curve_step)
        .map(|r| (r.t, r.s_disagree, r.eta_disagree))
        .collect();
    if let Some(r) = last {
        if curve.last().map(|c| c.0) != Some(r.t) {
            curve.push((r.t, r.s_disagree, r.eta_disagree));
        }
    }
    RunSummary {
        agents: model.agents.len(),
        dt: model.dt,
        t_end: model.t_end,
        stride: model.stride,
        completed: output.completed,
        abort: output.abort.as_ref().map(|e| e.to_string()),
        consensus_settling_time: settle(&consensus_ok),
        pairwise_settling_time: settle(&pairwise_ok),
        final_max_e: last.map_or(f64::NAN, |r| r.e_norm.iter().copied().fold(0.0, f64::max)),
        final_max_edot: last.map_or(f64::NAN, |r| r.edot_norm.iter().copied().fold(0.0, f64::max)),
        final_max_pairwise_q: last.map_or(f64::NAN, |r| pairwise_max(&r.q)),
        final_max_pairwise_qdot: last.map_or(f64::NAN, |r| pairwise_max(&r.qdot)),
        final_s_disagreement: last.map_or(f64::NAN, |r| r.s_disagree),
        final_eta_disagreement: last.map_or(f64::NAN, |r| r.eta_disagree),
        max_torque,
        disagreement_curve: curve,
        k_min_eigenvalue: model.gains.min_k_eigenvalue(),
        lambda: model.gains.lambda,
        alpha: model.gains.alpha,
        mu1: model.mu1,
        mu2: model.mu2,
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
