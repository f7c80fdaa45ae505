//! Scenario files: schema, validation, overrides, and compilation.
//!
//! A scenario is one JSON document describing a fleet end to end: the
//! communication digraph, per-agent arm parameters and disturbance models,
//! shared gains, the integration grid, and output options.  Parsing is
//! strict — unknown keys are rejected so typos fail loudly — and
//! [`compile`] performs every structural check eagerly (spanning tree,
//! admissible inertia, compensator synthesis, gain bounds) so a run either
//! refuses to start or runs with a fully validated model.
//!
//! Vertices in `graph.edges` are numbered from 1 in file format; the
//! in-memory graph is zero-based.  `S` matrices are written row-major.
//! Dotted-path overrides (`gains.mu1`, `agents.0.theta.2`, …) edit the raw
//! JSON value before deserialization, which keeps the strict schema checks
//! in force for overridden documents too.

use std::path::Path;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::Deserialize;

use crate::controller::Gains;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, LaplacianAnalysis};
use crate::internal_model::{
    assemble_agent, assemble_agent_explicit, synthesize_channel, AgentCompensatorData,
    DisturbanceChannel, DisturbanceTerm,
};
use crate::observer::{check_gains, consensus_generator, GainReport};
use crate::plant::ArmParameters;
use crate::sim::{AgentInitial, AgentSetup, SimModel};

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub graph: GraphSpec,
    pub agents: Vec<AgentSpec>,
    pub gains: GainsSpec,
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    /// `[from, to, weight]` triples, vertices numbered from 1.
    pub edges: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    /// Arm parameters Θ = (a₁, …, a₅).
    pub theta: [f64; 5],
    #[serde(default = "default_gravity")]
    pub gravity: f64,
    /// Exactly one disturbance channel per joint (two entries).
    pub disturbance: Vec<ChannelSpec>,
    /// Explicit frequency-parameterization blocks (2×n_i each, row-major),
    /// required iff some channel has more than one sinusoid.  Must come
    /// with `rho`.
    #[serde(default)]
    pub e_blocks: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    pub rho: Option<Vec<f64>>,
    pub initial: InitialSpec,
}

fn default_gravity() -> f64 {
    9.81
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(default)]
    pub bias: f64,
    #[serde(default)]
    pub terms: Vec<TermSpec>,
    /// Optional feedback-matrix override (row-major, Hurwitz).
    #[serde(rename = "M", default)]
    pub m: Option<Vec<Vec<f64>>>,
    /// Optional input-vector override (must make (M, N) controllable).
    #[serde(rename = "N", default)]
    pub n: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub q: [f64; 2],
    pub qdot: [f64; 2],
    /// Initial generator copy, row-major.
    #[serde(rename = "S")]
    pub s: [[f64; 2]; 2],
    pub eta: [f64; 2],
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSpec {
    pub mu1: f64,
    pub mu2: f64,
    pub alpha: f64,
    /// Either a scalar (K = k·I) or a full symmetric 2×2 matrix, row-major.
    #[serde(rename = "K")]
    pub k: KSpec,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    Scalar(f64),
    Matrix([[f64; 2]; 2]),
}

impl KSpec {
    pub fn matrix(&self) -> Matrix2<f64> {
        match *self {
            KSpec::Scalar(k) => Matrix2::identity() * k,
            KSpec::Matrix(m) => Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub dt: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_stride() -> usize {
    1
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { stride: 1 }
    }
}

// ---------------------------------------------------------------------------
// Loading and overrides
// ---------------------------------------------------------------------------

fn parse_error(e: &serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Read a scenario file into a raw JSON value (overrides apply here).
pub fn load_value(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(&e))
}

/// Deserialize a raw JSON value into the strict schema.
pub fn scenario_from_value(value: serde_json::Value) -> Result<ScenarioFile> {
    serde_json::from_value(value).map_err(|e| parse_error(&e))
}

/// Parse a scenario from JSON text.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    serde_json::from_str(text).map_err(|e| parse_error(&e))
}

/// Load and parse a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioFile> {
    scenario_from_value(load_value(path)?)
}

/// Apply one dotted-path override, e.g. `("gains.mu1", "2.5")` or
/// `("agents.0.theta.2", "0.1")`.  Path segments index objects by key and
/// arrays by zero-based position; the value must be valid JSON.  Missing
/// intermediate objects are created, so `outputs.stride` works even when
/// the file omits `outputs` entirely.
pub fn apply_override(value: &mut serde_json::Value, path: &str, raw: &str) -> Result<()> {
    let parsed: serde_json::Value = serde_json::from_str(raw).map_err(|e| Error::Validation {
        field: path.to_string(),
        message: format!("override value {raw:?} is not valid JSON: {e}"),
    })?;
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(Error::Validation {
            field: path.to_string(),
            message: "override path has an empty segment".into(),
        });
    }
    let mut cursor = value;
    for (si, seg) in segments.iter().enumerate() {
        let last = si + 1 == segments.len();
        match cursor {
            serde_json::Value::Object(map) => {
                if last {
                    map.insert(seg.to_string(), parsed);
                    return Ok(());
                }
                cursor = map
                    .entry(seg.to_string())
                    .or_insert_with(|| serde_json::Value::Object(serde_json::Map::new()));
            }
            serde_json::Value::Array(arr) => {
                let idx: usize = seg.parse().map_err(|_| Error::Validation {
                    field: path.to_string(),
                    message: format!("segment {seg:?} must be an array index"),
                })?;
                if idx >= arr.len() {
                    return Err(Error::Validation {
                        field: path.to_string(),
                        message: format!("index {idx} out of bounds (array length {})", arr.len()),
                    });
                }
                if last {
                    arr[idx] = parsed;
                    return Ok(());
                }
                cursor = &mut arr[idx];
            }
            other => {
                return Err(Error::Validation {
                    field: path.to_string(),
                    message: format!("cannot descend into {} at segment {seg:?}", kind_name(other)),
                })
            }
        }
    }
    unreachable!("loop returns on the last segment");
}

fn kind_name(v: &serde_json::Value) -> &'static str {
    match v {
        serde_json::Value::Null => "null",
        serde_json::Value::Bool(_) => "a boolean",
        serde_json::Value::Number(_) => "a number",
        serde_json::Value::String(_) => "a string",
        serde_json::Value::Array(_) => "an array",
        serde_json::Value::Object(_) => "an object",
    }
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

/// Structural analysis computed once per scenario.
#[derive(Debug, Clone)]
pub struct ScenarioAnalysis {
    pub laplacian: LaplacianAnalysis,
    pub s_star: Matrix2<f64>,
    /// Eigenvalues of S* as (re, im) pairs.
    pub s_star_eigenvalues: Vec<(f64, f64)>,
    pub gain_report: GainReport,
    /// Non-fatal findings (e.g. gains outside the sufficient bounds).
    pub warnings: Vec<String>,
}

/// A validated, ready-to-run scenario.
#[derive(Debug, Clone)]
pub struct CompiledScenario {
    pub file: ScenarioFile,
    pub model: SimModel,
    pub analysis: ScenarioAnalysis,
}

/// Build the digraph from 1-based edge triples.
pub fn build_graph(file: &ScenarioFile) -> Result<DirectedGraph> {
    let n = file.agents.len();
    if n == 0 {
        return Err(Error::Validation {
            field: "agents".into(),
            message: "a scenario needs at least one agent".into(),
        });
    }
    let mut edges = Vec::with_capacity(file.graph.edges.len());
    for (k, &(from, to, w)) in file.graph.edges.iter().enumerate() {
        if from == 0 || to == 0 {
            return Err(Error::Validation {
                field: format!("graph.edges[{k}]"),
                message: "vertices are numbered from 1".into(),
            });
        }
        edges.push((from - 1, to - 1, w));
    }
    DirectedGraph::from_edges(n, &edges)
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Validation {
            field: what.to_string(),
            message: "rows have unequal lengths".into(),
        });
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(r, c, &flat))
}

/// Synthesize one agent's compensator data from its spec.
pub fn build_agent_comp(spec: &AgentSpec, agent_index: usize) -> Result<AgentCompensatorData> {
    if spec.disturbance.len() != 2 {
        return Err(Error::Validation {
            field: format!("agents[{agent_index}].disturbance"),
            message: format!(
                "expected one channel per joint (2 entries), got {}",
                spec.disturbance.len()
            ),
        });
    }
    let mut channels = Vec::with_capacity(2);
    for (k, ch) in spec.disturbance.iter().enumerate() {
        let terms = ch
            .terms
            .iter()
            .map(|t| DisturbanceTerm {
                amplitude: t.amplitude,
                frequency: t.frequency,
                phase: t.phase,
            })
            .collect();
        let channel = DisturbanceChannel::new(ch.bias, terms)?;
        let feedback = match (&ch.m, &ch.n) {
            (None, None) => None,
            (Some(m), Some(n)) => Some((
                matrix_from_rows(m, &format!("agents[{agent_index}].disturbance[{k}].M"))?,
                DVector::from_column_slice(n),
            )),
            _ => {
                return Err(Error::Validation {
                    field: format!("agents[{agent_index}].disturbance[{k}]"),
                    message: "M and N overrides must be given together".into(),
                })
            }
        };
        channels.push(synthesize_channel(&channel, feedback)?);
    }
    match (&spec.e_blocks, &spec.rho) {
        (None, None) => assemble_agent(channels),
        (Some(blocks), Some(rho)) => {
            let dim: usize = channels.iter().map(|c| c.order).sum();
            let mut e_blocks = Vec::with_capacity(blocks.len());
            for (j, b) in blocks.iter().enumerate() {
                let m = matrix_from_rows(b, &format!("agents[{agent_index}].e_blocks[{j}]"))?;
                if m.shape() != (2, dim) {
                    return Err(Error::Validation {
                        field: format!("agents[{agent_index}].e_blocks[{j}]"),
                        message: format!("expected a 2x{dim} block, got {}x{}", m.nrows(), m.ncols()),
                    });
                }
                e_blocks.push(m);
            }
            assemble_agent_explicit(channels, e_blocks, DVector::from_column_slice(rho))
        }
        _ => Err(Error::Validation {
            field: format!("agents[{agent_index}]"),
            message: "e_blocks and rho must be given together".into(),
        }),
    }
}

fn build_initial(spec: &InitialSpec) -> AgentInitial {
    AgentInitial {
        q: Vector2::new(spec.q[0], spec.q[1]),
        qdot: Vector2::new(spec.qdot[0], spec.qdot[1]),
        s: Matrix2::new(spec.s[0][0], spec.s[0][1], spec.s[1][0], spec.s[1][1]),
        eta: Vector2::new(spec.eta[0], spec.eta[1]),
    }
}

/// Validate everything and build the runnable model plus its analysis.
pub fn compile(file: ScenarioFile) -> Result<CompiledScenario> {
    let graph = build_graph(&file)?;
    let laplacian = graph.analyze()?;

    let mut setups = Vec::with_capacity(file.agents.len());
    let mut initials = Vec::with_capacity(file.agents.len());
    for (i, spec) in file.agents.iter().enumerate() {
        let params = ArmParameters::new(spec.theta, spec.gravity)?;
        let comp = build_agent_comp(spec, i)?;
        setups.push(AgentSetup { params, comp });
        initials.push(build_initial(&spec.initial));
    }

    let gains = Gains::new(file.gains.k.matrix(), file.gains.lambda, file.gains.alpha)?;
    let s_star = consensus_generator(
        &initials.iter().map(|i| i.s).collect::<Vec<_>>(),
        &laplacian.left_null,
    )?;
    let gain_report = check_gains(
        file.gains.mu1,
        file.gains.mu2,
        laplacian.norm,
        laplacian.lambda1,
        &s_star,
    )?;
    let mut warnings = Vec::new();
    if !gain_report.mu2_ok {
        warnings.push(format!(
            "mu2 = {} does not exceed the sufficient bound |S*|/lambda1 = {:.6}; \
             consensus is not guaranteed by the theory (it may still occur)",
            file.gains.mu2, gain_report.mu2_min
        ));
    }
    if !gain_report.mu1_ok {
        warnings.push(format!(
            "mu1 = {} is below the sufficient bound 2(mu2*|L| + |S*|)/lambda1 = {:.6}",
            file.gains.mu1, gain_report.mu1_min
        ));
    }
    let s_star_eigenvalues = DMatrix::from_iterator(2, 2, s_star.iter().copied())
        .complex_eigenvalues()
        .iter()
        .map(|c| (c.re, c.im))
        .collect();

    let model = SimModel::new(
        graph,
        setups,
        &initials,
        gains,
        file.gains.mu1,
        file.gains.mu2,
        file.integrator.dt,
        file.integrator.t_end,
        file.outputs.stride,
    )?;
    Ok(CompiledScenario {
        file,
        model,
        analysis: ScenarioAnalysis {
            laplacian,
            s_star,
            s_star_eigenvalues,
            gain_report,
            warnings,
        },
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
