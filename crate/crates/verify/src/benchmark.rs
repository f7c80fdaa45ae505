//! The five-arm benchmark fleet every verification suite runs against.
//!
//! Five heterogeneous two-link arms on a directed graph with a spanning
//! tree, each joint driven by one sinusoidal disturbance (0.1 rad/s on
//! joint 1, 0.2 rad/s on joint 2) with mixed-sign amplitudes, plus
//! nontrivial initial observer data.  The same fleet ships as
//! `scenarios/scenario_paper_sec5.json`; a test pins the two encodings
//! against each other.  The suites rebuild it here so that `verify` needs
//! no input files.

use lagrange_swarm::controller::Gains;
use lagrange_swarm::graph::DirectedGraph;
use lagrange_swarm::internal_model::{
    assemble_agent, synthesize_channel, AgentCompensatorData, DisturbanceChannel, DisturbanceTerm,
};
use lagrange_swarm::plant::ArmParameters;
use lagrange_swarm::sim::{AgentInitial, AgentSetup, SimModel};
use nalgebra::{DVector, Matrix2, Vector2};

/// Arm parameter vectors Θᵢ = (a₁..a₅), one row per agent.
pub const THETA: [[f64; 5]; 5] = [
    [0.64, 1.10, 0.08, 0.64, 0.32],
    [0.76, 1.17, 0.14, 0.93, 0.44],
    [0.91, 1.26, 0.22, 1.27, 0.58],
    [1.10, 1.36, 0.32, 1.67, 0.73],
    [1.21, 1.16, 0.12, 1.45, 1.03],
];

/// Disturbance amplitudes (joint 1, joint 2) per agent.
pub const AMPLITUDES: [[f64; 2]; 5] =
    [[6.0, 8.0], [-1.0, -2.0], [-2.0, -5.0], [3.0, 5.0], [-3.0, -2.5]];

/// Disturbance frequencies (joint 1, joint 2), shared across the fleet.
pub const FREQUENCIES: [f64; 2] = [0.1, 0.2];

pub const GRAVITY: f64 = 9.81;
pub const MU1: f64 = 2.0;
pub const MU2: f64 = 2.0;

/// Communication digraph: an edge (i, j) lets agent i read agent j.
pub fn graph() -> DirectedGraph {
    DirectedGraph::from_edges(
        5,
        &[
            (0, 1, 1.0),
            (0, 3, 1.0),
            (1, 2, 1.0),
            (4, 2, 1.0),
            (3, 4, 1.0),
            (4, 0, 1.0),
        ],
    )
    .expect("benchmark graph is well formed")
}

/// Controller gains: K = 40·I, λ = 0.15, α = 6.
pub fn gains() -> Gains {
    Gains::new(Matrix2::identity() * 40.0, 0.15, 6.0).expect("benchmark gains are valid")
}

/// One bias-free single-sinusoid channel ψ·sin(σt).
pub fn channel(amplitude: f64, frequency: f64) -> DisturbanceChannel {
    DisturbanceChannel::new(
        0.0,
        vec![DisturbanceTerm {
            amplitude,
            frequency,
            phase: 0.0,
        }],
    )
    .expect("benchmark channel is valid")
}

/// Synthesized compensator data of agent `i` (zero-based).
pub fn agent_comp(i: usize) -> AgentCompensatorData {
    let chans = (0..2)
        .map(|k| {
            synthesize_channel(&channel(AMPLITUDES[i][k], FREQUENCIES[k]), None)
                .expect("benchmark channel synthesizes")
        })
        .collect();
    assemble_agent(chans).expect("benchmark agent assembles")
}

/// All five agents (arm parameters + compensator data).
pub fn setups() -> Vec<AgentSetup> {
    THETA
        .iter()
        .enumerate()
        .map(|(i, theta)| AgentSetup {
            params: ArmParameters::new(*theta, GRAVITY).expect("benchmark arm is valid"),
            comp: agent_comp(i),
        })
        .collect()
}

/// Observer generator seeds Sᵢ(0).
pub fn initial_generators() -> [Matrix2<f64>; 5] {
    [
        Matrix2::new(0.0, 3.0, -6.0, 0.0),
        Matrix2::new(0.0, -2.0, 1.0, 0.0),
        Matrix2::new(0.0, -2.0, -3.0, 0.0),
        Matrix2::new(0.0, -2.0, -3.0, 0.0),
        Matrix2::new(0.0, 2.0, -3.0, 0.0),
    ]
}

/// Initial conditions: arms at rest at the origin, observers seeded.
pub fn initial() -> Vec<AgentInitial> {
    let gens = initial_generators();
    let etas = [[0.2, 0.5], [-0.6, 0.3], [-0.1, 0.4], [-0.6, 0.6], [0.9, 0.2]];
    gens.iter()
        .zip(etas.iter())
        .map(|(s, e)| AgentInitial {
            q: Vector2::zeros(),
            qdot: Vector2::zeros(),
            s: *s,
            eta: Vector2::new(e[0], e[1]),
        })
        .collect()
}

/// The emergent generator: the left-null-weighted mixture of the seeds,
/// (S₁(0) + S₄(0) + S₅(0))/3 = [[0, 1], [−4, 0]].
pub fn s_star() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -4.0, 0.0)
}

/// Left null vector of the benchmark Laplacian: u = (1/3, 0, 0, 1/3, 1/3).
pub fn left_null() -> DVector<f64> {
    DVector::from_vec(vec![1.0 / 3.0, 0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0])
}

/// The fully assembled fleet on a caller-chosen integration grid.
pub fn model(dt: f64, t_end: f64, stride: usize) -> SimModel {
    SimModel::new(
        graph(),
        setups(),
        &initial(),
        gains(),
        MU1,
        MU2,
        dt,
        t_end,
        stride,
    )
    .expect("benchmark model is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn the_fleet_assembles_with_the_documented_shape() {
        let m = model(1e-3, 0.0, 1);
        assert_eq!(m.layout.total, 255);
        assert_eq!(m.layout.slots.len(), 5);
        for s in &m.layout.slots {
            assert_eq!(s.width(), 51);
        }
    }

    #[test]
    fn the_seed_mixture_is_the_documented_generator() {
        let gens = initial_generators();
        let mix = (gens[0] + gens[3] + gens[4]) / 3.0;
        assert_relative_eq!(mix, s_star(), epsilon = 1e-15);
    }

    #[test]
    fn the_left_null_vector_annihilates_the_laplacian() {
        let l = graph().laplacian();
        let u = left_null();
        assert!((l.transpose() * u).norm() < 1e-12);
    }

    #[test]
    fn the_json_scenario_encodes_this_exact_fleet() {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../scenarios/scenario_paper_sec5.json");
        let file = lagrange_swarm::scenario::load_scenario(&path).unwrap();
        let compiled = lagrange_swarm::scenario::compile(file).unwrap();
        let here = model(compiled.model.dt, compiled.model.t_end, compiled.model.stride);

        assert_eq!(compiled.model.graph.weights(), here.graph.weights());
        assert_eq!(compiled.model.initial, here.initial);
        assert_eq!(compiled.model.gains.k, here.gains.k);
        assert_eq!(compiled.model.gains.lambda, here.gains.lambda);
        assert_eq!(compiled.model.gains.alpha, here.gains.alpha);
        assert_eq!(compiled.model.mu1, here.mu1);
        assert_eq!(compiled.model.mu2, here.mu2);
        assert_eq!(compiled.model.dt, 1e-3);
        assert_eq!(compiled.model.t_end, 100.0);
        assert_eq!(compiled.model.stride, 100);
        for (a, b) in compiled.model.agents.iter().zip(here.agents.iter()) {
            assert_eq!(a.params.theta(), b.params.theta());
            assert_eq!(a.params.gravity(), b.params.gravity());
            assert_eq!(a.comp.m, b.comp.m);
            assert_eq!(a.comp.n, b.comp.n);
            assert_eq!(a.comp.a, b.comp.a);
            assert_eq!(a.comp.b, b.comp.b);
            assert_eq!(a.comp.t_sigma, b.comp.t_sigma);
            assert_eq!(a.comp.e_blocks, b.comp.e_blocks);
            assert_eq!(a.comp.rho, b.comp.rho);
            assert_eq!(a.comp.channels.len(), b.comp.channels.len());
            for (ca, cb) in a.comp.channels.iter().zip(b.comp.channels.iter()) {
                assert_eq!(ca.channel, cb.channel);
            }
        }
    }
}
