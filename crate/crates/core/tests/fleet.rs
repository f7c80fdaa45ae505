//! End-to-end fleet behavior that spans several modules at once.

use lagrange_swarm::controller::Gains;
use lagrange_swarm::graph::DirectedGraph;
use lagrange_swarm::internal_model::{synthesize_channel, assemble_agent, DisturbanceChannel};
use lagrange_swarm::plant::ArmParameters;
use lagrange_swarm::scenario;
use lagrange_swarm::sim::{self, AgentInitial, AgentSetup, RunOptions, SimModel};
use nalgebra::{Matrix2, Vector2};

const FLEET_THETA: [[f64; 5]; 5] = [
    [0.64, 1.10, 0.08, 0.64, 0.32],
    [0.76, 1.17, 0.14, 0.93, 0.44],
    [0.91, 1.26, 0.22, 1.27, 0.58],
    [1.10, 1.36, 0.32, 1.67, 0.73],
    [1.21, 1.16, 0.12, 1.45, 1.03],
];

fn benchmark_graph() -> DirectedGraph {
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
    .unwrap()
}

fn undisturbed_model() -> SimModel {
    let agents: Vec<AgentSetup> = FLEET_THETA
        .iter()
        .map(|theta| AgentSetup {
            params: ArmParameters::new(*theta, 9.81).unwrap(),
            comp: assemble_agent(vec![
                synthesize_channel(&DisturbanceChannel::zero(), None).unwrap(),
                synthesize_channel(&DisturbanceChannel::zero(), None).unwrap(),
            ])
            .unwrap(),
        })
        .collect();
    let s_rows: [[f64; 4]; 5] = [
        [0.0, 3.0, -6.0, 0.0],
        [0.0, -2.0, 1.0, 0.0],
        [0.0, -2.0, -3.0, 0.0],
        [0.0, -2.0, -3.0, 0.0],
        [0.0, 2.0, -3.0, 0.0],
    ];
    let etas = [[0.2, 0.5], [-0.6, 0.3], [-0.1, 0.4], [-0.6, 0.6], [0.9, 0.2]];
    let initial: Vec<AgentInitial> = s_rows
        .iter()
        .zip(etas.iter())
        .map(|(s, e)| AgentInitial {
            q: Vector2::zeros(),
            qdot: Vector2::zeros(),
            s: Matrix2::new(s[0], s[1], s[2], s[3]),
            eta: Vector2::new(e[0], e[1]),
        })
        .collect();
    SimModel::new(
        benchmark_graph(),
        agents,
        &initial,
        Gains::new(Matrix2::identity() * 40.0, 0.15, 6.0).unwrap(),
        2.0,
        2.0,
        1e-3,
        5.0,
        10,
    )
    .unwrap()
}

fn integrated_squared_sliding(model: &SimModel) -> f64 {
    let out = sim::run(model, &RunOptions::default());
    assert!(out.completed);
    let dt_sample = model.dt * model.stride as f64;
    out.records
        .iter()
        .map(|r| r.s_norm.iter().map(|s| s * s).sum::<f64>() * dt_sample)
        .sum()
}

/// Preloading the true arm parameters into ω̂ must track strictly better
/// than adapting from zero, measured by ∫Σᵢ‖sᵢ‖² dt on an undisturbed
/// fleet.
#[test]
fn known_parameters_track_better_than_adaptation() {
    let adaptive = undisturbed_model();
    let mut informed = adaptive.clone();
    for (slots, theta) in informed.layout.slots.iter().zip(FLEET_THETA.iter()) {
        informed.initial.as_mut_slice()[slots.omega()].copy_from_slice(theta);
    }
    let cost_adaptive = integrated_squared_sliding(&adaptive);
    let cost_informed = integrated_squared_sliding(&informed);
    assert!(
        cost_informed < cost_adaptive,
        "informed {cost_informed} should beat adaptive {cost_adaptive}"
    );
}

/// The shipped benchmark scenario compiles and a short prefix of it runs
/// to completion with shrinking consensus errors.
#[test]
fn benchmark_scenario_short_prefix_converges() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios/scenario_paper_sec5.json");
    let mut value = scenario::load_value(&path).unwrap();
    scenario::apply_override(&mut value, "integrator.t_end", "8.0").unwrap();
    let compiled = scenario::compile(scenario::scenario_from_value(value).unwrap()).unwrap();
    let out = sim::run(&compiled.model, &RunOptions::default());
    assert!(out.completed);

    let first = out.records.first().unwrap();
    let last = out.records.last().unwrap();
    let max_e = |r: &sim::RunRecord| r.e_norm.iter().copied().fold(0.0f64, f64::max);
    assert!(
        max_e(last) < 0.1 * max_e(first).max(0.5),
        "consensus error did not shrink: start {}, end {}",
        max_e(first),
        max_e(last)
    );
    assert!(last.s_disagree < 1e-3, "generators still apart: {}", last.s_disagree);

    let summary = sim::summarize(&compiled.model, &out);
    assert!(summary.completed);
    assert!(summary.max_torque.is_finite());
}
