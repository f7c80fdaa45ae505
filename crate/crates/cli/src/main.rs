//! Command-line front end: run scenarios, check oracle suites, inspect
//! communication graphs, and synthesize internal models.
//!
//! Exit codes are a stable contract:
//!
//! * `0` — success
//! * `1` — usage or validation failure (bad flags, unreadable or invalid
//!   scenario, bad override)
//! * `2` — numerical failure (diverging integration, failing verification
//!   checks)
//! * `3` — structural failure (no spanning tree, non-Hurwitz feedback,
//!   uncontrollable pair, singular coupling, synthesis residual)

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use lagrange_swarm::internal_model::{
    assemble_agent, synthesize_channel, DisturbanceChannel, DisturbanceTerm,
};
use lagrange_swarm::scenario::{self, CompiledScenario};
use lagrange_swarm::sim::{self, RunOptions, RunOutput};
use lagrange_swarm::{Error, Result};
use lagrange_swarm_verify::suites;

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "lagrange-swarm",
    version,
    about = "Deterministic simulator for leaderless consensus of networked \
             two-link arms with adaptive disturbance rejection",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write trace.csv, summary.json, and plots.gp
    Run(RunArgs),
    /// Execute an oracle suite and print its pass/fail table
    Verify(VerifyArgs),
    /// Print communication-graph and observer diagnostics for a scenario
    AnalyzeGraph(AnalyzeGraphArgs),
    /// Synthesize the internal-model data for one disturbance channel
    SynthIm(SynthImArgs),
    /// Integrate a scenario and print a human-readable outcome report
    Report(ReportArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Path to the scenario JSON file
    scenario: PathBuf,
    /// Directory for trace.csv, summary.json, and plots.gp
    #[arg(short = 'o', long = "out-dir", default_value = "out")]
    out_dir: PathBuf,
    /// Dotted-path patch applied before validation (e.g. gains.alpha=6);
    /// repeatable
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads (default: LAGRANGE_SWARM_THREADS or all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Which oracle suite to run
    #[arg(value_enum, default_value_t = Suite::All)]
    suite: Suite,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Plant,
    Im,
    Observer,
    Controller,
}

#[derive(clap::Args)]
struct AnalyzeGraphArgs {
    /// Path to the scenario JSON file
    scenario: PathBuf,
}

#[derive(clap::Args)]
struct SynthImArgs {
    /// Sinusoid frequencies in rad/s (the amplitudes and phases do not
    /// affect the synthesis)
    #[arg(value_name = "FREQ", required_unless_present = "bias")]
    frequencies: Vec<f64>,
    /// Include a constant (bias) component
    #[arg(long)]
    bias: bool,
}

#[derive(clap::Args)]
struct ReportArgs {
    /// Path to the scenario JSON file
    scenario: PathBuf,
    /// Dotted-path patch applied before validation; repeatable
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads (default: LAGRANGE_SWARM_THREADS or all cores)
    #[arg(long)]
    threads: Option<usize>,
}

// ---------------------------------------------------------------------------
// Exit-code contract
// ---------------------------------------------------------------------------

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. }
        | Error::Validation { .. }
        | Error::InvalidParameters { .. }
        | Error::DimensionMismatch { .. }
        | Error::Io(_) => 1,
        Error::NonFiniteState { .. } | Error::SingularMass { .. } | Error::Overflow { .. } => 2,
        Error::NoSpanningTree
        | Error::SpectraOverlap { .. }
        | Error::NotHurwitz { .. }
        | Error::NotControllable
        | Error::SingularT { .. }
        | Error::SynthesisResidual { .. } => 3,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help/version requests land here too; they go to stdout and
            // exit 0, everything else is a usage error.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Verify(args) => Ok(cmd_verify(args.suite)),
        Command::AnalyzeGraph(args) => cmd_analyze_graph(&args.scenario),
        Command::SynthIm(args) => cmd_synth_im(&args),
        Command::Report(args) => cmd_report(&args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}

// ---------------------------------------------------------------------------
// Scenario plumbing shared by run / report / analyze-graph
// ---------------------------------------------------------------------------

/// Read a scenario file, apply overrides, and compile it.  I/O errors gain
/// the file path (the raw OS message does not carry it).
fn load_compiled(path: &Path, overrides: &[String]) -> Result<CompiledScenario> {
    let mut value = scenario::load_value(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    })?;
    for patch in overrides {
        let (key, raw) = patch.split_once('=').ok_or_else(|| Error::Validation {
            field: "--override".into(),
            message: format!("expected KEY=VALUE, got `{patch}`"),
        })?;
        scenario::apply_override(&mut value, key, raw)?;
    }
    scenario::compile(scenario::scenario_from_value(value)?)
}

fn integrate(compiled: &CompiledScenario, threads: Option<usize>) -> RunOutput {
    for warning in &compiled.analysis.warnings {
        eprintln!("warning: {warning}");
    }
    sim::run(
        &compiled.model,
        &RunOptions {
            threads,
            state_stride: None,
        },
    )
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

fn cmd_run(args: &RunArgs) -> Result<i32> {
    let compiled = load_compiled(&args.scenario, &args.overrides)?;
    let output = integrate(&compiled, args.threads);

    std::fs::create_dir_all(&args.out_dir)?;
    let trace_path = args.out_dir.join("trace.csv");
    let mut trace = BufWriter::new(File::create(&trace_path)?);
    sim::write_csv(&mut trace, &output.records)?;
    trace.flush()?;

    let summary = sim::summarize(&compiled.model, &output);
    let summary_file = File::create(args.out_dir.join("summary.json"))?;
    serde_json::to_writer_pretty(BufWriter::new(summary_file), &summary)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;

    let mut plots = BufWriter::new(File::create(args.out_dir.join("plots.gp"))?);
    sim::write_gnuplot(&mut plots, "trace.csv", compiled.model.agents.len())?;
    plots.flush()?;

    match output.abort {
        None => {
            println!(
                "completed {:.3} s ({} samples) -> {}",
                compiled.model.t_end,
                output.records.len(),
                args.out_dir.display()
            );
            Ok(0)
        }
        Some(err) => {
            eprintln!(
                "error: {err} (prefix of {} samples written to {})",
                output.records.len(),
                args.out_dir.display()
            );
            Ok(exit_code(&err))
        }
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(suite: Suite) -> i32 {
    let groups = match suite {
        Suite::All => suites::all_suites(),
        Suite::Plant => vec![("plant", suites::plant_suite())],
        Suite::Im => vec![("im", suites::im_suite())],
        Suite::Observer => vec![("observer", suites::observer_suite())],
        Suite::Controller => vec![("controller", suites::controller_suite())],
    };
    let mut all_ok = true;
    for (name, results) in &groups {
        println!("== {name} ==");
        print!("{}", suites::render(results));
        all_ok &= suites::all_passed(results);
    }
    if all_ok {
        println!("all checks passed");
        0
    } else {
        eprintln!("some checks FAILED");
        2
    }
}

// ---------------------------------------------------------------------------
// analyze-graph
// ---------------------------------------------------------------------------

fn render_matrix(rows: usize, cols: usize, entry: impl Fn(usize, usize) -> f64) -> String {
    (0..rows)
        .map(|i| {
            let cells: Vec<String> = (0..cols).map(|j| format!("{:>12.6}", entry(i, j))).collect();
            format!("  [{} ]", cells.join(" "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn cmd_analyze_graph(path: &Path) -> Result<i32> {
    // The spanning-tree verdict must print even when compilation would
    // refuse the scenario, so the graph is built and inspected first.
    let value = scenario::load_value(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    })?;
    let file = scenario::scenario_from_value(value)?;
    let graph = scenario::build_graph(&file)?;
    let connected = graph.has_spanning_tree();
    println!("agents: {}", graph.agent_count());
    println!(
        "directed spanning tree: {}",
        if connected { "yes" } else { "NO" }
    );
    if !connected {
        return Err(Error::NoSpanningTree);
    }

    let compiled = scenario::compile(file)?;
    let analysis = &compiled.analysis;
    let lap = &analysis.laplacian;
    let u: Vec<String> = lap.left_null.iter().map(|v| format!("{v:.6}")).collect();
    println!("left null vector u: [{}]", u.join(", "));
    println!("spectral gap λ₁: {:.6}", lap.lambda1);
    println!("‖𝓛‖: {:.6}", lap.norm);
    println!("emergent generator S*:");
    println!("{}", render_matrix(2, 2, |i, j| analysis.s_star[(i, j)]));
    let eigs: Vec<String> = analysis
        .s_star_eigenvalues
        .iter()
        .map(|(re, im)| format!("{re:.6} {} {:.6}i", if *im < 0.0 { "-" } else { "+" }, im.abs()))
        .collect();
    println!("S* eigenvalues: {}", eigs.join(", "));

    let report = &analysis.gain_report;
    println!(
        "observer gains: μ₁ = {} (bound {:.6}) {}; μ₂ = {} (bound {:.6}, strict) {}",
        compiled.model.mu1,
        report.mu1_min,
        if report.mu1_ok { "ok" } else { "BELOW BOUND" },
        compiled.model.mu2,
        report.mu2_min,
        if report.mu2_ok { "ok" } else { "BELOW BOUND" },
    );
    for warning in &analysis.warnings {
        println!("note: {warning}");
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// synth-im
// ---------------------------------------------------------------------------

fn cmd_synth_im(args: &SynthImArgs) -> Result<i32> {
    let terms: Vec<DisturbanceTerm> = args
        .frequencies
        .iter()
        .map(|&frequency| DisturbanceTerm {
            amplitude: 1.0,
            frequency,
            phase: 0.0,
        })
        .collect();
    let channel = DisturbanceChannel::new(if args.bias { 1.0 } else { 0.0 }, terms)?;
    let model = synthesize_channel(&channel, None)?;

    println!("channel order r: {}", model.order);
    println!("exosystem Φ (companion):");
    println!(
        "{}",
        render_matrix(model.order, model.order, |i, j| model.phi[(i, j)])
    );
    println!("surrogate M:");
    println!(
        "{}",
        render_matrix(model.order, model.order, |i, j| model.m[(i, j)])
    );
    let n: Vec<String> = model.n.iter().map(|v| format!("{v:.6}")).collect();
    println!("surrogate N: [{}]", n.join(", "));
    println!("coupling T^σ (condition {:.3e}):", model.cond_sigma);
    println!(
        "{}",
        render_matrix(model.order, model.order, |i, j| model.t_sigma[(i, j)])
    );
    println!("coupling T⁰ (condition {:.3e}):", model.cond_zero);
    println!(
        "{}",
        render_matrix(model.order, model.order, |i, j| model.t_zero[(i, j)])
    );
    println!("controller row A♦ = Ψ(T⁰)⁻¹:");
    println!(
        "{}",
        render_matrix(1, model.order, |i, j| model.a_row[(i, j)])
    );
    println!("oracle row B♦ = Ψ(T^σ)⁻¹:");
    println!(
        "{}",
        render_matrix(1, model.order, |i, j| model.b_row[(i, j)])
    );

    if channel.terms().len() <= 1 {
        let agent = assemble_agent(vec![model])?;
        for (j, block) in agent.e_blocks.iter().enumerate() {
            println!("frequency block E_{}:", j + 1);
            println!(
                "{}",
                render_matrix(block.nrows(), block.ncols(), |i, c| block[(i, c)])
            );
        }
        let rho: Vec<String> = agent.rho.iter().map(|v| format!("{v:.6}")).collect();
        println!("frequency parameters ϱ: [{}]", rho.join(", "));
    } else {
        println!(
            "frequency parameterization: {} sinusoids — supply explicit E-blocks \
             and ϱ in the scenario",
            channel.terms().len()
        );
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

fn fmt_opt_time(t: Option<f64>) -> String {
    match t {
        Some(v) => format!("{v:.2} s"),
        None => "not within horizon".into(),
    }
}

fn cmd_report(args: &ReportArgs) -> Result<i32> {
    let compiled = load_compiled(&args.scenario, &args.overrides)?;
    let output = integrate(&compiled, args.threads);
    let summary = sim::summarize(&compiled.model, &output);

    println!(
        "{} agents, horizon {:.1} s at dt = {:.1e} (K min eigenvalue {:.3}, λ = {}, α = {}, μ₁ = {}, μ₂ = {})",
        summary.agents,
        summary.t_end,
        summary.dt,
        summary.k_min_eigenvalue,
        summary.lambda,
        summary.alpha,
        summary.mu1,
        summary.mu2
    );
    match &summary.abort {
        None => println!("integration completed"),
        Some(reason) => println!("integration ABORTED: {reason}"),
    }
    println!(
        "tracking settled (‖e‖, ‖ė‖ ≤ 1e-2): {}",
        fmt_opt_time(summary.consensus_settling_time)
    );
    println!(
        "pairwise agreement (‖qᵢ−qⱼ‖, ‖q̇ᵢ−q̇ⱼ‖ ≤ 2e-2): {}",
        fmt_opt_time(summary.pairwise_settling_time)
    );
    println!(
        "final max ‖e‖ = {:.3e}, ‖ė‖ = {:.3e}, pairwise ‖Δq‖ = {:.3e}, ‖Δq̇‖ = {:.3e}",
        summary.final_max_e,
        summary.final_max_edot,
        summary.final_max_pairwise_q,
        summary.final_max_pairwise_qdot
    );
    println!(
        "final observer disagreement: S {:.3e}, η {:.3e}",
        summary.final_s_disagreement, summary.final_eta_disagreement
    );
    println!("peak torque component: {:.3}", summary.max_torque);

    match output.abort {
        None => Ok(0),
        Some(err) => Ok(exit_code(&err)),
    }
}
