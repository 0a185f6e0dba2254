//! `symmes`: command-line driver for the symmetric-state pipelines.
//!
//! Every randomized subcommand takes `--seed`; the same flags and seed give
//! byte-identical artifacts. Exit status is 0 on success, 1 when a
//! verification fails and 2 on usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use symmes::designs::{
    find_channel_design_with, find_state_design_with, verify_design, DesignConfig, DESIGN_TOLERANCE,
};
use symmes::io::{
    circuit_to_json, gap_csv, gap_dat, load_design, matrix_from_json, matrix_to_json, read_json,
    to_json, write_text, BranchJson, DesignJson, GateJson, MatrixJson, RegressionJson, StateJson,
};
use symmes::linalg::{random_density, random_pure_state};
use symmes::mes::{build_phi, build_psi_singlet, random_joint_state, JointState};
use symmes::mps::{clone_demo, mps_contract, mps_tensors, simulate_sequential};
use symmes::protocols::{
    design_state, run_teleportation, run_transformation, teleport_povm, COMPLETENESS_TOLERANCE,
};
use symmes::rng::{seeded, substream};
use symmes::symcheck::{
    deterministic_defects, ensemble_rounds, gap_scan, ArnoldiConfig, PairMapSpec, Topology, Variant,
};
use symmes::symspace::Unitary2;
use symmes::verify;
use symmes::Error;

/// Default bound on `1 − fidelity` per protocol branch.
const BRANCH_TOLERANCE: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(
    name = "symmes",
    version,
    about = "Maximally entangled symmetric states: protocols, designs and channel checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write |Φ⟩ for N participants as a Dicke-basis amplitude matrix.
    BuildState(BuildStateArgs),
    /// Synthesize the sequential circuit for |Φ⟩ and simulate it.
    Sequential(SequentialArgs),
    /// Turn |Φ⟩ into a target state by authority measurement and broadcast.
    Transform(TransformArgs),
    /// Teleport a symmetric-subspace state from the authority to the participants.
    Teleport(TeleportArgs),
    /// Search for a weighted unitary design.
    FindDesign(FindDesignArgs),
    /// Spectral gap of the pair-symmetrization channel over a range of N.
    GapScan(GapScanArgs),
    /// Stochastic rounds of the pair-symmetrization channel.
    SimulateRounds(RoundsArgs),
    /// Clone a qubit onto N participants via the ideal cloner and teleportation.
    CloneDemo(CloneArgs),
    /// Run the acceptance suite.
    VerifyAll(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StateSource {
    Closed,
    Mps,
    Singlet,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DesignChoice {
    State,
    Channel,
}

#[derive(Args, Debug)]
struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct BuildStateArgs {
    #[arg(long)]
    n: usize,
    /// Construction to use.
    #[arg(long, value_enum, default_value = "closed")]
    source: StateSource,
    /// Tolerance on the norm and the Schmidt spectrum.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SequentialArgs {
    #[arg(long)]
    n: usize,
    /// Required infidelity bound.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Target state (state JSON); random when absent.
    #[arg(long)]
    target: Option<PathBuf>,
    /// State design for the target; searched when absent.
    #[arg(long)]
    design: Option<PathBuf>,
    /// Simulate only this outcome.
    #[arg(long)]
    outcome: Option<usize>,
    /// Required branch infidelity bound.
    #[arg(long, default_value_t = BRANCH_TOLERANCE)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct TeleportArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Channel design; searched when absent.
    #[arg(long)]
    design: Option<PathBuf>,
    /// Input density matrix as a JSON matrix; random when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Draw a full-rank random input instead of a pure one.
    #[arg(long)]
    mixed: bool,
    /// Required branch infidelity bound.
    #[arg(long, default_value_t = BRANCH_TOLERANCE)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct FindDesignArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "channel")]
    kind: DesignChoice,
    /// State to twirl (JSON matrix) for a state design; random when absent.
    #[arg(long)]
    rho: Option<PathBuf>,
    /// Residual tolerance.
    #[arg(long, default_value_t = DESIGN_TOLERANCE)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct GapScanArgs {
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "ring")]
    topology: Topology,
    #[arg(long, default_value = "formula")]
    variant: Variant,
    /// Arnoldi residual tolerance.
    #[arg(long, default_value_t = 1e-11)]
    tol: f64,
    /// Also write a gnuplot script and data file next to the output.
    #[arg(long)]
    gnuplot: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct RoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 50)]
    rounds: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value = "ring")]
    topology: Topology,
    #[arg(long, default_value = "formula")]
    variant: Variant,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct CloneArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Channel design; searched when absent.
    #[arg(long)]
    design: Option<PathBuf>,
    /// Allowed deviation of each copy fidelity from the ideal cloner.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    seed: u64,
    /// Run only these criteria (comma separated).
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
    /// Write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit status.
enum Failure {
    Usage(anyhow::Error),
    Verification(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange { .. }
            | Error::Dimension { .. }
            | Error::KindMismatch(_)
            | Error::Json(_)
            | Error::Io(_) => Failure::Usage(e.into()),
            other => Failure::Verification(other.into()),
        }
    }
}

type Run = Result<(), Failure>;

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(anyhow!("{msg}"))
}

fn check(ok: bool, msg: impl std::fmt::Display) -> Run {
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification(anyhow!("{msg}")))
    }
}

fn require_seed(seed: Option<u64>, cmd: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| usage(format!("{cmd} is randomized and needs --seed")))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Run {
    match out {
        Some(p) => write_text(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::Usage),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    Ok(to_json(v)?)
}

#[derive(Serialize)]
struct Check {
    value: f64,
    tolerance: f64,
    passed: bool,
}

impl Check {
    fn at_most(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Serialize)]
struct BuildStateReport {
    source: &'static str,
    #[serde(flatten)]
    state: StateJson,
    norm_defect: Check,
    schmidt_defect: Check,
}

fn build_state(a: BuildStateArgs) -> Run {
    let (source, state) = match a.source {
        StateSource::Closed => ("closed", build_phi::<f64>(a.n)?),
        StateSource::Mps => ("mps", mps_contract(&mps_tensors::<f64>(a.n)?)?),
        StateSource::Singlet => (
            "singlet",
            build_psi_singlet::<f64>(a.n)?
                .state
                .apply_participants(&Unitary2::pauli_y())?,
        ),
    };
    let norm = state.amplitudes().norm();
    let target = 1.0 / ((a.n + 1) as f64).sqrt();
    let schmidt = state
        .schmidt_coefficients()
        .iter()
        .map(|s| (s - target).abs())
        .fold(0.0, f64::max);
    let report = BuildStateReport {
        source,
        state: StateJson::from_state(&state),
        norm_defect: Check::at_most((norm - 1.0).abs(), a.tol),
        schmidt_defect: Check::at_most(schmidt, a.tol),
    };
    let text = match a.output.format {
        Format::Json => json(&report)?,
        Format::Csv => amplitude_csv(&state),
    };
    emit(&a.output.out, &text)?;
    check(
        report.norm_defect.passed && report.schmidt_defect.passed,
        format!(
            "norm defect {:e}, Schmidt defect {schmidt:e}",
            report.norm_defect.value
        ),
    )
}

fn amplitude_csv(s: &JointState<f64>) -> String {
    let mut t = String::from("authority,weight,re,im\n");
    let m = s.amplitudes();
    for a in 0..m.nrows() {
        for b in 0..m.ncols() {
            t.push_str(&format!("{a},{b},{},{}\n", m[(a, b)].re, m[(a, b)].im));
        }
    }
    t
}

#[derive(Serialize)]
struct SequentialReport {
    n: usize,
    infidelity: Check,
    ancilla_defect: Check,
    gate_unitarity_defect: Check,
    gates: Vec<GateJson>,
}

fn sequential(a: SequentialArgs) -> Run {
    let run = simulate_sequential::<f64>(a.n)?;
    let report = SequentialReport {
        n: a.n,
        infidelity: Check::at_most(1.0 - run.fidelity, a.tol),
        ancilla_defect: Check::at_most(run.ancilla_defect.abs(), a.tol),
        gate_unitarity_defect: Check::at_most(run.circuit.max_unitarity_defect(), 1e-12),
        gates: circuit_to_json(&run.circuit),
    };
    let text = match a.output.format {
        Format::Json => json(&report)?,
        Format::Csv => format!(
            "n,infidelity,ancilla_defect,gates\n{},{},{},{}\n",
            a.n,
            report.infidelity.value,
            report.ancilla_defect.value,
            report.gates.len()
        ),
    };
    emit(&a.output.out, &text)?;
    check(
        report.infidelity.passed
            && report.ancilla_defect.passed
            && report.gate_unitarity_defect.passed,
        format!("infidelity {:e}", report.infidelity.value),
    )
}

#[derive(Serialize)]
struct BranchReport {
    #[serde(flatten)]
    branch: BranchJson,
    weight: f64,
    infidelity: Check,
}

#[derive(Serialize)]
struct TransformReport {
    n: usize,
    seed: u64,
    design_size: usize,
    completeness_residual: Check,
    total_variation: Check,
    target: StateJson,
    branches: Vec<BranchReport>,
}

fn branch_csv(branches: &[BranchReport]) -> String {
    let mut t = String::from("outcome,probability,weight,fidelity,tolerance\n");
    for b in branches {
        t.push_str(&format!(
            "{},{},{},{},{}\n",
            b.branch.outcome,
            b.branch.probability,
            b.weight,
            b.branch.fidelity,
            b.infidelity.tolerance
        ));
    }
    t
}

fn transform(a: TransformArgs) -> Run {
    let seed = require_seed(a.seed, "transform")?;
    let target = match &a.target {
        Some(p) => read_json::<StateJson>(p)?.to_state()?,
        None => random_joint_state(a.n, &mut seeded(seed)),
    };
    if target.n() != a.n {
        return Err(usage(format!(
            "target has n = {}, expected {}",
            target.n(),
            a.n
        )));
    }
    let design = match &a.design {
        Some(p) => load_design(p)?,
        None => find_state_design_with(
            &design_state(&target),
            a.n,
            seed,
            &DesignConfig::for_state(a.n),
        )?,
    };
    let povm = symmes::protocols::transform_povm(&target, &design)?;
    let records = run_transformation(&target, &design, a.outcome)?;
    let tv = 0.5
        * records
            .iter()
            .map(|b| (b.probability - b.weight).abs())
            .sum::<f64>();
    let branches: Vec<BranchReport> = records
        .iter()
        .map(|b| BranchReport {
            branch: BranchJson::from(b),
            weight: b.weight,
            infidelity: Check::at_most(1.0 - b.fidelity, a.tol),
        })
        .collect();
    let report = TransformReport {
        n: a.n,
        seed,
        design_size: design.len(),
        completeness_residual: Check::at_most(povm.completeness_residual(), COMPLETENESS_TOLERANCE),
        total_variation: Check::at_most(tv, 1e-10),
        target: StateJson::from_state(&target),
        branches,
    };
    let text = match a.output.format {
        Format::Json => json(&report)?,
        Format::Csv => branch_csv(&report.branches),
    };
    emit(&a.output.out, &text)?;
    let ok = report.branches.iter().all(|b| b.infidelity.passed)
        && report.total_variation.passed
        && report.completeness_residual.passed;
    check(ok, "a branch missed the target")
}

#[derive(Serialize)]
struct TeleportReport {
    n: usize,
    seed: u64,
    mixed: bool,
    design_size: usize,
    completeness_residual: Check,
    sampled_outcome: usize,
    input: MatrixJson,
    branches: Vec<BranchReport>,
}

fn channel_design(
    n: usize,
    path: &Option<PathBuf>,
    seed: u64,
) -> Result<symmes::designs::WeightedUnitarySet, Failure> {
    let d = match path {
        Some(p) => load_design(p)?,
        None => find_channel_design_with(n, seed, &DesignConfig::for_channel(n))?,
    };
    if d.n() != n {
        return Err(usage(format!("design has n = {}, expected {n}", d.n())));
    }
    if !d.is_channel() {
        return Err(usage("a channel design is required"));
    }
    Ok(d)
}

fn teleport(a: TeleportArgs) -> Run {
    let seed = require_seed(a.seed, "teleport")?;
    let design = channel_design(a.n, &a.design, seed)?;
    let input = match &a.input {
        Some(p) => matrix_from_json(&read_json::<MatrixJson>(p)?)?,
        None => {
            let rank = if a.mixed { a.n + 1 } else { 1 };
            random_density(a.n + 1, rank, &mut substream(seed, 1))
        }
    };
    let povm = teleport_povm(a.n, &design)?;
    let run = run_teleportation(&input, &design, seed)?;
    let branches: Vec<BranchReport> = run
        .branches
        .iter()
        .map(|b| BranchReport {
            branch: BranchJson::from(b),
            weight: b.weight,
            infidelity: Check::at_most(1.0 - b.fidelity, a.tol),
        })
        .collect();
    let report = TeleportReport {
        n: a.n,
        seed,
        mixed: a.mixed,
        design_size: design.len(),
        completeness_residual: Check::at_most(povm.completeness_residual(), COMPLETENESS_TOLERANCE),
        sampled_outcome: run.sampled_outcome,
        input: matrix_to_json(&input),
        branches,
    };
    let text = match a.output.format {
        Format::Json => json(&report)?,
        Format::Csv => branch_csv(&report.branches),
    };
    emit(&a.output.out, &text)?;
    let ok =
        report.branches.iter().all(|b| b.infidelity.passed) && report.completeness_residual.passed;
    check(ok, "a branch missed the input state")
}

#[derive(Serialize)]
struct DesignReport {
    #[serde(flatten)]
    design: DesignJson,
    seed: u64,
    residual: Check,
}

fn find_design(a: FindDesignArgs) -> Run {
    let seed = require_seed(a.seed, "find-design")?;
    let design = match a.kind {
        DesignChoice::Channel => {
            let config = DesignConfig {
                tolerance: a.tol,
                ..DesignConfig::for_channel(a.n)
            };
            find_channel_design_with(a.n, seed, &config)?
        }
        DesignChoice::State => {
            let rho = match &a.rho {
                Some(p) => matrix_from_json(&read_json::<MatrixJson>(p)?)?,
                None => random_density(a.n + 1, a.n + 1, &mut substream(seed, 1)),
            };
            let config = DesignConfig {
                tolerance: a.tol,
                ..DesignConfig::for_state(a.n)
            };
            find_state_design_with(&rho, a.n, seed, &config)?
        }
    };
    let residual = verify_design(&design, None)?;
    let report = DesignReport {
        design: DesignJson::from_design(&design),
        seed,
        residual: Check::at_most(residual, a.tol),
    };
    let text = match a.output.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut t = String::from(
                "index,weight,u00_re,u00_im,u01_re,u01_im,u10_re,u10_im,u11_re,u11_im\n",
            );
            for (i, e) in design.entries().iter().enumerate() {
                let m = e.unitary.matrix();
                t.push_str(&format!("{i},{}", e.weight));
                for z in [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]] {
                    t.push_str(&format!(",{},{}", z.re, z.im));
                }
                t.push('\n');
            }
            t
        }
    };
    emit(&a.output.out, &text)?;
    check(report.residual.passed, format!("residual {residual:e}"))
}

#[derive(Serialize)]
struct GapRecordJson {
    n: usize,
    lambda2: f64,
    gap: f64,
    iterations: usize,
    residual: Check,
}

#[derive(Serialize)]
struct GapScanReport {
    topology: String,
    variant: String,
    seed: u64,
    n_min: usize,
    n_max: usize,
    records: Vec<GapRecordJson>,
    regression: Option<RegressionJson>,
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn gnuplot_script(dat: &Path, fit: Option<&RegressionJson>) -> String {
    let name = dat
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut s =
        String::from("set logscale xy\nset xlabel 'N'\nset ylabel 'gap'\nset key top right\n");
    match fit {
        Some(f) => {
            s.push_str(&format!("f(x) = {} * x**({})\n", f.prefactor, f.exponent));
            s.push_str(&format!(
                "plot '{name}' using 1:2 with points pt 7 title 'gap', f(x) title 'fit N^{{{:.3}}}'\n",
                f.exponent
            ));
        }
        None => s.push_str(&format!(
            "plot '{name}' using 1:2 with points pt 7 title 'gap'\n"
        )),
    }
    s
}

fn gap_scan_cmd(a: GapScanArgs) -> Run {
    let seed = require_seed(a.seed, "gap-scan")?;
    if a.n_min < 2 || a.n_max < a.n_min {
        return Err(usage("need 2 <= --n-min <= --n-max"));
    }
    let config = ArnoldiConfig {
        tolerance: a.tol,
        seed,
        ..Default::default()
    };
    let ns: Vec<usize> = (a.n_min..=a.n_max).collect();
    let scan = gap_scan(&ns, a.topology, a.variant, &config)?;
    let regression = scan.fit.map(RegressionJson::from);
    let report = GapScanReport {
        topology: a.topology.to_string(),
        variant: a.variant.to_string(),
        seed,
        n_min: a.n_min,
        n_max: a.n_max,
        records: scan
            .records
            .iter()
            .map(|r| GapRecordJson {
                n: r.n,
                lambda2: r.lambda2,
                gap: r.gap,
                iterations: r.iterations,
                residual: Check::at_most(r.residual, a.tol),
            })
            .collect(),
        regression,
    };
    match a.format {
        Format::Json => emit(&a.out, &json(&report)?)?,
        Format::Csv => {
            emit(&a.out, &gap_csv(&scan.records))?;
            if let Some(out) = &a.out {
                let reg = sibling(out, ".regression.json");
                write_text(&reg, &json(&RegressionReport::new(&report))?)?;
            }
        }
    }
    if a.gnuplot {
        let base = a.out.clone().unwrap_or_else(|| PathBuf::from("gap-scan"));
        let dat = sibling(&base, ".dat");
        write_text(&dat, &gap_dat(&scan.records))?;
        write_text(
            &sibling(&base, ".gp"),
            &gnuplot_script(&dat, regression.as_ref()),
        )?;
    }
    check(
        report.records.iter().all(|r| r.residual.passed),
        "an eigenvalue estimate did not converge",
    )
}

#[derive(Serialize)]
struct RegressionReport {
    topology: String,
    variant: String,
    n_min: usize,
    n_max: usize,
    points: usize,
    #[serde(flatten)]
    fit: Option<RegressionJson>,
}

impl RegressionReport {
    fn new(r: &GapScanReport) -> Self {
        Self {
            topology: r.topology.clone(),
            variant: r.variant.clone(),
            n_min: r.n_min,
            n_max: r.n_max,
            points: r.records.len(),
            fit: r.regression,
        }
    }
}

#[derive(Serialize)]
struct RoundsReport {
    n: usize,
    seed: u64,
    topology: String,
    variant: String,
    samples: usize,
    /// Mean symmetric defect after each round.
    mean: Vec<f64>,
    std_err: Vec<f64>,
    /// Defect of the averaged channel applied the same number of times.
    averaged_channel: Vec<f64>,
}

fn simulate_rounds_cmd(a: RoundsArgs) -> Run {
    let seed = require_seed(a.seed, "simulate-rounds")?;
    let spec = PairMapSpec::new(a.n, a.topology, a.variant)?;
    let d = 1usize << a.n;
    let rho0 = random_density(d, d, &mut substream(seed, 1));
    let ens = ensemble_rounds(&rho0, &spec, a.rounds, a.samples, seed)?;
    let det = deterministic_defects(&rho0, &spec, a.rounds)?;
    let report = RoundsReport {
        n: a.n,
        seed,
        topology: a.topology.to_string(),
        variant: a.variant.to_string(),
        samples: a.samples,
        mean: ens.mean,
        std_err: ens.std_err,
        averaged_channel: det,
    };
    let text = match a.output.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut t = String::from("round,mean,std_err,averaged_channel\n");
            for r in 0..=a.rounds {
                t.push_str(&format!(
                    "{r},{},{},{}\n",
                    report.mean[r], report.std_err[r], report.averaged_channel[r]
                ));
            }
            t
        }
    };
    emit(&a.output.out, &text)
}

#[derive(Serialize)]
struct CloneBranchJson {
    outcome: usize,
    probability: f64,
    teleport_fidelity: f64,
    copy_fidelity: f64,
    deviation: Check,
}

#[derive(Serialize)]
struct CloneReportJson {
    n: usize,
    seed: u64,
    input: Vec<[f64; 2]>,
    ideal_fidelity: f64,
    cloner_a: f64,
    sampled_outcome: usize,
    branch_spread: f64,
    branches: Vec<CloneBranchJson>,
}

fn clone_cmd(a: CloneArgs) -> Run {
    let seed = require_seed(a.seed, "clone-demo")?;
    let design = channel_design(a.n, &a.design, seed)?;
    let psi = random_pure_state(2, &mut substream(seed, 1));
    let r = clone_demo(a.n, &psi, &design, seed)?;
    let report = CloneReportJson {
        n: a.n,
        seed,
        input: psi.iter().map(|z| [z.re, z.im]).collect(),
        ideal_fidelity: r.ideal_fidelity,
        cloner_a: r.cloner_a,
        sampled_outcome: r.sampled_outcome,
        branch_spread: r.branch_spread,
        branches: r
            .branches
            .iter()
            .map(|b| CloneBranchJson {
                outcome: b.outcome,
                probability: b.probability,
                teleport_fidelity: b.teleport_fidelity,
                copy_fidelity: b.copy_fidelity,
                deviation: Check::at_most((b.copy_fidelity - r.ideal_fidelity).abs(), a.tol),
            })
            .collect(),
    };
    let text = match a.output.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut t = String::from(
                "outcome,probability,teleport_fidelity,copy_fidelity,ideal_fidelity\n",
            );
            for b in &report.branches {
                t.push_str(&format!(
                    "{},{},{},{},{}\n",
                    b.outcome,
                    b.probability,
                    b.teleport_fidelity,
                    b.copy_fidelity,
                    r.ideal_fidelity
                ));
            }
            t
        }
    };
    emit(&a.output.out, &text)?;
    check(
        report.branches.iter().all(|b| b.deviation.passed),
        "a copy fidelity missed the ideal cloner",
    )
}

fn verify_all(a: VerifyArgs) -> Run {
    let ids: Vec<usize> = if a.only.is_empty() {
        (1..=verify::CRITERIA).collect()
    } else {
        a.only.clone()
    };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > verify::CRITERIA) {
        return Err(usage(format!("no criterion {bad}")));
    }
    let mut reports = Vec::with_capacity(ids.len());
    for id in ids {
        let r = verify::run_criterion(id, a.seed);
        println!("{}", r.line());
        reports.push(r);
    }
    if let Some(out) = &a.out {
        write_text(out, &json(&reports)?)?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    check(failed == 0, format!("{failed} criteria failed"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::BuildState(a) => build_state(a),
        Command::Sequential(a) => sequential(a),
        Command::Transform(a) => transform(a),
        Command::Teleport(a) => teleport(a),
        Command::FindDesign(a) => find_design(a),
        Command::GapScan(a) => gap_scan_cmd(a),
        Command::SimulateRounds(a) => simulate_rounds_cmd(a),
        Command::CloneDemo(a) => clone_cmd(a),
        Command::VerifyAll(a) => verify_all(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(e)) => {
            eprintln!("verification failed: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            eprintln!("run `symmes --help` for usage");
            ExitCode::from(2)
        }
    }
}
