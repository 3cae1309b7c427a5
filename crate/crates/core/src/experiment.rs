//! Experiment orchestration: SM scheduling, Monte Carlo and enumeration
//! drivers, scoring, resource accounting.
//!
//! A run is a list of segments, one per logical gate and one per SM
//! application. Each segment gets its own random stream and its own
//! location numbering (see [`crate::exec`]).

use std::fmt;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{encode_qubit, perfect_decode, perfect_final_sm_ensemble, qubit_fidelity, qubit_amplitudes};
use crate::error::{Error, Result};
use crate::exec::{Executor, FaultSource};
use crate::logical::{self, composite_ends, compile_sequence, LogicalGate, DEFAULT_SEQUENCE};
use crate::noise::{EnvPreset, ErrorEnvironment, FaultLocation};
use crate::rng;
use crate::sm::{run_sm, SmOutcome, SmProtocol};
use crate::state::{overlap_fidelity, Ensemble, QuantumState};

pub mod enumeration;
pub mod report;


pub use enumeration::{EnumOptions, EnumerationData, EnumerationEstimate};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    MonteCarlo { trials: u64 },
    Enumeration { max_weight: usize },
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::MonteCarlo { .. } => "mc",
            Mode::Enumeration { .. } => "enum",
        }
    }

    pub fn trials_or_weight(&self) -> u64 {
        match *self {
            Mode::MonteCarlo { trials } => trials,
            Mode::Enumeration { max_weight } => max_weight as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sequence: String,
    /// Number of SM applications; 0 disables SM entirely.
    pub q: u32,
    pub protocol: SmProtocol,
    pub env: EnvPreset,
    pub p: f64,
    pub mode: Mode,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    /// Verify the magic state before each teleported T.
    pub verify_magic: bool,
    pub enum_options: EnumOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sequence: DEFAULT_SEQUENCE.to_string(),
            q: 50,
            protocol: SmProtocol::SHOR,
            env: EnvPreset::Depolarizing,
            p: 1e-3,
            mode: Mode::MonteCarlo { trials: DEFAULT_TRIALS },
            seed: 1,
            alpha: 0.0,
            beta: 0.0,
            verify_magic: false,
            enum_options: EnumOptions::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn environment(&self) -> Result<ErrorEnvironment> {
        self.env.at(self.p)
    }

    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        self.environment()?;
        if let Mode::MonteCarlo { trials: 0 } = self.mode {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        schedule_sm(&self.sequence, self.q)?;
        Ok(())
    }
}

/// Gate indices (1-based count of gates applied) after which SM runs.
///
/// `q` equal to the gate count places SM after every gate; `q` dividing the
/// composite count places SM after every `composites / q` composites; `q = 0`
/// means no SM.
pub fn schedule_sm(sequence: &str, q: u32) -> Result<Vec<usize>> {
    let gates = compile_sequence(sequence)?.len();
    let ends = composite_ends(sequence)?;
    let q = q as usize;
    if q == 0 {
        return Ok(vec![]);
    }
    if q == gates {
        return Ok((1..=gates).collect());
    }
    if ends.len() % q == 0 {
        let step = ends.len() / q;
        return Ok((1..=q).map(|k| ends[k * step - 1]).collect());
    }
    Err(Error::InvalidConfig(format!(
        "q = {q} fits neither {gates} gates nor {} composites",
        ends.len()
    )))
}

/// D = (I_50 − I_q) / I_50; `None` when `i50` is zero.
pub fn fractional_change(i50: f64, iq: f64) -> Option<f64> {
    (i50 > 0.0).then(|| (i50 - iq) / i50)
}

/// Ancilla qubits actually consumed by a list of SM applications.
pub fn resource_count(outcomes: &[SmOutcome]) -> u64 {
    outcomes.iter().map(|o| o.ancilla_qubits_consumed).sum()
}

/// Ancilla qubits for `q` SM applications with no retries and the minimum
/// number of syndrome sets.
pub fn nominal_resource_count(protocol: SmProtocol, q: u32) -> u64 {
    protocol.nominal_cost() * q as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentOp {
    Gate(LogicalGate),
    Sm,
}

/// The segment list of one experiment.
#[derive(Clone, Debug)]
pub struct Plan {
    pub ops: Vec<SegmentOp>,
    pub protocol: SmProtocol,
    pub verify_magic: bool,
}

/// Per-trajectory bookkeeping.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Tally {
    pub sm_ancilla: u64,
    pub magic_qubits: u64,
    pub sm_rounds: u64,
    pub retries: u64,
    pub cap_hits: u64,
    pub depth: u64,
}

impl Plan {
    pub fn build(sequence: &str, q: u32, protocol: SmProtocol, verify_magic: bool) -> Result<Plan> {
        protocol.validate()?;
        let gates = compile_sequence(sequence)?;
        let schedule = schedule_sm(sequence, q)?;
        let mut ops = Vec::with_capacity(gates.len() + schedule.len());
        let mut next = schedule.iter().peekable();
        for (i, g) in gates.iter().enumerate() {
            ops.push(SegmentOp::Gate(*g));
            while next.peek().is_some_and(|&&pos| pos == i + 1) {
                ops.push(SegmentOp::Sm);
                next.next();
            }
        }
        Ok(Plan { ops, protocol, verify_magic })
    }

    pub fn from_config(c: &ExperimentConfig) -> Result<Plan> {
        Plan::build(&c.sequence, c.q, c.protocol, c.verify_magic)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn run_segment(&self, index: usize, state: &mut QuantumState, exec: &mut Executor, tally: &mut Tally) -> Result<()> {
        exec.begin_segment(index as u32);
        match self.ops[index] {
            SegmentOp::Gate(g) => {
                if let Some(t) = logical::apply_logical_gate(state, g, exec, self.verify_magic)? {
                    tally.retries += t.retries as u64;
                    tally.cap_hits += t.cap_hit as u64;
                }
            }
            SegmentOp::Sm => {
                let o = run_sm(self.protocol, state, exec)?;
                tally.sm_ancilla += o.ancilla_qubits_consumed;
                tally.sm_rounds += o.rounds_used as u64;
                tally.retries += o.verification_retries as u64;
                tally.cap_hits += o.cap_hit as u64;
            }
        }
        Ok(())
    }

    /// Runs segments `start..` and returns the final data block.
    pub fn run_from(&self, start: usize, state: &mut QuantumState, exec: &mut Executor, tally: &mut Tally) -> Result<()> {
        for i in start..self.ops.len() {
            self.run_segment(i, state, exec, tally)?;
        }
        tally.magic_qubits = exec.counters.magic;
        tally.depth = exec.depth();
        Ok(())
    }
}

/// Ideal final states: the encoded 7-qubit target and its 2x2 version.
#[derive(Clone, Debug)]
pub struct Targets {
    pub initial: [C64; 2],
    pub logical: [C64; 2],
    pub physical: QuantumState,
}

impl Targets {
    pub fn new(sequence: &str, alpha: f64, beta: f64) -> Result<Targets> {
        let initial = qubit_amplitudes(alpha, beta);
        let logical = logical::ideal_target(&compile_sequence(sequence)?, initial);
        Ok(Targets { initial, logical, physical: encode_qubit(logical)? })
    }
}

/// The four fidelity measures, in CSV order: physical, logical, and both
/// after perfect final SM.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Fidelities {
    pub phys: f64,
    pub log: f64,
    pub phys_psm: f64,
    pub log_psm: f64,
}

impl Fidelities {
    pub fn as_array(&self) -> [f64; 4] {
        [self.phys, self.log, self.phys_psm, self.log_psm]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Fidelities { phys: a[0], log: a[1], phys_psm: a[2], log_psm: a[3] }
    }

    pub fn infidelities(&self) -> [f64; 4] {
        self.as_array().map(|f| 1.0 - f)
    }
}

/// Scores one final data block against the targets.
pub fn score(state: &QuantumState, targets: &Targets) -> Result<Fidelities> {
    let phys = overlap_fidelity(state, &targets.physical)?;
    let log = qubit_fidelity(&perfect_decode(&Ensemble::pure(state.clone()))?, targets.logical);
    let corrected = perfect_final_sm_ensemble(state)?;
    let phys_psm = corrected.fidelity_with(&targets.physical)?;
    let log_psm = qubit_fidelity(&perfect_decode(&corrected)?, targets.logical);
    let clamp = |x: f64| x.clamp(0.0, 1.0);
    Ok(Fidelities { phys: clamp(phys), log: clamp(log), phys_psm: clamp(phys_psm), log_psm: clamp(log_psm) })
}

/// Mean resource use per trajectory.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Resources {
    pub ancilla_qubits: f64,
    pub magic_qubits: f64,
    pub time_steps: f64,
    pub sm_rounds: f64,
    pub verification_retries: f64,
    pub cap_hits: f64,
}

impl Resources {
    fn from_tally(t: &Tally) -> Self {
        Resources {
            ancilla_qubits: t.sm_ancilla as f64,
            magic_qubits: t.magic_qubits as f64,
            time_steps: t.depth as f64,
            sm_rounds: t.sm_rounds as f64,
            verification_retries: t.retries as f64,
            cap_hits: t.cap_hits as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub fidelities: Fidelities,
    /// Monte Carlo standard errors `sqrt(F(1-F)/N)`; zero in enumeration mode.
    pub standard_errors: Fidelities,
    /// Enumeration mode: probability mass of omitted fault configurations.
    /// The true fidelity lies in `[F, F + remainder]`.
    pub remainder: f64,
    /// Enumeration mode: infidelity to second order in the fault rate.
    pub series_infidelity: Option<Fidelities>,
    pub resources: Resources,
    pub engine_version: String,
}

impl ExperimentResult {
    pub fn infidelities(&self) -> Fidelities {
        Fidelities::from_array(self.fidelities.infidelities())
    }

    /// The single uncertainty column: SE of the logical fidelity (MC) or the
    /// truncation remainder (enumeration).
    pub fn se_or_bound(&self) -> f64 {
        match self.config.mode {
            Mode::MonteCarlo { .. } => self.standard_errors.log,
            Mode::Enumeration { .. } => self.remainder,
        }
    }
}

impl fmt::Display for ExperimentResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(f, "protocol {} q {} env {} p {} mode {}", c.protocol, c.q, c.env, c.p, c.mode.label())?;
        let names = ["physical", "logical", "physical+psm", "logical+psm"];
        let se = self.standard_errors.as_array();
        for (i, v) in self.fidelities.as_array().iter().enumerate() {
            match c.mode {
                Mode::MonteCarlo { .. } => writeln!(f, "  {:<13} F = {v:.6e} ± {:.2e}", names[i], se[i])?,
                Mode::Enumeration { .. } => writeln!(f, "  {:<13} F = {v:.6e} (+{:.2e})", names[i], self.remainder)?,
            }
        }
        if let Some(s) = &self.series_infidelity {
            writeln!(f, "  series infidelity: {:?}", s.as_array())?;
        }
        let r = &self.resources;
        write!(f, "  ancilla {} time steps {} sm rounds {}", r.ancilla_qubits, r.time_steps, r.sm_rounds)
    }
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

/// One Monte Carlo trajectory.
pub fn run_trajectory(
    plan: &Plan,
    targets: &Targets,
    env: ErrorEnvironment,
    seed: u64,
    trajectory: u64,
) -> Result<(Fidelities, Tally)> {
    let mut exec = Executor::new(env, FaultSource::MonteCarlo, seed, trajectory);
    let mut state = encode_qubit(targets.initial)?;
    let mut tally = Tally::default();
    plan.run_from(0, &mut state, &mut exec, &mut tally)?;
    Ok((score(&state, targets)?, tally))
}

fn run_monte_carlo(config: &ExperimentConfig, trials: u64, workers: usize) -> Result<ExperimentResult> {
    let plan = Plan::from_config(config)?;
    let targets = Targets::new(&config.sequence, config.alpha, config.beta)?;
    let env = config.environment()?;
    let pool = thread_pool(workers)?;
    let runs: Vec<(Fidelities, Tally)> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| run_trajectory(&plan, &targets, env, config.seed, t))
            .collect::<Result<Vec<_>>>()
    })?;
    // sequential reduction keeps the sum independent of the schedule
    let n = trials as f64;
    let mut sum = [0.0; 4];
    let mut res = Resources::default();
    for (fid, tally) in &runs {
        for (s, v) in sum.iter_mut().zip(fid.as_array()) {
            *s += v;
        }
        let r = Resources::from_tally(tally);
        res.ancilla_qubits += r.ancilla_qubits;
        res.magic_qubits += r.magic_qubits;
        res.time_steps += r.time_steps;
        res.sm_rounds += r.sm_rounds;
        res.verification_retries += r.verification_retries;
        res.cap_hits += r.cap_hits;
    }
    let mean = sum.map(|s| s / n);
    let se = mean.map(|f| (f * (1.0 - f) / n).max(0.0).sqrt());
    let resources = Resources {
        ancilla_qubits: res.ancilla_qubits / n,
        magic_qubits: res.magic_qubits / n,
        time_steps: res.time_steps / n,
        sm_rounds: res.sm_rounds / n,
        verification_retries: res.verification_retries / n,
        cap_hits: res.cap_hits / n,
    };
    Ok(ExperimentResult {
        config: config.clone(),
        fidelities: Fidelities::from_array(mean),
        standard_errors: Fidelities::from_array(se),
        remainder: 0.0,
        series_infidelity: None,
        resources,
        engine_version: ENGINE_VERSION.to_string(),
    })
}

fn run_enumeration(config: &ExperimentConfig, max_weight: usize, workers: usize) -> Result<ExperimentResult> {
    let env = config.environment()?;
    let data = EnumerationData::collect(config, max_weight, workers)?;
    let est = data.evaluate(&env);
    Ok(ExperimentResult {
        config: config.clone(),
        fidelities: est.truncated,
        standard_errors: Fidelities::default(),
        remainder: est.remainder,
        series_infidelity: Some(est.series_infidelity),
        resources: Resources::from_tally(&data.reference_tally),
        engine_version: ENGINE_VERSION.to_string(),
    })
}

/// Runs one experiment with `workers` threads. The result does not depend
/// on `workers`.
pub fn run_experiment_with(config: &ExperimentConfig, workers: usize) -> Result<ExperimentResult> {
    config.validate()?;
    match config.mode {
        Mode::MonteCarlo { trials } => run_monte_carlo(config, trials, workers),
        Mode::Enumeration { max_weight } => run_enumeration(config, max_weight, workers),
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_with(config, 1)
}

/// Noiseless run of the plan; returns the final data block. Used for the
/// sequence-identity check.
pub fn run_noiseless(config: &ExperimentConfig) -> Result<QuantumState> {
    let plan = Plan::from_config(config)?;
    let targets = Targets::new(&config.sequence, config.alpha, config.beta)?;
    let mut exec = Executor::noiseless(config.seed);
    let mut state = encode_qubit(targets.initial)?;
    plan.run_from(0, &mut state, &mut exec, &mut Tally::default())?;
    Ok(state)
}

/// Locations of the noiseless reference path.
pub fn reference_locations(config: &ExperimentConfig) -> Result<Vec<FaultLocation>> {
    let plan = Plan::from_config(config)?;
    let targets = Targets::new(&config.sequence, config.alpha, config.beta)?;
    let mut exec = Executor::new(ErrorEnvironment::noiseless(), FaultSource::Noiseless, config.seed, rng::ENUMERATION_TRAJECTORY)
        .with_recording();
    let mut state = encode_qubit(targets.initial)?;
    plan.run_from(0, &mut state, &mut exec, &mut Tally::default())?;
    Ok(exec.take_locations())
}

/// Parameters of a grid sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: ExperimentConfig,
    pub ps: Vec<f64>,
    pub qs: Vec<u32>,
    pub protocols: Vec<SmProtocol>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub config: ExperimentConfig,
    pub result: std::result::Result<ExperimentResult, String>,
    pub d_log: Option<f64>,
    pub d_log_psm: Option<f64>,
}

/// Runs the `(p, q, protocol)` cross product. Cell failures are recorded
/// in the row and the sweep continues. D columns compare against the row
/// with SM after every gate for the same `p` and protocol.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>> {
    if spec.ps.is_empty() || spec.qs.is_empty() || spec.protocols.is_empty() {
        return Err(Error::InvalidConfig("sweep grids must be nonempty".into()));
    }
    let gates = compile_sequence(&spec.base.sequence)?.len() as u32;
    let mut rows = Vec::new();
    for &protocol in &spec.protocols {
        for &p in &spec.ps {
            let start = rows.len();
            for &q in &spec.qs {
                let config = ExperimentConfig { p, q, protocol, ..spec.base.clone() };
                let result = run_experiment_with(&config, workers).map_err(|e| e.to_string());
                rows.push(SweepRow { config, result, d_log: None, d_log_psm: None });
            }
            let baseline = rows[start..]
                .iter()
                .find(|r| r.config.q == gates)
                .and_then(|r| r.result.as_ref().ok())
                .map(|r| r.infidelities());
            if let Some(base) = baseline {
                for row in &mut rows[start..] {
                    if let Ok(r) = &row.result {
                        let i = r.infidelities();
                        row.d_log = fractional_change(base.log, i.log);
                        row.d_log_psm = fractional_change(base.log_psm, i.log_psm);
                    }
                }
            }
        }
    }
    Ok(rows)
}
