//! Weight-truncated fault enumeration.
//!
//! Every configuration run starts from the noiseless reference state at the
//! segment of its earliest fault and stops as soon as the faulty state has
//! rejoined the reference. Weight-1 faults are run exhaustively. A pair of
//! faults can only differ from the sum of its two single-fault effects when
//! the later fault sits at or before the segment where the earlier fault's
//! run rejoined; only those pairs are evaluated (exhaustively when the
//! budget allows, otherwise sampled). Higher weights are sampled.

use std::collections::HashMap;

use itertools::Itertools;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{score, thread_pool, ExperimentConfig, Fidelities, Plan, Tally, Targets};
use crate::code::encode_qubit;
use crate::error::{Error, Result};
use crate::exec::{Executor, FaultSource};
use crate::noise::{truncation_remainder, weight_class_probabilities, ErrorEnvironment, FaultLocation};
use crate::pauli::Pauli;
use crate::rng;
use crate::state::{overlap_fidelity, QuantumState};
use rayon::prelude::*;

const SAMPLING_TRAJECTORY: u64 = u64::MAX - 1;
const REJOIN_TOLERANCE: f64 = 1e-12;
const OPS: [Pauli; 3] = Pauli::NON_IDENTITY;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnumOptions {
    /// Largest number of runs a weight class may take before it is sampled.
    pub exhaustive_budget: u64,
    /// Runs per sampled weight class.
    pub samples: u64,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { exhaustive_budget: 20_000, samples: 4_000 }
    }
}

/// Noiseless path of one experiment, with the data block at every segment
/// boundary.
struct Reference {
    plan: Plan,
    targets: Targets,
    seed: u64,
    snapshots: Vec<QuantumState>,
    locations: Vec<FaultLocation>,
    /// `segment_end[s]`: number of locations in segments `0..=s`.
    segment_end: Vec<usize>,
    infidelity: [f64; 4],
    tally: Tally,
}

impl Reference {
    fn build(config: &ExperimentConfig) -> Result<Self> {
        let plan = Plan::from_config(config)?;
        let targets = Targets::new(&config.sequence, config.alpha, config.beta)?;
        let mut exec = Executor::new(
            ErrorEnvironment::noiseless(),
            FaultSource::Noiseless,
            config.seed,
            rng::ENUMERATION_TRAJECTORY,
        )
        .with_recording();
        let mut state = encode_qubit(targets.initial)?;
        let mut snapshots = vec![state.clone()];
        let mut tally = Tally::default();
        let mut segment_end = Vec::with_capacity(plan.len());
        let mut locations = Vec::new();
        for s in 0..plan.len() {
            plan.run_segment(s, &mut state, &mut exec, &mut tally)?;
            locations.extend(exec.take_locations());
            segment_end.push(locations.len());
            snapshots.push(state.clone());
        }
        tally.magic_qubits = exec.counters.magic;
        tally.depth = exec.depth();
        let infidelity = score(&state, &targets)?.infidelities();
        Ok(Reference { plan, targets, seed: config.seed, snapshots, locations, segment_end, infidelity, tally })
    }

    /// Runs with faults at the given location indices. Returns the four
    /// infidelities and the segment after which the run rejoined the
    /// reference, if it did.
    fn run(&self, faults: &[(usize, Pauli)]) -> Result<([f64; 4], Option<usize>)> {
        let keys: HashMap<_, _> = faults.iter().map(|&(i, op)| (self.locations[i].key(), op)).collect();
        let first = faults.iter().map(|&(i, _)| self.locations[i].segment).min().unwrap_or(0) as usize;
        let last = faults.iter().map(|&(i, _)| self.locations[i].segment).max().unwrap_or(0) as usize;
        let mut exec = Executor::new(
            ErrorEnvironment::noiseless(),
            FaultSource::Assigned(keys),
            self.seed,
            rng::ENUMERATION_TRAJECTORY,
        );
        let mut state = self.snapshots[first].clone();
        let mut tally = Tally::default();
        for s in first..self.plan.len() {
            self.plan.run_segment(s, &mut state, &mut exec, &mut tally)?;
            if s >= last && overlap_fidelity(&state, &self.snapshots[s + 1])? > 1.0 - REJOIN_TOLERANCE {
                return Ok((self.infidelity, Some(s)));
            }
        }
        Ok((score(&state, &self.targets)?.infidelities(), None))
    }
}

/// Runs of one weight class. `scale · Σ weight · value` is the class
/// estimate, where `weight` is the product of conditional fault
/// probabilities divided by the recorded sampling probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassData {
    pub weight: usize,
    pub exhaustive: bool,
    pub scale: f64,
    pub entries: Vec<ClassEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub ops: Vec<Pauli>,
    pub sampling_probability: f64,
    pub value: [f64; 4],
}

impl ClassData {
    fn estimate(&self, rho: &dyn Fn(Pauli) -> f64) -> [f64; 4] {
        let mut acc = [0.0; 4];
        for e in &self.entries {
            let w = e.ops.iter().map(|&op| rho(op)).product::<f64>() / e.sampling_probability;
            if w == 0.0 {
                continue;
            }
            for (a, v) in acc.iter_mut().zip(e.value) {
                *a += w * v;
            }
        }
        acc.map(|a| a * self.scale)
    }
}

/// Raw enumeration data. Independent of the fault rate, so one collection
/// can be evaluated at several rates via [`EnumerationData::evaluate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationData {
    pub max_weight: usize,
    pub locations: usize,
    pub reference_infidelity: [f64; 4],
    #[serde(skip)]
    pub reference_tally: Tally,
    /// Infidelity of each single fault, indexed `location * 3 + op`.
    pub singles: Vec<[f64; 4]>,
    /// Ordered location pairs whose connected term can be nonzero.
    pub in_span_pairs: u64,
    /// Connected terms `I_ab - I_a - I_b + I_0` of in-span pairs.
    pub pairs: Option<ClassData>,
    /// Infidelities of weight 3 and above.
    pub higher: Vec<ClassData>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumerationEstimate {
    /// `Σ_{w ≤ max} P_w (1 - Ī_w)`.
    pub truncated: Fidelities,
    /// Omitted probability mass.
    pub remainder: f64,
    /// `I_0 + p (S_1 - N I_0) + p² C`, with `S_1` the rate-weighted sum of
    /// single-fault infidelities and `C` the in-span connected sum.
    pub series_infidelity: Fidelities,
    /// Mean infidelity of each weight class `0..=max`.
    pub class_infidelity: Vec<[f64; 4]>,
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Draws an op from the conditional fault distribution.
fn sample_op(rng: &mut ChaCha8Rng, rho: &[f64; 3]) -> (Pauli, f64) {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &r) in rho.iter().enumerate() {
        acc += r;
        if u < acc {
            return (OPS[i], r);
        }
    }
    let i = rho.iter().rposition(|&r| r > 0.0).unwrap_or(2);
    (OPS[i], rho[i])
}

fn conditional(env: &ErrorEnvironment) -> [f64; 3] {
    let t = env.total();
    if t > 0.0 {
        OPS.map(|op| env.prob(op) / t)
    } else {
        [1.0 / 3.0; 3]
    }
}

fn run_all(pool: &rayon::ThreadPool, reference: &Reference, jobs: &[Vec<(usize, Pauli)>]) -> Result<Vec<([f64; 4], Option<usize>)>> {
    pool.install(|| jobs.par_iter().map(|j| reference.run(j)).collect())
}

fn op_index(op: Pauli) -> usize {
    OPS.iter().position(|&o| o == op).expect("non-identity op")
}

impl EnumerationData {
    pub fn collect(config: &ExperimentConfig, max_weight: usize, workers: usize) -> Result<Self> {
        let env = config.environment()?;
        let rho = conditional(&env);
        let opts = config.enum_options;
        let pool = thread_pool(workers)?;
        let reference = Reference::build(config)?;
        let n = reference.locations.len();
        let i0 = reference.infidelity;
        let mut data = EnumerationData {
            max_weight,
            locations: n,
            reference_infidelity: i0,
            reference_tally: reference.tally,
            singles: Vec::new(),
            in_span_pairs: 0,
            pairs: None,
            higher: Vec::new(),
        };
        if max_weight == 0 {
            return Ok(data);
        }

        let jobs: Vec<Vec<(usize, Pauli)>> = (0..n).flat_map(|a| OPS.map(|op| vec![(a, op)])).collect();
        let singles = run_all(&pool, &reference, &jobs)?;
        data.singles = singles.iter().map(|r| r.0).collect();
        if max_weight == 1 || n < 2 {
            return Ok(data);
        }

        // pairs (a, b) with b > a and b inside a's span
        let span_end: Vec<usize> = (0..n)
            .map(|a| {
                // a run that never rejoins keeps every later location in span
                let worst: Option<usize> = (0..3).map(|i| singles[a * 3 + i].1).try_fold(0, |acc, r| r.map(|s| acc.max(s)));
                worst.map_or(n, |s| reference.segment_end[s])
            })
            .collect();
        let counts: Vec<u64> = (0..n).map(|a| span_end[a].saturating_sub(a + 1) as u64).collect();
        let total: u64 = counts.iter().sum();
        data.in_span_pairs = total;

        let connected = |a: usize, ia: usize, b: usize, ib: usize, v: [f64; 4]| {
            let sa = data.singles[a * 3 + ia];
            let sb = data.singles[b * 3 + ib];
            std::array::from_fn(|k| v[k] - sa[k] - sb[k] + i0[k])
        };
        let pairs = if total.saturating_mul(9) <= opts.exhaustive_budget {
            let mut idx = Vec::new();
            for (a, &end) in span_end.iter().enumerate() {
                for b in a + 1..end {
                    for (ia, ib) in (0..3).cartesian_product(0..3) {
                        idx.push((a, ia, b, ib));
                    }
                }
            }
            let jobs: Vec<_> = idx.iter().map(|&(a, ia, b, ib)| vec![(a, OPS[ia]), (b, OPS[ib])]).collect();
            let out = run_all(&pool, &reference, &jobs)?;
            let entries = idx
                .iter()
                .zip(out)
                .map(|(&(a, ia, b, ib), (v, _))| ClassEntry {
                    ops: vec![OPS[ia], OPS[ib]],
                    sampling_probability: 1.0,
                    value: connected(a, ia, b, ib, v),
                })
                .collect();
            ClassData { weight: 2, exhaustive: true, scale: 1.0, entries }
        } else {
            let mut rng = rng::stream(config.seed, SAMPLING_TRAJECTORY, 2);
            let prefix: Vec<u64> = counts
                .iter()
                .scan(0u64, |s, &c| {
                    *s += c;
                    Some(*s)
                })
                .collect();
            let mut idx = Vec::with_capacity(opts.samples as usize);
            for _ in 0..opts.samples {
                let r = rng.random_range(0..total);
                let a = prefix.partition_point(|&x| x <= r);
                let b = a + 1 + rng.random_range(0..counts[a]) as usize;
                let (oa, pa) = sample_op(&mut rng, &rho);
                let (ob, pb) = sample_op(&mut rng, &rho);
                idx.push((a, oa, b, ob, pa * pb));
            }
            let jobs: Vec<_> = idx.iter().map(|&(a, oa, b, ob, _)| vec![(a, oa), (b, ob)]).collect();
            let out = run_all(&pool, &reference, &jobs)?;
            let entries = idx
                .iter()
                .zip(out)
                .map(|(&(a, oa, b, ob, q), (v, _))| ClassEntry {
                    ops: vec![oa, ob],
                    sampling_probability: q,
                    value: connected(a, op_index(oa), b, op_index(ob), v),
                })
                .collect();
            ClassData { weight: 2, exhaustive: false, scale: total as f64 / opts.samples as f64, entries }
        };
        data.pairs = Some(pairs);

        for w in 3..=max_weight.min(n) {
            let population = binomial(n, w);
            let class = if population * 3f64.powi(w as i32) <= opts.exhaustive_budget as f64 {
                let mut jobs = Vec::new();
                for subset in (0..n).combinations(w) {
                    for ops in std::iter::repeat_n(OPS, w).multi_cartesian_product() {
                        jobs.push(subset.iter().copied().zip(ops).collect::<Vec<_>>());
                    }
                }
                let out = run_all(&pool, &reference, &jobs)?;
                let entries = jobs
                    .iter()
                    .zip(out)
                    .map(|(j, (v, _))| ClassEntry {
                        ops: j.iter().map(|f| f.1).collect(),
                        sampling_probability: 1.0,
                        value: v,
                    })
                    .collect();
                ClassData { weight: w, exhaustive: true, scale: 1.0 / population, entries }
            } else {
                let mut rng = rng::stream(config.seed, SAMPLING_TRAJECTORY, w as u64);
                let mut jobs = Vec::with_capacity(opts.samples as usize);
                let mut probs = Vec::with_capacity(opts.samples as usize);
                for _ in 0..opts.samples {
                    let mut subset = rand::seq::index::sample(&mut rng, n, w).into_vec();
                    subset.sort_unstable();
                    let mut q = 1.0;
                    let job = subset
                        .into_iter()
                        .map(|i| {
                            let (op, p) = sample_op(&mut rng, &rho);
                            q *= p;
                            (i, op)
                        })
                        .collect::<Vec<_>>();
                    jobs.push(job);
                    probs.push(q);
                }
                let out = run_all(&pool, &reference, &jobs)?;
                let entries = jobs
                    .iter()
                    .zip(probs)
                    .zip(out)
                    .map(|((j, q), (v, _))| ClassEntry {
                        ops: j.iter().map(|f| f.1).collect(),
                        sampling_probability: q,
                        value: v,
                    })
                    .collect();
                ClassData { weight: w, exhaustive: false, scale: 1.0 / opts.samples as f64, entries }
            };
            data.higher.push(class);
        }
        Ok(data)
    }

    /// Rate-weighted sum of single-fault infidelities.
    pub fn single_sum(&self, env: &ErrorEnvironment) -> [f64; 4] {
        let rho = conditional(env);
        let mut s = [0.0; 4];
        for (i, v) in self.singles.iter().enumerate() {
            for k in 0..4 {
                s[k] += rho[i % 3] * v[k];
            }
        }
        s
    }

    pub fn evaluate(&self, env: &ErrorEnvironment) -> EnumerationEstimate {
        let n = self.locations;
        let p = env.total();
        let i0 = self.reference_infidelity;
        let rho_arr = conditional(env);
        let rho = |op: Pauli| rho_arr[op_index(op)];
        let s1 = self.single_sum(env);
        let c_in = self.pairs.as_ref().map_or([0.0; 4], |c| c.estimate(&rho));

        let mut classes = vec![i0];
        if self.max_weight >= 1 && n >= 1 {
            classes.push(s1.map(|s| s / n as f64));
        }
        if self.pairs.is_some() {
            let c2 = binomial(n, 2);
            classes.push(std::array::from_fn(|k| ((n as f64 - 1.0) * s1[k] - c2 * i0[k] + c_in[k]) / c2));
        }
        for c in &self.higher {
            classes.push(c.estimate(&rho));
        }
        let pw = weight_class_probabilities(n, p);
        let mut f = [0.0; 4];
        for (w, ibar) in classes.iter().enumerate() {
            for k in 0..4 {
                f[k] += pw[w] * (1.0 - ibar[k].clamp(0.0, 1.0));
            }
        }
        let kept = classes.len().saturating_sub(1);
        let series = std::array::from_fn(|k| i0[k] + p * (s1[k] - n as f64 * i0[k]) + p * p * c_in[k]);
        EnumerationEstimate {
            truncated: Fidelities::from_array(f.map(|x| x.clamp(0.0, 1.0))),
            remainder: truncation_remainder(n, p, kept),
            series_infidelity: Fidelities::from_array(series),
            class_infidelity: classes,
        }
    }
}

/// Exact weight-≤`max_weight` enumeration over an explicit configuration
/// list; used to cross-check the pruned estimator on small circuits.
pub fn exact_truncated(config: &ExperimentConfig, max_weight: usize, cap: u128) -> Result<(Fidelities, f64)> {
    let env = config.environment()?;
    let reference = Reference::build(config)?;
    let (configs, remainder) =
        crate::noise::enumerate_configurations(&reference.locations, &env, max_weight, cap)?;
    let index: HashMap<_, _> = reference.locations.iter().enumerate().map(|(i, l)| (l.key(), i)).collect();
    let mut f = [0.0; 4];
    for c in &configs {
        let faults: Vec<_> = c.assignments.iter().map(|(k, op)| (index[k], *op)).collect();
        let (inf, _) = if faults.is_empty() { (reference.infidelity, None) } else { reference.run(&faults)? };
        for k in 0..4 {
            f[k] += c.probability * (1.0 - inf[k]);
        }
    }
    if configs.is_empty() {
        return Err(Error::InvalidConfig("no configurations".into()));
    }
    Ok((Fidelities::from_array(f), remainder))
}
