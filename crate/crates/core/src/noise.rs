//! Nonequiprobable Pauli error environment and fault bookkeeping.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::state::Role;

/// Probability assigned to the non-dominant Paulis in the dominant presets.
pub const MINOR_PROBABILITY: f64 = 1e-10;

/// Default cap on explicitly materialized fault configurations.
pub const DEFAULT_CONFIGURATION_CAP: u128 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEnvironment {
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl ErrorEnvironment {
    pub fn new(p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        let env = ErrorEnvironment { p_x, p_y, p_z };
        env.validate()?;
        Ok(env)
    }

    pub fn noiseless() -> Self {
        ErrorEnvironment { p_x: 0.0, p_y: 0.0, p_z: 0.0 }
    }

    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(p, p, p)
    }

    /// `axis` gets probability `p`, the other two get [`MINOR_PROBABILITY`].
    pub fn dominant(axis: Pauli, p: f64) -> Result<Self> {
        let m = MINOR_PROBABILITY;
        match axis {
            Pauli::X => Self::new(p, m, m),
            Pauli::Y => Self::new(m, p, m),
            Pauli::Z => Self::new(m, m, p),
            Pauli::I => Err(Error::InvalidEnvironment("dominant axis must be X, Y or Z".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ps = [self.p_x, self.p_y, self.p_z];
        if ps.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidEnvironment(format!("negative or non-finite probability in {ps:?}")));
        }
        if self.total() > 1.0 + 1e-15 {
            return Err(Error::InvalidEnvironment(format!("probabilities sum to {} > 1", self.total())));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.p_x + self.p_y + self.p_z
    }

    pub fn prob(&self, op: Pauli) -> f64 {
        match op {
            Pauli::I => 1.0 - self.total(),
            Pauli::X => self.p_x,
            Pauli::Y => self.p_y,
            Pauli::Z => self.p_z,
        }
    }

    /// Non-identity Paulis with nonzero probability.
    pub fn support(&self) -> Vec<Pauli> {
        Pauli::NON_IDENTITY.into_iter().filter(|&op| self.prob(op) > 0.0).collect()
    }

    pub fn is_noiseless(&self) -> bool {
        self.total() == 0.0
    }
}

/// Named environment families addressable from configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvPreset {
    Depolarizing,
    XDominant,
    YDominant,
    ZDominant,
}

impl EnvPreset {
    pub fn at(self, p: f64) -> Result<ErrorEnvironment> {
        match self {
            EnvPreset::Depolarizing => ErrorEnvironment::depolarizing(p),
            EnvPreset::XDominant => ErrorEnvironment::dominant(Pauli::X, p),
            EnvPreset::YDominant => ErrorEnvironment::dominant(Pauli::Y, p),
            EnvPreset::ZDominant => ErrorEnvironment::dominant(Pauli::Z, p),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EnvPreset::Depolarizing => "depolarizing",
            EnvPreset::XDominant => "x-dominant",
            EnvPreset::YDominant => "y-dominant",
            EnvPreset::ZDominant => "z-dominant",
        }
    }
}

impl fmt::Display for EnvPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvPreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "depolarizing" => Ok(EnvPreset::Depolarizing),
            "x-dominant" => Ok(EnvPreset::XDominant),
            "y-dominant" => Ok(EnvPreset::YDominant),
            "z-dominant" => Ok(EnvPreset::ZDominant),
            other => Err(Error::Parse(format!("unknown environment {other:?}"))),
        }
    }
}

/// Draws the fault for one participant of one operation.
pub fn sample_fault<R: Rng + ?Sized>(env: &ErrorEnvironment, rng: &mut R) -> Pauli {
    let u: f64 = rng.random();
    if u < env.p_x {
        Pauli::X
    } else if u < env.p_x + env.p_y {
        Pauli::Y
    } else if u < env.total() {
        Pauli::Z
    } else {
        Pauli::I
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaultKind {
    Gate,
    Initialization,
    Measurement,
}

/// Segment index plus the ordinal of the location inside that segment.
pub type LocationKey = (u32, u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaultLocation {
    pub segment: u32,
    pub ordinal: u32,
    pub role: Role,
    pub position: usize,
    pub kind: FaultKind,
}

impl FaultLocation {
    pub fn key(&self) -> LocationKey {
        (self.segment, self.ordinal)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaultConfiguration {
    /// Sorted by location key.
    pub assignments: Vec<(LocationKey, Pauli)>,
    pub probability: f64,
}

impl FaultConfiguration {
    pub fn weight(&self) -> usize {
        self.assignments.len()
    }
}

/// Probability of exactly `w` faults among `n` locations, `w = 0..=n`.
pub fn weight_class_probabilities(n: usize, p_fault: f64) -> Vec<f64> {
    if p_fault <= 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    if p_fault >= 1.0 {
        let mut v = vec![0.0; n + 1];
        v[n] = 1.0;
        return v;
    }
    let ratio = (p_fault / (1.0 - p_fault)).ln();
    let mut log_p = n as f64 * (-p_fault).ln_1p();
    let mut out = Vec::with_capacity(n + 1);
    for w in 0..=n {
        out.push(log_p.exp());
        if w < n {
            log_p += ((n - w) as f64 / (w + 1) as f64).ln() + ratio;
        }
    }
    out
}

/// Probability mass of configurations with more than `max_weight` faults.
pub fn truncation_remainder(n: usize, p_fault: f64, max_weight: usize) -> f64 {
    weight_class_probabilities(n, p_fault).iter().skip(max_weight + 1).sum()
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of configurations of weight at most `max_weight`.
pub fn configuration_count(n: usize, paulis: usize, max_weight: usize) -> u128 {
    (0..=max_weight.min(n))
        .map(|w| binomial(n as u128, w as u128).saturating_mul((paulis as u128).saturating_pow(w as u32)))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Every configuration of weight `<= max_weight` with its exact probability,
/// plus the omitted probability mass.
pub fn enumerate_configurations(
    locations: &[FaultLocation],
    env: &ErrorEnvironment,
    max_weight: usize,
    cap: u128,
) -> Result<(Vec<FaultConfiguration>, f64)> {
    env.validate()?;
    let ops = env.support();
    let n = locations.len();
    let count = configuration_count(n, ops.len(), max_weight);
    if count > cap {
        return Err(Error::ConfigurationOverflow { count, cap });
    }
    let p_none = 1.0 - env.total();
    let mut configs = Vec::with_capacity(count as usize);
    for w in 0..=max_weight.min(n) {
        let idle = p_none.powi((n - w) as i32);
        for subset in (0..n).combinations(w) {
            for paulis in std::iter::repeat_n(ops.iter().copied(), w).multi_cartesian_product() {
                let probability = paulis.iter().map(|&op| env.prob(op)).product::<f64>() * idle;
                let mut assignments: Vec<(LocationKey, Pauli)> =
                    subset.iter().zip(&paulis).map(|(&i, &op)| (locations[i].key(), op)).collect();
                assignments.sort_by_key(|a| a.0);
                configs.push(FaultConfiguration { assignments, probability });
            }
        }
    }
    let remainder = truncation_remainder(n, env.total(), max_weight);
    Ok((configs, remainder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn loc(i: u32) -> FaultLocation {
        FaultLocation { segment: 0, ordinal: i, role: Role::Data(0), position: 0, kind: FaultKind::Gate }
    }

    #[test]
    fn environment_validation() {
        assert!(ErrorEnvironment::new(-0.1, 0.0, 0.0).is_err());
        assert!(ErrorEnvironment::new(0.5, 0.4, 0.2).is_err());
        let e = ErrorEnvironment::dominant(Pauli::Y, 1e-3).unwrap();
        assert_eq!(e.p_y, 1e-3);
        assert_eq!(e.p_x, MINOR_PROBABILITY);
        assert_eq!("z-dominant".parse::<EnvPreset>().unwrap(), EnvPreset::ZDominant);
        assert!("bogus".parse::<EnvPreset>().is_err());
    }

    #[test]
    fn sampling_extremes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let zero = ErrorEnvironment::noiseless();
        assert!((0..1000).all(|_| sample_fault(&zero, &mut rng) == Pauli::I));
        let all_x = ErrorEnvironment::new(1.0, 0.0, 0.0).unwrap();
        assert!((0..1000).all(|_| sample_fault(&all_x, &mut rng) == Pauli::X));
    }

    #[test]
    fn depolarizing_frequencies() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let env = ErrorEnvironment::depolarizing(0.01).unwrap();
        let n = 1_000_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[sample_fault(&env, &mut rng) as usize] += 1;
        }
        let sigma = (0.01 * 0.99 / n as f64).sqrt();
        for op in [Pauli::X, Pauli::Y, Pauli::Z] {
            let f = counts[op as usize] as f64 / n as f64;
            assert!((f - 0.01).abs() < 5.0 * sigma, "{op}: {f}");
        }
    }

    #[test]
    fn enumeration_counts() {
        let env = ErrorEnvironment::depolarizing(0.01).unwrap();
        let (c, r) = enumerate_configurations(&[], &env, 2, 100).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].probability, 1.0);
        assert_eq!(r, 0.0);

        let (c, _) = enumerate_configurations(&[loc(0), loc(1)], &env, 1, 100).unwrap();
        assert_eq!(c.len(), 7);

        let locs: Vec<_> = (0..30).map(loc).collect();
        assert!(matches!(
            enumerate_configurations(&locs, &env, 2, 100),
            Err(Error::ConfigurationOverflow { .. })
        ));
    }

    #[test]
    fn enumeration_closed_form() {
        let p = 1e-2;
        let env = ErrorEnvironment::depolarizing(p).unwrap();
        let n = 12;
        let locs: Vec<_> = (0..n).map(loc).collect();
        let (c, r) = enumerate_configurations(&locs, &env, 2, 1_000_000).unwrap();
        let sum: f64 = c.iter().map(|c| c.probability).sum();
        let nf = n as f64;
        let q = 1.0 - 3.0 * p;
        let expect = q.powi(n as i32)
            + nf * 3.0 * p * q.powi(n as i32 - 1)
            + nf * (nf - 1.0) / 2.0 * 9.0 * p * p * q.powi(n as i32 - 2);
        assert!((sum - expect).abs() < 1e-12, "{sum} vs {expect}");
        assert!((sum + r - 1.0).abs() < 1e-12);
        assert!(c.iter().all(|c| c.probability > 0.0 && c.probability <= 1.0));
    }

    #[test]
    fn class_probabilities_sum_to_one() {
        for (n, p) in [(10, 0.1), (40_000, 3e-4), (200, 0.03)] {
            let v = weight_class_probabilities(n, p);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }
}
