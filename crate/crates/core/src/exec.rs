//! Noisy execution context shared by every gadget.
//!
//! An [`Executor`] applies gates, initializations and measurements to a
//! [`QuantumState`] and inserts a Pauli fault on each participant: after
//! gates and initializations, before measurements. Where the fault comes from
//! is decided by the [`FaultSource`]. Locations are numbered per segment
//! (one logical gate or one SM round), so the same physical location has the
//! same key in every run that follows the same path.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::noise::{sample_fault, ErrorEnvironment, FaultKind, FaultLocation, LocationKey};
use crate::pauli::Pauli;
use crate::rng;
use crate::state::{Basis, Gate, QuantumState, Role};

#[derive(Clone, Debug, Default)]
pub enum FaultSource {
    #[default]
    Noiseless,
    /// Faults drawn from the environment on the segment stream.
    MonteCarlo,
    /// Faults fixed in advance; unlisted locations are fault-free.
    Assigned(HashMap<LocationKey, Pauli>),
}

/// Qubit initialization counters, split by purpose.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub sm_ancilla: u64,
    pub magic: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitPurpose {
    Syndrome,
    Magic,
}

pub struct Executor {
    env: ErrorEnvironment,
    source: FaultSource,
    seed: u64,
    trajectory: u64,
    segment: u32,
    ordinal: u32,
    rng: ChaCha8Rng,
    record: Option<Vec<FaultLocation>>,
    clock: HashMap<Role, u64>,
    depth: u64,
    next_id: u32,
    pub counters: Counters,
}

impl Executor {
    pub fn new(env: ErrorEnvironment, source: FaultSource, seed: u64, trajectory: u64) -> Self {
        Executor {
            env,
            source,
            seed,
            trajectory,
            segment: 0,
            ordinal: 0,
            rng: rng::stream(seed, trajectory, 0),
            record: None,
            clock: HashMap::new(),
            depth: 0,
            next_id: 0,
            counters: Counters::default(),
        }
    }

    /// Fault-free executor; measurement draws still come from the seeded stream.
    pub fn noiseless(seed: u64) -> Self {
        Self::new(ErrorEnvironment::noiseless(), FaultSource::Noiseless, seed, 0)
    }

    pub fn with_recording(mut self) -> Self {
        self.record = Some(Vec::new());
        self
    }

    pub fn take_locations(&mut self) -> Vec<FaultLocation> {
        self.record.replace(Vec::new()).unwrap_or_default()
    }

    pub fn env(&self) -> &ErrorEnvironment {
        &self.env
    }

    pub fn segment(&self) -> u32 {
        self.segment
    }

    /// Starts a new segment: location ordinals restart and the random stream
    /// is rekeyed.
    pub fn begin_segment(&mut self, segment: u32) {
        self.segment = segment;
        self.ordinal = 0;
        self.rng = rng::stream(self.seed, self.trajectory, segment as u64);
    }

    /// Uniform draw in `[0, 1)` for measurement sampling.
    pub fn draw(&mut self) -> f64 {
        self.rng.random()
    }

    pub fn fresh_ancilla(&mut self) -> Role {
        self.next_id += 1;
        Role::Ancilla(self.next_id)
    }

    pub fn fresh_verify(&mut self) -> Role {
        self.next_id += 1;
        Role::Verify(self.next_id)
    }

    /// Circuit depth so far (ASAP schedule, one step per operation).
    pub fn depth(&self) -> u64 {
        self.depth
    }

    fn tick(&mut self, roles: &[Role]) {
        let t = roles.iter().map(|r| self.clock.get(r).copied().unwrap_or(0)).max().unwrap_or(0) + 1;
        for r in roles {
            self.clock.insert(*r, t);
        }
        self.depth = self.depth.max(t);
    }

    fn fault(&mut self, state: &mut QuantumState, position: usize, kind: FaultKind) -> Result<()> {
        let ordinal = self.ordinal;
        self.ordinal += 1;
        if let Some(rec) = self.record.as_mut() {
            rec.push(FaultLocation {
                segment: self.segment,
                ordinal,
                role: state.labels()[position],
                position,
                kind,
            });
        }
        let op = match &self.source {
            FaultSource::Noiseless => Pauli::I,
            FaultSource::MonteCarlo => sample_fault(&self.env, &mut self.rng),
            FaultSource::Assigned(map) => map.get(&(self.segment, ordinal)).copied().unwrap_or(Pauli::I),
        };
        if op != Pauli::I {
            state.apply_single_pauli(position, op)?;
        }
        Ok(())
    }

    pub fn gate(&mut self, state: &mut QuantumState, gate: Gate) -> Result<()> {
        state.apply_gate(gate)?;
        let (a, b) = gate.qubits();
        match b {
            None => self.tick(&[state.labels()[a]]),
            Some(b) => self.tick(&[state.labels()[a], state.labels()[b]]),
        }
        self.fault(state, a, FaultKind::Gate)?;
        if let Some(b) = b {
            self.fault(state, b, FaultKind::Gate)?;
        }
        Ok(())
    }

    pub fn gates(&mut self, state: &mut QuantumState, gates: &[Gate]) -> Result<()> {
        gates.iter().try_for_each(|&g| self.gate(state, g))
    }

    /// Appends fresh qubits and faults each one after preparation.
    pub fn init(&mut self, state: &mut QuantumState, roles: &[Role], basis: &[Basis], purpose: InitPurpose) -> Result<()> {
        let start = state.num_qubits();
        state.attach(roles, basis)?;
        for (i, r) in roles.iter().enumerate() {
            self.clock.insert(*r, 1);
            self.depth = self.depth.max(1);
            self.fault(state, start + i, FaultKind::Initialization)?;
        }
        match purpose {
            InitPurpose::Syndrome => self.counters.sm_ancilla += roles.len() as u64,
            InitPurpose::Magic => self.counters.magic += roles.len() as u64,
        }
        Ok(())
    }

    /// Z-basis measurement; the qubit stays in the register.
    pub fn measure(&mut self, state: &mut QuantumState, position: usize) -> Result<u8> {
        self.fault(state, position, FaultKind::Measurement)?;
        self.tick(&[state.labels()[position]]);
        let draw = self.draw();
        state.measure_z(position, draw)
    }

    /// Z-basis measurement that removes the qubit from the register.
    pub fn measure_detach(&mut self, state: &mut QuantumState, position: usize) -> Result<u8> {
        self.fault(state, position, FaultKind::Measurement)?;
        let role = state.labels()[position];
        self.tick(&[role]);
        self.clock.remove(&role);
        let draw = self.draw();
        state.measure_and_detach(position, draw)
    }

    /// Measures and removes a contiguous block, returning the bits with
    /// bit `j` holding the outcome of position `start + j`.
    pub fn measure_block(&mut self, state: &mut QuantumState, start: usize, len: usize) -> Result<u32> {
        let mut bits = 0u32;
        for j in 0..len {
            bits |= (self.measure_detach(state, start)? as u32) << j;
        }
        Ok(bits)
    }

    /// Renames a register position, carrying its schedule time along.
    pub fn relabel(&mut self, state: &mut QuantumState, position: usize, role: Role) -> Result<()> {
        let old = state.labels()[position];
        let t = self.clock.remove(&old).unwrap_or(0);
        let e = self.clock.entry(role).or_insert(0);
        *e = (*e).max(t);
        state.relabel(position, role)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::overlap_fidelity;

    fn two_data() -> QuantumState {
        QuantumState::product(&[Role::Data(0), Role::Data(1)], &[Basis::Zero, Basis::Zero]).unwrap()
    }

    #[test]
    fn noiseless_matches_apply_gate() {
        let mut exec = Executor::noiseless(1);
        let mut a = two_data();
        let mut b = two_data();
        exec.gate(&mut a, Gate::H(0)).unwrap();
        exec.gate(&mut a, Gate::Cnot { control: 0, target: 1 }).unwrap();
        b.apply_gate(Gate::H(0)).unwrap();
        b.apply_gate(Gate::Cnot { control: 0, target: 1 }).unwrap();
        assert!((overlap_fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn certain_x_faults_on_cnot() {
        let env = ErrorEnvironment::new(1.0, 0.0, 0.0).unwrap();
        let mut exec = Executor::new(env, FaultSource::MonteCarlo, 0, 0);
        let mut s = two_data();
        exec.gate(&mut s, Gate::Cnot { control: 0, target: 1 }).unwrap();
        // CNOT on |00> is trivial, then X on both participants
        assert!((s.amplitudes()[0b11].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn assigned_fault_lands_after_gate() {
        let mut map = HashMap::new();
        map.insert((3, 0), Pauli::X);
        let env = ErrorEnvironment::depolarizing(0.1).unwrap();
        let mut exec = Executor::new(env, FaultSource::Assigned(map), 0, 0);
        exec.begin_segment(3);
        let mut s = two_data();
        exec.gate(&mut s, Gate::H(0)).unwrap();
        let mut expect = two_data();
        expect.apply_gate(Gate::H(0)).unwrap();
        expect.apply_single_pauli(0, Pauli::X).unwrap();
        assert!((overlap_fidelity(&s, &expect).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_fault_flips_readout() {
        let mut map = HashMap::new();
        map.insert((0, 0), Pauli::X);
        let mut exec = Executor::new(ErrorEnvironment::noiseless(), FaultSource::Assigned(map), 0, 0);
        let mut s = two_data();
        assert_eq!(exec.measure_detach(&mut s, 0).unwrap(), 1);
        assert_eq!(s.num_qubits(), 1);
    }

    #[test]
    fn idle_qubits_untouched() {
        let env = ErrorEnvironment::depolarizing(0.3).unwrap();
        let mut exec = Executor::new(env, FaultSource::MonteCarlo, 5, 0);
        let roles = [Role::Data(0), Role::Data(1), Role::Data(2)];
        let mut s = QuantumState::product(&roles, &[Basis::Plus, Basis::Zero, Basis::Zero]).unwrap();
        s.apply_gate(Gate::T(0)).unwrap();
        let before = s.reduced_density(0).unwrap();
        for _ in 0..20 {
            exec.gate(&mut s, Gate::Cnot { control: 1, target: 2 }).unwrap();
            exec.gate(&mut s, Gate::H(2)).unwrap();
        }
        let after = s.reduced_density(0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((before[i][j] - after[i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn records_locations_and_depth() {
        let mut exec = Executor::noiseless(0).with_recording();
        let mut s = two_data();
        exec.gate(&mut s, Gate::H(0)).unwrap();
        exec.gate(&mut s, Gate::H(1)).unwrap();
        exec.gate(&mut s, Gate::Cnot { control: 0, target: 1 }).unwrap();
        let r = exec.fresh_ancilla();
        exec.init(&mut s, &[r], &[Basis::Zero], InitPurpose::Syndrome).unwrap();
        exec.measure_detach(&mut s, 2).unwrap();
        let locs = exec.take_locations();
        assert_eq!(locs.len(), 6);
        assert_eq!(locs[4].kind, FaultKind::Initialization);
        assert_eq!(exec.depth(), 2);
        assert_eq!(exec.counters.sm_ancilla, 1);
    }
}
