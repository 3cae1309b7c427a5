//! Syndrome-measurement gadgets and Pauli-frame recovery.
//!
//! Every gadget takes the 7-qubit data register, runs its circuit through an
//! [`Executor`], decodes the syndrome and folds the recovery back into the
//! data noiselessly. Ancilla blocks are prepared on their own registers and
//! joined to the data only for the coupling step.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::code::{self, classical_syndrome, decode_lookup, row_support, LogicalAncillaKind, Syndrome, N};
use crate::error::{Error, Result};
use crate::exec::{Executor, InitPurpose};
use crate::pauli::PauliString;
use crate::state::{Basis, Gate, QuantumState, Role};

/// Retries allowed when an ancilla fails verification.
pub const VERIFY_RETRY_CAP: u32 = 5;

/// Syndrome sets allowed before a repeat-until-agree protocol gives up.
pub const REPEAT_SET_CAP: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SmMethod {
    SingleQubit,
    ShorState,
    SteaneState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SmProtocol {
    pub method: SmMethod,
    pub repeated: bool,
}

impl SmProtocol {
    pub const SINGLE: SmProtocol = SmProtocol { method: SmMethod::SingleQubit, repeated: false };
    pub const SINGLE_REPEATED: SmProtocol = SmProtocol { method: SmMethod::SingleQubit, repeated: true };
    pub const SHOR: SmProtocol = SmProtocol { method: SmMethod::ShorState, repeated: true };
    pub const STEANE: SmProtocol = SmProtocol { method: SmMethod::SteaneState, repeated: false };
    pub const STEANE_REPEATED: SmProtocol = SmProtocol { method: SmMethod::SteaneState, repeated: true };

    pub const ALL: [SmProtocol; 5] =
        [Self::SINGLE, Self::SINGLE_REPEATED, Self::SHOR, Self::STEANE, Self::STEANE_REPEATED];

    pub fn validate(&self) -> Result<()> {
        if self.method == SmMethod::ShorState && !self.repeated {
            return Err(Error::InvalidConfig("Shor-state SM must be repeated".into()));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match (self.method, self.repeated) {
            (SmMethod::SingleQubit, false) => "single",
            (SmMethod::SingleQubit, true) => "single-repeated",
            (SmMethod::ShorState, _) => "shor",
            (SmMethod::SteaneState, false) => "steane",
            (SmMethod::SteaneState, true) => "steane-repeated",
        }
    }

    /// Ancilla qubits for one SM application with no retries and the
    /// minimum number of syndrome sets.
    pub fn nominal_cost(&self) -> u64 {
        let per_set = match self.method {
            SmMethod::SingleQubit => 6,
            SmMethod::ShorState => 30,
            SmMethod::SteaneState => 28,
        };
        per_set * if self.repeated { 2 } else { 1 }
    }

    /// Cost of a single syndrome set.
    pub fn set_cost(&self) -> u64 {
        match self.method {
            SmMethod::SingleQubit => 6,
            SmMethod::ShorState => 30,
            SmMethod::SteaneState => 28,
        }
    }
}

impl fmt::Display for SmProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SmProtocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SmProtocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown protocol {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmOutcome {
    pub syndrome: Syndrome,
    pub rounds_used: u32,
    pub ancilla_qubits_consumed: u64,
    pub verification_retries: u32,
    /// A repetition or verification cap was exhausted.
    pub cap_hit: bool,
}

/// Accumulated recovery on the data block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliFrame {
    pending: PauliString,
}

impl Default for PauliFrame {
    fn default() -> Self {
        PauliFrame { pending: PauliString::identity(N) }
    }
}

impl PauliFrame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pending(&self) -> &PauliString {
        &self.pending
    }

    pub fn update(&mut self, recovery: &PauliString) -> Result<()> {
        self.pending = recovery.try_mul(&self.pending)?;
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_identity()
    }

    /// Applies the frame to the data block (positions `0..7`) and clears it.
    pub fn fold(&mut self, state: &mut QuantumState) -> Result<()> {
        if state.num_qubits() < N {
            return Err(Error::LengthMismatch { expected: N, found: state.num_qubits() });
        }
        if !self.is_empty() {
            let extra = state.num_qubits() - N;
            let full = PauliString::from_masks(state.num_qubits(), self.pending.x_mask(), self.pending.z_mask())
                .with_phase(self.pending.phase());
            debug_assert!(extra > 0 || full.same_operator(&self.pending));
            state.apply_pauli(&full)?;
        }
        self.pending = PauliString::identity(N);
        Ok(())
    }
}

/// Folds `frame` into `state`; a no-op for an empty frame.
pub fn interpret_and_recover(frame: &mut PauliFrame, state: &mut QuantumState) -> Result<()> {
    frame.fold(state)
}

fn check_data(state: &QuantumState) -> Result<()> {
    if state.num_qubits() != N {
        return Err(Error::LengthMismatch { expected: N, found: state.num_qubits() });
    }
    Ok(())
}

fn recover(state: &mut QuantumState, syndrome: Syndrome) -> Result<()> {
    let mut frame = PauliFrame::new();
    frame.update(&decode_lookup(syndrome))?;
    frame.fold(state)
}

/// Runs `one_set` until two consecutive sets agree (or the cap is reached).
fn repeat_until_agree(
    mut one_set: impl FnMut() -> Result<Syndrome>,
) -> Result<(Syndrome, u32, bool)> {
    let mut last = one_set()?;
    let mut sets = 1;
    while sets < REPEAT_SET_CAP {
        let next = one_set()?;
        sets += 1;
        if next == last {
            return Ok((next, sets, false));
        }
        last = next;
    }
    Ok((last, sets, true))
}

// ---------------------------------------------------------------------------
// single-qubit ancilla

fn single_qubit_set(state: &mut QuantumState, exec: &mut Executor) -> Result<Syndrome> {
    let mut bits = [0u8; 6];
    for (g, bit) in bits.iter_mut().enumerate() {
        let support = row_support(g % 3);
        let anc = exec.fresh_ancilla();
        let z_type = g < 3;
        let basis = if z_type { Basis::Zero } else { Basis::Plus };
        exec.init(state, &[anc], &[basis], InitPurpose::Syndrome)?;
        for &j in &support {
            let gate = if z_type { Gate::Cnot { control: j, target: N } } else { Gate::Cnot { control: N, target: j } };
            exec.gate(state, gate)?;
        }
        if !z_type {
            exec.gate(state, Gate::H(N))?;
        }
        *bit = exec.measure_detach(state, N)?;
    }
    Ok(Syndrome::from_generator_bits(bits))
}

/// One ancilla qubit per generator.
pub fn sm_single_qubit(state: &mut QuantumState, exec: &mut Executor, repeated: bool) -> Result<SmOutcome> {
    check_data(state)?;
    let before = exec.counters.sm_ancilla;
    let (syndrome, rounds_used, cap_hit) = if repeated {
        repeat_until_agree(|| single_qubit_set(state, exec))?
    } else {
        (single_qubit_set(state, exec)?, 1, false)
    };
    recover(state, syndrome)?;
    Ok(SmOutcome {
        syndrome,
        rounds_used,
        ancilla_qubits_consumed: exec.counters.sm_ancilla - before,
        verification_retries: 0,
        cap_hit,
    })
}

// ---------------------------------------------------------------------------
// Shor-state ancilla

#[derive(Clone, Debug)]
pub struct ShorState {
    pub state: QuantumState,
    pub retries: u32,
    pub cap_hit: bool,
}

/// Verified four-qubit Shor state on its own register.
///
/// GHZ chain `H(0); CNOT 0→1, 1→2, 2→3`, parity of qubits 0 and 3 checked
/// on one verification qubit, then a Hadamard on every qubit when
/// `hadamards` is set. Without them the block is the verified GHZ state.
pub fn build_shor_state(exec: &mut Executor, hadamards: bool) -> Result<ShorState> {
    let mut retries = 0;
    loop {
        let roles: Vec<Role> = (0..4).map(|_| exec.fresh_ancilla()).collect();
        let mut s = QuantumState::empty();
        exec.init(&mut s, &roles, &[Basis::Zero; 4], InitPurpose::Syndrome)?;
        exec.gate(&mut s, Gate::H(0))?;
        for k in 0..3 {
            exec.gate(&mut s, Gate::Cnot { control: k, target: k + 1 })?;
        }
        let v = exec.fresh_verify();
        exec.init(&mut s, &[v], &[Basis::Zero], InitPurpose::Syndrome)?;
        exec.gate(&mut s, Gate::Cnot { control: 0, target: 4 })?;
        exec.gate(&mut s, Gate::Cnot { control: 3, target: 4 })?;
        let flag = exec.measure_detach(&mut s, 4)?;
        let give_up = retries >= VERIFY_RETRY_CAP;
        if flag == 0 || give_up {
            if hadamards {
                for k in 0..4 {
                    exec.gate(&mut s, Gate::H(k))?;
                }
            }
            return Ok(ShorState { state: s, retries, cap_hit: flag != 0 });
        }
        retries += 1;
    }
}

/// Measures generator `g` (measurement order) with a Shor state. Returns
/// the four ancilla outcomes.
///
/// Z-type generators couple data→ancilla into the Shor state and read out in
/// Z. X-type generators couple ancilla→data from the GHZ state and take the
/// Hadamards after coupling, so the readout reveals only the parity.
pub fn shor_generator(state: &mut QuantumState, exec: &mut Executor, g: usize) -> Result<([u8; 4], u32, bool)> {
    let z_type = g < 3;
    let shor = build_shor_state(exec, z_type)?;
    *state = state.tensor(&shor.state)?;
    let support = row_support(g % 3);
    for (k, &j) in support.iter().enumerate() {
        let a = N + k;
        let gate = if z_type { Gate::Cnot { control: j, target: a } } else { Gate::Cnot { control: a, target: j } };
        exec.gate(state, gate)?;
    }
    if !z_type {
        for k in 0..4 {
            exec.gate(state, Gate::H(N + k))?;
        }
    }
    let mut out = [0u8; 4];
    for o in out.iter_mut() {
        *o = exec.measure_detach(state, N)?;
    }
    Ok((out, shor.retries, shor.cap_hit))
}

fn shor_set(state: &mut QuantumState, exec: &mut Executor, retries: &mut u32, capped: &mut bool) -> Result<Syndrome> {
    let mut bits = [0u8; 6];
    for (g, bit) in bits.iter_mut().enumerate() {
        let (outs, r, c) = shor_generator(state, exec, g)?;
        *bit = outs.iter().fold(0, |a, b| a ^ b);
        *retries += r;
        *capped |= c;
    }
    Ok(Syndrome::from_generator_bits(bits))
}

/// Shor-state SM, repeated until two consecutive syndrome sets agree.
pub fn sm_shor(state: &mut QuantumState, exec: &mut Executor) -> Result<SmOutcome> {
    check_data(state)?;
    let before = exec.counters.sm_ancilla;
    let mut retries = 0;
    let mut capped = false;
    let (syndrome, rounds_used, cap) = repeat_until_agree(|| shor_set(state, exec, &mut retries, &mut capped))?;
    recover(state, syndrome)?;
    Ok(SmOutcome {
        syndrome,
        rounds_used,
        ancilla_qubits_consumed: exec.counters.sm_ancilla - before,
        verification_retries: retries,
        cap_hit: cap || capped,
    })
}

// ---------------------------------------------------------------------------
// Steane-state ancilla

#[derive(Clone, Debug)]
pub struct VerifiedBlock {
    pub state: QuantumState,
    pub retries: u32,
    pub cap_hit: bool,
}

/// Two noisy copies of `kind`, a transversal CNOT between them, and a
/// transversal readout of the second copy. Accepted only if the readout is
/// a Hamming codeword with even parity.
///
/// `|0_L⟩` copies are checked for bit flips (CNOT first→second, Z readout);
/// `|+_L⟩` copies for phase flips (CNOT second→first, X readout).
pub fn build_verified_block(exec: &mut Executor, kind: LogicalAncillaKind, purpose: InitPurpose) -> Result<VerifiedBlock> {
    let mut retries = 0;
    loop {
        let a = code::prepare_logical_noisy(exec, kind, purpose)?;
        let b = code::prepare_logical_noisy(exec, kind, purpose)?;
        let mut s = a.tensor(&b)?;
        for j in 0..N {
            let gate = match kind {
                LogicalAncillaKind::PlusL => Gate::Cnot { control: N + j, target: j },
                _ => Gate::Cnot { control: j, target: N + j },
            };
            exec.gate(&mut s, gate)?;
        }
        if kind == LogicalAncillaKind::PlusL {
            for j in 0..N {
                exec.gate(&mut s, Gate::H(N + j))?;
            }
        }
        let bits = exec.measure_block(&mut s, N, N)?;
        let ok = classical_syndrome(bits) == 0 && bits.count_ones() % 2 == 0;
        if ok || retries >= VERIFY_RETRY_CAP {
            return Ok(VerifiedBlock { state: s, retries, cap_hit: !ok });
        }
        retries += 1;
    }
}

/// Bit-flip then phase-flip extraction on a 7-qubit block, without recovery.
/// Returns the syndrome, retries, and whether a cap was hit.
pub fn steane_extract(block: &mut QuantumState, exec: &mut Executor, purpose: InitPurpose) -> Result<(Syndrome, u32, bool)> {
    check_data(block)?;
    // bit flips: |+_L⟩ target, Z readout
    let plus = build_verified_block(exec, LogicalAncillaKind::PlusL, purpose)?;
    *block = block.tensor(&plus.state)?;
    for j in 0..N {
        exec.gate(block, Gate::Cnot { control: j, target: N + j })?;
    }
    let z_bits = classical_syndrome(exec.measure_block(block, N, N)?);

    // phase flips: |0_L⟩ control, X readout
    let zero = build_verified_block(exec, LogicalAncillaKind::ZeroL, purpose)?;
    *block = block.tensor(&zero.state)?;
    for j in 0..N {
        exec.gate(block, Gate::Cnot { control: N + j, target: j })?;
    }
    for j in 0..N {
        exec.gate(block, Gate::H(N + j))?;
    }
    let x_bits = classical_syndrome(exec.measure_block(block, N, N)?);
    Ok((Syndrome { z_bits, x_bits }, plus.retries + zero.retries, plus.cap_hit || zero.cap_hit))
}

/// Steane-ancilla SM; the repeated variant keeps the second syndrome.
pub fn sm_steane(state: &mut QuantumState, exec: &mut Executor, repeated: bool) -> Result<SmOutcome> {
    check_data(state)?;
    let before = exec.counters.sm_ancilla;
    let (mut syndrome, mut retries, mut cap_hit) = steane_extract(state, exec, InitPurpose::Syndrome)?;
    let mut rounds_used = 1;
    if repeated {
        let (s, r, c) = steane_extract(state, exec, InitPurpose::Syndrome)?;
        syndrome = s;
        retries += r;
        cap_hit |= c;
        rounds_used = 2;
    }
    recover(state, syndrome)?;
    Ok(SmOutcome {
        syndrome,
        rounds_used,
        ancilla_qubits_consumed: exec.counters.sm_ancilla - before,
        verification_retries: retries,
        cap_hit,
    })
}

/// Dispatches to the gadget for `protocol`.
pub fn run_sm(protocol: SmProtocol, state: &mut QuantumState, exec: &mut Executor) -> Result<SmOutcome> {
    protocol.validate()?;
    match protocol.method {
        SmMethod::SingleQubit => sm_single_qubit(state, exec, protocol.repeated),
        SmMethod::ShorState => sm_shor(state, exec),
        SmMethod::SteaneState => sm_steane(state, exec, protocol.repeated),
    }
}
