//! Logical gates on the encoded block and the composite-sequence compiler.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::code::{self, logical_readout, LogicalAncillaKind, N};
use crate::error::{Error, Result};
use crate::exec::{Executor, InitPurpose};
use crate::sm::{self, VERIFY_RETRY_CAP};
use crate::state::{Basis, Gate, QuantumState, Role};

/// The 20-composite sequence used throughout.
pub const DEFAULT_SEQUENCE: &str = "ABBBAAAABBABABABBBAA";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalGate {
    H,
    P,
    T,
}

impl fmt::Display for LogicalGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LogicalGate::H => "H_L",
            LogicalGate::P => "P_L",
            LogicalGate::T => "T_L",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CompositeGate {
    /// HPT as an operator product.
    A,
    /// HT as an operator product.
    B,
}

impl CompositeGate {
    /// Gates in application order (rightmost factor first).
    pub fn expansion(self) -> &'static [LogicalGate] {
        match self {
            CompositeGate::A => &[LogicalGate::T, LogicalGate::P, LogicalGate::H],
            CompositeGate::B => &[LogicalGate::T, LogicalGate::H],
        }
    }
}

pub fn parse_composites(spec: &str) -> Result<Vec<CompositeGate>> {
    if spec.is_empty() {
        return Err(Error::Parse("empty gate sequence".into()));
    }
    spec.chars()
        .map(|c| match c {
            'A' => Ok(CompositeGate::A),
            'B' => Ok(CompositeGate::B),
            other => Err(Error::Parse(format!("invalid composite {other:?} in {spec:?}"))),
        })
        .collect()
}

/// Expands a composite string into logical gates in application order.
/// Composites are applied left to right as written.
pub fn compile_sequence(spec: &str) -> Result<Vec<LogicalGate>> {
    Ok(parse_composites(spec)?.into_iter().flat_map(|c| c.expansion().iter().copied()).collect())
}

/// Gate counts `(T, H, P)`.
pub fn gate_counts(gates: &[LogicalGate]) -> (usize, usize, usize) {
    let count = |g| gates.iter().filter(|&&x| x == g).count();
    (count(LogicalGate::T), count(LogicalGate::H), count(LogicalGate::P))
}

/// Gate index just after each composite (1-based positions in the expansion).
pub fn composite_ends(spec: &str) -> Result<Vec<usize>> {
    let mut acc = 0;
    Ok(parse_composites(spec)?
        .into_iter()
        .map(|c| {
            acc += c.expansion().len();
            acc
        })
        .collect())
}

/// Transversal H (bitwise H) or P (bitwise P†) on the data block.
pub fn apply_logical_clifford(state: &mut QuantumState, gate: LogicalGate, exec: &mut Executor) -> Result<()> {
    if state.num_qubits() != N {
        return Err(Error::LengthMismatch { expected: N, found: state.num_qubits() });
    }
    for j in 0..N {
        let g = match gate {
            LogicalGate::H => Gate::H(j),
            LogicalGate::P => Gate::PDag(j),
            LogicalGate::T => return Err(Error::InvalidConfig("T_L is not transversal".into())),
        };
        exec.gate(state, g)?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct MagicState {
    pub state: QuantumState,
    pub retries: u32,
    pub cap_hit: bool,
}

/// Checks the magic state's stabilizer `e^{-iπ/4} ⊗(P†X)` with a verified
/// 7-qubit cat state. Returns true for the +1 outcome.
fn check_magic_stabilizer(theta: &mut QuantumState, exec: &mut Executor) -> Result<bool> {
    let roles: Vec<Role> = (0..N).map(|_| exec.fresh_ancilla()).collect();
    let mut cat = QuantumState::empty();
    exec.init(&mut cat, &roles, &[Basis::Zero; N], InitPurpose::Magic)?;
    exec.gate(&mut cat, Gate::H(0))?;
    for k in 0..N - 1 {
        exec.gate(&mut cat, Gate::Cnot { control: k, target: k + 1 })?;
    }
    let v = exec.fresh_verify();
    exec.init(&mut cat, &[v], &[Basis::Zero], InitPurpose::Magic)?;
    exec.gate(&mut cat, Gate::Cnot { control: 0, target: N })?;
    exec.gate(&mut cat, Gate::Cnot { control: N - 1, target: N })?;
    if exec.measure_detach(&mut cat, N)? != 0 {
        return Ok(false);
    }
    *theta = theta.tensor(&cat)?;
    for j in 0..N {
        exec.gate(theta, Gate::CPdagX { control: N + j, target: j })?;
    }
    exec.gate(theta, Gate::TDag(N))?;
    for j in 0..N {
        exec.gate(theta, Gate::H(N + j))?;
    }
    let bits = exec.measure_block(theta, N, N)?;
    Ok(bits.count_ones() % 2 == 0)
}

/// Noisy `|Θ⟩` block. With `verify`, the block must pass the stabilizer
/// check and a zero-syndrome Steane error detection, otherwise it is rebuilt.
pub fn prepare_magic(exec: &mut Executor, verify: bool) -> Result<MagicState> {
    let mut retries = 0;
    loop {
        let mut theta = code::prepare_logical_noisy(exec, LogicalAncillaKind::Theta, InitPurpose::Magic)?;
        if !verify {
            return Ok(MagicState { state: theta, retries, cap_hit: false });
        }
        let mut ok = check_magic_stabilizer(&mut theta, exec)?;
        if ok {
            let (s, _, _) = sm::steane_extract(&mut theta, exec, InitPurpose::Magic)?;
            ok = s.is_trivial();
        }
        if ok || retries >= VERIFY_RETRY_CAP {
            return Ok(MagicState { state: theta, retries, cap_hit: !ok });
        }
        retries += 1;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TOutcome {
    pub outcome: u8,
    pub retries: u32,
    pub cap_hit: bool,
}

/// Noiseless logical correction `P_L · X_L` (X first).
fn t_correction(state: &mut QuantumState) -> Result<()> {
    state.apply_pauli(&code::code().logical_x)?;
    for j in 0..N {
        state.apply_gate(Gate::PDag(j))?;
    }
    Ok(())
}

/// Teleported T: transversal CNOT from `|Θ⟩` onto the data, transversal Z
/// readout of the old data, Hamming-corrected parity as the outcome, and the
/// noiseless `P_L X_L` correction on outcome 1. The `|Θ⟩` block becomes the
/// new data block.
pub fn apply_logical_t(state: &mut QuantumState, exec: &mut Executor, verify_magic: bool) -> Result<TOutcome> {
    if state.num_qubits() != N {
        return Err(Error::LengthMismatch { expected: N, found: state.num_qubits() });
    }
    let magic = prepare_magic(exec, verify_magic)?;
    *state = state.tensor(&magic.state)?;
    for j in 0..N {
        exec.gate(state, Gate::Cnot { control: N + j, target: j })?;
    }
    let bits = exec.measure_block(state, 0, N)?;
    let outcome = logical_readout(bits);
    for j in 0..N {
        exec.relabel(state, j, Role::Data(j as u8))?;
    }
    if outcome == 1 {
        t_correction(state)?;
    }
    Ok(TOutcome { outcome, retries: magic.retries, cap_hit: magic.cap_hit })
}

/// Applies any logical gate.
pub fn apply_logical_gate(
    state: &mut QuantumState,
    gate: LogicalGate,
    exec: &mut Executor,
    verify_magic: bool,
) -> Result<Option<TOutcome>> {
    match gate {
        LogicalGate::T => apply_logical_t(state, exec, verify_magic).map(Some),
        g => apply_logical_clifford(state, g, exec).map(|_| None),
    }
}

/// 2x2 unitary of a logical gate.
pub fn ideal_unitary(gate: LogicalGate) -> [[C64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match gate {
        LogicalGate::H => [[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]],
        LogicalGate::P => [[one, z], [z, C64::new(0.0, 1.0)]],
        LogicalGate::T => [[one, z], [z, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
    }
}

/// The single-qubit target after applying `gates` to `psi`.
pub fn ideal_target(gates: &[LogicalGate], psi: [C64; 2]) -> [C64; 2] {
    gates.iter().fold(psi, |v, &g| {
        let u = ideal_unitary(g);
        [u[0][0] * v[0] + u[0][1] * v[1], u[1][0] * v[0] + u[1][1] * v[1]]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{encode_qubit, qubit_amplitudes};
    use crate::pauli::{Pauli, PauliString};
    use crate::state::overlap_fidelity;
    use std::f64::consts::FRAC_PI_4;

    fn fid(a: &QuantumState, b: &QuantumState) -> f64 {
        overlap_fidelity(a, b).unwrap()
    }

    fn basis_inputs() -> Vec<[C64; 2]> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![
            qubit_amplitudes(0.0, 0.0),
            qubit_amplitudes(std::f64::consts::FRAC_PI_2, 0.0),
            [C64::new(h, 0.0), C64::new(h, 0.0)],
            [C64::new(h, 0.0), C64::new(0.0, h)],
            qubit_amplitudes(0.37, 2.1),
        ]
    }

    #[test]
    fn compile_examples() {
        assert_eq!(compile_sequence("A").unwrap(), vec![LogicalGate::T, LogicalGate::P, LogicalGate::H]);
        assert_eq!(compile_sequence("B").unwrap(), vec![LogicalGate::T, LogicalGate::H]);
        let full = compile_sequence(DEFAULT_SEQUENCE).unwrap();
        assert_eq!(full.len(), 50);
        assert_eq!(gate_counts(&full), (20, 20, 10));
        assert!(compile_sequence("ABC").is_err());
        assert!(compile_sequence("").is_err());
        let ends = composite_ends(DEFAULT_SEQUENCE).unwrap();
        assert_eq!(ends.len(), 20);
        assert_eq!(ends[9], 25);
        assert_eq!(ends[19], 50);
    }

    #[test]
    fn transversal_cliffords_are_logical() {
        for psi in basis_inputs() {
            for g in [LogicalGate::H, LogicalGate::P] {
                let mut s = encode_qubit(psi).unwrap();
                apply_logical_clifford(&mut s, g, &mut Executor::noiseless(0)).unwrap();
                let expect = encode_qubit(ideal_target(&[g], psi)).unwrap();
                assert!((fid(&s, &expect) - 1.0).abs() < 1e-10, "{g}");
            }
        }
    }

    #[test]
    fn clifford_examples() {
        let mut exec = Executor::noiseless(0);
        let mut s = code::encode_ideal(0.0, 0.0).unwrap();
        apply_logical_clifford(&mut s, LogicalGate::H, &mut exec).unwrap();
        assert!((fid(&s, &code::encode_ideal(FRAC_PI_4, 0.0).unwrap()) - 1.0).abs() < 1e-10);
        apply_logical_clifford(&mut s, LogicalGate::P, &mut exec).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus_i = encode_qubit([C64::new(h, 0.0), C64::new(0.0, h)]).unwrap();
        assert!((fid(&s, &plus_i) - 1.0).abs() < 1e-10);
        let psi = code::encode_ideal(0.9, 0.4).unwrap();
        let mut t = psi.clone();
        apply_logical_clifford(&mut t, LogicalGate::H, &mut exec).unwrap();
        apply_logical_clifford(&mut t, LogicalGate::H, &mut exec).unwrap();
        assert!((fid(&t, &psi) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transversal_gates_do_not_spread() {
        for j in 0..N {
            for op in Pauli::NON_IDENTITY {
                let mut s = code::encode_ideal(0.3, 0.8).unwrap();
                s.apply_pauli(&PauliString::single(N, j, op)).unwrap();
                apply_logical_clifford(&mut s, LogicalGate::H, &mut Executor::noiseless(0)).unwrap();
                let mut clean = code::encode_ideal(0.3, 0.8).unwrap();
                apply_logical_clifford(&mut clean, LogicalGate::H, &mut Executor::noiseless(0)).unwrap();
                let swapped = match op {
                    Pauli::X => Pauli::Z,
                    Pauli::Z => Pauli::X,
                    other => other,
                };
                clean.apply_pauli(&PauliString::single(N, j, swapped)).unwrap();
                assert!((fid(&s, &clean) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn t_gadget_both_branches() {
        for verify in [false, true] {
            for psi in basis_inputs() {
                let expect = encode_qubit(ideal_target(&[LogicalGate::T], psi)).unwrap();
                let mut seen = [false; 2];
                for seed in 0..12 {
                    let mut s = encode_qubit(psi).unwrap();
                    let mut exec = Executor::noiseless(seed);
                    let out = apply_logical_t(&mut s, &mut exec, verify).unwrap();
                    seen[out.outcome as usize] = true;
                    assert_eq!(out.retries, 0);
                    assert!((fid(&s, &expect) - 1.0).abs() < 1e-10, "seed {seed} outcome {}", out.outcome);
                    assert_eq!(s.labels(), code::data_roles().as_slice());
                }
                assert!(seen[0] && seen[1], "both outcomes should occur");
            }
        }
    }

    #[test]
    fn t_twice_is_p() {
        let mut a = code::encode_ideal(FRAC_PI_4, 0.0).unwrap();
        let mut exec = Executor::noiseless(4);
        apply_logical_t(&mut a, &mut exec, false).unwrap();
        apply_logical_t(&mut a, &mut exec, false).unwrap();
        let mut b = code::encode_ideal(FRAC_PI_4, 0.0).unwrap();
        apply_logical_clifford(&mut b, LogicalGate::P, &mut exec).unwrap();
        assert!((fid(&a, &b) - 1.0).abs() < 1e-10);
    }
}
