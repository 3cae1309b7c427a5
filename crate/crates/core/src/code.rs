//! The [[7,1,3]] code: generators, logical operators, encoder, lookup
//! decoder and noiseless decode/correction used for scoring.
//!
//! Parity-check rows (position 0 leftmost):
//!
//! ```text
//! row 0: 0111100
//! row 1: 1011010
//! row 2: 1101001
//! ```
//!
//! Qubit `j`'s column read as a 3-bit number (row 0 most significant) is
//! `[3, 5, 6, 7, 4, 2, 1][j]`. Qubits 4, 5, 6 appear in exactly one row each
//! and serve as pivots of the encoder.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{Executor, InitPurpose};
use crate::pauli::{Pauli, PauliString};
use crate::state::{Basis, Ensemble, Gate, QuantumState, Role};

pub const N: usize = 7;

pub const CHECK_ROWS: [&str; 3] = ["0111100", "1011010", "1101001"];

/// Column value of each qubit (row 0 is the most significant bit).
pub const COLUMNS: [u8; N] = [3, 5, 6, 7, 4, 2, 1];

/// Inverse of [`COLUMNS`]: `QUBIT_OF_COLUMN[c]` is the qubit with column `c`.
pub const QUBIT_OF_COLUMN: [Option<usize>; 8] = {
    let mut t = [None; 8];
    let mut j = 0;
    while j < N {
        t[COLUMNS[j] as usize] = Some(j);
        j += 1;
    }
    t
};

/// Support mask of parity-check row `i` (bit `j` is qubit `j`).
pub fn row_mask(i: usize) -> u32 {
    (0..N).filter(|&j| COLUMNS[j] >> (2 - i) & 1 == 1).fold(0, |m, j| m | 1 << j)
}

/// Support positions of parity-check row `i`.
pub fn row_support(i: usize) -> Vec<usize> {
    (0..N).filter(|&j| row_mask(i) >> j & 1 == 1).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodeDefinition {
    pub x_stabilizers: [PauliString; 3],
    pub z_stabilizers: [PauliString; 3],
    pub logical_x: PauliString,
    pub logical_z: PauliString,
}

impl CodeDefinition {
    pub fn steane() -> Self {
        let xs = [0, 1, 2].map(|i| PauliString::from_masks(N, row_mask(i), 0));
        let zs = [0, 1, 2].map(|i| PauliString::from_masks(N, 0, row_mask(i)));
        CodeDefinition {
            x_stabilizers: xs,
            z_stabilizers: zs,
            logical_x: PauliString::from_masks(N, 0x7f, 0),
            logical_z: PauliString::from_masks(N, 0, 0x7f),
        }
    }

    /// Generators in measurement order: Z-type first, then X-type.
    pub fn generators(&self) -> [PauliString; 6] {
        let (z, x) = (&self.z_stabilizers, &self.x_stabilizers);
        [z[0], z[1], z[2], x[0], x[1], x[2]]
    }

    /// All 64 elements of the stabilizer group (phase +1).
    pub fn stabilizer_group(&self) -> Vec<PauliString> {
        let g = self.generators();
        (0..64u32)
            .map(|m| {
                (0..6).filter(|i| m >> i & 1 == 1).fold(PauliString::identity(N), |acc, i| acc * g[i])
            })
            .map(|p| p.with_phase(crate::pauli::Phase::ONE))
            .collect()
    }

    /// Text table of generators and logical operators.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for (i, g) in self.generators().iter().enumerate() {
            let kind = if i < 3 { "Z" } else { "X" };
            out.push_str(&format!("g{} {kind} {g}\n", i + 1));
        }
        out.push_str(&format!("XL   {}\nZL   {}\n", self.logical_x, self.logical_z));
        out
    }
}

/// Shared instance.
pub fn code() -> &'static CodeDefinition {
    static CODE: OnceLock<CodeDefinition> = OnceLock::new();
    CODE.get_or_init(CodeDefinition::steane)
}

/// Syndrome bits. `z_bits` come from the Z-type generators and flag bit
/// flips; `x_bits` come from the X-type generators and flag phase flips.
/// Bit 2 of each half belongs to row 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syndrome {
    pub z_bits: u8,
    pub x_bits: u8,
}

impl Syndrome {
    pub const TRIVIAL: Syndrome = Syndrome { z_bits: 0, x_bits: 0 };

    pub fn from_index(i: u8) -> Self {
        Syndrome { z_bits: i >> 3 & 7, x_bits: i & 7 }
    }

    pub fn index(self) -> u8 {
        self.z_bits << 3 | self.x_bits
    }

    pub fn is_trivial(self) -> bool {
        self == Self::TRIVIAL
    }

    /// Syndrome from six generator outcomes in measurement order.
    pub fn from_generator_bits(bits: [u8; 6]) -> Self {
        let half = |b: &[u8]| b[0] << 2 | b[1] << 1 | b[2];
        Syndrome { z_bits: half(&bits[..3]), x_bits: half(&bits[3..]) }
    }

    /// Outcome bit of generator `g` (measurement order).
    pub fn generator_bit(self, g: usize) -> u8 {
        if g < 3 {
            self.z_bits >> (2 - g) & 1
        } else {
            self.x_bits >> (5 - g) & 1
        }
    }
}

impl std::ops::BitXor for Syndrome {
    type Output = Syndrome;
    fn bitxor(self, rhs: Syndrome) -> Syndrome {
        Syndrome { z_bits: self.z_bits ^ rhs.z_bits, x_bits: self.x_bits ^ rhs.x_bits }
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:03b},{:03b})", self.z_bits, self.x_bits)
    }
}

pub fn ideal_syndrome(error: &PauliString) -> Syndrome {
    let g = code().generators();
    let mut bits = [0u8; 6];
    for (i, gen) in g.iter().enumerate() {
        bits[i] = !gen.commutes_with(error) as u8;
    }
    Syndrome::from_generator_bits(bits)
}

/// Three-bit syndrome of a classical 7-bit word (bit `j` is qubit `j`).
pub fn classical_syndrome(bits: u32) -> u8 {
    (0..N).filter(|&j| bits >> j & 1 == 1).fold(0, |s, j| s ^ COLUMNS[j])
}

/// Corrects at most one flipped bit. Returns the corrected word and the syndrome.
pub fn hamming_correct(bits: u32) -> (u32, u8) {
    let s = classical_syndrome(bits);
    match QUBIT_OF_COLUMN[s as usize] {
        Some(j) => (bits ^ 1 << j, s),
        None => (bits, s),
    }
}

/// Logical value of a transversal Z (or X after Hadamards) readout.
pub fn logical_readout(bits: u32) -> u8 {
    (hamming_correct(bits).0.count_ones() % 2) as u8
}

/// Recovery for every syndrome, derived from the parity-check columns.
pub struct LookupDecoder {
    table: [PauliString; 64],
}

impl LookupDecoder {
    pub fn build() -> Self {
        let mut table = [PauliString::identity(N); 64];
        for (i, entry) in table.iter_mut().enumerate() {
            let s = Syndrome::from_index(i as u8);
            let mut p = PauliString::identity(N);
            if let Some(j) = QUBIT_OF_COLUMN[s.z_bits as usize] {
                p.set(j, Pauli::X);
            }
            if let Some(j) = QUBIT_OF_COLUMN[s.x_bits as usize] {
                let (_, op) = p.get(j).mul_with_phase(Pauli::Z);
                p.set(j, op);
            }
            *entry = p;
        }
        LookupDecoder { table }
    }

    pub fn decode(&self, s: Syndrome) -> PauliString {
        self.table[s.index() as usize]
    }
}

pub fn decoder() -> &'static LookupDecoder {
    static DEC: OnceLock<LookupDecoder> = OnceLock::new();
    DEC.get_or_init(LookupDecoder::build)
}

pub fn decode_lookup(s: Syndrome) -> PauliString {
    decoder().decode(s)
}

/// Smallest weight of `e · S` over the stabilizer group.
pub fn min_weight_mod_stabilizer(e: &PauliString) -> u32 {
    code().stabilizer_group().iter().map(|s| (*e * *s).weight()).min().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalAncillaKind {
    ZeroL,
    PlusL,
    Theta,
}

const PIVOTS: [usize; 3] = [4, 5, 6];

/// The encoder body shared by all kinds: copy the input on qubit 0 onto
/// qubits 1 and 2, raise the pivots, fan out along the rows.
fn encoder_body(copy_input: bool, offset: usize) -> Vec<Gate> {
    let mut g = Vec::with_capacity(14);
    if copy_input {
        g.push(Gate::Cnot { control: offset, target: offset + 1 });
        g.push(Gate::Cnot { control: offset, target: offset + 2 });
    }
    for p in PIVOTS {
        g.push(Gate::H(offset + p));
    }
    for (row, pivot) in PIVOTS.iter().enumerate() {
        for t in row_support(row) {
            if t != *pivot {
                g.push(Gate::Cnot { control: offset + pivot, target: offset + t });
            }
        }
    }
    g
}

/// Gates preparing `kind` from `|0⟩^7` on positions `offset..offset+7`.
pub fn encoder_gates(kind: LogicalAncillaKind, offset: usize) -> Vec<Gate> {
    let mut g = match kind {
        LogicalAncillaKind::ZeroL => vec![],
        LogicalAncillaKind::PlusL => vec![Gate::H(offset)],
        LogicalAncillaKind::Theta => vec![Gate::H(offset), Gate::T(offset)],
    };
    g.extend(encoder_body(kind != LogicalAncillaKind::ZeroL, offset));
    g
}

fn apply_noiseless(state: &mut QuantumState, gates: &[Gate]) -> Result<()> {
    gates.iter().try_for_each(|&g| state.apply_gate(g))
}

pub fn data_roles() -> Vec<Role> {
    (0..N as u8).map(Role::Data).collect()
}

/// Encodes the single-qubit state `amp[0]|0⟩ + amp[1]|1⟩`, noiselessly.
pub fn encode_qubit(amp: [C64; 2]) -> Result<QuantumState> {
    let mut amps = vec![C64::new(0.0, 0.0); 1 << N];
    amps[0] = amp[0];
    amps[1 << (N - 1)] = amp[1];
    let mut s = QuantumState::from_amplitudes(amps, data_roles())?;
    apply_noiseless(&mut s, &encoder_body(true, 0))?;
    Ok(s)
}

/// `cos α|0⟩ + e^{iβ} sin α|1⟩`.
pub fn qubit_amplitudes(alpha: f64, beta: f64) -> [C64; 2] {
    [C64::new(alpha.cos(), 0.0), C64::from_polar(alpha.sin(), beta)]
}

pub fn encode_ideal(alpha: f64, beta: f64) -> Result<QuantumState> {
    encode_qubit(qubit_amplitudes(alpha, beta))
}

/// Noisy preparation of a fresh 7-qubit block on its own register.
pub fn prepare_logical_noisy(exec: &mut Executor, kind: LogicalAncillaKind, purpose: InitPurpose) -> Result<QuantumState> {
    let roles: Vec<Role> = (0..N).map(|_| exec.fresh_ancilla()).collect();
    let mut s = QuantumState::empty();
    exec.init(&mut s, &roles, &[Basis::Zero; N], purpose)?;
    exec.gates(&mut s, &encoder_gates(kind, 0))?;
    Ok(s)
}

fn check_block(state: &QuantumState) -> Result<()> {
    if state.num_qubits() != N {
        return Err(Error::LengthMismatch { expected: N, found: state.num_qubits() });
    }
    Ok(())
}

/// Runs the inverse encoder; the logical qubit ends on position 0.
pub fn unencode(state: &QuantumState) -> Result<QuantumState> {
    check_block(state)?;
    let mut s = state.clone();
    let body = encoder_body(true, 0);
    apply_noiseless(&mut s, &body.iter().rev().copied().collect::<Vec<_>>())?;
    Ok(s)
}

/// Decoded single-qubit density matrix of a weighted ensemble.
pub fn perfect_decode(ensemble: &Ensemble) -> Result<[[C64; 2]; 2]> {
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for (w, s) in &ensemble.members {
        let r = unencode(s)?.reduced_density(0)?;
        for i in 0..2 {
            for j in 0..2 {
                rho[i][j] += r[i][j] * *w;
            }
        }
    }
    Ok(rho)
}

/// `⟨ψ|ρ|ψ⟩` for a single qubit.
pub fn qubit_fidelity(rho: &[[C64; 2]; 2], psi: [C64; 2]) -> f64 {
    let mut f = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            f += psi[i].conj() * rho[i][j] * psi[j];
        }
    }
    f.re
}

const BRANCH_TOL: f64 = 1e-16;

/// Projects onto every syndrome sector and applies the lookup recovery.
/// Returns `(probability, syndrome, corrected state)` for each sector hit.
pub fn perfect_final_sm_branches(state: &QuantumState) -> Result<Vec<(f64, Syndrome, QuantumState)>> {
    check_block(state)?;
    let gens = code().generators();
    let mut branches = vec![(state.clone(), [0u8; 6])];
    for (i, g) in gens.iter().enumerate() {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (psi, bits) in branches {
            let mut g_psi = psi.clone();
            g_psi.apply_pauli(g)?;
            for (sign, bit) in [(1.0, 0u8), (-1.0, 1u8)] {
                let mut part = psi.clone();
                part.add_scaled(&g_psi, C64::new(sign, 0.0))?;
                part.scale(C64::new(0.5, 0.0));
                if part.norm().powi(2) > BRANCH_TOL {
                    let mut b = bits;
                    b[i] = bit;
                    next.push((part, b));
                }
            }
        }
        branches = next;
    }
    let mut out = Vec::with_capacity(branches.len());
    for (mut psi, bits) in branches {
        let p = psi.norm().powi(2);
        psi.scale(C64::new(1.0 / p.sqrt(), 0.0));
        let s = Syndrome::from_generator_bits(bits);
        psi.apply_pauli(&decode_lookup(s))?;
        out.push((p, s, psi));
    }
    Ok(out)
}

/// Noiseless syndrome measurement and recovery, averaged over outcomes.
pub fn perfect_final_sm_ensemble(state: &QuantumState) -> Result<Ensemble> {
    Ok(Ensemble { members: perfect_final_sm_branches(state)?.into_iter().map(|(p, _, s)| (p, s)).collect() })
}

/// Single-shot noiseless syndrome measurement and recovery, sampled with `draw`.
pub fn perfect_final_sm(state: &QuantumState, draw: f64) -> Result<(Syndrome, QuantumState)> {
    let branches = perfect_final_sm_branches(state)?;
    let total: f64 = branches.iter().map(|b| b.0).sum();
    let mut acc = 0.0;
    let last = branches.len() - 1;
    for (k, (p, s, psi)) in branches.into_iter().enumerate() {
        acc += p;
        if draw * total < acc || k == last {
            return Ok((s, psi));
        }
    }
    unreachable!("at least one syndrome branch has weight")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::overlap_fidelity;
    use proptest::prelude::*;

    fn weight_one() -> Vec<PauliString> {
        (0..N).flat_map(|j| Pauli::NON_IDENTITY.map(|op| PauliString::single(N, j, op))).collect()
    }

    #[test]
    fn generator_structure() {
        let c = code();
        let g = c.generators();
        for a in &g {
            assert_eq!(a.weight(), 4);
            for b in &g {
                assert!(a.commutes_with(b));
            }
            assert!(a.commutes_with(&c.logical_x) && a.commutes_with(&c.logical_z));
        }
        assert!(!c.logical_x.commutes_with(&c.logical_z));
        assert_eq!(c.generators()[0].to_string(), "IZZZZII");
        assert_eq!(c.generators()[3].to_string(), "IXXXXII");
    }

    #[test]
    fn distance_is_three() {
        let stab = code().stabilizer_group();
        let g = code().generators();
        for x in 0u32..128 {
            for z in 0u32..128 {
                let p = PauliString::from_masks(N, x, z);
                let w = p.weight();
                if w == 0 || w > 2 {
                    continue;
                }
                // weight <= 2 Paulis commuting with everything must not exist
                let commutes_all = g.iter().all(|s| s.commutes_with(&p));
                assert!(!commutes_all, "{p} is undetectable");
                assert!(!stab.iter().any(|s| s.same_operator(&p)));
            }
        }
    }

    #[test]
    fn syndrome_examples() {
        assert!(ideal_syndrome(&PauliString::identity(N)).is_trivial());
        for j in 0..N {
            let sx = ideal_syndrome(&PauliString::single(N, j, Pauli::X));
            assert_eq!(sx, Syndrome { z_bits: COLUMNS[j], x_bits: 0 });
            let sz = ideal_syndrome(&PauliString::single(N, j, Pauli::Z));
            assert_eq!(sz, Syndrome { z_bits: 0, x_bits: COLUMNS[j] });
            let sy = ideal_syndrome(&PauliString::single(N, j, Pauli::Y));
            assert_eq!(sy, Syndrome { z_bits: COLUMNS[j], x_bits: COLUMNS[j] });
        }
    }

    #[test]
    fn decoder_inverts_weight_one() {
        assert!(decode_lookup(Syndrome::TRIVIAL).is_identity());
        let stab = code().stabilizer_group();
        let mut seen = std::collections::HashSet::new();
        for e in weight_one() {
            let s = ideal_syndrome(&e);
            assert!(seen.insert(s), "syndrome collision");
            let r = decode_lookup(s);
            assert!(r.same_operator(&e));
            let residual = r * e;
            assert!(stab.iter().any(|g| g.same_operator(&residual)));
        }
        assert_eq!(decode_lookup(ideal_syndrome(&"IIIXIII".parse().unwrap())).to_string(), "IIIXIII");
    }

    #[test]
    fn every_syndrome_is_decoded_consistently() {
        for i in 0..64u8 {
            let s = Syndrome::from_index(i);
            assert_eq!(ideal_syndrome(&decode_lookup(s)), s);
            assert!(decode_lookup(s).weight() <= 2);
        }
    }

    #[test]
    fn hamming_readout() {
        let cw = row_mask(0) ^ row_mask(2);
        assert_eq!(classical_syndrome(cw), 0);
        assert_eq!(logical_readout(cw), 0);
        assert_eq!(logical_readout(cw ^ 0x7f), 1);
        for j in 0..N {
            assert_eq!(logical_readout(cw ^ 1 << j), 0);
            assert_eq!(logical_readout(cw ^ 0x7f ^ 1 << j), 1);
        }
    }

    fn expectation(s: &QuantumState, p: &PauliString) -> f64 {
        let mut t = s.clone();
        t.apply_pauli(p).unwrap();
        s.inner(&t).unwrap().re
    }

    #[test]
    fn encoded_basis_states() {
        let c = code();
        let zero = encode_ideal(0.0, 0.0).unwrap();
        for g in c.generators() {
            assert!((expectation(&zero, &g) - 1.0).abs() < 1e-12);
        }
        assert!((expectation(&zero, &c.logical_z) - 1.0).abs() < 1e-12);
        let one = encode_ideal(std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        assert!((expectation(&one, &c.logical_z) + 1.0).abs() < 1e-12);
        let plus = encode_ideal(std::f64::consts::FRAC_PI_4, 0.0).unwrap();
        assert!((expectation(&plus, &c.logical_x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_preparation_matches_ideal() {
        let mut exec = Executor::noiseless(0);
        let f = |s: &QuantumState, t: &QuantumState| {
            let a = QuantumState::from_amplitudes(s.amplitudes().to_vec(), data_roles()).unwrap();
            overlap_fidelity(&a, t).unwrap()
        };
        use std::f64::consts::FRAC_PI_4;
        let zero = prepare_logical_noisy(&mut exec, LogicalAncillaKind::ZeroL, InitPurpose::Syndrome).unwrap();
        assert!((f(&zero, &encode_ideal(0.0, 0.0).unwrap()) - 1.0).abs() < 1e-12);
        let plus = prepare_logical_noisy(&mut exec, LogicalAncillaKind::PlusL, InitPurpose::Syndrome).unwrap();
        assert!((f(&plus, &encode_ideal(FRAC_PI_4, 0.0).unwrap()) - 1.0).abs() < 1e-12);
        let theta = prepare_logical_noisy(&mut exec, LogicalAncillaKind::Theta, InitPurpose::Magic).unwrap();
        assert!((f(&theta, &encode_ideal(FRAC_PI_4, FRAC_PI_4).unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decode_examples() {
        let (a, b) = (0.4, 1.1);
        let rho = perfect_decode(&Ensemble::pure(encode_ideal(a, b).unwrap())).unwrap();
        assert!((qubit_fidelity(&rho, qubit_amplitudes(a, b)) - 1.0).abs() < 1e-12);
        let tr = rho[0][0].re + rho[1][1].re;
        assert!((tr - 1.0).abs() < 1e-12);

        let mut flipped = encode_ideal(0.0, 0.0).unwrap();
        flipped.apply_pauli(&code().logical_x).unwrap();
        let rho = perfect_decode(&Ensemble::pure(flipped)).unwrap();
        assert!(qubit_fidelity(&rho, qubit_amplitudes(0.0, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn decode_of_single_x_errors() {
        // The inverse encoder maps X_j on |0_L⟩ to a product state; the
        // logical qubit flips only when that X lands on position 0.
        for j in 0..N {
            let mut s = encode_ideal(0.0, 0.0).unwrap();
            s.apply_single_pauli(j, Pauli::X).unwrap();
            let u = unencode(&s).unwrap();
            let nonzero: Vec<usize> = (0..1 << N).filter(|&i| u.amplitudes()[i].norm() > 1e-9).collect();
            assert_eq!(nonzero.len(), 1);
            let flipped = nonzero[0] >> (N - 1) & 1;
            let rho = perfect_decode(&Ensemble::pure(s)).unwrap();
            let f = qubit_fidelity(&rho, qubit_amplitudes(0.0, 0.0));
            assert!((f - (1 - flipped) as f64).abs() < 1e-12, "qubit {j}: {f}");
        }
    }

    #[test]
    fn perfect_sm_corrects_weight_one() {
        let psi = encode_ideal(0.7, 0.3).unwrap();
        let (s, out) = perfect_final_sm(&psi, 0.5).unwrap();
        assert!(s.is_trivial());
        assert!((overlap_fidelity(&out, &psi).unwrap() - 1.0).abs() < 1e-12);
        for e in weight_one() {
            let mut bad = psi.clone();
            bad.apply_pauli(&e).unwrap();
            let (s, out) = perfect_final_sm(&bad, 0.5).unwrap();
            assert_eq!(s, ideal_syndrome(&e));
            assert!((overlap_fidelity(&out, &psi).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn perfect_sm_on_weight_two() {
        // X1 X5 has the syndrome of X3 (columns 5 ^ 2 = 7), so the recovery
        // leaves X1 X3 X5, which is a logical X.
        let zero = encode_ideal(0.0, 0.0).unwrap();
        let mut bad = zero.clone();
        bad.apply_pauli(&"IXIIIXI".parse().unwrap()).unwrap();
        let (s, out) = perfect_final_sm(&bad, 0.1).unwrap();
        assert_eq!(s.z_bits, COLUMNS[3]);
        assert!(overlap_fidelity(&out, &zero).unwrap() < 1e-12);
    }

    proptest! {
        #[test]
        fn syndrome_is_linear(x1 in 0u32..128, z1 in 0u32..128, x2 in 0u32..128, z2 in 0u32..128) {
            let p = PauliString::from_masks(N, x1, z1);
            let q = PauliString::from_masks(N, x2, z2);
            prop_assert_eq!(ideal_syndrome(&(p * q)), ideal_syndrome(&p) ^ ideal_syndrome(&q));
        }

        #[test]
        fn syndrome_ignores_stabilizers(x in 0u32..128, z in 0u32..128, k in 0usize..64) {
            let p = PauliString::from_masks(N, x, z);
            let s = code().stabilizer_group()[k];
            prop_assert_eq!(ideal_syndrome(&(p * s)), ideal_syndrome(&p));
        }

        #[test]
        fn stabilizers_leave_states_alone(a in 0.0f64..3.0, b in 0.0f64..6.0, k in 0usize..64) {
            let psi = encode_ideal(a, b).unwrap();
            let mut t = psi.clone();
            t.apply_pauli(&code().stabilizer_group()[k]).unwrap();
            prop_assert!((overlap_fidelity(&psi, &t).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}
