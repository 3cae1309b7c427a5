//! Pure-state amplitude vectors over a growable register.
//!
//! Ordering convention: register position 0 is the leftmost tensor factor,
//! so in a register of `n` qubits position `k` is bit `n - 1 - k` of the
//! amplitude index. Attaching qubits appends them on the right.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Largest register the engine will build.
pub const MAX_QUBITS: usize = 21;

const DETACH_TOL: f64 = 1e-12;

/// What a register position is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Data(u8),
    Ancilla(u32),
    Verify(u32),
}

/// Single-qubit product states used for initialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Zero,
    One,
    Plus,
    Minus,
}

impl Basis {
    fn amplitudes(self) -> [C64; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            Basis::Zero => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            Basis::One => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            Basis::Plus => [C64::new(h, 0.0), C64::new(h, 0.0)],
            Basis::Minus => [C64::new(h, 0.0), C64::new(-h, 0.0)],
        }
    }
}

/// Elementary gates with their register positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    P(usize),
    PDag(usize),
    T(usize),
    TDag(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
    /// Controlled `P†X`; used to measure the Clifford stabilizer of the magic state.
    CPdagX { control: usize, target: usize },
}

impl Gate {
    /// Positions the gate acts on, in (control, target) order for two-qubit gates.
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q)
            | Gate::P(q)
            | Gate::PDag(q)
            | Gate::T(q)
            | Gate::TDag(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q) => (q, None),
            Gate::Cnot { control, target } | Gate::CPdagX { control, target } => (control, Some(target)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amps: Vec<C64>,
    labels: Vec<Role>,
}

impl QuantumState {
    /// The zero-qubit state (scalar 1). Registers are grown from here.
    pub fn empty() -> Self {
        QuantumState { amps: vec![C64::new(1.0, 0.0)], labels: Vec::new() }
    }

    pub fn product(roles: &[Role], basis: &[Basis]) -> Result<Self> {
        let mut s = QuantumState::empty();
        s.attach(roles, basis)?;
        Ok(s)
    }

    pub fn from_amplitudes(amps: Vec<C64>, labels: Vec<Role>) -> Result<Self> {
        if labels.len() > MAX_QUBITS {
            return Err(Error::RegisterCap { requested: labels.len(), cap: MAX_QUBITS });
        }
        if amps.len() != 1usize << labels.len() {
            return Err(Error::LengthMismatch { expected: 1 << labels.len(), found: amps.len() });
        }
        Ok(QuantumState { amps, labels })
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn labels(&self) -> &[Role] {
        &self.labels
    }

    pub fn relabel(&mut self, position: usize, role: Role) -> Result<()> {
        self.check(position)?;
        self.labels[position] = role;
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    #[inline]
    fn bit(&self, q: usize) -> usize {
        1usize << (self.labels.len() - 1 - q)
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.labels.len() {
            Err(Error::QubitOutOfRange { qubit: q, size: self.labels.len() })
        } else {
            Ok(())
        }
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        let (a, b) = gate.qubits();
        self.check(a)?;
        if let Some(b) = b {
            self.check(b)?;
            if a == b {
                return Err(Error::DuplicateTarget(a));
            }
        }
        let i = C64::new(0.0, 1.0);
        let w = C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        match gate {
            Gate::H(q) => self.hadamard(q),
            Gate::P(q) => self.phase_on_one(q, i),
            Gate::PDag(q) => self.phase_on_one(q, -i),
            Gate::T(q) => self.phase_on_one(q, w),
            Gate::TDag(q) => self.phase_on_one(q, w.conj()),
            Gate::X(q) => self.apply_single_pauli(q, Pauli::X)?,
            Gate::Y(q) => self.apply_single_pauli(q, Pauli::Y)?,
            Gate::Z(q) => self.apply_single_pauli(q, Pauli::Z)?,
            Gate::Cnot { control, target } => self.cnot(control, target),
            Gate::CPdagX { control, target } => self.cpdagx(control, target),
        }
        Ok(())
    }

    /// Applies an arbitrary 2x2 unitary `[[m00, m01], [m10, m11]]` to position `q`.
    pub fn apply_unitary_1q(&mut self, q: usize, m: [[C64; 2]; 2]) -> Result<()> {
        self.check(q)?;
        let bit = self.bit(q);
        for base in (0..self.amps.len()).step_by(2 * bit) {
            for i in base..base + bit {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    fn hadamard(&mut self, q: usize) {
        let bit = self.bit(q);
        for base in (0..self.amps.len()).step_by(2 * bit) {
            for i in base..base + bit {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = (a0 + a1) * FRAC_1_SQRT_2;
                self.amps[i | bit] = (a0 - a1) * FRAC_1_SQRT_2;
            }
        }
    }

    fn phase_on_one(&mut self, q: usize, phase: C64) {
        let bit = self.bit(q);
        for base in (bit..self.amps.len()).step_by(2 * bit) {
            for a in &mut self.amps[base..base + bit] {
                *a *= phase;
            }
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let cb = self.bit(control);
        let tb = self.bit(target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    fn cpdagx(&mut self, control: usize, target: usize) {
        let cb = self.bit(control);
        let tb = self.bit(target);
        let minus_i = C64::new(0.0, -1.0);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | tb];
                self.amps[i] = a1;
                self.amps[i | tb] = minus_i * a0;
            }
        }
    }

    pub fn apply_single_pauli(&mut self, q: usize, op: Pauli) -> Result<()> {
        self.check(q)?;
        let bit = self.bit(q);
        match op {
            Pauli::I => {}
            Pauli::X => {
                for base in (0..self.amps.len()).step_by(2 * bit) {
                    for i in base..base + bit {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Pauli::Z => self.phase_on_one(q, C64::new(-1.0, 0.0)),
            Pauli::Y => {
                // Y|0> = i|1>, Y|1> = -i|0>
                let i_ = C64::new(0.0, 1.0);
                for base in (0..self.amps.len()).step_by(2 * bit) {
                    for i in base..base + bit {
                        let a0 = self.amps[i];
                        let a1 = self.amps[i | bit];
                        self.amps[i] = -i_ * a1;
                        self.amps[i | bit] = i_ * a0;
                    }
                }
            }
        }
        Ok(())
    }

    /// Multiplies the state by a Pauli operator, phase included.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        let n = self.num_qubits();
        if p.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: p.len() });
        }
        if p.is_identity() && p.phase() == crate::pauli::Phase::ONE {
            return Ok(());
        }
        let to_index = |mask: u32| -> usize {
            if n == 0 {
                0
            } else {
                (mask.reverse_bits() >> (32 - n)) as usize
            }
        };
        let xbits = to_index(p.x_mask());
        let zbits = to_index(p.z_mask());
        let y_count = (p.x_mask() & p.z_mask()).count_ones();
        // Y = iXZ, so the string is i^{#Y} X^x Z^z with Z acting first.
        let global = p.phase().to_complex() * crate::pauli::Phase::from_power(y_count).to_complex();
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let sign = if (i & zbits).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[i ^ xbits] = a * global * sign;
        }
        self.amps = out;
        Ok(())
    }

    fn branch_probabilities(&self, q: usize) -> (f64, f64) {
        let bit = self.bit(q);
        let mut p0 = 0.0;
        let mut p1 = 0.0;
        for base in (0..self.amps.len()).step_by(2 * bit) {
            p0 += self.amps[base..base + bit].iter().map(|a| a.norm_sqr()).sum::<f64>();
            p1 += self.amps[base + bit..base + 2 * bit].iter().map(|a| a.norm_sqr()).sum::<f64>();
        }
        (p0, p1)
    }

    /// Probability of reading 1 on position `q`.
    pub fn prob_one(&self, q: usize) -> Result<f64> {
        self.check(q)?;
        let (p0, p1) = self.branch_probabilities(q);
        Ok(p1 / (p0 + p1))
    }

    fn pick_outcome(&self, q: usize, draw: f64) -> Result<(u8, f64)> {
        let (p0, p1) = self.branch_probabilities(q);
        let total = p0 + p1;
        let outcome = if draw * total < p0 { 0 } else { 1 };
        let chosen = if outcome == 0 { p0 } else { p1 };
        if chosen <= 0.0 || !chosen.is_finite() {
            return Err(Error::DegenerateBranch(q));
        }
        Ok((outcome, chosen))
    }

    /// Z-basis measurement; `draw` is a uniform sample in `[0, 1)`.
    /// The measured qubit stays in the register, collapsed.
    pub fn measure_z(&mut self, q: usize, draw: f64) -> Result<u8> {
        self.check(q)?;
        let (outcome, prob) = self.pick_outcome(q, draw)?;
        let bit = self.bit(q);
        let scale = 1.0 / prob.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit != 0) as u8) == outcome {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        Ok(outcome)
    }

    /// Measures position `q` in the Z basis and removes it from the register.
    pub fn measure_and_detach(&mut self, q: usize, draw: f64) -> Result<u8> {
        self.check(q)?;
        let (outcome, prob) = self.pick_outcome(q, draw)?;
        let scale = 1.0 / prob.sqrt();
        self.remove_qubit(q, outcome, scale);
        Ok(outcome)
    }

    fn remove_qubit(&mut self, q: usize, value: u8, scale: f64) {
        let bit = self.bit(q);
        let keep = if value == 1 { bit } else { 0 };
        let mut out = Vec::with_capacity(self.amps.len() / 2);
        for base in (0..self.amps.len()).step_by(2 * bit) {
            out.extend(self.amps[base + keep..base + keep + bit].iter().map(|a| a * scale));
        }
        self.amps = out;
        self.labels.remove(q);
    }

    /// Removes qubits that sit in a computational basis state (e.g. just measured).
    pub fn detach_measured(&mut self, positions: &[usize]) -> Result<()> {
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &q in &sorted {
            self.check(q)?;
        }
        for &q in sorted.iter().rev() {
            let (p0, p1) = self.branch_probabilities(q);
            let value = if p1 <= DETACH_TOL * (p0 + p1) {
                0
            } else if p0 <= DETACH_TOL * (p0 + p1) {
                1
            } else {
                return Err(Error::EntangledDetach(q));
            };
            let kept = if value == 0 { p0 } else { p1 };
            self.remove_qubit(q, value, 1.0 / kept.sqrt());
        }
        Ok(())
    }

    /// Appends qubits in the given product states.
    pub fn attach(&mut self, roles: &[Role], basis: &[Basis]) -> Result<()> {
        if roles.len() != basis.len() {
            return Err(Error::LengthMismatch { expected: roles.len(), found: basis.len() });
        }
        let requested = self.num_qubits() + roles.len();
        if requested > MAX_QUBITS {
            return Err(Error::RegisterCap { requested, cap: MAX_QUBITS });
        }
        for &b in basis {
            let [c0, c1] = b.amplitudes();
            let mut out = Vec::with_capacity(self.amps.len() * 2);
            for &a in &self.amps {
                out.push(a * c0);
                out.push(a * c1);
            }
            self.amps = out;
        }
        self.labels.extend_from_slice(roles);
        Ok(())
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        let requested = self.num_qubits() + other.num_qubits();
        if requested > MAX_QUBITS {
            return Err(Error::RegisterCap { requested, cap: MAX_QUBITS });
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for &a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(QuantumState { amps, labels })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::LengthMismatch { expected: self.num_qubits(), found: other.num_qubits() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Reduced 2x2 density matrix of one position.
    pub fn reduced_density(&self, q: usize) -> Result<[[C64; 2]; 2]> {
        self.check(q)?;
        let bit = self.bit(q);
        let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
        for base in (0..self.amps.len()).step_by(2 * bit) {
            for i in base..base + bit {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                rho[0][0] += a0 * a0.conj();
                rho[0][1] += a0 * a1.conj();
                rho[1][0] += a1 * a0.conj();
                rho[1][1] += a1 * a1.conj();
            }
        }
        Ok(rho)
    }

    pub fn scale(&mut self, factor: C64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// Adds `other` scaled by `factor` (amplitude-wise); used for projectors.
    pub fn add_scaled(&mut self, other: &QuantumState, factor: C64) -> Result<()> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::LengthMismatch { expected: self.num_qubits(), found: other.num_qubits() });
        }
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += b * factor;
        }
        Ok(())
    }
}

/// Weighted collection of pure states, standing in for a density matrix.
#[derive(Clone, Debug, Default)]
pub struct Ensemble {
    pub members: Vec<(f64, QuantumState)>,
}

impl Ensemble {
    pub fn pure(state: QuantumState) -> Self {
        Ensemble { members: vec![(1.0, state)] }
    }

    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|(w, _)| w).sum()
    }

    /// `Σ_k w_k |<ψ_k|b>|²`.
    pub fn fidelity_with(&self, b: &QuantumState) -> Result<f64> {
        self.members.iter().try_fold(0.0, |acc, (w, s)| Ok(acc + w * overlap_fidelity(s, b)?))
    }
}

/// `|<a|b>|²` for pure states.
pub fn overlap_fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn data(n: usize) -> Vec<Role> {
        (0..n as u8).map(Role::Data).collect()
    }

    fn basis_state(n: usize, index: usize) -> QuantumState {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        QuantumState::from_amplitudes(amps, data(n)).unwrap()
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = basis_state(1, 0);
        s.apply_gate(Gate::H(0)).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!(close(s.amplitudes()[0], C64::new(h, 0.0)));
        assert!(close(s.amplitudes()[1], C64::new(h, 0.0)));
    }

    #[test]
    fn cnot_on_one_zero() {
        // position 0 is the leftmost factor: |10> has index 0b10
        let mut s = basis_state(2, 0b10);
        s.apply_gate(Gate::Cnot { control: 0, target: 1 }).unwrap();
        assert!(close(s.amplitudes()[0b11], C64::new(1.0, 0.0)));
    }

    #[test]
    fn t_on_one() {
        let mut s = basis_state(1, 1);
        s.apply_gate(Gate::T(0)).unwrap();
        assert!(close(s.amplitudes()[1], C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)));
    }

    #[test]
    fn gate_errors() {
        let mut s = basis_state(2, 0);
        assert!(matches!(s.apply_gate(Gate::H(2)), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(s.apply_gate(Gate::Cnot { control: 1, target: 1 }), Err(Error::DuplicateTarget(1))));
    }

    #[test]
    fn pauli_examples() {
        let mut s = basis_state(2, 0);
        s.apply_pauli(&"XI".parse().unwrap()).unwrap();
        assert!(close(s.amplitudes()[0b10], C64::new(1.0, 0.0)));

        let mut plus = QuantumState::product(&data(1), &[Basis::Plus]).unwrap();
        plus.apply_pauli(&"Z".parse().unwrap()).unwrap();
        let minus = QuantumState::product(&data(1), &[Basis::Minus]).unwrap();
        assert!((overlap_fidelity(&plus, &minus).unwrap() - 1.0).abs() < 1e-12);

        let mut zero = basis_state(1, 0);
        zero.apply_pauli(&"Y".parse().unwrap()).unwrap();
        assert!(close(zero.amplitudes()[1], C64::new(0.0, 1.0)));

        assert!(matches!(zero.apply_pauli(&"YY".parse().unwrap()), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn apply_pauli_matches_single_qubit_path() {
        let mut a = QuantumState::product(&data(3), &[Basis::Plus, Basis::Zero, Basis::Minus]).unwrap();
        a.apply_gate(Gate::Cnot { control: 0, target: 1 }).unwrap();
        a.apply_gate(Gate::T(2)).unwrap();
        let mut b = a.clone();
        a.apply_pauli(&"YXZ".parse().unwrap()).unwrap();
        b.apply_single_pauli(0, Pauli::Y).unwrap();
        b.apply_single_pauli(1, Pauli::X).unwrap();
        b.apply_single_pauli(2, Pauli::Z).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!(close(*x, *y));
        }
    }

    #[test]
    fn measurement_examples() {
        let mut zero = basis_state(1, 0);
        assert_eq!(zero.measure_z(0, 0.999).unwrap(), 0);

        let mut plus = QuantumState::product(&data(1), &[Basis::Plus]).unwrap();
        assert_eq!(plus.measure_z(0, 0.3).unwrap(), 0);
        assert!(close(plus.amplitudes()[0], C64::new(1.0, 0.0)));

        let h = FRAC_1_SQRT_2;
        let mut bell = QuantumState::from_amplitudes(
            vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)],
            data(2),
        )
        .unwrap();
        assert_eq!(bell.measure_z(0, 0.7).unwrap(), 1);
        assert!(close(bell.amplitudes()[0b11], C64::new(1.0, 0.0)));
    }

    #[test]
    fn measurement_statistics_on_plus() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let zeros = (0..n)
            .filter(|_| {
                let mut s = QuantumState::product(&data(1), &[Basis::Plus]).unwrap();
                s.measure_z(0, rng.random::<f64>()).unwrap() == 0
            })
            .count();
        let sigma = (0.25 / n as f64).sqrt();
        assert!((zeros as f64 / n as f64 - 0.5).abs() < 5.0 * sigma);
    }

    #[test]
    fn attach_and_detach() {
        let mut s = basis_state(1, 1);
        s.attach(&[Role::Ancilla(0)], &[Basis::Zero]).unwrap();
        assert_eq!(s.num_qubits(), 2);
        assert!(close(s.amplitudes()[0b10], C64::new(1.0, 0.0)));

        let mut p = QuantumState::product(&data(2), &[Basis::Plus, Basis::Plus]).unwrap();
        assert!(matches!(p.detach_measured(&[0]), Err(Error::EntangledDetach(0))));
        p.measure_z(0, 0.1).unwrap();
        p.detach_measured(&[0]).unwrap();
        assert_eq!(p.num_qubits(), 1);
        assert!((p.norm() - 1.0).abs() < 1e-12);

        let mut big = QuantumState::product(&data(7), &[Basis::Zero; 7]).unwrap();
        let anc: Vec<Role> = (0..7).map(Role::Ancilla).collect();
        big.attach(&anc, &[Basis::Zero; 7]).unwrap();
        assert_eq!(big.num_qubits(), 14);
        let more: Vec<Role> = (0..8).map(Role::Verify).collect();
        assert!(matches!(big.attach(&more, &[Basis::Zero; 8]), Err(Error::RegisterCap { .. })));
    }

    #[test]
    fn measure_and_detach_keeps_partner() {
        let h = FRAC_1_SQRT_2;
        let mut bell = QuantumState::from_amplitudes(
            vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)],
            data(2),
        )
        .unwrap();
        let m = bell.measure_and_detach(0, 0.9).unwrap();
        assert_eq!(m, 1);
        assert_eq!(bell.num_qubits(), 1);
        assert!(close(bell.amplitudes()[1], C64::new(1.0, 0.0)));
    }

    #[test]
    fn fidelity_examples() {
        let zero = basis_state(1, 0);
        let one = basis_state(1, 1);
        let plus = QuantumState::product(&data(1), &[Basis::Plus]).unwrap();
        assert!((overlap_fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(overlap_fidelity(&zero, &one).unwrap().abs() < 1e-12);
        assert!((overlap_fidelity(&plus, &zero).unwrap() - 0.5).abs() < 1e-12);
        let ens = Ensemble { members: vec![(0.25, zero.clone()), (0.75, one)] };
        assert!((ens.fidelity_with(&zero).unwrap() - 0.25).abs() < 1e-12);
        assert!(overlap_fidelity(&zero, &basis_state(2, 0)).is_err());
    }

    fn random_state(n: usize, seed: u64) -> QuantumState {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<C64> =
            (0..1 << n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        QuantumState::from_amplitudes(amps, data(n)).unwrap()
    }

    fn any_gate(n: usize) -> impl Strategy<Value = Gate> {
        (0..10u8, 0..n, 1..n).prop_map(move |(k, a, off)| {
            let b = (a + off) % n;
            match k {
                0 => Gate::H(a),
                1 => Gate::P(a),
                2 => Gate::PDag(a),
                3 => Gate::T(a),
                4 => Gate::TDag(a),
                5 => Gate::X(a),
                6 => Gate::Y(a),
                7 => Gate::Z(a),
                8 => Gate::Cnot { control: a, target: b },
                _ => Gate::CPdagX { control: a, target: b },
            }
        })
    }

    proptest! {
        #[test]
        fn gates_preserve_norm(seed in 0u64..1000, gates in proptest::collection::vec(any_gate(4), 1..40)) {
            let mut s = random_state(4, seed);
            for g in gates {
                s.apply_gate(g).unwrap();
            }
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn gate_identities(seed in 0u64..1000, q in 0usize..3) {
            let psi = random_state(3, seed);
            let mut hh = psi.clone();
            hh.apply_gate(Gate::H(q)).unwrap();
            hh.apply_gate(Gate::H(q)).unwrap();
            prop_assert!((overlap_fidelity(&psi, &hh).unwrap() - 1.0).abs() < 1e-10);

            let mut p4 = psi.clone();
            for _ in 0..4 { p4.apply_gate(Gate::P(q)).unwrap(); }
            prop_assert!((overlap_fidelity(&psi, &p4).unwrap() - 1.0).abs() < 1e-10);

            let mut tt = psi.clone();
            tt.apply_gate(Gate::T(q)).unwrap();
            tt.apply_gate(Gate::T(q)).unwrap();
            let mut p = psi.clone();
            p.apply_gate(Gate::P(q)).unwrap();
            prop_assert!((overlap_fidelity(&tt, &p).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}
