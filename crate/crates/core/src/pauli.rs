//! Pauli operators on registers of up to 32 qubits.
//!
//! A [`PauliString`] stores its X and Z components as bit masks (bit `k` is
//! register position `k`) together with an overall phase `i^k`. Single-qubit
//! labels are always reported as I, X, Y or Z; the phase of `Y = iXZ` is
//! folded into the label, not into [`PauliString::phase`].

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register a [`PauliString`] can address.
pub const MAX_PAULI_QUBITS: usize = 32;

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    #[inline]
    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Product `self * other` as `(phase, label)`.
    pub fn mul_with_phase(self, other: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        let label = Pauli::from_bits(self.has_x() ^ other.has_x(), self.has_z() ^ other.has_z());
        let phase = match (self, other) {
            (X, Y) | (Y, Z) | (Z, X) => Phase::PLUS_I,
            (Y, X) | (Z, Y) | (X, Z) => Phase::MINUS_I,
            _ => Phase::ONE,
        };
        (phase, label)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Element `i^k` of the four-element phase group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    /// Exponent `k` in `i^k`.
    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        use num_complex::Complex64 as C;
        match self.0 {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

/// Tensor product of single-qubit Paulis with a phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    len: u8,
    x: u32,
    z: u32,
    phase: Phase,
}

impl PauliString {
    pub fn identity(len: usize) -> Self {
        assert!(len <= MAX_PAULI_QUBITS, "pauli string too long: {len}");
        PauliString { len: len as u8, x: 0, z: 0, phase: Phase::ONE }
    }

    /// Builds a string from explicit X/Z masks. Bits at or beyond `len` must be clear.
    pub fn from_masks(len: usize, x: u32, z: u32) -> Self {
        let p = PauliString::identity(len);
        let valid = if len == 32 { u32::MAX } else { (1u32 << len) - 1 };
        assert!(x & !valid == 0 && z & !valid == 0, "mask exceeds length {len}");
        PauliString { x, z, ..p }
    }

    pub fn single(len: usize, qubit: usize, op: Pauli) -> Self {
        assert!(qubit < len, "qubit {qubit} out of range for length {len}");
        let mut p = PauliString::identity(len);
        p.set(qubit, op);
        p
    }

    /// Same operator on every listed position.
    pub fn uniform(len: usize, positions: &[usize], op: Pauli) -> Self {
        let mut p = PauliString::identity(len);
        for &q in positions {
            p.set(q, op);
        }
        p
    }

    pub fn from_ops(ops: &[Pauli]) -> Self {
        let mut p = PauliString::identity(ops.len());
        for (q, &op) in ops.iter().enumerate() {
            p.set(q, op);
        }
        p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn x_mask(&self) -> u32 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u32 {
        self.z
    }

    #[inline]
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, op: Pauli) {
        assert!(qubit < self.len(), "qubit {qubit} out of range for length {}", self.len);
        let bit = 1u32 << qubit;
        self.x = (self.x & !bit) | if op.has_x() { bit } else { 0 };
        self.z = (self.z & !bit) | if op.has_z() { bit } else { 0 };
    }

    pub fn ops(&self) -> Vec<Pauli> {
        (0..self.len()).map(|q| self.get(q)).collect()
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&q| (self.x | self.z) >> q & 1 == 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones().is_multiple_of(2)
    }

    /// Operator product `self · other`; errors when lengths differ.
    pub fn try_mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { expected: self.len(), found: other.len() });
        }
        let mut phase = self.phase * other.phase;
        let overlap = (self.x | self.z) & (other.x | other.z);
        let mut bits = overlap;
        while bits != 0 {
            let q = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (ph, _) = self.get(q).mul_with_phase(other.get(q));
            phase = phase * ph;
        }
        Ok(PauliString { len: self.len, x: self.x ^ other.x, z: self.z ^ other.z, phase })
    }

    /// Equality of the operator content, ignoring phase.
    pub fn same_operator(&self, other: &PauliString) -> bool {
        self.len == other.len && self.x == other.x && self.z == other.z
    }
}

impl Mul for PauliString {
    type Output = PauliString;
    fn mul(self, rhs: PauliString) -> PauliString {
        self.try_mul(&rhs).expect("pauli strings of different length")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != Phase::ONE {
            write!(f, "{}", self.phase)?;
        }
        for q in 0..self.len() {
            write!(f, "{}", self.get(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `"IIIXXXX"`, optionally prefixed with `+`, `-`, `+i` or `-i`.
    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::ONE, rest)
        } else {
            (Phase::ONE, s)
        };
        if body.len() > MAX_PAULI_QUBITS {
            return Err(Error::Parse(format!("pauli string longer than {MAX_PAULI_QUBITS}: {s}")));
        }
        let ops = body
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("invalid pauli label {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_ops(&ops).with_phase(phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_qubit_products() {
        assert_eq!(Pauli::X.mul_with_phase(Pauli::Y), (Phase::PLUS_I, Pauli::Z));
        assert_eq!(Pauli::Y.mul_with_phase(Pauli::X), (Phase::MINUS_I, Pauli::Z));
        assert_eq!(Pauli::Z.mul_with_phase(Pauli::Z), (Phase::ONE, Pauli::I));
    }

    #[test]
    fn weight_and_parse() {
        let p: PauliString = "IXYZI".parse().unwrap();
        assert_eq!(p.weight(), 3);
        assert_eq!(p.to_string(), "IXYZI");
        assert_eq!(PauliString::identity(7).weight(), 0);
        let q: PauliString = "-iXX".parse().unwrap();
        assert_eq!(q.phase(), Phase::MINUS_I);
        assert!("IXA".parse::<PauliString>().is_err());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let a = PauliString::identity(3);
        let b = PauliString::identity(4);
        assert!(a.try_mul(&b).is_err());
    }

    fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
        (0u32..(1 << n), 0u32..(1 << n), 0u32..4)
            .prop_map(move |(x, z, k)| PauliString::from_masks(n, x, z).with_phase(Phase::from_power(k)))
    }

    proptest! {
        #[test]
        fn product_is_associative(a in pauli_string(7), b in pauli_string(7), c in pauli_string(7)) {
            prop_assert_eq!((a * b) * c, a * (b * c));
        }

        #[test]
        fn square_is_real_identity(a in pauli_string(7)) {
            let sq = a * a;
            prop_assert!(sq.is_identity());
            prop_assert!(sq.phase() == Phase::ONE || sq.phase() == Phase::MINUS_ONE);
        }

        #[test]
        fn commutation_matches_products(a in pauli_string(5), b in pauli_string(5)) {
            let ab = a * b;
            let ba = b * a;
            prop_assert!(ab.same_operator(&ba));
            prop_assert_eq!(a.commutes_with(&b), ab.phase() == ba.phase());
        }
    }
}
