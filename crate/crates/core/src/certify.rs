//! Single-fault certification of gadgets.
//!
//! Every recorded location of a gadget's noiseless path gets each of X, Y
//! and Z in turn. A gadget is fault tolerant when, for every such fault, the
//! output block lies in the span of `E|ψ⟩` over Paulis `E` of weight at
//! most one, i.e. the residual data error has weight ≤ 1 modulo the
//! stabilizer.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::code::{encode_qubit, perfect_decode, perfect_final_sm_ensemble, qubit_amplitudes, qubit_fidelity, N};
use crate::error::Result;
use crate::exec::{Executor, FaultSource};
use crate::logical::{apply_logical_gate, ideal_target, LogicalGate};
use crate::noise::{ErrorEnvironment, FaultLocation};
use crate::pauli::Pauli;
use crate::sm::{run_sm, SmProtocol};
use crate::state::QuantumState;

const SPAN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Gadget {
    Sm(SmProtocol),
    Gate { gate: LogicalGate, verify_magic: bool },
}

impl fmt::Display for Gadget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gadget::Sm(p) => write!(f, "sm/{p}"),
            Gadget::Gate { gate, verify_magic: true } => write!(f, "gate/{gate:?}+verified"),
            Gadget::Gate { gate, .. } => write!(f, "gate/{gate:?}"),
        }
    }
}

impl Gadget {
    fn run(&self, state: &mut QuantumState, exec: &mut Executor) -> Result<()> {
        exec.begin_segment(0);
        match *self {
            Gadget::Sm(p) => run_sm(p, state, exec).map(|_| ()),
            Gadget::Gate { gate, verify_magic } => apply_logical_gate(state, gate, exec, verify_magic).map(|_| ()),
        }
    }

    fn target(&self, psi: [C64; 2]) -> [C64; 2] {
        match *self {
            Gadget::Sm(_) => psi,
            Gadget::Gate { gate, .. } => ideal_target(&[gate], psi),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FaultReport {
    pub segment: u32,
    pub ordinal: u32,
    pub position: usize,
    pub op: Pauli,
    /// Weight of the output inside the weight-≤1 span; 1 means correctable.
    pub span_weight: f64,
    /// Logical infidelity after a perfect final SM.
    pub logical_infidelity_psm: f64,
}

impl FaultReport {
    pub fn correctable(&self) -> bool {
        self.span_weight > 1.0 - SPAN_TOLERANCE
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificationReport {
    pub gadget: Gadget,
    pub locations: usize,
    pub faults: usize,
    pub correctable: usize,
    /// Faults that leave a weight ≥ 2 residual.
    pub failures: Vec<FaultReport>,
}

impl CertificationReport {
    pub fn fault_tolerant(&self) -> bool {
        self.failures.is_empty()
    }

    /// A failure that also survives a perfect final SM as a logical error.
    pub fn logical_witness(&self) -> Option<&FaultReport> {
        self.failures.iter().find(|f| f.logical_infidelity_psm > SPAN_TOLERANCE)
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} locations, {}/{} single faults correctable",
            self.gadget, self.locations, self.correctable, self.faults
        )?;
        if let Some(w) = self.logical_witness() {
            write!(
                f,
                "; witness {} at location ({}, {}) gives logical infidelity {:.3e}",
                w.op, w.segment, w.ordinal, w.logical_infidelity_psm
            )?;
        }
        Ok(())
    }
}

/// Weight of `phi` in the span of `E|psi⟩`, `wt(E) ≤ 1`. The 22 vectors are
/// orthonormal because every weight-1 error has its own syndrome.
fn span_weight(psi: &QuantumState, phi: &QuantumState) -> Result<f64> {
    let mut total = phi.inner(psi)?.norm_sqr();
    for q in 0..N {
        for op in Pauli::NON_IDENTITY {
            let mut e = psi.clone();
            e.apply_single_pauli(q, op)?;
            total += e.inner(phi)?.norm_sqr();
        }
    }
    Ok(total)
}

/// Generic input so that no logical error is hidden by an eigenstate.
pub fn generic_input() -> [C64; 2] {
    qubit_amplitudes(0.61, 1.13)
}

pub fn certify(gadget: Gadget, input: [C64; 2], seed: u64) -> Result<CertificationReport> {
    let target = gadget.target(input);
    let ideal = encode_qubit(target)?;
    let start = encode_qubit(input)?;

    let mut exec = Executor::new(ErrorEnvironment::noiseless(), FaultSource::Noiseless, seed, 0).with_recording();
    let mut state = start.clone();
    gadget.run(&mut state, &mut exec)?;
    let locations: Vec<FaultLocation> = exec.take_locations();

    let mut report = CertificationReport { gadget, locations: locations.len(), faults: 0, correctable: 0, failures: vec![] };
    for loc in &locations {
        for op in Pauli::NON_IDENTITY {
            let faults = HashMap::from([(loc.key(), op)]);
            let mut exec = Executor::new(ErrorEnvironment::noiseless(), FaultSource::Assigned(faults), seed, 0);
            let mut state = start.clone();
            gadget.run(&mut state, &mut exec)?;
            let w = span_weight(&ideal, &state)?;
            report.faults += 1;
            let r = FaultReport {
                segment: loc.segment,
                ordinal: loc.ordinal,
                position: loc.position,
                op,
                span_weight: w,
                logical_infidelity_psm: 0.0,
            };
            if r.correctable() {
                report.correctable += 1;
            } else {
                let rho = perfect_decode(&perfect_final_sm_ensemble(&state)?)?;
                let logical_infidelity_psm = (1.0 - qubit_fidelity(&rho, target)).max(0.0);
                report.failures.push(FaultReport { logical_infidelity_psm, ..r });
            }
        }
    }
    Ok(report)
}

/// The gadgets covered by the `certify` command.
pub fn standard_suite() -> Vec<Gadget> {
    let mut v: Vec<Gadget> = SmProtocol::ALL.iter().map(|&p| Gadget::Sm(p)).collect();
    v.push(Gadget::Gate { gate: LogicalGate::H, verify_magic: false });
    v.push(Gadget::Gate { gate: LogicalGate::P, verify_magic: false });
    v.push(Gadget::Gate { gate: LogicalGate::T, verify_magic: false });
    v.push(Gadget::Gate { gate: LogicalGate::T, verify_magic: true });
    v
}
