//! JSON forms of circuits, resource reports, shot results and series.

use dkhub_core::circuits::{Circuit, Gate};
use dkhub_core::compile::ResourceReport;
use serde::Serialize;

use crate::sim::ShotResult;

#[derive(Debug, Serialize)]
struct GateJson {
    gate: &'static str,
    qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    /// Letters of a controlled string, one per entry of `qubits[1..]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pauli: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase: Option<u8>,
}

#[derive(Debug, Serialize)]
struct CircuitJson {
    n_qubits: usize,
    layers: Vec<Vec<GateJson>>,
}

fn gate_json(g: &Gate) -> GateJson {
    let mut j = GateJson { gate: g.name(), qubits: g.qubits(), angle: g.angle(), pauli: None, phase: None };
    if let Gate::ControlledPauli { string, .. } = g {
        j.pauli = Some(string.support().iter().map(|&q| string.letter(q).as_char()).collect());
        j.phase = Some(string.phase_exp());
    }
    j
}

/// `{"n_qubits":N,"layers":[[{"gate":"cnot","qubits":[c,t]}, …], …]}`.
/// Empty layers are dropped.
pub fn circuit_json(c: &Circuit) -> String {
    let layers = c.layers().iter().filter(|l| !l.is_empty()).map(|l| l.iter().map(gate_json).collect()).collect();
    serde_json::to_string(&CircuitJson { n_qubits: c.n_qubits(), layers }).expect("plain data")
}

#[derive(Debug, Serialize)]
struct Qubits {
    primary: usize,
    secondary: usize,
    ancilla: usize,
    total: usize,
}

#[derive(Debug, Serialize)]
struct Layers {
    state_prep: usize,
    trotter1: usize,
    trotter2: usize,
    trotter2_first_extra: usize,
    total: usize,
}

#[derive(Debug, Serialize)]
struct ReportJson {
    qubits: Qubits,
    layers: Layers,
}

/// `{"qubits":{…},"layers":{…}}`; `layers.total` is the full quench for
/// the report's plan.
pub fn report_json(r: &ResourceReport) -> String {
    let j = ReportJson {
        qubits: Qubits { primary: r.primary, secondary: r.secondary, ancilla: r.ancilla, total: r.total_qubits },
        layers: Layers {
            state_prep: r.state_prep,
            trotter1: r.trotter_first,
            trotter2: r.trotter_second_per_step,
            trotter2_first_extra: r.trotter_second_first_step_extra,
            total: r.total,
        },
    };
    serde_json::to_string_pretty(&j).expect("plain data")
}

#[derive(Debug, Serialize)]
struct ShotsJson<'a> {
    shots: u64,
    seed: u64,
    qubits: &'a [usize],
    counts: &'a std::collections::BTreeMap<String, u64>,
}

/// `{"shots":N,"seed":S,"qubits":[…],"counts":{"0101":123,…}}`.
pub fn shots_json(s: &ShotResult) -> String {
    serde_json::to_string(&ShotsJson { shots: s.shots, seed: s.seed, qubits: &s.qubits, counts: &s.counts })
        .expect("plain data")
}
