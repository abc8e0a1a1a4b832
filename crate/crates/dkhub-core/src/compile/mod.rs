//! End-to-end pipelines: vacuum and density-pattern preparation, Trotter
//! steps, quench circuits, Hadamard tests and resource counts.
//!
//! Every circuit here acts on the placed register of a [`Placement`]:
//! layout qubits first, then embedding ancillas.

mod rounds;
mod vacuum;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::circuits::{count_entangling_layers, Circuit, CircuitError, Gate};
use crate::dk_mapping::{build_layout, pair_creation_string, MappingError};
use crate::embed::{place, DeviceGraph, DeviceKind, EmbedError, Placement};
use crate::model::{to_spinless, CellScheme, HubbardModel};
use crate::pauli::{Letter, PauliString};

pub use rounds::round_circuit;
pub use vacuum::vacuum_circuit;

#[derive(Debug, Clone, PartialEq)]
pub enum CompileError {
    Embed(EmbedError),
    Mapping(MappingError),
    Circuit(CircuitError),
    InvalidOrder(u8),
    InvalidTimeStep(f64),
    StepOutOfRange { step: usize, n_steps: usize },
    RoundNotOnDevice { round: Round, device: DeviceKind },
    PatternSize { expected: usize, got: usize },
    OddOccupancy { block: usize, count: usize },
    NotHermitian,
    /// A mapped term does not have the Pauli shape its template implements.
    TermShape(String),
    /// Vacuum preparation found no unentangled root for a stabilizer.
    NoFreshRoot,
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompileError::Embed(e) => write!(f, "{e}"),
            CompileError::Mapping(e) => write!(f, "{e}"),
            CompileError::Circuit(e) => write!(f, "{e}"),
            CompileError::InvalidOrder(o) => write!(f, "Trotter order must be 1 or 2, got {o}"),
            CompileError::InvalidTimeStep(dt) => write!(f, "time step must be finite, got {dt}"),
            CompileError::StepOutOfRange { step, n_steps } => {
                write!(f, "step {step} out of range for a {n_steps}-step plan")
            }
            CompileError::RoundNotOnDevice { round, device } => {
                write!(f, "round {} does not exist on {} devices", round.label(), device.label())
            }
            CompileError::PatternSize { expected, got } => {
                write!(f, "occupation pattern has {got} sites, lattice has {expected}")
            }
            CompileError::OddOccupancy { block, count } => write!(
                f,
                "block {block} has {count} occupied sites; pair creation needs an even number"
            ),
            CompileError::NotHermitian => write!(f, "controlled string must be Hermitian"),
            CompileError::TermShape(msg) => write!(f, "mapped term has unexpected shape: {msg}"),
            CompileError::NoFreshRoot => write!(f, "vacuum preparation found no fresh root qubit"),
        }
    }
}

impl core::error::Error for CompileError {}

impl From<EmbedError> for CompileError {
    fn from(e: EmbedError) -> Self {
        CompileError::Embed(e)
    }
}

impl From<MappingError> for CompileError {
    fn from(e: MappingError) -> Self {
        CompileError::Mapping(e)
    }
}

impl From<CircuitError> for CompileError {
    fn from(e: CircuitError) -> Self {
        CompileError::Circuit(e)
    }
}

/// A group of mutually commuting terms applied as one parallel round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Round {
    /// Vertical hoppings whose lower site has `x + y` even.
    Vertical1,
    /// Vertical hoppings whose lower site has `x + y` odd.
    Vertical2,
    /// Horizontal hoppings whose left site has `x + y` even (all-to-all).
    Horizontal1,
    Horizontal2,
    /// `X`-ended halves of the skipping horizontal hoppings (diamond).
    HorizontalX,
    /// `Y`-ended halves of the skipping horizontal hoppings (diamond).
    HorizontalY,
    Interaction,
}

impl Round {
    pub const fn label(self) -> &'static str {
        match self {
            Round::Vertical1 => "V1",
            Round::Vertical2 => "V2",
            Round::Horizontal1 => "H1",
            Round::Horizontal2 => "H2",
            Round::HorizontalX => "Hx",
            Round::HorizontalY => "Hy",
            Round::Interaction => "I",
        }
    }

    pub fn exists_on(self, device: DeviceKind) -> bool {
        match self {
            Round::Vertical1 | Round::Vertical2 | Round::Interaction => true,
            Round::Horizontal1 | Round::Horizontal2 => device == DeviceKind::AllToAll,
            Round::HorizontalX | Round::HorizontalY => device == DeviceKind::Diamond,
        }
    }
}

/// One round with its fraction of the time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundApplication {
    pub round: Round,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterPlan {
    pub order: u8,
    pub dt: f64,
    pub n_steps: usize,
    /// Fuse identical rounds meeting at a step boundary.
    pub merge_adjacent: bool,
}

impl TrotterPlan {
    pub fn new(order: u8, dt: f64, n_steps: usize) -> Result<Self, CompileError> {
        if order != 1 && order != 2 {
            return Err(CompileError::InvalidOrder(order));
        }
        if !dt.is_finite() {
            return Err(CompileError::InvalidTimeStep(dt));
        }
        Ok(TrotterPlan { order, dt, n_steps, merge_adjacent: true })
    }

    /// Rounds of one step before merging.
    pub fn step_rounds(&self, device: DeviceKind) -> Result<Vec<RoundApplication>, CompileError> {
        use Round::*;
        let (v1, v2, i) = (Vertical1, Vertical2, Interaction);
        let (ha, hb) = match device {
            DeviceKind::AllToAll => (Horizontal1, Horizontal2),
            DeviceKind::Diamond => (HorizontalX, HorizontalY),
            DeviceKind::HeavyHoneycomb => return Err(EmbedError::Unsupported(device).into()),
        };
        let app = |round, weight| RoundApplication { round, weight };
        Ok(match (self.order, device) {
            (1, DeviceKind::AllToAll) => vec![app(v1, 1.0), app(v2, 1.0), app(ha, 1.0), app(hb, 1.0), app(i, 1.0)],
            (1, _) => vec![app(v1, 1.0), app(v2, 1.0), app(i, 1.0), app(ha, 1.0), app(hb, 1.0)],
            (2, _) => vec![
                app(v1, 0.5),
                app(v2, 0.5),
                app(i, 0.5),
                app(ha, 0.5),
                app(hb, 1.0),
                app(ha, 0.5),
                app(i, 0.5),
                app(v2, 0.5),
                app(v1, 0.5),
            ],
            (o, _) => return Err(CompileError::InvalidOrder(o)),
        })
    }

    /// Rounds of every step. A round merged across a boundary belongs to the
    /// earlier step, so the first step carries the unpaired leading round.
    pub fn schedule(&self, device: DeviceKind) -> Result<Vec<Vec<RoundApplication>>, CompileError> {
        let step = self.step_rounds(device)?;
        let mut flat: Vec<(usize, RoundApplication)> = Vec::new();
        for k in 0..self.n_steps {
            for a in &step {
                match flat.last_mut() {
                    Some((_, last)) if self.merge_adjacent && last.round == a.round => last.weight += a.weight,
                    _ => flat.push((k, *a)),
                }
            }
        }
        let mut out = vec![Vec::new(); self.n_steps];
        for (k, a) in flat {
            out[k].push(a);
        }
        Ok(out)
    }
}

/// Circuit for step `step` of the plan.
pub fn trotter_step_circuit(p: &Placement, plan: &TrotterPlan, step: usize) -> Result<Circuit, CompileError> {
    let sched = plan.schedule(p.device.kind)?;
    let rounds = sched.get(step).ok_or(CompileError::StepOutOfRange { step, n_steps: plan.n_steps })?;
    let mut c = Circuit::new(p.total_qubits());
    for a in rounds {
        c.append(&round_circuit(p, a.round, plan.dt * a.weight)?);
    }
    Ok(c)
}

/// All steps of the plan, back to back.
pub fn evolution_circuit(p: &Placement, plan: &TrotterPlan) -> Result<Circuit, CompileError> {
    let mut c = Circuit::new(p.total_qubits());
    for k in 0..plan.n_steps {
        c.append(&trotter_step_circuit(p, plan, k)?);
    }
    Ok(c)
}

/// Single layer of Pauli gates creating the occupation `pattern` (indexed by
/// spinless site) from the vacuum. Occupied sites of each block are paired
/// in row-major order and joined by L-shaped paths.
pub fn density_pattern_circuit(p: &Placement, pattern: &[bool]) -> Result<Circuit, CompileError> {
    let layout = &p.layout;
    let n_sites = layout.n_primary();
    if pattern.len() != n_sites {
        return Err(CompileError::PatternSize { expected: n_sites, got: pattern.len() });
    }
    let mut product = PauliString::identity(layout.n_qubits());
    for (b, blk) in layout.lattice.blocks.iter().enumerate() {
        let occupied: Vec<usize> =
            (blk.offset..blk.offset + blk.n_sites()).filter(|&s| pattern[s]).collect();
        if occupied.len() % 2 == 1 {
            return Err(CompileError::OddOccupancy { block: b, count: occupied.len() });
        }
        for pair in occupied.chunks(2) {
            product = product.mul_ref(&pair_creation_string(layout, pair[0], pair[1])?);
        }
    }
    let mut layer = Vec::new();
    for q in product.support() {
        let primary = q < n_sites;
        match product.letter(q) {
            Letter::X => layer.push(Gate::X(q)),
            Letter::Y => layer.push(Gate::Y(q)),
            Letter::Z if !primary => layer.push(Gate::Z(q)),
            _ => {}
        }
    }
    let mut c = Circuit::new(p.total_qubits());
    if !layer.is_empty() {
        c.push_layer(layer)?;
    }
    Ok(c)
}

/// Vacuum, pattern and all Trotter steps.
pub fn full_quench_circuit(p: &Placement, pattern: &[bool], plan: &TrotterPlan) -> Result<Circuit, CompileError> {
    let mut c = vacuum_circuit(p)?;
    c.append(&density_pattern_circuit(p, pattern)?);
    c.append(&evolution_circuit(p, plan)?);
    Ok(c)
}

/// Two-ancilla interferometer for `⟨B(t) A⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardTest {
    pub circuit: Circuit,
    pub ancilla_a: usize,
    pub ancilla_b: usize,
}

/// `H` on both ancillas, `A` controlled by `a`, the evolution, `B`
/// controlled by `b`. Then `⟨(X_a + iY_a)(X_b + iY_b)⟩ = ⟨U†BU A⟩`; the
/// `X − iY` combination gives the conjugate `⟨A U†BU⟩`.
pub fn hadamard_test_circuit(
    p: &Placement,
    a_string: &PauliString,
    b_string: &PauliString,
    evolution: &Circuit,
) -> Result<HadamardTest, CompileError> {
    if !a_string.is_hermitian() || !b_string.is_hermitian() {
        return Err(CompileError::NotHermitian);
    }
    let n = p.total_qubits();
    let (qa, qb) = (n, n + 1);
    let total = n + 2;
    let lift = |s: &PauliString| -> Result<PauliString, CompileError> {
        let map: Vec<usize> = (0..s.n_qubits()).collect();
        s.remap(total, &map)
            .map_err(|e| CompileError::TermShape(alloc::format!("string does not fit the register: {e}")))
    };
    let mut c = Circuit::new(total);
    c.push_layer(vec![Gate::H(qa), Gate::H(qb)])?;
    c.push_layer(vec![Gate::ControlledPauli { control: qa, string: lift(a_string)? }])?;
    c.append(evolution);
    c.push_layer(vec![Gate::ControlledPauli { control: qb, string: lift(b_string)? }])?;
    Ok(HadamardTest { circuit: c, ancilla_a: qa, ancilla_b: qb })
}

/// Qubit and entangling-layer counts, measured on compiled circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceReport {
    pub primary: usize,
    pub secondary: usize,
    pub ancilla: usize,
    pub total_qubits: usize,
    pub state_prep: usize,
    pub trotter_first: usize,
    pub trotter_second_per_step: usize,
    pub trotter_second_first_step_extra: usize,
    pub n_steps: usize,
    pub order: u8,
    /// Layers of the full quench circuit for the plan.
    pub total: usize,
}

impl ResourceReport {
    /// Closed-form total for `n` steps of the report's order.
    pub fn total_for(&self, n: usize) -> usize {
        if n == 0 {
            return self.state_prep;
        }
        match self.order {
            1 => self.state_prep + n * self.trotter_first,
            _ => self.state_prep + n * self.trotter_second_per_step + self.trotter_second_first_step_extra,
        }
    }
}

/// Places the model on the smallest fitting device of `device`.
pub fn placement_for(model: &HubbardModel, scheme: CellScheme, device: DeviceKind) -> Result<Placement, CompileError> {
    let layout = build_layout(&to_spinless(model, scheme), None)?;
    let graph = DeviceGraph::fitting(device, &layout);
    Ok(place(&layout, &graph)?)
}

pub fn resource_report(
    model: &HubbardModel,
    scheme: CellScheme,
    device: DeviceKind,
    plan: &TrotterPlan,
) -> Result<ResourceReport, CompileError> {
    let p = placement_for(model, scheme, device)?;
    let layers = |c: &Circuit| count_entangling_layers(c);
    let state_prep = layers(&vacuum_circuit(&p)?);
    let first = TrotterPlan { order: 1, n_steps: 1, ..*plan };
    let trotter_first = layers(&trotter_step_circuit(&p, &first, 0)?);
    let second = TrotterPlan { order: 2, n_steps: 2, ..*plan };
    let s0 = layers(&trotter_step_circuit(&p, &second, 0)?);
    let s1 = layers(&trotter_step_circuit(&p, &second, 1)?);
    let empty = vec![false; p.layout.n_primary()];
    let total = layers(&full_quench_circuit(&p, &empty, plan)?);
    Ok(ResourceReport {
        primary: p.layout.n_primary(),
        secondary: p.layout.n_secondary(),
        ancilla: p.ancilla_qubits.len(),
        total_qubits: p.total_qubits(),
        state_prep,
        trotter_first,
        trotter_second_per_step: s1,
        trotter_second_first_step_extra: s0 - s1,
        n_steps: plan.n_steps,
        order: plan.order,
        total,
    })
}
