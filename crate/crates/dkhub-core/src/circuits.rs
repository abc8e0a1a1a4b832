//! Layered circuit IR, the hopping/interaction gate templates, and greedy
//! scheduling.
//!
//! Rotations follow `R_A(θ) = exp(−iθA/2)`, so `exp(iθ Z)` is `RZ(−2θ)`.
//! `S = diag(1, i)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;

use crate::pauli::PauliString;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Cnot { control: usize, target: usize },
    /// Pauli string applied when `control` is `|1⟩`. Simulator-native; not
    /// counted as an entangling layer.
    ControlledPauli { control: usize, string: PauliString },
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    /// Qubits the gate acts on.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![*q],
            Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::ControlledPauli { control, string } => {
                let mut v = vec![*control];
                v.extend(string.support());
                v
            }
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::S(_) => "s",
            Gate::Sdg(_) => "sdg",
            Gate::X(_) => "x",
            Gate::Y(_) => "y",
            Gate::Z(_) => "z",
            Gate::Rx(..) => "rx",
            Gate::Ry(..) => "ry",
            Gate::Rz(..) => "rz",
            Gate::Cnot { .. } => "cnot",
            Gate::ControlledPauli { .. } => "cpauli",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::Rx(_, a) | Gate::Ry(_, a) | Gate::Rz(_, a) => Some(*a),
            _ => None,
        }
    }

    /// Inverse gate. Controlled Pauli strings are assumed Hermitian.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::Rx(q, a) => Gate::Rx(*q, -a),
            Gate::Ry(q, a) => Gate::Ry(*q, -a),
            Gate::Rz(q, a) => Gate::Rz(*q, -a),
            other => other.clone(),
        }
    }

    /// Same gate on relabelled qubits.
    pub fn remap(&self, map: &[usize], n_new: usize) -> Gate {
        let m = |q: &usize| map[*q];
        match self {
            Gate::H(q) => Gate::H(m(q)),
            Gate::S(q) => Gate::S(m(q)),
            Gate::Sdg(q) => Gate::Sdg(m(q)),
            Gate::X(q) => Gate::X(m(q)),
            Gate::Y(q) => Gate::Y(m(q)),
            Gate::Z(q) => Gate::Z(m(q)),
            Gate::Rx(q, a) => Gate::Rx(m(q), *a),
            Gate::Ry(q, a) => Gate::Ry(m(q), *a),
            Gate::Rz(q, a) => Gate::Rz(m(q), *a),
            Gate::Cnot { control, target } => Gate::Cnot { control: m(control), target: m(target) },
            Gate::ControlledPauli { control, string } => Gate::ControlledPauli {
                control: m(control),
                string: string.remap(n_new, map).expect("map covers the string"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitError {
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    RepeatedQubit(usize),
    Overlap { layer: usize, qubit: usize },
    NonFiniteAngle,
    NotHermitian,
    WrongQubitCount { expected: usize, got: usize },
    MissingSlot(&'static str),
    Misaligned { needed: usize, available: usize },
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitError::QubitOutOfRange { qubit, n_qubits } => {
                write!(f, "qubit {qubit} out of range for {n_qubits}-qubit circuit")
            }
            CircuitError::RepeatedQubit(q) => write!(f, "qubit {q} used twice in one gate"),
            CircuitError::Overlap { layer, qubit } => write!(f, "qubit {qubit} used twice in layer {layer}"),
            CircuitError::NonFiniteAngle => write!(f, "rotation angle must be finite"),
            CircuitError::NotHermitian => write!(f, "controlled string must be Hermitian"),
            CircuitError::WrongQubitCount { expected, got } => {
                write!(f, "template needs {expected} qubits, got {got}")
            }
            CircuitError::MissingSlot(what) => write!(f, "horizontal term has no {what} qubit"),
            CircuitError::Misaligned { needed, available } => {
                write!(f, "template needs {needed} single-qubit layers where the frame has {available}")
            }
        }
    }
}

impl core::error::Error for CircuitError {}

fn check_gate(g: &Gate, n_qubits: usize) -> Result<(), CircuitError> {
    let qs = g.qubits();
    for (i, &q) in qs.iter().enumerate() {
        if q >= n_qubits {
            return Err(CircuitError::QubitOutOfRange { qubit: q, n_qubits });
        }
        if qs[..i].contains(&q) {
            return Err(CircuitError::RepeatedQubit(q));
        }
    }
    if let Some(a) = g.angle() {
        if !a.is_finite() {
            return Err(CircuitError::NonFiniteAngle);
        }
    }
    if let Gate::ControlledPauli { string, .. } = g {
        if !string.is_hermitian() {
            return Err(CircuitError::NotHermitian);
        }
        if string.n_qubits() != n_qubits {
            return Err(CircuitError::QubitOutOfRange { qubit: string.n_qubits(), n_qubits });
        }
    }
    Ok(())
}

/// A circuit as an ordered list of layers with disjoint gate supports.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    layers: Vec<Vec<Gate>>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, layers: Vec::new() }
    }

    pub fn from_layers(n_qubits: usize, layers: Vec<Vec<Gate>>) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(n_qubits);
        for l in layers {
            c.push_layer(l)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.iter().all(Vec::is_empty)
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    pub fn n_gates(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates().filter(|g| g.is_cnot()).count()
    }

    fn check_layer(&self, layer: &[Gate], index: usize) -> Result<(), CircuitError> {
        let mut used = vec![false; self.n_qubits];
        for g in layer {
            check_gate(g, self.n_qubits)?;
            for q in g.qubits() {
                if used[q] {
                    return Err(CircuitError::Overlap { layer: index, qubit: q });
                }
                used[q] = true;
            }
        }
        Ok(())
    }

    /// Appends a layer. Empty layers are kept until [`compact`](Self::compact).
    pub fn push_layer(&mut self, layer: Vec<Gate>) -> Result<(), CircuitError> {
        self.check_layer(&layer, self.layers.len())?;
        self.layers.push(layer);
        Ok(())
    }

    /// Grows the register without touching any gate.
    pub fn widen(&mut self, n_qubits: usize) {
        self.n_qubits = self.n_qubits.max(n_qubits);
        if self.gates().any(|g| matches!(g, Gate::ControlledPauli { .. })) {
            let n = self.n_qubits;
            let map: Vec<usize> = (0..n).collect();
            for l in &mut self.layers {
                for g in l.iter_mut() {
                    if let Gate::ControlledPauli { string, .. } = g {
                        let src = string.n_qubits();
                        *string = string.remap(n, &map[..src]).expect("identity map");
                    }
                }
            }
        }
    }

    /// Concatenates `other` after `self` without re-packing.
    pub fn append(&mut self, other: &Circuit) {
        self.widen(other.n_qubits);
        let mut o = other.clone();
        o.widen(self.n_qubits);
        self.layers.extend(o.layers);
    }

    /// Merges layer `k` of `other` into layer `offset + k` of `self`.
    pub fn overlay(&mut self, other: &Circuit, offset: usize) -> Result<(), CircuitError> {
        self.widen(other.n_qubits);
        let mut o = other.clone();
        o.widen(self.n_qubits);
        let mut next = self.layers.clone();
        while next.len() < offset + o.layers.len() {
            next.push(Vec::new());
        }
        for (k, l) in o.layers.into_iter().enumerate() {
            next[offset + k].extend(l);
            self.check_layer(&next[offset + k], offset + k)?;
        }
        self.layers = next;
        Ok(())
    }

    /// Reversed circuit of inverse gates.
    pub fn inverse(&self) -> Circuit {
        let layers = self
            .layers
            .iter()
            .rev()
            .map(|l| l.iter().map(Gate::inverse).collect())
            .collect();
        Circuit { n_qubits: self.n_qubits, layers }
    }

    /// Relabels qubit `q` as `map[q]` on an `n_new`-qubit register.
    pub fn remap(&self, map: &[usize], n_new: usize) -> Result<Circuit, CircuitError> {
        let layers: Vec<Vec<Gate>> =
            self.layers.iter().map(|l| l.iter().map(|g| g.remap(map, n_new)).collect()).collect();
        Circuit::from_layers(n_new, layers)
    }

    /// Drops empty layers.
    pub fn compact(&mut self) {
        self.layers.retain(|l| !l.is_empty());
    }
}

/// Greedy ASAP packing of a sequential gate list. Gates sharing a qubit keep
/// their relative order.
pub fn schedule(n_qubits: usize, gates: &[Gate]) -> Result<Circuit, CircuitError> {
    let mut frontier = vec![0usize; n_qubits];
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    for g in gates {
        check_gate(g, n_qubits)?;
        let qs = g.qubits();
        let at = qs.iter().map(|&q| frontier[q]).max().unwrap_or(0);
        if layers.len() <= at {
            layers.resize_with(at + 1, Vec::new);
        }
        layers[at].push(g.clone());
        for q in qs {
            frontier[q] = at + 1;
        }
    }
    Ok(Circuit { n_qubits, layers })
}

/// Packing that minimizes entangling depth. Each multi-qubit gate goes to
/// the first CNOT layer after its predecessors; single-qubit gates fill the
/// gaps between CNOT layers and never push a CNOT later.
pub fn schedule_entangling(n_qubits: usize, gates: &[Gate]) -> Result<Circuit, CircuitError> {
    // Slot 2k holds single-qubit gates before CNOT layer k, slot 2k+1 layer k.
    let mut last: Vec<Option<usize>> = vec![None; n_qubits];
    let mut slots: Vec<Vec<Gate>> = Vec::new();
    for g in gates {
        check_gate(g, n_qubits)?;
        let qs = g.qubits();
        let slot = if qs.len() == 1 {
            match last[qs[0]] {
                None => 0,
                Some(s) if s % 2 == 0 => s,
                Some(s) => s + 1,
            }
        } else {
            let need = qs.iter().map(|&q| last[q].map_or(0, |s| s + 1)).max().unwrap_or(0);
            need | 1
        };
        if slots.len() <= slot {
            slots.resize_with(slot + 1, Vec::new);
        }
        slots[slot].push(g.clone());
        for q in qs {
            last[q] = Some(slot);
        }
    }
    let mut c = Circuit::new(n_qubits);
    for (k, s) in slots.into_iter().enumerate() {
        if s.is_empty() {
            continue;
        }
        if k % 2 == 1 {
            c.push_layer(s)?;
        } else {
            c.append(&schedule(n_qubits, &s)?);
        }
    }
    Ok(c)
}

/// Like [`schedule_entangling`], but a gate may move ahead of earlier gates it
/// provably commutes with: on every shared qubit both act diagonally in `Z`
/// or both in `X`.
pub fn schedule_commuting(n_qubits: usize, gates: &[Gate]) -> Result<Circuit, CircuitError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Axis {
        X,
        Z,
        Other,
    }
    fn axes(g: &Gate) -> Vec<(usize, Axis)> {
        match g {
            Gate::Cnot { control, target } => vec![(*control, Axis::Z), (*target, Axis::X)],
            Gate::Z(q) | Gate::S(q) | Gate::Sdg(q) | Gate::Rz(q, _) => vec![(*q, Axis::Z)],
            Gate::X(q) | Gate::Rx(q, _) => vec![(*q, Axis::X)],
            _ => g.qubits().into_iter().map(|q| (q, Axis::Other)).collect(),
        }
    }
    let mut used: Vec<Vec<(usize, Axis)>> = vec![Vec::new(); n_qubits];
    let mut slots: Vec<Vec<Gate>> = Vec::new();
    for g in gates {
        check_gate(g, n_qubits)?;
        let ax = axes(g);
        let one = ax.len() == 1;
        let mut slot = ax
            .iter()
            .flat_map(|&(q, a)| {
                used[q].iter().filter(move |&&(_, b)| a == Axis::Other || a != b).map(|&(s, _)| s + 1)
            })
            .max()
            .unwrap_or(0);
        loop {
            if (slot % 2 == 0) == one && ax.iter().all(|&(q, _)| used[q].iter().all(|&(s, _)| s != slot)) {
                break;
            }
            slot += 1;
        }
        if slots.len() <= slot {
            slots.resize_with(slot + 1, Vec::new);
        }
        slots[slot].push(g.clone());
        for (q, a) in ax {
            used[q].push((slot, a));
        }
    }
    let mut c = Circuit::new(n_qubits);
    for s in slots.into_iter().filter(|s| !s.is_empty()) {
        c.push_layer(s)?;
    }
    Ok(c)
}

/// Re-lays `c` so that its `k`-th CNOT layer lands on layer `slots[k]` of a
/// `len`-layer frame. Single-qubit layers keep their order and fill the gaps.
pub fn align_to_slots(c: &Circuit, slots: &[usize], len: usize) -> Result<Circuit, CircuitError> {
    let mut groups: Vec<Vec<Vec<Gate>>> = vec![Vec::new()];
    let mut cnot_layers = Vec::new();
    for l in c.layers().iter().filter(|l| !l.is_empty()) {
        if l.iter().any(Gate::is_cnot) {
            cnot_layers.push(l.clone());
            groups.push(Vec::new());
        } else {
            groups.last_mut().expect("non-empty").push(l.clone());
        }
    }
    if cnot_layers.len() != slots.len() {
        return Err(CircuitError::WrongQubitCount { expected: slots.len(), got: cnot_layers.len() });
    }
    let mut layers: Vec<Vec<Gate>> = vec![Vec::new(); len];
    let mut free = 0;
    for (k, &s) in slots.iter().enumerate() {
        let g = &groups[k];
        if s < free || s - free < g.len() || s >= len {
            return Err(CircuitError::Misaligned { needed: g.len(), available: s.saturating_sub(free) });
        }
        for (i, l) in g.iter().enumerate() {
            layers[s - g.len() + i] = l.clone();
        }
        layers[s] = cnot_layers[k].clone();
        free = s + 1;
    }
    let tail = groups.last().expect("non-empty");
    if free + tail.len() > len {
        return Err(CircuitError::Misaligned { needed: tail.len(), available: len - free });
    }
    for (i, l) in tail.iter().enumerate() {
        layers[free + i] = l.clone();
    }
    Circuit::from_layers(c.n_qubits(), layers)
}

/// Number of layers holding at least one CNOT.
pub fn count_entangling_layers(c: &Circuit) -> usize {
    c.layers().iter().filter(|l| l.iter().any(Gate::is_cnot)).count()
}

fn distinct(qs: &[usize]) -> Result<(), CircuitError> {
    for (i, q) in qs.iter().enumerate() {
        if qs[..i].contains(q) {
            return Err(CircuitError::RepeatedQubit(*q));
        }
    }
    Ok(())
}

fn size_for(qs: &[usize]) -> usize {
    qs.iter().copied().max().map_or(0, |m| m + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// `exp{iα(X₁X₂X₃ + Y₁X₂Y₃)}` (vertical) or `exp{iα(X₁Y₂X₃ + Y₁Y₂Y₃)}`
/// (horizontal) in 6 CNOT layers; `q2` is the face qubit.
pub fn vw_three_qubit_hopping(
    q1: usize,
    q2: usize,
    q3: usize,
    alpha: f64,
    orientation: Orientation,
) -> Result<Circuit, CircuitError> {
    distinct(&[q1, q2, q3])?;
    let mut g = Vec::new();
    if orientation == Orientation::Horizontal {
        g.push(Gate::Sdg(q2));
    }
    g.extend([
        Gate::cnot(q3, q1),
        Gate::Rz(q3, -FRAC_PI_2),
        Gate::cnot(q3, q2),
        Gate::Ry(q3, 2.0 * alpha),
        Gate::cnot(q1, q3),
        Gate::Ry(q3, -2.0 * alpha),
        Gate::cnot(q1, q3),
        Gate::cnot(q3, q2),
        Gate::Rz(q3, FRAC_PI_2),
        Gate::cnot(q3, q1),
    ]);
    if orientation == Orientation::Horizontal {
        g.push(Gate::S(q2));
    }
    schedule(size_for(&[q1, q2, q3]), &g)
}

/// `exp{iα(X₁X₂ + Y₁Y₂)}` in 2 CNOT layers.
pub fn two_qubit_xxyy(q1: usize, q2: usize, alpha: f64) -> Result<Circuit, CircuitError> {
    distinct(&[q1, q2])?;
    let g = [
        Gate::Rx(q1, FRAC_PI_2),
        Gate::Rx(q2, FRAC_PI_2),
        Gate::cnot(q1, q2),
        Gate::Rx(q1, -2.0 * alpha),
        Gate::Rz(q2, -2.0 * alpha),
        Gate::cnot(q1, q2),
        Gate::Rx(q1, -FRAC_PI_2),
        Gate::Rx(q2, -FRAC_PI_2),
    ];
    schedule(size_for(&[q1, q2]), &g)
}

/// `exp{iβZ₁Z₂}` as CNOT·RZ(−2β)·CNOT.
pub fn zz_interaction(q1: usize, q2: usize, beta: f64) -> Result<Circuit, CircuitError> {
    distinct(&[q1, q2])?;
    let g = [Gate::cnot(q1, q2), Gate::Rz(q2, -2.0 * beta), Gate::cnot(q1, q2)];
    schedule(size_for(&[q1, q2]), &g)
}

/// `exp{iα(X₁X₂X₃ + Y₁X₂Y₃)}` on the square `1-2-3-4` with `q4` a `|0⟩`
/// ancilla; 6 CNOT layers. The outer layers touch only `q1` and `q2`.
///
/// Any circuit on this square needs more than 4 CNOT layers: both rotations
/// must sit after exactly two layers, and no two-layer Clifford on the square
/// maps the two generators to single-qubit Paulis.
pub fn diamond_vertical_hopping(q1: usize, q2: usize, q3: usize, q4: usize, alpha: f64) -> Result<Circuit, CircuitError> {
    distinct(&[q1, q2, q3, q4])?;
    let layers = vec![
        vec![Gate::cnot(q2, q1)],
        vec![Gate::Rx(q2, FRAC_PI_2)],
        vec![Gate::cnot(q2, q3), Gate::cnot(q1, q4)],
        vec![Gate::Rx(q3, FRAC_PI_2)],
        vec![Gate::cnot(q3, q4)],
        vec![Gate::Rx(q2, -2.0 * alpha), Gate::Rz(q4, -2.0 * alpha)],
        vec![Gate::cnot(q3, q4)],
        vec![Gate::Rx(q3, -FRAC_PI_2)],
        vec![Gate::cnot(q2, q3), Gate::cnot(q1, q4)],
        vec![Gate::Rx(q2, -FRAC_PI_2)],
        vec![Gate::cnot(q2, q1)],
    ];
    Circuit::from_layers(size_for(&[q1, q2, q3, q4]), layers)
}

/// `exp{iα(X₁X₃ + Y₁Y₃)}` along the path `1-2-3` with `q2` a `|0⟩` ancilla;
/// 6 CNOT layers. The outer layers touch only `q1` and `q2`.
pub fn faceless_vertical_hopping(q1: usize, q2: usize, q3: usize, alpha: f64) -> Result<Circuit, CircuitError> {
    distinct(&[q1, q2, q3])?;
    let layers = vec![
        vec![Gate::Rx(q1, FRAC_PI_2)],
        vec![Gate::cnot(q1, q2)],
        vec![Gate::cnot(q2, q3)],
        vec![Gate::H(q1), Gate::H(q2)],
        vec![Gate::cnot(q1, q2)],
        vec![Gate::Ry(q3, -2.0 * alpha), Gate::Rz(q2, -2.0 * alpha)],
        vec![Gate::cnot(q1, q2)],
        vec![Gate::H(q1), Gate::H(q2)],
        vec![Gate::cnot(q2, q3)],
        vec![Gate::cnot(q1, q2)],
        vec![Gate::Rx(q1, -FRAC_PI_2)],
    ];
    Circuit::from_layers(size_for(&[q1, q2, q3]), layers)
}

/// Kind of the intermediate qubit in [`diamond_interaction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Via {
    /// `q2` starts and ends in `|0⟩`.
    Ancilla,
    /// `q2` is a secondary qubit in an arbitrary state.
    Secondary,
}

/// `exp{iβZ₁Z₃}` routed through `q2`, which is left unchanged.
pub fn diamond_interaction(q1: usize, q2: usize, q3: usize, beta: f64, via: Via) -> Result<Circuit, CircuitError> {
    distinct(&[q1, q2, q3])?;
    let mut g = Vec::new();
    if via == Via::Secondary {
        g.push(Gate::cnot(q2, q1));
    }
    g.extend([
        Gate::cnot(q1, q2),
        Gate::cnot(q3, q2),
        Gate::Rz(q2, -2.0 * beta),
        Gate::cnot(q3, q2),
        Gate::cnot(q1, q2),
    ]);
    if via == Via::Secondary {
        g.push(Gate::cnot(q2, q1));
    }
    schedule(size_for(&[q1, q2, q3]), &g)
}

/// Endpoint basis of a horizontal next-nearest-neighbour term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermBasis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HorizontalVariant {
    /// Five mapped qubits, faces used as relays.
    Direct,
    /// Seven qubits: two `|0⟩` ancillas relay the endpoints.
    Ancilla,
}

/// Gates rotating `letter` to `Z` on `q`, and back: `(before, after)`.
fn to_z_basis(q: usize, letter: TermBasis) -> (Vec<Gate>, Vec<Gate>) {
    match letter {
        TermBasis::X => (vec![Gate::H(q)], vec![Gate::H(q)]),
        TermBasis::Y => (vec![Gate::Sdg(q), Gate::H(q)], vec![Gate::H(q), Gate::S(q)]),
    }
}


/// `exp{iα P₁Y₂Z₃Y₄P₅}` with `P = X` or `Y` per `basis`.
///
/// Direct: `qubits = [1, 2, 3, 4, 5]`, 6 CNOT layers. Ancilla:
/// `qubits = [1, a, 2, 3, 4, b, 5]` with `a`, `b` in `|0⟩`, 8 CNOT layers.
pub fn diamond_horizontal_hopping(
    qubits: &[usize],
    alpha: f64,
    basis: TermBasis,
    variant: HorizontalVariant,
) -> Result<Circuit, CircuitError> {
    let expected = match variant {
        HorizontalVariant::Direct => 5,
        HorizontalVariant::Ancilla => 7,
    };
    if qubits.len() != expected {
        return Err(CircuitError::WrongQubitCount { expected, got: qubits.len() });
    }
    distinct(qubits)?;
    let end = basis;
    let (q1, q2, q3, q4, q5, anc) = match variant {
        HorizontalVariant::Direct => (qubits[0], qubits[1], qubits[2], qubits[3], qubits[4], None),
        HorizontalVariant::Ancilla => {
            (qubits[0], qubits[2], qubits[3], qubits[4], qubits[6], Some((qubits[1], qubits[5])))
        }
    };
    let letters = [(q1, end), (q2, TermBasis::Y), (q4, TermBasis::Y), (q5, end)];
    let mut pre = Vec::new();
    let mut post = Vec::new();
    for (q, l) in letters {
        let (a, b) = to_z_basis(q, l);
        pre.extend(a);
        post.extend(b);
    }
    let core = match anc {
        None => vec![
            vec![Gate::cnot(q1, q2), Gate::cnot(q5, q4)],
            vec![Gate::cnot(q2, q3)],
            vec![Gate::cnot(q4, q3)],
            vec![Gate::Rz(q3, -2.0 * alpha)],
            vec![Gate::cnot(q4, q3)],
            vec![Gate::cnot(q2, q3)],
            vec![Gate::cnot(q1, q2), Gate::cnot(q5, q4)],
        ],
        Some((a, b)) => vec![
            vec![Gate::cnot(q1, a), Gate::cnot(q2, q3)],
            vec![Gate::cnot(q4, q3), Gate::cnot(q5, b)],
            vec![Gate::cnot(a, q3)],
            vec![Gate::cnot(b, q3)],
            vec![Gate::Rz(q3, -2.0 * alpha)],
            vec![Gate::cnot(b, q3)],
            vec![Gate::cnot(a, q3)],
            vec![Gate::cnot(q4, q3), Gate::cnot(q5, b)],
            vec![Gate::cnot(q1, a), Gate::cnot(q2, q3)],
        ],
    };
    let n = size_for(qubits);
    let mut c = schedule(n, &pre)?;
    c.append(&Circuit::from_layers(n, core)?);
    c.append(&schedule(n, &post)?);
    Ok(c)
}

/// Qubits of one horizontal term in the parallel network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HorizontalSlots {
    pub left: usize,
    pub middle: usize,
    pub right: usize,
    pub left_half: HalfSlot,
    pub right_half: HalfSlot,
}

/// Qubits available to one half (`endpoint → middle`) of a horizontal term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfSlot {
    /// Secondary face in the term, if the half has one.
    pub face: Option<usize>,
    /// `|0⟩` ancilla coupled to the endpoint and the middle.
    pub relay: Option<usize>,
}

/// Parity network `exp{iθ Z…Z}` for one horizontal term inside an 8-layer
/// frame, without basis changes. Direct-type terms use the faces (or a relay
/// when a half has none) and occupy CNOT layers 2–7; ancilla-type terms
/// relay both endpoints and occupy layers 1–8. A single-qubit layer holding
/// the `RZ` sits between layers 4 and 5, so the frame has 9 layers.
pub fn horizontal_parity_network(
    n_qubits: usize,
    s: &HorizontalSlots,
    theta: f64,
    direct: bool,
) -> Result<Circuit, CircuitError> {
    let mut layers: Vec<Vec<Gate>> = vec![Vec::new(); 9];
    let (q1, q3, q5) = (s.left, s.middle, s.right);
    let mut put = |l: usize, g: Gate| layers[if l <= 4 { l - 1 } else { l }].push(g);
    if direct {
        let q2 = s.left_half.face.or(s.left_half.relay).ok_or(CircuitError::MissingSlot("left relay"))?;
        let q4 = s.right_half.face.or(s.right_half.relay).ok_or(CircuitError::MissingSlot("right relay"))?;
        put(2, Gate::cnot(q5, q4));
        put(3, Gate::cnot(q4, q3));
        put(3, Gate::cnot(q1, q2));
        put(4, Gate::cnot(q2, q3));
        put(5, Gate::cnot(q2, q3));
        put(6, Gate::cnot(q1, q2));
        put(6, Gate::cnot(q4, q3));
        put(7, Gate::cnot(q5, q4));
    } else {
        let a = s.left_half.relay.ok_or(CircuitError::MissingSlot("left relay"))?;
        let b = s.right_half.relay.ok_or(CircuitError::MissingSlot("right relay"))?;
        put(1, Gate::cnot(q1, a));
        put(2, Gate::cnot(q5, b));
        if let Some(q4) = s.right_half.face {
            put(1, Gate::cnot(q4, q3));
            put(8, Gate::cnot(q4, q3));
        }
        if let Some(q2) = s.left_half.face {
            put(2, Gate::cnot(q2, q3));
            put(7, Gate::cnot(q2, q3));
        }
        put(3, Gate::cnot(a, q3));
        put(4, Gate::cnot(b, q3));
        put(5, Gate::cnot(b, q3));
        put(6, Gate::cnot(a, q3));
        put(7, Gate::cnot(q5, b));
        put(8, Gate::cnot(q1, a));
    }
    layers[4].push(Gate::Rz(q3, -2.0 * theta));
    Circuit::from_layers(n_qubits, layers)
}
