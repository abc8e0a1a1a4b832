//! Device coupling graphs and placement of a layout onto them.
//!
//! Placed qubits are numbered layout qubits first (primaries, then
//! secondaries), followed by embedding ancillas. Compiled circuits act on
//! this register; [`Placement::physical`] maps it onto device qubits.
//!
//! The diamond patch uses doubled coordinates: site `(x, y)` of the single
//! interleaved block sits at `(2x, 2y)` and face `(i, j)` at
//! `(2i+1, 2j+1)`. Couplings join diagonal neighbours. Ancillas fill every
//! empty interior face plus a padding ring: the face rows `j = -1` and
//! `j = H-1` for all `i`, and the face columns `i = -1`, `i = W-1` where the
//! adjacent interior face holds a secondary.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::circuits::{Circuit, Gate};
use crate::dk_mapping::{DKLayout, Face};
use crate::model::CellScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviceKind {
    AllToAll,
    Diamond,
    /// Known to the vocabulary only; nothing compiles onto it.
    HeavyHoneycomb,
}

impl DeviceKind {
    pub const fn label(self) -> &'static str {
        match self {
            DeviceKind::AllToAll => "all_to_all",
            DeviceKind::Diamond => "diamond",
            DeviceKind::HeavyHoneycomb => "heavy_honeycomb",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedError {
    Incompatible { scheme: CellScheme, device: DeviceKind },
    Unsupported(DeviceKind),
    DeviceTooSmall { needed: usize, available: usize },
    MultipleBlocks(usize),
}

impl fmt::Display for EmbedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbedError::Incompatible { scheme, device } => write!(
                f,
                "{} layout cannot be placed on a {} device",
                scheme.label(),
                device.label()
            ),
            EmbedError::Unsupported(d) => write!(f, "unsupported device: {}", d.label()),
            EmbedError::DeviceTooSmall { needed, available } => {
                write!(f, "device has {available} qubits, placement needs {needed}")
            }
            EmbedError::MultipleBlocks(n) => write!(f, "diamond placement needs one block, layout has {n}"),
        }
    }
}

impl core::error::Error for EmbedError {}

/// A coupling graph. Diamond devices are rectangular patches of the
/// diagonal lattice: qubits at integer points `(u, v)` with `u + v` even.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceGraph {
    pub kind: DeviceKind,
    n_qubits: usize,
    width: usize,
    height: usize,
}

impl DeviceGraph {
    pub fn all_to_all(n_qubits: usize) -> Self {
        DeviceGraph { kind: DeviceKind::AllToAll, n_qubits, width: 0, height: 0 }
    }

    /// Diamond patch `width × height` (in doubled coordinates).
    pub fn diamond(width: usize, height: usize) -> Self {
        let n = (0..height).map(|v| (0..width).filter(|u| (u + v) % 2 == 0).count()).sum();
        DeviceGraph { kind: DeviceKind::Diamond, n_qubits: n, width, height }
    }

    pub fn heavy_honeycomb(n_qubits: usize) -> Self {
        DeviceGraph { kind: DeviceKind::HeavyHoneycomb, n_qubits, width: 0, height: 0 }
    }

    /// Smallest patch of `kind` that fits the layout.
    pub fn fitting(kind: DeviceKind, layout: &DKLayout) -> Self {
        match kind {
            DeviceKind::AllToAll => DeviceGraph::all_to_all(layout.n_qubits()),
            DeviceKind::Diamond => {
                let blk = layout.lattice.blocks[0];
                DeviceGraph::diamond(2 * blk.width + 1, 2 * blk.height + 1)
            }
            DeviceKind::HeavyHoneycomb => DeviceGraph::heavy_honeycomb(layout.n_qubits()),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Patch size `(width, height)`; zero for non-planar devices.
    pub fn extent(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Device index of patch point `(u, v)`.
    pub fn index_of(&self, u: usize, v: usize) -> Option<usize> {
        if self.kind != DeviceKind::Diamond || u >= self.width || v >= self.height || (u + v) % 2 == 1 {
            return None;
        }
        let before: usize = (0..v).map(|r| (0..self.width).filter(|c| (c + r) % 2 == 0).count()).sum();
        Some(before + (0..u).filter(|c| (c + v) % 2 == 0).count())
    }

    /// Patch point of a device qubit.
    pub fn position(&self, q: usize) -> Option<(usize, usize)> {
        if self.kind != DeviceKind::Diamond || q >= self.n_qubits {
            return None;
        }
        let mut left = q;
        for v in 0..self.height {
            let row = (0..self.width).filter(|c| (c + v) % 2 == 0).count();
            if left < row {
                let u = (0..self.width).filter(|c| (c + v) % 2 == 0).nth(left)?;
                return Some((u, v));
            }
            left -= row;
        }
        None
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        if a == b || a >= self.n_qubits || b >= self.n_qubits {
            return false;
        }
        match self.kind {
            DeviceKind::AllToAll => true,
            DeviceKind::Diamond => {
                let (Some((ua, va)), Some((ub, vb))) = (self.position(a), self.position(b)) else {
                    return false;
                };
                ua.abs_diff(ub) == 1 && va.abs_diff(vb) == 1
            }
            DeviceKind::HeavyHoneycomb => false,
        }
    }

    /// All coupled pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        match self.kind {
            DeviceKind::AllToAll => {
                for a in 0..self.n_qubits {
                    for b in a + 1..self.n_qubits {
                        out.push((a, b));
                    }
                }
            }
            DeviceKind::Diamond => {
                for v in 0..self.height {
                    for u in 0..self.width {
                        let Some(a) = self.index_of(u, v) else { continue };
                        for (du, dv) in [(1isize, 1isize), (-1, 1)] {
                            let (nu, nv) = (u as isize + du, v as isize + dv);
                            if nu < 0 || nv < 0 {
                                continue;
                            }
                            if let Some(b) = self.index_of(nu as usize, nv as usize) {
                                out.push((a.min(b), a.max(b)));
                            }
                        }
                    }
                }
                out.sort_unstable();
            }
            DeviceKind::HeavyHoneycomb => {}
        }
        out
    }
}

/// What a placed qubit is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Primary(usize),
    Secondary(Face),
    /// Embedding ancilla at face coordinates `(i, j)`, possibly outside.
    Ancilla(isize, isize),
}

/// A layout on a device.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub layout: DKLayout,
    pub device: DeviceGraph,
    /// Placed qubit → device qubit. Injective.
    pub physical: Vec<usize>,
    /// Placed indices of the embedding ancillas.
    pub ancilla_qubits: Vec<usize>,
    ancilla_at: BTreeMap<(isize, isize), usize>,
}

impl Placement {
    pub fn n_layout_qubits(&self) -> usize {
        self.layout.n_qubits()
    }

    pub fn total_qubits(&self) -> usize {
        self.physical.len()
    }

    pub fn role(&self, q: usize) -> Role {
        let n_p = self.layout.n_primary();
        if q < n_p {
            Role::Primary(q)
        } else if let Some(f) = self.layout.face_of_qubit(q) {
            Role::Secondary(f)
        } else {
            let (&(i, j), _) = self.ancilla_at.iter().find(|(_, &v)| v == q).expect("placed qubit");
            Role::Ancilla(i, j)
        }
    }

    pub fn is_ancilla(&self, q: usize) -> bool {
        q >= self.n_layout_qubits() && q < self.total_qubits()
    }

    /// Placed qubit at face `(i, j)` of block 0: its secondary or ancilla.
    pub fn face_qubit(&self, i: isize, j: isize) -> Option<usize> {
        if i >= 0 && j >= 0 {
            let f = Face { block: 0, i: i as usize, j: j as usize };
            if let Some(q) = self.layout.secondary_qubit(f) {
                return Some(q);
            }
        }
        self.ancilla_at.get(&(i, j)).copied()
    }

    /// Ancilla at face `(i, j)`, if any.
    pub fn ancilla(&self, i: isize, j: isize) -> Option<usize> {
        self.ancilla_at.get(&(i, j)).copied()
    }

    /// Placed index of a device qubit.
    pub fn placed_of(&self, device_qubit: usize) -> Option<usize> {
        self.physical.iter().position(|&d| d == device_qubit)
    }
}

fn check_compatible(layout: &DKLayout, device: &DeviceGraph) -> Result<(), EmbedError> {
    let scheme = layout.lattice.scheme;
    match (scheme, device.kind) {
        (_, DeviceKind::HeavyHoneycomb) => Err(EmbedError::Unsupported(DeviceKind::HeavyHoneycomb)),
        (CellScheme::Separated, DeviceKind::AllToAll) | (CellScheme::Interleaved, DeviceKind::Diamond) => Ok(()),
        _ => Err(EmbedError::Incompatible { scheme, device: device.kind }),
    }
}

/// Faces of the diamond ring and empty interior, in ancilla order.
fn diamond_ancilla_faces(layout: &DKLayout) -> Vec<(isize, isize)> {
    let blk = layout.lattice.blocks[0];
    let (w, h) = (blk.width as isize, blk.height as isize);
    let mut out = Vec::new();
    for f in layout.empty_faces() {
        out.push((f.i as isize, f.j as isize));
    }
    if w >= 2 {
        for j in [-1, h - 1] {
            for i in 0..w - 1 {
                out.push((i, j));
            }
        }
    }
    if w >= 2 && h >= 2 {
        for (outer, inner) in [(-1, 0), (w - 1, w - 2)] {
            for j in 0..h - 1 {
                let f = Face { block: 0, i: inner as usize, j: j as usize };
                if layout.is_occupied(f) {
                    out.push((outer, j));
                }
            }
        }
    }
    out
}

/// Places a layout on a device.
pub fn place(layout: &DKLayout, device: &DeviceGraph) -> Result<Placement, EmbedError> {
    check_compatible(layout, device)?;
    let n_layout = layout.n_qubits();
    match device.kind {
        DeviceKind::AllToAll => {
            if device.n_qubits() < n_layout {
                return Err(EmbedError::DeviceTooSmall { needed: n_layout, available: device.n_qubits() });
            }
            Ok(Placement {
                layout: layout.clone(),
                device: device.clone(),
                physical: (0..n_layout).collect(),
                ancilla_qubits: Vec::new(),
                ancilla_at: BTreeMap::new(),
            })
        }
        DeviceKind::Diamond => {
            if layout.lattice.blocks.len() != 1 {
                return Err(EmbedError::MultipleBlocks(layout.lattice.blocks.len()));
            }
            let faces = diamond_ancilla_faces(layout);
            let needed = n_layout + faces.len();
            let blk = layout.lattice.blocks[0];
            let (pw, ph) = device.extent();
            if pw < 2 * blk.width + 1 || ph < 2 * blk.height + 1 {
                return Err(EmbedError::DeviceTooSmall { needed, available: device.n_qubits() });
            }
            // Patch point of doubled coordinate (a, b) is (a + 1, b + 1).
            let at = |a: isize, b: isize| device.index_of((a + 1) as usize, (b + 1) as usize).expect("inside patch");
            let mut physical = Vec::with_capacity(needed);
            for s in 0..layout.n_primary() {
                let (x, y) = blk.coords(s);
                physical.push(at(2 * x as isize, 2 * y as isize));
            }
            for f in layout.secondary_faces() {
                physical.push(at(2 * f.i as isize + 1, 2 * f.j as isize + 1));
            }
            let mut ancilla_at = BTreeMap::new();
            let mut ancilla_qubits = Vec::new();
            for (i, j) in faces {
                ancilla_at.insert((i, j), physical.len());
                ancilla_qubits.push(physical.len());
                physical.push(at(2 * i + 1, 2 * j + 1));
            }
            Ok(Placement { layout: layout.clone(), device: device.clone(), physical, ancilla_qubits, ancilla_at })
        }
        DeviceKind::HeavyHoneycomb => Err(EmbedError::Unsupported(DeviceKind::HeavyHoneycomb)),
    }
}

/// First gate whose qubits are not coupled on the device.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub layer: usize,
    pub gate: Gate,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "layer {}: {:?}: {}", self.layer, self.gate, self.reason)
    }
}

/// Checks that every CNOT of a placed-register circuit acts on a device
/// edge. Controlled Pauli strings are simulator-native and not checked.
pub fn validate(p: &Placement, c: &Circuit) -> Result<(), Violation> {
    if c.n_qubits() > p.total_qubits() {
        return Err(Violation {
            layer: 0,
            gate: Gate::H(c.n_qubits() - 1),
            reason: alloc::format!("circuit has {} qubits, placement {}", c.n_qubits(), p.total_qubits()),
        });
    }
    for (k, layer) in c.layers().iter().enumerate() {
        for g in layer {
            if let Gate::Cnot { control, target } = g {
                let (a, b) = (p.physical[*control], p.physical[*target]);
                if !p.device.has_edge(a, b) {
                    return Err(Violation {
                        layer: k,
                        gate: g.clone(),
                        reason: alloc::format!("device qubits {a} and {b} are not coupled"),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::dk_mapping::build_layout;
    use crate::model::{to_spinless, HubbardModel};

    fn layout(lx: usize, ly: usize, scheme: CellScheme) -> DKLayout {
        build_layout(&to_spinless(&HubbardModel::new(lx, ly, 1.0, 4.0).unwrap(), scheme), None).unwrap()
    }

    #[test]
    fn qubit_counts_on_6x8() {
        let l = layout(6, 8, CellScheme::Separated);
        let p = place(&l, &DeviceGraph::fitting(DeviceKind::AllToAll, &l)).unwrap();
        assert_eq!((p.total_qubits(), p.ancilla_qubits.len()), (132, 0));
        let l = layout(6, 8, CellScheme::Interleaved);
        let p = place(&l, &DeviceGraph::fitting(DeviceKind::Diamond, &l)).unwrap();
        assert_eq!((l.n_primary(), l.n_secondary(), p.ancilla_qubits.len()), (96, 39, 68));
        assert_eq!(p.total_qubits(), 203);
    }

    #[test]
    fn small_diamond() {
        let l = layout(2, 2, CellScheme::Interleaved);
        let p = place(&l, &DeviceGraph::fitting(DeviceKind::Diamond, &l)).unwrap();
        assert_eq!(p.total_qubits(), 19);
        let mut seen = p.physical.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 19);
    }

    #[test]
    fn incompatible_pairs() {
        let l = layout(2, 2, CellScheme::Separated);
        assert!(matches!(place(&l, &DeviceGraph::diamond(9, 9)), Err(EmbedError::Incompatible { .. })));
        assert_eq!(
            place(&l, &DeviceGraph::heavy_honeycomb(40)),
            Err(EmbedError::Unsupported(DeviceKind::HeavyHoneycomb))
        );
        assert!(matches!(place(&l, &DeviceGraph::all_to_all(3)), Err(EmbedError::DeviceTooSmall { .. })));
    }

    #[test]
    fn diamond_edges_are_diagonal() {
        let d = DeviceGraph::diamond(5, 5);
        for (a, b) in d.edges() {
            let (pa, pb) = (d.position(a).unwrap(), d.position(b).unwrap());
            assert_eq!((pa.0.abs_diff(pb.0), pa.1.abs_diff(pb.1)), (1, 1));
            assert_eq!(d.index_of(pa.0, pa.1), Some(a));
        }
        let l = layout(2, 2, CellScheme::Interleaved);
        let p = place(&l, &DeviceGraph::fitting(DeviceKind::Diamond, &l)).unwrap();
        let bad = Circuit::from_layers(p.total_qubits(), vec![vec![Gate::cnot(0, 1)]]).unwrap();
        assert!(validate(&p, &bad).is_err());
    }
}
