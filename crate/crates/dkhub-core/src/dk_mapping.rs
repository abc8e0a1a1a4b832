//! Derby-Klassen compact encoding on a spinless lattice.
//!
//! Every site carries a primary qubit. Faces of each grid block are indexed
//! `(i, j)` with corners `(i, j)`, `(i+1, j)`, `(i, j+1)`, `(i+1, j+1)`; a
//! face holds a secondary qubit iff `i + j + phase` is even. Primary qubits
//! come first (qubit = site index), followed by secondary qubits in
//! block/row-major face order.
//!
//! Bond orientation: a vertical bond `(x, y)-(x, y+1)` has its tail at the
//! lower site iff `x + phase` is even; a horizontal bond `(x, y)-(x+1, y)`
//! has its tail on the left iff `y` is even. With this choice every
//! occupied face has both edges at each corner either entering or leaving,
//! and every empty face is a directed cycle.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::SpinlessLattice;
use crate::pauli::{Letter, PauliString};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MappingError {
    NotNeighbors { a: usize, b: usize },
    Faceless { a: usize, b: usize },
    BrokenPath(String),
    RepeatedBond { a: usize, b: usize },
    NoCorner,
    BadCorner(String),
    NoDeclaredPath { a: usize, b: usize },
    SameSite(usize),
    SiteOutOfRange(usize),
    DifferentBlocks { a: usize, b: usize },
}

impl fmt::Display for MappingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MappingError::NotNeighbors { a, b } => write!(f, "sites {a} and {b} are not nearest neighbours"),
            MappingError::Faceless { a, b } => write!(
                f,
                "bond {a}-{b} has no secondary face; use the two-qubit hopping form"
            ),
            MappingError::BrokenPath(msg) => write!(f, "broken path: {msg}"),
            MappingError::RepeatedBond { a, b } => write!(f, "bond {a}-{b} repeated in path"),
            MappingError::NoCorner => write!(f, "layout has no Majorana corner secondary qubit"),
            MappingError::BadCorner(msg) => write!(f, "Majorana corner rejected: {msg}"),
            MappingError::NoDeclaredPath { a, b } => write!(f, "no hopping term between {a} and {b}"),
            MappingError::SameSite(s) => write!(f, "pair creation needs two distinct sites, got {s} twice"),
            MappingError::SiteOutOfRange(s) => write!(f, "site {s} out of range"),
            MappingError::DifferentBlocks { a, b } => write!(f, "sites {a} and {b} lie in different blocks"),
        }
    }
}

impl core::error::Error for MappingError {}

/// A lattice face (plaquette) of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub block: usize,
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondKind {
    Vertical,
    Horizontal,
}

/// An oriented nearest-neighbour bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub tail: usize,
    pub head: usize,
    pub kind: BondKind,
    /// Secondary face adjacent to the bond, if any.
    pub face: Option<Face>,
}

/// Majorana species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MajoranaKind {
    /// `γ = c + c†`
    Gamma,
    /// `γ̄ = i(c† − c)`
    GammaBar,
}

/// Build options.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LayoutOptions {
    /// Site whose corner face must carry a secondary qubit.
    pub majorana_corner: Option<usize>,
    /// Reverses every horizontal bond. Breaks the encoding; used to check that
    /// the verification suite notices.
    pub flip_orientation: bool,
}

/// The Derby-Klassen qubit layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DKLayout {
    pub lattice: SpinlessLattice,
    /// Checkerboard phase per block.
    pub phases: Vec<u8>,
    pub majorana_corner: Option<usize>,
    pub flip_orientation: bool,
    secondary: Vec<Face>,
    face_qubit: Vec<Vec<Option<usize>>>,
}

impl DKLayout {
    pub fn n_primary(&self) -> usize {
        self.lattice.n_sites()
    }

    pub fn n_secondary(&self) -> usize {
        self.secondary.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_primary() + self.n_secondary()
    }

    pub fn primary_qubit(&self, site: usize) -> usize {
        site
    }

    /// Secondary faces in qubit order.
    pub fn secondary_faces(&self) -> &[Face] {
        &self.secondary
    }

    /// Qubit of a face, if the face carries one.
    pub fn secondary_qubit(&self, f: Face) -> Option<usize> {
        let blk = self.lattice.blocks.get(f.block)?;
        if blk.width < 2 || blk.height < 2 || f.i + 1 >= blk.width || f.j + 1 >= blk.height {
            return None;
        }
        self.face_qubit[f.block][f.j * (blk.width - 1) + f.i]
    }

    /// Face carried by a secondary qubit.
    pub fn face_of_qubit(&self, q: usize) -> Option<Face> {
        q.checked_sub(self.n_primary()).and_then(|k| self.secondary.get(k).copied())
    }

    pub fn is_occupied(&self, f: Face) -> bool {
        (f.i + f.j + self.phases[f.block] as usize) % 2 == 0
    }

    /// All faces of all blocks.
    pub fn faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for (b, blk) in self.lattice.blocks.iter().enumerate() {
            if blk.width < 2 || blk.height < 2 {
                continue;
            }
            for j in 0..blk.height - 1 {
                for i in 0..blk.width - 1 {
                    out.push(Face { block: b, i, j });
                }
            }
        }
        out
    }

    /// Faces without a secondary qubit; one stabilizer each.
    pub fn empty_faces(&self) -> Vec<Face> {
        self.faces().into_iter().filter(|f| !self.is_occupied(*f)).collect()
    }

    /// Corner sites of a face, counter-clockwise from `(i, j)`.
    pub fn face_corners(&self, f: Face) -> [usize; 4] {
        let blk = &self.lattice.blocks[f.block];
        [
            blk.site(f.i, f.j),
            blk.site(f.i + 1, f.j),
            blk.site(f.i + 1, f.j + 1),
            blk.site(f.i, f.j + 1),
        ]
    }

    /// The oriented bond between two neighbouring sites.
    pub fn bond(&self, a: usize, b: usize) -> Result<Bond, MappingError> {
        if !self.lattice.are_neighbors(a, b) {
            return Err(MappingError::NotNeighbors { a, b });
        }
        let (blk_idx, xa, _) = self.lattice.locate(a);
        let (_, xb, _) = self.lattice.locate(b);
        let blk = &self.lattice.blocks[blk_idx];
        let phase = self.phases[blk_idx] as usize;
        // Row-major numbering: the smaller index is the lower or left site.
        let (lo, hi) = (a.min(b), a.max(b));
        let (_, lx, ly) = self.lattice.locate(lo);
        if xa == xb {
            // Vertical bond (lx, ly)-(lx, ly+1); faces to the left and right.
            let tail_low = (lx + phase) % 2 == 0;
            let (tail, head) = if tail_low { (lo, hi) } else { (hi, lo) };
            let mut face = None;
            for fi in [lx.checked_sub(1), Some(lx)].into_iter().flatten() {
                if fi + 1 < blk.width {
                    let f = Face { block: blk_idx, i: fi, j: ly };
                    if self.is_occupied(f) && ly + 1 < blk.height {
                        face = Some(f);
                    }
                }
            }
            Ok(Bond { tail, head, kind: BondKind::Vertical, face })
        } else {
            let tail_left = (ly % 2 == 0) != self.flip_orientation;
            let (tail, head) = if tail_left { (lo, hi) } else { (hi, lo) };
            let mut face = None;
            for fj in [ly.checked_sub(1), Some(ly)].into_iter().flatten() {
                if fj + 1 < blk.height {
                    let f = Face { block: blk_idx, i: lx, j: fj };
                    if self.is_occupied(f) && lx + 1 < blk.width {
                        face = Some(f);
                    }
                }
            }
            Ok(Bond { tail, head, kind: BondKind::Horizontal, face })
        }
    }

    /// Every bond of the lattice, in site order.
    pub fn bonds(&self) -> Vec<Bond> {
        let mut out = Vec::new();
        for blk in &self.lattice.blocks {
            for y in 0..blk.height {
                for x in 0..blk.width {
                    let s = blk.site(x, y);
                    if x + 1 < blk.width {
                        out.push(self.bond(s, blk.site(x + 1, y)).expect("neighbours"));
                    }
                    if y + 1 < blk.height {
                        out.push(self.bond(s, blk.site(x, y + 1)).expect("neighbours"));
                    }
                }
            }
        }
        out
    }

    fn identity(&self) -> PauliString {
        PauliString::identity(self.n_qubits())
    }
}

/// Builds the layout with default options plus an optional Majorana corner.
pub fn build_layout(l: &SpinlessLattice, majorana_corner: Option<usize>) -> Result<DKLayout, MappingError> {
    build_layout_with(l, LayoutOptions { majorana_corner, flip_orientation: false })
}

pub fn build_layout_with(l: &SpinlessLattice, opts: LayoutOptions) -> Result<DKLayout, MappingError> {
    let mut phases = vec![0u8; l.blocks.len()];
    if let Some(c) = opts.majorana_corner {
        if c >= l.n_sites() {
            return Err(MappingError::SiteOutOfRange(c));
        }
        let (b, x, y) = l.locate(c);
        let blk = &l.blocks[b];
        if blk.width < 2 || blk.height < 2 {
            return Err(MappingError::BadCorner(alloc::format!(
                "block {b} is {}x{} and has no faces",
                blk.width,
                blk.height
            )));
        }
        let on_x = x == 0 || x + 1 == blk.width;
        let on_y = y == 0 || y + 1 == blk.height;
        if !(on_x && on_y) {
            return Err(MappingError::BadCorner(alloc::format!(
                "site {c} at ({x}, {y}) is not a corner of its block"
            )));
        }
        let fi = if x == 0 { 0 } else { blk.width - 2 };
        let fj = if y == 0 { 0 } else { blk.height - 2 };
        phases[b] = ((fi + fj) % 2) as u8;
    }
    let mut secondary = Vec::new();
    let mut face_qubit = Vec::new();
    let n_sites = l.n_sites();
    for (b, blk) in l.blocks.iter().enumerate() {
        let fw = blk.width.saturating_sub(1);
        let fh = blk.height.saturating_sub(1);
        let mut table = vec![None; fw * fh];
        for j in 0..fh {
            for i in 0..fw {
                if (i + j + phases[b] as usize) % 2 == 0 {
                    table[j * fw + i] = Some(n_sites + secondary.len());
                    secondary.push(Face { block: b, i, j });
                }
            }
        }
        face_qubit.push(table);
    }
    Ok(DKLayout {
        lattice: l.clone(),
        phases,
        majorana_corner: opts.majorana_corner,
        flip_orientation: opts.flip_orientation,
        secondary,
        face_qubit,
    })
}

fn face_letter(kind: BondKind) -> Letter {
    match kind {
        BondKind::Vertical => Letter::X,
        BondKind::Horizontal => Letter::Y,
    }
}

/// Edge operator of the oriented bond, `X_tail Y_head P_face`; faceless
/// bonds get `X_tail Y_head`.
fn oriented_edge(layout: &DKLayout, bond: &Bond) -> PauliString {
    let n = layout.n_qubits();
    let mut letters = vec![(bond.tail, Letter::X), (bond.head, Letter::Y)];
    if let Some(f) = bond.face {
        let q = layout.secondary_qubit(f).expect("occupied face has a qubit");
        letters.push((q, face_letter(bond.kind)));
    }
    let e = PauliString::from_letters(n, &letters);
    if edge_sign_negative(layout, bond) {
        -e
    } else {
        e
    }
}

/// Vertical bonds pointing up (tail at the lower site) carry a minus sign.
/// This makes every occupied face loop equal `+I`.
fn edge_sign_negative(layout: &DKLayout, bond: &Bond) -> bool {
    if bond.kind != BondKind::Vertical {
        return false;
    }
    let (_, _, yt) = layout.lattice.locate(bond.tail);
    let (_, _, yh) = layout.lattice.locate(bond.head);
    yt < yh
}

/// Edge operator for any bond, using the faceless form where needed.
pub fn edge_operator_any(layout: &DKLayout, j: usize, k: usize) -> Result<PauliString, MappingError> {
    let bond = layout.bond(j, k)?;
    let e = oriented_edge(layout, &bond);
    Ok(if bond.tail == j { e } else { -e })
}

/// Mapped edge operator `Ẽ_jk`. Faceless boundary bonds are rejected.
pub fn edge_operator(layout: &DKLayout, j: usize, k: usize) -> Result<PauliString, MappingError> {
    let bond = layout.bond(j, k)?;
    if bond.face.is_none() {
        return Err(MappingError::Faceless { a: j, b: k });
    }
    edge_operator_any(layout, j, k)
}

/// Mapped vertex operator `Ṽ_j = Z_j`.
pub fn vertex_operator(layout: &DKLayout, j: usize) -> PauliString {
    PauliString::single(layout.n_qubits(), layout.primary_qubit(j), Letter::Z)
}

/// `F̃ = −i ∏ (i Ẽ)` along consecutive bonds of `path`.
pub fn path_operator(layout: &DKLayout, path: &[usize]) -> Result<PauliString, MappingError> {
    if path.len() < 2 {
        return Err(MappingError::BrokenPath(alloc::format!("path needs two sites, got {}", path.len())));
    }
    let mut seen: Vec<(usize, usize)> = Vec::new();
    let mut acc = layout.identity();
    for w in path.windows(2) {
        let key = (w[0].min(w[1]), w[0].max(w[1]));
        if seen.contains(&key) {
            return Err(MappingError::RepeatedBond { a: key.0, b: key.1 });
        }
        seen.push(key);
        let e = edge_operator_any(layout, w[0], w[1]).map_err(|e| match e {
            MappingError::NotNeighbors { a, b } => {
                MappingError::BrokenPath(alloc::format!("sites {a} and {b} are not adjacent"))
            }
            other => other,
        })?;
        acc = acc.mul_ref(&e.times_i(1));
    }
    Ok(acc.times_i(3))
}

/// Deterministic L-shaped path: along the row first, then along the column.
pub fn l_path(layout: &DKLayout, a: usize, b: usize) -> Result<Vec<usize>, MappingError> {
    let l = &layout.lattice;
    if a >= l.n_sites() {
        return Err(MappingError::SiteOutOfRange(a));
    }
    if b >= l.n_sites() {
        return Err(MappingError::SiteOutOfRange(b));
    }
    let (ba, mut x, mut y) = l.locate(a);
    let (bb, xb, yb) = l.locate(b);
    if ba != bb {
        return Err(MappingError::DifferentBlocks { a, b });
    }
    let blk = &l.blocks[ba];
    let mut path = vec![a];
    while x != xb {
        if x < xb { x += 1 } else { x -= 1 }
        path.push(blk.site(x, y));
    }
    while y != yb {
        if y < yb { y += 1 } else { y -= 1 }
        path.push(blk.site(x, y));
    }
    Ok(path)
}

/// Hermitian hopping generators `(G_Y, G_X) = (i Ṽ_n F̃, i F̃ Ṽ_m)` for the
/// declared hopping between `n` and `m`. A hopping term with amplitude `t`
/// maps to `−(t/2)·(G_X + G_Y)`.
pub fn hopping_generators(layout: &DKLayout, n: usize, m: usize) -> Result<(PauliString, PauliString), MappingError> {
    let term = layout
        .lattice
        .hoppings
        .iter()
        .find(|h| h.ends() == (n, m) || h.ends() == (m, n))
        .ok_or(MappingError::NoDeclaredPath { a: n, b: m })?;
    let mut path = term.path.clone();
    if path[0] != n {
        path.reverse();
    }
    generators_along(layout, &path)
}

/// Hopping generators along an explicit path.
pub fn generators_along(layout: &DKLayout, path: &[usize]) -> Result<(PauliString, PauliString), MappingError> {
    let f = path_operator(layout, path)?;
    let (n, m) = (path[0], path[path.len() - 1]);
    let gy = vertex_operator(layout, n).mul_ref(&f).times_i(1);
    let gx = f.mul_ref(&vertex_operator(layout, m)).times_i(1);
    Ok((gy, gx))
}

/// The lattice Hamiltonian as a real-weighted Pauli sum on the layout.
/// Hoppings give `−(t/2)(G_X + G_Y)`; `U n_a n_b` gives
/// `(U/4)(I − Z_a − Z_b + Z_a Z_b)`.
pub fn mapped_hamiltonian(layout: &DKLayout) -> Result<Vec<(f64, PauliString)>, MappingError> {
    let mut out = Vec::new();
    for h in &layout.lattice.hoppings {
        let (gy, gx) = generators_along(layout, &h.path)?;
        out.push((-h.amplitude / 2.0, gx));
        out.push((-h.amplitude / 2.0, gy));
    }
    for t in &layout.lattice.interactions {
        let (zz, za, zb) = interaction_strings(layout, t.a, t.b);
        let w = t.amplitude / 4.0;
        out.extend([(w, layout.identity()), (-w, za), (-w, zb), (w, zz)]);
    }
    Ok(out)
}

/// `(Z_j Z_k, Z_j, Z_k)`.
pub fn interaction_strings(layout: &DKLayout, j: usize, k: usize) -> (PauliString, PauliString, PauliString) {
    let zj = vertex_operator(layout, j);
    let zk = vertex_operator(layout, k);
    (zj.mul_ref(&zk), zj, zk)
}

/// Loop product `∏ Ẽ` counter-clockwise around a face, including faceless
/// edges. Equals `+I` on occupied faces and the stabilizer on empty ones.
pub fn face_loop(layout: &DKLayout, f: Face) -> PauliString {
    let c = layout.face_corners(f);
    let mut acc = layout.identity();
    for k in 0..4 {
        let e = edge_operator_any(layout, c[k], c[(k + 1) % 4]).expect("face edges are bonds");
        acc = acc.mul_ref(&e);
    }
    acc
}

/// One stabilizer `𝕁_p` per empty face, in face order.
pub fn stabilizers(layout: &DKLayout) -> Vec<PauliString> {
    layout.empty_faces().into_iter().map(|f| face_loop(layout, f)).collect()
}

/// Single Majorana string for `site`, anchored at the layout's corner.
pub fn single_majorana(layout: &DKLayout, site: usize, kind: MajoranaKind) -> Result<PauliString, MappingError> {
    let corner = layout.majorana_corner.ok_or(MappingError::NoCorner)?;
    if site >= layout.n_primary() {
        return Err(MappingError::SiteOutOfRange(site));
    }
    let n = layout.n_qubits();
    // Letter the incident bonds put on the corner; both agree on an occupied face.
    let blk_idx = layout.lattice.locate(corner).0;
    let neighbor = (0..layout.n_primary())
        .find(|&s| layout.lattice.are_neighbors(corner, s))
        .ok_or(MappingError::NoCorner)?;
    let bond = layout.bond(corner, neighbor)?;
    let corner_face_ok = layout.faces().into_iter().any(|f| {
        f.block == blk_idx && layout.is_occupied(f) && layout.face_corners(f).contains(&corner)
    });
    if !corner_face_ok {
        return Err(MappingError::NoCorner);
    }
    let gamma0 = if bond.tail == corner {
        PauliString::single(n, corner, Letter::Y)
    } else {
        PauliString::single(n, corner, Letter::X)
    };
    let gamma = if site == corner {
        gamma0
    } else {
        let path = l_path(layout, site, corner)?;
        path_operator(layout, &path)?.mul_ref(&gamma0).times_i(1)
    };
    Ok(match kind {
        MajoranaKind::Gamma => gamma,
        MajoranaKind::GammaBar => gamma.mul_ref(&vertex_operator(layout, site)).times_i(1),
    })
}

/// String creating a fermion pair at `j` and `k` from the vacuum: `F̃_jk`
/// along the L-shaped path with `Z` letters on primary qubits removed.
pub fn pair_creation_string(layout: &DKLayout, j: usize, k: usize) -> Result<PauliString, MappingError> {
    if j == k {
        return Err(MappingError::SameSite(j));
    }
    let path = l_path(layout, j, k)?;
    let mut f = path_operator(layout, &path)?;
    for q in 0..layout.n_primary() {
        if f.letter(q) == Letter::Z {
            f.set_letter(q, Letter::I);
        }
    }
    Ok(f)
}
