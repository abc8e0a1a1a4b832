//! Vacuum preparation.
//!
//! With every primary in `|0⟩`, each stabilizer restricted to the secondaries
//! reads `X` on its left/right neighbour faces and `Y` on the faces above and
//! below. The two classes of empty faces (column parity) act like the stars
//! and plaquettes of a toric code on the secondaries. The circuit prepares the
//! CSS state with one class `X`-type and the other `Z`-type, rotates each
//! secondary into the mapped basis and fixes stabilizer signs with Paulis.
//!
//! A CSS `X`-type stabilizer is projected in by putting a fresh root (a
//! member not yet entangled) in `|+⟩` and fanning it out to the other
//! members. On the diamond, secondaries are not coupled to each other, so the
//! fan-out runs from the face's own ancilla through borrowed corner primaries
//! that are returned to `|0⟩`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use super::CompileError;
use crate::circuits::{count_entangling_layers, schedule_commuting, Circuit, Gate};
use crate::dk_mapping::{face_loop, Face};
use crate::embed::{DeviceKind, Placement};
use crate::pauli::Letter;

/// An empty face with its neighbouring secondaries.
#[derive(Debug, Clone)]
struct Stab {
    face: Face,
    left: Option<usize>,
    right: Option<usize>,
    up: Option<usize>,
    down: Option<usize>,
}

impl Stab {
    fn members(&self) -> Vec<usize> {
        [self.left, self.right, self.up, self.down].into_iter().flatten().collect()
    }
}

fn neighbour(p: &Placement, f: Face, di: isize, dj: isize) -> Option<usize> {
    let (i, j) = (f.i as isize + di, f.j as isize + dj);
    if i < 0 || j < 0 {
        return None;
    }
    p.layout.secondary_qubit(Face { block: f.block, i: i as usize, j: j as usize })
}

fn stabs(p: &Placement) -> Vec<Stab> {
    p.layout
        .empty_faces()
        .into_iter()
        .map(|f| Stab {
            face: f,
            left: neighbour(p, f, -1, 0),
            right: neighbour(p, f, 1, 0),
            up: neighbour(p, f, 0, 1),
            down: neighbour(p, f, 0, -1),
        })
        .collect()
}

/// Vacuum state: `Z = +1` on primaries, every stabilizer `+1`, ancillas `|0⟩`.
pub fn vacuum_circuit(p: &Placement) -> Result<Circuit, CompileError> {
    let n = p.total_qubits();
    let all = stabs(p);
    let mut best: Option<(usize, usize, Vec<Gate>)> = None;
    for x_class in 0..2 {
        let xs: Vec<&Stab> = all.iter().filter(|s| s.face.i % 2 == x_class).collect();
        let candidates = match p.device.kind {
            DeviceKind::AllToAll => fan_out_stages(&xs).map(|g| vec![g]),
            _ => relay_orders(p, &xs),
        };
        let Ok(candidates) = candidates else { continue };
        for gates in candidates {
            let depth = count_entangling_layers(&schedule_commuting(n, &gates)?);

            if best.as_ref().is_none_or(|b| depth < b.0) {
                best = Some((depth, x_class, gates));
            }
        }
    }
    let (_, x_class, mut gates) = best.ok_or(CompileError::NoFreshRoot)?;
    gates.extend(sign_fix(p, &all, x_class)?);
    for f in p.layout.secondary_faces() {
        let q = p.layout.secondary_qubit(*f).expect("secondary");
        if f.i % 2 == x_class {
            gates.push(Gate::H(q));
        }
    }
    for q in p.layout.n_primary()..p.layout.n_qubits() {
        gates.push(Gate::Rx(q, -FRAC_PI_2));
    }
    Ok(schedule_commuting(n, &gates)?)
}

/// Letter a CSS letter becomes under the basis change; signs are all `+`.
fn mapped_letter(hadamard: bool, l: Letter) -> Letter {
    // RX(−π/2): X → X, Z → Y. H first swaps X and Z.
    match (hadamard, l) {
        (false, Letter::X) | (true, Letter::Z) => Letter::X,
        (false, Letter::Z) | (true, Letter::X) => Letter::Y,
        _ => l,
    }
}

/// Pauli corrections, in the CSS frame, flipping every stabilizer whose
/// mapped sign would be `−1`.
fn sign_fix(p: &Placement, all: &[Stab], x_class: usize) -> Result<Vec<Gate>, CompileError> {
    let n_p = p.layout.n_primary();
    let n_s = p.layout.n_secondary();
    let mut rows_x = Vec::new();
    let mut rows_z = Vec::new();
    for s in all {
        let j = face_loop(&p.layout, s.face);
        let x_type = s.face.i % 2 == x_class;
        let css = if x_type { Letter::X } else { Letter::Z };
        for q in 0..p.layout.n_qubits() {
            let l = j.letter(q);
            let ok = if q < n_p {
                matches!(l, Letter::I | Letter::Z)
            } else {
                let member = s.members().contains(&q);
                let f = p.layout.face_of_qubit(q).expect("secondary");
                let want = if member { mapped_letter(f.i % 2 == x_class, css) } else { Letter::I };
                l == want
            };
            if !ok {
                return Err(CompileError::TermShape(alloc::format!(
                    "stabilizer at face ({}, {}) has letter {l:?} on qubit {q}",
                    s.face.i,
                    s.face.j
                )));
            }
        }
        let flip = match j.phase_exp() {
            0 => false,
            2 => true,
            _ => return Err(CompileError::TermShape("stabilizer is not Hermitian".into())),
        };
        let mut row = vec![false; n_s];
        for m in s.members() {
            row[m - n_p] = true;
        }
        if x_type {
            rows_x.push((row, flip));
        } else {
            rows_z.push((row, flip));
        }
    }
    let mut out = Vec::new();
    // Z errors flip X-type stabilizers, X errors flip Z-type ones.
    for (rows, gate) in [(rows_x, Gate::Z as fn(usize) -> Gate), (rows_z, Gate::X as fn(usize) -> Gate)] {
        let sol = solve_gf2(rows)
            .ok_or_else(|| CompileError::TermShape("stabilizer signs cannot be fixed".into()))?;
        for (k, b) in sol.into_iter().enumerate() {
            if b {
                out.push(gate(n_p + k));
            }
        }
    }
    Ok(out)
}

/// Solves `A v = rhs` over GF(2); rows are `(A_i, rhs_i)`.
fn solve_gf2(mut rows: Vec<(Vec<bool>, bool)>) -> Option<Vec<bool>> {
    let n = rows.first().map_or(0, |r| r.0.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(k) = (r..rows.len()).find(|&k| rows[k].0[c]) else { continue };
        rows.swap(r, k);
        for k in 0..rows.len() {
            if k != r && rows[k].0[c] {
                let (src, b) = (rows[r].0.clone(), rows[r].1);
                for (x, y) in rows[k].0.iter_mut().zip(&src) {
                    *x ^= *y;
                }
                rows[k].1 ^= b;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row.1) {
        return None;
    }
    let mut v = vec![false; n];
    for (k, &c) in pivots.iter().enumerate() {
        v[c] = rows[k].1;
    }
    Some(v)
}

/// All-to-all: stages of fresh-root fan-outs, each stage edge-coloured.
fn fan_out_stages(xs: &[&Stab]) -> Result<Vec<Gate>, CompileError> {
    let mut remaining: Vec<&Stab> = xs.iter().copied().filter(|s| !s.members().is_empty()).collect();
    let mut touched: BTreeSet<usize> = BTreeSet::new();
    let mut gates = Vec::new();
    while !remaining.is_empty() {
        let mut stage_support: BTreeSet<usize> = BTreeSet::new();
        let mut stage_roots: BTreeSet<usize> = BTreeSet::new();
        let mut chosen: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut rest = Vec::new();
        for s in remaining {
            let members = s.members();
            if members.iter().any(|m| stage_roots.contains(m)) {
                rest.push(s);
                continue;
            }
            // Prefer the member shared with the fewest other stabilizers.
            let root = members
                .iter()
                .copied()
                .filter(|m| !touched.contains(m) && !stage_support.contains(m))
                .min_by_key(|m| xs.iter().filter(|t| t.members().contains(m)).count());
            match root {
                Some(r) => {
                    stage_roots.insert(r);
                    stage_support.extend(members.iter().copied());
                    chosen.push((r, members));
                }
                None => rest.push(s),
            }
        }
        if chosen.is_empty() {
            return Err(CompileError::NoFreshRoot);
        }
        let mut edges = Vec::new();
        for (r, members) in &chosen {
            gates.push(Gate::H(*r));
            edges.extend(members.iter().filter(|m| *m != r).map(|&m| (*r, m)));
        }
        let colours = edge_colouring(&edges);
        let n_colours = colours.iter().copied().max().map_or(0, |c| c + 1);
        for c in 0..n_colours {
            for (e, &(a, b)) in edges.iter().enumerate() {
                if colours[e] == c {
                    gates.push(Gate::cnot(a, b));
                }
            }
        }
        touched.extend(stage_support);
        remaining = rest;
    }
    Ok(gates)
}

/// Proper edge colouring of a bipartite graph with max-degree colours.
fn edge_colouring(edges: &[(usize, usize)]) -> Vec<usize> {
    let n_nodes = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let mut degree = vec![0usize; n_nodes];
    for &(a, b) in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let delta = degree.iter().copied().max().unwrap_or(0);
    let mut at: Vec<Vec<Option<usize>>> = vec![vec![None; delta]; n_nodes];
    let mut colour = vec![0usize; edges.len()];
    for (e, &(u, v)) in edges.iter().enumerate() {
        let a = (0..delta).find(|&c| at[u][c].is_none()).expect("free colour");
        if at[v][a].is_some() {
            let b = (0..delta).find(|&c| at[v][c].is_none()).expect("free colour");
            // Swap a and b along the alternating path leaving v.
            let mut path = Vec::new();
            let (mut node, mut c) = (v, a);
            while let Some(ed) = at[node][c] {
                path.push(ed);
                let (x, y) = edges[ed];
                node = if x == node { y } else { x };
                c = if c == a { b } else { a };
            }
            for &ed in &path {
                let (x, y) = edges[ed];
                at[x][colour[ed]] = None;
                at[y][colour[ed]] = None;
            }
            for &ed in &path {
                colour[ed] = if colour[ed] == a { b } else { a };
                let (x, y) = edges[ed];
                at[x][colour[ed]] = Some(ed);
                at[y][colour[ed]] = Some(ed);
            }
        }
        colour[e] = a;
        at[u][a] = Some(e);
        at[v][a] = Some(e);
    }
    colour
}

/// Corner primaries of a face in doubled coordinates.
struct Corners {
    tl: usize,
    tr: usize,
    bl: usize,
    br: usize,
}

fn corners(p: &Placement, f: Face) -> Corners {
    let c = p.layout.face_corners(f);
    // face_corners runs counter-clockwise from (i, j).
    Corners { bl: c[0], br: c[1], tr: c[2], tl: c[3] }
}

/// Diamond: one gate list per pivot row, processed middle-out.
fn relay_orders(p: &Placement, xs: &[&Stab]) -> Result<Vec<Vec<Gate>>, CompileError> {
    let mut rows: Vec<usize> = xs.iter().map(|s| s.face.j).collect();
    rows.sort_unstable();
    rows.dedup();
    if rows.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    let mut out = Vec::new();
    for pivot in 0..rows.len() {
        let mut order = vec![(rows[pivot], 0i8)];
        for d in 1..rows.len() {
            if pivot + d < rows.len() {
                order.push((rows[pivot + d], 1));
            }
            if d <= pivot {
                order.push((rows[pivot - d], -1));
            }
        }
        if let Ok(g) = relay_gates(p, xs, &order) {
            out.push(g);
        }
    }
    if out.is_empty() {
        return Err(CompileError::NoFreshRoot);
    }
    Ok(out)
}

fn relay_gates(p: &Placement, xs: &[&Stab], order: &[(usize, i8)]) -> Result<Vec<Gate>, CompileError> {
    let mut touched: BTreeSet<usize> = BTreeSet::new();
    let mut gates = Vec::new();
    for &(row, side) in order {
        let mut in_row: Vec<&&Stab> = xs.iter().filter(|s| s.face.j == row).collect();
        in_row.sort_by_key(|s| s.face.i);
        for s in in_row {
            let members = s.members();
            if members.is_empty() {
                continue;
            }
            let gc = p
                .ancilla(s.face.i as isize, s.face.j as isize)
                .ok_or_else(|| CompileError::TermShape("empty face without ancilla".into()))?;
            let c = corners(p, s.face);
            let fresh = |q: Option<usize>| q.filter(|q| !touched.contains(q));
            let (up, down) = (fresh(s.up), fresh(s.down));
            if let (0, Some(pt), Some(pb)) = (side, up, down) {
                gates.extend([Gate::H(gc), Gate::cnot(gc, c.tl), Gate::cnot(c.tl, pt), Gate::cnot(gc, c.br)]);
                gates.push(Gate::cnot(c.br, pb));
                if let Some(pl) = s.left {
                    gates.push(Gate::cnot(c.tl, pl));
                }
                gates.push(Gate::cnot(c.tl, gc));
                if let Some(pr) = s.right {
                    gates.push(Gate::cnot(c.br, pr));
                }
                gates.extend([Gate::cnot(pt, c.tl), Gate::cnot(pb, c.br)]);
            } else {
                // Fresh member F on corner cf; the opposite corner covers the rest.
                let prefs = match side {
                    1 => [s.up, s.down, s.left, s.right],
                    -1 => [s.down, s.up, s.left, s.right],
                    _ => [s.up, s.down, s.left, s.right],
                };
                let f = prefs.into_iter().find_map(fresh).ok_or(CompileError::NoFreshRoot)?;
                // (corner of F, F's partner on it, opposite corner, its members)
                let (cf, partner, co, far) = if Some(f) == s.up {
                    (c.tl, s.left, c.br, [s.right, s.down])
                } else if Some(f) == s.down {
                    (c.bl, s.left, c.tr, [s.right, s.up])
                } else if Some(f) == s.left {
                    (c.tl, s.up, c.br, [s.right, s.down])
                } else {
                    (c.br, s.down, c.tl, [s.left, s.up])
                };
                gates.push(Gate::H(gc));
                let far: Vec<usize> = far.into_iter().flatten().collect();
                if !far.is_empty() {
                    gates.push(Gate::cnot(gc, co));
                }
                gates.push(Gate::cnot(gc, cf));
                for &m in &far {
                    gates.push(Gate::cnot(co, m));
                }
                if let Some(m) = partner {
                    gates.push(Gate::cnot(cf, m));
                }
                gates.push(Gate::cnot(cf, f));
                if !far.is_empty() {
                    gates.push(Gate::cnot(gc, co));
                }
                gates.extend([Gate::cnot(cf, gc), Gate::cnot(f, cf)]);
            }
            touched.extend(members);
        }
    }
    Ok(gates)
}
