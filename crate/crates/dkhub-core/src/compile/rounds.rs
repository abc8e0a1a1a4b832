//! Parallel rounds of Trotter terms.
//!
//! A hopping term `t(c†c + h.c.)` maps to `−(t/2)(G_X + G_Y)`, so evolving
//! for time `τ` is `exp{iθ(G_X + G_Y)}` with `θ = tτ/2`. Each template
//! implements `exp{iα(T_A + T_B)}` for fixed strings `T`; the mapped
//! generators are checked against them and `α = ±θ` follows the sign.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{CompileError, Round};
use crate::circuits::{
    align_to_slots, diamond_interaction, diamond_vertical_hopping, faceless_vertical_hopping,
    horizontal_parity_network, schedule, two_qubit_xxyy, vw_three_qubit_hopping, zz_interaction, Circuit,
    Gate, HalfSlot, HorizontalSlots, Orientation, Via,
};
use crate::dk_mapping::{hopping_generators, BondKind, Face};
use crate::embed::{DeviceKind, Placement};
use crate::model::HoppingTerm;
use crate::pauli::{Letter, PauliString};

/// Circuit of `round` evolving its terms for time `tau`.
pub fn round_circuit(p: &Placement, round: Round, tau: f64) -> Result<Circuit, CompileError> {
    let device = p.device.kind;
    if !round.exists_on(device) {
        return Err(CompileError::RoundNotOnDevice { round, device });
    }
    match (round, device) {
        (Round::Interaction, DeviceKind::AllToAll) => all_to_all_interaction(p, tau),
        (Round::Interaction, _) => diamond_interaction_round(p, tau),
        (Round::Vertical1 | Round::Vertical2, DeviceKind::AllToAll) => {
            all_to_all_hopping(p, BondKind::Vertical, parity(round), tau)
        }
        (Round::Horizontal1 | Round::Horizontal2, _) => all_to_all_hopping(p, BondKind::Horizontal, parity(round), tau),
        (Round::Vertical1 | Round::Vertical2, _) => diamond_vertical_round(p, parity(round), tau),
        (Round::HorizontalX, _) => diamond_horizontal_round(p, Letter::X, tau),
        (Round::HorizontalY, _) => diamond_horizontal_round(p, Letter::Y, tau),
    }
}

fn parity(r: Round) -> usize {
    match r {
        Round::Vertical1 | Round::Horizontal1 => 0,
        _ => 1,
    }
}

/// `±1` if `g` is exactly `±` the product of `pattern`.
fn sign_of(g: &PauliString, pattern: &[(usize, Letter)]) -> Option<f64> {
    if g.weight() != pattern.len() || pattern.iter().any(|&(q, l)| g.letter(q) != l) {
        return None;
    }
    match g.phase_exp() {
        0 => Some(1.0),
        2 => Some(-1.0),
        _ => None,
    }
}

/// Common sign of a generator pair matched against two template strings.
fn pair_sign(
    gens: (&PauliString, &PauliString),
    a: &[(usize, Letter)],
    b: &[(usize, Letter)],
) -> Result<f64, CompileError> {
    let (g1, g2) = gens;
    let found = match (sign_of(g1, a), sign_of(g2, b)) {
        (Some(x), Some(y)) => Some((x, y)),
        _ => match (sign_of(g1, b), sign_of(g2, a)) {
            (Some(x), Some(y)) => Some((x, y)),
            _ => None,
        },
    };
    match found {
        Some((x, y)) if x == y => Ok(x),
        Some(_) => Err(CompileError::TermShape(format!("generators {g1:?}, {g2:?} carry opposite signs"))),
        None => Err(CompileError::TermShape(format!("generators {g1:?}, {g2:?} do not match {a:?} / {b:?}"))),
    }
}

/// Local `(x, y)` of a site.
fn xy(p: &Placement, s: usize) -> (usize, usize) {
    let (_, x, y) = p.layout.lattice.locate(s);
    (x, y)
}

fn nearest_hoppings(p: &Placement) -> impl Iterator<Item = &HoppingTerm> {
    p.layout.lattice.hoppings.iter().filter(|h| h.path.len() == 2)
}

/// CNOT layer indices of a circuit.
fn cnot_slots(c: &Circuit) -> Vec<usize> {
    c.layers().iter().enumerate().filter(|(_, l)| l.iter().any(Gate::is_cnot)).map(|(k, _)| k).collect()
}

/// Aligns `c` into the frame, using the first subset of its slots that fits.
fn fit(c: &Circuit, slots: &[usize], len: usize) -> Result<Circuit, CompileError> {
    let m = cnot_slots(c).len();
    let n = slots.len();
    if m > n {
        return Err(CompileError::TermShape(format!("template with {m} CNOT layers exceeds a {n}-layer frame")));
    }
    // Lexicographic walk over m-subsets of the frame slots.
    let mut pick: Vec<usize> = (0..m).collect();
    let mut last;
    loop {
        let chosen: Vec<usize> = pick.iter().map(|&k| slots[k]).collect();
        match align_to_slots(c, &chosen, len) {
            Ok(out) => return Ok(out),
            Err(e) => last = e,
        }
        let Some(i) = (0..m).rev().find(|&i| pick[i] < n - m + i) else { break };
        pick[i] += 1;
        for k in i + 1..m {
            pick[k] = pick[k - 1] + 1;
        }
    }
    Err(last.into())
}

fn all_to_all_hopping(p: &Placement, kind: BondKind, par: usize, tau: f64) -> Result<Circuit, CompileError> {
    let layout = &p.layout;
    let n = p.total_qubits();
    let frame = vw_three_qubit_hopping(0, 1, 2, 0.0, Orientation::Horizontal)?;
    let (slots, len) = (cnot_slots(&frame), frame.depth());
    let mut round = Circuit::new(n);
    for h in nearest_hoppings(p) {
        let (s, e) = h.ends();
        let bond = layout.bond(s, e)?;
        let (x, y) = xy(p, s.min(e));
        if bond.kind != kind || (x + y) % 2 != par {
            continue;
        }
        let theta = h.amplitude * tau / 2.0;
        let gens = hopping_generators(layout, s, e)?;
        let mut c = match bond.face {
            Some(f) => {
                let fq = layout.secondary_qubit(f).expect("occupied face");
                let (fl, orient) = match kind {
                    BondKind::Vertical => (Letter::X, Orientation::Vertical),
                    BondKind::Horizontal => (Letter::Y, Orientation::Horizontal),
                };
                let a = [(s, Letter::X), (fq, fl), (e, Letter::X)];
                let b = [(s, Letter::Y), (fq, fl), (e, Letter::Y)];
                let sign = pair_sign((&gens.0, &gens.1), &a, &b)?;
                vw_three_qubit_hopping(s, fq, e, sign * theta, orient)?
            }
            None => {
                let sign = pair_sign((&gens.0, &gens.1), &[(s, Letter::X), (e, Letter::X)], &[(s, Letter::Y), (e, Letter::Y)])?;
                two_qubit_xxyy(s, e, sign * theta)?
            }
        };
        c.widen(n);
        round.overlay(&fit(&c, &slots, len)?, 0)?;
    }
    Ok(round)
}

/// `exp{-iτU n_a n_b}` is `exp{iβ Z_a Z_b}` followed by `RZ(2β)` on both
/// sites, with `β = −Uτ/4`.
fn interaction_angles(amplitude: f64, tau: f64) -> f64 {
    -amplitude * tau / 4.0
}

fn all_to_all_interaction(p: &Placement, tau: f64) -> Result<Circuit, CompileError> {
    let n = p.total_qubits();
    let mut round = Circuit::new(n);
    let mut singles = Vec::new();
    for t in &p.layout.lattice.interactions {
        let beta = interaction_angles(t.amplitude, tau);
        let mut c = zz_interaction(t.a, t.b, beta)?;
        c.widen(n);
        round.overlay(&c, 0)?;
        singles.extend([Gate::Rz(t.a, 2.0 * beta), Gate::Rz(t.b, 2.0 * beta)]);
    }
    round.append(&schedule(n, &singles)?);
    Ok(round)
}

fn diamond_interaction_round(p: &Placement, tau: f64) -> Result<Circuit, CompileError> {
    let n = p.total_qubits();
    let frame = diamond_interaction(0, 1, 2, 0.0, Via::Secondary)?;
    let (slots, len) = (cnot_slots(&frame), frame.depth());
    let mut round = Circuit::new(n);
    let mut singles = Vec::new();
    for t in &p.layout.lattice.interactions {
        let (xa, y) = xy(p, t.a);
        let q2 = p
            .face_qubit(xa as isize, y as isize)
            .ok_or_else(|| CompileError::TermShape(format!("no face qubit beside interaction {}-{}", t.a, t.b)))?;
        let via = if p.is_ancilla(q2) { Via::Ancilla } else { Via::Secondary };
        let beta = interaction_angles(t.amplitude, tau);
        let mut c = diamond_interaction(t.a, q2, t.b, beta, via)?;
        c.widen(n);
        round.overlay(&fit(&c, &slots, len)?, 0)?;
        singles.extend([Gate::Rz(t.a, 2.0 * beta), Gate::Rz(t.b, 2.0 * beta)]);
    }
    round.append(&schedule(n, &singles)?);
    Ok(round)
}

/// CNOT slots shared by both vertical diamond templates.
const VERTICAL_SLOTS: [usize; 6] = [1, 3, 5, 7, 9, 11];
const VERTICAL_LEN: usize = 13;

fn diamond_vertical_round(p: &Placement, par: usize, tau: f64) -> Result<Circuit, CompileError> {
    let layout = &p.layout;
    let n = p.total_qubits();
    let mut round = Circuit::new(n);
    for h in nearest_hoppings(p) {
        let (s, e) = h.ends();
        let bond = layout.bond(s, e)?;
        let (lo, hi) = (s.min(e), s.max(e));
        let (x, y) = xy(p, lo);
        if bond.kind != BondKind::Vertical || (x + y) % 2 != par {
            continue;
        }
        let theta = h.amplitude * tau / 2.0;
        let gens = hopping_generators(layout, s, e)?;
        let sides = [x as isize - 1, x as isize];
        let mut c = match bond.face {
            Some(f) => {
                let fq = layout.secondary_qubit(f).expect("occupied face");
                let other = sides.into_iter().find(|&i| i != f.i as isize).expect("two sides");
                let anc = ancilla_at(p, other, y as isize)?;
                let a = [(lo, Letter::X), (fq, Letter::X), (hi, Letter::X)];
                let b = [(lo, Letter::Y), (fq, Letter::X), (hi, Letter::Y)];
                let sign = pair_sign((&gens.0, &gens.1), &a, &b)?;
                diamond_vertical_hopping(lo, fq, hi, anc, sign * theta)?
            }
            None => {
                let blk = &layout.lattice.blocks[0];
                let inner = sides
                    .into_iter()
                    .find(|&i| i >= 0 && (i as usize) + 1 < blk.width)
                    .ok_or_else(|| CompileError::TermShape(format!("vertical bond {lo}-{hi} has no face")))?;
                let anc = ancilla_at(p, inner, y as isize)?;
                let sign =
                    pair_sign((&gens.0, &gens.1), &[(lo, Letter::X), (hi, Letter::X)], &[(lo, Letter::Y), (hi, Letter::Y)])?;
                faceless_vertical_hopping(lo, anc, hi, sign * theta)?
            }
        };
        c.widen(n);
        round.overlay(&fit(&c, &VERTICAL_SLOTS, VERTICAL_LEN)?, 0)?;
    }
    Ok(round)
}

fn ancilla_at(p: &Placement, i: isize, j: isize) -> Result<usize, CompileError> {
    p.ancilla(i, j).ok_or_else(|| CompileError::TermShape(format!("no ancilla at face ({i}, {j})")))
}

/// Face and relay available to the half of a horizontal term over column `i`.
fn half_slot(p: &Placement, i: usize, y: usize) -> HalfSlot {
    let mut slot = HalfSlot { face: None, relay: None };
    for j in [y as isize - 1, y as isize] {
        if j >= 0 {
            if let Some(q) = p.layout.secondary_qubit(Face { block: 0, i, j: j as usize }) {
                slot.face = Some(q);
                continue;
            }
        }
        // A faceless half relays through the ring, leaving the interior
        // face to the neighbouring row.
        let ring = j < 0 || j as usize + 1 >= p.layout.lattice.blocks[0].height;
        if let Some(q) = p.ancilla(i as isize, j) {
            if slot.relay.is_none() || ring {
                slot.relay = Some(q);
            }
        }
    }
    slot
}

fn diamond_horizontal_round(p: &Placement, end: Letter, tau: f64) -> Result<Circuit, CompileError> {
    let n = p.total_qubits();
    let mut round = Circuit::new(n);
    for species in 0..2 {
        round.append(&diamond_horizontal_frame(p, end, species, tau)?);
    }
    Ok(round)
}

/// One species' terms with end letter `end`: basis change, 9-layer parity
/// network frame, basis change back.
fn diamond_horizontal_frame(p: &Placement, end: Letter, species: usize, tau: f64) -> Result<Circuit, CompileError> {
    let layout = &p.layout;
    let n = p.total_qubits();
    let mut frame = Circuit::new(n);
    let mut letters: BTreeMap<usize, Letter> = BTreeMap::new();
    for h in layout.lattice.hoppings.iter().filter(|h| h.path.len() == 3) {
        let (s, e) = h.ends();
        let (left, right) = (s.min(e), s.max(e));
        let (x, y) = xy(p, left);
        if x % 2 != species {
            continue;
        }
        let (gy, gx) = hopping_generators(layout, left, right)?;
        let g = [gy, gx]
            .into_iter()
            .find(|g| g.letter(left) == end)
            .ok_or_else(|| CompileError::TermShape(format!("no {end:?}-ended generator for {left}-{right}")))?;
        if g.letter(right) != end {
            return Err(CompileError::TermShape(format!("generator for {left}-{right} has mixed end letters")));
        }
        let slots = HorizontalSlots {
            left,
            middle: h.path[1],
            right,
            left_half: half_slot(p, x, y),
            right_half: half_slot(p, x + 1, y),
        };
        let mut expected: Vec<usize> = [Some(left), Some(h.path[1]), Some(right), slots.left_half.face, slots.right_half.face]
            .into_iter()
            .flatten()
            .collect();
        expected.sort_unstable();
        if g.support() != expected {
            return Err(CompileError::TermShape(format!("generator support {:?} for {left}-{right}", g.support())));
        }
        for q in g.support() {
            let l = g.letter(q);
            if *letters.entry(q).or_insert(l) != l {
                return Err(CompileError::TermShape(format!("qubit {q} needs two bases in one frame")));
            }
        }
        let sign = sign_of(&g, &g.support().iter().map(|&q| (q, g.letter(q))).collect::<Vec<_>>())
            .ok_or_else(|| CompileError::TermShape(format!("generator for {left}-{right} is not Hermitian")))?;
        let theta = h.amplitude * tau / 2.0;
        let direct = (x + y) % 2 == 0;
        frame.overlay(&horizontal_parity_network(n, &slots, sign * theta, direct)?, 0)?;
    }
    let mut basis = Vec::new();
    for (&q, &l) in &letters {
        match l {
            Letter::X => basis.push(Gate::H(q)),
            Letter::Y => basis.extend([Gate::Sdg(q), Gate::H(q)]),
            _ => {}
        }
    }
    let pre = schedule(n, &basis)?;
    let mut c = pre.clone();
    c.append(&frame);
    c.append(&pre.inverse());
    Ok(c)
}
