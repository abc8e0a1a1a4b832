//! Verification suite: operator algebra, vacuum, conservation and oracle
//! agreement on a small instance.

use dkhub_core::dk_mapping::{
    edge_operator_any, face_loop, mapped_hamiltonian, stabilizers, vertex_operator, DKLayout,
};
use dkhub_core::pauli::{dense_matrix_capped, DenseMatrix, PauliString};
use serde::Serialize;

use crate::config::RunConfig;
use crate::pipeline::{densities, evolve_steps, oracle_series, stabilizer_values};
use crate::sim::{Statevector, DEFAULT_CAP};
use crate::Error;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn push(&mut self, name: &str, failures: Vec<String>, total: usize) {
        let pass = failures.is_empty();
        let detail = if pass {
            format!("{total} checked")
        } else {
            format!("{} of {total} failed; first: {}", failures.len(), failures[0])
        };
        self.pass &= pass;
        self.checks.push(Check { name: name.into(), pass, detail });
    }
}

fn anticommutes(a: &PauliString, b: &PauliString) -> bool {
    !a.commutes_ref(b)
}

/// Edge and vertex relations, face loops and stabilizer commutation.
pub fn algebra_checks(layout: &DKLayout, report: &mut VerifyReport) {
    let n = layout.n_primary();
    let id = PauliString::identity(layout.n_qubits());
    let bonds: Vec<(usize, usize)> = layout.bonds().iter().map(|b| (b.tail, b.head)).collect();
    let edges: Vec<PauliString> =
        bonds.iter().map(|&(a, b)| edge_operator_any(layout, a, b).expect("declared bond")).collect();
    let verts: Vec<PauliString> = (0..n).map(|j| vertex_operator(layout, j)).collect();

    let mut fails = Vec::new();
    let mut total = 0;
    for (&(a, b), e) in bonds.iter().zip(&edges) {
        total += 3;
        if !e.is_hermitian() {
            fails.push(format!("E_{a}{b} not Hermitian"));
        }
        if e.mul_ref(e) != id {
            fails.push(format!("E_{a}{b}² ≠ 1"));
        }
        let rev = edge_operator_any(layout, b, a).expect("declared bond");
        if rev != -e.clone() {
            fails.push(format!("E_{b}{a} ≠ −E_{a}{b}"));
        }
    }
    report.push("edge operators are Hermitian, self-inverse and antisymmetric", fails, total);

    let mut fails = Vec::new();
    let mut total = 0;
    for (i, v) in verts.iter().enumerate() {
        for (k, &(a, b)) in bonds.iter().enumerate() {
            total += 1;
            let want = i == a || i == b;
            if anticommutes(v, &edges[k]) != want {
                fails.push(format!("V_{i} vs E_{a}{b}"));
            }
        }
        for (j, w) in verts.iter().enumerate() {
            total += 1;
            if anticommutes(v, w) {
                fails.push(format!("V_{i} vs V_{j}"));
            }
        }
    }
    report.push("vertex operators commute and anticommute with incident edges", fails, total);

    let mut fails = Vec::new();
    let mut total = 0;
    for (x, &(a, b)) in bonds.iter().enumerate() {
        for (y, &(c, d)) in bonds.iter().enumerate().skip(x + 1) {
            total += 1;
            let shared = [a == c, a == d, b == c, b == d].iter().filter(|&&s| s).count();
            if anticommutes(&edges[x], &edges[y]) != (shared == 1) {
                fails.push(format!("E_{a}{b} vs E_{c}{d}"));
            }
        }
    }
    report.push("edges anticommute iff they share one vertex", fails, total);

    let mut fails = Vec::new();
    let mut total = 0;
    for f in layout.faces() {
        if layout.is_occupied(f) {
            total += 1;
            if face_loop(layout, f) != id {
                fails.push(format!("loop around occupied face ({}, {}) is not +1", f.i, f.j));
            }
        }
    }
    report.push("occupied face loops are identity", fails, total);

    let stabs = stabilizers(layout);
    let terms = mapped_hamiltonian(layout).expect("declared hoppings");
    let mut fails = Vec::new();
    let mut total = 0;
    for (si, s) in stabs.iter().enumerate() {
        for (_, t) in &terms {
            total += 1;
            if !s.commutes_ref(t) {
                fails.push(format!("stabilizer {si} vs term {t}"));
            }
        }
        for (sj, s2) in stabs.iter().enumerate() {
            total += 1;
            if !s.commutes_ref(s2) {
                fails.push(format!("stabilizer {si} vs {sj}"));
            }
        }
    }
    report.push("stabilizers commute with every mapped term and each other", fails, total);

    if layout.n_qubits() <= 12 {
        let mut ops: Vec<(String, PauliString)> = Vec::new();
        ops.extend(bonds.iter().zip(&edges).map(|(&(a, b), e)| (format!("E_{a}{b}"), e.clone())));
        ops.extend(verts.iter().enumerate().map(|(i, v)| (format!("V_{i}"), v.clone())));
        ops.extend(stabs.iter().enumerate().map(|(i, s)| (format!("J_{i}"), s.clone())));
        let dense: Vec<DenseMatrix> = ops.iter().map(|(_, p)| dense_matrix_capped(p, 12).expect("≤ 12 qubits")).collect();
        let mut fails = Vec::new();
        let mut total = 0;
        for x in 0..ops.len() {
            for y in x + 1..ops.len() {
                total += 1;
                let ab = dense[x].matmul(&dense[y]);
                let ba = dense[y].matmul(&dense[x]);
                let commute = ab.max_abs_diff(&ba) < 1e-12;
                if commute != ops[x].1.commutes_ref(&ops[y].1) {
                    fails.push(format!("{} vs {}", ops[x].0, ops[y].0));
                }
            }
        }
        report.push("symbolic commutation matches dense matrices", fails, total);
    }
}

/// Runs every check on the configured instance.
pub fn verify(cfg: &RunConfig) -> Result<VerifyReport, Error> {
    let mut report = VerifyReport { pass: true, checks: Vec::new() };
    let cap = cfg.cap.unwrap_or(DEFAULT_CAP);
    let p = cfg.placement(None)?;
    algebra_checks(&p.layout, &mut report);

    let mut s = Statevector::zero(p.total_qubits(), cap)?;
    s.apply(&dkhub_core::compile::vacuum_circuit(&p)?)?;
    let mut fails = Vec::new();
    for (j, d) in densities(&p, &s)?.iter().enumerate() {
        if d.abs() > 1e-12 {
            fails.push(format!("site {j} has density {d:e}"));
        }
    }
    for (i, v) in stabilizer_values(&p, &s)?.iter().enumerate() {
        if (v - 1.0).abs() > 1e-12 {
            fails.push(format!("stabilizer {i} = {v}"));
        }
    }
    let w = s.zero_weight(&p.ancilla_qubits)?;
    if w < 1.0 - 1e-12 {
        fails.push(format!("ancilla |0⟩ weight {w}"));
    }
    report.push("vacuum: empty sites, stabilizers +1, ancillas returned", fails, p.layout.n_qubits() + 1);

    let plan = cfg.plan()?;
    let pattern = cfg.pattern()?;
    let mut dens = Vec::new();
    let mut fails = Vec::new();
    let mut n0 = None;
    evolve_steps(&p, &pattern, &plan, cap, |n, s| {
        let d = densities(&p, s)?;
        let total: f64 = d.iter().sum();
        let n0 = *n0.get_or_insert(total);
        if (total - n0).abs() > 1e-10 {
            fails.push(format!("step {n}: particle number {total}"));
        }
        for (i, v) in stabilizer_values(&p, s)?.iter().enumerate() {
            if (v - 1.0).abs() > 1e-10 {
                fails.push(format!("step {n}: stabilizer {i} = {v}"));
            }
        }
        dens.push(d);
        Ok(())
    })?;
    report.push("stabilizers and particle number conserved", fails, plan.n_steps + 1);

    if p.layout.n_primary() <= crate::oracle::DEFAULT_MODE_CAP {
        let times: Vec<f64> = (0..=plan.n_steps).map(|n| n as f64 * plan.dt).collect();
        let (reference, _) = oracle_series(cfg, &pattern, &times, &[])?;
        let mut worst: f64 = 0.0;
        for (a, b) in dens.iter().zip(&reference) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
        let fails = if worst > 1e-2 { vec![format!("max density error {worst:e}")] } else { Vec::new() };
        report.push("densities agree with the oracle within 1e-2", fails, times.len());
        if let Some(c) = report.checks.last_mut() {
            c.detail = format!("{}; max density error {worst:e}", c.detail);
        }
    }
    Ok(report)
}
