//! Simulation pipelines shared by the CLI and the tests.

use dkhub_core::circuits::Circuit;
use dkhub_core::compile::{
    density_pattern_circuit, evolution_circuit, trotter_step_circuit, vacuum_circuit, TrotterPlan,
};
use dkhub_core::dk_mapping::{mapped_hamiltonian, stabilizers, vertex_operator};
use dkhub_core::embed::Placement;
use dkhub_core::pauli::PauliString;
use serde::Serialize;

use crate::config::RunConfig;
use crate::oracle::{self, build_hamiltonian, exact_evolve, DEFAULT_MODE_CAP};
use crate::sim::{self, greens_function, Evolution, Readout, Statevector, DEFAULT_CAP};
use crate::Error;

/// Lifts a layout-register string onto the placement register.
pub fn on_device(p: &Placement, s: &PauliString) -> PauliString {
    let map: Vec<usize> = (0..s.n_qubits()).collect();
    s.remap(p.total_qubits(), &map).expect("layout qubits come first")
}

/// `⟨n_j⟩ = (1 − ⟨Z_j⟩)/2` for every site.
pub fn densities(p: &Placement, s: &Statevector) -> Result<Vec<f64>, Error> {
    (0..p.layout.n_primary())
        .map(|j| Ok((1.0 - s.expectation(&on_device(p, &vertex_operator(&p.layout, j)))?.re) / 2.0))
        .collect()
}

/// `⟨n_a n_b⟩ = (1 − Z_a − Z_b + Z_a Z_b)/4`.
pub fn density_density(p: &Placement, s: &Statevector, a: usize, b: usize) -> Result<f64, Error> {
    let za = on_device(p, &vertex_operator(&p.layout, a));
    let zb = on_device(p, &vertex_operator(&p.layout, b));
    let zab = za.mul_ref(&zb);
    let e = |q: &PauliString| s.expectation(q).map(|v| v.re);
    Ok((1.0 - e(&za)? - e(&zb)? + e(&zab)?) / 4.0)
}

/// `⟨𝕁_p⟩` for every stabilizer.
pub fn stabilizer_values(p: &Placement, s: &Statevector) -> Result<Vec<f64>, Error> {
    stabilizers(&p.layout).iter().map(|j| Ok(s.expectation(&on_device(p, j))?.re)).collect()
}

/// Vacuum followed by the density pattern.
pub fn initial_circuit(p: &Placement, pattern: &[bool]) -> Result<Circuit, Error> {
    let mut c = vacuum_circuit(p)?;
    c.append(&density_pattern_circuit(p, pattern)?);
    Ok(c)
}

/// Runs the quench and calls `visit(n, state)` after the initial state
/// (`n = 0`) and after every step. Steps are closed palindromes here, which
/// is the same unitary as the merged schedule at each step boundary.
pub fn evolve_steps(
    p: &Placement,
    pattern: &[bool],
    plan: &TrotterPlan,
    cap: usize,
    mut visit: impl FnMut(usize, &Statevector) -> Result<(), Error>,
) -> Result<(), Error> {
    let open = TrotterPlan { merge_adjacent: false, ..*plan };
    let mut s = Statevector::zero(p.total_qubits(), cap)?;
    s.apply(&initial_circuit(p, pattern)?)?;
    visit(0, &s)?;
    // Every unmerged step compiles to the same circuit.
    let step = trotter_step_circuit(p, &open, 0)?;
    for n in 1..=plan.n_steps {
        s.apply(&step)?;
        visit(n, &s)?;
    }
    Ok(())
}

/// Rows indexed by time.
pub type Series = Vec<Vec<f64>>;

/// Exact reference: oracle densities and correlators at `times`.
pub fn oracle_series(cfg: &RunConfig, pattern: &[bool], times: &[f64], pairs: &[[usize; 2]]) -> Result<(Series, Series), Error> {
    let h = build_hamiltonian(&cfg.lattice()?, DEFAULT_MODE_CAP)?;
    let psi0 = h.space.product_state(pattern)?;
    let mut dens = Vec::new();
    let mut corr = Vec::new();
    for &t in times {
        let psi = exact_evolve(&h, &psi0, t)?;
        dens.push(oracle::densities(h.space, &psi));
        corr.push(pairs.iter().map(|&[a, b]| oracle::density_density(&psi, a, b)).collect());
    }
    Ok((dens, corr))
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelatorSeries {
    pub a: usize,
    pub b: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GreensSeries {
    pub j: usize,
    pub k: usize,
    /// `[t, re, im]` from exact ancilla expectations.
    pub exact: Vec<[f64; 3]>,
    /// `[t, re, im, stderr_re, stderr_im]` from shots.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled: Option<Vec<[f64; 5]>>,
    /// `[t, re, im]` from the fermionic oracle.
    pub oracle: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationResult {
    pub times: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub densities: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle_densities: Vec<Vec<f64>>,
    /// Densities estimated from computational-basis shots.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_densities: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub correlators: Vec<CorrelatorSeries>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle_correlators: Vec<CorrelatorSeries>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub greens: Vec<GreensSeries>,
    /// Largest `|⟨𝕁_p⟩ − 1|` over all steps.
    pub stabilizer_drift: f64,
    /// Largest `|N(t) − N(0)|` over all steps.
    pub number_drift: f64,
}

/// The `simulate` command.
pub fn simulate(cfg: &RunConfig) -> Result<SimulationResult, Error> {
    let cap = cfg.cap.unwrap_or(DEFAULT_CAP);
    let p = cfg.placement(None)?;
    let plan = cfg.plan()?;
    let pattern = cfg.pattern()?;
    let obs = &cfg.observables;
    let times: Vec<f64> = (0..=plan.n_steps).map(|n| n as f64 * plan.dt).collect();
    let mut out = SimulationResult {
        times: times.clone(),
        densities: Vec::new(),
        oracle_densities: Vec::new(),
        sampled_densities: cfg.shots.map(|_| Vec::new()),
        correlators: obs.correlators.iter().map(|&[a, b]| CorrelatorSeries { a, b, values: Vec::new() }).collect(),
        oracle_correlators: Vec::new(),
        greens: Vec::new(),
        stabilizer_drift: 0.0,
        number_drift: 0.0,
    };
    let mut n0 = None;
    let primaries: Vec<usize> = (0..p.layout.n_primary()).collect();
    evolve_steps(&p, &pattern, &plan, cap, |n, s| {
        let d = densities(&p, s)?;
        let total: f64 = d.iter().sum();
        let n0 = *n0.get_or_insert(total);
        out.number_drift = out.number_drift.max((total - n0).abs());
        for v in stabilizer_values(&p, s)? {
            out.stabilizer_drift = out.stabilizer_drift.max((v - 1.0).abs());
        }
        if obs.densities {
            out.densities.push(d);
        }
        for c in &mut out.correlators {
            c.values.push(density_density(&p, s, c.a, c.b)?);
        }
        if let (Some(shots), Some(sd)) = (cfg.shots, out.sampled_densities.as_mut()) {
            let r = sim::sample(s, &primaries, shots, cfg.seed.wrapping_add(n as u64))?;
            let mut ones = vec![0u64; primaries.len()];
            for (bits, &c) in &r.counts {
                for (k, b) in bits.bytes().enumerate() {
                    if b == b'1' {
                        ones[k] += c;
                    }
                }
            }
            sd.push(ones.into_iter().map(|o| o as f64 / shots as f64).collect());
        }
        Ok(())
    })?;
    let small = cfg.lattice()?.n_sites() <= DEFAULT_MODE_CAP;
    if small && (obs.densities || !obs.correlators.is_empty()) {
        let (d, c) = oracle_series(cfg, &pattern, &times, &obs.correlators)?;
        if obs.densities {
            out.oracle_densities = d;
        }
        out.oracle_correlators = obs
            .correlators
            .iter()
            .enumerate()
            .map(|(i, &[a, b])| CorrelatorSeries { a, b, values: c.iter().map(|row| row[i]).collect() })
            .collect();
    }
    for &[j, k] in &obs.greens {
        out.greens.push(greens_series(cfg, j, k, &times, cap)?);
    }
    Ok(out)
}

/// Site used as the Majorana corner for `j`: the first site of its block.
pub fn corner_for(cfg: &RunConfig, j: usize) -> Result<usize, Error> {
    let lat = cfg.lattice()?;
    let blk = lat.blocks.iter().find(|b| b.contains(j)).ok_or(Error::Usage(format!("site {j} out of range")))?;
    Ok(blk.offset)
}

/// Green's function from compiled evolution, optional shots and the oracle.
pub fn greens_series(cfg: &RunConfig, j: usize, k: usize, times: &[f64], cap: usize) -> Result<GreensSeries, Error> {
    let p = cfg.placement(Some(corner_for(cfg, j)?))?;
    let plan = cfg.plan()?;
    let pattern = cfg.pattern()?;
    let init = initial_circuit(&p, &pattern)?;
    let compiled = |t: f64| {
        let n = (t / plan.dt).round() as usize;
        evolution_circuit(&p, &TrotterPlan { n_steps: n, ..plan })
    };
    let evo = Evolution::Compiled(&compiled);
    let exact = greens_function(&p, &init, &evo, j, k, times, Readout::Exact, cap)?;
    let sampled = match cfg.shots {
        Some(shots) => Some(
            greens_function(&p, &init, &evo, j, k, times, Readout::Shots { shots, seed: cfg.seed }, cap)?
                .into_iter()
                .map(|g| {
                    let (er, ei) = g.stderr.unwrap_or((0.0, 0.0));
                    [g.t, g.value.re, g.value.im, er, ei]
                })
                .collect(),
        ),
        None => None,
    };
    let h = build_hamiltonian(&cfg.lattice()?, DEFAULT_MODE_CAP)?;
    let psi0 = h.space.product_state(&pattern)?;
    let reference = oracle::exact_greens(&h, &psi0, j, k, times)?;
    Ok(GreensSeries {
        j,
        k,
        exact: exact.iter().map(|g| [g.t, g.value.re, g.value.im]).collect(),
        sampled,
        oracle: times.iter().zip(&reference).map(|(&t, g)| [t, g.re, g.im]).collect(),
    })
}

/// The encoded Hamiltonian as a Pauli sum on the layout register.
pub fn layout_hamiltonian(p: &Placement) -> Result<Vec<(f64, PauliString)>, Error> {
    Ok(mapped_hamiltonian(&p.layout)?)
}
