use dkhub::config::RunConfig;
use dkhub::pipeline::initial_circuit;
use dkhub::sim::{self, greens_function, Evolution, Readout, SimError, Statevector};
use dkhub_core::circuits::{Circuit, Gate};
use dkhub_core::pauli::PauliString;
use num_complex::Complex64;
use proptest::prelude::*;

const CAP: usize = 20;

fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

fn circuit(n: usize, layers: Vec<Vec<Gate>>) -> Circuit {
    Circuit::from_layers(n, layers).unwrap()
}

#[test]
fn hadamard_makes_plus() {
    let s = sim::run(&circuit(1, vec![vec![Gate::H(0)]]), CAP).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for a in s.amplitudes() {
        assert!((a - Complex64::new(h, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn cnot_flips_target() {
    // |10⟩ with qubit 0 set.
    let s = Statevector::basis(2, 0b01, CAP).unwrap();
    let out = sim::apply(&circuit(2, vec![vec![Gate::cnot(0, 1)]]), &s, CAP).unwrap();
    assert!((out.amplitudes()[0b11].norm() - 1.0).abs() < 1e-15);
}

#[test]
fn z_expectation_on_zero() {
    let s = Statevector::zero(3, CAP).unwrap();
    assert!((s.expectation(&ps("+ZII")).unwrap().re - 1.0).abs() < 1e-15);
    assert!(s.expectation(&ps("+XII")).unwrap().norm() < 1e-15);
}

#[test]
fn cap_is_enforced() {
    assert!(matches!(Statevector::zero(21, CAP), Err(SimError::CapExceeded { .. })));
}

#[test]
fn ry_rotation_expectation() {
    let theta = 0.7;
    let s = sim::run(&circuit(1, vec![vec![Gate::Ry(0, theta)]]), CAP).unwrap();
    assert!((s.expectation(&ps("+Z")).unwrap().re - theta.cos()).abs() < 1e-14);
    assert!((s.expectation(&ps("+X")).unwrap().re - theta.sin()).abs() < 1e-14);
}

#[test]
fn controlled_pauli_matches_cnot() {
    let cp = circuit(2, vec![vec![Gate::ControlledPauli { control: 0, string: ps("+IX") }]]);
    let cx = circuit(2, vec![vec![Gate::cnot(0, 1)]]);
    for b in 0..4 {
        let s = Statevector::basis(2, b, CAP).unwrap();
        let a = sim::apply(&cp, &s, CAP).unwrap();
        let c = sim::apply(&cx, &s, CAP).unwrap();
        assert!((a.inner(&c).unwrap().norm() - 1.0).abs() < 1e-15);
    }
}

fn bell() -> Statevector {
    sim::run(&circuit(2, vec![vec![Gate::H(0)], vec![Gate::cnot(0, 1)]]), CAP).unwrap()
}

#[test]
fn sampling_is_seeded() {
    let s = bell();
    let a = sim::sample(&s, &[0, 1], 1000, 9).unwrap();
    let b = sim::sample(&s, &[0, 1], 1000, 9).unwrap();
    let c = sim::sample(&s, &[0, 1], 1000, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.counts, c.counts);
}

#[test]
fn bell_samples_are_correlated() {
    let r = sim::sample(&bell(), &[0, 1], 10_000, 3).unwrap();
    assert!(r.counts.keys().all(|k| k == "00" || k == "11"));
    assert_eq!(r.parity_mean(), 1.0);
    let n00 = r.counts["00"] as f64;
    // Binomial with p = 1/2, 5σ = 250.
    assert!((n00 - 5000.0).abs() < 250.0);
}

#[test]
fn chi_square_on_four_outcomes() {
    let c = circuit(2, vec![vec![Gate::Ry(0, 1.1), Gate::Ry(1, 2.0)]]);
    let s = sim::run(&c, CAP).unwrap();
    let shots = 100_000u64;
    let r = sim::sample(&s, &[0, 1], shots, 77).unwrap();
    let p0 = [(0.55f64).cos().powi(2), (1.0f64).cos().powi(2)];
    let mut chi2 = 0.0;
    for bits in ["00", "01", "10", "11"] {
        let p: f64 = bits
            .bytes()
            .enumerate()
            .map(|(q, b)| if b == b'0' { p0[q] } else { 1.0 - p0[q] })
            .product();
        let e = p * shots as f64;
        let o = *r.counts.get(bits).unwrap_or(&0) as f64;
        chi2 += (o - e).powi(2) / e;
    }
    // 3 degrees of freedom; P(χ² > 16.27) = 0.001.
    assert!(chi2 < 16.27, "χ² = {chi2}");
}

#[test]
fn basis_state_gives_one_bitstring() {
    let s = Statevector::basis(4, 0b0110, CAP).unwrap();
    let r = sim::sample(&s, &[0, 1, 2, 3], 500, 1).unwrap();
    assert_eq!(r.counts.len(), 1);
    assert_eq!(r.counts["0110"], 500);
}

#[test]
fn sampling_rejects_bad_input() {
    let s = Statevector::zero(2, CAP).unwrap();
    assert_eq!(sim::sample(&s, &[], 10, 0), Err(SimError::EmptyQubitSet));
    assert_eq!(sim::sample(&s, &[0], 0, 0), Err(SimError::ZeroShots));
    assert!(sim::sample(&s, &[2], 10, 0).is_err());
}

#[test]
fn depolarizing_examples() {
    assert!((sim::mitigate_expectation(0.9, 0.1).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(sim::depolarize_observable(&PauliString::identity(3), 1.0, 0.4).unwrap(), 1.0);
    assert!((sim::depolarize_observable(&ps("+ZII"), 1.0, 0.4).unwrap() - 0.6).abs() < 1e-15);
    assert!(sim::mitigate_expectation(0.5, 1.0).is_err());
    assert!(sim::depolarize_expectation(0.5, -0.1).is_err());
}

#[test]
fn thousand_layers_keep_the_norm() {
    let n = 6;
    let mut layers = Vec::new();
    for k in 0..1000 {
        let a = 0.1 + 0.001 * k as f64;
        layers.push((0..n).map(|q| Gate::Ry(q, a * (q + 1) as f64)).collect());
        let off = k % 2;
        layers.push((off..n - 1).step_by(2).map(|q| Gate::cnot(q, q + 1)).collect());
        layers.push((0..n).map(|q| Gate::Rz(q, a)).collect());
    }
    let s = sim::run(&circuit(n, layers), CAP).unwrap();
    assert!((s.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn circuit_then_inverse_is_identity() {
    let c = circuit(
        3,
        vec![vec![Gate::H(0), Gate::Rx(1, 0.3), Gate::S(2)], vec![Gate::cnot(0, 2)], vec![Gate::Rz(2, 1.2), Gate::Ry(1, -0.4)]],
    );
    let s0 = Statevector::basis(3, 0b101, CAP).unwrap();
    let s = sim::apply(&c.inverse(), &sim::apply(&c, &s0, CAP).unwrap(), CAP).unwrap();
    assert!((s.inner(&s0).unwrap() - 1.0).norm() < 1e-14);
}

#[test]
fn pauli_sum_evolution_matches_rotation() {
    // exp(−i t X) on |0⟩ is Rx(2t).
    let mut s = Statevector::zero(1, CAP).unwrap();
    s.evolve_pauli_sum(&[(1.0, ps("+X"))], 0.8).unwrap();
    let r = sim::run(&circuit(1, vec![vec![Gate::Rx(0, 1.6)]]), CAP).unwrap();
    assert!((s.inner(&r).unwrap().norm() - 1.0).abs() < 1e-14);
}

fn small() -> (dkhub_core::embed::Placement, Circuit, Vec<(f64, PauliString)>) {
    let cfg = RunConfig::small();
    let p = cfg.placement(Some(0)).unwrap();
    // Spin-up sites 0 and 3 are occupied; 1 and 2 are empty.
    let init = initial_circuit(&p, &cfg.pattern().unwrap()).unwrap();
    let terms = dkhub_core::dk_mapping::mapped_hamiltonian(&p.layout).unwrap();
    (p, init, terms)
}

#[test]
fn greens_at_zero_time() {
    let (p, init, terms) = small();
    let evo = Evolution::Exact(&terms);
    // G_jj(0) = i ⟨c†_j c_j⟩.
    let occupied = greens_function(&p, &init, &evo, 0, 0, &[0.0], Readout::Exact, CAP).unwrap();
    assert!((occupied[0].value - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    let empty = greens_function(&p, &init, &evo, 1, 1, &[0.0], Readout::Exact, CAP).unwrap();
    assert!(empty[0].value.norm() < 1e-12);
}

#[test]
fn greens_shots_carry_errors() {
    let (p, init, terms) = small();
    let evo = Evolution::Exact(&terms);
    let g = greens_function(&p, &init, &evo, 1, 0, &[0.3], Readout::Shots { shots: 4000, seed: 5 }, CAP).unwrap();
    let (er, ei) = g[0].stderr.expect("shot mode reports errors");
    assert!(er > 0.0 && ei > 0.0);
}

#[test]
fn hadamard_test_identity_for_diagonal_operators() {
    // ⟨ψ| Z_0 Z_1 |ψ⟩ via an ancilla controlling both strings.
    let s = sim::run(&circuit(2, vec![vec![Gate::Ry(0, 0.9), Gate::Ry(1, 0.4)]]), CAP).unwrap();
    let want = s.expectation(&ps("+ZZ")).unwrap().re;
    let mut w = s.widened(1, CAP).unwrap();
    let c = circuit(
        3,
        vec![
            vec![Gate::H(2)],
            vec![Gate::ControlledPauli { control: 2, string: ps("+ZII") }],
            vec![Gate::ControlledPauli { control: 2, string: ps("+IZI") }],
            vec![Gate::H(2)],
        ],
    );
    w.apply(&c).unwrap();
    assert!((w.expectation(&ps("+IIZ")).unwrap().re - want).abs() < 1e-14);
}

proptest! {
    #[test]
    fn depolarize_round_trip(x in -1.0f64..1.0, p in 0.0f64..0.99) {
        let back = sim::mitigate_expectation(sim::depolarize_expectation(x, p).unwrap(), p).unwrap();
        prop_assert!((back - x).abs() < 1e-12);
    }

    #[test]
    fn random_circuits_are_unitary(angles in prop::collection::vec(-3.2f64..3.2, 12), b in 0usize..16) {
        let layers = vec![
            (0..4).map(|q| Gate::Ry(q, angles[q])).collect(),
            vec![Gate::cnot(0, 1), Gate::cnot(2, 3)],
            (0..4).map(|q| Gate::Rz(q, angles[4 + q])).collect(),
            vec![Gate::cnot(1, 2)],
            (0..4).map(|q| Gate::Rx(q, angles[8 + q])).collect(),
        ];
        let s = sim::apply(&circuit(4, layers), &Statevector::basis(4, b, CAP).unwrap(), CAP).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginals_match_z(angles in prop::collection::vec(-3.2f64..3.2, 3)) {
        let c = circuit(3, vec![
            (0..3).map(|q| Gate::Ry(q, angles[q])).collect(),
            vec![Gate::cnot(0, 2)],
        ]);
        let s = sim::run(&c, CAP).unwrap();
        let m = s.marginals();
        for (q, z) in ["+ZII", "+IZI", "+IIZ"].iter().enumerate() {
            let ez = s.expectation(&ps(z)).unwrap().re;
            prop_assert!(((1.0 - ez) / 2.0 - m[q]).abs() < 1e-12);
        }
    }
}
