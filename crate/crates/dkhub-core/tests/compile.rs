use dkhub_core::circuits::{count_entangling_layers, Gate};
use dkhub_core::compile::*;
use dkhub_core::embed::{validate, DeviceKind, Placement};
use dkhub_core::model::{CellScheme, HubbardModel};
use proptest::prelude::*;

const ROUNDS: [Round; 7] = [
    Round::Vertical1,
    Round::Vertical2,
    Round::Horizontal1,
    Round::Horizontal2,
    Round::HorizontalX,
    Round::HorizontalY,
    Round::Interaction,
];

fn placed(lx: usize, ly: usize, device: DeviceKind) -> Placement {
    let scheme = match device {
        DeviceKind::Diamond => CellScheme::Interleaved,
        _ => CellScheme::Separated,
    };
    placement_for(&HubbardModel::new(lx, ly, 1.0, 4.0).unwrap(), scheme, device).unwrap()
}

fn sizes() -> Vec<(usize, usize)> {
    vec![(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (3, 4), (4, 4), (6, 8)]
}

#[test]
fn every_cnot_lands_on_a_device_edge() {
    for device in [DeviceKind::AllToAll, DeviceKind::Diamond] {
        for (lx, ly) in sizes() {
            let p = placed(lx, ly, device);
            validate(&p, &vacuum_circuit(&p).unwrap()).unwrap_or_else(|v| panic!("{lx}×{ly} vacuum: {v}"));
            for r in ROUNDS.iter().filter(|r| r.exists_on(device)) {
                let c = round_circuit(&p, *r, 0.1).unwrap();
                validate(&p, &c).unwrap_or_else(|v| panic!("{lx}×{ly} {}: {v}", r.label()));
            }
        }
    }
}

#[test]
fn layer_totals_match_the_closed_form() {
    for device in [DeviceKind::AllToAll, DeviceKind::Diamond] {
        for (lx, ly) in [(2, 2), (2, 3), (3, 4)] {
            let m = HubbardModel::new(lx, ly, 1.0, 4.0).unwrap();
            let p = placed(lx, ly, device);
            let empty = vec![false; p.layout.n_primary()];
            for order in [1u8, 2] {
                for n in 0..4 {
                    let plan = TrotterPlan::new(order, 0.1, n).unwrap();
                    let scheme = if device == DeviceKind::Diamond { CellScheme::Interleaved } else { CellScheme::Separated };
                    let r = resource_report(&m, scheme, device, &plan).unwrap();
                    let counted = count_entangling_layers(&full_quench_circuit(&p, &empty, &plan).unwrap());
                    assert_eq!(r.total, counted);
                    assert_eq!(r.total_for(n), counted, "{lx}×{ly} {device:?} order {order} n {n}");
                }
            }
        }
    }
}

#[test]
fn merged_schedule_keeps_total_weights() {
    for device in [DeviceKind::AllToAll, DeviceKind::Diamond] {
        for order in [1u8, 2] {
            let plan = TrotterPlan::new(order, 0.1, 5).unwrap();
            let sched = plan.schedule(device).unwrap();
            for r in ROUNDS.iter().filter(|r| r.exists_on(device)) {
                let w: f64 = sched.iter().flatten().filter(|a| a.round == *r).map(|a| a.weight).sum();
                assert!((w - 5.0).abs() < 1e-12, "{} totals {w}", r.label());
            }
        }
    }
}

#[test]
fn pattern_is_one_pauli_layer() {
    let p = placed(2, 2, DeviceKind::Diamond);
    let pattern = [true, false, false, true, false, true, true, false];
    let c = density_pattern_circuit(&p, &pattern).unwrap();
    assert_eq!(count_entangling_layers(&c), 0);
    assert!(c.depth() <= 1);
    assert!(c.gates().all(|g| matches!(g, Gate::X(_) | Gate::Y(_) | Gate::Z(_))));
}

#[test]
fn odd_block_occupancy_is_rejected() {
    let p = placed(2, 2, DeviceKind::AllToAll);
    let mut pattern = [false; 8];
    pattern[0] = true;
    assert_eq!(density_pattern_circuit(&p, &pattern).unwrap_err(), CompileError::OddOccupancy { block: 0, count: 1 });
    assert!(matches!(density_pattern_circuit(&p, &[true; 3]), Err(CompileError::PatternSize { .. })));
}

#[test]
fn unsupported_pairings_fail() {
    let m = HubbardModel::new(2, 2, 1.0, 4.0).unwrap();
    let plan = TrotterPlan::new(2, 0.1, 1).unwrap();
    assert!(resource_report(&m, CellScheme::Separated, DeviceKind::HeavyHoneycomb, &plan).is_err());
    assert!(resource_report(&m, CellScheme::Interleaved, DeviceKind::AllToAll, &plan).is_err());
    let err = resource_report(&m, CellScheme::Separated, DeviceKind::HeavyHoneycomb, &plan).unwrap_err();
    assert!(err.to_string().contains("heavy_honeycomb"));
}

#[test]
fn small_instances_have_expected_registers() {
    let a = placed(2, 2, DeviceKind::AllToAll);
    assert_eq!(a.total_qubits(), 10);
    let d = placed(2, 2, DeviceKind::Diamond);
    assert_eq!(d.total_qubits(), 19);
}

proptest! {
    #[test]
    fn round_layers_do_not_depend_on_angle(dt in 0.001f64..1.0) {
        let p = placed(2, 3, DeviceKind::Diamond);
        for r in ROUNDS.iter().filter(|r| r.exists_on(DeviceKind::Diamond)) {
            let a = count_entangling_layers(&round_circuit(&p, *r, dt).unwrap());
            let b = count_entangling_layers(&round_circuit(&p, *r, 0.1).unwrap());
            prop_assert_eq!(a, b);
        }
    }
}
