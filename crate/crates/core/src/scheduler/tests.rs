use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::feasibility::check_assignment;
use crate::fixtures::{random_instance, InstanceBuilder, RandomLimits, SlotInstance};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn weight_backlog_limited_no_penalty() {
    let i = InstanceBuilder::new()
        .satellite(&[(10, 100.0)])
        .station(20.0, 1)
        .data_center(0.02, 0.01)
        .data_center(0.01, 0.006)
        .contact(0, 0, 1_000.0)
        .build();
    let e = edge_weight(&i.ctx(), 0, AntennaRef { station: 0, index: 0 });
    assert_eq!(e.weight, -10_000.0);
    assert_eq!(e.amount, 100.0);
    assert_eq!(e.data_center, Some(0));
}

#[test]
fn weight_empty_backlog_is_rental() {
    let i = InstanceBuilder::new()
        .satellite(&[])
        .station(20.0, 1)
        .data_center(0.02, 0.01)
        .data_center(0.01, 0.006)
        .contact(0, 0, 1_000.0)
        .v(1.0)
        .build();
    let e = station_edge(&i.ctx(), 0, 0);
    assert_eq!(e.weight, 20.0);
    assert_eq!(e.amount, 0.0);
    assert_eq!(e.data_center, Some(0));

    let zero = InstanceBuilder::new()
        .satellite(&[])
        .station(20.0, 1)
        .data_center(0.02, 0.01)
        .contact(0, 0, 1_000.0)
        .build();
    assert_eq!(station_edge(&zero.ctx(), 0, 0).weight, 0.0);
}

#[test]
fn weight_components() {
    // D_s = 3000 in two chunks, R = 1000, τ = 1: D̃ = 1000 from the chunk
    // that arrived at slot 4, sent at slot 10.
    let i = InstanceBuilder::new()
        .satellite(&[(4, 1_500.0), (8, 1_500.0)])
        .station(18.0, 1)
        .data_center(0.01, 0.006)
        .contact(0, 0, 1_000.0)
        .backhaul(2_000.0)
        .v(100.0)
        .q(3.0)
        .build();
    let e = station_edge(&i.ctx(), 0, 0);
    let lq = 1_000.0 * 6.0;
    let latency = lq + 1.0 + 0.5 + 6.0;
    let cost = 18.0 + 0.01 * 6.0;
    let phi = latency - 60.0 * 1_000.0;
    let expected = 100.0 * cost - 3_000.0 * 1_000.0 + 3.0 * phi;
    assert!(close(e.weight, expected), "{} vs {expected}", e.weight);
    assert!(close(e.latency.total(), latency));
}

#[test]
fn empty_slot_is_all_virtual() {
    let i = InstanceBuilder::new()
        .satellite(&[(0, 500.0)])
        .satellite(&[(0, 500.0)])
        .station(18.0, 2)
        .data_center(0.01, 0.006)
        .build();
    let g = build_bipartite(&i.ctx());
    assert_eq!(g.real_edge_count(), 0);
    let a = schedule_slot(&i.ctx());
    assert!(a.legs.is_empty());
    assert_eq!(a.unassigned, vec![0, 1]);
}

#[test]
fn two_antenna_station_has_symmetric_edges() {
    let i = InstanceBuilder::new()
        .satellite(&[(0, 500.0)])
        .station(18.0, 2)
        .data_center(0.01, 0.006)
        .contact(0, 0, 1_000.0)
        .build();
    let g = build_bipartite(&i.ctx());
    assert_eq!(g.columns(), 3);
    assert_eq!(g.weights[0][0], Some(0.0));
    assert_eq!(g.weights[0][1], g.weights[0][2]);
    assert!(g.weights[0][1].is_some());
}

#[test]
fn contended_antenna() {
    let i = InstanceBuilder::new()
        .satellite(&[(0, 500.0)])
        .satellite(&[(0, 800.0)])
        .station(18.0, 1)
        .data_center(0.01, 0.006)
        .contact(0, 0, 1_000.0)
        .contact(1, 0, 1_000.0)
        .build();
    let g = build_bipartite(&i.ctx());
    assert_eq!(g.real_edge_count(), 2);
    let a = schedule_slot(&i.ctx());
    assert_eq!(a.legs.len(), 1);
    assert_eq!(a.legs[0].satellite, 1);
}

#[test]
fn matcher_examples() {
    let m = min_cost_matching(
        &[vec![Some(0.0), None, Some(-5.0)], vec![None, Some(0.0), Some(-3.0)]],
        3,
    )
    .unwrap();
    assert_eq!(m.row_to_col, vec![2, 1]);
    assert_eq!(m.total, -5.0);
    let m = min_cost_matching(&[vec![Some(0.0), Some(4.0)]], 2).unwrap();
    assert_eq!((m.row_to_col[0], m.total), (0, 0.0));
    let m = min_cost_matching(&[vec![Some(0.0), Some(-7.0)]], 2).unwrap();
    assert_eq!((m.row_to_col[0], m.total), (1, -7.0));
}

#[test]
fn positive_weights_withhold() {
    let i = InstanceBuilder::new()
        .satellite(&[(9, 10.0)])
        .station(18.0, 1)
        .data_center(0.01, 0.006)
        .contact(0, 0, 1_000.0)
        .v(1e6)
        .build();
    assert!(schedule_slot(&i.ctx()).legs.is_empty());
}

#[test]
fn oracle_one_sat_two_dcs() {
    let i = InstanceBuilder::new()
        .satellite(&[(5, 2_000.0)])
        .station(18.0, 1)
        .data_center(0.02, 0.006)
        .data_center(0.01, 0.006)
        .contact(0, 0, 1_000.0)
        .v(1e3)
        .build();
    let (a, _) = brute_force_schedule(&i.ctx()).unwrap();
    assert_eq!(a.legs.len(), 1);
    assert_eq!(a.legs[0].data_center, 1);
    assert_eq!(schedule_slot(&i.ctx()).legs, a.legs);
}

#[test]
fn oracle_refuses_large_instances() {
    let mut b = InstanceBuilder::new().station(18.0, 7).data_center(0.01, 0.006);
    b = b.satellite(&[(0, 10.0)]).contact(0, 0, 100.0);
    let i = b.build();
    assert!(matches!(
        brute_force_schedule(&i.ctx()),
        Err(OracleError::TooLarge { .. })
    ));
}

#[test]
fn empty_oracle() {
    let i = InstanceBuilder::new().station(18.0, 1).data_center(0.01, 0.006).build();
    let (a, value) = brute_force_schedule(&i.ctx()).unwrap();
    assert!(a.legs.is_empty());
    assert_eq!(value, 0.0);
}

fn assert_matches_oracle(i: &SlotInstance) {
    let ctx = i.ctx();
    let a = schedule_slot(&ctx);
    check_assignment(&a, &i.scenario, &i.contacts, i.slot).unwrap();
    let (_, best) = brute_force_schedule(&ctx).unwrap();
    let got = p3_objective(&ctx, &a);
    assert!(close(got, best), "matching {got} vs oracle {best}");
}

#[test]
fn oracle_agreement_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let i = random_instance(
            &mut rng,
            RandomLimits {
                satellites: 4,
                antennas: 4,
                data_centers: 3,
            },
        );
        assert_matches_oracle(&i);
    }
}

#[test]
fn huge_q_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let mut i = random_instance(
            &mut rng,
            RandomLimits {
                satellites: 4,
                antennas: 4,
                data_centers: 3,
            },
        );
        i.q = 1e12;
        assert_matches_oracle(&i);
    }
}

/// With Q dominating, sending data whose latency is within the threshold is
/// rewarded and sending stale data is penalised.
#[test]
fn huge_q_prefers_fresh_data() {
    let i = InstanceBuilder::new()
        .satellite(&[(0, 1_000.0)])
        .satellite(&[(95, 1_000.0)])
        .station(18.0, 1)
        .data_center(0.01, 0.006)
        .contact(0, 0, 1_000.0)
        .contact(1, 0, 1_000.0)
        .slot(100)
        .q(1e12)
        .build();
    let a = schedule_slot(&i.ctx());
    assert_eq!(a.legs.len(), 1);
    assert_eq!(a.legs[0].satellite, 1);
}

proptest! {
    #[test]
    fn shift_invariance(seed in any::<u64>(), shifts in prop::collection::vec(-1e6f64..1e6, 6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = random_instance(&mut rng, RandomLimits { satellites: 6, antennas: 6, data_centers: 3 });
        let graph = build_bipartite(&i.ctx());
        let base = min_cost_matching(&graph.weights, graph.columns()).unwrap();
        let shifted: Vec<Vec<Option<f64>>> = graph
            .weights
            .iter()
            .enumerate()
            .map(|(s, row)| row.iter().map(|w| w.map(|w| w + shifts[s])).collect())
            .collect();
        let m = min_cost_matching(&shifted, graph.columns()).unwrap();
        let eval = |assign: &[usize]| -> f64 {
            assign.iter().enumerate().map(|(s, &c)| graph.weights[s][c].unwrap()).sum()
        };
        let a = eval(&base.row_to_col);
        let b = eval(&m.row_to_col);
        prop_assert!(close(a, b), "{a} vs {b}");
    }

    #[test]
    fn schedule_is_feasible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = random_instance(&mut rng, RandomLimits { satellites: 8, antennas: 8, data_centers: 4 });
        let a = schedule_slot(&i.ctx());
        prop_assert!(check_assignment(&a, &i.scenario, &i.contacts, i.slot).is_ok());
        for leg in &a.legs {
            prop_assert!(leg.amount > 0.0);
        }
    }
}
