use gossip_freshness::clustered::{build_clustered, clustered_freshness, ClusterSpec};
use gossip_freshness::exact::freshness_all_nodes;
use gossip_freshness::network::{GossipNetwork, NodeId, NodeSet};
use gossip_freshness::sim::{
    replication_rng, run_replication, simulate, simulate_set, EventTable, SimConfig, SimState,
    Transition,
};
use gossip_freshness::structured::{build_structured, TopologyKind, TopologySpec};

fn cfg(seed: u64) -> SimConfig {
    SimConfig {
        horizon: 1e4,
        warmup: 1e2,
        replications: 20,
        seed,
    }
}

fn ring3() -> GossipNetwork {
    build_structured(&TopologySpec::new(TopologyKind::Ring, 3, 1.0, 1.0).unwrap()).unwrap()
}

#[test]
fn lone_source_clock_has_unit_mean() {
    let net = GossipNetwork::new(1, 1.0, &[0.0], &[]).unwrap();
    let table = EventTable::new(&net).unwrap();
    let mut rng = replication_rng(42, 0);
    let draws = 100_000;
    let mut total = 0.0;
    for _ in 0..draws {
        let (dwell, t) = table.next_event(&mut rng);
        assert_eq!(t, Transition::SourceSelf);
        total += dwell;
    }
    assert!((total / draws as f64 - 1.0).abs() < 0.01);
}

#[test]
fn transitions_drawn_in_proportion_to_rate() {
    let table = EventTable::new(&ring3()).unwrap();
    assert!((table.total_rate() - 5.0).abs() < 1e-12);
    let mut rng = replication_rng(7, 0);
    let draws = 200_000;
    let selfs = (0..draws)
        .filter(|_| table.next_event(&mut rng).1 == Transition::SourceSelf)
        .count();
    assert!((selfs as f64 / draws as f64 - 0.2).abs() < 0.01);
}

#[test]
fn single_node_is_fresh_half_the_time() {
    let net = GossipNetwork::new(1, 1.0, &[1.0], &[]).unwrap();
    let est = simulate(&net, &cfg(1)).unwrap();
    let se = est.std_error(0).unwrap();
    assert!(
        (est.means[0] - 0.5).abs() <= 3.0 * se,
        "{} ± {se}",
        est.means[0]
    );
}

#[test]
fn ring_of_three_matches_recursion() {
    let est = simulate(&ring3(), &cfg(2)).unwrap();
    for j in 0..3 {
        let se = est.std_error(j).unwrap();
        assert!((est.means[j] - 37.0 / 112.0).abs() <= 3.0 * se);
    }
}

#[test]
fn small_networks_agree_with_solver() {
    let nets = [
        build_structured(&TopologySpec::new(TopologyKind::Full, 5, 2.0, 1.0).unwrap()).unwrap(),
        build_clustered(&ClusterSpec::new(TopologyKind::Full, 6, 3, 2.0, 1.5, 1.0, 0.7).unwrap())
            .unwrap(),
        GossipNetwork::new(
            4,
            0.5,
            &[0.0, 1.0, 0.0, 0.0],
            &[(1, 0, 2.0), (0, 2, 1.0), (2, 3, 0.3), (3, 0, 1.0)],
        )
        .unwrap(),
    ];
    for (at, net) in nets.iter().enumerate() {
        let exact = freshness_all_nodes(net).unwrap();
        let est = simulate(net, &cfg(100 + at as u64)).unwrap();
        for (j, f) in exact.iter().enumerate() {
            let bound = (3.0 * est.std_error(j).unwrap()).max(0.005);
            assert!(
                (est.means[j] - f.value()).abs() <= bound,
                "net {at} node {j}"
            );
        }
    }
}

#[test]
fn set_estimates() {
    let net = ring3();
    let c = cfg(3);
    let per_node = simulate(&net, &c).unwrap();
    let single = simulate_set(&net, NodeSet::singleton(1), &c).unwrap();
    assert_eq!(single.means[0], per_node.means[1]);
    assert_eq!(single.std_error(0), per_node.std_error(1));

    let whole = simulate_set(&net, NodeSet::full(3), &c).unwrap();
    assert!((whole.means[0] - 0.5).abs() <= 3.0 * whole.std_error(0).unwrap());

    let pair = simulate_set(&net, [0, 1].into_iter().collect(), &c).unwrap();
    let slack = 3.0 * (single.std_error(0).unwrap() + pair.std_error(0).unwrap());
    assert!(single.means[0] <= pair.means[0] + slack);
    assert!(
        pair.means[0]
            <= whole.means[0] + 3.0 * (pair.std_error(0).unwrap() + whole.std_error(0).unwrap())
    );

    assert!(simulate_set(&net, NodeSet::empty(), &c).is_err());
    assert!(simulate_set(&net, NodeSet::singleton(5), &c).is_err());
}

#[test]
fn identical_inputs_give_identical_estimates() {
    let net =
        build_clustered(&ClusterSpec::new(TopologyKind::Ring, 4, 2, 1.0, 1.0, 1.0, 1.0).unwrap())
            .unwrap();
    let c = SimConfig {
        horizon: 2e3,
        ..cfg(77)
    };
    assert_eq!(simulate(&net, &c).unwrap(), simulate(&net, &c).unwrap());
    let other = simulate(&net, &SimConfig { seed: 78, ..c }).unwrap();
    assert_ne!(simulate(&net, &c).unwrap(), other);
}

#[test]
fn replication_order_does_not_matter() {
    let net = ring3();
    let table = EventTable::new(&net).unwrap();
    let c = SimConfig {
        horizon: 1e3,
        ..cfg(9)
    };
    let forward: Vec<_> = (0..5)
        .map(|r| run_replication(&net, &table, &c, r, None))
        .collect();
    let mut backward: Vec<_> = (0..5)
        .rev()
        .map(|r| run_replication(&net, &table, &c, r, None))
        .collect();
    backward.reverse();
    assert_eq!(forward, backward);
}

#[test]
fn accumulators_never_outrun_the_clock() {
    let net = ring3();
    let table = EventTable::new(&net).unwrap();
    let mut rng = replication_rng(5, 0);
    let mut state = SimState::new(3, 0.0);
    let mut last = vec![0.0; 3];
    for _ in 0..20_000 {
        let (dwell, t) = table.next_event(&mut rng);
        state.step(dwell, t);
        let acc = state.accumulators();
        for j in 0..3 {
            assert!(acc[j] >= last[j]);
            assert!(acc[j] <= state.clock() * (1.0 + 1e-12));
        }
        assert!(acc.iter().sum::<f64>() <= 3.0 * state.clock() * (1.0 + 1e-12));
        last = acc.to_vec();
    }
}

#[test]
fn event_count_tracks_total_rate() {
    let net = ring3();
    let table = EventTable::new(&net).unwrap();
    let c = SimConfig {
        horizon: 1e5,
        warmup: 0.0,
        replications: 1,
        seed: 4,
    };
    let out = run_replication(&net, &table, &c, 0, None);
    let rate = out.events as f64 / c.horizon;
    assert!((rate / table.total_rate() - 1.0).abs() < 0.01);
}

#[test]
fn clustered_disconnected_estimate() {
    let spec = ClusterSpec::new(TopologyKind::Disconnected, 4, 2, 1.0, 1.0, 1.0, 1.0).unwrap();
    let net = build_clustered(&spec).unwrap();
    let est = simulate(&net, &cfg(6)).unwrap();
    let truth = clustered_freshness(&spec).unwrap().value();
    let node = spec.end_node(1, 0).0;
    assert!((est.means[node] - truth).abs() <= 3.0 * est.std_error(node).unwrap());
    assert_eq!(net.gossip_rate(NodeId(node), NodeId(node - 1)), 0.0);
}
