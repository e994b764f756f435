use hexad_core::network::{triad_from_linear_index, triad_linear_index, NetworkOptions};
use hexad_core::{Covariates, NodeId, Part, Triad, TriadicNetwork};
use proptest::prelude::*;

fn network_strategy() -> impl Strategy<Value = (u32, Vec<(u32, u32, u32)>)> {
    (1u32..=8).prop_flat_map(|n| {
        let cells = (n * n * n) as usize;
        (Just(n), proptest::sample::subsequence((0..cells as u32).collect::<Vec<_>>(), 0..=cells))
            .prop_map(move |(n, picked)| {
                let triads = picked
                    .into_iter()
                    .map(|idx| (idx / (n * n), idx / n % n, idx % n))
                    .collect();
                (n, triads)
            })
    })
}

fn build(n: u32, triads: &[(u32, u32, u32)], budget: u64) -> TriadicNetwork {
    let x = vec![0.0; (n as usize).pow(3)];
    TriadicNetwork::with_options(
        n,
        triads.iter().map(|&(i, j, k)| Triad::new(i, j, k)),
        Covariates::dense(1, x),
        NetworkOptions { dense_budget: budget },
    )
    .unwrap()
}

proptest! {
    #[test]
    fn linear_index_round_trip(n in 1u32..=20, seed in any::<u64>()) {
        let cells = (n as u64).pow(3);
        let idx = (seed % cells) as usize;
        let t = triad_from_linear_index(idx, n).unwrap();
        prop_assert_eq!(triad_linear_index(t, n).unwrap(), idx);
    }

    #[test]
    fn secondary_indexes_are_coherent((n, triads) in network_strategy(), sparse in any::<bool>()) {
        let net = build(n, &triads, if sparse { 0 } else { 1 << 24 });
        prop_assert_eq!(net.n_links(), triads.len());
        for a in 0..n {
            for b in 0..n {
                let expect_jk: Vec<u32> = (0..n).filter(|&i| triads.contains(&(i, a, b))).collect();
                let expect_ik: Vec<u32> = (0..n).filter(|&j| triads.contains(&(a, j, b))).collect();
                let expect_ij: Vec<u32> = (0..n).filter(|&k| triads.contains(&(a, b, k))).collect();
                prop_assert_eq!(net.index_jk(a, b), &expect_jk[..]);
                prop_assert_eq!(net.index_ik(a, b), &expect_ik[..]);
                prop_assert_eq!(net.index_ij(a, b), &expect_ij[..]);
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    prop_assert_eq!(net.contains(Triad::new(i, j, k)), triads.contains(&(i, j, k)));
                }
            }
        }
    }

    #[test]
    fn degrees_sum_to_links((n, triads) in network_strategy()) {
        let net = build(n, &triads, 1 << 24);
        for part in [Part::One, Part::Two, Part::Three] {
            let total: usize = (0..n).map(|v| net.degree(NodeId::new(part, v)).unwrap()).sum();
            prop_assert_eq!(total, triads.len());
        }
        let (avg, rho) = net.average_degree_and_density();
        prop_assert!((avg - (n * n) as f64 * rho).abs() < 1e-12);
    }
}

#[test]
fn three_link_statistics() {
    let net = build(4, &[(0, 1, 0), (1, 0, 1), (2, 3, 0)], 1 << 24);
    assert_eq!(net.degree(NodeId::new(Part::Three, 0)).unwrap(), 2);
    assert_eq!(net.average_degree_and_density(), (0.75, 3.0 / 64.0));
    assert!(net.degree(NodeId::new(Part::One, 4)).is_err());
}
