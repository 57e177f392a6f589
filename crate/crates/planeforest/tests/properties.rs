//! Property tests for the combinatorial core: codec identities, rotation
//! closure, shift algebra, and excursion-list invariants.

use proptest::prelude::*;

use planeforest::continuum::{excursions, GridPath};
use planeforest::degrees::DegreeSequence;
use planeforest::forests::decode;
use planeforest::paths::LatticePath;
use planeforest::sampler::{sample_forest, SeededRng};

/// Random small degree sequences: a handful of vertices per degree, with a
/// guaranteed surplus of leaves so that c >= 1.
fn degree_sequence_strategy() -> impl Strategy<Value = DegreeSequence> {
    (1u64..40, proptest::collection::vec(0u64..5, 0..6)).prop_map(|(leaves, others)| {
        let mut pairs = vec![(0u64, leaves)];
        let mut debt = 0u64;
        for (i, &count) in others.iter().enumerate() {
            let degree = i as u64 + 1;
            pairs.push((degree, count));
            debt += (degree - 1) * count;
        }
        // top up leaves until c >= 1
        pairs[0].1 = pairs[0].1.max(debt + 1);
        DegreeSequence::from_pairs(&pairs).expect("constructed valid")
    })
}

proptest! {
    #[test]
    fn sampled_forests_round_trip_and_realize_s(
        s in degree_sequence_strategy(),
        seed in 0u64..1_000_000,
    ) {
        let mut rng = SeededRng::new(seed, 0);
        let forest = sample_forest(&s, &mut rng);
        prop_assert_eq!(forest.degree_sequence(), s.clone());
        prop_assert_eq!(forest.trees().len() as u64, s.c());
        let path = forest.encode();
        prop_assert!(path.is_first_passage());
        prop_assert_eq!(decode(&path).unwrap(), forest);
    }

    #[test]
    fn rotation_lands_in_first_passage_set(
        s in degree_sequence_strategy(),
        seed in 0u64..1_000_000,
    ) {
        let mut rng = SeededRng::new(seed, 1);
        let mut children = s.child_vector();
        rng.shuffle(&mut children);
        let bridge = LatticePath::walk_from_children(&children);
        for j in 0..s.c() {
            let rotated = bridge.rotate_to_first_passage(j).unwrap();
            prop_assert!(rotated.is_first_passage());
            prop_assert_eq!(rotated.degree_counts(), s.counts().clone());
        }
    }

    #[test]
    fn shift_by_u_then_complement_is_identity(
        increments in proptest::collection::vec(-1i64..4, 1..30),
        u_frac in 0.0f64..1.0,
    ) {
        let p = LatticePath::new(increments).unwrap();
        let u = (u_frac * p.len() as f64) as usize;
        let round = p.cyclic_shift(u).unwrap().cyclic_shift(p.len() - u).unwrap();
        prop_assert_eq!(round, p);
    }

    #[test]
    fn child_vector_histogram_round_trips(s in degree_sequence_strategy()) {
        let d = s.child_vector();
        prop_assert_eq!(d.len() as u64, s.n());
        prop_assert!(d.windows(2).all(|w| w[0] <= w[1]));
        let mut hist = std::collections::BTreeMap::new();
        for v in d {
            *hist.entry(v).or_insert(0u64) += 1;
        }
        prop_assert_eq!(&hist, s.counts());
    }

    #[test]
    fn tree_metric_inequalities_hold(
        s in degree_sequence_strategy(),
        seed in 0u64..1_000_000,
    ) {
        let mut rng = SeededRng::new(seed, 2);
        let forest = sample_forest(&s, &mut rng);
        let mut total = 0;
        for tree in forest.trees() {
            let metrics = tree.metrics();
            prop_assert!(metrics.height < metrics.size);
            prop_assert!(metrics.diameter <= 2 * metrics.height);
            let contour = tree.contour_values();
            prop_assert_eq!(contour.len() as u64, 2 * (metrics.size - 1) + 1);
            prop_assert_eq!(*contour.iter().max().unwrap() as u64, metrics.height);
            total += metrics.size;
        }
        prop_assert_eq!(total, s.n());
    }

    #[test]
    fn excursion_list_invariants(
        values in proptest::collection::vec(-2.0f64..2.0, 2..80),
    ) {
        let mut path_values = vec![0.0];
        path_values.extend(values);
        let p = GridPath::from_values(path_values).unwrap();
        let list = excursions(&p, false);
        let lengths = list.ranked_lengths();
        prop_assert!(lengths.windows(2).all(|w| w[0] >= w[1] - 1e-15));
        prop_assert!(list.total_length() <= 1.0 + 1e-12);
        for exc in &list.intervals {
            prop_assert!(exc.left >= 0.0 && exc.right <= 1.0 && exc.left < exc.right);
        }
    }
}
