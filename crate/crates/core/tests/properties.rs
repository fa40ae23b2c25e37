use proptest::prelude::*;

use fliprepair::chord::chords_from_tour;
use fliprepair::gen::{random_eulerian, regular2};
use fliprepair::graph::{parse_graph, write_graph};
use fliprepair::oracle::{best_count, enumerate_tours};
use fliprepair::rng::{pick_index, WalkRng};
use fliprepair::sampler::{sample_tour, SampleConfig};
use fliprepair::store::{partition_sizes, ChordStore};
use fliprepair::walk::{FlatWalk, PositionWalk, RepairWalk};
use fliprepair::{hierholzer_tour, Tour};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn store_and_flat_follow_the_position_walk(n in 2usize..60, b in 1usize..24, seed in any::<u64>()) {
        let mut rng = WalkRng::from_seed(seed);
        let g = regular2(n, &mut rng).unwrap();
        let t = hierholzer_tour(&g).unwrap();
        let mut store = ChordStore::build(&g, &t, Some(b)).unwrap();
        let mut flat = FlatWalk::new(&g, &t).unwrap();
        let mut naive = PositionWalk::new(&g, &t).unwrap();
        for _ in 0..150 {
            let x = rng.below(n);
            let w = naive.crossing_count(x);
            prop_assert_eq!(store.crossing_count(x), w);
            prop_assert_eq!(flat.crossing_count(x), w);
            let k = pick_index(rng.unit(), w);
            let y = naive.candidate(x, k);
            prop_assert_eq!(flat.candidate(x, k), y);
            if y != x {
                naive.apply_flip_pair(x, y);
                flat.apply_flip_pair(x, y);
                store.apply_flip_pair(x, y);
            }
        }
        prop_assert!(store.validate().is_ok());
        let tour = naive.tour();
        prop_assert_eq!(store.tour(), tour.clone());
        prop_assert_eq!(flat.tour(), tour.clone());
        prop_assert!(Tour::new(&g, tour.arcs().to_vec()).is_ok());
    }

    #[test]
    fn circuit_count_from_interlacement(n in 2usize..10, mask in any::<u32>(), seed in any::<u64>()) {
        let mut rng = WalkRng::from_seed(seed);
        let g = regular2(n, &mut rng).unwrap();
        let t = hierholzer_tour(&g).unwrap();
        let s: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let chords = chords_from_tour(&g, &t).unwrap();
        prop_assert_eq!(chords.circuit_count_from_flip(&s), t.transition_system().flipped(&g, &s).cycle_count());
    }

    #[test]
    fn enumeration_equals_best(n in 1usize..5, k in 1usize..4, seed in any::<u64>()) {
        let mut rng = WalkRng::from_seed(seed);
        let g = random_eulerian(n, k, &mut rng).unwrap();
        let census = enumerate_tours(&g).unwrap();
        prop_assert_eq!(best_count(&g).unwrap(), census.count().into());
        for t in &census.tours {
            prop_assert_eq!(t.transition_system().cycle_count(), 1);
        }
    }

    #[test]
    fn graph_text_round_trip(n in 1usize..12, k in 1usize..4, seed in any::<u64>()) {
        let mut rng = WalkRng::from_seed(seed);
        let g = random_eulerian(n, k, &mut rng).unwrap();
        prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn samples_are_tours_and_reproducible(n in 1usize..4, k in 1usize..4, seed in any::<u64>()) {
        let mut rng = WalkRng::from_seed(seed);
        let g = random_eulerian(n, k, &mut rng).unwrap();
        let cfg = SampleConfig { seed, steps: Some(200), ..Default::default() };
        let a = sample_tour(&g, &cfg).unwrap();
        prop_assert!(Tour::new(&g, a.tour.arcs().to_vec()).is_ok());
        prop_assert!(enumerate_tours(&g).unwrap().index_of(&a.tour).is_some());
        prop_assert_eq!(sample_tour(&g, &cfg).unwrap(), a);
    }

    #[test]
    fn chunk_partition(len in 1usize..5000, b in 1usize..200) {
        let sizes = partition_sizes(len, b);
        prop_assert_eq!(sizes.iter().sum::<usize>(), len);
        for &s in &sizes {
            prop_assert!(2 * s < 3 * b || s == len);
            prop_assert!(s >= b.div_ceil(2) || sizes.len() == 1);
        }
    }

    #[test]
    fn pick_index_in_range(u in 0.0f64..1.0, w in 0usize..1000) {
        prop_assert!(pick_index(u, w) <= w);
    }
}
