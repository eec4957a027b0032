//! Cross-module invariants on random realizations.

use orbsum::core2d::ConeOrder;
use orbsum::enumerate::{all_build_orders, random_realization, Alphabet};
use orbsum::nu::nu;
use orbsum::splitproc::{all_split_outcomes, run_split, SplitStrategy};
use orbsum::sumtree::canonicalize;
use orbsum::verify::{contraction_outcomes, move_closure};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tree(seed: u64, edges: usize, vertex: bool) -> orbsum::sumtree::RealizationTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_realization(&mut rng, &Alphabet::standard(), edges, vertex)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_split_choice_reaches_the_canonical_form(seed in any::<u64>(), edges in 0usize..5) {
        let t = tree(seed, edges, true);
        let form = canonicalize(&t).unwrap();
        prop_assert_eq!(all_split_outcomes(&t).unwrap(), vec![form.clone()]);
        prop_assert_eq!(run_split(&t, SplitStrategy::FirstFit).unwrap().final_form, form);
    }

    #[test]
    fn contraction_is_confluent(seed in any::<u64>(), edges in 0usize..7) {
        let t = tree(seed, edges, true);
        let outcomes = contraction_outcomes(&t);
        prop_assert_eq!(outcomes.len(), 1);
        prop_assert!(outcomes.contains(&canonicalize(&t).unwrap()));
    }

    #[test]
    fn moves_keep_the_canonical_form(seed in any::<u64>(), edges in 0usize..4) {
        let t = tree(seed, edges, true);
        let form = canonicalize(&t).unwrap();
        for u in move_closure(&t) {
            prop_assert_eq!(canonicalize(&u).unwrap(), form.clone());
        }
    }

    #[test]
    fn nu_ignores_build_order(seed in any::<u64>(), edges in 0usize..6, p in 2u32..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_realization(&mut rng, &Alphabet::cyclic(p), edges, false);
        let t = orbsum::sumtree::reduce(&t).unwrap();
        let p = ConeOrder::new(p).unwrap();
        let base = nu(&t, p).unwrap();
        for u in all_build_orders(&t) {
            prop_assert_eq!(nu(&u, p).unwrap(), base);
        }
    }
}
