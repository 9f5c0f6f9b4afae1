mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trickster::dd::solve_minimax;
use trickster::lattice::SituationSet;
use trickster::sd::{
    brute_force_winsets, is_achievable, perfect_info_value, solve_imperfect, verify_strategy, BridgeImperfect,
    ImperfectGame, SdError,
};

/// Values agree with brute force, every member is achievable with a
/// checked witness, and no member beats perfect information.
fn consistent<G: ImperfectGame>(g: &G) -> Result<(), TestCaseError> {
    let v = solve_imperfect(g).unwrap();
    prop_assert_eq!(&v, &brute_force_winsets(g).unwrap());
    let perfect = perfect_info_value(g).unwrap();
    for m in v.members() {
        let (ok, strat) = is_achievable(g, m);
        prop_assert!(ok, "{} is not achievable", m);
        prop_assert!(verify_strategy(g, &strat.unwrap(), m));
        prop_assert!(m.is_subset(&perfect));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scripted_games(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_imperfect(&mut rng, n, 5);
        consistent(&g)?;
    }

    #[test]
    fn twelve_card_endings(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_bridge_imperfect(&mut rng, 12, 5);
        consistent(&g)?;
    }
}

/// With perfect information a layout is won exactly when double dummy says so.
#[test]
fn perfect_value_is_double_dummy() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..30 {
        let g = common::random_bridge_imperfect(&mut rng, 12, 6);
        let perfect = perfect_info_value(&g).unwrap();
        for (s, d) in g.layouts.iter().enumerate() {
            let mut st = g.start;
            st.hands = d.hands;
            let dd = solve_minimax(&st, g.declarer).unwrap();
            assert_eq!(perfect.contains(s), dd >= g.target, "layout {s}");
        }
    }
}

#[test]
fn achievability_is_downward_closed() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..30 {
        let g = common::random_bridge_imperfect(&mut rng, 12, 5);
        let n = g.universe_size();
        for mask in 0..1u64 << n {
            let a = SituationSet::from_mask(n, mask);
            if is_achievable(&g, &a).0 {
                for s in a.iter() {
                    let mut b = a.clone();
                    b.remove(s);
                    assert!(is_achievable(&g, &b).0);
                }
            }
        }
    }
}

#[test]
fn large_deals_are_refused() {
    let deal =
        trickster::model::parse_deal("N:96.QJ85.AQ3.KJT8 43.A72.JT62.AQ73 AT2.KT6.K9854.95 KQJ875.943.7.642").unwrap();
    let st = trickster::model::PlayState::new(&deal, None, trickster::model::Seat::West);
    let g = BridgeImperfect::new(st, trickster::model::Side::NS, 9, vec![deal]).unwrap();
    assert!(matches!(solve_imperfect(&g), Err(SdError::TooLarge { cards: 52, .. })));
}
