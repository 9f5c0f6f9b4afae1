mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trickster::dd::{solve_dd, solve_minimax, solve_state, Mode};
use trickster::model::{parse_deal, PlayState, Seat, Side, Suit};

fn strain(i: usize) -> Option<Suit> {
    (i < 4).then(|| Suit::from_index(i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn searches_match_exhaustive_minimax(seed in any::<u64>(), size in prop::sample::select(vec![4usize, 8, 12, 16]), s in 0usize..5, l in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let deal = common::random_small_deal(&mut rng, size);
        let st = PlayState::new(&deal, strain(s), Seat::from_index(l));
        let oracle = solve_minimax(&st, Side::NS).unwrap();
        let r = solve_state(&st, Side::NS, Mode::Both).unwrap();
        prop_assert_eq!(r.tricks, oracle);
    }

    #[test]
    fn sides_split_the_tricks(seed in any::<u64>(), s in 0usize..5, l in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let deal = common::random_small_deal(&mut rng, 12);
        let (t, lead) = (strain(s), Seat::from_index(l));
        let ns = solve_dd(&deal, t, lead, Side::NS, Mode::Partition).unwrap().tricks;
        let ew = solve_dd(&deal, t, lead, Side::EW, Mode::Partition).unwrap().tricks;
        prop_assert_eq!(ns as usize + ew as usize, 3);
    }

    #[test]
    fn rotating_the_table_changes_nothing(seed in any::<u64>(), s in 0usize..5, l in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let deal = common::random_small_deal(&mut rng, 12);
        let lead = Seat::from_index(l);
        let a = solve_dd(&deal, strain(s), lead, Side::NS, Mode::Partition).unwrap().tricks;
        let b = solve_dd(&deal.rotate(1), strain(s), lead.next(), Side::EW, Mode::Partition).unwrap().tricks;
        prop_assert_eq!(a, b);
    }
}

#[test]
fn mid_trick_states_solve() {
    let deal = parse_deal("N:AQ.-.-.- K3.-.-.- 54.-.-.- 76.-.-.-").unwrap();
    let st = PlayState::new(&deal, None, Seat::South);
    let st = st.play("S4".parse().unwrap()).unwrap();
    for mode in [Mode::Plain, Mode::Partition] {
        assert_eq!(solve_state(&st, Side::NS, mode).unwrap().tricks, 1);
    }
    assert_eq!(solve_minimax(&st, Side::NS).unwrap(), 1);
}

#[test]
fn finesse_onside_makes_both() {
    let deal = parse_deal("N:AQ.-.-.- 76.-.-.- 54.-.-.- K3.-.-.-").unwrap();
    let r = solve_dd(&deal, None, Seat::South, Side::NS, Mode::Both).unwrap();
    assert_eq!(r.tricks, 2);
}
