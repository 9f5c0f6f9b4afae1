use trickster::dd::{solve_dd, Mode};
use trickster::mc::{
    contract_score, dd_auction_score, final_contract, parse_auction, project_auction, sample_deals, select_bid,
    BidConfig, DealConstraint, McError, PassDb, ToyDb, WeightedSample,
};
use trickster::model::{CardSet, RankSet, Seat, Side, Suit};

fn deck36() -> DealConstraint {
    DealConstraint::new(CardSet::full_ranks(RankSet::top(9)))
}

/// With a passing database the auction stops at the candidate, so each
/// score is the contract's double-dummy result.
#[test]
fn bid_scores_match_direct_evaluation() {
    let deal = sample_deals(&deck36(), 1, 5).unwrap().remove(0);
    let sample = WeightedSample::uniform(vec![deal]);
    let cands = parse_auction("1N 1S 2H 3C").unwrap();
    let cfg = BidConfig::default();
    let choice = select_bid(&[], Seat::North, deal.hand(Seat::North), &cands, &PassDb, &sample, &cfg, |a, d| {
        dd_auction_score(a, Seat::North, d, Side::NS)
    })
    .unwrap();
    let mut expected = Vec::new();
    for b in &cands {
        let o = final_contract(&[*b], Seat::North).unwrap();
        let tricks = solve_dd(&deal, o.strain, Seat::East, Side::NS, Mode::Plain).unwrap().tricks;
        expected.push(contract_score(&o, tricks, 2) as f64);
    }
    assert_eq!(choice.scores, expected);
    let best = expected.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(choice.scores[choice.best], best);
    assert_eq!(choice.scores.iter().position(|s| *s == best), Some(choice.best));
}

/// A call the database has no answer to is passed out, and simulation
/// finds when that is worth more than the database's own call.
#[test]
fn database_gaps_are_exploited() {
    // Opponents always double 1NT; nothing covers 2NT.
    let db = ToyDb::parse("1N ; 0-40 ; X\n1N X ; 0-40 ; P\n1N X P ; 0-40 ; P\n").unwrap();
    let deals = sample_deals(&deck36(), 6, 9).unwrap();
    let a = project_auction(&parse_auction("1N").unwrap(), Seat::North, &deals[0], &db, 64).unwrap();
    assert_eq!(a, parse_auction("1N X P P P").unwrap());
    let a = project_auction(&parse_auction("2N").unwrap(), Seat::North, &deals[0], &db, 64).unwrap();
    assert_eq!(a, parse_auction("2N P P P").unwrap());

    for d in deals {
        let sample = WeightedSample::uniform(vec![d]);
        let cands = parse_auction("1N 2N").unwrap();
        let c =
            select_bid(&[], Seat::North, d.hand(Seat::North), &cands, &db, &sample, &BidConfig::default(), |a, d| {
                dd_auction_score(a, Seat::North, d, Side::NS)
            })
            .unwrap();
        let nt = solve_dd(&d, None, Seat::East, Side::NS, Mode::Partition).unwrap().tricks;
        let one_x = final_contract(&parse_auction("1N X P P P").unwrap(), Seat::North).unwrap();
        let two = final_contract(&parse_auction("2N P P P").unwrap(), Seat::North).unwrap();
        let (s1, s2) = (contract_score(&one_x, nt, 2) as f64, contract_score(&two, nt, 2) as f64);
        assert_eq!(c.scores, vec![s1, s2]);
        assert_eq!(c.best, if s2 > s1 { 1 } else { 0 });
    }
}

#[test]
fn stated_hand_must_match_the_sample() {
    let deals = sample_deals(&deck36(), 2, 1).unwrap();
    let sample = WeightedSample::uniform(deals.clone());
    let r = select_bid(
        &[],
        Seat::North,
        deals[0].hand(Seat::North),
        &[trickster::mc::Bid::Pass],
        &PassDb,
        &sample,
        &BidConfig::default(),
        |a, d| dd_auction_score(a, Seat::North, d, Side::NS),
    );
    assert!(matches!(r, Err(McError::HandMismatch(1))));
}

#[test]
fn samples_respect_placed_cards_and_lengths() {
    let north = CardSet::full_ranks(RankSet::top(9)).suit(Suit::Spades);
    let c = deck36().place(Seat::North, north).length(Seat::West, Suit::Hearts, 4, 9);
    let deals = sample_deals(&c, 40, 3).unwrap();
    for d in &deals {
        assert_eq!(d.hand(Seat::North), north);
        assert!(d.hand(Seat::West).suit_len(Suit::Hearts) >= 4);
        assert_eq!(d.all_cards(), c.deck);
    }
    assert_eq!(deals, sample_deals(&c, 40, 3).unwrap());
    assert_ne!(deals, sample_deals(&c, 40, 4).unwrap());
}

#[test]
fn weighted_sample_round_trips() {
    let deals = sample_deals(&deck36(), 5, 2).unwrap();
    let w = WeightedSample::new(deals, vec![1.0, 0.5, 2.0, 0.25, 3.0]).unwrap();
    assert_eq!(WeightedSample::from_text(&w.to_text()).unwrap(), w);
}
