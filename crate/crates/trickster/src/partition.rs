//! Partition search: alpha-beta whose transposition table stores sets of
//! positions rather than single positions.
//!
//! A [`PartitionSystem`] supplies three set constructors over a game:
//! - `generalize` (P): a set of terminals sharing a terminal's value;
//! - `back_up` (R): positions with a move into a given child set;
//! - `constrain` (C): positions all of whose moves land in the given child sets.
//!
//! The bridge system here describes a set by fixing the locations of the
//! highest cards of each suit and treating the rest as x's.

use std::fmt::{self, Debug};
use std::hash::Hash;

use num_traits::Float;
use rustc_hash::FxHashMap;

use crate::dd::DdGame;
use crate::game::{Algebra, Eval, Game, GameError, SearchStats};
use crate::model::{winning_index, Card, CardSet, ModelError, PlayState, Seat, Suit};

pub trait PartitionSystem<G: Game> {
    type Set: Clone + Debug;
    /// Coarse hash key. Every member of a set returned for `p` shares `p`'s bucket.
    type Bucket: Clone + Eq + Hash + Debug;

    fn bucket(&self, p: &G::Pos) -> Self::Bucket;
    fn contains(&self, s: &Self::Set, p: &G::Pos) -> bool;
    /// P: a set of terminals with the same value as terminal `p`.
    fn generalize(&self, p: &G::Pos) -> Self::Set;
    /// R: positions like `p` with a move into `s`, where `child` is the
    /// successor of `p` that produced `s`.
    fn back_up(&self, p: &G::Pos, child: &G::Pos, s: &Self::Set) -> Self::Set;
    /// C: positions like `p` every one of whose moves lands in one of the
    /// children's sets. `children` lists every successor of `p`.
    fn constrain(&self, p: &G::Pos, children: &[(G::Pos, Self::Set)]) -> Self::Set;
    fn intersect(&self, p: &G::Pos, a: &Self::Set, b: &Self::Set) -> Self::Set;
}

type SetKey<B, K> = (B, K, K);

/// Partition search over a totally ordered value algebra.
pub struct PartitionSearch<'a, G, A, S>
where
    G: Game,
    A: Algebra<Value = G::Value>,
    S: PartitionSystem<G>,
{
    pub game: &'a G,
    pub alg: &'a A,
    pub sys: &'a S,
    pub tt: FxHashMap<SetKey<S::Bucket, A::Key>, Vec<(S::Set, G::Value)>>,
    pub stats: SearchStats,
    /// When set, every stored entry is also logged with the position that
    /// produced it and its window.
    pub log: Option<Vec<LoggedEntry<G::Pos, S::Set, G::Value>>>,
}

#[derive(Debug, Clone)]
pub struct LoggedEntry<P, S, V> {
    pub pos: P,
    pub set: S,
    pub x: V,
    pub y: V,
    pub value: V,
}

impl<'a, G, A, S> PartitionSearch<'a, G, A, S>
where
    G: Game,
    A: Algebra<Value = G::Value>,
    S: PartitionSystem<G>,
{
    pub fn new(game: &'a G, alg: &'a A, sys: &'a S) -> Self {
        PartitionSearch { game, alg, sys, tt: FxHashMap::default(), stats: SearchStats::default(), log: None }
    }

    /// Value of `p` within `[x, y]`, plus a set of positions containing `p`
    /// that all take that windowed value.
    pub fn search(&mut self, p: &G::Pos, x: &G::Value, y: &G::Value) -> Result<(G::Value, S::Set), GameError> {
        if !self.alg.leq(x, y) {
            return Err(GameError::BadWindow);
        }
        self.rec(p, x.clone(), y.clone())
    }

    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn entries(&self) -> usize {
        self.tt.values().map(|v| v.len()).sum()
    }

    /// All stored `(set, window, value)` triples.
    pub fn table(&self) -> Vec<(S::Set, A::Key, A::Key, G::Value)> {
        let mut out = Vec::new();
        for ((_, xk, yk), list) in &self.tt {
            for (s, v) in list {
                out.push((s.clone(), xk.clone(), yk.clone(), v.clone()));
            }
        }
        out
    }

    fn store(
        &mut self,
        key: SetKey<S::Bucket, A::Key>,
        p: &G::Pos,
        (x, y): (&G::Value, &G::Value),
        s: S::Set,
        v: G::Value,
    ) -> Result<(), GameError> {
        if !self.sys.contains(&s, p) {
            return Err(GameError::PartitionContract(format!("stored set excludes {p:?}")));
        }
        if let Some(log) = self.log.as_mut() {
            log.push(LoggedEntry { pos: p.clone(), set: s.clone(), x: x.clone(), y: y.clone(), value: v.clone() });
        }
        self.tt.entry(key).or_default().push((s, v));
        Ok(())
    }

    fn rec(&mut self, p: &G::Pos, x: G::Value, y: G::Value) -> Result<(G::Value, S::Set), GameError> {
        let key = (self.sys.bucket(p), self.alg.key(&x), self.alg.key(&y));
        if let Some(list) = self.tt.get(&key) {
            if let Some((s, v)) = list.iter().find(|(s, _)| self.sys.contains(s, p)) {
                self.stats.tt_hits += 1;
                return Ok((v.clone(), s.clone()));
            }
        }
        self.stats.nodes += 1;
        let alg = self.alg;
        let succ = self.game.successors(p);
        let ev = self.game.eval(p);
        let (v_ans, s_ans) = match ev {
            Eval::Value(v) => {
                if !succ.is_empty() {
                    return Err(GameError::ValuedInterior(format!("{p:?}")));
                }
                let s = self.sys.generalize(p);
                if !self.sys.contains(&s, p) {
                    return Err(GameError::PartitionContract(format!("P(p) excludes {p:?}")));
                }
                (v, s)
            }
            Eval::Max | Eval::Min if succ.is_empty() => return Err(GameError::NoMoves(format!("{p:?}"))),
            Eval::Max => {
                let mut v_ans = alg.bottom();
                let mut best: Option<usize> = None;
                let mut kids: Vec<(G::Pos, S::Set)> = Vec::with_capacity(succ.len());
                for c in succ {
                    let (v_new, s_new) = self.rec(&c, alg.join(&v_ans, &x), y.clone())?;
                    if alg.leq(&y, &v_new) {
                        let s = self.sys.back_up(p, &c, &s_new);
                        self.store(key, p, (&x, &y), s.clone(), v_new.clone())?;
                        return Ok((v_new, s));
                    }
                    if !alg.leq(&v_new, &v_ans) {
                        v_ans = v_new;
                        best = Some(kids.len());
                    }
                    kids.push((c, s_new));
                }
                let all = self.sys.constrain(p, &kids);
                let s = match best {
                    Some(i) if !alg.leq(&v_ans, &x) => {
                        let r = self.sys.back_up(p, &kids[i].0, &kids[i].1);
                        self.sys.intersect(p, &r, &all)
                    }
                    _ => all,
                };
                (v_ans, s)
            }
            Eval::Min => {
                let mut v_ans = alg.top();
                let mut best: Option<usize> = None;
                let mut kids: Vec<(G::Pos, S::Set)> = Vec::with_capacity(succ.len());
                for c in succ {
                    let (v_new, s_new) = self.rec(&c, x.clone(), alg.meet(&v_ans, &y))?;
                    if alg.leq(&v_new, &x) {
                        let s = self.sys.back_up(p, &c, &s_new);
                        self.store(key, p, (&x, &y), s.clone(), v_new.clone())?;
                        return Ok((v_new, s));
                    }
                    if !alg.leq(&v_ans, &v_new) {
                        v_ans = v_new;
                        best = Some(kids.len());
                    }
                    kids.push((c, s_new));
                }
                let all = self.sys.constrain(p, &kids);
                let s = match best {
                    Some(i) if !alg.leq(&y, &v_ans) => {
                        let r = self.sys.back_up(p, &kids[i].0, &kids[i].1);
                        self.sys.intersect(p, &r, &all)
                    }
                    _ => all,
                };
                (v_ans, s)
            }
        };
        self.store(key, p, (&x, &y), s_ans.clone(), v_ans.clone())?;
        Ok((v_ans, s_ans))
    }
}

/// Location of a card in play: a hand (0..4) or a slot of the current trick (4..7).
fn card_loc(st: &PlayState, c: Card) -> Option<u64> {
    for (h, hand) in st.hands.iter().enumerate() {
        if hand.contains(c) {
            return Some(h as u64);
        }
    }
    st.trick.iter().position(|t| *t == Some(c)).map(|j| 4 + j as u64)
}

/// Packed locations of the in-play cards of a suit, highest first in the low
/// bits, three bits per card. Also returns the ranks in the same order.
fn suit_sequence(st: &PlayState, in_play: CardSet, s: Suit) -> (u64, Vec<u8>) {
    let bits = in_play.suit_bits(s);
    let mut seq = 0u64;
    let mut ranks = Vec::with_capacity(bits.count_ones() as usize);
    for rank in (2..=14u8).rev() {
        if bits >> (rank - 2) & 1 == 1 {
            let loc = card_loc(st, Card { suit: s, rank }).expect("in-play card has a location");
            seq |= loc << (3 * ranks.len());
            ranks.push(rank);
        }
    }
    (seq, ranks)
}

fn sequences(st: &PlayState) -> [u64; 4] {
    let all = st.cards_in_play();
    Suit::ALL.map(|s| suit_sequence(st, all, s).0)
}

fn low_mask(k: u8) -> u64 {
    if k == 0 {
        0
    } else {
        (1u64 << (3 * k as u64)) - 1
    }
}

/// Everything about a bridge position except the ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BridgeBucket {
    leader: u8,
    trick_len: u8,
    trick_suits: u8,
    won: [u8; 2],
    /// Per hand, per suit lengths as 4-bit fields.
    lengths: u64,
}

pub fn bridge_bucket(st: &PlayState) -> BridgeBucket {
    let mut trick_suits = 0u8;
    for (i, c) in st.trick.iter().enumerate() {
        if let Some(c) = c {
            trick_suits |= (c.suit.index() as u8) << (2 * i);
        }
    }
    let mut lengths = 0u64;
    for (h, hand) in st.hands.iter().enumerate() {
        for s in Suit::ALL {
            lengths |= (hand.suit_len(s) as u64) << (4 * (h * 4 + s.index()));
        }
    }
    BridgeBucket {
        leader: st.leader.index() as u8,
        trick_len: st.trick_len() as u8,
        trick_suits,
        won: st.tricks_won,
        lengths,
    }
}

/// A set of bridge positions: same bucket, and in each suit the `k` highest
/// cards in play sit in the same places. Lower cards are x's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BridgePattern {
    pub bucket: BridgeBucket,
    pub k: [u8; 4],
    pub tops: [u64; 4],
}

impl BridgePattern {
    pub fn contains(&self, st: &PlayState) -> bool {
        bridge_bucket(st) == self.bucket && self.matches_sequences(&sequences(st))
    }

    fn matches_sequences(&self, seqs: &[u64; 4]) -> bool {
        (0..4).all(|s| seqs[s] & low_mask(self.k[s]) == self.tops[s])
    }

    /// Number of cards in the suit that are not x's.
    pub fn fixed(&self, s: Suit) -> usize {
        self.k[s.index()] as usize
    }

    pub fn is_singleton_for(&self, st: &PlayState) -> bool {
        let all = st.cards_in_play();
        Suit::ALL.iter().all(|&s| self.k[s.index()] as usize >= all.suit_len(s).saturating_sub(1))
    }

    /// Render against a member: per seat, fixed ranks then an `x` per wildcard.
    pub fn display<'a>(&'a self, st: &'a PlayState) -> PatternDisplay<'a> {
        PatternDisplay { pat: self, st }
    }
}

pub struct PatternDisplay<'a> {
    pat: &'a BridgePattern,
    st: &'a PlayState,
}

impl fmt::Display for PatternDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let all = self.st.cards_in_play();
        let mut hands = Vec::new();
        for seat in Seat::ALL {
            let hand = self.st.hand(seat);
            let mut suits = Vec::new();
            for s in Suit::ALL {
                let (_, ranks) = suit_sequence(self.st, all, s);
                let k = self.pat.k[s.index()] as usize;
                let mut txt = String::new();
                for (i, &r) in ranks.iter().enumerate() {
                    if hand.contains(Card { suit: s, rank: r }) {
                        txt.push(if i < k { crate::model::rank_char(r) } else { 'x' });
                    }
                }
                suits.push(if txt.is_empty() { "-".to_string() } else { txt });
            }
            hands.push(format!("{}:{}", seat.letter(), suits.join(".")));
        }
        write!(f, "{}", hands.join(" "))
    }
}

fn pattern_from(st: &PlayState, r: [u8; 4]) -> BridgePattern {
    let all = st.cards_in_play();
    let mut k = [0u8; 4];
    let mut tops = [0u64; 4];
    for s in Suit::ALL {
        let (seq, ranks) = suit_sequence(st, all, s);
        let n = ranks.iter().filter(|&&rk| rk >= r[s.index()]).count() as u8;
        k[s.index()] = n;
        tops[s.index()] = seq & low_mask(n);
    }
    BridgePattern { bucket: bridge_bucket(st), k, tops }
}

/// Rank thresholds of a pattern relative to a member: the rank of the lowest
/// fixed card per suit, or 15 when nothing is fixed.
fn thresholds(st: &PlayState, pat: &BridgePattern) -> [u8; 4] {
    let all = st.cards_in_play();
    Suit::ALL.map(|s| {
        let k = pat.k[s.index()] as usize;
        if k == 0 {
            15
        } else {
            let bits = all.suit_bits(s);
            (2..=14u8).rev().filter(|r| bits >> (r - 2) & 1 == 1).nth(k - 1).unwrap_or(2)
        }
    })
}

/// Rank threshold forced by a completed trick: the winner's rank in its suit
/// when it beat another card of that suit.
fn trick_threshold(cards: &[Card], trump: Option<Suit>, r: &mut [u8; 4]) {
    let w = cards[winning_index(cards, trump)];
    if cards.iter().any(|c| *c != w && c.suit == w.suit) {
        let i = w.suit.index();
        r[i] = r[i].min(w.rank);
    }
}

fn terminal_thresholds(st: &PlayState) -> [u8; 4] {
    let mut r = [15u8; 4];
    if st.trick_len() == 0 && st.hands.iter().all(|h| h.len() == 1) {
        let cards: Vec<Card> = (0..4).map(|k| st.hand(st.leader.offset(k)).iter().next().unwrap()).collect();
        trick_threshold(&cards, st.trump, &mut r);
    }
    r
}

/// P for bridge: every rank that did not decide the last trick becomes an x.
pub fn generalize_terminal_bridge(st: &PlayState) -> BridgePattern {
    pattern_from(st, terminal_thresholds(st))
}

fn backup_thresholds(st: &PlayState, child: &PlayState, child_set: &BridgePattern) -> [u8; 4] {
    let mut r = thresholds(child, child_set);
    if st.trick_len() == 3 {
        let played = st.hand(st.to_act()).difference(child.hand(st.to_act()));
        let m = played.iter().next().expect("child follows from one card");
        let cards = [st.trick[0].unwrap(), st.trick[1].unwrap(), st.trick[2].unwrap(), m];
        trick_threshold(&cards, st.trump, &mut r);
    }
    r
}

/// R for bridge: re-insert the played card and keep the child's x's, fixing
/// the trick winner when it won by rank.
pub fn back_up_pattern(child_set: &BridgePattern, mv: Card, st: &PlayState) -> Result<BridgePattern, ModelError> {
    let child = st.play(mv)?;
    Ok(pattern_from(st, backup_thresholds(st, &child, child_set)))
}

/// The bridge partition system.
#[derive(Debug, Clone, Copy, Default)]
pub struct BridgePartition;

impl<F: Float + Debug> PartitionSystem<DdGame<F>> for BridgePartition {
    type Set = BridgePattern;
    type Bucket = BridgeBucket;

    fn bucket(&self, p: &PlayState) -> BridgeBucket {
        bridge_bucket(p)
    }
    fn contains(&self, s: &BridgePattern, p: &PlayState) -> bool {
        s.contains(p)
    }
    fn generalize(&self, p: &PlayState) -> BridgePattern {
        generalize_terminal_bridge(p)
    }
    fn back_up(&self, p: &PlayState, child: &PlayState, s: &BridgePattern) -> BridgePattern {
        pattern_from(p, backup_thresholds(p, child, s))
    }
    fn constrain(&self, p: &PlayState, children: &[(PlayState, BridgePattern)]) -> BridgePattern {
        let mut r = [15u8; 4];
        for (c, s) in children {
            let rc = backup_thresholds(p, c, s);
            for i in 0..4 {
                r[i] = r[i].min(rc[i]);
            }
        }
        pattern_from(p, r)
    }
    fn intersect(&self, p: &PlayState, a: &BridgePattern, b: &BridgePattern) -> BridgePattern {
        let (ra, rb) = (thresholds(p, a), thresholds(p, b));
        pattern_from(p, std::array::from_fn(|i| ra[i].min(rb[i])))
    }
}

/// Concrete positions in a pattern, built by reassigning the ranks of each
/// suit's x cards among the ranks below its fixed cards. At most `limit`.
pub fn sample_members(st: &PlayState, pat: &BridgePattern, limit: usize, seed: u64) -> Vec<PlayState> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let all = st.cards_in_play();
    let mut out = vec![*st];
    for _ in 0..limit * 4 {
        if out.len() >= limit {
            break;
        }
        let mut q = *st;
        for s in Suit::ALL {
            let (_, ranks) = suit_sequence(st, all, s);
            let k = pat.k[s.index()] as usize;
            if ranks.len() <= k {
                continue;
            }
            // Positions of the x cards, and a shuffled assignment of their ranks.
            let xs: Vec<Card> = ranks[k..].iter().map(|&r| Card { suit: s, rank: r }).collect();
            let locs: Vec<u64> = xs.iter().map(|&c| card_loc(st, c).unwrap()).collect();
            let mut perm = xs.clone();
            perm.shuffle(&mut rng);
            for c in &xs {
                remove_card(&mut q, *c);
            }
            for (loc, c) in locs.iter().zip(perm) {
                place_card(&mut q, *loc, c);
            }
        }
        if pat.contains(&q) && !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

fn remove_card(q: &mut PlayState, c: Card) {
    for h in q.hands.iter_mut() {
        h.remove(c);
    }
}

fn place_card(q: &mut PlayState, loc: u64, c: Card) {
    if loc < 4 {
        q.hands[loc as usize].insert(c);
    } else {
        q.trick[(loc - 4) as usize] = Some(c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::DdGame;
    use crate::game::{minimax_memo, AlphaBeta, ScalarAlgebra};
    use crate::model::{parse_deal, Side};

    fn state(deal: &str, trump: Option<Suit>, leader: Seat) -> PlayState {
        PlayState::new(&parse_deal(deal).unwrap(), trump, leader)
    }

    #[test]
    fn lone_trump_last_trick_is_all_x() {
        let st = state("N:2.-.-.- -.3.-.- -.-.4.- -.-.-.5", Some(Suit::Clubs), Seat::North);
        let pat = generalize_terminal_bridge(&st);
        assert_eq!(pat.k, [0; 4]);
        // Every rank relabeling keeps the same winner.
        for r in 2..=14u8 {
            let mut q = st;
            q.hands[3] = CardSet::from_cards([Card { suit: Suit::Clubs, rank: r }]);
            assert!(pat.contains(&q));
            let g = DdGame::<f64>::new(q, Side::EW);
            assert_eq!(g.final_value(&q), Some(1));
        }
    }

    #[test]
    fn contested_last_trick_fixes_winner() {
        let st = state("N:A.-.-.- 2.-.-.- 3.-.-.- 4.-.-.-", None, Seat::North);
        let pat = generalize_terminal_bridge(&st);
        assert_eq!(pat.k, [1, 0, 0, 0]);
        assert_eq!(pat.display(&st).to_string(), "N:A.-.-.- E:x.-.-.- S:x.-.-.- W:x.-.-.-");
    }

    #[test]
    fn fully_played_is_singleton() {
        let st = state("", None, Seat::North);
        let pat = generalize_terminal_bridge(&st);
        assert!(pat.contains(&st));
        assert!(pat.is_singleton_for(&st));
    }

    #[test]
    fn undecisive_club_backs_up_as_x() {
        // North discards a small club on a spade trick it cannot win.
        let st = state("N:-.-.-.432 AK.-.-.5 QJ.-.-.6 T9.-.-.7", None, Seat::East);
        let st = st.play(Card { suit: Suit::Spades, rank: 14 }).unwrap();
        let st = st.play(Card { suit: Suit::Spades, rank: 12 }).unwrap();
        let st = st.play(Card { suit: Suit::Spades, rank: 10 }).unwrap();
        let child_after = st.play(Card { suit: Suit::Clubs, rank: 2 }).unwrap();
        let child_set = pattern_from(&child_after, [15, 15, 15, 15]);
        let back = back_up_pattern(&child_set, Card { suit: Suit::Clubs, rank: 2 }, &st).unwrap();
        assert_eq!(back.fixed(Suit::Clubs), 0);
        assert_eq!(back.fixed(Suit::Spades), 1);
        assert_eq!(back.display(&st).to_string(), "N:-.-.-.xxx E:x.-.-.x S:x.-.-.x W:x.-.-.x");
    }

    #[test]
    fn backup_rejects_illegal_move() {
        let st = state("N:A.-.-.- 2.-.-.- 3.-.-.- 4.-.-.-", None, Seat::North);
        let pat = generalize_terminal_bridge(&st);
        assert!(back_up_pattern(&pat, Card { suit: Suit::Hearts, rank: 14 }, &st).is_err());
    }

    #[test]
    fn table_entries_hold_for_sampled_members() {
        let st = state("N:AK3.Q.-.- QJ4.-.K.- T.A.Q.3 -.KJ.A.2", Some(Suit::Hearts), Seat::West);
        let g = DdGame::<f64>::new(st, Side::NS);
        let alg = ScalarAlgebra::new(0.0, 13.0);
        let sys = BridgePartition;
        let mut ps = PartitionSearch::new(&g, &alg, &sys).with_log();
        let (v, _) = ps.search(&st, &0.0, &13.0).unwrap();
        assert_eq!(v, minimax_memo(&g, &alg, &st).unwrap());
        let log = ps.log.take().unwrap();
        assert!(!log.is_empty());
        let mut generalized = 0;
        for (i, e) in log.iter().enumerate() {
            for q in sample_members(&e.pos, &e.set, 20, i as u64) {
                let t = minimax_memo(&g, &alg, &q).unwrap();
                if e.value <= e.x {
                    assert!(t <= e.value);
                } else if e.value >= e.y {
                    assert!(t >= e.value);
                } else {
                    assert_eq!(t, e.value);
                }
                generalized += (q != e.pos) as usize;
            }
        }
        assert!(generalized > 0);
    }

    #[test]
    fn partition_matches_alphabeta_small() {
        let st = state("N:AQ.K.-.- K2.A.-.- J3.Q.-.- T4.J.-.-", None, Seat::South);
        let g = DdGame::<f64>::new(st, Side::NS);
        let alg = ScalarAlgebra::new(0.0, 13.0);
        let plain = AlphaBeta::new(&g, &alg).search(&st, &0.0, &13.0).unwrap();
        let sys = BridgePartition;
        let (v, s) = PartitionSearch::new(&g, &alg, &sys).search(&st, &0.0, &13.0).unwrap();
        assert_eq!(v, plain);
        assert!(s.contains(&st));
    }
}
