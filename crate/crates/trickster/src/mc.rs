//! Monte Carlo play and bidding over weighted samples of deals.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dd::{solve_dd, solve_state, DdError, Mode};
use crate::model::{parse_deal, serialize_deal, Card, CardSet, Deal, ParseError, PlayState, Seat, Side, Suit};
use crate::sd::SdError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("infeasible constraint: {0}")]
    Infeasible(String),
    #[error("gave up after {attempts} rejected deals; most rejections from `{reason}`")]
    RejectionLimit { reason: String, attempts: u64 },
    #[error("empty sample")]
    EmptySample,
    #[error("no candidate moves")]
    NoMoves,
    #[error("every sample weight is zero")]
    ZeroPosterior,
    #[error("weight {weight} at position {index} is not a positive finite number")]
    BadWeight { index: usize, weight: f64 },
    #[error("{deals} deals but {weights} weights")]
    LengthMismatch { deals: usize, weights: usize },
    #[error("auction exceeded {0} calls")]
    AuctionTooLong(usize),
    #[error("illegal call {bid} after {auction}")]
    IllegalBid { bid: Bid, auction: String },
    #[error("sampled deal {0} does not give the bidder the stated hand")]
    HandMismatch(usize),
    #[error("line {line}: {msg}")]
    BadLine { line: usize, msg: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error(transparent)]
    Sd(#[from] SdError),
}

/// High-card points: A=4, K=3, Q=2, J=1.
pub fn hcp(hand: CardSet) -> u32 {
    hand.iter().map(|c| c.rank.saturating_sub(10) as u32).sum()
}

pub type HandPredicate = Arc<dyn Fn(CardSet) -> bool + Send + Sync>;

/// A named predicate on one seat's hand, applied by rejection.
#[derive(Clone)]
pub struct SeatHook {
    pub name: String,
    pub seat: Seat,
    pub pred: HandPredicate,
}

impl fmt::Debug for SeatHook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeatHook({} @ {})", self.name, self.seat)
    }
}

/// What is known about the unseen cards.
#[derive(Debug, Clone)]
pub struct DealConstraint {
    /// Cards being dealt, including the known ones.
    pub deck: CardSet,
    /// Suit length bounds per seat, indexed `[seat][suit]`.
    pub lengths: [[(u8, u8); 4]; 4],
    /// Cards known to be in each hand.
    pub known: [CardSet; 4],
    pub hooks: Vec<SeatHook>,
}

/// Draws allowed per requested deal before giving up.
pub const MAX_ATTEMPTS_PER_DEAL: u64 = 200_000;

impl DealConstraint {
    pub fn new(deck: CardSet) -> Self {
        DealConstraint { deck, lengths: [[(0, 13); 4]; 4], known: [CardSet::EMPTY; 4], hooks: Vec::new() }
    }

    pub fn full_deck() -> Self {
        Self::new(CardSet::full_ranks(crate::model::RankSet::FULL))
    }

    pub fn length(mut self, seat: Seat, suit: Suit, lo: u8, hi: u8) -> Self {
        self.lengths[seat.index()][suit.index()] = (lo, hi);
        self
    }

    pub fn place(mut self, seat: Seat, cards: CardSet) -> Self {
        self.known[seat.index()] = self.known[seat.index()].union(cards);
        self
    }

    pub fn hook(mut self, name: &str, seat: Seat, pred: impl Fn(CardSet) -> bool + Send + Sync + 'static) -> Self {
        self.hooks.push(SeatHook { name: name.into(), seat, pred: Arc::new(pred) });
        self
    }

    pub fn hcp_range(self, seat: Seat, lo: u32, hi: u32) -> Self {
        self.hook(&format!("hcp {seat} {lo}-{hi}"), seat, move |h| (lo..=hi).contains(&hcp(h)))
    }

    pub fn hand_size(&self) -> usize {
        self.deck.len() / 4
    }

    /// Cheap necessary conditions; hooks are only checked while sampling.
    pub fn check_feasible(&self) -> Result<(), McError> {
        let bad = |m: String| Err(McError::Infeasible(m));
        if !self.deck.len().is_multiple_of(4) {
            return bad(format!("{} cards do not split four ways", self.deck.len()));
        }
        let size = self.hand_size();
        let mut seen = CardSet::EMPTY;
        for seat in Seat::ALL {
            let k = self.known[seat.index()];
            if !k.intersection(seen).is_empty() {
                return bad(format!("cards placed twice, including {seat}'s"));
            }
            if !k.difference(self.deck).is_empty() {
                return bad(format!("{seat} holds cards outside the deck"));
            }
            seen = seen.union(k);
            if k.len() > size {
                return bad(format!("{seat} has {} known cards in a {size}-card hand", k.len()));
            }
            let l = self.lengths[seat.index()];
            let lo: usize = l.iter().map(|x| x.0 as usize).sum();
            let hi: usize = l.iter().map(|x| x.1 as usize).sum();
            if lo > size || hi < size {
                return bad(format!("{seat}'s suit lengths cannot total {size}"));
            }
            for s in Suit::ALL {
                let (a, b) = l[s.index()];
                let placed = k.suit_len(s);
                if a > b || placed > b as usize || (a as usize) > self.deck.suit_len(s) {
                    return bad(format!("{seat}'s {s} length bounds {a}-{b} are unreachable"));
                }
            }
        }
        for s in Suit::ALL {
            let lo: usize = Seat::ALL.iter().map(|p| self.lengths[p.index()][s.index()].0 as usize).sum();
            let hi: usize = Seat::ALL.iter().map(|p| self.lengths[p.index()][s.index()].1 as usize).sum();
            let n = self.deck.suit_len(s);
            if lo > n || hi < n {
                return bad(format!("{s} length bounds cannot total {n}"));
            }
        }
        Ok(())
    }

    /// `None` when `d` satisfies every constraint, else the failing check.
    pub fn rejects(&self, d: &Deal) -> Option<String> {
        for seat in Seat::ALL {
            let h = d.hand(seat);
            if h.intersection(self.known[seat.index()]) != self.known[seat.index()] {
                return Some(format!("placements {seat}"));
            }
            for s in Suit::ALL {
                let (lo, hi) = self.lengths[seat.index()][s.index()];
                let n = h.suit_len(s);
                if n < lo as usize || n > hi as usize {
                    return Some(format!("length {seat} {s}"));
                }
            }
        }
        self.hooks.iter().find(|k| !(k.pred)(d.hand(k.seat))).map(|k| k.name.clone())
    }
}

/// `n` deals satisfying `c`, uniform over the constrained space. The same
/// seed gives the same deals.
pub fn sample_deals(c: &DealConstraint, n: usize, seed: u64) -> Result<Vec<Deal>, McError> {
    c.check_feasible()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = c.hand_size();
    let known_all = c.known.iter().fold(CardSet::EMPTY, |a, k| a.union(*k));
    let mut free: Vec<Card> = c.deck.difference(known_all).iter().collect();
    let mut out = Vec::with_capacity(n);
    let mut reasons: HashMap<String, u64> = HashMap::new();
    while out.len() < n {
        let mut attempts = 0u64;
        loop {
            attempts += 1;
            if attempts > MAX_ATTEMPTS_PER_DEAL {
                let reason = reasons
                    .into_iter()
                    .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                    .map(|r| r.0)
                    .unwrap_or_default();
                return Err(McError::RejectionLimit { reason, attempts: MAX_ATTEMPTS_PER_DEAL });
            }
            free.shuffle(&mut rng);
            let mut hands = c.known;
            let mut it = free.iter();
            for h in hands.iter_mut() {
                while h.len() < size {
                    h.insert(*it.next().expect("card counts checked"));
                }
            }
            let d = Deal { hands };
            match c.rejects(&d) {
                None => {
                    out.push(d);
                    break;
                }
                Some(r) => *reasons.entry(r).or_default() += 1,
            }
        }
    }
    Ok(out)
}

/// Read constraint lines `seat suit lo hi` or `seat hcp lo hi`, adding them
/// to `base`. `#` starts a comment.
pub fn parse_constraints(text: &str, mut base: DealConstraint) -> Result<DealConstraint, McError> {
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| McError::BadLine { line: i + 1, msg: msg.into() };
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 4 {
            return Err(bad("expected `seat suit|hcp lo hi`"));
        }
        let seat: Seat = t[0].parse()?;
        let lo: u32 = t[2].parse().map_err(|_| bad("bad lower bound"))?;
        let hi: u32 = t[3].parse().map_err(|_| bad("bad upper bound"))?;
        if t[1].eq_ignore_ascii_case("hcp") {
            base = base.hcp_range(seat, lo, hi);
        } else {
            let suit: Suit = t[1].parse()?;
            if hi > 13 || lo > hi {
                return Err(bad("length bounds out of order or above 13"));
            }
            base = base.length(seat, suit, lo as u8, hi as u8);
        }
    }
    Ok(base)
}

/// Items with positive weights, in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample<D = Deal> {
    pub deals: Vec<D>,
    pub weights: Vec<f64>,
}

impl<D> WeightedSample<D> {
    pub fn new(deals: Vec<D>, weights: Vec<f64>) -> Result<Self, McError> {
        if deals.len() != weights.len() {
            return Err(McError::LengthMismatch { deals: deals.len(), weights: weights.len() });
        }
        if let Some((index, &weight)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(McError::BadWeight { index, weight });
        }
        Ok(WeightedSample { deals, weights })
    }

    pub fn uniform(deals: Vec<D>) -> Self {
        let weights = vec![1.0; deals.len()];
        WeightedSample { deals, weights }
    }

    pub fn len(&self) -> usize {
        self.deals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deals.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

impl<D: Clone> WeightedSample<D> {
    /// Multiply each weight by `likelihood(deal)`. Zero likelihoods are kept
    /// as zero weights so the order and count do not change.
    pub fn reweigh(&self, likelihood: impl Fn(&D) -> f64) -> Result<Self, McError> {
        let mut weights = Vec::with_capacity(self.len());
        for (index, (d, w)) in self.deals.iter().zip(&self.weights).enumerate() {
            let l = likelihood(d);
            if !(l.is_finite() && l >= 0.0) {
                return Err(McError::BadWeight { index, weight: l });
            }
            weights.push(w * l);
        }
        if weights.iter().all(|w| *w == 0.0) {
            return Err(McError::ZeroPosterior);
        }
        Ok(WeightedSample { deals: self.deals.clone(), weights })
    }
}

impl WeightedSample<Deal> {
    /// One `deal weight` pair per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (d, w) in self.deals.iter().zip(&self.weights) {
            s.push_str(&format!("{} {}\n", serialize_deal(d), w));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, McError> {
        let (mut deals, mut weights) = (Vec::new(), Vec::new());
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| McError::BadLine { line: i + 1, msg: msg.into() };
            let (d, w) = line.rsplit_once(' ').ok_or_else(|| bad("expected `deal weight`"))?;
            deals.push(parse_deal(d)?);
            weights.push(w.parse::<f64>().map_err(|_| bad("bad weight"))?);
        }
        Self::new(deals, weights)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveChoice<M> {
    pub best: usize,
    pub mv: M,
    /// Weighted score per candidate, in candidate order.
    pub scores: Vec<f64>,
}

fn argmax_first(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// The move maximizing the weighted score over the sample; ties go to the
/// earliest move. Deals are scored in parallel and summed in sample order.
pub fn select_move<M, D, E>(
    sample: &WeightedSample<D>,
    moves: &[M],
    scorer: impl Fn(&M, &D) -> Result<f64, E> + Sync,
) -> Result<MoveChoice<M>, McError>
where
    M: Clone + Sync,
    D: Sync,
    E: Send,
    McError: From<E>,
{
    if sample.is_empty() {
        return Err(McError::EmptySample);
    }
    if moves.is_empty() {
        return Err(McError::NoMoves);
    }
    let per_deal: Vec<Vec<f64>> = sample
        .deals
        .par_iter()
        .map(|d| moves.iter().map(|m| scorer(m, d)).collect::<Result<Vec<f64>, E>>())
        .collect::<Result<_, E>>()?;
    let mut scores = vec![0.0; moves.len()];
    for (row, w) in per_deal.iter().zip(&sample.weights) {
        for (s, v) in scores.iter_mut().zip(row) {
            *s += w * v;
        }
    }
    let best = argmax_first(&scores);
    Ok(MoveChoice { best, mv: moves[best].clone(), scores })
}

/// Double-dummy tricks for the side on play after `card`, with the unseen
/// hands taken from `deal`.
pub fn dd_card_score(state: &PlayState, card: &Card, deal: &Deal) -> Result<f64, McError> {
    let side = state.to_act().side();
    let mut st = *state;
    st.hands = deal.hands;
    let next = st.play(*card).map_err(DdError::from)?;
    Ok(solve_state(&next, side, Mode::Partition)?.tricks as f64)
}

/// An auction call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bid {
    Pass,
    Double,
    Redouble,
    Call { level: u8, strain: Option<Suit> },
}

impl Bid {
    fn rank(self) -> Option<u8> {
        match self {
            Bid::Call { level, strain } => {
                let s = match strain {
                    Some(Suit::Clubs) => 0,
                    Some(Suit::Diamonds) => 1,
                    Some(Suit::Hearts) => 2,
                    Some(Suit::Spades) => 3,
                    None => 4,
                };
                Some((level - 1) * 5 + s)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Bid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bid::Pass => write!(f, "P"),
            Bid::Double => write!(f, "X"),
            Bid::Redouble => write!(f, "XX"),
            Bid::Call { level, strain: Some(s) } => write!(f, "{level}{}", s.letter()),
            Bid::Call { level, strain: None } => write!(f, "{level}N"),
        }
    }
}

impl FromStr for Bid {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let up = s.trim().to_ascii_uppercase();
        match up.as_str() {
            "P" | "PASS" => return Ok(Bid::Pass),
            "X" => return Ok(Bid::Double),
            "XX" => return Ok(Bid::Redouble),
            _ => {}
        }
        let bad = || ParseError::Malformed(format!("bad call `{s}`"));
        let mut chars = up.chars();
        let level = chars.next().and_then(|c| c.to_digit(10)).filter(|l| (1..=7).contains(l)).ok_or_else(bad)? as u8;
        let rest: String = chars.collect();
        let strain = match rest.as_str() {
            "N" | "NT" => None,
            r if r.chars().count() == 1 => Some(r.parse::<Suit>().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        Ok(Bid::Call { level, strain })
    }
}

pub fn parse_auction(text: &str) -> Result<Vec<Bid>, ParseError> {
    let t = text.trim();
    if t.is_empty() || t == "-" {
        return Ok(Vec::new());
    }
    t.split(|c: char| c.is_whitespace() || c == '-' || c == ',').filter(|x| !x.is_empty()).map(str::parse).collect()
}

pub fn auction_string(auction: &[Bid]) -> String {
    if auction.is_empty() {
        return "-".into();
    }
    auction.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn auction_over(auction: &[Bid]) -> bool {
    let n = auction.len();
    let called = auction.iter().any(|b| *b != Bid::Pass);
    if called {
        n >= 4 && auction[n - 3..].iter().all(|b| *b == Bid::Pass)
    } else {
        n >= 4
    }
}

/// Is `bid` a legal next call? Positions count from the dealer.
pub fn is_legal(auction: &[Bid], bid: Bid) -> bool {
    if auction_over(auction) {
        return false;
    }
    let last_call = auction.iter().rposition(|b| b.rank().is_some());
    let last_non_pass = auction.iter().rposition(|b| *b != Bid::Pass);
    let me = auction.len() % 2;
    match bid {
        Bid::Pass => true,
        Bid::Call { level, .. } if !(1..=7).contains(&level) => false,
        Bid::Call { .. } => last_call.is_none_or(|i| bid.rank() > auction[i].rank()),
        Bid::Double => matches!(last_non_pass, Some(i) if auction[i].rank().is_some() && i % 2 != me),
        Bid::Redouble => matches!(last_non_pass, Some(i) if auction[i] == Bid::Double && i % 2 != me),
    }
}

/// The final contract of a finished auction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub declarer: Seat,
    pub level: u8,
    pub strain: Option<Suit>,
    /// 0, 1 or 2 for undoubled, doubled, redoubled.
    pub doubled: u8,
}

/// `None` for a passed-out auction.
pub fn final_contract(auction: &[Bid], dealer: Seat) -> Option<Outcome> {
    let i = auction.iter().rposition(|b| b.rank().is_some())?;
    let Bid::Call { level, strain } = auction[i] else { unreachable!() };
    let side = dealer.offset(i).side();
    let first = (0..=i)
        .find(|&j| dealer.offset(j).side() == side && matches!(auction[j], Bid::Call { strain: s, .. } if s == strain))
        .expect("the final call itself qualifies");
    let doubled = match auction[i + 1..].iter().rfind(|b| **b != Bid::Pass) {
        Some(Bid::Double) => 1,
        Some(Bid::Redouble) => 2,
        _ => 0,
    };
    Some(Outcome { declarer: dealer.offset(first), level, strain, doubled })
}

/// Suggests calls. Implementations should be total; the engine treats an
/// illegal suggestion as a pass.
pub trait BidDatabase: Sync {
    fn suggest(&self, auction: &[Bid], hand: CardSet) -> Bid;
}

/// A database that always passes.
#[derive(Debug, Clone, Copy, Default)]
pub struct PassDb;

impl BidDatabase for PassDb {
    fn suggest(&self, _: &[Bid], _: CardSet) -> Bid {
        Bid::Pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BidRule {
    pub auction: Vec<Bid>,
    pub hcp: (u32, u32),
    pub bid: Bid,
}

/// First matching rule of `auction ; lo-hi ; bid` lines, else pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ToyDb {
    pub rules: Vec<BidRule>,
}

impl ToyDb {
    pub fn parse(text: &str) -> Result<Self, McError> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| McError::BadLine { line: i + 1, msg: msg.into() };
            let parts: Vec<&str> = line.split(';').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad("expected `auction ; lo-hi ; bid`"));
            }
            let (lo, hi) = parts[1].split_once('-').ok_or_else(|| bad("hcp range must be lo-hi"))?;
            let lo = lo.trim().parse().map_err(|_| bad("bad hcp"))?;
            let hi = hi.trim().parse().map_err(|_| bad("bad hcp"))?;
            rules.push(BidRule { auction: parse_auction(parts[0])?, hcp: (lo, hi), bid: parts[2].parse()? });
        }
        Ok(ToyDb { rules })
    }
}

impl BidDatabase for ToyDb {
    fn suggest(&self, auction: &[Bid], hand: CardSet) -> Bid {
        let p = hcp(hand);
        self.rules
            .iter()
            .find(|r| r.auction == auction && (r.hcp.0..=r.hcp.1).contains(&p))
            .map_or(Bid::Pass, |r| r.bid)
    }
}

/// Roll `auction` forward with `db` for every seat until it ends.
pub fn project_auction(
    auction: &[Bid],
    dealer: Seat,
    deal: &Deal,
    db: &dyn BidDatabase,
    max_len: usize,
) -> Result<Vec<Bid>, McError> {
    let mut a = auction.to_vec();
    while !auction_over(&a) {
        if a.len() >= max_len {
            return Err(McError::AuctionTooLong(max_len));
        }
        let seat = dealer.offset(a.len());
        let b = db.suggest(&a, deal.hand(seat));
        a.push(if is_legal(&a, b) { b } else { Bid::Pass });
    }
    Ok(a)
}

/// Duplicate score for the declaring side, not vulnerable. `book` is the
/// number of tricks a one-level contract exceeds; six in a full deal.
pub fn contract_score(o: &Outcome, tricks: u8, book: u8) -> i32 {
    let need = o.level + book;
    let mult = 1i32 << o.doubled;
    if tricks < need {
        let down = (need - tricks) as i32;
        return match o.doubled {
            0 => -50 * down,
            _ => {
                -(mult / 2)
                    * (1..=down)
                        .map(|k| {
                            if k == 1 {
                                100
                            } else if k <= 3 {
                                200
                            } else {
                                300
                            }
                        })
                        .sum::<i32>()
            }
        };
    }
    let per = |n: u8| match o.strain {
        Some(Suit::Clubs | Suit::Diamonds) => 20 * n as i32,
        Some(_) => 30 * n as i32,
        None => 30 * n as i32 + if n > 0 { 10 } else { 0 },
    };
    let below = per(o.level) * mult;
    let over = (tricks - need) as i32;
    let over_pts = if o.doubled == 0 {
        per(over as u8) - if o.strain.is_none() && over > 0 { 10 } else { 0 }
    } else {
        50 * mult * over
    };
    let game = if below >= 100 { 300 } else { 50 };
    let slam = match o.level {
        6 => 500,
        7 => 1000,
        _ => 0,
    };
    let insult = 50 * o.doubled as i32;
    below + over_pts + game + slam + insult
}

/// Double-dummy score of `auction` for `side`: zero when passed out.
pub fn dd_auction_score(auction: &[Bid], dealer: Seat, deal: &Deal, side: Side) -> Result<f64, McError> {
    let Some(o) = final_contract(auction, dealer) else {
        return Ok(0.0);
    };
    let book = deal.tricks().saturating_sub(7) as u8;
    let r = solve_dd(deal, o.strain, o.declarer.next(), o.declarer.side(), Mode::Partition)?;
    let s = contract_score(&o, r.tricks, book) as f64;
    Ok(if o.declarer.side() == side { s } else { -s })
}

#[derive(Debug, Clone)]
pub struct BidConfig {
    pub max_auction: usize,
}

impl Default for BidConfig {
    fn default() -> Self {
        BidConfig { max_auction: 64 }
    }
}

/// Default sample size for simulations.
pub const DEFAULT_SAMPLES: usize = 50;

/// Borel simulation: the first candidate is usually the database's own
/// suggestion. Each candidate is appended to `auction`, the rest of the
/// auction is projected with `db`, and the result is scored by `scorer`
/// (final auction, deal) from the bidder's side.
pub fn select_bid<E>(
    auction: &[Bid],
    dealer: Seat,
    hand: CardSet,
    candidates: &[Bid],
    db: &dyn BidDatabase,
    sample: &WeightedSample<Deal>,
    cfg: &BidConfig,
    scorer: impl Fn(&[Bid], &Deal) -> Result<f64, E> + Sync,
) -> Result<MoveChoice<Bid>, McError>
where
    E: Send,
    McError: From<E>,
{
    let bidder = dealer.offset(auction.len());
    for (i, d) in sample.deals.iter().enumerate() {
        if d.hand(bidder) != hand {
            return Err(McError::HandMismatch(i));
        }
    }
    for b in candidates {
        if !is_legal(auction, *b) {
            return Err(McError::IllegalBid { bid: *b, auction: auction_string(auction) });
        }
    }
    select_move::<Bid, Deal, McError>(sample, candidates, |b: &Bid, d: &Deal| -> Result<f64, McError> {
        let mut a = auction.to_vec();
        a.push(*b);
        let full = project_auction(&a, dealer, d, db, cfg.max_auction)?;
        Ok(scorer(&full, d)?)
    })
}

/// Candidate calls: the database's suggestion, then `extra` in order,
/// without duplicates.
pub fn candidates(auction: &[Bid], hand: CardSet, db: &dyn BidDatabase, extra: &[Bid]) -> Vec<Bid> {
    let mut out = vec![db.suggest(auction, hand)];
    if !is_legal(auction, out[0]) {
        out[0] = Bid::Pass;
    }
    for b in extra {
        if !out.contains(b) {
            out.push(*b);
        }
    }
    out
}
