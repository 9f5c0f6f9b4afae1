//! Cards, hands, deals and the trick-play rules of bridge.
//!
//! Decks may be reduced to any subset of ranks, so a "deal" of 12 cards
//! (three ranks in each suit) is as legitimate as a full 52-card deal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("rank {0} out of range 2..=14")]
    BadRank(u8),
    #[error("seat {seat} is not on play ({expected} is)")]
    NotOnPlay { seat: Seat, expected: Seat },
    #[error("{card} is not a legal play for {seat}")]
    IllegalCard { seat: Seat, card: Card },
    #[error("malformed trick: {0}")]
    MalformedTrick(String),
    #[error("tricks committed {0} outside 7..=13")]
    BadContract(u8),
    #[error("hands overlap on {0}")]
    Overlap(Card),
    #[error("hands have unequal sizes {0:?}")]
    UnequalHands([usize; 4]),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("duplicate card {card} in token `{token}`")]
    DuplicateCard { card: Card, token: String },
    #[error("unknown rank symbol `{symbol}` in token `{token}`")]
    UnknownRank { symbol: char, token: String },
    #[error("hand sizes differ: token `{token}` has {got} cards, expected {expected}")]
    WrongHandSize { token: String, got: usize, expected: usize },
    #[error("malformed token `{0}`")]
    Malformed(String),
    #[error("unknown seat `{0}`")]
    UnknownSeat(String),
    #[error("unknown suit or strain `{0}`")]
    UnknownSuit(String),
    #[error("unknown side `{0}`")]
    UnknownSide(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Suit {
    Spades = 0,
    Hearts = 1,
    Diamonds = 2,
    Clubs = 3,
}

impl Suit {
    pub const ALL: [Suit; 4] = [Suit::Spades, Suit::Hearts, Suit::Diamonds, Suit::Clubs];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Suit {
        Suit::ALL[i]
    }

    pub fn letter(self) -> char {
        ['S', 'H', 'D', 'C'][self.index()]
    }

    pub fn symbol(self) -> char {
        ['♠', '♥', '♦', '♣'][self.index()]
    }
}

impl fmt::Display for Suit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Suit {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "S" | "♠" => Ok(Suit::Spades),
            "H" | "♥" => Ok(Suit::Hearts),
            "D" | "♦" => Ok(Suit::Diamonds),
            "C" | "♣" => Ok(Suit::Clubs),
            _ => Err(ParseError::UnknownSuit(s.to_string())),
        }
    }
}

/// A trump suit or notrump, as written on the command line (`S`, `H`, `D`, `C`, `NT`).
pub fn parse_strain(s: &str) -> Result<Option<Suit>, ParseError> {
    match s.to_ascii_uppercase().as_str() {
        "NT" | "N" => Ok(None),
        other => other.parse().map(Some),
    }
}

pub fn strain_name(trump: Option<Suit>) -> String {
    match trump {
        None => "NT".into(),
        Some(s) => s.letter().to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Seat {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Seat {
    pub const ALL: [Seat; 4] = [Seat::North, Seat::East, Seat::South, Seat::West];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Seat {
        Seat::ALL[i % 4]
    }

    /// Clockwise successor.
    pub fn next(self) -> Seat {
        Seat::from_index(self.index() + 1)
    }

    pub fn partner(self) -> Seat {
        Seat::from_index(self.index() + 2)
    }

    pub fn offset(self, k: usize) -> Seat {
        Seat::from_index(self.index() + k)
    }

    pub fn side(self) -> Side {
        if self.index().is_multiple_of(2) {
            Side::NS
        } else {
            Side::EW
        }
    }

    pub fn letter(self) -> char {
        ['N', 'E', 'S', 'W'][self.index()]
    }
}

impl fmt::Display for Seat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Seat {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "N" | "NORTH" => Ok(Seat::North),
            "E" | "EAST" => Ok(Seat::East),
            "S" | "SOUTH" => Ok(Seat::South),
            "W" | "WEST" => Ok(Seat::West),
            _ => Err(ParseError::UnknownSeat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    NS = 0,
    EW = 1,
}

impl Side {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn other(self) -> Side {
        match self {
            Side::NS => Side::EW,
            Side::EW => Side::NS,
        }
    }

    pub fn seats(self) -> [Seat; 2] {
        match self {
            Side::NS => [Seat::North, Seat::South],
            Side::EW => [Seat::East, Seat::West],
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::NS => "NS",
            Side::EW => "EW",
        })
    }
}

impl FromStr for Side {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "NS" | "SN" => Ok(Side::NS),
            "EW" | "WE" => Ok(Side::EW),
            _ => Err(ParseError::UnknownSide(s.to_string())),
        }
    }
}

const RANK_CHARS: &[u8; 13] = b"23456789TJQKA";

pub fn rank_char(rank: u8) -> char {
    RANK_CHARS[(rank - 2) as usize] as char
}

pub fn rank_from_char(c: char) -> Option<u8> {
    let c = c.to_ascii_uppercase();
    RANK_CHARS.iter().position(|&r| r as char == c).map(|i| i as u8 + 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Card {
    pub suit: Suit,
    pub rank: u8,
}

impl Card {
    pub fn new(suit: Suit, rank: u8) -> Result<Card, ModelError> {
        if (2..=14).contains(&rank) {
            Ok(Card { suit, rank })
        } else {
            Err(ModelError::BadRank(rank))
        }
    }

    /// Bit index in a [`CardSet`]; rank 2 of spades is bit 0.
    pub fn index(self) -> usize {
        self.suit.index() * 13 + (self.rank as usize - 2)
    }

    pub fn from_index(i: usize) -> Card {
        Card { suit: Suit::from_index(i / 13), rank: (i % 13) as u8 + 2 }
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.suit.letter(), rank_char(self.rank))
    }
}

impl FromStr for Card {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut it = s.chars();
        let (Some(sc), Some(rc), None) = (it.next(), it.next(), it.next()) else {
            return Err(ParseError::Malformed(s.to_string()));
        };
        let suit: Suit = sc.to_string().parse()?;
        let rank = rank_from_char(rc).ok_or_else(|| ParseError::UnknownRank { symbol: rc, token: s.to_string() })?;
        Ok(Card { suit, rank })
    }
}

/// A set of cards as a 52-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CardSet(pub u64);

const SUIT_MASK: u64 = (1 << 13) - 1;

impl CardSet {
    pub const EMPTY: CardSet = CardSet(0);

    pub fn contains(self, c: Card) -> bool {
        self.0 >> c.index() & 1 == 1
    }

    pub fn insert(&mut self, c: Card) {
        self.0 |= 1 << c.index();
    }

    pub fn remove(&mut self, c: Card) {
        self.0 &= !(1 << c.index());
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: CardSet) -> CardSet {
        CardSet(self.0 | o.0)
    }

    pub fn intersection(self, o: CardSet) -> CardSet {
        CardSet(self.0 & o.0)
    }

    pub fn difference(self, o: CardSet) -> CardSet {
        CardSet(self.0 & !o.0)
    }

    /// Rank bits of one suit: bit `r - 2` set when rank `r` is present.
    pub fn suit_bits(self, s: Suit) -> u16 {
        (self.0 >> (s.index() * 13) & SUIT_MASK) as u16
    }

    pub fn suit(self, s: Suit) -> CardSet {
        CardSet(self.0 & (SUIT_MASK << (s.index() * 13)))
    }

    pub fn suit_len(self, s: Suit) -> usize {
        self.suit_bits(s).count_ones() as usize
    }

    /// Cards in suit order (spades first), highest rank first within a suit.
    pub fn iter(self) -> impl Iterator<Item = Card> {
        Suit::ALL.into_iter().flat_map(move |s| {
            let bits = self.suit_bits(s);
            (2..=14u8).rev().filter(move |r| bits >> (r - 2) & 1 == 1).map(move |r| Card { suit: s, rank: r })
        })
    }

    pub fn from_cards<I: IntoIterator<Item = Card>>(cards: I) -> CardSet {
        let mut s = CardSet::EMPTY;
        for c in cards {
            s.insert(c);
        }
        s
    }

    /// Every card of the given ranks in all four suits.
    pub fn full_ranks(ranks: RankSet) -> CardSet {
        let mut s = 0u64;
        for suit in 0..4 {
            s |= (ranks.0 as u64) << (suit * 13);
        }
        CardSet(s)
    }

    /// The suit-holding in deal-string form, e.g. `AQ3` or `-`.
    pub fn suit_string(self, s: Suit) -> String {
        let bits = self.suit_bits(s);
        if bits == 0 {
            return "-".into();
        }
        (2..=14u8).rev().filter(|r| bits >> (r - 2) & 1 == 1).map(rank_char).collect()
    }
}

impl fmt::Display for CardSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Suit::ALL.iter().map(|&s| self.suit_string(s)).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A subset of ranks 2..=14, bit `r - 2` per rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RankSet(pub u16);

impl RankSet {
    pub const FULL: RankSet = RankSet((1 << 13) - 1);

    /// The `n` highest ranks: `top(3)` is A, K, Q.
    pub fn top(n: usize) -> RankSet {
        let n = n.min(13);
        RankSet((((1u32 << n) - 1) << (13 - n)) as u16)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, rank: u8) -> bool {
        (2..=14).contains(&rank) && self.0 >> (rank - 2) & 1 == 1
    }

    pub fn parse(s: &str) -> Result<RankSet, ParseError> {
        let mut bits = 0u16;
        for c in s.chars() {
            let r = rank_from_char(c).ok_or_else(|| ParseError::UnknownRank { symbol: c, token: s.to_string() })?;
            bits |= 1 << (r - 2);
        }
        Ok(RankSet(bits))
    }
}

/// Four hands of equal size with no card in two hands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Deal {
    pub hands: [CardSet; 4],
}

impl Deal {
    pub fn new(hands: [CardSet; 4]) -> Result<Deal, ModelError> {
        let mut seen = CardSet::EMPTY;
        for h in hands {
            let dup = seen.intersection(h);
            if let Some(c) = dup.iter().next() {
                return Err(ModelError::Overlap(c));
            }
            seen = seen.union(h);
        }
        let sizes = hands.map(|h| h.len());
        if sizes.iter().any(|&n| n != sizes[0]) {
            return Err(ModelError::UnequalHands(sizes));
        }
        Ok(Deal { hands })
    }

    pub fn empty() -> Deal {
        Deal { hands: [CardSet::EMPTY; 4] }
    }

    pub fn hand(&self, seat: Seat) -> CardSet {
        self.hands[seat.index()]
    }

    pub fn all_cards(&self) -> CardSet {
        self.hands.iter().fold(CardSet::EMPTY, |a, &h| a.union(h))
    }

    /// Ranks that occur in the deal.
    pub fn deck_ranks(&self) -> RankSet {
        let all = self.all_cards();
        RankSet(Suit::ALL.iter().fold(0, |a, &s| a | all.suit_bits(s)))
    }

    /// True when the cards are exactly `deck_ranks × 4 suits`.
    pub fn is_complete_deck(&self) -> bool {
        self.all_cards() == CardSet::full_ranks(self.deck_ranks())
    }

    pub fn size(&self) -> usize {
        self.all_cards().len()
    }

    pub fn tricks(&self) -> usize {
        self.hands[0].len()
    }

    /// Relabel seats clockwise by `k` places: North's hand goes to `North.offset(k)`.
    pub fn rotate(&self, k: usize) -> Deal {
        let mut hands = [CardSet::EMPTY; 4];
        for s in Seat::ALL {
            hands[s.offset(k).index()] = self.hands[s.index()];
        }
        Deal { hands }
    }
}

impl fmt::Display for Deal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hands: Vec<String> = self.hands.iter().map(|h| h.to_string()).collect();
        write!(f, "N:{}", hands.join(" "))
    }
}

impl FromStr for Deal {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_deal(s)
    }
}

/// Parse `N:<spades>.<hearts>.<diamonds>.<clubs> ...`, four hands clockwise
/// from the named seat. A void is `-` (an empty field is also accepted).
/// An empty string is the empty deal.
pub fn parse_deal(text: &str) -> Result<Deal, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Deal::empty());
    }
    let (first, rest) = match text.split_once(':') {
        Some((seat, rest)) => (seat.trim().parse::<Seat>()?, rest),
        None => (Seat::North, text),
    };
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    if tokens.len() != 4 {
        return Err(ParseError::Malformed(rest.trim().to_string()));
    }
    let mut hands = [CardSet::EMPTY; 4];
    let mut seen = CardSet::EMPTY;
    for (k, token) in tokens.iter().enumerate() {
        let hand = parse_hand_token(token, &mut seen)?;
        hands[first.offset(k).index()] = hand;
    }
    let expected = hands[first.index()].len();
    for (k, token) in tokens.iter().enumerate() {
        let got = hands[first.offset(k).index()].len();
        if got != expected {
            return Err(ParseError::WrongHandSize { token: token.to_string(), got, expected });
        }
    }
    Ok(Deal { hands })
}

fn parse_hand_token(token: &str, seen: &mut CardSet) -> Result<CardSet, ParseError> {
    let suits: Vec<&str> = token.split('.').collect();
    if suits.len() != 4 {
        return Err(ParseError::Malformed(token.to_string()));
    }
    let mut hand = CardSet::EMPTY;
    for (si, holding) in suits.iter().enumerate() {
        if *holding == "-" {
            continue;
        }
        for ch in holding.chars() {
            let rank =
                rank_from_char(ch).ok_or_else(|| ParseError::UnknownRank { symbol: ch, token: token.to_string() })?;
            let card = Card { suit: Suit::from_index(si), rank };
            if seen.contains(card) {
                return Err(ParseError::DuplicateCard { card, token: token.to_string() });
            }
            seen.insert(card);
            hand.insert(card);
        }
    }
    Ok(hand)
}

/// Parse a single hand such as `AK.QJ5.-.T98`.
pub fn parse_hand(text: &str) -> Result<CardSet, ParseError> {
    let mut seen = CardSet::EMPTY;
    parse_hand_token(text.trim(), &mut seen)
}

pub fn serialize_deal(deal: &Deal) -> String {
    deal.to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Contract {
    pub declarer: Seat,
    pub trump: Option<Suit>,
    pub tricks_committed: u8,
}

impl Contract {
    pub fn new(declarer: Seat, trump: Option<Suit>, tricks_committed: u8) -> Result<Contract, ModelError> {
        if !(7..=13).contains(&tricks_committed) {
            return Err(ModelError::BadContract(tricks_committed));
        }
        Ok(Contract { declarer, trump, tricks_committed })
    }

    pub fn level(&self) -> u8 {
        self.tricks_committed - 6
    }

    pub fn opening_leader(&self) -> Seat {
        self.declarer.next()
    }
}

impl fmt::Display for Contract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{} by {}", self.level(), strain_name(self.trump), self.declarer)
    }
}

/// The winner of a completed trick: highest trump if any was played,
/// otherwise the highest card of the suit led.
pub fn trick_winner(trick: &[(Seat, Card)], trump: Option<Suit>) -> Result<Seat, ModelError> {
    if trick.len() != 4 {
        return Err(ModelError::MalformedTrick(format!("{} cards", trick.len())));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if trick[i].0 == trick[j].0 {
                return Err(ModelError::MalformedTrick(format!("{} plays twice", trick[i].0)));
            }
            if trick[i].1 == trick[j].1 {
                return Err(ModelError::MalformedTrick(format!("{} played twice", trick[i].1)));
            }
        }
    }
    let cards: [Card; 4] = [trick[0].1, trick[1].1, trick[2].1, trick[3].1];
    Ok(trick[winning_index(&cards, trump)].0)
}

/// Index (in play order) of the winning card. `cards[0]` was led.
pub fn winning_index(cards: &[Card], trump: Option<Suit>) -> usize {
    let led = cards[0].suit;
    let mut best = 0;
    for (i, c) in cards.iter().enumerate().skip(1) {
        let b = cards[best];
        let beats = if Some(c.suit) == trump && b.suit != c.suit { true } else { c.suit == b.suit && c.rank > b.rank };
        if beats && (c.suit == led || Some(c.suit) == trump) {
            best = i;
        }
    }
    best
}

/// Trick-play state: remaining hands, the trick in progress and tricks won.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlayState {
    pub hands: [CardSet; 4],
    pub trump: Option<Suit>,
    pub leader: Seat,
    /// Cards played to the current trick, in order from the leader.
    pub trick: [Option<Card>; 3],
    /// Tricks won, indexed by [`Side::index`].
    pub tricks_won: [u8; 2],
    /// Tricks the declaring side still needs; only used by {0,1} games.
    pub target: u8,
}

impl PlayState {
    pub fn new(deal: &Deal, trump: Option<Suit>, leader: Seat) -> PlayState {
        PlayState { hands: deal.hands, trump, leader, trick: [None; 3], tricks_won: [0, 0], target: 0 }
    }

    pub fn with_target(mut self, target: u8) -> PlayState {
        self.target = target;
        self
    }

    pub fn trick_len(&self) -> usize {
        self.trick.iter().take_while(|c| c.is_some()).count()
    }

    pub fn trick_cards(&self) -> Vec<(Seat, Card)> {
        self.trick.iter().enumerate().filter_map(|(i, c)| c.map(|c| (self.leader.offset(i), c))).collect()
    }

    pub fn to_act(&self) -> Seat {
        self.leader.offset(self.trick_len())
    }

    pub fn hand(&self, seat: Seat) -> CardSet {
        self.hands[seat.index()]
    }

    /// Cards still held plus cards on the table in the current trick.
    pub fn cards_in_play(&self) -> CardSet {
        let mut all = self.hands.iter().fold(CardSet::EMPTY, |a, &h| a.union(h));
        for c in self.trick.iter().flatten() {
            all.insert(*c);
        }
        all
    }

    pub fn remaining_tricks(&self) -> usize {
        (self.hands.iter().map(|h| h.len()).sum::<usize>() + self.trick_len()) / 4
    }

    pub fn is_over(&self) -> bool {
        self.hands.iter().all(|h| h.is_empty()) && self.trick_len() == 0
    }

    pub fn led_suit(&self) -> Option<Suit> {
        self.trick[0].map(|c| c.suit)
    }

    /// Legal cards for `seat`, which must be the seat on play.
    pub fn legal_moves(&self, seat: Seat) -> Result<Vec<Card>, ModelError> {
        let expected = self.to_act();
        if seat != expected {
            return Err(ModelError::NotOnPlay { seat, expected });
        }
        Ok(self.legal_set().iter().collect())
    }

    /// Legal cards for the seat on play, as a set.
    pub fn legal_set(&self) -> CardSet {
        let hand = self.hand(self.to_act());
        match self.led_suit() {
            Some(led) if hand.suit_len(led) > 0 => hand.suit(led),
            _ => hand,
        }
    }

    /// Play `card` for the seat on play, resolving the trick on its fourth card.
    pub fn play(&self, card: Card) -> Result<PlayState, ModelError> {
        let seat = self.to_act();
        if !self.legal_set().contains(card) {
            return Err(ModelError::IllegalCard { seat, card });
        }
        Ok(self.play_unchecked(card))
    }

    pub(crate) fn play_unchecked(&self, card: Card) -> PlayState {
        let mut next = *self;
        let seat = self.to_act();
        next.hands[seat.index()].remove(card);
        let n = self.trick_len();
        if n < 3 {
            next.trick[n] = Some(card);
            return next;
        }
        let cards = [self.trick[0].unwrap(), self.trick[1].unwrap(), self.trick[2].unwrap(), card];
        let winner = self.leader.offset(winning_index(&cards, self.trump));
        next.tricks_won[winner.side().index()] += 1;
        next.leader = winner;
        next.trick = [None; 3];
        next
    }
}
