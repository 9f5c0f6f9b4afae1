//! Single-dummy solving: the maximizer cannot see the minimizer's cards.
//!
//! An [`ImperfectGame`] is a public game tree plus a universe of situations
//! (complete layouts of the hidden cards). Values of the derived game are
//! antichains of situation sets: the sets of situations the maximizer can
//! play for with a single strategy.

use std::collections::{HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::game::{AlphaBeta, Eval, Game, GameError};
use crate::lattice::{reduce, Antichain, AntichainAlgebra, LatticeError, SetAlgebra, SituationSet};
use crate::model::{Card, CardSet, Deal, ModelError, PlayState, Seat, Side, Suit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SdError {
    #[error("{cards} cards exceed the exact-solver limit of {limit}; use achievable-set planning instead")]
    TooLarge { cards: usize, limit: usize },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("situation {index} is inconsistent: {reason}")]
    BadSituation { index: usize, reason: String },
    #[error("empty universe")]
    EmptyUniverse,
    #[error("iterations must be at least 1")]
    NoIterations,
}

/// Size guard for exact antichain solving.
pub const EXACT_CARD_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Turn {
    Max,
    Min,
    Terminal,
}

pub trait ImperfectGame {
    type Node: Clone + Eq + Hash + Debug;
    type Move: Clone + Eq + Hash + Debug;

    fn universe_size(&self) -> usize;
    fn root(&self) -> Self::Node;
    fn turn(&self, n: &Self::Node) -> Turn;
    /// Maximizer moves; the maximizer sees the node, so these do not depend
    /// on the situation.
    fn max_moves(&self, n: &Self::Node) -> Vec<Self::Move>;
    /// Minimizer moves legal in situation `s`.
    fn min_moves(&self, n: &Self::Node, s: usize) -> Vec<Self::Move>;
    fn play(&self, n: &Self::Node, m: &Self::Move) -> Self::Node;
    /// At a terminal: does the maximizer win in situation `s`?
    fn wins(&self, n: &Self::Node, s: usize) -> bool;
    /// Cards left to play, for the exact-solver guard. Zero for non-card games.
    fn cards_in_play(&self) -> usize {
        0
    }
}

/// Minimizer moves legal in some situation of `z`, each with the part of `z`
/// where it is legal. Order follows first appearance over `z`.
pub fn min_branches<G: ImperfectGame>(g: &G, n: &G::Node, z: &SituationSet) -> Vec<(G::Move, SituationSet)> {
    let mut out: Vec<(G::Move, SituationSet)> = Vec::new();
    let mut index: HashMap<G::Move, usize> = HashMap::new();
    for s in z.iter() {
        for m in g.min_moves(n, s) {
            let i = *index.entry(m.clone()).or_insert_with(|| {
                out.push((m, SituationSet::empty(z.universe())));
                out.len() - 1
            });
            out[i].1.insert(s);
        }
    }
    out
}

/// The derived perfect-information game over positions `(node, Z)`.
pub struct Derived<'a, G: ImperfectGame, V> {
    pub g: &'a G,
    terminal: fn(&G, &G::Node, &SituationSet) -> V,
}

fn antichain_terminal<G: ImperfectGame>(g: &G, n: &G::Node, z: &SituationSet) -> Antichain {
    Antichain::singleton(winning_part(g, n, z))
}

fn set_terminal<G: ImperfectGame>(g: &G, n: &G::Node, z: &SituationSet) -> SituationSet {
    winning_part(g, n, z)
}

/// `U` minus the situations of `z` the maximizer loses at terminal `n`.
fn winning_part<G: ImperfectGame>(g: &G, n: &G::Node, z: &SituationSet) -> SituationSet {
    let mut w = SituationSet::full(z.universe());
    for s in z.iter() {
        if !g.wins(n, s) {
            w.remove(s);
        }
    }
    w
}

impl<'a, G: ImperfectGame, V: Clone + Debug + PartialEq> Game for Derived<'a, G, V> {
    type Pos = (G::Node, SituationSet);
    type Value = V;

    fn initial(&self) -> Self::Pos {
        (self.g.root(), SituationSet::full(self.g.universe_size()))
    }

    fn successors(&self, (n, z): &Self::Pos) -> Vec<Self::Pos> {
        match self.g.turn(n) {
            Turn::Terminal => Vec::new(),
            Turn::Max => self.g.max_moves(n).iter().map(|m| (self.g.play(n, m), z.clone())).collect(),
            Turn::Min => min_branches(self.g, n, z).into_iter().map(|(m, zm)| (self.g.play(n, &m), zm)).collect(),
        }
    }

    fn eval(&self, (n, z): &Self::Pos) -> Eval<V> {
        match self.g.turn(n) {
            Turn::Terminal => Eval::Value((self.terminal)(self.g, n, z)),
            Turn::Max => Eval::Max,
            Turn::Min => Eval::Min,
        }
    }
}

impl<'a, G: ImperfectGame> Derived<'a, G, Antichain> {
    pub fn imperfect(g: &'a G) -> Self {
        Derived { g, terminal: antichain_terminal::<G> }
    }
}

impl<'a, G: ImperfectGame> Derived<'a, G, SituationSet> {
    pub fn perfect(g: &'a G) -> Self {
        Derived { g, terminal: set_terminal::<G> }
    }
}

fn guard<G: ImperfectGame>(g: &G) -> Result<usize, SdError> {
    let cards = g.cards_in_play();
    if cards > EXACT_CARD_LIMIT {
        return Err(SdError::TooLarge { cards, limit: EXACT_CARD_LIMIT });
    }
    match g.universe_size() {
        0 => Err(SdError::EmptyUniverse),
        n => Ok(n),
    }
}

/// The root antichain: each member is a maximal set of situations one
/// strategy wins in every element of.
pub fn solve_imperfect<G: ImperfectGame>(g: &G) -> Result<Antichain, SdError> {
    let n = guard(g)?;
    let d = Derived::imperfect(g);
    let alg = AntichainAlgebra { n };
    let mut ab = AlphaBeta::new(&d, &alg);
    Ok(ab.search(&d.initial(), &Antichain::empty(n), &Antichain::top(n))?)
}

/// Situations the maximizer wins with perfect information.
pub fn perfect_info_value<G: ImperfectGame>(g: &G) -> Result<SituationSet, SdError> {
    let n = guard(g)?;
    let d = Derived::perfect(g);
    perfect_from(g, &d.initial().0, &SituationSet::full(n))
}

/// Perfect-information value from `node` restricted to situations `z`.
pub fn perfect_from<G: ImperfectGame>(g: &G, node: &G::Node, z: &SituationSet) -> Result<SituationSet, SdError> {
    let d = Derived::perfect(g);
    let alg = SetAlgebra { n: z.universe() };
    let mut ab = AlphaBeta::new(&d, &alg);
    let v =
        ab.search(&(node.clone(), z.clone()), &SituationSet::empty(z.universe()), &SituationSet::full(z.universe()))?;
    Ok(v.intersection(z)?)
}

/// Maximizer choices of a strategy, keyed by position and live situations.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy<N: Eq + Hash, M> {
    pub choices: HashMap<(N, SituationSet), M>,
}

impl<N: Eq + Hash, M> Strategy<N, M> {
    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }
}

/// Decides achievability of situation sets with a shared cache.
pub struct Achiever<'a, G: ImperfectGame> {
    pub g: &'a G,
    memo: HashMap<(G::Node, SituationSet), bool>,
    pub nodes: u64,
}

impl<'a, G: ImperfectGame> Achiever<'a, G> {
    pub fn new(g: &'a G) -> Self {
        Achiever { g, memo: HashMap::new(), nodes: 0 }
    }

    /// Does one maximizer strategy win in every situation of `a`?
    pub fn achievable(&mut self, a: &SituationSet) -> bool {
        let root = self.g.root();
        self.win(&root, a)
    }

    fn win(&mut self, n: &G::Node, z: &SituationSet) -> bool {
        if z.is_empty() {
            return true;
        }
        let key = (n.clone(), z.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        self.nodes += 1;
        let v = match self.g.turn(n) {
            Turn::Terminal => z.iter().all(|s| self.g.wins(n, s)),
            Turn::Max => {
                let moves = self.g.max_moves(n);
                moves.iter().any(|m| {
                    let c = self.g.play(n, m);
                    self.win(&c, z)
                })
            }
            Turn::Min => min_branches(self.g, n, z).into_iter().all(|(m, zm)| {
                let c = self.g.play(n, &m);
                self.win(&c, &zm)
            }),
        };
        self.memo.insert(key, v);
        v
    }

    /// A strategy winning in every situation of `a`, if one exists.
    pub fn witness(&mut self, a: &SituationSet) -> Option<Strategy<G::Node, G::Move>> {
        if !self.achievable(a) {
            return None;
        }
        let mut choices = HashMap::new();
        let root = self.g.root();
        self.extract(&root, a, &mut choices);
        Some(Strategy { choices })
    }

    fn extract(&mut self, n: &G::Node, z: &SituationSet, out: &mut HashMap<(G::Node, SituationSet), G::Move>) {
        if z.is_empty() {
            return;
        }
        match self.g.turn(n) {
            Turn::Terminal => {}
            Turn::Max => {
                for m in self.g.max_moves(n) {
                    let c = self.g.play(n, &m);
                    if self.win(&c, z) {
                        out.insert((n.clone(), z.clone()), m);
                        self.extract(&c, z, out);
                        return;
                    }
                }
            }
            Turn::Min => {
                for (m, zm) in min_branches(self.g, n, z) {
                    let c = self.g.play(n, &m);
                    self.extract(&c, &zm, out);
                }
            }
        }
    }
}

pub fn is_achievable<G: ImperfectGame>(g: &G, a: &SituationSet) -> (bool, Option<Strategy<G::Node, G::Move>>) {
    let mut ach = Achiever::new(g);
    let w = ach.witness(a);
    (w.is_some(), w)
}

/// Replay `strategy` in every situation of `a` against every minimizer reply.
pub fn verify_strategy<G: ImperfectGame>(g: &G, strategy: &Strategy<G::Node, G::Move>, a: &SituationSet) -> bool {
    fn go<G: ImperfectGame>(g: &G, st: &Strategy<G::Node, G::Move>, n: &G::Node, z: &SituationSet, s: usize) -> bool {
        match g.turn(n) {
            Turn::Terminal => g.wins(n, s),
            Turn::Max => match st.choices.get(&(n.clone(), z.clone())) {
                Some(m) => go(g, st, &g.play(n, m), z, s),
                None => false,
            },
            Turn::Min => min_branches(g, n, z)
                .into_iter()
                .filter(|(_, zm)| zm.contains(s))
                .all(|(m, zm)| go(g, st, &g.play(n, &m), &zm, s)),
        }
    }
    a.iter().all(|s| go(g, strategy, &g.root(), a, s))
}

#[derive(Debug, Clone)]
pub struct AchievableSet<N: Eq + Hash, M> {
    pub members: SituationSet,
    pub witness: Strategy<N, M>,
    /// Sequence elements that could not be added, in sequence order.
    pub failed: Vec<usize>,
}

/// A generalized union `A ⊕ {s}`, or `None` when it does not apply.
pub type Generalizer<'a> = &'a dyn Fn(&SituationSet, usize) -> Option<SituationSet>;

/// Greedy construction of a maximal achievable set from `seq`, trying the
/// generalized union first when one is given.
pub fn build_achievable<G: ImperfectGame>(
    g: &G,
    seq: &[usize],
    gen: Option<Generalizer<'_>>,
) -> Result<AchievableSet<G::Node, G::Move>, SdError> {
    let n = g.universe_size();
    let mut ach = Achiever::new(g);
    build_with(&mut ach, n, seq, gen)
}

fn build_with<G: ImperfectGame>(
    ach: &mut Achiever<'_, G>,
    n: usize,
    seq: &[usize],
    gen: Option<Generalizer<'_>>,
) -> Result<AchievableSet<G::Node, G::Move>, SdError> {
    let mut a = SituationSet::empty(n);
    let mut failed = Vec::new();
    for &s in seq {
        if s >= n {
            return Err(LatticeError::OutOfRange { index: s, n }.into());
        }
        if a.contains(s) {
            continue;
        }
        if let Some(b) = gen.and_then(|f| f(&a, s)) {
            if b.contains(s) && a.is_subset(&b) && ach.achievable(&b) {
                a = b;
                continue;
            }
        }
        let mut b = a.clone();
        b.insert(s);
        if ach.achievable(&b) {
            a = b;
        } else {
            failed.push(s);
        }
    }
    let witness = ach.witness(&a).expect("constructed set is achievable");
    Ok(AchievableSet { members: a, witness, failed })
}

#[derive(Debug, Clone)]
pub struct SwoIterate {
    pub order: Vec<usize>,
    pub members: SituationSet,
    pub payoff: f64,
}

#[derive(Debug, Clone)]
pub struct SwoResult<N: Eq + Hash, M> {
    pub best: AchievableSet<N, M>,
    pub payoff: f64,
    pub history: Vec<SwoIterate>,
}

/// Total weight of the situations in `a`.
pub fn weight_payoff(weights: &[f64], a: &SituationSet) -> f64 {
    a.iter().map(|s| weights.get(s).copied().unwrap_or(0.0)).sum()
}

/// Squeaky wheel optimization over construction orders. Failed elements move
/// to the front, ranked by the weight of failed peers they could be achieved
/// together with, then by their own weight, then by their previous position.
pub fn swo_select<G: ImperfectGame>(
    g: &G,
    order: &[usize],
    weights: &[f64],
    iterations: usize,
    gen: Option<Generalizer<'_>>,
) -> Result<SwoResult<G::Node, G::Move>, SdError> {
    if iterations == 0 {
        return Err(SdError::NoIterations);
    }
    let n = g.universe_size();
    let mut ach = Achiever::new(g);
    let mut order = order.to_vec();
    let mut history = Vec::new();
    let mut best: Option<(AchievableSet<G::Node, G::Move>, f64)> = None;
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for _ in 0..iterations {
        if !seen.insert(order.clone()) {
            break;
        }
        let built = build_with(&mut ach, n, &order, gen)?;
        let payoff = weight_payoff(weights, &built.members);
        history.push(SwoIterate { order: order.clone(), members: built.members.clone(), payoff });
        let failed = built.failed.clone();
        if best.as_ref().is_none_or(|(_, p)| payoff > *p) {
            best = Some((built, payoff));
        }
        if failed.is_empty() {
            break;
        }
        let w = |s: usize| weights.get(s).copied().unwrap_or(0.0);
        let mut ranked: Vec<(usize, f64, f64, usize)> = Vec::new();
        for (pos, &f) in order.iter().enumerate() {
            if !failed.contains(&f) {
                continue;
            }
            let mut peer = 0.0;
            for &h in &failed {
                if h != f {
                    let pair = SituationSet::from_indices(n, [f, h])?;
                    if ach.achievable(&pair) {
                        peer += w(h);
                    }
                }
            }
            ranked.push((f, peer, w(f), pos));
        }
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(b.2.total_cmp(&a.2)).then(a.3.cmp(&b.3)));
        let mut next: Vec<usize> = ranked.iter().map(|r| r.0).collect();
        next.extend(order.iter().copied().filter(|s| !failed.contains(s)));
        order = next;
    }
    let (best, payoff) = best.expect("at least one iteration");
    Ok(SwoResult { best, payoff, history })
}

/// Maximal winning sets by enumerating every maximizer strategy's win set
/// bottom-up, without reduction at interior nodes. Exponential; for tests.
pub fn brute_force_winsets<G: ImperfectGame>(g: &G) -> Result<Antichain, SdError> {
    let n = guard(g)?;
    fn go<G: ImperfectGame>(g: &G, node: &G::Node, z: &SituationSet) -> HashSet<SituationSet> {
        match g.turn(node) {
            Turn::Terminal => HashSet::from([winning_part(g, node, z)]),
            Turn::Max => {
                let mut all = HashSet::new();
                for m in g.max_moves(node) {
                    all.extend(go(g, &g.play(node, &m), z));
                }
                all
            }
            Turn::Min => {
                // A strategy picks one continuation per minimizer reply; its
                // win set is the intersection over replies.
                let mut acc: HashSet<SituationSet> = HashSet::from([SituationSet::full(z.universe())]);
                for (m, zm) in min_branches(g, node, z) {
                    let child = go(g, &g.play(node, &m), &zm);
                    let mut next = HashSet::new();
                    for a in &acc {
                        for c in &child {
                            next.insert(a.intersection(c).expect("same universe"));
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }
    let all = go(g, &g.root(), &SituationSet::full(n));
    Ok(reduce(n, all)?)
}

/// 1.0 when the maximizer, on play at `node`, wins situation `s` with
/// perfect information after playing `m`; else 0.0.
pub fn perfect_move_score<G: ImperfectGame>(g: &G, node: &G::Node, m: &G::Move, s: usize) -> Result<f64, SdError> {
    let z = SituationSet::from_indices(g.universe_size(), [s])?;
    let v = perfect_from(g, &g.play(node, m), &z)?;
    Ok(if v.contains(s) { 1.0 } else { 0.0 })
}

/// `g` with the maximizer's first move fixed.
pub struct Committed<'a, G: ImperfectGame> {
    pub g: &'a G,
    pub first: G::Move,
}

impl<'a, G: ImperfectGame> ImperfectGame for Committed<'a, G> {
    type Node = G::Node;
    type Move = G::Move;

    fn universe_size(&self) -> usize {
        self.g.universe_size()
    }
    fn root(&self) -> G::Node {
        self.g.root()
    }
    fn turn(&self, n: &G::Node) -> Turn {
        self.g.turn(n)
    }
    fn max_moves(&self, n: &G::Node) -> Vec<G::Move> {
        if *n == self.g.root() {
            vec![self.first.clone()]
        } else {
            self.g.max_moves(n)
        }
    }
    fn min_moves(&self, n: &G::Node, s: usize) -> Vec<G::Move> {
        self.g.min_moves(n, s)
    }
    fn play(&self, n: &G::Node, m: &G::Move) -> G::Node {
        self.g.play(n, m)
    }
    fn wins(&self, n: &G::Node, s: usize) -> bool {
        self.g.wins(n, s)
    }
    fn cards_in_play(&self) -> usize {
        self.g.cards_in_play()
    }
}

/// SWO payoff of each root move of a maximizer-on-play game.
pub fn swo_move_scores<G: ImperfectGame>(
    g: &G,
    order: &[usize],
    weights: &[f64],
    iterations: usize,
    gen: Option<Generalizer<'_>>,
) -> Result<Vec<(G::Move, f64)>, SdError> {
    let root = g.root();
    let mut out = Vec::new();
    for m in g.max_moves(&root) {
        let c = Committed { g, first: m.clone() };
        out.push((m, swo_select(&c, order, weights, iterations, gen)?.payoff));
    }
    Ok(out)
}

/// Public state of a bridge hand from the declaring side's view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BridgeNode {
    /// Visible hands hold their cards; hidden hands are always empty here.
    pub st: PlayState,
    /// Cards each seat has played so far.
    pub played: [CardSet; 4],
}

/// Declarer play with both defenders' hands hidden. Each situation is a
/// complete layout of the defenders' cards.
#[derive(Debug, Clone)]
pub struct BridgeImperfect {
    pub start: PlayState,
    pub declarer: Side,
    /// Tricks the declaring side needs in total.
    pub target: u8,
    pub layouts: Vec<Deal>,
}

impl BridgeImperfect {
    /// `layouts` must agree with `start` on the declaring side's hands and on
    /// the set of hidden cards. `start` must be at the start of a trick.
    pub fn new(start: PlayState, declarer: Side, target: u8, layouts: Vec<Deal>) -> Result<Self, SdError> {
        if layouts.is_empty() {
            return Err(SdError::EmptyUniverse);
        }
        let hidden = declarer.other().seats();
        let pool = start.hand(hidden[0]).union(start.hand(hidden[1]));
        for (i, d) in layouts.iter().enumerate() {
            let bad = |reason: &str| SdError::BadSituation { index: i, reason: reason.into() };
            for seat in declarer.seats() {
                if d.hand(seat) != start.hand(seat) {
                    return Err(bad("visible hand differs"));
                }
            }
            if d.hand(hidden[0]).union(d.hand(hidden[1])) != pool {
                return Err(bad("hidden cards differ"));
            }
            if d.hand(hidden[0]).len() != start.hand(hidden[0]).len() {
                return Err(bad("hidden hand sizes differ"));
            }
        }
        if start.trick_len() != 0 {
            return Err(SdError::BadSituation { index: 0, reason: "start must be between tricks".into() });
        }
        Ok(BridgeImperfect { start, declarer, target, layouts })
    }

    /// Every split of the hidden cards with the hidden hands' current sizes.
    pub fn all_layouts(start: &PlayState, declarer: Side) -> Vec<Deal> {
        let [h0, h1] = declarer.other().seats();
        let pool: Vec<Card> = start.hand(h0).union(start.hand(h1)).iter().collect();
        let k = start.hand(h0).len();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << pool.len()) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let mut hands = start.hands;
            hands[h0.index()] =
                CardSet::from_cards(pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, c)| *c));
            hands[h1.index()] =
                CardSet::from_cards(pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, c)| *c));
            out.push(Deal { hands });
        }
        out.sort_by_key(|d| std::cmp::Reverse(d.hand(h0).0));
        out
    }

    fn hidden(&self) -> [Seat; 2] {
        self.declarer.other().seats()
    }

    /// The full state in situation `s`.
    pub fn concrete(&self, n: &BridgeNode, s: usize) -> PlayState {
        let mut st = n.st;
        for h in self.hidden() {
            st.hands[h.index()] = self.layouts[s].hand(h).difference(n.played[h.index()]);
        }
        st
    }

    /// `A ⊕ {s}`: widen the first defender's length interval in one suit by
    /// one to take in `s`, then collect every layout inside the widened box.
    pub fn widen(&self, a: &SituationSet, s: usize) -> Option<SituationSet> {
        if a.is_empty() {
            return None;
        }
        let h0 = self.hidden()[0];
        let lens = |i: usize| Suit::ALL.map(|su| self.layouts[i].hand(h0).suit_len(su));
        let mut lo = [usize::MAX; 4];
        let mut hi = [0usize; 4];
        for i in a.iter() {
            let l = lens(i);
            for k in 0..4 {
                lo[k] = lo[k].min(l[k]);
                hi[k] = hi[k].max(l[k]);
            }
        }
        let ls = lens(s);
        let mut widened = 0;
        for k in 0..4 {
            if ls[k] + 1 == lo[k] {
                lo[k] = ls[k];
                widened += 1;
            } else if ls[k] == hi[k] + 1 {
                hi[k] = ls[k];
                widened += 1;
            } else if ls[k] < lo[k] || ls[k] > hi[k] {
                return None;
            }
        }
        if widened != 1 {
            return None;
        }
        let mut out = a.clone();
        for i in 0..self.layouts.len() {
            let l = lens(i);
            if (0..4).all(|k| lo[k] <= l[k] && l[k] <= hi[k]) {
                out.insert(i);
            }
        }
        Some(out)
    }
}

impl ImperfectGame for BridgeImperfect {
    type Node = BridgeNode;
    type Move = Card;

    fn universe_size(&self) -> usize {
        self.layouts.len()
    }

    fn root(&self) -> BridgeNode {
        let mut st = self.start;
        for h in self.hidden() {
            st.hands[h.index()] = CardSet::EMPTY;
        }
        BridgeNode { st, played: [CardSet::EMPTY; 4] }
    }

    fn turn(&self, n: &BridgeNode) -> Turn {
        let visible_empty = self.declarer.seats().iter().all(|s| n.st.hand(*s).is_empty());
        if visible_empty && n.st.trick_len() == 0 {
            Turn::Terminal
        } else if n.st.to_act().side() == self.declarer {
            Turn::Max
        } else {
            Turn::Min
        }
    }

    fn max_moves(&self, n: &BridgeNode) -> Vec<Card> {
        n.st.legal_set().iter().collect()
    }

    fn min_moves(&self, n: &BridgeNode, s: usize) -> Vec<Card> {
        self.concrete(n, s).legal_set().iter().collect()
    }

    fn play(&self, n: &BridgeNode, m: &Card) -> BridgeNode {
        let seat = n.st.to_act();
        let mut next = BridgeNode { st: n.st.play_unchecked(*m), played: n.played };
        next.played[seat.index()].insert(*m);
        next
    }

    fn wins(&self, n: &BridgeNode, _s: usize) -> bool {
        n.st.tricks_won[self.declarer.index()] >= self.target
    }

    fn cards_in_play(&self) -> usize {
        self.start.cards_in_play().len()
    }
}

/// A scripted imperfect-information game: explicit nodes, minimizer edges
/// tagged with the situations where they are legal.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedImperfect {
    pub n: usize,
    pub nodes: Vec<ImperfectNode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImperfectNode {
    pub label: String,
    pub turn: Turn,
    /// `(move label, child index, situations where legal)`.
    pub edges: Vec<(String, usize, SituationSet)>,
    /// Situations won, at terminals.
    pub wins: SituationSet,
}

impl ScriptedImperfect {
    pub fn new(n: usize) -> Self {
        ScriptedImperfect { n, nodes: Vec::new() }
    }

    pub fn add(&mut self, label: &str, turn: Turn, wins: SituationSet) -> usize {
        self.nodes.push(ImperfectNode { label: label.into(), turn, edges: Vec::new(), wins });
        self.nodes.len() - 1
    }

    pub fn edge(&mut self, from: usize, label: &str, to: usize, legal: SituationSet) {
        self.nodes[from].edges.push((label.into(), to, legal));
    }

    /// Move index of the edge labelled `label` at `node`.
    pub fn move_named(&self, node: usize, label: &str) -> Option<usize> {
        self.nodes[node].edges.iter().position(|e| e.0 == label)
    }
}

impl ImperfectGame for ScriptedImperfect {
    type Node = usize;
    type Move = usize;

    fn universe_size(&self) -> usize {
        self.n
    }
    fn root(&self) -> usize {
        0
    }
    fn turn(&self, n: &usize) -> Turn {
        self.nodes[*n].turn
    }
    fn max_moves(&self, n: &usize) -> Vec<usize> {
        (0..self.nodes[*n].edges.len()).collect()
    }
    fn min_moves(&self, n: &usize, s: usize) -> Vec<usize> {
        self.nodes[*n].edges.iter().enumerate().filter(|(_, e)| e.2.contains(s)).map(|(i, _)| i).collect()
    }
    fn play(&self, n: &usize, m: &usize) -> usize {
        self.nodes[*n].edges[*m].1
    }
    fn wins(&self, n: &usize, s: usize) -> bool {
        self.nodes[*n].wins.contains(s)
    }
}
