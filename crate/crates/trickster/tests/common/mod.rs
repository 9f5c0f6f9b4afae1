#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use trickster::game::{Eval, ScriptedGame, ScriptedNode};
use trickster::lattice::SituationSet;
use trickster::model::{CardSet, Deal, PlayState, RankSet, Seat, Side, Suit};
use trickster::sd::{BridgeImperfect, ScriptedImperfect, Turn};

/// A random tree with at most `depth` plies and 1..=`branch` children per
/// interior node. Leaves draw from `leaf`.
pub fn random_scripted<V, R: Rng>(
    rng: &mut R,
    depth: usize,
    branch: usize,
    leaf: &mut impl FnMut(&mut R) -> V,
) -> ScriptedGame<V> {
    let mut nodes = Vec::new();
    let max_first = rng.random_bool(0.5);
    grow(rng, depth, branch, max_first, leaf, &mut nodes);
    ScriptedGame { nodes }
}

fn grow<V, R: Rng>(
    rng: &mut R,
    depth: usize,
    branch: usize,
    max: bool,
    leaf: &mut impl FnMut(&mut R) -> V,
    nodes: &mut Vec<ScriptedNode<V>>,
) -> usize {
    let id = nodes.len();
    if depth == 0 || (id > 0 && rng.random_bool(0.2)) {
        nodes.push(ScriptedNode { id: format!("n{id}"), eval: Eval::Value(leaf(rng)), children: vec![] });
        return id;
    }
    let eval = if max { Eval::Max } else { Eval::Min };
    nodes.push(ScriptedNode { id: format!("n{id}"), eval, children: vec![] });
    let k = rng.random_range(1..=branch);
    for _ in 0..k {
        let c = grow(rng, depth - 1, branch, !max, leaf, nodes);
        nodes[id].children.push(c);
    }
    id
}

pub fn random_set<R: Rng>(rng: &mut R, n: usize) -> SituationSet {
    SituationSet::from_mask(n, rng.random_range(0..1u64 << n))
}

/// A random imperfect-information tree over `n` situations. Every situation
/// has a legal reply at every minimizer node.
pub fn random_imperfect<R: Rng>(rng: &mut R, n: usize, depth: usize) -> ScriptedImperfect {
    let mut g = ScriptedImperfect::new(n);
    grow_imperfect(rng, &mut g, n, depth, true);
    g
}

fn grow_imperfect<R: Rng>(rng: &mut R, g: &mut ScriptedImperfect, n: usize, depth: usize, max: bool) -> usize {
    if depth == 0 || (!g.nodes.is_empty() && rng.random_bool(0.2)) {
        let wins = random_set(rng, n);
        return g.add("leaf", Turn::Terminal, wins);
    }
    let turn = if max { Turn::Max } else { Turn::Min };
    let id = g.add("node", turn, SituationSet::empty(n));
    let k = rng.random_range(1..=3);
    let mut legal: Vec<SituationSet> =
        (0..k).map(|_| if max { SituationSet::full(n) } else { random_set(rng, n) }).collect();
    for s in 0..n {
        if !legal.iter().any(|l| l.contains(s)) {
            let e = rng.random_range(0..k);
            legal[e].insert(s);
        }
    }
    for (e, l) in legal.into_iter().enumerate() {
        let c = grow_imperfect(rng, g, n, depth - 1, !max);
        g.edge(id, &format!("m{e}"), c, l);
    }
    id
}

/// A deal of `size` cards from the top ranks.
pub fn random_small_deal<R: Rng>(rng: &mut R, size: usize) -> Deal {
    let mut cards: Vec<_> = CardSet::full_ranks(RankSet::top(size / 4)).iter().collect();
    cards.shuffle(rng);
    let mut hands = [CardSet::EMPTY; 4];
    for (i, c) in cards.into_iter().enumerate() {
        hands[i % 4].insert(c);
    }
    Deal { hands }
}

/// Declarer play on a random deal of `size` cards with a random subset of at
/// most `max_s` layouts of the defenders' cards.
pub fn random_bridge_imperfect<R: Rng>(rng: &mut R, size: usize, max_s: usize) -> BridgeImperfect {
    let deal = random_small_deal(rng, size);
    let trump = [None, Some(Suit::Spades), Some(Suit::Hearts)][rng.random_range(0..3)];
    let leader = Seat::ALL[rng.random_range(0..4)];
    let st = PlayState::new(&deal, trump, leader);
    let mut layouts = BridgeImperfect::all_layouts(&st, Side::NS);
    layouts.shuffle(rng);
    layouts.truncate(rng.random_range(1..=max_s));
    let target = rng.random_range(1..=(size / 4) as u8);
    BridgeImperfect::new(st, Side::NS, target, layouts).expect("layouts agree with the deal")
}
