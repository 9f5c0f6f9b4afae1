//! Generic games, value algebras and the searches over them.
//!
//! A [`Game`] labels each position as a maximizer node, a minimizer node, or a
//! terminal carrying a value. Values live in an [`Algebra`] supplying join and
//! meet, so the same minimax and alpha-beta code serves real-valued games and
//! the set-valued games of the single-dummy solver.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};
use std::fmt::Debug;
use std::hash::{BuildHasher, Hash};
use std::marker::PhantomData;

use num_traits::Float;
use rustc_hash::{FxBuildHasher, FxHashMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("cycle detected at {0}")]
    Cycle(String),
    #[error("choice node {0} has no successors")]
    NoMoves(String),
    #[error("valued node {0} has successors")]
    ValuedInterior(String),
    #[error("window lower bound exceeds upper bound")]
    BadWindow,
    #[error("empty search interval [{lo}, {hi}]")]
    EmptyInterval { lo: i64, hi: i64 },
    #[error("inconsistent probe at threshold {threshold}: bound {bound} contradicts result {above}")]
    InconsistentProbe { threshold: i64, above: bool, bound: i64 },
    #[error("partition system contract violated: {0}")]
    PartitionContract(String),
}

/// Join, meet and the order they induce, plus a hashable key for table lookups.
pub trait Algebra {
    type Value: Clone + Debug + PartialEq;
    type Key: Clone + Eq + Hash + Debug;

    fn key(&self, v: &Self::Value) -> Self::Key;
    fn join(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn meet(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn bottom(&self) -> Self::Value;
    fn top(&self) -> Self::Value;

    /// `a ≤ b` iff `a ∨ b = b`.
    fn leq(&self, a: &Self::Value, b: &Self::Value) -> bool {
        &self.join(a, b) == b
    }
}

/// Real values in `[lo, hi]` under max and min.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarAlgebra<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Float> ScalarAlgebra<F> {
    pub fn new(lo: F, hi: F) -> Self {
        ScalarAlgebra { lo, hi }
    }

    /// The `[0, 1]` algebra of win/draw/loss games.
    pub fn unit() -> Self {
        ScalarAlgebra { lo: F::zero(), hi: F::one() }
    }
}

impl<F: Float + Debug> Algebra for ScalarAlgebra<F> {
    type Value = F;
    type Key = (u64, i16, i8);

    fn key(&self, v: &F) -> Self::Key {
        // -0 and +0 must share a key.
        let v = if v.is_zero() { F::zero() } else { *v };
        v.integer_decode()
    }
    fn join(&self, a: &F, b: &F) -> F {
        a.max(*b)
    }
    fn meet(&self, a: &F, b: &F) -> F {
        a.min(*b)
    }
    fn bottom(&self) -> F {
        self.lo
    }
    fn top(&self) -> F {
        self.hi
    }
    fn leq(&self, a: &F, b: &F) -> bool {
        a <= b
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eval<V> {
    Max,
    Min,
    Value(V),
}

pub trait Game {
    type Pos: Clone + Eq + Hash + Debug;
    type Value: Clone + Debug + PartialEq;

    fn initial(&self) -> Self::Pos;
    fn successors(&self, p: &Self::Pos) -> Vec<Self::Pos>;
    fn eval(&self, p: &Self::Pos) -> Eval<Self::Value>;
}

fn check_node<G: Game>(game: &G, p: &G::Pos, ev: &Eval<G::Value>, succ: &[G::Pos]) -> Result<(), GameError> {
    match ev {
        Eval::Value(_) if !succ.is_empty() => Err(GameError::ValuedInterior(format!("{p:?}"))),
        Eval::Max | Eval::Min if succ.is_empty() => Err(GameError::NoMoves(format!("{p:?}"))),
        _ => {
            let _ = game;
            Ok(())
        }
    }
}

/// Plain minimax: joins at maximizer nodes, meets at minimizer nodes.
pub fn minimax<G, A>(game: &G, alg: &A, p: &G::Pos) -> Result<G::Value, GameError>
where
    G: Game,
    A: Algebra<Value = G::Value>,
{
    let mut path = HashSet::new();
    minimax_rec(game, alg, p, &mut path)
}

fn minimax_rec<G, A>(game: &G, alg: &A, p: &G::Pos, path: &mut HashSet<G::Pos>) -> Result<G::Value, GameError>
where
    G: Game,
    A: Algebra<Value = G::Value>,
{
    let ev = game.eval(p);
    let succ = game.successors(p);
    check_node(game, p, &ev, &succ)?;
    if !path.insert(p.clone()) {
        return Err(GameError::Cycle(format!("{p:?}")));
    }
    let out = match ev {
        Eval::Value(v) => v,
        Eval::Max => {
            let mut acc = alg.bottom();
            for c in &succ {
                acc = alg.join(&acc, &minimax_rec(game, alg, c, path)?);
            }
            acc
        }
        Eval::Min => {
            let mut acc = alg.top();
            for c in &succ {
                acc = alg.meet(&acc, &minimax_rec(game, alg, c, path)?);
            }
            acc
        }
    };
    path.remove(p);
    Ok(out)
}

/// Minimax with every position's value cached. Same result as [`minimax`]
/// on any acyclic game, but usable on transposition-heavy games.
pub fn minimax_memo<G, A>(game: &G, alg: &A, p: &G::Pos) -> Result<G::Value, GameError>
where
    G: Game,
    A: Algebra<Value = G::Value>,
{
    let mut memo: FxHashMap<G::Pos, Option<G::Value>> = FxHashMap::default();
    memo_rec(game, alg, p, &mut memo)
}

fn memo_rec<G, A>(
    game: &G,
    alg: &A,
    p: &G::Pos,
    memo: &mut FxHashMap<G::Pos, Option<G::Value>>,
) -> Result<G::Value, GameError>
where
    G: Game,
    A: Algebra<Value = G::Value>,
{
    match memo.entry(p.clone()) {
        Entry::Occupied(e) => {
            // `None` marks a position still on the current path.
            return e.get().clone().ok_or_else(|| GameError::Cycle(format!("{p:?}")));
        }
        Entry::Vacant(e) => {
            e.insert(None);
        }
    }
    let ev = game.eval(p);
    let succ = game.successors(p);
    check_node(game, p, &ev, &succ)?;
    let out = match ev {
        Eval::Value(v) => v,
        Eval::Max => {
            let mut acc = alg.bottom();
            for c in &succ {
                acc = alg.join(&acc, &memo_rec(game, alg, c, memo)?);
            }
            acc
        }
        Eval::Min => {
            let mut acc = alg.top();
            for c in &succ {
                acc = alg.meet(&acc, &memo_rec(game, alg, c, memo)?);
            }
            acc
        }
    };
    memo.insert(p.clone(), Some(out.clone()));
    Ok(out)
}

/// How far cutoffs propagate down the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Prune {
    /// Full alpha-beta: bounds from every ancestor.
    #[default]
    Deep,
    /// Only the parent's bound is used.
    Shallow,
    /// No cutoffs at all.
    None,
}

/// Transposition table: unbounded, or a fixed number of slots where a new
/// entry replaces whatever hashed to the same slot.
#[derive(Debug, Clone)]
pub struct TransTable<K, V> {
    map: FxHashMap<K, V>,
    slots: Vec<Option<(K, V)>>,
}

impl<K: Eq + Hash + Clone, V: Clone> Default for TransTable<K, V> {
    fn default() -> Self {
        Self::unbounded()
    }
}

impl<K: Eq + Hash + Clone, V: Clone> TransTable<K, V> {
    pub fn unbounded() -> Self {
        TransTable { map: FxHashMap::default(), slots: Vec::new() }
    }

    pub fn with_capacity(slots: usize) -> Self {
        TransTable { map: FxHashMap::default(), slots: vec![None; slots.max(1)] }
    }

    fn slot(&self, k: &K) -> usize {
        (FxBuildHasher.hash_one(k) % self.slots.len() as u64) as usize
    }

    pub fn get(&self, k: &K) -> Option<&V> {
        if self.slots.is_empty() {
            return self.map.get(k);
        }
        match &self.slots[self.slot(k)] {
            Some((key, v)) if key == k => Some(v),
            _ => None,
        }
    }

    pub fn insert(&mut self, k: K, v: V) {
        if self.slots.is_empty() {
            self.map.insert(k, v);
        } else {
            let i = self.slot(&k);
            self.slots[i] = Some((k, v));
        }
    }

    pub fn len(&self) -> usize {
        if self.slots.is_empty() {
            self.map.len()
        } else {
            self.slots.iter().filter(|s| s.is_some()).count()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every stored `(key, value)` pair.
    pub fn entries(&self) -> Vec<(K, V)> {
        if self.slots.is_empty() {
            self.map.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
        } else {
            self.slots.iter().flatten().cloned().collect()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Invocations not answered by the table.
    pub nodes: u64,
    pub tt_hits: u64,
}

pub type MoveOrder<'a, P> = &'a dyn Fn(&P, &P) -> Ordering;

type AbKey<G, A> = (<G as Game>::Pos, <A as Algebra>::Key, <A as Algebra>::Key);

/// Alpha-beta search with a transposition table keyed by position and window.
pub struct AlphaBeta<'a, G: Game, A: Algebra<Value = G::Value>> {
    pub game: &'a G,
    pub alg: &'a A,
    pub tt: TransTable<AbKey<G, A>, G::Value>,
    pub prune: Prune,
    pub order: Option<MoveOrder<'a, G::Pos>>,
    pub stats: SearchStats,
}

impl<'a, G: Game, A: Algebra<Value = G::Value>> AlphaBeta<'a, G, A> {
    pub fn new(game: &'a G, alg: &'a A) -> Self {
        AlphaBeta {
            game,
            alg,
            tt: TransTable::unbounded(),
            prune: Prune::Deep,
            order: None,
            stats: SearchStats::default(),
        }
    }

    pub fn with_prune(mut self, prune: Prune) -> Self {
        self.prune = prune;
        self
    }

    pub fn with_table(mut self, tt: TransTable<AbKey<G, A>, G::Value>) -> Self {
        self.tt = tt;
        self
    }

    pub fn with_order(mut self, order: MoveOrder<'a, G::Pos>) -> Self {
        self.order = Some(order);
        self
    }

    /// Value of `p` within window `[x, y]`. Exact when the true value lies in
    /// the window; otherwise a bound on the violated side.
    pub fn search(&mut self, p: &G::Pos, x: &G::Value, y: &G::Value) -> Result<G::Value, GameError> {
        if !self.alg.leq(x, y) {
            return Err(GameError::BadWindow);
        }
        self.rec(p, x.clone(), y.clone())
    }

    fn successors(&self, p: &G::Pos) -> Vec<G::Pos> {
        let mut s = self.game.successors(p);
        if let Some(order) = self.order {
            s.sort_by(|a, b| order(a, b));
        }
        s
    }

    fn rec(&mut self, p: &G::Pos, x: G::Value, y: G::Value) -> Result<G::Value, GameError> {
        let key = (p.clone(), self.alg.key(&x), self.alg.key(&y));
        if let Some(v) = self.tt.get(&key) {
            self.stats.tt_hits += 1;
            return Ok(v.clone());
        }
        self.stats.nodes += 1;
        let ev = self.game.eval(p);
        let succ = self.successors(p);
        check_node(self.game, p, &ev, &succ)?;
        let alg = self.alg;
        let v_ans = match ev {
            Eval::Value(v) => v,
            Eval::Max => {
                let mut v_ans = alg.bottom();
                for c in &succ {
                    let (cx, cy) = match self.prune {
                        Prune::Deep => (alg.join(&v_ans, &x), y.clone()),
                        Prune::Shallow => (v_ans.clone(), alg.top()),
                        Prune::None => (alg.bottom(), alg.top()),
                    };
                    let v_new = self.rec(c, cx, cy)?;
                    v_ans = alg.join(&v_ans, &v_new);
                    if self.prune != Prune::None && alg.leq(&y, &v_ans) {
                        break;
                    }
                }
                v_ans
            }
            Eval::Min => {
                let mut v_ans = alg.top();
                for c in &succ {
                    let (cx, cy) = match self.prune {
                        Prune::Deep => (x.clone(), alg.meet(&v_ans, &y)),
                        Prune::Shallow => (alg.bottom(), v_ans.clone()),
                        Prune::None => (alg.bottom(), alg.top()),
                    };
                    let v_new = self.rec(c, cx, cy)?;
                    v_ans = alg.meet(&v_ans, &v_new);
                    if self.prune != Prune::None && alg.leq(&v_ans, &x) {
                        break;
                    }
                }
                v_ans
            }
        };
        self.tt.insert(key, v_ans.clone());
        Ok(v_ans)
    }
}

/// One-shot alpha-beta from `p` with window `[x, y]` and a fresh table.
pub fn alphabeta<G, A>(game: &G, alg: &A, p: &G::Pos, x: &G::Value, y: &G::Value) -> Result<G::Value, GameError>
where
    G: Game,
    A: Algebra<Value = G::Value>,
{
    AlphaBeta::new(game, alg).search(p, x, y)
}

/// Outcome of one boolean probe: is the value above the threshold, plus the
/// bound the search proved (a lower bound if above, an upper bound if not).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Probe {
    pub above: bool,
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroWindowResult {
    pub value: i64,
    /// `(threshold, value > threshold)` per probe, in order.
    pub trace: Vec<(i64, bool)>,
}

/// Binary search for an integer value in `[lo, hi]` using probes of the form
/// "is the value greater than e?".
pub fn zero_window_solve<E>(
    lo: i64,
    hi: i64,
    mut probe: impl FnMut(i64) -> Result<Probe, E>,
) -> Result<ZeroWindowResult, E>
where
    E: From<GameError>,
{
    if lo > hi {
        return Err(GameError::EmptyInterval { lo, hi }.into());
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut trace = Vec::new();
    while lo < hi {
        let e = lo + (hi - lo) / 2;
        let r = probe(e)?;
        trace.push((e, r.above));
        let bad = GameError::InconsistentProbe { threshold: e, above: r.above, bound: r.bound };
        if r.above {
            if r.bound <= e {
                return Err(bad.into());
            }
            lo = lo.max(r.bound);
        } else {
            if r.bound > e {
                return Err(bad.into());
            }
            hi = hi.min(r.bound);
        }
        if lo > hi {
            return Err(bad.into());
        }
    }
    Ok(ZeroWindowResult { value: lo, trace })
}

/// The `{0, 1}` game of an integer-valued game: a terminal scores 1 when its
/// value exceeds the threshold.
pub struct ThresholdGame<'a, G, F> {
    pub inner: &'a G,
    pub threshold: i64,
    _f: PhantomData<F>,
}

impl<'a, G, F> ThresholdGame<'a, G, F> {
    pub fn new(inner: &'a G, threshold: i64) -> Self {
        ThresholdGame { inner, threshold, _f: PhantomData }
    }
}

impl<'a, G, F> Game for ThresholdGame<'a, G, F>
where
    G: Game<Value = F>,
    F: Float + Debug,
{
    type Pos = G::Pos;
    type Value = F;

    fn initial(&self) -> G::Pos {
        self.inner.initial()
    }
    fn successors(&self, p: &G::Pos) -> Vec<G::Pos> {
        self.inner.successors(p)
    }
    fn eval(&self, p: &G::Pos) -> Eval<F> {
        match self.inner.eval(p) {
            Eval::Value(v) => {
                let t = F::from(self.threshold).unwrap();
                Eval::Value(if v > t { F::one() } else { F::zero() })
            }
            other => other,
        }
    }
}

/// Solve an integer-valued game by thresholding: each probe searches the
/// `{0, 1}` game with window `[0, 1]`.
pub fn threshold_solve<G, F>(game: &G, p: &G::Pos, lo: i64, hi: i64) -> Result<ZeroWindowResult, GameError>
where
    G: Game<Value = F>,
    F: Float + Debug,
{
    let alg = ScalarAlgebra::<F>::unit();
    zero_window_solve(lo, hi, |e| {
        let tg = ThresholdGame::new(game, e);
        let v = alphabeta(&tg, &alg, p, &F::zero(), &F::one())?;
        let above = v > F::zero();
        Ok::<_, GameError>(Probe { above, bound: if above { e + 1 } else { e } })
    })
}

/// A game given explicitly as a node list; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedGame<V> {
    pub nodes: Vec<ScriptedNode<V>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedNode<V> {
    pub id: String,
    pub eval: Eval<V>,
    pub children: Vec<usize>,
}

impl<V: Clone + Debug + PartialEq> Game for ScriptedGame<V> {
    type Pos = usize;
    type Value = V;

    fn initial(&self) -> usize {
        0
    }
    fn successors(&self, p: &usize) -> Vec<usize> {
        self.nodes[*p].children.clone()
    }
    fn eval(&self, p: &usize) -> Eval<V> {
        self.nodes[*p].eval.clone()
    }
}

impl<V> ScriptedGame<V> {
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixtureError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("unknown node id `{0}`")]
    UnknownId(String),
    #[error("fixture has no nodes")]
    Empty,
}

/// Parse the fixture format: one node per line, `id  MAX|MIN|value  child-ids...`.
/// Blank lines and `#` comments are ignored. The first node is the root.
pub fn parse_scripted<V>(
    text: &str,
    mut parse_value: impl FnMut(&str) -> Option<V>,
) -> Result<ScriptedGame<V>, FixtureError> {
    let mut raw: Vec<(usize, String, Eval<V>, Vec<String>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let id = parts.next().unwrap().to_string();
        let Some(kind) = parts.next() else {
            return Err(FixtureError::Line { line: i + 1, msg: "missing node kind".into() });
        };
        let eval = match kind {
            "MAX" => Eval::Max,
            "MIN" => Eval::Min,
            v => Eval::Value(
                parse_value(v).ok_or_else(|| FixtureError::Line { line: i + 1, msg: format!("bad value `{v}`") })?,
            ),
        };
        raw.push((i + 1, id, eval, parts.map(String::from).collect()));
    }
    if raw.is_empty() {
        return Err(FixtureError::Empty);
    }
    let index: HashMap<String, usize> = raw.iter().enumerate().map(|(k, r)| (r.1.clone(), k)).collect();
    let mut nodes = Vec::with_capacity(raw.len());
    for (_, id, eval, kids) in raw {
        let children = kids
            .iter()
            .map(|k| index.get(k).copied().ok_or_else(|| FixtureError::UnknownId(k.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        nodes.push(ScriptedNode { id, eval, children });
    }
    Ok(ScriptedGame { nodes })
}
