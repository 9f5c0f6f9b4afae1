//! Double-dummy solving: every hand visible, value = declarer-side tricks.

use std::fmt::Debug;
use std::marker::PhantomData;
use std::time::{Duration, Instant};

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{zero_window_solve, AlphaBeta, Eval, Game, GameError, Probe, ScalarAlgebra};
use crate::model::{winning_index, Card, CardSet, Deal, ModelError, PlayState, RankSet, Seat, Side, Suit};
use crate::partition::{BridgePartition, PartitionSearch};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DdError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0} holds no cards")]
    EmptyLeader(Seat),
    #[error("deal size {0} is not a multiple of 4 between 4 and 52")]
    BadSize(usize),
    #[error("thread pool: {0}")]
    Threads(String),
}

/// Perfect-information trick play. The declaring side maximizes its total
/// tricks; the last trick is scored without being searched.
#[derive(Debug, Clone)]
pub struct DdGame<F> {
    pub start: PlayState,
    pub declarer: Side,
    _f: PhantomData<F>,
}

impl<F> DdGame<F> {
    pub fn new(start: PlayState, declarer: Side) -> Self {
        DdGame { start, declarer, _f: PhantomData }
    }

    /// Declarer tricks if `p` is terminal: play over, or one card each at the
    /// start of a trick.
    pub fn final_value(&self, p: &PlayState) -> Option<u8> {
        if p.trick_len() != 0 {
            return None;
        }
        let won = p.tricks_won[self.declarer.index()];
        if p.hands.iter().all(|h| h.is_empty()) {
            return Some(won);
        }
        if p.hands.iter().all(|h| h.len() == 1) {
            let cards: Vec<Card> = (0..4).map(|k| p.hand(p.leader.offset(k)).iter().next().unwrap()).collect();
            let w = p.leader.offset(winning_index(&cards, p.trump));
            return Some(won + (w.side() == self.declarer) as u8);
        }
        None
    }
}

impl<F: Float + Debug> Game for DdGame<F> {
    type Pos = PlayState;
    type Value = F;

    fn initial(&self) -> PlayState {
        self.start
    }

    /// Suit order, then rank descending.
    fn successors(&self, p: &PlayState) -> Vec<PlayState> {
        if self.final_value(p).is_some() {
            return Vec::new();
        }
        p.legal_set().iter().map(|c| p.play_unchecked(c)).collect()
    }

    fn eval(&self, p: &PlayState) -> Eval<F> {
        match self.final_value(p) {
            Some(v) => Eval::Value(F::from(v).unwrap()),
            None if p.to_act().side() == self.declarer => Eval::Max,
            None => Eval::Min,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plain,
    Partition,
    Both,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Mode::Plain),
            "partition" => Ok(Mode::Partition),
            "both" => Ok(Mode::Both),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    /// Total tricks for the declaring side.
    pub tricks: u8,
    pub nodes_plain: Option<u64>,
    pub nodes_partition: Option<u64>,
    #[serde(skip)]
    pub elapsed: Duration,
    /// `(threshold, tricks > threshold)` for each probe.
    pub probe_trace: Vec<(i64, bool)>,
}

fn probe_bound<F: Float>(v: F, e: i64) -> Probe {
    let bound = v.to_i64().unwrap();
    Probe { above: bound > e, bound }
}

/// Declarer tricks by zero-window probes with plain alpha-beta.
/// Returns `(tricks, trace, nodes)`.
pub fn solve_plain<F: Float + Debug>(st: &PlayState, declarer: Side) -> Result<(u8, Vec<(i64, bool)>, u64), DdError> {
    let g = DdGame::<F>::new(*st, declarer);
    let alg = ScalarAlgebra::new(F::zero(), F::from(13).unwrap());
    let mut ab = AlphaBeta::new(&g, &alg);
    let (lo, hi) = bounds(st, declarer);
    let r = zero_window_solve(lo, hi, |e| {
        let v = ab.search(st, &F::from(e).unwrap(), &F::from(e + 1).unwrap())?;
        Ok::<_, DdError>(probe_bound(v, e))
    })?;
    Ok((r.value as u8, r.trace, ab.stats.nodes))
}

/// Declarer tricks by zero-window probes with partition search.
pub fn solve_partition<F: Float + Debug>(
    st: &PlayState,
    declarer: Side,
) -> Result<(u8, Vec<(i64, bool)>, u64), DdError> {
    let g = DdGame::<F>::new(*st, declarer);
    let alg = ScalarAlgebra::new(F::zero(), F::from(13).unwrap());
    let sys = BridgePartition;
    let mut ps = PartitionSearch::new(&g, &alg, &sys);
    let (lo, hi) = bounds(st, declarer);
    let r = zero_window_solve(lo, hi, |e| {
        let (v, _) = ps.search(st, &F::from(e).unwrap(), &F::from(e + 1).unwrap())?;
        Ok::<_, DdError>(probe_bound(v, e))
    })?;
    Ok((r.value as u8, r.trace, ps.stats.nodes))
}

fn bounds(st: &PlayState, declarer: Side) -> (i64, i64) {
    let won = st.tricks_won[declarer.index()] as i64;
    (won, won + st.remaining_tricks() as i64)
}

/// Exact declarer tricks by exhaustive minimax, the oracle for the searches.
/// No pruning. Positions between tricks are cached on everything but the
/// tricks already won, so the cache holds tricks still to come; mid-trick
/// positions never transpose and are not cached.
pub fn solve_minimax(st: &PlayState, declarer: Side) -> Result<u8, DdError> {
    fn rec(g: &DdGame<f64>, p: &PlayState, memo: &mut FxHashMap<PlayState, u8>) -> Result<u8, DdError> {
        let d = g.declarer.index();
        let won = p.tricks_won[d];
        if let Some(v) = g.final_value(p) {
            return Ok(v - won);
        }
        let boundary = p.trick_len() == 0;
        let mut key = *p;
        key.tricks_won = [0, 0];
        if boundary {
            if let Some(&v) = memo.get(&key) {
                return Ok(v);
            }
        }
        let max = p.to_act().side() == g.declarer;
        let mut best: Option<u8> = None;
        for c in p.legal_set().iter() {
            let q = p.play_unchecked(c);
            let v = rec(g, &q, memo)? + q.tricks_won[d] - won;
            best = Some(match best {
                None => v,
                Some(b) if max => b.max(v),
                Some(b) => b.min(v),
            });
        }
        let v = best.ok_or_else(|| GameError::NoMoves(format!("{p:?}")))?;
        if boundary {
            memo.insert(key, v);
        }
        Ok(v)
    }
    let g = DdGame::<f64>::new(*st, declarer);
    let mut memo = FxHashMap::default();
    Ok(st.tricks_won[declarer.index()] + rec(&g, st, &mut memo)?)
}

/// Solve a deal from its opening lead.
pub fn solve_dd(
    deal: &Deal,
    trump: Option<Suit>,
    leader: Seat,
    declarer: Side,
    mode: Mode,
) -> Result<SolveResult, DdError> {
    Deal::new(deal.hands)?;
    if deal.hand(leader).is_empty() && deal.size() > 0 {
        return Err(DdError::EmptyLeader(leader));
    }
    let st = PlayState::new(deal, trump, leader);
    solve_state(&st, declarer, mode)
}

/// Solve from an arbitrary play state (which may be mid-trick).
pub fn solve_state(st: &PlayState, declarer: Side, mode: Mode) -> Result<SolveResult, DdError> {
    let t0 = Instant::now();
    let (mut tricks, mut trace) = (0, Vec::new());
    let (mut nodes_plain, mut nodes_partition) = (None, None);
    if matches!(mode, Mode::Plain | Mode::Both) {
        let (t, tr, n) = solve_plain::<f64>(st, declarer)?;
        (tricks, trace, nodes_plain) = (t, tr, Some(n));
    }
    if matches!(mode, Mode::Partition | Mode::Both) {
        let (t, tr, n) = solve_partition::<f64>(st, declarer)?;
        (tricks, trace, nodes_partition) = (t, tr, Some(n));
    }
    Ok(SolveResult { tricks, nodes_plain, nodes_partition, elapsed: t0.elapsed(), probe_trace: trace })
}

/// A random deal of `size` cards using the top `size / 4` ranks.
pub fn random_deal<R: Rng>(size: usize, rng: &mut R) -> Result<Deal, DdError> {
    if !size.is_multiple_of(4) || !(4..=52).contains(&size) {
        return Err(DdError::BadSize(size));
    }
    let mut cards: Vec<Card> = CardSet::full_ranks(RankSet::top(size / 4)).iter().collect();
    cards.shuffle(rng);
    let mut hands = [CardSet::EMPTY; 4];
    for (i, c) in cards.into_iter().enumerate() {
        hands[i % 4].insert(c);
    }
    Ok(Deal { hands })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub deal_id: u64,
    pub size: usize,
    pub nodes_plain: u64,
    pub nodes_partition: u64,
}

/// Deal, strain and opening leader for benchmark deal `id`.
pub fn bench_case(seed: u64, id: u64, size: usize) -> Result<(Deal, Option<Suit>, Seat), DdError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    let deal = random_deal(size, &mut rng)?;
    let strain = rng.random_range(0..5);
    let trump = (strain < 4).then(|| Suit::from_index(strain));
    let leader = Seat::from_index(rng.random_range(0..4));
    Ok((deal, trump, leader))
}

/// Node counts of plain and partition search on `n_deals` random deals per size.
/// Rows come back in `(size, deal)` order whatever the thread count.
pub fn bench_scaling(n_deals: usize, sizes: &[usize], seed: u64, threads: usize) -> Result<Vec<BenchRow>, DdError> {
    use rayon::prelude::*;
    let jobs: Vec<(u64, usize)> = sizes
        .iter()
        .enumerate()
        .flat_map(|(si, &size)| (0..n_deals).map(move |d| ((si * n_deals + d) as u64, size)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| DdError::Threads(e.to_string()))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(id, size)| {
                let (deal, trump, leader) = bench_case(seed, id, size)?;
                let r = solve_dd(&deal, trump, leader, Side::NS, Mode::Both)?;
                Ok(BenchRow {
                    deal_id: id,
                    size,
                    nodes_plain: r.nodes_plain.unwrap_or(0),
                    nodes_partition: r.nodes_partition.unwrap_or(0),
                })
            })
            .collect()
    })
}

/// Least-squares fit of `ln(partition) = ln(a) + b ln(plain)`. Returns `(a, b)`,
/// or `None` with fewer than two distinct plain counts.
pub fn fit_exponent(rows: &[BenchRow]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.nodes_plain > 0 && r.nodes_partition > 0)
        .map(|r| ((r.nodes_plain as f64).ln(), (r.nodes_partition as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    Some(((my - b * mx).exp(), b))
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_deal;

    #[test]
    fn four_aces_take_the_only_trick() {
        let d = parse_deal("N:A.-.-.- K.-.-.- -.A.-.- Q.-.-.-").unwrap();
        let r = solve_dd(&d, None, Seat::North, Side::NS, Mode::Both).unwrap();
        assert_eq!(r.tricks, 1);
    }

    #[test]
    fn all_and_nothing() {
        let d = parse_deal("N:AKQ.-.-.- 432.-.-.- JT9.-.-.- 876.-.-.-").unwrap();
        assert_eq!(solve_dd(&d, None, Seat::North, Side::NS, Mode::Both).unwrap().tricks, 3);
        assert_eq!(solve_dd(&d, None, Seat::North, Side::EW, Mode::Both).unwrap().tricks, 0);
    }

    #[test]
    fn sides_sum_to_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let d = random_deal(16, &mut rng).unwrap();
            let ns = solve_dd(&d, Some(Suit::Spades), Seat::West, Side::NS, Mode::Partition).unwrap().tricks;
            let ew = solve_dd(&d, Some(Suit::Spades), Seat::West, Side::EW, Mode::Partition).unwrap().tricks;
            assert_eq!(ns + ew, 4);
        }
    }

    #[test]
    fn modes_agree_with_minimax() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..30 {
            let d = random_deal(12 + 4 * (i % 3), &mut rng).unwrap();
            let trump = if i % 2 == 0 { None } else { Some(Suit::Hearts) };
            let st = PlayState::new(&d, trump, Seat::East);
            let exact = solve_minimax(&st, Side::NS).unwrap();
            let r = solve_dd(&d, trump, Seat::East, Side::NS, Mode::Both).unwrap();
            assert_eq!(r.tricks, exact);
            assert_eq!(solve_plain::<f64>(&st, Side::NS).unwrap().0, exact);
            assert_eq!(solve_plain::<f32>(&st, Side::NS).unwrap().0, exact);
        }
    }

    #[test]
    fn trace_is_a_bisection() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = random_deal(20, &mut rng).unwrap();
        let r = solve_dd(&d, None, Seat::South, Side::EW, Mode::Partition).unwrap();
        assert!(r.probe_trace.len() <= 3);
        for &(e, above) in &r.probe_trace {
            assert_eq!(above, (r.tricks as i64) > e);
        }
    }

    #[test]
    fn rotation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let d = random_deal(16, &mut rng).unwrap();
        let base = solve_dd(&d, Some(Suit::Clubs), Seat::North, Side::NS, Mode::Plain).unwrap().tricks;
        let rot = d.rotate(1);
        let moved = solve_dd(&rot, Some(Suit::Clubs), Seat::East, Side::EW, Mode::Plain).unwrap().tricks;
        assert_eq!(base, moved);
    }

    #[test]
    fn empty_bench_has_no_fit() {
        let rows = bench_scaling(0, &[12, 16], 1, 1).unwrap();
        assert!(rows.is_empty());
        assert_eq!(fit_exponent(&rows), None);
    }

    #[test]
    fn bench_is_deterministic_across_threads() {
        let a = bench_scaling(3, &[12, 16], 9, 1).unwrap();
        let b = bench_scaling(3, &[12, 16], 9, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
    }

    #[test]
    fn fit_recovers_power_law() {
        let rows: Vec<BenchRow> = (1..20)
            .map(|i| {
                let x = (i * 100) as f64;
                BenchRow {
                    deal_id: i,
                    size: 12,
                    nodes_plain: x as u64,
                    nodes_partition: (2.0 * x.powf(0.75)).round() as u64,
                }
            })
            .collect();
        let (a, b) = fit_exponent(&rows).unwrap();
        assert!((b - 0.75).abs() < 0.01);
        assert!((a - 2.0).abs() < 0.1);
    }

    #[test]
    fn bad_sizes_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(random_deal(13, &mut rng).is_err());
        assert!(random_deal(56, &mut rng).is_err());
    }
}
