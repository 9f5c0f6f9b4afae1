//! One PASS/FAIL line per acceptance criterion, written straight to stderr
//! so they show without `--nocapture`. The test fails if any criterion fails.

mod common;

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trickster::dd::{bench_case, bench_scaling, fit_exponent, solve_minimax, solve_partition, solve_plain, DdGame};
use trickster::demo::{abcd_game, st_game, suit_tree_game, swo_scenario};
use trickster::game::{alphabeta, minimax, minimax_memo, AlphaBeta, Prune, ScalarAlgebra};
use trickster::lattice::{
    all_antichains, check_triple, law_suite, reduce, Antichain, AntichainAlgebra, SetAlgebra, SituationSet,
    SuitAlgebra, SuitMask,
};
use trickster::mc::{select_move, WeightedSample};
use trickster::model::{parse_deal, Card, PlayState, Seat, Side};
use trickster::sd::{
    brute_force_winsets, build_achievable, is_achievable, perfect_move_score, solve_imperfect, swo_move_scores,
    swo_select, verify_strategy, Achiever, BridgeImperfect, Committed, Generalizer, ImperfectGame, SdError,
};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

/// Four solvers agree on every seeded deal.
fn dd_solvers_agree() -> Outcome {
    let t0 = Instant::now();
    let sizes = [12, 16, 20, 24];
    let n = 1000;
    for id in 0..n {
        let size = sizes[id % 4];
        let (deal, trump, leader) = bench_case(11, id as u64, size).map_err(err)?;
        let st = PlayState::new(&deal, trump, leader);
        let oracle = solve_minimax(&st, Side::NS).map_err(err)?;
        let g = DdGame::<f64>::new(st, Side::NS);
        let alg = ScalarAlgebra::new(0.0, 13.0);
        let full = AlphaBeta::new(&g, &alg).search(&st, &0.0, &13.0).map_err(err)? as u8;
        let (zw, _, _) = solve_plain::<f64>(&st, Side::NS).map_err(err)?;
        let (part, _, _) = solve_partition::<f64>(&st, Side::NS).map_err(err)?;
        check(
            full == oracle && zw == oracle && part == oracle,
            format!("deal {id}: oracle {oracle}, full {full}, zero-window {zw}, partition {part}"),
        )?;
    }
    let el = t0.elapsed();
    check(el < Duration::from_secs(300), format!("took {el:?}"))?;
    Ok(format!("{n} deals agree in {:.1}s", el.as_secs_f64()))
}

/// Partition search visits no more nodes than plain search and scales
/// sublinearly in it.
fn partition_scaling() -> Outcome {
    let rows = bench_scaling(200, &[12, 16, 20, 24], 7, 1).map_err(err)?;
    let le = rows.iter().filter(|r| r.nodes_partition <= r.nodes_plain).count();
    let frac = le as f64 / rows.len() as f64;
    let (_, b) = fit_exponent(&rows).ok_or("no fit")?;
    check(frac >= 0.9, format!("partition <= plain on only {le}/{}", rows.len()))?;
    check(b <= 0.9, format!("exponent {b:.3}"))?;
    Ok(format!("partition <= plain on {le}/{}, exponent {b:.3}", rows.len()))
}

/// Antichains form a distributive lattice; the suit lattice does not.
fn lattice_laws() -> Outcome {
    let all = all_antichains(3);
    let rep = law_suite(&AntichainAlgebra { n: 3 }, &all);
    check(rep.all_pass(), format!("n = 3: {:?}", rep.first_violation()))?;

    let n = 10;
    let alg = AntichainAlgebra { n };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let random = |rng: &mut ChaCha8Rng| {
        let k = rng.random_range(0..5);
        let sets: Vec<SituationSet> = (0..k).map(|_| common::random_set(rng, n)).collect();
        reduce(n, sets).unwrap()
    };
    for i in 0..10_000 {
        let (a, b, c) = (random(&mut rng), random(&mut rng), random(&mut rng));
        let v = check_triple(&alg, &a, &b, &c);
        check(v.is_empty(), format!("triple {i}: {:?}", v.first()))?;
    }

    // Masks holding both ♣ and ♥ other than the top are not lattice elements.
    let masks: Vec<SuitMask> = (0..16).filter(|m| m & 10 != 10 || *m == 15).map(SuitMask).collect();
    let rep = law_suite(&SuitAlgebra, &masks);
    check(rep.lattice_laws_pass(), "suit lattice breaks a lattice law")?;
    check(!rep.distributive(), "suit lattice came out distributive")?;
    let v = check_triple(&SuitAlgebra, &SuitMask::HEART, &SuitMask::CLUB, &SuitMask::DIAMOND);
    let w = v.iter().find(|v| v.law.is_distributivity()).ok_or("(♥, ♣, ♦) is not a witness")?;
    Ok(format!("{} antichains exhaustive, 10000 random triples, suit witness {:?}", all.len(), w.law))
}

/// Alpha-beta equals minimax on random trees over three algebras, and deep
/// pruning goes wrong on the non-distributive suit tree.
fn alphabeta_matches_minimax() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let games = 500;
    for i in 0..games {
        let n = 4;
        let alg = AntichainAlgebra { n };
        let g = common::random_scripted(&mut rng, 6, 3, &mut |r: &mut ChaCha8Rng| {
            let k = r.random_range(0..3);
            reduce(n, (0..k).map(|_| common::random_set(r, n)).collect::<Vec<_>>()).unwrap()
        });
        let (bot, top) = (Antichain::empty(n), Antichain::top(n));
        let m = minimax(&g, &alg, &0).map_err(err)?;
        check(alphabeta(&g, &alg, &0, &bot, &top).map_err(err)? == m, format!("antichain game {i}"))?;

        let alg = SetAlgebra { n: 5 };
        let g = common::random_scripted(&mut rng, 6, 3, &mut |r: &mut ChaCha8Rng| common::random_set(r, 5));
        let m = minimax(&g, &alg, &0).map_err(err)?;
        let v = alphabeta(&g, &alg, &0, &SituationSet::empty(5), &SituationSet::full(5)).map_err(err)?;
        check(v == m, format!("set game {i}"))?;

        let alg = ScalarAlgebra::new(0.0, 10.0);
        let g = common::random_scripted(&mut rng, 6, 3, &mut |r: &mut ChaCha8Rng| r.random_range(0..=10) as f64);
        let m = minimax(&g, &alg, &0).map_err(err)?;
        check(alphabeta(&g, &alg, &0, &0.0, &10.0).map_err(err)? == m, format!("scalar game {i}"))?;
    }
    let g = suit_tree_game().map_err(err)?;
    let mm = minimax_memo(&g, &SuitAlgebra, &0).map_err(err)?;
    let deep = AlphaBeta::new(&g, &SuitAlgebra).search(&0, &SuitMask::NONE, &SuitMask::ALL).map_err(err)?;
    let shallow = AlphaBeta::new(&g, &SuitAlgebra)
        .with_prune(Prune::Shallow)
        .search(&0, &SuitMask::NONE, &SuitMask::ALL)
        .map_err(err)?;
    check(mm == SuitMask::CLUB, format!("minimax {mm}"))?;
    check(deep == SuitMask(SuitMask::CLUB.0 | SuitMask::DIAMOND.0), format!("deep {deep}"))?;
    check(shallow == mm, format!("shallow {shallow}"))?;
    Ok(format!("{games} games per algebra; suit tree minimax {mm}, deep {deep}"))
}

/// The lattice search equals brute-force strategy enumeration.
fn imperfect_matches_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 120;
    for i in 0..n {
        let g = common::random_bridge_imperfect(&mut rng, 8, 4);
        let v = solve_imperfect(&g).map_err(err)?;
        let b = brute_force_winsets(&g).map_err(err)?;
        check(v == b, format!("game {i}: search {v} brute force {b}"))?;
    }
    Ok(format!("{n} random 8-card games"))
}

fn set(n: usize, idx: &[usize]) -> SituationSet {
    SituationSet::from_indices(n, idx.iter().copied()).unwrap()
}

/// Guessing-game values, order dependence of the greedy build and the SWO fix.
fn st_scenario() -> Outcome {
    let v = solve_imperfect(&st_game(&[true, false], true)).map_err(err)?;
    check(v == Antichain::top(2), format!("with D: {v}"))?;
    let v = solve_imperfect(&st_game(&[true, false], false)).map_err(err)?;
    check(v.members() == [set(2, &[0]), set(2, &[1])], format!("without D: {v}"))?;

    let sc = swo_scenario();
    let s_first = build_achievable(&sc.game, &sc.order, None).map_err(err)?;
    let t_first = build_achievable(&sc.game, &[1, 2, 3, 4, 5, 0], None).map_err(err)?;
    check(s_first.members == set(6, &[0]), format!("S first built {}", s_first.members))?;
    check(t_first.members == set(6, &[1, 2, 3, 4, 5]), format!("T first built {}", t_first.members))?;

    let r = swo_select(&sc.game, &sc.order, &sc.weights, 10, None).map_err(err)?;
    check((r.payoff - 0.8).abs() < 1e-9, format!("payoff {}", r.payoff))?;
    check(r.best.members == set(6, &[1, 2, 3, 4, 5]), format!("best {}", r.best.members))?;
    Ok(format!("greedy 0.2 then SWO {:.1} after {} iterations", r.payoff, r.history.len()))
}

/// Perfect-information sampling cannot tell the deferring line from the
/// line that wins everywhere; achievable sets can.
fn deferring_line() -> Outcome {
    let k = 3;
    let g = abcd_game(k);
    let root = g.root();
    let moves = g.max_moves(&root);
    let sample = WeightedSample::uniform((0..2 * k).collect::<Vec<usize>>());
    let choice = select_move::<usize, usize, SdError>(&sample, &moves, |m, s| perfect_move_score(&g, &root, m, *s))
        .map_err(err)?;
    let scores: Vec<f64> = choice.scores.iter().map(|s| s / sample.total_weight()).collect();
    check(scores == [0.5, 0.5, 1.0, 1.0], format!("sampling scores {scores:?}"))?;

    let order: Vec<usize> = (0..2 * k).collect();
    let weights = vec![1.0 / (2 * k) as f64; 2 * k];
    let swo = swo_move_scores(&g, &order, &weights, 10, None).map_err(err)?;
    let d = g.move_named(root, "D").ok_or("no D")?;
    let (_, best) = swo[d];
    check(
        swo.iter().all(|(m, p)| *m == d || *p < best - 1e-9),
        format!("SWO scores {:?}", swo.iter().map(|x| x.1).collect::<Vec<_>>()),
    )?;

    let r = swo_select(&g, &order, &weights, 10, None).map_err(err)?;
    let full = SituationSet::full(2 * k);
    check(r.best.members == full, format!("best {}", r.best.members))?;
    let first = r.best.witness.choices.get(&(root, full)).ok_or("no root choice")?;
    check(*first == d, format!("root choice {}", g.nodes[root].edges[*first].0))?;
    Ok(format!(
        "sampling A B C D = {scores:?}; SWO = {:?}",
        swo.iter().map(|x| (x.1 * 100.0).round() / 100.0).collect::<Vec<_>>()
    ))
}

fn card(s: &str) -> Card {
    s.parse().unwrap()
}

/// The four-card ending: each layout makes two tricks double dummy and one
/// line makes them in both.
fn notrump_ending() -> Outcome {
    let layouts = [
        parse_deal("N:-.-.-.KJT8 -.-.J.AQ7 T.-.98.9 Q.-.-.642").map_err(err)?,
        parse_deal("N:-.-.-.KJT8 -.-.J.A76 T.-.98.9 Q.-.-.Q42").map_err(err)?,
    ];
    for (i, d) in layouts.iter().enumerate() {
        let st = PlayState::new(d, None, Seat::South);
        let t = solve_minimax(&st, Side::NS).map_err(err)?;
        check(t >= 2, format!("layout {i} makes {t}"))?;
    }
    let st = PlayState::new(&layouts[0], None, Seat::South);
    let g = BridgeImperfect::new(st, Side::NS, 2, layouts.to_vec()).map_err(err)?;
    let v = solve_imperfect(&g).map_err(err)?;
    check(v == Antichain::top(2), format!("value {v}"))?;
    let c = Committed { g: &g, first: card("D9") };
    let (ok, strat) = is_achievable(&c, &SituationSet::full(2));
    check(ok, "♦9 does not make two tricks in both layouts")?;
    check(verify_strategy(&c, &strat.ok_or("no witness")?, &SituationSet::full(2)), "witness fails")?;
    Ok("two tricks in both layouts after ♦9".into())
}

fn maximal_and_sound<G: ImperfectGame>(
    g: &G,
    seq: &[usize],
    gen: Option<Generalizer<'_>>,
    cover: &Antichain,
) -> Result<(), String> {
    let built = build_achievable(g, seq, gen).map_err(err)?;
    let a = &built.members;
    check(verify_strategy(g, &built.witness, a), format!("witness fails on {a}"))?;
    check(cover.covers(a), format!("{a} not under the game value {cover}"))?;
    let mut ach = Achiever::new(g);
    for s in seq {
        if !a.contains(*s) {
            let mut b = a.clone();
            b.insert(*s);
            check(!ach.achievable(&b), format!("{a} plus {s} is achievable"))?;
        }
    }
    check(built.failed.iter().all(|s| !a.contains(*s)), "a failed element was added later")
}

/// Greedily built sets are achievable, witnessed and maximal over the
/// sequence, with and without widening.
fn greedy_build_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pairs = 500;
    for i in 0..pairs {
        let g = common::random_bridge_imperfect(&mut rng, 12, 8);
        let n = g.universe_size();
        let len = rng.random_range(1..=n + 2);
        let seq: Vec<usize> = (0..len).map(|_| rng.random_range(0..n)).collect();
        let cover = solve_imperfect(&g).map_err(err)?;
        maximal_and_sound(&g, &seq, None, &cover).map_err(|e| format!("pair {i}: {e}"))?;
        let widen = |a: &SituationSet, s: usize| g.widen(a, s);
        maximal_and_sound(&g, &seq, Some(&widen), &cover).map_err(|e| format!("pair {i} widened: {e}"))?;
    }
    Ok(format!("{pairs} pairs, plain and widened"))
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

/// The same command with the same seed prints the same bytes.
fn cli_deterministic() -> Outcome {
    let cmds: Vec<Vec<String>> = [
        vec!["dd", "solve", "--deal", &fixture("finesse.txt"), "--leader", "S", "--mode", "both"],
        vec!["dd", "bench", "--deals", "5", "--sizes", "12,16"],
        vec!["sd", "solve", "--deal", &fixture("ending.txt"), "--leader", "S", "--target", "2"],
        vec!["sd", "plan", "--deal", &fixture("ending.txt"), "--leader", "S", "--target", "2", "--generate", "8"],
        vec!["mc", "play", "--deal", &fixture("play16.txt"), "--seat", "S", "--visible", "N", "--samples", "12"],
        vec!["mc", "bid", "--hand", "AKQ.AK.98.87", "--db", &fixture("toy.db"), "--extra", "2NT", "--samples", "4"],
    ]
    .iter()
    .map(|c| c.iter().map(|s| s.to_string()).collect())
    .collect();
    for c in &cmds {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_trickster"))
                .args(["--seed", "42", "--threads", "1"])
                .args(c)
                .output()
                .map_err(err)
        };
        let (a, b) = (run()?, run()?);
        let name = c[..2].join(" ");
        check(a.status.success(), format!("{name} failed: {}", String::from_utf8_lossy(&a.stderr)))?;
        check(a.stdout == b.stdout, format!("{name} differs between runs"))?;
        check(!a.stdout.is_empty(), format!("{name} printed nothing"))?;
    }
    Ok(format!("{} commands byte-identical", cmds.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("double-dummy solvers agree", dd_solvers_agree),
        ("partition search scaling", partition_scaling),
        ("lattice laws", lattice_laws),
        ("alpha-beta equals minimax", alphabeta_matches_minimax),
        ("lattice search equals brute force", imperfect_matches_brute_force),
        ("guessing game and SWO", st_scenario),
        ("deferred guess vs sampling", deferring_line),
        ("notrump ending", notrump_ending),
        ("greedy achievable sets", greedy_build_properties),
        ("CLI determinism", cli_deterministic),
    ];
    let mut failed = Vec::new();
    let mut log = std::io::stderr();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        match f() {
            Ok(detail) => {
                writeln!(log, "PASS {} {name}: {detail} [{:.1}s]", i + 1, t0.elapsed().as_secs_f64()).unwrap()
            }
            Err(e) => {
                writeln!(log, "FAIL {} {name}: {e}", i + 1).unwrap();
                failed.push(i + 1);
            }
        }
        if i == 7 {
            writeln!(log, "SKIP 8b full 52-card deal: exact single-dummy search is out of reach at that size").unwrap();
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
