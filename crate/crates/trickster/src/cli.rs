//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 engine error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dd::{bench_scaling, fit_exponent, solve_dd, write_csv, BenchRow, Mode, SolveResult};
use crate::lattice::SituationSet;
use crate::mc::{
    candidates, dd_auction_score, dd_card_score, parse_auction, parse_constraints, sample_deals, select_bid,
    select_move, BidConfig, DealConstraint, ToyDb, WeightedSample,
};
use crate::model::{parse_deal, parse_hand, parse_strain, CardSet, Deal, PlayState, RankSet, Seat, Side, Suit};
use crate::sd::{
    perfect_info_value, solve_imperfect, swo_select, BridgeImperfect, Generalizer, ImperfectGame, SdError,
};

#[derive(Debug, Parser)]
#[command(
    name = "trickster",
    version,
    about = "Game-tree search for trick-taking card games",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Emit JSON records instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads. Node counts are reproducible at 1.
    #[arg(long, global = true, env = "TRICKSTER_THREADS", default_value_t = 1)]
    pub threads: usize,
    /// Seed for every random choice in the run.
    #[arg(long, global = true, env = "TRICKSTER_SEED", default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Double-dummy (perfect information) solving.
    #[command(subcommand, arg_required_else_help = true)]
    Dd(DdCmd),
    /// Single-dummy solving with hidden defender hands.
    #[command(subcommand, arg_required_else_help = true)]
    Sd(SdCmd),
    /// Monte Carlo card play and bidding.
    #[command(subcommand, arg_required_else_help = true)]
    Mc(McCmd),
}

#[derive(Debug, Args)]
pub struct PlaySetup {
    /// File holding a deal such as `N:AK.-.-.- ...` on its first line.
    #[arg(long)]
    pub deal: PathBuf,
    /// Trump suit: S, H, D, C or NT.
    #[arg(long, default_value = "NT")]
    pub trump: String,
    /// Seat on lead.
    #[arg(long, default_value = "W")]
    pub leader: Seat,
}

#[derive(Debug, Subcommand)]
pub enum DdCmd {
    /// Tricks for the declaring side with all hands visible.
    Solve {
        #[command(flatten)]
        setup: PlaySetup,
        /// Declaring side: NS or EW.
        #[arg(long, default_value = "NS")]
        declarer: Side,
        /// plain, partition or both.
        #[arg(long, default_value = "partition")]
        mode: Mode,
    },
    /// Node counts of plain and partition search on random deals, as CSV.
    Bench {
        /// Deals per size.
        #[arg(long, default_value_t = 200)]
        deals: usize,
        /// Deal sizes in cards, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "12,16,20,24")]
        sizes: Vec<usize>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SdCmd {
    /// Exact value over every layout of the hidden cards.
    Solve {
        #[command(flatten)]
        setup: PlaySetup,
        /// The declaring partnership's seats, e.g. N,S.
        #[arg(long, value_delimiter = ',', default_value = "N,S")]
        visible: Vec<Seat>,
        /// Tricks the declaring side needs.
        #[arg(long)]
        target: u8,
    },
    /// Achievable-set plan over a sample of layouts, improved by reordering.
    Plan {
        #[command(flatten)]
        setup: PlaySetup,
        #[arg(long, value_delimiter = ',', default_value = "N,S")]
        visible: Vec<Seat>,
        #[arg(long)]
        target: u8,
        /// Sample file: one `deal weight` per line.
        #[arg(long, conflicts_with = "generate")]
        samples: Option<PathBuf>,
        /// Draw this many layouts uniformly instead of reading a file.
        #[arg(long)]
        generate: Option<usize>,
        #[arg(long, default_value_t = 10)]
        iterations: usize,
        /// Do not widen sets by suit-length intervals.
        #[arg(long)]
        no_widen: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum McCmd {
    /// Choose a card for the seat on lead by sampling the unseen hands.
    Play {
        #[arg(long)]
        deal: PathBuf,
        /// The seat on play; its hand is known.
        #[arg(long)]
        seat: Seat,
        /// Other seats whose hands are known, e.g. dummy.
        #[arg(long, value_delimiter = ',')]
        visible: Vec<Seat>,
        #[arg(long, default_value = "NT")]
        trump: String,
        /// Constraint file: lines `seat suit lo hi` or `seat hcp lo hi`.
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long, default_value_t = crate::mc::DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Choose a call by projecting auctions with a bid database.
    Bid {
        /// Calls so far from the dealer, e.g. "P 2S X P"; "-" for none.
        #[arg(long, default_value = "-")]
        auction: String,
        /// The bidder's hand, e.g. AK2.K32.Q32.5432.
        #[arg(long)]
        hand: String,
        /// Database file: lines `auction ; lo-hi ; bid`.
        #[arg(long)]
        db: PathBuf,
        #[arg(long, default_value = "N")]
        dealer: Seat,
        /// Extra candidate calls besides the database's suggestion.
        #[arg(long, value_delimiter = ',')]
        extra: Vec<String>,
        /// Ranks per suit in the deck, counted down from the ace.
        #[arg(long, default_value_t = 9)]
        ranks: usize,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long, default_value_t = crate::mc::DEFAULT_SAMPLES)]
        samples: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage { flag: String, msg: String },
    Engine(String),
}

impl CliError {
    fn usage(flag: &str, e: impl ToString) -> Self {
        CliError::Usage { flag: flag.into(), msg: e.to_string() }
    }

    fn engine(e: impl ToString) -> Self {
        CliError::Engine(e.to_string())
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 1,
            CliError::Engine(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage { flag, msg } => write!(f, "{flag}: {msg}"),
            CliError::Engine(msg) => write!(f, "{msg}"),
        }
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    if cli.threads == 0 {
        return Err(CliError::usage("--threads", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build().map_err(CliError::engine)?;
    let text = pool.install(|| match &cli.cmd {
        Cmd::Dd(c) => dd_cmd(cli, c),
        Cmd::Sd(c) => sd_cmd(cli, c),
        Cmd::Mc(c) => mc_cmd(cli, c),
    })?;
    out.write_all(text.as_bytes()).map_err(CliError::engine)
}

fn read_file(flag: &str, path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(flag, format!("{}: {e}", path.display())))
}

fn read_deal(flag: &str, path: &Path) -> Result<Deal, CliError> {
    let text = read_file(flag, path)?;
    let line = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    parse_deal(line).map_err(|e| CliError::usage(flag, e))
}

fn trump(s: &str) -> Result<Option<Suit>, CliError> {
    parse_strain(s).map_err(|e| CliError::usage("--trump", e))
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(CliError::engine)
}

fn dd_cmd(cli: &Cli, c: &DdCmd) -> Result<String, CliError> {
    match c {
        DdCmd::Solve { setup, declarer, mode } => {
            let deal = read_deal("--deal", &setup.deal)?;
            let r: SolveResult =
                solve_dd(&deal, trump(&setup.trump)?, setup.leader, *declarer, *mode).map_err(CliError::engine)?;
            if cli.json {
                return json(&r);
            }
            let mut s = format!("tricks {}\n", r.tricks);
            if let Some(n) = r.nodes_plain {
                s += &format!("nodes_plain {n}\n");
            }
            if let Some(n) = r.nodes_partition {
                s += &format!("nodes_partition {n}\n");
            }
            Ok(s)
        }
        DdCmd::Bench { deals, sizes, out } => {
            let rows = bench_scaling(*deals, sizes, cli.seed, cli.threads).map_err(CliError::engine)?;
            let fit = fit_exponent(&rows);
            let le = rows.iter().filter(|r| r.nodes_partition <= r.nodes_plain).count();
            if cli.json {
                #[derive(Serialize)]
                struct Bench<'a> {
                    rows: &'a [BenchRow],
                    fit_a: Option<f64>,
                    fit_b: Option<f64>,
                    partition_le_plain: usize,
                }
                let b = Bench { rows: &rows, fit_a: fit.map(|f| f.0), fit_b: fit.map(|f| f.1), partition_le_plain: le };
                return json(&b);
            }
            let mut csv_bytes = Vec::new();
            write_csv(&rows, &mut csv_bytes).map_err(CliError::engine)?;
            let fit_line = match fit {
                Some((a, b)) => format!(
                    "# fit nodes_partition = {a:.4} * nodes_plain^{b:.4}; partition <= plain on {le}/{}\n",
                    rows.len()
                ),
                None => "# fit unavailable\n".into(),
            };
            let csv_text = String::from_utf8(csv_bytes).map_err(CliError::engine)?;
            match out {
                Some(p) => {
                    std::fs::write(p, &csv_text).map_err(|e| CliError::usage("--out", e))?;
                    Ok(fit_line)
                }
                None => Ok(csv_text + &fit_line),
            }
        }
    }
}

fn declaring_side(visible: &[Seat]) -> Result<Side, CliError> {
    match visible {
        [a, b] if a.partner() == *b => Ok(a.side()),
        _ => Err(CliError::usage("--visible", "expected one partnership, e.g. N,S")),
    }
}

fn layout_line(g: &BridgeImperfect, i: usize) -> String {
    let [a, b] = g.declarer.other().seats();
    let d = &g.layouts[i];
    format!("{i} {a}:{} {b}:{}", hand_string(d.hand(a)), hand_string(d.hand(b)))
}

fn hand_string(h: CardSet) -> String {
    Suit::ALL.map(|s| h.suit_string(s)).map(|s| if s.is_empty() { "-".to_string() } else { s }).join(".")
}

fn sd_cmd(cli: &Cli, c: &SdCmd) -> Result<String, CliError> {
    match c {
        SdCmd::Solve { setup, visible, target } => {
            let deal = read_deal("--deal", &setup.deal)?;
            let side = declaring_side(visible)?;
            let st = PlayState::new(&deal, trump(&setup.trump)?, setup.leader);
            let layouts = BridgeImperfect::all_layouts(&st, side);
            let g = BridgeImperfect::new(st, side, *target, layouts).map_err(CliError::engine)?;
            let v = solve_imperfect(&g).map_err(|e| match e {
                SdError::TooLarge { .. } => CliError::Engine(format!("{e} (`sd plan`)")),
                e => CliError::engine(e),
            })?;
            let p = perfect_info_value(&g).map_err(CliError::engine)?;
            let members: Vec<String> = v.members().iter().map(|m| m.to_string()).collect();
            if cli.json {
                #[derive(Serialize)]
                struct Out {
                    situations: Vec<String>,
                    perfect: String,
                    antichain: Vec<String>,
                }
                let situations = (0..g.universe_size()).map(|i| layout_line(&g, i)).collect();
                return json(&Out { situations, perfect: p.to_string(), antichain: members });
            }
            let mut s = format!("situations {}\n", g.universe_size());
            for i in 0..g.universe_size() {
                s += &layout_line(&g, i);
                s.push('\n');
            }
            s += &format!("perfect {p}\nantichain {}\n", members.join(" "));
            Ok(s)
        }
        SdCmd::Plan { setup, visible, target, samples, generate, iterations, no_widen } => {
            let deal = read_deal("--deal", &setup.deal)?;
            let side = declaring_side(visible)?;
            let st = PlayState::new(&deal, trump(&setup.trump)?, setup.leader);
            let sample = match (samples, generate) {
                (Some(path), _) => WeightedSample::from_text(&read_file("--samples", path)?)
                    .map_err(|e| CliError::usage("--samples", e))?,
                (None, Some(n)) => {
                    let mut c = DealConstraint::new(deal.all_cards());
                    for seat in side.seats() {
                        c = c.place(seat, deal.hand(seat));
                    }
                    WeightedSample::uniform(sample_deals(&c, *n, cli.seed).map_err(CliError::engine)?)
                }
                (None, None) => return Err(CliError::usage("--samples", "give --samples <file> or --generate <n>")),
            };
            let g = BridgeImperfect::new(st, side, *target, sample.deals.clone())
                .map_err(|e| CliError::usage("--samples", e))?;
            let order: Vec<usize> = (0..g.universe_size()).collect();
            let widen = |a: &SituationSet, s: usize| g.widen(a, s);
            let gen: Option<Generalizer<'_>> = if *no_widen { None } else { Some(&widen) };
            let r = swo_select(&g, &order, &sample.weights, *iterations, gen).map_err(CliError::engine)?;
            let total = sample.total_weight();
            let root = g.root();
            let first = r.best.witness.choices.get(&(root, r.best.members.clone())).map(|c| c.to_string());
            if cli.json {
                #[derive(Serialize)]
                struct Iter {
                    payoff: f64,
                    members: String,
                }
                #[derive(Serialize)]
                struct Out {
                    iterations: Vec<Iter>,
                    members: String,
                    payoff: f64,
                    fraction: f64,
                    first: Option<String>,
                    witness_choices: usize,
                }
                let its = r.history.iter().map(|h| Iter { payoff: h.payoff, members: h.members.to_string() }).collect();
                return json(&Out {
                    iterations: its,
                    members: r.best.members.to_string(),
                    payoff: r.payoff,
                    fraction: r.payoff / total,
                    first,
                    witness_choices: r.best.witness.len(),
                });
            }
            let mut s = String::new();
            for (i, h) in r.history.iter().enumerate() {
                s += &format!("iteration {} payoff {:.6} members {}\n", i + 1, h.payoff, h.members);
            }
            s += &format!("best {} payoff {:.6} fraction {:.6}\n", r.best.members, r.payoff, r.payoff / total);
            s += &format!("first {}\n", first.unwrap_or_else(|| "-".into()));
            s += &format!("witness_choices {}\n", r.best.witness.len());
            Ok(s)
        }
    }
}

fn mc_cmd(cli: &Cli, c: &McCmd) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Scored {
        choice: String,
        score: f64,
    }
    #[derive(Serialize)]
    struct Out {
        samples: usize,
        scores: Vec<Scored>,
        best: String,
    }
    // Scores are reported as weighted means over the sample.
    let render = |names: Vec<String>, sums: &[f64], best: usize, sample: &WeightedSample| -> Result<String, CliError> {
        let samples = sample.len();
        let total = sample.total_weight();
        let scores: Vec<f64> = sums.iter().map(|s| s / total).collect();
        if cli.json {
            let scores = names.iter().zip(&scores).map(|(n, s)| Scored { choice: n.clone(), score: *s }).collect();
            return json(&Out { samples, scores, best: names[best].clone() });
        }
        let mut s = format!("samples {samples}\n");
        for (n, v) in names.iter().zip(&scores) {
            s += &format!("{n} {v:.4}\n");
        }
        s += &format!("best {}\n", names[best]);
        Ok(s)
    };
    match c {
        McCmd::Play { deal, seat, visible, trump: t, constraints, samples } => {
            let deal = read_deal("--deal", deal)?;
            let st = PlayState::new(&deal, trump(t)?, *seat);
            let mut con = DealConstraint::new(deal.all_cards());
            for s in std::iter::once(seat).chain(visible) {
                con = con.place(*s, deal.hand(*s));
            }
            if let Some(p) = constraints {
                con = parse_constraints(&read_file("--constraints", p)?, con)
                    .map_err(|e| CliError::usage("--constraints", e))?;
            }
            let deals = sample_deals(&con, *samples, cli.seed).map_err(CliError::engine)?;
            let sample = WeightedSample::uniform(deals);
            let moves: Vec<_> = st.legal_set().iter().collect();
            let r = select_move(&sample, &moves, |m, d| dd_card_score(&st, m, d)).map_err(CliError::engine)?;
            render(moves.iter().map(|m| m.to_string()).collect(), &r.scores, r.best, &sample)
        }
        McCmd::Bid { auction, hand, db, dealer, extra, ranks, constraints, samples } => {
            let auction = parse_auction(auction).map_err(|e| CliError::usage("--auction", e))?;
            let hand = parse_hand(hand).map_err(|e| CliError::usage("--hand", e))?;
            let db = ToyDb::parse(&read_file("--db", db)?).map_err(|e| CliError::usage("--db", e))?;
            let extra: Vec<_> =
                extra.iter().map(|b| b.parse()).collect::<Result<_, _>>().map_err(|e| CliError::usage("--extra", e))?;
            if !(1..=13).contains(ranks) {
                return Err(CliError::usage("--ranks", "must be between 1 and 13"));
            }
            let deck = CardSet::full_ranks(RankSet::top(*ranks));
            let bidder = dealer.offset(auction.len());
            if hand.len() != *ranks || !hand.difference(deck).is_empty() {
                return Err(CliError::usage("--hand", format!("must hold {ranks} cards from the top {ranks} ranks")));
            }
            let mut con = DealConstraint::new(deck).place(bidder, hand);
            if let Some(p) = constraints {
                con = parse_constraints(&read_file("--constraints", p)?, con)
                    .map_err(|e| CliError::usage("--constraints", e))?;
            }
            let deals = sample_deals(&con, *samples, cli.seed).map_err(CliError::engine)?;
            let sample = WeightedSample::uniform(deals);
            let cands = candidates(&auction, hand, &db, &extra);
            let side = bidder.side();
            let r = select_bid(&auction, *dealer, hand, &cands, &db, &sample, &BidConfig::default(), |a, d| {
                dd_auction_score(a, *dealer, d, side)
            })
            .map_err(CliError::engine)?;
            let names = cands.iter().map(|b| b.to_string()).collect();
            render(names, &r.scores, r.best, &sample)
        }
    }
}
