//! Small reference games: tic-tac-toe with a partition system, the
//! non-distributive suit game, and the single-dummy guessing games.

use std::fmt;

use crate::game::{parse_scripted, Eval, FixtureError, Game, ScriptedGame};
use crate::lattice::{SituationSet, SuitMask};
use crate::partition::PartitionSystem;
use crate::sd::{ScriptedImperfect, Turn};

pub const BLANK: u8 = 0;
pub const X: u8 = 1;
pub const O: u8 = 2;

const LINES: [[usize; 3]; 8] = [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]];

/// A tic-tac-toe board; cells hold [`BLANK`], [`X`] or [`O`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TttPos {
    pub cells: [u8; 9],
    pub x_to_move: bool,
}

impl TttPos {
    pub fn empty() -> Self {
        TttPos { cells: [BLANK; 9], x_to_move: true }
    }

    /// Rows top to bottom separated by `/`, `.` for blank.
    pub fn parse(board: &str, x_to_move: bool) -> Option<Self> {
        let mut cells = [BLANK; 9];
        let mut k = 0;
        for ch in board.chars().filter(|c| *c != '/') {
            if k == 9 {
                return None;
            }
            cells[k] = match ch {
                'X' => X,
                'O' => O,
                '.' => BLANK,
                _ => return None,
            };
            k += 1;
        }
        (k == 9).then_some(TttPos { cells, x_to_move })
    }

    pub fn winner(&self) -> Option<u8> {
        self.winning_line().map(|l| self.cells[l[0]])
    }

    fn winning_line(&self) -> Option<[usize; 3]> {
        // X first: a board with lines for both is never reached in play.
        for who in [X, O] {
            if let Some(l) = LINES.iter().find(|l| l.iter().all(|&c| self.cells[c] == who)) {
                return Some(*l);
            }
        }
        None
    }

    pub fn is_terminal(&self) -> bool {
        self.winner().is_some() || self.cells.iter().all(|&c| c != BLANK)
    }

    pub fn mover(&self) -> u8 {
        if self.x_to_move {
            X
        } else {
            O
        }
    }

    pub fn play(&self, cell: usize) -> Self {
        let mut next = *self;
        next.cells[cell] = self.mover();
        next.x_to_move = !self.x_to_move;
        next
    }
}

impl fmt::Display for TttPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 && i % 3 == 0 {
                f.write_str("/")?;
            }
            f.write_str(match *c {
                X => "X",
                O => "O",
                _ => ".",
            })?;
        }
        Ok(())
    }
}

/// Tic-tac-toe scored +1 for an X win, -1 for an O win; X maximizes.
#[derive(Debug, Clone, Copy, Default)]
pub struct TttGame;

impl Game for TttGame {
    type Pos = TttPos;
    type Value = f64;

    fn initial(&self) -> TttPos {
        TttPos::empty()
    }

    fn successors(&self, p: &TttPos) -> Vec<TttPos> {
        if p.is_terminal() {
            return Vec::new();
        }
        (0..9).filter(|&c| p.cells[c] == BLANK).map(|c| p.play(c)).collect()
    }

    fn eval(&self, p: &TttPos) -> Eval<f64> {
        match p.winner() {
            Some(X) => Eval::Value(1.0),
            Some(_) => Eval::Value(-1.0),
            None if p.is_terminal() => Eval::Value(0.0),
            None if p.x_to_move => Eval::Max,
            None => Eval::Min,
        }
    }
}

/// Every position reachable from the empty board.
pub fn ttt_positions() -> Vec<TttPos> {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![TttPos::empty()];
    let mut out = Vec::new();
    while let Some(p) = stack.pop() {
        if seen.insert(p) {
            out.push(p);
            stack.extend(TttGame.successors(&p));
        }
    }
    out
}

fn bit(state: u8) -> u8 {
    1 << state
}

const ANY: u8 = 0b111;
const OCCUPIED: u8 = 0b110;

/// A set of boards: each cell is restricted to a mask of allowed states.
/// Live patterns only contain boards where the game is still running.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TttPattern {
    pub masks: [u8; 9],
    pub x_to_move: bool,
    pub live: bool,
}

impl TttPattern {
    /// Number of cell assignments matching the masks.
    pub fn cardinality(&self) -> u64 {
        self.masks.iter().map(|m| m.count_ones() as u64).product()
    }
}

impl fmt::Display for TttPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.masks.iter().enumerate() {
            if i > 0 && i % 3 == 0 {
                f.write_str("/")?;
            }
            let c = match *m {
                ANY => '?',
                OCCUPIED => '#',
                m if m == bit(X) => 'X',
                m if m == bit(O) => 'O',
                m if m == bit(BLANK) => '.',
                _ => '*',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Partition system over [`TttPattern`]s.
#[derive(Debug, Clone, Copy, Default)]
pub struct TttPartition;

fn moved_cell(p: &TttPos, child: &TttPos) -> usize {
    (0..9).find(|&c| p.cells[c] != child.cells[c]).expect("child differs from parent")
}

/// Keep `p + mover@i` nonterminal for every board matching `masks`: pin one
/// non-mover cell on each line through `i`, and one other blank cell.
fn pin_live(masks: &mut [u8; 9], p: &TttPos, i: usize) {
    let m = p.mover();
    for l in LINES.iter().filter(|l| l.contains(&i)) {
        if let Some(&j) = l.iter().find(|&&j| j != i && p.cells[j] != m) {
            masks[j] &= bit(p.cells[j]);
        }
    }
    if let Some(j) = (0..9).find(|&j| j != i && p.cells[j] == BLANK) {
        masks[j] = bit(BLANK);
    }
}

impl PartitionSystem<TttGame> for TttPartition {
    type Set = TttPattern;
    type Bucket = bool;

    fn bucket(&self, p: &TttPos) -> bool {
        p.x_to_move
    }

    fn contains(&self, s: &TttPattern, p: &TttPos) -> bool {
        s.x_to_move == p.x_to_move && (0..9).all(|c| s.masks[c] & bit(p.cells[c]) != 0) && !(s.live && p.is_terminal())
    }

    fn generalize(&self, p: &TttPos) -> TttPattern {
        let masks = match p.winning_line() {
            Some(line) => {
                let mut m = [ANY; 9];
                for c in line {
                    m[c] = bit(p.cells[c]);
                }
                m
            }
            None => p.cells.map(bit),
        };
        TttPattern { masks, x_to_move: p.x_to_move, live: false }
    }

    fn back_up(&self, p: &TttPos, child: &TttPos, s: &TttPattern) -> TttPattern {
        let i = moved_cell(p, child);
        let mut masks = s.masks;
        masks[i] = bit(BLANK);
        if s.live {
            pin_live(&mut masks, p, i);
        }
        TttPattern { masks, x_to_move: p.x_to_move, live: true }
    }

    fn constrain(&self, p: &TttPos, children: &[(TttPos, TttPattern)]) -> TttPattern {
        // Same blank cells as p, so the same moves.
        let mut masks = p.cells.map(|c| if c == BLANK { bit(BLANK) } else { OCCUPIED });
        for (child, s) in children {
            let i = moved_cell(p, child);
            for j in (0..9).filter(|&j| j != i) {
                masks[j] &= s.masks[j];
            }
            if s.live {
                pin_live(&mut masks, p, i);
            }
        }
        TttPattern { masks, x_to_move: p.x_to_move, live: true }
    }

    fn intersect(&self, _p: &TttPos, a: &TttPattern, b: &TttPattern) -> TttPattern {
        let mut masks = a.masks;
        for (m, o) in masks.iter_mut().zip(b.masks) {
            *m &= o;
        }
        TttPattern { masks, x_to_move: a.x_to_move, live: a.live || b.live }
    }
}

pub const SUIT_TREE_FIXTURE: &str = include_str!("../fixtures/suit_tree.txt");

/// The four-ply suit game whose deep-pruned value is wrong.
pub fn suit_tree_game() -> Result<ScriptedGame<SuitMask>, FixtureError> {
    parse_scripted(SUIT_TREE_FIXTURE, SuitMask::parse)
}

/// A minimizer node revealing each situation's class, leading to terminals
/// won in the classes listed in `wins`.
fn reveal(g: &mut ScriptedImperfect, label: &str, classes: &[bool], win_s: bool, win_t: bool) -> usize {
    let n = classes.len();
    let s_set = SituationSet::from_indices(n, (0..n).filter(|&i| classes[i])).expect("in range");
    let t_set = s_set.complement();
    let node = g.add(label, Turn::Min, SituationSet::empty(n));
    let won = |w: bool| if w { SituationSet::full(n) } else { SituationSet::empty(n) };
    let s_leaf = g.add(&format!("{label}/s"), Turn::Terminal, won(win_s));
    let t_leaf = g.add(&format!("{label}/t"), Turn::Terminal, won(win_t));
    g.edge(node, "s", s_leaf, s_set);
    g.edge(node, "t", t_leaf, t_set);
    node
}

/// The guessing game: situation `i` is in class S when `classes[i]`, else T.
/// The maximizer may play for S (move A), for T (B), defer the guess but
/// still commit before the class shows (C), or, when `clever`, take a line
/// that wins in both (D).
pub fn st_game(classes: &[bool], clever: bool) -> ScriptedImperfect {
    let n = classes.len();
    let mut g = ScriptedImperfect::new(n);
    let root = g.add("root", Turn::Max, SituationSet::empty(n));
    let a = reveal(&mut g, "A", classes, true, false);
    let b = reveal(&mut g, "B", classes, false, true);
    let c = g.add("C", Turn::Max, SituationSet::empty(n));
    let ca = reveal(&mut g, "C/A", classes, true, false);
    let cb = reveal(&mut g, "C/B", classes, false, true);
    g.edge(c, "A'", ca, SituationSet::full(n));
    g.edge(c, "B'", cb, SituationSet::full(n));
    let all = SituationSet::full(n);
    g.edge(root, "A", a, all.clone());
    g.edge(root, "B", b, all.clone());
    g.edge(root, "C", c, all.clone());
    if clever {
        let d = reveal(&mut g, "D", classes, true, true);
        g.edge(root, "D", d, all);
    }
    g
}

/// The ordered-sample scenario: one S situation, five T situations.
pub struct SwoScenario {
    pub game: ScriptedImperfect,
    pub names: Vec<&'static str>,
    pub weights: Vec<f64>,
    pub order: Vec<usize>,
}

pub fn swo_scenario() -> SwoScenario {
    let names = vec!["s1", "t1", "t2", "t3", "t4", "t5"];
    let classes: Vec<bool> = names.iter().map(|n| n.starts_with('s')).collect();
    SwoScenario {
        game: st_game(&classes, false),
        weights: vec![0.2, 0.16, 0.16, 0.16, 0.16, 0.16],
        // s1, t4, t2, t1, t5, t3
        order: vec![0, 4, 2, 1, 5, 3],
        names,
    }
}

/// The four-line guessing game with `k` situations of each class.
pub fn abcd_game(k: usize) -> ScriptedImperfect {
    let classes: Vec<bool> = (0..2 * k).map(|i| i < k).collect();
    st_game(&classes, true)
}
