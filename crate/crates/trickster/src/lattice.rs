//! Situation sets, reduced antichains of them, and a checker for lattice laws.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::game::Algebra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("universe mismatch: {0} vs {1} situations")]
    UniverseMismatch(usize, usize),
    #[error("situation {index} outside universe of {n}")]
    OutOfRange { index: usize, n: usize },
}

/// A subset of the situations `0..n`, as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SituationSet {
    n: usize,
    words: Vec<u64>,
}

impl SituationSet {
    pub fn empty(n: usize) -> Self {
        SituationSet { n, words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.words[i / 64] |= 1 << (i % 64);
        }
        s
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Result<Self, LatticeError> {
        let mut s = Self::empty(n);
        for i in idx {
            s.try_insert(i)?;
        }
        Ok(s)
    }

    /// Build from the low `n` bits of a mask.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut s = Self::empty(n);
        if n > 0 {
            let keep = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
            s.words[0] = mask & keep;
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn try_insert(&mut self, i: usize) -> Result<(), LatticeError> {
        if i >= self.n {
            return Err(LatticeError::OutOfRange { index: i, n: self.n });
        }
        self.words[i / 64] |= 1 << (i % 64);
        Ok(())
    }

    /// Panics when `i` is outside the universe.
    pub fn insert(&mut self, i: usize) {
        self.try_insert(i).expect("situation index in range");
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.n {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.contains(i))
    }

    fn check(&self, o: &Self) -> Result<(), LatticeError> {
        if self.n == o.n {
            Ok(())
        } else {
            Err(LatticeError::UniverseMismatch(self.n, o.n))
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self, LatticeError> {
        self.check(o)?;
        Ok(SituationSet { n: self.n, words: self.words.iter().zip(&o.words).map(|(a, b)| f(*a, *b)).collect() })
    }

    pub fn union(&self, o: &Self) -> Result<Self, LatticeError> {
        self.zip(o, |a, b| a | b)
    }

    pub fn intersection(&self, o: &Self) -> Result<Self, LatticeError> {
        self.zip(o, |a, b| a & b)
    }

    pub fn difference(&self, o: &Self) -> Result<Self, LatticeError> {
        self.zip(o, |a, b| a & !b)
    }

    pub fn is_subset(&self, o: &Self) -> bool {
        self.n == o.n && self.words.iter().zip(&o.words).all(|(a, b)| a & !b == 0)
    }

    /// Everything in the universe not in `self`.
    pub fn complement(&self) -> Self {
        Self::full(self.n).difference(self).expect("same universe")
    }
}

impl Ord for SituationSet {
    /// Popcount first, then the bit words lexicographically.
    fn cmp(&self, o: &Self) -> Ordering {
        self.n.cmp(&o.n).then(self.len().cmp(&o.len())).then_with(|| self.words.cmp(&o.words))
    }
}

impl PartialOrd for SituationSet {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for SituationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SituationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// A family of situation sets with no member inside another, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Antichain {
    n: usize,
    sets: Vec<SituationSet>,
}

impl Antichain {
    /// The empty family, the least element.
    pub fn empty(n: usize) -> Self {
        Antichain { n, sets: Vec::new() }
    }

    /// `{U}`, the greatest element.
    pub fn top(n: usize) -> Self {
        Antichain { n, sets: vec![SituationSet::full(n)] }
    }

    pub fn singleton(s: SituationSet) -> Self {
        Antichain { n: s.universe(), sets: vec![s] }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[SituationSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// True when some member contains `s`.
    pub fn covers(&self, s: &SituationSet) -> bool {
        self.sets.iter().any(|m| s.is_subset(m))
    }

    pub fn join(&self, o: &Self) -> Result<Self, LatticeError> {
        antichain_join(self, o)
    }

    pub fn meet(&self, o: &Self) -> Result<Self, LatticeError> {
        antichain_meet(self, o)
    }
}

impl fmt::Debug for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.sets.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", m.join(", "))
    }
}

/// The ⊆-maximal members of `family`, in canonical order.
pub fn reduce(n: usize, family: impl IntoIterator<Item = SituationSet>) -> Result<Antichain, LatticeError> {
    let mut sets: Vec<SituationSet> = Vec::new();
    for s in family {
        if s.universe() != n {
            return Err(LatticeError::UniverseMismatch(n, s.universe()));
        }
        sets.push(s);
    }
    // Largest first, so any superset of a set is seen before it.
    sets.sort_by(|a, b| b.cmp(a));
    sets.dedup();
    let mut kept: Vec<SituationSet> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| s.is_subset(k)) {
            kept.push(s);
        }
    }
    kept.sort();
    Ok(Antichain { n, sets: kept })
}

/// `r(F ∪ G)`.
pub fn antichain_join(f: &Antichain, g: &Antichain) -> Result<Antichain, LatticeError> {
    if f.n != g.n {
        return Err(LatticeError::UniverseMismatch(f.n, g.n));
    }
    reduce(f.n, f.sets.iter().chain(&g.sets).cloned())
}

/// `r({F_i ∩ G_j})`.
pub fn antichain_meet(f: &Antichain, g: &Antichain) -> Result<Antichain, LatticeError> {
    if f.n != g.n {
        return Err(LatticeError::UniverseMismatch(f.n, g.n));
    }
    let mut out = Vec::with_capacity(f.sets.len() * g.sets.len());
    for a in &f.sets {
        for b in &g.sets {
            out.push(a.intersection(b)?);
        }
    }
    reduce(f.n, out)
}

/// Reduced antichains over a fixed universe. Mixing universes panics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AntichainAlgebra {
    pub n: usize,
}

impl Algebra for AntichainAlgebra {
    type Value = Antichain;
    type Key = Antichain;

    fn key(&self, v: &Antichain) -> Antichain {
        v.clone()
    }
    fn join(&self, a: &Antichain, b: &Antichain) -> Antichain {
        antichain_join(a, b).expect("same universe")
    }
    fn meet(&self, a: &Antichain, b: &Antichain) -> Antichain {
        antichain_meet(a, b).expect("same universe")
    }
    fn bottom(&self) -> Antichain {
        Antichain::empty(self.n)
    }
    fn top(&self) -> Antichain {
        Antichain::top(self.n)
    }
    fn leq(&self, a: &Antichain, b: &Antichain) -> bool {
        a.sets.iter().all(|s| b.covers(s))
    }
}

/// Situation sets under union and intersection: the perfect-information values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetAlgebra {
    pub n: usize,
}

impl Algebra for SetAlgebra {
    type Value = SituationSet;
    type Key = SituationSet;

    fn key(&self, v: &SituationSet) -> SituationSet {
        v.clone()
    }
    fn join(&self, a: &SituationSet, b: &SituationSet) -> SituationSet {
        a.union(b).expect("same universe")
    }
    fn meet(&self, a: &SituationSet, b: &SituationSet) -> SituationSet {
        a.intersection(b).expect("same universe")
    }
    fn bottom(&self) -> SituationSet {
        SituationSet::empty(self.n)
    }
    fn top(&self) -> SituationSet {
        SituationSet::full(self.n)
    }
    fn leq(&self, a: &SituationSet, b: &SituationSet) -> bool {
        a.is_subset(b)
    }
}

/// A set of suits; bit order spades, hearts, diamonds, clubs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SuitMask(pub u8);

impl SuitMask {
    pub const NONE: SuitMask = SuitMask(0);
    pub const SPADE: SuitMask = SuitMask(1);
    pub const HEART: SuitMask = SuitMask(2);
    pub const DIAMOND: SuitMask = SuitMask(4);
    pub const CLUB: SuitMask = SuitMask(8);
    pub const ALL: SuitMask = SuitMask(15);

    pub fn parse(s: &str) -> Option<SuitMask> {
        match s {
            "0" => return Some(SuitMask::NONE),
            "1" => return Some(SuitMask::ALL),
            _ => {}
        }
        let mut m = 0;
        for c in s.chars() {
            m |= match c {
                '♠' | 'S' => 1,
                '♥' | 'H' => 2,
                '♦' | 'D' => 4,
                '♣' | 'C' => 8,
                '+' | '{' | '}' | ',' => 0,
                _ => return None,
            };
        }
        Some(SuitMask(m))
    }
}

impl fmt::Debug for SuitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SuitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "0"),
            15 => write!(f, "1"),
            m => {
                let s: String =
                    ['♠', '♥', '♦', '♣'].iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, c)| *c).collect();
                write!(f, "{s}")
            }
        }
    }
}

/// Values for a game won when the hidden card's suit is in the set, where a
/// position winning on both a club and a heart is known to win outright.
/// Meet is intersection; join is union closed under that rule. The result is
/// a lattice but not a distributive one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuitAlgebra;

impl SuitAlgebra {
    fn close(m: u8) -> u8 {
        if m & 10 == 10 {
            15
        } else {
            m
        }
    }
}

impl Algebra for SuitAlgebra {
    type Value = SuitMask;
    type Key = SuitMask;

    fn key(&self, v: &SuitMask) -> SuitMask {
        *v
    }
    fn join(&self, a: &SuitMask, b: &SuitMask) -> SuitMask {
        SuitMask(Self::close(a.0 | b.0))
    }
    fn meet(&self, a: &SuitMask, b: &SuitMask) -> SuitMask {
        SuitMask(a.0 & b.0)
    }
    fn bottom(&self) -> SuitMask {
        SuitMask::NONE
    }
    fn top(&self) -> SuitMask {
        SuitMask::ALL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Law {
    JoinIdempotent,
    MeetIdempotent,
    JoinCommutative,
    MeetCommutative,
    JoinAssociative,
    MeetAssociative,
    /// `a ∨ (a ∧ b) = a`
    JoinAbsorption,
    /// `a ∧ (a ∨ b) = a`
    MeetAbsorption,
    /// `a ∨ (b ∧ c) = (a ∨ b) ∧ (a ∨ c)`
    JoinDistributive,
    /// `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`
    MeetDistributive,
}

impl Law {
    pub const ALL: [Law; 10] = [
        Law::JoinIdempotent,
        Law::MeetIdempotent,
        Law::JoinCommutative,
        Law::MeetCommutative,
        Law::JoinAssociative,
        Law::MeetAssociative,
        Law::JoinAbsorption,
        Law::MeetAbsorption,
        Law::JoinDistributive,
        Law::MeetDistributive,
    ];

    pub fn is_distributivity(self) -> bool {
        matches!(self, Law::JoinDistributive | Law::MeetDistributive)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation<V> {
    pub law: Law,
    pub witnesses: Vec<V>,
    pub lhs: V,
    pub rhs: V,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawReport<V> {
    /// One entry per law, with its first violation if any.
    pub laws: Vec<(Law, Option<Violation<V>>)>,
}

impl<V> LawReport<V> {
    pub fn passes(&self, law: Law) -> bool {
        self.laws.iter().any(|(l, v)| *l == law && v.is_none())
    }

    pub fn all_pass(&self) -> bool {
        self.laws.iter().all(|(_, v)| v.is_none())
    }

    pub fn lattice_laws_pass(&self) -> bool {
        self.laws.iter().all(|(l, v)| l.is_distributivity() || v.is_none())
    }

    pub fn distributive(&self) -> bool {
        self.passes(Law::JoinDistributive) && self.passes(Law::MeetDistributive)
    }

    pub fn first_violation(&self) -> Option<&Violation<V>> {
        self.laws.iter().find_map(|(_, v)| v.as_ref())
    }
}

/// Check every law on the triple `(a, b, c)`. Returns the violations found.
pub fn check_triple<A: Algebra>(alg: &A, a: &A::Value, b: &A::Value, c: &A::Value) -> Vec<Violation<A::Value>> {
    let j = |x: &A::Value, y: &A::Value| alg.join(x, y);
    let m = |x: &A::Value, y: &A::Value| alg.meet(x, y);
    let w = || vec![a.clone(), b.clone(), c.clone()];
    let mut out = Vec::new();
    let mut check = |law: Law, lhs: A::Value, rhs: A::Value| {
        if lhs != rhs {
            out.push(Violation { law, witnesses: w(), lhs, rhs });
        }
    };
    check(Law::JoinIdempotent, j(a, a), a.clone());
    check(Law::MeetIdempotent, m(a, a), a.clone());
    check(Law::JoinCommutative, j(a, b), j(b, a));
    check(Law::MeetCommutative, m(a, b), m(b, a));
    check(Law::JoinAssociative, j(a, &j(b, c)), j(&j(a, b), c));
    check(Law::MeetAssociative, m(a, &m(b, c)), m(&m(a, b), c));
    check(Law::JoinAbsorption, j(a, &m(a, b)), a.clone());
    check(Law::MeetAbsorption, m(a, &j(a, b)), a.clone());
    check(Law::JoinDistributive, j(a, &m(b, c)), m(&j(a, b), &j(a, c)));
    check(Law::MeetDistributive, m(a, &j(b, c)), j(&m(a, b), &m(a, c)));
    out
}

/// Check every law over all ordered triples drawn from `sample`.
pub fn law_suite<A: Algebra>(alg: &A, sample: &[A::Value]) -> LawReport<A::Value> {
    let mut first: Vec<(Law, Option<Violation<A::Value>>)> = Law::ALL.iter().map(|&l| (l, None)).collect();
    for a in sample {
        for b in sample {
            for c in sample {
                for v in check_triple(alg, a, b, c) {
                    let slot = first.iter_mut().find(|(l, _)| *l == v.law).unwrap();
                    if slot.1.is_none() {
                        slot.1 = Some(v);
                    }
                }
            }
        }
    }
    LawReport { laws: first }
}

/// Every reduced antichain over a universe of `n ≤ 4` situations.
pub fn all_antichains(n: usize) -> Vec<Antichain> {
    assert!(n <= 4, "enumeration is doubly exponential");
    let subsets = 1usize << n;
    let mut out: Vec<Antichain> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for fam in 0u64..(1u64 << subsets) {
        let sets = (0..subsets).filter(|&i| fam >> i & 1 == 1).map(|i| SituationSet::from_mask(n, i as u64));
        let a = reduce(n, sets).unwrap();
        if seen.insert(a.clone()) {
            out.push(a);
        }
    }
    out
}
