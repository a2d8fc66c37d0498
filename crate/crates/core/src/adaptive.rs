//! The host against adaptive, orderly, consistent contestants.
//!
//! A contestant picks its next door from what it has seen behind the doors it
//! already opened. The host enumerates car placements on the increasing part
//! of a block to find where a contestant can be made sparse, picks a minimal
//! witness, and recurses into the witnessing sub-block. Contestants that are
//! partial, disorderly, over budget or inconsistent are dropped, standing in
//! for what the halting oracle would eventually reveal.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::bits::BitPrefix;
use crate::blocks::{DisorderedBlock, HostPermutation};
use crate::error::{Error, Fault, Result};
use crate::ledger::RestrictionLedger;
use crate::skip::SkipEntry;
use crate::Door;

/// Default cap on `|IF − G|` for witness enumeration.
pub const DEFAULT_WITNESS_CAP: usize = 16;
/// Default number of doors a contestant may open in one evaluation.
pub const DEFAULT_CONTESTANT_BUDGET: u64 = 1 << 26;

/// What is behind each door, as far as it is known.
pub trait DoorContents {
    /// `Some(true)` for a car, `Some(false)` for a goat, `None` if unknown.
    fn content(&self, door: Door) -> Option<bool>;
}

impl DoorContents for BTreeSet<Door> {
    fn content(&self, door: Door) -> Option<bool> {
        Some(self.contains(&door))
    }
}

impl DoorContents for BitPrefix {
    fn content(&self, door: Door) -> Option<bool> {
        self.get(door).ok()
    }
}

/// Cars on `base ∪ extra`, goats elsewhere.
struct Overlay<'a> {
    base: &'a BTreeSet<Door>,
    extra: &'a [Door],
}

impl DoorContents for Overlay<'_> {
    fn content(&self, door: Door) -> Option<bool> {
        Some(self.base.contains(&door) || self.extra.binary_search(&door).is_ok())
    }
}

/// The world with every door outside `opened` flipped.
struct Flipped<'a> {
    base: &'a dyn DoorContents,
    opened: &'a BTreeSet<Door>,
}

impl DoorContents for Flipped<'_> {
    fn content(&self, door: Door) -> Option<bool> {
        let c = self.base.content(door)?;
        Some(if self.opened.contains(&door) { c } else { !c })
    }
}

/// A constructed assignment plus goats forced beyond it.
#[derive(Debug, Clone, Copy)]
pub struct AssignmentView<'a> {
    pub assignment: &'a BitPrefix,
    pub spill_goats: &'a BTreeSet<Door>,
}

impl DoorContents for AssignmentView<'_> {
    fn content(&self, door: Door) -> Option<bool> {
        match self.assignment.get(door) {
            Ok(bit) => Some(bit),
            Err(_) => self.spill_goats.contains(&door).then_some(false),
        }
    }
}

/// The decision procedure of a contestant.
///
/// An honest rule reads only `history`. `world` is exposed so that a rule
/// peeking at unopened doors can be modelled, and caught by the consistency
/// replay.
pub trait ContestantRule: Send + Sync {
    /// The next door, or `None` where the rule is undefined.
    fn next_door(&self, history: &[SkipEntry], world: &dyn DoorContents) -> Option<Door>;
}

struct HistoryRule<F>(F);

impl<F: Fn(&[SkipEntry]) -> Option<Door> + Send + Sync> ContestantRule for HistoryRule<F> {
    fn next_door(&self, history: &[SkipEntry], _: &dyn DoorContents) -> Option<Door> {
        (self.0)(history)
    }
}

/// `g(X, x)`: the `x`-th door opened when the cars are `X`.
#[derive(Clone)]
pub struct AdaptiveContestant {
    name: String,
    rule: Arc<dyn ContestantRule>,
    budget: u64,
}

impl AdaptiveContestant {
    pub fn new(name: impl Into<String>, budget: u64, rule: impl ContestantRule + 'static) -> Self {
        Self { name: name.into(), rule: Arc::new(rule), budget }
    }

    /// A contestant driven by its observed history alone.
    pub fn from_history(
        name: impl Into<String>,
        rule: impl Fn(&[SkipEntry]) -> Option<Door> + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, DEFAULT_CONTESTANT_BUDGET, HistoryRule(rule))
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }
}

impl fmt::Debug for AdaptiveContestant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdaptiveContestant").field("name", &self.name).field("budget", &self.budget).finish()
    }
}

/// Where a run stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Run {
    entries: Vec<SkipEntry>,
    /// A door the contestant chose whose content is unknown.
    unknown: Option<Door>,
}

/// Runs `g` until its next door exceeds `max_door`, its content is unknown,
/// or `done` holds on the trace so far.
fn run(
    g: &AdaptiveContestant,
    world: &dyn DoorContents,
    max_door: Door,
    mut done: impl FnMut(&[SkipEntry]) -> bool,
) -> std::result::Result<Run, Fault> {
    let mut entries: Vec<SkipEntry> = Vec::new();
    loop {
        if done(&entries) {
            return Ok(Run { entries, unknown: None });
        }
        let step = entries.len() as u64;
        if step >= g.budget {
            return Err(Fault::BudgetExceeded { budget: g.budget });
        }
        let door = g.rule.next_door(&entries, world).ok_or(Fault::Partial { index: step })?;
        if let Some(last) = entries.last() {
            if door <= last.door {
                return Err(Fault::Disorderly { step, previous: last.door, door });
            }
        }
        if door > max_door {
            return Ok(Run { entries, unknown: None });
        }
        match world.content(door) {
            Some(content) => entries.push(SkipEntry::new(door, content)),
            None => return Ok(Run { entries, unknown: Some(door) }),
        }
    }
}

/// Runs `g` and replays it with every unopened door flipped; any change in
/// the trace is an inconsistency.
fn run_checked(
    g: &AdaptiveContestant,
    world: &dyn DoorContents,
    max_door: Door,
    done: impl Fn(&[SkipEntry]) -> bool,
) -> std::result::Result<Vec<SkipEntry>, Fault> {
    let first = run(g, world, max_door, &done)?;
    let opened: BTreeSet<Door> = first.entries.iter().map(|e| e.door).collect();
    let replay = run(g, &Flipped { base: world, opened: &opened }, max_door, &done)?;
    if replay.entries != first.entries {
        let step = first
            .entries
            .iter()
            .zip(&replay.entries)
            .position(|(a, b)| a != b)
            .unwrap_or(first.entries.len().min(replay.entries.len()));
        return Err(Fault::Inconsistent { step: step as u64 });
    }
    Ok(first.entries)
}

/// The doors `g` opens when the cars are exactly `cars`, up to `max_door`,
/// with the contents it saw.
pub fn eval_trace(g: &AdaptiveContestant, cars: &BTreeSet<Door>, max_door: Door) -> std::result::Result<Vec<SkipEntry>, Fault> {
    run_checked(g, cars, max_door, |_| false)
}

/// `g(cars) ∩ [0, max_door]` in opening order.
pub fn eval_contestant(g: &AdaptiveContestant, cars: &BTreeSet<Door>, max_door: Door) -> std::result::Result<Vec<Door>, Fault> {
    Ok(eval_trace(g, cars, max_door)?.into_iter().map(|e| e.door).collect())
}

/// `(X, SB)`: with cars on `C ∪ X` and goats elsewhere, the contestant opens
/// fewer than `s` doors of sub-block `sub_block`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SparsenessWitness {
    pub car_placement: Vec<Door>,
    pub sub_block: usize,
}

fn opponent(member: usize, g: &AdaptiveContestant) -> impl FnOnce(Fault) -> Error + '_ {
    move |fault| Error::Opponent { member, name: g.name.clone(), fault }
}

/// Doors opened per sub-block.
fn sub_block_counts(block: &DisorderedBlock, doors: impl Iterator<Item = Door>) -> Vec<u64> {
    let mut counts = vec![0u64; block.sub_blocks().len()];
    for d in doors {
        if let Some(i) = block.sub_block_of_door(d) {
            counts[i] += 1;
        }
    }
    counts
}

/// All witnesses `(X, SB)` with `X ⊆ IF − G − C`. Doors outside `C ∪ X` are
/// goats while testing.
pub fn sparse_sb_adaptive(
    g: &AdaptiveContestant,
    block: &DisorderedBlock,
    ledger: &RestrictionLedger,
    s: u64,
    cap: usize,
) -> Result<Vec<SparsenessWitness>> {
    sparse_sb_member(0, g, block, ledger, s, cap)
}

fn sparse_sb_member(
    member: usize,
    g: &AdaptiveContestant,
    block: &DisorderedBlock,
    ledger: &RestrictionLedger,
    s: u64,
    cap: usize,
) -> Result<Vec<SparsenessWitness>> {
    if s == 0 || block.sub_blocks().is_empty() {
        return Ok(Vec::new());
    }
    let free: Vec<Door> = block.if_doors().filter(|&d| !ledger.is_filled(d)).collect();
    if free.len() > cap {
        return Err(Error::WitnessCapExceeded { free: free.len(), cap });
    }
    let mut witnesses = Vec::new();
    let mut x = Vec::with_capacity(free.len());
    for mask in 0u64..1 << free.len() {
        x.clear();
        x.extend(free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &d)| d));
        let world = Overlay { base: ledger.cars(), extra: &x };
        let trace = run_checked(g, &world, block.ceil(), |_| false).map_err(opponent(member, g))?;
        let counts = sub_block_counts(block, trace.iter().map(|e| e.door));
        for (i, &c) in counts.iter().enumerate() {
            if c < s {
                witnesses.push(SparsenessWitness { car_placement: x.clone(), sub_block: i });
            }
        }
    }
    Ok(witnesses)
}

/// The earliest sub-block any witness names, then the least placement there
/// by size and then lexicographically.
pub fn minimal_witness<'a>(witnesses: impl IntoIterator<Item = &'a SparsenessWitness>) -> Option<&'a SparsenessWitness> {
    witnesses
        .into_iter()
        .min_by(|a, b| (a.sub_block, a.car_placement.len(), &a.car_placement).cmp(&(b.sub_block, b.car_placement.len(), &b.car_placement)))
}

/// A contestant entered in a stage, tagged with its enumeration index.
#[derive(Debug, Clone)]
pub struct Member {
    pub id: usize,
    pub contestant: AdaptiveContestant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveStep {
    pub sub_block: usize,
    pub doors: (Door, Door),
    /// The minimal placement before truncation below `⌊SB⌋`.
    pub witness: Vec<Door>,
    /// The cars actually added.
    pub cars: Vec<Door>,
    /// Contestants sparse at the chosen witness, removed from here on.
    pub removed: Vec<usize>,
    /// Number of witnesses found at this level, over all contestants.
    pub witnesses_found: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveTrace {
    pub steps: Vec<AdaptiveStep>,
    pub terminal: (Door, Door),
    /// Goats forced inside the terminal component before its cars were placed.
    pub terminal_goats: u64,
    pub cars_placed: u64,
    /// Goats forced beyond the block being filled.
    pub spill: BTreeSet<Door>,
}

/// Fills a block against adaptive contestants with threshold `s`.
pub fn update_cg_adaptive(
    block: &DisorderedBlock,
    family: &[Member],
    ledger: &mut RestrictionLedger,
    s: u64,
    cap: usize,
) -> Result<AdaptiveTrace> {
    if (block.level() as usize) < family.len() {
        return Err(Error::InsufficientNesting { level: block.level(), members: family.len() });
    }
    if ledger.touches(block.door_span()) {
        return Err(Error::Contract(format!("block at door {} is already restricted", block.floor())));
    }
    let mut steps = Vec::new();
    let mut spill = BTreeSet::new();
    let mut current = block;
    let mut remaining: Vec<&Member> = family.iter().collect();
    loop {
        let mut all = Vec::new();
        for m in &remaining {
            all.extend(sparse_sb_member(m.id, &m.contestant, current, ledger, s, cap)?);
        }
        let Some(chosen) = minimal_witness(&all).cloned() else {
            let terminal_goats = ledger.goats_in(current.door_span()) as u64;
            let mut cars_placed = 0;
            for d in current.if_doors() {
                if !ledger.is_goat(d) && !ledger.is_car(d) {
                    ledger.add_car(d)?;
                    cars_placed += 1;
                }
            }
            ledger.fill_goats(current.doors());
            return Ok(AdaptiveTrace { steps, terminal: (current.floor(), current.ceil()), terminal_goats, cars_placed, spill });
        };
        let sb = &current.sub_blocks()[chosen.sub_block];
        let cars: Vec<Door> = chosen.car_placement.iter().copied().filter(|&d| d < sb.floor()).collect();
        ledger.add_cars(cars.iter().copied())?;
        for d in current.doors() {
            if !sb.contains_door(d) && !ledger.is_car(d) {
                ledger.add_goat(d)?;
            }
        }
        let threshold = s as usize;
        for m in &remaining {
            let from = sb.floor();
            let trace = run_checked(&m.contestant, ledger.cars(), Door::MAX, |e| {
                e.iter().filter(|x| x.door >= from).count() >= threshold
            })
            .map_err(opponent(m.id, &m.contestant))?;
            for e in trace.iter().filter(|e| e.door >= from) {
                ledger.add_goat(e.door)?;
                if e.door > block.ceil() {
                    spill.insert(e.door);
                }
            }
        }
        let mut removed = Vec::new();
        for m in &remaining {
            let trace = run_checked(&m.contestant, ledger.cars(), current.ceil(), |_| false)
                .map_err(opponent(m.id, &m.contestant))?;
            if (trace.iter().filter(|e| sb.contains_door(e.door)).count() as u64) < s {
                removed.push(m.id);
            }
        }
        if removed.is_empty() {
            return Err(Error::Contract(format!(
                "no contestant is sparse at the chosen witness in sub-block {} at door {}",
                chosen.sub_block,
                sb.floor()
            )));
        }
        remaining.retain(|m| !removed.contains(&m.id));
        steps.push(AdaptiveStep {
            sub_block: chosen.sub_block,
            doors: (sb.floor(), sb.ceil()),
            witness: chosen.car_placement,
            cars,
            removed,
            witnesses_found: all.len(),
        });
        current = sb;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveStageRecord {
    pub stage: u64,
    /// `n_s`: the block of `h` filled at this stage, also the threshold used.
    pub block: u64,
    pub doors: (Door, Door),
    pub members: Vec<usize>,
    pub trace: AdaptiveTrace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveAssignment {
    /// `A` on `[0, ⌈DB^{n_last}⌉]`.
    pub assignment: BitPrefix,
    /// Goats forced beyond the assignment.
    pub spill_beyond: BTreeSet<Door>,
    pub ledger: RestrictionLedger,
    pub stages: Vec<AdaptiveStageRecord>,
    /// Contestants dropped, with the stage and the fault.
    pub dropped: Vec<(usize, u64, Fault)>,
}

impl AdaptiveAssignment {
    pub fn view(&self) -> AssignmentView<'_> {
        AssignmentView { assignment: &self.assignment, spill_goats: &self.spill_beyond }
    }
}

/// Stage `s` (from 0) enters contestant `g_s`, picks the least block `n_s` of
/// `h` that starts beyond every restricted door and is nested at least
/// `|F|` deep, pads everything before it with goats, and fills it with
/// threshold `n_s`. A faulting contestant is dropped and the stage retried.
pub fn build_adaptive_assignment(
    family: &[AdaptiveContestant],
    h: &HostPermutation,
    max_stages: u64,
    cap: usize,
) -> Result<AdaptiveAssignment> {
    let mut ledger = RestrictionLedger::new();
    let mut active: Vec<Member> = Vec::new();
    let mut dropped = Vec::new();
    let mut stages = Vec::new();
    let mut last_ceil: Option<Door> = None;
    for s in 0..max_stages {
        if let Some(g) = family.get(s as usize) {
            active.push(Member { id: s as usize, contestant: g.clone() });
        }
        loop {
            let bound = ledger.max_door();
            let n = (1..=h.stages()).find(|&n| {
                let b = h.block(n).expect("n within stages");
                bound.is_none_or(|m| b.floor() > m) && b.level() as usize >= active.len()
            });
            let Some(n) = n else {
                return Err(Error::HostExhausted(format!(
                    "stage {s}: no block of level ≥ {} starting beyond door {} among {} blocks",
                    active.len(),
                    bound.map_or("none".to_string(), |m| m.to_string()),
                    h.stages()
                )));
            };
            let block = h.block(n).expect("n within stages");
            let snapshot = ledger.clone();
            ledger.fill_goats(0..block.floor());
            match update_cg_adaptive(block, &active, &mut ledger, n, cap) {
                Ok(trace) => {
                    stages.push(AdaptiveStageRecord {
                        stage: s,
                        block: n,
                        doors: (block.floor(), block.ceil()),
                        members: active.iter().map(|m| m.id).collect(),
                        trace,
                    });
                    last_ceil = Some(block.ceil());
                    break;
                }
                Err(Error::Opponent { member, fault, .. }) => {
                    ledger = snapshot;
                    active.retain(|m| m.id != member);
                    dropped.push((member, s, fault));
                }
                Err(e) => return Err(e),
            }
        }
    }
    let len = last_ceil.map_or(0, |c| c + 1);
    let assignment = BitPrefix::from_fn(len, |d| ledger.is_car(d));
    let spill_beyond = ledger.goats().range(len..).copied().collect();
    Ok(AdaptiveAssignment { assignment, spill_beyond, ledger, stages, dropped })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdaptivePCheck {
    Pass,
    /// A car in the block followed, within `t` openings, by another car.
    Fail { car: Door, next_car: Door },
    /// The trace reached a door whose content is not known before `t`
    /// goats were confirmed after `car`.
    Undetermined { car: Door, door: Option<Door> },
}

impl AdaptivePCheck {
    pub fn passed(&self) -> bool {
        matches!(self, AdaptivePCheck::Pass)
    }
}

/// In `g`'s trace against the assignment, every car received inside `block`
/// is followed by at least `t` consecutive goats.
pub fn check_adaptive_p(
    world: &dyn DoorContents,
    g: &AdaptiveContestant,
    t: u64,
    block: RangeInclusive<Door>,
) -> std::result::Result<AdaptivePCheck, Fault> {
    let (lo, hi) = (*block.start(), *block.end());
    let t = t as usize;
    let finished = |e: &[SkipEntry]| -> bool {
        let Some(last) = e.last() else { return false };
        if last.door <= hi {
            return false;
        }
        match e.iter().rposition(|x| x.content && (lo..=hi).contains(&x.door)) {
            Some(i) => e.len() > i + t,
            None => true,
        }
    };
    let outcome = run(g, world, Door::MAX, finished)?;
    let entries = &outcome.entries;
    for (i, e) in entries.iter().enumerate() {
        if !(e.content && (lo..=hi).contains(&e.door)) {
            continue;
        }
        let after = &entries[i + 1..entries.len().min(i + 1 + t)];
        if let Some(next) = after.iter().find(|x| x.content) {
            return Ok(AdaptivePCheck::Fail { car: e.door, next_car: next.door });
        }
        if after.len() < t {
            return Ok(AdaptivePCheck::Undetermined { car: e.door, door: outcome.unknown });
        }
    }
    Ok(AdaptivePCheck::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{construct_db, construct_h, construct_h_with, BlockParams};
    use crate::catalog;
    use crate::nonadaptive::check_g;

    fn cars(d: &[Door]) -> BTreeSet<Door> {
        d.iter().copied().collect()
    }

    #[test]
    fn oblivious_opens_everything() {
        let g = catalog::contestant("oblivious-all").unwrap();
        assert_eq!(eval_contestant(&g, &cars(&[3]), 5).unwrap(), vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn evens_then_odd_after_car() {
        let g = catalog::contestant("evens-then-odd-after-car").unwrap();
        assert_eq!(eval_contestant(&g, &cars(&[4]), 9).unwrap(), vec![0, 2, 4, 5, 6, 8]);
    }

    #[test]
    fn disorderly_and_peeking_rules_fault() {
        let back = AdaptiveContestant::from_history("back", |h| match h.len() {
            0..=2 => Some(h.len() as u64 + 10),
            _ => Some(1),
        });
        assert_eq!(eval_contestant(&back, &cars(&[]), 100), Err(Fault::Disorderly { step: 3, previous: 12, door: 1 }));

        struct Peek;
        impl ContestantRule for Peek {
            fn next_door(&self, history: &[SkipEntry], world: &dyn DoorContents) -> Option<Door> {
                let next = history.last().map_or(0, |e| e.door + 1);
                Some(if world.content(next + 1) == Some(true) { next + 1 } else { next })
            }
        }
        let peek = AdaptiveContestant::new("peek", 100, Peek);
        assert!(matches!(eval_contestant(&peek, &cars(&[2]), 10), Err(Fault::Inconsistent { .. })));

        let partial = AdaptiveContestant::from_history("partial", |h| (h.len() < 2).then_some(h.len() as u64));
        assert_eq!(eval_contestant(&partial, &cars(&[]), 10), Err(Fault::Partial { index: 2 }));
        let g = catalog::contestant("oblivious-all").unwrap().with_budget(3);
        assert_eq!(eval_contestant(&g, &cars(&[]), 10), Err(Fault::BudgetExceeded { budget: 3 }));
    }

    #[test]
    fn oblivious_is_dense() {
        let b = construct_db(1, 1, 0, 0).unwrap();
        let g = catalog::contestant("oblivious-all").unwrap();
        let w = sparse_sb_adaptive(&g, &b, &RestrictionLedger::new(), 1, 16).unwrap();
        assert!(w.is_empty());
        assert!(sparse_sb_adaptive(&g, &b, &RestrictionLedger::new(), 0, 16).unwrap().is_empty());
    }

    #[test]
    fn stop_after_car_witnesses() {
        let b = construct_db(1, 1, 0, 0).unwrap();
        let g = catalog::contestant("stop-after-car").unwrap();
        let mut w = sparse_sb_adaptive(&g, &b, &RestrictionLedger::new(), 1, 16).unwrap();
        w.sort();
        // IF = {0, 5}; a car at 0 silences SB_0 and SB_1, a car at 5 only SB_1
        let expected = vec![
            SparsenessWitness { car_placement: vec![0], sub_block: 0 },
            SparsenessWitness { car_placement: vec![0], sub_block: 1 },
            SparsenessWitness { car_placement: vec![0, 5], sub_block: 0 },
            SparsenessWitness { car_placement: vec![0, 5], sub_block: 1 },
            SparsenessWitness { car_placement: vec![5], sub_block: 1 },
        ];
        assert_eq!(w, expected);
        assert_eq!(minimal_witness(&w), Some(&expected[0]));
    }

    #[test]
    fn cap_is_enforced() {
        let b = construct_db(1, 1, 0, 0).unwrap();
        let g = catalog::contestant("oblivious-all").unwrap();
        assert_eq!(
            sparse_sb_adaptive(&g, &b, &RestrictionLedger::new(), 1, 1),
            Err(Error::WitnessCapExceeded { free: 2, cap: 1 })
        );
    }

    #[test]
    fn empty_family_is_dense() {
        let b = construct_db(1, 1, 0, 0).unwrap();
        let mut l = RestrictionLedger::new();
        update_cg_adaptive(&b, &[], &mut l, 1, 16).unwrap();
        assert_eq!(l.cars().iter().copied().collect::<Vec<_>>(), vec![0, 5]);
    }

    #[test]
    fn stop_after_car_single_stage() {
        let h = construct_h(1).unwrap();
        let g = catalog::contestant("stop-after-car").unwrap();
        let out = build_adaptive_assignment(std::slice::from_ref(&g), &h, 1, 16).unwrap();
        let rec = &out.stages[0];
        assert_eq!(rec.block, 1);
        assert_eq!(rec.trace.steps.len(), 1);
        assert_eq!(rec.trace.steps[0].cars, vec![0]);
        assert_eq!(rec.trace.steps[0].removed, vec![0]);
        assert_eq!(out.assignment.members().collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
        assert_eq!(out.spill_beyond.len(), 1);
        assert_eq!(check_adaptive_p(&out.view(), &g, 1, 0..=13), Ok(AdaptivePCheck::Pass));
        assert_eq!(check_g(&out.assignment, &h, 1).unwrap(), Some(2));
    }

    #[test]
    fn later_stage_exhausts_host() {
        let h = construct_h(1).unwrap();
        let family = catalog::contestants(&["oblivious-all", "jump-after-car(4)"]).unwrap();
        assert!(matches!(build_adaptive_assignment(&family, &h, 2, 16), Err(Error::HostExhausted(_))));
    }

    #[test]
    fn compact_stages_keep_the_ledger_disjoint() {
        let h = construct_h_with(4, &BlockParams::fixed(3)).unwrap();
        let family = catalog::contestants(&["oblivious-all", "jump-after-car(4)", "parity-follower"]).unwrap();
        let out = build_adaptive_assignment(&family, &h, 3, 16).unwrap();
        assert!(out.ledger.is_disjoint());
        for rec in &out.stages {
            for &id in &rec.members {
                let p = check_adaptive_p(&out.view(), &family[id], rec.block, rec.doors.0..=rec.doors.1).unwrap();
                assert!(!matches!(p, AdaptivePCheck::Fail { .. }), "stage {} member {id}: {p:?}", rec.stage);
            }
        }
    }

    #[test]
    fn faulting_contestant_is_dropped_and_stage_retried() {
        let h = construct_h_with(3, &BlockParams::fixed(2)).unwrap();
        let bad = AdaptiveContestant::from_history("bad", |h| h.is_empty().then_some(0));
        let family = vec![catalog::contestant("oblivious-all").unwrap(), bad];
        let out = build_adaptive_assignment(&family, &h, 2, 16).unwrap();
        assert_eq!(out.dropped, vec![(1, 1, Fault::Partial { index: 1 })]);
        assert_eq!(out.stages[1].members, vec![0]);
    }

    #[test]
    fn p_check_reports_offending_car() {
        let a = BitPrefix::from_members(10, [2, 3]).unwrap();
        let spill = BTreeSet::new();
        let view = AssignmentView { assignment: &a, spill_goats: &spill };
        let g = catalog::contestant("oblivious-all").unwrap();
        assert_eq!(check_adaptive_p(&view, &g, 1, 0..=5), Ok(AdaptivePCheck::Fail { car: 2, next_car: 3 }));
        let none = BitPrefix::zeros(10);
        let view = AssignmentView { assignment: &none, spill_goats: &spill };
        assert_eq!(check_adaptive_p(&view, &g, 3, 0..=9), Ok(AdaptivePCheck::Pass));
        let late = BitPrefix::from_members(10, [8]).unwrap();
        let view = AssignmentView { assignment: &late, spill_goats: &spill };
        assert_eq!(check_adaptive_p(&view, &g, 3, 0..=9), Ok(AdaptivePCheck::Undetermined { car: 8, door: Some(10) }));
    }
}
