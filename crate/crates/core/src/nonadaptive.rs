//! The host's stagewise construction against monotone selectors, and the
//! `G_s` / `P_{f,s}` requirement checkers.
//!
//! Where the underlying argument asks the halting oracle for `f ↾ DB_s`, this
//! module evaluates each selector directly under a step budget. A selector
//! that faults is dropped from the current and all later stages.

use std::collections::BTreeSet;

use crate::bits::BitPrefix;
use crate::blocks::{h_eval, DisorderedBlock, HostPermutation};
use crate::error::{Error, Fault, Result};
use crate::ledger::RestrictionLedger;
use crate::selector::MonotoneSelector;
use crate::Door;

/// Default evaluation budget per selector and stage.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// `F = {f_0, f_1, …}` in enumeration order.
#[derive(Debug, Clone, Default)]
pub struct OpponentFamily {
    members: Vec<MonotoneSelector>,
}

impl OpponentFamily {
    pub fn new(members: Vec<MonotoneSelector>) -> Self {
        Self { members }
    }

    pub fn members(&self) -> &[MonotoneSelector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A member's doors inside the block being filled, tagged with its index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberDoors {
    pub id: usize,
    pub doors: BTreeSet<Door>,
}

fn hits_below(doors: &BTreeSet<Door>, sb: &DisorderedBlock, s: u64) -> bool {
    (doors.range(sb.door_span()).take(s as usize).count() as u64) < s
}

/// Index of the first sub-block where `f` opens fewer than `s` doors, or
/// `None` for a dense outcome (including blocks without sub-blocks).
pub fn sparse_sb0(f_doors: &BTreeSet<Door>, block: &DisorderedBlock, s: u64) -> Option<usize> {
    block.sub_blocks().iter().position(|sb| hits_below(f_doors, sb, s))
}

/// One level of the recursion: the member found sparse and the sub-block
/// zoomed into, by door range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseStep {
    pub member: usize,
    pub sub_block: usize,
    pub doors: (Door, Door),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CgTrace {
    pub steps: Vec<SparseStep>,
    /// Door range of the component that received the cars.
    pub terminal: (Door, Door),
    /// Goats already forced inside the terminal component before its cars
    /// were placed.
    pub terminal_goats: u64,
    /// Cars placed, all on the terminal component's increasing part.
    pub cars_placed: u64,
}

/// Fills a fresh block against a single selector. A level-0 block has no
/// sub-blocks, so the outcome there is vacuously dense.
pub fn update_cg1(block: &DisorderedBlock, f_doors: &BTreeSet<Door>, ledger: &mut RestrictionLedger, s: u64) -> Result<CgTrace> {
    fill(block, &[MemberDoors { id: 0, doors: f_doors.clone() }], ledger, s)
}

/// Fills a fresh block against several selectors: while some member is sparse
/// at a sub-block, goats go outside that sub-block and on the member's doors
/// inside it, and the search continues inside with that member removed. The
/// first level where all remaining members are dense receives cars on its
/// increasing part and goats everywhere else.
pub fn update_cg(block: &DisorderedBlock, family: &[MemberDoors], ledger: &mut RestrictionLedger, s: u64) -> Result<CgTrace> {
    if (block.level() as usize) < family.len() {
        return Err(Error::InsufficientNesting { level: block.level(), members: family.len() });
    }
    fill(block, family, ledger, s)
}

fn fill(block: &DisorderedBlock, family: &[MemberDoors], ledger: &mut RestrictionLedger, s: u64) -> Result<CgTrace> {
    if ledger.touches(block.door_span()) {
        return Err(Error::Contract(format!("block at door {} is already restricted", block.floor())));
    }
    let mut steps = Vec::new();
    let mut current = block;
    let mut remaining: Vec<&MemberDoors> = family.iter().collect();
    loop {
        let sparse = remaining
            .iter()
            .enumerate()
            .find_map(|(pos, m)| sparse_sb0(&m.doors, current, s).map(|sb| (pos, sb)));
        let Some((pos, sb_idx)) = sparse else {
            let terminal_goats = ledger.goats_in(current.door_span()) as u64;
            let mut cars_placed = 0;
            for d in current.if_doors() {
                if !ledger.is_goat(d) {
                    ledger.add_car(d)?;
                    cars_placed += 1;
                }
            }
            ledger.fill_goats(current.doors());
            return Ok(CgTrace { steps, terminal: (current.floor(), current.ceil()), terminal_goats, cars_placed });
        };
        let member = remaining.remove(pos);
        let sb = &current.sub_blocks()[sb_idx];
        for d in current.doors() {
            if !sb.contains_door(d) {
                ledger.add_goat(d)?;
            }
        }
        ledger.add_goats(member.doors.range(sb.door_span()).copied())?;
        steps.push(SparseStep { member: member.id, sub_block: sb_idx, doors: (sb.floor(), sb.ceil()) });
        current = sb;
    }
}

/// What happened at one stage of the host construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: u64,
    pub doors: (Door, Door),
    /// Members of `F_s` that were evaluated successfully.
    pub members: Vec<usize>,
    pub trace: CgTrace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HostAssignment {
    /// `A` on `[0, |h|)`.
    pub assignment: BitPrefix,
    pub ledger: RestrictionLedger,
    pub stages: Vec<StageRecord>,
    /// Members dropped, with the stage and the fault that caused it.
    pub dropped: Vec<(usize, u64, Fault)>,
}

impl HostAssignment {
    /// `F_s` as actually used at stage `s`.
    pub fn members_at(&self, s: u64) -> &[usize] {
        self.stages.iter().find(|r| r.stage == s).map_or(&[], |r| &r.members)
    }
}

/// Stage `s` fills `DB_s` against the first `s` members of the family that
/// have not faulted; `A ↾ DB_s` is the resulting car set.
pub fn build_host_assignment(family: &OpponentFamily, h: &HostPermutation, budget: u64) -> Result<HostAssignment> {
    let mut ledger = RestrictionLedger::new();
    let mut stages = Vec::new();
    let mut dropped: Vec<(usize, u64, Fault)> = Vec::new();
    for (i, block) in h.blocks().iter().enumerate() {
        let s = i as u64 + 1;
        let mut doors = Vec::new();
        for (id, f) in family.members().iter().enumerate().take(s as usize) {
            if dropped.iter().any(|(d, _, _)| *d == id) {
                continue;
            }
            match f.image_within(block.floor(), block.ceil(), budget) {
                Ok(image) => doors.push(MemberDoors { id, doors: image }),
                Err(fault) => dropped.push((id, s, fault)),
            }
        }
        let trace = update_cg(block, &doors, &mut ledger, s)?;
        stages.push(StageRecord {
            stage: s,
            doors: (block.floor(), block.ceil()),
            members: doors.iter().map(|m| m.id).collect(),
            trace,
        });
    }
    let assignment = BitPrefix::from_fn(h.total_len(), |d| ledger.is_car(d));
    Ok(HostAssignment { assignment, ledger, stages, dropped })
}

/// The cars `h` receives, in time order, over the times whose doors lie in
/// the prefix.
pub fn received_by_h(a: &BitPrefix, h: &HostPermutation) -> Result<Vec<bool>> {
    let horizon = a.len().min(h.total_len());
    (0..horizon).map(|t| a.get(h_eval(h, t)?)).collect()
}

/// `G_s`: the least `n > s` with `|[0, n(s+1)) ∩ h⁻¹(A)| ≥ ns`, if one lies
/// inside the prefix.
pub fn check_g(a: &BitPrefix, h: &HostPermutation, s: u64) -> Result<Option<u64>> {
    let received = received_by_h(a, h)?;
    let mut prefix = Vec::with_capacity(received.len() + 1);
    prefix.push(0u64);
    for &r in &received {
        prefix.push(prefix.last().unwrap() + r as u64);
    }
    let len = received.len() as u64;
    let mut n = s + 1;
    while let Some(end) = n.checked_mul(s + 1).filter(|&e| e <= len) {
        if prefix[end as usize] >= n * s {
            return Ok(Some(n));
        }
        n += 1;
    }
    Ok(None)
}

/// A pair of consecutive cars between which `f` opens too few doors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PViolation {
    pub car: Door,
    pub next_car: Door,
    pub opened: u64,
}

/// `P_{f,s}` on the prefix from `from_door` on: between consecutive cars `f`
/// receives, `f` opens at least `s` doors of the closed interval.
///
/// Only cars `f` actually opens are enumerated. When `f` opens every door this
/// is the requirement read over all cars of `A`.
pub fn find_p_violation(a: &BitPrefix, f_doors: &BTreeSet<Door>, s: u64, from_door: Door) -> Option<PViolation> {
    let cars: Vec<Door> = f_doors
        .range(from_door..a.len())
        .copied()
        .filter(|&d| a.get(d).unwrap_or(false))
        .collect();
    cars.windows(2).find_map(|w| {
        let opened = f_doors.range(w[0]..=w[1]).count() as u64;
        (opened < s).then_some(PViolation { car: w[0], next_car: w[1], opened })
    })
}

pub fn check_p(a: &BitPrefix, f_doors: &BTreeSet<Door>, s: u64, from_door: Door) -> bool {
    find_p_violation(a, f_doors, s, from_door).is_none()
}
