//! Disordered blocks and the disorderly contestant `h` assembled from them.
//!
//! A block of level `l` maps a time interval bijectively onto a door
//! interval. It starts with an increasing part `IF`; the `i`-th `IF` door sits
//! immediately before the doors of sub-block `i`, so the doors read
//! `(IF 0)(SB 0)(IF 1)(SB 1)…`. Times run through `IF` first, then through each
//! sub-block in order. Level-0 blocks are translations and are their own `IF`.
//!
//! Under the largeness sizing `|IF| = (t + s³)·s + 1` with `t` the block's
//! absolute start time, sizes grow so fast that only the first stage fits in
//! 64-bit doors. [`IfSizing::Fixed`] keeps the shape with a constant `|IF|`, for
//! exercising the host strategies on several stages.

use std::ops::{Range, RangeInclusive};

use crate::error::{Error, Result};
use crate::{Door, Time};

/// Default upper bound on the number of doors a construction may produce.
pub const DEFAULT_MAX_DOORS: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfSizing {
    /// `|IF| = (t + s³)·s + 1`, the least size meeting the largeness condition.
    Largeness,
    /// `|IF| = k` for every block.
    Fixed(u64),
}

impl IfSizing {
    fn if_len(self, s: u64, t: Time) -> Option<u64> {
        match self {
            IfSizing::Largeness => t.checked_add(s.checked_pow(3)?)?.checked_mul(s)?.checked_add(1),
            IfSizing::Fixed(k) => Some(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockParams {
    pub sizing: IfSizing,
    pub max_doors: u64,
}

impl Default for BlockParams {
    fn default() -> Self {
        Self { sizing: IfSizing::Largeness, max_doors: DEFAULT_MAX_DOORS }
    }
}

impl BlockParams {
    pub fn fixed(k: u64) -> Self {
        Self { sizing: IfSizing::Fixed(k), ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisorderedBlock {
    level: u32,
    time_start: Time,
    door_start: Door,
    len: u64,
    if_len: u64,
    sub_blocks: Vec<DisorderedBlock>,
}

impl DisorderedBlock {
    /// A level-0 block `t + i ↦ d + i` for `i < len`.
    pub fn translation(t: Time, d: Door, len: u64) -> Result<Self> {
        if len == 0 {
            return Err(Error::Contract("a block has at least one door".into()));
        }
        end_of(t, len)?;
        end_of(d, len)?;
        Ok(Self { level: 0, time_start: t, door_start: d, len, if_len: len, sub_blocks: Vec::new() })
    }

    /// A block with `if_len` increasing doors interleaved with `sub_blocks`.
    /// The sub-blocks must sit at the canonical times and doors.
    pub fn from_parts(t: Time, d: Door, if_len: u64, sub_blocks: Vec<DisorderedBlock>) -> Result<Self> {
        if sub_blocks.is_empty() {
            return Self::translation(t, d, if_len);
        }
        if sub_blocks.len() as u64 != if_len {
            return Err(Error::Contract(format!(
                "{} sub-blocks for an increasing part of size {if_len}",
                sub_blocks.len()
            )));
        }
        let level = sub_blocks[0].level + 1;
        let mut time = end_of(t, if_len)?;
        let mut door = d;
        for (i, sb) in sub_blocks.iter().enumerate() {
            if sb.level + 1 != level {
                return Err(Error::Contract(format!("sub-block {i} has level {}, expected {}", sb.level, level - 1)));
            }
            if sb.time_start != time || sb.door_start != door + 1 {
                return Err(Error::Contract(format!(
                    "sub-block {i} starts at time {} door {}, expected time {time} door {}",
                    sb.time_start,
                    sb.door_start,
                    door + 1
                )));
            }
            time = end_of(time, sb.len)?;
            door = end_of(sb.door_start, sb.len)?;
        }
        let len = time - t;
        Ok(Self { level, time_start: t, door_start: d, len, if_len, sub_blocks })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `⌊DB⌋`, the first door.
    pub fn floor(&self) -> Door {
        self.door_start
    }

    /// `⌈DB⌉`, the last door.
    pub fn ceil(&self) -> Door {
        self.door_start + self.len - 1
    }

    pub fn doors(&self) -> Range<Door> {
        self.door_start..self.door_start + self.len
    }

    pub fn door_span(&self) -> RangeInclusive<Door> {
        self.floor()..=self.ceil()
    }

    pub fn times(&self) -> Range<Time> {
        self.time_start..self.time_start + self.len
    }

    pub fn contains_door(&self, door: Door) -> bool {
        self.doors().contains(&door)
    }

    pub fn if_len(&self) -> u64 {
        self.if_len
    }

    /// The door `IF` maps its `i`-th time to.
    pub fn if_door(&self, i: u64) -> Door {
        debug_assert!(i < self.if_len);
        if self.sub_blocks.is_empty() {
            self.door_start + i
        } else {
            self.sub_blocks[i as usize].door_start - 1
        }
    }

    pub fn if_doors(&self) -> impl Iterator<Item = Door> + '_ {
        (0..self.if_len).map(move |i| self.if_door(i))
    }

    pub fn is_if_door(&self, door: Door) -> bool {
        if self.sub_blocks.is_empty() {
            return self.contains_door(door);
        }
        self.sub_blocks.binary_search_by_key(&(door + 1), |sb| sb.door_start).is_ok()
    }

    pub fn sub_blocks(&self) -> &[DisorderedBlock] {
        &self.sub_blocks
    }

    /// Index of the sub-block holding a door, if any.
    pub fn sub_block_of_door(&self, door: Door) -> Option<usize> {
        let idx = self.sub_blocks.partition_point(|sb| sb.door_start <= door);
        let i = idx.checked_sub(1)?;
        self.sub_blocks[i].contains_door(door).then_some(i)
    }

    /// The door opened at time `t`.
    pub fn eval(&self, t: Time) -> Result<Door> {
        if !self.times().contains(&t) {
            return Err(Error::OutOfRange { index: t, len: self.time_start + self.len });
        }
        let offset = t - self.time_start;
        if offset < self.if_len {
            return Ok(self.if_door(offset));
        }
        let idx = self.sub_blocks.partition_point(|sb| sb.time_start <= t) - 1;
        self.sub_blocks[idx].eval(t)
    }

    /// The time at which a door is opened.
    pub fn time_of(&self, door: Door) -> Result<Time> {
        if !self.contains_door(door) {
            return Err(Error::OutOfRange { index: door, len: self.door_start + self.len });
        }
        if self.sub_blocks.is_empty() {
            return Ok(self.time_start + (door - self.door_start));
        }
        match self.sub_block_of_door(door) {
            Some(i) => self.sub_blocks[i].time_of(door),
            None => {
                let i = self.sub_blocks.partition_point(|sb| sb.door_start <= door);
                Ok(self.time_start + i as u64)
            }
        }
    }

    /// Visits `(time, door)` in increasing time.
    pub fn for_each_pair(&self, f: &mut impl FnMut(Time, Door)) {
        for i in 0..self.if_len {
            f(self.time_start + i, self.if_door(i));
        }
        for sb in &self.sub_blocks {
            sb.for_each_pair(f);
        }
    }

    pub fn graph(&self) -> Vec<(Time, Door)> {
        let mut out = Vec::with_capacity(self.len as usize);
        self.for_each_pair(&mut |t, d| out.push((t, d)));
        out
    }

    /// Nesting depth, counted through the first sub-block at every level.
    pub fn depth(&self) -> u32 {
        self.sub_blocks.first().map_or(0, |sb| 1 + sb.depth())
    }
}

fn end_of(start: u64, len: u64) -> Result<u64> {
    start
        .checked_add(len)
        .ok_or_else(|| Error::Range(format!("interval at {start} of length {len} overflows")))
}

/// Number of doors `construct_db` would produce, without building anything.
pub fn block_size(s: u64, l: u32, t: Time, params: &BlockParams) -> Result<u64> {
    let overflow = || Error::Range(format!("stage {s} level {l} block at time {t} overflows 64-bit indices"));
    let too_big = |size: u64| {
        Error::Range(format!(
            "stage {s} level {l} block at time {t} needs more than {size} doors (cap {})",
            params.max_doors
        ))
    };
    let k = params.sizing.if_len(s, t).ok_or_else(overflow)?;
    if k == 0 {
        return Err(Error::Contract("the increasing part must be nonempty".into()));
    }
    if k > params.max_doors {
        return Err(too_big(k));
    }
    if l == 0 {
        return Ok(k);
    }
    let mut time = t.checked_add(k).ok_or_else(overflow)?;
    for _ in 0..k {
        let sub = block_size(s, l - 1, time, params)?;
        time = time.checked_add(sub).ok_or_else(overflow)?;
        if time - t > params.max_doors {
            return Err(too_big(time - t));
        }
    }
    Ok(time - t)
}

/// A level-`l` block for stage `s`, starting at time `t` and door `d`, sized
/// by the largeness condition.
pub fn construct_db(s: u64, l: u32, t: Time, d: Door) -> Result<DisorderedBlock> {
    construct_db_with(s, l, t, d, &BlockParams::default())
}

pub fn construct_db_with(s: u64, l: u32, t: Time, d: Door, params: &BlockParams) -> Result<DisorderedBlock> {
    if s == 0 {
        return Err(Error::Contract("stages start at 1".into()));
    }
    let size = block_size(s, l, t, params)?;
    end_of(d, size)?;
    Ok(build(s, l, t, d, params))
}

/// Builds a block whose size is already known to fit.
fn build(s: u64, l: u32, t: Time, d: Door, params: &BlockParams) -> DisorderedBlock {
    let k = params.sizing.if_len(s, t).expect("size checked");
    if l == 0 {
        return DisorderedBlock { level: 0, time_start: t, door_start: d, len: k, if_len: k, sub_blocks: Vec::new() };
    }
    let mut time = t + k;
    let mut door = d + 1;
    let mut sub_blocks = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let sb = build(s, l - 1, time, door, params);
        time += sb.len;
        door = sb.ceil() + 2;
        sub_blocks.push(sb);
    }
    DisorderedBlock { level: l, time_start: t, door_start: d, len: time - t, if_len: k, sub_blocks }
}

/// `|IF| ≥ (min dom IF + s³)·s` for the block and every nested block.
pub fn largeness_ok(block: &DisorderedBlock, s: u64) -> bool {
    let bound = s
        .checked_pow(3)
        .and_then(|c| block.time_start.checked_add(c))
        .and_then(|x| x.checked_mul(s));
    match bound {
        Some(b) if block.if_len >= b => block.sub_blocks.iter().all(|sb| largeness_ok(sb, s)),
        _ => false,
    }
}

/// Every door of the block is hit exactly once, in time order over the
/// block's time interval.
pub fn audit_bijection(block: &DisorderedBlock) -> Result<()> {
    let mut seen = vec![false; block.len as usize];
    let mut expected_time = block.time_start;
    let mut failure = None;
    block.for_each_pair(&mut |t, d| {
        if failure.is_some() {
            return;
        }
        if t != expected_time {
            failure = Some(format!("time {t} where {expected_time} was expected"));
        } else if !block.contains_door(d) {
            failure = Some(format!("time {t} maps to door {d} outside the block"));
        } else if std::mem::replace(&mut seen[(d - block.door_start) as usize], true) {
            failure = Some(format!("door {d} is hit twice"));
        }
        expected_time += 1;
    });
    if let Some(msg) = failure {
        return Err(Error::Contract(format!("bijection audit: {msg}")));
    }
    if expected_time != block.time_start + block.len {
        return Err(Error::Contract("bijection audit: time interval not covered".into()));
    }
    Ok(())
}

/// `IF` doors and sub-block doors partition the door interval, with `IF`
/// door `i` immediately before sub-block `i`; checked at every level.
pub fn audit_gap_filling(block: &DisorderedBlock) -> Result<()> {
    let mut next = block.door_start;
    if block.sub_blocks.is_empty() {
        return Ok(());
    }
    for (i, sb) in block.sub_blocks.iter().enumerate() {
        if block.if_door(i as u64) != next || sb.door_start != next + 1 {
            return Err(Error::Contract(format!(
                "gap audit: sub-block {i} of the block at door {} is misplaced",
                block.door_start
            )));
        }
        audit_gap_filling(sb)?;
        next = sb.ceil() + 1;
    }
    if next != block.door_start + block.len {
        return Err(Error::Contract(format!("gap audit: doors of the block at {} are not covered", block.door_start)));
    }
    Ok(())
}

/// Depth equals level everywhere, and level-0 blocks are translations.
pub fn audit_levels(block: &DisorderedBlock) -> Result<()> {
    if block.level == 0 {
        if !block.sub_blocks.is_empty() || block.if_len != block.len {
            return Err(Error::Contract(format!("level audit: level-0 block at door {} is not a translation", block.door_start)));
        }
        return Ok(());
    }
    if block.sub_blocks.is_empty() {
        return Err(Error::Contract(format!("level audit: level-{} block has no sub-blocks", block.level)));
    }
    for sb in &block.sub_blocks {
        if sb.level + 1 != block.level {
            return Err(Error::Contract(format!("level audit: sub-block at door {} has the wrong level", sb.door_start)));
        }
        audit_levels(sb)?;
    }
    Ok(())
}

/// `h = DB_1 ⌢ DB_2 ⌢ …`, where `DB_s` has level `s` and `DB_0` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HostPermutation {
    blocks: Vec<DisorderedBlock>,
    total_len: u64,
}

impl HostPermutation {
    pub fn from_blocks(blocks: Vec<DisorderedBlock>) -> Result<Self> {
        let mut next = 0;
        for (i, b) in blocks.iter().enumerate() {
            if b.time_start != next || b.door_start != next {
                return Err(Error::Contract(format!("block {} does not continue the previous one", i + 1)));
            }
            next = b.time_start + b.len;
        }
        Ok(Self { blocks, total_len: next })
    }

    pub fn blocks(&self) -> &[DisorderedBlock] {
        &self.blocks
    }

    /// `DB_s` for `s ≥ 1`.
    pub fn block(&self, s: u64) -> Option<&DisorderedBlock> {
        self.blocks.get(s.checked_sub(1)? as usize)
    }

    pub fn stages(&self) -> u64 {
        self.blocks.len() as u64
    }

    pub fn total_len(&self) -> u64 {
        self.total_len
    }

    /// The stage whose block holds a door.
    pub fn stage_of_door(&self, door: Door) -> Option<u64> {
        let idx = self.blocks.partition_point(|b| b.door_start <= door).checked_sub(1)?;
        self.blocks[idx].contains_door(door).then_some(idx as u64 + 1)
    }

    pub fn time_of(&self, door: Door) -> Result<Time> {
        let s = self.stage_of_door(door).ok_or(Error::OutOfRange { index: door, len: self.total_len })?;
        self.blocks[s as usize - 1].time_of(door)
    }
}

pub fn construct_h(stages: u64) -> Result<HostPermutation> {
    construct_h_with(stages, &BlockParams::default())
}

pub fn construct_h_with(stages: u64, params: &BlockParams) -> Result<HostPermutation> {
    let mut blocks = Vec::with_capacity(stages as usize);
    let mut next = 0u64;
    let mut total = 0u64;
    for s in 1..=stages {
        let level = u32::try_from(s).map_err(|_| Error::Range(format!("stage {s} is too deep")))?;
        let size = block_size(s, level, next, params).map_err(|e| match e {
            Error::Range(msg) => Error::Range(format!("stage {s}: {msg}")),
            other => other,
        })?;
        total = total
            .checked_add(size)
            .filter(|&t| t <= params.max_doors)
            .ok_or_else(|| Error::Range(format!("stage {s}: h exceeds {} doors", params.max_doors)))?;
        blocks.push(build(s, level, next, next, params));
        next = total;
    }
    HostPermutation::from_blocks(blocks)
}

pub fn h_eval(h: &HostPermutation, t: Time) -> Result<Door> {
    if t >= h.total_len {
        return Err(Error::OutOfRange { index: t, len: h.total_len });
    }
    let idx = h.blocks.partition_point(|b| b.time_start <= t) - 1;
    h.blocks[idx].eval(t)
}

/// Bijection, gap and level audits on every block, plus the concatenation
/// rule `⌊DB_{s+1}⌋ = ⌈DB_s⌉ + 1`.
pub fn audit_host(h: &HostPermutation) -> Result<()> {
    let mut next = 0;
    for (i, b) in h.blocks.iter().enumerate() {
        if b.floor() != next || b.time_start != next {
            return Err(Error::Contract(format!("concatenation audit: block {} starts at {}", i + 1, b.floor())));
        }
        if b.level as usize != i + 1 {
            return Err(Error::Contract(format!("level audit: block {} has level {}", i + 1, b.level)));
        }
        audit_bijection(b)?;
        audit_gap_filling(b)?;
        audit_levels(b)?;
        next = b.ceil() + 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero_stage_one() {
        let b = construct_db(1, 0, 0, 0).unwrap();
        assert_eq!(b.graph(), vec![(0, 0), (1, 1)]);
        assert_eq!(b.level(), 0);
    }

    #[test]
    fn level_one_stage_one() {
        let b = construct_db(1, 1, 0, 0).unwrap();
        assert_eq!(b.len(), 14);
        assert_eq!(b.if_doors().collect::<Vec<_>>(), vec![0, 5]);
        assert_eq!(b.sub_blocks()[0].doors(), 1..5);
        assert_eq!(b.sub_blocks()[0].times(), 2..6);
        assert_eq!(b.sub_blocks()[1].doors(), 6..14);
        assert_eq!(b.sub_blocks()[1].times(), 6..14);
        audit_bijection(&b).unwrap();
        audit_gap_filling(&b).unwrap();
        audit_levels(&b).unwrap();
        assert!(largeness_ok(&b, 1));
        assert!(!largeness_ok(&b, 2));
    }

    #[test]
    fn eval_and_time_of_are_inverse() {
        let b = construct_db_with(2, 2, 3, 7, &BlockParams::fixed(3)).unwrap();
        for (t, d) in b.graph() {
            assert_eq!(b.eval(t).unwrap(), d);
            assert_eq!(b.time_of(d).unwrap(), t);
        }
        assert!(b.eval(2).is_err());
        assert!(b.time_of(b.ceil() + 1).is_err());
    }

    #[test]
    fn fixed_sizes_follow_recurrence() {
        // S_0 = k, S_l = k·(1 + S_{l−1})
        let p = BlockParams::fixed(3);
        let sizes: Vec<u64> = (0..4).map(|l| block_size(1, l, 0, &p).unwrap()).collect();
        assert_eq!(sizes, vec![3, 12, 39, 120]);
    }

    #[test]
    fn second_stage_overflows() {
        assert!(matches!(construct_db(1, 2, 0, 0), Err(Error::Range(_))));
        match construct_h(2) {
            Err(Error::Range(msg)) => assert!(msg.starts_with("stage 2")),
            other => panic!("expected a range error, got {other:?}"),
        }
    }

    #[test]
    fn host_of_one_stage() {
        let h = construct_h(1).unwrap();
        assert_eq!(h.total_len(), 14);
        assert_eq!(h_eval(&h, 0).unwrap(), 0);
        assert_eq!(h_eval(&h, 1).unwrap(), 5);
        assert!(h_eval(&h, 14).is_err());
        audit_host(&h).unwrap();
    }

    #[test]
    fn compact_host_concatenates() {
        let h = construct_h_with(3, &BlockParams::fixed(2)).unwrap();
        audit_host(&h).unwrap();
        assert_eq!(h.block(2).unwrap().floor(), h.block(1).unwrap().ceil() + 1);
        assert_eq!(h.stage_of_door(h.block(3).unwrap().floor()), Some(3));
        assert_eq!(h.stage_of_door(h.total_len()), None);
    }

    #[test]
    fn hand_built_blocks() {
        let small = DisorderedBlock::translation(0, 0, 1).unwrap();
        assert!(!largeness_ok(&small, 2));
        assert!(largeness_ok(&small, 1));
        let sb = DisorderedBlock::translation(1, 1, 2).unwrap();
        let b = DisorderedBlock::from_parts(0, 0, 1, vec![sb]).unwrap();
        assert_eq!(b.graph(), vec![(0, 0), (1, 1), (2, 2)]);
        let misplaced = DisorderedBlock::translation(1, 2, 2).unwrap();
        assert!(DisorderedBlock::from_parts(0, 0, 1, vec![misplaced]).is_err());
    }

    #[test]
    fn sub_block_lookup() {
        let b = construct_db(1, 1, 0, 0).unwrap();
        assert_eq!(b.sub_block_of_door(0), None);
        assert_eq!(b.sub_block_of_door(3), Some(0));
        assert_eq!(b.sub_block_of_door(5), None);
        assert_eq!(b.sub_block_of_door(13), Some(1));
        assert!(b.is_if_door(5) && !b.is_if_door(6));
    }
}
