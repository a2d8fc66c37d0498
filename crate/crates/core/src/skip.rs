//! Skip sequences and skip rules: orderly, weakly adaptive selection where
//! every opened door's content is taken.

use std::fmt;
use std::ops::Range;
use std::sync::Mutex;

use crate::bits::BitPrefix;
use crate::error::{Error, Result};
use crate::scalar::DensityScalar;

/// One observation: the door opened and what was behind it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SkipEntry {
    pub door: u64,
    pub content: bool,
}

impl SkipEntry {
    pub fn new(door: u64, content: bool) -> Self {
        Self { door, content }
    }
}

/// A history of observations whose doors strictly increase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SkipSequence {
    entries: Vec<SkipEntry>,
}

impl SkipSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<SkipEntry>) -> Result<Self> {
        let mut seq = Self::new();
        for e in entries {
            seq.push(e)?;
        }
        Ok(seq)
    }

    pub fn push(&mut self, entry: SkipEntry) -> Result<()> {
        if let Some(last) = self.entries.last() {
            if entry.door <= last.door {
                return Err(Error::NotOrderly {
                    step: self.entries.len() as u64,
                    previous: last.door,
                    door: entry.door,
                });
            }
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[SkipEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last_door(&self) -> Option<u64> {
        self.entries.last().map(|e| e.door)
    }

    pub fn doors(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.door)
    }
}

/// A total map from histories to the next door, which must exceed the last
/// door of the history.
pub trait SkipRule: Send + Sync {
    fn name(&self) -> String;

    fn next_door(&self, history: &[SkipEntry]) -> Result<u64>;
}

impl<R: SkipRule + ?Sized> SkipRule for Box<R> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn next_door(&self, history: &[SkipEntry]) -> Result<u64> {
        (**self).next_door(history)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The next door lies beyond the prefix.
    EndOfPrefix { next_door: u64 },
    StepBudget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipTrace {
    pub trace: SkipSequence,
    pub selected: BitPrefix,
    pub stop: StopReason,
}

/// Runs a rule against a prefix. Running past the prefix is a clean stop that
/// keeps the partial trace; a non-increasing door is an error.
pub fn apply_skip_rule<R: SkipRule + ?Sized>(rule: &R, a: &BitPrefix, max_steps: usize) -> Result<SkipTrace> {
    let mut trace = SkipSequence::new();
    let mut selected = BitPrefix::default();
    loop {
        if trace.len() >= max_steps {
            return Ok(SkipTrace { trace, selected, stop: StopReason::StepBudget });
        }
        let door = rule.next_door(trace.entries())?;
        if let Some(previous) = trace.last_door() {
            if door <= previous {
                return Err(Error::NotOrderly { step: trace.len() as u64, previous, door });
            }
        }
        if door >= a.len() {
            return Ok(SkipTrace { trace, selected, stop: StopReason::EndOfPrefix { next_door: door } });
        }
        let content = a.get(door)?;
        trace.push(SkipEntry { door, content })?;
        selected.push(content);
    }
}

/// `σ ↦ last + step`, starting at door 0. `step = 1` is "always next door";
/// `skip(k)` is `step = k + 1`.
#[derive(Debug, Clone, Copy)]
pub struct Stride {
    pub step: u64,
}

impl SkipRule for Stride {
    fn name(&self) -> String {
        if self.step == 1 { "next-door".into() } else { format!("skip({})", self.step - 1) }
    }

    fn next_door(&self, history: &[SkipEntry]) -> Result<u64> {
        Ok(history.last().map_or(0, |e| e.door + self.step))
    }
}

pub fn next_door_rule() -> Stride {
    Stride { step: 1 }
}

/// Layout of the `n`-th ordered block `[b_n, b_{n+1})` with `b_n = (4ⁿ − 1)/3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderedBlockLayout {
    pub n: u32,
    pub start: u64,
    pub end: u64,
    pub sub_block_len: u64,
    pub sub_block_count: u64,
}

impl OrderedBlockLayout {
    pub fn sub_block(&self, i: u64) -> Range<u64> {
        let lo = self.start + i * self.sub_block_len;
        lo..lo + self.sub_block_len
    }

    pub fn range(&self) -> Range<u64> {
        self.start..self.end
    }

    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn block_start(n: u32) -> Option<u64> {
    let pow = 4u64.checked_pow(n)?;
    Some((pow - 1) / 3)
}

pub fn ordered_block(n: u32) -> Result<OrderedBlockLayout> {
    let range_err = || Error::Range(format!("ordered block {n} does not fit in 64-bit doors"));
    let start = block_start(n).ok_or_else(range_err)?;
    let end = block_start(n + 1).ok_or_else(range_err)?;
    let side = 1u64 << n;
    Ok(OrderedBlockLayout { n, start, end, sub_block_len: side, sub_block_count: side })
}

/// The ordered block containing a door.
pub fn ordered_block_of(door: u64) -> OrderedBlockLayout {
    let mut n = 0;
    loop {
        let layout = ordered_block(n).expect("every u64 door lies in a representable block");
        if door < layout.end {
            return layout;
        }
        n += 1;
    }
}

/// Within each ordered block, opens the first bit of every sub-block; on
/// seeing a 1 it takes the rest of that sub-block and moves on to the next
/// block. If every first bit is 0 it moves on as well.
///
/// The rule is stateless in the sense that the last observation alone
/// determines the next door: interior doors of a sub-block are only opened
/// after its first door showed a 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlockScanner;

pub fn block_scanner() -> BlockScanner {
    BlockScanner
}

impl SkipRule for BlockScanner {
    fn name(&self) -> String {
        "block-scanner".into()
    }

    fn next_door(&self, history: &[SkipEntry]) -> Result<u64> {
        let Some(last) = history.last() else { return Ok(0) };
        let block = ordered_block_of(last.door);
        let offset = last.door - block.start;
        let sub = offset / block.sub_block_len;
        let within = offset % block.sub_block_len;
        let sub_range = block.sub_block(sub);
        let reading = within > 0 || last.content;
        if reading {
            if last.door + 1 < sub_range.end {
                Ok(last.door + 1)
            } else {
                Ok(block.end)
            }
        } else if sub + 1 < block.sub_block_count {
            Ok(block.sub_block(sub + 1).start)
        } else {
            Ok(block.end)
        }
    }
}

/// Density of the block scanner's selection at the moment it leaves each
/// ordered block that fits inside the prefix, as `(n, ρ)`.
pub fn scanner_exit_densities<T: DensityScalar>(a: &BitPrefix) -> Result<Vec<(u32, T)>> {
    let run = apply_skip_rule(&block_scanner(), a, a.len() as usize)?;
    let entries = run.trace.entries();
    let mut out = Vec::new();
    let mut n = 0;
    loop {
        let block = ordered_block(n)?;
        if block.end > a.len() {
            return Ok(out);
        }
        let taken = entries.partition_point(|e| e.door < block.end);
        let ones = entries[..taken].iter().filter(|e| e.content).count() as u64;
        out.push((n, T::from_counts(ones, taken as u64)));
        n += 1;
    }
}

/// Always opens door `2n`; opens `2n + 1` only when door `2n` held a 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvenOdd;

pub fn even_odd_rule() -> EvenOdd {
    EvenOdd
}

impl SkipRule for EvenOdd {
    fn name(&self) -> String {
        "even-odd".into()
    }

    fn next_door(&self, history: &[SkipEntry]) -> Result<u64> {
        Ok(match history.last() {
            None => 0,
            Some(e) if e.door % 2 == 0 && e.content => e.door + 1,
            Some(e) if e.door % 2 == 0 => e.door + 2,
            Some(e) => e.door + 1,
        })
    }
}

/// Simulation state of the inner rule on the doubled history.
#[derive(Debug, Clone, Default)]
struct HalveMemo {
    /// The prefix of the outer history already consumed.
    consumed: Vec<SkipEntry>,
    /// The inner rule's own history on `σ ⊕ σ`.
    inner: Vec<SkipEntry>,
    /// The inner rule's pending door, if already computed.
    pending: Option<u64>,
}

/// `g` selects `k` whenever the inner rule `f`, run against `σ ⊕ σ`, selects
/// `2k` or `2k + 1`; an attempt at `2k + 1` right after `2k` is answered from
/// the history without a new selection.
pub struct Halved<R> {
    inner: R,
    memo: Mutex<HalveMemo>,
}

pub fn halve_rule<R: SkipRule>(f: R) -> Halved<R> {
    Halved { inner: f, memo: Mutex::new(HalveMemo::default()) }
}

impl<R> Halved<R> {
    pub fn inner(&self) -> &R {
        &self.inner
    }
}

impl<R: SkipRule> fmt::Debug for Halved<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Halved({})", self.inner.name())
    }
}

impl<R: SkipRule> SkipRule for Halved<R> {
    fn name(&self) -> String {
        format!("halved({})", self.inner.name())
    }

    fn next_door(&self, history: &[SkipEntry]) -> Result<u64> {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        if !history.starts_with(&memo.consumed) {
            *memo = HalveMemo::default();
        }
        let memo = &mut *memo;
        loop {
            let door = match memo.pending.take() {
                Some(d) => d,
                None => {
                    let d = self.inner.next_door(&memo.inner)?;
                    if let Some(last) = memo.inner.last() {
                        if d <= last.door {
                            return Err(Error::NotOrderly {
                                step: memo.inner.len() as u64,
                                previous: last.door,
                                door: d,
                            });
                        }
                    }
                    d
                }
            };
            let k = door / 2;
            if let Some(prev) = memo.consumed.last() {
                if prev.door == k {
                    memo.inner.push(SkipEntry::new(door, prev.content));
                    continue;
                }
            }
            match history.get(memo.consumed.len()) {
                Some(observed) if observed.door == k => {
                    memo.inner.push(SkipEntry::new(door, observed.content));
                    memo.consumed.push(*observed);
                }
                Some(observed) => {
                    return Err(Error::Contract(format!(
                        "history entry at door {} does not follow the halved rule (expected {k})",
                        observed.door
                    )));
                }
                None => {
                    memo.pending = Some(door);
                    return Ok(k);
                }
            }
        }
    }
}
