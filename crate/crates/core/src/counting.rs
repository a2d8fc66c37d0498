//! Brute-force counting over ordered blocks: big sub-blocks and their
//! harmonic bound, the hat reduction of a permutation to a window, and the
//! greedy restraint construction of a set that is small under every listed
//! permutation yet dense for the block scanner.

use std::collections::BTreeSet;
use std::ops::Range;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::bits::BitPrefix;
use crate::error::{Error, Result};
use crate::permutation::{FinitePermutation, PermutationFragment};
use crate::skip::ordered_block;
use crate::{BigRational, Rational};

/// Default largest ordered block the greedy search looks at.
pub const DEFAULT_BLOCK_CEILING: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BignessReport {
    pub n: u32,
    pub sub_block_index: u64,
    pub is_big: bool,
    /// Least `s ∈ [1, 4ⁿ]` with `ρ_s(π(X)) > 1/n`.
    pub minimal_s: Option<u64>,
    /// `|π(X) ↾ minimal_s|`.
    pub k: Option<u64>,
}

fn window(n: u32) -> Result<u64> {
    4u64.checked_pow(n).ok_or_else(|| Error::Range(format!("4^{n} overflows")))
}

/// Whether sub-block `i` of `[0, 4ⁿ)`, that is `[i·2ⁿ, (i+1)·2ⁿ)`, has some
/// prefix `s ≤ 4ⁿ` where its image is denser than `1/n`.
pub fn is_big(pi: &FinitePermutation, n: u32, i: u64) -> Result<BignessReport> {
    if n == 0 {
        return Err(Error::Contract("bigness needs n ≥ 1".into()));
    }
    let size = window(n)?;
    if pi.size() != size {
        return Err(Error::LengthMismatch { left: pi.size(), right: size });
    }
    let side = 1u64 << n;
    if i >= side {
        return Err(Error::OutOfRange { index: i, len: side });
    }
    let image = pi.image_of(i * side..(i + 1) * side);
    let n64 = n as u64;
    let mut count = 0u64;
    let mut next = 0usize;
    for s in 1..=size {
        while next < image.len() && image[next] < s {
            count += 1;
            next += 1;
        }
        if n64 * count > s {
            if s >= n64 * count {
                return Err(Error::Contract(format!("minimal witness {s} is not below n·k = {}", n64 * count)));
            }
            return Ok(BignessReport { n, sub_block_index: i, is_big: true, minimal_s: Some(s), k: Some(count) });
        }
    }
    Ok(BignessReport { n, sub_block_index: i, is_big: false, minimal_s: None, k: None })
}

/// `n · H_{2ⁿ}` exactly.
pub fn harmonic_bound(n: u32) -> BigRational {
    let mut sum = BigRational::zero();
    for k in 1..=(1u64 << n) {
        sum += BigRational::new(BigInt::from(1), BigInt::from(k));
    }
    sum * BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigCount {
    pub count: u64,
    pub bound: BigRational,
    pub reports: Vec<BignessReport>,
}

/// Counts big sub-blocks and asserts the count stays within `n · H_{2ⁿ}`.
pub fn count_big(pi: &FinitePermutation, n: u32) -> Result<BigCount> {
    let reports = (0..1u64 << n).map(|i| is_big(pi, n, i)).collect::<Result<Vec<_>>>()?;
    let count = reports.iter().filter(|r| r.is_big).count() as u64;
    let bound = harmonic_bound(n);
    if BigRational::from_integer(BigInt::from(count)) > bound {
        return Err(Error::Contract(format!("{count} big sub-blocks exceed the bound {bound}")));
    }
    Ok(BigCount { count, bound, reports })
}

/// `π̂(i) = π(i) − |[0, π(i)) ∩ π([4ⁿ, ∞))|` on `[0, 4ⁿ)`.
///
/// Every value below the largest window image must have a known preimage, so
/// the count of out-of-window images below each `π(i)` is determined; then
/// `π̂(i)` is the rank of `π(i)` among the window images.
pub fn hat_permutation(pi: &PermutationFragment, n: u32) -> Result<FinitePermutation> {
    let size = window(n)?;
    let images = (0..size).map(|i| pi.image(i)).collect::<Result<Vec<_>>>()?;
    let top = images.iter().copied().max().unwrap_or(0);
    for v in 0..top {
        pi.preimage(v)?;
    }
    let mut sorted = images.clone();
    sorted.sort_unstable();
    let forward = images
        .iter()
        .map(|v| sorted.binary_search(v).expect("value is present") as u64)
        .collect();
    FinitePermutation::from_forward(forward)
}

/// One stage of the greedy construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyStage {
    pub stage: u64,
    pub block: u32,
    pub sub_block: u64,
    pub doors: Range<u64>,
    /// `σ_s`.
    pub restraint: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyState {
    pub stages: Vec<GreedyStage>,
    pub members: BTreeSet<u64>,
    /// Why the construction stopped before `max_stages`, if it did.
    pub failure: Option<String>,
}

impl GreedyState {
    /// `X` on `[0, len)`.
    pub fn prefix(&self, len: u64) -> BitPrefix {
        BitPrefix::from_fn(len, |d| self.members.contains(&d))
    }

    /// End of the last chosen ordered block.
    pub fn covered_len(&self) -> u64 {
        self.stages.last().map_or(0, |s| ordered_block(s.block).map_or(0, |b| b.end))
    }
}

/// Sorted images of a set under a fragment.
fn images(pi: &PermutationFragment, points: impl IntoIterator<Item = u64>) -> Result<Vec<u64>> {
    let mut out = points.into_iter().map(|p| pi.image(p)).collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    Ok(out)
}

/// Largest `ρ_t` over `t` in `(lo, hi]` (or `t > lo` when `hi` is `None`)
/// for a sorted set of points, checked at `t = lo + 1` and just after every
/// point, where prefix densities peak.
fn max_density_after(sorted: &[u64], lo: u64, hi: Option<u64>) -> Rational {
    let density = |t: u64| Rational::new(sorted.partition_point(|&y| y < t) as i64, t as i64);
    let in_range = |t: u64| t > lo && hi.is_none_or(|h| t <= h);
    let mut best = if in_range(lo + 1) { density(lo + 1) } else { Rational::zero() };
    for &y in sorted {
        let t = y + 1;
        if in_range(t) {
            best = best.max(density(t));
        }
    }
    best
}

/// `max π⁻¹([0, b)) + 1`.
fn restraint(pi: &PermutationFragment, b: u64) -> Result<u64> {
    let mut m = 0;
    for v in 0..b {
        m = m.max(pi.preimage(v)?);
    }
    Ok(m + 1)
}

fn stage0(pi: &PermutationFragment, ceiling: u32) -> Result<Option<(u32, u64, Range<u64>)>> {
    let half = Rational::new(1, 2);
    for n in 0..=ceiling {
        let block = ordered_block(n)?;
        for i in 0..block.sub_block_count {
            let doors = block.sub_block(i);
            let img = images(pi, doors.clone())?;
            if max_density_after(&img, 0, None) <= half {
                return Ok(Some((n, i, doors)));
            }
        }
    }
    Ok(None)
}

fn next_stage(
    perms: &[PermutationFragment],
    x: &BTreeSet<u64>,
    after_block: u32,
    sigma: u64,
    bound: Rational,
    ceiling: u32,
) -> Result<Option<(u32, u64, Range<u64>)>> {
    for n in after_block + 1..=ceiling {
        let block = ordered_block(n)?;
        let mut clear = true;
        for pi in perms {
            if images(pi, block.range())?.first().is_some_and(|&m| m <= sigma) {
                clear = false;
                break;
            }
        }
        if !clear {
            continue;
        }
        'sub: for i in 0..block.sub_block_count {
            let doors = block.sub_block(i);
            for pi in perms {
                let img = images(pi, x.iter().copied().chain(doors.clone()))?;
                if max_density_after(&img, sigma, None) > bound {
                    continue 'sub;
                }
            }
            return Ok(Some((n, i, doors)));
        }
    }
    Ok(None)
}

/// Stage 0 takes the first sub-block whose image under `π_0` has every prefix
/// density at most `1/2`. Stage `s+1` looks in later blocks whose images under
/// `π_0, …, π_{s+1}` all lie above `σ_s`, for a sub-block keeping every prefix
/// density beyond `σ_s` at most `1/(s+2)`. Restraints are
/// `σ = max_i max π_i⁻¹([0, b_{n+1})) + 1` over the permutations in play.
pub fn build_x_greedy(perms: &[PermutationFragment], max_stages: u64, ceiling: u32) -> Result<GreedyState> {
    if perms.is_empty() {
        return Err(Error::Contract("the greedy construction needs at least one permutation".into()));
    }
    let mut state = GreedyState { stages: Vec::new(), members: BTreeSet::new(), failure: None };
    for s in 0..max_stages {
        let in_play = &perms[..perms.len().min(s as usize + 1)];
        let found = match state.stages.last() {
            None => stage0(&perms[0], ceiling),
            Some(prev) => next_stage(in_play, &state.members, prev.block, prev.restraint, Rational::new(1, s as i64 + 1), ceiling),
        };
        let (n, i, doors) = match found {
            Ok(Some(hit)) => hit,
            Ok(None) => {
                state.failure = Some(format!("stage {s}: no sub-block qualifies up to block {ceiling}"));
                return Ok(state);
            }
            Err(Error::Horizon(msg)) => {
                state.failure = Some(format!("stage {s}: {msg}"));
                return Ok(state);
            }
            Err(e) => return Err(e),
        };
        let end = ordered_block(n)?.end;
        let mut sigma = 0;
        for pi in in_play {
            match restraint(pi, end) {
                Ok(r) => sigma = sigma.max(r),
                Err(Error::Horizon(msg)) => {
                    state.failure = Some(format!("stage {s}: {msg}"));
                    return Ok(state);
                }
                Err(e) => return Err(e),
            }
        }
        state.members.extend(doors.clone());
        state.stages.push(GreedyStage { stage: s, block: n, sub_block: i, doors, restraint: sigma });
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyCheck {
    pub stage: u64,
    pub perm: usize,
    /// `(σ_s, σ_{s+1}]`.
    pub window: (u64, u64),
    pub worst: Rational,
    pub bound: Rational,
}

impl GreedyCheck {
    pub fn ok(&self) -> bool {
        self.worst <= self.bound
    }
}

/// For every stage `s` followed by another, and every `i ≤ s+1` among the
/// permutations, the largest `ρ_t(π_i(X))` over `σ_s < t ≤ σ_{s+1}`, against
/// `1/(s+2)`.
pub fn verify_greedy(state: &GreedyState, perms: &[PermutationFragment]) -> Result<Vec<GreedyCheck>> {
    let mut checks = Vec::new();
    for w in state.stages.windows(2) {
        let (s, lo, hi) = (w[0].stage, w[0].restraint, w[1].restraint);
        let bound = Rational::new(1, s as i64 + 2);
        for (i, pi) in perms.iter().enumerate().take(s as usize + 2) {
            let img = images(pi, state.members.iter().copied())?;
            let worst = max_density_after(&img, lo, Some(hi));
            checks.push(GreedyCheck { stage: s, perm: i, window: (lo, hi), worst, bound });
        }
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_bigness() {
        let id = FinitePermutation::identity(64);
        let r0 = is_big(&id, 3, 0).unwrap();
        assert_eq!((r0.is_big, r0.minimal_s, r0.k), (true, Some(1), Some(1)));
        // [8, 16): ρ_s = (s − 8)/s > 1/3 first at s = 13
        let r1 = is_big(&id, 3, 1).unwrap();
        assert_eq!((r1.minimal_s, r1.k), (Some(13), Some(5)));
        // [16, 24): peaks at 8/24 = 1/3, not strictly above
        assert!(!is_big(&id, 3, 2).unwrap().is_big);
    }

    #[test]
    fn reversal_bigness() {
        let rev = FinitePermutation::reversal(16);
        let r = is_big(&rev, 2, 3).unwrap();
        assert_eq!((r.is_big, r.minimal_s), (true, Some(1)));
        let c = count_big(&rev, 2).unwrap();
        assert_eq!(c.count, 1);
        assert_eq!(c.bound, BigRational::new(25.into(), 6.into()));
    }

    #[test]
    fn identity_count_and_bound() {
        let c = count_big(&FinitePermutation::identity(64), 3).unwrap();
        assert_eq!(c.count, 2);
        assert_eq!(c.bound, BigRational::new(2283.into(), 280.into()));
    }

    #[test]
    fn bigness_argument_checks() {
        assert!(matches!(is_big(&FinitePermutation::identity(15), 2, 0), Err(Error::LengthMismatch { .. })));
        assert!(matches!(is_big(&FinitePermutation::identity(16), 2, 4), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn hat_of_shift_is_identity() {
        let frag = PermutationFragment::new("shift", vec![1, 2, 3, 4, 0]).unwrap();
        assert_eq!(hat_permutation(&frag, 1).unwrap(), FinitePermutation::identity(4));
    }

    #[test]
    fn hat_needs_preimages_below_the_top() {
        let frag = PermutationFragment::new("gap", vec![1, 2, 3, 5]).unwrap();
        assert!(matches!(hat_permutation(&frag, 1), Err(Error::Horizon(_))));
    }

    #[test]
    fn hat_of_window_permutation_is_itself() {
        let frag = PermutationFragment::new("w", vec![3, 0, 2, 1, 4]).unwrap();
        assert_eq!(hat_permutation(&frag, 1).unwrap().forward(), &[3, 0, 2, 1]);
    }

    #[test]
    fn greedy_identity_stage_zero() {
        let id = PermutationFragment::from_fn("identity", 5461, |i| i).unwrap();
        let st = build_x_greedy(std::slice::from_ref(&id), 1, 6).unwrap();
        let s0 = &st.stages[0];
        assert_eq!((s0.block, s0.sub_block, s0.doors.clone(), s0.restraint), (1, 1, 3..5, 5));
    }

    #[test]
    fn greedy_identity_three_stages() {
        let id = PermutationFragment::from_fn("identity", 5461, |i| i).unwrap();
        let st = build_x_greedy(std::slice::from_ref(&id), 3, 6).unwrap();
        assert_eq!(st.failure, None);
        assert_eq!(st.stages[1].doors, 21..29);
        assert_eq!(st.stages[1].restraint, 85);
        assert!(verify_greedy(&st, std::slice::from_ref(&id)).unwrap().iter().all(GreedyCheck::ok));
    }

    #[test]
    fn greedy_reports_exhaustion() {
        let id = PermutationFragment::from_fn("identity", 100, |i| i).unwrap();
        let st = build_x_greedy(std::slice::from_ref(&id), 5, 3).unwrap();
        assert!(st.failure.is_some());
    }
}
