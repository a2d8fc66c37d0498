//! Named opponents, skip rules and permutations.
//!
//! Names take at most one integer argument, as in `linear(3)`, except
//! `halved(…)`, which wraps another skip rule.
//!
//! | kind        | names |
//! |-------------|-------|
//! | selector    | `identity`, `linear(k)`, `polynomial(p)`, `exponential(cap)`, `random-increasing(seed)` |
//! | contestant  | `oblivious-all`, `stop-after-car`, `jump-after-car(k)`, `parity-follower`, `evens-then-odd-after-car` |
//! | skip rule   | `next-door`, `skip(k)`, `block-scanner`, `even-odd`, `halved(rule)` |
//! | permutation | `identity`, `reversal`, `swap-pairs`, `random(seed)`, `block-reversal` |

use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adaptive::AdaptiveContestant;
use crate::error::{Error, Result};
use crate::permutation::{FinitePermutation, PermutationFragment};
use crate::selector::MonotoneSelector;
use crate::skip::{block_scanner, even_odd_rule, halve_rule, ordered_block_of, SkipRule, Stride};
use crate::Door;

/// Where `stop-after-car` goes once it has seen a car.
pub const STOP_FAR_DOOR: Door = 1 << 40;

/// A parsed `name` or `name(arg)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategySpec<'a> {
    pub name: &'a str,
    pub arg: Option<&'a str>,
}

pub fn parse_spec(spec: &str) -> Result<StrategySpec<'_>> {
    let spec = spec.trim();
    let Some(open) = spec.find('(') else {
        if spec.is_empty() || spec.contains(')') {
            return Err(Error::Parse { offset: 0, message: format!("malformed strategy name {spec:?}") });
        }
        return Ok(StrategySpec { name: spec, arg: None });
    };
    if !spec.ends_with(')') {
        return Err(Error::Parse { offset: spec.len(), message: format!("missing ')' in {spec:?}") });
    }
    Ok(StrategySpec { name: &spec[..open], arg: Some(&spec[open + 1..spec.len() - 1]) })
}

fn int_arg(spec: &StrategySpec<'_>) -> Result<u64> {
    let arg = spec
        .arg
        .ok_or_else(|| Error::Parse { offset: spec.name.len(), message: format!("{} needs an integer argument", spec.name) })?;
    arg.trim()
        .parse()
        .map_err(|_| Error::Parse { offset: spec.name.len() + 1, message: format!("{arg:?} is not a nonnegative integer") })
}

fn no_arg(spec: &StrategySpec<'_>) -> Result<()> {
    match spec.arg {
        None => Ok(()),
        Some(_) => Err(Error::Parse { offset: spec.name.len(), message: format!("{} takes no argument", spec.name) }),
    }
}

fn unknown(kind: &str, name: &str) -> Error {
    Error::Parse { offset: 0, message: format!("unknown {kind} {name:?}") }
}

pub fn selector(spec: &str) -> Result<MonotoneSelector> {
    let parsed = parse_spec(spec)?;
    let label = spec.trim().to_string();
    match parsed.name {
        "identity" => {
            no_arg(&parsed)?;
            Ok(MonotoneSelector::total(label, |t| t))
        }
        "linear" => {
            let k = int_arg(&parsed)?;
            if k == 0 {
                return Err(Error::Parse { offset: 7, message: "linear(k) needs k ≥ 1".into() });
            }
            Ok(MonotoneSelector::new(label, u64::MAX, move |t| t.checked_mul(k)))
        }
        "polynomial" => {
            let p = int_arg(&parsed)?;
            if p == 0 {
                return Err(Error::Parse { offset: 11, message: "polynomial(p) needs p ≥ 1".into() });
            }
            let p = u32::try_from(p).map_err(|_| Error::Parse { offset: 11, message: "exponent too large".into() })?;
            Ok(MonotoneSelector::new(label, u64::MAX, move |t| t.checked_pow(p)))
        }
        "exponential" => {
            let cap = int_arg(&parsed)?.min(63);
            Ok(MonotoneSelector::new(label, cap, |t| 1u64.checked_shl(t as u32)))
        }
        "random-increasing" => {
            let seed = int_arg(&parsed)?;
            let state = Arc::new(Mutex::new((ChaCha8Rng::seed_from_u64(seed), Vec::<u64>::new())));
            Ok(MonotoneSelector::new(label, u64::MAX, move |t| {
                let mut guard = state.lock().unwrap_or_else(|e| e.into_inner());
                let (rng, values) = &mut *guard;
                while values.len() as u64 <= t {
                    let gap = rng.gen_range(1..=4u64);
                    let next = match values.last() {
                        None => gap - 1,
                        Some(&v) => v.checked_add(gap)?,
                    };
                    values.push(next);
                }
                Some(values[t as usize])
            }))
        }
        other => Err(unknown("selector", other)),
    }
}

fn last_door(h: &[crate::SkipEntry]) -> Option<(Door, bool)> {
    h.last().map(|e| (e.door, e.content))
}

pub fn contestant(spec: &str) -> Result<AdaptiveContestant> {
    let parsed = parse_spec(spec)?;
    let label = spec.trim().to_string();
    let g = match parsed.name {
        "oblivious-all" => {
            no_arg(&parsed)?;
            AdaptiveContestant::from_history(label, |h| Some(last_door(h).map_or(0, |(d, _)| d + 1)))
        }
        "stop-after-car" => {
            no_arg(&parsed)?;
            AdaptiveContestant::from_history(label, |h| {
                Some(match last_door(h) {
                    None => 0,
                    Some((d, true)) => (d + 1).max(STOP_FAR_DOOR),
                    Some((d, false)) => d + 1,
                })
            })
        }
        "jump-after-car" => {
            let k = int_arg(&parsed)?;
            AdaptiveContestant::from_history(label, move |h| {
                Some(match last_door(h) {
                    None => 0,
                    Some((d, true)) => d.checked_add(k)?.checked_add(1)?,
                    Some((d, false)) => d + 1,
                })
            })
        }
        "parity-follower" => {
            no_arg(&parsed)?;
            AdaptiveContestant::from_history(label, |h| {
                Some(match last_door(h) {
                    None => 0,
                    Some((d, true)) => d + 2,
                    Some((d, false)) => d + 1,
                })
            })
        }
        "evens-then-odd-after-car" => {
            no_arg(&parsed)?;
            AdaptiveContestant::from_history(label, |h| {
                Some(match last_door(h) {
                    None => 0,
                    Some((d, true)) if d % 2 == 0 => d + 1,
                    Some((d, _)) if d % 2 == 0 => d + 2,
                    Some((d, _)) => d + 1,
                })
            })
        }
        other => return Err(unknown("contestant", other)),
    };
    Ok(g)
}

pub fn contestants(specs: &[&str]) -> Result<Vec<AdaptiveContestant>> {
    specs.iter().map(|s| contestant(s)).collect()
}

pub fn skip_rule(spec: &str) -> Result<Box<dyn SkipRule>> {
    let parsed = parse_spec(spec)?;
    match parsed.name {
        "next-door" => {
            no_arg(&parsed)?;
            Ok(Box::new(Stride { step: 1 }))
        }
        "skip" => {
            let k = int_arg(&parsed)?;
            Ok(Box::new(Stride { step: k + 1 }))
        }
        "block-scanner" => {
            no_arg(&parsed)?;
            Ok(Box::new(block_scanner()))
        }
        "even-odd" => {
            no_arg(&parsed)?;
            Ok(Box::new(even_odd_rule()))
        }
        "halved" => {
            let inner = parsed
                .arg
                .ok_or_else(|| Error::Parse { offset: 6, message: "halved needs an inner rule".into() })?;
            Ok(Box::new(halve_rule(skip_rule(inner)?)))
        }
        other => Err(unknown("skip rule", other)),
    }
}

/// Image of `j` under block reversal of `[0, size)`: each ordered block,
/// cut at `size`, is reversed in place.
fn block_reversal(j: u64, size: u64) -> u64 {
    let block = ordered_block_of(j);
    let hi = block.end.min(size);
    block.start + (hi - 1 - j)
}

pub fn permutation(spec: &str, size: u64) -> Result<FinitePermutation> {
    let parsed = parse_spec(spec)?;
    match parsed.name {
        "identity" => no_arg(&parsed).map(|_| FinitePermutation::identity(size)),
        "reversal" => no_arg(&parsed).map(|_| FinitePermutation::reversal(size)),
        "swap-pairs" => no_arg(&parsed).map(|_| FinitePermutation::swap_pairs(size)),
        "random" => {
            let seed = int_arg(&parsed)?;
            Ok(FinitePermutation::random(size, &mut ChaCha8Rng::seed_from_u64(seed)))
        }
        "block-reversal" => {
            no_arg(&parsed)?;
            FinitePermutation::from_forward((0..size).map(|j| block_reversal(j, size)).collect())
        }
        other => Err(unknown("permutation", other)),
    }
}

/// A permutation of ω known on `[0, horizon)`. `reversal` is not a
/// permutation of ω and is rejected; the finite windows of the others are
/// bijections of `[0, horizon)`, after rounding an odd horizon up for
/// `swap-pairs`.
pub fn fragment(spec: &str, horizon: u64) -> Result<PermutationFragment> {
    let parsed = parse_spec(spec)?;
    let name = spec.trim();
    match parsed.name {
        "reversal" => Err(Error::Parse { offset: 0, message: "reversal has no infinite version; use block-reversal".into() }),
        "swap-pairs" => permutation(spec, horizon + horizon % 2)
            .and_then(|p| PermutationFragment::new(name, p.forward().to_vec())),
        "block-reversal" => {
            no_arg(&parsed)?;
            let end = ordered_block_of(horizon.saturating_sub(1)).end;
            PermutationFragment::from_fn(name, end, |j| block_reversal(j, end))
        }
        _ => permutation(spec, horizon).and_then(|p| PermutationFragment::new(name, p.forward().to_vec())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitPrefix;
    use crate::selector::select_monotone;
    use crate::skip::apply_skip_rule;

    #[test]
    fn spec_parsing() {
        assert_eq!(parse_spec("linear(3)").unwrap(), StrategySpec { name: "linear", arg: Some("3") });
        assert_eq!(parse_spec("identity").unwrap(), StrategySpec { name: "identity", arg: None });
        assert!(parse_spec("linear(3").is_err());
        assert!(selector("linear(x)").is_err());
        assert!(selector("nonsense").is_err());
        assert!(selector("identity(2)").is_err());
    }

    #[test]
    fn selectors_evaluate() {
        assert_eq!(selector("linear(3)").unwrap().eval(4), Some(12));
        assert_eq!(selector("polynomial(2)").unwrap().eval(5), Some(25));
        let e = selector("exponential(5)").unwrap();
        assert_eq!(e.eval(4), Some(16));
        assert_eq!(e.eval(5), None);
        let r = selector("random-increasing(7)").unwrap();
        let first: Vec<u64> = (0..50).map(|t| r.eval(t).unwrap()).collect();
        assert!(first.windows(2).all(|w| w[0] < w[1]));
        let again = selector("random-increasing(7)").unwrap();
        assert_eq!(again.eval(49), Some(first[49]));
        assert_eq!(select_monotone(&r, &BitPrefix::ones(20)).unwrap().count_ones() as usize, first.iter().filter(|&&v| v < 20).count());
    }

    #[test]
    fn skip_rules_by_name() {
        let a: BitPrefix = "101010".parse().unwrap();
        let r = skip_rule("skip(1)").unwrap();
        assert_eq!(apply_skip_rule(&r, &a, 100).unwrap().selected.to_string(), "111");
        let r = skip_rule("halved(next-door)").unwrap();
        assert_eq!(r.name(), "halved(next-door)");
        assert_eq!(apply_skip_rule(&r, &a, 100).unwrap().selected, a);
        assert!(skip_rule("halved()").is_err());
    }

    #[test]
    fn permutations_by_name() {
        assert_eq!(permutation("swap-pairs", 4).unwrap().forward(), &[1, 0, 3, 2]);
        assert_eq!(permutation("block-reversal", 7).unwrap().forward(), &[0, 4, 3, 2, 1, 6, 5]);
        let r1 = permutation("random(3)", 30).unwrap();
        assert_eq!(r1, permutation("random(3)", 30).unwrap());
        assert!(fragment("reversal", 10).is_err());
        assert_eq!(fragment("swap-pairs", 5).unwrap().horizon(), 6);
        assert_eq!(fragment("block-reversal", 6).unwrap().horizon(), 21);
    }

    #[test]
    fn contestants_by_name() {
        assert!(contestant("jump-after-car(4)").is_ok());
        assert!(contestant("jump-after-car").is_err());
        assert!(contestant("psychic").is_err());
    }
}
