//! Increasing selectors `f: ω → ω`, the orderly non-adaptive contestants.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::bits::BitPrefix;
use crate::error::{Error, Fault, Result};

type Rule = dyn Fn(u64) -> Option<u64> + Send + Sync;

/// A total, evaluable, strictly increasing map from index to door.
///
/// The rule returns `None` where it has no value within its own evaluation
/// budget; the host treats such a member as partial and drops it.
#[derive(Clone)]
pub struct MonotoneSelector {
    name: String,
    rule: Arc<Rule>,
    domain_bound: u64,
}

impl MonotoneSelector {
    pub fn new(
        name: impl Into<String>,
        domain_bound: u64,
        rule: impl Fn(u64) -> Option<u64> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), rule: Arc::new(rule), domain_bound }
    }

    /// A selector from a total rule, evaluable on every index.
    pub fn total(name: impl Into<String>, rule: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Self::new(name, u64::MAX, move |t| Some(rule(t)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_bound(&self) -> u64 {
        self.domain_bound
    }

    pub fn eval(&self, t: u64) -> Option<u64> {
        if t >= self.domain_bound {
            return None;
        }
        (self.rule)(t)
    }

    /// `Im(f) ∩ [lo, hi]`, found by evaluating `f(0), f(1), …` until a value
    /// exceeds `hi`. At most `budget` evaluations are spent.
    pub fn image_within(&self, lo: u64, hi: u64, budget: u64) -> std::result::Result<BTreeSet<u64>, Fault> {
        let mut image = BTreeSet::new();
        let mut previous: Option<u64> = None;
        for t in 0.. {
            if t >= budget {
                return Err(Fault::BudgetExceeded { budget });
            }
            let value = self.eval(t).ok_or(Fault::Partial { index: t })?;
            if let Some(p) = previous {
                if value <= p {
                    return Err(Fault::Disorderly { step: t, previous: p, door: value });
                }
            }
            previous = Some(value);
            if value > hi {
                break;
            }
            if value >= lo {
                image.insert(value);
            }
        }
        Ok(image)
    }
}

impl fmt::Debug for MonotoneSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneSelector")
            .field("name", &self.name)
            .field("domain_bound", &self.domain_bound)
            .finish()
    }
}

/// `f⁻¹(A)` read along the selector: result bit `t` is `A(f(t))`, for every
/// `t` whose image lies inside the prefix.
pub fn select_monotone(f: &MonotoneSelector, a: &BitPrefix) -> Result<BitPrefix> {
    let mut out = BitPrefix::default();
    let mut previous: Option<u64> = None;
    for t in 0..f.domain_bound() {
        let door = f
            .eval(t)
            .ok_or_else(|| Error::Contract(format!("{} has no value at index {t}", f.name())))?;
        if let Some(p) = previous {
            if door <= p {
                return Err(Error::NotMonotone { index: t, previous: p, value: door });
            }
        }
        previous = Some(door);
        if door >= a.len() {
            break;
        }
        out.push(a.get(door)?);
    }
    Ok(out)
}
