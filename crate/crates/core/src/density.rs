//! Exact density arithmetic on finite prefixes.

use crate::bits::BitPrefix;
use crate::error::{Error, Result};
use crate::permutation::{permute_image, FinitePermutation};
use crate::scalar::DensityScalar;

/// Default lower cut-off for the finite `limsup` surrogate.
pub const DEFAULT_N_MIN: u64 = 8;

/// `ρ_n(A) = |A ↾ n| / n`.
pub fn rho<T: DensityScalar>(a: &BitPrefix, n: u64) -> Result<T> {
    if n == 0 || n > a.len() {
        return Err(Error::OutOfRange { index: n, len: a.len() });
    }
    Ok(T::from_counts(a.count_ones_below(n)?, n))
}

/// All prefix densities of a set, with max and min taken over `n ≥ n_min`.
///
/// `max_rho` stands in for `ρ̄(A)` and `min_rho_tail` for `ρ̲(A)`; both are
/// finite surrogates, not limits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile<T> {
    pub samples: Vec<(u64, T)>,
    pub max_rho: T,
    pub max_at: u64,
    pub min_rho_tail: T,
    pub n_min: u64,
}

pub fn density_profile<T: DensityScalar>(a: &BitPrefix, n_min: u64) -> Result<DensityProfile<T>> {
    if n_min == 0 {
        return Err(Error::Contract("n_min must be at least 1".into()));
    }
    if a.len() < n_min {
        return Err(Error::InsufficientPrefix { len: a.len(), required: n_min });
    }
    let mut samples = Vec::with_capacity(a.len() as usize);
    let mut ones = 0u64;
    for (i, &bit) in a.as_slice().iter().enumerate() {
        ones += bit as u64;
        let n = i as u64 + 1;
        samples.push((n, T::from_counts(ones, n)));
    }
    let tail = &samples[(n_min - 1) as usize..];
    let (mut max_at, mut max_rho) = tail[0].clone();
    let mut min_rho_tail = tail[0].1.clone();
    for (n, r) in &tail[1..] {
        if *r > max_rho {
            max_rho = r.clone();
            max_at = *n;
        }
        if *r < min_rho_tail {
            min_rho_tail = r.clone();
        }
    }
    Ok(DensityProfile { samples, max_rho, max_at, min_rho_tail, n_min })
}

/// `A ⊕ B`: `A` on even positions, `B` on odd ones.
pub fn join(a: &BitPrefix, b: &BitPrefix) -> Result<BitPrefix> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .flat_map(|(&x, &y)| [x, y])
        .collect())
}

/// One prefix length where `ρ_m(π(X)) > q`, with the combined density there.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftWitness<T> {
    pub m: u64,
    pub rho_x: T,
    pub rho_rest: T,
    pub rho_union: T,
}

/// Every `m > k` with `ρ_m(π(X)) > q`, paired with `ρ_m(π(Y ∪ X))`.
///
/// Since `Y ∖ X` and `X` are disjoint, `ρ_m(π(Y ∪ X)) = ρ_m(π(Y ∖ X)) + ρ_m(π(X))`
/// holds exactly; whenever additionally `ρ_m(π(Y ∖ X)) > α − q/2`, the union
/// density must exceed `α + q/2`. Both facts are asserted at every witness and
/// a failure is reported as a contract violation.
pub fn alpha_shift_check<T: DensityScalar>(
    x: &BitPrefix,
    y: &BitPrefix,
    pi: &FinitePermutation,
    q: &T,
    alpha: &T,
    k: u64,
) -> Result<Vec<ShiftWitness<T>>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let rest = y.difference(x)?;
    let union = y.union(x)?;
    let px = permute_image(pi, x)?;
    let prest = permute_image(pi, &rest)?;
    let punion = permute_image(pi, &union)?;
    let half_q = q.clone() * T::from_counts(1, 2);
    let lower = alpha.clone() - half_q.clone();
    let upper = alpha.clone() + half_q;

    let mut witnesses = Vec::new();
    for m in (k + 1).max(1)..=pi.size() {
        let rho_x: T = rho(&px, m)?;
        if rho_x <= *q {
            continue;
        }
        let rho_rest: T = rho(&prest, m)?;
        let rho_union: T = rho(&punion, m)?;
        if rho_union != rho_rest.clone() + rho_x.clone() {
            return Err(Error::Contract(format!("density is not additive at m = {m}")));
        }
        if rho_rest > lower && rho_union <= upper {
            return Err(Error::Contract(format!("union density does not exceed α + q/2 at m = {m}")));
        }
        witnesses.push(ShiftWitness { m, rho_x, rho_rest, rho_union });
    }
    Ok(witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn bits(s: &str) -> BitPrefix {
        s.parse().unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho::<Rational>(&bits("1010"), 4).unwrap(), Rational::new(1, 2));
        assert_eq!(rho::<Rational>(&bits("111"), 3).unwrap(), Rational::new(1, 1));
        assert_eq!(rho::<Rational>(&bits("00001"), 5).unwrap(), Rational::new(1, 5));
    }

    #[test]
    fn rho_rejects_zero_and_overlong() {
        assert!(matches!(rho::<Rational>(&bits("10"), 0), Err(Error::OutOfRange { .. })));
        assert!(matches!(rho::<Rational>(&bits("10"), 3), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn profile_examples() {
        let p = density_profile::<Rational>(&bits("1111"), 1).unwrap();
        assert_eq!((p.max_rho, p.min_rho_tail), (Rational::from(1), Rational::from(1)));

        // ρ_2 = 1/2, ρ_3 = 1/3, ρ_4 = 1/2
        let p = density_profile::<Rational>(&bits("0101"), 2).unwrap();
        assert_eq!(p.max_rho, Rational::new(1, 2));
        assert_eq!(p.min_rho_tail, Rational::new(1, 3));

        let p = density_profile::<Rational>(&bits("1000"), 1).unwrap();
        assert_eq!((p.max_rho, p.max_at), (Rational::from(1), 1));
    }

    #[test]
    fn profile_needs_enough_prefix() {
        assert_eq!(
            density_profile::<Rational>(&bits("101"), 8),
            Err(Error::InsufficientPrefix { len: 3, required: 8 })
        );
    }

    #[test]
    fn join_examples() {
        assert_eq!(join(&bits("1"), &bits("0")).unwrap().to_string(), "10");
        assert_eq!(join(&bits("10"), &bits("10")).unwrap().to_string(), "1100");
        assert_eq!(join(&bits("011"), &bits("101")).unwrap().to_string(), "011011");
        assert!(join(&bits("01"), &bits("1")).is_err());
    }

    #[test]
    fn alpha_shift_example() {
        let x = bits("11000000");
        let y = bits("00001111");
        let id = FinitePermutation::identity(8);
        let q = Rational::new(1, 4);
        let w = alpha_shift_check(&x, &y, &id, &q, &Rational::new(1, 2), 1).unwrap();
        // ρ_m(X) = 2/m > 1/4 for m = 2..=7
        assert_eq!(w.iter().map(|w| w.m).collect::<Vec<_>>(), vec![2, 3, 4, 5, 6, 7]);
        assert_eq!(w[0].rho_x, Rational::from(1));
        assert_eq!(w[0].rho_union, Rational::from(1));
    }

    #[test]
    fn alpha_shift_empty_x_has_no_witnesses() {
        let x = BitPrefix::zeros(8);
        let y = bits("10101010");
        let id = FinitePermutation::identity(8);
        let w = alpha_shift_check(&x, &y, &id, &Rational::new(1, 100), &Rational::new(1, 2), 0)
            .unwrap();
        assert!(w.is_empty());
    }
}
