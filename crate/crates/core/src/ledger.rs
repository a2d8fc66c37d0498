//! The host's car-forced set `C` and goat-forced set `G`.

use std::collections::BTreeSet;
use std::ops::RangeBounds;

use crate::error::{Error, Result};
use crate::Door;

/// Disjoint sets of doors forced to hold cars and goats. Every mutation
/// checks disjointness.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RestrictionLedger {
    cars: BTreeSet<Door>,
    goats: BTreeSet<Door>,
}

impl RestrictionLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_car(&mut self, door: Door) -> Result<()> {
        if self.goats.contains(&door) {
            return Err(Error::LedgerConflict { door });
        }
        self.cars.insert(door);
        Ok(())
    }

    pub fn add_goat(&mut self, door: Door) -> Result<()> {
        if self.cars.contains(&door) {
            return Err(Error::LedgerConflict { door });
        }
        self.goats.insert(door);
        Ok(())
    }

    pub fn add_cars(&mut self, doors: impl IntoIterator<Item = Door>) -> Result<()> {
        doors.into_iter().try_for_each(|d| self.add_car(d))
    }

    pub fn add_goats(&mut self, doors: impl IntoIterator<Item = Door>) -> Result<()> {
        doors.into_iter().try_for_each(|d| self.add_goat(d))
    }

    /// Goats on every door of the range not already holding a car.
    pub fn fill_goats(&mut self, doors: impl Iterator<Item = Door>) {
        for d in doors {
            if !self.cars.contains(&d) {
                self.goats.insert(d);
            }
        }
    }

    pub fn is_car(&self, door: Door) -> bool {
        self.cars.contains(&door)
    }

    pub fn is_goat(&self, door: Door) -> bool {
        self.goats.contains(&door)
    }

    pub fn is_filled(&self, door: Door) -> bool {
        self.is_car(door) || self.is_goat(door)
    }

    pub fn cars(&self) -> &BTreeSet<Door> {
        &self.cars
    }

    pub fn goats(&self) -> &BTreeSet<Door> {
        &self.goats
    }

    /// `max(C ∪ G)`.
    pub fn max_door(&self) -> Option<Door> {
        self.cars.last().copied().max(self.goats.last().copied())
    }

    /// Whether any door in the range is restricted.
    pub fn touches(&self, range: impl RangeBounds<Door> + Clone) -> bool {
        self.cars.range(range.clone()).next().is_some() || self.goats.range(range).next().is_some()
    }

    pub fn goats_in(&self, range: impl RangeBounds<Door>) -> usize {
        self.goats.range(range).count()
    }

    pub fn cars_in(&self, range: impl RangeBounds<Door>) -> usize {
        self.cars.range(range).count()
    }

    pub fn is_disjoint(&self) -> bool {
        self.cars.is_disjoint(&self.goats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conflicts_are_rejected_both_ways() {
        let mut l = RestrictionLedger::new();
        l.add_car(3).unwrap();
        assert_eq!(l.add_goat(3), Err(Error::LedgerConflict { door: 3 }));
        l.add_goat(4).unwrap();
        assert_eq!(l.add_car(4), Err(Error::LedgerConflict { door: 4 }));
        assert!(l.is_disjoint());
        assert_eq!(l.max_door(), Some(4));
    }

    #[test]
    fn fill_skips_cars() {
        let mut l = RestrictionLedger::new();
        l.add_cars([1, 3]).unwrap();
        l.fill_goats(0..5);
        assert_eq!(l.goats().iter().copied().collect::<Vec<_>>(), vec![0, 2, 4]);
        assert!(l.touches(2..3));
        assert!(!l.touches(5..));
        assert_eq!(l.goats_in(1..=4), 2);
    }
}
