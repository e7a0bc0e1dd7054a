use std::fmt;

use serde::{Deserialize, Serialize};

/// Integer interval `[lo, hi]` known to contain a variable's true value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundPair {
    pub lo: u16,
    pub hi: u16,
}

impl BoundPair {
    pub const fn new(lo: u16, hi: u16) -> Self {
        Self { lo, hi }
    }

    /// The uninformative interval `[0, cap]`.
    pub const fn full(cap: u16) -> Self {
        Self { lo: 0, hi: cap }
    }

    pub fn is_resolved(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: u16) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `self` is at least as tight as `prev`.
    pub fn within(&self, prev: &BoundPair) -> bool {
        self.lo >= prev.lo && self.hi <= prev.hi
    }
}

impl fmt::Display for BoundPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Largest and second-largest of a small set, for extrinsic maxima.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TopTwo {
    best: u16,
    count: usize,
    second: u16,
}

impl TopTwo {
    /// `floor` is returned when the set (minus the excluded element) is empty.
    pub fn new(floor: u16) -> Self {
        Self {
            best: floor,
            count: 0,
            second: floor,
        }
    }

    pub fn push(&mut self, v: u16) {
        if v > self.best {
            self.second = self.best;
            self.best = v;
            self.count = 1;
        } else if v == self.best {
            self.count += 1;
        } else if v > self.second {
            self.second = v;
        }
    }

    /// Maximum over all elements except one occurrence of `v`.
    pub fn without(&self, v: u16) -> u16 {
        if v == self.best && self.count == 1 {
            self.second
        } else {
            self.best
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrinsic_max() {
        let mut t = TopTwo::new(0);
        for v in [3, 1, 3, 2] {
            t.push(v);
        }
        assert_eq!(t.without(3), 3);
        assert_eq!(t.without(1), 3);

        let mut t = TopTwo::new(0);
        for v in [1, 4, 2] {
            t.push(v);
        }
        assert_eq!(t.without(4), 2);
        assert_eq!(t.without(2), 4);

        let mut single = TopTwo::new(0);
        single.push(5);
        assert_eq!(single.without(5), 0);
    }
}
