use std::cmp::Ordering;
use std::fmt;

/// A data value. Parsed structures carry non-negative integers; the
/// ordered-mode engines additionally form exact midpoints between adjacent
/// values while exploring, so the representation is a dyadic rational
/// `num / 2^log_den`, kept normalized (num odd or log_den = 0).
///
/// Only equality and order are ever consulted.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Datum {
    num: i128,
    log_den: u32,
}

impl Datum {
    pub fn int(n: u64) -> Self {
        Datum {
            num: n as i128,
            log_den: 0,
        }
    }

    fn normalized(mut num: i128, mut log_den: u32) -> Self {
        while log_den > 0 && num % 2 == 0 {
            num /= 2;
            log_den -= 1;
        }
        Datum { num, log_den }
    }

    /// A value strictly between two adjacent values.
    pub fn midpoint(a: Datum, b: Datum) -> Datum {
        let ld = a.log_den.max(b.log_den);
        let an = a.num << (ld - a.log_den);
        let bn = b.num << (ld - b.log_den);
        Datum::normalized(an + bn, ld + 1)
    }

    /// A value strictly below this one.
    pub fn below(self) -> Datum {
        Datum::normalized(self.num - (1 << self.log_den.min(62)), self.log_den)
    }

    /// A value strictly above this one.
    pub fn above(self) -> Datum {
        Datum::normalized(self.num + (1 << self.log_den.min(62)), self.log_den)
    }

    pub fn as_int(self) -> Option<u64> {
        if self.log_den == 0 && self.num >= 0 {
            Some(self.num as u64)
        } else {
            None
        }
    }

    pub fn is_int(self) -> bool {
        self.log_den == 0 && self.num >= 0
    }
}

impl Ord for Datum {
    fn cmp(&self, other: &Self) -> Ordering {
        let ld = self.log_den.max(other.log_den);
        let a = self.num << (ld - self.log_den);
        let b = other.num << (ld - other.log_den);
        a.cmp(&b)
    }
}

impl PartialOrd for Datum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.log_den)
        }
    }
}

impl fmt::Debug for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoints_sit_strictly_between() {
        let a = Datum::int(3);
        let b = Datum::int(4);
        let m = Datum::midpoint(a, b);
        assert!(a < m && m < b);
        let m2 = Datum::midpoint(a, m);
        assert!(a < m2 && m2 < m);
    }

    #[test]
    fn below_and_above_are_strict() {
        let a = Datum::int(0);
        assert!(a.below() < a);
        assert!(a < a.above());
        let m = Datum::midpoint(Datum::int(1), Datum::int(2));
        assert!(m.below() < m && m < m.above());
    }

    #[test]
    fn normalization_makes_equality_structural() {
        let m1 = Datum::midpoint(Datum::int(1), Datum::int(3));
        assert_eq!(m1, Datum::int(2));
        assert_eq!(m1.as_int(), Some(2));
    }
}
