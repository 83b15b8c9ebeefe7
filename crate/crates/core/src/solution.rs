use std::fmt;
use std::ops::Add;
use std::time::Duration;

use crate::species_set::SpeciesSet;

/// A table value: either `-∞` (no compatible set) or a diversity.
/// `-∞` absorbs addition and sorts below every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Score {
    NegInf,
    Finite(i64),
}

impl Score {
    pub const ZERO: Score = Score::Finite(0);

    pub fn finite(self) -> Option<i64> {
        match self {
            Score::NegInf => None,
            Score::Finite(x) => Some(x),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Score::Finite(_))
    }
}

impl Add for Score {
    type Output = Score;

    fn add(self, rhs: Score) -> Score {
        match (self, rhs) {
            (Score::Finite(a), Score::Finite(b)) => {
                Score::Finite(a.checked_add(b).expect("diversity sums are bounded at construction"))
            }
            _ => Score::NegInf,
        }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::NegInf => f.write_str("-inf"),
            Score::Finite(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Entries stored in the main tables.
    pub main_entries: u64,
    /// Auxiliary entries evaluated while merging children.
    pub aux_entries: u64,
    /// `max_v |A_v|` of the extension used; 0 for brute force.
    pub max_ancestors: usize,
    /// The effective budget `min(B, n)`.
    pub budget: usize,
    /// Subsets examined (brute force only).
    pub subsets_checked: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub optimum: Score,
    pub witness: Option<SpeciesSet>,
    pub decision: bool,
    pub stats: SolveStats,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neg_inf_absorbs() {
        assert_eq!(Score::NegInf + Score::Finite(3), Score::NegInf);
        assert_eq!(Score::Finite(3) + Score::NegInf, Score::NegInf);
        assert_eq!(Score::Finite(3) + Score::Finite(4), Score::Finite(7));
    }

    #[test]
    fn ordering() {
        assert!(Score::NegInf < Score::Finite(i64::MIN));
        assert!(Score::Finite(0) < Score::Finite(1));
        assert_eq!(Score::NegInf.max(Score::ZERO), Score::ZERO);
    }
}
