//! Dyadic interval algebra.
//!
//! The interval system is the union over levels n >= 0 of the aligned blocks
//! [i * 2^n, (i + 1) * 2^n - 1] with index i >= 1. Time steps are 1-based, so
//! every step t lies in exactly one interval per level with 2^n <= t, and the
//! set of intervals containing t (the active set) has floor(log2 t) + 1
//! members. Intervals are (level, index) pairs and are never materialized as
//! element lists; everything here is O(log t) integer arithmetic.

use std::fmt;

/// Largest admissible level. Keeps (index + 1) << level inside u64.
const MAX_LEVEL: u32 = 62;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DyadicError {
    /// Time steps are 1-based; step 0 is outside the system.
    ZeroTimeStep,
    /// Interval indices start at 1; index 0 would admit intervals covering
    /// every prefix of the timeline at once.
    ZeroIndex,
    /// Level too large for 64-bit endpoint arithmetic.
    LevelTooLarge { level: u32 },
    /// Interval endpoint would overflow u64.
    EndpointOverflow { level: u32, index: u64 },
    /// A closed time range needs 1 <= first <= last.
    InvalidRange { first: u64, last: u64 },
    /// Segment boundaries must satisfy 0 = b[0] < b[1] < ... < b[N] = horizon.
    BadBoundaries { reason: &'static str },
}

impl fmt::Display for DyadicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DyadicError::ZeroTimeStep => write!(f, "time steps are 1-based; got 0"),
            DyadicError::ZeroIndex => write!(f, "interval index must be at least 1"),
            DyadicError::LevelTooLarge { level } => {
                write!(f, "level {level} exceeds the maximum of {MAX_LEVEL}")
            }
            DyadicError::EndpointOverflow { level, index } => {
                write!(f, "interval (level {level}, index {index}) overflows u64")
            }
            DyadicError::InvalidRange { first, last } => {
                write!(f, "invalid time range [{first}, {last}]; need 1 <= first <= last")
            }
            DyadicError::BadBoundaries { reason } => {
                write!(f, "bad segment boundaries: {reason}")
            }
        }
    }
}

impl std::error::Error for DyadicError {}

// ---------------------------------------------------------------------------
// Intervals
// ---------------------------------------------------------------------------

/// One interval `[index * 2^level, (index + 1) * 2^level - 1]` of the nested
/// dyadic system. Construction enforces `index >= 1` and endpoint bounds, so
/// a value of this type always denotes a valid member of the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    level: u32,
    index: u64,
}

impl DyadicInterval {
    pub fn new(level: u32, index: u64) -> Result<Self, DyadicError> {
        if index == 0 {
            return Err(DyadicError::ZeroIndex);
        }
        if level > MAX_LEVEL {
            return Err(DyadicError::LevelTooLarge { level });
        }
        if index > (u64::MAX >> level) - 1 {
            return Err(DyadicError::EndpointOverflow { level, index });
        }
        Ok(DyadicInterval { level, index })
    }

    /// Internal constructor for values already known to be in range
    /// (everything derived from a valid 1-based time step qualifies).
    fn from_parts(level: u32, index: u64) -> Self {
        debug_assert!(index >= 1 && level <= MAX_LEVEL);
        DyadicInterval { level, index }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// First time step covered: index * 2^level.
    pub fn start(&self) -> u64 {
        self.index << self.level
    }

    /// Last time step covered (inclusive).
    pub fn end(&self) -> u64 {
        self.start() + self.len() - 1
    }

    /// Number of time steps covered: 2^level.
    pub fn len(&self) -> u64 {
        1u64 << self.level
    }

    pub fn contains(&self, t: u64) -> bool {
        self.start() <= t && t <= self.end()
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start(), self.end())
    }
}

/// Closed range of 1-based time steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeRange {
    first: u64,
    last: u64,
}

impl TimeRange {
    pub fn new(first: u64, last: u64) -> Result<Self, DyadicError> {
        if first == 0 || first > last {
            return Err(DyadicError::InvalidRange { first, last });
        }
        Ok(TimeRange { first, last })
    }

    pub fn first(&self) -> u64 {
        self.first
    }

    pub fn last(&self) -> u64 {
        self.last
    }

    pub fn len(&self) -> u64 {
        self.last - self.first + 1
    }
}

impl fmt::Display for TimeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.first, self.last)
    }
}

// ---------------------------------------------------------------------------
// Active set
// ---------------------------------------------------------------------------

/// All intervals of the system containing time step `t`, ordered by
/// increasing level. There is exactly one per level n with 2^n <= t (its
/// index is t >> n), so the result has floor(log2 t) + 1 entries.
pub fn active_set(t: u64) -> Result<Vec<DyadicInterval>, DyadicError> {
    if t == 0 {
        return Err(DyadicError::ZeroTimeStep);
    }
    let levels = t.ilog2() + 1;
    let mut out = Vec::with_capacity(levels as usize);
    for level in 0..levels {
        out.push(DyadicInterval::from_parts(level, t >> level));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Geometric covering
// ---------------------------------------------------------------------------

/// Partition an arbitrary range into consecutive intervals of the system by
/// repeatedly emitting the largest block that starts at the cursor: the level
/// is capped both by the cursor's alignment (2^n must divide the cursor) and
/// by the room left in the range. The result is the unique greedy cover; its
/// lengths rise strictly while alignment binds and fall strictly once room
/// binds (at most one equal pair at the peak), so there are never more than
/// 2 * log2(len) + 2 pieces.
pub fn geometric_cover(range: TimeRange) -> Vec<DyadicInterval> {
    let mut pieces = Vec::new();
    let mut cursor = range.first;
    while cursor <= range.last {
        let alignment = cursor.trailing_zeros();
        let room = (range.last - cursor + 1).ilog2();
        let level = alignment.min(room);
        pieces.push(DyadicInterval::from_parts(level, cursor >> level));
        cursor += 1u64 << level;
    }
    pieces
}

/// Cover every segment of a partition of [1, horizon] given by boundaries
/// 0 = b[0] < b[1] < ... < b[N] = horizon; segment i is [b[i-1] + 1, b[i]].
/// Pieces are emitted in timeline order, so consecutive segments contribute
/// disjoint consecutive runs.
pub fn cover_of_segments(
    boundaries: &[u64],
    horizon: u64,
) -> Result<Vec<DyadicInterval>, DyadicError> {
    if boundaries.len() < 2 {
        return Err(DyadicError::BadBoundaries {
            reason: "need at least two boundaries",
        });
    }
    if boundaries[0] != 0 {
        return Err(DyadicError::BadBoundaries {
            reason: "first boundary must be 0",
        });
    }
    if boundaries.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DyadicError::BadBoundaries {
            reason: "boundaries must be strictly increasing",
        });
    }
    if *boundaries.last().unwrap() != horizon {
        return Err(DyadicError::BadBoundaries {
            reason: "last boundary must equal the horizon",
        });
    }
    let mut pieces = Vec::new();
    for w in boundaries.windows(2) {
        let range = TimeRange::new(w[0] + 1, w[1])?;
        pieces.extend(geometric_cover(range));
    }
    Ok(pieces)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    /// Definition-level oracle: scan every block of every size for membership
    /// of t, without the per-level uniqueness shortcut the implementation
    /// relies on.
    fn enumerate_containing(t: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut size = 1u64;
        while size <= t {
            let mut start = size; // index 1
            while start <= t {
                let end = start + size - 1;
                if start <= t && t <= end {
                    out.push((start, end));
                }
                start += size;
            }
            size *= 2;
        }
        out
    }

    /// Enumerate every way of partitioning [first, last] into consecutive
    /// aligned blocks of the system. Exponential; for small ranges only.
    fn all_partitions(first: u64, last: u64) -> Vec<Vec<(u64, u64)>> {
        fn recurse(cursor: u64, last: u64, acc: &mut Vec<(u64, u64)>, out: &mut Vec<Vec<(u64, u64)>>) {
            if cursor > last {
                out.push(acc.clone());
                return;
            }
            let mut size = 1u64;
            while cursor % size == 0 && cursor + size - 1 <= last {
                acc.push((cursor, cursor + size - 1));
                recurse(cursor + size, last, acc, out);
                acc.pop();
                size *= 2;
            }
        }
        let mut out = Vec::new();
        recurse(first, last, &mut Vec::new(), &mut out);
        out
    }

    fn endpoints(pieces: &[DyadicInterval]) -> Vec<(u64, u64)> {
        pieces.iter().map(|p| (p.start(), p.end())).collect()
    }

    #[test]
    fn interval_constructor_validates() {
        assert_eq!(DyadicInterval::new(0, 0), Err(DyadicError::ZeroIndex));
        assert_eq!(
            DyadicInterval::new(63, 1),
            Err(DyadicError::LevelTooLarge { level: 63 })
        );
        assert!(matches!(
            DyadicInterval::new(62, u64::MAX >> 1),
            Err(DyadicError::EndpointOverflow { .. })
        ));
        let iv = DyadicInterval::new(3, 3).unwrap();
        assert_eq!((iv.start(), iv.end(), iv.len()), (24, 31, 8));
        assert!(iv.contains(24) && iv.contains(31) && !iv.contains(32));
        assert_eq!(iv.to_string(), "[24, 31]");
    }

    #[test]
    fn time_range_validates() {
        assert_eq!(
            TimeRange::new(0, 5),
            Err(DyadicError::InvalidRange { first: 0, last: 5 })
        );
        assert_eq!(
            TimeRange::new(6, 5),
            Err(DyadicError::InvalidRange { first: 6, last: 5 })
        );
        assert_eq!(TimeRange::new(4, 4).unwrap().len(), 1);
    }

    #[test]
    fn active_set_rejects_step_zero() {
        assert_eq!(active_set(0), Err(DyadicError::ZeroTimeStep));
    }

    #[test]
    fn active_set_smallest_steps() {
        assert_eq!(endpoints(&active_set(1).unwrap()), vec![(1, 1)]);
        assert_eq!(endpoints(&active_set(2).unwrap()), vec![(2, 2), (2, 3)]);
        assert_eq!(
            endpoints(&active_set(30).unwrap()),
            vec![(30, 30), (30, 31), (28, 31), (24, 31), (16, 31)]
        );
    }

    #[test]
    fn active_set_matches_definition_oracle() {
        for t in 1..=512 {
            let mut expect = enumerate_containing(t);
            expect.sort();
            let mut got = endpoints(&active_set(t).unwrap());
            got.sort();
            assert_eq!(got, expect, "active set mismatch at t = {t}");
        }
    }

    #[test]
    fn active_set_size_and_order_law() {
        for t in 1..=4096u64 {
            let set = active_set(t).unwrap();
            assert_eq!(set.len() as u32, t.ilog2() + 1, "size law fails at t = {t}");
            for (n, iv) in set.iter().enumerate() {
                assert_eq!(iv.level(), n as u32);
                assert!(iv.contains(t));
                assert!(iv.index() >= 1);
            }
        }
    }

    #[test]
    fn active_set_transition_adds_starts_and_drops_ends() {
        for t in 1..=2048u64 {
            let now: std::collections::HashSet<_> = active_set(t).unwrap().into_iter().collect();
            let next: std::collections::HashSet<_> =
                active_set(t + 1).unwrap().into_iter().collect();
            for iv in now.difference(&next) {
                assert_eq!(iv.end(), t, "interval {iv} left without ending at {t}");
            }
            for iv in next.difference(&now) {
                assert_eq!(iv.start(), t + 1, "interval {iv} joined without starting at {}", t + 1);
            }
        }
    }

    #[test]
    fn cover_of_1_to_30() {
        let pieces = geometric_cover(TimeRange::new(1, 30).unwrap());
        assert_eq!(
            endpoints(&pieces),
            vec![
                (1, 1),
                (2, 3),
                (4, 7),
                (8, 15),
                (16, 23),
                (24, 27),
                (28, 29),
                (30, 30)
            ]
        );
    }

    #[test]
    fn cover_of_aligned_range_is_itself() {
        let pieces = geometric_cover(TimeRange::new(4, 7).unwrap());
        assert_eq!(endpoints(&pieces), vec![(4, 7)]);
    }

    #[test]
    fn cover_of_5_to_6_needs_two_singletons() {
        let pieces = geometric_cover(TimeRange::new(5, 6).unwrap());
        assert_eq!(endpoints(&pieces), vec![(5, 5), (6, 6)]);
        // This range admits exactly one partition at all; the cover is it.
        assert_eq!(all_partitions(5, 6), vec![vec![(5, 5), (6, 6)]]);
    }

    #[test]
    fn cover_is_a_partition_for_small_ranges() {
        for first in 1..=192u64 {
            for last in first..=192 {
                let pieces = geometric_cover(TimeRange::new(first, last).unwrap());
                let mut cursor = first;
                for p in &pieces {
                    assert_eq!(p.start(), cursor, "gap or overlap in cover of [{first}, {last}]");
                    cursor = p.end() + 1;
                }
                assert_eq!(cursor, last + 1, "cover of [{first}, {last}] stops early");
            }
        }
    }

    #[test]
    fn cover_lengths_rise_then_fall() {
        for first in 1..=256u64 {
            for last in first..=first + 130 {
                let lens: Vec<u64> = geometric_cover(TimeRange::new(first, last).unwrap())
                    .iter()
                    .map(|p| p.len())
                    .collect();
                for &l in &lens {
                    assert!(l.is_power_of_two(), "non-dyadic piece in [{first}, {last}]: {lens:?}");
                }
                // Strictly increasing while alignment binds, then strictly
                // decreasing once room binds; the two phases may meet in a
                // single equal pair (e.g. [1, 12] covers as 1, 2, 4, 4, 1).
                let mut i = 0;
                while i + 1 < lens.len() && lens[i + 1] > lens[i] {
                    i += 1;
                }
                if i + 1 < lens.len() && lens[i + 1] == lens[i] {
                    i += 1;
                }
                for j in i + 1..lens.len() {
                    assert!(
                        lens[j] < lens[j - 1],
                        "tail fails to shrink in cover of [{first}, {last}]: {lens:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn cover_piece_count_is_logarithmic() {
        for first in 1..=256u64 {
            for last in first..=first + 130 {
                let range = TimeRange::new(first, last).unwrap();
                let bound = 2.0 * (range.len() as f64).log2() + 2.0;
                let count = geometric_cover(range).len() as f64;
                assert!(
                    count <= bound,
                    "cover of [{first}, {last}] has {count} pieces, bound {bound}"
                );
            }
        }
    }

    #[test]
    fn segment_cover_concatenates_per_segment_covers() {
        let pieces = cover_of_segments(&[0, 4, 8], 8).unwrap();
        assert_eq!(
            endpoints(&pieces),
            vec![(1, 1), (2, 3), (4, 4), (5, 5), (6, 7), (8, 8)]
        );

        let pieces = cover_of_segments(&[0, 30], 30).unwrap();
        assert_eq!(pieces, geometric_cover(TimeRange::new(1, 30).unwrap()));
    }

    #[test]
    fn segment_cover_rejects_bad_boundaries() {
        assert!(matches!(
            cover_of_segments(&[0], 0),
            Err(DyadicError::BadBoundaries { .. })
        ));
        assert!(matches!(
            cover_of_segments(&[1, 8], 8),
            Err(DyadicError::BadBoundaries { .. })
        ));
        assert!(matches!(
            cover_of_segments(&[0, 5, 5, 8], 8),
            Err(DyadicError::BadBoundaries { .. })
        ));
        assert!(matches!(
            cover_of_segments(&[0, 6, 4, 8], 8),
            Err(DyadicError::BadBoundaries { .. })
        ));
        assert!(matches!(
            cover_of_segments(&[0, 4, 9], 8),
            Err(DyadicError::BadBoundaries { .. })
        ));
    }
}
