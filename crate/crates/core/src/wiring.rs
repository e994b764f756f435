//! Combinatorics of hexad wirings.
//!
//! A wiring is a subset of the eight triads of a hexad, encoded as an 8-bit
//! mask. Local node labels are 1 and 2 in every part and bit `b` stands for
//! the local triad `(a, b, c)` with `b = 4(a-1) + 2(b-1) + (c-1)`, which gives
//! the frozen order
//!
//! ```text
//! bit:   0    1    2    3    4    5    6    7
//!      111  112  121  122  211  212  221  222
//! ```
//!
//! Every module that talks about wirings uses this ordering.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local triads in mask-bit order.
pub const TRIAD_ORDER: [(u8, u8, u8); 8] = [
    (1, 1, 1),
    (1, 1, 2),
    (1, 2, 1),
    (1, 2, 2),
    (2, 1, 1),
    (2, 1, 2),
    (2, 2, 1),
    (2, 2, 2),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WiringPattern(pub u8);

impl WiringPattern {
    /// `{111, 122, 212, 221}`.
    pub const INFORMATIVE_1: WiringPattern = WiringPattern(0b0110_1001);
    /// `{112, 121, 211, 222}`.
    pub const INFORMATIVE_2: WiringPattern = WiringPattern(0b1001_0110);

    /// Node-level wirings of degree sequence `(1,1,1,1,1,1)`, in label order:
    /// `{111,222}`, `{121,212}`, `{211,122}`, `{112,221}`.
    pub const NODE_LEVEL: [WiringPattern; 4] = [
        WiringPattern(0b1000_0001),
        WiringPattern(0b0010_0100),
        WiringPattern(0b0001_1000),
        WiringPattern(0b0100_0010),
    ];

    #[inline]
    pub const fn bit(a: u8, b: u8, c: u8) -> u8 {
        4 * (a - 1) + 2 * (b - 1) + (c - 1)
    }

    /// Builds a mask from local triads with labels in `{1, 2}`.
    pub fn from_triads(triads: &[(u8, u8, u8)]) -> Self {
        let mut mask = 0u8;
        for &(a, b, c) in triads {
            debug_assert!((1..=2).contains(&a) && (1..=2).contains(&b) && (1..=2).contains(&c));
            mask |= 1 << Self::bit(a, b, c);
        }
        WiringPattern(mask)
    }

    pub fn triads(self) -> Vec<(u8, u8, u8)> {
        TRIAD_ORDER
            .iter()
            .enumerate()
            .filter(|(bit, _)| self.0 >> bit & 1 == 1)
            .map(|(_, &t)| t)
            .collect()
    }

    pub fn n_hyperedges(self) -> u32 {
        self.0.count_ones()
    }
}

impl fmt::Display for WiringPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .triads()
            .into_iter()
            .map(|(a, b, c)| format!("{a}{b}{c}"))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Per-node degrees ordered `(i₁, j₁, k₁, i₂, j₂, k₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DegreeSequence(pub [u8; 6]);

impl DegreeSequence {
    pub fn uniform(d: u8) -> Self {
        DegreeSequence([d; 6])
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &DegreeSequence) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.0;
        write!(f, "({},{},{},{},{},{})", d[0], d[1], d[2], d[3], d[4], d[5])
    }
}

pub fn degree_sequence_of(w: WiringPattern) -> DegreeSequence {
    let mut d = [0u8; 6];
    for (a, b, c) in w.triads() {
        d[(a - 1) as usize * 3] += 1;
        d[(b - 1) as usize * 3 + 1] += 1;
        d[(c - 1) as usize * 3 + 2] += 1;
    }
    DegreeSequence(d)
}

/// All masks with degree sequence `d`, ascending.
pub fn enumerate_wirings(d: DegreeSequence) -> Vec<WiringPattern> {
    (0..=255u8)
        .map(WiringPattern)
        .filter(|&w| degree_sequence_of(w) == d)
        .collect()
}

/// Which heterogeneity structure a fixed-effect multiset describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeLevel {
    /// Twelve slots `A_ab, B_bc, C_ac` (dyad-level effects).
    Dyad,
    /// Six slots `A_a, B_b, C_c` (node-level effects).
    Node,
}

/// Counts of the local fixed-effect labels carried by a wiring.
///
/// Dyad level: slots `0..4` are `A₁₁ A₁₂ A₂₁ A₂₂`, `4..8` are `B₁₁..B₂₂`,
/// `8..12` are `C₁₁..C₂₂`. Node level: `A₁ A₂ B₁ B₂ C₁ C₂` in slots `0..6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FeMultiset {
    pub level: FeLevel,
    pub counts: [u8; 12],
}

impl FeMultiset {
    pub fn total(&self) -> u32 {
        self.counts.iter().map(|&c| c as u32).sum()
    }
}

pub fn fe_multiset(w: WiringPattern, level: FeLevel) -> FeMultiset {
    let mut counts = [0u8; 12];
    for (a, b, c) in w.triads() {
        let (a, b, c) = ((a - 1) as usize, (b - 1) as usize, (c - 1) as usize);
        match level {
            FeLevel::Dyad => {
                counts[2 * a + b] += 1;
                counts[4 + 2 * b + c] += 1;
                counts[8 + 2 * a + c] += 1;
            }
            FeLevel::Node => {
                counts[a] += 1;
                counts[2 + b] += 1;
                counts[4 + c] += 1;
            }
        }
    }
    FeMultiset { level, counts }
}

/// Unordered pairs of distinct wirings carrying the same fixed-effect
/// multiset, in input order.
pub fn find_identifying_pairs(
    ws: &[WiringPattern],
    level: FeLevel,
) -> Vec<(WiringPattern, WiringPattern)> {
    let sets: Vec<FeMultiset> = ws.iter().map(|&w| fe_multiset(w, level)).collect();
    let mut pairs = Vec::new();
    for a in 0..ws.len() {
        for b in a + 1..ws.len() {
            if ws[a] != ws[b] && sets[a] == sets[b] {
                pairs.push((ws[a], ws[b]));
            }
        }
    }
    pairs
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceEntry {
    pub degrees: DegreeSequence,
    pub n_wirings: usize,
    pub identifying_pairs: Vec<(WiringPattern, WiringPattern)>,
}

/// Every degree sequence with entries `<= max_entry` that `keep` accepts,
/// with its wiring count and identifying pairs under `level`.
pub fn sweep_degree_sequences(
    max_entry: u8,
    level: FeLevel,
    keep: impl Fn(&DegreeSequence) -> bool,
) -> Vec<SequenceEntry> {
    let base = max_entry as u32 + 1;
    (0..base.pow(6))
        .map(|mut code| {
            let mut d = [0u8; 6];
            for slot in d.iter_mut() {
                *slot = (code % base) as u8;
                code /= base;
            }
            DegreeSequence(d)
        })
        .filter(|d| keep(d))
        .map(|d| {
            let ws = enumerate_wirings(d);
            SequenceEntry {
                degrees: d,
                n_wirings: ws.len(),
                identifying_pairs: find_identifying_pairs(&ws, level),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalityReport {
    pub passed: bool,
    pub sequences_checked: usize,
    /// Sequences below `(2,…,2)` that admit at least one wiring.
    pub sequences_with_wirings: usize,
    pub counterexamples: Vec<SequenceEntry>,
}

/// Checks that no degree sequence pointwise below `(2,2,2,2,2,2)` admits a
/// pair of wirings with equal dyad-level fixed-effect multisets.
pub fn verify_minimality() -> MinimalityReport {
    let top = DegreeSequence::uniform(2);
    let entries = sweep_degree_sequences(2, FeLevel::Dyad, |d| d.le(&top) && *d != top);
    let counterexamples: Vec<SequenceEntry> = entries
        .iter()
        .filter(|e| !e.identifying_pairs.is_empty())
        .cloned()
        .collect();
    MinimalityReport {
        passed: counterexamples.is_empty(),
        sequences_checked: entries.len(),
        sequences_with_wirings: entries.iter().filter(|e| e.n_wirings > 0).count(),
        counterexamples,
    }
}

/// Largest part size accepted by [`count_hexad_pairs_by_overlap`].
pub const MAX_EXHAUSTIVE_PAIR_N: u32 = 5;

/// Exact number of ordered hexad pairs `(σ, σ')` by the number of nodes
/// they share in each part, by exhaustive double loop over all
/// `n³(n-1)³` ordered hexads.
pub fn count_hexad_pairs_by_overlap(n: u32) -> Result<BTreeMap<(u8, u8, u8), u64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n}: hexads need n >= 2")));
    }
    if n > MAX_EXHAUSTIVE_PAIR_N {
        return Err(Error::ResourceLimit(format!(
            "exhaustive hexad-pair count limited to n <= {MAX_EXHAUSTIVE_PAIR_N}, got {n}"
        )));
    }
    let ordered_pairs: Vec<(u32, u32)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let shared = |x: (u32, u32), y: (u32, u32)| -> u8 {
        (x.0 == y.0 || x.0 == y.1) as u8 + (x.1 == y.0 || x.1 == y.1) as u8
    };
    let m = ordered_pairs.len();
    // A hexad is (pair of part 1, pair of part 2, pair of part 3).
    let hexads: Vec<[usize; 3]> = (0..m)
        .flat_map(|a| (0..m).flat_map(move |b| (0..m).map(move |c| [a, b, c])))
        .collect();
    // Overlap per part only depends on the two pair indices.
    let table: Vec<u8> = (0..m * m)
        .map(|idx| shared(ordered_pairs[idx / m], ordered_pairs[idx % m]))
        .collect();

    let mut counts = [0u64; 27];
    for s in &hexads {
        for t in &hexads {
            let q1 = table[s[0] * m + t[0]] as usize;
            let q2 = table[s[1] * m + t[1]] as usize;
            let q3 = table[s[2] * m + t[2]] as usize;
            counts[q1 * 9 + q2 * 3 + q3] += 1;
        }
    }
    Ok(counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(idx, &c)| (((idx / 9) as u8, ((idx / 3) % 3) as u8, (idx % 3) as u8), c))
        .collect())
}

/// One overlap cell compared across two part sizes against the growth rate
/// `(n_large / n_small)^(12 - q₁ - q₂ - q₃)`.
#[derive(Clone, Debug, Serialize)]
pub struct OverlapGrowth {
    pub overlap: (u8, u8, u8),
    pub count_small: u64,
    pub count_large: u64,
    pub observed_ratio: f64,
    pub exponent_ratio: f64,
    /// `observed_ratio / exponent_ratio`.
    pub relative: f64,
    pub within_band: bool,
}

/// Compares cell growth between two exhaustive tables. Cells empty in either
/// table are skipped. A cell is within the band when
/// `relative ∈ [1/band, band]`.
pub fn overlap_growth(
    small: &BTreeMap<(u8, u8, u8), u64>,
    n_small: u32,
    large: &BTreeMap<(u8, u8, u8), u64>,
    n_large: u32,
    band: f64,
) -> Vec<OverlapGrowth> {
    let base = n_large as f64 / n_small as f64;
    small
        .iter()
        .filter_map(|(&q, &count_small)| {
            let &count_large = large.get(&q)?;
            let observed_ratio = count_large as f64 / count_small as f64;
            let exponent = 12 - (q.0 + q.1 + q.2) as i32;
            let exponent_ratio = base.powi(exponent);
            let relative = observed_ratio / exponent_ratio;
            Some(OverlapGrowth {
                overlap: q,
                count_small,
                count_large,
                observed_ratio,
                exponent_ratio,
                relative,
                within_band: relative <= band && relative >= 1.0 / band,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(triads: &[(u8, u8, u8)]) -> WiringPattern {
        WiringPattern::from_triads(triads)
    }

    #[test]
    fn degree_sequence_examples() {
        let fig2_wiring1 = w(&[(1, 1, 2), (1, 1, 1), (2, 2, 1)]);
        assert_eq!(degree_sequence_of(fig2_wiring1), DegreeSequence([2, 2, 2, 1, 1, 1]));
        let fig2_wiring2 = w(&[(1, 1, 1), (1, 2, 2), (2, 1, 1), (2, 1, 2)]);
        assert_eq!(degree_sequence_of(fig2_wiring2), DegreeSequence([2, 3, 2, 2, 1, 2]));
        assert_eq!(degree_sequence_of(WiringPattern(0)), DegreeSequence::uniform(0));
        assert_eq!(degree_sequence_of(WiringPattern(0xff)), DegreeSequence::uniform(4));
    }

    #[test]
    fn informative_masks_match_named_triads() {
        assert_eq!(
            WiringPattern::INFORMATIVE_1,
            w(&[(1, 1, 1), (1, 2, 2), (2, 1, 2), (2, 2, 1)])
        );
        assert_eq!(
            WiringPattern::INFORMATIVE_2,
            w(&[(2, 2, 2), (2, 1, 1), (1, 2, 1), (1, 1, 2)])
        );
        assert_eq!(WiringPattern::INFORMATIVE_1.0 ^ WiringPattern::INFORMATIVE_2.0, 0xff);
    }

    #[test]
    fn enumerate_trivial_sequences() {
        assert_eq!(enumerate_wirings(DegreeSequence::uniform(0)), vec![WiringPattern(0)]);
        assert_eq!(enumerate_wirings(DegreeSequence::uniform(4)), vec![WiringPattern(0xff)]);
        let ones = enumerate_wirings(DegreeSequence::uniform(1));
        let mut expected = WiringPattern::NODE_LEVEL.to_vec();
        expected.sort();
        assert_eq!(ones, expected);
    }

    #[test]
    fn fe_multiset_examples() {
        let single = fe_multiset(w(&[(1, 1, 1)]), FeLevel::Dyad);
        let mut expected = [0u8; 12];
        expected[0] = 1; // A11
        expected[4] = 1; // B11
        expected[8] = 1; // C11
        assert_eq!(single.counts, expected);
        assert_eq!(fe_multiset(WiringPattern(0), FeLevel::Dyad).total(), 0);
        assert_eq!(fe_multiset(WiringPattern::INFORMATIVE_1, FeLevel::Dyad).counts, [1; 12]);
        assert_eq!(
            fe_multiset(WiringPattern::INFORMATIVE_1, FeLevel::Dyad),
            fe_multiset(WiringPattern::INFORMATIVE_2, FeLevel::Dyad)
        );
    }

    #[test]
    fn fe_total_is_three_per_hyperedge() {
        for mask in 0..=255u8 {
            let wp = WiringPattern(mask);
            for level in [FeLevel::Dyad, FeLevel::Node] {
                assert_eq!(fe_multiset(wp, level).total(), 3 * wp.n_hyperedges());
            }
        }
    }

    #[test]
    fn node_level_pairs_for_ones() {
        let ws = enumerate_wirings(DegreeSequence::uniform(1));
        assert_eq!(find_identifying_pairs(&ws, FeLevel::Node).len(), 6);
        assert!(find_identifying_pairs(&ws, FeLevel::Dyad).is_empty());
        assert!(find_identifying_pairs(&ws[..1], FeLevel::Node).is_empty());
    }

    #[test]
    fn zero_entry_sweep_has_no_pairs() {
        let entries = sweep_degree_sequences(2, FeLevel::Dyad, |d| d.0.contains(&0));
        assert!(entries.iter().all(|e| e.identifying_pairs.is_empty()));
    }

    #[test]
    fn full_sweep_flags_only_the_top_sequence() {
        let entries = sweep_degree_sequences(2, FeLevel::Dyad, |_| true);
        let flagged: Vec<&SequenceEntry> =
            entries.iter().filter(|e| !e.identifying_pairs.is_empty()).collect();
        assert_eq!(flagged.len(), 1);
        assert_eq!(flagged[0].degrees, DegreeSequence::uniform(2));
        assert_eq!(
            flagged[0].identifying_pairs,
            vec![(WiringPattern::INFORMATIVE_1, WiringPattern::INFORMATIVE_2)]
        );
    }

    #[test]
    fn pair_counts_small_n() {
        let two = count_hexad_pairs_by_overlap(2).unwrap();
        assert_eq!(two.into_iter().collect::<Vec<_>>(), vec![((2, 2, 2), 64)]);
        let three = count_hexad_pairs_by_overlap(3).unwrap();
        assert_eq!(three[&(2, 2, 2)], 1728);
        assert_eq!(three.values().sum::<u64>(), 216 * 216);
        assert!(matches!(count_hexad_pairs_by_overlap(1), Err(Error::InvalidArgument(_))));
        assert!(matches!(count_hexad_pairs_by_overlap(6), Err(Error::ResourceLimit(_))));
    }
}
