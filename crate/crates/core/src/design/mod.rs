//! Difference families and the block designs they develop into.
//!
//! A difference family is a list of basic blocks over a finite group (with an
//! optional ∞ point in the 1-rotational case). Its development is the set of
//! all left translates, deduplicated; the Steiner property is then checked
//! exactly by a full pair-coverage census.

mod format;

pub use format::{parse_design_file, parse_family_file, write_design_file, write_family_file};

use crate::group::{build_group, parse_element, GroupError, GroupSpec, GroupTable};
use std::collections::{BTreeMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DesignError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("inconsistent content: {0}")]
    Consistency(String),
    #[error("block #{index} has {got} points, expected k = {k}")]
    BlockSizeMismatch { index: usize, got: usize, k: usize },
    #[error("invalid design: {0}")]
    InvalidDesign(String),
}

/// A difference family: basic blocks over a group, as point tokens.
#[derive(Debug, Clone)]
pub struct DifferenceFamily {
    pub group: GroupSpec,
    pub rotational: bool,
    /// Basic blocks as token lists ("0000", ..., possibly "inf").
    pub blocks: Vec<Vec<String>>,
    /// Free-form annotations: name, fingerprint, anything else.
    pub metadata: Vec<(String, String)>,
}

impl DifferenceFamily {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Number of points of the developed design.
    pub fn point_count(&self) -> Option<u64> {
        self.group
            .order()
            .map(|n| if self.rotational { n + 1 } else { n })
    }

    /// Block size, taken from the first block.
    pub fn block_size(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.len())
    }

    /// Parse every token and check the family invariants. Returns the table
    /// and the blocks as point indices (∞ mapped to `order`).
    pub fn realize(&self) -> Result<(GroupTable, Vec<Vec<u32>>), DesignError> {
        let table = build_group(&self.group)?;
        let k = self.block_size();
        let infinity = table.order();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (i, tokens) in self.blocks.iter().enumerate() {
            if tokens.len() != k {
                return Err(DesignError::BlockSizeMismatch {
                    index: i,
                    got: tokens.len(),
                    k,
                });
            }
            let mut pts = Vec::with_capacity(k);
            for tok in tokens {
                let p = if self.rotational && tok == "inf" {
                    infinity
                } else {
                    parse_element(tok, &table)?
                };
                pts.push(p);
            }
            pts.sort_unstable();
            if pts.windows(2).any(|w| w[0] == w[1]) {
                return Err(DesignError::Consistency(format!(
                    "block #{i} has repeated points"
                )));
            }
            blocks.push(pts);
        }
        Ok((table, blocks))
    }
}

/// A block design: v points, blocks as sorted point-index k-sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    v: u32,
    k: u32,
    blocks: Vec<Vec<u32>>,
}

impl Design {
    /// Build a design, validating the structural invariants: sorted blocks,
    /// indices below v, no duplicate blocks. Blocks are stored sorted
    /// lexicographically.
    pub fn new(v: u32, k: u32, mut blocks: Vec<Vec<u32>>) -> Result<Self, DesignError> {
        for (i, b) in blocks.iter_mut().enumerate() {
            if b.len() != k as usize {
                return Err(DesignError::BlockSizeMismatch {
                    index: i,
                    got: b.len(),
                    k: k as usize,
                });
            }
            b.sort_unstable();
            if b.windows(2).any(|w| w[0] == w[1]) {
                return Err(DesignError::InvalidDesign(format!(
                    "block #{i} has repeated points"
                )));
            }
            if let Some(&max) = b.last() {
                if max >= v {
                    return Err(DesignError::InvalidDesign(format!(
                        "block #{i} mentions point {max} but v = {v}"
                    )));
                }
            }
        }
        blocks.sort_unstable();
        if blocks.windows(2).any(|w| w[0] == w[1]) {
            return Err(DesignError::InvalidDesign("duplicate blocks".into()));
        }
        Ok(Design { v, k, blocks })
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// The design with points renamed through `perm` (point p becomes
    /// `perm[p]`).
    pub fn relabel(&self, perm: &[u32]) -> Result<Design, DesignError> {
        if perm.len() != self.v as usize {
            return Err(DesignError::InvalidDesign("permutation length != v".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&p| perm[p as usize]).collect())
            .collect();
        Design::new(self.v, self.k, blocks)
    }
}

/// Divisibility test for the existence of an S(2,k,v): (k-1) | (v-1) and
/// k(k-1) | v(v-1). Returns (b, r) when admissible.
pub fn admissible(v: u64, k: u64) -> Option<(u64, u64)> {
    if k < 2 || v <= k {
        return None;
    }
    if !(v - 1).is_multiple_of(k - 1) || !(v * (v - 1)).is_multiple_of(k * (k - 1)) {
        return None;
    }
    Some((v * (v - 1) / (k * (k - 1)), (v - 1) / (k - 1)))
}

/// Development of a family: every left translate gB, deduplicated, together
/// with the orbit length of each basic block.
#[derive(Debug, Clone)]
pub struct Development {
    pub design: Design,
    /// Distinct translates of each basic block, in family order.
    pub orbit_lengths: Vec<usize>,
}

/// Develop a difference family into a design by forming all left translates.
/// ∞ is fixed by every translation and becomes point v-1.
pub fn develop(family: &DifferenceFamily) -> Result<Development, DesignError> {
    let (table, blocks) = family.realize()?;
    let order = table.order();
    let infinity = order;
    let k = family.block_size() as u32;
    let v = if family.rotational { order + 1 } else { order };
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut orbit_lengths = Vec::with_capacity(blocks.len());
    for block in &blocks {
        let mut orbit = 0usize;
        for g in 0..order {
            let mut t: Vec<u32> = block
                .iter()
                .map(|&p| if p == infinity { p } else { table.mul(g, p) })
                .collect();
            t.sort_unstable();
            if seen.insert(t.clone()) {
                out.push(t);
                orbit += 1;
            }
        }
        orbit_lengths.push(orbit);
    }
    let design = Design::new(v, k, out)?;
    Ok(Development {
        design,
        orbit_lengths,
    })
}

/// Result of the exact pair-coverage census.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub is_steiner: bool,
    pub v: u32,
    pub k: u32,
    pub block_count: usize,
    pub uncovered_pairs: u64,
    pub multiply_covered_pairs: u64,
    /// Up to 100 uncovered pairs.
    pub uncovered_witnesses: Vec<(u32, u32)>,
    /// Up to 100 pairs covered more than once, with their coverage count.
    pub multiple_witnesses: Vec<(u32, u32, u32)>,
    /// Expected block count v(v-1)/(k(k-1)), when the parameters divide.
    pub expected_blocks: Option<u64>,
    /// Expected replication number (v-1)/(k-1), when the parameters divide.
    pub replication: Option<u64>,
}

const MAX_WITNESSES: usize = 100;

/// Exact pair-coverage verification: every unordered pair of points must lie
/// in exactly one block. `threads` > 1 splits the counting by block chunks;
/// the result is identical for any thread count.
pub fn verify_steiner(design: &Design, threads: usize) -> Result<VerificationReport, DesignError> {
    let v = design.v as usize;
    let k = design.k;
    for (i, b) in design.blocks.iter().enumerate() {
        if b.len() != k as usize {
            return Err(DesignError::BlockSizeMismatch {
                index: i,
                got: b.len(),
                k: k as usize,
            });
        }
    }
    let npairs = v * (v - 1) / 2;
    let counts = count_pairs(&design.blocks, v, npairs, threads);

    let mut uncovered = 0u64;
    let mut multiple = 0u64;
    let mut uncovered_witnesses = Vec::new();
    let mut multiple_witnesses = Vec::new();
    for j in 1..v {
        let base = j * (j - 1) / 2;
        for i in 0..j {
            let c = counts[base + i];
            if c == 0 {
                uncovered += 1;
                if uncovered_witnesses.len() < MAX_WITNESSES {
                    uncovered_witnesses.push((i as u32, j as u32));
                }
            } else if c > 1 {
                multiple += 1;
                if multiple_witnesses.len() < MAX_WITNESSES {
                    multiple_witnesses.push((i as u32, j as u32, c));
                }
            }
        }
    }
    let params = admissible(design.v as u64, design.k as u64);
    Ok(VerificationReport {
        is_steiner: uncovered == 0 && multiple == 0,
        v: design.v,
        k,
        block_count: design.blocks.len(),
        uncovered_pairs: uncovered,
        multiply_covered_pairs: multiple,
        uncovered_witnesses,
        multiple_witnesses,
        expected_blocks: params.map(|(b, _)| b),
        replication: params.map(|(_, r)| r),
    })
}

fn count_pairs(blocks: &[Vec<u32>], _v: usize, npairs: usize, threads: usize) -> Vec<u32> {
    let tally = |chunk: &[Vec<u32>]| {
        let mut counts = vec![0u32; npairs];
        for b in chunk {
            for (idx, &q) in b.iter().enumerate().skip(1) {
                let base = (q as usize) * (q as usize - 1) / 2;
                for &p in &b[..idx] {
                    counts[base + p as usize] += 1;
                }
            }
        }
        counts
    };
    if threads <= 1 || blocks.len() < 2 * threads {
        return tally(blocks);
    }
    let chunk_size = blocks.len().div_ceil(threads);
    let partials: Vec<Vec<u32>> = std::thread::scope(|s| {
        let handles: Vec<_> = blocks
            .chunks(chunk_size)
            .map(|chunk| s.spawn(move || tally(chunk)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut counts = vec![0u32; npairs];
    for part in partials {
        for (c, p) in counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    counts
}

/// Point permutations of the developed design induced by all left
/// translations x ↦ g·x; ∞ is fixed when `rotational`. Every one of these is
/// an automorphism of any developed design over the group.
pub fn left_translation_perms(table: &GroupTable, rotational: bool) -> Vec<Vec<u32>> {
    let order = table.order();
    let v = if rotational { order + 1 } else { order };
    (0..order)
        .map(|g| {
            (0..v)
                .map(|x| if x == order { x } else { table.mul(g, x) })
                .collect()
        })
        .collect()
}

/// Representation counts of left quotients within the basic blocks.
///
/// For every ordered pair (b1, b2) of distinct finite points inside a basic
/// block this tallies d = b1⁻¹·b2; unordered pairs {x, ∞} are tallied once
/// under the finite point. A diagnostic and pruning device only: blocks with
/// nontrivial left stabilizers inflate these counts, so the final word on
/// validity is always [`verify_steiner`] on the development.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuotientCensus {
    /// nonidentity element index -> count of ordered-pair representations.
    pub finite: BTreeMap<u32, u32>,
    /// finite point index -> count of {point, ∞} pairs.
    pub infinity: BTreeMap<u32, u32>,
}

pub fn quotient_census(family: &DifferenceFamily) -> Result<QuotientCensus, DesignError> {
    let (table, blocks) = family.realize()?;
    let infinity = table.order();
    let mut census = QuotientCensus::default();
    for block in &blocks {
        for &p in block {
            for &q in block {
                if p == q {
                    continue;
                }
                if p == infinity || q == infinity {
                    // Count the unordered pair once, keyed by the finite point.
                    if q == infinity {
                        *census.infinity.entry(p).or_insert(0) += 1;
                    }
                    continue;
                }
                let d = table.mul(table.inv(p), q);
                *census.finite.entry(d).or_insert(0) += 1;
            }
        }
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fano_family() -> DifferenceFamily {
        DifferenceFamily {
            group: GroupSpec::Cyclic(7),
            rotational: false,
            blocks: vec![vec!["0".into(), "1".into(), "3".into()]],
            metadata: vec![],
        }
    }

    #[test]
    fn admissible_examples() {
        assert_eq!(admissible(226, 6), Some((1695, 45)));
        assert_eq!(admissible(441, 6), Some((6468, 88)));
        // Divisibility holds for (36, 6) even though no such system exists.
        assert_eq!(admissible(36, 6), Some((42, 7)));
        assert_eq!(admissible(20, 6), None);
        assert_eq!(admissible(7, 3), Some((7, 3)));
        assert_eq!(admissible(6, 6), None);
        assert_eq!(admissible(10, 1), None);
    }

    #[test]
    fn fano_develops_to_seven_blocks() {
        let dev = develop(&fano_family()).unwrap();
        assert_eq!(dev.design.v(), 7);
        assert_eq!(dev.design.k(), 3);
        assert_eq!(dev.design.block_count(), 7);
        assert_eq!(dev.orbit_lengths, vec![7]);
        let report = verify_steiner(&dev.design, 1).unwrap();
        assert!(report.is_steiner);
        assert_eq!(report.expected_blocks, Some(7));
    }

    #[test]
    fn sts9_short_orbits() {
        // AG(2,3) as a difference family over Z3 x Z3: the four lines through
        // the origin are subgroups of order 3, each with orbit length 3.
        let group = GroupSpec::DirectProduct(
            Box::new(GroupSpec::Cyclic(3)),
            Box::new(GroupSpec::Cyclic(3)),
        );
        let family = DifferenceFamily {
            group,
            rotational: false,
            blocks: vec![
                vec!["00".into(), "01".into(), "02".into()],
                vec!["00".into(), "10".into(), "20".into()],
                vec!["00".into(), "11".into(), "22".into()],
                vec!["00".into(), "12".into(), "21".into()],
            ],
            metadata: vec![],
        };
        let dev = develop(&family).unwrap();
        assert_eq!(dev.design.block_count(), 12);
        assert_eq!(dev.orbit_lengths, vec![3, 3, 3, 3]);
        assert!(verify_steiner(&dev.design, 1).unwrap().is_steiner);
    }

    #[test]
    fn develop_invariant_under_translate_replacement() {
        // Replacing a basic block by any left translate leaves the developed
        // design unchanged.
        let family = fano_family();
        let base = develop(&family).unwrap().design;
        for shift in 1..7u32 {
            let translated = DifferenceFamily {
                blocks: vec![vec![
                    format!("{}", shift % 7),
                    format!("{}", (1 + shift) % 7),
                    format!("{}", (3 + shift) % 7),
                ]],
                ..family.clone()
            };
            assert_eq!(develop(&translated).unwrap().design, base);
        }
    }

    #[test]
    fn verify_detects_missing_block() {
        let dev = develop(&fano_family()).unwrap();
        let mut blocks = dev.design.blocks().to_vec();
        blocks.pop();
        let damaged = Design::new(7, 3, blocks).unwrap();
        let report = verify_steiner(&damaged, 1).unwrap();
        assert!(!report.is_steiner);
        assert_eq!(report.uncovered_pairs, 3);
    }

    #[test]
    fn verify_threaded_matches_sequential() {
        let dev = develop(&fano_family()).unwrap();
        let a = verify_steiner(&dev.design, 1).unwrap();
        let b = verify_steiner(&dev.design, 4).unwrap();
        assert_eq!(a.is_steiner, b.is_steiner);
        assert_eq!(a.uncovered_pairs, b.uncovered_pairs);
        assert_eq!(a.multiply_covered_pairs, b.multiply_covered_pairs);
    }

    #[test]
    fn quotient_census_fano() {
        let census = quotient_census(&fano_family()).unwrap();
        assert_eq!(census.finite.len(), 6);
        assert!(census.finite.values().all(|&c| c == 1));
        assert!(census.infinity.is_empty());
    }

    #[test]
    fn quotient_census_empty_family() {
        let family = DifferenceFamily {
            group: GroupSpec::Cyclic(7),
            rotational: false,
            blocks: vec![],
            metadata: vec![],
        };
        let census = quotient_census(&family).unwrap();
        assert!(census.finite.is_empty() && census.infinity.is_empty());
    }

    #[test]
    fn design_rejects_duplicates_and_out_of_range() {
        assert!(Design::new(7, 3, vec![vec![0, 1, 3], vec![1, 0, 3]]).is_err());
        assert!(Design::new(7, 3, vec![vec![0, 1, 7]]).is_err());
        assert!(Design::new(7, 3, vec![vec![0, 1, 1]]).is_err());
    }

    #[test]
    fn relabel_round_trip() {
        let d = develop(&fano_family()).unwrap().design;
        let perm: Vec<u32> = vec![3, 0, 6, 2, 5, 1, 4];
        let mut inv = vec![0u32; 7];
        for (i, &p) in perm.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        let r = d.relabel(&perm).unwrap();
        assert_ne!(r, d);
        assert_eq!(r.relabel(&inv).unwrap(), d);
    }
}
