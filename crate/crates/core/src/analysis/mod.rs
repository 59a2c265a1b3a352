//! Isomorphism invariants, canonical certificates, isomorphism testing and
//! automorphism groups of Steiner designs.

mod canon;
mod census;
mod refine;
mod space;

use crate::design::Design;
use crate::rng::SplitMix64;
use sha2::{Digest, Sha256};
use space::LinearSpace;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("exact census needs {work} units of work, over the budget of {budget}")]
    TooLarge { work: u64, budget: u64 },
    #[error("{kind} budget of {budget} exceeded; result inconclusive")]
    BudgetExceeded { budget: u64, kind: &'static str },
    #[error("hint permutation #{index} is not an automorphism (block #{witness_block} is not mapped to a block)")]
    NotAnAutomorphism { index: usize, witness_block: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Shared tuning knobs; results never depend on `threads`.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub threads: usize,
    pub census_work_budget: u64,
    pub ir_node_budget: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            threads: 1,
            census_work_budget: 2_000_000_000,
            ir_node_budget: 10_000_000,
        }
    }
}

/// How a diagonal census was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusMode {
    Exact,
    /// Monte-Carlo tally over `sample_size` quadruple draws; never grounds a
    /// non-isomorphism claim.
    Sampled {
        sample_size: u64,
        seed: u64,
    },
}

/// Point-degree histogram plus the diagonal census: general-position 4-point
/// subsets classified by how many of their three opposite-pair line splits
/// meet. Exact vectors are relabeling-invariant; distinct exact vectors prove
/// non-isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantVector {
    pub replication: BTreeMap<u32, u32>,
    pub diagonal: [u64; 4],
    pub mode: CensusMode,
}

/// Canonical form of a design: the lexicographically least labeled block list
/// reachable by the individualization-refinement search, plus its digest.
/// Equal for isomorphic designs; different certificates prove
/// non-isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub canonical_blocks: Vec<Vec<u32>>,
    pub digest: String,
}

/// Automorphism generators and the exact group order.
#[derive(Debug, Clone)]
pub struct AutReport {
    pub generators: Vec<Vec<u32>>,
    pub order: u128,
}

pub fn invariant_vector(
    design: &Design,
    mode: CensusMode,
    opts: &AnalysisOptions,
) -> Result<InvariantVector, AnalysisError> {
    let space = LinearSpace::new(design)?;
    let mut replication: BTreeMap<u32, u32> = BTreeMap::new();
    for p in 0..space.v() {
        *replication
            .entry(space.lines_through(p).len() as u32)
            .or_insert(0) += 1;
    }
    let diagonal = match mode {
        CensusMode::Exact => {
            let work = census::exact_work_estimate(&space);
            if work > opts.census_work_budget {
                return Err(AnalysisError::TooLarge {
                    work,
                    budget: opts.census_work_budget,
                });
            }
            let meets = census::MeetsMatrix::build(&space);
            let sums = census::global_sums(&space, &meets, opts.threads.max(1));
            census::histogram(&space, sums)
        }
        CensusMode::Sampled { sample_size, seed } => sampled_census(&space, sample_size, seed),
    };
    Ok(InvariantVector {
        replication,
        diagonal,
        mode,
    })
}

fn sampled_census(space: &LinearSpace, sample_size: u64, seed: u64) -> [u64; 4] {
    let v = space.v() as u64;
    let mut rng = SplitMix64::new(seed);
    let mut hist = [0u64; 4];
    if v < 4 {
        return hist;
    }
    'outer: for _ in 0..sample_size {
        let mut quad = [0u32; 4];
        let mut filled = 0;
        while filled < 4 {
            let p = rng.below(v) as u32;
            if !quad[..filled].contains(&p) {
                quad[filled] = p;
                filled += 1;
            }
        }
        // General position: no 3 of the 4 points on one line.
        for i in 0..2 {
            for j in i + 1..3 {
                for l in j + 1..4 {
                    if space.line_of(quad[i], quad[j]) == space.line_of(quad[i], quad[l]) {
                        continue 'outer;
                    }
                }
            }
        }
        let [a, b, c, d] = quad;
        let splits = [
            (space.line_of(a, b), space.line_of(c, d)),
            (space.line_of(a, c), space.line_of(b, d)),
            (space.line_of(a, d), space.line_of(b, c)),
        ];
        let t = splits
            .iter()
            .filter(|&&(l1, l2)| blocks_meet(space, l1, l2))
            .count();
        hist[t] += 1;
    }
    hist
}

fn blocks_meet(space: &LinearSpace, l1: u32, l2: u32) -> bool {
    if l1 == l2 {
        return false;
    }
    let (a, b) = (space.block(l1), space.block(l2));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

pub fn canonical_certificate(
    design: &Design,
    opts: &AnalysisOptions,
) -> Result<Certificate, AnalysisError> {
    let space = LinearSpace::new(design)?;
    let meets = census::MeetsMatrix::build(&space);
    let ir = canon::Ir::new(
        &space,
        &meets,
        true,
        opts.ir_node_budget,
        opts.threads.max(1),
    );
    let outcome = ir.run()?;
    let flat = outcome
        .canonical_blocks
        .ok_or_else(|| AnalysisError::Internal("no canonical leaf produced".into()))?;
    let k = space.k();
    let canonical_blocks: Vec<Vec<u32>> = flat
        .chunks(k)
        .map(|c| c.iter().map(|&x| x as u32).collect())
        .collect();
    let mut hasher = Sha256::new();
    hasher.update(b"steiner-design-certificate-v1");
    hasher.update((design.v() as u64).to_le_bytes());
    hasher.update((design.k() as u64).to_le_bytes());
    hasher.update((design.block_count() as u64).to_le_bytes());
    for x in &flat {
        hasher.update(x.to_le_bytes());
    }
    let digest = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();
    Ok(Certificate {
        canonical_blocks,
        digest,
    })
}

/// Isomorphism test: fast rejection on parameters and exact invariant
/// vectors, then canonical certificates.
pub fn are_isomorphic(
    d1: &Design,
    d2: &Design,
    opts: &AnalysisOptions,
) -> Result<bool, AnalysisError> {
    if d1.v() != d2.v() || d1.k() != d2.k() || d1.block_count() != d2.block_count() {
        return Ok(false);
    }
    match (
        invariant_vector(d1, CensusMode::Exact, opts),
        invariant_vector(d2, CensusMode::Exact, opts),
    ) {
        (Ok(a), Ok(b)) => {
            if a != b {
                return Ok(false);
            }
        }
        // Exact census over budget: certificates below settle it.
        (Err(AnalysisError::TooLarge { .. }), _) | (_, Err(AnalysisError::TooLarge { .. })) => {}
        (Err(e), _) | (_, Err(e)) => return Err(e),
    }
    let c1 = canonical_certificate(d1, opts)?;
    let c2 = canonical_certificate(d2, opts)?;
    Ok(c1 == c2)
}

/// True iff `perm` is a bijection on the points mapping every block onto a
/// block.
pub fn verify_automorphism(design: &Design, perm: &[u32]) -> bool {
    let v = design.v() as usize;
    if perm.len() != v {
        return false;
    }
    let mut seen = vec![false; v];
    for &x in perm {
        if x as usize >= v || std::mem::replace(&mut seen[x as usize], true) {
            return false;
        }
    }
    let block_set: std::collections::HashSet<&[u32]> =
        design.blocks().iter().map(|b| b.as_slice()).collect();
    let mut image = Vec::with_capacity(design.k() as usize);
    for block in design.blocks() {
        image.clear();
        image.extend(block.iter().map(|&p| perm[p as usize]));
        image.sort_unstable();
        if !block_set.contains(image.as_slice()) {
            return false;
        }
    }
    true
}

/// Exact automorphism group computation. `known` permutations are verified
/// (error with a witness on failure) and seed the search's orbit pruning; the
/// reported order is the full group order either way.
pub fn automorphism_report(
    design: &Design,
    known: &[Vec<u32>],
    opts: &AnalysisOptions,
) -> Result<AutReport, AnalysisError> {
    let space = LinearSpace::new(design)?;
    for (index, perm) in known.iter().enumerate() {
        if perm.len() != design.v() as usize || !space.permutation_preserves_blocks(perm) {
            let witness_block = space.first_violated_block(perm).unwrap_or(0);
            return Err(AnalysisError::NotAnAutomorphism {
                index,
                witness_block,
            });
        }
    }
    let meets = census::MeetsMatrix::build(&space);
    let mut ir = canon::Ir::new(
        &space,
        &meets,
        false,
        opts.ir_node_budget,
        opts.threads.max(1),
    );
    ir.seed(known)?;
    let outcome = ir.run()?;
    Ok(AutReport {
        generators: outcome.generators,
        order: outcome.aut_order,
    })
}

/// Order of the permutation group generated by `gens`, by explicit closure.
/// Errors if the closure exceeds `cap` elements.
pub fn permutation_group_order(
    v: usize,
    gens: &[Vec<u32>],
    cap: usize,
) -> Result<u128, AnalysisError> {
    let identity: Vec<u32> = (0..v as u32).collect();
    let mut seen: std::collections::HashSet<Vec<u32>> = std::collections::HashSet::new();
    seen.insert(identity.clone());
    let mut queue = vec![identity];
    while let Some(g) = queue.pop() {
        for h in gens {
            if h.len() != v {
                return Err(AnalysisError::InvalidDesign(
                    "generator length mismatch".into(),
                ));
            }
            let gh: Vec<u32> = g.iter().map(|&x| h[x as usize]).collect();
            if seen.len() >= cap && !seen.contains(&gh) {
                return Err(AnalysisError::BudgetExceeded {
                    budget: cap as u64,
                    kind: "permutation closure",
                });
            }
            if seen.insert(gh.clone()) {
                queue.push(gh);
            }
        }
    }
    Ok(seen.len() as u128)
}

/// Cycle notation with fixed points omitted; identity prints as "()".
pub fn format_cycles(perm: &[u32]) -> String {
    let mut out = String::new();
    let mut seen = vec![false; perm.len()];
    for start in 0..perm.len() {
        if seen[start] || perm[start] as usize == start {
            seen[start] = true;
            continue;
        }
        out.push('(');
        let mut x = start;
        let mut first = true;
        while !seen[x] {
            seen[x] = true;
            if !first {
                out.push(' ');
            }
            out.push_str(&x.to_string());
            first = false;
            x = perm[x] as usize;
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

#[cfg(test)]
mod tests;
