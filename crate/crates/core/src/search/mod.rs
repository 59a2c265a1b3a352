//! Backtracking search for (v,k,1) difference families and 1-rotational
//! difference families, optionally with prescribed multiplier automorphisms.
//!
//! The family develops to a Steiner system exactly when every nonidentity
//! left quotient is represented by exactly one developed block, so the search
//! is exact cover over quotients — collapsed to quotient orbits when
//! multipliers are prescribed, since a multiplier-closed family covers a
//! whole orbit or none of it. Candidate blocks are normalized to contain the
//! identity, which removes the translation factor from the space. Coverage
//! counters prune; the accepted oracle for every emitted family is a full
//! develop-and-verify round trip, which stays correct in the presence of
//! blocks with nontrivial left stabilizers.

mod engine;
mod format;

pub use format::parse_search_config;

use crate::design::{
    admissible, develop, verify_steiner, DesignError, DifferenceFamily, VerificationReport,
};
use crate::group::{automorphism_from_images, build_group, GroupError, GroupSpec, GroupTable};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("({v},{k}) fails the divisibility conditions")]
    Inadmissible { v: u64, k: u64 },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error("multiplier #{index} is not an automorphism: {reason}")]
    NotAnAutomorphism { index: usize, reason: String },
    #[error("internal error: {0}")]
    Internal(String),
}

/// A difference-family search problem.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub group: GroupSpec,
    pub k: u32,
    pub rotational: bool,
    /// Automorphisms prescribed to permute the family's blocks, each given
    /// as images of the group's canonical generators.
    pub multipliers: Vec<Vec<Vec<u32>>>,
    pub limit_nodes: Option<u64>,
    pub limit_seconds: Option<u64>,
    pub limit_solutions: Option<u64>,
    /// Randomizes candidate (value) order only; pruning is unaffected, so
    /// completeness is preserved.
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(group: GroupSpec, k: u32, rotational: bool) -> SearchConfig {
        SearchConfig {
            group,
            k,
            rotational,
            multipliers: Vec::new(),
            limit_nodes: None,
            limit_seconds: None,
            limit_solutions: None,
            seed: 0,
        }
    }
}

#[derive(Debug)]
pub struct SearchOutcome {
    pub families: Vec<DifferenceFamily>,
    /// False when a node/time/solution limit stopped the search before the
    /// space was exhausted.
    pub complete: bool,
    pub nodes: u64,
}

/// Orbits of the nonidentity elements under the group generated by the
/// multipliers, ordered by least element; members in closure-discovery
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitCatalog {
    pub orbits: Vec<Vec<u32>>,
    /// Element index -> orbit id; the identity maps to u32::MAX.
    pub orbit_of: Vec<u32>,
}

/// Partition the nonidentity elements into orbits under verified
/// automorphism maps.
pub fn multiplier_orbits(
    table: &GroupTable,
    multipliers: &[Vec<u32>],
) -> Result<OrbitCatalog, SearchError> {
    for (index, m) in multipliers.iter().enumerate() {
        if !is_element_automorphism(table, m) {
            return Err(SearchError::NotAnAutomorphism {
                index,
                reason: "map fails the exhaustive automorphism check".into(),
            });
        }
    }
    let n = table.order() as usize;
    let mut orbit_of = vec![u32::MAX; n];
    let mut orbits = Vec::new();
    for d in 1..n as u32 {
        if orbit_of[d as usize] != u32::MAX {
            continue;
        }
        let id = orbits.len() as u32;
        let mut members = vec![d];
        orbit_of[d as usize] = id;
        let mut at = 0;
        while at < members.len() {
            let x = members[at];
            at += 1;
            for m in multipliers {
                let y = m[x as usize];
                if orbit_of[y as usize] == u32::MAX {
                    orbit_of[y as usize] = id;
                    members.push(y);
                }
            }
        }
        orbits.push(members);
    }
    Ok(OrbitCatalog { orbits, orbit_of })
}

fn is_element_automorphism(table: &GroupTable, map: &[u32]) -> bool {
    let n = table.order() as usize;
    if map.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &y in map {
        if y as usize >= n || std::mem::replace(&mut seen[y as usize], true) {
            return false;
        }
    }
    (0..n as u32).all(|a| {
        (0..n as u32)
            .all(|b| map[table.mul(a, b) as usize] == table.mul(map[a as usize], map[b as usize]))
    })
}

/// Candidate finite parts for the ∞-block of a 1-rotational family: sets
/// containing the identity whose distinct left translates partition the
/// group, i.e. subgroups of order k−1. Deterministic order.
pub fn rotational_base_candidates(table: &GroupTable, k: u32) -> Vec<Vec<u32>> {
    if k < 2 {
        return Vec::new();
    }
    subgroups_of_order(table, k - 1)
}

/// All subgroups of the given order, each as a sorted element list, sorted.
fn subgroups_of_order(table: &GroupTable, h: u32) -> Vec<Vec<u32>> {
    if h == 0 || !table.order().is_multiple_of(h) {
        return Vec::new();
    }
    let mut found: std::collections::BTreeSet<Vec<u32>> = std::collections::BTreeSet::new();
    for x in 0..table.order() {
        if !h.is_multiple_of(table.element_order(x)) {
            continue;
        }
        let sub = generated_subgroup(table, &[x]);
        if sub.len() as u32 <= h {
            found.insert(sub);
        }
    }
    // Join pairs while the closure stays within the target order.
    loop {
        let mut grew = false;
        let snapshot: Vec<Vec<u32>> = found.iter().cloned().collect();
        for a in &snapshot {
            for b in &snapshot {
                let gens: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
                let joined = generated_subgroup(table, &gens);
                if joined.len() as u32 <= h && !found.contains(&joined) {
                    found.insert(joined);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    found.into_iter().filter(|s| s.len() as u32 == h).collect()
}

/// Closure of a generating set, as a sorted element list.
fn generated_subgroup(table: &GroupTable, gens: &[u32]) -> Vec<u32> {
    let mut seen = vec![false; table.order() as usize];
    seen[0] = true;
    let mut members = vec![0u32];
    let mut at = 0;
    while at < members.len() {
        let x = members[at];
        at += 1;
        for &g in gens {
            let y = table.mul(x, g);
            if !seen[y as usize] {
                seen[y as usize] = true;
                members.push(y);
            }
        }
    }
    members.sort_unstable();
    members
}

/// Full develop-and-verify round trip; the acceptance oracle for search
/// output (stabilizer-safe, unlike coverage counters).
pub fn validate_candidate(family: &DifferenceFamily) -> Result<VerificationReport, DesignError> {
    let dev = develop(family)?;
    verify_steiner(&dev.design, 1)
}

/// Search for difference families under the given configuration. Families
/// are returned in canonical order (lexicographic on normalized sorted
/// blocks); for a fixed seed the run is deterministic.
pub fn search(config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let table = build_group(&config.group)?;
    let n = table.order() as u64;
    let v = if config.rotational { n + 1 } else { n };
    if admissible(v, config.k as u64).is_none() {
        return Err(SearchError::Inadmissible {
            v,
            k: config.k as u64,
        });
    }
    let mut multiplier_maps = Vec::with_capacity(config.multipliers.len());
    for (index, images) in config.multipliers.iter().enumerate() {
        let map = automorphism_from_images(&config.group, &table, images).map_err(|e| {
            SearchError::NotAnAutomorphism {
                index,
                reason: e.to_string(),
            }
        })?;
        multiplier_maps.push(map);
    }
    let catalog = multiplier_orbits(&table, &multiplier_maps)?;
    let theta = permutation_closure(&multiplier_maps, table.order() as usize);
    let mut engine = engine::Engine::new(&table, config, catalog, theta);
    let (solutions, complete, nodes) = engine.run()?;

    let families: Vec<DifferenceFamily> = solutions
        .iter()
        .enumerate()
        .map(|(i, sol)| {
            let mut blocks: Vec<Vec<String>> = sol
                .finite_blocks
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|&x| crate::group::format_element(x, &table))
                        .collect()
                })
                .collect();
            if let Some(part) = &sol.infinity_part {
                let mut tokens: Vec<String> = part
                    .iter()
                    .map(|&x| crate::group::format_element(x, &table))
                    .collect();
                tokens.push("inf".to_string());
                blocks.push(tokens);
            }
            DifferenceFamily {
                group: config.group.clone(),
                rotational: config.rotational,
                blocks,
                metadata: vec![("name".to_string(), format!("solution-{:03}", i + 1))],
            }
        })
        .collect();

    // Soundness gate: every emitted family must survive the full oracle.
    for family in &families {
        let report = validate_candidate(family)?;
        if !report.is_steiner {
            return Err(SearchError::Internal(
                "search emitted a family that fails develop+verify".into(),
            ));
        }
    }
    Ok(SearchOutcome {
        families,
        complete,
        nodes,
    })
}

/// Closure of the multiplier maps under composition (includes the identity).
fn permutation_closure(maps: &[Vec<u32>], n: usize) -> Vec<Vec<u32>> {
    let identity: Vec<u32> = (0..n as u32).collect();
    let mut seen: std::collections::BTreeSet<Vec<u32>> = std::collections::BTreeSet::new();
    seen.insert(identity.clone());
    let mut queue = vec![identity];
    while let Some(g) = queue.pop() {
        for m in maps {
            let gm: Vec<u32> = g.iter().map(|&x| m[x as usize]).collect();
            if seen.insert(gm.clone()) {
                queue.push(gm);
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests;
