//! Exact-cover engine over quotient orbits.
//!
//! Candidate blocks contain the identity. When the candidate universe
//! C(n−1, k−1) is small enough, all normalized blocks are enumerated up
//! front (static pool) and the fail-first rule picks the uncovered orbit
//! with the fewest live candidates. Otherwise candidates are built on demand
//! by extending {identity, d0} for the least element d0 of the least
//! uncovered orbit, which generates each valid candidate block-orbit exactly
//! once.

use super::{OrbitCatalog, SearchConfig, SearchError};
use crate::group::GroupTable;
use crate::rng::SplitMix64;
use std::time::Instant;

const POOL_CAP: u64 = 200_000;

/// One selectable unit: a block orbit under the multiplier group.
#[derive(Debug, Clone)]
struct Row {
    /// Canonical representative class (sorted, contains 0).
    rep: Vec<u32>,
    /// All distinct translate classes in the orbit (each sorted, contains 0).
    classes: Vec<Vec<u32>>,
    /// Sorted orbit ids covered exactly once by the whole block orbit.
    cover: Vec<u32>,
}

/// A complete assignment, still in element-index form.
pub(super) struct Solution {
    pub infinity_part: Option<Vec<u32>>,
    pub finite_blocks: Vec<Vec<u32>>,
}

enum Stop {
    Budget,
    SolutionLimit,
}

pub(super) struct Engine<'a> {
    table: &'a GroupTable,
    k: usize,
    h_cap: u32,
    catalog: OrbitCatalog,
    theta: Vec<Vec<u32>>,
    covered: Vec<bool>,
    uncovered: usize,
    chosen: Vec<Row>,
    infinity_part: Option<Vec<u32>>,
    pool: Option<Vec<Row>>,
    rng: SplitMix64,
    nodes: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    solution_limit: u64,
    solutions: Vec<Solution>,
    rotational: bool,
}

impl<'a> Engine<'a> {
    pub fn new(
        table: &'a GroupTable,
        config: &SearchConfig,
        catalog: OrbitCatalog,
        theta: Vec<Vec<u32>>,
    ) -> Engine<'a> {
        let n = table.order() as u64;
        let k = config.k as usize;
        let orbit_count = catalog.orbits.len();
        Engine {
            table,
            k,
            h_cap: gcd(config.k, table.order()),
            catalog,
            theta,
            covered: vec![false; orbit_count],
            uncovered: orbit_count,
            chosen: Vec::new(),
            infinity_part: None,
            pool: None,
            rng: SplitMix64::new(config.seed),
            nodes: 0,
            node_limit: config.limit_nodes.unwrap_or(u64::MAX),
            deadline: config
                .limit_seconds
                .map(|s| Instant::now() + std::time::Duration::from_secs(s)),
            solution_limit: config.limit_solutions.unwrap_or(u64::MAX),
            solutions: Vec::new(),
            rotational: config.rotational,
        }
        .with_pool(n)
    }

    fn with_pool(mut self, n: u64) -> Engine<'a> {
        if binomial_capped(n.saturating_sub(1), self.k as u64 - 1, POOL_CAP) <= POOL_CAP {
            self.pool = Some(self.enumerate_pool());
        }
        self
    }

    pub fn run(&mut self) -> Result<(Vec<Solution>, bool, u64), SearchError> {
        let complete = if self.rotational {
            self.run_rotational()
        } else {
            self.solve()
        };
        let complete = match complete {
            Ok(()) => true,
            Err(Stop::Budget) | Err(Stop::SolutionLimit) => false,
        };
        let mut solutions = std::mem::take(&mut self.solutions);
        solutions.sort_by(|a, b| {
            (&a.infinity_part, &a.finite_blocks).cmp(&(&b.infinity_part, &b.finite_blocks))
        });
        Ok((solutions, complete, self.nodes))
    }

    fn run_rotational(&mut self) -> Result<(), Stop> {
        let mut bases = super::rotational_base_candidates(self.table, self.k as u32);
        // The ∞-block class must itself be multiplier-invariant.
        bases.retain(|h| {
            self.theta.iter().all(|m| {
                let mut image: Vec<u32> = h.iter().map(|&x| m[x as usize]).collect();
                image.sort_unstable();
                image == *h
            })
        });
        self.rng.shuffle(&mut bases);
        for base in bases {
            self.check_budget()?;
            let orbit_ids: Vec<u32> = base
                .iter()
                .filter(|&&x| x != 0)
                .map(|&x| self.catalog.orbit_of[x as usize])
                .collect();
            let mut ids = orbit_ids.clone();
            ids.sort_unstable();
            ids.dedup();
            if ids.iter().any(|&o| self.covered[o as usize]) {
                continue;
            }
            // Subgroup pairs cover each of its nonidentity elements exactly
            // once, so marking whole orbits is sound only if they lie inside
            // the subgroup; a multiplier-invariant subgroup guarantees that.
            if ids.iter().any(|&o| {
                !self.catalog.orbits[o as usize]
                    .iter()
                    .all(|d| base.contains(d))
            }) {
                continue;
            }
            self.nodes += 1;
            for &o in &ids {
                self.covered[o as usize] = true;
            }
            self.uncovered -= ids.len();
            self.infinity_part = Some(base.clone());
            let outcome = self.solve();
            self.infinity_part = None;
            for &o in &ids {
                self.covered[o as usize] = false;
            }
            self.uncovered += ids.len();
            outcome?;
        }
        Ok(())
    }

    fn check_budget(&self) -> Result<(), Stop> {
        if self.nodes >= self.node_limit {
            return Err(Stop::Budget);
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                return Err(Stop::Budget);
            }
        }
        Ok(())
    }

    fn solve(&mut self) -> Result<(), Stop> {
        self.check_budget()?;
        if self.uncovered == 0 {
            self.emit();
            if self.solutions.len() as u64 >= self.solution_limit {
                return Err(Stop::SolutionLimit);
            }
            return Ok(());
        }
        let mut rows = if self.pool.is_some() {
            self.pool_candidates()?
        } else {
            self.dynamic_candidates()?
        };
        self.rng.shuffle(&mut rows);
        for row in rows {
            if row.cover.iter().any(|&o| self.covered[o as usize]) {
                continue;
            }
            self.nodes += 1;
            for &o in &row.cover {
                self.covered[o as usize] = true;
            }
            self.uncovered -= row.cover.len();
            self.chosen.push(row);
            let outcome = self.solve();
            let row = self.chosen.pop().expect("pushed above");
            for &o in &row.cover {
                self.covered[o as usize] = false;
            }
            self.uncovered += row.cover.len();
            outcome?;
        }
        Ok(())
    }

    /// Fail-first: candidates for the uncovered orbit with the fewest live
    /// rows.
    fn pool_candidates(&self) -> Result<Vec<Row>, Stop> {
        let pool = self.pool.as_ref().expect("static mode");
        let mut counts = vec![0u32; self.catalog.orbits.len()];
        for row in pool {
            if row.cover.iter().any(|&o| self.covered[o as usize]) {
                continue;
            }
            for &o in &row.cover {
                counts[o as usize] += 1;
            }
        }
        let target = (0..counts.len() as u32)
            .filter(|&o| !self.covered[o as usize])
            .min_by_key(|&o| (counts[o as usize], o))
            .expect("uncovered orbit exists");
        Ok(pool
            .iter()
            .filter(|row| {
                row.cover.contains(&target) && !row.cover.iter().any(|&o| self.covered[o as usize])
            })
            .cloned()
            .collect())
    }

    /// Least-index uncovered orbit; candidates built by extending
    /// {0, least element}.
    fn dynamic_candidates(&mut self) -> Result<Vec<Row>, Stop> {
        let target = (0..self.catalog.orbits.len() as u32)
            .find(|&o| !self.covered[o as usize])
            .expect("uncovered orbit exists");
        let d0 = self.catalog.orbits[target as usize][0];
        let n = self.table.order() as usize;
        let mut cnt = vec![0u32; n];
        cnt[d0 as usize] += 1;
        cnt[self.table.inv(d0) as usize] += 1;
        let mut partial = vec![0u32, d0];
        let mut out = Vec::new();
        self.extend(&mut partial, &mut cnt, 0, &mut out)?;
        out.sort_by(|a, b| a.rep.cmp(&b.rep));
        Ok(out)
    }

    fn extend(
        &mut self,
        partial: &mut Vec<u32>,
        cnt: &mut [u32],
        min_next: u32,
        out: &mut Vec<Row>,
    ) -> Result<(), Stop> {
        self.nodes += 1;
        self.check_budget()?;
        if partial.len() == self.k {
            let mut block = partial.clone();
            block.sort_unstable();
            if let Some(row) = self.orbit_cover(&block) {
                out.push(row);
            }
            return Ok(());
        }
        let d0 = partial[1];
        for z in (min_next + 1)..self.table.order() {
            if z == d0 {
                continue;
            }
            let mut added: Vec<u32> = Vec::with_capacity(2 * partial.len());
            let mut ok = true;
            for &p in partial.iter() {
                for d in [
                    self.table.mul(self.table.inv(p), z),
                    self.table.mul(self.table.inv(z), p),
                ] {
                    let orbit = self.catalog.orbit_of[d as usize];
                    if self.covered[orbit as usize] || cnt[d as usize] >= self.h_cap {
                        ok = false;
                        break;
                    }
                    cnt[d as usize] += 1;
                    added.push(d);
                }
                if !ok {
                    break;
                }
            }
            if ok {
                partial.push(z);
                let outcome = self.extend(partial, cnt, z, out);
                partial.pop();
                for &d in &added {
                    cnt[d as usize] -= 1;
                }
                outcome?;
            } else {
                for &d in &added {
                    cnt[d as usize] -= 1;
                }
            }
        }
        Ok(())
    }

    fn enumerate_pool(&self) -> Vec<Row> {
        let mut rows = Vec::new();
        let mut block = vec![0u32; self.k];
        fn combos(
            engine: &Engine,
            block: &mut Vec<u32>,
            depth: usize,
            from: u32,
            rows: &mut Vec<Row>,
        ) {
            if depth == block.len() {
                if let Some(row) = engine.orbit_cover(block) {
                    // Keep one row per block orbit: its canonical rep.
                    if row.rep == *block {
                        rows.push(row);
                    }
                }
                return;
            }
            for z in from..engine.table.order() {
                block[depth] = z;
                combos(engine, block, depth + 1, z + 1, rows);
            }
        }
        combos(self, &mut block, 1, 1, &mut rows);
        rows
    }

    /// Validity and coverage of the whole multiplier orbit of a normalized
    /// block: every quotient must be representable at most once across the
    /// orbit's distinct translate classes (stabilizer-weighted), and covered
    /// orbits must be covered completely.
    fn orbit_cover(&self, block: &[u32]) -> Option<Row> {
        let n = self.table.order() as usize;
        let mut classes: std::collections::BTreeSet<Vec<u32>> = std::collections::BTreeSet::new();
        for theta in &self.theta {
            let image: Vec<u32> = block.iter().map(|&x| theta[x as usize]).collect();
            classes.insert(self.class_canonical(&image));
        }
        let mut total = vec![0u32; n];
        for class in &classes {
            let h = self.stabilizer_size(class);
            let mut raw = vec![0u32; n];
            for &x in class {
                for &y in class {
                    if x != y {
                        raw[self.table.mul(self.table.inv(x), y) as usize] += 1;
                    }
                }
            }
            for d in 1..n {
                if raw[d] == 0 {
                    continue;
                }
                debug_assert_eq!(raw[d] % h, 0, "pair counts are stabilizer multiples");
                let m = raw[d] / h;
                if m > 1 {
                    return None;
                }
                total[d] += m;
                if total[d] > 1 {
                    return None;
                }
            }
        }
        let mut cover = Vec::new();
        for (o, members) in self.catalog.orbits.iter().enumerate() {
            let hits = members.iter().filter(|&&d| total[d as usize] == 1).count();
            if hits == 0 {
                continue;
            }
            if hits != members.len() {
                // A multiplier-closed selection covers orbits evenly; a
                // candidate that cannot do so is unusable.
                return None;
            }
            cover.push(o as u32);
        }
        let rep = classes
            .iter()
            .next()
            .cloned()
            .unwrap_or_else(|| block.to_vec());
        Some(Row {
            rep,
            classes: classes.into_iter().collect(),
            cover,
        })
    }

    /// Least normalized translate of a block containing the identity.
    fn class_canonical(&self, block: &[u32]) -> Vec<u32> {
        let mut best: Option<Vec<u32>> = None;
        for &x in block {
            let xi = self.table.inv(x);
            let mut shifted: Vec<u32> = block.iter().map(|&y| self.table.mul(xi, y)).collect();
            shifted.sort_unstable();
            if best.as_ref().is_none_or(|b| shifted < *b) {
                best = Some(shifted);
            }
        }
        best.expect("nonempty block")
    }

    /// Size of the left stabilizer {g : gB = B}; every such g lies in B.
    fn stabilizer_size(&self, block: &[u32]) -> u32 {
        block
            .iter()
            .filter(|&&g| {
                let mut image: Vec<u32> = block.iter().map(|&y| self.table.mul(g, y)).collect();
                image.sort_unstable();
                image == block
            })
            .count() as u32
    }

    fn emit(&mut self) {
        let mut finite: Vec<Vec<u32>> = self
            .chosen
            .iter()
            .flat_map(|row| row.classes.iter().cloned())
            .collect();
        finite.sort_unstable();
        self.solutions.push(Solution {
            infinity_part: self.infinity_part.clone(),
            finite_blocks: finite,
        });
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// min(C(n, k), cap + 1) without overflow.
fn binomial_capped(n: u64, k: u64, cap: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc: u64 = 1;
    for i in 0..k.min(n - k) {
        acc = match acc.checked_mul(n - i) {
            Some(x) => x / (i + 1),
            None => return cap + 1,
        };
        if acc > cap {
            return cap + 1;
        }
    }
    acc
}
