//! Individualization-refinement search over a design's incidence structure.
//!
//! One backtracking tree serves two purposes: the minimal (invariant path,
//! labeled block list) leaf is the canonical form, and orbit counting along
//! the leftmost path gives the exact automorphism group order.
//!
//! Refinement alternates classic equitable refinement of the point/block
//! partitions with a pair-census splitter: after 1-WL stabilizes, point cells
//! are split by the census of quadruples through (last individualized point,
//! cell member). Plain counting refinement learns nothing inside a Steiner
//! 2-design — every point sees every block class the same number of times —
//! so this quadruple statistic is what gives the tree its discriminating
//! power.
//!
//! Automorphisms are discovered as equal labeled leaves, always re-verified
//! against the block set before use. Sibling subtrees are pruned when their
//! node invariant leaves them unable to either match the first path (needed
//! for orbit proofs) or improve the canonical candidate. Orbit counts are
//! exact: every target-cell member is either proven equivalent to an explored
//! representative by an explicit automorphism, or proven inequivalent by
//! exhausting its subtree against the first path.

use super::census::{pair_sums, per_point_sums, CensusSums, MeetsMatrix};
use super::refine::{Partition, TraceHash};
use super::space::LinearSpace;
use super::AnalysisError;
use std::collections::HashMap;

const LEAF_STORE_CAP: usize = 64;
const PAIR_CACHE_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Points,
    Blocks,
}

#[derive(Clone)]
struct NodeState {
    points: Partition,
    blocks: Partition,
    /// Individualized points, in order.
    base: Vec<u32>,
    /// Node invariant per level (root = level 0).
    inv: Vec<u64>,
    /// Cells to requeue for refinement at this node.
    pending: Vec<(Side, u32)>,
    /// Path invariants equal to the first path so far.
    on_first: bool,
    /// Running comparison against the best path prefix (pruning heuristic;
    /// leaves re-compare in full).
    vs_best: std::cmp::Ordering,
}

struct LeafRec {
    labeled: Vec<u16>,
    labeling: Vec<u32>,
    inv: Vec<u64>,
}

pub(crate) struct IrOutcome {
    pub canonical_blocks: Option<Vec<u16>>,
    pub aut_order: u128,
    pub generators: Vec<Vec<u32>>,
}

pub(crate) struct Ir<'a> {
    space: &'a LinearSpace,
    meets: &'a MeetsMatrix,
    want_canon: bool,
    node_budget: u64,
    nodes: u64,
    threads: usize,
    gens: Vec<Vec<u32>>,
    gens_seen: std::collections::HashSet<Vec<u32>>,
    gens_version: u64,
    first_inv: Vec<u64>,
    first_leaf: Option<LeafRec>,
    best_leaf: Option<LeafRec>,
    leaf_store: HashMap<Vec<u16>, Vec<u32>>,
    factors: Vec<u64>,
    pair_cache: HashMap<u32, Vec<CensusSums>>,
}

impl<'a> Ir<'a> {
    pub fn new(
        space: &'a LinearSpace,
        meets: &'a MeetsMatrix,
        want_canon: bool,
        node_budget: u64,
        threads: usize,
    ) -> Ir<'a> {
        Ir {
            space,
            meets,
            want_canon,
            node_budget,
            nodes: 0,
            threads,
            gens: Vec::new(),
            gens_seen: std::collections::HashSet::new(),
            gens_version: 0,
            first_inv: Vec::new(),
            first_leaf: None,
            best_leaf: None,
            leaf_store: HashMap::new(),
            factors: Vec::new(),
            pair_cache: HashMap::new(),
        }
    }

    /// Seed the automorphism store with verified permutations (orbit pruning
    /// only; the result does not depend on seeding).
    pub fn seed(&mut self, perms: &[Vec<u32>]) -> Result<(), AnalysisError> {
        for p in perms {
            self.add_generator(p.clone())?;
        }
        Ok(())
    }

    pub fn run(mut self) -> Result<IrOutcome, AnalysisError> {
        let v = self.space.v() as usize;
        let mut root = NodeState {
            points: Partition::unit(v),
            blocks: Partition::unit(self.space.block_count()),
            base: Vec::new(),
            inv: Vec::new(),
            pending: Vec::new(),
            on_first: true,
            vs_best: std::cmp::Ordering::Equal,
        };
        // Root coloring: exact per-point diagonal census.
        let census = per_point_sums(self.space, self.meets, self.threads);
        let mut scratch = Vec::new();
        let mut trace = TraceHash::new();
        if v > 0 {
            let parts = root.points.split_by_key(
                0,
                |p| {
                    let c = census[p as usize];
                    (c.s1, c.a, c.b)
                },
                &mut scratch,
            );
            for &(start, len, key) in &parts {
                trace.fold(start as u64);
                trace.fold(len as u64);
                trace.fold(key.0);
                trace.fold(key.1);
                trace.fold(key.2);
                root.pending.push((Side::Points, start));
            }
        }
        if self.space.block_count() > 0 {
            root.pending.push((Side::Blocks, 0));
        }
        root.inv.push(trace.0);
        self.explore(root, true)?;

        let order = self
            .factors
            .iter()
            .try_fold(1u128, |acc, &f| acc.checked_mul(f as u128))
            .ok_or_else(|| AnalysisError::Internal("automorphism order overflow".into()))?;
        Ok(IrOutcome {
            canonical_blocks: self.best_leaf.as_ref().map(|l| l.labeled.clone()),
            aut_order: order,
            generators: self.gens,
        })
    }

    /// Equitable refinement plus the pair-census splitter; extends the node
    /// invariant with this level's trace and refines until stable. The
    /// splitter is idempotent per individualized point, so one pass against
    /// the newest base point plus a final counting round reaches a fixpoint.
    fn refine_node(&mut self, node: &mut NodeState) -> u64 {
        let mut trace = TraceHash::new();
        let mut scratch: Vec<(u64, u32)> = Vec::new();
        self.refine_wl(node, &mut trace, &mut scratch);
        if !node.points.is_discrete() {
            if let Some(&s) = node.base.last() {
                if self.pair_split(node, s, &mut trace) {
                    self.refine_wl(node, &mut trace, &mut scratch);
                }
            }
        }
        // Fold the stable cell structure so nodes with equal traces also
        // agree on the final shape.
        for (start, len) in node.points.cells() {
            trace.fold(start as u64);
            trace.fold(len as u64);
        }
        for (_, len) in node.blocks.cells() {
            trace.fold(0x626c6b);
            trace.fold(len as u64);
        }
        trace.0
    }

    /// Split every point cell by the census of quadruples through (s, cell
    /// member). Returns whether anything split.
    fn pair_split(&mut self, node: &mut NodeState, s: u32, trace: &mut TraceHash) -> bool {
        let sums = self.pair_sums_cached(s);
        let mut split_any = false;
        let cells: Vec<(u32, u32)> = node.points.cells().collect();
        let mut key_scratch: Vec<((u64, u64, u64), u32)> = Vec::new();
        for (start, len) in cells {
            if len < 2 {
                continue;
            }
            let parts = node.points.split_by_key(
                start,
                |p| {
                    let c = sums[p as usize];
                    (c.s1, c.a, c.b)
                },
                &mut key_scratch,
            );
            trace.fold(0x70616972);
            trace.fold(start as u64);
            for &(s2, l2, key) in &parts {
                trace.fold(s2 as u64);
                trace.fold(l2 as u64);
                trace.fold(key.0);
                trace.fold(key.1);
                trace.fold(key.2);
            }
            if parts.len() > 1 {
                split_any = true;
                for &(s2, _, _) in &parts {
                    node.pending.push((Side::Points, s2));
                }
            }
        }
        split_any
    }

    /// Classic 1-WL: split cells of one side by incidence counts against a
    /// splitter cell of the other side, until the worklist drains.
    fn refine_wl(
        &self,
        node: &mut NodeState,
        trace: &mut TraceHash,
        scratch: &mut Vec<(u64, u32)>,
    ) {
        let v = self.space.v() as usize;
        let b = self.space.block_count();
        let mut counts_p: Vec<u64> = vec![0; v];
        let mut counts_b: Vec<u64> = vec![0; b];
        let mut queue: std::collections::BTreeSet<(u8, u32)> = node
            .pending
            .drain(..)
            .map(|(side, start)| (if side == Side::Points { 0 } else { 1 }, start))
            .collect();
        while let Some(&(side_tag, start)) = queue.iter().next() {
            queue.remove(&(side_tag, start));
            if side_tag == 0 {
                // Points splitter: count incident lines per block.
                let members: Vec<u32> = node.points.cell_members(start).to_vec();
                let mut touched: Vec<u32> = Vec::new();
                for &p in &members {
                    for &l in self.space.lines_through(p) {
                        if counts_b[l as usize] == 0 {
                            touched.push(l);
                        }
                        counts_b[l as usize] += 1;
                    }
                }
                self.split_side(
                    node,
                    Side::Blocks,
                    &counts_b,
                    &touched,
                    trace,
                    scratch,
                    &mut queue,
                );
                for &l in &touched {
                    counts_b[l as usize] = 0;
                }
            } else {
                let members: Vec<u32> = node.blocks.cell_members(start).to_vec();
                let mut touched: Vec<u32> = Vec::new();
                for &l in &members {
                    for &p in self.space.block(l) {
                        if counts_p[p as usize] == 0 {
                            touched.push(p);
                        }
                        counts_p[p as usize] += 1;
                    }
                }
                self.split_side(
                    node,
                    Side::Points,
                    &counts_p,
                    &touched,
                    trace,
                    scratch,
                    &mut queue,
                );
                for &p in &touched {
                    counts_p[p as usize] = 0;
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn split_side(
        &self,
        node: &mut NodeState,
        side: Side,
        counts: &[u64],
        touched: &[u32],
        trace: &mut TraceHash,
        scratch: &mut Vec<(u64, u32)>,
        queue: &mut std::collections::BTreeSet<(u8, u32)>,
    ) {
        let partition = match side {
            Side::Points => &mut node.points,
            Side::Blocks => &mut node.blocks,
        };
        let mut cells: Vec<u32> = touched.iter().map(|&x| partition.cell_of(x)).collect();
        cells.sort_unstable();
        cells.dedup();
        let side_tag = if side == Side::Points { 0u8 } else { 1u8 };
        for start in cells {
            if partition.cell_len_at(start) < 2 {
                continue;
            }
            let parts = partition.split_by_key(start, |x| counts[x as usize], scratch);
            if parts.len() > 1 {
                trace.fold(side_tag as u64 + 0x1000);
                trace.fold(start as u64);
                for &(s2, l2, key) in &parts {
                    trace.fold(s2 as u64);
                    trace.fold(l2 as u64);
                    trace.fold(key);
                    queue.insert((side_tag, s2));
                }
            }
        }
    }

    fn pair_sums_cached(&mut self, s: u32) -> Vec<CensusSums> {
        if let Some(hit) = self.pair_cache.get(&s) {
            return hit.clone();
        }
        let sums = pair_sums(self.space, self.meets, s);
        if self.pair_cache.len() < PAIR_CACHE_CAP {
            self.pair_cache.insert(s, sums.clone());
        }
        sums
    }

    fn explore(&mut self, mut node: NodeState, left: bool) -> Result<(), AnalysisError> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(AnalysisError::BudgetExceeded {
                budget: self.node_budget,
                kind: "individualization-refinement nodes",
            });
        }
        let h = self.refine_node(&mut node);
        node.inv.push(h);
        let level = node.inv.len() - 1;

        if self.first_leaf.is_some() {
            node.on_first =
                node.on_first && level < self.first_inv.len() && self.first_inv[level] == h;
            if node.vs_best == std::cmp::Ordering::Equal {
                let best = self.best_leaf.as_ref().expect("best exists with first");
                node.vs_best = if level >= best.inv.len() {
                    std::cmp::Ordering::Greater
                } else {
                    h.cmp(&best.inv[level])
                };
            }
            let canon_hope = self.want_canon && node.vs_best != std::cmp::Ordering::Greater;
            if !node.on_first && !canon_hope {
                return Ok(());
            }
        }

        if node.points.is_discrete() {
            self.process_leaf(node);
            return Ok(());
        }

        let (start, _len) = node
            .points
            .target_cell()
            .expect("non-discrete has a target");
        let members: Vec<u32> = node.points.cell_members(start).to_vec();
        let first_child = members[0];
        let mut reps: Vec<u32> = vec![first_child];
        let mut orbits = self.orbits_fixing(&node.base);
        let mut orbits_version = self.gens_version;
        self.explore(child_state(&node, first_child), left)?;
        for &w in &members[1..] {
            if self.gens_version != orbits_version {
                orbits = self.orbits_fixing(&node.base);
                orbits_version = self.gens_version;
            }
            let w_root = find(&mut orbits, w);
            if reps.iter().any(|&r| find(&mut orbits, r) == w_root) {
                continue;
            }
            reps.push(w);
            self.explore(child_state(&node, w), false)?;
        }
        if left {
            if self.gens_version != orbits_version {
                orbits = self.orbits_fixing(&node.base);
            }
            let first_root = find(&mut orbits, first_child);
            let factor = members
                .iter()
                .filter(|&&x| find(&mut orbits, x) == first_root)
                .count() as u64;
            self.factors.push(factor);
        }
        Ok(())
    }

    fn process_leaf(&mut self, node: NodeState) {
        let v = self.space.v() as usize;
        let labeling: Vec<u32> = (0..v as u32).map(|p| node.points.position_of(p)).collect();
        let mut blocks: Vec<Vec<u16>> = self
            .space
            .blocks()
            .iter()
            .map(|block| {
                let mut image: Vec<u16> =
                    block.iter().map(|&p| labeling[p as usize] as u16).collect();
                image.sort_unstable();
                image
            })
            .collect();
        blocks.sort_unstable();
        let labeled: Vec<u16> = blocks.into_iter().flatten().collect();

        if self.first_leaf.is_none() {
            self.first_inv = node.inv.clone();
            let rec = LeafRec {
                labeled: labeled.clone(),
                labeling: labeling.clone(),
                inv: node.inv,
            };
            self.leaf_store.insert(labeled, labeling);
            self.best_leaf = Some(LeafRec {
                labeled: rec.labeled.clone(),
                labeling: rec.labeling.clone(),
                inv: rec.inv.clone(),
            });
            self.first_leaf = Some(rec);
            return;
        }

        // A leaf equal to any stored leaf yields an automorphism.
        if let Some(other) = self.leaf_store.get(&labeled) {
            let gamma = compose_leaf_labelings(other, &labeling);
            // Ignore the error path here: a failed verification would be an
            // internal bug, and add_generator reports it loudly in tests.
            let _ = self.add_generator(gamma);
        } else if self.leaf_store.len() < LEAF_STORE_CAP {
            self.leaf_store.insert(labeled.clone(), labeling.clone());
        }

        if self.want_canon {
            let best = self.best_leaf.as_ref().expect("best exists");
            let candidate = (&node.inv, &labeled);
            let incumbent = (&best.inv, &best.labeled);
            if path_less(candidate, incumbent) {
                self.best_leaf = Some(LeafRec {
                    labeled,
                    labeling,
                    inv: node.inv,
                });
            }
        }
    }

    fn add_generator(&mut self, perm: Vec<u32>) -> Result<(), AnalysisError> {
        if perm.iter().enumerate().all(|(i, &x)| i as u32 == x) {
            return Ok(());
        }
        if self.gens_seen.contains(&perm) {
            return Ok(());
        }
        if !self.space.permutation_preserves_blocks(&perm) {
            return Err(AnalysisError::Internal(
                "discovered permutation fails block verification".into(),
            ));
        }
        self.gens_seen.insert(perm.clone());
        self.gens.push(perm);
        self.gens_version += 1;
        Ok(())
    }

    /// Union-find parents for orbits of the subgroup generated by stored
    /// generators that fix `base` pointwise.
    fn orbits_fixing(&self, base: &[u32]) -> Vec<u32> {
        let v = self.space.v() as usize;
        let mut parent: Vec<u32> = (0..v as u32).collect();
        for g in &self.gens {
            if base.iter().any(|&x| g[x as usize] != x) {
                continue;
            }
            for x in 0..v as u32 {
                union(&mut parent, x, g[x as usize]);
            }
        }
        parent
    }
}

fn child_state(node: &NodeState, w: u32) -> NodeState {
    let mut child = node.clone();
    let (single, rest) = child.points.individualize(w);
    child.base.push(w);
    child.pending.push((Side::Points, single));
    if rest != single {
        child.pending.push((Side::Points, rest));
    }
    child
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let ra = find(parent, a);
    let rb = find(parent, b);
    if ra != rb {
        parent[rb as usize] = ra;
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

/// γ = π_other⁻¹ ∘ π_this maps the design onto itself when both labelings
/// produce the same labeled block list.
fn compose_leaf_labelings(other: &[u32], this: &[u32]) -> Vec<u32> {
    let mut inv_other = vec![0u32; other.len()];
    for (x, &p) in other.iter().enumerate() {
        inv_other[p as usize] = x as u32;
    }
    this.iter().map(|&p| inv_other[p as usize]).collect()
}

/// Lexicographic order on (invariant path, labeled blocks) with shorter
/// invariant paths first.
fn path_less(a: (&Vec<u64>, &Vec<u16>), b: (&Vec<u64>, &Vec<u16>)) -> bool {
    match a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a.1 < b.1,
    }
}
