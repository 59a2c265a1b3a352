//! Finite groups given as cyclic groups, direct products and semidirect
//! products with explicit automorphism actions.
//!
//! A [`GroupSpec`] is a symbolic description; [`build_group`] realizes it as a
//! dense multiplication table ([`GroupTable`]). Elements are identified with
//! indices through a mixed-radix encoding of their coordinate tuples, most
//! significant coordinate first, so the identity is always index 0.

mod element;
mod grammar;

pub use element::{format_element, format_point, parse_element, parse_point};
pub use grammar::{format_group_spec, parse_group_spec};

use thiserror::Error;

/// Default cap on the order of a realizable group table.
pub const DEFAULT_ORDER_CAP: u64 = 100_000;

/// Symbolic description of a finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    /// Z_n, integers modulo `n` under addition.
    Cyclic(u32),
    /// Direct product; coordinates of the left factor are more significant.
    DirectProduct(Box<GroupSpec>, Box<GroupSpec>),
    /// Semidirect product N ⋊ Z_m where the action of the generator of Z_m
    /// on N is given by the images of N's canonical generators.
    Semidirect {
        normal: Box<GroupSpec>,
        acting_order: u32,
        /// One image per canonical generator of `normal`, as a coordinate
        /// tuple of `normal`.
        action: Vec<Vec<u32>>,
    },
}

impl GroupSpec {
    /// Coordinate radices of the element tuples, most significant first.
    pub fn radices(&self) -> Vec<u32> {
        match self {
            GroupSpec::Cyclic(n) => vec![*n],
            GroupSpec::DirectProduct(l, r) => {
                let mut v = l.radices();
                v.extend(r.radices());
                v
            }
            GroupSpec::Semidirect {
                normal,
                acting_order,
                ..
            } => {
                let mut v = normal.radices();
                v.push(*acting_order);
                v
            }
        }
    }

    /// Group order (product of radices), or None on overflow.
    pub fn order(&self) -> Option<u64> {
        self.radices()
            .iter()
            .try_fold(1u64, |acc, &r| acc.checked_mul(r as u64))
    }

    /// Positions of the canonical generators: one unit tuple per coordinate
    /// with radix > 1.
    fn generator_coords(&self) -> Vec<usize> {
        self.radices()
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > 1)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("cyclic order must be positive")]
    ZeroOrder,
    #[error("group order exceeds cap of {cap}")]
    OrderOverflow { cap: u64 },
    #[error("invalid semidirect action: {reason}")]
    InvalidAction { reason: String },
    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: u64, order: u64 },
    #[error("bad digit {digit} at coordinate {position}: radix is {radix}")]
    BadDigit {
        position: usize,
        digit: u32,
        radix: u32,
    },
    #[error("bad token length: expected {expected} coordinates, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("the point \u{221e} is not allowed in a plain group context")]
    InfinityNotAllowed,
    #[error("group spec syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

/// A finite group realized as dense multiplication and inverse tables.
///
/// Immutable after construction; all reads are safe to share across threads.
#[derive(Debug, Clone)]
pub struct GroupTable {
    order: u32,
    radices: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl GroupTable {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn radices(&self) -> &[u32] {
        &self.radices
    }

    /// The identity element; coordinate tuple all zero, hence index 0.
    pub fn identity(&self) -> u32 {
        0
    }

    /// Product of two elements by table lookup.
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order as usize + b as usize]
    }

    /// Inverse of an element by table lookup.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    fn check(&self, a: u32) -> Result<u32, GroupError> {
        if a < self.order {
            Ok(a)
        } else {
            Err(GroupError::IndexOutOfRange {
                index: a as u64,
                order: self.order as u64,
            })
        }
    }

    /// Checked multiplication.
    pub fn try_mul(&self, a: u32, b: u32) -> Result<u32, GroupError> {
        Ok(self.mul(self.check(a)?, self.check(b)?))
    }

    /// Checked inverse.
    pub fn try_inv(&self, a: u32) -> Result<u32, GroupError> {
        Ok(self.inv(self.check(a)?))
    }

    /// Decode an element index into its coordinate tuple.
    pub fn coords(&self, mut index: u32) -> Vec<u32> {
        let mut out = vec![0u32; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(self.radices.iter()).rev() {
            *slot = index % r;
            index /= r;
        }
        out
    }

    /// Encode a coordinate tuple as an element index.
    pub fn index_of(&self, coords: &[u32]) -> Result<u32, GroupError> {
        if coords.len() != self.radices.len() {
            return Err(GroupError::BadLength {
                expected: self.radices.len(),
                got: coords.len(),
            });
        }
        let mut idx = 0u64;
        for (pos, (&c, &r)) in coords.iter().zip(self.radices.iter()).enumerate() {
            if c >= r {
                return Err(GroupError::BadDigit {
                    position: pos,
                    digit: c,
                    radix: r,
                });
            }
            idx = idx * r as u64 + c as u64;
        }
        Ok(idx as u32)
    }

    /// Order of an element (smallest positive power equal to the identity).
    pub fn element_order(&self, a: u32) -> u32 {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }
}

/// Product/inverse expression over element indices.
#[derive(Debug, Clone)]
pub enum Expr {
    Elem(u32),
    Mul(Box<Expr>, Box<Expr>),
    Inv(Box<Expr>),
}

/// Evaluate a product/inverse expression against a table.
pub fn evaluate(table: &GroupTable, expr: &Expr) -> Result<u32, GroupError> {
    match expr {
        Expr::Elem(a) => table.check(*a),
        Expr::Mul(l, r) => {
            let a = evaluate(table, l)?;
            let b = evaluate(table, r)?;
            Ok(table.mul(a, b))
        }
        Expr::Inv(e) => Ok(table.inv(evaluate(table, e)?)),
    }
}

/// One finding per semidirect node of the spec tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemidirectCheck {
    /// Path of the node inside the spec ("", ".left", ".normal", ...).
    pub path: String,
    pub acting_order: u32,
    pub action_is_automorphism: bool,
    /// Order of the action map, when it is an automorphism.
    pub action_order: Option<u32>,
    /// Whether action^acting_order is the identity map.
    pub power_is_identity: bool,
}

/// Outcome of [`validate_spec`]; carries failures instead of erroring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub order: Option<u64>,
    pub checks: Vec<SemidirectCheck>,
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
            && self
                .checks
                .iter()
                .all(|c| c.action_is_automorphism && c.power_is_identity)
    }
}

/// Realize a group spec as a table, enforcing the default order cap.
pub fn build_group(spec: &GroupSpec) -> Result<GroupTable, GroupError> {
    build_group_capped(spec, DEFAULT_ORDER_CAP)
}

/// Realize a group spec as a table with an explicit order cap.
pub fn build_group_capped(spec: &GroupSpec, cap: u64) -> Result<GroupTable, GroupError> {
    let order = spec.order().ok_or(GroupError::OrderOverflow { cap })?;
    if order == 0 {
        return Err(GroupError::ZeroOrder);
    }
    if order > cap {
        return Err(GroupError::OrderOverflow { cap });
    }
    let table = realize(spec)?;
    debug_assert_eq!(table.order as u64, order);
    Ok(table)
}

fn realize(spec: &GroupSpec) -> Result<GroupTable, GroupError> {
    match spec {
        GroupSpec::Cyclic(n) => {
            if *n == 0 {
                return Err(GroupError::ZeroOrder);
            }
            let n = *n;
            let mut mul = vec![0u32; (n as usize) * (n as usize)];
            for a in 0..n {
                for b in 0..n {
                    mul[(a as usize) * (n as usize) + b as usize] = (a + b) % n;
                }
            }
            let inv = (0..n).map(|a| (n - a) % n).collect();
            Ok(GroupTable {
                order: n,
                radices: vec![n],
                mul,
                inv,
            })
        }
        GroupSpec::DirectProduct(l, r) => {
            let lt = realize(l)?;
            let rt = realize(r)?;
            let (ln, rn) = (lt.order as usize, rt.order as usize);
            let n = ln * rn;
            let mut mul = vec![0u32; n * n];
            for a in 0..n {
                let (al, ar) = ((a / rn) as u32, (a % rn) as u32);
                for b in 0..n {
                    let (bl, br) = ((b / rn) as u32, (b % rn) as u32);
                    mul[a * n + b] = lt.mul(al, bl) * rn as u32 + rt.mul(ar, br);
                }
            }
            let mut inv = vec![0u32; n];
            for (a, slot) in inv.iter_mut().enumerate() {
                let (al, ar) = ((a / rn) as u32, (a % rn) as u32);
                *slot = lt.inv(al) * rn as u32 + rt.inv(ar);
            }
            let mut radices = lt.radices;
            radices.extend(rt.radices);
            Ok(GroupTable {
                order: n as u32,
                radices,
                mul,
                inv,
            })
        }
        GroupSpec::Semidirect {
            normal,
            acting_order,
            action,
        } => {
            if *acting_order == 0 {
                return Err(GroupError::ZeroOrder);
            }
            let nt = realize(normal)?;
            let phi = action_map(normal, &nt, action)?;
            let m = *acting_order;
            // phi^m must be the identity for the product to be a group.
            let powers = action_powers(&nt, &phi, m)?;
            let nn = nt.order as usize;
            let n = nn * m as usize;
            let mut mul = vec![0u32; n * n];
            for x in 0..nn {
                for a in 0..m {
                    let row = (x * m as usize + a as usize) * n;
                    let phi_a = &powers[a as usize];
                    for y in 0..nn {
                        let xy = nt.mul(x as u32, phi_a[y]) as usize;
                        for b in 0..m {
                            mul[row + y * m as usize + b as usize] =
                                (xy * m as usize) as u32 + (a + b) % m;
                        }
                    }
                }
            }
            let mut inv = vec![0u32; n];
            for x in 0..nn {
                for a in 0..m {
                    // (x, a)^-1 = (phi^(m-a)(x^-1), m-a)
                    let ai = (m - a) % m;
                    let xi = powers[ai as usize][nt.inv(x as u32) as usize];
                    inv[x * m as usize + a as usize] = xi * m + ai;
                }
            }
            let mut radices = nt.radices;
            radices.push(m);
            Ok(GroupTable {
                order: n as u32,
                radices,
                mul,
                inv,
            })
        }
    }
}

/// Realize an automorphism of a group from the images of its canonical
/// generators, verifying bijectivity and the homomorphism law by exhaustion.
pub fn automorphism_from_images(
    spec: &GroupSpec,
    table: &GroupTable,
    images: &[Vec<u32>],
) -> Result<Vec<u32>, GroupError> {
    action_map(spec, table, images)
}

/// Extend generator images to a map on all of `normal`, and verify it is an
/// automorphism.
fn action_map(
    normal: &GroupSpec,
    nt: &GroupTable,
    action: &[Vec<u32>],
) -> Result<Vec<u32>, GroupError> {
    let gens = generator_indices(normal, nt);
    if action.len() != gens.len() {
        return Err(GroupError::InvalidAction {
            reason: format!(
                "expected {} generator images, got {}",
                gens.len(),
                action.len()
            ),
        });
    }
    let mut images = Vec::with_capacity(gens.len());
    for tuple in action {
        let idx = nt.index_of(tuple).map_err(|e| GroupError::InvalidAction {
            reason: format!("image tuple out of range: {e}"),
        })?;
        images.push(idx);
    }
    let phi =
        extend_generator_map(nt, &gens, &images).ok_or_else(|| GroupError::InvalidAction {
            reason: "generator images do not extend to a homomorphism".into(),
        })?;
    if !is_automorphism(nt, &phi) {
        return Err(GroupError::InvalidAction {
            reason: "action is not an automorphism of the normal subgroup".into(),
        });
    }
    Ok(phi)
}

/// Powers of phi through phi^(m-1); errors unless phi^m = id.
fn action_powers(nt: &GroupTable, phi: &[u32], m: u32) -> Result<Vec<Vec<u32>>, GroupError> {
    let n = nt.order as usize;
    let mut powers = Vec::with_capacity(m as usize);
    powers.push((0..n as u32).collect::<Vec<_>>());
    for _ in 1..m {
        let prev = powers.last().unwrap();
        powers.push((0..n).map(|x| phi[prev[x] as usize]).collect());
    }
    let last: Vec<u32> = (0..n)
        .map(|x| phi[powers[m as usize - 1][x] as usize])
        .collect();
    if last.iter().enumerate().any(|(i, &y)| i as u32 != y) {
        return Err(GroupError::InvalidAction {
            reason: format!("action^{m} is not the identity automorphism"),
        });
    }
    Ok(powers)
}

/// Indices of the canonical generators (unit coordinate tuples).
fn generator_indices(spec: &GroupSpec, table: &GroupTable) -> Vec<u32> {
    let radices = table.radices();
    spec.generator_coords()
        .into_iter()
        .map(|pos| {
            let mut coords = vec![0u32; radices.len()];
            coords[pos] = 1;
            table.index_of(&coords).expect("unit tuple in range")
        })
        .collect()
}

/// Extend images of generators to the whole group via generator words.
/// Returns None if the group is not covered (cannot happen for canonical
/// generators) or if an inconsistency shows up.
fn extend_generator_map(table: &GroupTable, gens: &[u32], images: &[u32]) -> Option<Vec<u32>> {
    let n = table.order as usize;
    let mut map = vec![u32::MAX; n];
    map[0] = 0;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(0u32);
    while let Some(w) = queue.pop_front() {
        for (g, &img) in gens.iter().zip(images.iter()) {
            let z = table.mul(w, *g);
            let fz = table.mul(map[w as usize], img);
            if map[z as usize] == u32::MAX {
                map[z as usize] = fz;
                queue.push_back(z);
            } else if map[z as usize] != fz {
                return None;
            }
        }
    }
    if map.contains(&u32::MAX) {
        return None;
    }
    Some(map)
}

/// Exhaustive bijectivity + homomorphism check.
fn is_automorphism(table: &GroupTable, phi: &[u32]) -> bool {
    let n = table.order as usize;
    let mut seen = vec![false; n];
    for &y in phi {
        if y as usize >= n || seen[y as usize] {
            return false;
        }
        seen[y as usize] = true;
    }
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            if phi[table.mul(a, b) as usize] != table.mul(phi[a as usize], phi[b as usize]) {
                return false;
            }
        }
    }
    true
}

/// Order of a permutation-like map under composition.
fn map_order(phi: &[u32]) -> u32 {
    let n = phi.len();
    let mut cur: Vec<u32> = phi.to_vec();
    let mut ord = 1;
    while cur.iter().enumerate().any(|(i, &y)| i as u32 != y) {
        cur = (0..n).map(|x| phi[cur[x] as usize]).collect();
        ord += 1;
    }
    ord
}

/// Validate a spec without building the full product table. Reports, per
/// semidirect node, whether the action extends to an automorphism, the order
/// of that automorphism, and whether its `acting_order`-th power is the
/// identity.
pub fn validate_spec(spec: &GroupSpec) -> ValidationReport {
    let mut report = ValidationReport {
        order: spec.order(),
        checks: vec![],
        problems: vec![],
    };
    walk_validate(spec, String::new(), &mut report);
    report
}

fn walk_validate(spec: &GroupSpec, path: String, report: &mut ValidationReport) {
    match spec {
        GroupSpec::Cyclic(n) => {
            if *n == 0 {
                report
                    .problems
                    .push(format!("{path}: cyclic order must be positive"));
            }
        }
        GroupSpec::DirectProduct(l, r) => {
            walk_validate(l, format!("{path}.left"), report);
            walk_validate(r, format!("{path}.right"), report);
        }
        GroupSpec::Semidirect {
            normal,
            acting_order,
            action,
        } => {
            walk_validate(normal, format!("{path}.normal"), report);
            if *acting_order == 0 {
                report
                    .problems
                    .push(format!("{path}: acting order must be positive"));
                return;
            }
            let nt = match realize(normal) {
                Ok(t) => t,
                Err(e) => {
                    report
                        .problems
                        .push(format!("{path}: cannot realize normal subgroup: {e}"));
                    return;
                }
            };
            let check = match action_map(normal, &nt, action) {
                Ok(phi) => {
                    let ord = map_order(&phi);
                    SemidirectCheck {
                        path: path.clone(),
                        acting_order: *acting_order,
                        action_is_automorphism: true,
                        action_order: Some(ord),
                        power_is_identity: ord != 0 && acting_order % ord == 0,
                    }
                }
                Err(e) => {
                    report.problems.push(format!("{path}: {e}"));
                    SemidirectCheck {
                        path: path.clone(),
                        acting_order: *acting_order,
                        action_is_automorphism: false,
                        action_order: None,
                        power_is_identity: false,
                    }
                }
            };
            report.checks.push(check);
        }
    }
}

/// A group together with the extra fixed point ∞, used by 1-rotational
/// constructions. Points 0..order are group elements; `infinity()` is the
/// extra index `order`.
#[derive(Debug, Clone)]
pub struct PointedDomain {
    base: GroupTable,
}

impl PointedDomain {
    pub fn new(base: GroupTable) -> Self {
        PointedDomain { base }
    }

    pub fn base(&self) -> &GroupTable {
        &self.base
    }

    pub fn infinity(&self) -> u32 {
        self.base.order()
    }

    /// Number of points (group order + 1).
    pub fn point_count(&self) -> u32 {
        self.base.order() + 1
    }

    /// Left action of a group element on a point; fixes ∞.
    #[inline]
    pub fn act(&self, g: u32, p: u32) -> u32 {
        if p == self.infinity() {
            p
        } else {
            self.base.mul(g, p)
        }
    }
}
