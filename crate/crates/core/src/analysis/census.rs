//! Exact diagonal census of a linear space.
//!
//! A general-position quadruple is a 4-point set with no 3 points on a common
//! block. It has three splits into two opposite point pairs; each split's two
//! lines either meet or not, giving a type t in 0..=3 (number of meeting
//! splits). The histogram over t is a cheap isomorphism invariant.
//!
//! Enumerating all C(v,4) quadruples is wasteful. Instead we enumerate
//! (quadruple, meeting split) incidences directly: a meeting split is exactly
//! a choice of a point p, two lines L1 ≠ L2 through p, and a point pair
//! inside each of L1∖{p}, L2∖{p}. Per incidence we test how many of the
//! other two splits meet (m ∈ {0,1,2}) and accumulate
//!
//!   A  = Σ_Q t(t−1)        (m summed)
//!   B  = 3·#{Q : t = 3}    (m == 2 counted)
//!   S1 = Σ_Q t             (incidence count)
//!
//! from which n3 = B/3, n2 = A/2 − B, n1 = S1 − 2n2 − 3n3, and n0 follows
//! from the closed-form count of general-position quadruples.

use super::space::LinearSpace;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct CensusSums {
    pub s1: u64,
    pub a: u64,
    pub b: u64,
}

/// Bit matrix over block pairs: bit (i,j) set iff blocks i and j share a
/// point. Built from the line pencils through each point, so it never
/// compares point sets directly.
pub(crate) struct MeetsMatrix {
    words: Vec<u64>,
    stride: usize,
}

impl MeetsMatrix {
    pub fn build(space: &LinearSpace) -> MeetsMatrix {
        let b = space.block_count();
        let stride = b.div_ceil(64);
        let mut words = vec![0u64; stride * b];
        for p in 0..space.v() {
            let lines = space.lines_through(p);
            for (i, &li) in lines.iter().enumerate() {
                for &lj in &lines[i + 1..] {
                    words[li as usize * stride + lj as usize / 64] |= 1 << (lj % 64);
                    words[lj as usize * stride + li as usize / 64] |= 1 << (li % 64);
                }
            }
        }
        MeetsMatrix { words, stride }
    }

    #[inline]
    pub fn meets(&self, i: u32, j: u32) -> bool {
        self.words[i as usize * self.stride + j as usize / 64] >> (j % 64) & 1 != 0
    }
}

/// Upper bound on the incidence count this enumeration visits; used to
/// enforce the exact-mode work budget before committing to the scan.
pub(crate) fn exact_work_estimate(space: &LinearSpace) -> u64 {
    let k = space.k() as u64;
    let pair2 = k.saturating_sub(1) * k.saturating_sub(2) / 2;
    (0..space.v())
        .map(|p| {
            let r = space.lines_through(p).len() as u64;
            r * r.saturating_sub(1) / 2 * pair2 * pair2
        })
        .sum()
}

/// Walk every (quadruple, meeting split) incidence for points in
/// [p_lo, p_hi) of the meeting point, handing (quadruple, m) to the sink.
fn scan_range(
    space: &LinearSpace,
    meets: &MeetsMatrix,
    p_lo: u32,
    p_hi: u32,
    sink: &mut impl FnMut([u32; 4], u32),
) {
    let k = space.k();
    let mut side1: Vec<u32> = Vec::with_capacity(k - 1);
    let mut side2: Vec<u32> = Vec::with_capacity(k - 1);
    for p in p_lo..p_hi {
        let lines = space.lines_through(p);
        for (i, &l1) in lines.iter().enumerate() {
            side1.clear();
            side1.extend(space.block(l1).iter().copied().filter(|&x| x != p));
            for &l2 in &lines[i + 1..] {
                side2.clear();
                side2.extend(space.block(l2).iter().copied().filter(|&x| x != p));
                for (ai, &a) in side1.iter().enumerate() {
                    for &b in &side1[ai + 1..] {
                        for (ci, &c) in side2.iter().enumerate() {
                            for &d in &side2[ci + 1..] {
                                let m = u32::from(
                                    meets.meets(space.line_of(a, c), space.line_of(b, d)),
                                ) + u32::from(
                                    meets.meets(space.line_of(a, d), space.line_of(b, c)),
                                );
                                sink([a, b, c, d], m);
                            }
                        }
                    }
                }
            }
        }
    }
}

fn chunk_bounds(v: u32, threads: usize) -> Vec<(u32, u32)> {
    let threads = threads.clamp(1, v.max(1) as usize) as u32;
    let step = v.div_ceil(threads);
    (0..threads)
        .map(|t| (t * step, ((t + 1) * step).min(v)))
        .filter(|(lo, hi)| lo < hi)
        .collect()
}

/// Global census sums; thread count never changes the result.
pub(crate) fn global_sums(space: &LinearSpace, meets: &MeetsMatrix, threads: usize) -> CensusSums {
    let parts: Vec<CensusSums> = std::thread::scope(|s| {
        let handles: Vec<_> = chunk_bounds(space.v(), threads)
            .into_iter()
            .map(|(lo, hi)| {
                s.spawn(move || {
                    let mut sums = CensusSums::default();
                    scan_range(space, meets, lo, hi, &mut |_, m| {
                        sums.s1 += 1;
                        sums.a += m as u64;
                        sums.b += u64::from(m == 2);
                    });
                    sums
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    parts
        .iter()
        .fold(CensusSums::default(), |acc, p| CensusSums {
            s1: acc.s1 + p.s1,
            a: acc.a + p.a,
            b: acc.b + p.b,
        })
}

/// Per-point census sums restricted to quadruples through each point.
pub(crate) fn per_point_sums(
    space: &LinearSpace,
    meets: &MeetsMatrix,
    threads: usize,
) -> Vec<CensusSums> {
    let v = space.v() as usize;
    let parts: Vec<Vec<CensusSums>> = std::thread::scope(|s| {
        let handles: Vec<_> = chunk_bounds(space.v(), threads)
            .into_iter()
            .map(|(lo, hi)| {
                s.spawn(move || {
                    let mut sums = vec![CensusSums::default(); v];
                    scan_range(space, meets, lo, hi, &mut |quad, m| {
                        for x in quad {
                            let e = &mut sums[x as usize];
                            e.s1 += 1;
                            e.a += m as u64;
                            e.b += u64::from(m == 2);
                        }
                    });
                    sums
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut out = vec![CensusSums::default(); v];
    for part in parts {
        for (acc, p) in out.iter_mut().zip(part) {
            acc.s1 += p.s1;
            acc.a += p.a;
            acc.b += p.b;
        }
    }
    out
}

/// Census sums over quadruples containing the fixed point `s`, tallied per
/// second point. The relative structure of every other point with respect to
/// `s`; this is the splitter that lets refinement see beyond the pair
/// regularity of a 2-design.
pub(crate) fn pair_sums(space: &LinearSpace, meets: &MeetsMatrix, s: u32) -> Vec<CensusSums> {
    let mut out = vec![CensusSums::default(); space.v() as usize];
    let mut tally = |x: u32, m: u32| {
        let e = &mut out[x as usize];
        e.s1 += 1;
        e.a += m as u64;
        e.b += u64::from(m == 2);
    };
    let k = space.k();
    let mut side2: Vec<u32> = Vec::with_capacity(k - 1);
    // Unique decomposition of each (quadruple ∋ s, meeting split): l1 is the
    // split line whose pair contains s, p the meeting point on it.
    for &l1 in space.lines_through(s) {
        let pts1 = space.block(l1);
        for &p in pts1.iter().filter(|&&p| p != s) {
            for &partner in pts1.iter().filter(|&&x| x != s && x != p) {
                for &l2 in space.lines_through(p) {
                    if l2 == l1 {
                        continue;
                    }
                    side2.clear();
                    side2.extend(space.block(l2).iter().copied().filter(|&x| x != p));
                    for (ci, &c) in side2.iter().enumerate() {
                        for &d in &side2[ci + 1..] {
                            let m = u32::from(
                                meets.meets(space.line_of(s, c), space.line_of(partner, d)),
                            ) + u32::from(
                                meets.meets(space.line_of(s, d), space.line_of(partner, c)),
                            );
                            tally(partner, m);
                            tally(c, m);
                            tally(d, m);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Number of general-position quadruples, from the closed form
/// C(v,4) − b·C(k,3)·(v−k) − b·C(k,4): a 4-subset with a collinear triple
/// has 3 or 4 of its points on exactly one block, because two blocks of a
/// linear space share at most one point.
pub(crate) fn general_position_total(v: u64, k: u64, b: u64) -> u64 {
    let c4 = v * (v - 1) * (v - 2) * (v - 3) / 24;
    let k3 = k * (k - 1) * (k - 2) / 6;
    let k4 = if k >= 4 {
        k * (k - 1) * (k - 2) * (k - 3) / 24
    } else {
        0
    };
    c4 - b * k3 * (v - k) - b * k4
}

/// Assemble the histogram over t ∈ {0,1,2,3}.
pub(crate) fn histogram(space: &LinearSpace, sums: CensusSums) -> [u64; 4] {
    let n3 = sums.b / 3;
    let n2 = sums.a / 2 - sums.b;
    let n1 = sums.s1 - 2 * n2 - 3 * n3;
    let total = general_position_total(
        space.v() as u64,
        space.k() as u64,
        space.block_count() as u64,
    );
    let n0 = total - n1 - n2 - n3;
    [n0, n1, n2, n3]
}
