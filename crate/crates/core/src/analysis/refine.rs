//! Ordered partitions and equitable refinement over the point/block
//! incidence structure.
//!
//! Cells are ranges of an index array. Splitting reorders members inside the
//! range and adds boundaries, so cell start positions are stable. All split
//! keys are label-invariant quantities (incidence counts, census values), and
//! subcells are ordered by ascending key, which makes both the refined
//! partition and the emitted trace hash invariant under relabeling.

/// An ordered partition of 0..n.
#[derive(Debug, Clone)]
pub(crate) struct Partition {
    /// position -> vertex
    lab: Vec<u32>,
    /// vertex -> position
    pos: Vec<u32>,
    /// position -> start position of the containing cell
    cell_start: Vec<u32>,
    /// cell length, valid at start positions
    cell_len: Vec<u32>,
}

impl Partition {
    pub fn unit(n: usize) -> Partition {
        Partition {
            lab: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
            cell_start: vec![0; n],
            cell_len: {
                let mut l = vec![0; n];
                if n > 0 {
                    l[0] = n as u32;
                }
                l
            },
        }
    }

    #[cfg(test)]
    pub fn vertex_at(&self, position: u32) -> u32 {
        self.lab[position as usize]
    }

    #[inline]
    pub fn position_of(&self, vertex: u32) -> u32 {
        self.pos[vertex as usize]
    }

    #[inline]
    pub fn cell_of(&self, vertex: u32) -> u32 {
        self.cell_start[self.pos[vertex as usize] as usize]
    }

    pub fn cell_members(&self, start: u32) -> &[u32] {
        let len = self.cell_len[start as usize] as usize;
        &self.lab[start as usize..start as usize + len]
    }

    pub fn cell_len_at(&self, start: u32) -> u32 {
        self.cell_len[start as usize]
    }

    /// Iterate cells as (start, len).
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let mut at = 0u32;
        std::iter::from_fn(move || {
            if (at as usize) < self.lab.len() {
                let len = self.cell_len[at as usize];
                let out = (at, len);
                at += len;
                Some(out)
            } else {
                None
            }
        })
    }

    pub fn is_discrete(&self) -> bool {
        self.cells().all(|(_, len)| len == 1)
    }

    /// First cell of minimal size >= 2, as (start, len).
    pub fn target_cell(&self) -> Option<(u32, u32)> {
        self.cells()
            .filter(|&(_, len)| len >= 2)
            .min_by_key(|&(start, len)| (len, start))
    }

    /// Split the cell at `start` by a key per member. Members are regrouped
    /// by ascending key; returns the new (start, len, key) triples (one entry
    /// means no split happened). `scratch` avoids reallocation.
    pub fn split_by_key<K: Ord + Copy>(
        &mut self,
        start: u32,
        key: impl Fn(u32) -> K,
        scratch: &mut Vec<(K, u32)>,
    ) -> Vec<(u32, u32, K)> {
        let len = self.cell_len[start as usize];
        scratch.clear();
        scratch.extend(self.cell_members(start).iter().map(|&v| (key(v), v)));
        scratch.sort_unstable_by_key(|&(k, _)| k);
        let mut out = Vec::new();
        let mut run_start = start;
        let mut run_key = scratch[0].0;
        for (offset, &(k, v)) in scratch.iter().enumerate() {
            let position = start + offset as u32;
            self.lab[position as usize] = v;
            self.pos[v as usize] = position;
            if k != run_key {
                out.push((run_start, position - run_start, run_key));
                run_start = position;
                run_key = k;
            }
        }
        out.push((run_start, start + len - run_start, run_key));
        for &(s, l, _) in &out {
            for p in s..s + l {
                self.cell_start[p as usize] = s;
            }
            self.cell_len[s as usize] = l;
        }
        out
    }

    /// Move `vertex` to the front of its cell and make it a singleton cell.
    /// Returns (singleton start, remainder start) — equal if the cell was
    /// already a singleton.
    pub fn individualize(&mut self, vertex: u32) -> (u32, u32) {
        let position = self.pos[vertex as usize];
        let start = self.cell_start[position as usize];
        let len = self.cell_len[start as usize];
        if len == 1 {
            return (start, start);
        }
        let other = self.lab[start as usize];
        self.lab[start as usize] = vertex;
        self.lab[position as usize] = other;
        self.pos[vertex as usize] = start;
        self.pos[other as usize] = position;
        self.cell_len[start as usize] = 1;
        let rest = start + 1;
        self.cell_len[rest as usize] = len - 1;
        for p in rest..start + len {
            self.cell_start[p as usize] = rest;
        }
        (start, rest)
    }
}

/// FNV-1a accumulator for refinement traces.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TraceHash(pub u64);

impl TraceHash {
    pub fn new() -> TraceHash {
        TraceHash(0xcbf29ce484222325)
    }

    #[inline]
    pub fn fold(&mut self, value: u64) {
        let mut h = self.0;
        for byte in value.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        self.0 = h;
    }
}
