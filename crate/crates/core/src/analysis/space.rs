//! A verified Steiner design with fast pair-to-line lookup.

use super::AnalysisError;
use crate::design::{verify_steiner, Design};
use std::collections::HashSet;

pub(crate) struct LinearSpace {
    v: u32,
    k: usize,
    blocks: Vec<Vec<u32>>,
    lines_through: Vec<Vec<u32>>,
    line_of: Vec<u32>,
    block_set: HashSet<Vec<u32>>,
}

impl LinearSpace {
    /// Requires an actual Steiner design so that every pair lies on exactly
    /// one line; everything in this module leans on that.
    pub fn new(design: &Design) -> Result<LinearSpace, AnalysisError> {
        if design.v() as usize > u16::MAX as usize {
            return Err(AnalysisError::InvalidDesign(
                "more than 65535 points".into(),
            ));
        }
        let report = verify_steiner(design, 1)
            .map_err(|e| AnalysisError::InvalidDesign(format!("not a verifiable design: {e}")))?;
        if !report.is_steiner {
            return Err(AnalysisError::InvalidDesign(format!(
                "not a Steiner design: {} uncovered, {} multiply covered pairs",
                report.uncovered_pairs, report.multiply_covered_pairs
            )));
        }
        let v = design.v();
        let blocks = design.blocks().to_vec();
        let mut lines_through = vec![Vec::new(); v as usize];
        let mut line_of = vec![u32::MAX; v as usize * v as usize];
        for (li, block) in blocks.iter().enumerate() {
            for (i, &p) in block.iter().enumerate() {
                lines_through[p as usize].push(li as u32);
                for &q in &block[i + 1..] {
                    line_of[p as usize * v as usize + q as usize] = li as u32;
                    line_of[q as usize * v as usize + p as usize] = li as u32;
                }
            }
        }
        let block_set = blocks.iter().cloned().collect();
        Ok(LinearSpace {
            v,
            k: design.k() as usize,
            blocks,
            lines_through,
            line_of,
            block_set,
        })
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: u32) -> &[u32] {
        &self.blocks[i as usize]
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn lines_through(&self, p: u32) -> &[u32] {
        &self.lines_through[p as usize]
    }

    /// The unique line through two distinct points.
    #[inline]
    pub fn line_of(&self, p: u32, q: u32) -> u32 {
        self.line_of[p as usize * self.v as usize + q as usize]
    }

    /// Whether a point permutation maps every block onto a block.
    pub fn permutation_preserves_blocks(&self, perm: &[u32]) -> bool {
        if perm.len() != self.v as usize {
            return false;
        }
        let mut seen = vec![false; self.v as usize];
        for &x in perm {
            if x >= self.v || std::mem::replace(&mut seen[x as usize], true) {
                return false;
            }
        }
        let mut image = Vec::with_capacity(self.k);
        for block in &self.blocks {
            image.clear();
            image.extend(block.iter().map(|&p| perm[p as usize]));
            image.sort_unstable();
            if !self.block_set.contains(&image) {
                return false;
            }
        }
        true
    }

    /// First block whose image under `perm` is not a block, for error
    /// reporting.
    pub fn first_violated_block(&self, perm: &[u32]) -> Option<usize> {
        for (i, block) in self.blocks.iter().enumerate() {
            let mut image: Vec<u32> = block.iter().map(|&p| perm[p as usize]).collect();
            image.sort_unstable();
            if !self.block_set.contains(&image) {
                return Some(i);
            }
        }
        None
    }
}
