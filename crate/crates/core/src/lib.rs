//! Workbench for Steiner systems S(2,k,v) built from difference families over
//! finite groups.
//!
//! The crate is organized around four pieces:
//!
//! - [`group`]: finite groups described symbolically (cyclic, direct and
//!   semidirect products) and realized as dense multiplication tables, plus
//!   the one-point ∞ extension used by 1-rotational constructions.
//! - [`design`]: difference families, their development into block designs by
//!   left translation, exact Steiner verification, and the family/design file
//!   formats.
//! - [`analysis`]: isomorphism invariants, canonical certificates via
//!   individualization-refinement, isomorphism testing and automorphism group
//!   computation.
//! - [`search`]: backtracking search for (v,k,1) difference families and
//!   1-rotational difference families, with optional prescribed multiplier
//!   automorphisms.
//!
//! ```
//! use steiner_core::design::{develop, parse_family_file, verify_steiner};
//!
//! let family = parse_family_file(
//!     "construction = plain\n\
//!      group = Z(7)\n\
//!      block = 0 1 3\n",
//! )?;
//! let dev = develop(&family)?;
//! assert_eq!(dev.design.block_count(), 7);
//! assert!(verify_steiner(&dev.design, 1)?.is_steiner);
//! # Ok::<(), steiner_core::design::DesignError>(())
//! ```

pub mod analysis;
pub mod design;
pub mod group;
pub mod rng;
pub mod search;
