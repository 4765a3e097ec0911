//! Dynamic symbolic execution with interpolation-based pruning.
//!
//! A program in the small language of [`lang`] is explored path by path.
//! Each completed subtree leaves behind an interpolant that later states at
//! the same program point may reuse to skip their whole subtree.

pub mod engine;
pub mod interp;
pub mod lang;
pub mod solver;
