//! Length spectra of cocompact triangle-group orbifolds.
//!
//! Closed geodesics of the orbifold `X_{p,q,r}` correspond to hyperbolic
//! conjugacy classes of the triangle group `G_{p,q,r}`. Those classes are
//! coded by admissible words in the letters `a` and `b`. This crate
//! enumerates the admissible words up to a combinatorial length bound that
//! is derived from a geometric length bound through the stopping constant `c`.
//!
//! Module layout, bottom up:
//!
//! * [`hyperbolic_core`]: matrices, the fundamental triangle, distances and
//!   the trigonometric formula pack.
//! * [`tiling`]: the vertex/edge graph, spectacle intervals and the
//!   geometric coder.
//! * [`words`]: syllable words, admissibility, enumeration, zigzags and
//!   combinatorial length.
//! * [`spectrum`]: the stopping constant and the spectrum pipeline.
//! * [`oracle`]: brute-force ball enumeration used as ground truth.
//! * [`constants`]: on-disk cache of the numerically derived limiting words.
//! * [`cli`]: the `trispec` command line, including SVG rendering.

pub mod cli;
pub mod constants;
pub mod hyperbolic_core;
pub mod oracle;
pub mod spectrum;
pub mod tiling;
pub mod words;

pub use hyperbolic_core::{GroupData, Isometry, Triplet};
