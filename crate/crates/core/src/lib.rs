//! Prime decomposition of spherical 3-orbifolds as combinatorial sum trees.
//!
//! * [`core2d`]: spherical types and 2-orbifold classification.
//! * [`atoms`]: summands as shadows of their singular sets.
//! * [`sumtree`]: realization trees, trivial-sum contraction and slides.
//! * [`splitproc`]: the three-phase splitting process.
//! * [`nu`]: the order-independent count of cyclic sums.

pub mod atoms;
pub mod cli;
pub mod core2d;
pub mod enumerate;
pub mod nu;
pub mod scenarios;
pub mod splitproc;
pub mod sumtree;
pub mod text;
pub mod verify;
