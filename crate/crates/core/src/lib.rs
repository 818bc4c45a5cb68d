//! Null-homotopy decisions for polygonal loops in Sierpiński-like planar sets.
//!
//! A space is the unit square with a null-sequence of ternary grid squares
//! removed. For each finite level `i` the module stack computes the loop's
//! corridor word, its reduced image in the free group on holes, cancellation
//! diagrams linking the levels, and explicit level homotopies.

pub mod grid_geometry;
pub mod homotopy_builder;
pub mod word_encoding;
pub mod decider;
pub mod free_group;
pub mod rational;
pub mod render;
pub mod sample;
pub mod trace_calculus;

pub use grid_geometry::{
    corridors, eligible_squares, level_space_contains, validate_loop, Corridor, CorridorId, DefiningSequence,
    GridSquare, LoopViolation, Orientation, Pattern, PolyLoop,
};
pub use rational::{Point, Rational};
