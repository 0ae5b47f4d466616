//! Exact decision procedures for generalized compactness of subsets of the
//! real line.
//!
//! A [`RealSet`] is a finite union of intervals, points, and convergent
//! schema families with Möbius endpoints. On this class the crate decides
//! whether a set is GCC (it cannot be split into infinitely many disjoint
//! nonempty open pieces) and CCC (a continuous image of compact × connected),
//! emits witnesses for both verdicts, and builds an explicit continuous
//! surjection from (Cantor set) × ℝ onto every GCC set.

pub mod decomp;
pub mod dsl;
pub mod error;
pub mod fuzz;
pub mod gcc;
pub mod interval;
pub mod maps;
pub mod mobius;
pub mod ops;
pub mod par;
pub mod planar;
pub mod rational;
pub mod realset;
pub mod report;
pub mod surjection;

pub use error::{Error, Result};
pub use interval::{Interval, IntervalUnion};
pub use mobius::{MobiusSeq, Side};
pub use ops::{closure, complement_in, difference, interior, intersect, normalize, semantic_eq, semantic_subset, union};
pub use rational::{Ext, Rational};
pub use realset::{ComponentList, Predicates, RealSet, SchemaAtom, SchemaKind};
