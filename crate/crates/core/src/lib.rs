//! Exact combinatorics of finite set systems and binary relations.
//!
//! The crate computes shatter functions, VC dimension, dual shatter and
//! independence dimension, breadth, Helly number, ladder dimension and
//! type counts on finite instances, builds the classical example families
//! (intervals, half-planes, cosets, finite-field incidences, hypercubes,
//! ultrametric balls), and fits growth exponents to measured profiles.

pub mod bits;
pub mod coding;
pub mod combinatorics;
pub mod error;
pub mod estimator;
pub mod generators;
pub mod relation;
pub mod rooted;
pub mod setsystem;
pub mod ultrametric;

pub use bits::BitSet;
pub use coding::{lift_parameter, power_delta, shelah_encode, LiftedRelation, ShelahCode};
pub use combinatorics::{sauer_shelah_bound, Budget, Counted, Exactness};
pub use error::{Error, Result};
pub use estimator::{classify_growth, fit_exponent, Growth, ShatterProfile};
pub use generators::{FamilySpec, Generated};
pub use relation::{pullback, BiRelation, BoolOp, FormulaSet};
pub use rooted::{rooted_graph_of, RootedGraph};
pub use setsystem::{PatternKind, SetSystem, TracePattern, TraceWitness};
pub use ultrametric::{Ball, UltrametricSpace};
