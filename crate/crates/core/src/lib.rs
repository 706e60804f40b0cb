//! Inverse semigroups of doubly pointed pattern classes for block
//! substitution tilings of the plane, their idempotent filters and
//! characters, the groupoid of germs of their action on punctured windows,
//! and the translation groupoid those germs are isomorphic to.
//!
//! Everything is exact: tiles are labeled unit lattice cells, tilings are
//! handled through finite windows with an explicit truthful radius, and every
//! algebraic identity is checked as a finite, decidable statement.

pub mod filters;
pub mod geometry;
pub mod groupoid;
pub mod report;
pub mod semigroup;
pub mod substitution;
pub mod suites;
pub mod svg;

pub use geometry::{window_distance, Alphabet, GeometryError, Label, Patch, Tile, Vec2, Window};
pub use substitution::{detect_period, SubstitutionSystem, SystemError};
