//! Thickness of compact sets described by their gaps, gap-lemma decisions,
//! dimension and pattern-capacity bounds, a referee for Schmidt-type games
//! and the Cantor scaffold built from a winning strategy.

pub mod bounds;
pub mod descriptor;
pub mod enclosure;
pub mod enumerate;
pub mod game;
pub mod gap_lemma;
pub mod geometry;
pub mod scaffold;
pub mod spatial;
pub mod thickness;
pub mod verify;

pub use descriptor::{Depth, SetDescriptor};
pub use enumerate::{enumerate_gaps, EnumerateOptions, GapEnumeration};
pub use thickness::{thickness, thickness_1d, thickness_rd, ThicknessReport};
