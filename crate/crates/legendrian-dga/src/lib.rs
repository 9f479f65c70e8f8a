//! Combinatorial DGA invariants of Legendrian knots in contact circle bundles.
//!
//! A knot diagram here is a decorated immersed circle on a closed oriented
//! surface: a signed Gauss code giving the rotation system, a `+` quadrant
//! decoration at each double point, and an integer defect per complementary
//! region. From that data the crate computes the filtered differential graded
//! algebra over Z/2 generated by the Reeb chords of the knot (double-point
//! chords `a`, `b` with fiber winding, and edge-point chords `c`, `d`),
//! its fractional grading, the truncated differential, the low-energy
//! characteristic algebra, and the chain maps associated to diagram moves.

pub mod algebra;
pub mod charalg;
pub mod cli;
pub mod diagram;
pub mod differential;
pub mod disks;
pub mod fixtures;
pub mod grading;
pub mod moves;
pub mod realizability;

pub use algebra::{Element, GenKind, Letter, Monomial, TameIso};
pub use diagram::{Diagram, DiagramError};

/// Exact rational scalar used for gradings and feasibility certificates.
pub type Rat = num_rational::Rational64;
