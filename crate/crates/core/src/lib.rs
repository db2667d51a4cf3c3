//! Exact computations in the type D generalised Khovanov arc algebra and the
//! matching Hecke-side presentation.

pub mod arc_algebra;
pub mod cups;
pub mod error;
pub mod hecke;
pub mod scalars;
pub mod weights;

pub use cups::{cup_diagram, Arc, ArcKind, CupDiagram};
pub use error::{Error, Result};
pub use scalars::{i_pow, GaussInt, LaurentPoly};
pub use weights::{all_weights, Label, TilePartition, Weight};
pub use arc_algebra::{circle_basis, multiply, Element, OrientedTriple, StackedDiagram};
pub use hecke::{cell_triples, kl_poly, psi, verify_relations, CellTriple, Family, FamilySelector, HeckeGen, KLPoly};
