//! Exact computations with trivalent diagrams on a Wilson circle: relations,
//! canonical bases, su(N) weight systems, knot polynomials, and the
//! factorization of their logarithms into primitive invariants.

pub mod basis;
pub mod changes;
pub mod diagram;
pub mod factorization;
pub mod knots;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod relations;
pub mod series;
pub mod sum;
pub mod weights;

pub use diagram::{Diagram, DiagramBuilder, SignedDiagram};
pub use rational::Q;
pub use sum::DiagramSum;
