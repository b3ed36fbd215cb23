//! Polynomial coherence measures and their convex roofs.
//!
//! - [`state`] and [`eigen`]: pure states, density matrices, incoherent channels
//!   and a Hermitian Jacobi eigensolver.
//! - [`poly`] and [`roots`]: homogeneous-polynomial measures, the G-coherence,
//!   and zero-coherence states on superposition lines.
//! - [`symmetric`]: the permutation twirl, symmetric states and the closed-form
//!   G-coherence convex roof with its general lower bound.
//! - [`roof`]: a numerical convex-roof solver returning auditable decompositions.
//! - [`majorization`]: the majorization test for pure-state conversions.
//! - [`io`]: JSON file formats.

pub mod eigen;
pub mod error;
pub mod io;
pub mod majorization;
pub mod poly;
pub mod random;
pub mod roof;
pub mod roots;
pub mod state;
pub mod symmetric;

pub use error::{CoherenceError, Result};
pub use num_complex::Complex64;
