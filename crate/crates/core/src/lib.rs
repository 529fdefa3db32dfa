//! Numerical toolkit for log-Sobolev deficits and their stability bounds.
//!
//! Computes entropy, Fisher information, the LSI deficit δ = I/2 - H, the
//! Carlen deficit on L²(dm), 1-D optimal transport (Wasserstein distances,
//! Brenier maps, Talagrand deficit), the probability metrics that compare
//! them (total variation, Hellinger, Kolmogorov, Lévy, Prokhorov), the
//! Fourier–Wiener transform, and the convolution/Cramér machinery — over a
//! catalog of density families relative to the standard Gaussian measure.
//! The [`verify`] module turns every checkable inequality into a named record
//! with a margin and a refinement-based error bound.

pub mod catalog;
pub mod closed_forms;
pub mod cramer;
pub mod densities;
pub mod error;
pub mod fourier;
pub mod functionals;
pub mod grid;
pub mod metrics;
pub mod transport;
pub mod verify;

pub use densities::{FamilySpec, ProductDensity, RelativeDensity};
pub use error::{Error, Result};
pub use fourier::DmFunction;
pub use functionals::FunctionalReport;
pub use grid::{build_grid, differentiate, integrate, GaussianGrid, Reference};
pub use metrics::DiscreteMeasure;
pub use transport::{CdfGrid, CdfRep, TransportMap};
pub use verify::{InequalityRecord, Status, SuiteConfig, SuiteOutput, SweepFamily, SweepReport};
