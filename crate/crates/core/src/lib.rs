//! Outliers of Hermitian random matrices with a finite-rank external source.
//!
//! The ensemble is `P(M) ~ exp(-n Tr(V(M) - A M))` on `n x n` Hermitian matrices,
//! with `V` an even-degree polynomial whose equilibrium measure is supported on
//! one interval and `A = diag(a, .., a, 0, .., 0)` of rank `r`. The crate
//! computes the effective potentials that decide whether `r` eigenvalues
//! separate from the bulk, the limiting local kernels in both regimes, an exact
//! finite-`n` kernel in arbitrary precision, and Monte Carlo estimates for the
//! Gaussian case.

pub mod cli;
pub mod equilibrium;
pub mod finite_n_oracle;
pub mod error;
pub mod gue_kernel;
pub mod landscape;
pub mod montecarlo;
pub mod potential;
pub mod prediction;
pub mod quadrature;

pub use equilibrium::{equilibrium, Band, EquilibriumMeasure};
pub use finite_n_oracle::{Gauge, OracleConfig, OracleKernel};
pub use error::{Error, Result};
pub use gue_kernel::GueKernelContext;
pub use landscape::{classify, Landscape, Regime};
pub use potential::{Domain, Potential};
