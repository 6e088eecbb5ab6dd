//! Numerical laboratory for the Haldane model on the honeycomb structure.
//!
//! The crate covers the full chain from tight-binding geometry to topology:
//!
//! - [`lattice`]: honeycomb displacement/periodicity vectors, reciprocal
//!   basis, Brillouin-zone grids, Dirac points, finite-flake enumeration;
//! - [`model`]: the Haldane Hamiltonian `H = H_NN + H_NNN + V` both as
//!   2×2 Bloch fibers `H(k) = Σ R_j(k) σ_j` and as dense real-space
//!   matrices on finite flakes;
//! - [`frames`]: explicitly gauged Bloch functions of the lower band,
//!   spectral projectors, and parallel-transport Bloch frames with a
//!   recorded topological obstruction;
//! - [`topology`]: Berry curvature, three independent Chern-number
//!   routes (plaquette link variables, curvature quadrature, transport
//!   obstruction), Stokes loop phases, phase-diagram scans, and discrete
//!   Sobolev diagnostics;
//! - [`wannier`]: Wannier functions from Bloch frames, localization
//!   moments `Σ ⟨x⟩^{2s} |w|²`, decay fits, and the localization-dichotomy
//!   scaling scan;
//! - [`realspace`]: spectral projections on finite flakes, the Chern
//!   marker `2π/|Λ| Tr(iχ P[[X₁,P],[X₂,P]]P χ)`, and generalized-Wannier
//!   basis audits against Delone center sets;
//! - [`numerics`]: the minimal dense complex-Hermitian linear algebra the
//!   above needs (closed-form 2×2 eigensolver, Pauli decomposition,
//!   cyclic Jacobi eigensolver for flake matrices).
//!
//! Everything is deterministic: fixed evaluation orders, no environment
//! dependence, and seedable generators for randomized property checks.

pub mod error;
pub mod frames;
pub mod lattice;
pub mod model;
pub mod numerics;
pub mod realspace;
pub mod topology;
pub mod util;
pub mod wannier;

pub use error::{Error, Result};
