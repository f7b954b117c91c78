//! Real-space renormalization of the half-filled Hubbard model on the
//! triangular lattice, with occupation-space entanglement observables and
//! finite-size-scaling collapse.
//!
//! The pipeline is:
//!
//! * [`lattice`]: the 7-site hexagonal block and how blocks connect.
//! * [`ed`]: bit-encoded sector bases, sparse Hamiltonians, dense and Lanczos
//!   ground-state solvers, the charge gap.
//! * [`rg`]: one blocking step (four kept states become one effective site)
//!   and the flow `u -> u'` with its unstable fixed point.
//! * [`entanglement`]: site occupation distributions, entropies, and the
//!   descent chain back to bare sites.
//! * [`scaling`]: curve building over `u` grids, collapse quality, and a
//!   Nelder-Mead fit of `(u_c, nu, y_E)`.

pub mod ed;
pub mod entanglement;
pub mod lattice;
pub mod rg;
pub mod scaling;

mod error;

pub use error::{Error, Result};
