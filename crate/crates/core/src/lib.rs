//! Good lattice points `(x/p, {ax/p})` for generators `a` drawn from
//! multiplicative cosets modulo a prime.
//!
//! The crate computes continued-fraction statistics of `a/p`, the exact
//! two-dimensional discrepancy `D_p(a)`, Dirichlet character sums over dyadic
//! rectangle families, and the counting quantities that link small partial
//! quotients to solutions of `ax ≡ y (mod p)` with `x|y|` small.

pub mod characters;
pub mod cli;
pub mod contfrac;
pub mod error;
pub mod lattice;
pub mod modmath;
pub mod oracle;
pub mod report;
pub mod theorems;

pub use characters::{build_pi, Character, CharacterGroup, RectangleFamily};
pub use contfrac::{expand, ContinuedFraction};
pub use error::{Error, Result};
pub use lattice::{discrepancy_exact, BoxMode, DiscrepancyReport, LatticePointSet};
pub use modmath::{is_prime, PrimeContext, SubgroupCoset};
pub use theorems::TheoremReport;
