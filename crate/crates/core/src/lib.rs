//! Linear bond-based peridynamics on uniform rectangular lattices.
//!
//! Internal forces are evaluated two ways:
//!
//! * a meshfree reference that sums over every bond of every node
//!   ([`reference`]), and
//! * a structured fast path ([`convolution`] + [`corrections`]) that treats the
//!   stiffness operator as a Toeplitz-block-Toeplitz matrix `Â` generated by a
//!   small kernel tensor, applies it with zero-padded FFTs in `O(N log N)`, and
//!   then repairs the rows where the true stiffness `A = Â + Dᵉ + Dᶠ` departs
//!   from `Â` (incomplete horizons near the boundary and broken bonds).
//!
//! Both paths plug into the same explicit integrators ([`stepping`]), so a
//! scenario can be run with either backend and the trajectories compared.
//!
//! ```no_run
//! use pdfast::sim::{presets, run, Method};
//!
//! let mut cfg = presets::plate_tension_at(100, 50);
//! cfg.solver.method = Method::Fast;
//! cfg.solver.steps = 200;
//! let out = run(&cfg).unwrap();
//! println!("{}", out.timers);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constraints;
pub mod convolution;
pub mod corrections;
pub mod error;
pub mod fft;
pub mod field;
pub mod fracture;
pub mod geometry;
pub mod grid;
pub mod kernel;
pub mod ledger;
pub mod reference;
pub mod sim;
pub mod stepping;

pub use error::{Error, Result};
pub use field::VectorField;
pub use grid::{Axis, Grid, HorizonSpec, RegionLabels, Zone};
pub use kernel::{KernelStack, MaterialParams};
pub use ledger::BondLedger;
