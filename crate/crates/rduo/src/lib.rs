//! Two-stage robust optimization with binary uncertain parameters.
//!
//! The crate solves problems of the form "choose a here-and-now decision,
//! then an adversary picks a binary scenario from a budgeted set, then a
//! recourse problem responds" exactly, by Benders decomposition or
//! column-and-constraint generation. Worst-case scenarios are computed
//! through a scalar Lagrangian dual whose penalty term carries all of the
//! scenario dependence into the objective, alongside classical duality- and
//! KKT-based formulations for comparison, a brute-force scenario-expansion
//! oracle for verification, and a bundled simplex/branch-and-bound engine so
//! the whole stack is self-contained.
//!
//! The long-form guide lives in `book/`; its chapters compile and run as
//! doc-tests of this crate.

pub mod apps;
pub mod context;
pub mod baselines;
pub mod ext;
pub mod io;
pub mod lagrange;
pub mod master;
pub mod matrix;
pub mod model;
pub mod solver;
pub mod synthetic;

mod book;

pub use ext::ExtReal;
pub use matrix::Matrix;
