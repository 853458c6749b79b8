//! Boundary-integral solver for `div A grad u = 0` in the plane, where the
//! coefficient matrix `A` is complex, elliptic and depends only on the first
//! coordinate.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: Lipschitz boundaries (graphs and closed curves), panel
//!   quadrature meshes and nontangential cone sampling.
//! - [`coefficients`]: coefficient fields, ellipticity certification and the
//!   algebraic transforms used by the solver (conjugate matrix, triangularizing
//!   change of variables).
//! - [`greens`]: fundamental solutions for constant, graph-pullback and general
//!   x-dependent fields, plus their conjugates.
//! - [`potentials`]: single and double layer potentials and the discretized
//!   boundary operators obtained as nontangential limits.
//! - [`solvers`]: Dirichlet, Neumann and regularity solves, conjugate solutions
//!   and the domain Green's function.
//! - [`verify`]: maximal functions, Carleson functionals and the other
//!   quantitative checks, assembled into pass/fail reports.

pub mod coefficients;
pub mod error;
pub mod geometry;
pub mod greens;
pub mod linalg;
pub mod potentials;
pub mod quadrature;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMat2, CVec2, Point, C64};
