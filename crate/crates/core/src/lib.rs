//! Boundary-domain integral equations for `∇·(a∇u) = f` on a ball with
//! mixed Dirichlet/Neumann data, built on the parametrix
//! `P(x, y) = P_Δ(x − y) / a(x)`.

pub mod bdies;
pub mod coefficient;
pub mod error;
pub mod geometry;
pub mod green;
pub mod harmonics;
pub mod laplace;
pub mod linalg;
pub mod parametrix;
pub mod runner;
pub mod verify;

pub use error::{Error, Result};
