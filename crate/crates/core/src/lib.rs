//! Laboratory for small-data decay of the one-dimensional Klein-Gordon
//! equation `(d_t^2 - d_x^2 + 1) u = F(u, u_t, u_x)` with cubic `F`.
//!
//! [`nonlinearity`] evaluates `F` and its resonance function `K_F`,
//! [`classifier`] sorts `F` into a dissipation class and predicts decay
//! rates, [`profile_ode`] integrates the amplitude equation along rays,
//! [`kg_solver`] simulates the PDE, and [`analysis`] measures what the
//! simulations did. [`cli`] drives all of it from JSON configs.

pub mod analysis;
pub mod classifier;
pub mod cli;
pub mod kg_solver;
pub mod nonlinearity;
pub mod profile_ode;
mod quad;

pub use nonlinearity::{ComplexValue, CubicNonlinearity, Preset};
