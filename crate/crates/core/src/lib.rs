//! Exact model-order reduction for parameterized quantum Hamiltonians.
//!
//! A model `H(λ) = H0 + Σ λ_k H_k` together with an initial state is reduced
//! to the smallest subspace that is invariant under every coefficient
//! operator and contains the initial state. Dynamics on that subspace are
//! exact for every choice of `λ`.

pub mod burnside;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod pauli;
pub mod reduction;
pub mod sampling;

pub use error::{Error, Result};
