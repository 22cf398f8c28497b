//! Variational fast forwarding: V(θ, γ) = W(θ) D(γ) W(θ)†, fitted to the exact
//! trajectory of a reference state so that V^n costs the same as V.

mod fit;
mod model;
mod optimize;
mod propagator;

pub use fit::{fit_vff, vff_cost, CostReport, FitConfig, FitReport};
pub use model::{
    ansatz_circuit, brick_layout, controlled_vff_propagator, diagonal_circuit, vff_propagator, z_words, Block,
    FitSummary, VffModel,
};
pub use optimize::{central_gradient, Lbfgs, Minimum};
pub use propagator::VffPropagator;
