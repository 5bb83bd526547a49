//! Numerical workbench for coherence, superposition and entanglement resource
//! theories on small quantum systems, plus a desk-scale simulator of a
//! post-selected two-photon linear-optics CNOT with tomography.
//!
//! Modules build bottom-up: [`linalg`] carries states and operators,
//! [`measures`] quantifies resources, and the remaining modules reproduce
//! specific results on top of them. [`pipeline`] chains the optical CNOT,
//! tomography and the measures into the activation workflow.

pub mod linalg;
pub mod measures;
pub mod random;
pub mod superposition;
pub mod activation;
pub mod monotonicity;
pub mod photonics;
pub mod tomography;
pub mod pipeline;
