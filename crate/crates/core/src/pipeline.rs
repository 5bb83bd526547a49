//! Coherence-to-entanglement activation, ideal and through the simulated
//! optical CNOT with tomographic readout.

use thiserror::Error;

use crate::activation::{activation_record, default_ancilla, prepare_system, ActivationError};
use crate::linalg::{DensityMatrix, Tensor};
use crate::measures::{concurrence, l1_coherence, MeasureError};
use crate::photonics::{effective_gate, PhotonicCircuit, PhotonicsError};
use crate::random::derived_rng;
use crate::tomography::{
    all_settings, mle_reconstruct, monte_carlo_errorbars, Functional, SamplingMode, TomographyDataset,
    TomographyError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Activation(#[from] ActivationError),
    #[error(transparent)]
    Photonics(#[from] PhotonicsError),
    #[error(transparent)]
    Tomography(#[from] TomographyError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationPoint {
    /// Preparation angle in radians.
    pub theta: f64,
    pub coherence: f64,
    pub concurrence: f64,
    pub coherence_err: f64,
    pub concurrence_err: f64,
}

/// Exact CNOT activation; error columns are zero.
pub fn ideal_activation_sweep(grid: &[f64]) -> Result<Vec<ActivationPoint>> {
    grid.iter()
        .map(|&theta| {
            let r = activation_record(theta)?;
            Ok(ActivationPoint {
                theta,
                coherence: r.input_coherence,
                concurrence: r.output_concurrence,
                coherence_err: 0.0,
                concurrence_err: 0.0,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub shots: u64,
    /// Monte Carlo rounds for the error bars; fewer than 2 leaves them at 0.
    pub rounds: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SimulatedActivation {
    pub point: ActivationPoint,
    pub system_estimate: DensityMatrix,
    pub output_estimate: DensityMatrix,
    /// Post-selected output of the optical gate before tomography.
    pub output_true: DensityMatrix,
}

/// Prepares `ρ(θ)`, sends it with an `|H>` ancilla through `circuit`
/// and reconstructs both the input and the output by maximum likelihood.
/// Grid point `index` selects independent random streams.
pub fn simulated_activation(
    circuit: &PhotonicCircuit,
    theta: f64,
    index: usize,
    cfg: SimulationConfig,
) -> Result<SimulatedActivation> {
    let process = effective_gate(circuit)?;
    let system = prepare_system(theta);
    let (output_true, _) = process.apply(&system.tensor(&default_ancilla()))?;
    let k = index as u64;
    let s1 = all_settings(1);
    let s2 = all_settings(2);
    let sys_data = TomographyDataset::simulate_with(
        &mut derived_rng(cfg.seed, 2 * k),
        &system,
        &s1,
        cfg.shots,
        SamplingMode::Poisson,
    )?;
    let out_data = TomographyDataset::simulate_with(
        &mut derived_rng(cfg.seed, 2 * k + 1),
        &output_true,
        &s2,
        cfg.shots,
        SamplingMode::Poisson,
    )?;
    let system_estimate = mle_reconstruct(&sys_data)?.state;
    let output_estimate = mle_reconstruct(&out_data)?.state;
    let (coherence_err, concurrence_err) = if cfg.rounds >= 2 {
        let mc_seed = cfg.seed.wrapping_add(1 + 2 * k);
        let a = monte_carlo_errorbars(&system, &s1, cfg.shots, cfg.rounds, Functional::Coherence, mc_seed)?;
        let b = monte_carlo_errorbars(&output_true, &s2, cfg.shots, cfg.rounds, Functional::Concurrence, mc_seed + 1)?;
        (a.std, b.std)
    } else {
        (0.0, 0.0)
    };
    Ok(SimulatedActivation {
        point: ActivationPoint {
            theta,
            coherence: l1_coherence(&system_estimate),
            concurrence: concurrence(&output_estimate)?,
            coherence_err,
            concurrence_err,
        },
        system_estimate,
        output_estimate,
        output_true,
    })
}

pub fn simulated_activation_sweep(
    circuit: &PhotonicCircuit,
    grid: &[f64],
    cfg: SimulationConfig,
) -> Result<Vec<SimulatedActivation>> {
    grid.iter()
        .enumerate()
        .map(|(i, &theta)| simulated_activation(circuit, theta, i, cfg))
        .collect()
}

/// 0° to 45° in 7.5° steps (radians), on which `|sin 2θ|` is strictly increasing.
pub fn monotone_theta_grid() -> Vec<f64> {
    (0..=6).map(|k| (7.5 * k as f64).to_radians()).collect()
}

/// Ranks starting at 1, ties sharing their average rank.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            r[o] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation: Pearson correlation of the tie-averaged ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "samples must pair up");
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}
