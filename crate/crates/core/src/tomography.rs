//! Simulated polarization-qubit state tomography.
//!
//! Each qubit is measured in one of the Pauli bases, realized optically by a
//! quarter-wave plate and polarizer: Z resolves H/V, X resolves D/A and Y
//! resolves R/L. An `n`-qubit dataset uses all `3ⁿ` basis combinations.
//! Outcome `0` of each qubit is the `+1` eigenstate (H, D or R).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{cr, identity, kron, pauli_x, pauli_y, pauli_z, CMatrix, DensityMatrix, LinalgError};
use crate::measures::{concurrence, l1_coherence, MeasureError};
use crate::random::{derived_rng, multinomial, poisson_counts, rng_from_seed};

/// Default iteration budget of the likelihood maximization.
pub const MLE_MAX_ITERATIONS: usize = 10_000;
/// Stop when the per-count log-likelihood improves by less than this.
pub const MLE_TOL: f64 = 1e-9;
const START_MIXING: f64 = 1e-4;
const PROB_FLOOR: f64 = 1e-300;
/// First line of an exported dataset.
pub const DATASET_SCHEMA: &str = "# qresource tomography-dataset v1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TomographyError {
    #[error("settings are not informationally complete: no data for Pauli string {0}")]
    Incomplete(String),
    #[error("state has {state} qubits, setting has {setting}")]
    QubitMismatch { state: usize, setting: usize },
    #[error("maximum likelihood did not converge within {} iterations", .0.iterations)]
    NotConverged(Box<MleResult>),
    #[error("at least two Monte Carlo rounds are required")]
    TooFewRounds,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("malformed dataset: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

pub type Result<T> = std::result::Result<T, TomographyError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    pub const ALL: [PauliBasis; 3] = [PauliBasis::X, PauliBasis::Y, PauliBasis::Z];

    pub fn letter(self) -> char {
        match self {
            PauliBasis::X => 'X',
            PauliBasis::Y => 'Y',
            PauliBasis::Z => 'Z',
        }
    }

    /// Polarization labels of outcomes 0 and 1.
    pub fn outcome_letters(self) -> [char; 2] {
        match self {
            PauliBasis::X => ['D', 'A'],
            PauliBasis::Y => ['R', 'L'],
            PauliBasis::Z => ['H', 'V'],
        }
    }

    pub fn pauli(self) -> CMatrix {
        match self {
            PauliBasis::X => pauli_x(),
            PauliBasis::Y => pauli_y(),
            PauliBasis::Z => pauli_z(),
        }
    }

    /// Rank-one projectors onto the `+1` and `−1` eigenstates.
    pub fn projectors(self) -> [CMatrix; 2] {
        let p = self.pauli();
        let id = identity(2);
        [(&id + &p).scale(0.5), (&id - &p).scale(0.5)]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MeasurementSetting(pub Vec<PauliBasis>);

impl MeasurementSetting {
    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn n_outcomes(&self) -> usize {
        1 << self.0.len()
    }

    pub fn label(&self) -> String {
        self.0.iter().map(|b| b.letter()).collect()
    }

    /// Outcome `k` has qubit 0 as its most significant bit.
    pub fn outcome_bits(&self, k: usize) -> Vec<usize> {
        let n = self.n_qubits();
        (0..n).map(|q| (k >> (n - 1 - q)) & 1).collect()
    }

    pub fn outcome_label(&self, k: usize) -> String {
        self.0
            .iter()
            .zip(self.outcome_bits(k))
            .map(|(b, bit)| b.outcome_letters()[bit])
            .collect()
    }

    pub fn outcome_from_label(&self, label: &str) -> Option<usize> {
        (0..self.n_outcomes()).find(|&k| self.outcome_label(k) == label)
    }

    pub fn projectors(&self) -> Vec<CMatrix> {
        (0..self.n_outcomes())
            .map(|k| {
                self.0
                    .iter()
                    .zip(self.outcome_bits(k))
                    .fold(identity(1), |acc, (b, bit)| kron(&acc, &b.projectors()[bit]))
            })
            .collect()
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for MeasurementSetting {
    type Err = TomographyError;

    fn from_str(s: &str) -> Result<Self> {
        let bases = s
            .chars()
            .map(|ch| match ch {
                'X' => Ok(PauliBasis::X),
                'Y' => Ok(PauliBasis::Y),
                'Z' => Ok(PauliBasis::Z),
                other => Err(TomographyError::Parse(format!("unknown basis {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bases.is_empty() {
            return Err(TomographyError::Parse("empty setting label".into()));
        }
        Ok(MeasurementSetting(bases))
    }
}

/// All `3ⁿ` settings, in lexicographic X < Y < Z order.
pub fn all_settings(n_qubits: usize) -> Vec<MeasurementSetting> {
    (0..3usize.pow(n_qubits as u32))
        .map(|mut idx| {
            let mut bases = vec![PauliBasis::X; n_qubits];
            for q in (0..n_qubits).rev() {
                bases[q] = PauliBasis::ALL[idx % 3];
                idx /= 3;
            }
            MeasurementSetting(bases)
        })
        .collect()
}

fn n_qubits_of(rho: &DensityMatrix) -> Option<usize> {
    let d = rho.dim();
    d.is_power_of_two().then(|| d.trailing_zeros() as usize)
}

pub fn measurement_probs(rho: &DensityMatrix, setting: &MeasurementSetting) -> Result<Vec<f64>> {
    let n = n_qubits_of(rho).unwrap_or(usize::MAX);
    if n != setting.n_qubits() {
        return Err(TomographyError::QubitMismatch { state: n, setting: setting.n_qubits() });
    }
    Ok(setting
        .projectors()
        .iter()
        .map(|p| (p * rho.matrix()).trace().re.max(0.0))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    #[default]
    Poisson,
    Multinomial,
}

impl SamplingMode {
    pub fn name(self) -> &'static str {
        match self {
            SamplingMode::Poisson => "poisson",
            SamplingMode::Multinomial => "multinomial",
        }
    }
}

impl FromStr for SamplingMode {
    type Err = TomographyError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(SamplingMode::Poisson),
            "multinomial" => Ok(SamplingMode::Multinomial),
            other => Err(TomographyError::Parse(format!("unknown sampling mode {other:?}"))),
        }
    }
}

pub fn sample_counts_with<R: Rng + ?Sized>(rng: &mut R, probs: &[f64], shots: u64, mode: SamplingMode) -> Vec<u64> {
    match mode {
        SamplingMode::Poisson => poisson_counts(rng, shots, probs),
        SamplingMode::Multinomial => multinomial(rng, shots, probs),
    }
}

pub fn sample_counts(probs: &[f64], shots: u64, mode: SamplingMode, seed: u64) -> Vec<u64> {
    sample_counts_with(&mut rng_from_seed(seed), probs, shots, mode)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SettingRecord {
    pub setting: MeasurementSetting,
    /// Counts per outcome. Exact datasets store probabilities here.
    pub counts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyDataset {
    pub records: Vec<SettingRecord>,
    /// Nominal shots per setting; 0 for an exact-probability dataset.
    pub shots_per_setting: u64,
    pub mode: SamplingMode,
}

impl TomographyDataset {
    pub fn n_qubits(&self) -> usize {
        self.records.first().map_or(0, |r| r.setting.n_qubits())
    }

    pub fn total_counts(&self) -> f64 {
        self.records.iter().flat_map(|r| r.counts.iter()).sum()
    }

    /// Noise-free dataset holding the Born probabilities themselves.
    pub fn exact(rho: &DensityMatrix, settings: &[MeasurementSetting]) -> Result<Self> {
        let records = settings
            .iter()
            .map(|s| Ok(SettingRecord { setting: s.clone(), counts: measurement_probs(rho, s)? }))
            .collect::<Result<_>>()?;
        Ok(TomographyDataset { records, shots_per_setting: 0, mode: SamplingMode::Multinomial })
    }

    pub fn simulate_with<R: Rng + ?Sized>(
        rng: &mut R,
        rho: &DensityMatrix,
        settings: &[MeasurementSetting],
        shots: u64,
        mode: SamplingMode,
    ) -> Result<Self> {
        let mut records = Vec::with_capacity(settings.len());
        for s in settings {
            let probs = measurement_probs(rho, s)?;
            let counts = sample_counts_with(rng, &probs, shots, mode);
            records.push(SettingRecord { setting: s.clone(), counts: counts.into_iter().map(|n| n as f64).collect() });
        }
        Ok(TomographyDataset { records, shots_per_setting: shots, mode })
    }

    pub fn simulate(
        rho: &DensityMatrix,
        settings: &[MeasurementSetting],
        shots: u64,
        mode: SamplingMode,
        seed: u64,
    ) -> Result<Self> {
        Self::simulate_with(&mut rng_from_seed(seed), rho, settings, shots, mode)
    }

    /// Columns `setting,outcome,count`, one row per outcome, after a
    /// `#`-prefixed schema line carrying the shots and sampling mode.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["setting", "outcome", "count"]).expect("in-memory write");
        for r in &self.records {
            for (k, n) in r.counts.iter().enumerate() {
                w.write_record([r.setting.label(), r.setting.outcome_label(k), n.to_string()])
                    .expect("in-memory write");
            }
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output");
        format!("{DATASET_SCHEMA} shots={} mode={}\n{body}", self.shots_per_setting, self.mode.name())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (schema, body) = text.split_once('\n').ok_or(TomographyError::EmptyDataset)?;
        if !schema.starts_with(DATASET_SCHEMA) {
            return Err(TomographyError::Parse(format!("unexpected schema line {schema:?}")));
        }
        let mut shots = 0;
        let mut mode = SamplingMode::default();
        for field in schema.split_whitespace() {
            if let Some(v) = field.strip_prefix("shots=") {
                shots = v.parse().map_err(|e| TomographyError::Parse(format!("shots: {e}")))?;
            } else if let Some(v) = field.strip_prefix("mode=") {
                mode = v.parse()?;
            }
        }
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let header = reader.headers().map_err(|e| TomographyError::Parse(e.to_string()))?;
        if header != vec!["setting", "outcome", "count"] {
            return Err(TomographyError::Parse("expected header setting,outcome,count".into()));
        }
        let mut records: Vec<SettingRecord> = Vec::new();
        for (no, row) in reader.deserialize::<(String, String, f64)>().enumerate() {
            let (label, outcome_label, count) =
                row.map_err(|e| TomographyError::Parse(format!("row {}: {e}", no + 1)))?;
            let setting: MeasurementSetting = label.parse()?;
            let outcome = setting
                .outcome_from_label(&outcome_label)
                .ok_or_else(|| TomographyError::Parse(format!("row {}: bad outcome {outcome_label:?}", no + 1)))?;
            if !(count >= 0.0) {
                return Err(TomographyError::Parse(format!("row {}: negative count", no + 1)));
            }
            let idx = match records.iter().position(|r| r.setting == setting) {
                Some(i) => i,
                None => {
                    let n = setting.n_outcomes();
                    records.push(SettingRecord { setting, counts: vec![0.0; n] });
                    records.len() - 1
                }
            };
            records[idx].counts[outcome] = count;
        }
        if records.is_empty() {
            return Err(TomographyError::EmptyDataset);
        }
        Ok(TomographyDataset { records, shots_per_setting: shots, mode })
    }
}

/// `ρ̂ = 2⁻ⁿ Σ ⟨P⟩ P` over all Pauli strings, each expectation pooled over
/// the settings that measure it. Hermitian with unit trace, not always PSD.
pub fn linear_inversion(dataset: &TomographyDataset) -> Result<CMatrix> {
    let n = dataset.n_qubits();
    if n == 0 {
        return Err(TomographyError::EmptyDataset);
    }
    let d = 1usize << n;
    let mut rho = CMatrix::zeros(d, d);
    // string entry None is the identity on that qubit
    for idx in 0..4usize.pow(n as u32) {
        let mut string: Vec<Option<PauliBasis>> = vec![None; n];
        let mut rest = idx;
        for q in (0..n).rev() {
            string[q] = match rest % 4 {
                0 => None,
                k => Some(PauliBasis::ALL[k - 1]),
            };
            rest /= 4;
        }
        let (mut sum, mut total) = (0.0, 0.0);
        for r in &dataset.records {
            if r.setting.n_qubits() != n {
                return Err(TomographyError::QubitMismatch { state: n, setting: r.setting.n_qubits() });
            }
            let compatible = string.iter().zip(&r.setting.0).all(|(p, b)| p.is_none_or(|p| p == *b));
            if !compatible {
                continue;
            }
            for (k, &cnt) in r.counts.iter().enumerate() {
                let parity: usize = string
                    .iter()
                    .zip(r.setting.outcome_bits(k))
                    .filter(|(p, _)| p.is_some())
                    .map(|(_, bit)| bit)
                    .sum();
                sum += if parity % 2 == 0 { cnt } else { -cnt };
                total += cnt;
            }
        }
        if total <= 0.0 {
            let label: String = string.iter().map(|p| p.map_or('I', |b| b.letter())).collect();
            return Err(TomographyError::Incomplete(label));
        }
        let op = string
            .iter()
            .fold(identity(1), |acc, p| kron(&acc, &p.map_or_else(|| identity(2), |b| b.pauli())));
        rho += op.scale(sum / total);
    }
    Ok(rho.unscale(d as f64))
}

/// Clip negative eigenvalues to zero and renormalize.
pub fn project_psd(m: &CMatrix, dims: Vec<usize>) -> Result<DensityMatrix> {
    let eig = crate::linalg::eig_hermitian(&(m + m.adjoint()).scale(0.5))?;
    let clipped = eig.map(|l| l.max(0.0));
    let tr = clipped.trace().re;
    if tr <= 0.0 {
        return Ok(DensityMatrix::maximally_mixed(dims));
    }
    Ok(DensityMatrix::from_noisy(dims, clipped.unscale(tr))?)
}

struct Likelihood {
    projectors: Vec<CMatrix>,
    counts: Vec<f64>,
    total: f64,
}

impl Likelihood {
    fn new(dataset: &TomographyDataset) -> Self {
        let mut projectors = Vec::new();
        let mut counts = Vec::new();
        for r in &dataset.records {
            for (p, &n) in r.setting.projectors().into_iter().zip(&r.counts) {
                if n > 0.0 {
                    projectors.push(p);
                    counts.push(n);
                }
            }
        }
        let total = counts.iter().sum();
        Likelihood { projectors, counts, total }
    }

    /// Per-count log-likelihood `Σ n_k ln p_k / Σ n_k`.
    fn value(&self, rho: &CMatrix) -> f64 {
        let mut l = 0.0;
        for (p, &n) in self.projectors.iter().zip(&self.counts) {
            let prob = (p * rho).trace().re;
            if prob <= 0.0 {
                return f64::NEG_INFINITY;
            }
            l += n * prob.ln();
        }
        l / self.total
    }

    /// `R = Σ (n_k / p_k) Π_k / Σ n_k`.
    fn r_operator(&self, rho: &CMatrix) -> CMatrix {
        let d = rho.nrows();
        let mut r = CMatrix::zeros(d, d);
        for (p, &n) in self.projectors.iter().zip(&self.counts) {
            let prob = (p * rho).trace().re.max(PROB_FLOOR);
            r += p.scale(n / prob);
        }
        r.unscale(self.total)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MleResult {
    pub state: DensityMatrix,
    /// Per-count log-likelihood of `state`.
    pub log_likelihood: f64,
    pub iterations: usize,
}

/// Per-count log-likelihood of `rho` on `dataset`.
pub fn log_likelihood(dataset: &TomographyDataset, rho: &DensityMatrix) -> f64 {
    Likelihood::new(dataset).value(rho.matrix())
}

fn state_of(t: &CMatrix) -> CMatrix {
    let a = t.adjoint() * t;
    let tr = a.trace().re;
    a.unscale(tr)
}

pub fn mle_reconstruct(dataset: &TomographyDataset) -> Result<MleResult> {
    mle_reconstruct_with(dataset, MLE_MAX_ITERATIONS, MLE_TOL)
}

/// Gradient ascent on `ρ = T†T / Tr(T†T)` with backtracking, started from
/// the PSD-projected linear inversion lightly mixed with the identity.
pub fn mle_reconstruct_with(dataset: &TomographyDataset, max_iterations: usize, tol: f64) -> Result<MleResult> {
    let n = dataset.n_qubits();
    let dims = vec![2; n];
    let d = 1usize << n;
    let lik = Likelihood::new(dataset);
    if lik.total <= 0.0 {
        return Err(TomographyError::EmptyDataset);
    }
    let projected = project_psd(&linear_inversion(dataset)?, dims.clone())?;
    let start = projected.matrix().scale(1.0 - START_MIXING) + identity(d).scale(START_MIXING / d as f64);
    let mut t = crate::linalg::sqrt_psd(&start)?;
    let mut rho = state_of(&t);
    let mut value = lik.value(&rho);
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        t = t.unscale(t.norm());
        let r = lik.r_operator(&rho);
        let shift = (&r * &rho).trace().re;
        let grad = &t * (r - identity(d).scale(shift));
        let grad_sq = grad.norm_squared();
        let mut accepted = None;
        while step > 1e-16 {
            let trial = &t + grad.scale(step);
            let trial_rho = state_of(&trial);
            let trial_value = lik.value(&trial_rho);
            if trial_value >= value + 1e-4 * step * grad_sq {
                accepted = Some((trial, trial_rho, trial_value));
                break;
            }
            step *= 0.5;
        }
        let Some((nt, nrho, nvalue)) = accepted else {
            converged = true;
            break;
        };
        let gain = nvalue - value;
        t = nt;
        rho = nrho;
        value = nvalue;
        step = (step * 2.0).min(1e6);
        if gain < tol {
            converged = true;
            break;
        }
    }
    let state = DensityMatrix::from_noisy(dims, rho)?;
    let result = MleResult { state, log_likelihood: value, iterations };
    if converged {
        Ok(result)
    } else {
        Err(TomographyError::NotConverged(Box::new(result)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// ℓ1-coherence of the reconstructed state.
    Coherence,
    /// Concurrence of a reconstructed two-qubit state.
    Concurrence,
}

impl Functional {
    pub fn evaluate(self, rho: &DensityMatrix) -> Result<f64> {
        Ok(match self {
            Functional::Coherence => l1_coherence(rho),
            Functional::Concurrence => concurrence(rho)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBar {
    pub mean: f64,
    /// Sample standard deviation over rounds.
    pub std: f64,
}

/// Resample Poisson counts `rounds` times from `rho_true`, reconstruct by
/// maximum likelihood and summarize `functional`. Round `i` draws from the
/// independent stream `(seed, i)`; a reconstruction that exhausts its
/// budget contributes its best iterate.
pub fn monte_carlo_errorbars(
    rho_true: &DensityMatrix,
    settings: &[MeasurementSetting],
    shots: u64,
    rounds: usize,
    functional: Functional,
    seed: u64,
) -> Result<ErrorBar> {
    if rounds < 2 {
        return Err(TomographyError::TooFewRounds);
    }
    let values = (0..rounds)
        .into_par_iter()
        .map(|i| {
            let mut rng = derived_rng(seed, i as u64);
            let ds = TomographyDataset::simulate_with(&mut rng, rho_true, settings, shots, SamplingMode::Poisson)?;
            let state = match mle_reconstruct(&ds) {
                Ok(r) => r.state,
                Err(TomographyError::NotConverged(best)) => best.state,
                Err(e) => return Err(e),
            };
            functional.evaluate(&state)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = values.iter().sum::<f64>() / rounds as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (rounds - 1) as f64;
    Ok(ErrorBar { mean, std: var.sqrt() })
}

/// `|D>` as a density matrix; a convenient maximally coherent qubit.
pub fn diagonal_polarization() -> DensityMatrix {
    let h = 0.5;
    DensityMatrix::new(vec![2], CMatrix::from_row_slice(2, 2, &[cr(h), cr(h), cr(h), cr(h)]))
        .expect("valid state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{bell_phi_plus, fidelity, max_abs_diff, Ket};
    use crate::random::random_density;

    #[test]
    fn setting_bookkeeping() {
        let all = all_settings(2);
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].label(), "XX");
        assert_eq!(all[8].label(), "ZZ");
        let s: MeasurementSetting = "ZX".parse().unwrap();
        assert_eq!(s.outcome_label(1), "HA");
        assert_eq!(s.outcome_from_label("VD"), Some(2));
        for s in &all {
            let sum = s.projectors().iter().fold(CMatrix::zeros(4, 4), |a, p| a + p);
            assert!(max_abs_diff(&sum, &identity(4)) < 1e-12);
        }
    }

    #[test]
    fn born_probabilities() {
        let z: MeasurementSetting = "Z".parse().unwrap();
        let h = Ket::basis(2, 0).projector();
        assert_eq!(measurement_probs(&h, &z).unwrap(), vec![1.0, 0.0]);
        let p = measurement_probs(&diagonal_polarization(), &z).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        let zz: MeasurementSetting = "ZZ".parse().unwrap();
        let b = measurement_probs(&bell_phi_plus(), &zz).unwrap();
        for (x, e) in b.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((x - e).abs() < 1e-12);
        }
        assert!(measurement_probs(&h, &zz).is_err());
    }

    #[test]
    fn count_sampling_examples() {
        assert_eq!(sample_counts(&[0.3, 0.7], 0, SamplingMode::Poisson, 1), vec![0, 0]);
        assert_eq!(sample_counts(&[1.0, 0.0], 100, SamplingMode::Multinomial, 1), vec![100, 0]);
        let m = sample_counts(&[0.25; 4], 1000, SamplingMode::Multinomial, 4);
        assert_eq!(m.iter().sum::<u64>(), 1000);
    }

    #[test]
    fn linear_inversion_is_exact_on_exact_data() {
        let mut rng = rng_from_seed(11);
        for n in 1..=2 {
            let rho = random_density(&mut rng, vec![2; n]);
            let ds = TomographyDataset::exact(&rho, &all_settings(n)).unwrap();
            assert!(max_abs_diff(&linear_inversion(&ds).unwrap(), rho.matrix()) < 1e-10);
        }
        let bell = TomographyDataset::exact(&bell_phi_plus(), &all_settings(2)).unwrap();
        let li = project_psd(&linear_inversion(&bell).unwrap(), vec![2, 2]).unwrap();
        assert!((concurrence(&li).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn linear_inversion_needs_complete_settings() {
        let ds = TomographyDataset::exact(&bell_phi_plus(), &["ZZ".parse().unwrap()]).unwrap();
        assert!(matches!(linear_inversion(&ds), Err(TomographyError::Incomplete(_))));
    }

    #[test]
    fn finite_shot_linear_inversion_is_hermitian_unit_trace() {
        let ds = TomographyDataset::simulate(&bell_phi_plus(), &all_settings(2), 50, SamplingMode::Poisson, 3).unwrap();
        let li = linear_inversion(&ds).unwrap();
        assert!(max_abs_diff(&li, &li.adjoint()) < 1e-12);
        assert!((li.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mle_recovers_exact_states() {
        let mut rng = rng_from_seed(12);
        let mut states = vec![bell_phi_plus(), Ket::basis(4, 1).projector().with_dims(vec![2, 2]).unwrap()];
        states.push(random_density(&mut rng, vec![2, 2]));
        for rho in states {
            let ds = TomographyDataset::exact(&rho, &all_settings(2)).unwrap();
            let r = mle_reconstruct(&ds).unwrap();
            assert!(fidelity(&r.state, &rho).unwrap() >= 1.0 - 1e-8, "iterations {}", r.iterations);
        }
    }

    #[test]
    fn mle_beats_projected_linear_inversion() {
        for seed in 0..10 {
            let ds = TomographyDataset::simulate(&bell_phi_plus(), &all_settings(2), 200, SamplingMode::Poisson, seed)
                .unwrap();
            let mle = mle_reconstruct(&ds).unwrap();
            let proj = project_psd(&linear_inversion(&ds).unwrap(), vec![2, 2]).unwrap();
            assert!(mle.log_likelihood >= log_likelihood(&ds, &proj) - 1e-12);
            assert!((mle.state.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(mle.state.eigen().values.iter().all(|&l| l >= -1e-10));
        }
    }

    #[test]
    fn csv_round_trip() {
        let ds = TomographyDataset::simulate(&bell_phi_plus(), &all_settings(2), 100, SamplingMode::Multinomial, 5).unwrap();
        let text = ds.to_csv();
        assert!(text.lines().nth(1) == Some("setting,outcome,count"));
        assert_eq!(TomographyDataset::from_csv(&text).unwrap(), ds);
        assert!(TomographyDataset::from_csv("setting,outcome,count\n").is_err());
    }

    #[test]
    fn error_bars_are_reproducible() {
        let settings = all_settings(1);
        let a = monte_carlo_errorbars(&diagonal_polarization(), &settings, 1000, 20, Functional::Coherence, 9).unwrap();
        let b = monte_carlo_errorbars(&diagonal_polarization(), &settings, 1000, 20, Functional::Coherence, 9).unwrap();
        assert_eq!(a, b);
        assert!((a.mean - 1.0).abs() < 3.0 * a.std.max(1e-3));
        assert!(monte_carlo_errorbars(&diagonal_polarization(), &settings, 10, 1, Functional::Coherence, 9).is_err());
    }
}
