//! Coherence and entanglement quantifiers.
//!
//! The incoherent basis is always the computational basis of the full
//! Hilbert space. Entanglement quantities are defined for bipartite states
//! whose `dims` has exactly two factors.

use thiserror::Error;

use crate::linalg::{
    self, kron, pauli_y, partial_trace, trace_norm, CMatrix, DensityMatrix, LinalgError, C64,
};
use crate::random::{rng_from_seed, WorkbenchRng};
use rand::Rng;

/// Largest dimension the trace-norm coherence solver accepts.
pub const MAX_SOLVER_DIM: usize = 8;
/// Eigenvalues below this are exact zeros for logarithms and supports.
pub const LOG_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("expected factor dimensions {expected:?}, got {actual:?}")]
    WrongDims {
        expected: Vec<usize>,
        actual: Vec<usize>,
    },
    #[error("dimension {0} exceeds the solver limit of {MAX_SOLVER_DIM}")]
    DimensionTooLarge(usize),
    #[error("maximally entangled dimension must be at least 2, got {0}")]
    BadMaxEntDimension(usize),
    #[error("state is not a pure maximally entangled state")]
    NotMaximallyEntangled,
    #[error("ensemble probabilities sum to {0}, expected 1")]
    BadEnsemble(f64),
    #[error("separable certificate rejected: {0}")]
    BadCertificate(String),
}

pub type Result<T> = std::result::Result<T, MeasureError>;

fn require_dims(rho: &DensityMatrix, expected: &[usize]) -> Result<()> {
    if rho.dims() != expected {
        return Err(MeasureError::WrongDims {
            expected: expected.to_vec(),
            actual: rho.dims().to_vec(),
        });
    }
    Ok(())
}

/// Sum of absolute values of the off-diagonal entries.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm();
            }
        }
    }
    acc
}

/// Settings for the trace-norm coherence minimizer.
#[derive(Debug, Clone)]
pub struct CoherenceSolver {
    /// Number of starting points (the dephased state and the uniform
    /// distribution are always among them).
    pub starts: usize,
    /// Stop a smoothing stage once the objective improves by less than this.
    pub tolerance: f64,
    /// Iteration cap per smoothing stage.
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for CoherenceSolver {
    fn default() -> Self {
        Self {
            starts: 8,
            tolerance: 1e-8,
            max_iterations: 2000,
            seed: 0x5eed,
        }
    }
}

/// Result of the trace-norm coherence minimization.
#[derive(Debug, Clone)]
pub struct TraceNormCoherence {
    pub value: f64,
    /// Diagonal of the minimizing incoherent state.
    pub closest: Vec<f64>,
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

fn difference(rho: &CMatrix, diag: &[f64]) -> CMatrix {
    let mut m = rho.clone();
    for (k, &p) in diag.iter().enumerate() {
        m[(k, k)] -= C64::new(p, 0.0);
    }
    m
}

/// Smoothed objective `Σ sqrt(λ² + μ²)` and its gradient in the diagonal.
fn smoothed(rho: &CMatrix, diag: &[f64], mu: f64) -> (f64, Vec<f64>) {
    let eig = linalg::eig_hermitian(&difference(rho, diag)).expect("difference is Hermitian");
    let n = diag.len();
    let mut value = 0.0;
    let mut grad = vec![0.0; n];
    for (i, &lam) in eig.values.iter().enumerate() {
        let r = (lam * lam + mu * mu).sqrt();
        value += r;
        let w = lam / r;
        for (k, g) in grad.iter_mut().enumerate() {
            *g -= w * eig.vectors[(k, i)].norm_sqr();
        }
    }
    (value, grad)
}

fn exact_objective(rho: &CMatrix, diag: &[f64]) -> f64 {
    trace_norm(&difference(rho, diag)).expect("square")
}

fn descend(rho: &CMatrix, start: Vec<f64>, solver: &CoherenceSolver) -> Vec<f64> {
    let mut x = start;
    let mut step = 1.0;
    for stage in 2..=10 {
        let mu = 10f64.powi(-stage);
        let (mut fx, mut gx) = smoothed(rho, &x, mu);
        for _ in 0..solver.max_iterations {
            let mut accepted = None;
            let mut t = step;
            while t > 1e-14 {
                let trial: Vec<f64> = x.iter().zip(&gx).map(|(a, g)| a - t * g).collect();
                let y = project_to_simplex(&trial);
                let dx: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
                let lin: f64 = gx.iter().zip(&dx).map(|(g, d)| g * d).sum();
                let sq: f64 = dx.iter().map(|d| d * d).sum();
                let (fy, gy) = smoothed(rho, &y, mu);
                if fy <= fx + lin + sq / (2.0 * t) + 1e-15 {
                    accepted = Some((y, fy, gy, sq));
                    break;
                }
                t *= 0.5;
            }
            let Some((y, fy, gy, sq)) = accepted else {
                break;
            };
            let improvement = fx - fy;
            x = y;
            fx = fy;
            gx = gy;
            step = (t * 2.0).min(10.0);
            if sq < 1e-30 || improvement.abs() < solver.tolerance * 1e-2 {
                break;
            }
        }
    }
    x
}

/// `min_σ ‖ρ − σ‖₁` over incoherent (diagonal) states `σ`.
pub fn trace_norm_coherence_with(
    rho: &DensityMatrix,
    solver: &CoherenceSolver,
) -> Result<TraceNormCoherence> {
    let d = rho.dim();
    if d > MAX_SOLVER_DIM {
        return Err(MeasureError::DimensionTooLarge(d));
    }
    let m = rho.matrix();
    let dephased: Vec<f64> = (0..d).map(|k| m[(k, k)].re).collect();
    let mut starts = vec![dephased.clone(), vec![1.0 / d as f64; d]];
    let mut rng: WorkbenchRng = rng_from_seed(solver.seed);
    while starts.len() < solver.starts.max(2) {
        // uniform sample on the simplex via normalized exponentials
        let e: Vec<f64> = (0..d)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let s: f64 = e.iter().sum();
        starts.push(e.into_iter().map(|x| x / s).collect());
    }
    let mut best = TraceNormCoherence {
        value: exact_objective(m, &dephased),
        closest: dephased,
    };
    for start in starts {
        let x = descend(m, start, solver);
        let value = exact_objective(m, &x);
        if value < best.value {
            best = TraceNormCoherence { value, closest: x };
        }
    }
    Ok(best)
}

pub fn trace_norm_coherence(rho: &DensityMatrix) -> Result<f64> {
    Ok(trace_norm_coherence_with(rho, &CoherenceSolver::default())?.value)
}

/// Geometric coherence of a qubit, `(1 − √(1 − C²))/2` with `C` the ℓ1 coherence.
pub fn geometric_coherence_qubit(rho: &DensityMatrix) -> Result<f64> {
    require_dims(rho, &[2])?;
    Ok(geometric_from(l1_coherence(rho)))
}

/// Inputs within this distance of 1 are rounded to 1; `√(1 − x²)` has
/// unbounded slope there and would turn ulp-level noise into ~1e-8 errors.
const GEOMETRIC_SNAP: f64 = 1e-14;

fn geometric_from(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    if 1.0 - x < GEOMETRIC_SNAP {
        return 0.5;
    }
    (1.0 - ((1.0 - x) * (1.0 + x)).sqrt()) / 2.0
}

/// Wootters concurrence of a two-qubit state.
///
/// Uses the subnormalized eigen-ensemble `|w_i> = √p_i |e_i>`: the λ's are the
/// singular values of `τ_ij = <w_i| σy⊗σy |w_j*>`, which avoids square roots
/// of roundoff-level eigenvalues of `ρρ̃`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_dims(rho, &[2, 2])?;
    let yy = kron(&pauli_y(), &pauli_y());
    let eig = rho.eigen();
    let cols: Vec<usize> = (0..4)
        .filter(|&i| eig.values[i] > linalg::SQRT_ZERO_TOL)
        .collect();
    let w = CMatrix::from_fn(4, cols.len(), |r, k| {
        eig.vectors[(r, cols[k])] * eig.values[cols[k]].sqrt()
    });
    let tau = w.adjoint() * yy * w.map(|z| z.conj());
    let mut lam: Vec<f64> = tau.singular_values().iter().copied().collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    lam.resize(4, 0.0);
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// Geometric entanglement of a two-qubit state from its concurrence.
pub fn geometric_entanglement_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    Ok(geometric_from(concurrence(rho)?))
}

/// Separable state together with an explicit product decomposition.
#[derive(Debug, Clone)]
pub struct SeparableState {
    state: DensityMatrix,
    components: Vec<(f64, DensityMatrix, DensityMatrix)>,
}

impl SeparableState {
    /// Build `Σ w_i a_i ⊗ b_i`.
    pub fn from_components(components: Vec<(f64, DensityMatrix, DensityMatrix)>) -> Result<Self> {
        let (_, a0, b0) = components
            .first()
            .ok_or_else(|| MeasureError::BadCertificate("no components".into()))?;
        let dims = vec![a0.dim(), b0.dim()];
        let mut total = 0.0;
        let mut mat = CMatrix::zeros(dims[0] * dims[1], dims[0] * dims[1]);
        for (w, a, b) in &components {
            if *w < 0.0 {
                return Err(MeasureError::BadCertificate(format!("negative weight {w}")));
            }
            if a.dim() != dims[0] || b.dim() != dims[1] {
                return Err(MeasureError::BadCertificate("inconsistent factor dims".into()));
            }
            total += w;
            mat += kron(a.matrix(), b.matrix()).scale(*w);
        }
        if (total - 1.0).abs() > linalg::CONSTRUCTION_TOL {
            return Err(MeasureError::BadCertificate(format!("weights sum to {total}")));
        }
        let state = DensityMatrix::new(dims, mat)?;
        Ok(Self { state, components })
    }

    /// Check that `components` reproduce `state`.
    pub fn with_claim(
        state: DensityMatrix,
        components: Vec<(f64, DensityMatrix, DensityMatrix)>,
    ) -> Result<Self> {
        let built = Self::from_components(components)?;
        if built.state.dims() != state.dims() {
            return Err(MeasureError::BadCertificate("factor dims differ from claim".into()));
        }
        let err = linalg::max_abs_diff(built.state.matrix(), state.matrix());
        if err > linalg::CONSTRUCTION_TOL {
            return Err(MeasureError::BadCertificate(format!(
                "decomposition deviates from claimed state by {err:e}"
            )));
        }
        Ok(built)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn components(&self) -> &[(f64, DensityMatrix, DensityMatrix)] {
        &self.components
    }
}

/// `‖ρ − δ‖₁` for a certified separable `δ`, an upper bound on the
/// trace-norm entanglement of `ρ`.
pub fn trace_norm_entanglement_upper(rho: &DensityMatrix, candidate: &SeparableState) -> Result<f64> {
    if rho.dims() != candidate.state.dims() {
        return Err(MeasureError::WrongDims {
            expected: candidate.state.dims().to_vec(),
            actual: rho.dims().to_vec(),
        });
    }
    Ok(trace_norm(&(rho.matrix() - candidate.state.matrix()))?)
}

/// Trace-norm entanglement of the `d`-dimensional maximally entangled state, `2 − 2/d`.
pub fn trace_norm_entanglement_maxent(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(MeasureError::BadMaxEntDimension(d));
    }
    Ok(2.0 - 2.0 / d as f64)
}

/// Schmidt rank of a pure bipartite state whose nonzero Schmidt
/// coefficients are all equal; errors for any other state.
pub fn maximally_entangled_rank(rho: &DensityMatrix) -> Result<usize> {
    if rho.dims().len() != 2 {
        return Err(MeasureError::WrongDims {
            expected: vec![0, 0],
            actual: rho.dims().to_vec(),
        });
    }
    if (rho.purity() - 1.0).abs() > 1e-9 {
        return Err(MeasureError::NotMaximallyEntangled);
    }
    let reduced = partial_trace(rho, &[0])?;
    let eig = reduced.eigen();
    let nonzero: Vec<f64> = eig.values.iter().copied().filter(|&v| v > 1e-9).collect();
    let r = nonzero.len();
    if nonzero.iter().any(|&v| (v - 1.0 / r as f64).abs() > 1e-9) {
        return Err(MeasureError::NotMaximallyEntangled);
    }
    Ok(r)
}

/// Trace-norm entanglement of a pure maximally entangled state of any
/// embedding, using the closed form for its Schmidt rank.
pub fn trace_norm_entanglement_of_maxent_state(rho: &DensityMatrix) -> Result<f64> {
    match maximally_entangled_rank(rho)? {
        1 => Ok(0.0),
        d => trace_norm_entanglement_maxent(d),
    }
}

/// Quantum relative entropy `S(ρ‖σ)` in bits; `+∞` when the support of `ρ`
/// is not contained in that of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        }
        .into());
    }
    let er = rho.eigen();
    let es = sigma.eigen();
    let neg_entropy: f64 = er
        .values
        .iter()
        .filter(|&&v| v > LOG_ZERO_TOL)
        .map(|&v| v * v.log2())
        .sum();
    // Tr[ρ log σ] = Σ_k log λ_k <s_k|ρ|s_k>
    let mut cross = 0.0;
    for (k, &lam) in es.values.iter().enumerate() {
        let v = es.vectors.column(k);
        let weight = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if lam <= LOG_ZERO_TOL {
            if weight > LOG_ZERO_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * lam.log2();
    }
    Ok((neg_entropy - cross).max(0.0))
}

/// Named resource quantifier.
#[derive(Clone, Copy)]
pub struct ResourceMeasure {
    pub name: &'static str,
    pub evaluate: fn(&DensityMatrix) -> Result<f64>,
}

impl std::fmt::Debug for ResourceMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ResourceMeasure").field("name", &self.name).finish()
    }
}

impl ResourceMeasure {
    pub fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        (self.evaluate)(rho)
    }
}

pub const L1_COHERENCE: ResourceMeasure = ResourceMeasure {
    name: "l1_coherence",
    evaluate: |rho| Ok(l1_coherence(rho)),
};

pub const TRACE_NORM_COHERENCE: ResourceMeasure = ResourceMeasure {
    name: "trace_norm_coherence",
    evaluate: trace_norm_coherence,
};

pub const GEOMETRIC_COHERENCE: ResourceMeasure = ResourceMeasure {
    name: "geometric_coherence",
    evaluate: geometric_coherence_qubit,
};

pub const CONCURRENCE: ResourceMeasure = ResourceMeasure {
    name: "concurrence",
    evaluate: concurrence,
};

pub const GEOMETRIC_ENTANGLEMENT: ResourceMeasure = ResourceMeasure {
    name: "geometric_entanglement",
    evaluate: geometric_entanglement_two_qubit,
};

/// Closed-form trace-norm entanglement, defined on pure maximally entangled states only.
pub const MAXENT_TRACE_NORM_ENTANGLEMENT: ResourceMeasure = ResourceMeasure {
    name: "trace_norm_entanglement",
    evaluate: trace_norm_entanglement_of_maxent_state,
};

/// Probabilistic collection of states produced by a selective operation.
#[derive(Debug, Clone)]
pub struct Ensemble {
    branches: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(branches: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let total: f64 = branches.iter().map(|(q, _)| q).sum();
        if (total - 1.0).abs() > linalg::CONSTRUCTION_TOL
            || branches.iter().any(|(q, _)| !(0.0..=1.0).contains(q))
        {
            return Err(MeasureError::BadEnsemble(total));
        }
        Ok(Self { branches })
    }

    pub fn branches(&self) -> &[(f64, DensityMatrix)] {
        &self.branches
    }

    /// Unselective average state `Σ q_i σ_i`.
    pub fn average_state(&self) -> Result<DensityMatrix> {
        let (_, first) = &self.branches[0];
        let mut mat = CMatrix::zeros(first.dim(), first.dim());
        for (q, s) in &self.branches {
            mat += s.matrix().scale(*q);
        }
        Ok(DensityMatrix::from_noisy(first.dims().to_vec(), mat)?)
    }
}

/// Branches `(Tr[KρK†], KρK†/Tr[KρK†])` of a selective operation; zero-probability
/// branches are dropped.
pub fn selective_ensemble(rho: &DensityMatrix, kraus: &linalg::KrausSet) -> Result<Ensemble> {
    let mut branches = Vec::new();
    for k in kraus.operators() {
        let out = k * rho.matrix() * k.adjoint();
        let q = out.trace().re;
        if q <= LOG_ZERO_TOL {
            continue;
        }
        branches.push((q, DensityMatrix::from_noisy(rho.dims().to_vec(), out.unscale(q))?));
    }
    let total: f64 = branches.iter().map(|(q, _)| q).sum();
    for b in &mut branches {
        b.0 /= total;
    }
    Ensemble::new(branches)
}

/// `Σ q_i m(σ_i)`.
pub fn average_resource(ensemble: &Ensemble, measure: &ResourceMeasure) -> Result<f64> {
    ensemble
        .branches
        .iter()
        .map(|(q, s)| Ok(q * measure.eval(s)?))
        .sum()
}

/// Outcome of comparing a resource before and after a selective operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongMonotonicityCheck {
    pub before: f64,
    pub average_after: f64,
}

impl StrongMonotonicityCheck {
    pub fn violated(&self, tol: f64) -> bool {
        self.average_after > self.before + tol
    }
}

pub fn check_strong_monotonicity(
    rho: &DensityMatrix,
    kraus: &linalg::KrausSet,
    measure: &ResourceMeasure,
) -> Result<StrongMonotonicityCheck> {
    let before = measure.eval(rho)?;
    let ensemble = selective_ensemble(rho, kraus)?;
    Ok(StrongMonotonicityCheck {
        before,
        average_after: average_resource(&ensemble, measure)?,
    })
}
