//! Coherence-to-entanglement activation with an incoherent ancilla.
//!
//! A system qubit `ρ` is coupled to a diagonal ancilla and an incoherent
//! operation is applied to `ρ ⊗ σ`. The entanglement of the output never
//! exceeds the coherence of `ρ`; the CNOT attains equality for the
//! (ℓ1, concurrence) and (geometric, geometric) pairs.

use rand::Rng;
use thiserror::Error;

use crate::linalg::{
    cr, hadamard, identity, kron, CMatrix, DensityMatrix, KrausSet, Ket, LinalgError,
    Tensor, UnitaryOp, C64,
};
use crate::measures::{
    concurrence, geometric_coherence_qubit, geometric_entanglement_two_qubit, l1_coherence,
    MeasureError,
};
use crate::random::{complex_gaussian, rng_from_seed};

/// Entries with modulus at or below this count as structural zeros.
pub const ZERO_ENTRY_TOL: f64 = 1e-12;
/// Slack allowed when checking `E(out) ≤ C(in)`.
pub const BOUND_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActivationError {
    #[error("ancilla is not incoherent (largest off-diagonal {0:e})")]
    CoherentAncilla(f64),
    #[error("Kraus operator {index} maps basis state {column} onto a superposition")]
    NotIncoherent { index: usize, column: usize },
    #[error("operation acts on dimension {0}, expected 4")]
    WrongDimension(usize),
    #[error("unsupported measure pair ({0}, {1})")]
    UnsupportedPair(String, String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

pub type Result<T> = std::result::Result<T, ActivationError>;

/// Kraus set whose operators each have at most one nonzero entry per column.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentKrausSet {
    kraus: KrausSet,
}

impl IncoherentKrausSet {
    pub fn new(kraus: KrausSet) -> Result<Self> {
        for (index, k) in kraus.operators().iter().enumerate() {
            for column in 0..k.ncols() {
                let nonzero = k.column(column).iter().filter(|z| z.norm() > ZERO_ENTRY_TOL).count();
                if nonzero > 1 {
                    return Err(ActivationError::NotIncoherent { index, column });
                }
            }
        }
        Ok(Self { kraus })
    }

    pub fn from_unitary(u: &UnitaryOp) -> Result<Self> {
        Self::new(KrausSet::from_unitary(u))
    }

    pub fn kraus(&self) -> &KrausSet {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus.dim()
    }
}

/// Operation applied to system ⊗ ancilla.
#[derive(Debug, Clone, PartialEq)]
pub enum FreeOperation {
    Unitary(UnitaryOp),
    Kraus(IncoherentKrausSet),
}

impl From<UnitaryOp> for FreeOperation {
    fn from(u: UnitaryOp) -> Self {
        Self::Unitary(u)
    }
}

impl From<IncoherentKrausSet> for FreeOperation {
    fn from(k: IncoherentKrausSet) -> Self {
        Self::Kraus(k)
    }
}

#[derive(Debug, Clone)]
pub struct ActivationRecord {
    pub theta: f64,
    pub input_coherence: f64,
    pub output_state: DensityMatrix,
    pub output_concurrence: f64,
}

/// `cos θ |H> + sin θ |V>` as a density matrix.
pub fn prepare_system(theta: f64) -> DensityMatrix {
    Ket::qubit(cr(theta.cos()), cr(theta.sin()))
        .expect("unit vector")
        .projector()
}

/// `|0><0|`, the `|H><H|` ancilla.
pub fn default_ancilla() -> DensityMatrix {
    Ket::basis(2, 0).projector()
}

/// Computational-basis CNOT, control on the first qubit.
pub fn cnot() -> UnitaryOp {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = cr(1.0);
    m[(1, 1)] = cr(1.0);
    m[(3, 2)] = cr(1.0);
    m[(2, 3)] = cr(1.0);
    UnitaryOp::new(m).expect("permutation matrix")
}

pub fn controlled_z() -> UnitaryOp {
    let mut m = identity(4);
    m[(3, 3)] = cr(-1.0);
    UnitaryOp::new(m).expect("diagonal unitary")
}

/// `(I ⊗ H) · CZ · (I ⊗ H)`.
pub fn cnot_from_controlled_phase() -> UnitaryOp {
    let ih = UnitaryOp::new(kron(&identity(2), &hadamard())).expect("unitary");
    ih.compose(&controlled_z())
        .and_then(|m| m.compose(&ih))
        .expect("same dimension")
}

fn ensure_incoherent_ancilla(ancilla: &DensityMatrix) -> Result<()> {
    let worst = max_off_diagonal(ancilla.matrix());
    if worst > ZERO_ENTRY_TOL {
        return Err(ActivationError::CoherentAncilla(worst));
    }
    Ok(())
}

/// Apply `op` to `rho ⊗ ancilla`.
pub fn activate(
    rho: &DensityMatrix,
    ancilla: &DensityMatrix,
    op: &FreeOperation,
) -> Result<DensityMatrix> {
    ensure_incoherent_ancilla(ancilla)?;
    let joint = rho.tensor(ancilla);
    let out = match op {
        FreeOperation::Unitary(u) => {
            if u.dim() != 4 {
                return Err(ActivationError::WrongDimension(u.dim()));
            }
            joint.evolve(u)?
        }
        FreeOperation::Kraus(k) => {
            if k.dim() != 4 {
                return Err(ActivationError::WrongDimension(k.dim()));
            }
            joint.apply_channel(k.kraus())?
        }
    };
    Ok(out.with_dims(vec![2, 2])?)
}

/// Run the CNOT activation for one preparation angle.
pub fn activation_record(theta: f64) -> Result<ActivationRecord> {
    let rho = prepare_system(theta);
    let out = activate(&rho, &default_ancilla(), &cnot().into())?;
    Ok(ActivationRecord {
        theta,
        input_coherence: l1_coherence(&rho),
        output_concurrence: concurrence(&out)?,
        output_state: out,
    })
}

/// Coherence/entanglement pairs for which the activation bound is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurePair {
    L1Concurrence,
    Geometric,
}

impl MeasurePair {
    pub fn from_names(coherence: &str, entanglement: &str) -> Result<Self> {
        match (coherence, entanglement) {
            ("l1", "concurrence") => Ok(Self::L1Concurrence),
            ("geometric", "geometric") => Ok(Self::Geometric),
            (c, e) => Err(ActivationError::UnsupportedPair(c.into(), e.into())),
        }
    }

    fn coherence(self, rho: &DensityMatrix) -> Result<f64> {
        Ok(match self {
            Self::L1Concurrence => l1_coherence(rho),
            Self::Geometric => geometric_coherence_qubit(rho)?,
        })
    }

    fn entanglement(self, rho: &DensityMatrix) -> Result<f64> {
        Ok(match self {
            Self::L1Concurrence => concurrence(rho)?,
            Self::Geometric => geometric_entanglement_two_qubit(rho)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// Entanglement of the output.
    pub lhs: f64,
    /// Coherence of the input.
    pub rhs: f64,
    pub holds: bool,
}

/// Check `E(Λ[ρ ⊗ |0><0|]) ≤ C(ρ)`.
pub fn verify_bound(
    rho: &DensityMatrix,
    op: &IncoherentKrausSet,
    pair: MeasurePair,
) -> Result<BoundReport> {
    let out = activate(rho, &default_ancilla(), &FreeOperation::Kraus(op.clone()))?;
    let lhs = pair.entanglement(&out)?;
    let rhs = pair.coherence(rho)?;
    Ok(BoundReport {
        lhs,
        rhs,
        holds: lhs <= rhs + BOUND_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncoherentKind {
    Unitary,
    Kraus,
}

fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())
}

/// Random incoherent operation on two qubits.
///
/// `Unitary` draws a permutation times a diagonal phase. `Kraus` draws 2–4
/// operators `P_k D_k` (permutation × diagonal) with `Σ_k |D_k|² = I`.
pub fn sample_incoherent_operation_with<R: Rng + ?Sized>(
    rng: &mut R,
    kind: IncoherentKind,
) -> IncoherentKrausSet {
    const D: usize = 4;
    let ops = match kind {
        IncoherentKind::Unitary => {
            let perm = random_permutation(rng, D);
            let mut m = CMatrix::zeros(D, D);
            for (col, &row) in perm.iter().enumerate() {
                m[(row, col)] = random_phase(rng);
            }
            vec![m]
        }
        IncoherentKind::Kraus => {
            let count = rng.random_range(2..=4);
            // column-wise amplitudes with unit norm across operators
            let mut amps = vec![vec![cr(0.0); D]; count];
            for col in 0..D {
                let raw: Vec<C64> = (0..count).map(|_| complex_gaussian(rng)).collect();
                let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for k in 0..count {
                    amps[k][col] = raw[k] / norm;
                }
            }
            (0..count)
                .map(|k| {
                    let perm = random_permutation(rng, D);
                    let mut m = CMatrix::zeros(D, D);
                    for (col, &row) in perm.iter().enumerate() {
                        m[(row, col)] = amps[k][col];
                    }
                    m
                })
                .collect()
        }
    };
    let kraus = KrausSet::new(ops).expect("complete by construction");
    IncoherentKrausSet::new(kraus).expect("incoherent by construction")
}

pub fn sample_incoherent_operation(seed: u64, kind: IncoherentKind) -> IncoherentKrausSet {
    sample_incoherent_operation_with(&mut rng_from_seed(seed), kind)
}

/// Default preparation grid: 0° to 90° in 15° steps, in radians.
pub fn default_theta_grid() -> Vec<f64> {
    (0..=6).map(|k| (15.0 * k as f64).to_radians()).collect()
}

/// Max off-diagonal modulus, used to check that diagonal inputs stay diagonal.
pub fn max_off_diagonal(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}
