//! Dense complex linear algebra and quantum-state carriers.
//!
//! All matrices are `nalgebra::DMatrix<Complex64>`, which stores entries in
//! column-major order. Tensor factors are ordered left to right, so the
//! composite index of `|i>⊗|j>` with factor dims `[da, db]` is `i·db + j`.
//! Dimensions in this crate never exceed 25.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for construction-time validation of states and operators.
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Tolerance for derived identities checked in tests.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Eigenvalues above `-CLIP_TOL` and below zero are treated as zero.
pub const CLIP_TOL: f64 = 1e-10;
/// Eigenvalues below this are roundoff when taking square roots of states.
pub const SQRT_ZERO_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("Kraus operators are not complete (max deviation {0:e})")]
    NotComplete(f64),
    #[error("Kraus set is empty or has inconsistent shapes")]
    BadKrausShape,
    #[error("vector has zero norm")]
    ZeroNorm,
    #[error("factor index {index} out of range for {factors} factors")]
    BadFactorIndex { index: usize, factors: usize },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Build a matrix from row-major nested slices.
pub fn matrix_from_rows(rows: &[&[C64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entry modulus of a vector.
pub fn vec_max_abs(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

fn ensure_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| cr(v)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }

    /// Rebuild `f(M)` by applying `f` to each eigenvalue.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| cr(f(v))),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }
}

pub fn eig_hermitian(m: &CMatrix) -> Result<HermitianEigen> {
    ensure_square(m)?;
    let err = hermiticity_error(m);
    if err > CONSTRUCTION_TOL {
        return Err(LinalgError::NotHermitian(err));
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    ensure_square(m)?;
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    if hermiticity_error(m) <= CONSTRUCTION_TOL {
        let eig = eig_hermitian(m)?;
        return Ok(eig.values.iter().map(|v| v.abs()).sum());
    }
    Ok(m.clone().singular_values().iter().sum())
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let eig = eig_hermitian(m)?;
    if let Some(&min) = eig.values.last() {
        if min < -CLIP_TOL {
            return Err(LinalgError::NotPsd(min));
        }
    }
    Ok(eig.map(|v| v.max(0.0).sqrt()))
}

/// Normalized pure state vector with tensor-factor bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    dims: Vec<usize>,
    amps: CVector,
}

impl Ket {
    /// Normalizes `amps`; `dims` must multiply to its length.
    pub fn normalize(dims: Vec<usize>, amps: CVector) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != amps.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: total,
                actual: amps.len(),
            });
        }
        let norm = amps.norm();
        if norm < 1e-300 {
            return Err(LinalgError::ZeroNorm);
        }
        Ok(Self {
            dims,
            amps: amps.unscale(norm),
        })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::normalize(vec![amps.len()], CVector::from_column_slice(amps))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = CVector::zeros(dim);
        amps[index] = cr(1.0);
        Self {
            dims: vec![dim],
            amps,
        }
    }

    pub fn qubit(alpha: C64, beta: C64) -> Result<Self> {
        Self::from_slice(&[alpha, beta])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    /// Apply a unitary, keeping factor structure.
    pub fn evolve(&self, u: &UnitaryOp) -> Result<Ket> {
        if u.dim() != self.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim(),
                actual: u.dim(),
            });
        }
        Ok(Ket {
            dims: self.dims.clone(),
            amps: u.matrix() * &self.amps,
        })
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at `CONSTRUCTION_TOL`.
    pub fn new(dims: Vec<usize>, mat: CMatrix) -> Result<Self> {
        ensure_square(&mat)?;
        let total: usize = dims.iter().product();
        if total != mat.nrows() {
            return Err(LinalgError::DimensionMismatch {
                expected: total,
                actual: mat.nrows(),
            });
        }
        let herm = hermiticity_error(&mat);
        if herm > CONSTRUCTION_TOL {
            return Err(LinalgError::NotHermitian(herm));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > CONSTRUCTION_TOL || tr.im.abs() > CONSTRUCTION_TOL {
            return Err(LinalgError::BadTrace(tr.re));
        }
        let eig = eig_hermitian(&mat)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -CONSTRUCTION_TOL {
            return Err(LinalgError::NotPsd(min));
        }
        let mat = (&mat + mat.adjoint()).scale(0.5);
        Ok(Self { dims, mat })
    }

    /// Clip small negative eigenvalues and renormalize before validating.
    ///
    /// Use for matrices that are a valid state up to accumulated roundoff.
    pub fn from_noisy(dims: Vec<usize>, mat: CMatrix) -> Result<Self> {
        ensure_square(&mat)?;
        let herm = hermiticity_error(&mat);
        if herm > CONSTRUCTION_TOL {
            return Err(LinalgError::NotHermitian(herm));
        }
        let eig = eig_hermitian(&mat)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -CLIP_TOL {
            return Err(LinalgError::NotPsd(min));
        }
        let clipped = eig.map(|v| v.max(0.0));
        let tr = clipped.trace().re;
        if tr <= 0.0 {
            return Err(LinalgError::BadTrace(tr));
        }
        Self::new(dims, clipped.unscale(tr))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            dims,
            mat: identity(d).unscale(d as f64),
        }
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(dims: Vec<usize>, probs: &[f64]) -> Result<Self> {
        let mat = CMatrix::from_diagonal(&CVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| cr(p)),
        ));
        Self::new(dims, mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Same matrix, relabelled factor structure.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != self.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim(),
                actual: total,
            });
        }
        Ok(Self {
            dims,
            mat: self.mat.clone(),
        })
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &UnitaryOp) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim(),
                actual: u.dim(),
            });
        }
        let mat = u.matrix() * &self.mat * u.matrix().adjoint();
        Self::from_noisy(self.dims.clone(), mat)
    }

    /// `Σ K ρ K†` for a complete Kraus set.
    pub fn apply_channel(&self, kraus: &KrausSet) -> Result<Self> {
        if kraus.dim() != self.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim(),
                actual: kraus.dim(),
            });
        }
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for k in kraus.operators() {
            out += k * &self.mat * k.adjoint();
        }
        Self::from_noisy(self.dims.clone(), out)
    }

    /// Zero every off-diagonal entry.
    pub fn dephase(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: CMatrix::from_diagonal(&self.mat.diagonal()),
        }
    }

    pub fn eigen(&self) -> HermitianEigen {
        eig_hermitian(&self.mat).expect("density matrix is Hermitian by construction")
    }

    /// Principal square root; eigenvalues below `SQRT_ZERO_TOL` count as zero.
    pub fn sqrt(&self) -> CMatrix {
        self.eigen()
            .map(|v| if v < SQRT_ZERO_TOL { 0.0 } else { v.sqrt() })
    }
}

/// Square matrix not yet checked for unitarity.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCandidate(pub CMatrix);

impl MatrixCandidate {
    pub fn unitarity_error(&self) -> f64 {
        let n = self.0.nrows();
        max_abs_diff(&(self.0.adjoint() * &self.0), &identity(n))
    }

    pub fn into_unitary(self) -> Result<UnitaryOp> {
        UnitaryOp::new(self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    mat: CMatrix,
}

impl UnitaryOp {
    pub fn new(mat: CMatrix) -> Result<Self> {
        ensure_square(&mat)?;
        let err = MatrixCandidate(mat.clone()).unitarity_error();
        if err > CONSTRUCTION_TOL {
            return Err(LinalgError::NotUnitary(err));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    /// `self · other` (other acts first).
    pub fn compose(&self, other: &UnitaryOp) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(Self {
            mat: &self.mat * &other.mat,
        })
    }
}

/// Complete set of Kraus operators, `Σ K†K = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<CMatrix>,
}

impl KrausSet {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops.first().ok_or(LinalgError::BadKrausShape)?;
        let (r, cdim) = first.shape();
        if r != cdim || ops.iter().any(|k| k.shape() != (r, cdim)) {
            return Err(LinalgError::BadKrausShape);
        }
        let mut sum = CMatrix::zeros(r, r);
        for k in &ops {
            sum += k.adjoint() * k;
        }
        let err = max_abs_diff(&sum, &identity(r));
        if err > CONSTRUCTION_TOL {
            return Err(LinalgError::NotComplete(err));
        }
        Ok(Self { ops })
    }

    pub fn from_unitary(u: &UnitaryOp) -> Self {
        Self {
            ops: vec![u.matrix().clone()],
        }
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.ops
    }
}

/// Kronecker product that concatenates factor structure.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for Ket {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ket {
            dims,
            amps: self.amps.kronecker(&other.amps),
        }
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            mat: kron(&self.mat, &other.mat),
        }
    }
}

impl Tensor for UnitaryOp {
    fn tensor(&self, other: &Self) -> Self {
        UnitaryOp {
            mat: kron(&self.mat, &other.mat),
        }
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Reduced state on the factors listed in `keep` (in ascending factor order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let n = dims.len();
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if let Some(&bad) = keep_sorted.iter().find(|&&k| k >= n) {
        return Err(LinalgError::BadFactorIndex {
            index: bad,
            factors: n,
        });
    }
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..n).filter(|k| !keep_sorted.contains(k)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    let mut strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut idx = 0;
        let mut rem = kept_idx;
        for (pos, &f) in keep_sorted.iter().enumerate().rev() {
            let d = kept_dims[pos];
            idx += (rem % d) * strides[f];
            rem /= d;
        }
        let mut rem = traced_idx;
        for (pos, &f) in traced.iter().enumerate().rev() {
            let d = traced_dims[pos];
            idx += (rem % d) * strides[f];
            rem /= d;
        }
        idx
    };

    let m = rho.matrix();
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                acc += m[(compose(i, t), compose(j, t))];
            }
            out[(i, j)] = acc;
        }
    }
    let dims_out = if kept_dims.is_empty() { vec![1] } else { kept_dims };
    DensityMatrix::from_noisy(dims_out, out)
}

/// Uhlmann fidelity `‖√ρ √σ‖₁²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let prod = rho.sqrt() * sigma.sqrt();
    let tn: f64 = prod.singular_values().iter().sum();
    Ok((tn * tn).clamp(0.0, 1.0))
}

pub fn pauli_x() -> CMatrix {
    matrix_from_rows(&[&[cr(0.0), cr(1.0)], &[cr(1.0), cr(0.0)]])
}

pub fn pauli_y() -> CMatrix {
    matrix_from_rows(&[&[cr(0.0), c(0.0, -1.0)], &[c(0.0, 1.0), cr(0.0)]])
}

pub fn pauli_z() -> CMatrix {
    matrix_from_rows(&[&[cr(1.0), cr(0.0)], &[cr(0.0), cr(-1.0)]])
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    matrix_from_rows(&[&[cr(h), cr(h)], &[cr(h), cr(-h)]])
}

/// `(|00> + |11>)/√2` as a density matrix on `[2, 2]`.
pub fn bell_phi_plus() -> DensityMatrix {
    maximally_entangled(2)
}

/// `(1/d) Σ_{ij} |ii><jj|` on `[d, d]`.
pub fn maximally_entangled(d: usize) -> DensityMatrix {
    let mut amps = CVector::zeros(d * d);
    for i in 0..d {
        amps[i * d + i] = cr(1.0);
    }
    Ket::normalize(vec![d, d], amps)
        .expect("nonzero vector")
        .projector()
}

/// `(1/d) Σ_{ij} |i><j|`.
pub fn maximally_coherent(d: usize) -> DensityMatrix {
    DensityMatrix {
        dims: vec![d],
        mat: CMatrix::from_element(d, d, cr(1.0 / d as f64)),
    }
}
