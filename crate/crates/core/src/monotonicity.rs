//! Strong-monotonicity violation of the trace-norm entanglement.
//!
//! The family
//!
//! ```text
//! ρ(p) = (p/2) Σ_{i,j≤1} |ii><jj| + ((1−p)/3) Σ_{k,l∈{2,3,4}} |kk><ll|
//! ```
//!
//! on `5 ⊗ 5` is split by a local block measurement into a two-dimensional
//! and a three-dimensional maximally entangled state. Their average
//! trace-norm entanglement `p + (1−p)·4/3` exceeds the upper bound
//! `‖ρ(p) − δ‖₁` for `0.4 < p < 1`, where `δ = ½(|00><00| + |11><11|)`.
//! The exact trace-norm entanglement of `ρ(p)` is never computed; only the
//! certified upper bound is used.

use thiserror::Error;

use crate::linalg::{cr, identity, kron, CMatrix, DensityMatrix, Ket, KrausSet, LinalgError};
use crate::measures::{
    average_resource, selective_ensemble, trace_norm_entanglement_maxent,
    trace_norm_entanglement_upper, Ensemble, MeasureError, SeparableState,
    MAXENT_TRACE_NORM_ENTANGLEMENT,
};

/// Local dimension of each party.
pub const LOCAL_DIM: usize = 5;
/// Analytic start of the violation interval.
pub const ANALYTIC_CROSSING: f64 = 0.4;
/// Margin by which the average must exceed the bound to count as a violation.
pub const VIOLATION_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonotonicityError {
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

pub type Result<T> = std::result::Result<T, MonotonicityError>;

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MonotonicityError::BadProbability(p));
    }
    Ok(())
}

fn diagonal_index(k: usize) -> usize {
    k * LOCAL_DIM + k
}

pub fn build_violation_state(p: f64) -> Result<DensityMatrix> {
    check_p(p)?;
    let d = LOCAL_DIM * LOCAL_DIM;
    let mut m = CMatrix::zeros(d, d);
    for i in 0..2 {
        for j in 0..2 {
            m[(diagonal_index(i), diagonal_index(j))] = cr(p / 2.0);
        }
    }
    for k in 2..5 {
        for l in 2..5 {
            m[(diagonal_index(k), diagonal_index(l))] = cr((1.0 - p) / 3.0);
        }
    }
    Ok(DensityMatrix::new(vec![LOCAL_DIM, LOCAL_DIM], m)?)
}

/// `K₁ = Σ_{i≤1}|i><i| ⊗ I`, `K₂ = Σ_{j≥2}|j><j| ⊗ I`.
pub fn measurement_kraus() -> KrausSet {
    let mut low = CMatrix::zeros(LOCAL_DIM, LOCAL_DIM);
    let mut high = CMatrix::zeros(LOCAL_DIM, LOCAL_DIM);
    for i in 0..LOCAL_DIM {
        if i < 2 {
            low[(i, i)] = cr(1.0);
        } else {
            high[(i, i)] = cr(1.0);
        }
    }
    let id = identity(LOCAL_DIM);
    KrausSet::new(vec![kron(&low, &id), kron(&high, &id)]).expect("projective measurement")
}

/// Post-measurement ensemble `{(q₁, σ₁), (q₂, σ₂)}`; empty branches are dropped.
pub fn measurement_branches(rho: &DensityMatrix) -> Result<Ensemble> {
    Ok(selective_ensemble(rho, &measurement_kraus())?)
}

/// `δ = ½(|00><00| + |11><11|)` with its product decomposition.
pub fn separable_certificate_delta() -> SeparableState {
    let factor = |k: usize| Ket::basis(LOCAL_DIM, k).projector();
    SeparableState::from_components(vec![
        (0.5, factor(0), factor(0)),
        (0.5, factor(1), factor(1)),
    ])
    .expect("valid product decomposition")
}

/// `‖ρ(p) − δ‖₁` in closed form: `2 − 2p` for `p < ½`, else `1`.
pub fn upper_bound_closed_form(p: f64) -> f64 {
    if p < 0.5 {
        2.0 - 2.0 * p
    } else {
        1.0
    }
}

/// `p·E_t(σ₁) + (1−p)·E_t(σ₂)` from the closed forms.
pub fn average_closed_form(p: f64) -> f64 {
    let e2 = trace_norm_entanglement_maxent(2).expect("d ≥ 2");
    let e3 = trace_norm_entanglement_maxent(3).expect("d ≥ 2");
    p * e2 + (1.0 - p) * e3
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolationPoint {
    pub p: f64,
    /// Upper bound on the trace-norm entanglement of `ρ(p)`.
    pub upper_bound_et: f64,
    /// Average trace-norm entanglement of the measurement branches.
    pub average_et: f64,
    pub violated: bool,
}

pub fn violation_point(p: f64, delta: &SeparableState) -> Result<ViolationPoint> {
    let rho = build_violation_state(p)?;
    let upper = trace_norm_entanglement_upper(&rho, delta)?;
    let branches = measurement_branches(&rho)?;
    let average = average_resource(&branches, &MAXENT_TRACE_NORM_ENTANGLEMENT)?;
    Ok(ViolationPoint {
        p,
        upper_bound_et: upper,
        average_et: average,
        violated: average > upper + VIOLATION_TOL,
    })
}

pub fn violation_curve(p_grid: &[f64]) -> Result<Vec<ViolationPoint>> {
    let delta = separable_certificate_delta();
    p_grid.iter().map(|&p| violation_point(p, &delta)).collect()
}

/// `min, min+step, …` up to `max` (inclusive when it lands on the grid).
pub fn p_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(min <= max) || min < 0.0 || max > 1.0 {
        return Err(MonotonicityError::BadGrid(format!(
            "min={min} max={max} step={step}"
        )));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| (min + i as f64 * step).min(max)).collect())
}

/// First and last violated grid points, if any.
pub fn violation_region(points: &[ViolationPoint]) -> Option<(f64, f64)> {
    let first = points.iter().find(|pt| pt.violated)?;
    let last = points.iter().rev().find(|pt| pt.violated)?;
    Some((first.p, last.p))
}

/// Crossing of the average and the bound on `[0, ½]`, found by bisection on
/// the closed forms.
pub fn crossing_by_bisection(tol: f64) -> f64 {
    let gap = |p: f64| average_closed_form(p) - upper_bound_closed_form(p);
    let (mut lo, mut hi) = (0.0, 0.5);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fidelity, maximally_entangled, partial_trace, CVector, Tensor};

    fn embedded_maxent(levels: &[usize]) -> DensityMatrix {
        let mut amps = CVector::zeros(LOCAL_DIM * LOCAL_DIM);
        for &k in levels {
            amps[diagonal_index(k)] = cr(1.0);
        }
        Ket::normalize(vec![LOCAL_DIM, LOCAL_DIM], amps)
            .unwrap()
            .projector()
    }

    #[test]
    fn endpoint_states_are_pure_maximally_entangled() {
        let one = build_violation_state(1.0).unwrap();
        assert!((fidelity(&one, &embedded_maxent(&[0, 1])).unwrap() - 1.0).abs() < 1e-10);
        let zero = build_violation_state(0.0).unwrap();
        assert!((fidelity(&zero, &embedded_maxent(&[2, 3, 4])).unwrap() - 1.0).abs() < 1e-10);
        let mid = build_violation_state(0.37).unwrap();
        assert!((mid.matrix().trace().re - 1.0).abs() < 1e-14);
        assert!(build_violation_state(1.2).is_err());
    }

    #[test]
    fn reduced_state_bookkeeping() {
        let red = partial_trace(&build_violation_state(0.5).unwrap(), &[0]).unwrap();
        let expect = [0.25, 0.25, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((red.entry(k, k).re - e).abs() < 1e-12);
        }
    }

    #[test]
    fn branches_have_the_expected_weights_and_states() {
        let branches = measurement_branches(&build_violation_state(0.3).unwrap()).unwrap();
        let b = branches.branches();
        assert_eq!(b.len(), 2);
        assert!((b[0].0 - 0.3).abs() < 1e-12);
        assert!((b[1].0 - 0.7).abs() < 1e-12);
        assert!((fidelity(&b[0].1, &embedded_maxent(&[0, 1])).unwrap() - 1.0).abs() < 1e-10);
        assert!((fidelity(&b[1].1, &embedded_maxent(&[2, 3, 4])).unwrap() - 1.0).abs() < 1e-10);
        let single = measurement_branches(&build_violation_state(1.0).unwrap()).unwrap();
        assert_eq!(single.branches().len(), 1);
    }

    #[test]
    fn delta_certificate_and_bounds() {
        let delta = separable_certificate_delta();
        assert_eq!(delta.components().len(), 2);
        let f = |k: usize| Ket::basis(LOCAL_DIM, k).projector();
        let recon = f(0).tensor(&f(0)).matrix().scale(0.5) + f(1).tensor(&f(1)).matrix().scale(0.5);
        assert!(crate::linalg::max_abs_diff(delta.state().matrix(), &recon) < 1e-15);
        let b = |p| trace_norm_entanglement_upper(&build_violation_state(p).unwrap(), &delta).unwrap();
        assert!((b(0.3) - 1.4).abs() < 1e-9);
        assert!((b(0.7) - 1.0).abs() < 1e-9);
        assert!((b(1.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn curve_examples() {
        let pts = violation_curve(&[0.0, 0.2, 0.5, 1.0]).unwrap();
        assert!((pts[0].average_et - 4.0 / 3.0).abs() < 1e-12);
        assert!((pts[0].upper_bound_et - 2.0).abs() < 1e-9 && !pts[0].violated);
        assert!((pts[1].upper_bound_et - 1.6).abs() < 1e-9);
        assert!((pts[1].average_et - (0.2 + 0.8 * 4.0 / 3.0)).abs() < 1e-12 && !pts[1].violated);
        assert!((pts[2].average_et - 7.0 / 6.0).abs() < 1e-12);
        assert!((pts[2].upper_bound_et - 1.0).abs() < 1e-9 && pts[2].violated);
        assert!(!pts[3].violated);
    }

    #[test]
    fn bisection_agrees_with_analytic_crossing() {
        assert!((crossing_by_bisection(1e-12) - ANALYTIC_CROSSING).abs() < 1e-10);
    }

    #[test]
    fn grid_construction() {
        let g = p_grid(0.0, 1.0, 1e-3).unwrap();
        assert_eq!(g.len(), 1001);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(p_grid(0.0, 1.0, 0.0).is_err());
        assert!(p_grid(0.5, 0.2, 0.1).is_err());
    }

    #[test]
    fn closed_form_maxent_values() {
        let e = |d| {
            crate::measures::trace_norm_entanglement_of_maxent_state(&maximally_entangled(d)).unwrap()
        };
        assert!((e(2) - 1.0).abs() < 1e-12);
        assert!((e(3) - 4.0 / 3.0).abs() < 1e-12);
    }
}
