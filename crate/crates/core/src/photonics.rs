//! Two-photon linear optics: a post-selected PPBS controlled-phase gate.
//!
//! One photon enters the system arm and one the ancilla arm; their
//! polarizations carry the qubits (`|0> = |H>`, `|1> = |V>`). Every element
//! acts linearly on the four optical modes, ordered system-H, system-V,
//! ancilla-H, ancilla-V. Attenuators are subunitary; the missing amplitude
//! is treated as lost and never detected.
//!
//! Partial distinguishability is a convex mixture. With weight `xi` the
//! photons interfere (bosonic amplitudes from 2×2 permanents); with weight
//! `1 − xi` they propagate independently and the two ways of landing one
//! photon in each arm add incoherently.
//!
//! The ideal controlled-phase core is a central PPBS (`tH² = 2/3`, `tV = 0`)
//! followed by `√(1/3)` attenuation of V in both arms and a 0° half-wave plate
//! on each arm. The V attenuation balances the `1/3` two-photon amplitude of
//! `|HH>`; the wave plates move the sign flip from `|HH>` to `|VV>`.

use rand::Rng;
use thiserror::Error;

use crate::linalg::{c, cr, identity, CMatrix, CVector, DensityMatrix, Ket, LinalgError, UnitaryOp, C64};
use crate::random::{derived_rng, multinomial};

/// Success probability of the ideal post-selected gate.
pub const IDEAL_SUCCESS: f64 = 1.0 / 9.0;
/// HOM visibility of the ideal PPBS with perfectly indistinguishable photons.
pub const IDEAL_HOM_VISIBILITY: f64 = 0.8;
const ZERO_SUCCESS_TOL: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhotonicsError {
    #[error("distinguishability xi = {0} outside [0, 1]")]
    BadXi(f64),
    #[error("invalid element parameter: {0}")]
    BadElement(String),
    #[error("coincidence probability is zero")]
    ZeroSuccess,
    #[error("circuit contains no PPBS")]
    NoPpbs,
    #[error("polarization input must be a single qubit")]
    BadInput,
    #[error("value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, PhotonicsError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    System,
    Ancilla,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub spatial: Arm,
    pub polarization: Polarization,
}

impl ModeIndex {
    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        let arm = match self.spatial {
            Arm::System => 0,
            Arm::Ancilla => 2,
        };
        arm + match self.polarization {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        assert!(i < Self::COUNT, "mode index out of range");
        ModeIndex {
            spatial: if i < 2 { Arm::System } else { Arm::Ancilla },
            polarization: if i % 2 == 0 { Polarization::H } else { Polarization::V },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveplateKind {
    Half,
    Quarter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalElement {
    /// Fast-axis angle in radians.
    Waveplate { kind: WaveplateKind, angle: f64, arm: Arm },
    /// Amplitude transmissivities; reflection keeps a photon in its arm.
    Ppbs { t_h: f64, t_v: f64 },
    Attenuator { arm: Arm, polarization: Polarization, amplitude: f64 },
}

impl OpticalElement {
    pub fn hwp_deg(angle_deg: f64, arm: Arm) -> Self {
        OpticalElement::Waveplate { kind: WaveplateKind::Half, angle: angle_deg.to_radians(), arm }
    }

    pub fn qwp_deg(angle_deg: f64, arm: Arm) -> Self {
        OpticalElement::Waveplate { kind: WaveplateKind::Quarter, angle: angle_deg.to_radians(), arm }
    }

    pub fn ideal_ppbs() -> Self {
        OpticalElement::Ppbs { t_h: (2.0f64 / 3.0).sqrt(), t_v: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64, what: &str| {
            if x.is_finite() && (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(PhotonicsError::BadElement(format!("{what} = {x}")))
            }
        };
        match *self {
            OpticalElement::Waveplate { angle, .. } => {
                if angle.is_finite() {
                    Ok(())
                } else {
                    Err(PhotonicsError::BadElement(format!("angle = {angle}")))
                }
            }
            OpticalElement::Ppbs { t_h, t_v } => {
                unit(t_h, "t_h")?;
                unit(t_v, "t_v")
            }
            OpticalElement::Attenuator { amplitude, .. } => unit(amplitude, "amplitude"),
        }
    }

    /// Single-photon 4×4 mode transfer matrix.
    pub fn transfer(&self) -> CMatrix {
        match *self {
            OpticalElement::Waveplate { kind, angle, arm } => {
                let jones = match kind {
                    WaveplateKind::Half => half_wave_jones(angle),
                    WaveplateKind::Quarter => quarter_wave_jones(angle),
                };
                let mut m = identity(4);
                let off = ModeIndex { spatial: arm, polarization: Polarization::H }.index();
                m.view_mut((off, off), (2, 2)).copy_from(&jones);
                m
            }
            OpticalElement::Ppbs { t_h, t_v } => {
                let mut m = CMatrix::zeros(4, 4);
                for (pol, t) in [(Polarization::H, t_h), (Polarization::V, t_v)] {
                    let r = (1.0 - t * t).max(0.0).sqrt();
                    let s = ModeIndex { spatial: Arm::System, polarization: pol }.index();
                    let a = ModeIndex { spatial: Arm::Ancilla, polarization: pol }.index();
                    m[(s, s)] = cr(r);
                    m[(a, s)] = cr(t);
                    m[(s, a)] = cr(t);
                    m[(a, a)] = cr(-r);
                }
                m
            }
            OpticalElement::Attenuator { arm, polarization, amplitude } => {
                let mut m = identity(4);
                let k = ModeIndex { spatial: arm, polarization }.index();
                m[(k, k)] = cr(amplitude);
                m
            }
        }
    }
}

/// `[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`; 22.5° gives a Hadamard.
pub fn half_wave_jones(angle: f64) -> CMatrix {
    let (s, co) = (2.0 * angle).sin_cos();
    CMatrix::from_row_slice(2, 2, &[cr(co), cr(s), cr(s), cr(-co)])
}

/// Quarter-wave plate with fast axis at `angle`, global phase dropped.
pub fn quarter_wave_jones(angle: f64) -> CMatrix {
    let (s, co) = angle.sin_cos();
    let i = c(0.0, 1.0);
    let off = c(1.0, -1.0) * (s * co);
    CMatrix::from_row_slice(2, 2, &[cr(co * co) + i * (s * s), off, off, cr(s * s) + i * (co * co)])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonicCircuit {
    elements: Vec<OpticalElement>,
    xi: f64,
}

impl PhotonicCircuit {
    pub fn new(elements: Vec<OpticalElement>, xi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(PhotonicsError::BadXi(xi));
        }
        for e in &elements {
            e.validate()?;
        }
        Ok(PhotonicCircuit { elements, xi })
    }

    pub fn empty() -> Self {
        PhotonicCircuit { elements: Vec::new(), xi: 1.0 }
    }

    pub fn elements(&self) -> &[OpticalElement] {
        &self.elements
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn with_xi(&self, xi: f64) -> Result<Self> {
        PhotonicCircuit::new(self.elements.clone(), xi)
    }

    /// Balanced controlled-phase core around a PPBS with H transmissivity `t_h`.
    pub fn controlled_phase_core(t_h: f64, xi: f64) -> Result<Self> {
        let balance = (1.0f64 / 3.0).sqrt();
        PhotonicCircuit::new(
            vec![
                OpticalElement::Ppbs { t_h, t_v: 0.0 },
                OpticalElement::Attenuator { arm: Arm::System, polarization: Polarization::V, amplitude: balance },
                OpticalElement::Attenuator { arm: Arm::Ancilla, polarization: Polarization::V, amplitude: balance },
                OpticalElement::hwp_deg(0.0, Arm::System),
                OpticalElement::hwp_deg(0.0, Arm::Ancilla),
            ],
            xi,
        )
    }

    pub fn ideal_controlled_phase() -> Self {
        Self::controlled_phase_core((2.0f64 / 3.0).sqrt(), 1.0).expect("ideal parameters")
    }

    /// Wraps a controlled-phase core with Hadamard wave plates on the target.
    pub fn cnot_from_core(core: &PhotonicCircuit) -> Self {
        let mut elements = vec![OpticalElement::hwp_deg(22.5, Arm::Ancilla)];
        elements.extend_from_slice(&core.elements);
        elements.push(OpticalElement::hwp_deg(22.5, Arm::Ancilla));
        PhotonicCircuit { elements, xi: core.xi }
    }

    pub fn ideal_cnot() -> Self {
        Self::cnot_from_core(&Self::ideal_controlled_phase())
    }

    pub fn first_ppbs(&self) -> Option<OpticalElement> {
        self.elements.iter().copied().find(|e| matches!(e, OpticalElement::Ppbs { .. }))
    }
}

/// Ordered product of the element transfers (first element acts first).
pub fn single_photon_transfer(circuit: &PhotonicCircuit) -> CMatrix {
    circuit.elements.iter().fold(identity(4), |acc, e| e.transfer() * acc)
}

/// Unordered mode pairs `(j ≤ k)` labelling the ten two-photon Fock states.
pub fn fock_configurations() -> [(usize, usize); 10] {
    let mut out = [(0, 0); 10];
    let mut n = 0;
    for j in 0..4 {
        for k in j..4 {
            out[n] = (j, k);
            n += 1;
        }
    }
    out
}

fn fock_index(j: usize, k: usize) -> usize {
    let (j, k) = if j <= k { (j, k) } else { (k, j) };
    fock_configurations().iter().position(|&p| p == (j, k)).expect("valid pair")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    /// Weight of the interfering sector.
    pub xi: f64,
    interfering: [C64; 10],
    /// `d[(j, k)]`: photon 1 in mode `j`, photon 2 in mode `k`.
    distinguishable: CMatrix,
}

impl TwoPhotonState {
    pub fn interfering_amplitudes(&self) -> &[C64; 10] {
        &self.interfering
    }

    pub fn distinguishable_amplitudes(&self) -> &CMatrix {
        &self.distinguishable
    }

    /// Detected probability summed over both sectors; 1 for lossless circuits.
    pub fn total_probability(&self) -> f64 {
        let int: f64 = self.interfering.iter().map(|a| a.norm_sqr()).sum();
        let dist: f64 = self.distinguishable.iter().map(|a| a.norm_sqr()).sum();
        self.xi * int + (1.0 - self.xi) * dist
    }

    /// Unnormalized polarization vectors for one photon per arm:
    /// the interfering amplitude and the two distinguishable branches.
    fn coincidence_vectors(&self) -> [CVector; 3] {
        let mut psi = CVector::zeros(4);
        let mut alpha = CVector::zeros(4);
        let mut beta = CVector::zeros(4);
        for ps in 0..2 {
            for pa in 0..2 {
                let (s, a) = (ps, 2 + pa);
                let q = 2 * ps + pa;
                psi[q] = self.interfering[fock_index(s, a)];
                alpha[q] = self.distinguishable[(s, a)];
                beta[q] = self.distinguishable[(a, s)];
            }
        }
        [psi, alpha, beta]
    }
}

fn polarization_vector(k: &Ket) -> Result<CVector> {
    if k.dim() != 2 {
        return Err(PhotonicsError::BadInput);
    }
    Ok(k.amplitudes().clone())
}

/// Photon 1 enters the system arm, photon 2 the ancilla arm.
pub fn evolve_two_photon(photon1: &Ket, photon2: &Ket, circuit: &PhotonicCircuit) -> Result<TwoPhotonState> {
    let p1 = polarization_vector(photon1)?;
    let p2 = polarization_vector(photon2)?;
    let mut in1 = CVector::zeros(4);
    let mut in2 = CVector::zeros(4);
    in1.rows_mut(0, 2).copy_from(&p1);
    in2.rows_mut(2, 2).copy_from(&p2);
    let t = single_photon_transfer(circuit);
    let u = &t * in1;
    let v = &t * in2;
    let mut interfering = [C64::default(); 10];
    for (n, &(j, k)) in fock_configurations().iter().enumerate() {
        interfering[n] = if j == k {
            u[j] * v[j] * std::f64::consts::SQRT_2
        } else {
            u[j] * v[k] + u[k] * v[j]
        };
    }
    let distinguishable = &u * v.transpose();
    Ok(TwoPhotonState { xi: circuit.xi, interfering, distinguishable })
}

/// Conditional polarization state given one photon per arm, and its probability.
pub fn postselect_coincidence(state: &TwoPhotonState) -> Result<(DensityMatrix, f64)> {
    let [psi, alpha, beta] = state.coincidence_vectors();
    let m = (&psi * psi.adjoint()).scale(state.xi)
        + (&alpha * alpha.adjoint() + &beta * beta.adjoint()).scale(1.0 - state.xi);
    let p = m.trace().re;
    if p < ZERO_SUCCESS_TOL {
        return Err(PhotonicsError::ZeroSuccess);
    }
    Ok((DensityMatrix::from_noisy(vec![2, 2], m.unscale(p))?, p))
}

/// Post-selected process on the two polarization qubits, as unnormalized
/// Kraus operators `{√xi·M, √(1−xi)·A, √(1−xi)·B}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalProcess {
    pub xi: f64,
    /// Interfering-sector operator.
    pub interfering: CMatrix,
    /// Distinguishable branch with photon 1 detected in the system arm.
    pub same_arm: CMatrix,
    /// Distinguishable branch with the photons exchanged between arms.
    pub exchanged: CMatrix,
}

impl ConditionalProcess {
    pub fn kraus(&self) -> [CMatrix; 3] {
        let a = self.xi.sqrt();
        let b = (1.0 - self.xi).sqrt();
        [self.interfering.scale(a), self.same_arm.scale(b), self.exchanged.scale(b)]
    }

    /// Conditional output state and its success probability.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
        if rho.dim() != 4 {
            return Err(LinalgError::DimensionMismatch { expected: 4, actual: rho.dim() }.into());
        }
        let m = self
            .kraus()
            .iter()
            .fold(CMatrix::zeros(4, 4), |acc, k| acc + k * rho.matrix() * k.adjoint());
        let p = m.trace().re;
        if p < ZERO_SUCCESS_TOL {
            return Err(PhotonicsError::ZeroSuccess);
        }
        Ok((DensityMatrix::from_noisy(vec![2, 2], m.unscale(p))?, p))
    }

    /// `Σ|Tr(U†K)|² / (4·Σ Tr K†K)`: entanglement fidelity of the
    /// renormalized process with the unitary target.
    pub fn process_fidelity(&self, target: &UnitaryOp) -> f64 {
        let ud = target.matrix().adjoint();
        let mut overlap = 0.0;
        let mut norm = 0.0;
        for k in self.kraus() {
            overlap += (&ud * &k).trace().norm_sqr();
            norm += (k.adjoint() * &k).trace().re;
        }
        overlap / (4.0 * norm)
    }

    /// Interfering operator rescaled to unit average success.
    pub fn normalized_interfering(&self) -> CMatrix {
        let scale = ((self.interfering.adjoint() * &self.interfering).trace().re / 4.0).sqrt();
        self.interfering.unscale(scale)
    }
}

/// Process from four product inputs `(a_i, b_i)` that span the two-qubit space.
pub fn process_from_inputs(circuit: &PhotonicCircuit, inputs: &[(Ket, Ket); 4]) -> Result<ConditionalProcess> {
    let mut basis = CMatrix::zeros(4, 4);
    let mut outs = [CMatrix::zeros(4, 4), CMatrix::zeros(4, 4), CMatrix::zeros(4, 4)];
    for (col, (a, b)) in inputs.iter().enumerate() {
        basis.set_column(col, &polarization_vector(a)?.kronecker(&polarization_vector(b)?));
        let vecs = evolve_two_photon(a, b, circuit)?.coincidence_vectors();
        for (o, v) in outs.iter_mut().zip(vecs.iter()) {
            o.set_column(col, v);
        }
    }
    let inv = basis
        .try_inverse()
        .ok_or_else(|| PhotonicsError::BadElement("inputs do not span the two-qubit space".into()))?;
    let [interfering, same_arm, exchanged] = outs.map(|o| o * &inv);
    Ok(ConditionalProcess { xi: circuit.xi, interfering, same_arm, exchanged })
}

/// Process reconstructed from the computational basis inputs.
pub fn effective_gate(circuit: &PhotonicCircuit) -> Result<ConditionalProcess> {
    let z = [Ket::basis(2, 0), Ket::basis(2, 1)];
    let inputs = [
        (z[0].clone(), z[0].clone()),
        (z[0].clone(), z[1].clone()),
        (z[1].clone(), z[0].clone()),
        (z[1].clone(), z[1].clone()),
    ];
    process_from_inputs(circuit, &inputs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthBasis {
    /// Control in H/V, target in D/A.
    ZZ,
    /// Control in D/A, target in H/V.
    XX,
}

impl TruthBasis {
    pub fn label(self) -> &'static str {
        match self {
            TruthBasis::ZZ => "ZZ",
            TruthBasis::XX => "XX",
        }
    }

    fn hv() -> [Ket; 2] {
        [Ket::basis(2, 0), Ket::basis(2, 1)]
    }

    fn da() -> [Ket; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        [
            Ket::qubit(cr(h), cr(h)).expect("normalized"),
            Ket::qubit(cr(h), cr(-h)).expect("normalized"),
        ]
    }

    pub fn control_states(self) -> [Ket; 2] {
        match self {
            TruthBasis::ZZ => Self::hv(),
            TruthBasis::XX => Self::da(),
        }
    }

    pub fn target_states(self) -> [Ket; 2] {
        match self {
            TruthBasis::ZZ => Self::da(),
            TruthBasis::XX => Self::hv(),
        }
    }

    /// Ideal output label for input label `2c + t` of a controlled-phase core.
    pub fn ideal_output(self, input: usize) -> usize {
        let (ctl, tgt) = (input / 2, input % 2);
        match self {
            TruthBasis::ZZ => 2 * ctl + (tgt ^ ctl),
            TruthBasis::XX => 2 * (ctl ^ tgt) + tgt,
        }
    }

    /// Labels `"HD"`, `"VA"`, … in input order.
    pub fn labels(self) -> [&'static str; 4] {
        match self {
            TruthBasis::ZZ => ["HD", "HA", "VD", "VA"],
            TruthBasis::XX => ["DH", "DV", "AH", "AV"],
        }
    }
}

/// `probs[input][outcome]`, both indexed `2c + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthTable {
    pub basis: TruthBasis,
    pub probs: [[f64; 4]; 4],
}

impl TruthTable {
    /// Mean probability of the ideal output.
    pub fn fidelity(&self) -> f64 {
        (0..4).map(|i| self.probs[i][self.basis.ideal_output(i)]).sum::<f64>() / 4.0
    }
}

/// Truth table of a controlled-phase core. `shots = 0` gives exact
/// probabilities; otherwise each row is a multinomial sample of `shots`
/// coincidences drawn from stream `(seed, row)`.
pub fn truth_table(circuit: &PhotonicCircuit, basis: TruthBasis, shots: u64, seed: u64) -> Result<TruthTable> {
    let controls = basis.control_states();
    let targets = basis.target_states();
    let outcomes: Vec<DensityMatrix> = (0..4)
        .map(|o| {
            let v = controls[o / 2].amplitudes().kronecker(targets[o % 2].amplitudes());
            Ket::normalize(vec![2, 2], v).map(|k| k.projector())
        })
        .collect::<std::result::Result<_, _>>()?;
    let mut probs = [[0.0; 4]; 4];
    for (i, row) in probs.iter_mut().enumerate() {
        let state = evolve_two_photon(&controls[i / 2], &targets[i % 2], circuit)?;
        let (rho, _) = postselect_coincidence(&state)?;
        let mut exact = [0.0; 4];
        for (o, proj) in outcomes.iter().enumerate() {
            exact[o] = (proj.matrix() * rho.matrix()).trace().re.max(0.0);
        }
        let total: f64 = exact.iter().sum();
        exact.iter_mut().for_each(|p| *p /= total);
        *row = if shots == 0 {
            exact
        } else {
            sampled_row(&mut derived_rng(seed, i as u64), shots, &exact)
        };
    }
    Ok(TruthTable { basis, probs })
}

fn sampled_row<R: Rng + ?Sized>(rng: &mut R, shots: u64, probs: &[f64; 4]) -> [f64; 4] {
    let counts = multinomial(rng, shots, probs);
    let mut out = [0.0; 4];
    for (o, n) in out.iter_mut().zip(counts) {
        *o = n as f64 / shots as f64;
    }
    out
}

fn coincidence_rate(ppbs: OpticalElement, xi: f64) -> Result<f64> {
    let h = Ket::basis(2, 0);
    let circuit = PhotonicCircuit::new(vec![ppbs], xi)?;
    Ok(postselect_coincidence(&evolve_two_photon(&h, &h, &circuit)?)?.1)
}

/// `(C_dist − C(xi)) / C_dist` for two H photons on the circuit's first PPBS.
pub fn hom_visibility(circuit: &PhotonicCircuit, xi: f64) -> Result<f64> {
    let ppbs = circuit.first_ppbs().ok_or(PhotonicsError::NoPpbs)?;
    let dist = coincidence_rate(ppbs, 0.0)?;
    let mixed = coincidence_rate(ppbs, xi)?;
    Ok((dist - mixed) / dist)
}

/// Inverse of the linear visibility model, `xi = V / V_th`.
pub fn xi_from_visibility(visibility: f64, ideal: f64) -> Result<f64> {
    let xi = visibility / ideal;
    if !(0.0..=1.0).contains(&xi) {
        return Err(PhotonicsError::BadXi(xi));
    }
    Ok(xi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityBounds {
    pub lower: f64,
    pub upper: f64,
    /// Minimal entanglement capability `2·lower − 1`.
    pub capability_lower: f64,
}

/// `Fzz + Fxx − 1 ≤ F_process ≤ min(Fzz, Fxx)`.
pub fn process_fidelity_bounds(fzz: f64, fxx: f64) -> Result<FidelityBounds> {
    for f in [fzz, fxx] {
        if !(0.0..=1.0).contains(&f) {
            return Err(PhotonicsError::OutOfRange(f));
        }
    }
    let lower = fzz + fxx - 1.0;
    Ok(FidelityBounds { lower, upper: fzz.min(fxx), capability_lower: 2.0 * lower - 1.0 })
}
