//! TOML description of a controlled-phase core. The CNOT's target
//! Hadamards are added by the caller.

use std::path::Path;

use qresource::photonics::{Arm, OpticalElement, PhotonicCircuit, Polarization, WaveplateKind};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    /// Two-photon indistinguishability in [0, 1].
    #[serde(default = "one")]
    pub xi: f64,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    /// Measured truth-table fidelities that replace the simulated ones.
    pub fzz: Option<f64>,
    pub fxx: Option<f64>,
    #[serde(rename = "element", default)]
    pub elements: Vec<ElementConfig>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ArmName {
    System,
    Ancilla,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
pub enum PolarizationName {
    H,
    V,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ElementConfig {
    Hwp { arm: ArmName, angle_deg: f64 },
    Qwp { arm: ArmName, angle_deg: f64 },
    /// Intensity transmittances, as quoted for beam splitters.
    Ppbs { transmittance_h: f64, transmittance_v: f64 },
    Attenuator { arm: ArmName, polarization: PolarizationName, amplitude: f64 },
}

impl From<ArmName> for Arm {
    fn from(a: ArmName) -> Self {
        match a {
            ArmName::System => Arm::System,
            ArmName::Ancilla => Arm::Ancilla,
        }
    }
}

impl From<PolarizationName> for Polarization {
    fn from(p: PolarizationName) -> Self {
        match p {
            PolarizationName::H => Polarization::H,
            PolarizationName::V => Polarization::V,
        }
    }
}

impl ElementConfig {
    fn to_element(&self) -> Result<OpticalElement> {
        let amplitude = |t: f64, what: &str| {
            if t.is_finite() && (0.0..=1.0).contains(&t) {
                Ok(t.sqrt())
            } else {
                Err(CliError::usage(format!("{what} must lie in [0, 1], got {t}")))
            }
        };
        Ok(match *self {
            ElementConfig::Hwp { arm, angle_deg } => OpticalElement::Waveplate {
                kind: WaveplateKind::Half,
                angle: angle_deg.to_radians(),
                arm: arm.into(),
            },
            ElementConfig::Qwp { arm, angle_deg } => OpticalElement::Waveplate {
                kind: WaveplateKind::Quarter,
                angle: angle_deg.to_radians(),
                arm: arm.into(),
            },
            ElementConfig::Ppbs { transmittance_h, transmittance_v } => OpticalElement::Ppbs {
                t_h: amplitude(transmittance_h, "transmittance_h")?,
                t_v: amplitude(transmittance_v, "transmittance_v")?,
            },
            ElementConfig::Attenuator { arm, polarization, amplitude } => {
                OpticalElement::Attenuator { arm: arm.into(), polarization: polarization.into(), amplitude }
            }
        })
    }
}

impl CircuitConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("malformed circuit config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read circuit config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The ideal core: balanced PPBS with V losses and Z corrections.
    pub fn ideal() -> Self {
        let core = PhotonicCircuit::ideal_controlled_phase();
        CircuitConfig {
            xi: 1.0,
            shots: None,
            seed: None,
            fzz: None,
            fxx: None,
            elements: core.elements().iter().map(element_config).collect(),
        }
    }

    pub fn core(&self) -> Result<PhotonicCircuit> {
        if self.elements.is_empty() {
            return Err(CliError::usage("circuit config lists no elements"));
        }
        let elements = self.elements.iter().map(ElementConfig::to_element).collect::<Result<Vec<_>>>()?;
        Ok(PhotonicCircuit::new(elements, self.xi)?)
    }

    pub fn cnot(&self) -> Result<PhotonicCircuit> {
        Ok(PhotonicCircuit::cnot_from_core(&self.core()?))
    }
}

fn element_config(e: &OpticalElement) -> ElementConfig {
    let arm = |a: Arm| match a {
        Arm::System => ArmName::System,
        Arm::Ancilla => ArmName::Ancilla,
    };
    match *e {
        OpticalElement::Waveplate { kind: WaveplateKind::Half, angle, arm: a } => {
            ElementConfig::Hwp { arm: arm(a), angle_deg: angle.to_degrees() }
        }
        OpticalElement::Waveplate { kind: WaveplateKind::Quarter, angle, arm: a } => {
            ElementConfig::Qwp { arm: arm(a), angle_deg: angle.to_degrees() }
        }
        OpticalElement::Ppbs { t_h, t_v } => ElementConfig::Ppbs { transmittance_h: t_h * t_h, transmittance_v: t_v * t_v },
        OpticalElement::Attenuator { arm: a, polarization, amplitude } => ElementConfig::Attenuator {
            arm: arm(a),
            polarization: match polarization {
                Polarization::H => PolarizationName::H,
                Polarization::V => PolarizationName::V,
            },
            amplitude,
        },
    }
}
