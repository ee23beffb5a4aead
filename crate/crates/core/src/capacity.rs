//! System load capacity: each strand of a grasping loop is limited by its
//! membrane, the base fastening, the base winch, the tip clamp and the tip winch.
//! The payload is carried by every strand of the loop, so the weakest of those
//! limits times the strand count bounds what the system can lift.

use crate::capstan::{self, CapstanError, CapstanWrap, ClampSpec};
use crate::units::newton_to_kgf;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Relative window within which limits count as tied for the bottleneck.
pub const BOTTLENECK_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CapacityError {
    #[error(transparent)]
    Capstan(#[from] CapstanError),
    #[error("{field} must be positive and finite, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("winch radius {radius} m outside [{core}, {max}] m")]
    RadiusOutOfRange { radius: f64, core: f64, max: f64 },
    #[error("gear ratio must be at least 1, got {0}")]
    GearRatio(f64),
    #[error("membrane strength needs either strength_per_width or yield_stress with thickness")]
    MissingStrength,
    #[error("strands_per_loop must be at least 1")]
    NoStrands,
}

fn check_pos(field: &'static str, value: f64) -> Result<(), CapacityError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CapacityError::NonPositive { field, value })
    }
}

/// Tensile strength of the membrane, either per unit width or as a yield stress
/// acting on the wall thickness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembraneStrength {
    PerWidth(f64),
    Stress { yield_stress: f64, thickness: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembraneSpec {
    pub strength: Option<MembraneStrength>,
    /// Width of the deflated tube, m.
    pub flattened_width: f64,
    /// Number of material layers carrying tension.
    pub load_layers: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinchSpec {
    /// Motor stall torque before the transmission, N·m.
    pub stall_torque: f64,
    pub gear_ratio: f64,
    pub core_radius: f64,
    pub max_radius: f64,
    pub material_thickness: f64,
    /// When set, the winch is evaluated at the spool radius reached after
    /// winding this much material instead of at `max_radius`.
    #[serde(default)]
    pub wound_length: Option<f64>,
}

impl WinchSpec {
    pub fn validate(&self) -> Result<(), CapacityError> {
        check_pos("stall_torque", self.stall_torque)?;
        check_pos("core_radius", self.core_radius)?;
        check_pos("max_radius", self.max_radius)?;
        if !(self.gear_ratio.is_finite() && self.gear_ratio >= 1.0) {
            return Err(CapacityError::GearRatio(self.gear_ratio));
        }
        if self.max_radius < self.core_radius {
            return Err(CapacityError::RadiusOutOfRange {
                radius: self.max_radius,
                core: self.core_radius,
                max: self.max_radius,
            });
        }
        if !(self.material_thickness.is_finite() && self.material_thickness >= 0.0) {
            return Err(CapacityError::NonPositive { field: "material_thickness", value: self.material_thickness });
        }
        Ok(())
    }

    /// Radius at which the winch limit is evaluated.
    pub fn effective_radius(&self) -> Result<f64, CapacityError> {
        match self.wound_length {
            None => Ok(self.max_radius),
            Some(len) => {
                if !(len.is_finite() && len >= 0.0) {
                    return Err(CapacityError::NonPositive { field: "wound_length", value: len });
                }
                Ok(spool_radius(self.core_radius, len, self.material_thickness))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub membrane: MembraneSpec,
    pub base_fastening: CapstanWrap,
    pub base_winch: WinchSpec,
    pub tip_clamp: ClampSpec,
    pub tip_winch: WinchSpec,
    pub strands_per_loop: u32,
}

/// Names of the per-strand limits, in report order.
pub const LIMIT_NAMES: [&str; 5] = ["membrane", "base_fastening", "base_winch", "tip_clamp", "tip_winch"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    /// Per-strand limit in newtons, keyed by limit name.
    pub per_limit: BTreeMap<String, f64>,
    pub strands_per_loop: u32,
    pub payload_capacity: f64,
    pub bottleneck: Vec<String>,
}

impl CapacityReport {
    pub fn payload_capacity_kgf(&self) -> f64 {
        newton_to_kgf(self.payload_capacity)
    }

    /// JSON document with both newton and kilogram-force payloads.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "per_limit": self.per_limit,
            "strands_per_loop": self.strands_per_loop,
            "payload_capacity_N": self.payload_capacity,
            "payload_capacity_kgf": self.payload_capacity_kgf(),
            "bottleneck": self.bottleneck,
        })
    }
}

/// Line pull of a winch at the given spool radius, `τ · G / r`.
pub fn winch_pull_force(spec: &WinchSpec, effective_radius: f64) -> Result<f64, CapacityError> {
    spec.validate()?;
    if !(effective_radius >= spec.core_radius && effective_radius <= spec.max_radius) {
        return Err(CapacityError::RadiusOutOfRange {
            radius: effective_radius,
            core: spec.core_radius,
            max: spec.max_radius,
        });
    }
    Ok(spec.stall_torque * spec.gear_ratio / effective_radius)
}

/// Outer radius after winding `wound_length` of material of the given
/// thickness onto a core, conserving cross-sectional area.
pub fn spool_radius(core_radius: f64, wound_length: f64, material_thickness: f64) -> f64 {
    (core_radius * core_radius + wound_length * material_thickness / PI).sqrt()
}

/// Material length wound when the spool reaches `radius`; inverse of [`spool_radius`].
pub fn wound_length_at(core_radius: f64, radius: f64, material_thickness: f64) -> f64 {
    PI * (radius * radius - core_radius * core_radius) / material_thickness
}

pub fn membrane_capacity(spec: &MembraneSpec) -> Result<f64, CapacityError> {
    if !(spec.flattened_width.is_finite() && spec.flattened_width >= 0.0) {
        return Err(CapacityError::NonPositive { field: "flattened_width", value: spec.flattened_width });
    }
    let per_width = match spec.strength.ok_or(CapacityError::MissingStrength)? {
        MembraneStrength::PerWidth(s) => {
            check_pos("strength_per_width", s)?;
            s
        }
        MembraneStrength::Stress { yield_stress, thickness } => {
            check_pos("yield_stress", yield_stress)?;
            check_pos("thickness", thickness)?;
            yield_stress * thickness
        }
    };
    Ok(f64::from(spec.load_layers) * spec.flattened_width * per_width)
}

/// Evaluates every per-strand limit and the resulting payload.
pub fn system_capacity(spec: &SystemSpec) -> Result<CapacityReport, CapacityError> {
    if spec.strands_per_loop == 0 {
        return Err(CapacityError::NoStrands);
    }
    let limits = [
        membrane_capacity(&spec.membrane)?,
        capstan::capstan_amplify(&spec.base_fastening)?,
        winch_pull_force(&spec.base_winch, spec.base_winch.effective_radius()?)?,
        capstan::clamp_capacity(&spec.tip_clamp)?,
        winch_pull_force(&spec.tip_winch, spec.tip_winch.effective_radius()?)?,
    ];
    let min = limits.iter().copied().fold(f64::INFINITY, f64::min);
    let bottleneck = LIMIT_NAMES
        .iter()
        .zip(limits.iter())
        .filter(|(_, &v)| v - min <= BOTTLENECK_REL_TOL * min.abs())
        .map(|(name, _)| name.to_string())
        .collect();
    Ok(CapacityReport {
        per_limit: LIMIT_NAMES.iter().map(|n| n.to_string()).zip(limits).collect(),
        strands_per_loop: spec.strands_per_loop,
        payload_capacity: f64::from(spec.strands_per_loop) * min,
        bottleneck,
    })
}
