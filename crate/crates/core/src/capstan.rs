//! Capstan friction: single wraps and chains of wave-clamp curves.
//!
//! A belt wrapped over an angle `θ` with friction coefficient `μ` holds
//! `T_load = T_hold · e^(μθ)`. The wave clamp chains that amplification over the
//! entry bend, every jaw curve and the exit bend, starting from the bare clamp
//! friction `μ · F_clamp`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CapstanError {
    #[error("{field} must be non-negative and finite, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("curve angle must lie in (0, π], got {0}")]
    CurveAngle(f64),
}

fn check_nonneg(field: &'static str, value: f64) -> Result<(), CapstanError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(CapstanError::Negative { field, value })
    }
}

/// A belt wrapped over a drum: holding force, friction coefficient, wrap angle (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapstanWrap {
    pub hold_force: f64,
    pub mu: f64,
    pub wrap_angle: f64,
}

impl CapstanWrap {
    pub fn validate(&self) -> Result<(), CapstanError> {
        check_nonneg("hold_force", self.hold_force)?;
        check_nonneg("mu", self.mu)?;
        check_nonneg("wrap_angle", self.wrap_angle)
    }
}

/// Wave-patterned clamp: `n_curves` jaw curves of `theta_c` radians each, plus
/// entry and exit bends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClampSpec {
    pub mu: f64,
    pub clamp_force: f64,
    pub n_curves: u32,
    pub theta_c: f64,
    pub phi_entry: f64,
    pub phi_exit: f64,
}

impl ClampSpec {
    /// Symmetric design where the entry and exit bends are half a curve each.
    pub fn uniform(mu: f64, clamp_force: f64, n_curves: u32, theta_c: f64) -> Self {
        ClampSpec {
            mu,
            clamp_force,
            n_curves,
            theta_c,
            phi_entry: 0.5 * theta_c,
            phi_exit: 0.5 * theta_c,
        }
    }

    pub fn validate(&self) -> Result<(), CapstanError> {
        check_nonneg("mu", self.mu)?;
        check_nonneg("clamp_force", self.clamp_force)?;
        check_nonneg("phi_entry", self.phi_entry)?;
        check_nonneg("phi_exit", self.phi_exit)?;
        if !(self.theta_c > 0.0 && self.theta_c <= PI) {
            return Err(CapstanError::CurveAngle(self.theta_c));
        }
        Ok(())
    }

    /// Total belt wrap over bends and curves.
    pub fn total_angle(&self) -> f64 {
        self.phi_entry + f64::from(self.n_curves) * self.theta_c + self.phi_exit
    }
}

/// Euler-Eytelwein amplification `hold_force · e^(μθ)`.
pub fn capstan_amplify(wrap: &CapstanWrap) -> Result<f64, CapstanError> {
    wrap.validate()?;
    Ok(wrap.hold_force * (wrap.mu * wrap.wrap_angle).exp())
}

/// Load capacity of a uniform wave clamp, `μ F e^(μ(φ_entry + nθ_c + φ_exit))`.
pub fn clamp_capacity(spec: &ClampSpec) -> Result<f64, CapstanError> {
    spec.validate()?;
    Ok(spec.mu * spec.clamp_force * (spec.mu * spec.total_angle()).exp())
}

/// Load capacity of a clamp whose curves have individual angles.
pub fn clamp_capacity_nonuniform(
    mu: f64,
    clamp_force: f64,
    curve_angles: &[f64],
    phi_entry: f64,
    phi_exit: f64,
) -> Result<f64, CapstanError> {
    check_nonneg("mu", mu)?;
    check_nonneg("clamp_force", clamp_force)?;
    check_nonneg("phi_entry", phi_entry)?;
    check_nonneg("phi_exit", phi_exit)?;
    for &a in curve_angles {
        check_nonneg("curve_angle", a)?;
    }
    let total = phi_entry + curve_angles.iter().sum::<f64>() + phi_exit;
    Ok(mu * clamp_force * (mu * total).exp())
}
