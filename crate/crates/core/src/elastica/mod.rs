//! Quasi-static planar rod contact against a rigid circular object.
//!
//! The rod is a chain of nodes with stretching energy per element, bending
//! energy per interior node and lumped self-weight. The object is a rigid disk
//! that is free to translate; it carries its own weight plus an applied load,
//! both ramped from zero. Contact is frictionless and unilateral, enforced with
//! a node-to-circle penalty, so every contact force points along the outward
//! object normal.

mod balance;
pub mod banded;
mod energy;
mod export;
mod pressure;
mod scenes;
mod solver;

pub use balance::{segment_balance, SegmentResiduals};
pub use export::{write_profile_csv, write_sweep_csv};
pub use pressure::{pressure_profile, sweep_rigidity, DensityMode, PressureProfile, PressureSample, SweepPoint};
pub use scenes::{CradleSetup, HookSetup, InitialShape, RodMaterial, Section};
pub use solver::{solve_closed_loop, solve_open_loop_hold, EscapeReason, HoldDiagnostics, HoldResult};

use serde::{Deserialize, Serialize};

pub type Vec2 = [f64; 2];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ElasticaError {
    #[error("rod needs at least 10 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("{field} must be positive and finite, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("{field} must be non-negative and finite, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("centerline needs at least two distinct points")]
    DegenerateCenterline,
    #[error("rod endpoint {0} lies inside the object")]
    EndpointInsideObject(usize),
    #[error("{0} requires a {1} boundary")]
    WrongBoundary(&'static str, &'static str),
    #[error("stiffness values must be sorted ascending")]
    UnsortedSweep,
}

/// Discretized planar rod.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RodModel {
    pub n_nodes: usize,
    pub rest_length: f64,
    /// EA, N.
    pub axial_stiffness: f64,
    /// EI, N·m². Exactly zero drops the bending term.
    pub bending_stiffness: f64,
    /// kg/m.
    pub linear_density: f64,
    /// Out-of-plane width used to turn line loads into pressures, m.
    pub width: f64,
    /// Signed curvature of the stress-free shape, 1/m (positive turns counter-clockwise).
    #[serde(default)]
    pub natural_curvature: f64,
}

impl RodModel {
    pub fn validate(&self) -> Result<(), ElasticaError> {
        if self.n_nodes < 10 {
            return Err(ElasticaError::TooFewNodes(self.n_nodes));
        }
        let pos = |field, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(ElasticaError::NonPositive { field, value })
            }
        };
        let nonneg = |field, value: f64| {
            if value.is_finite() && value >= 0.0 {
                Ok(())
            } else {
                Err(ElasticaError::Negative { field, value })
            }
        };
        pos("rest_length", self.rest_length)?;
        pos("axial_stiffness", self.axial_stiffness)?;
        pos("width", self.width)?;
        nonneg("bending_stiffness", self.bending_stiffness)?;
        nonneg("linear_density", self.linear_density)?;
        if !self.natural_curvature.is_finite() {
            return Err(ElasticaError::NonPositive { field: "natural_curvature", value: self.natural_curvature });
        }
        Ok(())
    }

    pub fn element_rest_length(&self) -> f64 {
        self.rest_length / (self.n_nodes - 1) as f64
    }

    pub fn weight(&self, gravity: Vec2) -> f64 {
        self.linear_density * self.rest_length * norm(gravity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Both ends pinned at the centerline endpoints; `clamped` also fixes the
    /// end tangents when the rod has bending stiffness.
    FixedBothEnds { clamped: bool },
    /// First node pinned (and clamped), tip free.
    FixedBaseFreeTip { clamped: bool },
}

/// Rigid circular object, loads and rod placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub object_center: Vec2,
    pub object_radius: f64,
    /// Object mass, kg; its weight follows `gravity`.
    #[serde(default)]
    pub object_mass: f64,
    pub gravity: Vec2,
    /// External force on the object, N, ramped from zero. In open-loop runs this
    /// is the pull the rod has to resist.
    pub object_load: Vec2,
    pub boundary: Boundary,
    /// Initial rod centerline; resampled to the node count by arc length. Its
    /// endpoints are the fixed positions of the boundary.
    pub centerline: Vec<Vec2>,
}

impl Scene {
    pub fn validate(&self) -> Result<(), ElasticaError> {
        if !(self.object_radius.is_finite() && self.object_radius > 0.0) {
            return Err(ElasticaError::NonPositive { field: "object_radius", value: self.object_radius });
        }
        if !(self.object_mass.is_finite() && self.object_mass >= 0.0) {
            return Err(ElasticaError::Negative { field: "object_mass", value: self.object_mass });
        }
        let length: f64 = self.centerline.windows(2).map(|w| dist(w[0], w[1])).sum();
        if self.centerline.len() < 2 || !(length > 0.0) {
            return Err(ElasticaError::DegenerateCenterline);
        }
        let ends: &[usize] = match self.boundary {
            Boundary::FixedBothEnds { .. } => &[0, 1],
            Boundary::FixedBaseFreeTip { .. } => &[0],
        };
        for &e in ends {
            let p = if e == 0 { self.centerline[0] } else { *self.centerline.last().unwrap() };
            if dist(p, self.object_center) < self.object_radius * (1.0 - 1e-9) {
                return Err(ElasticaError::EndpointInsideObject(e));
            }
        }
        Ok(())
    }

    /// Total external force on the object at full load.
    pub fn object_force(&self) -> Vec2 {
        [
            self.object_load[0] + self.object_mass * self.gravity[0],
            self.object_load[1] + self.object_mass * self.gravity[1],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Residual tolerance relative to the characteristic force.
    pub tol: f64,
    pub ramp_steps: usize,
    pub max_iterations: usize,
    /// Times a failed increment may be halved before giving up.
    pub max_cutbacks: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams { tol: 1e-8, ramp_steps: 20, max_iterations: 200, max_cutbacks: 4 }
    }
}

/// Solved configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub node_positions: Vec<Vec2>,
    pub object_center: Vec2,
    /// Axial force per element, N (positive in tension).
    pub axial_tension: Vec<f64>,
    /// Contact force exerted by the object on each node, N.
    pub contact_forces: Vec<Vec2>,
    pub converged: bool,
    pub residual_norm: f64,
    /// Absolute residual tolerance the run was held to, N.
    pub tolerance: f64,
    /// Deepest node penetration into the object, m.
    pub max_penetration: f64,
    /// Completed load fraction (1 when the full load was applied).
    pub load_fraction: f64,
    pub newton_iterations: usize,
    pub diagnostics: Vec<String>,
}

impl Equilibrium {
    pub fn contact_magnitude(&self, node: usize) -> f64 {
        norm(self.contact_forces[node])
    }

    /// Sum of contact forces the rod exerts on the object.
    pub fn force_on_object(&self) -> Vec2 {
        self.contact_forces.iter().fold([0.0, 0.0], |acc, f| [acc[0] - f[0], acc[1] - f[1]])
    }

    pub fn contact_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.contact_forces.iter().enumerate().filter(|(_, f)| f[0] != 0.0 || f[1] != 0.0).map(|(i, _)| i)
    }
}

pub(crate) fn norm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

pub(crate) fn dist(a: Vec2, b: Vec2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
