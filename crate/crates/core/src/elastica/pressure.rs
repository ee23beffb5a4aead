//! Contact pressure recovery and stiffness sweeps.

use super::{dist, solve_closed_loop, ElasticaError, Equilibrium, RodModel, Scene, Section, SolverParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureSample {
    pub node: usize,
    /// Polar angle of the contact point around the object center, rad,
    /// unwrapped to be continuous over the contact arc.
    pub angle: f64,
    pub pressure: f64,
    pub line_load: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PressureProfile {
    /// Contact nodes only, ordered by angle.
    pub samples: Vec<PressureSample>,
}

impl PressureProfile {
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn peak_pressure(&self) -> f64 {
        self.samples.iter().map(|s| s.pressure).fold(0.0, f64::max)
    }

    /// Angle spanned by the contact nodes, rad.
    pub fn contact_arc(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.angle - a.angle,
            _ => 0.0,
        }
    }
}

/// Line load at each contact node is its contact force over its tributary
/// length (half of each adjacent element); pressure divides by the rod width.
pub fn pressure_profile(eq: &Equilibrium, scene: &Scene, rod: &RodModel) -> PressureProfile {
    let nodes = &eq.node_positions;
    let n = nodes.len();
    let c = eq.object_center;
    let mut mean = [0.0, 0.0];
    for f in &eq.contact_forces {
        mean[0] += f[0];
        mean[1] += f[1];
    }
    if mean == [0.0, 0.0] {
        if let Some(i) = eq.contact_nodes().next() {
            mean = eq.contact_forces[i];
        } else {
            return PressureProfile::default();
        }
    }
    let base = mean[1].atan2(mean[0]);
    let mut samples: Vec<PressureSample> = eq
        .contact_nodes()
        .map(|i| {
            let tributary = 0.5
                * (if i > 0 { dist(nodes[i - 1], nodes[i]) } else { 0.0 }
                    + if i + 1 < n { dist(nodes[i], nodes[i + 1]) } else { 0.0 });
            let u = [nodes[i][0] - c[0], nodes[i][1] - c[1]];
            let rel = (mean[0] * u[1] - mean[1] * u[0]).atan2(mean[0] * u[0] + mean[1] * u[1]);
            let line_load = eq.contact_magnitude(i) / tributary;
            PressureSample { node: i, angle: base + rel, pressure: line_load / rod.width, line_load }
        })
        .collect();
    samples.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    let _ = scene;
    PressureProfile { samples }
}

/// How the rod density follows the swept modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    /// Keep the template's linear density.
    #[default]
    Fixed,
    /// Power-law interpolation through two (modulus, density) anchors, which is
    /// linear in log-log space.
    ScaleWithModulus { modulus_low: f64, density_low: f64, modulus_high: f64, density_high: f64 },
}

impl DensityMode {
    pub fn density_at(&self, modulus: f64) -> Option<f64> {
        match *self {
            DensityMode::Fixed => None,
            DensityMode::ScaleWithModulus { modulus_low, density_low, modulus_high, density_high } => {
                let p = (density_high / density_low).ln() / (modulus_high / modulus_low).ln();
                Some(density_low * (modulus / modulus_low).powf(p))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub modulus: f64,
    pub rod: RodModel,
    pub equilibrium: Equilibrium,
    pub profile: PressureProfile,
    pub peak_pressure: f64,
    pub contact_arc: f64,
}

impl SweepPoint {
    pub fn converged(&self) -> bool {
        self.equilibrium.converged
    }
}

/// Rod with the template's layout and the section's stiffness at `modulus`.
pub fn rod_at_modulus(template: &RodModel, section: &Section, modulus: f64, density: &DensityMode) -> RodModel {
    let material = section.material(modulus, density.density_at(modulus).unwrap_or(0.0));
    RodModel {
        axial_stiffness: material.axial_stiffness,
        bending_stiffness: material.bending_stiffness,
        linear_density: match density {
            DensityMode::Fixed => template.linear_density,
            _ => material.linear_density,
        },
        width: section.width,
        ..template.clone()
    }
}

/// One independent closed-loop solve per modulus, run in parallel. Members that
/// fail to converge are kept and flagged through their equilibrium.
pub fn sweep_rigidity(
    template: &RodModel,
    section: &Section,
    scene: &Scene,
    moduli: &[f64],
    density: &DensityMode,
    params: &SolverParams,
) -> Result<Vec<SweepPoint>, ElasticaError> {
    if moduli.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(ElasticaError::UnsortedSweep);
    }
    moduli
        .par_iter()
        .map(|&modulus| {
            let rod = rod_at_modulus(template, section, modulus, density);
            let equilibrium = solve_closed_loop(&rod, scene, params)?;
            let profile = pressure_profile(&equilibrium, scene, &rod);
            Ok(SweepPoint {
                modulus,
                peak_pressure: profile.peak_pressure(),
                contact_arc: profile.contact_arc(),
                rod,
                equilibrium,
                profile,
            })
        })
        .collect()
}
