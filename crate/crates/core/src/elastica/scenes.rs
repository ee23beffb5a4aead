//! Ready-made rod/object arrangements.

use super::{Boundary, RodModel, Scene, Vec2};
use crate::units::STANDARD_GRAVITY;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Material and cross-section properties of a rod, independent of its layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RodMaterial {
    pub axial_stiffness: f64,
    pub bending_stiffness: f64,
    pub linear_density: f64,
    pub width: f64,
}

/// Rectangular cross-section; maps a Young's modulus to rod stiffnesses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub thickness: f64,
    pub width: f64,
}

impl Section {
    pub fn area(&self) -> f64 {
        self.thickness * self.width
    }

    pub fn second_moment(&self) -> f64 {
        self.width * self.thickness.powi(3) / 12.0
    }

    /// EA = E·t·w, EI = E·w·t³/12, linear density ρ·t·w.
    pub fn material(&self, youngs_modulus: f64, density: f64) -> RodMaterial {
        RodMaterial {
            axial_stiffness: youngs_modulus * self.area(),
            bending_stiffness: youngs_modulus * self.second_moment(),
            linear_density: density * self.area(),
            width: self.width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialShape {
    /// Start from the stress-free shape with the object dropped onto it.
    #[default]
    Rest,
    /// Start with the rod wrapped tight around the object at zero strain.
    Wrapped,
}

fn arc_polygon(center: Vec2, radius: f64, start: f64, sweep: f64, n: usize) -> Vec<Vec2> {
    (0..n)
        .map(|k| {
            let a = start + sweep * k as f64 / (n - 1) as f64;
            [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
        })
        .collect()
}

fn chord_length(radius: f64, sweep: f64, n: usize) -> f64 {
    (n - 1) as f64 * 2.0 * radius * (0.5 * sweep.abs() / (n - 1) as f64).sin()
}

/// A semicircular rod hanging below its two fixed ends with a disk resting in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CradleSetup {
    /// Radius of the stress-free semicircle, m.
    pub rod_radius: f64,
    pub object_radius: f64,
    /// Downward load on the object, N.
    pub object_load: f64,
    #[serde(default)]
    pub object_mass: f64,
    /// Magnitude of gravity, m/s², acting along -y.
    pub gravity: f64,
    #[serde(default)]
    pub initial: InitialShape,
}

impl Default for CradleSetup {
    fn default() -> Self {
        CradleSetup {
            rod_radius: 0.51,
            object_radius: 0.45,
            object_load: 50.0,
            object_mass: 0.0,
            gravity: STANDARD_GRAVITY,
            initial: InitialShape::Rest,
        }
    }
}

impl CradleSetup {
    pub fn rest_length(&self, n_nodes: usize) -> f64 {
        chord_length(self.rod_radius, PI, n_nodes)
    }

    pub fn build(&self, n_nodes: usize, material: &RodMaterial) -> (RodModel, Scene) {
        let r = self.rod_radius;
        let rest_length = self.rest_length(n_nodes);
        let rod = RodModel {
            n_nodes,
            rest_length,
            axial_stiffness: material.axial_stiffness,
            bending_stiffness: material.bending_stiffness,
            linear_density: material.linear_density,
            width: material.width,
            natural_curvature: 1.0 / r,
        };
        let (centerline, center) = match self.initial {
            InitialShape::Rest => (arc_polygon([0.0, 0.0], r, PI, PI, n_nodes), [0.0, 0.0]),
            InitialShape::Wrapped => wrapped_path([-r, 0.0], [r, 0.0], self.object_radius, rest_length),
        };
        let scene = Scene {
            object_center: center,
            object_radius: self.object_radius,
            object_mass: self.object_mass,
            gravity: [0.0, -self.gravity],
            object_load: [0.0, -self.object_load],
            boundary: Boundary::FixedBothEnds { clamped: true },
            centerline,
        };
        (rod, scene)
    }
}

/// Taut path from `a` around the underside of a disk to `b`, with the disk
/// lowered until the path is `length` long. Returns a fine polyline and the
/// disk center.
fn wrapped_path(a: Vec2, b: Vec2, radius: f64, length: f64) -> (Vec<Vec2>, Vec2) {
    let mid = 0.5 * (a[0] + b[0]);
    let top = a[1].min(b[1]);
    let geometry = |depth: f64| {
        let c = [mid, top - depth];
        let da = (a[0] - c[0]).hypot(a[1] - c[1]);
        let db = (b[0] - c[0]).hypot(b[1] - c[1]);
        let ta = (a[1] - c[1]).atan2(a[0] - c[0]) + (radius / da).clamp(-1.0, 1.0).acos();
        let tb = (b[1] - c[1]).atan2(b[0] - c[0]) - (radius / db).clamp(-1.0, 1.0).acos();
        let sweep = (tb - ta).rem_euclid(2.0 * PI);
        let len = (da * da - radius * radius).max(0.0).sqrt() + radius * sweep + (db * db - radius * radius).max(0.0).sqrt();
        (c, ta, sweep, len)
    };
    let (mut lo, mut hi) = (0.0, length.max(radius));
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if geometry(m).3 < length {
            lo = m;
        } else {
            hi = m;
        }
    }
    let (c, ta, sweep, _) = geometry(0.5 * (lo + hi));
    let mut path = vec![a];
    path.extend(arc_polygon(c, radius, ta, sweep, 4097));
    path.push(b);
    (path, c)
}

/// A rod laid on an arc around the object, clamped at its base. Open hooks
/// leave the tip free; closed hooks also fix the tip, closing the loop through
/// the ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HookSetup {
    pub object_radius: f64,
    /// Angle of the base on the object, rad.
    pub base_angle: f64,
    /// Clockwise wrap from base to tip, rad.
    pub sweep: f64,
    /// Radial gap between rod and object in the rest shape, m.
    pub clearance: f64,
    /// Pull on the object, N.
    pub pull: Vec2,
    pub closed: bool,
}

impl Default for HookSetup {
    fn default() -> Self {
        HookSetup {
            object_radius: 0.1,
            base_angle: 0.75 * PI,
            sweep: 1.5 * PI,
            clearance: 0.0,
            pull: [10.0, 0.0],
            closed: false,
        }
    }
}

impl HookSetup {
    /// Arc length from the base to the side of the object facing the pull.
    pub fn lever_length(&self) -> f64 {
        let pull_angle = self.pull[1].atan2(self.pull[0]);
        (self.base_angle - pull_angle).rem_euclid(2.0 * PI) * (self.object_radius + self.clearance)
    }

    pub fn build(&self, n_nodes: usize, material: &RodMaterial) -> (RodModel, Scene) {
        let r = self.object_radius + self.clearance;
        let rod = RodModel {
            n_nodes,
            rest_length: chord_length(r, self.sweep, n_nodes),
            axial_stiffness: material.axial_stiffness,
            bending_stiffness: material.bending_stiffness,
            linear_density: material.linear_density,
            width: material.width,
            natural_curvature: -1.0 / r,
        };
        let scene = Scene {
            object_center: [0.0, 0.0],
            object_radius: self.object_radius,
            object_mass: 0.0,
            gravity: [0.0, 0.0],
            object_load: self.pull,
            boundary: if self.closed {
                Boundary::FixedBothEnds { clamped: true }
            } else {
                Boundary::FixedBaseFreeTip { clamped: true }
            },
            centerline: arc_polygon([0.0, 0.0], r, self.base_angle, -self.sweep, n_nodes),
        };
        (rod, scene)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastica::dist;

    #[test]
    fn wrapped_path_has_requested_length() {
        let (path, c) = wrapped_path([-0.51, 0.0], [0.51, 0.0], 0.45, PI * 0.51);
        let len: f64 = path.windows(2).map(|w| dist(w[0], w[1])).sum();
        assert!((len - PI * 0.51).abs() < 1e-6, "{len}");
        assert!(c[1] < 0.0 && c[0].abs() < 1e-12);
    }

    #[test]
    fn cradle_rest_shape_is_stress_free() {
        let section = Section { thickness: 0.02, width: 1.0 };
        let (rod, scene) = CradleSetup::default().build(41, &section.material(1e6, 10.0));
        let lens: Vec<f64> = scene.centerline.windows(2).map(|w| dist(w[0], w[1])).collect();
        for l in lens {
            assert!((l - rod.element_rest_length()).abs() < 1e-14);
        }
    }

    #[test]
    fn section_stiffness() {
        let m = Section { thickness: 0.02, width: 1.0 }.material(1e4, 10.0);
        assert!((m.axial_stiffness - 200.0).abs() < 1e-9);
        assert!((m.bending_stiffness - 1e4 * 0.02f64.powi(3) / 12.0).abs() < 1e-15);
        assert!((m.linear_density - 0.2).abs() < 1e-15);
    }
}
