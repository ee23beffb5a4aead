//! Discrete rod energy with its gradient and Hessian.

use super::banded::{Bordered, SymBand};
use super::{dist, Boundary, RodModel, Scene, Vec2};

/// Half bandwidth of the rod block: a bending stencil spans three nodes.
pub const BANDWIDTH: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub nodes: Vec<Vec2>,
    pub center: Vec2,
}

pub struct Model<'a> {
    pub rod: &'a RodModel,
    pub scene: &'a Scene,
    pub rest_len: f64,
    pub rest_turn: f64,
    pub bend_coef: f64,
    /// Full-load gravity force on each node.
    pub node_weight: Vec<Vec2>,
    pub penalty: f64,
    /// Nodes `[free_lo, free_hi)` are unknowns; the rest are held.
    pub free_lo: usize,
    pub free_hi: usize,
}

/// Relative depth the full applied load may push a single node into the object.
pub const PENALTY_DEPTH: f64 = 1e-5;

impl<'a> Model<'a> {
    pub fn new(rod: &'a RodModel, scene: &'a Scene) -> Self {
        let n = rod.n_nodes;
        let rest_len = rod.element_rest_length();
        let half = 0.5 * rest_len * rod.natural_curvature;
        let rest_turn = if half.abs() <= 1.0 { 2.0 * half.asin() } else { rest_len * rod.natural_curvature };
        let bend_coef = rod.bending_stiffness / rest_len;
        let node_weight = (0..n)
            .map(|i| {
                let share = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                let m = rod.linear_density * rest_len * share;
                [m * scene.gravity[0], m * scene.gravity[1]]
            })
            .collect();
        let bending = rod.bending_stiffness > 0.0;
        let (free_lo, free_hi) = match scene.boundary {
            Boundary::FixedBothEnds { clamped } => {
                let k = if clamped && bending { 2 } else { 1 };
                (k, n - k)
            }
            Boundary::FixedBaseFreeTip { clamped } => (if clamped && bending { 2 } else { 1 }, n),
        };
        let applied = characteristic_force(rod, scene);
        let penalty = if applied > 0.0 {
            applied / (PENALTY_DEPTH * scene.object_radius)
        } else {
            1e3 * rod.axial_stiffness / rest_len
        };
        Model { rod, scene, rest_len, rest_turn, bend_coef, node_weight, penalty, free_lo, free_hi }
    }

    pub fn n(&self) -> usize {
        self.rod.n_nodes
    }

    /// Number of unknowns: free node coordinates plus the object center.
    pub fn n_free(&self) -> usize {
        2 * (self.free_hi - self.free_lo) + 2
    }

    /// Largest stiffness scale in the model, N/m.
    pub fn stiffness_scale(&self) -> f64 {
        let axial = self.rod.axial_stiffness / self.rest_len;
        let bending = 4.0 * self.rod.bending_stiffness / self.rest_len.powi(3);
        axial.max(bending).max(self.penalty)
    }

    pub fn penetration(&self, p: Vec2, c: Vec2) -> f64 {
        self.scene.object_radius - dist(p, c)
    }

    pub fn element_tension(&self, s: &State, e: usize) -> f64 {
        let l = dist(s.nodes[e], s.nodes[e + 1]);
        self.rod.axial_stiffness * (l / self.rest_len - 1.0)
    }

    pub fn contact_force(&self, p: Vec2, c: Vec2) -> Vec2 {
        let u = [p[0] - c[0], p[1] - c[1]];
        let d = u[0].hypot(u[1]);
        let g = self.scene.object_radius - d;
        if g <= 0.0 || d == 0.0 {
            return [0.0, 0.0];
        }
        let f = self.penalty * g / d;
        [f * u[0], f * u[1]]
    }

    fn turning(e1: Vec2, e2: Vec2) -> f64 {
        let cross = e1[0] * e2[1] - e1[1] * e2[0];
        let dot = e1[0] * e2[0] + e1[1] * e2[1];
        cross.atan2(dot)
    }

    pub fn energy(&self, s: &State, factor: f64) -> f64 {
        let n = self.n();
        let mut e = 0.0;
        let ea = self.rod.axial_stiffness;
        for i in 0..n - 1 {
            let strain = dist(s.nodes[i], s.nodes[i + 1]) / self.rest_len - 1.0;
            e += 0.5 * ea * self.rest_len * strain * strain;
        }
        if self.bend_coef > 0.0 {
            for i in 1..n - 1 {
                let psi = Self::turning(sub(s.nodes[i], s.nodes[i - 1]), sub(s.nodes[i + 1], s.nodes[i])) - self.rest_turn;
                e += 0.5 * self.bend_coef * psi * psi;
            }
        }
        for (p, w) in s.nodes.iter().zip(&self.node_weight) {
            let g = self.penetration(*p, s.center);
            if g > 0.0 {
                e += 0.5 * self.penalty * g * g;
            }
            e -= factor * (w[0] * p[0] + w[1] * p[1]);
        }
        let f = self.scene.object_force();
        e - factor * (f[0] * s.center[0] + f[1] * s.center[1])
    }

    /// Full gradient: `2n` node coordinates followed by the object center.
    pub fn gradient(&self, s: &State, factor: f64) -> Vec<f64> {
        let n = self.n();
        let mut g = vec![0.0; 2 * n + 2];
        let ea = self.rod.axial_stiffness;
        for i in 0..n - 1 {
            let e = sub(s.nodes[i + 1], s.nodes[i]);
            let l = e[0].hypot(e[1]);
            let t = ea * (l / self.rest_len - 1.0) / l;
            for k in 0..2 {
                g[2 * i + k] -= t * e[k];
                g[2 * i + 2 + k] += t * e[k];
            }
        }
        if self.bend_coef > 0.0 {
            for i in 1..n - 1 {
                let (psi, grad) = turning_gradient(s.nodes[i - 1], s.nodes[i], s.nodes[i + 1]);
                let m = self.bend_coef * (psi - self.rest_turn);
                for (a, gv) in grad.iter().enumerate() {
                    g[2 * (i - 1) + a] += m * gv;
                }
            }
        }
        for (i, (p, w)) in s.nodes.iter().zip(&self.node_weight).enumerate() {
            let f = self.contact_force(*p, s.center);
            for k in 0..2 {
                g[2 * i + k] -= f[k] + factor * w[k];
                g[2 * n + k] += f[k];
            }
        }
        let f = self.scene.object_force();
        g[2 * n] -= factor * f[0];
        g[2 * n + 1] -= factor * f[1];
        g
    }

    /// Hessian over all node coordinates plus the object center.
    pub fn hessian(&self, s: &State) -> Bordered {
        let n = self.n();
        let mut band = SymBand::zeros(2 * n, BANDWIDTH);
        let mut border = vec![[0.0; 2]; 2 * n];
        let mut corner = [[0.0; 2]; 2];
        let ea = self.rod.axial_stiffness;
        for i in 0..n - 1 {
            let e = sub(s.nodes[i + 1], s.nodes[i]);
            let l = e[0].hypot(e[1]);
            let u = [e[0] / l, e[1] / l];
            let t = ea * (l / self.rest_len - 1.0);
            let mut h = [[0.0; 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    let id = if a == b { 1.0 } else { 0.0 };
                    h[a][b] = ea / self.rest_len * u[a] * u[b] + t / l * (id - u[a] * u[b]);
                }
            }
            for a in 0..2 {
                for b in 0..=a {
                    band.add(2 * i + a, 2 * i + b, h[a][b]);
                    band.add(2 * i + 2 + a, 2 * i + 2 + b, h[a][b]);
                }
                for b in 0..2 {
                    band.add(2 * i + 2 + a, 2 * i + b, -h[a][b]);
                }
            }
        }
        if self.bend_coef > 0.0 {
            for i in 1..n - 1 {
                let (psi, grad) = turning_gradient(s.nodes[i - 1], s.nodes[i], s.nodes[i + 1]);
                let hess = turning_hessian(s.nodes[i - 1], s.nodes[i], s.nodes[i + 1]);
                let m = self.bend_coef * (psi - self.rest_turn);
                let base = 2 * (i - 1);
                for a in 0..6 {
                    for b in 0..=a {
                        band.add(base + a, base + b, self.bend_coef * grad[a] * grad[b] + m * hess[a][b]);
                    }
                }
            }
        }
        let k = self.penalty;
        for (i, p) in s.nodes.iter().enumerate() {
            let u = sub(*p, s.center);
            let d = u[0].hypot(u[1]);
            let g = self.scene.object_radius - d;
            if g <= 0.0 || d == 0.0 {
                continue;
            }
            let nn = [u[0] / d, u[1] / d];
            for a in 0..2 {
                for b in 0..2 {
                    let id = if a == b { 1.0 } else { 0.0 };
                    let h = k * nn[a] * nn[b] - k * g / d * (id - nn[a] * nn[b]);
                    if b <= a {
                        band.add(2 * i + a, 2 * i + b, h);
                    }
                    corner[a][b] += h;
                    border[2 * i + a][b] -= h;
                }
            }
        }
        Bordered { band, border, corner }
    }

    /// Restricts a full-length vector to the unknowns.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut v = full[2 * self.free_lo..2 * self.free_hi].to_vec();
        v.extend_from_slice(&full[2 * n..2 * n + 2]);
        v
    }

    pub fn restrict_hessian(&self, h: &Bordered) -> Bordered {
        let (lo, hi) = (2 * self.free_lo, 2 * self.free_hi);
        Bordered { band: h.band.sub(lo, hi), border: h.border[lo..hi].to_vec(), corner: h.corner }
    }

    /// Applies a step over the unknowns.
    pub fn step(&self, s: &State, dx: &[f64], alpha: f64) -> State {
        let mut out = s.clone();
        for (j, i) in (self.free_lo..self.free_hi).enumerate() {
            out.nodes[i][0] += alpha * dx[2 * j];
            out.nodes[i][1] += alpha * dx[2 * j + 1];
        }
        let m = dx.len() - 2;
        out.center[0] += alpha * dx[m];
        out.center[1] += alpha * dx[m + 1];
        out
    }
}

/// Full applied load at the end of the ramp: object force plus rod weight.
pub fn characteristic_force(rod: &RodModel, scene: &Scene) -> f64 {
    let f = scene.object_force();
    f[0].hypot(f[1]) + rod.weight(scene.gravity)
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn perp_over_sq(e: Vec2) -> Vec2 {
    let r2 = e[0] * e[0] + e[1] * e[1];
    [-e[1] / r2, e[0] / r2]
}

/// Turning angle at `x1` and its gradient with respect to `(x0, x1, x2)`.
pub fn turning_gradient(x0: Vec2, x1: Vec2, x2: Vec2) -> (f64, [f64; 6]) {
    let e1 = sub(x1, x0);
    let e2 = sub(x2, x1);
    let psi = Model::turning(e1, e2);
    let d1 = perp_over_sq(e1);
    let d2 = perp_over_sq(e2);
    // ψ = θ(e2) − θ(e1); e1 = x1 − x0, e2 = x2 − x1
    (psi, [d1[0], d1[1], -d1[0] - d2[0], -d1[1] - d2[1], d2[0], d2[1]])
}

fn angle_hessian(e: Vec2) -> [[f64; 2]; 2] {
    let (x, y) = (e[0], e[1]);
    let r4 = (x * x + y * y).powi(2);
    [[2.0 * x * y / r4, (y * y - x * x) / r4], [(y * y - x * x) / r4, -2.0 * x * y / r4]]
}

pub fn turning_hessian(x0: Vec2, x1: Vec2, x2: Vec2) -> [[f64; 6]; 6] {
    let h1 = angle_hessian(sub(x1, x0));
    let h2 = angle_hessian(sub(x2, x1));
    // selectors: e1 = [-I, I, 0], e2 = [0, -I, I]
    let s1 = [-1.0, 1.0, 0.0];
    let s2 = [0.0, -1.0, 1.0];
    let mut h = [[0.0; 6]; 6];
    for p in 0..3 {
        for q in 0..3 {
            for a in 0..2 {
                for b in 0..2 {
                    h[2 * p + a][2 * q + b] = -s1[p] * s1[q] * h1[a][b] + s2[p] * s2[q] * h2[a][b];
                }
            }
        }
    }
    h
}
