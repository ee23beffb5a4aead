//! Load-ramped Newton solves for closed- and open-loop scenes.

use super::energy::{characteristic_force, Model, State};
use super::{dist, Boundary, ElasticaError, Equilibrium, RodModel, Scene, SolverParams, Vec2};
use log::{debug, warn};
use serde::{Deserialize, Serialize};

/// Allowed penetration relative to the object radius.
pub const PENETRATION_TOL: f64 = 1e-4;
/// Largest node or object displacement per Newton step, relative to the object radius.
const MAX_STEP: f64 = 0.1;
/// Multiple of the round-off level `ε · k · L` below which residuals are not resolvable.
const ROUNDOFF_FACTOR: f64 = 16.0;
/// Extra iteration budgets granted to an increment that is still descending.
const MAX_EXTENSIONS: usize = 4;
/// Newton chunks spent following a descent path before giving up.
const RELAX_CHUNKS: usize = 500;
/// Increments without any contact before an open-loop object counts as escaped.
const ESCAPE_EMPTY_INCREMENTS: usize = 3;

/// Arc-length resampling of a polyline to `n` points.
pub(crate) fn resample(points: &[Vec2], n: usize) -> Vec<Vec2> {
    let mut cum = vec![0.0];
    for w in points.windows(2) {
        cum.push(cum.last().unwrap() + dist(w[0], w[1]));
    }
    let total = *cum.last().unwrap();
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for k in 0..n {
        let s = total * k as f64 / (n - 1) as f64;
        while seg + 2 < cum.len() && cum[seg + 1] < s {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 { ((s - cum[seg]) / len).clamp(0.0, 1.0) } else { 0.0 };
        let (a, b) = (points[seg], points[seg + 1]);
        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }
    out[0] = points[0];
    out[n - 1] = *points.last().unwrap();
    out
}

/// Moves the object along its applied force until it first touches a node, so
/// the first increment starts with the object supported.
fn settle_object(nodes: &[Vec2], center: Vec2, radius: f64, force: Vec2) -> Vec2 {
    let fnorm = force[0].hypot(force[1]);
    if fnorm == 0.0 || nodes.iter().any(|p| dist(*p, center) <= radius) {
        return center;
    }
    let d = [force[0] / fnorm, force[1] / fnorm];
    let mut best = f64::INFINITY;
    for p in nodes {
        let u = [p[0] - center[0], p[1] - center[1]];
        let along = u[0] * d[0] + u[1] * d[1];
        let perp2 = (u[0] * u[0] + u[1] * u[1]) - along * along;
        if perp2 <= radius * radius {
            let t = along - (radius * radius - perp2).sqrt();
            if t >= 0.0 {
                best = best.min(t);
            }
        }
    }
    if best.is_finite() {
        [center[0] + best * d[0], center[1] + best * d[1]]
    } else {
        center
    }
}

pub(crate) fn initial_state(rod: &RodModel, scene: &Scene) -> State {
    let nodes = resample(&scene.centerline, rod.n_nodes);
    let center = settle_object(&nodes, scene.object_center, scene.object_radius, scene.object_force());
    State { nodes, center }
}

struct Tolerance {
    abs: f64,
}

impl Tolerance {
    fn new(model: &Model, state: &State, rel: f64) -> Self {
        let applied = characteristic_force(model.rod, model.scene);
        let extent = state
            .nodes
            .iter()
            .chain(std::iter::once(&state.center))
            .map(|p| p[0].abs().max(p[1].abs()))
            .fold(model.scene.object_radius, f64::max);
        let roundoff = ROUNDOFF_FACTOR * f64::EPSILON * model.stiffness_scale() * extent * (model.n_free() as f64).sqrt();
        Tolerance { abs: (rel * applied).max(roundoff) }
    }
}

struct NewtonOutcome {
    state: State,
    converged: bool,
    residual: f64,
    iterations: usize,
}

fn norm_vec(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn newton(model: &Model, start: &State, factor: f64, tol: f64, max_iter: usize) -> NewtonOutcome {
    let radius = model.scene.object_radius;
    let mut state = start.clone();
    let mut grad = model.restrict(&model.gradient(&state, factor));
    let mut residual = norm_vec(&grad);
    let mut energy = model.energy(&state, factor);
    let mut lambda: f64 = 0.0;
    for it in 0..max_iter {
        if residual < tol {
            return NewtonOutcome { state, converged: true, residual, iterations: it };
        }
        let hess = model.restrict_hessian(&model.hessian(&state));
        let floor = 1e-12 * hess.max_diag().max(f64::MIN_POSITIVE);
        let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut dir = None;
        for _ in 0..60 {
            if let Some(d) = hess.solve_shifted(&rhs, lambda, floor) {
                dir = Some(d);
                break;
            }
            lambda = if lambda == 0.0 { 1e-10 } else { lambda * 10.0 };
        }
        let Some(mut dir) = dir else {
            warn!("no positive-definite shift found");
            break;
        };
        let largest = dir.chunks(2).map(|c| c[0].hypot(c[1])).fold(0.0, f64::max);
        if largest > MAX_STEP * radius {
            let s = MAX_STEP * radius / largest;
            dir.iter_mut().for_each(|d| *d *= s);
        }
        let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = model.step(&state, &dir, alpha);
            let e = model.energy(&trial, factor);
            let roundoff = 64.0 * f64::EPSILON * energy.abs().max(e.abs());
            if e <= energy + 1e-4 * alpha * slope {
                accepted = Some((trial, e, None));
                break;
            }
            if e <= energy + roundoff {
                let g = model.restrict(&model.gradient(&trial, factor));
                if norm_vec(&g) < residual {
                    accepted = Some((trial, e, Some(g)));
                    break;
                }
            }
            alpha *= 0.5;
        }
        log::trace!("iteration {it}: residual {residual:.3e}, shift {lambda:.1e}");
        // Levenberg-style damping driven by how far the line search had to back off.
        if alpha < 1e-3 {
            lambda = (lambda * 10.0).max(1e-8);
        } else if alpha == 1.0 {
            lambda = if lambda < 1e-10 { 0.0 } else { lambda * 0.1 };
        }
        let Some((trial, e, g)) = accepted else {
            debug!("line search stalled at residual {residual:.3e}");
            return NewtonOutcome { state, converged: false, residual, iterations: it };
        };
        state = trial;
        energy = e;
        grad = g.unwrap_or_else(|| model.restrict(&model.gradient(&state, factor)));
        residual = norm_vec(&grad);
    }
    let converged = residual < tol;
    NewtonOutcome { state, converged, residual, iterations: max_iter }
}

fn equilibrium_from(model: &Model, state: &State, converged: bool, residual: f64, tol: f64) -> Equilibrium {
    let n = model.n();
    let contact_forces: Vec<Vec2> = state.nodes.iter().map(|p| model.contact_force(*p, state.center)).collect();
    let max_penetration = state.nodes.iter().map(|p| model.penetration(*p, state.center)).fold(0.0, f64::max);
    Equilibrium {
        node_positions: state.nodes.clone(),
        object_center: state.center,
        axial_tension: (0..n - 1).map(|e| model.element_tension(state, e)).collect(),
        contact_forces,
        converged,
        residual_norm: residual,
        tolerance: tol,
        max_penetration,
        load_fraction: 0.0,
        newton_iterations: 0,
        diagnostics: Vec::new(),
    }
}

/// What happened at the end of one ramp increment.
enum Increment {
    Done(State, f64, usize),
    Failed(State, f64, usize),
}

/// Runs one increment from `from` to `to`, halving it on failure.
/// Newton with budget extensions: another `max_iterations` chunk is granted while
/// the previous chunk still lowered the energy measurably.
fn newton_extended(model: &Model, start: &State, factor: f64, tol: f64, params: &SolverParams) -> NewtonOutcome {
    let mut out = newton(model, start, factor, tol, params.max_iterations);
    let mut energy = model.energy(start, factor);
    for _ in 0..MAX_EXTENSIONS {
        if out.converged {
            break;
        }
        let now = model.energy(&out.state, factor);
        if energy - now <= 1e-9 * energy.abs().max(now.abs()) {
            break;
        }
        energy = now;
        let more = newton(model, &out.state, factor, tol, params.max_iterations);
        out = NewtonOutcome { iterations: out.iterations + more.iterations, ..more };
    }
    out
}

fn advance(model: &Model, state: &State, from: f64, to: f64, tol: f64, params: &SolverParams, depth: usize) -> Increment {
    let out = newton_extended(model, state, to, tol, params);
    if out.converged {
        return Increment::Done(out.state, out.residual, out.iterations);
    }
    if depth >= params.max_cutbacks {
        return Increment::Failed(out.state, out.residual, out.iterations);
    }
    let mid = 0.5 * (from + to);
    debug!("cutback {from:.4} -> {mid:.4} (residual {:.3e})", out.residual);
    match advance(model, state, from, mid, tol, params, depth + 1) {
        Increment::Done(s, _, i1) => match advance(model, &s, mid, to, tol, params, depth + 1) {
            Increment::Done(s2, r, i2) => Increment::Done(s2, r, i1 + i2),
            Increment::Failed(s2, r, i2) => Increment::Failed(s2, r, i1 + i2),
        },
        failed => failed,
    }
}

fn validate(rod: &RodModel, scene: &Scene, params: &SolverParams) -> Result<(), ElasticaError> {
    rod.validate()?;
    scene.validate()?;
    if !(params.tol.is_finite() && params.tol > 0.0) {
        return Err(ElasticaError::NonPositive { field: "tol", value: params.tol });
    }
    if params.ramp_steps == 0 {
        return Err(ElasticaError::NonPositive { field: "ramp_steps", value: 0.0 });
    }
    Ok(())
}

/// Static equilibrium of a rod fixed at both ends cradling the object, with the
/// load and gravity ramped in `params.ramp_steps` increments.
pub fn solve_closed_loop(rod: &RodModel, scene: &Scene, params: &SolverParams) -> Result<Equilibrium, ElasticaError> {
    if !matches!(scene.boundary, Boundary::FixedBothEnds { .. }) {
        return Err(ElasticaError::WrongBoundary("solve_closed_loop", "fixed_both_ends"));
    }
    validate(rod, scene, params)?;
    let model = Model::new(rod, scene);
    let mut state = initial_state(rod, scene);
    let tol = Tolerance::new(&model, &state, params.tol).abs;
    let mut iterations = 0;
    let mut residual = 0.0;
    for step in 1..=params.ramp_steps {
        let from = (step - 1) as f64 / params.ramp_steps as f64;
        let to = step as f64 / params.ramp_steps as f64;
        match advance(&model, &state, from, to, tol, params, 0) {
            Increment::Done(s, r, it) => {
                state = s;
                residual = r;
                iterations += it;
            }
            Increment::Failed(s, r, it) => {
                let mut eq = equilibrium_from(&model, &s, false, r, tol);
                eq.load_fraction = from;
                eq.newton_iterations = iterations + it;
                eq.diagnostics.push(format!(
                    "no equilibrium at load fraction {to:.4} after {} cutbacks; residual {r:.3e} N > {tol:.3e} N",
                    params.max_cutbacks
                ));
                return Ok(eq);
            }
        }
    }
    let mut eq = equilibrium_from(&model, &state, true, residual, tol);
    eq.load_fraction = 1.0;
    eq.newton_iterations = iterations;
    if eq.max_penetration > PENETRATION_TOL * scene.object_radius {
        eq.converged = false;
        eq.diagnostics.push(format!(
            "penetration {:.3e} m exceeds {:.3e} m",
            eq.max_penetration,
            PENETRATION_TOL * scene.object_radius
        ));
    }
    Ok(eq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeReason {
    /// No node touched the object for several consecutive increments.
    ContactLost,
    /// The free tip swung past the object center toward the pull.
    TipPassedObject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldDiagnostics {
    pub load_fraction: f64,
    pub reason: Option<EscapeReason>,
    pub residual_norm: f64,
    pub contact_nodes: usize,
    pub object_displacement: Vec2,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoldResult {
    Holds(Equilibrium),
    Escapes(HoldDiagnostics),
    Inconclusive(HoldDiagnostics),
}

impl HoldResult {
    pub fn holds(&self) -> bool {
        matches!(self, HoldResult::Holds(_))
    }

    pub fn escapes(&self) -> bool {
        matches!(self, HoldResult::Escapes(_))
    }
}

/// Quasi-static pull on an object hooked by a rod whose tip is free.
pub fn solve_open_loop_hold(rod: &RodModel, scene: &Scene, params: &SolverParams) -> Result<HoldResult, ElasticaError> {
    if !matches!(scene.boundary, Boundary::FixedBaseFreeTip { .. }) {
        return Err(ElasticaError::WrongBoundary("solve_open_loop_hold", "fixed_base_free_tip"));
    }
    validate(rod, scene, params)?;
    let model = Model::new(rod, scene);
    let mut state = initial_state(rod, scene);
    let start_center = state.center;
    let tol = Tolerance::new(&model, &state, params.tol).abs;
    let pull = scene.object_force();
    let pull_norm = pull[0].hypot(pull[1]);
    let dir = if pull_norm > 0.0 { [pull[0] / pull_norm, pull[1] / pull_norm] } else { [0.0, 0.0] };
    let contact_floor = 1e-9 * characteristic_force(rod, scene);

    let tip_passed = |s: &State| {
        let tip = *s.nodes.last().unwrap();
        pull_norm > 0.0 && (tip[0] - s.center[0]) * dir[0] + (tip[1] - s.center[1]) * dir[1] > 0.0
    };
    let in_contact = |s: &State| {
        s.nodes.iter().filter(|p| {
            let f = model.contact_force(**p, s.center);
            f[0].hypot(f[1]) > contact_floor
        })
        .count()
    };
    let diagnostics = |s: &State, fraction: f64, reason, residual, message: String| HoldDiagnostics {
        load_fraction: fraction,
        reason,
        residual_norm: residual,
        contact_nodes: in_contact(s),
        object_displacement: [s.center[0] - start_center[0], s.center[1] - start_center[1]],
        message,
    };

    if tip_passed(&state) {
        return Ok(HoldResult::Escapes(diagnostics(&state, 0.0, Some(EscapeReason::TipPassedObject), 0.0, "tip starts on the pull side of the object".into())));
    }

    let mut empty_run = 0;
    let mut iterations = 0;
    let mut residual = 0.0;
    for step in 1..=params.ramp_steps {
        let from = (step - 1) as f64 / params.ramp_steps as f64;
        let to = step as f64 / params.ramp_steps as f64;
        let (next, r, converged, it) = match advance(&model, &state, from, to, tol, params, 0) {
            Increment::Done(s, r, it) => (s, r, true, it),
            Increment::Failed(s, r, it) => (s, r, false, it),
        };
        iterations += it;
        residual = r;
        state = next;
        if tip_passed(&state) {
            return Ok(HoldResult::Escapes(diagnostics(&state, to, Some(EscapeReason::TipPassedObject), r, format!("tip passed the object at load fraction {to:.3}"))));
        }
        if pull_norm > 0.0 && in_contact(&state) == 0 {
            empty_run += 1;
            if empty_run >= ESCAPE_EMPTY_INCREMENTS {
                return Ok(HoldResult::Escapes(diagnostics(&state, to, Some(EscapeReason::ContactLost), r, format!("no contact for {empty_run} increments"))));
            }
            continue;
        }
        empty_run = 0;
        if converged {
            continue;
        }
        // No equilibrium nearby: follow the descent path at this load until it
        // settles, stalls or meets an escape criterion.
        let mut settled = false;
        for _ in 0..RELAX_CHUNKS {
            let before = state.center;
            let e_before = model.energy(&state, to);
            let out = newton(&model, &state, to, tol, params.max_iterations);
            iterations += out.iterations;
            residual = out.residual;
            state = out.state;
            if tip_passed(&state) {
                return Ok(HoldResult::Escapes(diagnostics(&state, to, Some(EscapeReason::TipPassedObject), residual, format!("tip passed the object at load fraction {to:.3}"))));
            }
            if out.converged || in_contact(&state) == 0 {
                settled = out.converged;
                break;
            }
            let moved = dist(before, state.center);
            let drop = e_before - model.energy(&state, to);
            if moved <= 1e-9 * scene.object_radius && drop <= 64.0 * f64::EPSILON * e_before.abs() {
                break;
            }
        }
        if settled {
            continue;
        }
        if pull_norm > 0.0 && in_contact(&state) == 0 {
            empty_run = 1;
            continue;
        }
        return Ok(HoldResult::Inconclusive(diagnostics(&state, to, None, residual, format!(
            "contact persists but no equilibrium at load fraction {to:.3}; residual {residual:.3e} N > {tol:.3e} N"
        ))));
    }
    if empty_run > 0 {
        return Ok(HoldResult::Inconclusive(diagnostics(&state, 1.0, None, residual, format!("contact lost in the final {empty_run} increments"))));
    }
    let mut eq = equilibrium_from(&model, &state, true, residual, tol);
    eq.load_fraction = 1.0;
    eq.newton_iterations = iterations;
    Ok(HoldResult::Holds(eq))
}
