//! Executes a validated configuration and writes its artifacts.

use super::config::{ClampInput, Command, ForceUnit, RunConfig, SimulateInput, SweepInput, TopologyInput};
use crate::capacity::system_capacity;
use crate::capstan::{capstan_amplify, clamp_capacity, clamp_capacity_nonuniform};
use crate::elastica::{
    pressure_profile, solve_closed_loop, solve_open_loop_hold, sweep_rigidity, write_profile_csv, write_sweep_csv, Equilibrium,
    HoldDiagnostics, HoldResult, PressureProfile, RodModel,
};
use crate::topology::{classify_branching, classify_grasp};
use crate::units::newton_to_kgf;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub const SUMMARY_FILE: &str = "summary.json";

/// Outcome class; its discriminant is the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// Invalid input or a physically impossible configuration.
    DomainError = 1,
    NotConverged = 2,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::DomainError => "domain_error",
            Status::NotConverged => "not_converged",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub status: Status,
    pub summary: Value,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.status.code()
    }
}

/// Result of one command before it is wrapped into the summary.
struct Report {
    status: Status,
    errors: Vec<String>,
    results: Value,
    artifacts: Vec<String>,
}

impl Report {
    fn ok(results: Value) -> Self {
        Report { status: Status::Ok, errors: Vec::new(), results, artifacts: Vec::new() }
    }

    fn failed(status: Status, message: String) -> Self {
        Report { status, errors: vec![message], results: Value::Null, artifacts: Vec::new() }
    }

    /// Keeps the worst status seen.
    fn demote(&mut self, status: Status, message: String) {
        if status.code() > self.status.code() {
            self.status = status;
        }
        self.errors.push(message);
    }
}

fn summary_json(command: Option<Command>, units: ForceUnit, report: &Report) -> Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.map(Command::name),
        "status": report.status.label(),
        "exit_code": report.status.code(),
        "force_unit": units.symbol(),
        "errors": report.errors,
        "results": report.results,
        "artifacts": report.artifacts,
    })
}

fn write_summary(out_dir: &Path, summary: &Value) -> std::io::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let mut text = serde_json::to_string_pretty(summary).expect("summary is plain JSON");
    text.push('\n');
    std::fs::write(out_dir.join(SUMMARY_FILE), text)
}

/// Summary for a run that never started because its configuration was
/// rejected. Written on a best-effort basis; returns the document.
pub fn write_rejection(out_dir: &Path, command: Option<Command>, errors: &[String]) -> Value {
    let report = Report { status: Status::DomainError, errors: errors.to_vec(), results: Value::Null, artifacts: Vec::new() };
    let summary = summary_json(command, ForceUnit::default(), &report);
    if let Err(err) = write_summary(out_dir, &summary) {
        log::error!("cannot write {}: {err}", out_dir.join(SUMMARY_FILE).display());
    }
    summary
}

/// Runs the configured command. The summary is always written; artifacts are
/// written next to it.
pub fn run(config: &RunConfig) -> RunOutcome {
    let dir = &config.out_dir;
    let mut report = match std::fs::create_dir_all(dir) {
        Err(err) => Report::failed(Status::DomainError, format!("cannot create {}: {err}", dir.display())),
        Ok(()) => match config.command {
            Command::Capstan => capstan(config),
            Command::Clamp => clamp(config),
            Command::Capacity => capacity(config),
            Command::Simulate => simulate(config),
            Command::Sweep => sweep(config),
            Command::Topology => topology(config),
        },
    };
    let mut summary = summary_json(Some(config.command), config.units, &report);
    if let Err(err) = write_summary(dir, &summary) {
        report.demote(Status::DomainError, format!("cannot write {SUMMARY_FILE}: {err}"));
        summary = summary_json(Some(config.command), config.units, &report);
    }
    log::info!("{} finished with status {}", config.command.name(), report.status.label());
    RunOutcome { status: report.status, summary }
}

fn capstan(config: &RunConfig) -> Report {
    let wrap = config.inputs.capstan.expect("validated");
    let u = config.units;
    match capstan_amplify(&wrap) {
        Ok(load) => Report::ok(json!({
            "hold_force": u.from_newton(wrap.hold_force),
            "mu": wrap.mu,
            "wrap_angle_rad": wrap.wrap_angle,
            "amplification": (wrap.mu * wrap.wrap_angle).exp(),
            "load_capacity": u.from_newton(load),
            "load_capacity_N": load,
        })),
        Err(err) => Report::failed(Status::DomainError, format!("capstan: {err}")),
    }
}

fn clamp(config: &RunConfig) -> Report {
    let u = config.units;
    let (result, mu, force, total) = match config.inputs.clamp.as_ref().expect("validated") {
        ClampInput::Uniform(spec) => (clamp_capacity(spec), spec.mu, spec.clamp_force, spec.total_angle()),
        ClampInput::Varied { mu, clamp_force, curve_angles, phi_entry, phi_exit } => (
            clamp_capacity_nonuniform(*mu, *clamp_force, curve_angles, *phi_entry, *phi_exit),
            *mu,
            *clamp_force,
            phi_entry + curve_angles.iter().sum::<f64>() + phi_exit,
        ),
    };
    match result {
        Ok(load) => Report::ok(json!({
            "mu": mu,
            "clamp_force": u.from_newton(force),
            "total_angle_rad": total,
            "load_capacity": u.from_newton(load),
            "load_capacity_N": load,
        })),
        Err(err) => Report::failed(Status::DomainError, format!("clamp: {err}")),
    }
}

fn capacity(config: &RunConfig) -> Report {
    match system_capacity(config.inputs.capacity.as_ref().expect("validated")) {
        Ok(report) => {
            let mut v = report.to_json();
            let kgf: serde_json::Map<String, Value> =
                report.per_limit.iter().map(|(k, f)| (k.clone(), json!(newton_to_kgf(*f)))).collect();
            v["per_limit_kgf"] = Value::Object(kgf);
            Report::ok(v)
        }
        Err(err) => Report::failed(Status::DomainError, format!("capacity: {err}")),
    }
}

fn write_csv(dir: &Path, name: &str, write: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), String> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .and_then(|mut w| {
            write(&mut w)?;
            w.flush()
        })
        .map_err(|err| format!("cannot write {}: {err}", path.display()))
}

fn equilibrium_json(eq: &Equilibrium, profile: &PressureProfile, u: ForceUnit) -> Value {
    let f = eq.force_on_object();
    let max_tension = eq.axial_tension.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    json!({
        "converged": eq.converged,
        "residual_norm_N": eq.residual_norm,
        "tolerance_N": eq.tolerance,
        "newton_iterations": eq.newton_iterations,
        "load_fraction": eq.load_fraction,
        "object_center_m": eq.object_center,
        "force_on_object": [u.from_newton(f[0]), u.from_newton(f[1])],
        "max_tension": u.from_newton(max_tension),
        "max_penetration_m": eq.max_penetration,
        "contact_nodes": eq.contact_nodes().count(),
        "peak_pressure_Pa": profile.peak_pressure(),
        "contact_arc_rad": profile.contact_arc(),
        "diagnostics": eq.diagnostics,
    })
}

/// Writes the profile CSV for a solve and reports convergence.
fn finish_solve(dir: &Path, name: &str, eq: &Equilibrium, rod: &RodModel, profile: &PressureProfile, report: &mut Report) {
    match write_csv(dir, name, |w| write_profile_csv(w, eq, profile, rod)) {
        Ok(()) => report.artifacts.push(name.to_string()),
        Err(msg) => report.demote(Status::DomainError, msg),
    }
    if !eq.converged {
        report.demote(
            Status::NotConverged,
            format!("{name}: no equilibrium within tolerance (residual {:e} N, tolerance {:e} N)", eq.residual_norm, eq.tolerance),
        );
    }
}

fn hold_json(outcome: &str, d: &HoldDiagnostics) -> Value {
    json!({
        "outcome": outcome,
        "load_fraction": d.load_fraction,
        "reason": d.reason,
        "residual_norm_N": d.residual_norm,
        "contact_nodes": d.contact_nodes,
        "object_displacement_m": d.object_displacement,
        "message": d.message,
    })
}

fn simulate(config: &RunConfig) -> Report {
    let dir = &config.out_dir;
    let u = config.units;
    match config.inputs.simulate.as_ref().expect("validated") {
        SimulateInput::Cradle { material, setup } => {
            let (rod, scene) = setup.build(config.nodes, material);
            match solve_closed_loop(&rod, &scene, &config.solver) {
                Ok(eq) => {
                    let profile = pressure_profile(&eq, &scene, &rod);
                    let mut report = Report::ok(json!({ "scenario": "cradle", "equilibrium": equilibrium_json(&eq, &profile, u) }));
                    finish_solve(dir, "profile.csv", &eq, &rod, &profile, &mut report);
                    report
                }
                Err(err) => Report::failed(Status::DomainError, format!("simulate: {err}")),
            }
        }
        SimulateInput::Hook { material, setup } => {
            let (rod, scene) = setup.build(config.nodes, material);
            let kind = if setup.closed { "closed_hook" } else { "open_hook" };
            let result = if setup.closed {
                solve_closed_loop(&rod, &scene, &config.solver).map(HoldResult::Holds)
            } else {
                solve_open_loop_hold(&rod, &scene, &config.solver)
            };
            match result {
                Ok(HoldResult::Holds(eq)) => {
                    let profile = pressure_profile(&eq, &scene, &rod);
                    let mut report = Report::ok(json!({
                        "scenario": kind,
                        "outcome": "holds",
                        "equilibrium": equilibrium_json(&eq, &profile, u),
                    }));
                    finish_solve(dir, "profile.csv", &eq, &rod, &profile, &mut report);
                    report
                }
                Ok(HoldResult::Escapes(d)) => {
                    let mut v = hold_json("escapes", &d);
                    v["scenario"] = json!(kind);
                    Report::ok(v)
                }
                Ok(HoldResult::Inconclusive(d)) => {
                    let mut v = hold_json("inconclusive", &d);
                    v["scenario"] = json!(kind);
                    let mut report = Report::ok(v);
                    report.demote(Status::NotConverged, format!("simulate: neither held nor escaped: {}", d.message));
                    report
                }
                Err(err) => Report::failed(Status::DomainError, format!("simulate: {err}")),
            }
        }
    }
}

fn sweep(config: &RunConfig) -> Report {
    let dir = &config.out_dir;
    let SweepInput { section, density, density_mode, moduli, setup } = config.inputs.sweep.as_ref().expect("validated");
    let material = section.material(moduli[0], *density);
    let (template, scene) = setup.build(config.nodes, &material);
    let points = match sweep_rigidity(&template, section, &scene, moduli, density_mode, &config.solver) {
        Ok(p) => p,
        Err(err) => return Report::failed(Status::DomainError, format!("sweep: {err}")),
    };
    let mut report = Report::ok(Value::Null);
    let mut members = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let name = format!("profile_{i:02}.csv");
        finish_solve(dir, &name, &p.equilibrium, &p.rod, &p.profile, &mut report);
        members.push(json!({
            "youngs_modulus_Pa": p.modulus,
            "bending_stiffness_N_m2": p.rod.bending_stiffness,
            "linear_density_kg_per_m": p.rod.linear_density,
            "profile": name,
            "equilibrium": equilibrium_json(&p.equilibrium, &p.profile, config.units),
        }));
    }
    match write_csv(dir, "sweep.csv", |w| write_sweep_csv(w, &points)) {
        Ok(()) => report.artifacts.push("sweep.csv".to_string()),
        Err(msg) => report.demote(Status::DomainError, msg),
    }
    let peaks: Vec<f64> = points.iter().map(|p| p.peak_pressure).collect();
    report.results = json!({
        "members": members,
        "peak_pressure_Pa": peaks,
        "peak_pressure_non_decreasing": peaks.windows(2).all(|w| w[0] <= w[1]),
    });
    report
}

fn topology(config: &RunConfig) -> Report {
    match config.inputs.topology.as_ref().expect("validated") {
        TopologyInput::Serial { path, object } => match classify_grasp(path, object) {
            Ok(t) => Report::ok(serde_json::to_value(t).expect("plain data")),
            Err(err) => Report::failed(Status::DomainError, format!("topology: {err}")),
        },
        TopologyInput::Branching { mechanism, object } => match classify_branching(mechanism, object) {
            Ok(per_tip) => {
                let tips: Vec<Value> = mechanism
                    .tips()
                    .into_iter()
                    .zip(per_tip)
                    .map(|(tip, t)| {
                        let mut v = serde_json::to_value(t).expect("plain data");
                        v["tip"] = json!(tip);
                        v
                    })
                    .collect();
                Report::ok(json!({ "tips": tips }))
            }
            Err(err) => Report::failed(Status::DomainError, format!("topology: {err}")),
        },
    }
}
