//! Typed run configuration built from a strict TOML document.

use super::schema::{as_f64, check, Errors, Section};
use super::ConfigError;
use crate::capacity::{MembraneSpec, MembraneStrength, SystemSpec, WinchSpec};
use crate::capstan::{CapstanWrap, ClampSpec};
use crate::elastica::{CradleSetup, DensityMode, HookSetup, InitialShape, RodMaterial, Section as RodSection, SolverParams};
use crate::topology::{read_vertices_csv, BranchingMechanism, GroundedTip, MechanismPath, ObjectRegion, Polyline, P2, P3};
use crate::units::{unit_factor, Dimension, STANDARD_GRAVITY};
use serde::Serialize;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use toml::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Capstan,
    Clamp,
    Capacity,
    Simulate,
    Sweep,
    Topology,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Capstan, Command::Clamp, Command::Capacity, Command::Simulate, Command::Sweep, Command::Topology];

    pub fn name(self) -> &'static str {
        match self {
            Command::Capstan => "capstan",
            Command::Clamp => "clamp",
            Command::Capacity => "capacity",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Topology => "topology",
        }
    }
}

impl FromStr for Command {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or(())
    }
}

/// Unit used for forces in reports. Inputs always carry their own units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
pub enum ForceUnit {
    #[default]
    #[value(name = "N")]
    #[serde(rename = "N")]
    Newton,
    #[value(name = "kgf")]
    #[serde(rename = "kgf")]
    Kgf,
}

impl ForceUnit {
    pub fn from_newton(self, f: f64) -> f64 {
        match self {
            ForceUnit::Newton => f,
            ForceUnit::Kgf => f / STANDARD_GRAVITY,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ForceUnit::Newton => "N",
            ForceUnit::Kgf => "kgf",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClampInput {
    Uniform(ClampSpec),
    /// Curves with individual angles.
    Varied { mu: f64, clamp_force: f64, curve_angles: Vec<f64>, phi_entry: f64, phi_exit: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimulateInput {
    Cradle { material: RodMaterial, setup: CradleSetup },
    Hook { material: RodMaterial, setup: HookSetup },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepInput {
    pub section: RodSection,
    /// Volumetric density used when it does not follow the modulus, kg/m³.
    pub density: f64,
    pub density_mode: DensityMode,
    pub moduli: Vec<f64>,
    pub setup: CradleSetup,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopologyInput {
    Serial { path: MechanismPath, object: ObjectRegion },
    Branching { mechanism: BranchingMechanism, object: ObjectRegion },
}

/// Parsed analysis sections; only the one matching the command is required.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Inputs {
    pub capstan: Option<CapstanWrap>,
    pub clamp: Option<ClampInput>,
    pub capacity: Option<SystemSpec>,
    pub simulate: Option<SimulateInput>,
    pub sweep: Option<SweepInput>,
    pub topology: Option<TopologyInput>,
}

impl Inputs {
    fn has(&self, c: Command) -> bool {
        match c {
            Command::Capstan => self.capstan.is_some(),
            Command::Clamp => self.clamp.is_some(),
            Command::Capacity => self.capacity.is_some(),
            Command::Simulate => self.simulate.is_some(),
            Command::Sweep => self.sweep.is_some(),
            Command::Topology => self.topology.is_some(),
        }
    }
}

pub const TOL_RANGE: (f64, f64) = (1e-14, 1e-2);
pub const NODES_RANGE: (usize, usize) = (10, 100_000);
pub const RAMP_RANGE: (usize, usize) = (1, 10_000);
pub const ITERATIONS_RANGE: (usize, usize) = (1, 100_000);
pub const CUTBACKS_MAX: usize = 30;
pub const DEFAULT_NODES: usize = 200;
pub const DEFAULT_OUT_DIR: &str = "loopgrasp-out";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Files the configuration read, resolved against its directory.
    pub input_paths: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub units: ForceUnit,
    pub solver: SolverParams,
    pub nodes: usize,
    pub inputs: Inputs,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub units: Option<ForceUnit>,
    pub tol: Option<f64>,
    pub nodes: Option<usize>,
    pub ramp_steps: Option<usize>,
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) -> Result<(), Vec<ConfigError>> {
        let mut e = Errors::default();
        if let Some(dir) = &o.out_dir {
            self.out_dir = dir.clone();
        }
        if let Some(u) = o.units {
            self.units = u;
        }
        if let Some(t) = o.tol {
            self.solver.tol = t;
        }
        if let Some(n) = o.nodes {
            self.nodes = n;
        }
        if let Some(r) = o.ramp_steps {
            self.solver.ramp_steps = r;
        }
        check_ranges(&mut e, self.solver.tol, self.nodes, self.solver.ramp_steps, "--");
        if e.0.is_empty() {
            Ok(())
        } else {
            Err(e.0)
        }
    }
}

fn check_ranges(e: &mut Errors, tol: f64, nodes: usize, ramp: usize, prefix: &str) {
    check(
        e,
        tol >= TOL_RANGE.0 && tol <= TOL_RANGE.1,
        format!("{prefix}tol"),
        &format!("must lie in [{:e}, {:e}]", TOL_RANGE.0, TOL_RANGE.1),
    );
    check(
        e,
        (NODES_RANGE.0..=NODES_RANGE.1).contains(&nodes),
        format!("{prefix}nodes"),
        &format!("must lie in [{}, {}]", NODES_RANGE.0, NODES_RANGE.1),
    );
    let name = if prefix == "--" { "--ramp-steps".to_string() } else { format!("{prefix}ramp_steps") };
    check(e, (RAMP_RANGE.0..=RAMP_RANGE.1).contains(&ramp), name, &format!("must lie in [{}, {}]", RAMP_RANGE.0, RAMP_RANGE.1));
}

/// Reads and validates the file at `path`. The command comes from its
/// top-level `command` key or, failing that, from the only analysis section.
pub fn load_config(path: &Path) -> Result<RunConfig, Vec<ConfigError>> {
    load_config_for(path, None)
}

/// As [`load_config`], with the command fixed by the caller.
pub fn load_config_for(path: &Path, command: Option<Command>) -> Result<RunConfig, Vec<ConfigError>> {
    let text = std::fs::read_to_string(path).map_err(|err| {
        vec![ConfigError { field: String::new(), message: format!("cannot read {}: {err}", path.display()) }]
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut config = parse_config(&text, base, command)?;
    config.input_paths.insert(0, path.to_path_buf());
    Ok(config)
}

/// Validates a configuration document; relative paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path, command: Option<Command>) -> Result<RunConfig, Vec<ConfigError>> {
    let doc: toml::Table = toml::from_str(text)
        .map_err(|err| vec![ConfigError { field: String::new(), message: format!("not valid TOML: {}", err.message()) }])?;
    let mut e = Errors::default();
    let mut root = Section::root(&doc);
    let ctx = Ctx { base_dir };

    let named = root.choice(&mut e, "command", &Command::ALL.map(Command::name), false).and_then(|s| s.parse::<Command>().ok());
    if let (Some(a), Some(b)) = (named, command) {
        if a != b {
            e.push("command", format!("file is for `{}` but `{}` was requested", a.name(), b.name()));
        }
    }

    let mut units = ForceUnit::default();
    let mut out_dir = PathBuf::from(DEFAULT_OUT_DIR);
    if let Some(mut s) = root.table(&mut e, "output", false) {
        if let Some(u) = s.choice(&mut e, "units", &["N", "kgf"], false) {
            units = if u == "kgf" { ForceUnit::Kgf } else { ForceUnit::Newton };
        }
        if let Some(d) = s.string(&mut e, "directory", false) {
            out_dir = base_dir.join(d);
        }
        s.finish(&mut e);
    }

    let mut solver = SolverParams::default();
    let mut nodes = DEFAULT_NODES;
    if let Some(mut s) = root.table(&mut e, "solver", false) {
        if let Some(t) = s.number(&mut e, "tol", false) {
            solver.tol = t;
        }
        let count = |s: &mut Section, e: &mut Errors, key: &str| -> Option<usize> {
            let v = s.integer(e, key, false)?;
            match usize::try_from(v) {
                Ok(v) => Some(v),
                Err(_) => {
                    e.push(s.field(key), "must not be negative");
                    None
                }
            }
        };
        if let Some(n) = count(&mut s, &mut e, "nodes") {
            nodes = n;
        }
        if let Some(r) = count(&mut s, &mut e, "ramp_steps") {
            solver.ramp_steps = r;
        }
        if let Some(m) = count(&mut s, &mut e, "max_iterations") {
            solver.max_iterations = m;
            check(
                &mut e,
                (ITERATIONS_RANGE.0..=ITERATIONS_RANGE.1).contains(&m),
                s.field("max_iterations"),
                &format!("must lie in [{}, {}]", ITERATIONS_RANGE.0, ITERATIONS_RANGE.1),
            );
        }
        if let Some(c) = count(&mut s, &mut e, "max_cutbacks") {
            solver.max_cutbacks = c;
            check(&mut e, c <= CUTBACKS_MAX, s.field("max_cutbacks"), &format!("must be at most {CUTBACKS_MAX}"));
        }
        s.finish(&mut e);
    }
    check_ranges(&mut e, solver.tol, nodes, solver.ramp_steps, "solver.");

    let mut input_paths = Vec::new();
    let inputs = Inputs {
        capstan: root.table(&mut e, "capstan", false).and_then(|s| capstan(&mut e, s)),
        clamp: root.table(&mut e, "clamp", false).and_then(|s| clamp(&mut e, s)),
        capacity: root.table(&mut e, "capacity", false).and_then(|s| capacity(&mut e, s)),
        simulate: root.table(&mut e, "simulate", false).and_then(|s| simulate(&mut e, s)),
        sweep: root.table(&mut e, "sweep", false).and_then(|s| sweep(&mut e, s)),
        topology: root.table(&mut e, "topology", false).and_then(|s| topology(&mut e, s, &ctx, &mut input_paths)),
    };
    let present: Vec<Command> = Command::ALL.into_iter().filter(|c| root.has(c.name())).collect();
    root.finish(&mut e);

    let command = match command.or(named) {
        Some(c) => {
            if !root_has(&doc, c) {
                e.push(c.name(), format!("section is required by the `{}` command", c.name()));
            }
            Some(c)
        }
        None if present.len() == 1 => Some(present[0]),
        None => {
            e.push("command", "name the command to run: the file has no single analysis section");
            None
        }
    };
    match command {
        Some(command) if e.0.is_empty() && inputs.has(command) => Ok(RunConfig {
            command,
            input_paths,
            out_dir,
            units,
            solver,
            nodes,
            inputs,
        }),
        _ => Err(e.0),
    }
}

fn root_has(doc: &toml::Table, c: Command) -> bool {
    doc.contains_key(c.name())
}

struct Ctx<'a> {
    base_dir: &'a Path,
}

fn nonneg(e: &mut Errors, s: &Section, key: &str, v: Option<f64>) {
    if let Some(v) = v {
        check(e, v >= 0.0, s.field(key), "must not be negative");
    }
}

fn positive(e: &mut Errors, s: &Section, key: &str, v: Option<f64>) {
    if let Some(v) = v {
        check(e, v > 0.0, s.field(key), "must be positive");
    }
}

fn count_u32(e: &mut Errors, s: &mut Section, key: &str, required: bool) -> Option<u32> {
    let v = s.integer(e, key, required)?;
    match u32::try_from(v) {
        Ok(v) => Some(v),
        Err(_) => {
            e.push(s.field(key), "must be a non-negative integer");
            None
        }
    }
}

fn capstan(e: &mut Errors, mut s: Section) -> Option<CapstanWrap> {
    let hold_force = s.quantity(e, "hold_force", Dimension::Force, true);
    let mu = s.number(e, "mu", true);
    let wrap_angle = s.quantity(e, "wrap_angle", Dimension::Angle, true);
    nonneg(e, &s, "hold_force", hold_force);
    nonneg(e, &s, "mu", mu);
    nonneg(e, &s, "wrap_angle", wrap_angle);
    s.finish(e);
    Some(CapstanWrap { hold_force: hold_force?, mu: mu?, wrap_angle: wrap_angle? })
}

fn clamp(e: &mut Errors, mut s: Section) -> Option<ClampInput> {
    let mu = s.number(e, "mu", true);
    let clamp_force = s.quantity(e, "clamp_force", Dimension::Force, true);
    nonneg(e, &s, "mu", mu);
    nonneg(e, &s, "clamp_force", clamp_force);
    let out = if s.has("curve_angles") {
        let curve_angles = s.quantity_list(e, "curve_angles", Dimension::Angle, true);
        for (i, a) in curve_angles.iter().flatten().enumerate() {
            check(e, *a >= 0.0, format!("{}[{i}]", s.field("curve_angles")), "must not be negative");
        }
        for key in ["n_curves", "theta_c"] {
            if s.has(key) {
                s.raw(key);
                e.push(s.field(key), "conflicts with curve_angles");
            }
        }
        let phi_entry = s.quantity(e, "phi_entry", Dimension::Angle, true);
        let phi_exit = s.quantity(e, "phi_exit", Dimension::Angle, true);
        nonneg(e, &s, "phi_entry", phi_entry);
        nonneg(e, &s, "phi_exit", phi_exit);
        (|| {
            Some(ClampInput::Varied {
                mu: mu?,
                clamp_force: clamp_force?,
                curve_angles: curve_angles?,
                phi_entry: phi_entry?,
                phi_exit: phi_exit?,
            })
        })()
    } else {
        clamp_spec_rest(e, &mut s, mu, clamp_force).map(ClampInput::Uniform)
    };
    s.finish(e);
    out
}

/// Uniform clamp fields after μ and clamping force; entry and exit bends
/// default to half a curve.
fn clamp_spec_rest(e: &mut Errors, s: &mut Section, mu: Option<f64>, clamp_force: Option<f64>) -> Option<ClampSpec> {
    let n_curves = count_u32(e, s, "n_curves", true);
    let theta_c = s.quantity(e, "theta_c", Dimension::Angle, true);
    if let Some(t) = theta_c {
        check(e, t > 0.0 && t <= std::f64::consts::PI, s.field("theta_c"), "must lie in (0, 180 deg]");
    }
    let phi_entry = s.quantity(e, "phi_entry", Dimension::Angle, false);
    let phi_exit = s.quantity(e, "phi_exit", Dimension::Angle, false);
    nonneg(e, s, "phi_entry", phi_entry);
    nonneg(e, s, "phi_exit", phi_exit);
    let theta_c = theta_c?;
    Some(ClampSpec {
        mu: mu?,
        clamp_force: clamp_force?,
        n_curves: n_curves?,
        theta_c,
        phi_entry: phi_entry.unwrap_or(0.5 * theta_c),
        phi_exit: phi_exit.unwrap_or(0.5 * theta_c),
    })
}

fn winch(e: &mut Errors, mut s: Section) -> Option<WinchSpec> {
    let stall_torque = s.quantity(e, "stall_torque", Dimension::Torque, true);
    let gear_ratio = s.number(e, "gear_ratio", true);
    let core_radius = s.quantity(e, "core_radius", Dimension::Length, true);
    let max_radius = s.quantity(e, "max_radius", Dimension::Length, true);
    let material_thickness = s.quantity(e, "material_thickness", Dimension::Length, true);
    let wound_length = s.quantity(e, "wound_length", Dimension::Length, false);
    positive(e, &s, "stall_torque", stall_torque);
    if let Some(g) = gear_ratio {
        check(e, g >= 1.0, s.field("gear_ratio"), "must be at least 1");
    }
    positive(e, &s, "core_radius", core_radius);
    positive(e, &s, "max_radius", max_radius);
    if let (Some(c), Some(m)) = (core_radius, max_radius) {
        check(e, m >= c, s.field("max_radius"), "must not be smaller than core_radius");
    }
    nonneg(e, &s, "material_thickness", material_thickness);
    nonneg(e, &s, "wound_length", wound_length);
    s.finish(e);
    Some(WinchSpec {
        stall_torque: stall_torque?,
        gear_ratio: gear_ratio?,
        core_radius: core_radius?,
        max_radius: max_radius?,
        material_thickness: material_thickness?,
        wound_length,
    })
}

fn membrane(e: &mut Errors, mut s: Section) -> Option<MembraneSpec> {
    let per_width = s.quantity(e, "strength_per_width", Dimension::ForcePerLength, false);
    let yield_stress = s.quantity(e, "yield_stress", Dimension::Pressure, false);
    let thickness = s.quantity(e, "thickness", Dimension::Length, false);
    positive(e, &s, "strength_per_width", per_width);
    positive(e, &s, "yield_stress", yield_stress);
    positive(e, &s, "thickness", thickness);
    let strength = match (s.has("strength_per_width"), s.has("yield_stress") || s.has("thickness")) {
        (true, false) => per_width.map(MembraneStrength::PerWidth),
        (false, true) => {
            if !s.has("yield_stress") || !s.has("thickness") {
                e.push(s.field("yield_stress"), "needs both yield_stress and thickness");
            }
            yield_stress.zip(thickness).map(|(yield_stress, thickness)| MembraneStrength::Stress { yield_stress, thickness })
        }
        (true, true) => {
            e.push(s.field("strength_per_width"), "give either strength_per_width or yield_stress with thickness, not both");
            None
        }
        (false, false) => {
            e.push(s.field("strength_per_width"), "membrane strength is required: strength_per_width or yield_stress with thickness");
            None
        }
    };
    let flattened_width = s.quantity(e, "flattened_width", Dimension::Length, true);
    positive(e, &s, "flattened_width", flattened_width);
    let load_layers = count_u32(e, &mut s, "load_layers", true);
    if let Some(l) = load_layers {
        check(e, l >= 1, s.field("load_layers"), "must be at least 1");
    }
    s.finish(e);
    Some(MembraneSpec { strength: Some(strength?), flattened_width: flattened_width?, load_layers: load_layers? })
}

fn capacity(e: &mut Errors, mut s: Section) -> Option<SystemSpec> {
    let strands = count_u32(e, &mut s, "strands_per_loop", false);
    if let Some(n) = strands {
        check(e, n >= 1, s.field("strands_per_loop"), "must be at least 1");
    }
    let membrane = s.table(e, "membrane", true).and_then(|t| membrane(e, t));
    let base_fastening = s.table(e, "base_fastening", true).and_then(|t| capstan(e, t));
    let base_winch = s.table(e, "base_winch", true).and_then(|t| winch(e, t));
    let tip_clamp = s.table(e, "tip_clamp", true).and_then(|mut t| {
        let mu = t.number(e, "mu", true);
        let clamp_force = t.quantity(e, "clamp_force", Dimension::Force, true);
        nonneg(e, &t, "mu", mu);
        nonneg(e, &t, "clamp_force", clamp_force);
        let spec = clamp_spec_rest(e, &mut t, mu, clamp_force);
        t.finish(e);
        spec
    });
    let tip_winch = s.table(e, "tip_winch", true).and_then(|t| winch(e, t));
    s.finish(e);
    Some(SystemSpec {
        membrane: membrane?,
        base_fastening: base_fastening?,
        base_winch: base_winch?,
        tip_clamp: tip_clamp?,
        tip_winch: tip_winch?,
        strands_per_loop: strands.unwrap_or(2),
    })
}

fn rod_section(e: &mut Errors, s: &mut Section) -> Option<RodSection> {
    let thickness = s.quantity(e, "thickness", Dimension::Length, true);
    let width = s.quantity(e, "width", Dimension::Length, true);
    positive(e, s, "thickness", thickness);
    positive(e, s, "width", width);
    Some(RodSection { thickness: thickness?, width: width? })
}

/// Rod stiffness from section and modulus, with optional direct overrides.
fn rod_material(e: &mut Errors, mut s: Section) -> Option<RodMaterial> {
    let section = rod_section(e, &mut s);
    let modulus = s.quantity(e, "youngs_modulus", Dimension::Pressure, false);
    let density = s.quantity(e, "density", Dimension::Density, false);
    let axial = s.quantity(e, "axial_stiffness", Dimension::Force, false);
    let bending = s.quantity(e, "bending_stiffness", Dimension::FlexuralRigidity, false);
    positive(e, &s, "youngs_modulus", modulus);
    nonneg(e, &s, "density", density);
    positive(e, &s, "axial_stiffness", axial);
    nonneg(e, &s, "bending_stiffness", bending);
    if modulus.is_none() && !s.has("youngs_modulus") && !(s.has("axial_stiffness") && s.has("bending_stiffness")) {
        e.push(s.field("youngs_modulus"), "is required unless axial_stiffness and bending_stiffness are both given");
    }
    s.finish(e);
    let section = section?;
    let base = section.material(modulus.unwrap_or(0.0), density.unwrap_or(0.0));
    Some(RodMaterial {
        axial_stiffness: axial.or(modulus.map(|_| base.axial_stiffness))?,
        bending_stiffness: bending.or(modulus.map(|_| base.bending_stiffness))?,
        ..base
    })
}

fn cradle(e: &mut Errors, mut s: Section) -> Option<CradleSetup> {
    let rod_radius = s.quantity(e, "rod_radius", Dimension::Length, true);
    let object_radius = s.quantity(e, "object_radius", Dimension::Length, true);
    let object_load = s.quantity(e, "object_load", Dimension::Force, false);
    let object_mass = s.quantity(e, "object_mass", Dimension::Mass, false);
    let gravity = s.quantity(e, "gravity", Dimension::Acceleration, false);
    let initial = s.choice(e, "initial", &["rest", "wrapped"], false);
    positive(e, &s, "rod_radius", rod_radius);
    positive(e, &s, "object_radius", object_radius);
    nonneg(e, &s, "object_load", object_load);
    nonneg(e, &s, "object_mass", object_mass);
    nonneg(e, &s, "gravity", gravity);
    if let (Some(r), Some(o)) = (rod_radius, object_radius) {
        check(e, o <= r, s.field("object_radius"), "must not exceed rod_radius, or the object cannot sit between the rod ends");
    }
    s.finish(e);
    Some(CradleSetup {
        rod_radius: rod_radius?,
        object_radius: object_radius?,
        object_load: object_load.unwrap_or(0.0),
        object_mass: object_mass.unwrap_or(0.0),
        gravity: gravity.unwrap_or(STANDARD_GRAVITY),
        initial: if initial == Some("wrapped") { InitialShape::Wrapped } else { InitialShape::Rest },
    })
}

fn hook(e: &mut Errors, mut s: Section) -> Option<HookSetup> {
    let object_radius = s.quantity(e, "object_radius", Dimension::Length, true);
    let base_angle = s.quantity(e, "base_angle", Dimension::Angle, true);
    let sweep = s.quantity(e, "sweep", Dimension::Angle, true);
    let clearance = s.quantity(e, "clearance", Dimension::Length, false);
    let pull = s.quantity_list(e, "pull", Dimension::Force, true);
    let closed = s.boolean(e, "closed", false);
    positive(e, &s, "object_radius", object_radius);
    nonneg(e, &s, "clearance", clearance);
    if let Some(w) = sweep {
        check(e, w > 0.0 && w < 2.0 * std::f64::consts::PI, s.field("sweep"), "must lie in (0, 360 deg)");
    }
    if let Some(p) = &pull {
        check(e, p.len() == 2, s.field("pull"), "must have two components, e.g. [\"10 N\", \"0 N\"]");
    }
    s.finish(e);
    let pull = pull.filter(|p| p.len() == 2)?;
    Some(HookSetup {
        object_radius: object_radius?,
        base_angle: base_angle?,
        sweep: sweep?,
        clearance: clearance.unwrap_or(0.0),
        pull: [pull[0], pull[1]],
        closed: closed.unwrap_or(false),
    })
}

fn simulate(e: &mut Errors, mut s: Section) -> Option<SimulateInput> {
    let material = s.table(e, "rod", true).and_then(|t| rod_material(e, t));
    let out = match (s.has("cradle"), s.has("hook")) {
        (true, false) => {
            let setup = s.table(e, "cradle", true).and_then(|t| cradle(e, t));
            material.zip(setup).map(|(material, setup)| SimulateInput::Cradle { material, setup })
        }
        (false, true) => {
            let setup = s.table(e, "hook", true).and_then(|t| hook(e, t));
            material.zip(setup).map(|(material, setup)| SimulateInput::Hook { material, setup })
        }
        (has_cradle, _) => {
            let what = if has_cradle { "give only one of" } else { "needs one of" };
            e.push(s.field("cradle"), format!("{what} [simulate.cradle] or [simulate.hook]"));
            s.raw("cradle");
            s.raw("hook");
            None
        }
    };
    s.finish(e);
    out
}

fn sweep(e: &mut Errors, mut s: Section) -> Option<SweepInput> {
    let moduli = s.quantity_list(e, "moduli", Dimension::Pressure, true);
    if let Some(m) = &moduli {
        check(e, !m.is_empty(), s.field("moduli"), "must not be empty");
        check(e, m.iter().all(|&x| x > 0.0), s.field("moduli"), "must all be positive");
        check(e, m.windows(2).all(|w| w[0] <= w[1]), s.field("moduli"), "must be sorted ascending");
    }
    let rod = s.table(e, "rod", true).and_then(|mut t| {
        let section = rod_section(e, &mut t);
        let density = t.quantity(e, "density", Dimension::Density, false);
        nonneg(e, &t, "density", density);
        t.finish(e);
        Some((section?, density))
    });
    let scaling = s.table(e, "density_scaling", false).map(|mut t| {
        let modulus_low = t.quantity(e, "modulus_low", Dimension::Pressure, true);
        let density_low = t.quantity(e, "density_low", Dimension::Density, true);
        let modulus_high = t.quantity(e, "modulus_high", Dimension::Pressure, true);
        let density_high = t.quantity(e, "density_high", Dimension::Density, true);
        for (k, v) in [("modulus_low", modulus_low), ("density_low", density_low), ("modulus_high", modulus_high), ("density_high", density_high)] {
            positive(e, &t, k, v);
        }
        if let (Some(a), Some(b)) = (modulus_low, modulus_high) {
            check(e, a != b, t.field("modulus_high"), "must differ from modulus_low");
        }
        t.finish(e);
        Some(DensityMode::ScaleWithModulus {
            modulus_low: modulus_low?,
            density_low: density_low?,
            modulus_high: modulus_high?,
            density_high: density_high?,
        })
    });
    let setup = s.table(e, "cradle", true).and_then(|t| cradle(e, t));
    if let (Some((_, Some(_))), Some(_)) = (&rod, &scaling) {
        e.push(s.field("rod.density"), "conflicts with [sweep.density_scaling]");
    }
    s.finish(e);
    let (section, density) = rod?;
    let density_mode = match scaling {
        Some(mode) => mode?,
        None => DensityMode::Fixed,
    };
    Some(SweepInput { section, density: density.unwrap_or(0.0), density_mode, moduli: moduli?, setup: setup? })
}

/// Inline rows or a CSV file (`<key>_file`), scaled to metres.
fn polyline(
    e: &mut Errors,
    s: &mut Section,
    ctx: &Ctx,
    key: &str,
    scale: f64,
    required: bool,
    paths: &mut Vec<PathBuf>,
) -> Option<Polyline> {
    let file_key = format!("{key}_file");
    let line = match (s.has(key), s.has(&file_key)) {
        (true, true) => {
            e.push(s.field(key), format!("conflicts with {file_key}"));
            s.raw(key);
            s.raw(&file_key);
            return None;
        }
        (false, false) => {
            if required {
                e.push(s.field(key), format!("is required (inline rows or {file_key})"));
            }
            return None;
        }
        (true, false) => {
            let field = s.field(key);
            let v = s.raw(key)?;
            let dims = v.as_array().and_then(|a| a.first()).and_then(Value::as_array).map(Vec::len);
            match dims.and_then(|d| s_rows(v, d).map(|rows| (d, rows))) {
                Some((2, rows)) => Polyline::Planar(rows.iter().map(|r| [r[0], r[1]]).collect()),
                Some((3, rows)) => Polyline::Spatial(rows.iter().map(|r| [r[0], r[1], r[2]]).collect()),
                _ => {
                    e.push(field, "must be a non-empty array of [x, y] or [x, y, z] numeric rows");
                    return None;
                }
            }
        }
        (false, true) => {
            let rel = s.string(e, &file_key, true)?;
            let path = ctx.base_dir.join(rel);
            let read = File::open(&path)
                .map_err(|err| format!("cannot open {}: {err}", path.display()))
                .and_then(|f| read_vertices_csv(f).map_err(|err| err.to_string()));
            paths.push(path);
            match read {
                Ok(l) => l,
                Err(msg) => {
                    e.push(s.field(&file_key), msg);
                    return None;
                }
            }
        }
    };
    Some(match line {
        Polyline::Planar(v) => Polyline::Planar(v.into_iter().map(|p| p.map(|x| x * scale)).collect()),
        Polyline::Spatial(v) => Polyline::Spatial(v.into_iter().map(|p| p.map(|x| x * scale)).collect()),
    })
}

fn s_rows(v: &Value, d: usize) -> Option<Vec<Vec<f64>>> {
    v.as_array()?
        .iter()
        .map(|row| {
            let r = row.as_array()?;
            (r.len() == d).then_some(())?;
            r.iter().map(as_f64).collect()
        })
        .collect()
}

fn planar(e: &mut Errors, field: String, line: Polyline) -> Option<Vec<P2>> {
    match line {
        Polyline::Planar(v) => Some(v),
        Polyline::Spatial(_) => {
            e.push(field, "must be planar ([x, y] rows)");
            None
        }
    }
}

fn spatial(e: &mut Errors, field: String, line: Polyline) -> Option<Vec<P3>> {
    match line {
        Polyline::Spatial(v) => Some(v),
        Polyline::Planar(_) => {
            e.push(field, "must be spatial ([x, y, z] rows)");
            None
        }
    }
}

fn object(e: &mut Errors, mut s: Section, ctx: &Ctx, scale: f64, paths: &mut Vec<PathBuf>) -> Option<ObjectRegion> {
    let kind = s.choice(e, "kind", &["disk", "polygon", "loop", "convex_body"], true);
    let out = match kind {
        Some("disk") => {
            let center = match s.raw("center") {
                Some(v) => match s_rows(&Value::Array(vec![v.clone()]), 2) {
                    Some(rows) => Some([rows[0][0] * scale, rows[0][1] * scale]),
                    None => {
                        e.push(s.field("center"), "must be [x, y]");
                        None
                    }
                },
                None => {
                    e.push(s.field("center"), "is required");
                    None
                }
            };
            let radius = s.number(e, "radius", true).map(|r| r * scale);
            positive(e, &s, "radius", radius);
            center.zip(radius).map(|(center, radius)| ObjectRegion::Disk { center, radius })
        }
        Some(kind) => {
            let field = s.field("vertices");
            let line = polyline(e, &mut s, ctx, "vertices", scale, true, paths);
            match kind {
                "polygon" => line.and_then(|l| planar(e, field, l)).map(ObjectRegion::Polygon),
                "loop" => line.and_then(|l| spatial(e, field, l)).map(ObjectRegion::Loop),
                _ => line.and_then(|l| spatial(e, field, l)).map(ObjectRegion::ConvexBody),
            }
        }
        None => None,
    };
    s.finish(e);
    out
}

fn topology(e: &mut Errors, mut s: Section, ctx: &Ctx, paths: &mut Vec<PathBuf>) -> Option<TopologyInput> {
    let unit = s.string(e, "length_unit", true);
    let scale = unit.and_then(|u| match unit_factor(u) {
        Some((Dimension::Length, f)) => Some(f),
        _ => {
            e.push(s.field("length_unit"), format!("`{u}` is not a length unit"));
            None
        }
    });
    let scale_or_1 = scale.unwrap_or(1.0);
    let object = s.table(e, "object", true).and_then(|t| object(e, t, ctx, scale_or_1, paths));
    let mechanism = s.table(e, "mechanism", true).and_then(|mut m| {
        let vertices = polyline(e, &mut m, ctx, "vertices", scale_or_1, true, paths);
        let base_grounded = m.boolean(e, "base_grounded", true);
        let closure = polyline(e, &mut m, ctx, "ground_closure", scale_or_1, false, paths);
        let out = if m.has("parents") {
            let parents = m.integer_list(e, "parents", true);
            let tips = m.integer_list(e, "grounded_tips", false).unwrap_or_default();
            if m.has("tip_grounded") {
                m.raw("tip_grounded");
                e.push(m.field("tip_grounded"), "branching mechanisms list grounded_tips instead");
            }
            if closure.is_some() {
                e.push(m.field("ground_closure"), "branching mechanisms close each grounded tip with a straight segment");
            }
            let parent: Option<Vec<Option<usize>>> = parents.map(|p| p.iter().map(|&i| usize::try_from(i).ok()).collect());
            let grounded_tips: Option<Vec<GroundedTip>> = tips
                .iter()
                .map(|&t| usize::try_from(t).ok().map(|vertex| GroundedTip { vertex, ground_closure: None }))
                .collect();
            if grounded_tips.is_none() {
                e.push(m.field("grounded_tips"), "must be vertex indices");
            }
            (|| {
                Some(TopologyInput::Branching {
                    mechanism: BranchingMechanism {
                        vertices: vertices?,
                        parent: parent?,
                        base_grounded: base_grounded?,
                        grounded_tips: grounded_tips?,
                    },
                    object: object.clone()?,
                })
            })()
        } else {
            let tip_grounded = m.boolean(e, "tip_grounded", true);
            (|| {
                Some(TopologyInput::Serial {
                    path: MechanismPath {
                        vertices: vertices?,
                        base_grounded: base_grounded?,
                        tip_grounded: tip_grounded?,
                        ground_closure: closure,
                    },
                    object: object.clone()?,
                })
            })()
        };
        m.finish(e);
        out
    });
    s.finish(e);
    scale?;
    mechanism
}
