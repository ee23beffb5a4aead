use loopgrasp::elastica::*;

const SECTION: Section = Section { thickness: 0.02, width: 1.0 };

fn membrane(n: usize, load: f64, density: f64) -> (RodModel, Scene) {
    let setup = CradleSetup { object_load: load, ..Default::default() };
    let mut material = SECTION.material(125e6, density);
    material.bending_stiffness = 0.0;
    setup.build(n, &material)
}

fn solve(rod: &RodModel, scene: &Scene) -> Equilibrium {
    let eq = solve_closed_loop(rod, scene, &SolverParams::default()).unwrap();
    assert!(eq.converged, "{:?}", eq.diagnostics);
    assert!(eq.residual_norm < eq.tolerance);
    eq
}

/// Mean tension of the two elements meeting at `node`.
fn node_tension(eq: &Equilibrium, node: usize) -> f64 {
    0.5 * (eq.axial_tension[node - 1] + eq.axial_tension[node])
}

/// Contact nodes away from the touch-down and lift-off points.
fn interior_contacts(eq: &Equilibrium, skip: usize) -> Vec<usize> {
    let nodes: Vec<usize> = eq.contact_nodes().collect();
    nodes[skip..nodes.len() - skip].to_vec()
}

/// Downward load carried by the object: applied load plus its own weight.
fn object_weight(scene: &Scene) -> f64 {
    let g = scene.gravity[0].hypot(scene.gravity[1]);
    scene.object_load[1].abs() + scene.object_mass * g
}

#[test]
fn membrane_pressure_is_tension_over_radius() {
    let (rod, scene) = membrane(200, 1000.0, 0.0);
    let eq = solve(&rod, &scene);
    let profile = pressure_profile(&eq, &scene, &rod);
    let interior = interior_contacts(&eq, 2);
    assert!(interior.len() > 20);
    for s in profile.samples.iter().filter(|s| interior.contains(&s.node)) {
        let oracle = node_tension(&eq, s.node) / (rod.width * scene.object_radius);
        assert!((s.pressure - oracle).abs() < 0.02 * oracle, "node {}: {} vs {}", s.node, s.pressure, oracle);
    }
}

#[test]
fn membrane_tension_is_uniform_over_contact() {
    let (rod, scene) = membrane(200, 1000.0, 0.0);
    let eq = solve(&rod, &scene);
    let nodes: Vec<usize> = eq.contact_nodes().collect();
    let (first, last) = (nodes[0], *nodes.last().unwrap());
    let t: Vec<f64> = eq.axial_tension[first..last].to_vec();
    let mean = t.iter().sum::<f64>() / t.len() as f64;
    for v in t {
        assert!((v - mean).abs() < 0.01 * mean, "{v} vs {mean}");
    }
}

#[test]
fn contact_forces_balance_the_load() {
    for (rod, scene) in [membrane(200, 1000.0, 0.0), {
        let setup = CradleSetup { object_load: 50.0, object_mass: 3.0, ..Default::default() };
        setup.build(200, &SECTION.material(1e7, 10.0))
    }] {
        let eq = solve(&rod, &scene);
        let fy: f64 = eq.contact_forces.iter().map(|f| f[1]).sum();
        let fx: f64 = eq.contact_forces.iter().map(|f| f[0]).sum();
        let total = object_weight(&scene);
        // Contact forces act on the rod, pushing it away from the object.
        assert!((fy + total).abs() < 0.005 * total, "{fy} vs {total}");
        assert!(fx.abs() < 0.005 * total);
    }
}

#[test]
fn contact_forces_are_normal_and_compressive() {
    let setup = CradleSetup { object_load: 50.0, ..Default::default() };
    let (rod, scene) = setup.build(200, &SECTION.material(10f64.powf(5.5), 10.0));
    let eq = solve(&rod, &scene);
    let mut seen = 0;
    for (p, f) in eq.node_positions.iter().zip(&eq.contact_forces) {
        let mag = f[0].hypot(f[1]);
        if mag == 0.0 {
            continue;
        }
        seen += 1;
        let n = [p[0] - eq.object_center[0], p[1] - eq.object_center[1]];
        let nn = n[0].hypot(n[1]);
        let cross = (f[0] * n[1] - f[1] * n[0]) / (mag * nn);
        let dot = (f[0] * n[0] + f[1] * n[1]) / (mag * nn);
        assert!(cross.abs() < 1e-10, "tangential part {cross}");
        assert!(dot > 0.0, "contact pulls the rod into the object");
    }
    assert!(seen > 10);
}

#[test]
fn symmetric_scene_gives_symmetric_profile() {
    let setup = CradleSetup { object_load: 50.0, ..Default::default() };
    let (rod, scene) = setup.build(200, &SECTION.material(1e7, 10.0));
    let eq = solve(&rod, &scene);
    let n = eq.node_positions.len();
    let scale = eq.contact_forces.iter().map(|f| f[0].hypot(f[1])).fold(0.0, f64::max);
    for i in 0..n / 2 {
        let (a, b) = (eq.node_positions[i], eq.node_positions[n - 1 - i]);
        assert!((a[0] + b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6, "node {i}");
        let (fa, fb) = (eq.contact_forces[i], eq.contact_forces[n - 1 - i]);
        assert!((fa[0] + fb[0]).abs() < 1e-4 * scale && (fa[1] - fb[1]).abs() < 1e-4 * scale, "force {i}");
    }
    let profile = pressure_profile(&eq, &scene, &rod);
    let samples = &profile.samples;
    for (s, m) in samples.iter().zip(samples.iter().rev()) {
        let down = -std::f64::consts::FRAC_PI_2;
        assert!(((s.angle - down) + (m.angle - down)).abs() < 1e-6);
        assert!((s.pressure - m.pressure).abs() < 1e-4 * profile.peak_pressure());
    }
}

#[test]
fn membrane_peak_pressure_converges_under_refinement() {
    let peaks: Vec<f64> = [200, 400]
        .iter()
        .map(|&n| {
            let (rod, scene) = membrane(n, 1000.0, 0.0);
            let eq = solve(&rod, &scene);
            pressure_profile(&eq, &scene, &rod).peak_pressure()
        })
        .collect();
    assert!((peaks[1] - peaks[0]).abs() < 0.05 * peaks[1], "{peaks:?}");
}

#[test]
fn touch_down_force_converges_under_refinement() {
    // With bending stiffness the touch-down reaction is concentrated, so its
    // nodal pressure grows with refinement; the force it carries converges.
    let window = 0.15;
    let forces: Vec<f64> = [200, 400]
        .iter()
        .map(|&n| {
            let setup = CradleSetup { object_load: 50.0, ..Default::default() };
            let (rod, scene) = setup.build(n, &SECTION.material(1e7, 10.0));
            let eq = solve(&rod, &scene);
            let samples = pressure_profile(&eq, &scene, &rod).samples;
            let start = samples[0].angle;
            samples.iter().filter(|s| s.angle - start < window).map(|s| eq.contact_magnitude(s.node)).sum::<f64>()
        })
        .collect();
    assert!((forces[1] - forces[0]).abs() < 0.05 * forces[1], "{forces:?}");
}

#[test]
fn no_contact_gives_empty_profile() {
    let setup = CradleSetup { object_load: 0.0, gravity: 0.0, ..Default::default() };
    let (rod, scene) = setup.build(50, &SECTION.material(1e7, 10.0));
    let eq = solve(&rod, &scene);
    let profile = pressure_profile(&eq, &scene, &rod);
    assert!(profile.is_empty());
    assert_eq!(profile.peak_pressure(), 0.0);
}

#[test]
fn sweep_member_matches_direct_solve() {
    let setup = CradleSetup { object_load: 50.0, ..Default::default() };
    let (template, scene) = setup.build(100, &SECTION.material(1e4, 10.0));
    let params = SolverParams::default();
    let sweep = sweep_rigidity(&template, &SECTION, &scene, &[1e6], &DensityMode::Fixed, &params).unwrap();
    assert_eq!(sweep.len(), 1);
    let (rod, scene) = setup.build(100, &SECTION.material(1e6, 10.0));
    let direct = solve_closed_loop(&rod, &scene, &params).unwrap();
    assert_eq!(sweep[0].equilibrium.node_positions, direct.node_positions);
    assert_eq!(sweep[0].peak_pressure, pressure_profile(&direct, &scene, &rod).peak_pressure());
}

#[test]
fn sweep_rejects_unsorted_values() {
    let setup = CradleSetup::default();
    let (template, scene) = setup.build(50, &SECTION.material(1e4, 10.0));
    let out = sweep_rigidity(&template, &SECTION, &scene, &[1e6, 1e5], &DensityMode::Fixed, &SolverParams::default());
    assert_eq!(out.unwrap_err(), ElasticaError::UnsortedSweep);
}

#[test]
fn softest_sweep_member_follows_membrane_oracle() {
    let setup = CradleSetup { object_load: 50.0, ..Default::default() };
    let (template, scene) = setup.build(200, &SECTION.material(1e4, 10.0));
    let sweep = sweep_rigidity(&template, &SECTION, &scene, &[1e4], &DensityMode::Fixed, &SolverParams::default()).unwrap();
    let eq = &sweep[0].equilibrium;
    assert!(eq.converged);
    let rod = &sweep[0].rod;
    let interior = interior_contacts(eq, 5);
    for s in sweep[0].profile.samples.iter().filter(|s| interior.contains(&s.node)) {
        // Membrane balance along the normal: T/R = q + ρg·(n·ĝ), n outward.
        let p = eq.node_positions[s.node];
        let (nx, ny) = (p[0] - eq.object_center[0], p[1] - eq.object_center[1]);
        let weight_normal = rod.linear_density * (nx * scene.gravity[0] + ny * scene.gravity[1]) / nx.hypot(ny);
        let line_load = node_tension(eq, s.node) / scene.object_radius - weight_normal;
        let oracle = line_load / SECTION.width;
        assert!((s.pressure - oracle).abs() < 0.02 * oracle, "node {}: {} vs {}", s.node, s.pressure, oracle);
    }
}

#[test]
fn open_hook_without_rigidity_escapes() {
    for pull in [1.0, 10.0, 100.0] {
        let hook = HookSetup { pull: [pull, 0.0], ..Default::default() };
        let mut material = SECTION.material(125e6, 0.0);
        material.bending_stiffness = 0.0;
        let (rod, scene) = hook.build(100, &material);
        let result = solve_open_loop_hold(&rod, &scene, &SolverParams::default()).unwrap();
        assert!(result.escapes(), "pull {pull}: {result:?}");
    }
}

#[test]
fn closed_hook_without_rigidity_retains_object() {
    let hook = HookSetup { closed: true, ..Default::default() };
    let mut material = SECTION.material(125e6, 0.0);
    material.bending_stiffness = 0.0;
    let (rod, scene) = hook.build(100, &material);
    let eq = solve(&rod, &scene);
    let moved = eq.object_center[0].hypot(eq.object_center[1]);
    assert!(moved < 0.1 * scene.object_radius, "moved {moved}");
    assert!(eq.contact_nodes().next().is_some());
}

#[test]
fn open_hook_without_pull_holds() {
    let hook = HookSetup { pull: [0.0, 0.0], ..Default::default() };
    let mut material = SECTION.material(125e6, 0.0);
    material.bending_stiffness = 0.0;
    let (rod, scene) = hook.build(100, &material);
    assert!(solve_open_loop_hold(&rod, &scene, &SolverParams::default()).unwrap().holds());
}

#[test]
fn stiff_open_hook_holds() {
    let hook = HookSetup::default();
    let pull = hook.pull[0].hypot(hook.pull[1]);
    let lever = hook.lever_length();
    // Cantilever tip deflection F·L³/(3·EI) set to 5% of the object radius.
    let ei = pull * lever.powi(3) / (3.0 * 0.05 * hook.object_radius);
    let mut material = SECTION.material(125e6, 0.0);
    material.bending_stiffness = ei;
    let (rod, scene) = hook.build(100, &material);
    match solve_open_loop_hold(&rod, &scene, &SolverParams::default()).unwrap() {
        HoldResult::Holds(eq) => {
            let moved = eq.object_center[0].hypot(eq.object_center[1]);
            assert!(moved < 0.1 * hook.object_radius, "moved {moved}");
        }
        other => panic!("expected hold, got {other:?}"),
    }
}

#[test]
fn open_solver_rejects_closed_boundary() {
    let hook = HookSetup { closed: true, ..Default::default() };
    let (rod, scene) = hook.build(50, &SECTION.material(1e7, 0.0));
    assert!(matches!(solve_open_loop_hold(&rod, &scene, &SolverParams::default()), Err(ElasticaError::WrongBoundary(..))));
    let hook = HookSetup::default();
    let (rod, scene) = hook.build(50, &SECTION.material(1e7, 0.0));
    assert!(matches!(solve_closed_loop(&rod, &scene, &SolverParams::default()), Err(ElasticaError::WrongBoundary(..))));
}

#[test]
fn profile_csv_has_one_row_per_node() {
    let (rod, scene) = membrane(60, 500.0, 0.0);
    let eq = solve(&rod, &scene);
    let profile = pressure_profile(&eq, &scene, &rod);
    let mut buf = Vec::new();
    write_profile_csv(&mut buf, &eq, &profile, &rod).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "node_index,arc_length_m,x_m,y_m,tension_N,contact_line_load_N_per_m,pressure_Pa");
    assert_eq!(lines.len(), 61);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 7));
}
