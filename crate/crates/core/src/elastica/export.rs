//! CSV output for solves and sweeps.

use super::{Equilibrium, PressureProfile, RodModel, SweepPoint};
use std::io::{self, Write};

/// One row per node: index, arc length along the rest rod, position, tension
/// (mean of adjacent elements), contact line load and pressure.
pub fn write_profile_csv<W: Write>(mut out: W, eq: &Equilibrium, profile: &PressureProfile, rod: &RodModel) -> io::Result<()> {
    writeln!(out, "node_index,arc_length_m,x_m,y_m,tension_N,contact_line_load_N_per_m,pressure_Pa")?;
    let n = eq.node_positions.len();
    let mut line_load = vec![0.0; n];
    let mut pressure = vec![0.0; n];
    for s in &profile.samples {
        line_load[s.node] = s.line_load;
        pressure[s.node] = s.pressure;
    }
    let l0 = rod.element_rest_length();
    for (i, p) in eq.node_positions.iter().enumerate() {
        let tension = match (i.checked_sub(1).map(|e| eq.axial_tension[e]), eq.axial_tension.get(i)) {
            (Some(a), Some(b)) => 0.5 * (a + b),
            (Some(a), None) => a,
            (None, Some(b)) => *b,
            (None, None) => 0.0,
        };
        writeln!(
            out,
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            i,
            l0 * i as f64,
            p[0],
            p[1],
            tension,
            line_load[i],
            pressure[i]
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(mut out: W, points: &[SweepPoint]) -> io::Result<()> {
    writeln!(out, "stiffness_Pa,peak_pressure_Pa,contact_arc_rad")?;
    for p in points {
        writeln!(out, "{:.12e},{:.12e},{:.12e}", p.modulus, p.peak_pressure, p.contact_arc)?;
    }
    Ok(())
}
