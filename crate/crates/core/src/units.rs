//! Unit constants and quantity parsing.
//!
//! Everything is stored in SI internally. Forces reported in kilogram-force use
//! standard gravity.

use std::fmt;

/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;

pub fn kgf_to_newton(kgf: f64) -> f64 {
    kgf * STANDARD_GRAVITY
}

pub fn newton_to_kgf(n: f64) -> f64 {
    n / STANDARD_GRAVITY
}

/// Physical dimension of a parsed quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Force,
    Length,
    Angle,
    Torque,
    Pressure,
    ForcePerLength,
    Mass,
    MassPerLength,
    Density,
    Acceleration,
    FlexuralRigidity,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Force => "force",
            Dimension::Length => "length",
            Dimension::Angle => "angle",
            Dimension::Torque => "torque",
            Dimension::Pressure => "pressure",
            Dimension::ForcePerLength => "force per length",
            Dimension::Mass => "mass",
            Dimension::MassPerLength => "mass per length",
            Dimension::Density => "density",
            Dimension::Acceleration => "acceleration",
            Dimension::FlexuralRigidity => "flexural rigidity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UnitError {
    #[error("`{0}` has no unit")]
    MissingUnit(String),
    #[error("`{0}` is not a number followed by a unit")]
    Malformed(String),
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
    #[error("unit `{unit}` measures {found}, not {expected}")]
    WrongDimension {
        unit: String,
        found: Dimension,
        expected: Dimension,
    },
}

/// Returns the dimension of `unit` and its factor to SI.
pub fn unit_factor(unit: &str) -> Option<(Dimension, f64)> {
    use Dimension::*;
    let g = STANDARD_GRAVITY;
    let normalized: String = unit
        .chars()
        .map(|c| match c {
            '·' | '*' | '⋅' => '.',
            '²' => '2',
            '³' => '3',
            c => c,
        })
        .filter(|c| !c.is_whitespace())
        .collect();
    let normalized = normalized.replace('^', "");
    let v = match normalized.as_str() {
        "N" => (Force, 1.0),
        "kN" => (Force, 1e3),
        "MN" => (Force, 1e6),
        "kgf" => (Force, g),
        "gf" => (Force, g * 1e-3),
        "lbf" => (Force, 4.448_221_615_260_5),
        "m" => (Length, 1.0),
        "cm" => (Length, 1e-2),
        "mm" => (Length, 1e-3),
        "um" | "µm" => (Length, 1e-6),
        "in" => (Length, 0.0254),
        "rad" => (Angle, 1.0),
        "deg" | "°" => (Angle, std::f64::consts::PI / 180.0),
        "rev" => (Angle, 2.0 * std::f64::consts::PI),
        "N.m" | "Nm" => (Torque, 1.0),
        "N.mm" | "Nmm" => (Torque, 1e-3),
        "kgf.m" => (Torque, g),
        "Pa" => (Pressure, 1.0),
        "kPa" => (Pressure, 1e3),
        "MPa" => (Pressure, 1e6),
        "GPa" => (Pressure, 1e9),
        "N/m" => (ForcePerLength, 1.0),
        "N/mm" => (ForcePerLength, 1e3),
        "kN/m" => (ForcePerLength, 1e3),
        "kg" => (Mass, 1.0),
        "g" => (Mass, 1e-3),
        "kg/m" => (MassPerLength, 1.0),
        "g/m" => (MassPerLength, 1e-3),
        "kg/m3" => (Density, 1.0),
        "g/cm3" => (Density, 1e3),
        "m/s2" => (Acceleration, 1.0),
        "N.m2" => (FlexuralRigidity, 1.0),
        "N.mm2" => (FlexuralRigidity, 1e-6),
        _ => return None,
    };
    Some(v)
}

/// Parses a quantity such as `"27.2 kgf"` or `"60.3mm"` and converts it to SI.
pub fn parse_quantity(text: &str, expected: Dimension) -> Result<f64, UnitError> {
    let trimmed = text.trim();
    let split = trimmed
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '+'
                || c == '-'
                || ((c == 'e' || c == 'E')
                    && trimmed[i + 1..]
                        .chars()
                        .next()
                        .is_some_and(|n| n.is_ascii_digit() || n == '-' || n == '+')))
        })
        .map(|(i, _)| i)
        .unwrap_or(trimmed.len());
    let (number, unit) = trimmed.split_at(split);
    let unit = unit.trim();
    if number.is_empty() {
        return Err(UnitError::Malformed(text.to_string()));
    }
    let value: f64 = number
        .parse()
        .map_err(|_| UnitError::Malformed(text.to_string()))?;
    if unit.is_empty() {
        return Err(UnitError::MissingUnit(text.to_string()));
    }
    let (dim, factor) = unit_factor(unit).ok_or_else(|| UnitError::UnknownUnit(unit.to_string()))?;
    if dim != expected {
        return Err(UnitError::WrongDimension {
            unit: unit.to_string(),
            found: dim,
            expected,
        });
    }
    Ok(value * factor)
}
