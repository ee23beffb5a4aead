//! Force and moment balance of a differential rod segment wrapped on a contact.
//!
//! The segment spans `dphi` on a curve of radius `R`, with tensions `T1` (base
//! side) and `T2` (tip side), reaction moments `MR1`, `MR2`, and contact normal
//! force `dF` applied at its middle. Moments are taken about the base-side end.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentResiduals {
    pub sum_fx: f64,
    pub sum_fy: f64,
    pub sum_m: f64,
}

impl SegmentResiduals {
    pub fn is_balanced(&self, tol: f64) -> bool {
        self.sum_fx.abs() <= tol && self.sum_fy.abs() <= tol && self.sum_m.abs() <= tol
    }
}

#[allow(clippy::too_many_arguments)]
pub fn segment_balance(t1: f64, t2: f64, df: f64, radius: f64, dphi: f64, mr1: f64, mr2: f64) -> SegmentResiduals {
    let s = (0.5 * dphi).sin();
    SegmentResiduals {
        sum_fx: (t2 - t1) * (0.5 * dphi).cos(),
        sum_fy: (t1 + t2) * s - df,
        sum_m: mr1 - mr2 + (t2 * s) * (2.0 * radius * s) - df * (radius * s),
    }
}
