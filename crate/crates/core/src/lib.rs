//! Mechanics and topology of loop closure grasping.
//!
//! * [`capstan`]: capstan-friction amplification for wrapped fastenings and
//!   wave-patterned clamps.
//! * [`capacity`]: per-strand limits of a full grasping system and its bottleneck.
//! * [`elastica`]: quasi-static planar rod contact solver (closed-loop cradles,
//!   open-loop hooks, stiffness sweeps, contact pressure recovery).
//! * [`topology`]: open/closed loop classification, winding and linking numbers.
//! * [`cli`]: configuration loading and the batch runner behind the binary.

pub mod capacity;
pub mod capstan;
pub mod cli;
pub mod elastica;
pub mod topology;
pub mod units;

pub use capacity::{CapacityReport, MembraneSpec, MembraneStrength, SystemSpec, WinchSpec};
pub use capstan::{CapstanWrap, ClampSpec};
