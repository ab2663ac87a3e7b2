//! One-dimensional return maps of a saddle-focus with a homoclinic loop.
//!
//! The crate covers the map kernel ([`map`]), binary itineraries of the
//! unstable separatrix ([`symbolic`]), stability measures ([`analysis`]),
//! analytic and traced bifurcation curves ([`curves`]), and deterministic
//! parallel parameter sweeps ([`sweep`]). Everything here is pure; file
//! formats and the command line live in the `saddlefocus-cli` crate.

pub mod analysis;
pub mod curves;
pub mod error;
pub mod map;
pub mod roots;
pub mod sweep;
pub mod symbolic;

pub use analysis::{OrbitColumn, OrbitDiagnosis, SeedRule, Segment};
pub use curves::{Curve, CurveKind, CurveLabel, CurveSet, ImplicitForm, Tangency};
pub use error::{MapError, Result};
pub use map::{Branch, MapParams, Status, Trajectory, Variant, DEFAULT_ZERO_EPS, DIVERGENCE_GUARD};
pub use sweep::{AxisSpec, Cell, FieldKind, FieldSpec, Param, SweepGrid};
pub use symbolic::SymbolSequence;
