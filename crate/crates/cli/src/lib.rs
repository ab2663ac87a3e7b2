//! Command-line front end for `saddlefocus`: parameter sweeps to `HSFG1`
//! grid files, bifurcation curves to CSV, PPM/PGM heatmaps, and text
//! reports for single orbits.
//!
//! Exit codes: `0` success, `1` a `verify` check failed, `2` invalid
//! arguments, `3` I/O failure, `4` a requested root or contour was not
//! found, `5` overlay curves do not match the grid axes.

pub mod colormap;
pub mod commands;
pub mod curvefile;
pub mod gridfile;
pub mod raster;

pub use commands::{run, Exit};
