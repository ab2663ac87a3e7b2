//! `HSFG1` grid files.
//!
//! A UTF-8 header of `key=value` lines in a fixed order, a blank line, then
//! `xcount * ycount` little-endian binary64 values in row-major order (`y`
//! indexes rows). Reals in the header use the shortest representation that
//! parses back to the same bits, so reading and re-writing a file
//! reproduces it byte for byte.

use std::io::{self, Read, Write};

use saddlefocus::sweep::sentinel;
use saddlefocus::{AxisSpec, Branch, FieldKind, FieldSpec, MapParams, Param, SweepGrid, Variant};

pub const MAGIC: &str = "HSFG1";

const KEYS: [&str; 21] = [
    "format",
    "version",
    "xparam",
    "xmin",
    "xmax",
    "xcount",
    "yparam",
    "ymin",
    "ymax",
    "ycount",
    "field",
    "variant",
    "branch",
    "zero_eps",
    "rho",
    "mu",
    "omega",
    "phi",
    "sentinel_diverged",
    "sentinel_reached_zero",
    "sentinel_undefined",
];

#[derive(Debug, thiserror::Error)]
pub enum GridFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed grid file: {0}")]
    Format(String),
}

fn bad(msg: impl Into<String>) -> GridFileError {
    GridFileError::Format(msg.into())
}

/// A sweep grid plus the tool version that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub version: String,
    pub grid: SweepGrid,
}

impl GridFile {
    pub fn new(grid: SweepGrid) -> Self {
        GridFile { version: env!("CARGO_PKG_VERSION").to_string(), grid }
    }

    fn header_values(&self) -> [String; 21] {
        let g = &self.grid;
        let b = &g.field.base;
        [
            MAGIC.to_string(),
            self.version.clone(),
            g.x_axis.param.as_str().to_string(),
            real(g.x_axis.min),
            real(g.x_axis.max),
            g.x_axis.count.to_string(),
            g.y_axis.param.as_str().to_string(),
            real(g.y_axis.min),
            real(g.y_axis.max),
            g.y_axis.count.to_string(),
            g.field.kind.to_string(),
            b.variant().as_str().to_string(),
            g.field.branch.as_str().to_string(),
            real(g.field.zero_eps),
            real(b.rho()),
            real(b.mu()),
            real(b.omega()),
            real(b.phi()),
            real(sentinel::DIVERGED),
            real(sentinel::REACHED_ZERO),
            real(sentinel::UNDEFINED),
        ]
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut head = String::new();
        for (k, v) in KEYS.iter().zip(self.header_values()) {
            head.push_str(k);
            head.push('=');
            head.push_str(&v);
            head.push('\n');
        }
        head.push('\n');
        w.write_all(head.as_bytes())?;
        let mut payload = Vec::with_capacity(8 * self.grid.values.len());
        for v in &self.grid.values {
            payload.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&payload)?;
        w.flush()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, GridFileError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GridFileError> {
        let split = bytes.windows(2).position(|w| w == b"\n\n").ok_or_else(|| bad("header is not terminated by a blank line"))?;
        let head = std::str::from_utf8(&bytes[..split]).map_err(|_| bad("header is not UTF-8"))?;
        let payload = &bytes[split + 2..];

        let lines: Vec<&str> = head.split('\n').collect();
        if lines.len() != KEYS.len() {
            return Err(bad(format!("expected {} header lines, found {}", KEYS.len(), lines.len())));
        }
        let mut vals: Vec<&str> = Vec::with_capacity(KEYS.len());
        for (line, key) in lines.iter().zip(KEYS) {
            let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("header line `{line}` has no `=`")))?;
            if k != key {
                return Err(bad(format!("expected key `{key}`, found `{k}`")));
            }
            vals.push(v);
        }
        if vals[0] != MAGIC {
            return Err(bad(format!("unsupported format `{}`", vals[0])));
        }
        let f = |i: usize| -> Result<f64, GridFileError> {
            vals[i].parse::<f64>().map_err(|_| bad(format!("`{}` is not a number", vals[i])))
        };
        let n = |i: usize| -> Result<usize, GridFileError> {
            vals[i].parse::<usize>().map_err(|_| bad(format!("`{}` is not a count", vals[i])))
        };
        let codes = [f(18)?, f(19)?, f(20)?];
        if codes != [sentinel::DIVERGED, sentinel::REACHED_ZERO, sentinel::UNDEFINED] {
            return Err(bad(format!("unexpected sentinel codes {codes:?}")));
        }
        let core = |e: saddlefocus::MapError| bad(e.to_string());
        let x_axis = AxisSpec::new(vals[2].parse::<Param>().map_err(core)?, f(3)?, f(4)?, n(5)?).map_err(core)?;
        let y_axis = AxisSpec::new(vals[6].parse::<Param>().map_err(core)?, f(7)?, f(8)?, n(9)?).map_err(core)?;
        let kind: FieldKind = vals[10].parse().map_err(core)?;
        let variant: Variant = vals[11].parse().map_err(core)?;
        let branch: Branch = vals[12].parse().map_err(core)?;
        let base = MapParams::new(f(14)?, f(15)?, f(16)?, f(17)?, variant).map_err(core)?;
        let field = FieldSpec::new(kind, base).with_branch(branch).with_zero_eps(f(13)?);

        let cells = x_axis
            .count
            .checked_mul(y_axis.count)
            .filter(|c| c.checked_mul(8) == Some(payload.len()))
            .ok_or_else(|| bad(format!("payload has {} bytes, expected 8 x {} x {}", payload.len(), x_axis.count, y_axis.count)))?;
        let values: Vec<f64> = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        debug_assert_eq!(values.len(), cells);
        Ok(GridFile { version: vals[1].to_string(), grid: SweepGrid { x_axis, y_axis, field, values } })
    }
}

/// Shortest round-trip form, in exponent notation so huge and tiny values
/// stay short (`1e308`, `1e-12`, `5e-1`).
pub fn real(v: f64) -> String {
    format!("{v:e}")
}
