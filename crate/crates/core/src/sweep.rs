//! Two-parameter lattice evaluation of scalar fields.
//!
//! Cells are independent and written into disjoint row slices, so the output
//! is bit-identical for any worker count. Exceptional cells carry one of the
//! [`sentinel`] codes instead of NaN or infinity.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis::{self, DEFAULT_PERIOD_TOL, DEFAULT_TRANSIENT};
use crate::error::{MapError, Result};
use crate::map::{self, Branch, MapParams, Status, Variant, DEFAULT_ZERO_EPS, DIVERGENCE_GUARD};
use crate::symbolic;

/// Reserved cell values.
pub mod sentinel {
    pub const DIVERGED: f64 = 1e308;
    pub const REACHED_ZERO: f64 = -1e308;
    pub const UNDEFINED: f64 = f64::MAX;
}

/// Decoded grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Value(f64),
    Diverged,
    ReachedZero,
    Undefined,
}

impl Cell {
    pub fn decode(v: f64) -> Cell {
        if v == sentinel::DIVERGED {
            Cell::Diverged
        } else if v == sentinel::REACHED_ZERO {
            Cell::ReachedZero
        } else if v == sentinel::UNDEFINED {
            Cell::Undefined
        } else {
            Cell::Value(v)
        }
    }

    /// Maps NaN to `Undefined` and infinities to their sentinels so nothing
    /// non-finite is ever stored.
    pub fn encode(self) -> f64 {
        match self {
            Cell::Value(v) if v.is_nan() => sentinel::UNDEFINED,
            Cell::Value(v) if v == f64::INFINITY => sentinel::DIVERGED,
            Cell::Value(v) if v == f64::NEG_INFINITY => sentinel::REACHED_ZERO,
            Cell::Value(v) => v,
            Cell::Diverged => sentinel::DIVERGED,
            Cell::ReachedZero => sentinel::REACHED_ZERO,
            Cell::Undefined => sentinel::UNDEFINED,
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(v),
            _ => None,
        }
    }
}

/// `min + i (max - min) / (count - 1)`, with the last point pinned to `max`.
pub fn lattice_point(min: f64, max: f64, count: usize, i: usize) -> f64 {
    if count < 2 {
        return min;
    }
    if i + 1 == count {
        return max;
    }
    min + (i as f64) * ((max - min) / ((count - 1) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Rho,
    Mu,
    Omega,
    Phi,
}

impl Param {
    pub fn as_str(self) -> &'static str {
        match self {
            Param::Rho => "rho",
            Param::Mu => "mu",
            Param::Omega => "omega",
            Param::Phi => "phi",
        }
    }

    pub fn get(self, p: &MapParams) -> f64 {
        match self {
            Param::Rho => p.rho(),
            Param::Mu => p.mu(),
            Param::Omega => p.omega(),
            Param::Phi => p.phi(),
        }
    }

    pub fn set(self, p: MapParams, v: f64) -> Result<MapParams> {
        match self {
            Param::Rho => p.with_rho(v),
            Param::Mu => p.with_mu(v),
            Param::Omega => p.with_omega(v),
            Param::Phi => p.with_phi(v),
        }
    }
}

impl FromStr for Param {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho" => Ok(Param::Rho),
            "mu" => Ok(Param::Mu),
            "omega" => Ok(Param::Omega),
            "phi" => Ok(Param::Phi),
            other => Err(MapError::InvalidAxis(format!("unknown parameter `{other}`"))),
        }
    }
}

/// Linear, endpoint-inclusive axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(param: Param, min: f64, max: f64, count: usize) -> Result<Self> {
        let a = AxisSpec { param, min, max, count };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) || !(self.min < self.max) {
            return Err(MapError::InvalidAxis(format!("{}: need finite min < max, got {}..{}", self.param.as_str(), self.min, self.max)));
        }
        if self.count < 2 {
            return Err(MapError::InvalidAxis(format!("{}: need at least 2 points", self.param.as_str())));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        lattice_point(self.min, self.max, self.count, i)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / ((self.count - 1) as f64)
    }
}

impl FromStr for AxisSpec {
    type Err = MapError;

    /// `param:min:max:count`, e.g. `rho:0.2:1.5:512`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(MapError::InvalidAxis(format!("expected PARAM:MIN:MAX:COUNT, got `{s}`")));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| MapError::InvalidAxis(format!("bad number `{t}` in `{s}`")));
        let count = parts[3].parse::<usize>().map_err(|_| MapError::InvalidAxis(format!("bad count in `{s}`")))?;
        AxisSpec::new(parts[0].parse()?, num(parts[1])?, num(parts[2])?, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// `F^n(x_1)`: `n` map applications after leaving the origin.
    IterateValue(usize),
    /// Embedding of the first `max_len` symbols into `[0, 1)`.
    SymbolEmbedding(usize),
    Lyapunov { transient: usize, samples: usize },
    /// Normalised complexity of a `len`-symbol itinerary.
    LzComplexity(usize),
    /// Minimal period up to the bound; `0` for orbits with no detected period.
    Period(usize),
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FieldKind::IterateValue(n) => write!(f, "iterate:{n}"),
            FieldKind::SymbolEmbedding(n) => write!(f, "embedding:{n}"),
            FieldKind::Lyapunov { transient, samples } => write!(f, "lyapunov:{transient}:{samples}"),
            FieldKind::LzComplexity(n) => write!(f, "lz:{n}"),
            FieldKind::Period(n) => write!(f, "period:{n}"),
        }
    }
}

impl FromStr for FieldKind {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || MapError::InvalidParams(format!("bad field spec `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        let n = |i: usize| -> Result<usize> {
            let v = parts.get(i).ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?;
            if v == 0 {
                return Err(bad());
            }
            Ok(v)
        };
        let kind = match (parts[0], parts.len()) {
            ("iterate", 2) => FieldKind::IterateValue(n(1)?),
            ("embedding", 2) => FieldKind::SymbolEmbedding(n(1)?),
            ("lyapunov", 3) => {
                let transient = parts[1].parse::<usize>().map_err(|_| bad())?;
                FieldKind::Lyapunov { transient, samples: n(2)? }
            }
            ("lz", 2) => FieldKind::LzComplexity(n(1)?),
            ("period", 2) => FieldKind::Period(n(1)?),
            _ => return Err(bad()),
        };
        Ok(kind)
    }
}

/// What to evaluate at each lattice point. `base` supplies the variant and
/// every parameter not bound to an axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub base: MapParams,
    pub branch: Branch,
    pub zero_eps: f64,
}

impl FieldSpec {
    pub fn new(kind: FieldKind, base: MapParams) -> Self {
        FieldSpec { kind, base, branch: Branch::Positive, zero_eps: DEFAULT_ZERO_EPS }
    }

    pub fn with_branch(self, branch: Branch) -> Self {
        FieldSpec { branch, ..self }
    }

    pub fn with_zero_eps(self, zero_eps: f64) -> Self {
        FieldSpec { zero_eps, ..self }
    }
}

fn status_cell(status: Status) -> Cell {
    match status {
        Status::Diverged => Cell::Diverged,
        Status::ReachedZero => Cell::ReachedZero,
        Status::LeftDomain => Cell::Undefined,
        Status::MaxIterations => Cell::Undefined,
    }
}

fn iterate_value(point: &MapParams, x1: f64, n: usize, zero_eps: f64) -> Cell {
    let mut x = x1;
    if x.abs() < zero_eps {
        return Cell::ReachedZero;
    }
    for k in 0..n {
        if point.variant() == Variant::OneSided && x <= 0.0 {
            return Cell::Undefined;
        }
        x = match map::step(point, x) {
            Ok(y) => y,
            Err(MapError::NonFinite { .. }) => return Cell::Diverged,
            Err(_) => return Cell::Undefined,
        };
        if x.abs() > DIVERGENCE_GUARD {
            return Cell::Diverged;
        }
        if k + 1 < n && x.abs() < zero_eps {
            return Cell::ReachedZero;
        }
    }
    Cell::Value(x)
}

fn itinerary(field: &FieldSpec, point: &MapParams, len: usize) -> std::result::Result<symbolic::SymbolSequence, Cell> {
    let seq = symbolic::encode(point, field.branch, len, field.zero_eps).map_err(|_| Cell::Undefined)?;
    match seq.source_status {
        Status::MaxIterations => Ok(seq),
        // One-sided itineraries end where the orbit leaves x > 0.
        Status::LeftDomain if point.variant() == Variant::OneSided => Ok(symbolic::truncate_one_sided(&seq)),
        other => Err(status_cell(other)),
    }
}

/// Evaluate one field at one parameter point, returning a plain value or a
/// sentinel code.
pub fn field_eval(field: &FieldSpec, point: &MapParams) -> f64 {
    eval_cell(field, point).encode()
}

pub fn eval_cell(field: &FieldSpec, point: &MapParams) -> Cell {
    if point.mu() == 0.0 {
        return Cell::Undefined;
    }
    let Ok(x1) = map::step_from_origin(point, field.branch) else {
        return Cell::Undefined;
    };
    match field.kind {
        FieldKind::IterateValue(n) => iterate_value(point, x1, n, field.zero_eps),
        FieldKind::SymbolEmbedding(len) => match itinerary(field, point, len) {
            Ok(seq) => Cell::Value(symbolic::embed(&seq)),
            Err(c) => c,
        },
        FieldKind::Lyapunov { transient, samples } => match analysis::lyapunov(point, x1, transient, samples) {
            Ok(v) => Cell::Value(v),
            Err(_) => Cell::Undefined,
        },
        FieldKind::LzComplexity(len) => match itinerary(field, point, len) {
            Ok(seq) => symbolic::normalized_lz(&seq).map(Cell::Value).unwrap_or(Cell::Undefined),
            Err(c) => c,
        },
        FieldKind::Period(max_p) => {
            let t = map::iterate(point, x1, DEFAULT_TRANSIENT + 4 * max_p, field.zero_eps);
            if t.status != Status::MaxIterations {
                return status_cell(t.status);
            }
            let p = analysis::detect_period(point, x1, DEFAULT_TRANSIENT, max_p, DEFAULT_PERIOD_TOL);
            Cell::Value(p.unwrap_or(0) as f64)
        }
    }
}

/// Field values over the `x_axis` x `y_axis` lattice, row-major with `y`
/// indexing rows: `values[j * x.count + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub x_axis: AxisSpec,
    pub y_axis: AxisSpec,
    pub field: FieldSpec,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SentinelCounts {
    pub diverged: usize,
    pub reached_zero: usize,
    pub undefined: usize,
}

impl SweepGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.x_axis.count + i]
    }

    pub fn cell(&self, i: usize, j: usize) -> Cell {
        Cell::decode(self.get(i, j))
    }

    /// Parameters at lattice point `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> Result<MapParams> {
        self.point_at(self.x_axis.value(i), self.y_axis.value(j))
    }

    /// Parameters at arbitrary axis coordinates.
    pub fn point_at(&self, x: f64, y: f64) -> Result<MapParams> {
        let p = self.x_axis.param.set(self.field.base, x)?;
        self.y_axis.param.set(p, y)
    }

    pub fn sentinel_counts(&self) -> SentinelCounts {
        self.values.iter().fold(SentinelCounts::default(), |mut c, &v| {
            match Cell::decode(v) {
                Cell::Diverged => c.diverged += 1,
                Cell::ReachedZero => c.reached_zero += 1,
                Cell::Undefined => c.undefined += 1,
                Cell::Value(_) => {}
            }
            c
        })
    }
}

/// Evaluate `field` on every lattice point using `workers` threads.
///
/// Numeric trouble in a cell produces a sentinel; only invalid axes abort.
pub fn run_sweep(x: AxisSpec, y: AxisSpec, field: FieldSpec, workers: usize) -> Result<SweepGrid> {
    x.validate()?;
    y.validate()?;
    if x.param == y.param {
        return Err(MapError::InvalidAxis(format!("both axes bind `{}`", x.param.as_str())));
    }
    if workers == 0 {
        return Err(MapError::InvalidParams("workers must be at least 1".into()));
    }
    let mut values = vec![0.0; x.count * y.count];
    let fill_row = |(j, row): (usize, &mut [f64])| {
        let yv = y.value(j);
        for (i, out) in row.iter_mut().enumerate() {
            *out = x
                .param
                .set(field.base, x.value(i))
                .and_then(|p| y.param.set(p, yv))
                .map(|p| field_eval(&field, &p))
                .unwrap_or(sentinel::UNDEFINED);
        }
    };
    if workers == 1 {
        values.chunks_mut(x.count).enumerate().for_each(fill_row);
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| MapError::InvalidParams(format!("thread pool: {e}")))?;
        pool.install(|| values.par_chunks_mut(x.count).enumerate().for_each(fill_row));
    }
    Ok(SweepGrid { x_axis: x, y_axis: y, field, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rho: f64, mu: f64, omega: f64) -> MapParams {
        MapParams::symmetric(rho, mu, omega).unwrap()
    }

    #[test]
    fn lattice_endpoints() {
        let a = AxisSpec::new(Param::Mu, 0.001, 0.3, 512).unwrap();
        assert_eq!(a.value(0), 0.001);
        assert_eq!(a.value(511), 0.3);
        assert_eq!(lattice_point(0.0, 1.0, 5, 2), 0.5);
    }

    #[test]
    fn axis_parsing() {
        let a: AxisSpec = "rho:0.2:1.5:512".parse().unwrap();
        assert_eq!(a, AxisSpec { param: Param::Rho, min: 0.2, max: 1.5, count: 512 });
        assert!("rho:1:0:5".parse::<AxisSpec>().is_err());
        assert!("rho:0:1:1".parse::<AxisSpec>().is_err());
        assert!("nu:0:1:5".parse::<AxisSpec>().is_err());
        assert!("rho:0:1".parse::<AxisSpec>().is_err());
    }

    #[test]
    fn field_kind_text_round_trip() {
        for k in [
            FieldKind::IterateValue(3),
            FieldKind::SymbolEmbedding(64),
            FieldKind::Lyapunov { transient: 500, samples: 5000 },
            FieldKind::LzComplexity(5000),
            FieldKind::Period(16),
        ] {
            assert_eq!(k.to_string().parse::<FieldKind>().unwrap(), k);
        }
        assert!("iterate:0".parse::<FieldKind>().is_err());
        assert!("bogus:1".parse::<FieldKind>().is_err());
    }

    #[test]
    fn cell_codes_are_distinct_and_finite() {
        let codes = [sentinel::DIVERGED, sentinel::REACHED_ZERO, sentinel::UNDEFINED];
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert_ne!(codes[a].to_bits(), codes[b].to_bits());
        }
        assert!(codes.iter().all(|c| c.is_finite()));
        assert_eq!(Cell::Value(f64::NAN).encode(), sentinel::UNDEFINED);
        assert_eq!(Cell::Value(f64::INFINITY).encode(), sentinel::DIVERGED);
        assert_eq!(Cell::Value(f64::NEG_INFINITY).encode(), sentinel::REACHED_ZERO);
        assert_eq!(Cell::decode(0.25), Cell::Value(0.25));
    }

    #[test]
    fn iterate_value_is_first_image_of_mu() {
        let p = sym(0.7, 0.1, 3.6);
        let f = FieldSpec::new(FieldKind::IterateValue(1), p);
        assert_eq!(field_eval(&f, &p), map::step(&p, 0.1).unwrap());
        let f2 = FieldSpec::new(FieldKind::IterateValue(2), p);
        let x2 = map::step(&p, 0.1).unwrap();
        assert_eq!(field_eval(&f2, &p), map::step(&p, x2).unwrap());
    }

    #[test]
    fn embedding_inside_purple_region_is_all_ones() {
        let p = sym(3.0, 0.05, 2.0);
        let f = FieldSpec::new(FieldKind::SymbolEmbedding(64), p);
        assert_eq!(field_eval(&f, &p), 1.0 - 2f64.powi(-53));
    }

    #[test]
    fn period_field_reference_value() {
        let p = sym(0.5, 0.12, 10.0);
        let f = FieldSpec::new(FieldKind::Period(16), p);
        assert_eq!(field_eval(&f, &p), 2.0);
    }

    #[test]
    fn mu_zero_is_undefined() {
        let p = sym(0.5, 0.0, 10.0);
        for kind in [FieldKind::SymbolEmbedding(64), FieldKind::IterateValue(1), FieldKind::LzComplexity(32)] {
            assert_eq!(field_eval(&FieldSpec::new(kind, p), &p), sentinel::UNDEFINED);
        }
    }

    #[test]
    fn lyapunov_sentinels() {
        let p = sym(2.0, 5.0, 1.0);
        let f = FieldSpec::new(FieldKind::Lyapunov { transient: 10, samples: 100 }, p);
        assert_eq!(field_eval(&f, &p), sentinel::DIVERGED);
    }

    #[test]
    fn sweep_rejects_shared_param() {
        let a = AxisSpec::new(Param::Rho, 0.5, 1.0, 4).unwrap();
        let f = FieldSpec::new(FieldKind::IterateValue(1), sym(0.5, 0.1, 10.0));
        assert!(run_sweep(a, a, f, 1).is_err());
        let b = AxisSpec::new(Param::Mu, 0.1, 0.2, 4).unwrap();
        assert!(run_sweep(a, b, f, 0).is_err());
    }

    #[test]
    fn sweep_layout_is_row_major() {
        let x = AxisSpec::new(Param::Rho, 0.5, 1.0, 3).unwrap();
        let y = AxisSpec::new(Param::Mu, 0.1, 0.2, 2).unwrap();
        let f = FieldSpec::new(FieldKind::IterateValue(1), sym(0.5, 0.1, 10.0));
        let g = run_sweep(x, y, f, 1).unwrap();
        assert_eq!(g.values.len(), 6);
        let p = g.point(2, 1).unwrap();
        assert_eq!((p.rho(), p.mu()), (1.0, 0.2));
        assert_eq!(g.get(2, 1), map::step(&p, 0.2).unwrap());
    }

    #[test]
    fn zero_row_is_undefined_and_other_sentinels_counted() {
        let x = AxisSpec::new(Param::Rho, 0.5, 1.0, 4).unwrap();
        let y = AxisSpec::new(Param::Mu, -0.1, 0.1, 3).unwrap();
        let f = FieldSpec::new(FieldKind::SymbolEmbedding(64), sym(0.5, 0.1, 10.0));
        let g = run_sweep(x, y, f, 2).unwrap();
        for i in 0..4 {
            assert_eq!(g.cell(i, 1), Cell::Undefined);
        }
        assert!(g.sentinel_counts().undefined >= 4);
    }
}
