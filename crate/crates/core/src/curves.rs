//! Bifurcation boundaries in the `(rho, mu)` plane.
//!
//! * `gamma_g`: largest `|mu|` for which the envelope `|mu| + x^rho` meets the
//!   diagonal (`rho > 1`), i.e. an invariant interval exists.
//! * `gamma_p`: largest `|mu|` for which the map is also a contraction on that
//!   interval, forcing a unique stable fixed point.
//! * Tangency families: a critical point of the map lands on the origin after
//!   one step (closed form, indexed by `k`) or after two steps (implicit).
//! * Homoclinic curves of order `n`: zero sets of `F^{n-1}(mu)` traced from a
//!   sweep grid.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::error::{MapError, Result};
use crate::map::{self, MapParams};
use crate::roots::{self, Spacing, DEFAULT_SCAN_INTERVALS};
use crate::sweep::{lattice_point, Cell, FieldKind, Param, SweepGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveKind {
    GammaG,
    GammaP,
    BelyakovExplicit,
    BelyakovImplicit,
    HomoclinicOrder,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::GammaG => "gamma_g",
            CurveKind::GammaP => "gamma_p",
            CurveKind::BelyakovExplicit => "belyakov_explicit",
            CurveKind::BelyakovImplicit => "belyakov_implicit",
            CurveKind::HomoclinicOrder => "homoclinic_order_n",
        }
    }
}

impl std::str::FromStr for CurveKind {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gamma_g" => CurveKind::GammaG,
            "gamma_p" => CurveKind::GammaP,
            "belyakov_explicit" => CurveKind::BelyakovExplicit,
            "belyakov_implicit" => CurveKind::BelyakovImplicit,
            "homoclinic_order_n" => CurveKind::HomoclinicOrder,
            other => return Err(MapError::InvalidParams(format!("unknown curve kind `{other}`"))),
        })
    }
}

/// Curve family plus its index: `k` for tangency families, the order `n`
/// for homoclinic curves, nothing for the gamma bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CurveLabel {
    pub kind: CurveKind,
    pub index: Option<usize>,
}

impl fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}[{i}]", self.kind.as_str()),
            None => f.write_str(self.kind.as_str()),
        }
    }
}

/// Polyline of `(rho, mu)` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: CurveLabel,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveSet {
    pub curves: Vec<Curve>,
}

impl CurveSet {
    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.curves.iter().flat_map(|c| c.points.iter().copied())
    }
}

fn require_expanding(rho: f64) -> Result<()> {
    if rho > 1.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(MapError::InvalidParams(format!("bound is defined for rho > 1, got {rho}")))
    }
}

/// `rho^(1/(1-rho)) (1 - 1/rho)`.
pub fn gamma_g(rho: f64) -> Result<f64> {
    require_expanding(rho)?;
    Ok(rho.powf(1.0 / (1.0 - rho)) * (1.0 - 1.0 / rho))
}

/// `(1 - 1/rho) (rho^2 + omega^2)^(1/(2(1-rho)))`.
pub fn gamma_p(rho: f64, omega: f64) -> Result<f64> {
    require_expanding(rho)?;
    if !(omega > 0.0) {
        return Err(MapError::InvalidParams(format!("omega must be positive, got {omega}")));
    }
    Ok((1.0 - 1.0 / rho) * (rho * rho + omega * omega).powf(1.0 / (2.0 * (1.0 - rho))))
}

/// Parameter value and critical point of a first-image tangency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    pub mu: f64,
    /// Positive critical point of the map at which the tangency occurs.
    pub x_c: f64,
}

fn tangency_phase(rho: f64, omega: f64, k: usize) -> f64 {
    -PI * (k as f64 + 0.5) - omega.atan2(rho)
}

/// `(omega / sqrt(rho^2+omega^2)) exp((rho/omega)(pi(-k-1/2) - atan(omega/rho)))`.
fn tangency_amplitude(rho: f64, omega: f64, k: usize) -> f64 {
    omega / rho.hypot(omega) * (rho / omega * tangency_phase(rho, omega, k)).exp()
}

fn parity(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The `k`-th solution of `f'(x_1) = 0, f(x_1) = 0`:
/// `mu = (-1)^k (omega/sqrt(rho^2+omega^2)) exp((rho/omega)(pi(-k-1/2) - atan(omega/rho)))`
/// with `x_c = exp((-pi(k+1/2) - atan(omega/rho)) / omega)`.
pub fn belyakov_explicit(rho: f64, omega: f64, k: usize) -> Tangency {
    Tangency {
        mu: parity(k) * tangency_amplitude(rho, omega, k),
        x_c: (tangency_phase(rho, omega, k) / omega).exp(),
    }
}

/// Which form of the second-image tangency system to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImplicitForm {
    /// `x_2 = (-1)^k mu + c_k`, `0 = mu + |x_2|^rho cos(omega ln|x_2|)`,
    /// exactly as commonly stated for this family.
    AsPublished,
    /// `x_2 = mu - (-1)^k c_k`: the actual image of the `k`-th critical
    /// point, so solutions satisfy `F^2(x_c) = 0` for the full map.
    MapConsistent,
}

impl ImplicitForm {
    pub fn as_str(self) -> &'static str {
        match self {
            ImplicitForm::AsPublished => "published",
            ImplicitForm::MapConsistent => "map",
        }
    }
}

impl std::str::FromStr for ImplicitForm {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "published" => Ok(ImplicitForm::AsPublished),
            "map" => Ok(ImplicitForm::MapConsistent),
            other => Err(MapError::InvalidParams(format!("unknown implicit form `{other}`"))),
        }
    }
}

/// `x_2` of the second-image tangency system for a given `mu`.
pub fn implicit_second_point(form: ImplicitForm, rho: f64, omega: f64, k: usize, mu: f64) -> f64 {
    let c = tangency_amplitude(rho, omega, k);
    match form {
        ImplicitForm::AsPublished => parity(k) * mu + c,
        ImplicitForm::MapConsistent => mu - parity(k) * c,
    }
}

/// Residual `mu + |x_2|^rho cos(omega ln|x_2|)` of the second equation.
pub fn implicit_residual(form: ImplicitForm, rho: f64, omega: f64, k: usize, mu: f64) -> f64 {
    let a = implicit_second_point(form, rho, omega, k, mu).abs();
    if a == 0.0 {
        return mu;
    }
    let l = a.ln();
    mu + (rho * l).exp() * (omega * l).cos()
}

/// Accepted residual for an implicit-family root.
pub const IMPLICIT_RESIDUAL_TOL: f64 = 1e-10;

/// All roots in `mu_bracket`, ascending, each refined to `1e-12` and checked
/// against [`IMPLICIT_RESIDUAL_TOL`].
pub fn belyakov_implicit_roots(form: ImplicitForm, rho: f64, omega: f64, k: usize, mu_bracket: (f64, f64)) -> Vec<f64> {
    let (lo, hi) = mu_bracket;
    if !(rho > 0.0 && omega > 0.0 && lo < hi) {
        return Vec::new();
    }
    let h = |mu: f64| implicit_residual(form, rho, omega, k, mu);
    roots::all_roots(h, lo, hi, DEFAULT_SCAN_INTERVALS, Spacing::Linear, 1e-12)
        .into_iter()
        .filter(|&mu| h(mu).abs() < IMPLICIT_RESIDUAL_TOL)
        .collect()
}

/// First root (lowest `mu`) of the second-image tangency system as published.
pub fn belyakov_implicit(rho: f64, omega: f64, k: usize, mu_bracket: (f64, f64)) -> Option<f64> {
    belyakov_implicit_with(ImplicitForm::AsPublished, rho, omega, k, mu_bracket)
}

pub fn belyakov_implicit_with(form: ImplicitForm, rho: f64, omega: f64, k: usize, mu_bracket: (f64, f64)) -> Option<f64> {
    belyakov_implicit_roots(form, rho, omega, k, mu_bracket).into_iter().next()
}

/// Full-map check of a second-image tangency: `min_s |F^2(s x_c)|` over the
/// critical points `s x_c`, `s = +-1`, of the symmetric map at `mu`.
pub fn second_image_defect(rho: f64, omega: f64, k: usize, mu: f64) -> f64 {
    let Ok(p) = MapParams::symmetric(rho, mu, omega) else {
        return f64::INFINITY;
    };
    let x_c = belyakov_explicit(rho, omega, k).x_c;
    [x_c, -x_c]
        .into_iter()
        .map(|x| {
            map::step(&p, x)
                .and_then(|y| if y == 0.0 { Ok(0.0) } else { map::step(&p, y) })
                .map(f64::abs)
                .unwrap_or(f64::INFINITY)
        })
        .fold(f64::INFINITY, f64::min)
}

/// `f(mu)` on the symmetric map with `phi = 0`: zero on a secondary
/// homoclinic `0 -> mu -> 0`.
pub fn secondary_residual(rho: f64, omega: f64, mu: f64) -> f64 {
    MapParams::symmetric(rho, mu, omega)
        .and_then(|p| map::step(&p, mu))
        .unwrap_or(f64::NAN)
}

/// Every secondary-homoclinic `mu` in `mu_bracket` (`0 < lo < hi`), ascending.
///
/// The pre-scan is uniform in `ln mu` because the roots accumulate
/// geometrically at `mu = 0`.
pub fn find_secondary_roots(rho: f64, omega: f64, mu_bracket: (f64, f64)) -> Vec<f64> {
    let (lo, hi) = mu_bracket;
    if !(0.0 < lo && lo < hi) {
        return Vec::new();
    }
    let g = |mu: f64| secondary_residual(rho, omega, mu);
    roots::scan_brackets(g, lo, hi, DEFAULT_SCAN_INTERVALS, Spacing::Log)
        .into_iter()
        .filter_map(|(a, b)| if a == b { Some(a) } else { roots::bisect(g, a, b, 1e-13 * b.max(1e-300)) })
        .collect()
}

/// Largest secondary-homoclinic `mu` in the bracket.
pub fn find_secondary(rho: f64, omega: f64, mu_bracket: (f64, f64)) -> Option<f64> {
    find_secondary_roots(rho, omega, mu_bracket).pop()
}

fn rho_lattice(range: (f64, f64, usize)) -> impl Iterator<Item = f64> {
    let (lo, hi, n) = range;
    (0..n).map(move |i| lattice_point(lo, hi, n, i))
}

fn check_range(range: (f64, f64, usize)) -> Result<()> {
    let (lo, hi, n) = range;
    if n < 2 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(MapError::InvalidAxis(format!("rho range {lo}:{hi}:{n}")));
    }
    Ok(())
}

/// `gamma_g` sampled on the part of the lattice with `rho > 1`.
pub fn gamma_g_curve(range: (f64, f64, usize)) -> Result<Curve> {
    check_range(range)?;
    let points = rho_lattice(range).filter_map(|r| gamma_g(r).ok().map(|m| (r, m))).collect();
    Ok(Curve { label: CurveLabel { kind: CurveKind::GammaG, index: None }, points })
}

pub fn gamma_p_curve(omega: f64, range: (f64, f64, usize)) -> Result<Curve> {
    check_range(range)?;
    if !(omega > 0.0) {
        return Err(MapError::InvalidParams(format!("omega must be positive, got {omega}")));
    }
    let points = rho_lattice(range).filter_map(|r| gamma_p(r, omega).ok().map(|m| (r, m))).collect();
    Ok(Curve { label: CurveLabel { kind: CurveKind::GammaP, index: None }, points })
}

/// One curve per `k = 0..=k_max` over the `rho` lattice (`rho > 0`).
pub fn belyakov_explicit_curves(omega: f64, k_max: usize, range: (f64, f64, usize)) -> Result<CurveSet> {
    check_range(range)?;
    let curves = (0..=k_max)
        .map(|k| Curve {
            label: CurveLabel { kind: CurveKind::BelyakovExplicit, index: Some(k) },
            points: rho_lattice(range).filter(|&r| r > 0.0).map(|r| (r, belyakov_explicit(r, omega, k).mu)).collect(),
        })
        .collect();
    Ok(CurveSet { curves })
}

/// Implicit family per `k`, traced along `rho`: each lattice column keeps the
/// root closest to the previous column's root (the lowest root to start).
pub fn belyakov_implicit_curves(
    form: ImplicitForm,
    omega: f64,
    k_max: usize,
    range: (f64, f64, usize),
    mu_bracket: (f64, f64),
) -> Result<CurveSet> {
    check_range(range)?;
    let rhos: Vec<f64> = rho_lattice(range).filter(|&r| r > 0.0).collect();
    let curves = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut points: Vec<(f64, f64)> = Vec::new();
            for &r in &rhos {
                let roots = belyakov_implicit_roots(form, r, omega, k, mu_bracket);
                let pick = match points.last() {
                    Some(&(_, prev)) => roots.into_iter().min_by(|a, b| (a - prev).abs().total_cmp(&(b - prev).abs())),
                    None => roots.into_iter().next(),
                };
                if let Some(mu) = pick {
                    points.push((r, mu));
                }
            }
            Curve { label: CurveLabel { kind: CurveKind::BelyakovImplicit, index: Some(k) }, points }
        })
        .filter(|c| !c.points.is_empty())
        .collect();
    Ok(CurveSet { curves })
}

/// Identifies a lattice edge: horizontal edges join `(i, j)`-`(i+1, j)`,
/// vertical edges join `(i, j)`-`(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

impl Edge {
    fn ends(self) -> ((usize, usize), (usize, usize)) {
        match self {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        }
    }
}

/// Trace the zero set of an `IterateValue(n)` grid as `homoclinic_order_n`
/// polylines (order `n + 1`).
///
/// Crossings are located on cell edges by linear interpolation and then
/// refined by bisection on the re-evaluated field along the edge. A vertex is
/// kept only if its re-evaluated magnitude is below `contour_tol`; sign flips
/// caused by the map's jump at the origin never converge and are dropped.
/// Cells touching a sentinel, or with a corner at `|mu| < 10 zero_eps`, are
/// skipped.
pub fn extract_zero_contours(grid: &SweepGrid, contour_tol: f64) -> Result<CurveSet> {
    let FieldKind::IterateValue(n) = grid.field.kind else {
        return Err(MapError::InvalidParams(format!("contours need an iterate field, got {}", grid.field.kind)));
    };
    let (nx, ny) = (grid.x_axis.count, grid.y_axis.count);
    if nx < 2 || ny < 2 || grid.values.len() != nx * ny {
        return Err(MapError::InvalidAxis("grid must be at least 2x2".into()));
    }
    let rho_first = match (grid.x_axis.param, grid.y_axis.param) {
        (Param::Rho, Param::Mu) => true,
        (Param::Mu, Param::Rho) => false,
        _ => return Err(MapError::InvalidAxis("contours need a (rho, mu) grid".into())),
    };
    let mu_floor = 10.0 * grid.field.zero_eps;
    let mu_at = |i: usize, j: usize| if rho_first { grid.y_axis.value(j) } else { grid.x_axis.value(i) };
    let value = |i: usize, j: usize| grid.cell(i, j).value();
    let positive = |v: f64| v > 0.0;

    // Marching squares: collect segments as pairs of crossed edges.
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals: Option<Vec<f64>> = corners.iter().map(|&(a, b)| value(a, b)).collect();
            let Some(v) = vals else { continue };
            if corners.iter().any(|&(a, b)| mu_at(a, b).abs() < mu_floor) {
                continue;
            }
            // Bottom, right, top, left.
            let edges = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            let crossed: Vec<Edge> = (0..4)
                .filter(|&e| positive(v[e]) != positive(v[(e + 1) % 4]))
                .map(|e| edges[e])
                .collect();
            match crossed.len() {
                2 => segments.push((crossed[0], crossed[1])),
                4 => {
                    // Saddle cell: the sign of the centre decides the pairing.
                    let centre = v.iter().sum::<f64>() / 4.0;
                    if positive(centre) == positive(v[0]) {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }
    if segments.is_empty() {
        return Err(MapError::EmptyResult);
    }

    // Refine each crossed edge once.
    let mut edges: Vec<Edge> = segments.iter().flat_map(|&(a, b)| [a, b]).collect();
    edges.sort_unstable();
    edges.dedup();
    let coord = |(i, j): (usize, usize)| (grid.x_axis.value(i), grid.y_axis.value(j));
    let reeval = |x: f64, y: f64| -> f64 {
        grid.point_at(x, y)
            .map(|p| crate::sweep::eval_cell(&grid.field, &p))
            .ok()
            .and_then(Cell::value)
            .unwrap_or(f64::NAN)
    };
    let vertices: Vec<Option<(f64, f64)>> = edges
        .par_iter()
        .map(|&e| {
            let (a, b) = e.ends();
            let (va, vb) = (value(a.0, a.1)?, value(b.0, b.1)?);
            let ((xa, ya), (xb, yb)) = (coord(a), coord(b));
            let at = |t: f64| (xa + t * (xb - xa), ya + t * (yb - ya));
            let linear = va / (va - vb);
            let g = |t: f64| {
                let (x, y) = at(t);
                reeval(x, y)
            };
            let (x, y) = if g(linear).abs() < contour_tol {
                at(linear)
            } else {
                at(roots::bisect_secant(g, 0.0, 1.0, 0.0)?)
            };
            (reeval(x, y).abs() < contour_tol).then_some((x, y))
        })
        .collect();
    let vertex_of: HashMap<Edge, Option<(f64, f64)>> = edges.iter().copied().zip(vertices).collect();

    // Stitch segments into chains through shared edges.
    let mut incident: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(s);
        incident.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut chains: Vec<Vec<Edge>> = Vec::new();
    let walk = |start: Edge, mut from: usize, used: &mut Vec<bool>, chain: &mut Vec<Edge>| {
        let mut at = start;
        loop {
            let next = incident[&at].iter().copied().find(|&s| s != from && !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segments[s];
            at = if a == at { b } else { a };
            chain.push(at);
            from = s;
        }
    };
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        used[s] = true;
        let (a, b) = segments[s];
        let mut forward = vec![a, b];
        walk(b, s, &mut used, &mut forward);
        let mut backward = Vec::new();
        walk(a, s, &mut used, &mut backward);
        backward.reverse();
        backward.extend(forward);
        chains.push(backward);
    }

    let label = CurveLabel { kind: CurveKind::HomoclinicOrder, index: Some(n + 1) };
    let mut curves = Vec::new();
    for chain in chains {
        let mut piece: Vec<(f64, f64)> = Vec::new();
        for e in chain {
            match vertex_of[&e] {
                Some((x, y)) => {
                    let p = if rho_first { (x, y) } else { (y, x) };
                    if piece.last() != Some(&p) {
                        piece.push(p);
                    }
                }
                None => {
                    if !piece.is_empty() {
                        curves.push(std::mem::take(&mut piece));
                    }
                }
            }
        }
        if !piece.is_empty() {
            curves.push(piece);
        }
    }
    if curves.is_empty() {
        return Err(MapError::EmptyResult);
    }
    let curves = curves
        .into_iter()
        .map(|mut points| {
            if points.last().unwrap().0 < points[0].0 {
                points.reverse();
            }
            Curve { label, points }
        })
        .collect();
    Ok(CurveSet { curves })
}
