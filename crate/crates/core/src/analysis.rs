//! Stability measures along orbits of the map.

use rayon::prelude::*;

use crate::error::{MapError, Result};
use crate::map::{self, Branch, MapParams, Status, Variant, DEFAULT_ZERO_EPS, DIVERGENCE_GUARD};
use crate::roots;
use crate::sweep::lattice_point;

pub const DEFAULT_TRANSIENT: usize = 500;
pub const DEFAULT_SAMPLES: usize = 5000;
/// Relative to the orbit amplitude.
pub const DEFAULT_PERIOD_TOL: f64 = 1e-9;
/// Residual `|F^p(x) - x|` accepted by [`newton_periodic`].
pub const NEWTON_TOL: f64 = 1e-12;

/// Summary of the attractor reached from one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitDiagnosis {
    pub attractor_points: Vec<f64>,
    pub period: Option<usize>,
    pub lyapunov: f64,
    pub status: Status,
}

enum Guard {
    Zero,
    Diverged,
}

fn guard(p: &MapParams, x: f64) -> Result<Option<Guard>> {
    if !x.is_finite() || x.abs() > DIVERGENCE_GUARD {
        return Ok(Some(Guard::Diverged));
    }
    if x.abs() < DEFAULT_ZERO_EPS {
        return Ok(Some(Guard::Zero));
    }
    if p.variant() == Variant::OneSided && x < 0.0 {
        return Err(MapError::Domain { x, reason: "one-sided orbit left x > 0" });
    }
    Ok(None)
}

fn sentinel(g: Guard) -> f64 {
    match g {
        Guard::Zero => f64::NEG_INFINITY,
        Guard::Diverged => f64::INFINITY,
    }
}

/// Mean of `ln |f'(x_i)|` over `n_sample` iterates after discarding
/// `n_transient`.
///
/// Returns `-inf` when the orbit falls into the superstable origin or a
/// sampled derivative vanishes, and `+inf` when the orbit diverges.
pub fn lyapunov(params: &MapParams, x0: f64, n_transient: usize, n_sample: usize) -> Result<f64> {
    if x0 == 0.0 {
        return Err(MapError::Domain { x: x0, reason: "Lyapunov exponent needs a nonzero seed" });
    }
    if n_sample == 0 {
        return Err(MapError::InvalidParams("n_sample must be at least 1".into()));
    }
    let mut x = x0;
    for _ in 0..n_transient {
        if let Some(g) = guard(params, x)? {
            return Ok(sentinel(g));
        }
        x = map::step(params, x).unwrap_or(f64::INFINITY);
    }
    let mut sum = 0.0;
    for _ in 0..n_sample {
        if let Some(g) = guard(params, x)? {
            return Ok(sentinel(g));
        }
        let d = map::derivative(params, x)?.abs();
        if d == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        sum += d.ln();
        x = map::step(params, x).unwrap_or(f64::INFINITY);
    }
    Ok(sum / n_sample as f64)
}

/// Bisection on `f(x) - x` over `[lo, hi]`; `None` without a sign change.
pub fn find_fixed_point(params: &MapParams, lo: f64, hi: f64) -> Option<f64> {
    if !(0.0 < lo && lo < hi) {
        return None;
    }
    let g = |x: f64| map::step(params, x).map(|y| y - x).unwrap_or(f64::NAN);
    roots::bisect(g, lo, hi, 1e-13)
}

/// Smallest `p <= max_period` with `|x_{n+p} - x_n| < tol * amplitude` for
/// `3p` consecutive `n` after the transient.
pub fn detect_period(params: &MapParams, x0: f64, n_transient: usize, max_period: usize, tol: f64) -> Option<usize> {
    if max_period == 0 || x0 == 0.0 {
        return None;
    }
    let window = 4 * max_period + 1;
    let t = map::iterate(params, x0, n_transient + window - 1, DEFAULT_ZERO_EPS);
    if t.status != Status::MaxIterations {
        return None;
    }
    let w = &t.points[t.points.len() - window..];
    let amplitude = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let thr = tol * amplitude.max(f64::MIN_POSITIVE);
    (1..=max_period).find(|&p| (0..3 * p).all(|i| (w[i + p] - w[i]).abs() < thr))
}

/// `(F^p(x), (F^p)'(x))` by the chain rule; `None` if any iterate hits the
/// origin or overflows.
fn compose(params: &MapParams, x: f64, p: usize) -> Option<(f64, f64)> {
    let mut y = x;
    let mut d = 1.0;
    for _ in 0..p {
        d *= map::derivative(params, y).ok()?;
        y = map::step(params, y).ok()?;
    }
    (y.is_finite() && d.is_finite()).then_some((y, d))
}

fn proper_divisors(p: usize) -> impl Iterator<Item = usize> {
    (1..p).filter(move |q| p % q == 0)
}

/// Newton's method on `G(x) = F^p(x) - x`.
///
/// Converges when `|G| < 1e-12`. Points whose minimal period is a proper
/// divisor of `p` are rejected, as are non-convergent runs.
pub fn newton_periodic(params: &MapParams, x_guess: f64, p: usize, max_steps: usize) -> Option<f64> {
    if p == 0 || x_guess == 0.0 || !x_guess.is_finite() {
        return None;
    }
    let mut x = x_guess;
    for _ in 0..=max_steps {
        let (y, d) = compose(params, x, p)?;
        let g = y - x;
        if g.abs() < NEWTON_TOL {
            let lower = proper_divisors(p).any(|q| compose(params, x, q).is_some_and(|(z, _)| (z - x).abs() < 1e-9));
            return (!lower).then_some(x);
        }
        let slope = d - 1.0;
        if slope == 0.0 || !slope.is_finite() {
            return None;
        }
        let next = x - g / slope;
        if !next.is_finite() || next == 0.0 || next.abs() > DIVERGENCE_GUARD {
            return None;
        }
        x = next;
    }
    None
}

/// Run the orbit from `x0` and summarise its attractor.
pub fn diagnose(params: &MapParams, x0: f64, n_transient: usize, n_sample: usize, max_period: usize) -> Result<OrbitDiagnosis> {
    let lyap = lyapunov(params, x0, n_transient, n_sample)?;
    let t = map::iterate(params, x0, n_transient + n_sample, DEFAULT_ZERO_EPS);
    let attractor_points = match t.status {
        Status::MaxIterations => t.points[t.points.len() - n_sample..].to_vec(),
        _ => Vec::new(),
    };
    let period = detect_period(params, x0, n_transient, max_period, DEFAULT_PERIOD_TOL);
    Ok(OrbitDiagnosis { attractor_points, period, lyapunov: lyap, status: t.status })
}

/// Seeding of each column of an orbit diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedRule {
    /// Every column starts from `x_1 = mu`.
    FromMu,
    /// Each column starts from the final state of the previous one, falling
    /// back to `mu` after a terminated column.
    Continuation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitColumn {
    pub rho: f64,
    /// The last `n_keep` states; empty when the orbit terminated early.
    pub samples: Vec<f64>,
    pub status: Status,
}

/// Post-transient states over the lattice `rho_i = lo + i (hi - lo) / (steps - 1)`.
/// The `rho` field of `base` is ignored.
pub fn orbit_diagram(
    base: &MapParams,
    rho_range: (f64, f64, usize),
    rule: SeedRule,
    n_transient: usize,
    n_keep: usize,
) -> Result<Vec<OrbitColumn>> {
    let (lo, hi, steps) = rho_range;
    if steps < 2 || !(lo < hi) || lo <= 0.0 {
        return Err(MapError::InvalidAxis(format!("rho range {lo}:{hi}:{steps}")));
    }
    let x_mu = map::step_from_origin(base, Branch::Positive)?;
    let column = |rho: f64, x0: f64| -> Result<OrbitColumn> {
        let p = base.with_rho(rho)?;
        let t = map::iterate(&p, x0, n_transient + n_keep, DEFAULT_ZERO_EPS);
        let samples = match t.status {
            Status::MaxIterations => t.points[t.points.len() - n_keep.min(t.points.len())..].to_vec(),
            _ => Vec::new(),
        };
        Ok(OrbitColumn { rho, samples, status: t.status })
    };
    match rule {
        SeedRule::FromMu => (0..steps)
            .into_par_iter()
            .map(|i| column(lattice_point(lo, hi, steps, i), x_mu))
            .collect(),
        SeedRule::Continuation => {
            let mut out: Vec<OrbitColumn> = Vec::with_capacity(steps);
            for i in 0..steps {
                let seed = match out.last() {
                    Some(prev) if prev.status == Status::MaxIterations && !prev.samples.is_empty() => {
                        *prev.samples.last().unwrap()
                    }
                    _ => x_mu,
                };
                out.push(column(lattice_point(lo, hi, steps, i), seed)?);
            }
            Ok(out)
        }
    }
}

/// One leg of a cobweb staircase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: (f64, f64),
    pub to: (f64, f64),
}

/// Alternating vertical and horizontal legs
/// `(x_k, x_k) -> (x_k, x_{k+1}) -> (x_{k+1}, x_{k+1})` for `n` steps,
/// stopping where the orbit terminates.
pub fn cobweb(params: &MapParams, x0: f64, n: usize) -> Vec<Segment> {
    let t = map::iterate(params, x0, n, DEFAULT_ZERO_EPS);
    let finite: Vec<f64> = t.points.iter().copied().take_while(|x| x.is_finite()).collect();
    finite
        .windows(2)
        .flat_map(|w| {
            let (a, b) = (w[0], w[1]);
            [Segment { from: (a, a), to: (a, b) }, Segment { from: (a, b), to: (b, b) }]
        })
        .collect()
}
