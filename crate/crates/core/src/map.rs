//! The one-dimensional saddle-focus return maps.
//!
//! Both variants share the branch function
//!
//! ```text
//! g(a) = mu + a^rho * cos(omega * ln a + phi),   a > 0
//! ```
//!
//! The one-sided map is `x -> g(x)` on `x > 0`; the mirror-symmetric map is
//! `x -> sign(x) * g(|x|)`, which is odd and discontinuous at the origin.
//! Powers are always taken of `|x|` through `exp(rho * ln|x|)`, so negative
//! bases never reach `powf`.

use crate::error::{MapError, Result};
use crate::roots;

/// States whose magnitude exceeds this are reported as diverged.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Default magnitude below which a state counts as having reached the origin.
pub const DEFAULT_ZERO_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `x_{n+1} = mu + x^rho cos(omega ln x + phi)` for `x > 0`.
    OneSided,
    /// `x_{n+1} = sign(x) [mu + |x|^rho cos(omega ln|x| + phi)]`.
    Symmetric,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::OneSided => "one-sided",
            Variant::Symmetric => "symmetric",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-sided" | "onesided" | "one_sided" => Ok(Variant::OneSided),
            "symmetric" => Ok(Variant::Symmetric),
            other => Err(MapError::InvalidParams(format!("unknown map variant `{other}`"))),
        }
    }
}

/// Direction in which the trajectory leaves the origin along the unstable
/// manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `0 -> mu`
    Positive,
    /// `0 -> -mu`
    Negative,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Positive => "positive",
            Branch::Negative => "negative",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" | "+" => Ok(Branch::Positive),
            "negative" | "-" => Ok(Branch::Negative),
            other => Err(MapError::InvalidParams(format!("unknown branch `{other}`"))),
        }
    }
}

/// Saddle index `rho`, splitting parameter `mu`, focal frequency `omega`,
/// phase `phi`, and the map variant.
///
/// Construction validates `rho > 0`, `omega > 0` and finiteness; the map
/// functions rely on those invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    rho: f64,
    mu: f64,
    omega: f64,
    phi: f64,
    variant: Variant,
}

impl MapParams {
    pub fn new(rho: f64, mu: f64, omega: f64, phi: f64, variant: Variant) -> Result<Self> {
        let p = MapParams { rho, mu, omega, phi, variant };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric map with `phi = 0`.
    pub fn symmetric(rho: f64, mu: f64, omega: f64) -> Result<Self> {
        Self::new(rho, mu, omega, 0.0, Variant::Symmetric)
    }

    /// One-sided map with `phi = 0`.
    pub fn one_sided(rho: f64, mu: f64, omega: f64) -> Result<Self> {
        Self::new(rho, mu, omega, 0.0, Variant::OneSided)
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.mu.is_finite() && self.omega.is_finite() && self.phi.is_finite()) {
            return Err(MapError::InvalidParams(format!("non-finite parameter in {self:?}")));
        }
        if self.rho <= 0.0 {
            return Err(MapError::InvalidParams(format!("rho must be positive, got {}", self.rho)));
        }
        if self.omega <= 0.0 {
            return Err(MapError::InvalidParams(format!("omega must be positive, got {}", self.omega)));
        }
        Ok(())
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        Self::new(rho, self.mu, self.omega, self.phi, self.variant)
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        Self::new(self.rho, mu, self.omega, self.phi, self.variant)
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        Self::new(self.rho, self.mu, omega, self.phi, self.variant)
    }

    pub fn with_phi(self, phi: f64) -> Result<Self> {
        Self::new(self.rho, self.mu, self.omega, phi, self.variant)
    }

    pub fn with_variant(self, variant: Variant) -> Self {
        MapParams { variant, ..self }
    }
}

/// Termination status of a finite orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    MaxIterations,
    ReachedZero,
    Diverged,
    LeftDomain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: MapParams,
    /// `x0` followed by every computed iterate; never empty.
    pub points: Vec<f64>,
    pub status: Status,
    pub zero_eps: f64,
}

impl Trajectory {
    pub fn last(&self) -> f64 {
        *self.points.last().expect("trajectory is never empty")
    }
}

#[inline]
fn branch_value(p: &MapParams, a: f64) -> f64 {
    let l = a.ln();
    p.mu + (p.rho * l).exp() * (p.omega * l + p.phi).cos()
}

/// One application of the map. The origin is rejected; use
/// [`step_from_origin`] to leave it.
#[inline]
pub fn step(p: &MapParams, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(MapError::Domain { x, reason: "the origin is handled by step_from_origin" });
    }
    if !x.is_finite() {
        return Err(MapError::Domain { x, reason: "state must be finite" });
    }
    let y = match p.variant {
        Variant::OneSided => {
            if x < 0.0 {
                return Err(MapError::Domain { x, reason: "one-sided map requires x > 0" });
            }
            branch_value(p, x)
        }
        Variant::Symmetric => {
            let v = branch_value(p, x.abs());
            if x > 0.0 {
                v
            } else {
                -v
            }
        }
    };
    if y.is_finite() {
        Ok(y)
    } else {
        Err(MapError::NonFinite { x })
    }
}

/// First point of the unstable separatrix: `mu` on the positive branch,
/// `-mu` on the negative one (symmetric map only).
pub fn step_from_origin(p: &MapParams, branch: Branch) -> Result<f64> {
    match (branch, p.variant) {
        (Branch::Positive, _) => Ok(p.mu),
        (Branch::Negative, Variant::Symmetric) => Ok(-p.mu),
        (Branch::Negative, Variant::OneSided) => Err(MapError::Domain {
            x: 0.0,
            reason: "the one-sided map only leaves the origin along the positive branch",
        }),
    }
}

/// `d x_{n+1} / d x_n`.
///
/// For `x > 0` this is `x^(rho-1) sqrt(rho^2+omega^2) cos(omega ln x + atan(omega/rho) + phi)`.
/// The symmetric map is odd, so its derivative is even in `x`: the same
/// expression evaluated at `|x|`.
#[inline]
pub fn derivative(p: &MapParams, x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(MapError::Domain { x, reason: "derivative is undefined at the origin" });
    }
    if p.variant == Variant::OneSided && x < 0.0 {
        return Err(MapError::Domain { x, reason: "one-sided map requires x > 0" });
    }
    let l = x.abs().ln();
    let amplitude = p.rho.hypot(p.omega);
    let phase = p.omega * l + p.omega.atan2(p.rho) + p.phi;
    Ok(((p.rho - 1.0) * l).exp() * amplitude * phase.cos())
}

fn classify(p: &MapParams, x: f64, zero_eps: f64) -> Option<Status> {
    if !x.is_finite() || x.abs() > DIVERGENCE_GUARD {
        Some(Status::Diverged)
    } else if x.abs() < zero_eps {
        Some(Status::ReachedZero)
    } else if p.variant == Variant::OneSided && x <= 0.0 {
        Some(Status::LeftDomain)
    } else {
        None
    }
}

/// Iterate from `x0` for at most `max_iter` steps, stopping early at the
/// origin, on divergence, or when a one-sided orbit leaves `x > 0`.
pub fn iterate(p: &MapParams, x0: f64, max_iter: usize, zero_eps: f64) -> Trajectory {
    let mut points = Vec::with_capacity(max_iter.min(1 << 16) + 1);
    points.push(x0);
    let mut status = classify(p, x0, zero_eps);
    let mut x = x0;
    let mut n = 0;
    while status.is_none() && n < max_iter {
        x = step(p, x).unwrap_or(f64::INFINITY);
        points.push(x);
        status = classify(p, x, zero_eps);
        n += 1;
    }
    Trajectory { params: *p, points, status: status.unwrap_or(Status::MaxIterations), zero_eps }
}

/// A priori bound `beta` on the orbit of `x_1 = mu`.
///
/// * `rho < 1`: `(|mu| + 1)^(1/(1-rho))`.
/// * `rho > 1` with `|mu|` at most the tangency value of the envelope:
///   smallest positive root of `x^rho - x + |mu|`.
/// * otherwise no bound is known.
pub fn invariant_bound(p: &MapParams) -> Option<f64> {
    let rho = p.rho;
    let m = p.mu.abs();
    if rho < 1.0 {
        let beta = (m + 1.0).powf(1.0 / (1.0 - rho));
        return beta.is_finite().then_some(beta);
    }
    if rho == 1.0 {
        return None;
    }
    let vertex = rho.powf(1.0 / (1.0 - rho));
    let critical = vertex * (1.0 - 1.0 / rho);
    if m > critical {
        return None;
    }
    if m == 0.0 {
        // x^rho - x vanishes at 0 and 1; only 1 is positive.
        return Some(1.0);
    }
    let envelope = |x: f64| x.powf(rho) - x + m;
    if envelope(vertex) == 0.0 {
        return Some(vertex);
    }
    // Keep the end where the envelope is <= 0 so that mu + beta^rho <= beta.
    roots::bisect_bracket(envelope, m, vertex, 1e-15).map(|(_, hi)| hi)
}
