//! Bracketing root finders for oscillatory scalar functions.
//!
//! Oscillatory functions have many close roots, so brackets are located by a
//! uniform pre-scan before any bisection.

/// How pre-scan sample points are distributed over an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    /// Uniform in `ln x`; requires `0 < lo < hi`. Suited to log-periodic
    /// functions whose roots accumulate geometrically at zero.
    Log,
}

/// Number of sub-intervals used by the pre-scan.
pub const DEFAULT_SCAN_INTERVALS: usize = 10_000;

fn opposite(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

/// Bisect until the bracket is narrower than `tol`, returning the final
/// bracket `(lo, hi)`. `None` when `f(lo)` and `f(hi)` share a sign or
/// either is non-finite.
pub fn bisect_bracket<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<(f64, f64)> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    if flo == 0.0 {
        return Some((lo, lo));
    }
    if fhi == 0.0 {
        return Some((hi, hi));
    }
    if !opposite(flo, fhi) {
        return None;
    }
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some((mid, mid));
        }
        if !fm.is_finite() {
            return None;
        }
        if opposite(flo, fm) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Some((lo, hi))
}

/// Bisection to absolute width `tol`; returns the bracket end with the
/// smaller residual.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let (a, b) = bisect_bracket(&mut f, lo, hi, tol)?;
    if a == b {
        return Some(a);
    }
    Some(if f(a).abs() <= f(b).abs() { a } else { b })
}

/// Bisect to `tol`, then take one secant step inside the final bracket if it
/// lowers the residual.
pub fn bisect_secant<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let (a, b) = bisect_bracket(&mut f, lo, hi, tol)?;
    if a == b {
        return Some(a);
    }
    let (fa, fb) = (f(a), f(b));
    let mut best = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    let s = b - fb * (b - a) / (fb - fa);
    if s.is_finite() && s > a && s < b {
        let fs = f(s);
        if fs.is_finite() && fs.abs() < best.1.abs() {
            best = (s, fs);
        }
    }
    Some(best.0)
}

fn sample_points(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    let n = n.max(1);
    match spacing {
        Spacing::Linear => (0..=n)
            .map(|i| if i == n { hi } else { lo + (hi - lo) * (i as f64) / (n as f64) })
            .collect(),
        Spacing::Log => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..=n)
                .map(|i| match i {
                    0 => lo,
                    _ if i == n => hi,
                    _ => (a + (b - a) * (i as f64) / (n as f64)).exp(),
                })
                .collect()
        }
    }
}

/// Sub-intervals of `[lo, hi]` across which `f` changes sign, in increasing
/// order. Samples where `f` is exactly zero yield a degenerate bracket.
pub fn scan_brackets<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<(f64, f64)> {
    if !(lo < hi) || (spacing == Spacing::Log && lo <= 0.0) {
        return Vec::new();
    }
    let xs = sample_points(lo, hi, n, spacing);
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..xs.len() {
        if vs[i] == 0.0 {
            out.push((xs[i], xs[i]));
            continue;
        }
        if i + 1 < xs.len() && vs[i].is_finite() && vs[i + 1].is_finite() && opposite(vs[i], vs[i + 1]) {
            out.push((xs[i], xs[i + 1]));
        }
    }
    out
}

/// Every sign change of `f` on `[lo, hi]` refined by bisection to `tol`.
pub fn all_roots<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize, spacing: Spacing, tol: f64) -> Vec<f64> {
    scan_brackets(&mut f, lo, hi, n, spacing)
        .into_iter()
        .filter_map(|(a, b)| if a == b { Some(a) } else { bisect_secant(&mut f, a, b, tol) })
        .collect()
}
