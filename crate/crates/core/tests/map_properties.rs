use proptest::prelude::*;
use saddlefocus::map::{self, derivative, invariant_bound, iterate, step, MapParams};
use saddlefocus::{Status, Variant};

fn params(rho: f64, mu: f64, omega: f64, phi: f64, variant: Variant) -> MapParams {
    MapParams::new(rho, mu, omega, phi, variant).unwrap()
}

/// `|x|` sampled log-uniformly over several decades, with a random sign.
fn state() -> impl Strategy<Value = f64> {
    (-8.0f64..2.0, any::<bool>()).prop_map(|(e, neg)| {
        let a = 10f64.powf(e);
        if neg {
            -a
        } else {
            a
        }
    })
}

fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        f64::from_bits(1)
    } else {
        f64::from_bits(a.to_bits() + 1) - a
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn symmetric_map_is_exactly_odd(
        rho in 0.05f64..4.0, mu in -2.0f64..2.0, omega in 0.1f64..20.0, phi in -3.2f64..3.2, x in state()
    ) {
        let p = params(rho, mu, omega, phi, Variant::Symmetric);
        let a = step(&p, x).unwrap();
        let b = step(&p, -x).unwrap();
        prop_assert_eq!(a.to_bits(), (-b).to_bits());
    }

    #[test]
    fn image_stays_inside_envelope(
        rho in 0.05f64..4.0, mu in -2.0f64..2.0, omega in 0.1f64..20.0, x in state()
    ) {
        let p = params(rho, mu, omega, 0.0, Variant::Symmetric);
        let y = step(&p, x).unwrap();
        let centre = x.signum() * mu;
        let env = x.abs().powf(rho);
        let slack = 4.0 * (ulp(y) + ulp(mu) + ulp(env));
        prop_assert!((y - centre).abs() <= env + slack, "x={x} y={y} env={env}");
    }
}

/// Central difference of the map with `h = 1e-6 max(|x|, 1)`, only where the
/// derivative is well away from zero relative to the curvature scale.
fn finite_difference(p: &MapParams, x: f64) -> f64 {
    let h = 1e-6 * x.abs().max(1.0);
    (step(p, x + h).unwrap() - step(p, x - h).unwrap()) / (2.0 * h)
}

#[test]
fn derivative_matches_finite_differences() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5ad_d1e);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 10_000 {
        attempts += 1;
        assert!(attempts < 1_000_000, "could not draw enough well-conditioned samples");
        let rho = rng.gen_range(0.2..3.0);
        let omega = rng.gen_range(0.5..12.0);
        let mu = rng.gen_range(-1.0..1.0);
        let phi = rng.gen_range(-1.0..1.0);
        // Keep |x| large enough that h is small against the local log-period.
        let mag = 10f64.powf(rng.gen_range(-1.5..1.0));
        let x = if rng.gen_bool(0.5) { mag } else { -mag };
        let p = params(rho, mu, omega, phi, Variant::Symmetric);
        let d = derivative(&p, x).unwrap();
        // Away from zeros of the derivative: the cosine factor must not be tiny.
        let scale = x.abs().powf(rho - 1.0) * rho.hypot(omega);
        if d.abs() < 1e-2 * scale {
            continue;
        }
        let fd = finite_difference(&p, x);
        let rel = (d - fd).abs() / d.abs();
        assert!(rel <= 1e-5, "rho={rho} mu={mu} omega={omega} phi={phi} x={x}: {d} vs {fd} ({rel:e})");
        checked += 1;
    }
}

#[test]
fn derivative_example_against_finite_difference() {
    let p = params(0.7, 0.1, 3.6, 0.0, Variant::OneSided);
    let d = derivative(&p, 0.3).unwrap();
    let fd = finite_difference(&p, 0.3);
    assert!(((d - fd) / fd).abs() < 1e-6, "{d} vs {fd}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn contracting_bound_contains_orbit(rho in 0.1f64..0.95, mu in -1.0f64..1.0, omega in 0.5f64..12.0) {
        let p = params(rho, mu, omega, 0.0, Variant::Symmetric);
        let beta = invariant_bound(&p).unwrap();
        prop_assume!(mu != 0.0);
        let t = iterate(&p, mu, 2000, 1e-12);
        prop_assert_ne!(t.status, Status::Diverged);
        for &x in &t.points {
            prop_assert!(x.abs() <= beta + 4.0 * ulp(beta), "|{x}| > {beta}");
        }
    }

    #[test]
    fn expanding_bound_contains_orbit(rho in 1.05f64..4.0, frac in 0.0f64..1.0, neg in any::<bool>(), omega in 0.5f64..12.0) {
        let g = saddlefocus::curves::gamma_g(rho).unwrap();
        let mu = if neg { -frac * g } else { frac * g };
        prop_assume!(mu != 0.0);
        let p = params(rho, mu, omega, 0.0, Variant::Symmetric);
        let beta = invariant_bound(&p).unwrap();
        let t = iterate(&p, mu, 2000, 1e-12);
        if t.status != Status::Diverged {
            for &x in &t.points {
                prop_assert!(x.abs() <= beta + 4.0 * ulp(beta), "|{x}| > {beta} (rho={rho}, mu={mu})");
            }
        }
    }

    #[test]
    fn superstable_origin_attracts(rho in 1.05f64..4.0, omega in 0.5f64..12.0, x0 in 1e-6f64..1.0, neg in any::<bool>()) {
        let p = params(rho, 0.0, omega, 0.0, Variant::Symmetric);
        let beta = invariant_bound(&p).unwrap();
        let x0 = x0.min(beta) * 0.999;
        let x0 = if neg { -x0 } else { x0 };
        let t = iterate(&p, x0, 100_000, 1e-12);
        prop_assert_eq!(t.status, Status::ReachedZero, "rho={} x0={} last={}", rho, x0, t.last());
    }
}

#[test]
fn trajectory_points_follow_the_map() {
    let p = params(0.5, 0.05, 10.0, 0.0, Variant::Symmetric);
    let t = iterate(&p, 0.05, 500, 1e-12);
    for w in t.points.windows(2) {
        assert_eq!(step(&p, w[0]).unwrap().to_bits(), w[1].to_bits());
    }
}

#[test]
fn leaves_origin_along_either_branch() {
    let p = params(0.5, 0.05, 10.0, 0.0, Variant::Symmetric);
    assert_eq!(map::step_from_origin(&p, saddlefocus::Branch::Positive).unwrap(), 0.05);
    assert_eq!(map::step_from_origin(&p, saddlefocus::Branch::Negative).unwrap(), -0.05);
    let one = params(0.5, 0.05, 10.0, 0.0, Variant::OneSided);
    assert!(map::step_from_origin(&one, saddlefocus::Branch::Negative).is_err());
}

#[test]
fn outside_gamma_g_may_diverge_but_is_flagged() {
    let p = params(1.5, 2.0, 5.0, 0.0, Variant::Symmetric);
    assert!(invariant_bound(&p).is_none());
    let t = iterate(&p, 2.0, 5000, 1e-12);
    match t.status {
        Status::Diverged => assert!(t.last().abs() > saddlefocus::DIVERGENCE_GUARD || !t.last().is_finite()),
        _ => assert!(t.points.iter().all(|x| x.is_finite())),
    }
}
