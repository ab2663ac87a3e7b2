use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saddlefocus::analysis::{
    cobweb, detect_period, find_fixed_point, lyapunov, newton_periodic, orbit_diagram, DEFAULT_PERIOD_TOL, DEFAULT_SAMPLES,
    DEFAULT_TRANSIENT,
};
use saddlefocus::curves::gamma_p;
use saddlefocus::map::{derivative, invariant_bound, step};
use saddlefocus::{MapParams, SeedRule};

fn sym(rho: f64, mu: f64, omega: f64) -> MapParams {
    MapParams::symmetric(rho, mu, omega).unwrap()
}

/// Random `(rho, mu, omega)` with `0 < mu < gamma_p - 1e-3`.
fn inside_purple(rng: &mut ChaCha8Rng) -> MapParams {
    loop {
        let rho = rng.gen_range(1.05..4.0);
        let omega = rng.gen_range(0.5..12.0);
        let g = gamma_p(rho, omega).unwrap() - 1e-3;
        if g <= 1e-4 {
            continue;
        }
        return sym(rho, rng.gen_range(1e-4..g), omega);
    }
}

#[test]
fn purple_region_converges_to_a_stable_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let p = inside_purple(&mut rng);
        let period = detect_period(&p, p.mu(), 20_000, 16, DEFAULT_PERIOD_TOL);
        assert_eq!(period, Some(1), "{p:?}");
        let beta = invariant_bound(&p).unwrap();
        let x = find_fixed_point(&p, 1e-12, beta).expect("fixed point in (0, beta]");
        assert!((step(&p, x).unwrap() - x).abs() < 1e-12);
        assert!(derivative(&p, x).unwrap().abs() < 1.0);
    }
}

#[test]
fn refined_cycles_are_genuine_and_minimal() {
    let p = sym(0.5, 0.12, 10.0);
    let period = detect_period(&p, 0.12, DEFAULT_TRANSIENT, 16, DEFAULT_PERIOD_TOL).unwrap();
    assert_eq!(period, 2);
    let t = saddlefocus::map::iterate(&p, 0.12, DEFAULT_TRANSIENT, 1e-12);
    let x = newton_periodic(&p, t.last(), 2, 50).unwrap();
    let y = step(&p, step(&p, x).unwrap()).unwrap();
    assert!((y - x).abs() < 1e-10);
    assert!((step(&p, x).unwrap() - x).abs() > 1e-9, "collapsed onto a fixed point");
    // Asking for period 4 on the same cycle must be rejected as non-minimal.
    assert!(newton_periodic(&p, x, 4, 50).is_none());
}

#[test]
fn fixed_point_agrees_with_period_one_refinement() {
    let p = sym(3.0, 0.05, 2.0);
    let beta = invariant_bound(&p).unwrap();
    let x = find_fixed_point(&p, 1e-12, beta).unwrap();
    let n = newton_periodic(&p, x, 1, 20).unwrap();
    assert!((x - n).abs() < 1e-12);
}

#[test]
fn exponent_of_a_cycle_is_the_cycle_mean() {
    for (rho, mu, omega) in [(0.5, 0.12, 10.0), (3.0, 0.05, 2.0), (2.0, 0.1, 5.0)] {
        let p = sym(rho, mu, omega);
        let Some(period) = detect_period(&p, mu, DEFAULT_TRANSIENT, 16, DEFAULT_PERIOD_TOL) else {
            continue;
        };
        let t = saddlefocus::map::iterate(&p, mu, DEFAULT_TRANSIENT, 1e-12);
        let x = newton_periodic(&p, t.last(), period, 50).unwrap();
        let mut y = x;
        let mut cycle = 0.0;
        for _ in 0..period {
            cycle += derivative(&p, y).unwrap().abs().ln();
            y = step(&p, y).unwrap();
        }
        cycle /= period as f64;
        // Sample an integer number of cycles so the mean is exact.
        let n = DEFAULT_SAMPLES - DEFAULT_SAMPLES % period;
        let le = lyapunov(&p, mu, 5 * DEFAULT_TRANSIENT, n).unwrap();
        assert!((le - cycle).abs() < 1e-6, "({rho}, {mu}, {omega}): {le} vs {cycle}");
    }
}

#[test]
fn chaos_has_no_period() {
    let p = sym(0.5, 0.05, 10.0);
    assert_eq!(detect_period(&p, 0.05, DEFAULT_TRANSIENT, 64, DEFAULT_PERIOD_TOL), None);
    assert!(lyapunov(&p, 0.05, DEFAULT_TRANSIENT, DEFAULT_SAMPLES).unwrap() > 0.0);
}

#[test]
fn orbit_diagram_ignores_thread_count() {
    let base = sym(0.7, 0.35, 10.0);
    let run = |threads: usize, rule: SeedRule| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| orbit_diagram(&base, (0.4, 1.1, 300), rule, 500, 64).unwrap())
    };
    for rule in [SeedRule::FromMu, SeedRule::Continuation] {
        let a = run(1, rule);
        let b = run(8, rule);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.rho.to_bits(), y.rho.to_bits());
            assert_eq!(x.status, y.status);
            let xb: Vec<u64> = x.samples.iter().map(|v| v.to_bits()).collect();
            let yb: Vec<u64> = y.samples.iter().map(|v| v.to_bits()).collect();
            assert_eq!(xb, yb);
        }
    }
}

#[test]
fn purple_slice_has_a_single_branch() {
    let base = sym(2.0, 0.01, 3.0);
    let cols = orbit_diagram(&base, (1.5, 3.0, 50), SeedRule::FromMu, 2000, 16).unwrap();
    for c in cols {
        assert!(0.01 < gamma_p(c.rho, 3.0).unwrap());
        let (lo, hi) = c.samples.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi - lo < 1e-9, "rho={} spread {}", c.rho, hi - lo);
    }
}

#[test]
fn cobweb_shapes() {
    let p = sym(3.0, 0.05, 2.0);
    let beta = invariant_bound(&p).unwrap();
    let x = find_fixed_point(&p, 1e-12, beta).unwrap();
    for s in cobweb(&p, x, 4) {
        assert!((s.from.0 - s.to.0).abs() < 1e-12 && (s.from.1 - s.to.1).abs() < 1e-12);
    }

    let p = sym(0.5, 0.12, 10.0);
    let t = saddlefocus::map::iterate(&p, 0.12, DEFAULT_TRANSIENT, 1e-12);
    let x = newton_periodic(&p, t.last(), 2, 50).unwrap();
    let segs = cobweb(&p, x, 2);
    assert_eq!(segs.len(), 4);
    // vertical, horizontal, vertical, horizontal: back to the start.
    let end = segs.last().unwrap().to;
    assert!((end.0 - x).abs() < 1e-10 && (end.1 - x).abs() < 1e-10);
    assert_eq!(segs[0].from.0, segs[0].to.0);
    assert_eq!(segs[1].from.1, segs[1].to.1);
}
