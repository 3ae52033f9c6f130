use proptest::prelude::*;

use orliczkit::field::SampledFunction;
use orliczkit::harness::{radius_chain, smoothstep};
use orliczkit::norms::{luxemburg_norm, modular};
use orliczkit::raster::{generate, read_ord1, write_ord1, RasterDomain, Shape};
use orliczkit::sobolev::{first_order_target, EmbeddingContext};
use orliczkit::young::{conjugate, integral_mean, Ext, Monotone, Side, YoungFunction};

fn young(k: usize) -> YoungFunction {
    match k {
        0 => YoungFunction::power(1.5).unwrap(),
        1 => YoungFunction::power(2.0).unwrap(),
        2 => YoungFunction::power(3.0).unwrap(),
        _ => YoungFunction::power_log(2.0, 1.0).unwrap(),
    }
}

fn fin(e: Ext) -> f64 {
    match e {
        Ext::Finite(v) => v,
        Ext::Infinite => f64::INFINITY,
    }
}

fn square(h: f64) -> RasterDomain {
    generate(&Shape::Cube { lo: 0.0, hi: 1.0 }, 2, h).unwrap()
}

/// Trigonometric field with random coefficients.
fn wave(c: [f64; 4]) -> impl Fn(&[f64]) -> f64 {
    move |x: &[f64]| c[0] + c[1] * (3.0 * x[0]).sin() + c[2] * (5.0 * x[1]).cos() + c[3] * x[0] * x[1]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn young_inequality(k in 0usize..4, s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let a = young(k);
        let c = conjugate(&a).unwrap();
        let (s, t) = (10f64.powf(s), 10f64.powf(t));
        prop_assert!(s * t <= fin(a.value(s)) + fin(c.value(t)) * (1.0 + 1e-6) + 1e-12);
    }

    #[test]
    fn inverse_round_trip(k in 0usize..4, e in -6.0f64..6.0) {
        let a = young(k);
        let s = 10f64.powf(e);
        let y = fin(a.value(s));
        let cell = 10f64.powf(16.0 / 511.0);
        prop_assert!(a.inverse(y, Side::Right).value >= s / cell);
        prop_assert!(a.inverse(y, Side::Left).value <= s * cell);
    }

    #[test]
    fn mean_sandwich(k in 0usize..4, e in -6.0f64..6.0) {
        let a = young(k);
        let bar = integral_mean(&a).unwrap();
        let s = 10f64.powf(e);
        let (lo, mid, hi) = (fin(bar.value(s)), fin(a.value(s)), fin(bar.value(2.0 * s)));
        prop_assert!(lo <= mid * (1.0 + 1e-6) && mid <= hi * (1.0 + 1e-6), "{lo} {mid} {hi}");
    }

    #[test]
    fn target_is_convex_and_increasing(p in 1.1f64..2.8) {
        let t = first_order_target(&YoungFunction::power(p).unwrap(), EmbeddingContext::first_order(3).unwrap()).unwrap();
        t.validate().unwrap();
    }

    #[test]
    fn luxemburg_homogeneity(c in prop::array::uniform4(-2.0f64..2.0), k in 0usize..4, t in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let d = square(1.0 / 32.0);
        let a = young(k);
        let f = SampledFunction::from_fn(&d, 0, wave(c)).unwrap();
        let n1 = luxemburg_norm(&f, &a).unwrap();
        let n2 = luxemburg_norm(&f.scaled(t), &a).unwrap();
        prop_assume!(n1 > 0.0);
        prop_assert!((n2 / (t * n1) - 1.0).abs() < 1e-5, "{n1} {n2}");
    }

    #[test]
    fn luxemburg_monotone(c in prop::array::uniform4(-2.0f64..2.0), k in 0usize..4, shrink in 0.0f64..1.0) {
        let d = square(1.0 / 32.0);
        let a = young(k);
        let g = SampledFunction::from_fn(&d, 0, wave(c)).unwrap();
        let f = g.map(|v| v * shrink * (1.0 + v.sin()) / 2.0);
        prop_assert!(luxemburg_norm(&f, &a).unwrap() <= luxemburg_norm(&g, &a).unwrap() * (1.0 + 1e-6));
    }

    #[test]
    fn modular_threshold(c in prop::array::uniform4(-2.0f64..2.0), k in 0usize..4) {
        let d = square(1.0 / 32.0);
        let a = young(k);
        let f = SampledFunction::from_fn(&d, 0, wave(c)).unwrap();
        let v = luxemburg_norm(&f, &a).unwrap();
        prop_assume!(v > 0.0);
        prop_assert!(fin(modular(&f, &a, v * (1.0 + 1e-4)).unwrap()) <= 1.0);
    }

    #[test]
    fn ball_measure_nondecreasing(x in 0.0f64..1.0, y in 0.0f64..1.0, r1 in 0.0f64..1.0, r2 in 0.0f64..1.0) {
        let d = square(1.0 / 64.0);
        let (a, b) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(d.ball_measure(&[x, y], a).unwrap() <= d.ball_measure(&[x, y], b).unwrap());
    }

    #[test]
    fn halving_property(shape in 0usize..3, x in 0.05f64..0.95, y in 0.05f64..0.95, r in 0.2f64..1.0) {
        let h = 1.0 / 128.0;
        let d = match shape {
            0 => square(h),
            1 => generate(&Shape::Ball { radius: 1.0 }, 2, h).unwrap(),
            _ => generate(&Shape::LipschitzGraph { amp: 0.5 }, 2, h).unwrap(),
        };
        prop_assume!(d.contains(&[x, y]));
        let hv = d.halving_radius(&[x, y], r).unwrap();
        let big = hv.cells_r as f64;
        let q = hv.cells_tilde as f64 / big;
        prop_assert!((q - 0.5).abs() <= 2.0 / big, "{hv:?}");
    }

    #[test]
    fn chain_halves_and_decreases(x in 0.05f64..0.95, y in 0.05f64..0.95, r in 0.1f64..1.0) {
        let d = square(1.0 / 128.0);
        let chain = radius_chain(&d, &[x, y], r).unwrap();
        for l in &chain {
            prop_assert!(l.r_next < l.r);
            prop_assert!(l.residual.abs() <= 2.0 / l.cells_next as f64);
        }
        for w in chain.windows(2) {
            prop_assert_eq!(w[0].r_next, w[1].r);
        }
    }

    #[test]
    fn ord1_round_trip(shape in 0usize..4, n in 2usize..4, cells in 6u32..24) {
        let h = 1.0 / cells as f64;
        let s = [Shape::Ball { radius: 0.8 }, Shape::InwardCusp { gamma: 1.5 }, Shape::FatCarpet { stages: 2 }, Shape::LipschitzGraph { amp: 0.3 }];
        let d = generate(&s[shape], n, h).unwrap();
        let back = read_ord1(&write_ord1(&d)).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn smoothstep_monotone(m in 1u32..4, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(smoothstep(m, a) <= smoothstep(m, b));
        prop_assert!((smoothstep(m, a) + smoothstep(m, 1.0 - a) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn exponent_law_grid() {
    for n in [2u32, 3] {
        for p in [1.2, 1.5, 2.0, 2.5] {
            if p >= n as f64 {
                continue;
            }
            let t = first_order_target(&YoungFunction::power(p).unwrap(), EmbeddingContext::first_order(n).unwrap()).unwrap();
            let want = n as f64 * p / (n as f64 - p);
            assert!((t.tail_exponent() / want - 1.0).abs() < 0.01, "n={n} p={p}");
        }
    }
}
