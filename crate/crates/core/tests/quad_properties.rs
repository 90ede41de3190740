use std::sync::Arc;
use std::thread;

use logode::quad::{self, antiderivative, integrand_from_expr, integrand_from_fn, weighted_cumulative, Antiderivative};
use logode::{parse, QuadError, QuadratureConfig};
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::for_range(-4.0, 4.0)
}

fn poly(c: [f64; 4]) -> impl Fn(f64) -> f64 + Copy + Send + Sync + 'static {
    move |x| c[0] + x * (c[1] + x * (c[2] + x * c[3]))
}

#[test]
fn documented_antiderivatives() {
    let c = QuadratureConfig::default();
    let sin = antiderivative(integrand_from_fn(f64::cos), 0.0, &c).unwrap();
    assert!((sin.value(std::f64::consts::FRAC_PI_2).unwrap() - 1.0).abs() < 1e-12);
    let zero = antiderivative(integrand_from_fn(|_| 0.0), 5.0, &c).unwrap();
    assert_eq!(zero.value(-3.0).unwrap(), 0.0);
    assert_eq!(zero.value(5.0).unwrap(), 0.0);
    let e = antiderivative(integrand_from_fn(f64::exp), 0.0, &c).unwrap();
    assert!((e.value(1.0).unwrap() - (std::f64::consts::E - 1.0)).abs() < 1e-12);

    let one = Arc::new(antiderivative(integrand_from_fn(|_| 1.0), 0.0, &c).unwrap());
    let w = weighted_cumulative(integrand_from_fn(|_| 1.0), one.clone(), 1.0, 0.0, &c).unwrap();
    assert!((w.value(1.0).unwrap() - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    let w = weighted_cumulative(integrand_from_fn(|_| 1.0), one.clone(), -1.0, 0.0, &c).unwrap();
    assert!((w.value(1.0).unwrap() - 0.632_120_558_828_557_7).abs() < 1e-12);
    let w = weighted_cumulative(integrand_from_fn(|_| 0.0), one, 1.0, 0.0, &c).unwrap();
    assert_eq!(w.value(2.0).unwrap(), 0.0);
}

#[test]
fn weighted_overflow_names_the_point() {
    let c = QuadratureConfig::default();
    let big = Arc::new(antiderivative(integrand_from_fn(|_| 1000.0), 0.0, &c).unwrap());
    let w = weighted_cumulative(integrand_from_fn(|_| 1.0), big, 1.0, 0.0, &c).unwrap();
    match w.value(1.0) {
        Err(QuadError::Overflow { at }) => assert!(at > 0.0 && at <= 1.0),
        other => panic!("expected overflow, got {other:?}"),
    }
}

#[test]
fn domain_errors_carry_location() {
    let e = integrand_from_expr(&parse("log(x)").unwrap());
    let err = quad::integrate(&*e, -1.0, 1.0, &QuadratureConfig::default()).unwrap_err();
    let at = err.location().unwrap();
    assert!((-1.0..0.0).contains(&at) || at == 0.0, "{err}");
}

#[test]
fn concurrent_queries_agree_with_sequential() {
    let f = Arc::new(Antiderivative::new(integrand_from_fn(|x| (3.0 * x).sin() + x * x), 0.0, &cfg()).unwrap());
    let handles: Vec<_> = (0..8)
        .map(|t| {
            let f = f.clone();
            thread::spawn(move || {
                let xs: Vec<f64> = (0..200).map(|i| -4.0 + 8.0 * ((i * 7 + t * 13) % 200) as f64 / 199.0).collect();
                xs.iter().map(|&x| (x, f.value(x).unwrap())).collect::<Vec<_>>()
            })
        })
        .collect();
    let fresh = Antiderivative::new(integrand_from_fn(|x| (3.0 * x).sin() + x * x), 0.0, &cfg()).unwrap();
    for h in handles {
        for (x, v) in h.join().unwrap() {
            let exact = (1.0 - (3.0 * x).cos()) / 3.0 + x * x * x / 3.0;
            assert!((v - exact).abs() < 1e-9, "x={x}");
            assert!((v - fresh.value(x).unwrap()).abs() < 1e-11);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn antisymmetry(c in proptest::array::uniform4(-2.0f64..2.0), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let p = poly(c);
        let f = |x: f64| Ok(p(x));
        let fwd = quad::integrate(&f, a, b, &cfg()).unwrap();
        let back = quad::integrate(&f, b, a, &cfg()).unwrap();
        prop_assert_eq!(fwd, -back);
    }

    #[test]
    fn additivity(c in proptest::array::uniform4(-2.0f64..2.0), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let p = poly(c);
        let big = Antiderivative::new(integrand_from_fn(p), 0.3, &cfg()).unwrap();
        let direct = quad::integrate(&|x: f64| Ok(p(x)), a, b, &cfg()).unwrap();
        let (fa, fb) = (big.value(a).unwrap(), big.value(b).unwrap());
        let via = fb - fa;
        let q = cfg();
        let combined = 3.0 * q.abs_tol + q.rel_tol * (direct.abs() + fa.abs() + fb.abs());
        let tol = 2.0 * combined;
        prop_assert!((via - direct).abs() <= tol, "{via} vs {direct}");
    }

    #[test]
    fn derivative_recovery(c in proptest::array::uniform4(-2.0f64..2.0), w in 0.5f64..3.0, x in -3.5f64..3.5) {
        let p = poly(c);
        let phi = move |t: f64| p(t) * (w * t).cos();
        let big = Antiderivative::new(integrand_from_fn(phi), 0.0, &cfg()).unwrap();
        let h = 1e-5;
        let d = (big.value(x + h).unwrap() - big.value(x - h).unwrap()) / (2.0 * h);
        prop_assert!((d - phi(x)).abs() <= 1e-6 * phi(x).abs().max(1.0));
    }

    #[test]
    fn ascending_queries_cost_linear(n in 50usize..1500) {
        let big = Antiderivative::new(integrand_from_fn(|t| t.cos() * t), 0.0, &cfg()).unwrap();
        let xs: Vec<f64> = (0..n).map(|i| -4.0 + 8.0 * i as f64 / (n - 1) as f64).collect();
        big.values(&xs).unwrap();
        let panels = 256u64;
        prop_assert!(big.evaluations() <= 60 * (n as u64 + panels), "{} evaluations for {n} points", big.evaluations());
    }
}
