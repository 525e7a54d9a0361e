use std::f64::consts::PI;

use fracstar::evolution::{in_star, norm_at, CauchyProblem, ScaleElement, StarDomain};
use fracstar::gamma::{gamma, log_gamma};
use fracstar::series::{apply_multipliers, lambda_multiplier, PowerSeries};
use fracstar::wright::{phi_auto, ContourConfig, WrightParams};
use fracstar::Complex64;
use proptest::prelude::*;

fn complex_in(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, -PI..PI).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

// keeps the arguments of the identities at least 1e-3 away from the poles
fn off_poles(z: &Complex64) -> bool {
    (z.re - z.re.round()).abs() > 1e-3 || z.im.abs() > 1e-3
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b)), 1..len)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn gamma_reflection(z in complex_in(10.0).prop_filter("pole", off_poles)) {
        let lhs = gamma(z).unwrap() * gamma(1.0 - z).unwrap();
        prop_assert!(rel(lhs, PI / (PI * z).sin()) < 1e-11);
    }

    #[test]
    fn gamma_recurrence(z in complex_in(10.0).prop_filter("pole", off_poles)) {
        prop_assert!(rel(z * gamma(z).unwrap(), gamma(z + 1.0).unwrap()) < 1e-11);
    }

    #[test]
    fn gamma_conjugate_symmetry(z in complex_in(10.0).prop_filter("pole", off_poles)) {
        prop_assert!(rel(gamma(z.conj()).unwrap(), gamma(z).unwrap().conj()) < 1e-13);
    }

    #[test]
    fn log_gamma_exponentiates(z in complex_in(30.0).prop_filter("left half-plane", |z| z.re > 1e-3)) {
        let g = gamma(z).unwrap();
        prop_assume!(g.norm().is_finite() && g.norm() > 1e-300);
        prop_assert!(rel(log_gamma(z).unwrap().exp(), g) < 1e-10);
    }

    #[test]
    fn multipliers_decrease_in_delta(n in 1usize..400, d1 in 1.0..2.0f64, d2 in 1.0..2.0f64) {
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        prop_assume!(hi - lo > 1e-9);
        let (a, b) = (lambda_multiplier(n, lo).unwrap(), lambda_multiplier(n, hi).unwrap());
        prop_assert!(a >= b && b > 0.0 || b == 0.0);
        prop_assert!(a <= 1.0);
    }

    #[test]
    fn multiplier_transform_is_linear(a in coeffs(40), b in coeffs(40), k in -3.0..3.0f64, delta in 1.0..2.0f64) {
        let len = a.len().min(b.len());
        let mix: Vec<Complex64> = (0..len).map(|i| a[i] * k + b[i]).collect();
        let ta = apply_multipliers(&PowerSeries::new(a[..len].to_vec()).unwrap(), delta).unwrap();
        let tb = apply_multipliers(&PowerSeries::new(b[..len].to_vec()).unwrap(), delta).unwrap();
        let tm = apply_multipliers(&PowerSeries::new(mix).unwrap(), delta).unwrap();
        for i in 0..len {
            prop_assert!((tm.coeffs()[i] - (ta.coeffs()[i] * k + tb.coeffs()[i])).norm() < 1e-14);
        }
    }

    #[test]
    fn unit_order_is_identity(a in coeffs(60)) {
        let s = PowerSeries::new(a).unwrap();
        let t = apply_multipliers(&s, 1.0).unwrap();
        prop_assert_eq!(t.coeffs(), s.coeffs());
    }

    #[test]
    fn norm_is_a_seminorm(a in coeffs(100), b in coeffs(100), k in -5.0..5.0f64, omega in 0.0..0.999f64) {
        let len = a.len().min(b.len());
        let ea = ScaleElement::new(a[..len].to_vec()).unwrap();
        let eb = ScaleElement::new(b[..len].to_vec()).unwrap();
        let sum = ScaleElement::new((0..len).map(|i| a[i] + b[i]).collect()).unwrap();
        let scaled = ScaleElement::new(a[..len].iter().map(|x| x * k).collect()).unwrap();
        let (na, nb) = (norm_at(&ea, omega).unwrap(), norm_at(&eb, omega).unwrap());
        prop_assert!(norm_at(&sum, omega).unwrap() <= na + nb + 1e-12);
        prop_assert!((norm_at(&scaled, omega).unwrap() - k.abs() * na).abs() <= 1e-12 * (1.0 + na));
    }

    #[test]
    fn norms_weaken_along_the_scale(a in coeffs(100), w1 in 0.0..0.999f64, w2 in 0.0..0.999f64) {
        let e = ScaleElement::new(a).unwrap();
        let (lo, hi) = if w1 < w2 { (w1, w2) } else { (w2, w1) };
        prop_assert!(norm_at(&e, hi).unwrap() <= norm_at(&e, lo).unwrap());
    }

    #[test]
    fn star_is_star_shaped(
        sing in prop::collection::vec(complex_in(5.0).prop_filter("origin", |w| w.norm() > 1e-3), 1..4),
        t in complex_in(10.0),
        s in 0.0..1.0f64,
    ) {
        let star = StarDomain::new(sing).unwrap();
        if in_star(t, &star, 1e-9) {
            prop_assert!(in_star(t * s, &star, 1e-9));
        }
        prop_assert!(in_star(Complex64::new(0.0, 0.0), &star, 1e-9));
    }

    #[test]
    fn star_contains_its_disk(sing in prop::collection::vec(complex_in(5.0).prop_filter("origin", |w| w.norm() > 1e-3), 1..4), t in complex_in(1.0)) {
        let r = sing.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
        let star = StarDomain::new(sing).unwrap();
        prop_assert!(in_star(t * (0.999 * r), &star, 1e-9));
    }

    #[test]
    fn problem_json_round_trip(taylor in coeffs(30), delta in 1.01..2.0f64) {
        let p = CauchyProblem::derivative(taylor, delta).unwrap().with_singularities(vec![Complex64::new(1.0, 0.0)]).unwrap();
        prop_assert_eq!(CauchyProblem::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn series_json_round_trip(c in coeffs(30)) {
        let s = PowerSeries::new(c).unwrap();
        let back: PowerSeries = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // beyond |z| ~ 3 near the positive axis and delta near 1 the series needs more than DEFAULT_N_MAX terms
    #[test]
    fn phi_conjugate_symmetry(delta in 1.05..1.95f64, z in complex_in(3.0)) {
        let p = WrightParams::new(delta).unwrap();
        let config = ContourConfig::default().with_tol(1e-12);
        let (a, b) = (phi_auto(&p, z.conj(), &config).unwrap().value, phi_auto(&p, z, &config).unwrap().value);
        prop_assert!((a - b.conj()).norm() <= 1e-10 * b.norm().max(1.0));
    }
}
