use std::f64::consts::{FRAC_1_SQRT_2, PI};

use bloch_bohr::bounds::{
    cauchy_chain_check_with, mobius_majorant_sup, theorem1_optimize, theorem1_residual, theorem1_root,
    theorem4_expression,
};
use bloch_bohr::extremal::{extremal_eval, extremal_max_modulus, extremal_sup_modulus, ExtremalSpec};
use bloch_bohr::norms::{weighted_bloch_norm_with, weighted_radial_sup, RadialMajorant, SeriesOnCircle};
use bloch_bohr::series::CircleScanner;
use bloch_bohr::weights::{criterion_bound, criterion_check, h_profile, Scaled, WeightRegistry};
use bloch_bohr::{GridSpec, SolverConfig, TailBound, TruncatedSeries};
use num_complex::Complex64;
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn polynomial(max_degree: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(coeff(), 1..=max_degree + 1).prop_map(|c| TruncatedSeries::polynomial(c).unwrap())
}

/// `c_n q^n` with `|c_n| <= sqrt2`, so the tail bound `(q, sqrt2)` is valid.
fn geometric_series() -> impl Strategy<Value = TruncatedSeries> {
    (prop::collection::vec(coeff(), 40..=80), 0.1..0.8f64).prop_map(|(c, q)| {
        let coeffs = c.iter().enumerate().map(|(n, a)| a * q.powi(n as i32)).collect();
        TruncatedSeries::new(coeffs, Some(TailBound::new(q, 2f64.sqrt()).unwrap())).unwrap()
    })
}

fn any_series() -> impl Strategy<Value = TruncatedSeries> {
    prop_oneof![polynomial(32), geometric_series()]
}

fn weight_token() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("standard".to_string()),
        Just("constant".to_string()),
        (0.71..0.99f64, 1.0..4.0f64).prop_map(|(r0, a)| format!("example2:r0={r0},alpha={a}")),
        (0.71..0.99f64, 1.0..4.0f64).prop_map(|(r0, a)| format!("example3:r0={r0},alpha={a}")),
    ]
}

/// Trapezoidal mean of `|f|^2` on the circle; exact for trigonometric
/// polynomials whose degree is below the node count.
fn quadrature_l2(s: &TruncatedSeries, r: f64, nodes: usize) -> f64 {
    let mean = (0..nodes)
        .map(|k| {
            let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / nodes as f64);
            s.coeffs().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c).norm_sqr()
        })
        .sum::<f64>()
        / nodes as f64;
    mean.sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn majorant_idempotent_and_commutes_with_scaling(s in any_series(), big_r in 0.0..=1.0f64) {
        let m = s.majorant();
        prop_assert_eq!(m.majorant(), m.clone());
        let a = m.scale_argument(big_r).unwrap();
        let b = s.scale_argument(big_r).unwrap().majorant();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-15 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn norm_chain_within_error_bounds(s in any_series(), r in 0.0..0.999f64) {
        let limit = s.tail().map_or(0.999, |t| if t.rho == 0.0 { 0.999 } else { 0.95 / t.rho });
        let r = r.min(limit);
        let n = CircleScanner::default().norms(&s, r).unwrap();
        let e = n.error_bound.unwrap_or(0.0);
        let slack = 1e-12 * (1.0 + n.coeff_sum);
        prop_assert!(n.l2_norm <= n.sup_norm + e + slack, "{:?}", n);
        prop_assert!(n.sup_norm <= n.coeff_sum + e + slack, "{:?}", n);
    }

    #[test]
    fn parseval_matches_quadrature(s in polynomial(32), r in 0.0..1.0f64) {
        let q = quadrature_l2(&s, r, 128);
        prop_assert!((s.l2_norm(r) - q).abs() <= 1e-8, "{} vs {}", s.l2_norm(r), q);
    }

    #[test]
    fn majorant_dominates_on_circle(s in any_series(), r in 0.0..0.9f64, k in 0usize..64) {
        let theta = 2.0 * PI * k as f64 / 64.0;
        let e = s.eval(Complex64::from_polar(r, theta)).unwrap();
        let m = s.majorant().eval(Complex64::new(r, 0.0)).unwrap();
        let slack = e.error_bound.unwrap_or(0.0) + m.error_bound.unwrap_or(0.0) + 1e-12;
        prop_assert!(m.value.re + slack >= e.value.norm());
    }

    #[test]
    fn majorant_domination_of_radial_sup(s in polynomial(16), tok in weight_token()) {
        let w = WeightRegistry::builtin().parse(&tok).unwrap();
        let grid = GridSpec::radial(128);
        let scanner = CircleScanner::new(GridSpec::angle(256));
        let plain = weighted_radial_sup(&SeriesOnCircle { series: &s, scanner }, w.as_ref(), &grid).unwrap();
        let maj = weighted_radial_sup(&RadialMajorant { series: &s }, w.as_ref(), &grid).unwrap();
        prop_assert!(maj.value + 1e-12 >= plain.value);
    }

    #[test]
    fn bloch_norm_homogeneous(s in polynomial(12), re in -3.0..3.0f64, im in -3.0..3.0f64, tok in weight_token()) {
        let w = WeightRegistry::builtin().parse(&tok).unwrap();
        let grid = GridSpec::radial(128);
        let scanner = CircleScanner::new(GridSpec::angle(256));
        let c = Complex64::new(re, im);
        let base = weighted_bloch_norm_with(&s, w.as_ref(), &grid, &scanner).unwrap();
        let scaled = weighted_bloch_norm_with(&s.scale(c), w.as_ref(), &grid, &scanner).unwrap();
        prop_assert!((scaled - c.norm() * base).abs() <= 1e-12 * (1.0 + scaled));
    }

    #[test]
    fn criterion_ignores_positive_scaling(tok in weight_token(), r0 in FRAC_1_SQRT_2..1.0f64, c in 1e-3..1e3f64) {
        let reg = WeightRegistry::builtin();
        let grid = GridSpec::radial(500);
        let base = criterion_check(reg.parse(&tok).unwrap().as_ref(), r0, &grid).unwrap();
        let scaled = Scaled::new(reg.parse(&tok).unwrap(), c).unwrap();
        prop_assert_eq!(criterion_check(&scaled, r0, &grid).unwrap().passed, base.passed);
    }

    #[test]
    fn criterion_bound_is_one_at_r0(r0 in FRAC_1_SQRT_2..=1.0f64) {
        prop_assert_eq!(criterion_bound(r0, r0), 1.0);
    }

    #[test]
    fn h_profile_decreasing_and_convex(r0 in FRAC_1_SQRT_2..1.0f64) {
        let rows = h_profile(r0, &GridSpec::new(0.0, 1.0, 401)).unwrap();
        let inside: Vec<_> = rows.iter().filter(|row| row.r <= r0).collect();
        for w in inside.windows(2) {
            prop_assert!(w[1].h <= w[0].h);
        }
        // Second differences on the uniform part, below r0.
        let uniform: Vec<_> = inside.iter().filter(|row| row.r < r0 && ((row.r * 400.0).round() - row.r * 400.0).abs() < 1e-9).collect();
        for w in uniform.windows(3) {
            prop_assert!(w[0].h - 2.0 * w[1].h + w[2].h >= -1e-9);
        }
    }

    #[test]
    fn lower_bound_root_residual(s in 1e-3..0.999f64) {
        let cfg = SolverConfig::default();
        let r = theorem1_root(s, &cfg).unwrap();
        prop_assert!(r > 0.0 && r < 1.0);
        prop_assert!(theorem1_residual(r, s).abs() <= 1e-9);
    }

    #[test]
    fn cauchy_chain_increasing(s in polynomial(12), tok in weight_token(), big_r in 0.0..0.99f64, r in 0.0..0.99f64) {
        let w = WeightRegistry::builtin().parse(&tok).unwrap();
        let v = cauchy_chain_check_with(&s, w.as_ref(), big_r, r, &CircleScanner::new(GridSpec::angle(512))).unwrap();
        prop_assert!(v.is_increasing(1e-12), "{:?}", v);
    }

    #[test]
    fn extremal_modulus_bounded(r0 in FRAC_1_SQRT_2..=1.0f64, phi in 0.0..2.0 * PI, r in 0.0..1.0f64, k in 0usize..128) {
        let spec = ExtremalSpec::new(r0, phi).unwrap();
        let theta = 2.0 * PI * k as f64 / 128.0;
        let v = extremal_eval(&spec, Complex64::from_polar(r, theta)).unwrap().norm();
        let at = |t: f64| extremal_eval(&spec, Complex64::from_polar(r, t)).unwrap().norm();
        let max = extremal_max_modulus(r0, r).unwrap();
        prop_assert!(v <= max * (1.0 + 1e-13));
        if r <= r0 {
            let bound = extremal_sup_modulus(r0, r);
            prop_assert!((at(phi + PI) - bound).abs() <= 1e-13 * (1.0 + bound));
            prop_assert_eq!(max, bound);
        } else {
            prop_assert!((at(phi) - max).abs() <= 1e-12 * (1.0 + max));
        }
    }
}

#[test]
fn lower_bound_optimum_dominates_random_s() {
    use rand::{Rng, SeedableRng};
    let cfg = SolverConfig::default();
    let opt = theorem1_optimize(&cfg).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let s = rng.gen_range(1e-4..1.0 - 1e-4);
        assert!(opt.r_star >= theorem1_root(s, &cfg).unwrap() - 1e-12, "s = {s}");
    }
}

#[test]
fn critical_scan_never_exceeds_one() {
    let r_grid = GridSpec::radial(512);
    for i in 1..100 {
        let a = i as f64 / 100.0 * bloch_bohr::norms::AK_A_MAX;
        for r in r_grid.iter() {
            assert!(theorem4_expression(a, FRAC_1_SQRT_2, r).unwrap() <= 1.0 + 1e-9);
        }
    }
}

#[test]
fn mobius_family_below_cauchy_bound() {
    let a_grid = bloch_bohr::bounds::default_mobius_grid();
    let mut closest = (f64::INFINITY, 0.0);
    for r in GridSpec::new(0.05, 0.95, 91).iter() {
        let sup = mobius_majorant_sup(r, &a_grid).unwrap().value;
        let cb = 1.0 / (1.0 - r * r).sqrt();
        assert!(sup <= cb + 1e-12, "r = {r}");
        if cb - sup < closest.0 {
            closest = (cb - sup, r);
        }
    }
    assert!((closest.1 - FRAC_1_SQRT_2).abs() < 0.02, "{closest:?}");
}
