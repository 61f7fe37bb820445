//! Quantitative Bohr-radius bounds: the lower-bound equation for the Bloch
//! to `H^inf` radius, the Cauchy–Schwarz chain behind `R >= 1/sqrt2`, the
//! upper-bound scan with the Avkhadiev–Kayumov function, Bombieri's closed
//! form for `m_inf`, and a strictness probe for the Bloch m-function.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RADIAL_MAX};
use crate::norms::{avkhadiev_majorant_closed_form, weighted_radial_sup, RadialMajorant, SeriesOnCircle, AK_A_MAX};
use crate::series::{CircleScanner, TruncatedSeries};
use crate::solve::{bisect, golden_max, grid_max, Extremum, SolverConfig};
use crate::weights::{Standard, Weight};

/// "Exceeds one" means `> 1 + THRESHOLD_EPS`.
pub const THRESHOLD_EPS: f64 = 1e-9;

/// Admissible range for the exponent split `s` in the lower-bound equation.
pub const S_RANGE: (f64, f64) = (1e-4, 1.0 - 1e-4);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub best_value: f64,
    pub best_params: BTreeMap<String, f64>,
    pub exceeded_threshold: bool,
    pub samples: usize,
}

impl ScanReport {
    fn new(best_value: f64, params: &[(&str, f64)], samples: usize) -> Self {
        Self {
            best_value,
            best_params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            exceeded_threshold: best_value > 1.0 + THRESHOLD_EPS,
            samples,
        }
    }
}

/// `log(1 - r^{2s}) - 1 + r^{-2(1-s)}`; its root in `(0, 1)` is the radius up
/// to which `sum_{n>=1} |a_n| r^n <= 1` holds on the Bloch unit ball.
pub fn theorem1_residual(r: f64, s: f64) -> f64 {
    (-r.powf(2.0 * s)).ln_1p() - 1.0 + r.powf(-2.0 * (1.0 - s))
}

pub fn theorem1_root(s: f64, cfg: &SolverConfig) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s must lie in (0, 1), got {s}")));
    }
    bisect(|r| theorem1_residual(r, s), cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Optimum {
    pub s_star: f64,
    pub r_star: f64,
    /// Interior local maxima seen on the coarse scan.
    pub local_maxima: usize,
    pub samples: usize,
}

/// Maximizes the root over `s`: a 1e-3 scan of [`S_RANGE`] followed by
/// golden-section refinement around the best sample.
pub fn theorem1_optimize(cfg: &SolverConfig) -> Result<Theorem1Optimum> {
    let (lo, hi) = S_RANGE;
    let points = ((hi - lo) / 1e-3).round() as usize + 1;
    let grid = GridSpec::new(lo, hi, points);
    let roots: Vec<f64> = grid.iter().map(|s| theorem1_root(s, cfg)).collect::<Result<_>>()?;

    let local_maxima = roots.windows(3).filter(|w| w[1] > w[0] && w[1] >= w[2]).count();
    let (best_i, _) = roots
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    let a = grid.point(best_i.saturating_sub(1));
    let b = grid.point((best_i + 1).min(points - 1));
    let refined = golden_max(|s| theorem1_root(s, cfg), a, b, 1e-10, 200)?;
    let (s_star, r_star) =
        if refined.value > roots[best_i] { (refined.x, refined.value) } else { (grid.point(best_i), roots[best_i]) };
    Ok(Theorem1Optimum { s_star, r_star, local_maxima, samples: points })
}

/// `r^2/(1-r^2)^2 - sum n^2 |a_n|^2 r^{2n}`; nonnegative on the Bloch unit ball.
pub fn bloch_coefficient_bound_check(s: &TruncatedSeries, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("r must lie in [0, 1), got {r}")));
    }
    let r2 = r * r;
    let mut p = 1.0;
    let mut sum = 0.0;
    for (n, c) in s.coeffs().iter().enumerate() {
        sum += (n * n) as f64 * c.norm_sqr() * p;
        p *= r2;
    }
    Ok(r2 / ((1.0 - r2) * (1.0 - r2)) - sum)
}

/// `R / sqrt(1 - R^2)`, equal to one at `R = 1/sqrt2`.
pub fn cauchy_multiplier(big_r: f64) -> f64 {
    big_r / (1.0 - big_r * big_r).sqrt()
}

/// The three members of the chain
/// `omega R sum |a_n| (R r)^n <= omega ||f_r||_2 R/sqrt(1-R^2) <= omega ||f_r||_inf R/sqrt(1-R^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainValues {
    pub majorant: f64,
    pub l2: f64,
    pub sup: f64,
}

impl ChainValues {
    /// Both inequalities hold up to a relative slack.
    pub fn is_increasing(&self, rel_tol: f64) -> bool {
        let slack = |x: f64| rel_tol * x.abs().max(1e-300);
        self.majorant <= self.l2 + slack(self.l2) && self.l2 <= self.sup + slack(self.sup)
    }
}

pub fn cauchy_chain_check(s: &TruncatedSeries, w: &dyn Weight, big_r: f64, r: f64) -> Result<ChainValues> {
    cauchy_chain_check_with(s, w, big_r, r, &CircleScanner::default())
}

/// Evaluated on the stored polynomial, for which both inequalities are exact.
pub fn cauchy_chain_check_with(
    s: &TruncatedSeries,
    w: &dyn Weight,
    big_r: f64,
    r: f64,
    scanner: &CircleScanner,
) -> Result<ChainValues> {
    if !(0.0..1.0).contains(&big_r) {
        return Err(Error::Domain(format!("R must lie in [0, 1), got {big_r}")));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("r must lie in [0, 1), got {r}")));
    }
    let omega = w.eval(r);
    let k = cauchy_multiplier(big_r);
    let poly = TruncatedSeries::polynomial(s.coeffs().to_vec())?;
    let sup = scanner.sup(&poly, r)?.value;
    Ok(ChainValues {
        majorant: omega * big_r * poly.majorant_sum(big_r * r),
        l2: omega * poly.l2_norm(r) * k,
        sup: omega * sup * k,
    })
}

fn check_ak(a: f64) -> Result<()> {
    if !(a > 0.0 && a < AK_A_MAX) {
        return Err(Error::Domain(format!("a must lie in (0, 1/sqrt(3)), got {a}")));
    }
    Ok(())
}

/// `R (1 - r^2) sum |a_n| (R r)^n` for the Avkhadiev–Kayumov function.
pub fn theorem4_expression(a: f64, big_r: f64, r: f64) -> Result<f64> {
    check_ak(a)?;
    if !(0.0..=1.0).contains(&r) || !(big_r >= 0.0) {
        return Err(Error::Domain(format!("need 0 <= r <= 1 and R >= 0, got r = {r}, R = {big_r}")));
    }
    Ok(big_r * (1.0 - r * r) * avkhadiev_majorant_closed_form(a, big_r * r)?)
}

/// `sup_r theorem4_expression(a, R, r)` over `r_grid` with refinement.
pub fn theorem4_sup_r(a: f64, big_r: f64, r_grid: &GridSpec) -> Result<Extremum> {
    grid_max(|r| theorem4_expression(a, big_r, r), r_grid)
}

pub fn theorem4_scan(a: f64, big_r: f64, r_grid: &GridSpec) -> Result<ScanReport> {
    let best = theorem4_sup_r(a, big_r, r_grid)?;
    Ok(ScanReport::new(best.value, &[("a", a), ("R", big_r), ("r", best.x)], r_grid.points))
}

/// Interior uniform grid on `(0, 1/sqrt3)`.
pub fn ak_parameter_grid(points: usize) -> GridSpec {
    let h = AK_A_MAX / (points + 1) as f64;
    GridSpec::new(h, AK_A_MAX - h, points).without_refinement()
}

/// Maximum of the expression over every `a` on `a_grid` and `r` on `r_grid`.
pub fn theorem4_max_over_a(big_r: f64, a_grid: &GridSpec, r_grid: &GridSpec) -> Result<ScanReport> {
    let mut best = ScanReport::new(f64::NEG_INFINITY, &[], 0);
    let mut samples = 0;
    for a in a_grid.iter() {
        let e = theorem4_sup_r(a, big_r, r_grid)?;
        samples += r_grid.points;
        if e.value > best.best_value {
            best = ScanReport::new(e.value, &[("a", a), ("R", big_r), ("r", e.x)], 0);
        }
    }
    best.samples = samples;
    Ok(best)
}

/// Bisects on `R` over `cfg.bracket` for the least value at which some `a`
/// on the grid pushes the expression above `1 + THRESHOLD_EPS`. The reported
/// `R` exceeds the threshold and is therefore an upper bound for the Bohr
/// radius of the Bloch space.
pub fn theorem4_upper_bound(a_grid: &GridSpec, r_grid: &GridSpec, cfg: &SolverConfig) -> Result<ScanReport> {
    cfg.validate()?;
    let (mut lo, mut hi) = cfg.bracket;
    let mut samples = 0;
    let mut eval = |big_r: f64| -> Result<ScanReport> {
        let rep = theorem4_max_over_a(big_r, a_grid, r_grid)?;
        samples += rep.samples;
        Ok(rep)
    };
    let at_lo = eval(lo)?;
    if at_lo.exceeded_threshold {
        let mut rep = at_lo;
        rep.samples = samples;
        return Ok(rep);
    }
    let mut best = eval(hi)?;
    if !best.exceeded_threshold {
        return Err(Error::NoSignChange { lo, hi, f_lo: at_lo.best_value - 1.0, f_hi: best.best_value - 1.0 });
    }
    for _ in 0..cfg.max_iter {
        if hi - lo <= cfg.abs_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let rep = eval(mid)?;
        if rep.exceeded_threshold {
            hi = mid;
            best = rep;
        } else {
            lo = mid;
        }
    }
    best.samples = samples;
    Ok(best)
}

pub fn default_theorem4_search() -> SolverConfig {
    SolverConfig { abs_tol: 1e-6, max_iter: 100, bracket: (FRAC_1_SQRT_2, 0.8) }
}

/// Bombieri's `m_inf(r) = (3 - sqrt(8(1 - r^2))) / r` on `[1/3, 1/sqrt2]`.
pub fn bombieri_m_infty(r: f64) -> Result<f64> {
    let slack = 4.0 * f64::EPSILON;
    if !(r >= 1.0 / 3.0 - slack && r <= FRAC_1_SQRT_2 + slack) {
        return Err(Error::Domain(format!("r must lie in [1/3, 1/sqrt(2)], got {r}")));
    }
    Ok((3.0 - (8.0 * (1.0 - r * r)).sqrt()) / r)
}

/// `1 / sqrt(1 - r^2)`, the Cauchy bound for `m_inf`.
pub fn cauchy_bound(r: f64) -> f64 {
    1.0 / (1.0 - r * r).sqrt()
}

/// Majorant sum at `r` of `(a - z)/(1 - a z)`: `a + (1 - a^2) r / (1 - a r)`.
pub fn mobius_majorant(a: f64, r: f64) -> f64 {
    a + (1.0 - a * a) * r / (1.0 - a * r)
}

pub fn default_mobius_grid() -> GridSpec {
    GridSpec::new(0.0, 1.0, 2001)
}

/// Maximizes [`mobius_majorant`] over `a` on `a_grid` (within `[0, 1]`; `a = 1`
/// is the constant limit of the family).
pub fn mobius_majorant_sup(r: f64, a_grid: &GridSpec) -> Result<Extremum> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r must lie in (0, 1), got {r}")));
    }
    if !(a_grid.lo >= 0.0 && a_grid.hi <= 1.0) {
        return Err(Error::Domain("Möbius parameter grid must lie in [0, 1]".into()));
    }
    grid_max(|a| Ok(mobius_majorant(a, r)), a_grid)
}

/// A named member of the strictness-probe family.
#[derive(Debug, Clone)]
pub struct ProbeFunction {
    pub label: String,
    pub series: TruncatedSeries,
}

/// Truncation order used by the default probe family.
pub const PROBE_ORDER: usize = 512;

/// The documented, non-exhaustive probe family for `big_r`:
///
/// * polynomials `z`, `z^2`, `z - z^2/2`, `z + z^3/3`, `1 + z + z^2`;
/// * disc automorphisms `(alpha - t z)/(1 - conj(alpha) t z)` for
///   `|alpha| in {0.2, 0.5, 0.7}`, `t in {0.5, 0.9}`, plus a rotated `alpha`;
/// * Blaschke-type products of two dilated factors and `z` times a factor;
/// * primitives of `(z/r0 - R)/(1 - R z/r0)` for two `r0 > R`, whose
///   derivative has coefficient moduli nearly proportional to `(R/r0)^n`.
pub fn default_theorem5_family(big_r: f64) -> Result<Vec<ProbeFunction>> {
    let mut out = Vec::new();
    let mut push = |label: String, series: TruncatedSeries| out.push(ProbeFunction { label, series });
    let c = |re: f64| Complex64::new(re, 0.0);

    for (label, p) in [
        ("z", &[0.0, 1.0][..]),
        ("z^2", &[0.0, 0.0, 1.0]),
        ("z-z^2/2", &[0.0, 1.0, -0.5]),
        ("z+z^3/3", &[0.0, 1.0, 0.0, 1.0 / 3.0]),
        ("1+z+z^2", &[1.0, 1.0, 1.0]),
    ] {
        push(label.to_string(), TruncatedSeries::real_polynomial(p)?);
    }
    for m in [0.2, 0.5, 0.7] {
        for t in [0.5, 0.9] {
            push(format!("mobius(a={m},t={t})"), TruncatedSeries::disc_automorphism(c(m), t, PROBE_ORDER)?);
        }
    }
    let rotated = Complex64::from_polar(0.5, FRAC_PI_3);
    push("mobius(a=0.5e^{i pi/3},t=0.9)".into(), TruncatedSeries::disc_automorphism(rotated, 0.9, PROBE_ORDER)?);

    let f1 = TruncatedSeries::disc_automorphism(c(0.5), 0.9, PROBE_ORDER)?;
    let f2 = TruncatedSeries::disc_automorphism(c(-0.5), 0.9, PROBE_ORDER)?;
    push("blaschke(0.5,-0.5;t=0.9)".into(), f1.mul(&f2));
    push("blaschke(0.5,0.5;t=0.9)".into(), f1.mul(&f1));
    let z = TruncatedSeries::real_polynomial(&[0.0, 1.0])?;
    push("z*mobius(a=0.5,t=0.9)".into(), z.mul(&f1));

    for frac in [0.5, 0.9] {
        let r0 = big_r + frac * (1.0 - big_r);
        let derivative = TruncatedSeries::disc_automorphism(c(big_r), 1.0 / r0, PROBE_ORDER)?.scale(c(-1.0));
        push(format!("primitive of B(z/{r0:.4})"), derivative.antiderivative());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem5Report {
    #[serde(rename = "R")]
    pub big_r: f64,
    pub bound: f64,
    pub best_ratio: f64,
    pub best_label: String,
    pub gap: f64,
    pub ratios: Vec<(String, f64)>,
}

/// `sup_r (1-r^2) |(M_R f)'| / sup_r (1-r^2) |f'|` where
/// `M_R f = sum |a_n| R^n z^n`. The numerator includes the truncation bound,
/// the denominator is a grid maximum, so the ratio is never underestimated
/// by truncation.
pub fn theorem5_ratio(f: &TruncatedSeries, big_r: f64, radial: &GridSpec, scanner: &CircleScanner) -> Result<f64> {
    if !(big_r > 0.0 && big_r < 1.0) {
        return Err(Error::Domain(format!("R must lie in (0, 1), got {big_r}")));
    }
    let d = f.derivative();
    let den = weighted_radial_sup(&SeriesOnCircle { series: &d, scanner: scanner.clone() }, &Standard, radial)?.value;
    if !(den > 0.0) {
        return Err(Error::Precondition("probe function has zero Bloch seminorm".into()));
    }
    let scaled = d.majorant().scale_argument(big_r)?;
    let num = big_r * weighted_radial_sup(&RadialMajorant { series: &scaled }, &Standard, radial)?.value;
    Ok(num / den)
}

/// `R/sqrt(1-R^2)` minus the largest probe ratio; positive values are
/// consistent with the strict inequality `m_B(R) < R/sqrt(1-R^2)`.
pub fn theorem5_gap(
    big_r: f64,
    family: &[ProbeFunction],
    radial: &GridSpec,
    scanner: &CircleScanner,
) -> Result<Theorem5Report> {
    let bound = cauchy_multiplier(big_r);
    let mut ratios = Vec::with_capacity(family.len());
    for p in family {
        ratios.push((p.label.clone(), theorem5_ratio(&p.series, big_r, radial, scanner)?));
    }
    let (best_label, best_ratio) =
        ratios
            .iter()
            .fold((String::new(), f64::NEG_INFINITY), |acc, (l, v)| if *v > acc.1 { (l.clone(), *v) } else { acc });
    Ok(Theorem5Report { big_r, bound, best_ratio, best_label, gap: bound - best_ratio, ratios })
}

pub fn default_theorem5_radial() -> GridSpec {
    GridSpec::new(0.0, RADIAL_MAX, 1024)
}

/// A random polynomial of degree at most `max_degree` with complex
/// coefficients in the unit square.
pub fn random_polynomial<G: Rng>(rng: &mut G, max_degree: usize) -> TruncatedSeries {
    let degree = rng.gen_range(0..=max_degree);
    let coeffs = (0..=degree).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    TruncatedSeries::polynomial(coeffs).expect("finite coefficients")
}

/// A random builtin weight with admissible parameters.
pub fn random_weight<G: Rng>(rng: &mut G) -> Box<dyn Weight> {
    use crate::weights::{Constant, FlatThenPower, PseudoHyperbolicPower};
    let r0 = rng.gen_range(FRAC_1_SQRT_2..0.99);
    let alpha = rng.gen_range(1.0..4.0);
    match rng.gen_range(0..4) {
        0 => Box::new(Standard),
        1 => Box::new(Constant),
        2 => Box::new(FlatThenPower::new(r0, alpha).expect("valid parameters")),
        _ => Box::new(PseudoHyperbolicPower::new(r0, alpha).expect("valid parameters")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn residual_brackets_the_root() {
        let s = 0.333771;
        assert!(theorem1_residual(0.01, s) > 0.0);
        assert!(theorem1_residual(0.99, s) < 0.0);
    }

    #[test]
    fn root_examples() {
        let cfg = SolverConfig::default();
        let r = theorem1_root(0.333771, &cfg).unwrap();
        assert!((r - 0.563777).abs() < 1e-5, "{r}");
        assert!(theorem1_residual(r, 0.333771).abs() <= cfg.abs_tol);
        // s = 1/2 reduces to 1 - r + r log(1 - r) = 0
        let r = theorem1_root(0.5, &cfg).unwrap();
        assert!((1.0 - r + r * (1.0 - r).ln()).abs() < 1e-12);
        assert!((r - 0.55356).abs() < 1e-4);
        assert!(theorem1_root(1.5, &cfg).is_err());
        assert!(theorem1_root(0.0, &cfg).is_err());
    }

    #[test]
    fn chain_at_the_critical_radius() {
        assert!((cauchy_multiplier(FRAC_1_SQRT_2) - 1.0).abs() < 1e-15);
        let k = TruncatedSeries::real_polynomial(&[0.7]).unwrap();
        let v = cauchy_chain_check(&k, &Standard, 0.6, 0.5).unwrap();
        assert!((v.l2 - v.sup).abs() < 1e-15);
        assert!(v.majorant < v.l2);
    }

    #[test]
    fn coefficient_bound_examples() {
        let z = TruncatedSeries::real_polynomial(&[0.0, 1.0]).unwrap();
        let zero = TruncatedSeries::real_polynomial(&[0.0]).unwrap();
        for r in [0.1, 0.5, 0.9] {
            assert!(bloch_coefficient_bound_check(&z, r).unwrap() > 0.0);
            let bound = r * r / (1.0 - r * r).powi(2);
            assert_eq!(bloch_coefficient_bound_check(&zero, r).unwrap(), bound);
        }
    }

    #[test]
    fn ak_expression_limits() {
        assert_eq!(theorem4_expression(0.35, 0.769, 1.0).unwrap(), 0.0);
        assert!(theorem4_expression(0.6, 0.7, 0.5).is_err());
        let g = GridSpec::radial(2048);
        assert!(theorem4_scan(0.35, 0.769, &g).unwrap().exceeded_threshold);
        assert!(!theorem4_scan(0.35, FRAC_1_SQRT_2, &g).unwrap().exceeded_threshold);
    }

    #[test]
    fn bombieri_examples() {
        assert!((bombieri_m_infty(FRAC_1_SQRT_2).unwrap() - SQRT_2).abs() < 4.0 * f64::EPSILON);
        assert!((bombieri_m_infty(1.0 / 3.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((bombieri_m_infty(0.5).unwrap() - 1.1010205).abs() < 1e-7);
        assert!(bombieri_m_infty(0.3).is_err());
        assert!(bombieri_m_infty(0.75).is_err());
    }

    #[test]
    fn mobius_family_examples() {
        let g = default_mobius_grid();
        for r in [0.35, 0.5, 0.6, FRAC_1_SQRT_2] {
            let m = mobius_majorant_sup(r, &g).unwrap();
            assert!((m.value - bombieri_m_infty(r).unwrap()).abs() < 1e-6);
        }
        let m = mobius_majorant_sup(1.0 / 3.0, &g).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
        for r in [0.1, 0.4, 0.8, 0.95] {
            assert!(mobius_majorant_sup(r, &g).unwrap().value <= cauchy_bound(r));
        }
    }

    #[test]
    fn probe_ratio_of_identity() {
        let z = TruncatedSeries::real_polynomial(&[0.0, 1.0]).unwrap();
        let scan = CircleScanner::new(GridSpec::angle(256));
        for big_r in [0.3, 0.9] {
            let ratio = theorem5_ratio(&z, big_r, &GridSpec::radial(256), &scan).unwrap();
            assert!((ratio - big_r).abs() < 1e-12);
            let twice =
                theorem5_ratio(&z.scale(Complex64::new(2.5, 0.0)), big_r, &GridSpec::radial(256), &scan).unwrap();
            assert!((ratio - twice).abs() < 1e-12);
        }
        let one = TruncatedSeries::real_polynomial(&[1.0]).unwrap();
        assert!(theorem5_ratio(&one, 0.5, &GridSpec::radial(16), &scan).is_err());
    }
}
