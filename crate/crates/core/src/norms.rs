//! Weighted Bloch norms and radial suprema `sup_r omega(r) max_theta |f(r e^{i theta})|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::series::{certify_tail, CircleScanner, TruncatedSeries};
use crate::solve::{grid_max, Extremum};
use crate::weights::Weight;

/// `3 sqrt(3) / 2`, the normalizer making the Avkhadiev–Kayumov function a unit
/// for `sup (1 - |z|^2) |f(z)|`.
pub const AK_SCALE: f64 = 2.598_076_211_353_316;

/// Upper end (exclusive) of the parameter range with positive coefficients.
pub const AK_A_MAX: f64 = 0.577_350_269_189_625_8;

/// Maximum of `|f|` over a circle of radius `r`, as `(theta, value)`.
pub trait CircleSup {
    fn circle_sup(&self, r: f64) -> Result<Extremum>;
}

/// A truncated series scanned over the angle grid.
#[derive(Debug, Clone)]
pub struct SeriesOnCircle<'a> {
    pub series: &'a TruncatedSeries,
    pub scanner: CircleScanner,
}

impl<'a> SeriesOnCircle<'a> {
    pub fn new(series: &'a TruncatedSeries, angle: GridSpec) -> Self {
        Self { series, scanner: CircleScanner::new(angle) }
    }
}

impl CircleSup for SeriesOnCircle<'_> {
    fn circle_sup(&self, r: f64) -> Result<Extremum> {
        self.scanner.sup(self.series, r)
    }
}

/// A closed-form function scanned over the angle grid.
pub struct ClosedFormOnCircle<F> {
    pub f: F,
    pub angle: GridSpec,
}

impl<F> CircleSup for ClosedFormOnCircle<F>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    fn circle_sup(&self, r: f64) -> Result<Extremum> {
        grid_max(|t| Ok((self.f)(Complex64::from_polar(r, t))?.norm()), &self.angle)
    }
}

/// The majorant series of `series`; its circle maximum sits at `theta = 0`.
///
/// The value includes the truncation bound, so it never underestimates the
/// full majorant sum.
#[derive(Debug, Clone, Copy)]
pub struct RadialMajorant<'a> {
    pub series: &'a TruncatedSeries,
}

impl CircleSup for RadialMajorant<'_> {
    fn circle_sup(&self, r: f64) -> Result<Extremum> {
        let tail = self.series.truncation_bound(r)?.unwrap_or(0.0);
        Ok(Extremum { x: 0.0, value: self.series.majorant_sum(r) + tail })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSupReport {
    pub value: f64,
    pub witness_r: f64,
    pub witness_theta: f64,
    pub grid: GridSpec,
}

/// `sup_r omega(r) * max_theta |f(r e^{i theta})|` over the radial grid, with
/// golden-section refinement around the best radius. Ties report the
/// smallest radius.
pub fn weighted_radial_sup(f: &dyn CircleSup, w: &dyn Weight, grid: &GridSpec) -> Result<RadialSupReport> {
    let best = grid_max(|r| Ok(w.eval(r) * f.circle_sup(r)?.value), grid)?;
    let theta = f.circle_sup(best.x)?.x;
    Ok(RadialSupReport { value: best.value, witness_r: best.x, witness_theta: theta, grid: *grid })
}

/// `|a_0| + sup_z omega(|z|) |f'(z)|`.
pub fn weighted_bloch_norm(s: &TruncatedSeries, w: &dyn Weight, radial: &GridSpec) -> Result<f64> {
    weighted_bloch_norm_with(s, w, radial, &CircleScanner::default())
}

pub fn weighted_bloch_norm_with(
    s: &TruncatedSeries,
    w: &dyn Weight,
    radial: &GridSpec,
    scanner: &CircleScanner,
) -> Result<f64> {
    let d = s.derivative();
    let on_circle = SeriesOnCircle { series: &d, scanner: scanner.clone() };
    let sup = weighted_radial_sup(&on_circle, w, radial)?;
    Ok(s.coeffs()[0].norm() + sup.value)
}

fn check_ak_param(a: f64) -> Result<()> {
    if !(a > 0.0 && a < AK_A_MAX) {
        return Err(Error::Domain(format!("a must lie in (0, 1/sqrt(3)), got {a}")));
    }
    Ok(())
}

/// `(3 sqrt3 / 2) (1 - a^2) (z - a) / (1 - a z)^3`.
pub fn avkhadiev_eval(a: f64, z: Complex64) -> Result<Complex64> {
    check_ak_param(a)?;
    let den = Complex64::new(1.0, 0.0) - a * z;
    if den.norm() < 1e-14 {
        return Err(Error::Pole(format!("{z}")));
    }
    Ok(AK_SCALE * (1.0 - a * a) * (z - a) / (den * den * den))
}

/// Coefficients of the Avkhadiev–Kayumov function for `0 < a < 1/sqrt(3)`.
///
/// With `t = a^2/(1 - a^2)` and `b_n = (n + 1)(n/2 - t)`, the function equals
/// `C(a) sum b_n (a z)^n` where `C(a) = (3 sqrt3 / 2)(1 - a^2)^2 / a`; this
/// normalizer reproduces `a_0 = -(3 sqrt3 / 2) a (1 - a^2)`.
pub fn avkhadiev_coefficients(a: f64, order: usize) -> Result<TruncatedSeries> {
    check_ak_param(a)?;
    avkhadiev_coefficients_unchecked(a, order)
}

/// As [`avkhadiev_coefficients`] but accepts any `0 < a < 1`, where the
/// coefficient signs are no longer guaranteed.
pub fn avkhadiev_coefficients_unchecked(a: f64, order: usize) -> Result<TruncatedSeries> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("a must lie in (0, 1), got {a}")));
    }
    let t = a * a / (1.0 - a * a);
    let c = AK_SCALE * (1.0 - a * a).powi(2) / a;
    let mut p = 1.0;
    let coeffs = (0..=order)
        .map(|n| {
            let nf = n as f64;
            let v = c * (nf + 1.0) * (nf / 2.0 - t) * p;
            p *= a;
            Complex64::new(v, 0.0)
        })
        .collect();
    let tail = certify_tail(|n| c * (n as f64 + 1.0) * (n as f64 / 2.0 + t) * a.powi(n as i32), a, order);
    TruncatedSeries::new(coeffs, tail)
}

/// True when `a_0 < 0` and `a_n > 0` for every stored `n >= 1`.
pub fn has_ak_sign_pattern(s: &TruncatedSeries) -> bool {
    let c = s.coeffs();
    c[0].re < 0.0 && c[1..].iter().all(|x| x.re > 0.0)
}

/// `sum |a_n| z^n = (3 sqrt3 (1 - a^2) / 2) ((z - a)/(1 - a z)^3 + 2a)` for
/// `0 <= a < 1/sqrt(3)` and `z >= 0`.
pub fn avkhadiev_majorant_closed_form(a: f64, z: f64) -> Result<f64> {
    if !(0.0..AK_A_MAX).contains(&a) {
        return Err(Error::Domain(format!("a must lie in [0, 1/sqrt(3)), got {a}")));
    }
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("majorant argument must be >= 0, got {z}")));
    }
    let den = 1.0 - a * z;
    if den.abs() < 1e-14 {
        return Err(Error::Pole(format!("{z}")));
    }
    Ok(AK_SCALE * (1.0 - a * a) * ((z - a) / (den * den * den) + 2.0 * a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{Constant, Standard};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constants() {
        assert_eq!(AK_SCALE, 3.0 * 3f64.sqrt() / 2.0);
        assert!((AK_A_MAX - 1.0 / 3f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn bloch_norm_examples() {
        let g = GridSpec::radial(512);
        let k = TruncatedSeries::polynomial(vec![Complex64::new(0.6, 0.8)]).unwrap();
        assert!((weighted_bloch_norm(&k, &Standard, &g).unwrap() - 1.0).abs() < 1e-15);

        let z = TruncatedSeries::real_polynomial(&[0.0, 1.0]).unwrap();
        assert!((weighted_bloch_norm(&z, &Standard, &g).unwrap() - 1.0).abs() < 1e-15);

        // calculus oracle: max of 2r(1 - r^2) is 4/(3 sqrt3) at r = 1/sqrt3
        let z2 = TruncatedSeries::real_polynomial(&[0.0, 0.0, 1.0]).unwrap();
        let v = weighted_bloch_norm(&z2, &Standard, &g).unwrap();
        assert!((v - 4.0 / (3.0 * 3f64.sqrt())).abs() < 1e-12, "{v}");
        assert!((v - 0.7698004).abs() < 1e-7);
    }

    #[test]
    fn radial_sup_trivial() {
        let one = TruncatedSeries::real_polynomial(&[1.0]).unwrap();
        let on = SeriesOnCircle::new(&one, GridSpec::angle(64));
        let rep = weighted_radial_sup(&on, &Constant, &GridSpec::radial(64)).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-15);
        assert_eq!(rep.witness_r, 0.0);
    }

    #[test]
    fn avkhadiev_eval_examples() {
        let a = 0.35;
        assert_eq!(avkhadiev_eval(a, c(a)).unwrap(), c(0.0));
        let z0 = avkhadiev_eval(a, c(0.0)).unwrap();
        assert!((z0.re + AK_SCALE * a * (1.0 - a * a)).abs() < 1e-15);
        assert!(avkhadiev_eval(0.6, c(0.0)).is_err());
        assert!(avkhadiev_eval(0.0, c(0.0)).is_err());
    }

    #[test]
    fn coefficients_match_closed_form() {
        let a = 0.35;
        let s = avkhadiev_coefficients(a, 256).unwrap();
        assert!((s.coeffs()[0].re + AK_SCALE * a * (1.0 - a * a)).abs() < 1e-15);
        assert!(has_ak_sign_pattern(&s));
        let e = s.eval(c(0.5)).unwrap();
        let direct = avkhadiev_eval(a, c(0.5)).unwrap();
        assert!((e.value - direct).norm() < 1e-10);
        assert!(e.error_bound.unwrap() < 1e-12);

        let m = avkhadiev_majorant_closed_form(a, 0.5).unwrap();
        assert!((m - s.majorant_sum(0.5)).abs() < 1e-10);
    }

    #[test]
    fn first_coefficient_sign_flips_at_threshold() {
        // b_1 = 2(1/2 - t) > 0 iff t < 1/2 iff a < 1/sqrt3
        let below = avkhadiev_coefficients_unchecked(AK_A_MAX - 1e-6, 4).unwrap();
        assert!(below.coeffs()[1].re > 0.0);
        let above = avkhadiev_coefficients_unchecked(AK_A_MAX + 1e-6, 4).unwrap();
        assert!(above.coeffs()[1].re < 0.0);
        assert!(avkhadiev_coefficients(0.6, 8).is_err());
    }

    #[test]
    fn majorant_closed_form_limits() {
        let a = 0.2;
        let at0 = avkhadiev_majorant_closed_form(a, 0.0).unwrap();
        assert!((at0 - AK_SCALE * (1.0 - a * a) * a).abs() < 1e-15);
        assert!((avkhadiev_majorant_closed_form(0.0, 0.4).unwrap() - AK_SCALE * 0.4).abs() < 1e-15);
        assert!(avkhadiev_majorant_closed_form(0.5, -0.1).is_err());
    }
}
