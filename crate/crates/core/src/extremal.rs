//! Extremal functions for the Bohr inequality at `R = 1/sqrt(2)`.
//!
//! For `r0` in `[1/sqrt2, 1]` and an angle `phi` the extremal is the Möbius map
//! `f(z) = (z/r0 - e^{i phi}/sqrt2) / (1 - e^{-i phi} z/(sqrt2 r0))`, a degree-one
//! Blaschke factor with zero of modulus `1/sqrt2` composed with `z / r0`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::series::{TailBound, TruncatedSeries, DEFAULT_ORDER};
use crate::solve::{grid_max, Extremum};
use crate::weights::{criterion_check, Weight};

/// Relative gap allowed between the two suprema of a sharp inequality.
pub const SHARPNESS_GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSpec {
    pub r0: f64,
    pub phi: f64,
    pub order: usize,
}

impl ExtremalSpec {
    pub fn new(r0: f64, phi: f64) -> Result<Self> {
        Self::with_order(r0, phi, DEFAULT_ORDER)
    }

    pub fn with_order(r0: f64, phi: f64, order: usize) -> Result<Self> {
        if !(FRAC_1_SQRT_2..=1.0).contains(&r0) {
            return Err(Error::Domain(format!("r0 must lie in [1/sqrt(2), 1], got {r0}")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain(format!("phi must be finite, got {phi}")));
        }
        Ok(Self { r0, phi: phi.rem_euclid(TAU), order })
    }
}

pub fn extremal_eval(spec: &ExtremalSpec, z: Complex64) -> Result<Complex64> {
    let u = Complex64::from_polar(1.0, spec.phi);
    let w = z / spec.r0;
    let den = Complex64::new(1.0, 0.0) - u.conj() * w * FRAC_1_SQRT_2;
    if den.norm() < 1e-14 {
        return Err(Error::Pole(format!("{z}")));
    }
    Ok((w - u * FRAC_1_SQRT_2) / den)
}

/// `a_0 = -e^{i phi}/sqrt2`, `a_n = e^{-i phi (n-1)} (1/2) (1/sqrt2)^(n-1) / r0^n`.
///
/// Moduli obey `|a_n| r0^n = (1/sqrt2)^(n+1)`, so the tail is exactly
/// geometric with ratio `1/(sqrt2 r0)`.
pub fn extremal_coefficients(spec: &ExtremalSpec) -> TruncatedSeries {
    let u = Complex64::from_polar(1.0, spec.phi);
    let step = u.conj() * (FRAC_1_SQRT_2 / spec.r0);
    let mut coeffs = Vec::with_capacity(spec.order + 1);
    coeffs.push(-u * FRAC_1_SQRT_2);
    let mut term = Complex64::new(0.5 / spec.r0, 0.0);
    for _ in 1..=spec.order {
        coeffs.push(term);
        term *= step;
    }
    let rho = FRAC_1_SQRT_2 / spec.r0;
    let tail = (rho < 1.0).then_some(TailBound { rho, m: FRAC_1_SQRT_2 });
    TruncatedSeries::new(coeffs, tail).expect("extremal coefficients are finite")
}

/// `|f(-r e^{i phi})| = (r/r0 + 1/sqrt2) / (1 + r/(sqrt2 r0))`.
///
/// This is `max_theta |f(r e^{i theta})|` for `r <= r0` only. Outside `r0`
/// the circle maximum moves to `theta = phi`; see [`extremal_max_modulus`].
pub fn extremal_sup_modulus(r0: f64, r: f64) -> f64 {
    let t = r / r0;
    (t + FRAC_1_SQRT_2) / (1.0 + t * FRAC_1_SQRT_2)
}

/// The true `max_theta |f(r e^{i theta})|` for `r < sqrt2 r0`: the
/// `theta = phi + pi` value inside `r0`, `(r/r0 - 1/sqrt2)/(1 - r/(sqrt2 r0))`
/// at `theta = phi` outside.
pub fn extremal_max_modulus(r0: f64, r: f64) -> Result<f64> {
    let t = r / r0;
    if t <= 1.0 {
        return Ok(extremal_sup_modulus(r0, r));
    }
    let den = 1.0 - t * FRAC_1_SQRT_2;
    if den <= 0.0 {
        return Err(Error::Pole(format!("r = {r} >= sqrt2 r0")));
    }
    Ok((t - FRAC_1_SQRT_2) / den)
}

/// `sum |a_n| (r/sqrt2)^n = (1/sqrt2) / (1 - r/(2 r0))`.
pub fn extremal_majorant_sum(r0: f64, r: f64) -> Result<f64> {
    let den = 1.0 - r / (2.0 * r0);
    if den <= 0.0 {
        return Err(Error::Pole(format!("r = {r} >= 2 r0")));
    }
    Ok(FRAC_1_SQRT_2 / den)
}

/// `sum n |a_n|^2 r0^(2n)`: the normalized area of the image of `f(r0 z)`,
/// which is the degree when `f(r0 z)` is a finite Blaschke product.
pub fn blaschke_degree(s: &TruncatedSeries, r0: f64) -> Result<f64> {
    if !(r0 > 0.0) {
        return Err(Error::Domain(format!("r0 must be positive, got {r0}")));
    }
    s.truncation_bound(r0)?;
    let r2 = r0 * r0;
    let mut p = 1.0;
    let mut sum = 0.0;
    for (n, c) in s.coeffs().iter().enumerate() {
        sum += n as f64 * c.norm_sqr() * p;
        p *= r2;
    }
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub weight: String,
    pub r0: f64,
    pub lhs_sup: f64,
    pub rhs_sup: f64,
    pub lhs_witness_r: f64,
    pub rhs_witness_r: f64,
    pub relative_gap: f64,
    pub grid_step: f64,
    pub passed: bool,
}

/// Radial supremum over `grid` and the extra point `r0`; ties keep the
/// smaller radius.
fn sup_with_anchor<F>(f: F, grid: &GridSpec, r0: f64) -> Result<Extremum>
where
    F: Fn(f64) -> Result<f64>,
{
    let scanned = grid_max(&f, grid)?;
    let anchor = Extremum { x: r0, value: f(r0)? };
    Ok(if anchor.value > scanned.value || (anchor.value == scanned.value && anchor.x < scanned.x) {
        anchor
    } else {
        scanned
    })
}

/// Checks that the extremal for `(r0, phi = 0)` turns the Bohr inequality at
/// `R = 1/sqrt2` into an equality under `w`.
///
/// Compares `sup_r (omega(r)/sqrt2) sum |a_n| (r/sqrt2)^n` with
/// `sup_r omega(r) max_theta |f(r e^{i theta})|`. At `r0 = 1` the weight's
/// one-sided limit is used.
pub fn verify_sharpness(
    w: &dyn Weight,
    r0: f64,
    criterion_grid: &GridSpec,
    radial: &GridSpec,
) -> Result<SharpnessReport> {
    let crit = criterion_check(w, r0, criterion_grid)?;
    if !crit.passed {
        return Err(Error::Precondition(format!(
            "weight {} violates the sharpness criterion at r0 = {r0} (witness r = {})",
            crit.weight,
            crit.violation_witness.unwrap_or(f64::NAN)
        )));
    }
    let lhs = sup_with_anchor(|r| Ok(w.value_at(r) / SQRT_2 * extremal_majorant_sum(r0, r)?), radial, r0)?;
    let rhs = sup_with_anchor(|r| Ok(w.value_at(r) * extremal_sup_modulus(r0, r)), radial, r0)?;

    let relative_gap = (lhs.value - rhs.value).abs() / lhs.value.max(rhs.value);
    let step = radial.step();
    let passed =
        relative_gap <= SHARPNESS_GAP_TOL && (lhs.x - r0).abs() <= 2.0 * step && (rhs.x - r0).abs() <= 2.0 * step;
    Ok(SharpnessReport {
        weight: w.token(),
        r0,
        lhs_sup: lhs.value,
        rhs_sup: rhs.value,
        lhs_witness_r: lhs.x,
        rhs_witness_r: rhs.x,
        relative_gap,
        grid_step: step,
        passed,
    })
}
