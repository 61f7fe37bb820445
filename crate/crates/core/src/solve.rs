//! Scalar root finding and one-dimensional maximization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub abs_tol: f64,
    pub max_iter: usize,
    pub bracket: (f64, f64),
}

impl SolverConfig {
    pub fn new(abs_tol: f64, max_iter: usize, bracket: (f64, f64)) -> Result<Self> {
        let cfg = Self { abs_tol, max_iter, bracket };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bracket;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("bracket requires lo < hi, got [{lo}, {hi}]")));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::Domain(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        Ok(())
    }

    pub fn with_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-13, max_iter: 400, bracket: (1e-6, 1.0 - 1e-6) }
    }
}

/// A sampled maximum: argument and value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

/// Bisection on `cfg.bracket`. The endpoints must bracket a sign change.
///
/// Stops once the half-width and the residual are both below `abs_tol`, or
/// when the bracket can no longer be split in floating point.
pub fn bisect<F>(mut f: F, cfg: &SolverConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    let (mut lo, mut hi) = cfg.bracket;
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.signum() * f_hi.signum() < 0.0) {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let lo_negative = f_lo < 0.0;

    for _ in 0..cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (0.5 * (hi - lo) <= cfg.abs_tol && fm.abs() <= cfg.abs_tol) {
            return Ok(mid);
        }
        if mid <= lo || mid >= hi {
            // bracket exhausted at machine resolution
            return if fm.abs() <= cfg.abs_tol { Ok(mid) } else { Err(Error::NotConverged(cfg.max_iter)) };
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NotConverged(cfg.max_iter))
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
///
/// Returns the best point evaluated, which for a unimodal `f` lies within
/// `tol` of the maximizer.
pub fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Result<Extremum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f2 > f1 { Extremum { x: x2, value: f2 } } else { Extremum { x: x1, value: f1 } };

    let mut iter = 0;
    while (b - a) > tol && iter < max_iter {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
            if f1 > best.value {
                best = Extremum { x: x1, value: f1 };
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
            if f2 > best.value {
                best = Extremum { x: x2, value: f2 };
            }
        }
        iter += 1;
    }
    Ok(best)
}

/// Ternary search for a maximum of `f` on `[a, b]`: each step discards one
/// outer third of the bracket.
pub fn trisect_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Result<Extremum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut best = Extremum { x: a, value: f64::NEG_INFINITY };
    let mut iter = 0;
    while (b - a) > tol && iter < max_iter {
        let third = (b - a) / 3.0;
        let m1 = a + third;
        let m2 = b - third;
        let f1 = f(m1)?;
        let f2 = f(m2)?;
        if f1 > best.value {
            best = Extremum { x: m1, value: f1 };
        }
        if f2 > best.value {
            best = Extremum { x: m2, value: f2 };
        }
        if f1 >= f2 {
            b = m2;
        } else {
            a = m1;
        }
        iter += 1;
    }
    Ok(best)
}

/// Which section search refines the best grid sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refiner {
    Golden,
    Trisection,
}

/// Scans `grid` for the maximum of `f` and refines around the best sample.
///
/// Ties go to the smallest grid argument. Refinement only replaces the grid
/// maximum when it finds a strictly larger value.
pub fn grid_max<F>(mut f: F, grid: &GridSpec) -> Result<Extremum>
where
    F: FnMut(f64) -> Result<f64>,
{
    grid_max_with(&mut f, grid, Refiner::Golden)
}

pub fn grid_max_with<F>(f: &mut F, grid: &GridSpec, refiner: Refiner) -> Result<Extremum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut best_i = 0;
    let mut best = Extremum { x: grid.point(0), value: f(grid.point(0))? };
    for i in 1..grid.points {
        let x = grid.point(i);
        let v = f(x)?;
        if v > best.value || (best.value.is_nan() && !v.is_nan()) {
            best = Extremum { x, value: v };
            best_i = i;
        }
    }
    let Some(tol) = grid.refine_tol else {
        return Ok(best);
    };

    let h = grid.step();
    let (a, b) = if grid.periodic {
        (best.x - h, best.x + h)
    } else {
        let a = if best_i == 0 { grid.lo } else { grid.point(best_i - 1) };
        let b = if best_i + 1 == grid.points { grid.hi } else { grid.point(best_i + 1) };
        (a, b)
    };
    let refined = match refiner {
        Refiner::Golden => golden_max(&mut *f, a, b, tol, 400)?,
        Refiner::Trisection => trisect_max(&mut *f, a, b, tol, 400)?,
    };
    if refined.value > best.value {
        let mut x = refined.x;
        if grid.periodic {
            let period = grid.hi - grid.lo;
            x = grid.lo + (x - grid.lo).rem_euclid(period);
        }
        best = Extremum { x, value: refined.value };
    }
    Ok(best)
}
