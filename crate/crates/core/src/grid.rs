//! Sampling plans for radius, angle and parameter scans.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest radius sampled on radial scans; the weights live on `[0, 1)`.
pub const RADIAL_MAX: f64 = 1.0 - 1e-6;

pub const DEFAULT_ANGLE_POINTS: usize = 4096;
pub const DEFAULT_RADIAL_POINTS: usize = 2048;
pub const DEFAULT_CRITERION_POINTS: usize = 10_000;
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;

/// A uniform sampling plan on `[lo, hi]` followed by local refinement of the
/// best sample.
///
/// Periodic grids exclude `hi` (it coincides with `lo`) and let the refinement
/// bracket wrap around.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub periodic: bool,
    /// Absolute tolerance of the refinement step; `None` disables refinement.
    pub refine_tol: Option<f64>,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points: points.max(2), periodic: false, refine_tol: Some(DEFAULT_REFINE_TOL) }
    }

    pub fn angle(points: usize) -> Self {
        Self { lo: 0.0, hi: 2.0 * PI, points: points.max(4), periodic: true, refine_tol: Some(DEFAULT_REFINE_TOL) }
    }

    pub fn radial(points: usize) -> Self {
        Self::new(0.0, RADIAL_MAX, points)
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine_tol = None;
        self
    }

    pub fn with_refine_tol(mut self, tol: f64) -> Self {
        self.refine_tol = Some(tol);
        self
    }

    pub fn step(&self) -> f64 {
        if self.periodic {
            (self.hi - self.lo) / self.points as f64
        } else {
            (self.hi - self.lo) / (self.points - 1) as f64
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        if !self.periodic && i + 1 == self.points {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.point(i))
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::radial(DEFAULT_RADIAL_POINTS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        let g = GridSpec::new(0.0, 1.0, 11);
        assert_eq!(g.point(0), 0.0);
        assert_eq!(g.point(10), 1.0);
        assert!((g.step() - 0.1).abs() < 1e-15);
        assert_eq!(g.iter().count(), 11);

        let a = GridSpec::angle(8);
        assert!((a.point(7) - 7.0 * PI / 4.0).abs() < 1e-15);
        assert!(a.iter().all(|t| t < 2.0 * PI));
    }
}
