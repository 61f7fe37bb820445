//! Truncated Maclaurin series with certified geometric tails.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, DEFAULT_ANGLE_POINTS};
use crate::solve::{grid_max, Extremum};

pub const DEFAULT_ORDER: usize = 256;

/// Radius beyond which an evaluation needs a certified tail.
pub const CERTIFIED_RADIUS: f64 = 0.9;

/// `|a_n| <= m * rho^n` for every index past the stored coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub rho: f64,
    #[serde(rename = "M")]
    pub m: f64,
}

impl TailBound {
    /// The tail of a polynomial: every omitted coefficient is zero.
    pub const EXACT: TailBound = TailBound { rho: 0.0, m: 0.0 };

    pub fn new(rho: f64, m: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) || !(m >= 0.0) || !m.is_finite() {
            return Err(Error::Invalid(format!("tail bound needs 0 <= rho < 1 and M >= 0, got rho = {rho}, M = {m}")));
        }
        Ok(Self { rho, m })
    }
}

/// Finds a geometric certificate for coefficients bounded by `bound(n)` when
/// `n > order`.
///
/// `bound(n) / q^n` must grow at most polynomially and the successive ratio
/// `bound(n + 1) / bound(n)` must be non-increasing past `order`. The returned
/// ratio sits slightly above `q`.
pub fn certify_tail<B>(bound: B, q: f64, order: usize) -> Option<TailBound>
where
    B: Fn(usize) -> f64,
{
    if q == 0.0 {
        return Some(TailBound::EXACT);
    }
    if !(0.0..1.0).contains(&q) {
        return None;
    }
    let rho = (q * (1.0 + 4.0 / (order as f64 + 1.0))).min(0.5 * (1.0 + q));
    let ln_rho = rho.ln();
    let mut ln_m = f64::NEG_INFINITY;
    let mut prev = bound(order + 1);
    let mut settled = false;
    // at most a few thousand steps for the polynomial-times-geometric bounds used here
    for n in (order + 1..).take(1_000_000) {
        if prev > 0.0 {
            ln_m = ln_m.max(prev.ln() - n as f64 * ln_rho);
        }
        let next = bound(n + 1);
        if prev > 0.0 && next <= rho * prev {
            settled = true;
            break;
        }
        prev = next;
    }
    if !settled && prev > 0.0 {
        return None;
    }
    let m = if ln_m == f64::NEG_INFINITY { 0.0 } else { ln_m.exp() };
    m.is_finite().then_some(TailBound { rho, m })
}

/// A value returned by [`TruncatedSeries::eval`]. `error_bound` is `None` when
/// the truncation error is not certified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub error_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleNorms {
    pub r: f64,
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub coeff_sum: f64,
    /// Angle at which `sup_norm` is attained.
    pub sup_theta: f64,
    /// Truncation bound shared by all three norms; `None` if uncertified.
    pub error_bound: Option<f64>,
}

/// Coefficients `a_0..a_N` of a power series plus an optional tail bound.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesWire", into = "SeriesWire")]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
    tail: Option<TailBound>,
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    coeffs: Vec<[f64; 2]>,
    tail: Option<TailBound>,
}

impl TryFrom<SeriesWire> for TruncatedSeries {
    type Error = Error;

    fn try_from(w: SeriesWire) -> Result<Self> {
        let coeffs = w.coeffs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        let tail = w.tail.map(|t| TailBound::new(t.rho, t.m)).transpose()?;
        TruncatedSeries::new(coeffs, tail)
    }
}

impl From<TruncatedSeries> for SeriesWire {
    fn from(s: TruncatedSeries) -> Self {
        SeriesWire { coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(), tail: s.tail }
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedSeries")
            .field("order", &self.order())
            .field("head", &&self.coeffs[..self.coeffs.len().min(4)])
            .field("tail", &self.tail)
            .finish()
    }
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<Complex64>, tail: Option<TailBound>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Invalid("series coefficients must be finite".into()));
        }
        if let Some(t) = tail {
            TailBound::new(t.rho, t.m)?;
        }
        Ok(Self { coeffs, tail })
    }

    /// A polynomial: the omitted coefficients are exactly zero.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(coeffs, Some(TailBound::EXACT))
    }

    pub fn real_polynomial(coeffs: &[f64]) -> Result<Self> {
        Self::polynomial(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn tail(&self) -> Option<TailBound> {
        self.tail
    }

    /// Truncation order `N` (index of the last stored coefficient).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn majorant(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| Complex64::new(c.norm(), 0.0)).collect(), tail: self.tail }
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            let tail = match self.tail {
                Some(t) if t.m == 0.0 => Some(TailBound::EXACT),
                _ => None,
            };
            return Self { coeffs: vec![Complex64::new(0.0, 0.0)], tail };
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
        let tail = self.tail.and_then(|t| {
            if t.m == 0.0 || t.rho == 0.0 {
                Some(TailBound::EXACT)
            } else {
                certify_tail(|k| (k + 1) as f64 * t.m * t.rho.powi(k as i32 + 1), t.rho, n - 1)
            }
        });
        Self { coeffs, tail }
    }

    /// `f(z) -> f(scale * z)`.
    pub fn scale_argument(&self, scale: f64) -> Result<Self> {
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(Error::Domain(format!("argument scale must be >= 0, got {scale}")));
        }
        let mut p = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * p;
                p *= scale;
                out
            })
            .collect();
        let tail = self.tail.and_then(|t| {
            let rho = t.rho * scale;
            (rho < 1.0).then_some(TailBound { rho, m: t.m })
        });
        Ok(Self { coeffs, tail })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            tail: self.tail.map(|t| TailBound { rho: t.rho, m: t.m * c.norm() }),
        }
    }

    /// Cauchy product.
    ///
    /// Two polynomials multiply exactly. Otherwise the result keeps the longer
    /// truncation order and its tail is certified from `|c_n| <= (n+1) G_a G_b rho^n`.
    pub fn mul(&self, other: &Self) -> Self {
        let both_exact = matches!((self.tail, other.tail), (Some(a), Some(b)) if a.m == 0.0 && b.m == 0.0);
        let len = if both_exact {
            self.coeffs.len() + other.coeffs.len() - 1
        } else {
            self.coeffs.len().max(other.coeffs.len())
        };
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j < len {
                    coeffs[i + j] += a * b;
                }
            }
        }
        let tail = if both_exact {
            Some(TailBound::EXACT)
        } else {
            match (self.tail, other.tail) {
                (Some(ta), Some(tb)) => {
                    let rho = ta.rho.max(tb.rho);
                    match (self.global_constant(rho), other.global_constant(rho)) {
                        (Some(ga), Some(gb)) if rho > 0.0 => {
                            certify_tail(|n| (n + 1) as f64 * ga * gb * rho.powi(n as i32), rho, len - 1)
                        }
                        _ => None,
                    }
                }
                _ => None,
            }
        };
        Self { coeffs, tail }
    }

    /// `G` with `|a_k| <= G rho^k` for every `k`, given `rho >= tail.rho`.
    fn global_constant(&self, rho: f64) -> Option<f64> {
        let t = self.tail?;
        let mut g = if t.m > 0.0 { t.m } else { 0.0 };
        let mut p = 1.0;
        for c in &self.coeffs {
            if c.norm() > 0.0 {
                if p == 0.0 {
                    return None;
                }
                g = g.max(c.norm() / p);
            }
            p *= rho;
        }
        Some(g)
    }

    /// `(alpha - t z) / (1 - conj(alpha) t z)` for `|alpha| < 1`, `t >= 0`.
    /// The pole must lie outside the closed unit disc: `|alpha| t < 1`.
    pub fn disc_automorphism(alpha: Complex64, dilation: f64, order: usize) -> Result<Self> {
        let m = alpha.norm();
        if !(m < 1.0) || !(dilation >= 0.0) || !(m * dilation < 1.0) {
            return Err(Error::Domain(format!("need |alpha| < 1, t >= 0 and |alpha| t < 1, got {alpha}, {dilation}")));
        }
        let scale = 1.0 - m * m;
        let step = alpha.conj() * dilation;
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(alpha);
        let mut term = Complex64::new(-scale * dilation, 0.0);
        for _ in 1..=order {
            coeffs.push(term);
            term *= step;
        }
        let rho = m * dilation;
        let tail = if m == 0.0 {
            (order >= 1 || dilation == 0.0).then_some(TailBound::EXACT)
        } else if rho == 0.0 {
            Some(TailBound::EXACT)
        } else {
            Some(TailBound { rho, m: scale / m })
        };
        Self::new(coeffs, tail)
    }

    /// The primitive vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend(self.coeffs.iter().enumerate().map(|(n, c)| c / (n + 1) as f64));
        let tail = self.tail.map(|t| {
            if t.m == 0.0 || t.rho == 0.0 {
                TailBound::EXACT
            } else {
                TailBound { rho: t.rho, m: t.m / t.rho }
            }
        });
        Self { coeffs, tail }
    }

    /// Horner sum of the stored coefficients, no region checks.
    pub fn partial_sum(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `sum |a_n| r^n` over the stored coefficients.
    pub fn majorant_sum(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Truncation error bound at modulus `radius`, or the reason there is none.
    pub fn truncation_bound(&self, radius: f64) -> Result<Option<f64>> {
        match self.tail {
            Some(t) => {
                let x = t.rho * radius;
                if x >= 1.0 {
                    return Err(Error::Divergence(x));
                }
                if t.m == 0.0 {
                    return Ok(Some(0.0));
                }
                Ok(Some(t.m * x.powi(self.coeffs.len() as i32) / (1.0 - x)))
            }
            None if radius > 1.0 => Err(Error::Divergence(radius)),
            None if radius > CERTIFIED_RADIUS => Err(Error::Uncertified(radius)),
            None => Ok(None),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Evaluation> {
        let error_bound = self.truncation_bound(z.norm())?;
        Ok(Evaluation { value: self.partial_sum(z), error_bound })
    }

    /// `sqrt(sum |a_n|^2 r^(2n))`, the L2 norm over the circle of radius `r`.
    pub fn l2_norm(&self, r: f64) -> f64 {
        let r2 = r * r;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r2 + c.norm_sqr()).sqrt()
    }

    pub fn circle_norms(&self, r: f64, grid: &GridSpec) -> Result<CircleNorms> {
        CircleScanner::new(*grid).norms(self, r)
    }
}

/// Angle scans of `|f(r e^{i theta})|`.
///
/// On the standard periodic grid the samples come from one inverse FFT of the
/// coefficients; any other grid falls back to Horner evaluation.
#[derive(Clone)]
pub struct CircleScanner {
    grid: GridSpec,
    fft: Option<Arc<dyn Fft<f64>>>,
}

impl fmt::Debug for CircleScanner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircleScanner").field("grid", &self.grid).field("fft", &self.fft.is_some()).finish()
    }
}

impl Default for CircleScanner {
    fn default() -> Self {
        Self::new(GridSpec::angle(DEFAULT_ANGLE_POINTS))
    }
}

impl CircleScanner {
    pub fn new(grid: GridSpec) -> Self {
        let full_turn = grid.periodic && grid.lo == 0.0 && (grid.hi - 2.0 * PI).abs() < 1e-15;
        let fft = full_turn.then(|| FftPlanner::new().plan_fft_inverse(grid.points));
        Self { grid, fft }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Maximum of `|f|` on the circle of radius `r`, with its angle.
    pub fn sup(&self, s: &TruncatedSeries, r: f64) -> Result<Extremum> {
        s.truncation_bound(r)?;
        let z = |t: f64| Complex64::from_polar(r, t);
        let Some(fft) = &self.fft else {
            return grid_max(|t| Ok(s.partial_sum(z(t)).norm()), &self.grid);
        };

        let m = self.grid.points;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut p = 1.0;
        for (n, c) in s.coeffs().iter().enumerate() {
            buf[n % m] += c * p;
            p *= r;
        }
        fft.process(&mut buf);

        let mut best_i = 0;
        let mut best = buf[0].norm();
        for (i, v) in buf.iter().enumerate().skip(1) {
            let v = v.norm();
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let mut out = Extremum { x: self.grid.point(best_i), value: best };
        if let Some(tol) = self.grid.refine_tol {
            let h = self.grid.step();
            let refined = crate::solve::golden_max(|t| Ok(s.partial_sum(z(t)).norm()), out.x - h, out.x + h, tol, 400)?;
            if refined.value > out.value {
                out = Extremum { x: refined.x.rem_euclid(2.0 * PI), value: refined.value };
            }
        }
        Ok(out)
    }

    pub fn norms(&self, s: &TruncatedSeries, r: f64) -> Result<CircleNorms> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
        }
        let error_bound = s.truncation_bound(r)?;
        let sup = self.sup(s, r)?;
        Ok(CircleNorms {
            r,
            sup_norm: sup.value,
            l2_norm: s.l2_norm(r),
            coeff_sum: s.majorant_sum(r),
            sup_theta: sup.x,
            error_bound,
        })
    }
}
