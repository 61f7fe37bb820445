//! Radial weights, the sharpness criterion for `R = 1/sqrt(2)`, and the
//! profile `h(r)` bounding admissible weight ratios.
//!
//! Weights are trait objects created through a [`WeightRegistry`] from tokens
//! such as `example2:r0=0.8,alpha=2`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decimal::parse_decimal;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, DEFAULT_CRITERION_POINTS};
use crate::solve::{grid_max_with, Refiner};

/// Pass threshold for criterion margins; equality in the criterion is admissible.
pub const CRITERION_TOL: f64 = 1e-12;

/// Behaviour of a weight as `r -> 1-`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitAtOne {
    Finite(f64),
    Infinite,
}

pub trait Weight: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    /// Value on `[0, 1)`.
    fn eval(&self, r: f64) -> f64;

    fn limit_at_one(&self) -> LimitAtOne;

    fn params(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }

    /// A radius where the weight is built to touch the criterion profile.
    fn r0_hint(&self) -> Option<f64> {
        None
    }

    /// `eval` on `[0, 1)`, the one-sided limit at `r >= 1`.
    fn value_at(&self, r: f64) -> f64 {
        if r < 1.0 {
            self.eval(r)
        } else {
            match self.limit_at_one() {
                LimitAtOne::Finite(v) => v,
                LimitAtOne::Infinite => f64::INFINITY,
            }
        }
    }

    fn token(&self) -> String {
        let params = self.params();
        if params.is_empty() {
            return self.name().to_string();
        }
        let kv: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}:{}", self.name(), kv.join(","))
    }
}

/// `1 - r^2`, the classical Bloch weight.
#[derive(Debug, Clone, Copy, Default)]
pub struct Standard;

impl Weight for Standard {
    fn name(&self) -> &'static str {
        "standard"
    }
    fn eval(&self, r: f64) -> f64 {
        1.0 - r * r
    }
    fn limit_at_one(&self) -> LimitAtOne {
        LimitAtOne::Finite(0.0)
    }
}

/// `omega = 1`; admissible with `r0 = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Constant;

impl Weight for Constant {
    fn name(&self) -> &'static str {
        "constant"
    }
    fn eval(&self, _r: f64) -> f64 {
        1.0
    }
    fn limit_at_one(&self) -> LimitAtOne {
        LimitAtOne::Finite(1.0)
    }
    fn r0_hint(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Flat up to `r0`, then `((1 - r) / (1 - r0))^alpha`.
#[derive(Debug, Clone, Copy)]
pub struct FlatThenPower {
    r0: f64,
    alpha: f64,
}

impl FlatThenPower {
    pub fn new(r0: f64, alpha: f64) -> Result<Self> {
        check_example_params(r0, alpha)?;
        Ok(Self { r0, alpha })
    }
}

impl Weight for FlatThenPower {
    fn name(&self) -> &'static str {
        "example2"
    }
    fn eval(&self, r: f64) -> f64 {
        if r <= self.r0 {
            1.0
        } else {
            ((1.0 - r) / (1.0 - self.r0)).powf(self.alpha)
        }
    }
    fn limit_at_one(&self) -> LimitAtOne {
        LimitAtOne::Finite(0.0)
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("r0", self.r0), ("alpha", self.alpha)]
    }
    fn r0_hint(&self) -> Option<f64> {
        Some(self.r0)
    }
}

/// `(1 - |(r - r0) / (1 - r0 r)|)^alpha`: one minus the pseudo-hyperbolic
/// distance to `r0`, raised to `alpha`.
#[derive(Debug, Clone, Copy)]
pub struct PseudoHyperbolicPower {
    r0: f64,
    alpha: f64,
}

impl PseudoHyperbolicPower {
    pub fn new(r0: f64, alpha: f64) -> Result<Self> {
        check_example_params(r0, alpha)?;
        Ok(Self { r0, alpha })
    }
}

impl Weight for PseudoHyperbolicPower {
    fn name(&self) -> &'static str {
        "example3"
    }
    fn eval(&self, r: f64) -> f64 {
        let d = ((r - self.r0) / (1.0 - self.r0 * r)).abs();
        (1.0 - d).max(0.0).powf(self.alpha)
    }
    fn limit_at_one(&self) -> LimitAtOne {
        LimitAtOne::Finite(0.0)
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("r0", self.r0), ("alpha", self.alpha)]
    }
    fn r0_hint(&self) -> Option<f64> {
        Some(self.r0)
    }
}

/// A weight multiplied by a positive constant.
#[derive(Debug)]
pub struct Scaled {
    inner: Box<dyn Weight>,
    factor: f64,
}

impl Scaled {
    pub fn new(inner: Box<dyn Weight>, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::Domain(format!("weight scale must be positive, got {factor}")));
        }
        Ok(Self { inner, factor })
    }
}

impl Weight for Scaled {
    fn name(&self) -> &'static str {
        self.inner.name()
    }
    fn eval(&self, r: f64) -> f64 {
        self.factor * self.inner.eval(r)
    }
    fn limit_at_one(&self) -> LimitAtOne {
        match self.inner.limit_at_one() {
            LimitAtOne::Finite(v) => LimitAtOne::Finite(self.factor * v),
            LimitAtOne::Infinite => LimitAtOne::Infinite,
        }
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        let mut p = self.inner.params();
        p.push(("scale", self.factor));
        p
    }
    fn r0_hint(&self) -> Option<f64> {
        self.inner.r0_hint()
    }
}

fn check_example_params(r0: f64, alpha: f64) -> Result<()> {
    if !(FRAC_1_SQRT_2..1.0).contains(&r0) {
        return Err(Error::Domain(format!("r0 must lie in [1/sqrt(2), 1), got {r0}")));
    }
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be >= 1, got {alpha}")));
    }
    Ok(())
}

/// Named real parameters for a weight factory. Factories must consume every
/// parameter; leftovers are rejected.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, f64>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    fn take(&mut self, key: &str) -> Result<f64> {
        self.0.remove(key).ok_or_else(|| Error::Invalid(format!("missing weight parameter {key:?}")))
    }

    fn finish(self) -> Result<()> {
        match self.0.keys().next() {
            Some(k) => Err(Error::Invalid(format!("unknown weight parameter {k:?}"))),
            None => Ok(()),
        }
    }
}

pub type WeightFactory = fn(Params) -> Result<Box<dyn Weight>>;

/// Weight constructors keyed by name.
#[derive(Clone, Default)]
pub struct WeightRegistry {
    factories: BTreeMap<&'static str, WeightFactory>,
}

impl fmt::Debug for WeightRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

impl WeightRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `standard`, `constant`, `example2`, `example3`.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register("standard", |p| {
            p.finish()?;
            Ok(Box::new(Standard))
        });
        reg.register("constant", |p| {
            p.finish()?;
            Ok(Box::new(Constant))
        });
        reg.register("example2", |mut p| {
            let w = FlatThenPower::new(p.take("r0")?, p.take("alpha")?)?;
            p.finish()?;
            Ok(Box::new(w))
        });
        reg.register("example3", |mut p| {
            let w = PseudoHyperbolicPower::new(p.take("r0")?, p.take("alpha")?)?;
            p.finish()?;
            Ok(Box::new(w))
        });
        reg
    }

    pub fn register(&mut self, name: &'static str, factory: WeightFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn create(&self, kind: &str, params: Params) -> Result<Box<dyn Weight>> {
        let factory = self.factories.get(kind).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::Invalid(format!("unknown weight {kind:?}; known: {}", known.join(", ")))
        })?;
        factory(params)
    }

    /// Parses `kind` or `kind:key=value,key=value`.
    pub fn parse(&self, token: &str) -> Result<Box<dyn Weight>> {
        let (kind, rest) = match token.split_once(':') {
            Some((k, r)) => (k, Some(r)),
            None => (token, None),
        };
        let mut params = Params::new();
        for pair in rest.into_iter().flat_map(|r| r.split(',')) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("expected key=value in weight token, got {pair:?}")))?;
            let key = k.trim();
            if params.0.contains_key(key) {
                return Err(Error::Invalid(format!("duplicate weight parameter {key:?}")));
            }
            params = params.with(key, parse_decimal(v)?);
        }
        self.create(kind.trim(), params)
    }
}

pub fn builtin_weight(kind: &str, params: Params) -> Result<Box<dyn Weight>> {
    WeightRegistry::builtin().create(kind, params)
}

/// The two branches `(2 - r/r0, (sqrt2 r0 + r)/(sqrt2 r + r0))`.
pub fn criterion_branches(r: f64, r0: f64) -> (f64, f64) {
    let linear = 2.0 - r / r0;
    let mobius = (SQRT_2 * r0 + r) / (SQRT_2 * r + r0);
    (linear, mobius)
}

/// `h(r)`, the smaller of the two criterion branches.
pub fn criterion_bound(r: f64, r0: f64) -> f64 {
    let (a, b) = criterion_branches(r, r0);
    a.min(b)
}

fn check_r0(r0: f64) -> Result<()> {
    if !(FRAC_1_SQRT_2..=1.0).contains(&r0) {
        return Err(Error::Domain(format!("r0 must lie in [1/sqrt(2), 1], got {r0}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub weight: String,
    pub r0: f64,
    pub passed: bool,
    /// Minimum over the scan of `h(r) - omega(r)/omega(r0)`.
    pub worst_margin: f64,
    pub worst_r: f64,
    pub violation_witness: Option<f64>,
}

pub fn default_criterion_grid() -> GridSpec {
    GridSpec::radial(DEFAULT_CRITERION_POINTS)
}

/// Candidate `r0` values for [`find_admissible_r0`]: 50 points on `[1/sqrt(2), 1]`.
pub fn default_r0_grid() -> GridSpec {
    GridSpec::new(FRAC_1_SQRT_2, 1.0, 50).without_refinement()
}

pub fn criterion_check(w: &dyn Weight, r0: f64, grid: &GridSpec) -> Result<CriterionReport> {
    criterion_check_tol(w, r0, grid, CRITERION_TOL)
}

/// Scans `h(r) - omega(r)/omega(r0)` over `grid` and trisects around the
/// smallest margin. `r0` itself is always sampled; `r = 1` never is.
pub fn criterion_check_tol(w: &dyn Weight, r0: f64, grid: &GridSpec, tol: f64) -> Result<CriterionReport> {
    check_r0(r0)?;
    let denom = w.value_at(r0);
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::ZeroDenominator(r0));
    }
    let margin = |r: f64| criterion_bound(r, r0) - w.value_at(r) / denom;

    let mut neg_margin = |r: f64| Ok(-margin(r));
    let worst = grid_max_with(&mut neg_margin, grid, Refiner::Trisection)?;
    let (mut worst_r, mut worst_margin) = (worst.x, -worst.value);
    if r0 < 1.0 {
        let at_r0 = margin(r0);
        if at_r0 < worst_margin {
            worst_r = r0;
            worst_margin = at_r0;
        }
    }
    let passed = worst_margin >= -tol;
    Ok(CriterionReport {
        weight: w.token(),
        r0,
        passed,
        worst_margin,
        worst_r,
        violation_witness: (!passed).then_some(worst_r),
    })
}

/// Searches `r0_grid` (within `[1/sqrt(2), 1]`) plus the weight's own hint for
/// the first `r0` satisfying the criterion, then bisects between the last
/// failing and the first passing candidate.
///
/// Candidates where the weight vanishes count as failures.
pub fn find_admissible_r0(
    w: &dyn Weight,
    r0_grid: &GridSpec,
    check_grid: &GridSpec,
) -> Result<Option<CriterionReport>> {
    let mut candidates: Vec<f64> = r0_grid
        .iter()
        .filter(|r| (FRAC_1_SQRT_2..=1.0).contains(r))
        .chain(w.r0_hint().filter(|r| (r0_grid.lo..=r0_grid.hi).contains(r)))
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let check = |r0: f64| -> Result<Option<CriterionReport>> {
        match criterion_check(w, r0, check_grid) {
            Ok(rep) => Ok(Some(rep)),
            Err(Error::ZeroDenominator(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let mut last_fail: Option<f64> = None;
    for &r0 in &candidates {
        match check(r0)? {
            Some(rep) if rep.passed => {
                let Some(mut lo) = last_fail else {
                    return Ok(Some(rep));
                };
                let (mut hi, mut best) = (r0, rep);
                for _ in 0..60 {
                    if hi - lo <= 1e-12 {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    match check(mid)? {
                        Some(rep) if rep.passed => {
                            hi = mid;
                            best = rep;
                        }
                        _ => lo = mid,
                    }
                }
                return Ok(Some(best));
            }
            _ => last_fail = Some(r0),
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HProfileRow {
    pub r: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub h: f64,
}

/// Samples of both criterion branches and their minimum; `r0` is always
/// included when it falls inside the grid.
pub fn h_profile(r0: f64, grid: &GridSpec) -> Result<Vec<HProfileRow>> {
    check_r0(r0)?;
    let mut rs: Vec<f64> = grid.iter().collect();
    if (grid.lo..=grid.hi).contains(&r0) && !rs.contains(&r0) {
        rs.push(r0);
        rs.sort_by(f64::total_cmp);
    }
    Ok(rs
        .into_iter()
        .map(|r| {
            let (omega1, omega2) = criterion_branches(r, r0);
            HProfileRow { r, omega1, omega2, h: omega1.min(omega2) }
        })
        .collect())
}
