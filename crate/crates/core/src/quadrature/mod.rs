//! Adaptive planar quadrature over rectangle/disk regions, with
//! principal-value handling at the kernel singularity.
//!
//! Regions are integrated by sweeping: an outer adaptive Gauss–Legendre rule
//! in x runs over each segment between structural breakpoints (with a
//! cubic change of variables that absorbs square-root behavior at disk
//! extents), and an inner adaptive rule in y runs over the exact
//! cross-section intervals. Exclusions are therefore geometric, never masks.
//!
//! Singular pieces around the origin are done on polar patches, see
//! [`pv_integral`].

mod far_field;
mod gauss;
mod region;
mod singular;

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

pub use far_field::{far_field_error_bound, far_field_f, square_inverse_transform, square_transform_closed_form, FarFieldSeries};
pub use gauss::GaussLegendre;
pub(crate) use gauss::{adaptive_1d, adaptive_2d, Limits};
pub use region::{Interval, Region};
pub use singular::{
    ak_tail, center_value_quadrature, geometric_split_residual, pv_integral, trunc_disk, trunc_square,
};

use crate::error::{Error, Result};

/// Tolerance and refinement settings shared by all quadrature routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_depth: usize,
    pub base_rule_order: usize,
    /// Ratio between consecutive radial panels of meshes graded toward a
    /// singular point.
    pub grading_ratio: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-8,
            max_depth: 30,
            base_rule_order: 8,
            grading_ratio: 0.5,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, max_depth: usize, base_rule_order: usize, grading_ratio: f64) -> Result<Self> {
        let cfg = QuadratureConfig {
            abs_tol,
            max_depth,
            base_rule_order,
            grading_ratio,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Config("abs_tol must be positive".into()));
        }
        if self.max_depth < 4 {
            return Err(Error::Config("max_depth must be at least 4".into()));
        }
        if self.base_rule_order < 2 {
            return Err(Error::Config("base_rule_order must be at least 2".into()));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            return Err(Error::Config("grading_ratio must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn with_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub(crate) fn rule(&self) -> GaussLegendre {
        GaussLegendre::new(self.base_rule_order)
    }

    /// Depth limit for quadtree refinement; each level costs four panels.
    pub(crate) fn max_depth_2d(&self) -> usize {
        (self.max_depth / 2).max(4)
    }
}

/// A quadrature result with its estimated absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub fn zero() -> Self {
        Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        }
    }
}

/// Power-law bound `|f(v)| <= constant * |v|^(-exponent)` for `|v| >= radius`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decay {
    pub exponent: f64,
    pub constant: f64,
    pub radius: f64,
}

pub type PlaneFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A function of the plane plus the metadata quadrature needs: an optional
/// support region (the function is taken as zero outside it), a singular
/// point, far-field decay, and points where it is sharply peaked.
#[derive(Clone)]
pub struct Integrand {
    func: PlaneFn,
    support: Option<Region>,
    singular_point: Option<Complex64>,
    decay: Option<Decay>,
    peaks: Vec<Complex64>,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("support", &self.support)
            .field("singular_point", &self.singular_point)
            .field("decay", &self.decay)
            .field("peaks", &self.peaks)
            .finish_non_exhaustive()
    }
}

impl Integrand {
    pub fn new(f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Integrand {
            func: Arc::new(f),
            support: None,
            singular_point: None,
            decay: None,
            peaks: Vec::new(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(move |_| c)
    }

    /// Characteristic function of `region`.
    pub fn indicator(region: Region) -> Self {
        Self::constant(Complex64::new(1.0, 0.0)).with_support(region)
    }

    pub fn with_support(mut self, region: Region) -> Self {
        self.support = Some(region);
        self
    }

    pub fn with_singular_point(mut self, p: Complex64) -> Self {
        self.singular_point = Some(p);
        self
    }

    pub fn with_decay(mut self, decay: Decay) -> Self {
        self.decay = Some(decay);
        self
    }

    pub fn with_peak(mut self, p: Complex64) -> Self {
        self.peaks.push(p);
        self
    }

    pub fn support(&self) -> Option<&Region> {
        self.support.as_ref()
    }

    pub fn singular_point(&self) -> Option<Complex64> {
        self.singular_point
    }

    pub fn decay(&self) -> Option<Decay> {
        self.decay
    }

    pub fn peaks(&self) -> &[Complex64] {
        &self.peaks
    }

    /// Value at `z`, zero outside the support.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.support {
            Some(s) if !s.contains(z) => Complex64::new(0.0, 0.0),
            _ => (self.func)(z),
        }
    }

    /// Value of the underlying formula, ignoring the support.
    #[inline]
    pub fn value_on_support(&self, z: Complex64) -> Complex64 {
        (self.func)(z)
    }

    fn hint_points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.singular_point.into_iter().chain(self.peaks.iter().copied())
    }
}

fn smoothstep(s: f64) -> (f64, f64) {
    (s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s))
}

/// Integrates `f` over `region` (intersected with the integrand's support)
/// to absolute tolerance `cfg.abs_tol`.
pub fn integrate(f: &Integrand, region: &Region, cfg: &QuadratureConfig) -> Result<Estimate> {
    cfg.validate()?;
    let region = match f.support() {
        Some(s) => region.clone().intersect(s.clone()),
        None => region.clone(),
    };
    let Some((x0, x1, y0, y1)) = region.bounding_box() else {
        return Ok(Estimate::zero());
    };
    let width = x1 - x0;
    let height = y1 - y0;
    let tol = cfg.abs_tol;
    let rule = cfg.rule();

    let mut xs = region.x_breakpoints();
    xs.extend(f.hint_points().map(|p| p.re));
    xs.push(x0);
    xs.push(x1);
    xs.retain(|&x| x >= x0 && x <= x1);
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + b.abs()));
    let hint_ys: Vec<f64> = f.hint_points().map(|p| p.im).collect();

    let segments: Vec<(f64, f64)> = xs.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect();
    // inner absolute tolerance per unit area of the bounding box
    let inner_density = 0.1 * tol / (width * height);

    let results: Vec<(gauss::Adaptive, bool, f64, usize)> = segments
        .par_iter()
        .map(|&(a, b)| {
            let inner_ok = Cell::new(true);
            let inner_err_max = Cell::new(0.0f64);
            let inner_evals = Cell::new(0usize);
            let mut column = |s: f64| {
                let (t, dt) = smoothstep(s);
                let x = a + (b - a) * t;
                let dx = (b - a) * dt;
                let mut total = Complex64::new(0.0, 0.0);
                let mut err = 0.0;
                for (lo, hi) in region.y_intervals(x) {
                    let mut cuts = vec![lo];
                    cuts.extend(hint_ys.iter().copied().filter(|&y| y > lo && y < hi));
                    cuts.push(hi);
                    cuts.sort_by(|p, q| p.total_cmp(q));
                    for w in cuts.windows(2) {
                        let limits = Limits {
                            tol: inner_density * (w[1] - w[0]),
                            max_depth: cfg.max_depth,
                            min_depth: 0,
                        };
                        let r = adaptive_1d(
                            &rule,
                            &mut |y: f64| f.value_on_support(Complex64::new(x, y)),
                            w[0],
                            w[1],
                            &limits,
                        );
                        total += r.value;
                        err += r.error;
                        inner_evals.set(inner_evals.get() + r.evals);
                        if !r.converged {
                            inner_ok.set(false);
                        }
                    }
                }
                inner_err_max.set(inner_err_max.get().max(err));
                total * dx
            };
            let limits = Limits {
                tol: 0.9 * tol * (b - a) / width,
                max_depth: cfg.max_depth,
                min_depth: 2,
            };
            let r = adaptive_1d(&rule, &mut column, 0.0, 1.0, &limits);
            (r, inner_ok.get(), inner_err_max.get() * (b - a), inner_evals.get())
        })
        .collect();

    let mut acc = gauss::Adaptive::new();
    let mut inner_error = 0.0;
    let mut evals = 0;
    for (r, ok, ie, n) in &results {
        acc.absorb(r);
        acc.converged &= *ok;
        inner_error += ie;
        evals += n;
    }
    let estimate = Estimate {
        value: acc.value,
        error: acc.error + inner_error,
        evaluations: acc.evals + evals,
    };
    if !acc.converged && estimate.error > tol {
        return Err(Error::Convergence {
            estimate: estimate.value,
            error: estimate.error,
            tol,
        });
    }
    Ok(estimate)
}
