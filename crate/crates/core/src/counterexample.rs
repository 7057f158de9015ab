//! The square-truncated transform of `f = B^{-1}(chi_Q0)` along the diagonal
//! `z = alpha (1 + i)`, the Hardy–Littlewood maximal function of `chi_Q0` in
//! closed form, and the sector functions used for even `k`.

use std::f64::consts::{FRAC_PI_3, PI};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::exact::{rational_to_f64, square_moment};
use crate::maximal::WindowSet;
use crate::quadrature::{
    adaptive_1d, far_field_error_bound, integrate, square_transform_closed_form, Decay, Estimate, FarFieldSeries,
    Integrand, Limits, QuadratureConfig, Region,
};

const ORIGIN: Complex64 = Complex64::new(0.0, 0.0);

/// Default distance parameter `m`.
pub const DEFAULT_M: f64 = 5.0;

/// Outer truncation radius as a multiple of `|z|`.
pub const DEFAULT_OUTER_FACTOR: f64 = 20.0;

/// Beyond this radius `f` is evaluated by the moment series.
pub const SERIES_RADIUS: f64 = 4.0;

/// A point `z = alpha (1 + i)` with truncation level `eps = 2 (alpha + m)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterexamplePoint {
    alpha: f64,
    m: f64,
}

impl CounterexamplePoint {
    /// Requires `alpha > 2`, `m > 2` and `alpha > m`.
    pub fn new(alpha: f64, m: f64) -> Result<Self> {
        if !(alpha.is_finite() && m.is_finite()) {
            return domain("alpha and m must be finite");
        }
        if !(alpha > 2.0 && m > 2.0 && alpha > m) {
            return domain(format!("need alpha > 2, m > 2 and alpha > m, got alpha={alpha}, m={m}"));
        }
        Ok(CounterexamplePoint { alpha, m })
    }

    /// Point with the default `m = 5`.
    pub fn with_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, DEFAULT_M)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.alpha, self.alpha)
    }

    pub fn eps(&self) -> f64 {
        2.0 * (self.alpha + self.m)
    }
}

/// Number of series terms so that the truncation error at `|w| >= r` is
/// below `tol`.
fn series_terms(r: f64, tol: f64) -> usize {
    let w = Complex64::new(r, 0.0);
    (1..=400).find(|&t| far_field_error_bound(w, t) <= tol).unwrap_or(400)
}

/// `f = B^{-1}(chi_Q0)` as an [`Integrand`]: the moment series for
/// `|w| >= 4` and the edge-logarithm closed form inside that radius, which
/// agrees with [`square_inverse_transform`] to round-off.
pub fn inverse_square_integrand() -> Result<Integrand> {
    let series = FarFieldSeries::new(series_terms(SERIES_RADIUS, 1e-17))?;
    let f = move |w: Complex64| {
        if w.norm() >= SERIES_RADIUS {
            series.eval_unchecked(w)
        } else {
            // the boundary of Q0 has measure zero
            square_transform_closed_form(w)
                .map(|v| v.conj())
                .unwrap_or(Complex64::new(0.0, 0.0))
        }
    };
    // |f(w)| <= 4 / (pi (|w| - sqrt 2)^2) <= 3.1 |w|^-2 for |w| >= 4
    Ok(Integrand::new(f).with_decay(Decay {
        exponent: 2.0,
        constant: 3.1,
        radius: SERIES_RADIUS,
    }))
}

/// `int_{|v| > R} f(v) b_1(z - v) dv` for the far-field `f`, exactly from the
/// moments: `sum_n (n+1) mu_n z^n / (pi R^(2n+2))`, requires `|z| < R`.
fn analytic_tail(z: Complex64, r: f64, reflect: bool) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zn = Complex64::new(1.0, 0.0);
    let u = z / (r * r);
    for n in 0..200u32 {
        let mu = rational_to_f64(&square_moment(n));
        let term = zn * ((n + 1) as f64 * mu);
        acc += term;
        if n > 8 && term.norm() < 1e-18 * acc.norm() {
            break;
        }
        zn *= u;
    }
    let v = acc / (PI * r * r);
    if reflect {
        v.conj()
    } else {
        v
    }
}

/// Square-truncated `B f(z)` at level `eps` for the far-field `f`, over the
/// plane outside `Q(z, eps)`, which must keep `|v| > 2` for all remaining
/// points. With `reflect`, `f` is replaced by `conj(f(conj v))`.
fn square_truncation(
    z: Complex64,
    eps: f64,
    outer_factor: f64,
    reflect: bool,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let half = 0.5 * eps;
    let nearest = (half - z.re.abs()).min(half - z.im.abs());
    if nearest <= 2.0 {
        return domain("exclusion square must contain the square [-2, 2]^2");
    }
    let zn = z.norm();
    let tol = cfg.abs_tol / (zn * zn);
    let terms = series_terms(nearest, 1e-3 * tol);
    let series = FarFieldSeries::new(terms)?;
    let r_out = outer_factor * zn;
    let g = Integrand::new(move |v: Complex64| {
        let fv = if reflect {
            series.eval_unchecked(v.conj()).conj()
        } else {
            series.eval_unchecked(v)
        };
        let d = z - v;
        // b_1(d) = -1/(pi d^2)
        -fv / (PI * d * d)
    });
    let region = Region::disk(ORIGIN, r_out).minus(Region::square(z, eps));
    let mut est = integrate(&g, &region, &cfg.with_tol(tol))?;
    est.value += analytic_tail(z, r_out, reflect);
    // series truncation, times a bound on int |b_1(z - v)| over the region
    let kernel_mass = 2.0 * (2.0 * r_out / half).ln() + 8.0;
    est.error += far_field_error_bound(Complex64::new(nearest, 0.0), terms) * kernel_mass;
    Ok(est)
}

/// `T_Q^eps f(z)` with `f = B^{-1}(chi_Q0)`, `z = alpha (1 + i)` and
/// `eps = 2 (alpha + m)`. The tolerance `cfg.abs_tol` is applied relative
/// to `|z|^-2`, the natural size of the value.
pub fn counterexample_value(pt: &CounterexamplePoint, cfg: &QuadratureConfig) -> Result<Estimate> {
    counterexample_value_at(pt, DEFAULT_OUTER_FACTOR, cfg)
}

/// [`counterexample_value`] with the numerical region cut at
/// `outer_factor * |z|` instead of the default.
pub fn counterexample_value_at(pt: &CounterexamplePoint, outer_factor: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(outer_factor > 1.5) {
        return domain("outer truncation radius must exceed 1.5 |z|");
    }
    square_truncation(pt.z(), pt.eps(), outer_factor, false, cfg)
}

/// The same quantity for the reflected construction `conj(f(conj v))`
/// evaluated at `conj z`.
pub fn counterexample_value_reflected(pt: &CounterexamplePoint, cfg: &QuadratureConfig) -> Result<Estimate> {
    square_truncation(pt.z().conj(), pt.eps(), DEFAULT_OUTER_FACTOR, true, cfg)
}

/// Length of `(c - r, c + r) ∩ (-1, 1)`.
fn overlap_1d(c: f64, r: f64) -> f64 {
    ((c + r).min(1.0) - (c - r).max(-1.0)).max(0.0)
}

fn window_average(z: Complex64, r: f64) -> f64 {
    overlap_1d(z.re, r) * overlap_1d(z.im, r) / (4.0 * r * r)
}

/// `M(chi_Q0)(z)` with centered square windows `Q(z, 2r)`, by exact
/// maximization over `r > 0`.
///
/// Each side's overlap is linear in `r` between the breakpoints `|x +- 1|`,
/// so on each piece the average is `(a1 + b1 r)(a2 + b2 r) / (4 r^2)`, a
/// quadratic in `1/r` whose maximizer is explicit.
pub fn square_indicator_maximal(z: Complex64) -> f64 {
    let mut bps: Vec<f64> = [z.re - 1.0, z.re + 1.0, z.im - 1.0, z.im + 1.0]
        .iter()
        .map(|v| v.abs())
        .filter(|&v| v > 0.0)
        .collect();
    bps.sort_by(f64::total_cmp);
    let mut best: f64 = 0.0;
    // r -> 0+: the value of the (open) indicator's density
    if z.re.abs() < 1.0 && z.im.abs() < 1.0 {
        return 1.0;
    }
    let mut edges = vec![0.0];
    edges.extend(bps.iter().copied());
    edges.push(f64::INFINITY);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
        for r in [lo, hi] {
            if r > 0.0 && r.is_finite() {
                best = best.max(window_average(z, r));
            }
        }
        // linear pieces: o(r) = a + b r, recovered from two evaluations
        let dr = 0.25 * if hi.is_finite() { hi - lo } else { 1.0 };
        let (r1, r2) = (mid - 0.5 * dr, mid + 0.5 * dr);
        let (ox1, ox2) = (overlap_1d(z.re, r1), overlap_1d(z.re, r2));
        let (oy1, oy2) = (overlap_1d(z.im, r1), overlap_1d(z.im, r2));
        let (b1, b2) = ((ox2 - ox1) / (r2 - r1), (oy2 - oy1) / (r2 - r1));
        let (a1, a2) = (ox1 - b1 * r1, oy1 - b2 * r1);
        let quad = a1 * a2;
        if quad < 0.0 {
            let u = -(a1 * b2 + a2 * b1) / (2.0 * quad);
            if u > 0.0 {
                let r = 1.0 / u;
                if r > lo && r < hi {
                    best = best.max(window_average(z, r));
                }
            }
        }
    }
    best
}

/// `M(chi_Q0)(z)` restricted to the half-sides of `windows`.
pub fn square_indicator_maximal_windows(z: Complex64, windows: &WindowSet) -> f64 {
    if z.re.abs() < 1.0 && z.im.abs() < 1.0 {
        return 1.0;
    }
    windows
        .half_sides()
        .iter()
        .map(|&r| window_average(z, r))
        .fold(0.0, f64::max)
}

/// `M^2(chi_Q0)(z) = sup_r` average of [`square_indicator_maximal`] over
/// `Q(z, 2r)`: the window averages are computed by quadrature and the sup by
/// a log-spaced scan refined with golden-section search. Accurate to about
/// `max(cfg.abs_tol, 1e-5)` relative.
pub fn square_indicator_maximal2(z: Complex64, cfg: &QuadratureConfig) -> Result<f64> {
    let m1 = Integrand::new(|w| Complex64::new(square_indicator_maximal(w), 0.0));
    let avg = |r: f64| -> Result<f64> {
        let q = Region::square(z, 2.0 * r);
        let area = 4.0 * r * r;
        let scale = square_indicator_maximal(z).max(1e-300) * area;
        // M chi_Q0 has kinks along curves, so the relative tolerance is kept
        // at 1e-5 or looser and a stalled 1e-4 estimate is still accepted
        let rel = cfg.with_tol(cfg.abs_tol.max(1e-5) * scale);
        match integrate(&m1, &q, &rel) {
            Ok(e) => Ok(e.value.re / area),
            Err(Error::Convergence { estimate, error, .. }) if error <= 1e-4 * scale => {
                Ok(estimate.re / area)
            }
            Err(e) => Err(e),
        }
    };
    let zn = z.norm().max(1.0);
    let (lo, hi) = ((0.05f64).ln(), (8.0 * zn).ln());
    let steps = 24;
    let mut samples = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = lo + (hi - lo) * i as f64 / steps as f64;
        samples.push((t, avg(t.exp())?));
    }
    let (imax, _) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("nonempty scan");
    let mut a = samples[imax.saturating_sub(1)].0;
    let mut b = samples[(imax + 1).min(steps)].0;
    let mut best = samples[imax].1;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (avg(c.exp())?, avg(d.exp())?);
    for _ in 0..28 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = avg(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = avg(d.exp())?;
        }
        best = best.max(fc).max(fd);
    }
    Ok(best)
}

/// `|counterexample_value| / M(chi_Q0)(z)`. With `windows = None` the
/// denominator is the exact sup over all window sizes, otherwise the
/// maximum over the given half-sides.
pub fn counterexample_ratio(
    pt: &CounterexamplePoint,
    windows: Option<&WindowSet>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let v = counterexample_value(pt, cfg)?;
    let m = match windows {
        None => square_indicator_maximal(pt.z()),
        Some(w) => square_indicator_maximal_windows(pt.z(), w),
    };
    if m <= 0.0 {
        return domain("maximal function vanishes at z for the given windows");
    }
    Ok(v.value.norm() / m)
}

/// Indicator of `{3 < |z| < R, cos(2k theta) > 1/2}` for even `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorFunction {
    k: u32,
    outer: f64,
}

/// Inner radius of every sector function.
pub const SECTOR_INNER: f64 = 3.0;

impl SectorFunction {
    pub fn new(k: u32, outer: f64) -> Result<Self> {
        if k == 0 || k % 2 != 0 {
            return domain(format!("sector functions need an even positive k, got {k}"));
        }
        if !(outer > SECTOR_INNER && outer.is_finite()) {
            return domain(format!("outer radius must exceed {SECTOR_INNER}, got {outer}"));
        }
        Ok(SectorFunction { k, outer })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let inside = r > SECTOR_INNER && r < self.outer && (2.0 * self.k as f64 * z.arg()).cos() > 0.5;
        if inside {
            1.0
        } else {
            0.0
        }
    }

    /// Angular intervals in `[0, 2 pi)` where `cos(2k theta) > 1/2`.
    pub fn angular_intervals(&self) -> Vec<(f64, f64)> {
        let two_k = 2.0 * self.k as f64;
        let period = 2.0 * PI / two_k;
        let half = FRAC_PI_3 / two_k;
        let mut v = vec![(0.0, half)];
        for p in 1..(2 * self.k) {
            let c = p as f64 * period;
            v.push((c - half, c + half));
        }
        v.push((2.0 * PI - half, 2.0 * PI));
        v
    }
}

/// `(int_{|z| > 3} z^(k-1) / conj(z)^(k+1) G(z) dz, 1)`: the integral in
/// polar coordinates, where it factors as `int dr / r` times
/// `int e^(2 i k theta) dtheta` over the sectors, and the bound `1` on
/// `M^j G(0)`, valid for every `j` because `0 <= G <= 1`.
pub fn theorem_b_integral(g: &SectorFunction, j_max: u32, cfg: &QuadratureConfig) -> Result<(Complex64, f64)> {
    cfg.validate()?;
    if j_max == 0 {
        return domain("j_max must be positive");
    }
    let rule = cfg.rule();
    let limits = Limits {
        tol: 0.5 * cfg.abs_tol,
        max_depth: cfg.max_depth,
        min_depth: 1,
    };
    let radial = adaptive_1d(&rule, &mut |r: f64| Complex64::new(1.0 / r, 0.0), SECTOR_INNER, g.outer(), &limits);
    let two_k = 2.0 * g.k() as f64;
    let mut angular = Complex64::new(0.0, 0.0);
    let mut converged = radial.converged;
    let mut error = radial.error;
    let sectors = g.angular_intervals();
    let per = Limits {
        tol: 0.5 * cfg.abs_tol / sectors.len() as f64,
        ..limits
    };
    for (a, b) in sectors {
        let part = adaptive_1d(&rule, &mut |t: f64| Complex64::from_polar(1.0, two_k * t), a, b, &per);
        angular += part.value;
        error += part.error;
        converged &= part.converged;
    }
    let value = radial.value * angular;
    if !converged && error > cfg.abs_tol {
        return Err(Error::Convergence {
            estimate: value,
            error,
            tol: cfg.abs_tol,
        });
    }
    Ok((value, 1.0))
}
