//! Principal-value integrals and truncated transforms.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;

use super::{adaptive_2d, integrate, Decay, Estimate, Integrand, Limits, QuadratureConfig, Region};
use crate::error::{domain, Error, Result};
use crate::exact::center_value;
use crate::kernel::KernelSpec;

const ORIGIN: Complex64 = Complex64::new(0.0, 0.0);

/// Sector `q` of a centered square in polar coordinates: the local angle
/// `phi` runs over `[-pi/4, pi/4]`, the boundary sits at radius
/// `half_side / cos(phi)`, and the global angle is `phi + q pi/2`.
fn sector_point(q: usize, half_side: f64, phi: f64, t: f64) -> (Complex64, f64) {
    let rho = half_side / phi.cos();
    let w = Complex64::from_polar(rho * t, phi + q as f64 * FRAC_PI_2);
    (w, rho)
}

fn check(est: super::gauss::Adaptive, tol: f64) -> Result<Estimate> {
    let e = Estimate {
        value: est.value,
        error: est.error,
        evaluations: est.evals,
    };
    if !est.converged && e.error > tol {
        return Err(Error::Convergence {
            estimate: e.value,
            error: e.error,
            tol,
        });
    }
    Ok(e)
}

/// `p.v. int_{Q0} b_k(w) g(w) dw` over `Q0 = [-1, 1]^2`.
///
/// Split at the square `Q(0, delta)`, `delta = min(1, abs_tol^(1/4))`:
///
/// * outside it, `b_k g` is integrated on four polar sectors with a
///   logarithmic radial variable, so `b_k r dr` becomes bounded;
/// * inside it, `b_k (g - g(0))` is integrated on polar sectors whose radial
///   panels are graded geometrically toward the origin;
/// * the remaining `g(0) p.v. int_{Q(0,delta)} b_k` is `g(0)` times the exact
///   center value, which does not depend on `delta`.
pub fn pv_integral(k: u32, g: &Integrand, cfg: &QuadratureConfig) -> Result<Estimate> {
    cfg.validate()?;
    let spec = KernelSpec::forward(k)?;
    let tol = cfg.abs_tol;
    let delta = tol.powf(0.25).min(1.0);
    let inner_half = 0.5 * delta;
    let g0 = g.eval(ORIGIN);
    let center = center_value(k)?.numeric();
    let rule = cfg.rule();
    let depth = cfg.max_depth_2d();

    let mut total = super::gauss::Adaptive::new();

    if inner_half < 1.0 {
        let log_ratio = (1.0 / inner_half).ln();
        for q in 0..4 {
            let mut f = |phi: f64, s: f64| {
                let t = inner_half * (s * log_ratio).exp();
                let (w, rho) = sector_point(q, 1.0, phi, t);
                spec.eval_unchecked(w) * g.eval(w) * (rho * rho * t * t * log_ratio)
            };
            let limits = Limits {
                tol: 0.45 * tol / 4.0,
                max_depth: depth,
                min_depth: 1,
            };
            total.absorb(&adaptive_2d(&rule, &mut f, (-FRAC_PI_4, FRAC_PI_4), (0.0, 1.0), &limits));
        }
    }

    let levels = 8usize;
    let ratio = cfg.grading_ratio;
    let mut panels = vec![(0.0, ratio.powi(levels as i32))];
    panels.extend((0..levels).rev().map(|l| (ratio.powi(l as i32 + 1), ratio.powi(l as i32))));
    let panel_tol = 0.45 * tol / (4 * panels.len()) as f64;
    for q in 0..4 {
        for &(t0, t1) in &panels {
            let mut f = |phi: f64, t: f64| {
                let (w, rho) = sector_point(q, inner_half, phi, t);
                spec.eval_unchecked(w) * (g.eval(w) - g0) * (rho * rho * t)
            };
            let limits = Limits {
                tol: panel_tol,
                max_depth: depth,
                min_depth: 0,
            };
            total.absorb(&adaptive_2d(&rule, &mut f, (-FRAC_PI_4, FRAC_PI_4), (t0, t1), &limits));
        }
    }

    total.value += g0 * center;
    check(total, tol)
}

/// `B^k(chi_Q0)(0)` by quadrature alone: the p.v. integral of `b_k` over the
/// unit disk vanishes, so it equals the absolutely convergent integral over
/// `Q0 \ D(0, 1)`.
pub fn center_value_quadrature(k: u32, cfg: &QuadratureConfig) -> Result<Estimate> {
    let spec = KernelSpec::forward(k)?;
    let f = Integrand::new(move |w| spec.eval_unchecked(w));
    let region = Region::unit_square().minus(Region::disk(ORIGIN, 1.0));
    integrate(&f, &region, cfg)
}

fn outer_radius(k: u32, d: &Decay, z: Complex64, eps: f64, tol: f64) -> (f64, f64) {
    // For |w| >= 2|z| + 2r0, |f(z - w)| <= C 2^p |w|^-p, so the tail beyond R
    // is at most 2 k C 2^p R^-p / p.
    let p = d.exponent;
    let scale = 2.0 * k as f64 * d.constant * 2f64.powf(p) / p;
    let r_tol = (scale / (0.5 * tol)).powf(1.0 / p);
    let r = r_tol.max(2.0 * z.norm() + 2.0 * d.radius).max(2.0 * eps).max(1.0);
    (r, scale * r.powf(-p))
}

fn truncated(
    k: u32,
    f: &Integrand,
    z: Complex64,
    exclusion: Region,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    if !(eps > 0.0 && eps.is_finite()) {
        return domain("truncation level must be positive");
    }
    let spec = KernelSpec::forward(k)?;
    let (outer, tail, tol) = match (f.support(), f.decay()) {
        (Some(s), _) => (s.reflected_through(z), 0.0, cfg.abs_tol),
        (None, Some(d)) => {
            if !(d.exponent > 0.0 && d.constant >= 0.0) {
                return domain("decay hint needs a positive exponent");
            }
            let (r, tail) = outer_radius(k, &d, z, eps, cfg.abs_tol);
            (Region::disk(ORIGIN, r), tail, 0.5 * cfg.abs_tol)
        }
        (None, None) => return domain("integrand has unbounded support and no decay hint"),
    };
    let region = outer.minus(exclusion);
    let inner = f.clone();
    let mut integrand = Integrand::new(move |w| inner.value_on_support(z - w) * spec.eval_unchecked(w))
        .with_singular_point(ORIGIN);
    if let Some(p) = f.singular_point() {
        integrand = integrand.with_peak(z - p);
    }
    for p in f.peaks() {
        integrand = integrand.with_peak(z - p);
    }
    let mut est = integrate(&integrand, &region, &cfg.with_tol(tol))?;
    est.error += tail;
    Ok(est)
}

/// `int_{|w| > eps} f(z - w) b_k(w) dw`.
pub fn trunc_disk(k: u32, f: &Integrand, z: Complex64, eps: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    truncated(k, f, z, Region::disk(ORIGIN, eps), eps, cfg)
}

/// `int_{w not in Q(0, eps)} f(z - w) b_k(w) dw`, where `Q(0, eps)` is the
/// centered square of side `eps`.
pub fn trunc_square(k: u32, f: &Integrand, z: Complex64, eps: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    truncated(k, f, z, Region::square(ORIGIN, eps), eps, cfg)
}

/// Residual of the conversion between square and disk truncations,
/// `T_Q^eps f = T^(eps/sqrt 2) f + int_{B(0, eps/sqrt 2) \ Q(0, eps)} f(z - w) b_k(w) dw`.
pub fn geometric_split_residual(
    k: u32,
    f: &Integrand,
    z: Complex64,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let radius = eps * std::f64::consts::SQRT_2 / 2.0;
    let square = trunc_square(k, f, z, eps, cfg)?;
    let disk = trunc_disk(k, f, z, radius, cfg)?;
    let spec = KernelSpec::forward(k)?;
    let mut lens = Region::disk(ORIGIN, radius).minus(Region::square(ORIGIN, eps));
    if let Some(s) = f.support() {
        lens = lens.intersect(s.reflected_through(z));
    }
    let inner = f.clone();
    let g = Integrand::new(move |w| inner.value_on_support(z - w) * spec.eval_unchecked(w));
    let ring = integrate(&g, &lens, cfg)?;
    Ok((square.value - disk.value - ring.value).norm())
}

/// `h_k(z) = p.v. int_{Q0} conj(b_k(z - w)) b_k(w) dw = (B^k)^{-1}(b_k chi_Q0)(z)`.
///
/// Away from the origin `a_k(z) = -h_k(z)`, where `a_k` solves
/// `B^k a_k = b_k chi_{C \ Q0}`.
pub fn ak_tail(k: u32, z: Complex64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if z.norm() <= 3.0 {
        return domain("a_k tail is only evaluated for |z| > 3");
    }
    let spec = KernelSpec::inverse(k)?;
    let g = Integrand::new(move |w| spec.eval_unchecked(z - w));
    pv_integral(k, &g, cfg)
}
