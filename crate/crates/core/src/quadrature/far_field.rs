//! `f = B^{-1}(chi_Q0)`, the inverse Beurling transform of the square
//! `Q0 = [-1, 1]^2`, in and away from the square.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use super::{integrate, Estimate, Integrand, QuadratureConfig, Region};
use crate::error::{domain, Result};
use crate::exact::{center_value, rational_to_f64, square_moment};
use crate::kernel::KernelSpec;

/// Smallest `|w|` accepted by the series: convergence ratio at most 1/2.
pub const SERIES_MIN_RADIUS: f64 = 2.0 * SQRT_2;

/// Moment expansion `f(w) = -(1/pi) sum_n (n+1) mu_n conj(w)^-(n+2)`,
/// `mu_n = int_Q0 conj(xi)^n`, truncated after `terms` orders.
#[derive(Clone, Debug)]
pub struct FarFieldSeries {
    /// `(n+1) mu_n`, index `n`.
    coefficients: Vec<f64>,
}

impl FarFieldSeries {
    pub fn new(terms: usize) -> Result<Self> {
        if terms == 0 {
            return domain("far-field series needs at least one term");
        }
        let coefficients = (0..terms)
            .map(|n| (n as f64 + 1.0) * rational_to_f64(&square_moment(n as u32)))
            .collect();
        Ok(FarFieldSeries { coefficients })
    }

    pub fn terms(&self) -> usize {
        self.coefficients.len()
    }

    /// `(n+1) mu_n` for `n < terms`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Series value without the radius check.
    #[inline]
    pub fn eval_unchecked(&self, w: Complex64) -> Complex64 {
        let u = w.conj().inv();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            acc = acc * u + c;
        }
        -(u * u * acc) / PI
    }

    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        if !(w.norm() >= SERIES_MIN_RADIUS) {
            return domain(format!(
                "far-field series needs |w| >= {SERIES_MIN_RADIUS:.6}, got {}",
                w.norm()
            ));
        }
        Ok(self.eval_unchecked(w))
    }
}

/// Far-field value of `B^{-1}(chi_Q0)` at `w` from `terms` orders of the
/// moment series; requires `|w| >= 2 sqrt(2)`.
pub fn far_field_f(w: Complex64, terms: usize) -> Result<Complex64> {
    FarFieldSeries::new(terms)?.eval(w)
}

/// Bound on the series truncation error, from `|mu_n| <= 4 * 2^(n/2)`:
/// `(4 / (pi |w|^2)) sum_{n >= T} (n+1) q^n` with `q = sqrt(2)/|w|`.
pub fn far_field_error_bound(w: Complex64, terms: usize) -> f64 {
    let r = w.norm();
    let q = SQRT_2 / r;
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let t = terms as f64;
    let geometric = q.powf(t) * ((t + 1.0) * (1.0 - q) + q) / ((1.0 - q) * (1.0 - q));
    4.0 / (PI * r * r) * geometric
}

/// `B(chi_Q0)(w)` in closed form. By Green's theorem
/// `int_Q0 (w - xi)^-2 dxi = (i/2) oint conj(dxi) / (w - xi)`, and on an edge
/// from `A` to `B` the line integral is `(conj(B - A)/(B - A)) log((w - A)/(w - B))`.
/// Undefined on the boundary of the square.
pub fn square_transform_closed_form(w: Complex64) -> Result<Complex64> {
    let gap = 1.0 - w.re.abs().max(w.im.abs());
    if gap.abs() < 1e-12 || !(w.re.is_finite() && w.im.is_finite()) {
        return domain("w lies on the boundary of the square");
    }
    const CORNERS: [Complex64; 4] = [
        Complex64::new(-1.0, -1.0),
        Complex64::new(1.0, -1.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(-1.0, 1.0),
    ];
    let mut acc = Complex64::new(0.0, 0.0);
    for e in 0..4 {
        let a = CORNERS[e];
        let b = CORNERS[(e + 1) % 4];
        let d = b - a;
        acc += d.conj() / d * ((w - a) / (w - b)).ln();
    }
    Ok(acc * Complex64::new(0.0, -0.5 / PI))
}

/// `B^{-1}(chi_Q0)(w) = p.v. int_Q0 conj(b_1(w - xi)) dxi` by direct
/// quadrature.
///
/// Outside the closed square the integral is regular. Inside, the
/// largest square `Q(w, s)` contained in `Q0` is removed; its p.v.
/// contribution is the conjugated center value, which is zero for `k = 1`.
pub fn square_inverse_transform(w: Complex64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let spec = KernelSpec::inverse(1)?;
    let g = Integrand::new(move |xi| spec.eval_unchecked(w - xi)).with_singular_point(w);
    let gap = 1.0 - w.re.abs().max(w.im.abs());
    if gap.abs() < 1e-12 {
        return domain("w lies on the boundary of the square");
    }
    if gap > 0.0 {
        let region = Region::unit_square().minus(Region::square(w, 2.0 * gap));
        let mut est = integrate(&g, &region, cfg)?;
        est.value += center_value(1)?.numeric();
        Ok(est)
    } else {
        integrate(&g, &Region::unit_square(), cfg)
    }
}
