//! Closed-form Beurling kernels and their Fourier multipliers.
//!
//! The kernel of the k-th iterate is
//! `b_k(z) = ((-1)^k k / pi) * conj(z)^(k-1) / z^(k+1)`, which in polar form
//! is `((-1)^k k / (pi r^2)) * exp(-2 i k theta)`. The polar form is what gets
//! evaluated, so large orders never form `z^(k+1)` explicitly.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};

/// A point of the plane.
pub type ComplexPoint = Complex64;

/// Forward kernel `b_k` or the kernel of the inverse operator, `conj(b_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Iteration order plus direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KernelSpec {
    order: u32,
    direction: Direction,
}

impl KernelSpec {
    pub fn new(order: u32, direction: Direction) -> Result<Self> {
        if order == 0 {
            return domain("kernel order must be at least 1");
        }
        Ok(KernelSpec { order, direction })
    }

    pub fn forward(order: u32) -> Result<Self> {
        Self::new(order, Direction::Forward)
    }

    pub fn inverse(order: u32) -> Result<Self> {
        Self::new(order, Direction::Inverse)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Evaluates the kernel; the point must be nonzero.
    pub fn eval(&self, z: ComplexPoint) -> Result<Complex64> {
        eval_kernel(*self, z)
    }

    /// Kernel value without the singularity check. Returns a non-finite value
    /// at the origin; quadrature code uses it where the origin is excluded.
    #[inline]
    pub(crate) fn eval_unchecked(&self, z: ComplexPoint) -> Complex64 {
        let v = forward_value(self.order, z);
        match self.direction {
            Direction::Forward => v,
            Direction::Inverse => v.conj(),
        }
    }
}

#[inline]
fn forward_value(k: u32, z: Complex64) -> Complex64 {
    let r2 = z.norm_sqr();
    let unit_conj = z.conj() / r2.sqrt();
    let amplitude = k as f64 / (PI * r2);
    let signed = if k % 2 == 0 { amplitude } else { -amplitude };
    unit_conj.powu(2 * k) * signed
}

/// Evaluates `b_k(z)` (forward) or `conj(b_k(z))` (inverse).
pub fn eval_kernel(spec: KernelSpec, z: ComplexPoint) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return domain("kernel argument must be finite");
    }
    if z.re == 0.0 && z.im == 0.0 {
        return domain("kernel is singular at z = 0");
    }
    Ok(spec.eval_unchecked(z))
}

/// Fourier multiplier `(conj(xi)/xi)^k` of the k-th iterate. The zero
/// frequency maps to 0.
pub fn eval_multiplier(k: u32, xi: ComplexPoint) -> Complex64 {
    let r = xi.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    (xi.conj() / r).powu(2 * k)
}

/// Trapezoidal mean of the kernel over the circle `|z| = radius`.
///
/// Requires at least `8k` samples so that the angular frequency `2k` of the
/// kernel is resolved.
pub fn circle_mean(spec: KernelSpec, radius: f64, samples: usize) -> Result<Complex64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return domain("circle radius must be positive");
    }
    if samples < 8 * spec.order() as usize {
        return domain(format!(
            "need at least {} samples for order {}",
            8 * spec.order(),
            spec.order()
        ));
    }
    let step = 2.0 * PI / samples as f64;
    let sum: Complex64 = (0..samples)
        .map(|j| spec.eval_unchecked(Complex64::from_polar(radius, j as f64 * step)))
        .sum();
    Ok(sum / samples as f64)
}
