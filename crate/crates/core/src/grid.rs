//! Uniformly sampled fields on `[-L, L]^2` and the Fourier-multiplier
//! realization of `B^k` and its inverse.
//!
//! # Binary field format
//!
//! All integers and floats are little-endian.
//!
//! | offset | size     | content                                   |
//! |--------|----------|-------------------------------------------|
//! | 0      | 4        | magic `BGF1`                              |
//! | 4      | 4        | `N` as `u32`                              |
//! | 8      | 8        | `L` as `f64`                              |
//! | 16     | 1        | layout, `0` = row-major                   |
//! | 17     | 3        | zero padding                              |
//! | 20     | `16 N^2` | samples as `(re, im)` `f64` pairs         |
//!
//! Row-major means sample `(i, j)` (x index `i`, y index `j`) is stored at
//! position `j * N + i`.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Error, Result};
use crate::kernel::{eval_multiplier, ComplexPoint};
use crate::quadrature::Integrand;

const MAGIC: &[u8; 4] = b"BGF1";
const LAYOUT_ROW_MAJOR: u8 = 0;
const HEADER_LEN: usize = 20;

/// Complex samples at the cell centers of an `N x N` grid on `[-L, L]^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    n: usize,
    half_width: f64,
    samples: Vec<Complex64>,
}

impl GridField {
    /// Wraps row-major samples; `N >= 16` must be a power of two.
    pub fn new(n: usize, half_width: f64, samples: Vec<Complex64>) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return domain(format!("grid size must be a power of two >= 16, got {n}"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return domain(format!("half width must be positive, got {half_width}"));
        }
        if samples.len() != n * n {
            return domain(format!("expected {} samples, got {}", n * n, samples.len()));
        }
        Ok(GridField {
            n,
            half_width,
            samples,
        })
    }

    /// Field with value `f(z)` at every node `z`.
    pub fn from_fn(n: usize, half_width: f64, f: impl Fn(ComplexPoint) -> Complex64 + Sync) -> Result<Self> {
        let shell = GridField::new(n, half_width, vec![Complex64::new(0.0, 0.0); n * n])?;
        Ok(shell.map_nodes(f))
    }

    pub fn zeros(n: usize, half_width: f64) -> Result<Self> {
        GridField::new(n, half_width, vec![Complex64::new(0.0, 0.0); n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Cell size `h = 2L / N`.
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Node coordinate of index `(i, j)`.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> ComplexPoint {
        let h = self.h();
        Complex64::new(
            -self.half_width + (i as f64 + 0.5) * h,
            -self.half_width + (j as f64 + 0.5) * h,
        )
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.samples[j * self.n + i]
    }

    /// Index of the node nearest to `z`, or `None` outside the domain.
    pub fn nearest_index(&self, z: ComplexPoint) -> Option<(usize, usize)> {
        let h = self.h();
        let fi = ((z.re + self.half_width) / h).floor();
        let fj = ((z.im + self.half_width) / h).floor();
        let n = self.n as f64;
        if !(0.0..n).contains(&fi) || !(0.0..n).contains(&fj) {
            return None;
        }
        Some((fi as usize, fj as usize))
    }

    /// Sample at the node nearest to `z`.
    pub fn value_near(&self, z: ComplexPoint) -> Result<Complex64> {
        match self.nearest_index(z) {
            Some((i, j)) => Ok(self.get(i, j)),
            None => domain(format!("point {z} lies outside the grid")),
        }
    }

    /// Iterator over `(node, sample)`.
    pub fn iter_nodes(&self) -> impl Iterator<Item = (ComplexPoint, Complex64)> + '_ {
        (0..self.n * self.n).map(move |idx| (self.node(idx % self.n, idx / self.n), self.samples[idx]))
    }

    /// New field on the same grid with `f(node)` as samples.
    pub fn map_nodes(&self, f: impl Fn(ComplexPoint) -> Complex64 + Sync) -> GridField {
        let samples = (0..self.n * self.n)
            .into_par_iter()
            .map(|idx| f(self.node(idx % self.n, idx / self.n)))
            .collect();
        GridField { samples, ..*self }
    }

    /// New field with `f` applied to every sample.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> GridField {
        GridField {
            samples: self.samples.par_iter().map(|&v| f(v)).collect(),
            ..*self
        }
    }

    /// Node-wise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &GridField, f: impl Fn(Complex64, Complex64) -> Complex64 + Sync) -> Result<GridField> {
        self.check_same_grid(other)?;
        Ok(GridField {
            samples: self
                .samples
                .par_iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            ..*self
        })
    }

    pub(crate) fn check_same_grid(&self, other: &GridField) -> Result<()> {
        if self.n != other.n || self.half_width != other.half_width {
            return domain("fields live on different grids");
        }
        Ok(())
    }

    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / (self.n * self.n) as f64
    }

    /// Discrete L2 norm `sqrt(sum |f|^2 h^2)`.
    pub fn l2_norm(&self) -> f64 {
        let h = self.h();
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() * h
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Multiplies by a raised-cosine window that is 1 on `|x|, |y| <= (1 -
    /// fraction) L` and falls smoothly to 0 at the domain edge.
    pub fn tapered(&self, fraction: f64) -> Result<GridField> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return domain(format!("taper fraction must lie in (0, 1], got {fraction}"));
        }
        let l = self.half_width;
        let flat = (1.0 - fraction) * l;
        let width = fraction * l;
        let w1 = move |t: f64| {
            let a = t.abs();
            if a <= flat {
                1.0
            } else {
                0.5 * (1.0 + (PI * ((a - flat) / width).min(1.0)).cos())
            }
        };
        let n = self.n;
        Ok(GridField {
            samples: self
                .samples
                .par_iter()
                .enumerate()
                .map(|(idx, &v)| {
                    let z = self.node(idx % n, idx / n);
                    v * (w1(z.re) * w1(z.im))
                })
                .collect(),
            ..*self
        })
    }

    /// Writes the binary format described in the module docs.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let n = u32::try_from(self.n).map_err(|_| Error::Format("grid too large".into()))?;
        w.write_all(MAGIC)?;
        w.write_all(&n.to_le_bytes())?;
        w.write_all(&self.half_width.to_le_bytes())?;
        w.write_all(&[LAYOUT_ROW_MAJOR, 0, 0, 0])?;
        for v in &self.samples {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<GridField> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)?;
        if &header[0..4] != MAGIC {
            return Err(Error::Format("bad magic, expected BGF1".into()));
        }
        let n = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes")) as usize;
        let half_width = f64::from_le_bytes(header[8..16].try_into().expect("8 bytes"));
        if header[16] != LAYOUT_ROW_MAJOR {
            return Err(Error::Format(format!("unsupported layout {}", header[16])));
        }
        if header[17..20] != [0, 0, 0] {
            return Err(Error::Format("nonzero header padding".into()));
        }
        if n < 16 || !n.is_power_of_two() || n > 1 << 15 {
            return Err(Error::Format(format!("invalid grid size {n}")));
        }
        let mut body = vec![0u8; 16 * n * n];
        r.read_exact(&mut body)?;
        let samples = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[0..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..16].try_into().expect("8 bytes")),
                )
            })
            .collect();
        GridField::new(n, half_width, samples).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<GridField> {
        GridField::read_from(BufReader::new(File::open(path)?))
    }
}

/// Midpoint samples of `f` on the `N x N` grid over `[-L, L]^2`. Non-finite
/// values (a singular node) are stored as zero.
pub fn sample(f: &Integrand, n: usize, half_width: f64) -> Result<GridField> {
    GridField::from_fn(n, half_width, |z| {
        let v = f.eval(z);
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Square 2D FFT plans; both directions are unnormalized.
pub(crate) struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n);
        let rows = |buf: &mut [Complex64]| {
            buf.par_chunks_mut(n).for_each(|row| plan.process(row));
        };
        rows(data);
        transpose(data, n);
        rows(data);
        transpose(data, n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for j in 0..n {
        for i in (j + 1)..n {
            data.swap(j * n + i, i * n + j);
        }
    }
}

/// Signed frequency index for FFT bin `p`; the Nyquist bin maps to `-N/2`.
#[inline]
pub(crate) fn signed_bin(p: usize, n: usize) -> i64 {
    if p < n / 2 {
        p as i64
    } else {
        p as i64 - n as i64
    }
}

fn apply_multiplier(field: &GridField, m: impl Fn(ComplexPoint) -> Complex64 + Sync) -> GridField {
    let n = field.n;
    let fft = Fft2::new(n);
    let mut data = field.samples.clone();
    fft.forward(&mut data);
    let dxi = PI / field.half_width;
    let scale = 1.0 / (n * n) as f64;
    data.par_chunks_mut(n).enumerate().for_each(|(q, row)| {
        let eta = signed_bin(q, n) as f64 * dxi;
        for (p, v) in row.iter_mut().enumerate() {
            let xi = Complex64::new(signed_bin(p, n) as f64 * dxi, eta);
            *v *= m(xi) * scale;
        }
    });
    fft.inverse(&mut data);
    GridField { samples: data, ..*field }
}

/// `B^k` on the periodic grid: DFT, multiplication by `(conj(xi)/xi)^k`
/// (zero at `xi = 0`), inverse DFT.
pub fn beurling_grid(k: u32, field: &GridField) -> GridField {
    apply_multiplier(field, |xi| eval_multiplier(k, xi))
}

/// `(B^k)^{-1}` on the periodic grid, multiplier `(xi/conj(xi))^k`.
pub fn inverse_beurling_grid(k: u32, field: &GridField) -> GridField {
    apply_multiplier(field, |xi| eval_multiplier(k, xi).conj())
}
