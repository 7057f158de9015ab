//! Hardy–Littlewood maximal operators on grids, maximal square-truncated
//! transforms, and Cotlar-type ratio fields `B*_S f / M^2(B^k f)`.
//!
//! Windows are centered axis-parallel squares. A window of half-side `r`
//! covers the `(2s+1) x (2s+1)` block of cells around a node with
//! `s = round(r/h - 1/2)`; the cell itself (`s = 0`) is always included.
//! Windows that would leave the domain are skipped, not renormalized.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::grid::{beurling_grid, sample, Fft2, GridField};
use crate::kernel::KernelSpec;
use crate::quadrature::{trunc_square, Integrand, QuadratureConfig};

/// Window half-sides for [`hl_maximal`].
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSet {
    half_sides: Vec<f64>,
}

impl WindowSet {
    /// Validates: nonempty, strictly increasing, first at least `h`.
    pub fn new(half_sides: Vec<f64>, h: f64) -> Result<Self> {
        if half_sides.is_empty() {
            return domain("window set is empty");
        }
        if !half_sides.iter().all(|r| r.is_finite()) || half_sides.windows(2).any(|w| w[0] >= w[1]) {
            return domain("window half-sides must be finite and strictly increasing");
        }
        if half_sides[0] < h * (1.0 - 1e-12) {
            return domain(format!("smallest window {} is below the cell size {h}", half_sides[0]));
        }
        Ok(WindowSet { half_sides })
    }

    /// Half-sides `h 2^m` up to `L/2`, merged with `extras`.
    pub fn dyadic(field_h: f64, half_width: f64, extras: &[f64]) -> Result<Self> {
        let mut v = Vec::new();
        let mut r = field_h;
        while r <= 0.5 * half_width * (1.0 + 1e-12) {
            v.push(r);
            r *= 2.0;
        }
        v.extend(extras.iter().copied().filter(|&e| e >= field_h));
        Self::new(sorted_unique(v), field_h)
    }

    /// Default windows for a grid.
    pub fn for_grid(field: &GridField) -> Result<Self> {
        Self::dyadic(field.h(), field.half_width(), &[])
    }

    pub fn half_sides(&self) -> &[f64] {
        &self.half_sides
    }

    /// Distinct cell radii for a grid of cell size `h`, always starting at 0.
    fn cell_radii(&self, h: f64) -> Vec<usize> {
        let mut s: Vec<usize> = std::iter::once(0)
            .chain(self.half_sides.iter().map(|r| (r / h - 0.5).round().max(0.0) as usize))
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// Truncation levels `eps` for maximal truncated transforms.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonSet {
    levels: Vec<f64>,
}

impl EpsilonSet {
    /// Validates: nonempty, strictly increasing, positive.
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return domain("epsilon set is empty");
        }
        if !levels.iter().all(|e| e.is_finite() && *e > 0.0) || levels.windows(2).any(|w| w[0] >= w[1]) {
            return domain("truncation levels must be positive and strictly increasing");
        }
        Ok(EpsilonSet { levels })
    }

    /// Geometric levels with ratio `sqrt 2` from `h` to `4L`, merged with
    /// `extras`.
    pub fn geometric(h: f64, half_width: f64, extras: &[f64]) -> Result<Self> {
        if !(h > 0.0 && half_width > 0.0) {
            return domain("geometric epsilon set needs positive h and L");
        }
        let mut v = Vec::new();
        let mut e = h;
        while e <= 4.0 * half_width * (1.0 + 1e-12) {
            v.push(e);
            e *= SQRT_2;
        }
        v.extend(extras.iter().copied());
        Self::new(sorted_unique(v))
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Copy with extra levels merged in.
    pub fn with_levels(&self, extras: &[f64]) -> Result<Self> {
        Self::new(sorted_unique(self.levels.iter().chain(extras).copied().collect()))
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    v
}

/// Summed-area table of `|field|`, `(N+1)^2` entries.
struct SummedArea {
    n: usize,
    table: Vec<f64>,
}

impl SummedArea {
    fn new(field: &GridField) -> Self {
        let n = field.n();
        let mut table = vec![0.0; (n + 1) * (n + 1)];
        for j in 0..n {
            let mut row = 0.0;
            for i in 0..n {
                row += field.get(i, j).norm();
                table[(j + 1) * (n + 1) + i + 1] = table[j * (n + 1) + i + 1] + row;
            }
        }
        SummedArea { n, table }
    }

    /// Sum over cells `i0..i1` x `j0..j1` (half-open).
    #[inline]
    fn block(&self, i0: usize, i1: usize, j0: usize, j1: usize) -> f64 {
        let w = self.n + 1;
        self.table[j1 * w + i1] - self.table[j0 * w + i1] - self.table[j1 * w + i0] + self.table[j0 * w + i0]
    }
}

/// `M f` at every node: the largest average of `|f|` over in-domain
/// windows. The output is real (imaginary parts zero).
pub fn hl_maximal(field: &GridField, windows: &WindowSet) -> GridField {
    let n = field.n();
    let sat = SummedArea::new(field);
    let radii = windows.cell_radii(field.h());
    let mut samples = vec![Complex64::new(0.0, 0.0); n * n];
    samples.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        for (i, out) in row.iter_mut().enumerate() {
            // the cell itself, exactly rather than through the table
            let mut best = field.get(i, j).norm();
            for &s in radii.iter().skip(1) {
                if i < s || j < s || i + s >= n || j + s >= n {
                    break;
                }
                let side = 2 * s + 1;
                let avg = sat.block(i - s, i + s + 1, j - s, j + s + 1) / (side * side) as f64;
                best = best.max(avg);
            }
            *out = Complex64::new(best, 0.0);
        }
    });
    GridField::new(n, field.half_width(), samples).expect("same grid")
}

/// `M^j f`, the `j`-fold composition of [`hl_maximal`].
pub fn iterate_maximal(field: &GridField, windows: &WindowSet, j: u32) -> Result<GridField> {
    if j == 0 {
        return domain("maximal iteration count must be positive");
    }
    let mut out = hl_maximal(field, windows);
    for _ in 1..j {
        out = hl_maximal(&out, windows);
    }
    Ok(out)
}

/// `max_{eps in set} |T_Q^eps f(z)|` by quadrature; a lower bound for
/// `B*_S f(z)`.
pub fn bstar_square(
    k: u32,
    f: &Integrand,
    z: Complex64,
    eps_set: &EpsilonSet,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let values: Vec<Result<f64>> = eps_set
        .levels()
        .par_iter()
        .map(|&eps| trunc_square(k, f, z, eps, cfg).map(|e| e.value.norm()))
        .collect();
    let mut best: f64 = 0.0;
    for v in values {
        best = best.max(v?);
    }
    Ok(best)
}

/// Number of excluded cell rings for a truncation square of side `eps`:
/// every cell meeting the open square is excluded (outward snapping), so
/// cells with `max(|p|, |q|) <= s` are dropped.
pub fn excluded_radius(eps: f64, h: f64) -> usize {
    let x = 0.5 * (eps / h + 1.0);
    (x.ceil() as usize).saturating_sub(1)
}

/// Square-truncated `B^k` of a grid field by kernel-times-cell summation,
/// `sum_{max(|p|,|q|) > s} b_k(h(p + iq)) f(node - h(p + iq)) h^2` over
/// in-domain cells. Evaluated for all nodes at once as a zero-padded FFT
/// convolution, which is exact up to round-off.
pub fn truncated_grid(k: u32, field: &GridField, eps: f64) -> Result<GridField> {
    let plan = TruncationPlan::new(k, field)?;
    Ok(plan.apply(excluded_radius(eps, field.h())))
}

/// Direct summation at a single node; used to cross-check
/// [`truncated_grid`].
pub fn truncated_direct(k: u32, field: &GridField, i: usize, j: usize, eps: f64) -> Result<Complex64> {
    let spec = KernelSpec::forward(k)?;
    let n = field.n() as i64;
    let h = field.h();
    let s = excluded_radius(eps, h) as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for jj in 0..n {
        for ii in 0..n {
            let p = i as i64 - ii;
            let q = j as i64 - jj;
            if p.abs().max(q.abs()) <= s {
                continue;
            }
            let w = Complex64::new(p as f64 * h, q as f64 * h);
            acc += spec.eval_unchecked(w) * field.get(ii as usize, jj as usize);
        }
    }
    Ok(acc * h * h)
}

/// Shared FFT of the padded field for repeated truncations.
struct TruncationPlan {
    spec: KernelSpec,
    n: usize,
    h: f64,
    half_width: f64,
    fft: Fft2,
    padded_hat: Vec<Complex64>,
}

impl TruncationPlan {
    fn new(k: u32, field: &GridField) -> Result<Self> {
        let spec = KernelSpec::forward(k)?;
        let n = field.n();
        let m = 2 * n;
        let fft = Fft2::new(m);
        let mut padded = vec![Complex64::new(0.0, 0.0); m * m];
        for j in 0..n {
            padded[j * m..j * m + n].copy_from_slice(&field.samples()[j * n..(j + 1) * n]);
        }
        fft.forward(&mut padded);
        Ok(TruncationPlan {
            spec,
            n,
            h: field.h(),
            half_width: field.half_width(),
            fft,
            padded_hat: padded,
        })
    }

    fn apply(&self, s: usize) -> GridField {
        let (n, m, h) = (self.n, 2 * self.n, self.h);
        // kernel at offsets -(n-1)..=(n-1), wrapped into the 2n-periodic array
        let mut kernel = vec![Complex64::new(0.0, 0.0); m * m];
        kernel.par_chunks_mut(m).enumerate().for_each(|(qi, row)| {
            let q = if qi < n { qi as i64 } else { qi as i64 - m as i64 };
            if q.unsigned_abs() as usize >= n {
                return;
            }
            for (pi, slot) in row.iter_mut().enumerate() {
                let p = if pi < n { pi as i64 } else { pi as i64 - m as i64 };
                if p.unsigned_abs() as usize >= n || (p.unsigned_abs().max(q.unsigned_abs()) as usize) <= s {
                    continue;
                }
                *slot = self.spec.eval_unchecked(Complex64::new(p as f64 * h, q as f64 * h)) * (h * h);
            }
        });
        self.fft.forward(&mut kernel);
        let scale = 1.0 / (m * m) as f64;
        kernel
            .par_iter_mut()
            .zip(&self.padded_hat)
            .for_each(|(kv, fv)| *kv = *kv * *fv * scale);
        self.fft.inverse(&mut kernel);
        let mut samples = Vec::with_capacity(n * n);
        for j in 0..n {
            samples.extend_from_slice(&kernel[j * m..j * m + n]);
        }
        GridField::new(n, self.half_width, samples).expect("same grid")
    }
}

/// `max_{eps} |T_Q^eps f|` at every node of a grid field; output is real.
/// Levels snapping to the same cell radius are evaluated once.
pub fn bstar_square_grid(k: u32, field: &GridField, eps_set: &EpsilonSet) -> Result<GridField> {
    let plan = TruncationPlan::new(k, field)?;
    let h = field.h();
    let mut radii: Vec<usize> = eps_set.levels().iter().map(|&e| excluded_radius(e, h)).collect();
    radii.dedup();
    let mut best = vec![0.0f64; field.n() * field.n()];
    for s in radii {
        if s >= field.n() {
            // everything excluded: the truncation is identically zero
            continue;
        }
        let t = plan.apply(s);
        for (b, v) in best.iter_mut().zip(t.samples()) {
            *b = b.max(v.norm());
        }
    }
    GridField::new(
        field.n(),
        field.half_width(),
        best.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}

/// Grid geometry for ratio fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridParams {
    pub n: usize,
    pub half_width: f64,
}

/// Node-wise ratio `B*_S f / M^2(B^k f)` with flagged nodes where the
/// denominator is below [`RATIO_FLOOR`].
#[derive(Clone, Debug)]
pub struct RatioField {
    ratios: GridField,
    flagged: Vec<bool>,
}

/// Denominators below this are flagged instead of divided.
pub const RATIO_FLOOR: f64 = 1e-12;

impl RatioField {
    /// Ratio values (real parts; zero at flagged nodes).
    pub fn ratios(&self) -> &GridField {
        &self.ratios
    }

    pub fn flagged(&self) -> &[bool] {
        &self.flagged
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }

    /// Unflagged ratios at nodes with `|x|, |y| <= fraction * L`, sorted.
    pub fn interior_values(&self, fraction: f64) -> Vec<f64> {
        let bound = fraction * self.ratios.half_width();
        let mut v: Vec<f64> = self
            .ratios
            .iter_nodes()
            .zip(&self.flagged)
            .filter(|((z, _), &flag)| !flag && z.re.abs() <= bound && z.im.abs() <= bound)
            .map(|((_, r), _)| r.re)
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Largest unflagged interior ratio, `None` if all are flagged.
    pub fn max(&self, fraction: f64) -> Option<f64> {
        self.interior_values(fraction).last().copied()
    }

    /// Nearest-rank percentile (`q` in `[0, 1]`) of unflagged interior ratios.
    pub fn percentile(&self, fraction: f64, q: f64) -> Option<f64> {
        let v = self.interior_values(fraction);
        if v.is_empty() {
            return None;
        }
        let rank = ((q.clamp(0.0, 1.0) * v.len() as f64).ceil() as usize).clamp(1, v.len());
        Some(v[rank - 1])
    }
}

/// Cotlar-type ratio field for odd `k`: `f` is sampled on the grid, the
/// numerator is [`bstar_square_grid`] and the denominator `M^2` of the
/// grid transform [`beurling_grid`].
pub fn cotlar_ratio_field(
    k: u32,
    f: &Integrand,
    grid: GridParams,
    windows: &WindowSet,
    eps_set: &EpsilonSet,
) -> Result<RatioField> {
    if k % 2 == 0 {
        return domain("Cotlar ratio fields are defined for odd k");
    }
    if f.support().is_none() && f.decay().is_none() {
        return domain("Cotlar ratio needs a compactly supported or decaying integrand");
    }
    let field = sample(f, grid.n, grid.half_width)?;
    cotlar_ratio_of_samples(k, &field, windows, eps_set)
}

/// [`cotlar_ratio_field`] for an already sampled field.
pub fn cotlar_ratio_of_samples(
    k: u32,
    field: &GridField,
    windows: &WindowSet,
    eps_set: &EpsilonSet,
) -> Result<RatioField> {
    let numerator = bstar_square_grid(k, field, eps_set)?;
    let denominator = iterate_maximal(&beurling_grid(k, field), windows, 2)?;
    let flagged: Vec<bool> = denominator.samples().iter().map(|d| d.re < RATIO_FLOOR).collect();
    let ratios = numerator.zip_with(&denominator, |a, b| {
        if b.re < RATIO_FLOOR {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(a.re / b.re, 0.0)
        }
    })?;
    Ok(RatioField { ratios, flagged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Region;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn random_field(n: usize, l: f64, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..n * n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        GridField::new(n, l, samples).unwrap()
    }

    /// Brute-force maximal function with the same window policy.
    fn brute_maximal(f: &GridField, windows: &WindowSet) -> Vec<f64> {
        let n = f.n();
        let radii = windows.cell_radii(f.h());
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let mut best: f64 = 0.0;
                for &s in &radii {
                    if i < s || j < s || i + s >= n || j + s >= n {
                        continue;
                    }
                    let mut sum = 0.0;
                    for jj in j - s..=j + s {
                        for ii in i - s..=i + s {
                            sum += f.get(ii, jj).norm();
                        }
                    }
                    best = best.max(sum / ((2 * s + 1) * (2 * s + 1)) as f64);
                }
                out[j * n + i] = best;
            }
        }
        out
    }

    #[test]
    fn set_validation() {
        assert!(WindowSet::new(vec![], 0.1).is_err());
        assert!(WindowSet::new(vec![0.2, 0.2], 0.1).is_err());
        assert!(WindowSet::new(vec![0.05, 0.2], 0.1).is_err());
        assert!(EpsilonSet::new(vec![0.0, 1.0]).is_err());
        assert!(EpsilonSet::new(vec![2.0, 1.0]).is_err());
        let e = EpsilonSet::geometric(0.25, 4.0, &[26.0]).unwrap();
        assert_eq!(e.levels()[0], 0.25);
        assert!(e.levels().contains(&26.0));
        assert!((e.levels()[1] / e.levels()[0] - SQRT_2).abs() < 1e-12);
        let w = WindowSet::dyadic(0.0625, 16.0, &[8.0, 3.3]).unwrap();
        assert_eq!(w.half_sides()[0], 0.0625);
        assert_eq!(*w.half_sides().last().unwrap(), 8.0);
        assert!(w.half_sides().contains(&3.3));
    }

    #[test]
    fn matches_brute_force() {
        let f = random_field(32, 2.0, 5);
        let w = WindowSet::dyadic(f.h(), 2.0, &[0.3, 0.55]).unwrap();
        let fast = hl_maximal(&f, &w);
        let slow = brute_maximal(&f, &w);
        for (a, b) in fast.samples().iter().zip(&slow) {
            assert!((a.re - b).abs() < 1e-12);
            assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn constant_and_domination() {
        let f = GridField::from_fn(32, 2.0, |_| c(0.0, -3.0)).unwrap();
        let w = WindowSet::for_grid(&f).unwrap();
        assert!(hl_maximal(&f, &w).samples().iter().all(|v| (v.re - 3.0).abs() < 1e-12));
        let g = random_field(64, 2.0, 9);
        let m = hl_maximal(&g, &w);
        for (a, b) in m.samples().iter().zip(g.samples()) {
            assert!(a.re >= b.norm() - 1e-15);
        }
    }

    #[test]
    fn indicator_of_square_far_away() {
        let f = sample(&Integrand::indicator(Region::unit_square()), 512, 16.0).unwrap();
        let alpha = 7.0;
        let w = WindowSet::dyadic(f.h(), 16.0, &[alpha + 1.0]).unwrap();
        let m = hl_maximal(&f, &w);
        let z = c(alpha, alpha);
        let got = m.value_near(z).unwrap().re;
        let want = 1.0 / ((alpha + 1.0) * (alpha + 1.0));
        assert!((got - want).abs() < 0.05 * want, "{got} vs {want}");

        let m2 = iterate_maximal(&f, &w, 2).unwrap();
        assert!(m2.value_near(z).unwrap().re >= got);
        for (a, b) in m2.samples().iter().zip(m.samples()) {
            assert!(a.re >= b.re - 1e-15);
        }
        assert_eq!(iterate_maximal(&f, &w, 1).unwrap(), m);
        assert!(iterate_maximal(&f, &w, 0).is_err());

        // far-field scaling like 1/|z|^2 between z and 2z
        let z1 = c(3.0, 2.0);
        let ratio = m.value_near(z1).unwrap().re / m.value_near(2.0 * z1).unwrap().re;
        let (i1, j1) = m.nearest_index(z1).unwrap();
        let (i2, j2) = m.nearest_index(2.0 * z1).unwrap();
        let want = m.node(i2, j2).norm_sqr() / m.node(i1, j1).norm_sqr();
        assert!((ratio / want - 1.0).abs() < 0.1, "{ratio} vs {want}");
    }

    #[test]
    fn sublinearity() {
        let f = random_field(32, 2.0, 1);
        let g = random_field(32, 2.0, 2);
        let w = WindowSet::for_grid(&f).unwrap();
        let sum = f.zip_with(&g, |a, b| a + b).unwrap();
        let lhs = hl_maximal(&sum, &w);
        let (mf, mg) = (hl_maximal(&f, &w), hl_maximal(&g, &w));
        for idx in 0..32 * 32 {
            assert!(lhs.samples()[idx].re <= mf.samples()[idx].re + mg.samples()[idx].re + 1e-12);
        }
    }

    #[test]
    fn excluded_radius_snaps_outward() {
        let h = 0.1;
        assert_eq!(excluded_radius(0.05, h), 0);
        assert_eq!(excluded_radius(0.1, h), 0);
        assert_eq!(excluded_radius(0.1001, h), 1);
        assert_eq!(excluded_radius(0.3, h), 1);
        assert_eq!(excluded_radius(0.31, h), 2);
        // the excluded block always covers the truncation square
        for eps in [0.07, 0.23, 0.5, 1.7] {
            let s = excluded_radius(eps, h) as f64;
            assert!((s + 0.5) * h >= 0.5 * eps - 1e-12);
            assert!((s - 0.5) * h < 0.5 * eps);
        }
    }

    #[test]
    fn fft_truncation_matches_direct_sum() {
        let f = random_field(32, 2.0, 4);
        for k in [1, 2, 3] {
            for eps in [0.1, 0.9, 2.5] {
                let t = truncated_grid(k, &f, eps).unwrap();
                for (i, j) in [(0, 0), (5, 17), (31, 3), (16, 16)] {
                    let d = truncated_direct(k, &f, i, j, eps).unwrap();
                    assert!((t.get(i, j) - d).norm() < 1e-11 * (1.0 + d.norm()), "k={k} eps={eps}");
                }
            }
        }
    }

    #[test]
    fn grid_truncation_of_disk_vanishes_at_center() {
        // disk centered on a node: quarter-turn antisymmetry of b_1 on the
        // lattice cancels every truncation exactly
        let shell = GridField::zeros(64, 2.0).unwrap();
        let center = shell.node(32, 32);
        let f = sample(&Integrand::indicator(Region::disk(center, 1.0)), 64, 2.0).unwrap();
        let eps = EpsilonSet::geometric(f.h(), 2.0, &[]).unwrap();
        let b = bstar_square_grid(1, &f, &eps).unwrap();
        assert!(b.get(32, 32).re < 1e-12, "{}", b.get(32, 32));
        assert!(b.get(40, 32).re > 1e-3);
    }

    #[test]
    fn bstar_quadrature_examples() {
        let cfg = QuadratureConfig::default().with_tol(1e-10);
        let disk = Integrand::indicator(Region::disk(c(0.0, 0.0), 1.0));
        let eps = EpsilonSet::new(vec![0.1, 0.5, 1.0, 2.0, 3.0]).unwrap();
        assert!(bstar_square(1, &disk, c(0.0, 0.0), &eps, &cfg).unwrap() < 1e-8);
        // enlarging the set never decreases the result
        let z = c(0.4, 0.1);
        let small = bstar_square(1, &disk, z, &EpsilonSet::new(vec![0.5, 1.0]).unwrap(), &cfg).unwrap();
        let big = bstar_square(1, &disk, z, &eps, &cfg).unwrap();
        assert!(big >= small);
        let single = trunc_square(1, &disk, z, 1.0, &cfg).unwrap().value.norm();
        assert!(big >= single);
    }

    #[test]
    fn cotlar_ratio_examples() {
        let grid = GridParams { n: 64, half_width: 8.0 };
        let h = 2.0 * grid.half_width / grid.n as f64;
        let w = WindowSet::dyadic(h, grid.half_width, &[]).unwrap();
        let eps = EpsilonSet::geometric(h, grid.half_width, &[]).unwrap();
        let gauss = Integrand::new(|z: Complex64| c((-z.norm_sqr()).exp(), 0.0)).with_decay(crate::quadrature::Decay {
            exponent: 8.0,
            constant: 1.0,
            radius: 6.0,
        });
        let r = cotlar_ratio_field(1, &gauss, grid, &w, &eps).unwrap();
        let v = r.interior_values(0.5);
        assert!(!v.is_empty() && v.iter().all(|x| x.is_finite()));
        assert!(r.percentile(0.5, 0.99).unwrap() <= r.max(0.5).unwrap());

        let zero = Integrand::constant(c(0.0, 0.0)).with_support(Region::unit_square());
        let r0 = cotlar_ratio_field(1, &zero, grid, &w, &eps).unwrap();
        assert_eq!(r0.flagged_count(), grid.n * grid.n);
        assert_eq!(r0.max(0.5), None);

        assert!(cotlar_ratio_field(2, &gauss, grid, &w, &eps).is_err());
        let no_hint = Integrand::new(|z: Complex64| z);
        assert!(cotlar_ratio_field(1, &no_hint, grid, &w, &eps).is_err());
    }
}
