use std::f64::consts::{FRAC_PI_6, PI};

use num_complex::Complex64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Recorder, RunConfig};
use crate::counterexample::{
    counterexample_value, counterexample_value_at, counterexample_value_reflected, inverse_square_integrand,
    square_indicator_maximal, square_indicator_maximal2, theorem_b_integral, CounterexamplePoint, SectorFunction,
};
use crate::error::Result;
use crate::exact::{center_value, format_rational, sum_s, suma_coefficient, suma_lhs, Rational};
use crate::grid::{beurling_grid, sample};
use crate::kernel::KernelSpec;
use crate::maximal::{bstar_square, cotlar_ratio_field, EpsilonSet, GridParams, WindowSet};
use crate::quadrature::{ak_tail, center_value_quadrature, Decay, Integrand, QuadratureConfig, Region};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn quadrature(cfg: &RunConfig) -> QuadratureConfig {
    QuadratureConfig::default().with_tol(cfg.tol).with_max_depth(cfg.max_depth)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub(super) fn identities(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let minus_one = -Rational::one();
    let rows = cfg
        .js
        .par_iter()
        .map(|&j| Ok((j, sum_s(j)?, suma_coefficient(j)?, suma_lhs(j)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut bad_products = Vec::new();
    let mut bad_lhs = Vec::new();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|(j, s, c, lhs)| {
            let product = c * s;
            if product != minus_one {
                bad_products.push(j.to_string());
            }
            if *lhs != minus_one {
                bad_lhs.push(j.to_string());
            }
            vec![
                j.to_string(),
                s.numer().to_string(),
                s.denom().to_string(),
                c.numer().to_string(),
                c.denom().to_string(),
                format_rational(&product),
                format_rational(lhs),
            ]
        })
        .collect();
    rec.table(
        "identities.csv",
        &["j", "S_num", "S_den", "coefficient_num", "coefficient_den", "product", "suma_lhs"],
        &table,
    )?;
    let list = |v: &[String]| if v.is_empty() { "all -1".to_string() } else { format!("differs at j = {}", v.join(",")) };
    rec.check("product_minus_one", "-1", list(&bad_products), "exact", bad_products.is_empty());
    rec.check("suma_lhs_minus_one", "-1", list(&bad_lhs), "exact", bad_lhs.is_empty());
    for (j, want) in [(1u32, Rational::new((-2).into(), 3.into())), (2, Rational::new((-16).into(), 35.into()))] {
        if let Some((_, s, _, _)) = rows.iter().find(|r| r.0 == j) {
            rec.check(&format!("s_{j}"), format_rational(&want), format_rational(s), "exact", *s == want);
        }
    }
    Ok(())
}

pub(super) fn lemma(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let q = quadrature(cfg);
    let rows = cfg
        .ks
        .par_iter()
        .map(|&k| Ok((k, center_value(k)?, center_value_quadrature(k, &q)?)))
        .collect::<Result<Vec<_>>>()?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|(k, exact, numeric)| {
            vec![
                k.to_string(),
                exact.to_string(),
                num(numeric.value.re),
                num(numeric.value.im),
                num((numeric.value - exact.numeric()).norm()),
            ]
        })
        .collect();
    rec.table("lemma.csv", &["k", "exact", "numeric_re", "numeric_im", "abs_difference"], &table)?;

    let (odd, even): (Vec<_>, Vec<_>) = rows.iter().partition(|r| r.0 % 2 == 1);
    if !odd.is_empty() {
        let all_zero = odd.iter().all(|r| r.1.is_zero());
        rec.check("odd_exact_zero", "0", if all_zero { "0" } else { "nonzero" }, "exact", all_zero);
        let worst = odd.iter().map(|r| r.2.value.norm()).fold(0.0, f64::max);
        rec.check("odd_numeric_vanishes", "0", num(worst), "1e-8", worst <= 1e-8);
    }
    if !even.is_empty() {
        let worst = even.iter().map(|r| (r.2.value - r.1.numeric()).norm()).fold(0.0, f64::max);
        rec.check("even_numeric_matches_exact", "0", num(worst), "1e-6", worst <= 1e-6);
        let nonzero = even.iter().all(|r| !r.1.is_zero());
        rec.check("even_exact_nonzero", "nonzero", yes_no(nonzero), "exact", nonzero);
    }
    Ok(())
}

/// Rays used by the decay experiment.
const DECAY_RAYS: [f64; 2] = [FRAC_PI_6, 1.0];

/// `|z|^-4` for odd `k` (the first moment of `Q0` vanishes), `|z|^-2` for even.
fn decay_scale(k: u32, modulus: f64) -> f64 {
    if k % 2 == 1 {
        modulus.powi(-4)
    } else {
        modulus.powi(-2)
    }
}

pub(super) fn decay(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let q = quadrature(cfg);
    let mut points = Vec::new();
    for &k in &cfg.ks {
        for &theta in &DECAY_RAYS {
            for &r in &cfg.moduli {
                points.push((k, theta, r));
            }
        }
    }
    let values = points
        .par_iter()
        .map(|&(k, theta, r)| {
            let z = Complex64::from_polar(r, theta);
            Ok(ak_tail(k, z, &q.with_tol(cfg.tol * decay_scale(k, r)))?.value)
        })
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<Vec<String>> = points
        .iter()
        .zip(&values)
        .map(|(&(k, theta, r), h)| vec![k.to_string(), num(r), num(theta), num(h.norm()), num(h.norm() * r.powi(3))])
        .collect();
    rec.table("decay.csv", &["k", "modulus", "direction", "abs_a", "abs_a_times_modulus_cubed"], &rows)?;

    for &k in cfg.ks.iter().filter(|k| *k % 2 == 1) {
        let mut violations = Vec::new();
        let mut worst_step: f64 = 0.0;
        for &theta in &DECAY_RAYS {
            let mut seq: Vec<(f64, f64)> = points
                .iter()
                .zip(&values)
                .filter(|((kk, t, _), _)| *kk == k && *t == theta)
                .map(|((_, _, r), h)| (*r, h.norm() * r.powi(3)))
                .collect();
            seq.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in seq.windows(2) {
                worst_step = worst_step.max(w[1].1 / w[0].1);
                if w[1].1 > w[0].1 {
                    violations.push(format!("{}@{}", num(w[1].0), num(theta)));
                }
            }
        }
        let actual = if violations.is_empty() {
            format!("largest step ratio {}", num(worst_step))
        } else {
            format!("increases at {}", violations.join(";"))
        };
        rec.check(&format!("nonincreasing_k{k}"), "non-increasing |a_k| |z|^3", actual, "exact order", violations.is_empty());
    }

    let mut tail_rows = Vec::new();
    for &k in cfg.ks.iter().filter(|k| *k % 2 == 0) {
        let spec = KernelSpec::forward(k)?;
        let center = center_value(k)?.numeric();
        let mut worst: f64 = 0.0;
        for ((kk, theta, r), h) in points.iter().zip(&values) {
            if *kk != k {
                continue;
            }
            let z = Complex64::from_polar(*r, *theta);
            let lead = spec.eval(z)?.conj() * center;
            let rel = (h - lead).norm() / lead.norm();
            if *r >= 16.0 {
                worst = worst.max(rel);
            }
            tail_rows.push(vec![
                k.to_string(),
                num(*r),
                num(*theta),
                num(h.re),
                num(h.im),
                num(lead.re),
                num(lead.im),
                num(rel),
            ]);
        }
        if cfg.moduli.iter().any(|&r| r >= 16.0) {
            rec.check(&format!("tail_asymptotic_k{k}"), "h_k ~ conj(b_k) B^k(chi_Q0)(0) for |z| >= 16", num(worst), "0.1 relative", worst <= 0.1);
        }
    }
    if !tail_rows.is_empty() {
        rec.table(
            "tail.csv",
            &["k", "modulus", "direction", "h_re", "h_im", "lead_re", "lead_im", "rel_err"],
            &tail_rows,
        )?;
    }

    let k = cfg.ks[0];
    let z = Complex64::from_polar(cfg.moduli[0], DECAY_RAYS[0]);
    let tol = cfg.tol * decay_scale(k, cfg.moduli[0]);
    let a = ak_tail(k, z, &q.with_tol(tol))?.value;
    let b = ak_tail(k, z.conj(), &q.with_tol(tol))?.value;
    let diff = (b - a.conj()).norm();
    rec.check("conjugation_symmetry", "h_k(conj z) = conj h_k(z)", num(diff), num(tol), diff <= tol);
    Ok(())
}

/// Least-squares line `y = intercept + slope x` with its coefficient of
/// determination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

const PLOT_SCRIPT: &str = r#"# Plots ratio against log|z| from counterexample.csv.
# Usage: python3 plot_counterexample.py [counterexample.csv]
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "counterexample.csv"
with open(path, newline="") as f:
    rows = list(csv.DictReader(f))
x = [float(r["log_abs_z"]) for r in rows]
y = [float(r["ratio"]) for r in rows]
plt.plot(x, y, "o-")
plt.xlabel("log|z|")
plt.ylabel("|T f(z)| / M(chi_Q0)(z)")
plt.grid(True)
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
"#;

pub(super) fn counterexample(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let q = quadrature(cfg);
    let points = cfg
        .alphas
        .iter()
        .map(|&a| CounterexamplePoint::new(a, cfg.m))
        .collect::<Result<Vec<_>>>()?;
    struct Row {
        alpha: f64,
        z: Complex64,
        value: Complex64,
        m1: f64,
        m2: f64,
        wide: Option<Complex64>,
    }
    let rows = points
        .iter()
        .map(|p| {
            let value = counterexample_value(p, &q)?.value;
            let wide = if p.alpha() <= 128.0 {
                Some(counterexample_value_at(p, 40.0, &q)?.value)
            } else {
                None
            };
            Ok(Row {
                alpha: p.alpha(),
                z: p.z(),
                value,
                m1: square_indicator_maximal(p.z()),
                m2: square_indicator_maximal2(p.z(), &q)?,
                wide,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let ratio = |r: &Row| r.value.norm() / r.m1;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.alpha),
                num(r.z.norm()),
                num(r.value.re),
                num(r.value.im),
                num(r.value.norm()),
                num(r.m1),
                num(ratio(r)),
                num(r.z.norm().ln()),
            ]
        })
        .collect();
    rec.table(
        "counterexample.csv",
        &["alpha", "abs_z", "value_re", "value_im", "abs_value", "M_exact", "ratio", "log_abs_z"],
        &table,
    )?;
    let m2_table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![num(r.alpha), num(r.m2), num(r.value.norm() / r.m2)])
        .collect();
    rec.table("counterexample_m2.csv", &["alpha", "M2", "ratio_m2"], &m2_table)?;
    rec.text_file("plot_counterexample.py", PLOT_SCRIPT)?;

    let ratios: Vec<f64> = rows.iter().map(ratio).collect();
    let logs: Vec<f64> = rows.iter().map(|r| r.z.norm().ln()).collect();
    let list = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";");

    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    rec.check("ratio_strictly_increasing", "strictly increasing in alpha", list(&ratios), "exact order", increasing);
    let growth = ratios.last().unwrap() / ratios[0];
    rec.check("ratio_growth_factor", ">= 1.5", num(growth), "-", growth >= 1.5);

    let fit = linear_fit(&logs, &ratios);
    let (slope, r2) = fit.map_or((f64::NAN, f64::NAN), |f| (f.slope, f.r_squared));
    if let Some(f) = fit {
        rec.note("fit_slope", f.slope);
        rec.note("fit_intercept", f.intercept);
        rec.note("fit_r_squared", f.r_squared);
    }
    rec.check("log_fit_slope_positive", "> 0", num(slope), "-", slope > 0.0);
    rec.check("log_fit_r_squared", ">= 0.95", num(r2), "-", r2 >= 0.95);

    if let (Some(i8), Some(i64)) = (
        rows.iter().position(|r| r.alpha == 8.0),
        rows.iter().position(|r| r.alpha == 64.0),
    ) {
        rec.check(
            "ratio_64_exceeds_ratio_8",
            format!("> {}", num(ratios[i8])),
            num(ratios[i64]),
            "-",
            ratios[i64] > ratios[i8],
        );
    }
    let normalized: Vec<f64> = ratios.iter().zip(&logs).map(|(r, l)| r / l).collect();
    let spread = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) / v.iter().cloned().fold(f64::MAX, f64::min);
    let band = spread(&normalized);
    rec.check("log_normalized_ratio_band", "max/min <= 2", num(band), "-", band <= 2.0);
    let m2_ratios: Vec<f64> = rows.iter().map(|r| r.value.norm() / r.m2).collect();
    let band2 = spread(&m2_ratios);
    rec.check("m2_ratio_bounded", "max/min <= 3", num(band2), "-", band2 <= 3.0);

    let tails: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.wide.map(|w| (w - r.value).norm() / r.value.norm()))
        .collect();
    if !tails.is_empty() {
        let worst = tails.iter().cloned().fold(0.0, f64::max);
        rec.check("outer_radius_20_vs_40", "<= 0.01 relative", num(worst), "0.01", worst <= 0.01);
    }

    let p = &points[0];
    let base = rows[0].value;
    let refined = counterexample_value(p, &q.with_max_depth(2 * cfg.max_depth).with_tol(cfg.tol / 16.0))?.value;
    let change = (refined - base).norm() / base.norm();
    rec.check(
        &format!("refinement_alpha_{}", p.alpha()),
        "<= 1e-6 relative",
        num(change),
        "1e-6",
        change <= 1e-6,
    );

    let reflected = counterexample_value_reflected(p, &q)?.value;
    let rdiff = (reflected.norm() - base.norm()).abs() / base.norm();
    rec.check("reflection_invariance", "equal ratios", num(rdiff), "1e-6", rdiff <= 1e-6);

    let zn2 = p.z().norm_sqr();
    let set = EpsilonSet::new(vec![p.eps(), 1.5 * p.eps()])?;
    let f = inverse_square_integrand()?;
    let bound = bstar_square(1, &f, p.z(), &set, &q.with_tol(cfg.tol / zn2))?;
    let slack = 2.0 * cfg.tol / zn2;
    rec.check(
        "bstar_dominates_value",
        format!(">= {}", num(base.norm())),
        num(bound),
        num(slack),
        bound >= base.norm() - slack,
    );
    Ok(())
}

/// Names of the Cotlar test battery, in output order.
pub const BATTERY: [&str; 4] = ["gaussian", "disk", "shifted_square", "bandlimited"];

/// The Cotlar test battery: a Gaussian bump, `chi_D(0,1)`, `chi_Q0` shifted
/// by `0.3 + 0.2i`, and a seeded sum of eight plane waves with frequencies
/// in `|omega| <= 4` under a Gaussian envelope.
pub fn battery(name: &str, seed: u64) -> Option<Integrand> {
    let gauss_decay = Decay {
        exponent: 8.0,
        constant: 8.0,
        radius: 6.0,
    };
    match name {
        "gaussian" => Some(Integrand::new(|z: Complex64| Complex64::new((-z.norm_sqr()).exp(), 0.0)).with_decay(gauss_decay)),
        "disk" => Some(Integrand::indicator(Region::disk(Complex64::new(0.0, 0.0), 1.0))),
        "shifted_square" => Some(Integrand::indicator(Region::square(Complex64::new(0.3, 0.2), 2.0))),
        "bandlimited" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let waves: Vec<(f64, Complex64, f64)> = (0..8)
                .map(|_| {
                    let amp = rng.random_range(-1.0..1.0);
                    let omega = Complex64::from_polar(rng.random_range(0.0..4.0), rng.random_range(0.0..2.0 * PI));
                    let phase = rng.random_range(0.0..2.0 * PI);
                    (amp, omega, phase)
                })
                .collect();
            Some(
                Integrand::new(move |z: Complex64| {
                    let s: f64 = waves
                        .iter()
                        .map(|(a, w, p)| a * (w.re * z.re + w.im * z.im + p).cos())
                        .sum();
                    Complex64::new(s * (-z.norm_sqr()).exp(), 0.0)
                })
                .with_decay(gauss_decay),
            )
        }
        _ => None,
    }
}

/// Ratio statistics are taken over `|x|, |y| <= INTERIOR * L`.
const INTERIOR: f64 = 0.5;

pub(super) fn cotlar(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let mut sizes = cfg.n.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let l = cfg.half_width;
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for &k in &cfg.ks {
        for name in BATTERY {
            let f = battery(name, cfg.seed).expect("battery names are known");
            for &n in &sizes {
                let h = 2.0 * l / n as f64;
                let windows = WindowSet::dyadic(h, l, &[])?;
                let eps = EpsilonSet::geometric(h, l, &[])?;
                let r = cotlar_ratio_field(k, &f, GridParams { n, half_width: l }, &windows, &eps)?;
                let max = r.max(INTERIOR).unwrap_or(f64::NAN);
                let p99 = r.percentile(INTERIOR, 0.99).unwrap_or(f64::NAN);
                rows.push(vec![
                    k.to_string(),
                    name.to_string(),
                    n.to_string(),
                    num(l),
                    num(max),
                    num(p99),
                    r.flagged_count().to_string(),
                ]);
                maxima.push((k, name, n, max));
            }
        }
    }
    rec.table("cotlar.csv", &["k", "function", "n", "half_width", "max_ratio", "p99_ratio", "flagged"], &rows)?;

    let mut worst_change: f64 = 1.0;
    for &k in &cfg.ks {
        for name in BATTERY {
            let seq: Vec<f64> = maxima
                .iter()
                .filter(|m| m.0 == k && m.1 == name)
                .map(|m| m.3)
                .collect();
            let finite = seq.iter().all(|m| m.is_finite() && *m > 0.0);
            let change = seq
                .windows(2)
                .map(|w| (w[1] / w[0]).max(w[0] / w[1]))
                .fold(1.0, f64::max);
            worst_change = worst_change.max(change);
            let actual = format!("max ratios {}", seq.iter().map(|m| num(*m)).collect::<Vec<_>>().join(";"));
            rec.check(
                &format!("stable_k{k}_{name}"),
                "finite max ratio changing by at most x1.5 under refinement",
                actual,
                "1.5",
                finite && change <= 1.5,
            );
        }
    }
    rec.note("worst_refinement_change", worst_change);

    let n = sizes[0];
    let h = 2.0 * l / n as f64;
    let zero = Integrand::constant(Complex64::new(0.0, 0.0)).with_support(Region::unit_square());
    let r = cotlar_ratio_field(
        cfg.ks[0],
        &zero,
        GridParams { n, half_width: l },
        &WindowSet::dyadic(h, l, &[])?,
        &EpsilonSet::geometric(h, l, &[])?,
    )?;
    let all = r.flagged_count() == n * n;
    rec.check("zero_field_all_flagged", (n * n).to_string(), r.flagged_count().to_string(), "exact", all);
    Ok(())
}

pub(super) fn theorem_b(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let q = quadrature(cfg);
    let mut points = Vec::new();
    for &k in &cfg.ks {
        for &r in &cfg.radii {
            points.push((k, r));
        }
    }
    let values = points
        .par_iter()
        .map(|&(k, r)| theorem_b_integral(&SectorFunction::new(k, r)?, cfg.j, &q))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .zip(&values)
        .map(|(&(k, r), (v, bound))| {
            vec![k.to_string(), num(r), num(v.re), num(v.im), num(*bound), num(v.re / bound)]
        })
        .collect();
    rec.table("theoremb.csv", &["k", "R", "integral_re", "integral_im", "bound_Mj", "quotient"], &rows)?;

    let sqrt3 = 3f64.sqrt();
    for &k in &cfg.ks {
        let mut seq: Vec<(f64, f64)> = points
            .iter()
            .zip(&values)
            .filter(|((kk, _), _)| *kk == k)
            .map(|((_, r), (v, bound))| (*r, v.re / bound))
            .collect();
        seq.sort_by(|a, b| a.0.total_cmp(&b.0));
        let worst = seq
            .iter()
            .map(|(r, v)| (v / (sqrt3 * (r / 3.0).ln()) - 1.0).abs())
            .fold(0.0, f64::max);
        rec.check(&format!("closed_form_k{k}"), "sqrt(3) log(R/3)", num(worst), "0.02 relative", worst <= 0.02);
        let increasing = seq.windows(2).all(|w| w[1].1 > w[0].1);
        rec.check(&format!("increasing_in_r_k{k}"), "strictly increasing", yes_no(increasing), "exact order", increasing);
        let top = seq.last().map_or(f64::NAN, |s| s.1);
        for t in [1.0, 2.0, 4.0] {
            rec.check(&format!("exceeds_{t}_k{k}"), format!("> {t}"), num(top), "-", top > t);
        }
    }
    let bound_ok = values.iter().all(|(_, b)| *b <= 1.0);
    rec.check("bound_mj_at_most_one", "<= 1", yes_no(bound_ok), "exact", bound_ok);
    Ok(())
}

/// Spectral validation statistics for `chi_D(0,1)` on one grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(super) struct SpectralStats {
    pub parseval_defect: f64,
    pub interior_max_err: f64,
    pub exterior_rel_l2_err: f64,
}

/// Interior nodes are `|z| <= 0.8`, exterior nodes `1.2 <= |z| <= 2`.
pub(super) fn disk_spectral_stats(n: usize, half_width: f64) -> Result<SpectralStats> {
    let disk = sample(&Integrand::indicator(Region::disk(Complex64::new(0.0, 0.0), 1.0)), n, half_width)?;
    let b = beurling_grid(1, &disk);
    let mean = disk.mean();
    let centered = disk.map(|v| v - mean);
    let parseval_defect = (b.l2_norm() - centered.l2_norm()).abs() / centered.l2_norm();
    let mut interior: f64 = 0.0;
    let (mut err2, mut ref2) = (0.0, 0.0);
    for (z, v) in b.iter_nodes() {
        let r = z.norm();
        if r <= 0.8 {
            interior = interior.max(v.norm());
        } else if (1.2..=2.0).contains(&r) {
            let want = -(z * z).inv();
            err2 += (v - want).norm_sqr();
            ref2 += want.norm_sqr();
        }
    }
    Ok(SpectralStats {
        parseval_defect,
        interior_max_err: interior,
        exterior_rel_l2_err: (err2 / ref2).sqrt(),
    })
}

pub(super) fn spectral_validate(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let mut rows = Vec::new();
    let mut stats = Vec::new();
    for &n in &cfg.n {
        let s = disk_spectral_stats(n, cfg.half_width)?;
        rows.push(vec![
            n.to_string(),
            num(cfg.half_width),
            num(s.parseval_defect),
            num(s.interior_max_err),
            num(s.exterior_rel_l2_err),
        ]);
        stats.push((n, s));
    }
    rec.table(
        "spectral.csv",
        &["n", "half_width", "parseval_defect", "interior_max_err", "exterior_rel_l2_err"],
        &rows,
    )?;
    for (n, s) in stats {
        rec.check(&format!("parseval_n{n}"), "0", num(s.parseval_defect), "1e-10", s.parseval_defect <= 1e-10);
        rec.check(&format!("interior_n{n}"), "0", num(s.interior_max_err), "0.05", s.interior_max_err <= 0.05);
        rec.check(
            &format!("exterior_n{n}"),
            "-1/z^2",
            num(s.exterior_rel_l2_err),
            "0.05 relative L2",
            s.exterior_rel_l2_err <= 0.05,
        );
    }
    Ok(())
}
