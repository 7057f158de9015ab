//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every line is printed; exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_6, PI};
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use beurling_core::counterexample::{theorem_b_integral, SectorFunction};
use beurling_core::exact::{center_value, int_i, sum_s, suma_coefficient, suma_lhs, ExactScalar, IntegralKey};
use beurling_core::experiments::{run, RunConfig, RunManifest, Subcommand};
use beurling_core::quadrature::{
    ak_tail, center_value_quadrature, geometric_split_residual, Integrand, QuadratureConfig, Region,
};
use beurling_core::KernelSpec;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn q(tol: f64) -> QuadratureConfig {
    QuadratureConfig::default().with_tol(tol)
}

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn run_in(dir: &Path, sub: Subcommand, pairs: &[(&str, &str)]) -> (RunManifest, std::path::PathBuf, Duration) {
    let mut cfg = RunConfig::build(sub, pairs.iter().copied()).expect("valid config");
    cfg.out = dir.to_path_buf();
    let start = Instant::now();
    let (m, d) = run(&cfg).expect("run completes");
    (m, d, start.elapsed())
}

fn verdicts(m: &RunManifest, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        match m.verdict(name) {
            Some(v) => {
                ok &= v.passed;
                parts.push(format!("{name}={} ({})", if v.passed { "ok" } else { "FAILED" }, v.actual));
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    (ok, parts.join(", "))
}

fn exact_identities() -> Outcome {
    let start = Instant::now();
    let minus_one = BigRational::from_integer((-1).into());
    let mut ok = true;
    for j in 1..=8 {
        ok &= suma_lhs(j).unwrap() == minus_one;
        ok &= suma_coefficient(j).unwrap() * sum_s(j).unwrap() == minus_one;
    }
    let elapsed = start.elapsed();
    outcome(
        ok && elapsed < Duration::from_secs(1),
        format!("suma_lhs and coefficient * S equal -1 for j = 1..8: {ok}; {elapsed:?} (limit 1 s)"),
    )
}

/// Composite Simpson rule with `2 * panels` subintervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn recurrence_table() -> Outcome {
    let mut worst: f64 = 0.0;
    for (d, n) in [(3u32, 1u32), (3, 2)] {
        let exact = int_i(IntegralKey::new(d, n).unwrap()).numeric();
        let oracle = simpson(|x| x.powi(2 * n as i32) / (x * x + 1.0).powi(d as i32), 0.0, 1.0, 20_000);
        worst = worst.max((exact - oracle).abs());
    }
    let quarter = ExactScalar::pi_multiple(BigRational::new(1.into(), 4.into()));
    let exact_pi4 = int_i(IntegralKey::new(1, 0).unwrap()) == quarter;
    outcome(
        worst <= 1e-10 && exact_pi4,
        format!("I(3,1), I(3,2) vs Simpson: max diff {worst:.3e} (limit 1e-10); I(1,0) = pi/4 exactly: {exact_pi4}"),
    )
}

fn center_dichotomy() -> Outcome {
    let cfg = q(1e-10);
    let odd = [1, 3]
        .iter()
        .map(|&k| center_value_quadrature(k, &cfg).unwrap().value.norm())
        .fold(0.0, f64::max);
    let even = center_value_quadrature(2, &cfg).unwrap().value;
    let want = 1.0 - 4.0 / PI;
    let even_err = (even - want).norm();
    let exact2 = (center_value(2).unwrap().numeric() - want).abs();
    let nonzero4 = !center_value(4).unwrap().is_zero();
    outcome(
        odd <= 1e-8 && even_err <= 1e-6 && exact2 <= 1e-15 && nonzero4,
        format!(
            "max |center(1,3)| = {odd:.3e} (limit 1e-8); center(2) quadrature error {even_err:.3e} (limit 1e-6); center(4) nonzero: {nonzero4}"
        ),
    )
}

fn decay() -> Outcome {
    let start = Instant::now();
    let mut monotone = true;
    for theta in [FRAC_PI_6, 1.0] {
        let mut prev = f64::INFINITY;
        for r in [4.0f64, 8.0, 16.0, 32.0, 64.0] {
            let z = Complex64::from_polar(r, theta);
            let h = ak_tail(1, z, &q(1e-6 * r.powi(-4))).unwrap().value;
            let scaled = h.norm() * r.powi(3);
            monotone &= scaled <= prev;
            prev = scaled;
        }
    }
    let z = c(16.0, 0.0);
    let h2 = ak_tail(2, z, &q(1e-12)).unwrap().value;
    let lead = KernelSpec::forward(2).unwrap().eval(z).unwrap().conj() * (1.0 - 4.0 / PI);
    let rel = (h2 - lead).norm() / lead.norm();
    let elapsed = start.elapsed();
    outcome(
        monotone && rel <= 0.1 && elapsed < Duration::from_secs(120),
        format!("|a_1| |z|^3 non-increasing on two rays: {monotone}; k = 2 tail error {rel:.3e} (limit 0.1); {elapsed:?} (limit 2 min)"),
    )
}

fn truncation_geometry() -> Outcome {
    let tol = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let disk = Integrand::indicator(Region::disk(c(0.0, 0.0), 1.0));
    let square = Integrand::indicator(Region::unit_square());
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let k = rng.random_range(1..=3u32);
        let z = Complex64::from_polar(rng.random_range(0.0..4.0), rng.random_range(0.0..2.0 * PI));
        let eps = rng.random_range(0.2..3.0);
        let f = if case % 2 == 0 { &disk } else { &square };
        worst = worst.max(geometric_split_residual(k, f, z, eps, &q(tol)).unwrap());
    }
    outcome(worst <= 3.0 * tol, format!("max residual over 20 random cases {worst:.3e} (limit 3e-8)"))
}

fn spectral(dir: &Path) -> Outcome {
    let (m, _, elapsed) = run_in(dir, Subcommand::SpectralValidate, &[("n", "1024"), ("half_width", "4")]);
    let (ok, detail) = verdicts(&m, &["parseval_n1024", "interior_n1024", "exterior_n1024"]);
    outcome(ok && elapsed < Duration::from_secs(30), format!("{detail}; {elapsed:?} (limit 30 s)"))
}

fn counterexample(dir: &Path) -> (Outcome, std::path::PathBuf) {
    let (m, d, elapsed) = run_in(dir, Subcommand::Counterexample, &[("alphas", "8,16,32,64,128"), ("m", "5")]);
    let (ok, detail) = verdicts(
        &m,
        &["ratio_strictly_increasing", "ratio_growth_factor", "log_fit_r_squared", "refinement_alpha_8"],
    );
    (
        outcome(ok && elapsed < Duration::from_secs(300), format!("{detail}; {elapsed:?} (limit 5 min)")),
        d,
    )
}

fn cotlar(dir: &Path) -> (Outcome, std::path::PathBuf) {
    let (m, d, _) = run_in(dir, Subcommand::Cotlar, &[("ks", "1,3"), ("n", "256,512")]);
    let names: Vec<&str> = m
        .verdicts
        .iter()
        .filter(|v| v.name.starts_with("stable_"))
        .map(|v| v.name.as_str())
        .collect();
    let ok = names.len() == 8 && m.verdicts.iter().filter(|v| v.name.starts_with("stable_")).all(|v| v.passed);
    let worst = m.summary.get("worst_refinement_change").copied().unwrap_or(f64::NAN);
    (
        outcome(ok, format!("{} battery cases stable; largest N=256 to N=512 change x{worst:.3} (limit x1.5)", names.len())),
        d,
    )
}

fn theorem_b() -> Outcome {
    let cfg = q(1e-10);
    let value = |r: f64| {
        let (v, bound) = theorem_b_integral(&SectorFunction::new(2, r).unwrap(), 2, &cfg).unwrap();
        v.re / bound
    };
    let mut worst: f64 = 0.0;
    for r in [30.0f64, 300.0] {
        worst = worst.max((value(r) / (3f64.sqrt() * (r / 3.0).ln()) - 1.0).abs());
    }
    let big = value(3000.0);
    outcome(
        worst <= 0.02 && big > 4.0,
        format!("relative error vs sqrt(3) log(R/3) at R = 30, 300: {worst:.3e} (limit 0.02); quotient at R = 3000: {big:.4} (limit > 4)"),
    )
}

fn csv_bodies(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism(root: &Path, earlier: &[(Subcommand, std::path::PathBuf)]) -> Outcome {
    let mut mismatched = Vec::new();
    let mut compared = 0;
    let fresh = [
        Subcommand::Identities,
        Subcommand::Lemma,
        Subcommand::Decay,
        Subcommand::TheoremB,
        Subcommand::SpectralValidate,
    ];
    let mut pairs: Vec<(Subcommand, std::path::PathBuf, std::path::PathBuf)> = Vec::new();
    for sub in fresh {
        let (_, a, _) = run_in(root, sub, &[]);
        let (_, b, _) = run_in(root, sub, &[]);
        pairs.push((sub, a, b));
    }
    for (sub, first) in earlier {
        let pairs_cfg: &[(&str, &str)] = match sub {
            Subcommand::Counterexample => &[("alphas", "8,16,32,64,128"), ("m", "5")],
            _ => &[("ks", "1,3"), ("n", "256,512")],
        };
        let (_, again, _) = run_in(root, *sub, pairs_cfg);
        pairs.push((*sub, first.clone(), again));
    }
    for (sub, a, b) in &pairs {
        let (x, y) = (csv_bodies(a), csv_bodies(b));
        compared += x.len();
        if x.is_empty() || x != y {
            mismatched.push(sub.to_string());
        }
    }
    outcome(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("{compared} CSV files byte-identical across reruns of all 7 subcommands")
        } else {
            format!("differences in {}", mismatched.join(", "))
        },
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let root = tmp.path();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "exact center-value identity", exact_identities()));
    results.push((2, "integral recurrence table", recurrence_table()));
    results.push((3, "center value dichotomy", center_dichotomy()));
    results.push((4, "decay of a_k", decay()));
    results.push((5, "square/disk truncation geometry", truncation_geometry()));
    results.push((6, "spectral validation on the unit disk", spectral(root)));
    let (out7, dir7) = counterexample(root);
    results.push((7, "counterexample growth signature", out7));
    let (out8, dir8) = cotlar(root);
    results.push((8, "Cotlar ratio stability", out8));
    results.push((9, "sector functions for even k", theorem_b()));
    let earlier = [(Subcommand::Counterexample, dir7), (Subcommand::Cotlar, dir8)];
    results.push((10, "deterministic outputs", determinism(root, &earlier)));

    let mut failed = 0;
    for (n, name, o) in &results {
        let mark = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        println!("{mark} criterion {n:>2} {name}: {}", o.detail);
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
