//! Python module `beurling_lab`: kernels, exact center values, quadrature,
//! grid transforms, maximal functions and the experiment runner.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use beurling_core::counterexample::{self as cx, CounterexamplePoint, SectorFunction};
use beurling_core::exact::{self, Rational};
use beurling_core::experiments::{self, RunConfig, Subcommand};
use beurling_core::grid::{self, GridField};
use beurling_core::maximal::{self, EpsilonSet, WindowSet};
use beurling_core::quadrature::{self, QuadratureConfig};
use beurling_core::{Complex64, Direction, Error, KernelSpec};

create_exception!(beurling_lab, ConvergenceError, pyo3::exceptions::PyArithmeticError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Convergence { .. } => ConvergenceError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for beurling_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn quad(tol: f64) -> PyResult<QuadratureConfig> {
    let cfg = QuadratureConfig::default().with_tol(tol);
    cfg.validate().py_err()?;
    Ok(cfg)
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((exact::format_rational(q),))
}

/// Kernel `b_k` (or its inverse `conj(b_k)`).
#[pyclass(name = "KernelSpec", frozen)]
struct PyKernelSpec(KernelSpec);

#[pymethods]
impl PyKernelSpec {
    #[new]
    #[pyo3(signature = (order, inverse = false))]
    fn new(order: u32, inverse: bool) -> PyResult<Self> {
        let dir = if inverse { Direction::Inverse } else { Direction::Forward };
        Ok(PyKernelSpec(KernelSpec::new(order, dir).py_err()?))
    }

    #[getter]
    fn order(&self) -> u32 {
        self.0.order()
    }

    #[getter]
    fn inverse(&self) -> bool {
        self.0.direction() == Direction::Inverse
    }

    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        self.0.eval(z).py_err()
    }

    fn __repr__(&self) -> String {
        format!("KernelSpec(order={}, inverse={})", self.order(), self.inverse())
    }
}

/// Samples on the `n x n` midpoint grid over `[-L, L]^2`.
#[pyclass(name = "GridField", frozen)]
struct PyGridField(GridField);

#[pymethods]
impl PyGridField {
    /// `samples` are row-major: entry `j * n + i` belongs to node `(i, j)`.
    #[new]
    fn new(n: usize, half_width: f64, samples: Vec<Complex64>) -> PyResult<Self> {
        Ok(PyGridField(GridField::new(n, half_width, samples).py_err()?))
    }

    /// Samples a Python callable `f(z: complex) -> complex` at every node.
    #[staticmethod]
    fn from_function(n: usize, half_width: f64, f: Bound<'_, PyAny>) -> PyResult<Self> {
        let nodes = GridField::zeros(n, half_width).py_err()?;
        let mut samples = Vec::with_capacity(n * n);
        for (z, _) in nodes.iter_nodes() {
            samples.push(f.call1((z,))?.extract::<Complex64>()?);
        }
        Self::new(n, half_width, samples)
    }

    /// Indicator of the disk `|z| < radius`.
    #[staticmethod]
    #[pyo3(signature = (n, half_width, radius = 1.0))]
    fn disk(n: usize, half_width: f64, radius: f64) -> PyResult<Self> {
        let f = quadrature::Integrand::indicator(quadrature::Region::disk(Complex64::new(0.0, 0.0), radius));
        Ok(PyGridField(grid::sample(&f, n, half_width).py_err()?))
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyGridField(GridField::load(path).py_err()?))
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.0.save(path).py_err()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn half_width(&self) -> f64 {
        self.0.half_width()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.h()
    }

    fn samples(&self) -> Vec<Complex64> {
        self.0.samples().to_vec()
    }

    fn node(&self, i: usize, j: usize) -> PyResult<Complex64> {
        self.check(i, j)?;
        Ok(self.0.node(i, j))
    }

    fn get(&self, i: usize, j: usize) -> PyResult<Complex64> {
        self.check(i, j)?;
        Ok(self.0.get(i, j))
    }

    /// Value at the node nearest to `z`.
    fn value_near(&self, z: Complex64) -> PyResult<Complex64> {
        self.0.value_near(z).py_err()
    }

    fn l2_norm(&self) -> f64 {
        self.0.l2_norm()
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn mean(&self) -> Complex64 {
        self.0.mean()
    }

    /// `B^k` of the field by its Fourier multiplier.
    fn beurling(&self, k: u32) -> Self {
        PyGridField(grid::beurling_grid(k, &self.0))
    }

    fn inverse_beurling(&self, k: u32) -> Self {
        PyGridField(grid::inverse_beurling_grid(k, &self.0))
    }

    /// `M^j` of the field with the default dyadic windows.
    #[pyo3(signature = (j = 1))]
    fn maximal(&self, j: u32) -> PyResult<Self> {
        let windows = WindowSet::for_grid(&self.0).py_err()?;
        Ok(PyGridField(maximal::iterate_maximal(&self.0, &windows, j).py_err()?))
    }

    /// Grid lower bound for `B*_S f` over the default geometric
    /// truncation levels.
    fn bstar_square(&self, k: u32) -> PyResult<Self> {
        let eps = EpsilonSet::geometric(self.0.h(), self.0.half_width(), &[]).py_err()?;
        Ok(PyGridField(maximal::bstar_square_grid(k, &self.0, &eps).py_err()?))
    }

    /// `(max, p99, flagged)` of the ratio `B*_S f / M^2(B^k f)` over the
    /// central box `|x|, |y| <= fraction * L`.
    #[pyo3(signature = (k, fraction = 0.5))]
    fn cotlar_ratio(&self, k: u32, fraction: f64) -> PyResult<(Option<f64>, Option<f64>, usize)> {
        if k % 2 == 0 {
            return Err(PyValueError::new_err("Cotlar ratios are defined for odd k"));
        }
        let h = self.0.h();
        let l = self.0.half_width();
        let windows = WindowSet::dyadic(h, l, &[]).py_err()?;
        let eps = EpsilonSet::geometric(h, l, &[]).py_err()?;
        let r = maximal::cotlar_ratio_of_samples(k, &self.0, &windows, &eps).py_err()?;
        Ok((r.max(fraction), r.percentile(fraction, 0.99), r.flagged_count()))
    }

    fn __len__(&self) -> usize {
        self.0.n() * self.0.n()
    }

    fn __repr__(&self) -> String {
        format!("GridField(n={}, half_width={})", self.0.n(), self.0.half_width())
    }
}

impl PyGridField {
    fn check(&self, i: usize, j: usize) -> PyResult<()> {
        if i >= self.0.n() || j >= self.0.n() {
            return Err(PyValueError::new_err(format!("node ({i}, {j}) outside a {} grid", self.0.n())));
        }
        Ok(())
    }
}

/// `z = alpha (1 + i)` with exclusion square side `2 (alpha + m)`.
#[pyclass(name = "CounterexamplePoint", frozen)]
struct PyCounterexamplePoint(CounterexamplePoint);

#[pymethods]
impl PyCounterexamplePoint {
    #[new]
    #[pyo3(signature = (alpha, m = cx::DEFAULT_M))]
    fn new(alpha: f64, m: f64) -> PyResult<Self> {
        Ok(PyCounterexamplePoint(CounterexamplePoint::new(alpha, m).py_err()?))
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    #[getter]
    fn m(&self) -> f64 {
        self.0.m()
    }

    #[getter]
    fn z(&self) -> Complex64 {
        self.0.z()
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.0.eps()
    }

    /// Square-truncated transform of `B^{-1}(chi_Q0)` at `z`.
    #[pyo3(signature = (tol = 1e-8))]
    fn value(&self, tol: f64) -> PyResult<Complex64> {
        Ok(cx::counterexample_value(&self.0, &quad(tol)?).py_err()?.value)
    }

    /// `|value| / M(chi_Q0)(z)`.
    #[pyo3(signature = (tol = 1e-8))]
    fn ratio(&self, tol: f64) -> PyResult<f64> {
        cx::counterexample_ratio(&self.0, None, &quad(tol)?).py_err()
    }

    fn __repr__(&self) -> String {
        format!("CounterexamplePoint(alpha={}, m={})", self.0.alpha(), self.0.m())
    }
}

/// `S(j)` as a `Fraction`.
#[pyfunction]
fn sum_s(py: Python<'_>, j: u32) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &exact::sum_s(j).py_err()?)
}

#[pyfunction]
fn suma_coefficient(py: Python<'_>, j: u32) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &exact::suma_coefficient(j).py_err()?)
}

#[pyfunction]
fn suma_lhs(py: Python<'_>, j: u32) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &exact::suma_lhs(j).py_err()?)
}

/// `B^k(chi_Q0)(0)` as `(a, b, c, value)` meaning `a + b pi + c / pi`.
#[pyfunction]
fn center_value(py: Python<'_>, k: u32) -> PyResult<Bound<'_, PyAny>> {
    let v = exact::center_value(k).py_err()?;
    let parts = (
        fraction(py, &v.c_const)?,
        fraction(py, &v.c_pi)?,
        fraction(py, &v.c_invpi)?,
        v.numeric(),
    );
    Ok(parts.into_pyobject(py)?.into_any())
}

/// `B^k(chi_Q0)(0)` by quadrature, as `(value, error)`.
#[pyfunction]
#[pyo3(signature = (k, tol = 1e-10))]
fn center_value_quadrature(k: u32, tol: f64) -> PyResult<(Complex64, f64)> {
    let e = quadrature::center_value_quadrature(k, &quad(tol)?).py_err()?;
    Ok((e.value, e.error))
}

/// `h_k(z)`, equal to `-a_k(z)` away from the origin.
#[pyfunction]
#[pyo3(signature = (k, z, tol = 1e-10))]
fn ak_tail(k: u32, z: Complex64, tol: f64) -> PyResult<Complex64> {
    Ok(quadrature::ak_tail(k, z, &quad(tol)?).py_err()?.value)
}

/// `B^{-1}(chi_Q0)(w)` by its moment series, `|w| >= 2 sqrt 2`.
#[pyfunction]
#[pyo3(signature = (w, terms = 40))]
fn far_field_f(w: Complex64, terms: usize) -> PyResult<Complex64> {
    quadrature::far_field_f(w, terms).py_err()
}

/// `B(chi_Q0)(w)` in closed form.
#[pyfunction]
fn square_transform(w: Complex64) -> PyResult<Complex64> {
    quadrature::square_transform_closed_form(w).py_err()
}

/// `M(chi_Q0)(z)` with centered square windows.
#[pyfunction]
fn square_indicator_maximal(z: Complex64) -> f64 {
    cx::square_indicator_maximal(z)
}

/// The sector integral for even `k` and outer radius `R`, with the bound 1
/// on `M^j G(0)`.
#[pyfunction]
#[pyo3(signature = (k, outer, j = 2, tol = 1e-10))]
fn theorem_b_integral(k: u32, outer: f64, j: u32, tol: f64) -> PyResult<(Complex64, f64)> {
    let g = SectorFunction::new(k, outer).py_err()?;
    cx::theorem_b_integral(&g, j, &quad(tol)?).py_err()
}

/// Runs one experiment; returns `(passed, run_dir, manifest)` with the
/// manifest as a dict.
#[pyfunction]
#[pyo3(signature = (subcommand, out, settings = None))]
fn run_experiment<'py>(
    py: Python<'py>,
    subcommand: &str,
    out: PathBuf,
    settings: Option<Bound<'py, PyDict>>,
) -> PyResult<(bool, String, Bound<'py, PyAny>)> {
    let sub: Subcommand = subcommand.parse().py_err()?;
    let mut pairs = Vec::new();
    if let Some(d) = settings {
        for (k, v) in d.iter() {
            pairs.push((k.extract::<String>()?, v.str()?.to_string()));
        }
    }
    let mut cfg = RunConfig::build(sub, pairs.iter().map(|(k, v)| (k.as_str(), v.as_str()))).py_err()?;
    cfg.out = out;
    let (manifest, dir) = py.detach(|| experiments::run(&cfg)).py_err()?;
    let json = serde_json::to_string(&manifest).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let dict = py.import("json")?.getattr("loads")?.call1((json,))?;
    Ok((manifest.passed(), dir.display().to_string(), dict))
}

#[pymodule]
pub fn beurling_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ConvergenceError", m.py().get_type::<ConvergenceError>())?;
    m.add_class::<PyKernelSpec>()?;
    m.add_class::<PyGridField>()?;
    m.add_class::<PyCounterexamplePoint>()?;
    m.add_function(wrap_pyfunction!(sum_s, m)?)?;
    m.add_function(wrap_pyfunction!(suma_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(suma_lhs, m)?)?;
    m.add_function(wrap_pyfunction!(center_value, m)?)?;
    m.add_function(wrap_pyfunction!(center_value_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(ak_tail, m)?)?;
    m.add_function(wrap_pyfunction!(far_field_f, m)?)?;
    m.add_function(wrap_pyfunction!(square_transform, m)?)?;
    m.add_function(wrap_pyfunction!(square_indicator_maximal, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_b_integral, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
