use std::ffi::CString;

use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn run(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let module = wrap_pymodule!(beurling_lab::beurling_lab)(py);
        let globals = PyDict::new(py);
        globals.set_item("bl", module).unwrap();
        let code = CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn exact_values_are_fractions() {
    run(r#"
from fractions import Fraction
import math
assert bl.sum_s(1) == Fraction(-2, 3)
assert bl.sum_s(2) * bl.suma_coefficient(2) == -1
assert all(bl.suma_lhs(j) == -1 for j in range(1, 6))
a, b, c, v = bl.center_value(2)
assert (a, b, c) == (1, 0, -4)
assert abs(v - (1 - 4 / math.pi)) < 1e-15
assert bl.center_value(3)[3] == 0
"#);
}

#[test]
fn kernels_grids_and_errors() {
    run(r#"
k = bl.KernelSpec(1)
assert abs(k(2.0) - (-1 / (4 * 3.141592653589793))) < 1e-15
assert bl.KernelSpec(2, inverse=True).inverse
try:
    k(0j)
    raise AssertionError("expected ValueError")
except ValueError:
    pass
g = bl.GridField.disk(256, 4.0)
assert len(g) == 256 * 256 and g.n == 256
b = g.beurling(1)
z = b.node(192, 128)
assert abs(b.get(192, 128) + 1 / z**2) < 0.05 * abs(1 / z**2)
assert g.maximal(2).max_abs() <= 1.0 + 1e-12
try:
    bl.GridField(10, 1.0, [0j] * 100)
    raise AssertionError("expected ValueError")
except ValueError:
    pass
p = bl.CounterexamplePoint(8.0)
assert p.z == 8 + 8j and p.eps == 26.0
"#);
}
