"""Smoke test for the beurling_lab extension module.

Build and install first:

    pip install maturin
    pip install -e crates/python --no-build-isolation
    python python/smoke_test.py
"""

import math
import tempfile
from fractions import Fraction

import beurling_lab as bl


def main():
    assert bl.sum_s(1) == Fraction(-2, 3)
    assert all(bl.suma_lhs(j) == -1 for j in range(1, 5))
    value, err = bl.center_value_quadrature(2)
    assert abs(value - (1 - 4 / math.pi)) < 1e-8, (value, err)

    k = bl.KernelSpec(2)
    assert abs(k(1.0) - 2 / math.pi) < 1e-15

    g = bl.GridField.disk(128, 4.0)
    back = g.beurling(1).inverse_beurling(1)
    # the zero frequency is dropped, so the round trip loses the mean
    mean = g.mean()
    diff = max(abs(a - (b - mean)) for a, b in zip(back.samples(), g.samples()))
    assert diff < 1e-10, diff

    with tempfile.TemporaryDirectory() as out:
        passed, run_dir, manifest = bl.run_experiment("identities", out, {"js": "1,2,3"})
        assert passed, manifest
        assert manifest["subcommand"] == "identities"
        print("identities run written to", run_dir)

    try:
        bl.KernelSpec(0)
    except ValueError:
        pass
    else:
        raise AssertionError("order 0 should be rejected")

    print("smoke test passed")


if __name__ == "__main__":
    main()
