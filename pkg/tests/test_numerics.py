import math

import numpy as np
import pytest

from hetnet.core import SolverError
from hetnet.numerics import bracketed_root, golden_max, scan_roots


def test_bracketed_root_simple():
    assert bracketed_root(lambda x: x * x - 2, 0.0, 2.0) == pytest.approx(math.sqrt(2), rel=1e-14)


def test_bracketed_root_infinite_endpoints():
    def f(x):
        if x <= 0:
            return np.inf
        if x >= 1:
            return -np.inf
        return 0.3 - x

    assert bracketed_root(f, 0.0, 1.0) == pytest.approx(0.3, abs=1e-13)


def test_bracketed_root_exact_endpoint_and_no_sign_change():
    assert bracketed_root(lambda x: x - 1.0, 1.0, 3.0) == 1.0
    with pytest.raises(SolverError, match="no sign change"):
        bracketed_root(lambda x: x * x + 1, -1.0, 1.0)


def test_scan_roots_finds_both():
    roots = scan_roots(lambda x: (x - 2.0) * (x - 50.0), 1.0, 1000.0, points=256)
    assert roots == pytest.approx([2.0, 50.0], rel=1e-10)
    assert scan_roots(lambda x: 1.0, 1.0, 10.0) == []


def test_golden_max_interior_and_corner():
    x, v = golden_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, 1e-10)
    assert x == pytest.approx(0.3, abs=1e-8) and v == pytest.approx(0.0, abs=1e-15)
    x, _ = golden_max(lambda x: x, 0.0, 1.0, 1e-10)
    assert x == 1.0
