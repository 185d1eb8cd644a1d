import numpy as np
import pytest
from scipy.optimize import brentq, minimize_scalar

from utils import bisect_boundary, golden_section_minimize


def test_golden_section_runs_every_bracket_at_once():
    centers = np.linspace(-1.0, 1.0, 9)
    calls = []

    def func(p):
        calls.append(np.shape(p))
        return (p - centers) ** 2 + np.cos(p)

    best, value = golden_section_minimize(func, centers - 2.0, centers + 2.0)
    assert all(shape == centers.shape for shape in calls)
    for c, x, f in zip(centers, best, value):
        ref = minimize_scalar(lambda p: (p - c) ** 2 + np.cos(p), bounds=(c - 2.0, c + 2.0), method="bounded",
                              options={"xatol": 1e-12})
        assert x == pytest.approx(ref.x, abs=1e-6)
        assert f == pytest.approx(ref.fun, abs=1e-10)


def test_bisect_halves_each_bracket():
    levels = np.array([0.5, 1.0, 2.0, 3.0])
    edge = bisect_boundary(lambda p: p ** 2 - levels, np.zeros(4), np.full(4, 2.0))
    expected = [brentq(lambda p, a=a: p ** 2 - a, 0.0, 2.0) for a in levels]
    assert np.allclose(edge, expected, atol=1e-10)
