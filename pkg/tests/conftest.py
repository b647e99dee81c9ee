"""Shared fixtures and tiny independent oracles used across the suite."""

import math

import numpy as np
import pytest

from ispec import make_model


@pytest.fixture
def homogeneous():
    return make_model(1, 1, [[1.0]], [[1.0]])


@pytest.fixture
def aniso():
    return make_model(1, 1, [[1.0]], [[2.0]])


def bisect_root(f, lo, hi, tol=1e-14):
    """Plain bisection; the endpoints must straddle a sign change."""
    flo = f(lo)
    assert flo * f(hi) < 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if flo * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
            flo = f(lo)
    return 0.5 * (lo + hi)


def onsager_beta_c():
    """Root of sinh(2 beta)^2 = 1, found without closed forms."""
    return bisect_root(lambda b: math.sinh(2 * b) ** 2 - 1.0, 0.1, 1.0)


def random_model(rng, m, n, lo=0.2, hi=3.0):
    jh = lo + (hi - lo) * rng.random((m, n))
    jv = lo + (hi - lo) * rng.random((m, n))
    return make_model(m, n, jh, jv)
