"""Periodic Ising models and their edge weight systems.

A model is an m x n fundamental domain of positive couplings on the square
lattice torus. Site (i, j) has 0 <= i < m running horizontally and
0 <= j < n vertically; Jh[i][j] sits on the edge to ((i+1) mod m, j) and
Jv[i][j] on the edge to (i, (j+1) mod n). Weights derived from the couplings
come in two kinds: tanh(beta*J) for the high-temperature expansion and
exp(-2*beta*J) for the low-temperature (domain wall) expansion.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    MalformedDocument,
    NonPositiveCoupling,
    WeightOutOfRange,
)

HIGH_TEMP = "hightemp"
LOW_TEMP = "lowtemp"


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PeriodicIsingModel:
    m: int
    n: int
    Jh: np.ndarray
    Jv: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Jh", _frozen(self.Jh))
        object.__setattr__(self, "Jv", _frozen(self.Jv))


@dataclass(frozen=True)
class EdgeWeightMap:
    """Per-edge weights on the fundamental domain, same indexing as Jh/Jv."""

    kind: str
    tau_h: np.ndarray
    tau_v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tau_h", _frozen(self.tau_h))
        object.__setattr__(self, "tau_v", _frozen(self.tau_v))


def make_model(m, n, Jh, Jv):
    """Validate and build a model from raw grids."""
    try:
        m = int(m)
        n = int(n)
    except (TypeError, ValueError):
        raise MalformedDocument("m and n must be integers")
    if m < 1 or n < 1:
        raise MalformedDocument("periods must be positive, got %dx%d" % (m, n))
    try:
        Jh = np.array(Jh, dtype=float)
        Jv = np.array(Jv, dtype=float)
    except (TypeError, ValueError):
        raise MalformedDocument("coupling grids must be rectangular arrays of numbers")
    for name, grid in (("Jh", Jh), ("Jv", Jv)):
        if grid.shape != (m, n):
            raise DimensionMismatch(
                "%s has shape %s, expected (%d, %d)" % (name, grid.shape, m, n)
            )
        if not np.all(np.isfinite(grid)):
            raise MalformedDocument("%s contains non-finite entries" % name)
        if np.any(grid <= 0.0):
            raise NonPositiveCoupling("%s must be strictly positive" % name)
    return PeriodicIsingModel(m, n, Jh, Jv)


def parse_model(text):
    """Parse a JSON model document.

    Schema: {"m": int, "n": int, "Jh": [[float]], "Jv": [[float]]} with the
    grids indexed [i][j], row = i (m rows of n entries).
    """
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedDocument("not valid JSON: %s" % exc)
    if not isinstance(doc, dict):
        raise MalformedDocument("top-level value must be an object")
    missing = [k for k in ("m", "n", "Jh", "Jv") if k not in doc]
    if missing:
        raise MalformedDocument("missing keys: %s" % ", ".join(missing))
    if isinstance(doc["m"], bool) or isinstance(doc["n"], bool) or \
            not isinstance(doc["m"], int) or not isinstance(doc["n"], int):
        raise MalformedDocument("m and n must be JSON integers")
    return make_model(doc["m"], doc["n"], doc["Jh"], doc["Jv"])


def weights(model, beta, kind):
    """Edge weights at inverse temperature beta.

    HighTemp gives tanh(beta*J), LowTemp gives exp(-2*beta*J). beta must be
    positive and finite, otherwise WeightOutOfRange is raised. Extreme but
    valid products beta*J can round onto an end of the open interval (0, 1)
    (tanh saturates once beta*J passes about 19); such weights are pulled
    one ulp back inside so downstream positivity assumptions hold.
    """
    if kind not in (HIGH_TEMP, LOW_TEMP):
        raise ValueError("kind must be %r or %r" % (HIGH_TEMP, LOW_TEMP))
    beta = float(beta)
    if not (beta > 0.0 and np.isfinite(beta)):
        raise WeightOutOfRange("beta must be positive and finite, got %r" % beta)
    if kind == HIGH_TEMP:
        th, tv = np.tanh(beta * model.Jh), np.tanh(beta * model.Jv)
    else:
        th, tv = np.exp(-2.0 * beta * model.Jh), np.exp(-2.0 * beta * model.Jv)
    lo, hi = np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0)
    return EdgeWeightMap(kind, np.clip(th, lo, hi), np.clip(tv, lo, hi))


def dualize(wmap):
    """Kramers-Wannier involution tau -> (1-tau)/(1+tau), flipping the kind.

    Sends tanh(beta*J) to exp(-2*beta*J) and back.
    """
    for grid in (wmap.tau_h, wmap.tau_v):
        if not np.all((grid > 0.0) & (grid < 1.0)):
            raise WeightOutOfRange("dualize needs weights strictly inside (0,1)")
    kind = LOW_TEMP if wmap.kind == HIGH_TEMP else HIGH_TEMP
    return EdgeWeightMap(
        kind,
        (1.0 - wmap.tau_h) / (1.0 + wmap.tau_h),
        (1.0 - wmap.tau_v) / (1.0 + wmap.tau_v),
    )


def replicate(model, a, b):
    """Tile the fundamental domain a times horizontally, b times vertically.

    The enlarged model describes the same infinite system, so every physical
    quantity (critical point included) is unchanged.
    """
    a, b = int(a), int(b)
    if a < 1 or b < 1:
        raise ValueError("replication factors must be >= 1")
    return PeriodicIsingModel(
        a * model.m, b * model.n, np.tile(model.Jh, (a, b)), np.tile(model.Jv, (a, b))
    )


def dual_model(model):
    """Model living on the dual lattice.

    Dual site (i,j) is the plaquette northeast of site (i,j). A dual
    horizontal edge crosses the primal vertical edge rooted one column over;
    a dual vertical edge crosses the primal horizontal edge one row up. Only
    defined up to a lattice translation, which no spectral quantity sees.
    """
    m, n = model.m, model.n
    Jh = np.empty((m, n))
    Jv = np.empty((m, n))
    for i in range(m):
        for j in range(n):
            Jh[i][j] = model.Jv[(i + 1) % m][j]
            Jv[i][j] = model.Jh[i][(j + 1) % n]
    return PeriodicIsingModel(m, n, Jh, Jv)
