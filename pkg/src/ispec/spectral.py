"""Spectral layer: Kasteleyn operators and the critical temperature.

The decorated torus graph carries a real skew adjacency matrix whose
entries pick up phases z or w when the underlying edge wraps around the
vertical or horizontal period. The characteristic function

    P(z, w) = det(base * z**phaseX * w**phaseY)

is real and nonnegative on the unit torus |z| = |w| = 1, and the four
real points (z, w) = (+-1, +-1) carry Pfaffians whose signed half sum
recovers the dimer partition function. Exactly one corner, the special
corner ((-1)**(n mod 2), (-1)**(m mod 2)) for an m x n model, changes
sign along the temperature sweep; its zero locates the critical inverse
temperature. A gauge flip at vertex 0 normalizes the global sign so the
(1, 1) Pfaffian tends to +1 as the coupling vanishes.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DualityViolation, NodeNotFound, NoSignChange
from .fishergraph import fisher_graph
from .linalg import pfaffian
from .model import (
    HIGH_TEMP,
    LOW_TEMP,
    EdgeWeightMap,
    dual_model,
    make_model,
    replicate,
    weights,
)

CORNERS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class KasteleynOperator:
    """Oriented weighted adjacency data of the decorated torus graph.

    base holds the signed weights at (z, w) = (1, 1). phaseX and phaseY
    are integer exponent matrices with +1 where the edge wraps the
    vertical resp. horizontal period in the stored direction, -1 at the
    transposed entries and 0 elsewhere.
    """

    base: np.ndarray
    phaseX: np.ndarray
    phaseY: np.ndarray
    m: int
    n: int

    def matrix(self, z, w):
        """Skew matrix at a point (z, w) of the spectral torus."""
        return self.base * z ** self.phaseX * w ** self.phaseY


@dataclass
class CornerReport:
    """Pfaffians at the four real points of the spectral torus.

    pf maps (theta, tau) in {0,1}^2 to the Pfaffian at
    (z, w) = ((-1)**theta, (-1)**tau). minAbs and argmin describe the
    corner of smallest magnitude.
    """

    pf: dict
    minAbs: float
    argmin: tuple


@dataclass
class ScanReport:
    """Minimum of |P| over a uniform grid on the unit torus."""

    minAbs: float
    argmin: tuple
    z: complex
    w: complex
    atCorner: bool
    grid: int


@dataclass
class NodeReport:
    """Quadratic behaviour of P at a corner node.

    P(theta0 + x, phi0 + y) ~ a x^2 + b x y + c y^2 for small angle
    offsets. elliptic records a > 0, c > 0 and b^2 - 4ac < 0, stable
    whether halving the difference step moved the Hessian by less than
    one part in 1e4.
    """

    corner: tuple
    hessian: np.ndarray
    a: float
    b: float
    c: float
    elliptic: bool
    stable: bool


@dataclass
class DualityReport:
    """Corner comparison of a model and its dual on the other expansion."""

    primal: CornerReport
    dual: CornerReport
    pairing: str
    constant: float
    threshold: float


def _matrices(graph):
    nv = len(graph.vertices)
    base = np.zeros((nv, nv))
    px = np.zeros((nv, nv), dtype=int)
    py = np.zeros((nv, nv), dtype=int)
    for e in graph.edges:
        val = e.sign * e.weight
        base[e.u, e.v] += val
        base[e.v, e.u] -= val
        if e.crossesX:
            px[e.u, e.v] = 1
            px[e.v, e.u] = -1
        if e.crossesY:
            py[e.u, e.v] = 1
            py[e.v, e.u] = -1
    return base, px, py


@lru_cache(maxsize=None)
def _gauge_flip(m, n):
    """Whether the raw orientation needs a sign flip at vertex 0.

    Decided on a homogeneous nearly-decoupled system, where the (1, 1)
    Pfaffian must approach +1. Flipping every entry in one row and the
    matching column negates all four corner Pfaffians while leaving
    P(z, w) and the face parities untouched.
    """
    tau = np.full((m, n), 1e-3)
    wmap = EdgeWeightMap(HIGH_TEMP, tau, tau)
    probe = make_model(m, n, np.ones((m, n)), np.ones((m, n)))
    base, _, _ = _matrices(fisher_graph(probe, wmap, 1, 1))
    return pfaffian(base) < 0


def assemble(model, beta, kind=HIGH_TEMP):
    """Build the Kasteleyn operator of a model at inverse temperature beta."""
    wmap = weights(model, beta, kind)
    base, px, py = _matrices(fisher_graph(model, wmap, 1, 1))
    if _gauge_flip(model.m, model.n):
        base[0, :] *= -1
        base[:, 0] *= -1
    for a in (base, px, py):
        a.setflags(write=False)
    return KasteleynOperator(base, px, py, model.m, model.n)


def eval_P(op, z, w):
    """Characteristic function det K(z, w) at one point."""
    return complex(np.linalg.det(op.matrix(z, w)))


def _corner_matrix(op, theta, tau):
    mat = op.base.copy()
    if theta:
        mat[op.phaseX != 0] *= -1
    if tau:
        mat[op.phaseY != 0] *= -1
    return mat


def corner_pfaffians(op):
    """Pfaffians at the four real corners of the spectral torus."""
    pf = {}
    for theta, tau in CORNERS:
        pf[(theta, tau)] = pfaffian(_corner_matrix(op, theta, tau))
    argmin = min(CORNERS, key=lambda c: abs(pf[c]))
    return CornerReport(pf, abs(pf[argmin]), argmin)


def special_corner(m, n):
    """Corner index (theta, tau) whose Pfaffian changes sign with beta.

    For an m x n fundamental domain the distinguished point sits at
    z = (-1)**(n mod 2), w = (-1)**(m mod 2): each odd period moves it
    to -1 in that direction's variable.
    """
    return (n % 2, m % 2)


def sector_weights(m, n):
    """Signs eta with sum(eta[c] * pf[c]) = 2 * dimer partition function."""
    sp = special_corner(m, n)
    return {c: (-1.0 if c == sp else 1.0) for c in CORNERS}


def torus_partition(op):
    """Dimer partition function of the torus from the corner Pfaffians."""
    eta = sector_weights(op.m, op.n)
    rep = corner_pfaffians(op)
    return 0.5 * sum(eta[c] * rep.pf[c] for c in CORNERS)


def critical_beta(model, tol=1e-10):
    """Locate the inverse critical temperature by corner sign change.

    The model is replicated to an even by even fundamental domain, where
    the (1, 1) Pfaffian of the high temperature operator starts positive
    and turns negative exactly once. Returns (beta_c, corner report at
    beta_c, bisection iterations).
    """
    if tol < 1e-13:
        raise ValueError("tol below 1e-13 exceeds attainable precision")
    rep = replicate(model, 2 if model.m % 2 else 1, 2 if model.n % 2 else 1)

    def g(beta):
        return corner_pfaffians(assemble(rep, beta, HIGH_TEMP)).pf[(0, 0)]

    lo = 1e-9
    if not g(lo) > 0:
        raise NoSignChange("corner Pfaffian not positive at tiny beta")
    hi = 0.5
    iterations = 0
    while g(hi) > 0:
        lo = hi
        hi *= 2
        iterations += 1
        if hi > 1e3:
            raise NoSignChange("no corner sign change below beta = 1e3")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    beta_c = 0.5 * (lo + hi)
    return beta_c, corner_pfaffians(assemble(rep, beta_c, HIGH_TEMP)), iterations


def grid_values(op, grid, threads=1):
    """|P| over a grid x grid uniform sample of the unit torus.

    Entry [a, b] holds |det K(z, w)| at z = exp(2 pi i a/grid) and
    w = exp(2 pi i b/grid). threads > 1 evaluates rows concurrently;
    rows are stacked in order, so the output is thread-count blind.
    """
    grid = int(grid)
    if grid < 4:
        raise ValueError("grid must be at least 4")
    ang = np.exp(2j * np.pi * np.arange(grid) / grid)

    def row(a):
        mats = (
            op.base[None, :, :]
            * ang[a] ** op.phaseX[None, :, :]
            * ang[:, None, None] ** op.phaseY[None, :, :]
        )
        return np.abs(np.linalg.det(mats))

    if int(threads) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            rows = list(pool.map(row, range(grid)))
    else:
        rows = [row(a) for a in range(grid)]
    return np.stack(rows)


def scan_torus(op, grid, threads=1):
    """Minimum of |P| over a grid x grid uniform sample of the torus.

    Points are visited row major in (a, b); ties keep the first
    minimum (np.argmin semantics on the row-major flattening).
    """
    grid = int(grid)
    vals = grid_values(op, grid, threads)
    flat = int(np.argmin(vals))
    a, b = divmod(flat, grid)
    val = float(vals[a, b])
    ang = np.exp(2j * np.pi * np.arange(grid) / grid)
    at_corner = (2 * a) % grid == 0 and (2 * b) % grid == 0
    return ScanReport(val, (a, b), complex(ang[a]), complex(ang[b]), at_corner, grid)


def node_hessian(op, step=1e-4, node_tol=1e-6):
    """Quadratic form of P at its corner node.

    Central second differences in the angles around the corner with the
    smallest |P|. Raises NodeNotFound when no corner value lies within
    node_tol, as happens below the critical temperature.
    """
    corner_P = {c: abs(eval_P(op, (-1.0) ** c[0], (-1.0) ** c[1])) for c in CORNERS}
    corner = min(CORNERS, key=lambda c: corner_P[c])
    if corner_P[corner] > node_tol:
        raise NodeNotFound(
            "smallest corner |P| is %.3e, above %.1e" % (corner_P[corner], node_tol)
        )
    t0 = np.pi * corner[0]
    p0 = np.pi * corner[1]

    def f(dt, dp):
        return eval_P(op, np.exp(1j * (t0 + dt)), np.exp(1j * (p0 + dp))).real

    def hess(h):
        f0 = f(0.0, 0.0)
        h00 = (f(h, 0.0) - 2 * f0 + f(-h, 0.0)) / h**2
        h11 = (f(0.0, h) - 2 * f0 + f(0.0, -h)) / h**2
        h01 = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h**2)
        return np.array([[h00, h01], [h01, h11]])

    h1 = hess(step)
    h2 = hess(step / 2)
    scale = max(np.linalg.norm(h2), 1e-30)
    stable = np.linalg.norm(h1 - h2) / scale <= 1e-4
    a = 0.5 * h2[0, 0]
    b = h2[0, 1]
    c = 0.5 * h2[1, 1]
    elliptic = a > 0 and c > 0 and b * b - 4 * a * c < 0
    return NodeReport(corner, h2, float(a), float(b), float(c), elliptic, stable)


def duality_check(model, beta, tol=1e-12):
    """Compare corner Pfaffians of a model with its dual's other expansion.

    The high temperature operator of the model and the low temperature
    operator of the dual model carry pointwise dual edge weights. Their
    corner zero sets must agree, and away from the (0, 0) corner the
    Pfaffians must stand in one common ratio. Corner indices are matched
    either like for like or with (theta, tau) swapped; the report records
    which pairing held.
    """
    primal = corner_pfaffians(assemble(model, beta, HIGH_TEMP))
    dual = corner_pfaffians(assemble(dual_model(model), beta, LOW_TEMP))
    thr = np.sqrt(tol)
    for name, perm in (("like", lambda c: c), ("swapped", lambda c: (c[1], c[0]))):
        ok = all(
            (abs(primal.pf[c]) < thr) == (abs(dual.pf[perm(c)]) < thr)
            for c in CORNERS
        )
        if not ok:
            continue
        ratios = [
            primal.pf[c] / dual.pf[perm(c)]
            for c in CORNERS
            if c != (0, 0) and abs(primal.pf[c]) >= thr and abs(dual.pf[perm(c)]) >= thr
        ]
        if not ratios:
            continue
        spread = max(ratios) - min(ratios)
        if spread <= 1e-6 * max(abs(r) for r in ratios):
            constant = float(np.mean(ratios))
            return DualityReport(primal, dual, name, constant, float(thr))
    raise DualityViolation(
        "corner Pfaffians of the dual pair admit no consistent matching"
    )
