"""Block Toeplitz spin correlations and dimer edge statistics.

The squared two-point function along the vertical lattice line through
site column 0 equals a product of line weight factors times the
determinant of a block Toeplitz matrix. The symbol psi of that matrix
collects Fourier-averaged inverse Kasteleyn entries between the line
terminal vertices of one vertical period, corrected on the matched edge
pairs, so that det psi is constant on the circle and the Szego-Widom
constants G and E describe the determinant growth.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NearSingular, NonPositiveResidual
from .fishergraph import ROLE_IDX, fisher_graph
from .linalg import fourier_coeffs, pfaffian
from .model import HIGH_TEMP, weights
from .spectral import assemble, corner_pfaffians, sector_weights

log = logging.getLogger(__name__)

_SINGULAR_RATIO = 1e-12


@dataclass
class ToeplitzSymbol:
    """Matrix symbol of the correlation Toeplitz operator.

    coeffs maps integer k to the blockDim x blockDim Fourier block psi_k
    for |k| <= the bandwidth it was built with; lineWeights lists the
    high temperature weights of the line edges in one period.
    """

    blockDim: int
    coeffs: dict
    lineWeights: np.ndarray


@dataclass
class CorrelationResult:
    """One evaluated point of the squared spin correlation."""

    N: int
    corrSq: float
    widomLimit: float = None
    fittedAlpha: float = None


def _vid(n, i, j, role):
    return (i * n + j) * 6 + ROLE_IDX[role]


def _line_slots(model):
    """Terminal vertex ids and domain offsets of one vertical period.

    Slots 0..n-1 hold the upper terminals of the line edges at sites
    (0, l); slots n..2n-1 the lower terminals at (0, l+1), the last one
    wrapping into the next fundamental domain (offset 1).
    """
    n = model.n
    rows = [_vid(n, 0, l, "U") for l in range(n)]
    rows += [_vid(n, 0, (l + 1) % n, "D") for l in range(n)]
    delta = np.zeros(2 * n)
    delta[2 * n - 1] = 1.0
    return rows, delta


def _symbol_samples(model, beta, M, threads=1):
    """psi sampled at the M-th roots of unity, plus the line weights."""
    op = assemble(model, beta, HIGH_TEMP)
    n = model.n
    wmap = weights(model, beta, HIGH_TEMP)
    taus = np.array([float(wmap.tau_v[0][l]) for l in range(n)])
    rows, delta = _line_slots(model)
    corr = np.zeros((2 * n, 2 * n))
    for l in range(n):
        u = _vid(n, 0, l, "U")
        d = _vid(n, 0, (l + 1) % n, "D")
        sign = 1.0 if op.base[u, d] > 0 else -1.0
        val = sign * taus[l] / (1.0 - taus[l] ** 2)
        corr[l, n + l] = -val
        corr[n + l, l] = val
    nodes = np.exp(2j * np.pi * np.arange(M) / M)

    def sample(a):
        mats = (
            op.base[None, :, :]
            * nodes[a] ** op.phaseX[None, :, :]
            * nodes[:, None, None] ** op.phaseY[None, :, :]
        )
        dets = np.abs(np.linalg.det(mats))
        inner = np.linalg.inv(mats)[:, rows][:, :, rows].mean(axis=0)
        row = np.outer(nodes[a] ** delta, nodes[a] ** (-delta)) * inner + corr
        return float(dets.min()), float(dets.max()), row

    try:
        if int(threads) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=int(threads)) as pool:
                samples = list(pool.map(sample, range(M)))
        else:
            samples = [sample(a) for a in range(M)]
    except np.linalg.LinAlgError:
        raise NearSingular(
            "Kasteleyn determinant vanishes on the spectral torus; "
            "beta is at or too close to the critical point"
        )
    dmin = min(s[0] for s in samples)
    dmax = max(s[1] for s in samples)
    if dmin < _SINGULAR_RATIO * dmax:
        raise NearSingular(
            "Kasteleyn determinant vanishes on the spectral torus; "
            "beta is at or too close to the critical point"
        )
    psi = np.stack([s[2] for s in samples])
    return psi, taus


def build_symbol(model, beta, M=256, K_max=64, threads=1):
    """Fourier blocks of the correlation symbol.

    M circle points feed both the inner integral over the second spectral
    variable and the outer coefficient transform; K_max bounds the kept
    bandwidth (at most M/4). threads > 1 samples circle points
    concurrently without changing the result.
    """
    M = int(M)
    if M < 128:
        raise ValueError("symbol grid needs at least 128 points")
    K_max = min(int(K_max), M // 4)
    psi, taus = _symbol_samples(model, beta, M, threads)
    coeffs = fourier_coeffs(psi, range(-K_max, K_max + 1), M)
    return ToeplitzSymbol(2 * model.n, coeffs, taus)


def corr_sq_from_symbol(symbol, N):
    """Finite-N squared correlation from ready symbol blocks."""
    d = symbol.blockDim
    l0 = d // 2
    if N < 1 or N % l0:
        raise ValueError("separation must be a positive multiple of %d" % l0)
    nb = N // l0
    if nb - 1 > max(abs(k) for k in symbol.coeffs):
        raise ValueError("symbol bandwidth too small for N=%d" % N)
    t = np.zeros((nb * d, nb * d), dtype=complex)
    zero = np.zeros((d, d))
    for j in range(nb):
        for jp in range(nb):
            t[j * d : (j + 1) * d, jp * d : (jp + 1) * d] = symbol.coeffs.get(
                jp - j, zero
            )
    c = float(np.prod((1.0 - symbol.lineWeights**2) ** 2))
    det = np.linalg.det(t)
    val = (c**nb) * det.real
    if val < 0:
        log.info("clipped corrSq(%d) = %.3e to 0", N, val)
        val = 0.0
    return val


def spin_corr_sq(model, beta, N, M=256, K_max=64):
    """Squared infinite-volume correlation <sigma_00 sigma_0N>^2.

    N must be a positive multiple of the vertical period length n and
    beta must sit away from the critical point.
    """
    N = int(N)
    nb_needed = max(N // max(model.n, 1), 1)
    K_max = max(int(K_max), nb_needed - 1)
    M = max(int(M), 4 * K_max)
    symbol = build_symbol(model, beta, M, K_max)
    return CorrelationResult(N, corr_sq_from_symbol(symbol, N))


def _samples_from_coeffs(coeffs, M):
    """Band-limited reconstruction of symbol samples on an M grid."""
    ks = sorted(coeffs)
    shape = np.shape(coeffs[ks[0]])
    nodes = np.exp(2j * np.pi * np.arange(M) / M)
    out = np.zeros((M,) + shape, dtype=complex)
    for k in ks:
        out += nodes[:, None, None] ** k * np.asarray(coeffs[k], dtype=complex)
    return out


def _as_blocks(symbol_or_coeffs):
    """Coefficient dict with uniform 2d block values."""
    if isinstance(symbol_or_coeffs, ToeplitzSymbol):
        raw = symbol_or_coeffs.coeffs
    else:
        raw = symbol_or_coeffs
    out = {}
    for k, v in raw.items():
        arr = np.asarray(v, dtype=complex)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        out[int(k)] = arr
    return out


def _inverse_coeffs(coeffs, kmax):
    """Fourier blocks of the pointwise inverse symbol."""
    M = max(256, 4 * kmax + 4)
    samples = _samples_from_coeffs(coeffs, M)
    dets = np.abs(np.linalg.det(samples))
    if dets.min() < _SINGULAR_RATIO * max(dets.max(), 1e-300):
        raise NearSingular("symbol is singular on the unit circle")
    inv = np.linalg.inv(samples)
    return fourier_coeffs(inv, range(-kmax, kmax + 1), M), samples, inv, M


def _block_toeplitz(coeffs, trunc):
    d = next(iter(coeffs.values())).shape[0]
    zero = np.zeros((d, d))
    out = np.zeros((trunc * d, trunc * d), dtype=complex)
    for j in range(trunc):
        for k in range(trunc):
            out[j * d : (j + 1) * d, k * d : (k + 1) * d] = coeffs.get(j - k, zero)
    return out


def _block_hankel(coeffs, trunc, reverse=False):
    d = next(iter(coeffs.values())).shape[0]
    zero = np.zeros((d, d))
    out = np.zeros((trunc * d, trunc * d), dtype=complex)
    for j in range(trunc):
        for k in range(trunc):
            idx = j + k + 1
            if reverse:
                idx = -idx
            out[j * d : (j + 1) * d, k * d : (k + 1) * d] = coeffs.get(idx, zero)
    return out


def widom_limit(symbol, T_trunc):
    """Szego-Widom constants (G, E) of the correlation symbol.

    G is the exponential of the mean of log det psi over the circle; E
    is the operator determinant det(I - H[psi] H[reversed psi^{-1}]) on a
    T_trunc block window, which equals the large-N limit of the squared
    correlation after weight normalization.
    """
    trunc = int(T_trunc)
    if trunc < 1:
        raise ValueError("truncation must be positive")
    coeffs = _as_blocks(symbol)
    kmax = 2 * trunc + 1
    inv_coeffs, samples, _, _ = _inverse_coeffs(coeffs, kmax)
    logdets = np.log(np.linalg.det(samples))
    G = float(np.exp(logdets.mean().real))
    h1 = _block_hankel(coeffs, trunc)
    h2 = _block_hankel(inv_coeffs, trunc, reverse=True)
    e = np.linalg.det(np.eye(h1.shape[0]) - h1 @ h2)
    return G, float(e.real)


def toeplitz_hankel_residual(symbol, T_trunc):
    """Frobenius defect of the Toeplitz-Hankel identity on a window.

    Measures T[psi psi^{-1}] - T[psi] T[psi^{-1}] - H[psi] H[psi~^{-1}]
    restricted to the leading T_trunc blocks, where the last factor
    carries the reversed coefficients of the inverse symbol. The
    operator products are formed on a doubled section so the reported
    window sees the semi-infinite identity up to coefficient tails,
    which decay with T_trunc for an off-critical symbol. Accepts a
    ToeplitzSymbol or a plain {k: block} coefficient map.
    """
    trunc = int(T_trunc)
    if trunc < 1:
        raise ValueError("truncation must be positive")
    wide = 2 * trunc
    coeffs = _as_blocks(symbol)
    kmax = max(2 * wide + 1, max(abs(k) for k in coeffs))
    inv_coeffs, samples, inv, M = _inverse_coeffs(coeffs, kmax)
    prod_coeffs = fourier_coeffs(samples @ inv, range(-wide, wide + 1), M)
    lhs = _block_toeplitz(prod_coeffs, wide) - _block_toeplitz(
        coeffs, wide
    ) @ _block_toeplitz(inv_coeffs, wide)
    rhs = _block_hankel(coeffs, wide) @ _block_hankel(
        inv_coeffs, wide, reverse=True
    )
    d = next(iter(coeffs.values())).shape[0]
    window = trunc * d
    return float(np.linalg.norm((lhs - rhs)[:window, :window]))


def decay_fit(series, limit=0.0):
    """Exponential decay rate of corrSq residuals above their limit.

    series is an iterable of (N, corrSq) pairs; returns (alpha, r2) from
    a least squares line through log(corrSq - limit) against N.
    """
    pts = sorted((int(a), float(b)) for a, b in series)
    if len(pts) < 5:
        raise ValueError("need at least 5 points, got %d" % len(pts))
    ns = np.array([p[0] for p in pts], dtype=float)
    resid = np.array([p[1] for p in pts]) - float(limit)
    if np.any(resid <= 0):
        raise NonPositiveResidual(
            "series is not strictly above its limit; not in the decay regime"
        )
    y = np.log(resid)
    slope, intercept = np.polyfit(ns, y, 1)
    fit = slope * ns + intercept
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(-slope), r2


def _edge_terminals(model, beta, kind, edges):
    """Vertex ids, cells and weights of the requested fundamental edges."""
    graph = fisher_graph(model, weights(model, beta, kind), 1, 1)
    spots = []
    taus = []
    for item in edges:
        if len(item) == 2 and isinstance(item[0], tuple):
            key, (fx, fy) = item
        else:
            key, (fx, fy) = item, (0, 0)
        e = graph.edges[graph.edge_index[tuple(key)]]
        dv = (1, 0) if e.crossesY else (0, 1) if e.crossesX else (0, 0)
        spots.append((e.u, (fx, fy)))
        spots.append((e.v, (fx + dv[0], fy + dv[1])))
        taus.append(e.weight)
    return spots, np.array(taus)


def edge_probability(model, beta, edges, kind=HIGH_TEMP, M=64):
    """Probability that the listed edges all occur, in infinite volume.

    Each edge is a fundamental edge key (tag, i, j), optionally paired
    with a window offset ((tag, i, j), (fx, fy)) counted in fundamental
    domains. Uses the double Fourier integral of the inverse operator
    and a Pfaffian over the edge terminals.
    """
    op = assemble(model, beta, kind)
    spots, taus = _edge_terminals(model, beta, kind, edges)
    nodes = np.exp(2j * np.pi * np.arange(M) / M)
    need = sorted(
        {
            (pa[1][0] - pb[1][0], pa[1][1] - pb[1][1])
            for pa in spots
            for pb in spots
        }
    )
    vids = sorted({p[0] for p in spots})
    vpos = {v: i for i, v in enumerate(vids)}
    acc = {off: np.zeros((len(vids), len(vids)), dtype=complex) for off in need}
    dmin, dmax = np.inf, 0.0
    for a in range(M):
        mats = (
            op.base[None, :, :]
            * nodes[a] ** op.phaseX[None, :, :]
            * nodes[:, None, None] ** op.phaseY[None, :, :]
        )
        dets = np.abs(np.linalg.det(mats))
        dmin = min(dmin, dets.min())
        dmax = max(dmax, dets.max())
        if dmin < _SINGULAR_RATIO * dmax:
            raise NearSingular("spectral torus is singular at this beta")
        inv = np.linalg.inv(mats)[:, vids][:, :, vids]
        for fx, fy in need:
            w = nodes[a] ** fy * nodes**fx
            acc[(fx, fy)] += np.tensordot(w, inv, axes=(0, 0))
    for off in need:
        acc[off] /= M * M
    k = len(spots)
    sub = np.zeros((k, k), dtype=complex)
    for p in range(k):
        for q in range(k):
            off = (
                spots[p][1][0] - spots[q][1][0],
                spots[p][1][1] - spots[q][1][1],
            )
            sub[p, q] = acc[off][vpos[spots[p][0]], vpos[spots[q][0]]]
    return float(np.prod(taus) * abs(pfaffian(0.5 * (sub.real - sub.real.T))))


def edge_probability_torus(model, beta, edges, s, t, kind=HIGH_TEMP):
    """Same probability on a finite s x t torus of fundamental domains.

    Combines the four corner sectors of the covering operator: each
    sector contributes its Pfaffian times the Pfaffian of the inverse
    submatrix over the edge terminals, weighted by the sector signs.
    Edges that wrap the cover pick up the sector phase, so the edge
    entries are taken from the sector matrix rather than pulled out
    of the sum as bare weights.
    """
    from .model import replicate

    cover = replicate(model, s, t)
    op = assemble(cover, beta, kind)
    shifted = []
    for item in edges:
        if len(item) == 2 and isinstance(item[0], tuple):
            (tag, i, j), (fx, fy) = item
            shifted.append(
                (tag, (i + fx * model.m) % cover.m, (j + fy * model.n) % cover.n)
            )
        else:
            shifted.append(tuple(item))
    spots, _ = _edge_terminals(cover, beta, kind, shifted)
    pos = [p[0] for p in spots]
    eta = sector_weights(cover.m, cover.n)
    rep = corner_pfaffians(op)
    mags = [abs(v) for v in rep.pf.values()]
    if min(mags) < 1e-7 * max(mags):
        raise NearSingular(
            "a corner sector of the covering operator is singular; "
            "beta is too close to the critical point for edge statistics"
        )
    num = 0.0
    den = 0.0
    for (theta, tau), pf in rep.pf.items():
        mat = op.base.copy()
        if theta:
            mat[op.phaseX != 0] *= -1
        if tau:
            mat[op.phaseY != 0] *= -1
        inv = np.linalg.inv(mat)
        sub = inv[np.ix_(pos, pos)]
        entries = np.prod([mat[pos[2 * i], pos[2 * i + 1]] for i in range(len(pos) // 2)])
        num += eta[(theta, tau)] * pf * entries * pfaffian(sub)
        den += eta[(theta, tau)] * pf
    return float(abs(num / den))
