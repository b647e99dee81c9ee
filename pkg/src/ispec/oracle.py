"""Brute-force and transfer-matrix ground truth at desk scale.

Nothing here touches Pfaffians or Fourier analysis on purpose: these are the
independent references the fast pipeline is validated against. Exhaustive
sums use compensated accumulation so that root-circle and partition-function
comparisons reflect mathematics rather than float summation order.
"""

import math

import numpy as np

from .errors import TooLarge

_SPIN_CAP = 20
_LEE_YANG_CAP = 16
_DIMER_CAP = 36
_STATE_CAP = 1 << 16


def _lattice_edges(model, s, t, boundary):
    """Site-lattice edges on an s x t torus of domains (or the cut-open grid).

    Sites are indexed p = gx * (t*n) + gy. Horizontal edges carry
    Jh[gx%m][gy%n], vertical ones Jv[gx%m][gy%n]; free boundary drops the
    wrapping edges.
    """
    m, n = model.m, model.n
    sm, tn = s * m, t * n
    edges = []
    for gx in range(sm):
        for gy in range(tn):
            i, j = gx % m, gy % n
            if boundary == "torus" or gx + 1 < sm:
                q = ((gx + 1) % sm) * tn + gy
                edges.append((gx * tn + gy, q, float(model.Jh[i][j]), "H", (gx, gy)))
            if boundary == "torus" or gy + 1 < tn:
                q = gx * tn + (gy + 1) % tn
                edges.append((gx * tn + gy, q, float(model.Jv[i][j]), "V", (gx, gy)))
    return edges


def _spin_table(nsites):
    bits = (np.arange(1 << nsites, dtype=np.int64)[:, None] >> np.arange(nsites)) & 1
    return 1 - 2 * bits.astype(np.int8)


def enumerate_spin(model, beta, s, t, boundary="torus", h=0.0):
    """Exact sums over all spin configurations of an s x t torus (or grid).

    Returns (Z, corr, q) where corr[p][q] is the pair correlation of site
    (0,0) with site (p,q) and q[k] is the field-free partition sum restricted
    to configurations with exactly k minus spins (so sum(q) = Z at h=0).

    Raises TooLarge above 20 sites.
    """
    if boundary not in ("torus", "free"):
        raise ValueError("boundary must be 'torus' or 'free'")
    nsites = s * model.m * t * model.n
    if nsites > _SPIN_CAP:
        raise TooLarge("refusing to enumerate %d > %d sites" % (nsites, _SPIN_CAP))
    sm, tn = s * model.m, t * model.n
    spins = _spin_table(nsites)
    energy = np.zeros(1 << nsites)
    for p, q, J, _, _ in _lattice_edges(model, s, t, boundary):
        energy += J * (spins[:, p] * spins[:, q])
    mag = spins.sum(axis=1, dtype=np.int64)
    w = np.exp(float(beta) * (energy + float(h) * mag))
    z = math.fsum(w.tolist())
    corr = (spins * (w * spins[:, 0])[:, None]).sum(axis=0) / z
    minus = (nsites - mag) // 2
    w0 = np.exp(float(beta) * energy)
    coeffs = np.array(
        [math.fsum(w0[minus == k].tolist()) for k in range(nsites + 1)]
    )
    return z, corr.reshape(sm, tn), coeffs


def lee_yang_check(model, beta, s, t, boundary="torus"):
    """Largest deviation of the field-polynomial roots from the unit circle.

    Q(z) has degree equal to the site count; its roots must land on |z| = 1
    for any ferromagnet.
    """
    nsites = s * model.m * t * model.n
    if nsites > _LEE_YANG_CAP:
        raise TooLarge("Lee-Yang cap is %d sites" % _LEE_YANG_CAP)
    _, _, coeffs = enumerate_spin(model, beta, s, t, boundary=boundary)
    scaled = coeffs / coeffs.max()
    roots = np.roots(scaled[::-1])
    return float(np.max(np.abs(np.abs(roots) - 1.0)))


_PARITY_PERM = {
    (0, 0): (0, 1, 2, 3),
    (0, 1): (1, 0, 3, 2),
    (1, 0): (2, 3, 0, 1),
    (1, 1): (3, 2, 1, 0),
}


class _MatchCounter:
    """Weighted perfect-matching sums by homology sector, memoized on the
    set of still-unmatched vertices (always extending at the lowest one)."""

    def __init__(self, graph):
        self.adj = [[] for _ in graph.vertices]
        for idx, e in enumerate(graph.edges):
            px, py = int(e.crossesX), int(e.crossesY)
            self.adj[e.u].append((e.v, e.weight, _PARITY_PERM[(px, py)]))
            self.adj[e.v].append((e.u, e.weight, _PARITY_PERM[(px, py)]))
        self.memo = {}
        self.nv = len(graph.vertices)

    def sectors(self, mask):
        """4-vector (Z00, Z01, Z10, Z11) for the induced subgraph on mask."""
        if mask == 0:
            return (1.0, 0.0, 0.0, 0.0)
        got = self.memo.get(mask)
        if got is not None:
            return got
        v = (mask & -mask).bit_length() - 1
        z0 = z1 = z2 = z3 = 0.0
        for u, w, perm in self.adj[v]:
            if not (mask >> u) & 1:
                continue
            sub = self.sectors(mask & ~((1 << v) | (1 << u)))
            z0 += w * sub[perm[0]]
            z1 += w * sub[perm[1]]
            z2 += w * sub[perm[2]]
            z3 += w * sub[perm[3]]
        out = (z0, z1, z2, z3)
        self.memo[mask] = out
        return out


def enumerate_dimer(graph):
    """Exhaustive dimer sums on a Fisher graph.

    Returns (Z, probs, sectors): total weighted matching count, per-edge
    occupation probabilities aligned with graph.edges, and the four sums
    keyed by (parity of crossesX edges, parity of crossesY edges).

    Raises TooLarge above 36 vertices.
    """
    nv = len(graph.vertices)
    if nv > _DIMER_CAP:
        raise TooLarge("dimer enumeration cap is %d vertices" % _DIMER_CAP)
    counter = _MatchCounter(graph)
    full = (1 << nv) - 1
    sectors = counter.sectors(full)
    z = math.fsum(sectors)
    probs = np.empty(len(graph.edges))
    for idx, e in enumerate(graph.edges):
        rest = counter.sectors(full & ~((1 << e.u) | (1 << e.v)))
        probs[idx] = e.weight * math.fsum(rest) / z
    return z, probs, {
        (0, 0): sectors[0],
        (0, 1): sectors[1],
        (1, 0): sectors[2],
        (1, 1): sectors[3],
    }


def even_subgraphs(nverts, edge_pairs):
    """All even-degree edge subsets as a boolean matrix (subsets x edges).

    Built from a spanning forest: each non-tree edge contributes one
    fundamental cycle, and the even subsets are exactly the GF(2) span.
    """
    ne = len(edge_pairs)
    parent = list(range(nverts))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree_adj = [[] for _ in range(nverts)]
    fundamental = []
    for idx, (p, q) in enumerate(edge_pairs):
        rp, rq = find(p), find(q)
        if rp != rq:
            parent[rp] = rq
            tree_adj[p].append((q, idx))
            tree_adj[q].append((p, idx))
        else:
            fundamental.append(idx)

    def tree_path(p, q):
        prev = {p: (None, None)}
        stack = [p]
        while stack:
            x = stack.pop()
            if x == q:
                break
            for y, eidx in tree_adj[x]:
                if y not in prev:
                    prev[y] = (x, eidx)
                    stack.append(y)
        path = []
        x = q
        while x != p:
            x, eidx = prev[x]
            path.append(eidx)
        return path

    basis = np.zeros((len(fundamental), ne), dtype=np.uint8)
    for r, idx in enumerate(fundamental):
        p, q = edge_pairs[idx]
        basis[r, idx] = 1
        for eidx in tree_path(p, q):
            basis[r, eidx] ^= 1
    dim = len(fundamental)
    picks = (np.arange(1 << dim, dtype=np.int64)[:, None] >> np.arange(dim)) & 1
    return (picks.astype(np.uint8) @ basis) % 2


def hightemp_z(model, beta, s, t, boundary="torus"):
    """Ising partition function via polygon (even subgraph) enumeration.

    Z = 2^sites * prod_e cosh(beta J_e) * sum over even subgraphs of
    prod_e tanh(beta J_e). Independent of the spin enumeration.
    """
    edges = _lattice_edges(model, s, t, boundary)
    nsites = s * model.m * t * model.n
    if len(edges) - nsites + 1 > 22:
        raise TooLarge("cycle space too large to enumerate")
    subs = even_subgraphs(nsites, [(p, q) for p, q, _, _, _ in edges])
    logtau = np.log([math.tanh(beta * J) for _, _, J, _, _ in edges])
    poly = math.fsum(np.exp(subs @ logtau).tolist())
    prefactor = (2.0 ** nsites) * math.exp(
        math.fsum(math.log(math.cosh(beta * J)) for _, _, J, _, _ in edges)
    )
    return prefactor * poly


class _Transfer:
    """Row-to-row transfer operator over a circumference of width sites.

    Matrix-free: the horizontal layer is a diagonal, the vertical layer is a
    product of per-site 2x2 kernels applied along tensor axes.
    """

    def __init__(self, model, beta, t):
        self.width = t * model.m
        if (1 << self.width) > _STATE_CAP:
            raise TooLarge("transfer state space exceeds 2^16")
        self.n = model.n
        spins = _spin_table(self.width).astype(float)
        self.site_spin = [spins[:, x] for x in range(self.width)]
        self.diag = []
        self.kern = []
        for j in range(model.n):
            e = np.zeros(1 << self.width)
            for x in range(self.width):
                J = model.Jh[x % model.m][j]
                e += beta * J * spins[:, x] * spins[:, (x + 1) % self.width]
            self.diag.append(np.exp(e))
            row = []
            for x in range(self.width):
                a = beta * model.Jv[x % model.m][j]
                row.append(np.array([[math.exp(a), math.exp(-a)],
                                     [math.exp(-a), math.exp(a)]]))
            self.kern.append(row)

    def _vertical(self, psi, j):
        cube = psi.reshape((2,) * self.width)
        for x in range(self.width):
            cube = np.moveaxis(np.tensordot(self.kern[j][x], cube, axes=(1, x)), 0, x)
        return cube.reshape(-1)

    def apply(self, psi):
        for j in range(self.n):
            psi = self._vertical(self.diag[j] * psi, j)
        return psi

    def apply_t(self, psi):
        for j in reversed(range(self.n)):
            psi = self.diag[j] * self._vertical(psi, j)
        return psi

    def top_vectors(self, tol=1e-14, max_iter=20000):
        def iterate(op):
            cur = np.full(1 << self.width, 1.0)
            for _ in range(max_iter):
                nxt = op(cur)
                nxt /= np.max(nxt)
                if np.max(np.abs(nxt - cur)) < tol:
                    return nxt
                cur = nxt
            return cur

        return iterate(self.apply_t), iterate(self.apply)


def transfer_corr(model, beta, t, i, dx=0):
    """Spin correlation <sigma_00 sigma_{dx, i*n}> on the infinite cylinder.

    The cylinder wraps t fundamental domains horizontally; the second spin
    sits i whole domains up (and optionally dx sites across). Exact infinite
    height through the top-eigenvector sandwich.
    """
    op = _Transfer(model, float(beta), int(t))
    i = int(i)
    if i < 0:
        raise ValueError("separation must be >= 0")
    left, right = op.top_vectors()
    s0 = op.site_spin[0]
    sx = op.site_spin[dx % op.width]
    if i == 0:
        if dx % op.width == 0:
            return 1.0
        return float(left @ (s0 * sx * right) / (left @ right))
    cur_num = sx * right
    cur_den = right
    for _ in range(i):
        cur_num = op.apply(cur_num)
        cur_den = op.apply(cur_den)
        scale = np.max(np.abs(cur_den))
        cur_num /= scale
        cur_den /= scale
    return float((left @ (s0 * cur_num)) / (left @ cur_den))


def transfer_torus_corr(model, beta, t, height, i):
    """Same correlation on a finite torus, via dense trace formulas.

    Closes the cylinder after `height` domains; exists to cross-check the
    transfer construction against direct spin enumeration.
    """
    op = _Transfer(model, float(beta), int(t))
    dim = 1 << op.width
    if dim > 4096:
        raise TooLarge("dense torus transfer is capped at 4096 states")
    q = np.empty((dim, dim))
    for c in range(dim):
        basis = np.zeros(dim)
        basis[c] = 1.0
        q[:, c] = op.apply(basis)
    s0 = np.diag(op.site_spin[0])
    qi = np.linalg.matrix_power(q, int(i))
    qrest = np.linalg.matrix_power(q, int(height) - int(i))
    return float(np.trace(s0 @ qi @ s0 @ qrest) / np.trace(qi @ qrest))
