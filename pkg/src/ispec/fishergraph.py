"""Fisher decoration of the periodic square lattice and its Kasteleyn signs.

Every Ising site becomes a six-vertex gadget: two triangles (R, U, A) and
(L, D, B) joined by the bridge A-B, all seven internal edges of weight 1.
Terminal R reaches the L of the right neighbor with the horizontal edge
weight, U reaches the D of the upper neighbor with the vertical weight, so
every vertex ends up with degree 3 and each site owns 9 edges.

Signs come from a clockwise-odd orientation. The gadget vertices get fixed
planar coordinates, the induced rotation system is traced into faces (three
per site), and a GF(2) solve picks edge directions giving every face an odd
number of boundary edges pointing along the traversal. Solving on the
one-domain torus with darts keyed per fundamental edge yields a periodic
orientation, valid on every s x t cover; covers only add their own wrap
flags (crossesX on vertical edges crossing the cut between site rows
t*n-1 and 0, crossesY on horizontal edges between columns s*m-1 and 0).
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BijectionFailure, NonOrientable

ROLES = ("R", "L", "U", "D", "A", "B")
ROLE_IDX = {r: k for k, r in enumerate(ROLES)}

# Intra-gadget edges as canonical role pairs.
INTRA_TAGS = {
    "RU": ("R", "U"),
    "RA": ("R", "A"),
    "UA": ("U", "A"),
    "LD": ("L", "D"),
    "LB": ("L", "B"),
    "DB": ("D", "B"),
    "AB": ("A", "B"),
}

# All edge tags a fundamental key may carry.
EDGE_TAGS = frozenset(INTRA_TAGS) | {"H", "V"}

# Unique internal completion for each even subset of externally matched
# terminals. Odd subsets have none (the gadget has six vertices).
COMPLETION = {
    frozenset(): ("RU", "AB", "LD"),
    frozenset("RL"): ("UA", "DB"),
    frozenset("RU"): ("AB", "LD"),
    frozenset("RD"): ("UA", "LB"),
    frozenset("LU"): ("RA", "DB"),
    frozenset("LD"): ("RU", "AB"),
    frozenset("UD"): ("RA", "LB"),
    frozenset("RLUD"): ("AB",),
}

# Counterclockwise neighbor order around each role, from the planar layout
# R=(.3,0) U=(0,.3) L=(-.3,0) D=(0,-.3) A=(.1,.1) B=(-.1,-.1) per site.
# "H" and "V" mark the external edge to the right/upper neighbor gadget.
_ROTATIONS = {
    "R": (("H", +1), ("U", 0), ("A", 0)),
    "U": (("V", +1), ("A", 0), ("R", 0)),
    "L": (("H", -1), ("D", 0), ("B", 0)),
    "D": (("B", 0), ("L", 0), ("V", -1)),
    "A": (("U", 0), ("B", 0), ("R", 0)),
    "B": (("A", 0), ("L", 0), ("D", 0)),
}


@dataclass(frozen=True)
class FisherVertex:
    cell: tuple
    site: tuple
    role: str


@dataclass
class FisherEdge:
    u: int
    v: int
    weight: float
    sign: int
    crossesX: bool
    crossesY: bool
    key: tuple  # (tag, gx, gy) with tag an intra tag, "H", or "V"


@dataclass
class FisherGraph:
    vertices: list
    edges: list
    torus: tuple
    m: int
    n: int
    oriented: bool = False
    edge_index: dict = field(default_factory=dict)

    def vid(self, gx, gy, role):
        sm = self.torus[0] * self.m
        tn = self.torus[1] * self.n
        return ((gx % sm) * tn + (gy % tn)) * 6 + ROLE_IDX[role]

    def adjacency(self):
        adj = [[] for _ in self.vertices]
        for idx, e in enumerate(self.edges):
            adj[e.u].append((idx, e.v))
            adj[e.v].append((idx, e.u))
        return adj


def _fundamental_edges(m, n):
    """Canonical (key, endpoint, endpoint) list; endpoints are (role, i, j)."""
    out = []
    for i in range(m):
        for j in range(n):
            for tag, (r1, r2) in INTRA_TAGS.items():
                out.append(((tag, i, j), (r1, i, j), (r2, i, j)))
            out.append((("H", i, j), ("R", i, j), ("L", (i + 1) % m, j)))
            out.append((("V", i, j), ("U", i, j), ("D", i, (j + 1) % n)))
    return out


def _neighbor(role, i, j, m, n, slot):
    """Resolve a rotation slot to (neighbor vertex, edge key)."""
    kind, shift = _ROTATIONS[role][slot]
    if kind == "H":
        if shift > 0:
            return ("L", (i + 1) % m, j), ("H", i, j)
        return ("R", (i - 1) % m, j), ("H", (i - 1) % m, j)
    if kind == "V":
        if shift > 0:
            return ("D", i, (j + 1) % n), ("V", i, j)
        return ("U", i, (j - 1) % n), ("V", i, (j - 1) % n)
    other = kind
    pair = "".join(sorted((role, other), key="RLUDAB".index))
    tag = pair if pair in INTRA_TAGS else pair[::-1]
    return (other, i, j), (tag, i, j)


def _faces(m, n):
    """Face walks of the one-domain torus as lists of darts.

    A dart is ((u_vertex, v_vertex), edge_key). The walk rule takes the
    predecessor of the incoming direction in the counterclockwise rotation
    at the head, which traces every face of the periodic planar embedding
    with one fixed handedness.
    """
    rot = {}
    for i in range(m):
        for j in range(n):
            for role in ROLES:
                u = (role, i, j)
                rot[u] = [_neighbor(role, i, j, m, n, s) for s in range(3)]
    darts = {}
    for u, nbrs in rot.items():
        for v, key in nbrs:
            darts[(u, v)] = key
    faces = []
    seen = set()
    for start in darts:
        if start in seen:
            continue
        walk = []
        cur = start
        while True:
            walk.append((cur, darts[cur]))
            seen.add(cur)
            u, v = cur
            nbrs = rot[v]
            pos = next(k for k, (w, _) in enumerate(nbrs) if w == u)
            cur = (v, nbrs[(pos - 1) % 3][0])
            if cur == start:
                break
        faces.append(walk)
    if len(faces) != 3 * m * n:
        raise NonOrientable(
            "face tracing found %d faces, expected %d" % (len(faces), 3 * m * n)
        )
    return faces


def _gf2_solve(rows, rhs, ncols):
    """Any solution of a sparse GF(2) system, free variables set to 0."""
    a = np.zeros((len(rows), ncols + 1), dtype=np.uint8)
    for r, cols in enumerate(rows):
        for c in cols:
            a[r, c] ^= 1
        a[r, ncols] = rhs[r] & 1
    rank = 0
    pivots = []
    for c in range(ncols):
        hot = np.nonzero(a[rank:, c])[0]
        if hot.size == 0:
            continue
        pr = rank + int(hot[0])
        if pr != rank:
            a[[rank, pr]] = a[[pr, rank]]
        mask = a[:, c].astype(bool)
        mask[rank] = False
        a[mask] ^= a[rank]
        pivots.append(c)
        rank += 1
        if rank == a.shape[0]:
            break
    if np.any((a[rank:, :ncols].sum(axis=1) == 0) & (a[rank:, ncols] == 1)):
        raise NonOrientable("face parity system is inconsistent")
    x = np.zeros(ncols, dtype=np.uint8)
    for r, c in enumerate(pivots):
        x[c] = a[r, ncols]
    return x


@lru_cache(maxsize=None)
def _orientation_table():
    """Map edge tag -> flip bit (1 means oriented v -> u).

    The parity system is solved once on the one-site torus. Its solution
    repeats identically at every site, and because the infinite decorated
    lattice is the same graph no matter how large the declared fundamental
    domain is, the per-site pattern is a valid orientation for every m x n
    model and every cover of it. Using one shared pattern also makes
    operators of replicated models literal block refinements of the
    original, which the spectral layer relies on.
    """
    keys = [k for k, _, _ in _fundamental_edges(1, 1)]
    col = {k: c for c, k in enumerate(keys)}
    canon = {k: (u, v) for k, u, v in _fundamental_edges(1, 1)}
    rows = []
    rhs = []
    for walk in _faces(1, 1):
        cols = []
        const = 0
        for (u, v), key in walk:
            cols.append(col[key])
            if (u, v) != canon[key]:
                const ^= 1
        rows.append(cols)
        rhs.append(1 ^ const)
    x = _gf2_solve(rows, rhs, len(keys))
    return {k[0]: int(x[col[k]]) for k in keys}


def build_fisher(model, wmap, s, t):
    """Decorated graph for an s x t torus of fundamental domains.

    Signs are left at +1; run orient_crossing to populate them.
    """
    s, t = int(s), int(t)
    if s < 1 or t < 1:
        raise ValueError("torus factors must be >= 1")
    m, n = model.m, model.n
    sm, tn = s * m, t * n
    vertices = []
    for gx in range(sm):
        for gy in range(tn):
            for role in ROLES:
                vertices.append(
                    FisherVertex((gx // m, gy // n), (gx % m, gy % n), role)
                )
    g = FisherGraph(vertices, [], (s, t), m, n)
    for gx in range(sm):
        for gy in range(tn):
            i, j = gx % m, gy % n
            for tag, (r1, r2) in INTRA_TAGS.items():
                e = FisherEdge(
                    g.vid(gx, gy, r1), g.vid(gx, gy, r2), 1.0, 1, False, False,
                    (tag, gx, gy),
                )
                g.edge_index[e.key] = len(g.edges)
                g.edges.append(e)
            e = FisherEdge(
                g.vid(gx, gy, "R"), g.vid(gx + 1, gy, "L"),
                float(wmap.tau_h[i][j]), 1, False, gx == sm - 1, ("H", gx, gy),
            )
            g.edge_index[e.key] = len(g.edges)
            g.edges.append(e)
            e = FisherEdge(
                g.vid(gx, gy, "U"), g.vid(gx, gy + 1, "D"),
                float(wmap.tau_v[i][j]), 1, False, False, ("V", gx, gy),
            )
            e.crossesX = gy == tn - 1
            g.edge_index[e.key] = len(g.edges)
            g.edges.append(e)
    return g


def orient_crossing(graph):
    """Populate edge signs with the periodic clockwise-odd orientation.

    sign = +1 means the edge is oriented from its stored u to its stored v.
    The solved pattern repeats per fundamental domain, so all contractible
    faces of any cover are odd; sector matrices later flip crossesX/crossesY
    entries on top of these signs.
    """
    table = _orientation_table()
    for e in graph.edges:
        e.sign = -1 if table[e.key[0]] else 1
    graph.oriented = True
    return graph


def fisher_graph(model, wmap, s, t):
    """build_fisher followed by orient_crossing."""
    return orient_crossing(build_fisher(model, wmap, s, t))


def _wall_edges(graph, spins):
    """External edge keys crossed by domain walls of the spin pattern."""
    sm = graph.torus[0] * graph.m
    tn = graph.torus[1] * graph.n
    spins = np.asarray(spins)
    if spins.shape != (sm, tn):
        raise BijectionFailure(
            "spin grid shape %s does not match torus %s" % (spins.shape, (sm, tn))
        )
    if not np.all(np.abs(spins) == 1):
        raise BijectionFailure("spins must be +-1")
    present = set()
    for gx in range(sm):
        for gy in range(tn):
            if spins[gx][gy - 1] != spins[gx][gy]:
                present.add(("H", gx, gy))
            if spins[gx - 1][gy] != spins[gx][gy]:
                present.add(("V", gx, gy))
    return present


def polygon_to_dimer(graph, spins):
    """Perfect matching corresponding to a spin configuration.

    The closed polygon is the domain wall of the spins; each polygon edge is
    the matching's external edge, and every gadget is completed internally
    through the unique even-subset pattern. Two-to-one: flipping all spins
    gives the same matching.
    """
    return complete_matching(graph, _wall_edges(graph, spins))


def complete_matching(graph, external_keys):
    """Extend a set of external edge keys to a perfect matching.

    Raises BijectionFailure when some gadget is left with an odd number of
    matched terminals, which is exactly when the polygon is not closed.
    """
    sm = graph.torus[0] * graph.m
    tn = graph.torus[1] * graph.n
    external_keys = set(external_keys)
    chosen = []
    for key in external_keys:
        if key not in graph.edge_index:
            raise BijectionFailure("unknown external edge %r" % (key,))
        chosen.append(graph.edge_index[key])
    for gx in range(sm):
        for gy in range(tn):
            terms = set()
            if ("H", gx, gy) in external_keys:
                terms.add("R")
            if ("H", (gx - 1) % sm, gy) in external_keys:
                terms.add("L")
            if ("V", gx, gy) in external_keys:
                terms.add("U")
            if ("V", gx, (gy - 1) % tn) in external_keys:
                terms.add("D")
            pattern = COMPLETION.get(frozenset(terms))
            if pattern is None:
                raise BijectionFailure(
                    "odd terminal set %s at gadget (%d,%d)" % (sorted(terms), gx, gy)
                )
            for tag in pattern:
                chosen.append(graph.edge_index[(tag, gx, gy)])
    covered = np.zeros(len(graph.vertices), dtype=int)
    for idx in chosen:
        covered[graph.edges[idx].u] += 1
        covered[graph.edges[idx].v] += 1
    if not np.all(covered == 1):
        raise BijectionFailure("completion is not a perfect matching")
    return sorted(chosen)


def dump_edges(graph):
    """Debug CSV: one line per edge, u_id,v_id,weight,sign,crossesX,crossesY."""
    lines = ["u_id,v_id,weight,sign,crossesX,crossesY"]
    for e in graph.edges:
        lines.append(
            "%d,%d,%.17g,%d,%s,%s"
            % (e.u, e.v, e.weight, e.sign, e.crossesX, e.crossesY)
        )
    return "\n".join(lines) + "\n"
