"""Randomized invariant checks."""

import math

import numpy as np
from hypothesis import given, settings, strategies as st

from conftest import random_model
from ispec import (
    HIGH_TEMP,
    assemble,
    critical_beta,
    dualize,
    enumerate_spin,
    even_subgraphs,
    fisher_graph,
    fourier_coeffs,
    lee_yang_check,
    make_model,
    pfaffian,
    polygon_to_dimer,
    replicate,
    torus_partition,
    weights,
)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4, 6, 8]))
def test_pfaffian_squares_to_determinant(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-2.0, 2.0, (n, n))
    a = a - a.T
    det = np.linalg.det(a)
    assert abs(pfaffian(a) ** 2 - det) < 1e-8 * max(1.0, abs(det))


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0.05, 2.5),
    st.floats(0.1, 3.0),
    st.floats(0.1, 3.0),
)
def test_dual_weights_are_an_involution(beta, jh, jv):
    model = make_model(1, 1, [[jh]], [[jv]])
    w = weights(model, beta, HIGH_TEMP)
    back = dualize(dualize(w))
    assert back.kind == w.kind
    assert abs(float(back.tau_h[0][0]) - float(w.tau_h[0][0])) < 1e-12
    assert abs(float(back.tau_v[0][0]) - float(w.tau_v[0][0])) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_fourier_coefficients_round_trip(seed, kmax):
    rng = np.random.default_rng(seed)
    want = {
        k: complex(rng.normal(), rng.normal()) for k in range(-kmax, kmax + 1)
    }
    M = 8 * kmax + 8
    nodes = np.exp(2j * np.pi * np.arange(M) / M)
    samples = sum(c * nodes**k for k, c in want.items())
    got = fourier_coeffs(samples, range(-kmax, kmax + 1), M)
    for k, c in want.items():
        assert abs(got[k] - c) < 1e-10


_SHAPES = [(1, 1, 2, 2), (1, 2, 2, 1), (2, 1, 1, 2), (2, 2, 1, 1), (1, 1, 2, 4)]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(_SHAPES), st.floats(0.15, 0.6))
def test_partition_identity_on_random_ferromagnets(seed, shape, beta):
    m, n, s, t = shape
    model = random_model(np.random.default_rng(seed), m, n, 0.3, 2.0)
    z_spin, _, _ = enumerate_spin(model, beta, s, t)
    cover = replicate(model, s, t)
    sites = cover.m * cover.n
    cosh_prod = float(
        np.prod(np.cosh(beta * np.asarray(cover.Jh)))
        * np.prod(np.cosh(beta * np.asarray(cover.Jv)))
    )
    z_dimer = torus_partition(assemble(cover, beta))
    assert abs(2.0**sites * cosh_prod * z_dimer - z_spin) < 1e-10 * z_spin


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_even_subgraphs_form_the_cycle_space(seed, nverts):
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(nverts) for j in range(i + 1, nverts)]
    count = int(rng.integers(1, len(pairs) + 1))
    edges = [pairs[i] for i in rng.permutation(len(pairs))[:count]]
    subs = even_subgraphs(nverts, edges)
    for row in subs:
        deg = [0] * nverts
        for on, (p, q) in zip(row, edges):
            if on:
                deg[p] += 1
                deg[q] += 1
        assert all(d % 2 == 0 for d in deg)
    assert len({tuple(r) for r in subs}) == len(subs)
    parent = list(range(nverts))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p, q in edges:
        parent[find(p)] = find(q)
    comps = len({find(x) for x in range(nverts)})
    assert len(subs) == 2 ** (len(edges) - nverts + comps)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_spin_patterns_map_to_perfect_matchings(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    s, t = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    model = random_model(rng, m, n, 0.3, 2.0)
    graph = fisher_graph(model, weights(model, 0.3, HIGH_TEMP), s, t)
    spins = rng.choice([-1, 1], size=(s * m, t * n))
    match = polygon_to_dimer(graph, spins)
    cover = np.zeros(len(graph.vertices), dtype=int)
    for idx in match:
        cover[graph.edges[idx].u] += 1
        cover[graph.edges[idx].v] += 1
    assert np.all(cover == 1)
    assert polygon_to_dimer(graph, -spins) == match


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 0.8))
def test_lee_yang_circle_on_random_ferromagnets(seed, beta):
    model = random_model(np.random.default_rng(seed), 1, 1, 0.2, 3.0)
    assert lee_yang_check(model, beta, 2, 2) < 1e-8


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_critical_point_ignores_the_period_choice(seed):
    model = random_model(np.random.default_rng(seed), 1, 1, 0.5, 2.0)
    b1 = critical_beta(model, tol=1e-10)[0]
    b2 = critical_beta(replicate(model, 2, 2), tol=1e-10)[0]
    assert abs(b1 - b2) < 1e-8
