"""Ground-truth layer: exhaustive sums, polygon expansion, transfer matrices."""

import math

import numpy as np
import pytest

from conftest import random_model
from ispec import (
    HIGH_TEMP,
    TooLarge,
    enumerate_dimer,
    enumerate_spin,
    even_subgraphs,
    fisher_graph,
    hightemp_z,
    lee_yang_check,
    make_model,
    transfer_corr,
    transfer_torus_corr,
    weights,
)


def test_single_site_torus_partition_function():
    # one site on a torus sees both couplings as self loops
    model = make_model(1, 1, [[0.7]], [[1.3]])
    beta = 0.45
    z, corr, coeffs = enumerate_spin(model, beta, 1, 1)
    assert abs(z - 2.0 * math.exp(beta * (0.7 + 1.3))) < 1e-12
    assert corr[0][0] == 1.0
    assert abs(sum(coeffs) - z) < 1e-12


def test_free_two_site_chain():
    model = make_model(1, 1, [[1.0]], [[1.0]])
    beta = 0.37
    z, corr, _ = enumerate_spin(model, beta, 2, 1, boundary="free")
    # two sites, one bond: Z = 4 cosh(beta J), <s0 s1> = tanh(beta J)
    assert abs(z - 4.0 * math.cosh(beta)) < 1e-12
    assert abs(corr[1][0] - math.tanh(beta)) < 1e-12


def test_field_polynomial_reproduces_field_partition_sum():
    model = make_model(1, 1, [[1.0]], [[1.0]])
    beta, h = 0.4, 0.23
    zh, _, _ = enumerate_spin(model, beta, 2, 2, h=h)
    _, _, coeffs = enumerate_spin(model, beta, 2, 2)
    nsites = 4
    poly = sum(
        c * math.exp(beta * h * (nsites - 2 * k)) for k, c in enumerate(coeffs)
    )
    assert abs(zh - poly) < 1e-10 * zh


def test_enumerate_spin_rejects_bad_boundary_and_size():
    model = make_model(1, 1, [[1.0]], [[1.0]])
    with pytest.raises(ValueError):
        enumerate_spin(model, 0.3, 2, 2, boundary="helical")
    with pytest.raises(TooLarge):
        enumerate_spin(model, 0.3, 5, 5)


def test_polygon_expansion_matches_spin_enumeration():
    rng = np.random.default_rng(11)
    for m, n, s, t in ((1, 1, 2, 2), (2, 1, 1, 2), (1, 2, 2, 1), (2, 2, 1, 1)):
        model = random_model(rng, m, n, 0.4, 1.6)
        beta = float(rng.uniform(0.2, 0.6))
        zs, _, _ = enumerate_spin(model, beta, s, t)
        zp = hightemp_z(model, beta, s, t)
        assert abs(zs - zp) < 1e-12 * zs


def test_polygon_expansion_free_boundary():
    model = make_model(1, 1, [[1.0]], [[1.0]])
    zs, _, _ = enumerate_spin(model, 0.44, 3, 2, boundary="free")
    zp = hightemp_z(model, 0.44, 3, 2, boundary="free")
    assert abs(zs - zp) < 1e-12 * zs


def test_even_subgraph_counts():
    triangle = even_subgraphs(3, [(0, 1), (1, 2), (2, 0)])
    assert triangle.shape == (2, 3)
    k4_edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    k4 = even_subgraphs(4, k4_edges)
    assert k4.shape == (8, 6)
    rows = {tuple(r) for r in k4}
    assert len(rows) == 8
    for row in k4:
        deg = [0, 0, 0, 0]
        for on, (p, q) in zip(row, k4_edges):
            if on:
                deg[p] += 1
                deg[q] += 1
        assert all(d % 2 == 0 for d in deg)


def test_dimer_partition_single_gadget():
    model = make_model(1, 1, [[0.8]], [[1.2]])
    beta = 0.4
    w = weights(model, beta, HIGH_TEMP)
    th = float(w.tau_h[0][0])
    tv = float(w.tau_v[0][0])
    z, probs, sectors = enumerate_dimer(fisher_graph(model, w, 1, 1))
    # matchings of one decorated site: the internal one, and one per
    # wrapped lattice edge, plus both wraps together
    assert abs(z - (1.0 + th) * (1.0 + tv)) < 1e-14
    assert abs(sum(sectors.values()) - z) < 1e-14
    assert np.all(probs >= 0.0) and np.all(probs <= 1.0)


def test_dimer_sector_split_single_gadget():
    model = make_model(1, 1, [[0.8]], [[1.2]])
    w = weights(model, 0.4, HIGH_TEMP)
    th = float(w.tau_h[0][0])
    tv = float(w.tau_v[0][0])
    _, _, sectors = enumerate_dimer(fisher_graph(model, w, 1, 1))
    assert abs(sectors[(0, 0)] - 1.0) < 1e-14
    assert abs(sectors[(0, 1)] - th) < 1e-14
    assert abs(sectors[(1, 0)] - tv) < 1e-14
    assert abs(sectors[(1, 1)] - th * tv) < 1e-14


def test_dimer_cap():
    model = make_model(1, 1, [[1.0]], [[1.0]])
    w = weights(model, 0.3, HIGH_TEMP)
    with pytest.raises(TooLarge):
        enumerate_dimer(fisher_graph(model, w, 7, 1))


def test_lee_yang_roots_on_unit_circle():
    rng = np.random.default_rng(23)
    model = random_model(rng, 2, 2, 0.3, 2.0)
    assert lee_yang_check(model, 0.5, 2, 1) < 1e-8
    assert lee_yang_check(model, 0.5, 1, 1, boundary="free") < 1e-8


def test_lee_yang_cap():
    model = make_model(1, 1, [[1.0]], [[1.0]])
    with pytest.raises(TooLarge):
        lee_yang_check(model, 0.3, 5, 4)


def test_torus_transfer_matches_spin_enumeration():
    rng = np.random.default_rng(5)
    model = random_model(rng, 1, 1, 0.5, 1.5)
    beta = 0.38
    _, corr, _ = enumerate_spin(model, beta, 3, 4)
    for i in (1, 2):
        got = transfer_torus_corr(model, beta, 3, 4, i)
        assert abs(got - corr[0][i]) < 1e-10


def test_torus_transfer_multi_row_period():
    model = make_model(1, 2, [[0.9, 1.1]], [[1.2, 0.7]])
    beta = 0.3
    _, corr, _ = enumerate_spin(model, beta, 2, 2)
    got = transfer_torus_corr(model, beta, 2, 2, 1)
    # i counts whole vertical periods, so the spin sits n rows up
    assert abs(got - corr[0][model.n]) < 1e-10


def test_cylinder_transfer_is_tall_torus_limit():
    model = make_model(1, 1, [[1.0]], [[1.0]])
    beta = 0.3
    inf = transfer_corr(model, beta, 4, 1)
    tall = transfer_torus_corr(model, beta, 4, 40, 1)
    assert abs(inf - tall) < 1e-8


def test_cylinder_transfer_same_row():
    model = make_model(1, 1, [[1.0]], [[1.0]])
    assert transfer_corr(model, 0.3, 4, 0) == 1.0
    across = transfer_corr(model, 0.3, 4, 0, dx=1)
    assert 0.0 < across < 1.0
    torus = transfer_torus_corr(model, 0.3, 4, 40, 0)
    assert torus == 1.0


def test_transfer_validation_and_caps():
    model = make_model(1, 1, [[1.0]], [[1.0]])
    with pytest.raises(ValueError):
        transfer_corr(model, 0.3, 2, -1)
    with pytest.raises(TooLarge):
        transfer_corr(model, 0.3, 17, 1)
    with pytest.raises(TooLarge):
        transfer_torus_corr(model, 0.3, 13, 20, 1)


def test_transfer_correlation_decays_subcritical():
    model = make_model(1, 1, [[1.0]], [[1.0]])
    vals = [transfer_corr(model, 0.35, 4, i) for i in (1, 2, 3)]
    assert vals[0] > vals[1] > vals[2] > 0.0
