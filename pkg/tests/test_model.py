"""Model documents, weight systems, and the duality involution."""

import numpy as np
import pytest

from ispec import (
    HIGH_TEMP,
    LOW_TEMP,
    DimensionMismatch,
    MalformedDocument,
    NonPositiveCoupling,
    WeightOutOfRange,
    dual_model,
    dualize,
    make_model,
    parse_model,
    replicate,
    weights,
)

# frozen independently: math.tanh(0.5) and math.exp(-1.0)
TANH_HALF = 0.46211715726000974
EXP_MINUS_ONE = 0.36787944117144233


def test_make_model_freezes_arrays(homogeneous):
    with pytest.raises(ValueError):
        homogeneous.Jh[0, 0] = 2.0


def test_make_model_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        make_model(2, 1, [[1.0]], [[1.0], [1.0]])


def test_make_model_rejects_nonpositive_coupling():
    with pytest.raises(NonPositiveCoupling):
        make_model(1, 1, [[0.0]], [[1.0]])
    with pytest.raises(NonPositiveCoupling):
        make_model(1, 1, [[1.0]], [[-2.0]])


def test_make_model_rejects_bad_periods():
    with pytest.raises(MalformedDocument):
        make_model(0, 1, [], [])


def test_parse_model_round_trip():
    text = '{"m": 2, "n": 1, "Jh": [[1.0], [2.0]], "Jv": [[0.5], [0.25]]}'
    model = parse_model(text)
    assert model.m == 2 and model.n == 1
    assert model.Jh[1][0] == 2.0
    assert model.Jv[1][0] == 0.25


def test_parse_model_rejects_garbage():
    with pytest.raises(MalformedDocument):
        parse_model("not json")
    with pytest.raises(MalformedDocument):
        parse_model('{"m": 1, "n": 1, "Jh": [[1.0]]}')
    with pytest.raises(MalformedDocument):
        parse_model('{"m": 1.5, "n": 1, "Jh": [[1.0]], "Jv": [[1.0]]}')
    with pytest.raises(MalformedDocument):
        parse_model('[1, 2, 3]')


def test_high_temp_weight_golden(homogeneous):
    wmap = weights(homogeneous, 0.5, HIGH_TEMP)
    assert abs(wmap.tau_h[0][0] - TANH_HALF) < 1e-15
    assert wmap.kind == HIGH_TEMP


def test_low_temp_weight_golden(homogeneous):
    wmap = weights(homogeneous, 0.5, LOW_TEMP)
    assert abs(wmap.tau_v[0][0] - EXP_MINUS_ONE) < 1e-15


def test_weights_reject_bad_beta(homogeneous):
    with pytest.raises(WeightOutOfRange):
        weights(homogeneous, 0.0, HIGH_TEMP)
    with pytest.raises(WeightOutOfRange):
        weights(homogeneous, -1.0, LOW_TEMP)
    with pytest.raises(WeightOutOfRange):
        weights(homogeneous, float("inf"), HIGH_TEMP)
    with pytest.raises(WeightOutOfRange):
        weights(homogeneous, float("nan"), HIGH_TEMP)
    with pytest.raises(ValueError):
        weights(homogeneous, 0.5, "bogus")


def test_weights_stay_inside_the_open_interval_when_tanh_saturates(homogeneous):
    # beta*J = 30 rounds tanh to 1.0; the weight must stay strictly below
    wmap = weights(homogeneous, 30.0, HIGH_TEMP)
    assert 0.0 < wmap.tau_h[0][0] < 1.0
    assert float(wmap.tau_h[0][0]) == np.nextafter(1.0, 0.0)


def test_dualize_exchanges_the_weight_systems(aniso):
    # (1 - tanh(bJ)) / (1 + tanh(bJ)) = exp(-2 bJ), edge by edge
    ht = weights(aniso, 0.37, HIGH_TEMP)
    lt = weights(aniso, 0.37, LOW_TEMP)
    flipped = dualize(ht)
    assert flipped.kind == LOW_TEMP
    assert np.allclose(flipped.tau_h, lt.tau_h, atol=1e-15)
    assert np.allclose(flipped.tau_v, lt.tau_v, atol=1e-15)


def test_dualize_is_an_involution(homogeneous):
    ht = weights(homogeneous, 0.8, HIGH_TEMP)
    back = dualize(dualize(ht))
    assert back.kind == ht.kind
    assert np.allclose(back.tau_h, ht.tau_h, atol=1e-15)


def test_dualize_fixed_point():
    # tau = sqrt(2) - 1 solves tau = (1-tau)/(1+tau)
    tau = 2.0**0.5 - 1.0
    from ispec import EdgeWeightMap

    wmap = EdgeWeightMap(HIGH_TEMP, [[tau]], [[tau]])
    out = dualize(wmap)
    assert abs(out.tau_h[0][0] - tau) < 1e-15


def test_replicate_tiles_couplings(aniso):
    big = replicate(aniso, 3, 2)
    assert big.m == 3 and big.n == 2
    assert np.all(big.Jh == 1.0)
    assert np.all(big.Jv == 2.0)


def test_replicate_preserves_pattern():
    model = make_model(2, 1, [[1.0], [2.0]], [[3.0], [4.0]])
    big = replicate(model, 2, 2)
    for i in range(4):
        for j in range(2):
            assert big.Jh[i][j] == model.Jh[i % 2][0]
            assert big.Jv[i][j] == model.Jv[i % 2][0]


def test_dual_model_swaps_directions():
    rng = np.random.default_rng(3)
    model = make_model(2, 2, 1 + rng.random((2, 2)), 1 + rng.random((2, 2)))
    dual = dual_model(model)
    # the dual's horizontal couplings are a translate of the primal verticals
    assert sorted(dual.Jh.ravel()) == sorted(model.Jv.ravel())
    assert sorted(dual.Jv.ravel()) == sorted(model.Jh.ravel())
    # and dualizing twice translates back to the original multiset
    again = dual_model(dual)
    assert np.allclose(sorted(again.Jh.ravel()), sorted(model.Jh.ravel()))
