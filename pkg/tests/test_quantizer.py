import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mslab.distributions import ContinuousParent, SeedSpec
from mslab.quantizer import (
    SPACE_FILLING_G,
    Codebook,
    ConvergenceError,
    high_rate_validate,
    interchange_check,
    lloyd_max_1d,
    lloyd_max_parent,
    ordered_restriction,
    os_quantizer_2d_gaussian,
    product_codebook,
    rotated_product_codebook,
    scheme_ledger,
    sorted_gaussian_pairs,
)

GAUSS = ContinuousParent.gaussian()
R1_TOTAL = (2 * math.pi - 4) / math.pi


def test_codebook_validation_and_json():
    with pytest.raises(ValueError):
        Codebook(2, [[1.0, 0.0]], "ordered")
    with pytest.raises(ValueError):
        Codebook(2, [[1.0, 0.0, 2.0]])
    with pytest.raises(ValueError):
        Codebook(1, [[0.0]], "sorted")
    cb = Codebook(2, [[-1.0, 0.5], [0.0, 2.0]], "ordered")
    back = Codebook.from_json(json.loads(json.dumps(cb.to_json())))
    assert back.space == "ordered" and np.array_equal(back.points, cb.points)
    assert not cb.points.flags.writeable


def test_ordered_assign_sorts_input():
    cb = Codebook(2, [[-1.0, 1.0], [2.0, 3.0]], "ordered")
    assert cb.assign([[1.0, -1.0], [3.0, 2.0]]).tolist() == [0, 1]
    assert cb.distortion([[1.0, -1.0]]) == 0.0


def test_lloyd_gaussian_one_bit():
    res = lloyd_max_parent(GAUSS, 1)
    c = math.sqrt(2 / math.pi)
    np.testing.assert_allclose(res.codebook.points.ravel(), [-c, c], atol=1e-6)
    assert res.distortion == pytest.approx(1 - 2 / math.pi, abs=1e-9)


@pytest.mark.parametrize("rate, expected", [(2, 0.1175), (3, 0.03454)])
def test_lloyd_gaussian_known_values(rate, expected):
    assert lloyd_max_parent(GAUSS, rate).distortion == pytest.approx(expected, rel=2e-3)


def test_lloyd_rate_zero_is_mean():
    res = lloyd_max_parent(ContinuousParent.exponential(), 0)
    assert res.codebook.points[0, 0] == pytest.approx(1.0)
    assert res.distortion == pytest.approx(1.0)


@pytest.mark.parametrize("rate", [1, 2, 3])
def test_lloyd_uniform_is_uniform_grid(rate):
    M = 2**rate
    res = lloyd_max_1d(lambda x: 1.0, rate, support=(0.0, 1.0))
    np.testing.assert_allclose(res.codebook.points.ravel(), (np.arange(M) + 0.5) / M, atol=1e-5)
    assert res.distortion == pytest.approx(1 / (12 * M * M), rel=1e-5)


def test_lloyd_history_nonincreasing_and_errors():
    res = lloyd_max_parent(GAUSS, 2)
    assert all(b <= a + 1e-14 for a, b in zip(res.history, res.history[1:]))
    with pytest.raises(ValueError):
        lloyd_max_parent(GAUSS, -1)
    with pytest.raises(ValueError):
        lloyd_max_parent(GAUSS, 1, init=[0.0])
    with pytest.raises(ConvergenceError):
        lloyd_max_parent(GAUSS, 3, max_iter=2)


def test_sorted_pairs():
    x = sorted_gaussian_pairs(1 << 14, seed=1)
    assert x.shape == (1 << 14, 2) and np.all(x[:, 0] <= x[:, 1])
    assert np.array_equal(x, sorted_gaussian_pairs(1 << 14, seed=1))
    assert x[:, 0].mean() == pytest.approx(-1 / math.sqrt(math.pi), abs=0.01)


def test_os_quantizer_one_bit():
    res = os_quantizer_2d_gaussian(1, n_samples=1 << 18, seed=0)
    assert res.distortion_total == pytest.approx(R1_TOTAL, abs=2e-3)
    assert res.distortion_per_letter == pytest.approx(res.distortion_total / 2)
    assert res.codebook.space == "ordered" and len(res.codebook) == 2


def test_os_quantizer_rate_zero():
    res = os_quantizer_2d_gaussian(0, n_samples=1 << 18, seed=0)
    assert res.distortion_per_letter == pytest.approx(1 - 1 / math.pi, abs=1e-3)


def test_os_quantizer_monotone_in_rate():
    d = [os_quantizer_2d_gaussian(r, n_samples=1 << 16, seed=2).distortion_total for r in range(4)]
    assert all(b < a for a, b in zip(d, d[1:]))


def test_os_quantizer_rejects_rate():
    with pytest.raises(ValueError):
        os_quantizer_2d_gaussian(4)


def test_os_beats_lloyd_per_letter():
    # sorting first is never worse than quantizing each letter at the same total rate
    os_d = os_quantizer_2d_gaussian(2, n_samples=1 << 16, seed=0).distortion_per_letter
    assert os_d < lloyd_max_parent(GAUSS, 1).distortion


def test_rotated_product_restriction_matches_one_bit_design():
    a = math.sqrt(2 / math.pi)
    cb = rotated_product_codebook(a)
    check = interchange_check(cb)
    assert check.ok and len(check.orbits) == 2
    restricted = ordered_restriction(cb)
    # the two points on the cone form the 1-bit ordered design
    np.testing.assert_allclose(restricted.points, [[-a * math.sqrt(2), 0.0], [0.0, a * math.sqrt(2)]])
    x = sorted_gaussian_pairs(1 << 18, seed=0)
    assert restricted.distortion(x) == pytest.approx(R1_TOTAL, abs=2e-3)
    designed = os_quantizer_2d_gaussian(1, n_samples=1 << 18, seed=0).codebook.points
    np.testing.assert_allclose(np.sort(designed, axis=0), restricted.points, atol=5e-3)


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=4, unique=True), st.integers(1, 3))
def test_product_codebooks_interchange(levels, K):
    assert interchange_check(product_codebook(levels, K)).ok


def test_interchange_violation():
    res = interchange_check(Codebook(2, [[0.0, 1.0], [2.0, 2.0]]))
    assert not res.ok and res.violation == (1, 0)
    with pytest.raises(ValueError):
        interchange_check(Codebook(2, [[0.0, 1.0]]), K=3)


def test_scheme_ledger_k2():
    led = scheme_ledger(2)
    assert led.row(1).rate_reduction_bits == 0.0
    assert led.row(2).rate_reduction_bits == pytest.approx(1 - 0.5 * math.log2(math.e))
    assert led.row(3).rate_reduction_bits == pytest.approx(0.5)
    assert led.row(4).distortion_factor == pytest.approx(1 / SPACE_FILLING_G[2])
    assert led.g_available and len(led.to_records()) == 4


def test_scheme_ledger_without_g():
    led = scheme_ledger(5)
    assert not led.g_available and led.row(4).distortion_factor is None
    assert led.row(3).rate_reduction_bits == pytest.approx(math.log2(120) / 5)
    with pytest.raises(ValueError):
        scheme_ledger(0)


def test_high_rate_small_run():
    step = 2.0**-5
    res = high_rate_validate(GAUSS, 2, step, n_letters=2 * 10**6, seed=SeedSpec(1))
    for s in (1, 2, 3):
        assert res.rate[s] == pytest.approx(res.predicted_rate[s], abs=0.02)
        assert res.mse[s] == pytest.approx(step**2 / 12, rel=0.02)
    assert res.rate[1] - res.rate[3] == pytest.approx(0.5, abs=0.05)
    with pytest.raises(ValueError):
        high_rate_validate(GAUSS, 2, 0.0)
