from math import comb, sqrt

import numpy as np
import pytest

from fermion_mbody.fock import binom
from fermion_mbody.mbody import rho_m
from fermion_mbody.oracles import (
    appendix_b_report,
    cluster_spectrum,
    figure1_csv,
    figure1_data,
    ghz_spectrum,
    lambda_2m_max,
    pair_condensate_spectrum,
    slater_spectrum,
)
from fermion_mbody.states import make_ghz, make_odd_pair_condensate, make_pair_condensate, make_slater


def test_closed_form_examples():
    s2 = pair_condensate_spectrum(12, 3, 2)
    assert s2.merged() == [(pytest.approx(2.0), 1), (pytest.approx(0.2), 65)]
    assert s2.total == pytest.approx(15)
    s3 = pair_condensate_spectrum(12, 3, 3)
    assert s3.merged() == [(pytest.approx(0.8), 12), (pytest.approx(0.05), 208)]
    assert s3.total == pytest.approx(20)
    assert pair_condensate_spectrum(12, 6, 2).max == pytest.approx(1.0)
    with pytest.raises(ValueError):
        pair_condensate_spectrum(4, 1, 3)
    with pytest.raises(ValueError):
        pair_condensate_spectrum(12, 3, 4)


@pytest.mark.parametrize("D", [4, 6, 8, 10, 12])
def test_sum_rules_and_engine_agreement(D):
    for k in range(D // 2 + 1):
        for M in (1, 2, 3):
            if M == 3 and D <= 4:
                continue
            a = pair_condensate_spectrum(D, k, M)
            assert a.total == pytest.approx(binom(2 * k, M), abs=1e-12)
            assert a.dimension == comb(D, M)
            if M <= 2 * k:
                num = rho_m(make_pair_condensate(D, k), M).spectrum()
                assert np.max(np.abs(num - a.expanded())) < 1e-10


def test_lambda_2m_max():
    assert lambda_2m_max(12, 3, 1) == pytest.approx(2.0)
    assert lambda_2m_max(12, 3, 2) == pytest.approx(3 * comb(5, 2) / comb(6, 2))
    assert rho_m(make_pair_condensate(12, 3), 4).spectrum()[0] == pytest.approx(2.0, abs=1e-10)
    for k in range(1, 6):
        assert lambda_2m_max(10, k, k) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        lambda_2m_max(12, 2, 3)


@pytest.mark.parametrize("D,k,m", [(8, 2, 1), (8, 3, 1), (10, 3, 1), (8, 3, 2), (10, 3, 2)])
def test_odd_companion(D, k, m):
    top = rho_m(make_odd_pair_condensate(D, k), 2 * m + 1).spectrum()[0]
    assert top == pytest.approx(lambda_2m_max(D, k, m), abs=1e-10)


def test_ghz_and_slater():
    assert ghz_spectrum(8, 2).merged()[0] == (pytest.approx(0.5), 12)
    assert ghz_spectrum(8, 4).max == 1.0
    assert slater_spectrum(4, 2).entries == ((1.0, 6), (0.0, 0))
    for M in range(5):
        assert np.allclose(rho_m(make_ghz(8), M).spectrum(), ghz_spectrum(8, M).expanded(), atol=1e-12)
        assert np.allclose(rho_m(make_slater(8, range(4)), M).spectrum(),
                           slater_spectrum(4, M, 8).expanded(), atol=1e-12)


def test_thresholds():
    for D in range(4, 31, 2):
        for k in range(1, D // 2 + 1):
            l2 = pair_condensate_spectrum(D, k, 2).max
            assert (l2 > 1 + 1e-12) == (2 <= k <= D // 2 - 1)
            if D > 4 and k >= 2:
                l3 = pair_condensate_spectrum(D, k, 3).max
                assert (l3 > 1 + 1e-12) == (1 + sqrt(D / 2) < k < D // 2)
    # boundary k = 1 + sqrt(D/2) gives exactly one
    assert pair_condensate_spectrum(8, 3, 3).max == pytest.approx(1.0)
    assert pair_condensate_spectrum(18, 4, 3).max == pytest.approx(1.0)


def test_top_eigenvector_uniform_over_pairs():
    dm = rho_m(make_pair_condensate(10, 2), 2)
    w, v = dm.eigh()
    from fermion_mbody.fock import subset_masks
    pairs = {3 << (2 * i) for i in range(5)}
    vec = np.abs(v[:, 0])
    for i, m in enumerate(subset_masks(10, 2)):
        assert vec[i] == pytest.approx(1 / sqrt(5) if m in pairs else 0.0, abs=1e-10)


def test_appendix_b():
    r = appendix_b_report(12, 3)
    assert (r.lambda_max, r.occupied_max, r.empty_max) == pytest.approx((2.0, 1.6, 1.8), abs=1e-12)
    assert r.average_max == pytest.approx(1.7, abs=1e-12) and r.violation
    assert r.apc_lhs == pytest.approx(0.16, abs=1e-12)
    assert r.apc_rhs == pytest.approx(2 / 15, abs=1e-12) and r.apc_holds
    assert not appendix_b_report(12, 1).violation
    full = appendix_b_report(12, 6)
    assert not full.violation and full.average_max == pytest.approx(full.lambda_max)
    for D in range(6, 21, 2):
        for k in range(2, D // 2):
            assert appendix_b_report(D, k).violation


def test_figure1():
    rows = figure1_data(30, [1, 2, 3, 4])
    assert len(rows) == 4 * 14
    table = {(k, M): v for k, M, v in rows}
    assert table[(8, 2)] == pytest.approx(4.2667, abs=1e-4)
    assert max(table[(k, 2)] for k in range(1, 15)) == table[(8, 2)]
    assert table[(8, 2)] == pytest.approx(30 * (1 + 2 / 30) ** 2 / 8, abs=0.01)
    assert table[(10, 3)] == pytest.approx(2.5714, abs=1e-4)
    assert figure1_csv(30) == figure1_csv(30)
    assert figure1_csv(30).splitlines()[0] == "k,M,lambda_max"
    for k, M, v in figure1_data(12):
        if M <= 2 * k:
            assert rho_m(make_pair_condensate(12, k), M).spectrum()[0] == pytest.approx(v, abs=1e-10)
    with pytest.raises(ValueError):
        figure1_data(30, [5])


def test_cluster_spectrum():
    assert cluster_spectrum([1.0, 1.0 + 1e-10, 0.5]) == [(pytest.approx(1.0), 2), (0.5, 1)]
