import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermion_mbody.entanglement import (
    BOSONIC,
    ENTROPIES,
    LINEAR,
    VON_NEUMANN,
    Verdict,
    as_spectrum,
    concurrence_d4,
    entropy,
    formation_upper_bound,
    get_entropy,
    majorize_compare,
    majorizes,
    mbody_entropy,
    normalized_entropy,
    two_fermion_lambdas,
)
from fermion_mbody.fock import binom
from fermion_mbody.mbody import rho_m
from fermion_mbody.states import make_ghz, make_pair_condensate, make_random, make_slater, make_two_fermion


def prob_vectors(n_max=8):
    return st.lists(st.floats(0, 1), min_size=1, max_size=n_max).filter(
        lambda v: sum(v) > 1e-3).map(lambda v: np.array(v) / sum(v))


def test_verdict_examples():
    ghz = rho_m(make_ghz(8), 2).spectrum() / 6
    sd = rho_m(make_slater(8, range(4)), 2).spectrum() / 6
    assert majorize_compare(ghz, sd).verdict is Verdict.FIRST_MORE_MIXED
    pc = rho_m(make_pair_condensate(12, 3), 2).spectrum()
    sd12 = rho_m(make_slater(12, range(6)), 2).spectrum()
    res = majorize_compare(pc, sd12)
    assert res.verdict is Verdict.INCOMPARABLE
    assert res.first_violation == 1 and res.second_violation is not None
    assert majorize_compare(pc, pc).verdict is Verdict.EQUIVALENT


def test_trace_mismatch_raises():
    with pytest.raises(ValueError):
        majorize_compare([1.0, 0.0], [0.5, 0.4])


def test_negative_entries():
    assert np.array_equal(as_spectrum([0.5, -5e-11, 0.5]), [0.5, 0.5, 0.0])
    with pytest.raises(ValueError):
        entropy([1.0, -1e-3])


@settings(max_examples=200, deadline=None)
@given(prob_vectors(), prob_vectors())
def test_verdict_antisymmetry_and_schur_concavity(a, b):
    ab, ba = majorize_compare(a, b), majorize_compare(b, a)
    mirror = {
        Verdict.FIRST_MORE_MIXED: Verdict.SECOND_MORE_MIXED,
        Verdict.SECOND_MORE_MIXED: Verdict.FIRST_MORE_MIXED,
        Verdict.EQUIVALENT: Verdict.EQUIVALENT,
        Verdict.INCOMPARABLE: Verdict.INCOMPARABLE,
    }
    assert ba.verdict is mirror[ab.verdict]
    assert ab.first_violation == ba.second_violation
    if ab.verdict is Verdict.FIRST_MORE_MIXED:
        assert majorizes(b, a)
        for f in ENTROPIES.values():
            assert entropy(a, f) >= entropy(b, f) - 1e-10


@settings(max_examples=50, deadline=None)
@given(prob_vectors(), st.floats(1.5, 20))
def test_raw_and_normalized_verdicts_agree(a, scale):
    b = np.sort(np.random.default_rng(0).dirichlet(np.ones(len(a))))[::-1]
    raw = majorize_compare(scale * a, scale * b, tol=1e-9 * scale)
    assert raw.verdict is majorize_compare(a, b).verdict


def test_entropy_examples():
    assert entropy(np.full(6, 1 / 6)) == pytest.approx(np.log2(6))
    assert entropy(np.full(12, 1 / 12)) == pytest.approx(np.log2(12))
    assert entropy([0.5, 0.5, 0, 0]) == pytest.approx(1.0)
    assert BOSONIC([1.0]) == pytest.approx(2 * np.log(2))
    assert LINEAR([0.25]) == pytest.approx(0.1875)
    for f in ENTROPIES.values():
        assert f([0.0]) == 0
        assert f.is_concave_on(np.linspace(0, 5, 200))
    assert get_entropy("bosonic") is BOSONIC
    with pytest.raises(ValueError):
        get_entropy("renyi")


def test_normalized_entropy():
    sd = make_slater(8, range(4))
    for M in (1, 2, 3):
        assert normalized_entropy(sd, M) == pytest.approx(np.log2(binom(4, M)))
    assert normalized_entropy(make_ghz(8), 1) == pytest.approx(3.0)
    s = make_random(8, 4, seed=3)
    for M in (1, 2, 3):
        raw = mbody_entropy(s, M)
        c = binom(4, M)
        assert normalized_entropy(s, M) == pytest.approx(raw / c + np.log2(c), abs=1e-10)
        assert normalized_entropy(s, M) == pytest.approx(normalized_entropy(s, 4 - M), abs=1e-10)
    with pytest.raises(ValueError):
        normalized_entropy(s, 0)


def _two(alpha2):
    g = np.zeros((4, 4))
    g[0, 1], g[2, 3] = np.sqrt(alpha2), np.sqrt(1 - alpha2)
    return make_two_fermion(4, g - g.T)


def test_concurrence_examples():
    assert concurrence_d4(make_slater(4, (0, 2))) == 0
    assert np.allclose(rho_m(make_slater(4, (0, 2)), 1).spectrum(), [1, 1, 0, 0])
    half = _two(0.5)
    assert concurrence_d4(half) == pytest.approx(1.0)
    assert np.allclose(rho_m(half, 1).spectrum(), 0.5)
    s = _two(0.8)
    assert concurrence_d4(s) == pytest.approx(0.8)
    assert two_fermion_lambdas(0.8)[0] == pytest.approx(0.8)
    with pytest.raises(ValueError):
        concurrence_d4(make_random(4, 3, seed=0))


def test_concurrence_is_geometric_mean():
    rng = np.random.default_rng(5)
    for _ in range(30):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        g = g - g.T
        g /= np.sqrt(0.5 * np.sum(np.abs(g) ** 2))
        s = make_two_fermion(4, g)
        lp, lm = two_fermion_lambdas(concurrence_d4(s))
        assert concurrence_d4(s) == pytest.approx(2 * np.sqrt(lp * lm), abs=1e-10)


def test_formation_upper_bound():
    sd = make_slater(6, (0, 1, 2))
    ghz = make_ghz(6)
    bound = formation_upper_bound([sd, ghz], [0.25, 0.75], 1)
    assert bound == pytest.approx(0.25 * np.log2(3) + 0.75 * normalized_entropy(ghz, 1, VON_NEUMANN))
    with pytest.raises(ValueError):
        formation_upper_bound([sd], [0.5], 1)


@pytest.mark.parametrize("k,verdict", [(3, Verdict.FIRST_MORE_MIXED), (4, Verdict.INCOMPARABLE)])
def test_three_body_pair_vs_slater_depends_on_top_eigenvalue(k, verdict):
    # incomparable only once the largest three-body eigenvalue exceeds one
    pc = rho_m(make_pair_condensate(12, k), 3).spectrum() / binom(2 * k, 3)
    sd = rho_m(make_slater(12, range(2 * k)), 3).spectrum() / binom(2 * k, 3)
    assert majorize_compare(pc, sd).verdict is verdict
