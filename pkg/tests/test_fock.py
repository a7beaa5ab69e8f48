from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermion_mbody.fock import (
    NSectorDensityOperator,
    PureState,
    annihilate_set,
    apply_annihilate,
    apply_create,
    apply_operator_string,
    apply_operator_sum,
    binom,
    create_set,
    inner_product,
    mask_from_modes,
    modes_of,
    split_sign,
    subset_masks,
    subset_rank,
    subset_unrank,
)
from fermion_mbody.states import adjoint_terms, make_pair_condensate, make_random, pair_creation_terms

import jw_oracle


def test_rank_examples():
    assert subset_rank((0, 1), 4, 2) == 0
    assert subset_rank((2, 3), 4, 2) == 5
    # lexicographic: (0,1,2), (0,1,3), (0,2,3), (1,2,3)
    assert subset_rank((0, 2, 3), 4, 3) == 2


def test_unrank_examples():
    assert subset_unrank(0, 4, 2) == (0, 1)
    assert subset_unrank(5, 4, 2) == (2, 3)
    # (0,1), (0,2), (0,3), (0,4), ...
    assert subset_unrank(3, 5, 2) == (0, 4)


def test_rank_matches_enumeration_exhaustively():
    for D in range(0, 13):
        for M in range(D + 1):
            for r, sub in enumerate(combinations(range(D), M)):
                assert subset_rank(sub, D, M) == r
                assert subset_unrank(r, D, M) == sub


@pytest.mark.parametrize("bad", [(1, 0), (0, 0), (0, 4), (-1, 2)])
def test_rank_rejects_bad_tuples(bad):
    with pytest.raises(ValueError):
        subset_rank(bad, 4, 2)


def test_unrank_out_of_range():
    with pytest.raises(ValueError):
        subset_unrank(6, 4, 2)


def test_binom_exact():
    assert binom(62, 31) == 465428353255261088
    assert binom(5, 7) == 0


def test_create_annihilate_examples():
    assert apply_create(0, 0, 4) == (1, 1)
    assert apply_create(1, 0b101, 4) == (0b111, -1)
    assert apply_create(2, 0b100, 4) is None
    assert apply_annihilate(0, 0b1, 4) == (0, 1)
    assert apply_annihilate(2, 0b101, 4) == (0b1, -1)
    assert apply_annihilate(1, 0b101, 4) is None
    with pytest.raises(ValueError):
        apply_create(4, 0, 4)


def test_ladder_matches_dense_jordan_wigner():
    D = 5
    c = jw_oracle.annihilators(D)
    for mask in range(2 ** D):
        for i in range(D):
            res = apply_annihilate(i, mask, D)
            col = c[i][:, mask]
            if res is None:
                assert not col.any()
            else:
                m, s = res
                assert col[m] == s and np.count_nonzero(col) == 1
            res = apply_create(i, mask, D)
            col = c[i].T[:, mask]
            if res is None:
                assert not col.any()
            else:
                m, s = res
                assert col[m] == s


def _create_two(first, second, mask, D):
    r = apply_create(first, mask, D)
    if r is None:
        return None
    r2 = apply_create(second, r[0], D)
    return None if r2 is None else (r2[0], r[1] * r2[1])


def test_anticommutation_exhaustive():
    D = 6
    for mask in range(2 ** D):
        for i in range(D):
            assert _create_two(i, i, mask, D) is None
            for j in range(D):
                if i == j:
                    continue
                a, b = _create_two(i, j, mask, D), _create_two(j, i, mask, D)
                if a is None or b is None:
                    assert a is None and b is None
                else:
                    assert a[0] == b[0] and a[1] == -b[1]


def _bubble_parity(seq):
    seq = list(seq)
    swaps = 0
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                swaps += 1
    return -1 if swaps % 2 else 1


def test_split_sign_examples():
    assert split_sign(0b11, 0b01) == 1
    assert split_sign(0b11, 0b10) == -1
    assert split_sign(0b111, 0b100) == 1
    with pytest.raises(ValueError):
        split_sign(0b11, 0b100)


def test_split_sign_matches_permutation_parity():
    for D in range(1, 9):
        for union in range(2 ** D):
            modes = modes_of(union)
            for M in range(len(modes) + 1):
                for alpha in combinations(modes, M):
                    beta = [m for m in modes if m not in alpha]
                    assert split_sign(union, mask_from_modes(alpha)) == _bubble_parity(list(alpha) + beta)


def test_inner_product_basics():
    s = make_random(6, 3, seed=1)
    assert inner_product(s, s) == pytest.approx(1.0)
    a = PureState(6, 3, {0b111: 1.0})
    b = PureState(6, 3, {0b1011: 1.0})
    assert inner_product(a, b) == 0
    t = make_random(6, 3, seed=2)
    assert inner_product(s, t.scale(2j)) == pytest.approx(2j * inner_product(s, t))
    assert inner_product(s.scale(2j), t) == pytest.approx(-2j * inner_product(s, t))
    with pytest.raises(ValueError):
        inner_product(s, PureState(6, 2))


def test_operator_string_examples():
    sd = PureState(4, 2, {0b11: 1.0})
    vac = annihilate_set((0, 1), sd)
    assert vac.amplitudes == {0: 1.0}
    assert apply_operator_string([("-", 3)], sd).is_zero()
    with pytest.raises(ValueError):
        apply_operator_string([("-", 0)], PureState.vacuum(3))


def test_pair_operator_identities():
    D = 12
    A_dag = pair_creation_terms(D)
    A = adjoint_terms(A_dag)
    vac = PureState.vacuum(D)
    assert inner_product(vac, apply_operator_sum(A, apply_operator_sum(A_dag, vac))) == pytest.approx(1.0)
    s = make_pair_condensate(D, 3)
    AdA = apply_operator_sum(A_dag, apply_operator_sum(A, s))
    assert inner_product(s, AdA).real == pytest.approx(2.0, abs=1e-12)
    # [A, A†] = 1 - 2N/D on any N-fermion state
    r = make_random(8, 4, seed=3)
    A8d = pair_creation_terms(8)
    A8 = adjoint_terms(A8d)
    comm = apply_operator_sum(A8, apply_operator_sum(A8d, r)) - apply_operator_sum(A8d, apply_operator_sum(A8, r))
    assert np.allclose(comm.to_vector(), (1 - 2 * 4 / 8) * r.to_vector(), atol=1e-12)


def test_ladder_coefficient_example():
    D, k = 12, 1
    up = apply_operator_sum(pair_creation_terms(D), make_pair_condensate(D, k))
    coef = np.sqrt((k + 1) * (1 - 2 * k / D))
    assert coef == pytest.approx(1.29099, abs=1e-5)
    assert np.allclose(up.to_vector(), coef * make_pair_condensate(D, k + 1).to_vector(), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7).flatmap(lambda D: st.tuples(st.just(D), st.integers(1, D), st.integers(0, 10 ** 6))))
def test_number_operator_sum(args):
    D, N, seed = args
    s = make_random(D, N, seed)
    # sum over alpha of C†_alpha C_alpha = N on the N-sector
    total = None
    for i in range(D):
        part = create_set((i,), annihilate_set((i,), s))
        total = part if total is None else total + part
    assert np.allclose(total.to_vector(), N * s.to_vector())


def test_pure_state_validation_and_pruning():
    with pytest.raises(ValueError):
        PureState(64, 1)
    with pytest.raises(ValueError):
        PureState(4, 2, {0b111: 1.0})
    with pytest.raises(ValueError):
        PureState(3, 1, {0b1000: 1.0})
    s = PureState(4, 1, {1: 1.0, 2: 1e-16})
    assert list(s.amplitudes) == [1]


def test_json_round_trip():
    s = make_random(7, 3, seed=11)
    text = s.to_json()
    back = PureState.from_json(text)
    assert back.to_json() == text
    assert np.array_equal(back.to_vector(), s.to_vector())


def test_subset_guard():
    with pytest.raises(MemoryError):
        subset_masks(40, 20)


def test_density_operator_validation():
    s = make_random(5, 2, seed=0)
    op = NSectorDensityOperator.from_pure(s)
    assert op.is_valid_state()
    assert op.trace == pytest.approx(1.0)
    with pytest.raises(ValueError):
        NSectorDensityOperator(5, 2, (0b11, 0b101), np.array([[1, 1], [0, 0]]))
    with pytest.raises(ValueError):
        NSectorDensityOperator(5, 2, (0b111,), np.eye(1))
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 2.0
    mix = NSectorDensityOperator.mixture([s, make_random(5, 2, seed=1)], [0.25, 0.75])
    assert mix.is_valid_state()
    assert len(subset_masks(5, 2)) == binom(5, 2)
