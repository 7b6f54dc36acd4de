import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from siltlab.complexes import (
    Approximation,
    ChainMap,
    ProjComplex,
    _stack_left,
    check_left_factorization,
    check_left_minimal,
    check_right_factorization,
    check_right_minimal,
    complex_registry,
    cone,
    decompose_complex,
    direct_sum,
    hom_k_dim,
    identity_map,
    iso_complex,
    left_approx,
    minimalize,
    regular_stalk,
    right_approx,
    shift,
    stalk,
    zero_complex,
)
from siltlab.modules import enumerate_indecomposables, hom_dim, simple, tau
from siltlab.silting import presentation_complex

from conftest import FINITE, shared


def s1_complex(alg, scale=1):
    """P_2 -> P_1 along the arrow, over A_2."""
    d = np.zeros((1, 1, alg.dim), dtype=np.int64)
    d[0, 0, alg.labels.index("a")] = scale
    return ProjComplex(alg, -1, [(1,), (0,)], [d])


def test_regular_stalk_endomorphisms(a2):
    A = regular_stalk(a2)
    assert hom_k_dim(A, A, 0) == a2.dim


def test_regular_stalk_no_positive_self_extension(a2):
    A = regular_stalk(a2)
    assert hom_k_dim(A, A, 1) == 0


@pytest.mark.parametrize("name", FINITE)
def test_stalk_homs_match_algebra_blocks(name):
    alg = shared(name)
    for i in range(alg.n):
        for j in range(alg.n):
            assert hom_k_dim(stalk(alg, [i]), stalk(alg, [j])) == len(alg.hom_basis(i, j))


def test_cone_of_identity_is_contractible(a2):
    X = s1_complex(a2)
    C = cone(identity_map(X))
    for Y in (X, regular_stalk(a2), shift(X)):
        for k in range(-2, 3):
            assert hom_k_dim(C, Y, k) == 0
    assert minimalize(C).is_zero()


def test_cone_of_zero_map(a2):
    X, Y = s1_complex(a2), stalk(a2, [1])
    C = cone(ChainMap(X, Y, {}))
    assert iso_complex(C, direct_sum(shift(X), Y))


def test_cone_of_inclusion_presents_top_simple(a2):
    f = ChainMap(stalk(a2, [1]), stalk(a2, [0]), {0: s1_complex(a2).diffs[0]})
    assert f.is_chain_map()
    assert iso_complex(cone(f), presentation_complex(simple(a2, 0)))


def test_minimalize_keeps_minimal(a2):
    X = s1_complex(a2)
    assert minimalize(X) == X


def test_minimalize_drops_contractible_summand(a2):
    X = s1_complex(a2)
    noisy = direct_sum(X, cone(identity_map(stalk(a2, [0]))))
    assert iso_complex(minimalize(noisy), X)


@pytest.mark.parametrize("name", FINITE)
def test_minimalize_idempotent(name):
    alg = shared(name)
    for M in enumerate_indecomposables(alg).modules:
        X = minimalize(presentation_complex(M))
        assert minimalize(X) == X and X.is_minimal()


def test_regular_stalk_splits(a2):
    got = decompose_complex(regular_stalk(a2))
    reg = complex_registry(a2)
    assert sorted(got.values()) == [1, 1]
    assert {reg[i].terms for i in got} == {((0,),), ((1,),)}


def test_doubling(a2):
    X = s1_complex(a2)
    (i, k), = decompose_complex(direct_sum(X, X)).items()
    assert k == 2


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 32002))
def test_rescaled_differential_is_isomorphic(c):
    a2 = shared("a2")
    assert iso_complex(s1_complex(a2), s1_complex(a2, c))


@pytest.mark.parametrize("name", ["a2", "a3_linear", "a3_rad2", "square_commutative"])
def test_shifted_homs_match_tau(name):
    alg = shared(name)
    mods = enumerate_indecomposables(alg).modules
    for M in mods:
        PM, tM = presentation_complex(M), tau(M)
        for N in mods:
            assert hom_k_dim(PM, presentation_complex(N), 1) == hom_dim(N, tM)


def test_chain_map_json_roundtrip(a2):
    f = ChainMap(stalk(a2, [1]), stalk(a2, [0]), {0: s1_complex(a2).diffs[0]})
    again = ChainMap.from_json(a2, json.loads(json.dumps(f.to_json())))
    assert again.src == f.src and again.tgt == f.tgt
    assert np.array_equal(again.comp(0), f.comp(0))


def test_complex_json_roundtrip(a3):
    X = presentation_complex(enumerate_indecomposables(a3).modules[-1])
    assert ProjComplex.from_json(a3, json.loads(json.dumps(X.to_json()))) == X


def test_approximation_of_object_in_add_u(a2):
    reg = complex_registry(a2)
    i = reg.get_or_insert(s1_complex(a2))
    ap = left_approx(reg[i], [i])
    assert ap.summand_ids == [i]
    assert iso_complex(ap.obj, reg[i])


def test_approximation_without_maps_is_zero(a2):
    reg = complex_registry(a2)
    u = reg.get_or_insert(stalk(a2, [0]))
    ap = left_approx(stalk(a2, [1], -1), [u])
    assert ap.obj.is_zero()


def all_two_term_ids(alg):
    reg = complex_registry(alg)
    out = [reg.get_or_insert(presentation_complex(M)) for M in enumerate_indecomposables(alg).modules]
    out += [reg.get_or_insert(stalk(alg, [v], -1)) for v in range(alg.n)]
    return out


@pytest.mark.parametrize("name", ["a2", "a3_rad2"])
def test_approximations_pass_oracles(name):
    alg = shared(name)
    ids = all_two_term_ids(alg)
    reg = complex_registry(alg)
    for x in ids:
        for u in ids:
            if u == x:
                continue
            lf, rt = left_approx(reg[x], [u]), right_approx(reg[x], [u])
            assert check_left_factorization(lf, reg[x], [u]) and check_left_minimal(lf)
            assert check_right_factorization(rt, reg[x], [u]) and check_right_minimal(rt)


def padded(ap: Approximation, extra: int) -> Approximation:
    """The same map followed by a zero component into one more summand."""
    X = ap.map.src
    reg = complex_registry(X.alg)
    U = reg[extra]
    T, f = _stack_left(X, [reg[i] for i in ap.summand_ids] + [U], ap.blocks + [ChainMap(X, U, {})])
    return Approximation(f, T, ap.summand_ids + [extra], ap.blocks + [ChainMap(X, U, {})])


def test_non_minimal_left_approximation_detected(a2):
    reg = complex_registry(a2)
    P1, S1 = reg.get_or_insert(stalk(a2, [0])), reg.get_or_insert(s1_complex(a2))
    ap = left_approx(reg[P1], [S1])
    assert ap.summand_ids and check_left_minimal(ap)
    bad = padded(ap, S1)
    assert check_left_factorization(bad, reg[P1], [S1])
    assert not check_left_minimal(bad)


def test_missing_component_breaks_factorization(a2):
    reg = complex_registry(a2)
    P1, S1 = reg.get_or_insert(stalk(a2, [0])), reg.get_or_insert(s1_complex(a2))
    X = reg[P1]
    zero = Approximation(ChainMap(X, zero_complex(a2), {}), zero_complex(a2), [], [])
    assert not check_left_factorization(zero, X, [S1])
