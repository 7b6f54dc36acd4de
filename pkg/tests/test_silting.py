import itertools

import pytest
from hypothesis import given, settings, strategies as st

from siltlab.complexes import complex_registry, direct_sum, stalk
from siltlab.errors import AlreadySilting, NotTwoTerm, PreconditionError
from siltlab.modules import STauPair, indec_projective, module_registry, simple
from siltlab.poset import explore
from siltlab.silting import (
    basic_ids,
    bongartz,
    co_bongartz,
    from_stau_pair,
    is_presilting,
    is_silting,
    leq,
    mutate,
    presentation_complex,
    regular,
    regular_shift,
    to_stau_pair,
)

from conftest import FINITE, shared


def cid(alg, X):
    return complex_registry(alg).get_or_insert(X)


def s1(alg):
    return cid(alg, presentation_complex(simple(alg, 0)))


def mid(alg, M):
    return module_registry(alg).get_or_insert(M)


def test_regular_is_silting(a2):
    assert is_silting(a2, regular(a2))


def test_shifted_regular_is_silting(a2):
    assert is_silting(a2, regular_shift(a2))


def test_top_simple_presilting_not_silting(a2):
    U = (s1(a2),)
    assert is_presilting(a2, U) and not is_silting(a2, U)


def test_three_term_object_rejected(a2):
    far = cid(a2, stalk(a2, [0], -2))
    with pytest.raises(NotTwoTerm):
        is_presilting(a2, (far,))


def test_pair_of_regular(a2):
    pair = to_stau_pair(a2, regular(a2))
    A = [indec_projective(a2, v) for v in range(2)]
    assert pair == STauPair(tuple(sorted(mid(a2, P) for P in A)), ())


def test_pair_of_shifted_regular(a2):
    assert to_stau_pair(a2, regular_shift(a2)) == STauPair((), (0, 1))


def test_pair_of_s1_with_shifted_p2(a2):
    T = tuple(sorted((s1(a2), cid(a2, stalk(a2, [1], -1)))))
    assert to_stau_pair(a2, T) == STauPair((mid(a2, simple(a2, 0)),), (1,))


def test_from_pair(a2):
    assert from_stau_pair(a2, STauPair((), tuple(range(a2.n)))) == regular_shift(a2)
    P = tuple(sorted(mid(a2, indec_projective(a2, v)) for v in range(2)))
    assert from_stau_pair(a2, STauPair(P, ())) == regular(a2)
    T = tuple(sorted((s1(a2), cid(a2, stalk(a2, [1], -1)))))
    assert from_stau_pair(a2, STauPair((mid(a2, simple(a2, 0)),), (1,))) == T


@pytest.mark.parametrize("name", FINITE)
def test_pair_roundtrip_on_poset(name):
    alg = shared(name)
    for T in explore(alg).vertices:
        assert from_stau_pair(alg, to_stau_pair(alg, T)) == T


def test_shift_below_regular(a2):
    assert leq(a2, regular_shift(a2), regular(a2))
    assert not leq(a2, regular(a2), regular_shift(a2))


@pytest.mark.parametrize("name", FINITE)
def test_order_reflexive_and_antisymmetric(name):
    alg = shared(name)
    verts = explore(alg).vertices
    for T in verts:
        assert leq(alg, T, T)
    for T, S in itertools.combinations(verts, 2):
        assert not (leq(alg, T, S) and leq(alg, S, T))


def test_pentagon_order(a2):
    reg = complex_registry(a2)
    A, A1 = regular(a2), regular_shift(a2)
    P1 = cid(a2, stalk(a2, [0]))
    P2 = cid(a2, stalk(a2, [1]))
    P1s, P2s = cid(a2, stalk(a2, [0], -1)), cid(a2, stalk(a2, [1], -1))
    S1 = s1(a2)
    upper = tuple(sorted((P1, S1)))      # (P_1 + S_1, 0)
    middle = tuple(sorted((S1, P2s)))    # (S_1, P_2)
    right = tuple(sorted((P2, P1s)))     # (P_2, P_1)
    chain_left = [A, upper, middle, A1]
    chain_right = [A, right, A1]
    for chain in (chain_left, chain_right):
        for hi, lo in zip(chain, chain[1:]):
            assert leq(a2, lo, hi) and not leq(a2, hi, lo)
    for x in (upper, middle):
        assert not leq(a2, x, right) and not leq(a2, right, x)
    assert set(explore(a2).vertices) == {A, A1, upper, middle, right}


def test_completions_of_top_simple(a2):
    U = (s1(a2),)
    P1, P2s = cid(a2, stalk(a2, [0])), cid(a2, stalk(a2, [1], -1))
    assert bongartz(a2, U) == tuple(sorted((P1, U[0])))
    assert co_bongartz(a2, U) == tuple(sorted((U[0], P2s)))


@pytest.mark.parametrize("name", ["a2", "a3_linear", "a3_rad2", "square_commutative"])
def test_completions_meet_in_add_u(name):
    alg = shared(name)
    h = explore(alg)
    seen = set()
    for T in h.vertices:
        for k in range(1, len(T)):
            for U in itertools.combinations(T, k):
                if U in seen:
                    continue
                seen.add(U)
                N, M = bongartz(alg, U), co_bongartz(alg, U)
                assert set(N) & set(M) == set(U)
                assert leq(alg, M, N)


def test_completion_of_silting_rejected(a2):
    with pytest.raises(AlreadySilting):
        bongartz(a2, regular(a2))


def test_completion_of_non_presilting_rejected(a2):
    bad = (cid(a2, stalk(a2, [0])), cid(a2, stalk(a2, [0], -1)))
    with pytest.raises(PreconditionError):
        co_bongartz(a2, bad)


def test_one_vertex_mutation():
    alg = shared("one_vertex")
    m = mutate(alg, regular(alg), 0)
    assert m.result == regular_shift(alg) and m.direction == "left"


def test_a2_mutation_at_p2(a2):
    A = regular(a2)
    P2 = cid(a2, stalk(a2, [1]))
    m = mutate(a2, A, A.index(P2))
    assert m.direction == "left"
    assert m.result == tuple(sorted((cid(a2, stalk(a2, [0])), s1(a2))))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["a2", "a3_linear", "a3_rad2", "square_zero"]), st.integers(0, 10**6), st.integers(0, 3))
def test_mutation_is_an_involution(name, pick, i):
    alg = shared(name)
    verts = explore(alg).vertices
    T = verts[pick % len(verts)]
    i %= len(T)
    m = mutate(alg, T, i)
    back = mutate(alg, m.result, m.result.index(m.new_summand))
    assert back.result == T and back.direction != m.direction


@pytest.mark.parametrize("name", ["a2", "a3_rad2"])
def test_certified_mutations(name):
    alg = shared(name)
    for T in explore(alg).vertices:
        for i in range(len(T)):
            m = mutate(alg, T, i, certify=True)
            assert m.triangle.ok


def test_basic_ids_merge_copies(a2):
    X = presentation_complex(simple(a2, 0))
    assert basic_ids(a2, direct_sum(X, X)) == (s1(a2),)
