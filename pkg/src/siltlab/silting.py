"""Silting objects in the homotopy category of projectives.

A (basic) silting or presilting object is a sorted tuple of distinct
indecomposable complex IDs from the algebra's :class:`ComplexRegistry`.
Two-term objects live in degrees -1 and 0; the bijection with support
tau-tilting pairs sends T to (H^0 T, sum of P_v with P_v[1] a summand).
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Algebra
from .complexes import (
    Approximation,
    ProjComplex,
    check_left_factorization,
    check_left_minimal,
    check_right_factorization,
    check_right_minimal,
    complex_registry,
    cocone,
    cone,
    decompose_complex,
    direct_sum,
    ezeros,
    left_approx,
    minimalize,
    regular_stalk,
    right_approx,
    shift,
    sort_terms,
    stalk,
    sum_of_ids,
)
from .errors import AlreadySilting, NotTwoTerm, PreconditionError, TheoremViolation
from .modules import (
    STauPair,
    cokernel_of_projective_map,
    decompose,
    direct_sum as module_sum,
    min_proj_presentation,
    module_registry,
    zero_module,
)

Ids = tuple[int, ...]


def basic_ids(alg: Algebra, X: ProjComplex) -> Ids:
    return tuple(sorted(decompose_complex(X)))


def obj(alg: Algebra, ids) -> ProjComplex:
    return sum_of_ids(alg, ids)


def regular(alg: Algebra) -> Ids:
    """The stalk complex A in degree 0."""
    return basic_ids(alg, regular_stalk(alg))


def regular_shift(alg: Algebra, k: int = 1) -> Ids:
    return basic_ids(alg, regular_stalk(alg, -k))


def _span(alg: Algebra, ids) -> int:
    reg = complex_registry(alg)
    if not ids:
        return 0
    lo = min(reg[i].lo for i in ids)
    hi = max(reg[i].hi for i in ids)
    return hi - lo


def _require_two_term(alg: Algebra, ids):
    reg = complex_registry(alg)
    for i in ids:
        if not reg[i].is_two_term():
            raise NotTwoTerm(f"summand {i} = {reg[i]!r} is not concentrated in degrees -1, 0")


def ext_vanishes(alg: Algebra, src_ids, tgt_ids, max_shift: int | None = None) -> bool:
    """Hom_K(S, T[s]) = 0 for all s >= 1 (s up to the degree span)."""
    reg = complex_registry(alg)
    if max_shift is None:
        max_shift = max(_span(alg, tuple(src_ids) + tuple(tgt_ids)), 1)
    return all(reg.hom_dim(i, j, s) == 0
               for s in range(1, max_shift + 1) for i in src_ids for j in tgt_ids)


def is_presilting(alg: Algebra, ids, two_term: bool = True) -> bool:
    if two_term:
        _require_two_term(alg, ids)
    return ext_vanishes(alg, ids, ids)


def is_silting(alg: Algebra, ids, two_term: bool = True) -> bool:
    """Presilting with |A| distinct summands (for n-term objects only a necessary condition)."""
    return len(set(ids)) == alg.n and is_presilting(alg, ids, two_term)


def leq(alg: Algebra, T, S) -> bool:
    """T <= S iff Hom_K(S, T[s]) = 0 for every s >= 1."""
    return ext_vanishes(alg, S, T)


# ------------------------------------------------------------ the bijection


def _shifted_projective_vertex(X: ProjComplex) -> int | None:
    if X.lo == -1 and len(X.terms) == 1 and len(X.terms[0]) == 1:
        return X.terms[0][0]
    return None


def h0(X: ProjComplex):
    """Degree-0 cohomology of a two-term complex as a module."""
    alg = X.alg
    return cokernel_of_projective_map(alg, X.term(-1), X.term(0), X.diff(-1))


def to_stau_pair(alg: Algebra, ids) -> STauPair:
    _require_two_term(alg, ids)
    reg = complex_registry(alg)
    mods, proj = [], []
    for i in ids:
        v = _shifted_projective_vertex(reg[i])
        if v is not None:
            proj.append(v)
        else:
            mods.append(h0(reg[i]))
    M = module_sum(*mods) if mods else zero_module(alg)
    mids = tuple(sorted(decompose(M))) if M.total else ()
    return STauPair(mids, tuple(sorted(proj)))


def presentation_complex(M) -> ProjComplex:
    """The minimal projective presentation of M as a complex in degrees -1, 0."""
    alg = M.alg
    pres = min_proj_presentation(M)
    diff = pres.diff if pres.p1 else ezeros(0, len(pres.p0), alg)
    return sort_terms(ProjComplex(alg, -1, [tuple(pres.p1), tuple(pres.p0)], [diff]))


def from_stau_pair(alg: Algebra, pair: STauPair) -> Ids:
    reg = module_registry(alg)
    parts = [presentation_complex(reg[i]) for i in pair.module_ids]
    parts += [stalk(alg, [v], -1) for v in pair.proj_verts]
    return basic_ids(alg, direct_sum(*parts)) if parts else ()


# ------------------------------------------------------------ completions


def _check_completable(alg: Algebra, U):
    if not is_presilting(alg, U):
        raise PreconditionError("U is not presilting")
    if len(set(U)) >= alg.n:
        raise AlreadySilting("U is already silting; completions are not defined")


def bongartz_data(alg: Algebra, U) -> tuple[Ids, Approximation]:
    """Cocone of the minimal right add U-approximation of A[1], plus U."""
    _check_completable(alg, U)
    A1 = shift(regular_stalk(alg), 1)
    ap = right_approx(A1, list(U))
    X = minimalize(cocone(ap.map))
    return basic_ids(alg, direct_sum(X, obj(alg, U))), ap


def co_bongartz_data(alg: Algebra, U) -> tuple[Ids, Approximation]:
    """Cone of the minimal left add U-approximation of A, plus U."""
    _check_completable(alg, U)
    A = regular_stalk(alg)
    ap = left_approx(A, list(U))
    Y = minimalize(cone(ap.map))
    return basic_ids(alg, direct_sum(Y, obj(alg, U))), ap


def _cached_completion(alg: Algebra, U, which: str) -> Ids:
    cache = alg.registries.setdefault("completions", {})
    key = (which, tuple(sorted(U)))
    if key not in cache:
        build = bongartz_data if which == "bongartz" else co_bongartz_data
        ids, _ = build(alg, U)
        if not is_silting(alg, ids):
            raise TheoremViolation(f"{which} completion of {U} is not silting: {ids}")
        cache[key] = ids
    return cache[key]


def bongartz(alg: Algebra, U) -> Ids:
    return _cached_completion(alg, U, "bongartz")


def co_bongartz(alg: Algebra, U) -> Ids:
    return _cached_completion(alg, U, "co_bongartz")


# --------------------------------------------------------------- mutation


@dataclass
class ExchangeTriangle:
    """X' -> U1 -> Y' -> X'[1] with both maps minimal add U-approximations."""

    upper: int  # X', the summand of the larger object
    lower: int  # Y', the summand of the smaller object
    left: Approximation  # X' -> U1
    right: Approximation  # U1 -> Y'
    left_factorizes: bool
    left_minimal: bool
    right_factorizes: bool
    right_minimal: bool
    cone_matches: bool
    middle_matches: bool

    @property
    def ok(self) -> bool:
        return all([self.left_factorizes, self.left_minimal, self.right_factorizes,
                    self.right_minimal, self.cone_matches, self.middle_matches])


def exchange_triangle(alg: Algebra, U, upper: int, lower: int) -> ExchangeTriangle:
    reg = complex_registry(alg)
    X, Y = reg[upper], reg[lower]
    lf = left_approx(X, list(U))
    rt = right_approx(Y, list(U))
    cone_ids = decompose_complex(cone(lf.map))
    mid_l = sorted(lf.summand_ids)
    mid_r = sorted(rt.summand_ids)
    return ExchangeTriangle(
        upper, lower, lf, rt,
        check_left_factorization(lf, X, list(U)), check_left_minimal(lf),
        check_right_factorization(rt, Y, list(U)), check_right_minimal(rt),
        cone_ids == {lower: 1}, mid_l == mid_r,
    )


@dataclass
class Mutation:
    result: Ids
    direction: str  # "left" (result < T) or "right"
    exchanged: int  # summand of T that was replaced
    new_summand: int
    triangle: ExchangeTriangle | None


def _single_new_summand(alg: Algebra, Y: ProjComplex) -> int | None:
    """Registry ID of Y if it is a nonzero two-term indecomposable."""
    if Y.is_zero() or not Y.is_two_term():
        return None
    parts = decompose_complex(Y)
    if len(parts) != 1 or sum(parts.values()) != 1:
        raise TheoremViolation(f"mutation cone {Y!r} is not indecomposable")
    return next(iter(parts))


def mutate(alg: Algebra, T, i: int, certify: bool = False) -> Mutation:
    """Irreducible mutation of a two-term silting object at its i-th summand.

    The left mutation replaces X = T[i] by the cone of its minimal left
    add U-approximation, the right one by the cocone of the minimal right
    approximation; exactly one of them is again two-term.  With ``certify``
    the result is also compared with the two completions of U and the
    exchange triangle is checked by the approximation oracles.
    """
    T = tuple(T)
    cache = alg.registries.setdefault("mutations", {})
    if not certify and (T, i) in cache:
        return cache[(T, i)]
    X = T[i]
    U = T[:i] + T[i + 1:]
    reg = complex_registry(alg)
    Xc = reg[X]
    left = _single_new_summand(alg, minimalize(cone(left_approx(Xc, list(U)).map)))
    right = _single_new_summand(alg, minimalize(cocone(right_approx(Xc, list(U)).map)))
    if (left is None) == (right is None):
        raise TheoremViolation(f"mutation of {T} at {X}: expected exactly one two-term side")
    direction, new = ("left", left) if left is not None else ("right", right)
    result = tuple(sorted(U + (new,)))
    tri = None
    if certify:
        if U:
            N, M = bongartz(alg, U), co_bongartz(alg, U)
        else:
            N, M = regular(alg), regular_shift(alg)
        if N == M or {N, M} != {T, result}:
            raise TheoremViolation(f"completions of {U} are {N}, {M}; mutation gave {T} <-> {result}")
        if (direction == "left") != (N == T):
            raise TheoremViolation(f"direction of the mutation of {T} at {X} disagrees with the completions")
        upper, lower = (X, new) if direction == "left" else (new, X)
        tri = exchange_triangle(alg, U, upper, lower)
    out = Mutation(result, direction, X, new, tri)
    if not certify:
        cache[(T, i)] = out
    return out


# ------------------------------------------------------- n-term mutation


def left_mutation(alg: Algebra, T, i: int) -> Ids:
    """Classical left mutation: replace X by the cone of its minimal left add U-approximation."""
    T = tuple(T)
    U = T[:i] + T[i + 1:]
    ap = left_approx(obj(alg, [T[i]]), list(U))
    Y = minimalize(cone(ap.map))
    return basic_ids(alg, direct_sum(Y, obj(alg, U)))


def right_mutation(alg: Algebra, T, i: int) -> Ids:
    T = tuple(T)
    U = T[:i] + T[i + 1:]
    ap = right_approx(obj(alg, [T[i]]), list(U))
    X = minimalize(cocone(ap.map))
    return basic_ids(alg, direct_sum(X, obj(alg, U)))


def degree_span_ok(alg: Algebra, ids, lo: int, hi: int) -> bool:
    reg = complex_registry(alg)
    return all(reg[i].within(lo, hi) for i in ids)


def describe(alg: Algebra, ids) -> dict:
    """JSON form: summand IDs, the complexes themselves and the matching pair."""
    reg = complex_registry(alg)
    out = {"summands": list(ids), "complexes": {str(i): reg[i].to_json() for i in ids}}
    if all(reg[i].is_two_term() for i in ids):
        pair = to_stau_pair(alg, ids)
        out["stau"] = {"module_dimvec": list(pair.dimvec(alg)),
                       "module_summands": [list(module_registry(alg)[m].dims) for m in pair.module_ids],
                       "proj_part": [alg.vertices[v] for v in pair.proj_verts]}
    return out

