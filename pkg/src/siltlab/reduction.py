"""Reducing a silting interval to support tau-tilting theory of a smaller algebra.

For a presilting two-term U with Bongartz completion N and co-Bongartz
completion M, the algebra

    B = End_A(N̄) / [add Ū]

(bars denote degree-0 cohomology) is built from structure constants.  Its
product is ``x . y = y o x`` so that ``Hom_A(N̄, Z)`` is a left B-module
through precomposition.  Every T with U in add T gives two B-modules:

* :func:`red`     -- ``Hom_A(N̄, fT̄)`` with fT̄ the torsion-free part of T̄
  for the torsion pair (Fac Ū, Ū-perp);
* :func:`red_alt` -- ``Hom_A(N̄, T̄) / [add Ū](N̄, T̄)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .algebra import Algebra, build_from_structure_constants
from .errors import PreconditionError, SummandMissing, TheoremViolation, Truncated
from .modules import (
    Representation,
    STauPair,
    decompose,
    direct_sum,
    enumerate_stau,
    fac_member,
    from_total_action,
    hom_space,
    module_registry,
    torsion_canonical_seq,
    zero_module,
)
from .silting import bongartz, co_bongartz, h0, is_presilting, leq, to_stau_pair
from .complexes import complex_registry


def _h0_sum(alg: Algebra, ids) -> Representation:
    reg = complex_registry(alg)
    mods = [h0(reg[i]) for i in ids]
    mods = [m for m in mods if m.total]
    return direct_sum(*mods) if mods else zero_module(alg)


def _summand_projections(pieces: list[Representation], total: Representation) -> list[np.ndarray]:
    """Idempotent total matrices projecting a direct sum onto each piece."""
    out = []
    n = total.alg.n
    starts = [0] * n
    for P in pieces:
        e = np.zeros((total.total, total.total), dtype=np.int64)
        for v in range(n):
            base = int(total.offsets[v]) + starts[v]
            for r in range(P.dims[v]):
                e[base + r, base + r] = 1
            starts[v] += P.dims[v]
        out.append(e)
    return out


@dataclass
class ReductionContext:
    alg: Algebra
    U: tuple[int, ...]
    N: tuple[int, ...]
    M: tuple[int, ...]
    Nbar: Representation
    Ubar: Representation
    reps: np.ndarray  # (k, |N̄|, |N̄|) End(N̄) representatives of the B basis
    ideal: np.ndarray  # flattened columns spanning [add Ū](N̄, N̄)
    B: Algebra
    embedding: np.ndarray  # B's coordinates -> coordinates on ``reps``
    vertex_summands: list[int]  # module-registry IDs of N̄'s summands giving B's vertices
    projections: list[np.ndarray] = field(repr=False, default_factory=list)

    def element_matrix(self, x_new: np.ndarray) -> np.ndarray:
        """A representative in End(N̄) of an element of B given in B's own coordinates."""
        coords = (self.embedding @ x_new) % self.alg.p
        return np.einsum("i,iab->ab", coords, self.reps) % self.alg.p


_SHARED: dict = {}


def _shared(B: Algebra) -> Algebra:
    """Reuse one instance per identical multiplication table, so sweeps and registries are shared."""
    key = (B.p, tuple(B.arrows), B.words, B.mult.tobytes())
    return _SHARED.setdefault(key, B)


def build_context(alg: Algebra, U) -> ReductionContext:
    U = tuple(sorted(U))
    if not U:
        raise PreconditionError("U = 0 is excluded: the reduction needs a nonzero presilting U")
    if not is_presilting(alg, U):
        raise PreconditionError("U is not presilting")
    N = bongartz(alg, U)  # raises AlreadySilting when U is silting
    M = co_bongartz(alg, U)
    p = alg.p
    mreg = module_registry(alg)
    Ubar = _h0_sum(alg, U)
    n_pair = to_stau_pair(alg, N)
    u_pair = to_stau_pair(alg, U)
    pieces_ids = list(n_pair.module_ids)
    pieces = [mreg[i] for i in pieces_ids]
    Nbar = direct_sum(*pieces) if pieces else zero_module(alg)
    proj = _summand_projections(pieces, Nbar)
    E = hom_space(Nbar, Nbar)
    flatE = E.reshape(E.shape[0], -1).T % p
    # [add Ū](N̄, N̄): compositions N̄ -> Ū -> N̄
    F, G = hom_space(Nbar, Ubar), hom_space(Ubar, Nbar)
    comps = [((g @ f) % p).ravel() for f in F for g in G]
    ideal = la.column_space(np.stack(comps, axis=1), p) if comps else np.zeros((flatE.shape[0], 0), np.int64)
    keep = la.independent_columns(ideal, flatE, p)
    reps = E[keep]
    k = len(keep)
    base = np.concatenate([flatE[:, keep], ideal], axis=1)

    def coords(m):
        x = la.solve(base, m.ravel() % p, p)
        if x is None:
            raise TheoremViolation("product left End(N̄)")
        return x[:k]

    # x . y = y o x
    mult = np.zeros((k, k, k), dtype=np.int64)
    for x in range(k):
        for y in range(k):
            mult[x, y] = coords(reps[y] @ reps[x])
    vertex_summands = [i for i, e in zip(pieces_ids, proj) if i not in u_pair.module_ids]
    idems = []
    for i, e in zip(pieces_ids, proj):
        if i in u_pair.module_ids:
            continue
        idems.append(coords(e))
    if not idems:
        raise TheoremViolation(f"no surviving idempotents for U = {U}")
    own = build_from_structure_constants(mult, idems, p=p, vertex_labels=[str(j + 1) for j in range(len(idems))])
    B = _shared(own)
    return ReductionContext(alg, U, N, M, Nbar, Ubar, reps, ideal, B, own.embedding, vertex_summands,
                            [e for i, e in zip(pieces_ids, proj) if i not in u_pair.module_ids])


def _module_from_maps(ctx: ReductionContext, maps: np.ndarray, killed: np.ndarray, target_total: int) -> Representation:
    """The B-module span(maps) / span(killed) with B acting by precomposition.

    ``maps`` is (k, |Z|, |N̄|); ``killed`` holds flattened columns of a subspace
    stable under precomposition.
    """
    B, p = ctx.B, ctx.alg.p
    if not maps.shape[0]:
        return zero_module(B)
    basis, vert = [], []
    acc = killed
    for j, e in enumerate(ctx.projections):
        cand = np.stack([((m @ e) % p).ravel() for m in maps], axis=1)
        cols = la.independent_columns(acc, cand, p)
        for c in cols:
            basis.append(cand[:, c])
            vert.append(j)
        if cols:
            acc = np.concatenate([acc, cand[:, cols]], axis=1)
    if not basis:
        return zero_module(B)
    V = np.stack(basis, axis=1)
    full = np.concatenate([V, killed], axis=1) if killed.shape[1] else V
    r = V.shape[1]

    def act(x_new):
        phi = ctx.element_matrix(x_new)
        imgs = np.stack([((V[:, c].reshape(target_total, -1) @ phi) % p).ravel() for c in range(r)], axis=1)
        sol = la.solve(full, imgs, p)
        if sol is None:
            raise TheoremViolation("B-action does not preserve the module")
        return sol[:r]

    acts = [act(B.basis_vector(B.arrow_basis[a])) for a in range(len(B.arrows))]
    # the ideal must act by zero: check every ideal generator
    for c in range(ctx.ideal.shape[1]):
        phi = ctx.ideal[:, c].reshape(ctx.Nbar.total, -1)
        imgs = np.stack([((V[:, i].reshape(target_total, -1) @ phi) % p).ravel() for i in range(r)], axis=1)
        if killed.shape[1]:
            ok = la.solve(killed, imgs, p) is not None
        else:
            ok = not imgs.any()
        if not ok:
            raise TheoremViolation("[add Ū] does not act by zero; B-action not well defined")
    return from_total_action(B, vert, acts)


def _require_summand(ctx: ReductionContext, T):
    if not set(ctx.U) <= set(T):
        raise SummandMissing(f"U = {ctx.U} is not a summand of T = {tuple(T)}")


def red(ctx: ReductionContext, T) -> Representation:
    """Hom_A(N̄, fT̄) as a B-module."""
    _require_summand(ctx, T)
    alg = ctx.alg
    Tbar = _h0_sum(alg, T)
    if not Tbar.total:
        return zero_module(ctx.B)
    seq = torsion_canonical_seq(Tbar, ctx.Ubar)
    fT = seq.free
    if not fT.total:
        return zero_module(ctx.B)
    maps = hom_space(ctx.Nbar, fT)
    return _module_from_maps(ctx, maps, np.zeros((fT.total * ctx.Nbar.total, 0), np.int64), fT.total)


def red_alt(ctx: ReductionContext, T) -> Representation:
    """Hom_A(N̄, T̄) / [add Ū](N̄, T̄) as a B-module."""
    _require_summand(ctx, T)
    alg, p = ctx.alg, ctx.alg.p
    Tbar = _h0_sum(alg, T)
    if not Tbar.total:
        return zero_module(ctx.B)
    maps = hom_space(ctx.Nbar, Tbar)
    F, G = hom_space(ctx.Nbar, ctx.Ubar), hom_space(ctx.Ubar, Tbar)
    comps = [((g @ f) % p).ravel() for f in F for g in G]
    size = Tbar.total * ctx.Nbar.total
    killed = la.column_space(np.stack(comps, axis=1), p) if comps else np.zeros((size, 0), np.int64)
    return _module_from_maps(ctx, maps, killed, Tbar.total)


def module_pair(B: Algebra, X: Representation) -> STauPair:
    """Pair a B-module with the projectives outside its support."""
    mids = tuple(sorted(decompose(X))) if X.total else ()
    return STauPair(mids, tuple(v for v in range(B.n) if X.dims[v] == 0))


def stau_leq(B: Algebra, a: STauPair, b: STauPair) -> bool:
    """a <= b iff Fac of a's module lies in Fac of b's module."""
    return fac_member(a.module(B), b.module(B))


@dataclass
class SquareReport:
    algebra: str
    U: tuple[int, ...]
    silt_U: int
    stau_B: int | None
    bijection: bool | None
    order_iso: bool | None
    square_commutes: bool | None
    truncated: bool
    witnesses: list

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra,
            "U": list(self.U),
            "sizes": {"silt_U": self.silt_U, "stau_B": self.stau_B},
            "bijection": self.bijection,
            "order_iso": self.order_iso,
            "square_commutes": self.square_commutes,
            "truncated": self.truncated,
            "witnesses": self.witnesses,
        }

    @property
    def passed(self) -> bool:
        return bool(self.bijection and self.order_iso and self.square_commutes)


def verify_square(ctx: ReductionContext, silt_U: list, dim_bound: int = 6, name: str = "") -> SquareReport:
    """Check that red is an order isomorphism onto sτ-tilt B and agrees with red_alt."""
    alg, B = ctx.alg, ctx.B
    silt_U = sorted(tuple(T) for T in silt_U)
    try:
        stau_B = enumerate_stau(B, dim_bound)
    except Truncated:
        return SquareReport(name, ctx.U, len(silt_U), None, None, None, None, True, [])
    images, witnesses, commutes = [], [], True
    for T in silt_U:
        X, Y = red(ctx, T), red_alt(ctx, T)
        same = decompose(X) == decompose(Y) if (X.total or Y.total) else True
        if X.dims != Y.dims:
            same = False
        commutes &= same
        pair = module_pair(B, X)
        images.append(pair)
        witnesses.append({"T": list(T), "red_dims": list(X.dims), "red_alt_dims": list(Y.dims),
                          "iso": same, "pair": {"module": list(pair.module_ids), "proj": list(pair.proj_verts)}})
    bij = len(set(images)) == len(images) and set(images) == set(stau_B)
    order = bij
    if bij:
        for i, T in enumerate(silt_U):
            for j, S in enumerate(silt_U):
                if leq(alg, T, S) != stau_leq(B, images[i], images[j]):
                    order = False
    return SquareReport(name, ctx.U, len(silt_U), len(stau_B), bij, order, commutes, False, witnesses)
