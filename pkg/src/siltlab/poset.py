"""Exchange graphs of silting objects.

Vertices are basic silting objects (sorted registry-ID tuples); an edge
``(S, T, x)`` means T is the irreducible left mutation of S at its summand x,
so S > T is a cover.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .algebra import Algebra, build_from_structure_constants
from .complexes import _concat, _inject, _project, complex_registry, cone, direct_sum, hom_space, left_approx, minimalize
from .errors import PreconditionError, TruncatedInput
from .modules import (
    Representation,
    direct_sum as msum,
    enumerate_indecomposables,
    enumerate_stau,
    ext1_dim,
    fac_member,
    hom_dim,
    torsion_canonical_seq,
    zero_module,
)
from .silting import (
    basic_ids,
    degree_span_ok,
    is_presilting,
    left_mutation,
    leq,
    mutate,
    obj,
    regular,
    regular_shift,
    right_mutation,
    to_stau_pair,
    h0,
)

Ids = tuple[int, ...]


@dataclass
class HassePoset:
    alg: Algebra
    vertices: list[Ids]
    edges: list[tuple[Ids, Ids, int]]
    truncated: bool = False
    experimental: bool = False

    def __post_init__(self):
        self.vertices = sorted(set(self.vertices))
        self.edges = sorted(set(self.edges))

    def degree(self) -> dict[Ids, int]:
        deg = {v: 0 for v in self.vertices}
        for s, t, _ in self.edges:
            deg[s] += 1
            deg[t] += 1
        return deg

    def lower_covers(self, v: Ids) -> list[tuple[int, Ids]]:
        """(exchanged summand, target) pairs, ascending by summand ID."""
        return sorted((x, t) for s, t, x in self.edges if s == v)

    def top(self) -> Ids | None:
        tops = [v for v in self.vertices if not any(t == v for _, t, _ in self.edges)]
        return tops[0] if len(tops) == 1 else None

    def bottom(self) -> Ids | None:
        bots = [v for v in self.vertices if not any(s == v for s, _, _ in self.edges)]
        return bots[0] if len(bots) == 1 else None


def explore(alg: Algebra, start: Ids | None = None, max_nodes: int = 10_000, interval=None) -> HassePoset:
    """Breadth-first closure under two-term mutation at every summand."""
    start = tuple(start) if start is not None else regular(alg)
    lo, hi = (tuple(interval[0]), tuple(interval[1])) if interval else (None, None)

    def inside(T):
        return interval is None or (leq(alg, lo, T) and leq(alg, T, hi))

    if not inside(start):
        raise PreconditionError("start object lies outside the interval")
    seen, queue, edges, truncated = {start}, deque([start]), set(), False
    while queue:
        T = queue.popleft()
        for i in range(len(T)):
            m = mutate(alg, T, i)
            R = m.result
            if not inside(R):
                continue
            if R not in seen:
                if len(seen) >= max_nodes:
                    truncated = True
                    continue
                seen.add(R)
                queue.append(R)
            if m.direction == "left":
                edges.add((T, R, m.exchanged))
            else:
                edges.add((R, T, m.new_summand))
    return HassePoset(alg, list(seen), list(edges), truncated)


def interval(h: HassePoset, M: Ids, N: Ids) -> HassePoset:
    """The induced subposet {T : M <= T <= N} of a complete exploration."""
    if h.truncated:
        raise TruncatedInput("interval needs a complete poset")
    M, N = tuple(M), tuple(N)
    if M not in h.vertices or N not in h.vertices or not leq(h.alg, M, N):
        raise PreconditionError("interval endpoints must be vertices with M <= N")
    verts = [T for T in h.vertices if leq(h.alg, M, T) and leq(h.alg, T, N)]
    vs = set(verts)
    edges = [e for e in h.edges if e[0] in vs and e[1] in vs]
    return HassePoset(h.alg, verts, edges, False)


def regularity(h: HassePoset) -> dict[Ids, int]:
    return h.degree()


def cover_violations(h: HassePoset) -> list[tuple[Ids, Ids, Ids]]:
    """Edges (S, T) with some vertex strictly between T and S, plus edges not ordered S > T."""
    alg, bad = h.alg, []
    for S, T, _ in h.edges:
        if not leq(alg, T, S) or leq(alg, S, T):
            bad.append((S, T, S))
            continue
        for V in h.vertices:
            if V in (S, T):
                continue
            if leq(alg, T, V) and leq(alg, V, S):
                bad.append((S, T, V))
    return bad


def summand_filter(h: HassePoset, U) -> list[Ids]:
    U = set(U)
    return [T for T in h.vertices if U <= set(T)]


def presilting_proper_summands(h: HassePoset) -> list[Ids]:
    """All nonempty proper summands of vertices (every presilting arises this way)."""
    out = set()
    for T in h.vertices:
        for r in range(1, len(T)):
            out.update(itertools.combinations(T, r))
    return sorted(out)


# ------------------------------------------------------------ green sequences


@dataclass
class GreenSequence:
    objects: list[Ids]

    @property
    def length(self) -> int:
        return len(self.objects) - 1

    def to_json(self) -> dict:
        return {"length": self.length, "objects": [list(T) for T in self.objects]}


@dataclass
class MGSResult:
    sequences: list[GreenSequence]
    truncated: bool  # some branch was cut at max_len
    top: Ids
    bottom: Ids

    @property
    def status(self) -> str:
        if self.sequences:
            return "found"
        return "undecided-truncated" if self.truncated else "none"


def _left_neighbours(alg: Algebra, T: Ids, cache: dict, hasse: HassePoset | None):
    if hasse is not None and not hasse.truncated:
        return hasse.lower_covers(T)
    if T not in cache:
        out = []
        for i in range(len(T)):
            m = mutate(alg, T, i)
            if m.direction == "left":
                out.append((m.exchanged, m.result))
        cache[T] = sorted(out)
    return cache[T]


def mgs_search(alg: Algebra, max_len: int = 10, top: Ids | None = None, bottom: Ids | None = None,
               hasse: HassePoset | None = None, limit: int | None = None) -> MGSResult:
    """Depth-first search for maximal chains of irreducible left mutations.

    Neighbours are tried in ascending exchanged-summand order.  Without a
    complete ``hasse`` the mutations are computed on the fly, so infinite
    posets are searched up to ``max_len`` steps.
    """
    top = tuple(top) if top is not None else regular(alg)
    bottom = tuple(bottom) if bottom is not None else regular_shift(alg)
    seqs: list[GreenSequence] = []
    cache: dict = {}
    truncated = False

    def dfs(path):
        nonlocal truncated
        if limit is not None and len(seqs) >= limit:
            return
        T = path[-1]
        if T == bottom:
            seqs.append(GreenSequence(list(path)))
            return
        if len(path) - 1 >= max_len:
            truncated = True
            return
        for _, R in _left_neighbours(alg, T, cache, hasse):
            if not leq(alg, bottom, R):
                continue
            path.append(R)
            dfs(path)
            path.pop()

    dfs([top])
    return MGSResult(seqs, truncated, top, bottom)


def is_maximal_chain(h: HassePoset, seq: GreenSequence) -> bool:
    """Each step is a Hasse edge of a complete poset, hence admits no refinement."""
    edges = {(s, t) for s, t, _ in h.edges}
    return all((a, b) in edges for a, b in zip(seq.objects, seq.objects[1:]))


# ----------------------------------------------------- multi-summand mutation


def left_mutation_at(alg: Algebra, N: Ids, X: Ids) -> Ids:
    """Replace the summands X of N by the cone of their minimal left add(N/X)-approximation."""
    U = [i for i in N if i not in X]
    ap = left_approx(obj(alg, X), U)
    Y = minimalize(cone(ap.map))
    return basic_ids(alg, direct_sum(Y, obj(alg, U)))


def quotient_endomorphism_algebra(alg: Algebra, X: Ids, U) -> Algebra:
    """End_K(X) / [add U] from structure constants, product "first x then y"."""
    reg = complex_registry(alg)
    pieces = [reg[i] for i in X]
    Xc = _concat(pieces, alg)
    H = hom_space(Xc, Xc)
    p = alg.p
    gens = []
    for u in U:
        Uc = reg[u]
        for f in hom_space(Xc, Uc).basis():
            for g in hom_space(Uc, Xc).basis():
                gens.append(H.to_vec(f.then(g)))
    ideal = la.column_space(np.stack(gens, axis=1), p) if gens else np.zeros((H.nvar, 0), np.int64)
    killed = np.concatenate([H.B, ideal], axis=1)
    keep = la.independent_columns(killed, H.reps, p)
    reps = [H.to_map(H.reps[:, j]) for j in keep]
    base = np.concatenate([H.reps[:, keep], killed], axis=1)
    k = len(keep)

    def coords(f):
        x = la.solve(base, H.to_vec(f), p)
        return x[:k]

    mult = np.zeros((k, k, k), dtype=np.int64)
    for a in range(k):
        for b in range(k):
            mult[a, b] = coords(reps[a].then(reps[b]))
    idems = [coords(_project(Xc, pieces, j).then(_inject(Xc, pieces, j))) for j in range(len(pieces))]
    return build_from_structure_constants(mult, idems, p=p)


def stau_hasse(B: Algebra, dim_bound: int = 6):
    """sτ-tilt(B) with its cover relation (Fac order), by brute force."""
    pairs = enumerate_stau(B, dim_bound)
    mods = [P.module(B) for P in pairs]
    n = len(pairs)
    le = [[fac_member(mods[i], mods[j]) for j in range(n)] for i in range(n)]
    covers = []
    for i in range(n):
        for j in range(n):
            if i != j and le[j][i] and not le[i][j]:
                if not any(k not in (i, j) and le[j][k] and le[k][i] for k in range(n)):
                    covers.append((i, j))  # i covers j
    return pairs, le, covers


def stau_has_mgs(B: Algebra, dim_bound: int = 6) -> bool:
    """A chain of covers from (B, 0) down to (0, B)."""
    pairs, le, covers = stau_hasse(B, dim_bound)
    top = next(i for i, P in enumerate(pairs) if not P.proj_verts and sum(P.dimvec(B)) == B.dim)
    bot = next(i for i, P in enumerate(pairs) if not P.module_ids)
    down: dict[int, list[int]] = {}
    for i, j in covers:
        down.setdefault(i, []).append(j)
    seen, stack = {top}, [top]
    while stack:
        i = stack.pop()
        if i == bot:
            return True
        for j in down.get(i, []):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return False


def path_exists(h: HassePoset, top: Ids, bottom: Ids) -> bool:
    seen, stack = {top}, [top]
    while stack:
        T = stack.pop()
        if T == bottom:
            return True
        for _, R in h.lower_covers(T):
            if R not in seen:
                seen.add(R)
                stack.append(R)
    return False


# ------------------------------------------------------------ n-term objects


def explore_nterm(alg: Algebra, n: int = 3, max_nodes: int = 10_000) -> HassePoset:
    """Closure of A under classical left/right mutation, kept inside degrees [1-n, 0].

    Only presilting objects with |A| summands survive; the result is flagged
    experimental since this filter is merely necessary for n > 2.
    """
    start = regular(alg)
    lo = 1 - n
    seen, queue, edges, truncated = {start}, deque([start]), set(), False
    while queue:
        T = queue.popleft()
        for i in range(len(T)):
            for step in (left_mutation, right_mutation):
                R = step(alg, T, i)
                if R == T or not degree_span_ok(alg, R, lo, 0):
                    continue
                if len(R) != alg.n or not is_presilting(alg, R, two_term=False):
                    continue
                if R not in seen:
                    if len(seen) >= max_nodes:
                        truncated = True
                        continue
                    seen.add(R)
                    queue.append(R)
                if step is left_mutation:
                    edges.add((T, R, T[i]))
    return HassePoset(alg, list(seen), list(edges), truncated, experimental=True)


# ------------------------------------------------------------ torsion triples


@dataclass
class TorsionTriple:
    """Membership oracles for (D, Fac T̄, T̄-perp) attached to a two-term silting T."""

    alg: Algebra
    T: Ids
    module: Representation
    sweep: list[Representation] = field(repr=False, default_factory=list)

    def in_torsion(self, X: Representation) -> bool:
        return fac_member(X, self.module) if self.module.total else not X.total

    def in_torsionfree(self, X: Representation) -> bool:
        return not self.module.total or hom_dim(self.module, X) == 0

    def in_cotorsion(self, X: Representation) -> bool:
        return all(ext1_dim(X, Y) == 0 for Y in self.sweep if self.in_torsion(Y))

    def check_axioms(self) -> list[str]:
        """Hom-orthogonality and canonical sequences over the indecomposable sweep."""
        bad = []
        tors = [Y for Y in self.sweep if self.in_torsion(Y)]
        free = [Y for Y in self.sweep if self.in_torsionfree(Y)]
        for a in tors:
            for b in free:
                if hom_dim(a, b):
                    bad.append(f"Hom({a.dims}, {b.dims}) != 0")
        if self.module.total:
            for Y in self.sweep:
                seq = torsion_canonical_seq(Y, self.module)
                if seq.torsion.total and not self.in_torsion(seq.torsion):
                    bad.append(f"torsion part of {Y.dims} not in Fac")
                if seq.free.total and not self.in_torsionfree(seq.free):
                    bad.append(f"free part of {Y.dims} not orthogonal")
        return bad

    def to_json(self) -> dict:
        return {
            "T": list(self.T),
            "torsion": [list(Y.dims) for Y in self.sweep if self.in_torsion(Y)],
            "torsionfree": [list(Y.dims) for Y in self.sweep if self.in_torsionfree(Y)],
            "cotorsion": [list(Y.dims) for Y in self.sweep if self.in_cotorsion(Y)],
        }


def emit_torsion_triple(alg: Algebra, T: Ids, dim_bound: int = 6) -> TorsionTriple:
    sweep = enumerate_indecomposables(alg, dim_bound)  # raises Truncated when incomplete
    reg = complex_registry(alg)
    mods = [h0(reg[i]) for i in T]
    mods = [m for m in mods if m.total]
    M = msum(*mods) if mods else zero_module(alg)
    return TorsionTriple(alg, tuple(T), M, list(sweep.modules))


# ------------------------------------------------------------ emitters


def algebra_hash(alg: Algebra) -> str:
    h = hashlib.sha256()
    h.update(str(alg.p).encode())
    h.update(json.dumps([alg.vertices, [list(a) for a in alg.arrows]]).encode())
    h.update(np.ascontiguousarray(alg.mult).tobytes())
    return h.hexdigest()[:16]


def _pair_label(alg: Algebra, T: Ids) -> str:
    if alg.n and all(complex_registry(alg)[i].is_two_term() for i in T):
        pair = to_stau_pair(alg, T)
        dv = ",".join(str(d) for d in pair.dimvec(alg))
        pv = ",".join(alg.vertices[v] for v in pair.proj_verts)
        return f"M=({dv}) P=[{pv}]"
    return "ids=" + ",".join(map(str, T))


def to_json(h: HassePoset) -> dict:
    alg = h.alg
    index = {v: k for k, v in enumerate(h.vertices)}
    reg = complex_registry(alg)
    used = sorted({i for v in h.vertices for i in v})
    return {
        "algebra": getattr(alg, "name", ""),
        "algebra_hash": algebra_hash(alg),
        "prime": alg.p,
        "truncated": h.truncated,
        "experimental": h.experimental,
        "vertices": [{"id": index[v], "summands": list(v), "label": _pair_label(alg, v)} for v in h.vertices],
        "edges": [{"source": index[s], "target": index[t], "exchanged": x} for s, t, x in h.edges],
        "complexes": {str(i): reg[i].to_json() for i in used},
    }


def to_dot(h: HassePoset) -> str:
    alg = h.alg
    index = {v: k for k, v in enumerate(h.vertices)}
    lines = [
        "digraph hasse {",
        f'  graph [algebra="{getattr(alg, "name", "")}", algebra_hash="{algebra_hash(alg)}", '
        f'prime="{alg.p}", truncated="{str(h.truncated).lower()}"];',
    ]
    for v in h.vertices:
        lines.append(f'  n{index[v]} [label="{_pair_label(alg, v)}"];')
    for s, t, x in h.edges:
        lines.append(f'  n{index[s]} -> n{index[t]} [label="{x}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
