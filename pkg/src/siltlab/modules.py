"""Finite-dimensional left modules over an :class:`~siltlab.algebra.Algebra`.

A representation stores one matrix per arrow.  Internally most computations
work on the *total* space (all vertex spaces stacked in vertex order); module
maps are then block-diagonal matrices, which makes composition plain matrix
multiplication.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from functools import cached_property

import flint
import numpy as np

from . import linalg as la
from .algebra import Algebra
from .errors import DecompositionFailed, Truncated


class Representation:
    def __init__(self, alg: Algebra, dims, mats):
        self.alg = alg
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != alg.n:
            raise ValueError("dimension vector has the wrong length")
        p = alg.p
        self.mats = []
        for (lab, s, t), m in zip(alg.arrows, mats):
            m = np.asarray(m, dtype=np.int64).reshape(self.dims[t], self.dims[s]) % p
            self.mats.append(m)
        if len(self.mats) != len(alg.arrows):
            raise ValueError("need one matrix per arrow")
        self.mats = tuple(self.mats)

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.dims)]).astype(np.int64)

    @property
    def total(self) -> int:
        return int(sum(self.dims))

    def vslice(self, v: int) -> slice:
        return slice(int(self.offsets[v]), int(self.offsets[v + 1]))

    def is_zero(self) -> bool:
        return self.total == 0

    @cached_property
    def action(self) -> np.ndarray:
        """rho(b) as a total x total matrix, for every basis element b."""
        alg, p, D = self.alg, self.alg.p, self.total
        arrow_full = []
        for (lab, s, t), m in zip(alg.arrows, self.mats):
            f = np.zeros((D, D), dtype=np.int64)
            f[self.vslice(t), self.vslice(s)] = m
            arrow_full.append(f)
        out = np.zeros((alg.dim, D, D), dtype=np.int64)
        for b, w in enumerate(alg.words):
            if not w:
                v = alg.src[b]
                sl = self.vslice(v)
                out[b, sl, sl] = np.eye(self.dims[v], dtype=np.int64)
                continue
            m = arrow_full[w[0]]
            for k in w[1:]:
                m = la.matmul(arrow_full[k], m, p)
            out[b] = m
        return out

    def is_valid(self) -> bool:
        """rho is multiplicative on all pairs of basis elements."""
        alg, p = self.alg, self.alg.p
        act = self.action
        if self.total == 0:
            return True
        lhs = np.einsum("xij,yjk->xyik", act, act) % p
        rhs = np.einsum("xyz,zik->xyik", alg.mult, act) % p
        return bool(np.array_equal(lhs, rhs))

    def element_action(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("b,bij->ij", x, self.action) % self.alg.p

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "mats": [m.tolist() for m in self.mats]}

    def __repr__(self):
        return f"Representation(dims={self.dims})"


def from_total_action(alg: Algebra, vertex_of: list[int], act: np.ndarray) -> Representation:
    """Build a representation from a basis tagged by vertices and rho(b) for arrows.

    ``act[k]`` is the matrix of arrow k on the given (unsorted) basis.
    """
    vertex_of = np.asarray(vertex_of, dtype=np.int64)
    order = np.argsort(vertex_of, kind="stable")
    dims = [int(np.sum(vertex_of == v)) for v in range(alg.n)]
    mats = []
    for k, (lab, s, t) in enumerate(alg.arrows):
        rows = order[vertex_of[order] == t]
        cols = order[vertex_of[order] == s]
        mats.append(act[k][np.ix_(rows, cols)])
    return Representation(alg, dims, mats)


def zero_module(alg: Algebra) -> Representation:
    return Representation(alg, [0] * alg.n, [np.zeros((0, 0))] * len(alg.arrows))


def indec_projective(alg: Algebra, i: int) -> Representation:
    """P_i = A e_i, basis the basis elements starting at i."""
    basis = np.flatnonzero(alg.src == i)
    act = [alg.mult[alg.arrow_basis[k]][np.ix_(basis, basis)].T for k in range(len(alg.arrows))]
    return from_total_action(alg, alg.tgt[basis].tolist(), act)


def indec_injective(alg: Algebra, i: int) -> Representation:
    """I_i = D(e_i A); the dual basis vector of b sits at the source of b."""
    basis = np.flatnonzero(alg.tgt == i)
    act = []
    for k in range(len(alg.arrows)):
        g = alg.arrow_basis[k]
        # g . b* = sum_x coef_b(x . g) x*
        act.append(alg.mult[:, g, :][np.ix_(basis, basis)])
    return from_total_action(alg, alg.src[basis].tolist(), act)


def simple(alg: Algebra, i: int) -> Representation:
    dims = [1 if v == i else 0 for v in range(alg.n)]
    mats = [np.zeros((dims[t], dims[s])) for _, s, t in alg.arrows]
    return Representation(alg, dims, mats)


def direct_sum(*mods: Representation) -> Representation:
    alg = mods[0].alg
    dims = [sum(m.dims[v] for m in mods) for v in range(alg.n)]
    mats = []
    for k, (lab, s, t) in enumerate(alg.arrows):
        blocks = [m.mats[k] for m in mods]
        out = np.zeros((dims[t], dims[s]), dtype=np.int64)
        r = c = 0
        for b in blocks:
            out[r:r + b.shape[0], c:c + b.shape[1]] = b
            r += b.shape[0]
            c += b.shape[1]
        mats.append(out)
    return Representation(alg, dims, mats)


def power(m: Representation, k: int) -> Representation:
    return direct_sum(*([m] * k)) if k else zero_module(m.alg)


# --------------------------------------------------------------------- Hom


def hom_space(M: Representation, N: Representation) -> np.ndarray:
    """Basis of Hom_A(M, N) as an array of block-diagonal total matrices (k, |N|, |M|)."""
    alg, p = M.alg, M.alg.p
    off = [0]
    for v in range(alg.n):
        off.append(off[-1] + N.dims[v] * M.dims[v])
    nvar = off[-1]
    if nvar == 0:
        return np.zeros((0, N.total, M.total), dtype=np.int64)
    rows = []
    for k, (lab, s, t) in enumerate(alg.arrows):
        ns, nt, ms, mt = N.dims[s], N.dims[t], M.dims[s], M.dims[t]
        if nt * ms == 0:
            continue
        eq = np.zeros((nt * ms, nvar), dtype=np.int64)
        # N_a f_s - f_t M_a = 0, unknowns row-major
        if ns:
            eq[:, off[s]:off[s + 1]] += np.kron(N.mats[k], np.eye(ms, dtype=np.int64))
        if mt:
            eq[:, off[t]:off[t + 1]] -= np.kron(np.eye(nt, dtype=np.int64), M.mats[k].T)
        rows.append(eq)
    ker = la.kernel_basis(np.concatenate(rows) % p, p) if rows else np.eye(nvar, dtype=np.int64)
    out = np.zeros((ker.shape[1], N.total, M.total), dtype=np.int64)
    for v in range(alg.n):
        if off[v] == off[v + 1]:
            continue
        blk = ker[off[v]:off[v + 1]].T.reshape(-1, N.dims[v], M.dims[v])
        out[:, N.vslice(v), M.vslice(v)] = blk
    return out


def hom_dim(M: Representation, N: Representation) -> int:
    return hom_space(M, N).shape[0]


def is_module_map(f: np.ndarray, M: Representation, N: Representation) -> bool:
    p = M.alg.p
    for k in range(len(M.alg.arrows)):
        b = M.alg.arrow_basis[k]
        if not np.array_equal(la.matmul(N.action[b], f, p), la.matmul(f, M.action[b], p)):
            return False
    return True


# ---------------------------------------------------------- sub/quotients


def submodule(M: Representation, basis: np.ndarray) -> tuple[Representation, np.ndarray]:
    """Submodule spanned by the columns of a vertex-homogeneous basis.

    Returns the representation and the inclusion matrix (|M| x |S|).
    Columns are regrouped per vertex.
    """
    alg, p = M.alg, M.alg.p
    cols, vert = [], []
    for v in range(alg.n):
        sl = M.vslice(v)
        part = basis[:, np.any(basis[sl] % p, axis=0)] if basis.size else basis
        part = la.column_space(part[sl], p) if part.size else np.zeros((M.dims[v], 0), np.int64)
        full = np.zeros((M.total, part.shape[1]), dtype=np.int64)
        full[sl] = part
        cols.append(full)
        vert += [v] * part.shape[1]
    inc = np.concatenate(cols, axis=1) if cols else np.zeros((M.total, 0), np.int64)
    return _restrict(M, inc, vert), inc


def _restrict(M: Representation, inc: np.ndarray, vert) -> Representation:
    alg, p = M.alg, M.alg.p
    acts = []
    for k in range(len(alg.arrows)):
        img = la.matmul(M.action[alg.arrow_basis[k]], inc, p)
        coords = la.solve(inc, img, p) if inc.shape[1] else np.zeros((0, 0), np.int64)
        if coords is None:
            raise ValueError("subspace is not a submodule")
        acts.append(coords)
    return from_total_action(alg, vert, acts) if inc.shape[1] else zero_module(alg)


def quotient(M: Representation, sub: np.ndarray) -> tuple[Representation, np.ndarray]:
    """M / span(sub columns) with the projection matrix (|Q| x |M|)."""
    alg, p = M.alg, M.alg.p
    comp_cols, vert = [], []
    for v in range(alg.n):
        sl = M.vslice(v)
        base = sub[sl][:, np.any(sub[sl] % p, axis=0)] if sub.size else np.zeros((M.dims[v], 0), np.int64)
        cand = np.eye(M.dims[v], dtype=np.int64)
        keep = la.independent_columns(base, cand, p)
        for c in keep:
            col = np.zeros(M.total, dtype=np.int64)
            col[M.offsets[v] + c] = 1
            comp_cols.append(col)
            vert.append(v)
    if not comp_cols:
        return zero_module(alg), np.zeros((0, M.total), np.int64)
    comp = np.stack(comp_cols, axis=1)
    # coordinates w.r.t. [comp | sub]: projection keeps the comp part
    full = np.concatenate([comp, sub], axis=1) if sub.size else comp
    inv = la.solve(full, np.eye(M.total, dtype=np.int64), p)
    proj = inv[: comp.shape[1]]
    acts = [la.matmul(la.matmul(proj, M.action[alg.arrow_basis[k]], p), comp, p)
            for k in range(len(alg.arrows))]
    return from_total_action(alg, vert, acts), _sort_rows(proj, vert)


def _sort_rows(m: np.ndarray, vert) -> np.ndarray:
    return m[np.argsort(np.asarray(vert), kind="stable")]


def kernel(f: np.ndarray, M: Representation) -> tuple[Representation, np.ndarray]:
    """Kernel of a module map out of M (f is |N| x |M|)."""
    ker = la.kernel_basis(f, M.alg.p) if f.shape[0] else np.eye(M.total, dtype=np.int64)
    return submodule(M, _homogenize(ker, M))


def image(f: np.ndarray, N: Representation) -> tuple[Representation, np.ndarray]:
    """Image of a module map into N."""
    return submodule(N, _homogenize(f % N.alg.p, N))


def _homogenize(cols: np.ndarray, M: Representation) -> np.ndarray:
    """Split columns into their vertex components (spans the same submodule)."""
    parts = []
    for v in range(M.alg.n):
        sl = M.vslice(v)
        part = np.zeros_like(cols)
        part[sl] = cols[sl]
        parts.append(part)
    return np.concatenate(parts, axis=1) if parts else cols


def radical(M: Representation) -> np.ndarray:
    """Columns spanning rad M = sum of arrow images (total coordinates)."""
    alg, p = M.alg, M.alg.p
    imgs = [M.action[alg.arrow_basis[k]] for k in range(len(alg.arrows))]
    if not imgs or M.total == 0:
        return np.zeros((M.total, 0), np.int64)
    return la.column_space(np.concatenate(imgs, axis=1) % p, p)


def top_generators(M: Representation) -> list[tuple[int, np.ndarray]]:
    """Vectors (vertex, total-coordinate vector) whose classes form a basis of M/rad M."""
    rad = radical(M)
    out = []
    for v in range(M.alg.n):
        sl = M.vslice(v)
        cand = np.zeros((M.total, M.dims[v]), dtype=np.int64)
        cand[sl] = np.eye(M.dims[v], dtype=np.int64)
        for c in la.independent_columns(rad, cand, M.alg.p):
            out.append((v, cand[:, c]))
    return out


# ---------------------------------------------------------- presentations


def projective_sum(alg: Algebra, verts) -> Representation:
    return direct_sum(*[indec_projective(alg, v) for v in verts]) if verts else zero_module(alg)


def _cover_matrix(alg: Algebra, gens, M: Representation) -> tuple[np.ndarray, Representation]:
    """The map ⊕ P_v -> M sending e_v to each generator, in total coordinates."""
    P = projective_sum(alg, [v for v, _ in gens])
    cols = []
    for v, m in gens:
        basis = np.flatnonzero(alg.src == v)
        # basis of P_v is sorted by target vertex inside from_total_action
        order = basis[np.argsort(alg.tgt[basis], kind="stable")]
        cols.append([(M.action[b] @ m) % alg.p for b in order])
    # columns of P are grouped by vertex across all summands; rebuild that order
    tagged = []
    for s, (v, _) in enumerate(gens):
        basis = np.flatnonzero(alg.src == v)
        order = basis[np.argsort(alg.tgt[basis], kind="stable")]
        for j, b in enumerate(order):
            tagged.append((alg.tgt[b], s, j))
    tagged_sorted = sorted(range(len(tagged)), key=lambda i: tagged[i][0])
    mat = np.zeros((M.total, P.total), dtype=np.int64)
    for c, i in enumerate(tagged_sorted):
        _, s, j = tagged[i]
        mat[:, c] = cols[s][j]
    return mat, P


def projective_element_coords(alg: Algebra, verts, vec: np.ndarray) -> np.ndarray:
    """Rewrite a vector of ⊕ P_{verts} (total coordinates) as a row of algebra elements.

    Returns an array (len(verts), dim A): component in P_{v_b} as an element of A e_{v_b}.
    """
    tagged = []
    for s, v in enumerate(verts):
        basis = np.flatnonzero(alg.src == v)
        order = basis[np.argsort(alg.tgt[basis], kind="stable")]
        for b in order:
            tagged.append((alg.tgt[b], s, b))
    tagged.sort(key=lambda t: t[0])
    out = np.zeros((len(verts), alg.dim), dtype=np.int64)
    for c, (_, s, b) in enumerate(tagged):
        out[s, b] = vec[c]
    return out


@dataclass
class Presentation:
    """Minimal projective presentation P1 -> P0 -> M -> 0.

    ``p0``/``p1`` list the vertices of the indecomposable projective summands;
    ``diff[a, b]`` is the element of e_{p1[a]} A e_{p0[b]} giving the
    component P_{p1[a]} -> P_{p0[b]} (right multiplication).
    """

    p0: list[int]
    p1: list[int]
    diff: np.ndarray
    cover: np.ndarray = field(repr=False)  # |M| x |P0|


def min_proj_presentation(M: Representation) -> Presentation:
    alg, p = M.alg, M.alg.p
    gens = top_generators(M)
    cover, P0 = _cover_matrix(alg, gens, M)
    K, inc = kernel(cover, P0)
    kgens = top_generators(K)
    p0 = [v for v, _ in gens]
    p1 = [v for v, _ in kgens]
    diff = np.zeros((len(p1), len(p0), alg.dim), dtype=np.int64)
    for a, (v, k) in enumerate(kgens):
        diff[a] = projective_element_coords(alg, p0, (inc @ k) % p)
    return Presentation(p0, p1, diff, cover)


def nakayama_block(alg: Algebra, r: np.ndarray, u: int, v: int) -> np.ndarray:
    """nu(r) : I_u -> I_v for r in e_u A e_v, on the dual bases (sorted like indec_injective)."""
    bu = np.flatnonzero(alg.tgt == u)
    bv = np.flatnonzero(alg.tgt == v)
    bu = bu[np.argsort(alg.src[bu], kind="stable")]
    bv = bv[np.argsort(alg.src[bv], kind="stable")]
    # nu(r)(x*) = sum_y coef_x(r . y) y*
    ry = np.einsum("a,ayc->yc", r, alg.mult) % alg.p  # ry[y] = r . y
    return ry[np.ix_(bv, bu)]


def tau(M: Representation) -> Representation:
    """tau M = ker(nu P1 -> nu P0) for the minimal presentation."""
    alg, p = M.alg, M.alg.p
    pres = min_proj_presentation(M)
    if not pres.p1:
        return zero_module(alg)
    nu_p1 = direct_sum(*[indec_injective(alg, u) for u in pres.p1])
    nu_p0 = direct_sum(*[indec_injective(alg, v) for v in pres.p0]) if pres.p0 else zero_module(alg)
    pos1 = _injective_positions(alg, pres.p1)
    pos0 = _injective_positions(alg, pres.p0)
    f = np.zeros((nu_p0.total, nu_p1.total), dtype=np.int64)
    for a, u in enumerate(pres.p1):
        for b, v in enumerate(pres.p0):
            blk = nakayama_block(alg, pres.diff[a, b], u, v)
            f[np.ix_(pos0[b], pos1[a])] = blk
    T, _ = kernel(f, nu_p1)
    return T


def _injective_positions(alg: Algebra, verts) -> list[np.ndarray]:
    """Total-coordinate positions of each summand's dual basis inside ⊕ I_verts."""
    tagged = []
    for s, v in enumerate(verts):
        bv = np.flatnonzero(alg.tgt == v)
        bv = bv[np.argsort(alg.src[bv], kind="stable")]
        for j, b in enumerate(bv):
            tagged.append((alg.src[b], s, j))
    order = sorted(range(len(tagged)), key=lambda i: tagged[i][0])
    pos = [np.zeros(int(np.sum(alg.tgt == v)), dtype=np.int64) for v in verts]
    for c, i in enumerate(order):
        _, s, j = tagged[i]
        pos[s][j] = c
    return pos


def ext1_dim(M: Representation, N: Representation) -> int:
    """dim Ext^1(M, N) from 0 -> Hom(M,N) -> Hom(P0,N) -> Hom(Omega M, N) -> Ext^1 -> 0."""
    alg = M.alg
    gens = top_generators(M)
    cover, P0 = _cover_matrix(alg, gens, M)
    omega, _ = kernel(cover, P0)
    hom_p0 = sum(N.dims[v] for v, _ in gens)
    return hom_dim(omega, N) - hom_p0 + hom_dim(M, N)


def injective_stable_hom_dim(N: Representation, X: Representation) -> int:
    """dim Hom(N, X) modulo maps factoring through an injective."""
    alg, p = N.alg, N.alg.p
    H = hom_space(N, X)
    if H.shape[0] == 0:
        return 0
    through = []
    for v in range(alg.n):
        I = indec_injective(alg, v)
        fs, gs = hom_space(N, I), hom_space(I, X)
        for f in fs:
            for g in gs:
                through.append(la.matmul(g, f, p).ravel())
    if not through:
        return H.shape[0]
    return H.shape[0] - la.rank(np.array(through), p)


def is_projective(M: Representation) -> bool:
    return not min_proj_presentation(M).p1


# ----------------------------------------------------------- decomposition


def _trace_rank(E: np.ndarray, p: int) -> int:
    gram = np.einsum("iab,jba->ij", E, E) % p
    return la.rank(gram, p)


def end_radical(E: np.ndarray, p: int) -> np.ndarray:
    """Coordinates (columns) of rad End spanned inside the basis E, via the trace form.

    Exact when p exceeds the module dimension.
    """
    gram = np.einsum("iab,jba->ij", E, E) % p
    return la.kernel_basis(gram, p)


def semisimple_field_count(E: np.ndarray, p: int) -> int | None:
    """Number of simple factors of End/rad when it is commutative, else None."""
    k = E.shape[0]
    rad = end_radical(E, p)
    # structure constants of End on the basis E
    prods = np.einsum("iab,jbc->ijac", E, E) % p
    flat = E.reshape(k, -1).T % p
    table = la.solve(flat, prods.reshape(k * k, -1).T, p).T.reshape(k, k, k)
    # quotient by rad
    comp = la.independent_columns(rad, np.eye(k, dtype=np.int64), p)
    full = np.concatenate([np.eye(k, dtype=np.int64)[:, comp], rad], axis=1)
    finv = la.inverse(full, p)
    r = len(comp)
    q = np.einsum("xyz,wz->xyw", table[np.ix_(comp, comp)], finv[:r]) % p
    if not np.array_equal(q, q.transpose(1, 0, 2)):
        return None
    # Frobenius s -> s^p is linear on a commutative algebra; its fixed points count factors
    frob = np.zeros((r, r), dtype=np.int64)
    for i in range(r):
        left = q[i].T  # y -> x_i . y
        pw = la.matpow(left, p - 1, p)
        frob[:, i] = pw[:, i]
    return r - la.rank((frob - np.eye(r, dtype=np.int64)) % p, p)


def is_indecomposable(M: Representation) -> bool:
    if M.total == 0:
        return False
    E = hom_space(M, M)
    p = M.alg.p
    if _trace_rank(E, p) == 1:
        return True
    # a quick random split settles most decomposable cases
    rng = np.random.default_rng(E.shape[0])
    for _ in range(3):
        phi = np.einsum("i,iab->ab", rng.integers(0, p, size=E.shape[0]), E) % p
        if len(la.charpoly_factors(phi, p)) > 1:
            return False
    return semisimple_field_count(E, p) == 1


def idempotent_polynomial(phi: np.ndarray, p: int) -> list[int] | None:
    """Coefficients of a polynomial q with q(phi) a nontrivial idempotent.

    ``None`` when the characteristic polynomial of phi is a power of a single
    irreducible, in which case no polynomial in phi splits anything.
    """
    facs = la.charpoly_factors(phi, p)
    if len(facs) < 2:
        return None
    f1, m1 = facs[0]
    g = flint.nmod_poly(f1, p) ** m1
    n = phi.shape[0]
    char = flint.nmod_mat(n, n, (phi % p).ravel().tolist(), p).charpoly()
    h = char // g
    _, a, b = g.xgcd(h)
    # a g + b h = 1, so b h projects onto the g-primary part
    return [int(c) for c in (b * h).coeffs()]


def _poly_idempotent(phi: np.ndarray, p: int) -> np.ndarray | None:
    q = idempotent_polynomial(phi, p)
    return None if q is None else la.poly_eval(q, phi, p)


def find_idempotent(E: np.ndarray, p: int, rng: np.random.Generator, tries: int = 20) -> np.ndarray | None:
    k = E.shape[0]
    for _ in range(tries):
        c = rng.integers(0, p, size=k)
        phi = np.einsum("i,iab->ab", c, E) % p
        e = _poly_idempotent(phi, p)
        if e is not None:
            return e
    # deterministic fallback: basis elements, then pairwise sums
    for i in range(k):
        e = _poly_idempotent(E[i], p)
        if e is not None:
            return e
    for i, j in itertools.combinations(range(k), 2):
        e = _poly_idempotent((E[i] + E[j]) % p, p)
        if e is not None:
            return e
    return None


def split_by_idempotent(M: Representation, e: np.ndarray):
    p = M.alg.p
    one = np.eye(M.total, dtype=np.int64)
    X, ix = image(e, M)
    Y, iy = image((one - e) % p, M)
    return (X, ix), (Y, iy)


def _decompose_raw(M: Representation, rng) -> list[Representation]:
    if M.total == 0:
        return []
    if is_indecomposable(M):
        return [M]
    E = hom_space(M, M)
    e = find_idempotent(E, M.alg.p, rng)
    if e is None:
        raise DecompositionFailed(f"no splitting idempotent for module with dims {M.dims}")
    (X, _), (Y, _) = split_by_idempotent(M, e)
    return _decompose_raw(X, rng) + _decompose_raw(Y, rng)


def iso_indecomposables(X: Representation, Y: Representation) -> bool:
    """Isomorphism test for indecomposables: some g.f in Hom(X,Y)Hom(Y,X) has nonzero trace."""
    if X.dims != Y.dims:
        return False
    p = X.alg.p
    F, G = hom_space(X, Y), hom_space(Y, X)
    if not F.shape[0] or not G.shape[0]:
        return False
    traces = np.einsum("iab,jba->ij", G, F) % p
    return bool(np.any(traces))


class ModuleRegistry:
    """Append-only table of indecomposable modules, IDs in discovery order."""

    def __init__(self, alg: Algebra, seed: int = 0):
        self.alg = alg
        self.items: list[Representation] = []
        self._by_dims: dict[tuple, list[int]] = {}
        self._lock = threading.Lock()
        self.rng = np.random.default_rng(seed)

    def lookup(self, X: Representation) -> int | None:
        for i in self._by_dims.get(X.dims, []):
            if iso_indecomposables(self.items[i], X):
                return i
        return None

    def get_or_insert(self, X: Representation) -> int:
        with self._lock:
            i = self.lookup(X)
            if i is not None:
                return i
            self.items.append(X)
            i = len(self.items) - 1
            self._by_dims.setdefault(X.dims, []).append(i)
            return i

    def __getitem__(self, i: int) -> Representation:
        return self.items[i]

    def __len__(self):
        return len(self.items)


def module_registry(alg: Algebra) -> ModuleRegistry:
    reg = alg.registries.get("modules")
    if reg is None:
        reg = alg.registries.setdefault("modules", ModuleRegistry(alg, getattr(alg, "seed", 0)))
    return reg


def decompose(M: Representation, registry: ModuleRegistry | None = None) -> dict[int, int]:
    """Multiset {registry id: multiplicity} of indecomposable summands."""
    reg = registry or module_registry(M.alg)
    out: dict[int, int] = {}
    for X in _decompose_raw(M, reg.rng):
        i = reg.get_or_insert(X)
        out[i] = out.get(i, 0) + 1
    return dict(sorted(out.items()))


def indecomposable_summands(M: Representation) -> list[Representation]:
    return _decompose_raw(M, module_registry(M.alg).rng)


# ------------------------------------------------------------ torsion


def trace_submodule(U: Representation, M: Representation) -> np.ndarray:
    """Columns spanning the trace of U in M (sum of images of all maps U -> M)."""
    p = M.alg.p
    H = hom_space(U, M)
    if not H.shape[0]:
        return np.zeros((M.total, 0), np.int64)
    cols = np.concatenate(list(H), axis=1) % p
    return la.column_space(cols, p)


def fac_member(X: Representation, T: Representation) -> bool:
    """X is a quotient of a finite sum of copies of T."""
    if X.total == 0:
        return True
    return trace_submodule(T, X).shape[1] == X.total


@dataclass
class CanonicalSequence:
    torsion: Representation
    inclusion: np.ndarray
    free: Representation
    projection: np.ndarray


def torsion_canonical_seq(M: Representation, U: Representation) -> CanonicalSequence:
    """0 -> tM -> M -> fM -> 0 for the torsion pair (Fac U, U-perp)."""
    tr = trace_submodule(U, M)
    t, inc = submodule(M, _homogenize(tr, M) if tr.size else tr)
    f, proj = quotient(M, inc)
    return CanonicalSequence(t, inc, f, proj)


def is_tau_rigid(M: Representation) -> bool:
    return hom_dim(M, tau(M)) == 0


def distinct_summand_count(M: Representation) -> int:
    return len(decompose(M))


def is_stau_pair(M: Representation, Q_verts) -> bool:
    """(M, ⊕_{v in Q_verts} P_v) support tau-tilting."""
    if any(M.dims[v] for v in Q_verts):
        return False
    if not is_tau_rigid(M):
        return False
    return distinct_summand_count(M) + len(set(Q_verts)) == M.alg.n


# ------------------------------------------------------------ enumeration


def _connected_support(alg: Algebra, dims) -> bool:
    supp = {v for v in range(alg.n) if dims[v]}
    if not supp:
        return False
    adj = {v: set() for v in supp}
    for _, s, t in alg.arrows:
        if s in supp and t in supp:
            adj[s].add(t)
            adj[t].add(s)
    start = next(iter(supp))
    seen, stack = {start}, [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == supp


@dataclass
class IndecSweep:
    modules: list[Representation]
    ids: list[int]
    dim_bound: int
    complete: bool


def enumerate_indecomposables(alg: Algebra, dim_bound: int = 6, strict: bool = True,
                              max_cycles: int | None = 1) -> IndecSweep:
    """Indecomposables with 0/1 arrow matrices, by total dimension.

    Only configurations whose coefficient quiver is connected with at most
    ``max_cycles`` independent cycles are tried (``None``: no limit).  With
    the default this finds every indecomposable of the representation-directed
    corpus algebras, including the commutative square's sincere module.
    Indecomposables occur in every length below the largest one, so the sweep
    stops at the first empty level;
    if levels up to ``dim_bound`` are all nonempty it raises :class:`Truncated`
    (when ``strict``).
    """
    cache = alg.registries.setdefault("indec_sweep", {})
    if (dim_bound, max_cycles) in cache:
        sweep = cache[(dim_bound, max_cycles)]
        if strict and not sweep.complete:
            raise Truncated(f"new indecomposables still appear at total dimension {dim_bound}")
        return sweep
    reg = module_registry(alg)
    found: list[int] = []
    complete = False
    for total in range(1, dim_bound + 1):
        level = len(found)
        for dims in _dim_vectors(alg.n, total):
            if not _connected_support(alg, dims):
                continue
            sizes = [dims[t] * dims[s] for _, s, t in alg.arrows]
            nbits = sum(sizes)
            ends = _coefficient_edges(alg, dims)
            for bits in _configurations(nbits, total, max_cycles):
                # a disconnected coefficient quiver splits the module
                if not _connected_bits(bits, ends, total):
                    continue
                mats, pos = [], 0
                for (_, s, t), sz in zip(alg.arrows, sizes):
                    mats.append(np.array(bits[pos:pos + sz], dtype=np.int64).reshape(dims[t], dims[s]))
                    pos += sz
                M = Representation(alg, dims, mats)
                if not M.is_valid() or not is_indecomposable(M):
                    continue
                i = reg.get_or_insert(M)
                if i not in found:
                    found.append(i)
        if len(found) == level:
            complete = True
            break
    sweep = IndecSweep([reg[i] for i in found], found, dim_bound, complete)
    cache[(dim_bound, max_cycles)] = sweep
    if strict and not complete:
        raise Truncated(f"new indecomposables still appear at total dimension {dim_bound}")
    return sweep


def _configurations(nbits: int, total: int, max_cycles: int | None):
    """0/1 vectors with total - 1 + c ones, 0 <= c <= max_cycles."""
    top = nbits if max_cycles is None else min(nbits, total - 1 + max_cycles)
    for ones in range(total - 1, top + 1):
        for pos in itertools.combinations(range(nbits), ones):
            bits = [0] * nbits
            for q in pos:
                bits[q] = 1
            yield bits


def _coefficient_edges(alg: Algebra, dims) -> list[tuple[int, int]]:
    """Basis-vector pairs joined by each bit of a 0/1 representation, in bit order."""
    off = np.concatenate([[0], np.cumsum(dims)])
    ends = []
    for _, s, t in alg.arrows:
        for r in range(dims[t]):
            for c in range(dims[s]):
                ends.append((int(off[t]) + r, int(off[s]) + c))
    return ends


def _connected_bits(bits, ends, total: int) -> bool:
    parent = list(range(total))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    parts = total
    for b, (u, v) in zip(bits, ends):
        if b:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                parts -= 1
    return parts == 1


def _dim_vectors(n: int, total: int):
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _dim_vectors(n - 1, total - first):
            yield (first,) + rest


@dataclass(frozen=True)
class STauPair:
    """A basic support tau-tilting (or tau-rigid) pair: module summand IDs and projective vertices."""

    module_ids: tuple[int, ...]
    proj_verts: tuple[int, ...]

    def module(self, alg: Algebra) -> Representation:
        reg = module_registry(alg)
        if not self.module_ids:
            return zero_module(alg)
        return direct_sum(*[reg[i] for i in self.module_ids])

    def dimvec(self, alg: Algebra) -> tuple[int, ...]:
        return self.module(alg).dims


def enumerate_stau(alg: Algebra, dim_bound: int = 6) -> list[STauPair]:
    """All basic support tau-tilting pairs, by clique search over compatible tau-rigid pieces."""
    sweep = enumerate_indecomposables(alg, dim_bound)
    mods = sweep.modules
    rigid = [k for k, X in enumerate(mods) if is_tau_rigid(X)]
    taus = {k: tau(mods[k]) for k in rigid}
    # nodes: ("m", k) modules, ("p", v) shifted projectives
    nodes = [("m", k) for k in rigid] + [("p", v) for v in range(alg.n)]

    def compatible(a, b):
        if a[0] == "p" and b[0] == "p":
            return a[1] != b[1] or a == b
        if a[0] == "p":
            a, b = b, a
        if b[0] == "p":
            return mods[a[1]].dims[b[1]] == 0
        x, y = a[1], b[1]
        return hom_dim(mods[x], taus[y]) == 0 and hom_dim(mods[y], taus[x]) == 0

    m = len(nodes)
    comp = np.zeros((m, m), dtype=bool)
    for i in range(m):
        for j in range(i, m):
            comp[i, j] = comp[j, i] = compatible(nodes[i], nodes[j])
    out = []

    def extend(clique, start):
        if len(clique) == alg.n:
            mids = tuple(sorted(sweep.ids[nodes[c][1]] for c in clique if nodes[c][0] == "m"))
            pv = tuple(sorted(nodes[c][1] for c in clique if nodes[c][0] == "p"))
            out.append(STauPair(mids, pv))
            return
        for c in range(start, m):
            if comp[c, c] and all(comp[c, d] for d in clique):
                extend(clique + [c], c + 1)

    extend([], 0)
    out.sort(key=lambda s: (s.module_ids, s.proj_verts))
    return out


def _projective_positions(alg: Algebra, verts) -> list[np.ndarray]:
    """For each summand P_v of ⊕ P_verts: total positions of its basis (basis elements from v)."""
    tagged = []
    for s, v in enumerate(verts):
        bv = np.flatnonzero(alg.src == v)
        bv = bv[np.argsort(alg.tgt[bv], kind="stable")]
        for j, b in enumerate(bv):
            tagged.append((alg.tgt[b], s, j))
    order = sorted(range(len(tagged)), key=lambda i: tagged[i][0])
    pos = [np.zeros(int(np.sum(alg.src == v)), dtype=np.int64) for v in verts]
    for c, i in enumerate(order):
        _, s, j = tagged[i]
        pos[s][j] = c
    return pos


def projective_map_matrix(alg: Algebra, rows, cols, R: np.ndarray) -> np.ndarray:
    """Total matrix of the map ⊕ P_rows -> ⊕ P_cols, x -> x . R[a, b] on the a-th summand."""
    p = alg.p
    pos_r = _projective_positions(alg, rows)
    pos_c = _projective_positions(alg, cols)
    n_r = sum(len(x) for x in pos_r)
    n_c = sum(len(x) for x in pos_c)
    out = np.zeros((n_c, n_r), dtype=np.int64)
    for a, u in enumerate(rows):
        bu = np.flatnonzero(alg.src == u)
        bu = bu[np.argsort(alg.tgt[bu], kind="stable")]
        for b, v in enumerate(cols):
            bv = np.flatnonzero(alg.src == v)
            bv = bv[np.argsort(alg.tgt[bv], kind="stable")]
            # coordinates of x . r for each basis x of P_u, in the basis of P_v
            xr = np.einsum("xyz,y->xz", alg.mult[bu], R[a, b]) % p
            out[np.ix_(pos_c[b], pos_r[a])] = xr[:, bv].T
    return out


def cokernel_of_projective_map(alg: Algebra, rows, cols, R: np.ndarray) -> Representation:
    P0 = projective_sum(alg, list(cols))
    if not len(rows):
        return P0
    f = projective_map_matrix(alg, rows, cols, R)
    _, inc = image(f, P0)
    Q, _ = quotient(P0, inc)
    return Q
