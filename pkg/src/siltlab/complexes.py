"""Bounded complexes of finitely generated projectives and their homotopy category.

A term is a tuple of vertices (one indecomposable projective P_v per entry,
sorted by vertex).  A map between sums of projectives is an *element matrix*
``R`` of shape ``(m, n, dim A)``: row ``a`` describes where the summand
``P_{u_a}`` goes, and ``R[a, b]`` lies in ``e_{u_a} A e_{v_b}`` acting by
right multiplication.  With this row convention "first R, then S" is the
matrix product ``R S`` computed with the algebra's multiplication.

Differentials run upwards: ``diffs[k]`` maps degree ``lo + k`` to ``lo + k + 1``.
"""

from __future__ import annotations

import itertools

import threading
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg as la
from .algebra import Algebra
from .errors import DecompositionFailed
from .modules import idempotent_polynomial, semisimple_field_count

# ----------------------------------------------------------- element matrices


def emul(R: np.ndarray, S: np.ndarray, alg: Algebra) -> np.ndarray:
    """First R, then S."""
    if R.shape[0] == 0 or S.shape[1] == 0 or R.shape[1] == 0:
        return np.zeros((R.shape[0], S.shape[1], alg.dim), dtype=np.int64)
    p, d = alg.p, alg.dim
    pairs = np.einsum("ijx,jky->ikxy", R, S) % p
    out = pairs.reshape(-1, d * d) @ alg.mult.reshape(d * d, d)
    return (out % p).reshape(R.shape[0], S.shape[1], d)


def eidentity(verts, alg: Algebra) -> np.ndarray:
    m = len(verts)
    out = np.zeros((m, m, alg.dim), dtype=np.int64)
    for a, v in enumerate(verts):
        out[a, a, alg.idem[v]] = 1
    return out


def ezeros(m: int, n: int, alg: Algebra) -> np.ndarray:
    return np.zeros((m, n, alg.dim), dtype=np.int64)


def allowed_mask(rows, cols, alg: Algebra) -> np.ndarray:
    """Boolean (m, n, d): entry (a, b, x) may be nonzero iff x is in e_{rows[a]} A e_{cols[b]}."""
    r = np.asarray(rows, dtype=np.int64)
    c = np.asarray(cols, dtype=np.int64)
    return (alg.tgt[None, None, :] == r[:, None, None]) & (alg.src[None, None, :] == c[None, :, None])


def top_matrix(R: np.ndarray, rows, cols, alg: Algebra) -> np.ndarray:
    """Scalar part: coefficient of e_v on entries joining summands at the same vertex v."""
    out = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for a, u in enumerate(rows):
        for b, v in enumerate(cols):
            if u == v:
                out[a, b] = R[a, b, alg.idem[u]]
    return out


def einverse(u: np.ndarray, verts, alg: Algebra) -> np.ndarray:
    """Inverse of a square element matrix whose top is invertible."""
    p = alg.p
    top = top_matrix(u, verts, verts, alg)
    tinv = la.inverse(top, p)
    tinv_e = np.zeros_like(u)
    for a, va in enumerate(verts):
        for b, vb in enumerate(verts):
            if va == vb and tinv[a, b]:
                tinv_e[a, b, alg.idem[va]] = tinv[a, b]
    # u = top (1 + N) with N radical, so u^-1 = (1 - N + N^2 - ...) top^-1
    one = eidentity(verts, alg)
    nil = (emul(tinv_e, u, alg) - one) % p
    acc, term = one.copy(), one.copy()
    while True:
        term = (-emul(term, nil, alg)) % p
        if not term.any():
            break
        acc = (acc + term) % p
    return emul(acc, tinv_e, alg)


# ------------------------------------------------------------------ complexes


class ProjComplex:
    def __init__(self, alg: Algebra, lo: int, terms, diffs=None, check: bool = True):
        self.alg = alg
        terms = [tuple(int(v) for v in t) for t in terms]
        diffs = [np.asarray(d, dtype=np.int64) % alg.p for d in (diffs or [])]
        if not diffs and len(terms) > 1:
            diffs = [ezeros(len(terms[k]), len(terms[k + 1]), alg) for k in range(len(terms) - 1)]
        # trim empty ends so equal objects get equal descriptions
        while terms and not terms[0]:
            terms.pop(0)
            diffs = diffs[1:]
            lo += 1
        while terms and not terms[-1]:
            terms.pop()
            diffs = diffs[:-1]
        if not terms:
            lo = 0
        self.lo = lo
        self.terms = tuple(terms)
        self.diffs = tuple(d.reshape(len(terms[k]), len(terms[k + 1]), alg.dim)
                           for k, d in enumerate(diffs))
        if check:
            self._check()

    def _check(self):
        alg = self.alg
        for k, d in enumerate(self.diffs):
            mask = allowed_mask(self.terms[k], self.terms[k + 1], alg)
            if np.any(d[~mask]):
                raise ValueError(f"differential entry outside e_u A e_v at degree {self.lo + k}")
        for k in range(len(self.diffs) - 1):
            if emul(self.diffs[k], self.diffs[k + 1], alg).any():
                raise ValueError(f"d o d != 0 at degree {self.lo + k}")

    @property
    def hi(self) -> int:
        return self.lo + len(self.terms) - 1

    def is_zero(self) -> bool:
        return not self.terms

    def term(self, k: int) -> tuple[int, ...]:
        i = k - self.lo
        return self.terms[i] if 0 <= i < len(self.terms) else ()

    def diff(self, k: int) -> np.ndarray:
        """Differential from degree k to k + 1 (possibly an empty-shaped zero)."""
        i = k - self.lo
        if 0 <= i < len(self.diffs):
            return self.diffs[i]
        return ezeros(len(self.term(k)), len(self.term(k + 1)), self.alg)

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1) if self.terms else range(0)

    def is_minimal(self) -> bool:
        return all(not top_matrix(d, self.terms[k], self.terms[k + 1], self.alg).any()
                   for k, d in enumerate(self.diffs))

    def within(self, lo: int, hi: int) -> bool:
        return all(lo <= k <= hi for k in self.degrees() if self.term(k))

    def is_two_term(self) -> bool:
        return self.within(-1, 0)

    def mults(self) -> list[list[int]]:
        return [[t.count(v) for v in range(self.alg.n)] for t in self.terms]

    @cached_property
    def key(self) -> tuple:
        return (self.lo, self.terms, tuple(d.tobytes() for d in self.diffs))

    def __eq__(self, other):
        return isinstance(other, ProjComplex) and self.alg is other.alg and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        parts = [f"{self.lo + k}:" + ("+".join(f"P{self.alg.vertices[v]}" for v in t) or "0")
                 for k, t in enumerate(self.terms)]
        return "ProjComplex(" + ", ".join(parts) + ")"

    # -------------------------------------------------------------- JSON
    def to_json(self) -> dict:
        alg = self.alg
        return {
            "degrees": [self.lo, self.hi],
            "mults": self.mults(),
            "diffs": [[[alg.element_terms(d[a, b]) for b in range(d.shape[1])] for a in range(d.shape[0])]
                      for d in self.diffs],
        }

    @classmethod
    def from_json(cls, alg: Algebra, data: dict, terms=None) -> "ProjComplex":
        lo, hi = data["degrees"]
        mults = data["mults"]
        if terms is None:
            terms = [tuple(v for v in range(alg.n) for _ in range(m[v])) for m in mults]
        else:
            terms = [tuple(t) for t in terms]
        diffs = []
        for k, rows in enumerate(data["diffs"]):
            d = ezeros(len(terms[k]), len(terms[k + 1]), alg)
            for a, row in enumerate(rows):
                for b, entry in enumerate(row):
                    d[a, b] = alg.element_from_terms(entry)
            diffs.append(d)
        return cls(alg, lo, terms, diffs)


def stalk(alg: Algebra, verts, degree: int = 0) -> ProjComplex:
    return ProjComplex(alg, degree, [tuple(sorted(verts))])


def regular_stalk(alg: Algebra, degree: int = 0) -> ProjComplex:
    return stalk(alg, range(alg.n), degree)


def zero_complex(alg: Algebra) -> ProjComplex:
    return ProjComplex(alg, 0, [])


def shift(X: ProjComplex, k: int = 1) -> ProjComplex:
    """X[k]: degree j holds X^{j+k}; the differential picks up (-1)^k."""
    sign = -1 if k % 2 else 1
    return ProjComplex(X.alg, X.lo - k, X.terms, [(sign * d) % X.alg.p for d in X.diffs], check=False)


def _block(rows_parts, alg: Algebra) -> np.ndarray:
    """Assemble a block element matrix from a grid of blocks."""
    return np.concatenate([np.concatenate(row, axis=1) for row in rows_parts], axis=0)


def direct_sum(*xs: ProjComplex) -> ProjComplex:
    """Direct sum, with summands re-sorted by vertex inside each degree."""
    alg = xs[0].alg
    xs = [x for x in xs if not x.is_zero()]
    if not xs:
        return zero_complex(alg)
    lo = min(x.lo for x in xs)
    hi = max(x.hi for x in xs)
    terms, diffs = [], []
    for k in range(lo, hi + 1):
        terms.append(sum((x.term(k) for x in xs), ()))
    for k in range(lo, hi):
        rows = sum(len(x.term(k)) for x in xs)
        cols = sum(len(x.term(k + 1)) for x in xs)
        d = ezeros(rows, cols, alg)
        r = c = 0
        for x in xs:
            dx = x.diff(k)
            d[r:r + dx.shape[0], c:c + dx.shape[1]] = dx
            r += dx.shape[0]
            c += dx.shape[1]
        diffs.append(d)
    return sort_terms(ProjComplex(alg, lo, terms, diffs, check=False))


def sort_terms(X: ProjComplex) -> ProjComplex:
    perms = [np.argsort(np.asarray(t, dtype=np.int64), kind="stable") for t in X.terms]
    terms = [tuple(np.asarray(t, dtype=np.int64)[pm].tolist()) for t, pm in zip(X.terms, perms)]
    diffs = [d[perms[k]][:, perms[k + 1]] for k, d in enumerate(X.diffs)]
    return ProjComplex(X.alg, X.lo, terms, diffs, check=False)


@dataclass
class ChainMap:
    """Degree-0 chain map; ``comps[k]`` is an element matrix X^k -> Y^k."""

    src: ProjComplex
    tgt: ProjComplex
    comps: dict

    def comp(self, k: int) -> np.ndarray:
        if k in self.comps:
            return self.comps[k]
        return ezeros(len(self.src.term(k)), len(self.tgt.term(k)), self.src.alg)

    def then(self, other: "ChainMap") -> "ChainMap":
        alg = self.src.alg
        ks = set(self.comps) & set(other.comps)
        return ChainMap(self.src, other.tgt, {k: emul(self.comps[k], other.comps[k], alg) for k in ks})

    def to_json(self) -> dict:
        alg = self.src.alg
        return {
            "src": dict(self.src.to_json(), terms=[list(t) for t in self.src.terms]),
            "tgt": dict(self.tgt.to_json(), terms=[list(t) for t in self.tgt.terms]),
            "comps": {str(k): [[alg.element_terms(m[a, b]) for b in range(m.shape[1])] for a in range(m.shape[0])]
                      for k, m in sorted(self.comps.items())},
        }

    @classmethod
    def from_json(cls, alg: Algebra, data: dict) -> "ChainMap":
        X = ProjComplex.from_json(alg, data["src"], terms=data["src"].get("terms"))
        Y = ProjComplex.from_json(alg, data["tgt"], terms=data["tgt"].get("terms"))
        comps = {}
        for k, rows in data["comps"].items():
            k = int(k)
            m = ezeros(len(X.term(k)), len(Y.term(k)), alg)
            for a, row in enumerate(rows):
                for b, entry in enumerate(row):
                    m[a, b] = alg.element_from_terms(entry)
            comps[k] = m
        return cls(X, Y, comps)

    def is_chain_map(self) -> bool:
        alg = self.src.alg
        for k in range(min(self.src.lo, self.tgt.lo) - 1, max(self.src.hi, self.tgt.hi) + 1):
            lhs = emul(self.src.diff(k), self.comp(k + 1), alg)
            rhs = emul(self.comp(k), self.tgt.diff(k), alg)
            if not np.array_equal(lhs, rhs):
                return False
        return True


def identity_map(X: ProjComplex) -> ChainMap:
    return ChainMap(X, X, {k: eidentity(X.term(k), X.alg) for k in X.degrees()})


def cone(f: ChainMap) -> ProjComplex:
    """cone(f)^k = X^{k+1} + Y^k with differential [[-d_X, f], [0, d_Y]]."""
    X, Y, alg, p = f.src, f.tgt, f.src.alg, f.src.alg.p
    if X.is_zero():
        return Y
    lo = min(X.lo - 1, Y.lo) if not Y.is_zero() else X.lo - 1
    hi = max(X.hi - 1, Y.hi) if not Y.is_zero() else X.hi - 1
    terms = [X.term(k + 1) + Y.term(k) for k in range(lo, hi + 1)]
    diffs = []
    for k in range(lo, hi):
        top = np.concatenate([(-X.diff(k + 1)) % p, f.comp(k + 1)], axis=1)
        bot = np.concatenate([ezeros(len(Y.term(k)), len(X.term(k + 2)), alg), Y.diff(k)], axis=1)
        diffs.append(np.concatenate([top, bot], axis=0))
    return sort_terms(ProjComplex(alg, lo, terms, diffs, check=False))


def cocone(g: ChainMap) -> ProjComplex:
    return shift(cone(g), -1)


# ------------------------------------------------------------------- minimal


def minimalize(X: ProjComplex) -> ProjComplex:
    """Cancel unit entries of the differential by Gaussian elimination."""
    alg, p = X.alg, X.alg.p
    lo = X.lo
    terms = [list(t) for t in X.terms]
    diffs = [d.copy() for d in X.diffs]
    while True:
        hit = None
        for k, d in enumerate(diffs):
            for a, u in enumerate(terms[k]):
                for b, v in enumerate(terms[k + 1]):
                    if u == v and d[a, b, alg.idem[u]]:
                        hit = (k, a, b)
                        break
                if hit:
                    break
            if hit:
                break
        if hit is None:
            break
        k, a, b = hit
        d = diffs[k]
        v = terms[k][a]
        uinv = alg.unit_inverse(d[a, b], v)
        rows = [i for i in range(d.shape[0]) if i != a]
        cols = [j for j in range(d.shape[1]) if j != b]
        gamma = d[rows][:, [b]]
        beta = d[[a]][:, cols]
        corr = emul(emul(gamma, uinv.reshape(1, 1, -1), alg), beta, alg)
        diffs[k] = (d[np.ix_(rows, cols)] - corr) % p
        if k > 0:
            diffs[k - 1] = diffs[k - 1][:, rows]
        if k + 1 < len(diffs):
            diffs[k + 1] = diffs[k + 1][cols]
        terms[k] = [terms[k][i] for i in rows]
        terms[k + 1] = [terms[k + 1][j] for j in cols]
    return ProjComplex(alg, lo, terms, diffs, check=False)


# ------------------------------------------------------------- Hom spaces


def _left_op(L: np.ndarray, n: int, alg: Algebra) -> np.ndarray:
    """Matrix of F -> L F on full coordinates; F is (m, n, d), result (l, n, d)."""
    l, m, d = L.shape
    lm = np.einsum("ibx,xyz->ibyz", L, alg.mult) % alg.p
    op = np.einsum("ibyz,cg->iczbgy", lm, np.eye(n, dtype=np.int64))
    return op.reshape(l * n * d, m * n * d)


def _right_op(R: np.ndarray, m: int, alg: Algebra) -> np.ndarray:
    """Matrix of F -> F R on full coordinates; F is (m, n, d), result (m, l, d)."""
    n, l, d = R.shape
    rm = np.einsum("bcy,xyz->bcxz", R, alg.mult) % alg.p
    op = np.einsum("bcxz,ag->aczgbx", rm, np.eye(m, dtype=np.int64))
    return op.reshape(m * l * d, m * n * d)


class HomSpace:
    """Degree-0 maps X -> Y: chain maps Z, null-homotopic ones B, and Hom_K = Z / B."""

    def __init__(self, X: ProjComplex, Y: ProjComplex):
        self.X, self.Y = X, Y
        alg = self.alg = X.alg
        p = alg.p
        d = alg.dim
        degs = [k for k in X.degrees() if X.term(k) and Y.term(k)]
        self.degs = degs
        # variable layout for F^k
        self.slots = {}
        off = 0
        for k in degs:
            mask = allowed_mask(X.term(k), Y.term(k), alg).ravel()
            idx = np.flatnonzero(mask)
            self.slots[k] = (off, idx, len(X.term(k)), len(Y.term(k)))
            off += len(idx)
        self.nvar = off
        # chain condition rows: d_X^k F^{k+1} - F^k d_Y^k = 0
        eqs = []
        lo = min(X.lo, Y.lo) - 1
        hi = max(X.hi, Y.hi)
        for k in range(lo, hi + 1):
            rows_n, cols_n = len(X.term(k)), len(Y.term(k + 1))
            if not rows_n or not cols_n:
                continue
            # only entries inside e_u A e_v can be nonzero in the equation
            ridx = np.flatnonzero(allowed_mask(X.term(k), Y.term(k + 1), alg).ravel())
            block = np.zeros((len(ridx), self.nvar), dtype=np.int64)
            if k + 1 in self.slots and X.diff(k).any():
                o, idx, m, n = self.slots[k + 1]
                block[:, o:o + len(idx)] += _left_op(X.diff(k), n, alg)[np.ix_(ridx, idx)]
            if k in self.slots and Y.diff(k).any():
                o, idx, m, n = self.slots[k]
                block[:, o:o + len(idx)] -= _right_op(Y.diff(k), m, alg)[np.ix_(ridx, idx)]
            block %= p
            block = block[np.any(block, axis=1)]
            if len(block):
                eqs.append(block)
        if self.nvar == 0:
            self.Z = np.zeros((0, 0), dtype=np.int64)
        elif eqs:
            self.Z = la.kernel_basis(np.concatenate(eqs), p)
        else:
            self.Z = np.eye(self.nvar, dtype=np.int64)
        # homotopies H^k : X^k -> Y^{k-1};  F^k = d_X^k H^{k+1} + H^k d_Y^{k-1}
        hcols = []
        for k in X.degrees():
            if not X.term(k) or not Y.term(k - 1):
                continue
            mask = allowed_mask(X.term(k), Y.term(k - 1), alg).ravel()
            hidx = np.flatnonzero(mask)
            if not len(hidx):
                continue
            m, n = len(X.term(k)), len(Y.term(k - 1))
            col = np.zeros((self.nvar, len(hidx)), dtype=np.int64)
            # contributes to F^{k-1} via d_X^{k-1} H^k
            if k - 1 in self.slots and X.diff(k - 1).any():
                o, idx, _, nn = self.slots[k - 1]
                col[o:o + len(idx)] += _left_op(X.diff(k - 1), n, alg)[idx][:, hidx]
            # contributes to F^k via H^k d_Y^{k-1}
            if k in self.slots and Y.diff(k - 1).any():
                o, idx, mm, _ = self.slots[k]
                col[o:o + len(idx)] += _right_op(Y.diff(k - 1), m, alg)[idx][:, hidx]
            hcols.append(col % p)
        if hcols and self.nvar:
            self.B = la.column_space(np.concatenate(hcols, axis=1), p)
        else:
            self.B = np.zeros((self.nvar, 0), dtype=np.int64)
        if self.Z.shape[1]:
            keep = la.independent_columns(self.B, self.Z, p)
            self.reps = self.Z[:, keep]
        else:
            self.reps = np.zeros((self.nvar, 0), dtype=np.int64)

    @property
    def dim(self) -> int:
        return self.reps.shape[1]

    @property
    def chain_dim(self) -> int:
        return self.Z.shape[1]

    def to_map(self, vec: np.ndarray) -> ChainMap:
        comps = {}
        d = self.alg.dim
        for k, (o, idx, m, n) in self.slots.items():
            full = np.zeros(m * n * d, dtype=np.int64)
            full[idx] = vec[o:o + len(idx)]
            comps[k] = full.reshape(m, n, d)
        return ChainMap(self.X, self.Y, comps)

    def to_vec(self, f: ChainMap) -> np.ndarray:
        vec = np.zeros(self.nvar, dtype=np.int64)
        for k, (o, idx, m, n) in self.slots.items():
            vec[o:o + len(idx)] = f.comp(k).ravel()[idx]
        return vec

    def basis(self) -> list[ChainMap]:
        """Representatives of a basis of Hom_K."""
        return [self.to_map(self.reps[:, j]) for j in range(self.dim)]

    def chain_basis(self) -> list[ChainMap]:
        return [self.to_map(self.Z[:, j]) for j in range(self.chain_dim)]

    def is_null(self, f: ChainMap) -> bool:
        return la.in_span(self.B, self.to_vec(f), self.alg.p)

    def in_span_mod_null(self, gens: list[ChainMap], f: ChainMap) -> bool:
        cols = [self.to_vec(g) for g in gens]
        base = np.concatenate([self.B] + [c[:, None] for c in cols], axis=1) if cols else self.B
        return la.in_span(base, self.to_vec(f), self.alg.p)

    def rank_mod_null(self, maps: list[ChainMap]) -> int:
        """dim of span(maps) + B minus dim B."""
        p = self.alg.p
        if not maps:
            return 0
        cols = np.stack([self.to_vec(g) for g in maps], axis=1)
        return len(la.independent_columns(self.B, cols, p))


def hom_space(X: ProjComplex, Y: ProjComplex) -> HomSpace:
    """Cached :class:`HomSpace` (complexes are immutable, so keys are stable)."""
    cache = X.alg.registries.setdefault("hom_spaces", {})
    key = (X.key, Y.key)
    H = cache.get(key)
    if H is None:
        H = cache[key] = HomSpace(X, Y)
    return H


def hom_k(X: ProjComplex, Y: ProjComplex, s: int = 0) -> HomSpace:
    """Hom_K(X, Y[s])."""
    return hom_space(X, shift(Y, s) if s else Y)


def hom_k_dim(X: ProjComplex, Y: ProjComplex, s: int = 0) -> int:
    if X.is_zero() or Y.is_zero():
        return 0
    return hom_k(X, Y, s).dim


# ---------------------------------------------------------- decomposition


def map_top(f: ChainMap) -> np.ndarray:
    """Block-diagonal scalar part of a chain map (over all degrees of the source)."""
    X, Y, alg = f.src, f.tgt, f.src.alg
    rows = sum(len(X.term(k)) for k in X.degrees())
    cols = sum(len(Y.term(k)) for k in Y.degrees())
    out = np.zeros((rows, cols), dtype=np.int64)
    r0 = {k: sum(len(X.term(j)) for j in X.degrees() if j < k) for k in X.degrees()}
    c0 = {k: sum(len(Y.term(j)) for j in Y.degrees() if j < k) for k in Y.degrees()}
    for k in set(X.degrees()) & set(Y.degrees()):
        t = top_matrix(f.comp(k), X.term(k), Y.term(k), alg)
        out[r0[k]:r0[k] + t.shape[0], c0[k]:c0[k] + t.shape[1]] = t
    return out


def _eval_poly(coeffs, phi: ChainMap) -> ChainMap:
    X, alg, p = phi.src, phi.src.alg, phi.src.alg.p
    comps = {}
    for k in X.degrees():
        m = phi.comp(k)
        one = eidentity(X.term(k), alg)
        out = ezeros(m.shape[0], m.shape[1], alg)
        for c in reversed(coeffs):
            out = (emul(out, m, alg) + c * one) % p
        comps[k] = out
    return ChainMap(X, X, comps)


def _lift_idempotent(e: ChainMap) -> ChainMap:
    p = e.src.alg.p
    for _ in range(64):
        e2 = e.then(e)
        if all(np.array_equal(e2.comp(k), e.comp(k)) for k in e.src.degrees()):
            return e
        e3 = e2.then(e)
        e = ChainMap(e.src, e.tgt, {k: (3 * e2.comp(k) - 2 * e3.comp(k)) % p for k in e.src.degrees()})
    raise DecompositionFailed("idempotent lifting did not converge")


def _end_tops(X: ProjComplex):
    H = hom_space(X, X)
    maps = H.chain_basis()
    tops = np.stack([map_top(f) for f in maps]) if maps else np.zeros((0, 0, 0), np.int64)
    return H, maps, tops


def _top_basis(X: ProjComplex):
    """Chain-map basis of End(X) and an independent set of their tops (a basis of End/rad)."""
    p = X.alg.p
    _, maps, tops = _end_tops(X)
    flat = tops.reshape(tops.shape[0], -1).T % p
    _, piv = la.rref(flat, p)
    return maps, tops, piv


def is_indecomposable_complex(X: ProjComplex) -> bool:
    """For a minimal complex: End/rad is a field."""
    if X.is_zero():
        return False
    return _split_or_certify(X, np.random.default_rng(0)) is None


def _split_or_certify(X: ProjComplex, rng: np.random.Generator) -> ChainMap | None:
    """A nontrivial idempotent of End(X), or None when End(X) is local."""
    p = X.alg.p
    maps, tops, piv = _top_basis(X)
    if len(piv) == 1:
        return None
    k = len(maps)

    def attempt(c):
        top = np.einsum("i,iab->ab", c, tops) % p
        q = idempotent_polynomial(top, p)
        if q is None:
            return None
        phi = ChainMap(X, X, {d: sum(ci * f.comp(d) for ci, f in zip(c, maps)) % p for d in X.degrees()})
        return _lift_idempotent(_eval_poly(q, phi))

    for _ in range(8):
        e = attempt(rng.integers(0, p, size=k))
        if e is not None:
            return e
    if semisimple_field_count(tops[piv], p) == 1:
        return None
    for i in range(k):
        c = np.zeros(k, dtype=np.int64)
        c[i] = 1
        e = attempt(c)
        if e is not None:
            return e
    for _ in range(64):
        e = attempt(rng.integers(0, p, size=k))
        if e is not None:
            return e
    raise DecompositionFailed(f"no splitting idempotent for {X!r}")


def split_idempotent(X: ProjComplex, e: ChainMap) -> ProjComplex:
    """The summand e X, realised with sigma rho = 1 and rho sigma = e degreewise."""
    alg, p = X.alg, X.alg.p
    sig, rho, terms = {}, {}, {}
    for k in X.degrees():
        verts = X.term(k)
        ek = e.comp(k)
        top = top_matrix(ek, verts, verts, alg)
        S, T = [], []
        for v in sorted(set(verts)):
            idx = [i for i, w in enumerate(verts) if w == v]
            blk = top[np.ix_(idx, idx)]
            _, rpiv = la.rref(blk.T, p)
            _, cpiv = la.rref(blk, p)
            S += [idx[i] for i in rpiv]
            T += [idx[j] for j in cpiv]
        q = tuple(verts[i] for i in S)
        terms[k] = q
        if not S:
            sig[k] = ezeros(0, len(verts), alg)
            rho[k] = ezeros(len(verts), 0, alg)
            continue
        s_k = ek[S]
        r_bar = ek[:, T]
        u = emul(s_k, r_bar, alg)
        sig[k] = s_k
        rho[k] = emul(r_bar, einverse(u, q, alg), alg)
    ks = list(X.degrees())
    diffs = [emul(emul(sig[k], X.diff(k), alg), rho[k + 1], alg) for k in ks[:-1]]
    return ProjComplex(alg, X.lo, [terms[k] for k in ks], diffs, check=False)


def _complement(e: ChainMap) -> ChainMap:
    X, p = e.src, e.src.alg.p
    return ChainMap(X, X, {k: (eidentity(X.term(k), X.alg) - e.comp(k)) % p for k in X.degrees()})


def _decompose_raw(X: ProjComplex, rng) -> list[ProjComplex]:
    if X.is_zero():
        return []
    e = _split_or_certify(X, rng)
    if e is None:
        return [sort_terms(X)]
    return (_decompose_raw(split_idempotent(X, e), rng)
            + _decompose_raw(split_idempotent(X, _complement(e)), rng))


def iso_indecomposable_complexes(X: ProjComplex, Y: ProjComplex) -> bool:
    """For minimal indecomposables: some G.F has a top of nonzero trace."""
    if X.lo != Y.lo or X.terms != Y.terms:
        return False
    p = X.alg.p
    F = [map_top(f) for f in hom_space(X, Y).chain_basis()]
    G = [map_top(g) for g in hom_space(Y, X).chain_basis()]
    if not F or not G:
        return False
    tr = np.einsum("iab,jba->ij", np.stack(F), np.stack(G)) % p
    return bool(tr.any())


class ComplexRegistry:
    """Append-only table of minimal indecomposable complexes; IDs in discovery order."""

    def __init__(self, alg: Algebra, seed: int = 0):
        self.alg = alg
        self.items: list[ProjComplex] = []
        self._by_sig: dict[tuple, list[int]] = {}
        self._lock = threading.Lock()
        self.rng = np.random.default_rng(seed)
        self.hom_cache: dict = {}
        self.decomp_cache: dict = {}

    def lookup(self, X: ProjComplex) -> int | None:
        for i in self._by_sig.get((X.lo, X.terms), []):
            if self.items[i] == X or iso_indecomposable_complexes(self.items[i], X):
                return i
        return None

    def get_or_insert(self, X: ProjComplex) -> int:
        with self._lock:
            i = self.lookup(X)
            if i is None:
                self.items.append(X)
                i = len(self.items) - 1
                self._by_sig.setdefault((X.lo, X.terms), []).append(i)
            return i

    def __getitem__(self, i: int) -> ProjComplex:
        return self.items[i]

    def __len__(self):
        return len(self.items)

    def hom_dim(self, i: int, j: int, s: int = 0) -> int:
        """dim Hom_K(X_i, X_j[s]), cached."""
        key = (i, j, s)
        if key not in self.hom_cache:
            self.hom_cache[key] = hom_k_dim(self.items[i], self.items[j], s)
        return self.hom_cache[key]


def complex_registry(alg: Algebra) -> ComplexRegistry:
    reg = alg.registries.get("complexes")
    if reg is None:
        reg = alg.registries.setdefault("complexes", ComplexRegistry(alg, getattr(alg, "seed", 0)))
    return reg


def decompose_complex(X: ProjComplex, registry: ComplexRegistry | None = None) -> dict[int, int]:
    reg = registry or complex_registry(X.alg)
    cache = reg.decomp_cache
    if X.key in cache:
        return dict(cache[X.key])
    out: dict[int, int] = {}
    for Y in _decompose_raw(minimalize(X), reg.rng):
        i = reg.get_or_insert(Y)
        out[i] = out.get(i, 0) + 1
    out = dict(sorted(out.items()))
    cache[X.key] = out
    return dict(out)


def iso_complex(X: ProjComplex, Y: ProjComplex) -> bool:
    """Isomorphism in the homotopy category."""
    return decompose_complex(X) == decompose_complex(Y)


def indec_complex(alg: Algebra, i: int) -> ProjComplex:
    return complex_registry(alg)[i]


def sum_of_ids(alg: Algebra, ids) -> ProjComplex:
    reg = complex_registry(alg)
    return direct_sum(*[reg[i] for i in ids]) if ids else zero_complex(alg)


# ---------------------------------------------------------- approximations


def _rad_maps(U: ProjComplex, V: ProjComplex, same: bool) -> list[ChainMap]:
    """Chain maps spanning rad(U, V) modulo homotopy, for indecomposables U, V."""
    H = hom_space(U, V)
    maps = H.chain_basis()
    if not same:
        return maps
    p = U.alg.p
    tops = np.stack([map_top(f).ravel() for f in maps], axis=1) if maps else np.zeros((0, 0), np.int64)
    ker = la.kernel_basis(tops, p)
    out = []
    for j in range(ker.shape[1]):
        c = ker[:, j]
        out.append(ChainMap(U, V, {k: sum(ci * f.comp(k) for ci, f in zip(c, maps)) % p for k in U.degrees()}))
    return out


@dataclass
class Approximation:
    """A map between X and an object of add U, with its target/source split into summands."""

    map: ChainMap
    obj: ProjComplex  # the add U object
    summand_ids: list[int]  # registry IDs, one per copy, in block order
    blocks: list[ChainMap]  # component maps X -> U_i (left) or U_i -> X (right)


def _stack_left(X: ProjComplex, targets: list[ProjComplex], maps: list[ChainMap]) -> tuple[ProjComplex, ChainMap]:
    """X -> (+) targets with the given components (target summands kept unsorted)."""
    alg = X.alg
    T = _concat(targets, alg)
    comps = {}
    for k in X.degrees():
        if not T.term(k):
            continue
        comps[k] = np.concatenate([m.comp(k) for m in maps], axis=1) if maps else ezeros(len(X.term(k)), 0, alg)
    return T, ChainMap(X, T, comps)


def _stack_right(X: ProjComplex, sources: list[ProjComplex], maps: list[ChainMap]) -> tuple[ProjComplex, ChainMap]:
    alg = X.alg
    S = _concat(sources, alg)
    comps = {}
    for k in S.degrees():
        if not X.term(k):
            continue
        comps[k] = np.concatenate([m.comp(k) for m in maps], axis=0)
    return S, ChainMap(S, X, comps)


def _concat(xs: list[ProjComplex], alg: Algebra) -> ProjComplex:
    """Direct sum without re-sorting, so block positions match the list order."""
    xs = [x for x in xs if not x.is_zero()]
    if not xs:
        return zero_complex(alg)
    lo = min(x.lo for x in xs)
    hi = max(x.hi for x in xs)
    terms = [sum((x.term(k) for x in xs), ()) for k in range(lo, hi + 1)]
    diffs = []
    for k in range(lo, hi):
        d = ezeros(len(terms[k - lo]), len(terms[k - lo + 1]), alg)
        r = c = 0
        for x in xs:
            dx = x.diff(k)
            d[r:r + dx.shape[0], c:c + dx.shape[1]] = dx
            r += dx.shape[0]
            c += dx.shape[1]
        diffs.append(d)
    return ProjComplex(alg, lo, terms, diffs, check=False)


def left_approx(X: ProjComplex, U_ids: list[int]) -> Approximation:
    """Minimal left add U-approximation of X; U given by distinct indecomposable registry IDs."""
    alg = X.alg
    reg = complex_registry(alg)
    U = [reg[i] for i in U_ids]
    homs = [hom_space(X, Ui) for Ui in U]
    targets, maps, ids = [], [], []
    for i, Ui in enumerate(U):
        H = homs[i]
        if not H.dim:
            continue
        # maps X -> U_i that factor through a radical map out of some U_j
        through = []
        for j, Uj in enumerate(U):
            if not homs[j].dim:
                continue
            rad = _rad_maps(Uj, Ui, i == j)
            for h in homs[j].basis():
                for g in rad:
                    through.append(h.then(g))
        base = H.B
        if through:
            base = np.concatenate([H.B, np.stack([H.to_vec(f) for f in through], axis=1)], axis=1)
        keep = la.independent_columns(base, H.reps, alg.p)
        for c in keep:
            targets.append(Ui)
            maps.append(H.to_map(H.reps[:, c]))
            ids.append(U_ids[i])
    T, f = _stack_left(X, targets, maps)
    return Approximation(f, T, ids, maps)


def right_approx(X: ProjComplex, U_ids: list[int]) -> Approximation:
    """Minimal right add U-approximation of X."""
    alg = X.alg
    reg = complex_registry(alg)
    U = [reg[i] for i in U_ids]
    homs = [hom_space(Ui, X) for Ui in U]
    sources, maps, ids = [], [], []
    for i, Ui in enumerate(U):
        H = homs[i]
        if not H.dim:
            continue
        through = []
        for j, Uj in enumerate(U):
            if not homs[j].dim:
                continue
            rad = _rad_maps(Ui, Uj, i == j)
            for h in homs[j].basis():
                for g in rad:
                    through.append(g.then(h))
        base = H.B
        if through:
            base = np.concatenate([H.B, np.stack([H.to_vec(f) for f in through], axis=1)], axis=1)
        keep = la.independent_columns(base, H.reps, alg.p)
        for c in keep:
            sources.append(Ui)
            maps.append(H.to_map(H.reps[:, c]))
            ids.append(U_ids[i])
    S, g = _stack_right(X, sources, maps)
    return Approximation(g, S, ids, maps)


# ------------------------------------------------------ approximation oracles


def _project(T: ProjComplex, pieces: list[ProjComplex], idx: int) -> ChainMap:
    """Projection of a block sum onto its idx-th block."""
    alg = T.alg
    comps = {}
    for k in T.degrees():
        sizes = [len(P.term(k)) for P in pieces]
        start = sum(sizes[:idx])
        m = ezeros(len(T.term(k)), sizes[idx], alg)
        for r in range(sizes[idx]):
            m[start + r, r, alg.idem[pieces[idx].term(k)[r]]] = 1
        if sizes[idx]:
            comps[k] = m
    return ChainMap(T, pieces[idx], comps)


def _inject(T: ProjComplex, pieces: list[ProjComplex], idx: int) -> ChainMap:
    alg = T.alg
    comps = {}
    for k in T.degrees():
        sizes = [len(P.term(k)) for P in pieces]
        start = sum(sizes[:idx])
        m = ezeros(sizes[idx], len(T.term(k)), alg)
        for r in range(sizes[idx]):
            m[r, start + r, alg.idem[pieces[idx].term(k)[r]]] = 1
        if sizes[idx]:
            comps[k] = m
    return ChainMap(pieces[idx], T, comps)


def check_left_factorization(ap: Approximation, X: ProjComplex, U_ids: list[int]) -> bool:
    """Every generator of Hom_K(X, U_i) factors through the approximation."""
    reg = complex_registry(X.alg)
    T = ap.obj
    for i in U_ids:
        Ui = reg[i]
        H = hom_space(X, Ui)
        if not H.dim:
            continue
        through = [ap.map.then(h) for h in hom_space(T, Ui).chain_basis()] if not T.is_zero() else []
        for g in H.basis():
            if not H.in_span_mod_null(through, g):
                return False
    return True


def check_right_factorization(ap: Approximation, X: ProjComplex, U_ids: list[int]) -> bool:
    reg = complex_registry(X.alg)
    S = ap.obj
    for i in U_ids:
        Ui = reg[i]
        H = hom_space(Ui, X)
        if not H.dim:
            continue
        through = [h.then(ap.map) for h in hom_space(Ui, S).chain_basis()] if not S.is_zero() else []
        for g in H.basis():
            if not H.in_span_mod_null(through, g):
                return False
    return True


def _end_radical_maps(T: ProjComplex, ids: list[int]) -> list[ChainMap]:
    """Chain maps spanning rad End_K(T) modulo homotopy, T the block sum of registry IDs ``ids``.

    Between different indecomposables every map is radical; between copies of
    the same one (local endomorphism ring) exactly those with zero top are.
    """
    reg = complex_registry(T.alg)
    pieces = [reg[i] for i in ids]
    out = []
    for a, b in itertools.product(range(len(pieces)), repeat=2):
        for m in _rad_maps(pieces[a], pieces[b], ids[a] == ids[b]):
            out.append(_project(T, pieces, a).then(m).then(_inject(T, pieces, b)))
    return out


def check_left_minimal(ap: Approximation) -> bool:
    """{phi in End_K(T) : f phi ~ 0} lies in rad End_K(T)."""
    T, f = ap.obj, ap.map
    if T.is_zero():
        return True
    p = T.alg.p
    E = hom_space(T, T)
    XT = hom_space(f.src, T)
    maps = E.chain_basis()
    # kernel of phi -> f phi modulo homotopy
    imgs = np.stack([XT.to_vec(f.then(phi)) for phi in maps], axis=1)
    sys = np.concatenate([imgs, XT.B], axis=1)
    ker = la.kernel_basis(sys, p)[: len(maps)]
    rad = _end_radical_maps(T, ap.summand_ids)
    rad_cols = [E.to_vec(r) for r in rad]
    base = np.concatenate([E.B] + [c[:, None] for c in rad_cols], axis=1) if rad_cols else E.B
    for j in range(ker.shape[1]):
        phi_vec = (E.Z @ ker[:, j]) % p
        if not la.in_span(base, phi_vec, p):
            return False
    return True


def check_right_minimal(ap: Approximation) -> bool:
    S, g = ap.obj, ap.map
    if S.is_zero():
        return True
    p = S.alg.p
    E = hom_space(S, S)
    SX = hom_space(S, g.tgt)
    maps = E.chain_basis()
    imgs = np.stack([SX.to_vec(phi.then(g)) for phi in maps], axis=1)
    sys = np.concatenate([imgs, SX.B], axis=1)
    ker = la.kernel_basis(sys, p)[: len(maps)]
    rad = _end_radical_maps(S, ap.summand_ids)
    rad_cols = [E.to_vec(r) for r in rad]
    base = np.concatenate([E.B] + [c[:, None] for c in rad_cols], axis=1) if rad_cols else E.B
    for j in range(ker.shape[1]):
        phi_vec = (E.Z @ ker[:, j]) % p
        if not la.in_span(base, phi_vec, p):
            return False
    return True
