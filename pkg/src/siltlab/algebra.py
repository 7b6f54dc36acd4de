"""Basic finite-dimensional algebras over F_p.

Two ways in:

* :func:`build_from_quiver` -- a bound quiver ``kQ/I``, basis of residue paths;
* :func:`build_from_structure_constants` -- a multiplication table together
  with a complete set of primitive orthogonal idempotents.

Both produce an :class:`Algebra` whose basis consists of the vertex
idempotents followed by *monomials* in a set of arrows (a lift of a basis of
rad/rad^2).  Every downstream computation only ever sees this uniform shape.

Conventions
-----------
``mult[x, y]`` holds the coordinates of the product ``x . y``, where ``y`` acts
first (left modules, so ``(x . y) m = x (y m)``).  A path written ``a*b``
means "first a, then b"; as an algebra element it is ``b . a``.  A basis
element ``b`` with ``src[b] = i`` and ``tgt[b] = j`` satisfies
``e_j . b . e_i = b``; it acts on representations from vertex ``i`` to vertex
``j``.  ``Hom_A(P_i, P_j)`` is ``e_i A e_j`` acting by right multiplication.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import linalg as la
from .errors import (
    IdempotentNotPrimitive,
    InadmissibleRelation,
    NotAssociative,
    NotFiniteDimensional,
    ParseError,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...]  # (label, source, target)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex labels must be unique")
        labels = [a[0] for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise ValueError("arrow labels must be unique")
        for lab, s, t in self.arrows:
            if s not in self.vertices or t not in self.vertices:
                raise ValueError(f"arrow {lab} references an unknown vertex")

    def vertex_index(self, label: str) -> int:
        return self.vertices.index(label)


# A relation is a dict mapping arrow-label words (application order) to coefficients.
Relation = dict


_TERM_RE = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*([A-Za-z_][\w']*(?:\s*\*\s*[A-Za-z_][\w']*)*)?\s*")


def parse_relation(text: str, quiver: Quiver) -> Relation:
    """Parse ``"2 a*b - c*d"`` into ``{("a","b"): 2, ("c","d"): -1}``."""
    labels = {a[0] for a in quiver.arrows}
    rel: dict[tuple[str, ...], int] = {}
    pos = 0
    text = text.strip()
    if not text:
        raise ParseError("empty relation")
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"cannot parse relation {text!r} at offset {pos}")
        sign, coeff, path = m.groups()
        if sign is None and not first:
            raise ParseError(f"missing + or - between terms in {text!r}")
        if path is None:
            raise ParseError(f"term without a path in relation {text!r}")
        word = tuple(w.strip() for w in path.split("*"))
        for w in word:
            if w not in labels:
                raise ParseError(f"unknown arrow {w!r} in relation {text!r}")
        c = int(coeff) if coeff else 1
        if sign == "-":
            c = -c
        rel[word] = rel.get(word, 0) + c
        pos = m.end()
        first = False
    return rel


class Algebra:
    """A basic algebra with a monomial basis adapted to its vertex idempotents.

    Instances are immutable after construction.  Shared mutable state (the
    indecomposable registries) hangs off :attr:`registries` and is managed by
    the modules and complexes layers.
    """

    def __init__(self, p: int, vertices, arrows, words, src, tgt, mult,
                 presentation: str, embedding: np.ndarray | None = None,
                 relations_text: tuple[str, ...] = ()):
        self.field = la.FieldSpec(p)
        self.p = p
        self.vertices = tuple(vertices)
        self.arrows = tuple(arrows)  # (label, src index, tgt index)
        self.words = tuple(tuple(w) for w in words)
        self.src = np.asarray(src, dtype=np.int64)
        self.tgt = np.asarray(tgt, dtype=np.int64)
        self.mult = np.asarray(mult, dtype=np.int64) % p
        self.mult.setflags(write=False)
        self.presentation = presentation
        self.embedding = embedding
        self.relations_text = tuple(relations_text)
        self.registries: dict = {}
        self.seed = 0  # seeds the random idempotent search in the registries
        n = len(self.vertices)
        self.idem = [next(b for b in range(self.dim) if not self.words[b] and self.src[b] == v)
                     for v in range(n)]
        self.arrow_basis = [self.words.index((k,)) for k in range(len(self.arrows))]

    # ----------------------------------------------------------------- basics
    @property
    def dim(self) -> int:
        return len(self.words)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def label(self, b: int) -> str:
        w = self.words[b]
        if not w:
            return f"e_{self.vertices[self.src[b]]}"
        return "*".join(self.arrows[k][0] for k in w)

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.label(b) for b in range(self.dim))

    @cached_property
    def radical_basis(self) -> tuple[int, ...]:
        return tuple(b for b in range(self.dim) if self.words[b])

    def hom_basis(self, i: int, j: int) -> np.ndarray:
        """Basis indices of e_i A e_j = Hom_A(P_i, P_j)."""
        return self._block[i][j]

    @cached_property
    def _block(self):
        return [[np.flatnonzero((self.tgt == i) & (self.src == j)) for j in range(self.n)]
                for i in range(self.n)]

    def unit(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[self.idem] = 1
        return v

    def basis_vector(self, b: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[b] = 1
        return v

    def product(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("a,b,abc->c", x, y, self.mult) % self.p

    def left_mult_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of y -> x . y in basis coordinates."""
        return np.einsum("a,abc->cb", x, self.mult) % self.p

    def right_mult_matrix(self, y: np.ndarray) -> np.ndarray:
        """Matrix of x -> x . y in basis coordinates."""
        return np.einsum("b,abc->ca", y, self.mult) % self.p

    def unit_inverse(self, u: np.ndarray, v: int) -> np.ndarray:
        """Inverse of a unit of the local ring e_v A e_v."""
        blk = self.hom_basis(v, v)
        m = self.left_mult_matrix(u)[np.ix_(blk, blk)]
        rhs = np.zeros(len(blk), dtype=np.int64)
        rhs[list(blk).index(self.idem[v])] = 1
        x = la.solve(m, rhs, self.p)
        if x is None:
            raise ZeroDivisionError("element is not a unit of e_v A e_v")
        out = np.zeros(self.dim, dtype=np.int64)
        out[blk] = x
        return out

    # --------------------------------------------------------------- elements
    def element_terms(self, x: np.ndarray) -> list[list]:
        """Serialise an element as ``[[coeff, path-string], ...]``."""
        return [[int(x[b]), self.labels[b]] for b in np.flatnonzero(np.asarray(x) % self.p)]

    def element_from_terms(self, terms) -> np.ndarray:
        idx = {lab: b for b, lab in enumerate(self.labels)}
        v = np.zeros(self.dim, dtype=np.int64)
        for c, lab in terms:
            if lab not in idx:
                raise ParseError(f"unknown basis element {lab!r}")
            v[idx[lab]] += c
        return v % self.p

    # ------------------------------------------------------------ diagnostics
    def radical_power_dims(self) -> list[int]:
        """dim rad^k for k = 1, 2, ... until it vanishes."""
        p = self.p
        rad = np.eye(self.dim, dtype=np.int64)[:, list(self.radical_basis)]
        dims = []
        cur = rad
        while cur.shape[1]:
            dims.append(cur.shape[1])
            prods = np.einsum("ax,by,abc->cxy", cur, rad, self.mult).reshape(self.dim, -1) % p
            cur = la.column_space(prods, p) if prods.size else prods
        return dims

    def loewy_length(self) -> int:
        return len(self.radical_power_dims()) + 1

    def gabriel_quiver(self) -> tuple[int, int]:
        """(vertex count, arrow count) read off from rad/rad^2."""
        dims = self.radical_power_dims()
        rad = dims[0] if dims else 0
        rad2 = dims[1] if len(dims) > 1 else 0
        return self.n, rad - rad2

    def __repr__(self):
        return f"Algebra(dim={self.dim}, vertices={self.n}, presentation={self.presentation!r})"


# ---------------------------------------------------------------- quivers


def _paths_up_to(quiver: Quiver, length: int):
    """All paths as (src, tgt, word) with len(word) <= length, word in application order."""
    n = len(quiver.vertices)
    arrows = [(k, quiver.vertex_index(s), quiver.vertex_index(t)) for k, (_, s, t) in enumerate(quiver.arrows)]
    out = [(v, v, ()) for v in range(n)]
    layer = [(v, v, ()) for v in range(n)]
    for _ in range(length):
        nxt = []
        for s, t, w in layer:
            for k, a_s, a_t in arrows:
                if a_s == t:
                    nxt.append((s, a_t, w + (k,)))
        out.extend(nxt)
        layer = nxt
        if not layer:
            break
    return out


def build_from_quiver(quiver: Quiver, relations, max_len: int = 32, p: int = la.DEFAULT_PRIME) -> Algebra:
    """kQ/I with a residue-path basis.

    ``relations`` are strings (parsed by :func:`parse_relation`) or already
    parsed dicts.  The ideal is closed degree by degree inside kQ/J^(L+1),
    increasing the truncation L until no basis path survives in the top two
    degrees.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    la.FieldSpec(p)  # validates the modulus
    rels_text = tuple(r for r in relations if isinstance(r, str))
    rels = [parse_relation(r, quiver) if isinstance(r, str) else r for r in relations]
    lab_idx = {a[0]: k for k, a in enumerate(quiver.arrows)}
    parsed = []
    for rel in rels:
        terms = {}
        ends = set()
        for word, c in rel.items():
            if len(word) < 2:
                raise InadmissibleRelation(f"relation term {'*'.join(word) or '1'} has length < 2")
            w = tuple(lab_idx[x] for x in word)
            for a, b in zip(w, w[1:]):
                if quiver.arrows[a][2] != quiver.arrows[b][1]:
                    raise InadmissibleRelation(f"{'*'.join(word)} is not a path")
            s = quiver.vertex_index(quiver.arrows[w[0]][1])
            t = quiver.vertex_index(quiver.arrows[w[-1]][2])
            ends.add((s, t))
            terms[w] = (terms.get(w, 0) + c) % p
        if len(ends) > 1:
            raise InadmissibleRelation("relation terms are not parallel")
        terms = {w: c for w, c in terms.items() if c}
        if terms:
            (s, t), = ends
            parsed.append((s, t, terms))

    for L in range(2, max_len + 1):
        paths = _paths_up_to(quiver, L)
        order = sorted(range(len(paths)), key=lambda i: (-len(paths[i][2]), paths[i][2], paths[i][0]))
        col = {paths[i]: c for c, i in enumerate(order)}
        cols = [paths[i] for i in order]
        gens = []
        for s, t, terms in parsed:
            pre = [q for q in paths if q[1] == s]
            post = [q for q in paths if q[0] == t]
            rlen = min(len(w) for w in terms)
            for u in pre:
                for v in post:
                    if len(u[2]) + rlen + len(v[2]) > L:
                        continue
                    row = np.zeros(len(cols), dtype=np.int64)
                    for w, c in terms.items():
                        full = u[2] + w + v[2]
                        if len(full) <= L:
                            row[col[(u[0], v[1], full)]] += c
                    gens.append(row % p)
        if gens:
            red, pivots = la.rref(np.array(gens), p)
            red = red[: len(pivots)]
        else:
            red, pivots = np.zeros((0, len(cols)), dtype=np.int64), []
        pivset = set(pivots)
        free = [c for c in range(len(cols)) if c not in pivset]
        # stable once J^(L-1) lies in I + J^(L+1): every long path is itself a row
        row_of = {pc: i for i, pc in enumerate(pivots)}
        long_paths = [c for c in range(len(cols)) if len(cols[c][2]) >= L - 1]
        if all(c in row_of and np.count_nonzero(red[row_of[c]]) == 1 for c in long_paths):
            break
    else:
        raise NotFiniteDimensional(f"dimension did not stabilise within path length {max_len}")

    basis_cols = sorted(free, key=lambda c: (len(cols[c][2]), cols[c][2], cols[c][0]))
    # idempotents first, vertex order
    basis_cols.sort(key=lambda c: (len(cols[c][2]) > 0, len(cols[c][2]), cols[c][0] if not cols[c][2] else 0, cols[c][2]))
    pos = {c: k for k, c in enumerate(basis_cols)}
    d = len(basis_cols)
    free_pos = np.array([pos[c] for c in free], dtype=np.int64)
    nf_rows = {pc: i for i, pc in enumerate(pivots)}

    def normal_form(path) -> np.ndarray:
        v = np.zeros(d, dtype=np.int64)
        if len(path[2]) > L:
            return v
        c = col[path]
        if c in pos:
            v[pos[c]] = 1
        else:
            v[free_pos] = (-red[nf_rows[c], free]) % p
        return v

    basis = [cols[c] for c in basis_cols]
    mult = np.zeros((d, d, d), dtype=np.int64)
    for x, (xs, xt, xw) in enumerate(basis):
        for y, (ys, yt, yw) in enumerate(basis):
            if yt == xs:
                mult[x, y] = normal_form((ys, xt, yw + xw))
    arrows = [(lab, quiver.vertex_index(s), quiver.vertex_index(t)) for lab, s, t in quiver.arrows]
    return Algebra(p, quiver.vertices, arrows, [b[2] for b in basis],
                   [b[0] for b in basis], [b[1] for b in basis], mult,
                   presentation="quiver", relations_text=rels_text)


# ------------------------------------------------------ structure constants


def _check_associative(mult: np.ndarray, p: int):
    d = mult.shape[0]
    for x in range(d):
        lhs = np.einsum("ya,azb->yzb", mult[x], mult) % p  # (x.y).z
        rhs = np.einsum("yza,ab->yzb", mult, mult[x]) % p  # x.(y.z)
        if not np.array_equal(lhs, rhs):
            raise NotAssociative(f"associativity fails for basis element {x}")


def build_from_structure_constants(mult, idempotents, p: int = la.DEFAULT_PRIME,
                                   vertex_labels=None, arrow_prefix: str = "x") -> Algebra:
    """An algebra from its multiplication table.

    ``mult[x, y]`` are the coordinates of ``x . y``; ``idempotents`` is a list
    of coordinate vectors (or basis indices) of primitive orthogonal
    idempotents summing to 1.  The result is re-based onto idempotents plus
    monomials in a lift of rad/rad^2; :attr:`Algebra.embedding` maps new
    coordinates back to the caller's.
    """
    la.FieldSpec(p)  # validates the modulus
    mult = np.asarray(mult, dtype=np.int64) % p
    d = mult.shape[0]
    if mult.shape != (d, d, d):
        raise ValueError("multiplication table must have shape (d, d, d)")
    if d >= p:
        raise ValueError(f"prime {p} must exceed the algebra dimension {d}")
    idems = []
    for e in idempotents:
        if np.isscalar(e) or np.ndim(e) == 0:
            v = np.zeros(d, dtype=np.int64)
            v[int(e)] = 1
            idems.append(v)
        else:
            idems.append(np.asarray(e, dtype=np.int64) % p)
    n = len(idems)
    _check_associative(mult, p)

    def prod(x, y):
        return np.einsum("a,b,abc->c", x, y, mult) % p

    one = sum(idems) % p
    for j in range(d):
        bj = np.zeros(d, dtype=np.int64)
        bj[j] = 1
        if not (np.array_equal(prod(one, bj), bj) and np.array_equal(prod(bj, one), bj)):
            raise IdempotentNotPrimitive("idempotents do not sum to the identity")
    for i, j in itertools.product(range(n), repeat=2):
        want = idems[i] if i == j else np.zeros(d, dtype=np.int64)
        if not np.array_equal(prod(idems[i], idems[j]), want):
            raise IdempotentNotPrimitive("idempotents are not orthogonal")

    # radical: kernel of the trace form of the left regular representation
    tr = np.einsum("zjj->z", mult) % p
    gram = np.einsum("xyz,z->xy", mult, tr) % p
    rad = la.kernel_basis(gram, p)  # columns

    eye = np.eye(d, dtype=np.int64)

    def block_proj(t, s):
        # x -> e_t . x . e_s
        lt = np.einsum("a,abc->cb", idems[t], mult) % p
        rs = np.einsum("b,abc->ca", idems[s], mult) % p
        return la.matmul(lt, rs, p)

    blocks = {}
    for t in range(n):
        for s in range(n):
            pr = block_proj(t, s)
            full = la.column_space(pr, p)
            rb = la.column_space(la.matmul(pr, rad, p), p) if rad.shape[1] else np.zeros((d, 0), np.int64)
            blocks[t, s] = (pr, full, rb)
            if t == s and full.shape[1] - rb.shape[1] != 1:
                raise IdempotentNotPrimitive(f"corner algebra at idempotent {t} is not local")
            if t != s and full.shape[1] != rb.shape[1]:
                raise IdempotentNotPrimitive("algebra is not basic: distinct idempotents are isomorphic")

    if rad.shape[1]:
        r2 = np.einsum("ax,by,abc->cxy", rad, rad, mult).reshape(d, -1) % p
        rad2 = la.column_space(r2, p)
    else:
        rad2 = np.zeros((d, 0), dtype=np.int64)

    arrows = []  # (vector, src, tgt)
    for (t, s), (pr, full, rb) in sorted(blocks.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if not rb.shape[1]:
            continue
        r2b = la.column_space(la.matmul(pr, rad2, p), p) if rad2.shape[1] else np.zeros((d, 0), np.int64)
        for c in la.independent_columns(r2b, rb, p):
            arrows.append((rb[:, c], s, t))

    # monomial basis of the radical, breadth first in word length
    mono = [((k,), vec, s, t) for k, (vec, s, t) in enumerate(arrows)]
    span = np.stack([m[1] for m in mono], axis=1) if mono else np.zeros((d, 0), np.int64)
    layer = list(mono)
    while layer and span.shape[1] < rad.shape[1]:
        nxt = []
        for w, vec, s, t in layer:
            for k, (avec, a_s, a_t) in enumerate(arrows):
                if a_s != t:
                    continue
                val = prod(avec, vec)
                if not np.any(val):
                    continue
                if la.in_span(span, val, p):
                    continue
                span = np.concatenate([span, val[:, None]], axis=1)
                nxt.append((w + (k,), val, s, a_t))
        mono.extend(nxt)
        layer = nxt
    if span.shape[1] != rad.shape[1]:
        raise NotAssociative("radical is not generated by rad/rad^2 lifts (inconsistent table)")

    cols = list(idems) + [m[1] for m in mono]
    q = np.stack(cols, axis=1) % p
    qinv = la.inverse(q, p)
    prods = np.einsum("ax,by,abc->xyc", q, q, mult) % p
    new_mult = np.einsum("xyc,kc->xyk", prods, qinv) % p
    words = [()] * n + [m[0] for m in mono]
    src = list(range(n)) + [m[2] for m in mono]
    tgt = list(range(n)) + [m[3] for m in mono]
    labels = vertex_labels or [str(i + 1) for i in range(n)]
    arrow_defs = [(f"{arrow_prefix}{k}", s, t) for k, (_, s, t) in enumerate(arrows)]
    return Algebra(p, labels, arrow_defs, words, src, tgt, new_mult,
                   presentation="structure-constants", embedding=q)


# ------------------------------------------------------------ file format


def _key_position(text: str, key: str) -> tuple[int, int]:
    for i, line in enumerate(text.splitlines(), start=1):
        m = re.match(rf"\s*{re.escape(key)}\s*=", line)
        if m:
            return i, line.index(key) + 1
    return 1, 1


@dataclass(frozen=True)
class AlgebraSpec:
    quiver: Quiver
    relations: tuple[str, ...]
    prime: int
    max_path_len: int
    name: str = ""


def parse_algebra_text(text: str, name: str = "") -> AlgebraSpec:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+), column (\d+)", str(exc))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise ParseError(f"malformed algebra file: {exc}", line, col) from None

    def fail(key, msg):
        raise ParseError(msg, *_key_position(text, key))

    verts = data.get("vertices")
    if not isinstance(verts, list) or not verts:
        fail("vertices", "vertices must be a non-empty list")
    verts = [str(v) for v in verts]
    arrows = data.get("arrows", [])
    if not isinstance(arrows, list) or any(not isinstance(a, list) or len(a) != 3 for a in arrows):
        fail("arrows", "arrows must be a list of [label, source, target] triples")
    try:
        quiver = Quiver(tuple(verts), tuple((str(a), str(s), str(t)) for a, s, t in arrows))
    except ValueError as exc:
        fail("arrows", str(exc))
    rels = data.get("relations", [])
    if not isinstance(rels, list) or any(not isinstance(r, str) for r in rels):
        fail("relations", "relations must be a list of strings")
    for r in rels:
        try:
            parse_relation(r, quiver)
        except ParseError as exc:
            fail("relations", str(exc))
    prime = data.get("prime", la.DEFAULT_PRIME)
    if not isinstance(prime, int):
        fail("prime", "prime must be an integer")
    mpl = data.get("max_path_len", 32)
    if not isinstance(mpl, int) or mpl < 1:
        fail("max_path_len", "max_path_len must be a positive integer")
    return AlgebraSpec(quiver, tuple(rels), prime, mpl, name or str(data.get("name", "")))


def load_algebra(path, prime: int | None = None) -> Algebra:
    """Read an algebra definition file; ``prime`` overrides the file's value."""
    path = Path(path)
    spec = parse_algebra_text(path.read_text(), name=path.stem)
    alg = build_from_quiver(spec.quiver, spec.relations, spec.max_path_len,
                            p=prime if prime is not None else spec.prime)
    alg.name = spec.name
    return alg


CORPUS_DIR = Path(__file__).parent / "corpus"


def corpus_names() -> list[str]:
    return sorted(p.stem for p in CORPUS_DIR.glob("*.toml"))


def corpus_algebra(name: str, prime: int | None = None) -> Algebra:
    return load_algebra(CORPUS_DIR / f"{name}.toml", prime=prime)
