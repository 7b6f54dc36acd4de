"""Dense exact linear algebra over a prime field F_p.

Matrices are plain ``numpy`` int64 arrays whose entries are kept in
``[0, p)``.  Small matrices are row reduced in numpy; large ones are handed
to FLINT's ``nmod_mat``, which is much faster and gives identical reduced
row echelon forms (the RREF is unique, so the backend never shows).
"""

from __future__ import annotations

from dataclasses import dataclass

import flint
import numpy as np

DEFAULT_PRIME = 32003
MAX_PRIME = 1 << 24

# above this many entries the FLINT backend wins despite conversion costs
_FLINT_CUTOFF = 6000


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The ground field F_p."""

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        if self.p >= MAX_PRIME:
            raise ValueError(f"modulus {self.p} too large (must be < 2^24)")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)


def as_matrix(m, p: int) -> np.ndarray:
    a = np.array(m, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
    return a % p


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] == 0 or b.shape[0] == 0:
        return zeros(a.shape[0], b.shape[1])
    return (a @ b) % p


def _rref_numpy(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = a.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def _rref_flint(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    rows, cols = a.shape
    m = flint.nmod_mat(rows, cols, a.ravel().tolist(), p)
    r, rk = m.rref()
    out = np.array([int(x) for x in r.entries()], dtype=np.int64).reshape(rows, cols)
    pivots = [int(np.flatnonzero(out[i])[0]) for i in range(rk)]
    return out, pivots


def rref(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = np.asarray(m, dtype=np.int64) % p
    if a.size == 0:
        return a.reshape(a.shape), []
    if a.size > _FLINT_CUTOFF:
        return _rref_flint(a, p)
    return _rref_numpy(a, p)


def rank(m: np.ndarray, p: int) -> int:
    return len(rref(m, p)[1])


def kernel_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right null space of ``m`` (shape cols x nullity)."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return identity(cols)
    r, pivots = rref(m, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = zeros(cols, len(free))
    for j, f in enumerate(free):
        basis[f, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-r[i, f]) % p
    return basis


def solve(m: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some x with m @ x = b, or None when the system is inconsistent.

    ``b`` may be a vector or a matrix of right-hand sides; with several
    columns the system must be consistent for all of them.
    """
    m = np.asarray(m, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    vec = b.ndim == 1
    rhs = b.reshape(-1, 1) if vec else b
    rows, cols = m.shape
    if rows == 0:
        x = zeros(cols, rhs.shape[1])
        return x[:, 0] if vec else x
    aug = np.concatenate([m % p, rhs % p], axis=1)
    r, pivots = rref(aug, p)
    if pivots and pivots[-1] >= cols:
        return None
    x = zeros(cols, rhs.shape[1])
    for i, pc in enumerate(pivots):
        x[pc] = r[i, cols:]
    return x[:, 0] if vec else x


def inverse(m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    x = solve(m, identity(n), p)
    if x is None:
        raise ZeroDivisionError("matrix is singular")
    return x


def column_space(m: np.ndarray, p: int) -> np.ndarray:
    """A basis (as columns) of the column space, chosen among m's columns."""
    _, pivots = rref(m, p)
    return np.asarray(m, dtype=np.int64)[:, pivots] % p


def independent_columns(base: np.ndarray, cand: np.ndarray, p: int) -> list[int]:
    """Indices of columns of ``cand`` forming a basis of span(base, cand) mod span(base).

    Greedy in column order, so the choice is deterministic.
    """
    k = base.shape[1]
    if cand.shape[1] == 0:
        return []
    _, pivots = rref(np.concatenate([base, cand], axis=1), p)
    return [c - k for c in pivots if c >= k]


def in_span(base: np.ndarray, v: np.ndarray, p: int) -> bool:
    return solve(base, v, p) is not None if base.shape[1] else not np.any(np.asarray(v) % p)


def charpoly_factors(m: np.ndarray, p: int) -> list[tuple[list[int], int]]:
    """Irreducible factorisation of the characteristic polynomial of ``m``.

    Each factor is returned as (coefficients low-to-high, multiplicity).
    """
    n = m.shape[0]
    fm = flint.nmod_mat(n, n, (np.asarray(m) % p).ravel().tolist(), p)
    _, facs = fm.charpoly().factor()
    return [([int(c) for c in f.coeffs()], e) for f, e in facs]


def poly_eval(coeffs: list[int], m: np.ndarray, p: int) -> np.ndarray:
    """Evaluate a polynomial at a square matrix (Horner)."""
    n = m.shape[0]
    out = zeros(n, n)
    for c in reversed(coeffs):
        out = matmul(out, m, p)
        out[np.diag_indices(n)] += c
        out %= p
    return out


def matpow(m: np.ndarray, e: int, p: int) -> np.ndarray:
    out = identity(m.shape[0])
    base = m % p
    while e:
        if e & 1:
            out = matmul(out, base, p)
        base = matmul(base, base, p)
        e >>= 1
    return out
