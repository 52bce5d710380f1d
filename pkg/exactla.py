"""
Exact linear algebra over a prime field
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from sympy import isprime

from errors import NoSolution, SingularMatrix

logger = logging.getLogger(__name__)

DEFAULT_PRIME = 32003
# Products are accumulated in int64: n * (p - 1)**2 stays below 2**63 for
# contractions of up to 2**17 terms when p <= MAX_PRIME.
MAX_PRIME = 2**23


# Row-vector convention: vectors are rows, a map acts as v -> v @ M.
Mat = np.ndarray


@dataclass(frozen=True)
class Field:
    """The prime field F_p"""

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"field modulus must be prime, got {self.p}")
        if self.p > MAX_PRIME:
            raise ValueError(f"field modulus {self.p} exceeds {MAX_PRIME}; int64 products would overflow")

    def mat(self, rows, cols: int = None) -> Mat:
        """Coerce nested lists (or an array) to a reduced int64 matrix"""
        a = np.asarray(rows, dtype=np.int64)
        if a.ndim == 1 and a.size == 0:
            a = a.reshape(0, cols or 0)
        return a % self.p

    def zeros(self, rows: int, cols: int) -> Mat:
        return np.zeros((rows, cols), dtype=np.int64)

    def eye(self, n: int) -> Mat:
        return np.eye(n, dtype=np.int64)

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in F_p")
        return pow(a, self.p - 2, self.p)


def mul(a: Mat, b: Mat, p: int) -> Mat:
    """Matrix product mod p"""
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def mul_chain(mats: Sequence[Mat], p: int) -> Mat:
    out = mats[0] % p
    for m in mats[1:]:
        out = mul(out, m, p)
    return out


def rref(m: Mat, p: int) -> Tuple[Mat, List[int]]:
    """Reduced row echelon form and pivot columns; the row space is preserved."""
    a = np.array(m, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError(f"rref expects a 2-d matrix, got shape {a.shape}")
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * pow(int(a[r, c]), p - 2, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Mat, p: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def row_basis(m: Mat, p: int) -> Mat:
    """Canonical basis (nonzero rref rows) of the row space"""
    m = np.asarray(m, dtype=np.int64)
    if m.shape[0] == 0:
        return m.reshape(0, m.shape[1] if m.ndim == 2 else 0)
    r, piv = rref(m, p)
    return r[: len(piv)]


def kernel_basis(m: Mat, p: int) -> Mat:
    """Rows form a basis of the left kernel {v : v @ m = 0}."""
    m = np.asarray(m, dtype=np.int64)
    rows, cols = m.shape
    if rows == 0:
        return np.zeros((0, 0), dtype=np.int64)
    aug = np.hstack([m % p, np.eye(rows, dtype=np.int64)])
    r, piv = rref(aug, p)
    rk = sum(1 for c in piv if c < cols)
    return r[rk:, cols:]


def solve(a: Mat, b: Mat, p: int) -> Mat:
    """A particular x with x @ a == b (row by row); raises NoSolution otherwise."""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    k, cols = a.shape
    if b.ndim == 1:
        b = b.reshape(1, -1)
    if b.shape[1] != cols:
        raise ValueError(f"solve: column mismatch {a.shape} vs {b.shape}")
    if k == 0:
        if np.any(b):
            raise NoSolution("nonzero right-hand side against an empty system")
        return np.zeros((b.shape[0], 0), dtype=np.int64)
    aug = np.hstack([a, np.eye(k, dtype=np.int64)])
    r, piv = rref(aug, p)
    piv = [c for c in piv if c < cols]
    rk = len(piv)
    coeffs = b[:, piv]
    residual = (b - coeffs @ r[:rk, :cols]) % p
    if np.any(residual):
        raise NoSolution(f"{int(np.count_nonzero(np.any(residual, axis=1)))} row(s) outside the row space")
    return (coeffs @ r[:rk, cols:]) % p


def inverse(a: Mat, p: int) -> Mat:
    a = np.asarray(a, dtype=np.int64) % p
    n = a.shape[0]
    if a.shape != (n, n):
        raise SingularMatrix(f"non-square matrix of shape {a.shape}")
    if n == 0:
        return a.copy()
    r, piv = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if len([c for c in piv if c < n]) < n:
        raise SingularMatrix(f"rank deficient {n}x{n} matrix")
    return r[:, n:]


def is_invertible(a: Mat, p: int) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and rank(a, p) == a.shape[0]


def block_diag(mats: Sequence[Mat]) -> Mat:
    """Direct sum of matrices"""
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for m in mats:
        out[r : r + m.shape[0], c : c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def kron(a: Mat, b: Mat, p: int) -> Mat:
    return np.kron(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) % p


def hstack(mats: Sequence[Mat]) -> Mat:
    return np.hstack([np.asarray(m, dtype=np.int64) for m in mats])


def vstack(mats: Sequence[Mat]) -> Mat:
    return np.vstack([np.asarray(m, dtype=np.int64) for m in mats])


def intersection(u: Mat, w: Mat, p: int) -> Mat:
    """Basis of the intersection of two row spaces"""
    u = np.asarray(u, dtype=np.int64)
    w = np.asarray(w, dtype=np.int64)
    if u.shape[0] == 0 or w.shape[0] == 0:
        return np.zeros((0, u.shape[1]), dtype=np.int64)
    k = kernel_basis(vstack([u, (-w) % p]), p)
    return row_basis(mul(k[:, : u.shape[0]], u, p), p)


def complement_basis(sub: Mat, n: int, p: int) -> Mat:
    """Unit vectors on the non-pivot columns: a complement of the row space of sub in F_p^n"""
    sub = np.asarray(sub, dtype=np.int64).reshape(-1, n)
    piv = set(rref(sub, p)[1]) if sub.shape[0] else set()
    free = [j for j in range(n) if j not in piv]
    return np.eye(n, dtype=np.int64)[free]


def in_row_space(v: Mat, u: Mat, p: int) -> bool:
    v = np.asarray(v, dtype=np.int64).reshape(-1, np.asarray(u).shape[1])
    try:
        solve(u, v, p)
        return True
    except NoSolution:
        return False


def poly_eval(coeffs: Sequence[int], a: Mat, p: int) -> Mat:
    """Evaluate sum coeffs[k] * a^k (coefficients low degree first)"""
    n = a.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for c in reversed(list(coeffs)):
        out = (mul(out, a, p) + int(c) * np.eye(n, dtype=np.int64)) % p
    return out


def matrix_power(a: Mat, k: int, p: int) -> Mat:
    out = np.eye(a.shape[0], dtype=np.int64)
    base = a % p
    while k:
        if k & 1:
            out = mul(out, base, p)
        base = mul(base, base, p)
        k >>= 1
    return out


def minimal_polynomial(a: Mat, p: int) -> List[int]:
    """Monic minimal polynomial of a square matrix, coefficients low degree first"""
    n = a.shape[0]
    if n == 0:
        return [1]
    powers = [np.eye(n, dtype=np.int64).reshape(-1)]
    current = np.eye(n, dtype=np.int64)
    for deg in range(1, n + 1):
        current = mul(current, a, p)
        target = current.reshape(1, -1)
        basis = np.vstack(powers)
        try:
            x = solve(basis, target, p)[0]
        except NoSolution:
            powers.append(current.reshape(-1))
            continue
        return [int((-c) % p) for c in x] + [1]
    raise AssertionError("Cayley-Hamilton bound exceeded")
