"""Exact scalars and linear algebra over Q and finite-field towers GF(p) < GF(p^k).

Two layers live here.  The generic layer (``Matrix``, ``rref``, ``kernel_basis``,
``solve``) works over any field object and is what the rest of the package
exposes.  The ``*_mod`` functions are a numpy fast path for GF(p); every bulk
computation elsewhere goes through them.  Entries stay below p < 2**16, so
products fit comfortably in int64.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

DEFAULT_PRIME = 7


class Inconsistent(ValueError):
    """Raised by ``solve`` when the right-hand side is not in the image."""


def default_prime() -> int:
    value = os.environ.get("SPECFOLD_PRIME")
    p = int(value) if value else DEFAULT_PRIME
    check_prime(p)
    return p


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def check_prime(p: int) -> None:
    if not (is_prime(p) and p % 2 == 1 and p < 2 ** 16):
        raise ValueError(f"prime must be an odd prime below 2**16, got {p}")


# ---------------------------------------------------------------------------
# fields


class RationalField:
    """The field Q with Fraction entries."""

    characteristic = 0

    def __repr__(self) -> str:
        return "QQ"

    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, x) -> Fraction:
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def is_zero(self, a) -> bool:
        return a == 0

    def random(self, rng: random.Random):
        return Fraction(rng.randint(-9, 9), rng.randint(1, 5))


QQ = RationalField()


class PrimeField:
    """GF(p) with elements stored as ints in [0, p)."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.zero = 0
        self.one = 1

    def __repr__(self) -> str:
        return f"GF({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def __call__(self, x) -> int:
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def random(self, rng: random.Random):
        return rng.randrange(self.p)


def _poly_has_root(coeffs: Sequence[int], p: int) -> bool:
    # coeffs: c0..c_{k-1}, monic of degree len(coeffs)
    for x in range(p):
        v = 1
        for c in reversed(coeffs):
            v = (v * x + c) % p
        if v == 0:
            return True
    return False


def irreducible_poly(p: int, k: int) -> Tuple[int, ...]:
    """Fixed monic irreducible of degree k over GF(p), as (c0, ..., c_{k-1}).

    The choice is the first irreducible in lexicographic order of
    (c0, c1, ...), which makes it a pure function of (p, k).  For k <= 3 a
    polynomial is irreducible iff it has no root.
    """
    if k == 1:
        return (0,)
    if k > 3:
        raise ValueError("only extension degrees 1, 2, 3 are supported")
    for coeffs in product(range(p), repeat=k):
        if not _poly_has_root(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")


class ExtensionField:
    """GF(p^k) as polynomials of degree < k over GF(p).

    Elements are tuples (a0, ..., a_{k-1}) meaning a0 + a1 x + ... in the
    power basis.  The embedding of GF(p) is a -> (a, 0, ..., 0).
    """

    def __init__(self, p: int, k: int):
        self.p = p
        self.k = k
        self.base = PrimeField(p)
        self.modulus = irreducible_poly(p, k)
        self.characteristic = p
        self.zero = (0,) * k
        self.one = (1,) + (0,) * (k - 1)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})"

    def __eq__(self, other) -> bool:
        return isinstance(other, ExtensionField) and (other.p, other.k) == (self.p, self.k)

    def __hash__(self) -> int:
        return hash(("GF", self.p, self.k))

    def __call__(self, x) -> Tuple[int, ...]:
        if isinstance(x, int):
            return self.embed(x)
        x = tuple(int(v) % self.p for v in x)
        if len(x) != self.k:
            raise ValueError("wrong coefficient count")
        return x

    def embed(self, a: int) -> Tuple[int, ...]:
        return (a % self.p,) + (0,) * (self.k - 1)

    def gen(self) -> Tuple[int, ...]:
        if self.k == 1:
            return self.one
        return tuple(1 if i == 1 else 0 for i in range(self.k))

    def power(self, e: int) -> Tuple[int, ...]:
        r = self.one
        for _ in range(e):
            r = self.mul(r, self.gen())
        return r

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        # reduce by x^k = -(c0 + c1 x + ...)
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d] % p
            if c:
                for i, m in enumerate(self.modulus):
                    prod[d - k + i] -= c * m
            prod[d] = 0
        return tuple(v % p for v in prod[:k])

    def pow(self, a, e: int):
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.p ** self.k - 2)

    def frobenius(self, a, t: int = 1):
        """a -> a^(p^t), the generator of Gal(GF(p^k)/GF(p)) applied t times."""
        return self.pow(a, self.p ** (t % self.k)) if self.k > 1 else a

    def is_zero(self, a) -> bool:
        return not any(a)

    def random(self, rng: random.Random):
        return tuple(rng.randrange(self.p) for _ in range(self.k))

    def elements(self) -> Iterable[Tuple[int, ...]]:
        return product(range(self.p), repeat=self.k)

    def mul_matrix(self, a) -> np.ndarray:
        """Matrix of x -> a*x on the power basis (columns = images of x^j)."""
        cols = [self.mul(a, self.power(j)) for j in range(self.k)]
        return np.array(cols, dtype=np.int64).T % self.p


# ---------------------------------------------------------------------------
# generic matrices


@dataclass(frozen=True)
class Matrix:
    field: object
    entries: Tuple[Tuple[object, ...], ...]
    cols: int

    @property
    def rows(self) -> int:
        return len(self.entries)

    @classmethod
    def from_rows(cls, field, rows: Sequence[Sequence], cols: Optional[int] = None) -> "Matrix":
        rows = tuple(tuple(field(x) for x in r) for r in rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        return cls(field, rows, cols)

    @classmethod
    def identity(cls, field, n: int) -> "Matrix":
        return cls.from_rows(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zero(cls, field, r: int, c: int) -> "Matrix":
        return cls.from_rows(field, [[0] * c for _ in range(r)], c)

    def apply(self, v: Sequence) -> List:
        f = self.field
        out = []
        for row in self.entries:
            s = f.zero
            for a, b in zip(row, v):
                s = f.add(s, f.mul(a, b))
            out.append(s)
        return out


def rref(m: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row-echelon form with leftmost pivots, first nonzero row chosen."""
    f = m.field
    rows = [list(r) for r in m.entries]
    pivots: List[int] = []
    r = 0
    for c in range(m.cols):
        pick = next((i for i in range(r, len(rows)) if not f.is_zero(rows[i][c])), None)
        if pick is None:
            continue
        rows[r], rows[pick] = rows[pick], rows[r]
        inv = f.inv(rows[r][c])
        rows[r] = [f.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not f.is_zero(rows[i][c]):
                factor = rows[i][c]
                rows[i] = [f.sub(x, f.mul(factor, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return Matrix(f, tuple(tuple(x) for x in rows), m.cols), pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> List[List]:
    """Basis of the right kernel, one vector per free column.

    Each vector has a 1 in its free column and zeros in the other free
    columns, so the family is in echelon form.
    """
    f = m.field
    r, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [f.zero] * m.cols
        v[fc] = f.one
        for row, pc in zip(r.entries, pivots):
            v[pc] = f.neg(row[fc])
        basis.append(v)
    assert len(pivots) + len(basis) == m.cols
    return basis


def solve(m: Matrix, b: Sequence) -> List:
    """Some x with m x = b; raises Inconsistent when b is not in the image."""
    f = m.field
    if len(b) != m.rows:
        raise ValueError("dimension mismatch")
    aug = Matrix(f, tuple(tuple(row) + (f(bi),) for row, bi in zip(m.entries, b)), m.cols + 1)
    r, pivots = rref(aug)
    if m.cols in pivots:
        raise Inconsistent("right-hand side not in the column space")
    x = [f.zero] * m.cols
    for row, pc in zip(r.entries, pivots):
        x[pc] = row[m.cols]
    return x


# ---------------------------------------------------------------------------
# numpy fast path over GF(p)


def rref_mod(a: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """RREF over GF(p); same pivot rule as ``rref``."""
    a = np.array(a, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pick = r + int(nz[0])
        if pick != r:
            a[[r, pick]] = a[[pick, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank_mod(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(rref_mod(a, p)[1])


def kernel_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Rows form a basis of {x : a @ x = 0}, in the same normal form as ``kernel_basis``."""
    a = np.asarray(a, dtype=np.int64)
    ncols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    r, pivots = rref_mod(a, p)
    free = [c for c in range(ncols) if c not in set(pivots)]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for i, fc in enumerate(free):
        out[i, fc] = 1
        out[i, pivots] = (-r[:, fc]) % p
    return out


def solve_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    aug = np.hstack([a, b])
    r, pivots = rref_mod(aug, p)
    ncols = a.shape[1]
    if ncols in pivots:
        raise Inconsistent("right-hand side not in the column space")
    x = np.zeros(ncols, dtype=np.int64)
    for row, pc in zip(r, pivots):
        x[pc] = row[ncols]
    return x


def row_space_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Echelon basis (RREF rows) of the row space."""
    if len(a) == 0:
        return np.zeros((0, np.asarray(a).shape[1] if np.asarray(a).ndim == 2 else 0), dtype=np.int64)
    return rref_mod(a, p)[0]


class Reducer:
    """Normal forms modulo a subspace of GF(p)^n.

    Built from RREF rows; ``reduce`` subtracts pivot rows so the result is
    supported on non-pivot coordinates.  The non-pivot coordinates index a
    canonical complement basis of the quotient.
    """

    def __init__(self, rows: np.ndarray, n: int, p: int):
        self.p = p
        self.n = n
        if len(rows):
            self.rows, self.pivots = rref_mod(rows, p)
        else:
            self.rows, self.pivots = np.zeros((0, n), dtype=np.int64), []
        pivset = set(self.pivots)
        self.free = [c for c in range(n) if c not in pivset]

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.p
        if v.ndim == 1:
            coeffs = v[self.pivots]
            if len(self.pivots):
                v = (v - coeffs @ self.rows) % self.p
            return v
        coeffs = v[:, self.pivots]
        if len(self.pivots):
            v = (v - coeffs @ self.rows) % self.p
        return v

    def quotient_coords(self, v: np.ndarray) -> np.ndarray:
        return self.reduce(v)[..., self.free]
