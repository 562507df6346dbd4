"""
Exact linear algebra over the rationals.

Matrices are stored as an integer numerator array over one positive common
denominator.  Row reduction is done by multimodular elimination: the
reduced row echelon form is computed modulo several word-size primes, lifted
by Chinese remaindering and rational reconstruction, and then certified by
an exact identity check.  Nothing here uses floating point.

The certificate is the identity ``A == A[:, pivots] @ R``.  It shows that the
row space of ``A`` lies inside the row space of ``R``; since the rank over Q
can only exceed the rank modulo a prime, both row spaces have the same
dimension and ``R`` is the (unique) reduced echelon form of ``A``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import VerificationError

_INT64_SAFE = 2**62
_ELIM_PRIME_START = 2**31 - 1
_CHECK_PRIME_START = 2**20


def _is_probable_prime(n):
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def _primes_below(start, count):
    out = []
    q = start
    while len(out) < count:
        q -= 1
        if _is_probable_prime(q):
            out.append(q)
    return tuple(out)


def elimination_prime(i):
    """The i-th prime below 2**31 (descending)."""
    block = _primes_below(_ELIM_PRIME_START, 64 * (i // 64 + 1))
    return block[i]


def _check_prime(i):
    block = _primes_below(_CHECK_PRIME_START, 64 * (i // 64 + 1))
    return block[i]


# ----------------------------------------------------------------------------
# integer array helpers
# ----------------------------------------------------------------------------


def _maxabs(a):
    if a.size == 0:
        return 0
    if a.dtype == object:
        return int(max(abs(int(v)) for v in a.flat))
    return int(np.max(np.abs(a)))


def _compact(a):
    """Return an int64 copy when every entry fits, else an object array."""
    if a.dtype == object:
        if a.size == 0 or _maxabs(a) < _INT64_SAFE:
            return a.astype(np.int64)
        return a
    return a.astype(np.int64, copy=False)


def _obj(a):
    return a.astype(object) if a.dtype != object else a


def _mod(a, p):
    r = a % p
    return r.astype(np.int64) if r.dtype == object else r


def int_matmul(x, y):
    """Exact product of two integer arrays (int64 or object)."""
    inner = x.shape[1]
    if x.dtype != object and y.dtype != object:
        if inner == 0 or _maxabs(x) * _maxabs(y) * inner < _INT64_SAFE:
            return x @ y
    return _compact(_obj(x) @ _obj(y))


def product_equals(x, y, z):
    """Decide ``x @ y == z`` exactly for integer arrays.

    Small cases are done in int64.  Otherwise the identity is checked modulo
    primes near 2**20 whose product exceeds twice an a-priori bound on the
    entries of ``x @ y - z``, which makes the modular check exact.
    """
    inner = x.shape[1]
    bound = inner * _maxabs(x) * _maxabs(y) + _maxabs(z)
    if bound < _INT64_SAFE and x.dtype != object and y.dtype != object and z.dtype != object:
        return bool(np.array_equal(x @ y, z))
    modulus, i = 1, 0
    while modulus <= 2 * bound:
        q = _check_prime(i)
        i += 1
        lhs = (_mod(x, q) @ _mod(y, q)) % q
        if not np.array_equal(lhs, _mod(z, q)):
            return False
        modulus *= q
    return True


def _array_gcd(a):
    if a.size == 0:
        return 0
    return int(np.gcd.reduce(a.ravel()))


# ----------------------------------------------------------------------------
# ExactMatrix
# ----------------------------------------------------------------------------


class ExactMatrix:
    """Rational matrix ``num / den`` with integer ``num`` and ``den > 0``.

    Instances are kept in lowest terms, so two equal matrices have identical
    ``num`` and ``den``.  Treat instances as immutable.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = np.asarray(num)
        if num.ndim != 2:
            raise ValueError("ExactMatrix needs a 2-d array")
        if num.dtype.kind not in "iuO":
            raise TypeError(f"integer numerators required, got {num.dtype}")
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(_array_gcd(num), den)
        if g > 1:
            num = num // g
            den //= g
        self.num = _compact(num)
        self.den = den

    # construction ---------------------------------------------------------

    @classmethod
    def zeros(cls, m, n):
        return cls(np.zeros((m, n), dtype=np.int64))

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, rows, ncols=None):
        """Build from nested sequences of ints / Fractions / sympy Rationals."""
        rows = [[Fraction(int(v.p), int(v.q)) if hasattr(v, "q") else Fraction(v) for v in r] for r in rows]
        m = len(rows)
        n = len(rows[0]) if m else (ncols or 0)
        den = 1
        for r in rows:
            for v in r:
                den = den * v.denominator // math.gcd(den, v.denominator)
        num = np.empty((m, n), dtype=object)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                num[i, j] = v.numerator * (den // v.denominator)
        return cls(num, den)

    @classmethod
    def diag(cls, values):
        values = [Fraction(v) for v in values]
        rows = [[Fraction(0)] * len(values) for _ in values]
        for i, v in enumerate(values):
            rows[i][i] = v
        return cls.from_rows(rows, ncols=len(values))

    # basic properties -----------------------------------------------------

    @property
    def shape(self):
        return self.num.shape

    @property
    def T(self):
        return ExactMatrix(self.num.T.copy(), self.den)

    def is_zero(self):
        return not np.any(self.num)

    def is_integral(self):
        return self.den == 1

    def entry(self, i, j):
        return Fraction(int(self.num[i, j]), self.den)

    def to_object_fractions(self):
        return [[Fraction(int(v), self.den) for v in row] for row in self.num]

    def __repr__(self):
        return f"ExactMatrix(shape={self.shape}, den={self.den})"

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.den == other.den
            and bool(np.array_equal(self.num, other.num))
        )

    __hash__ = None

    # arithmetic -----------------------------------------------------------

    def __matmul__(self, other):
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return ExactMatrix(int_matmul(self.num, other.num), self.den * other.den)

    def _aligned(self, other):
        l = self.den * other.den // math.gcd(self.den, other.den)
        a = _scale(self.num, l // self.den)
        b = _scale(other.num, l // other.den)
        return a, b, l

    def __add__(self, other):
        a, b, l = self._aligned(other)
        return ExactMatrix(_int_add(a, b), l)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ExactMatrix(-self.num if self.num.dtype == object else -self.num, self.den)

    def scale(self, c):
        c = Fraction(c)
        return ExactMatrix(_scale(self.num, c.numerator), self.den * c.denominator)

    def __getitem__(self, key):
        sub = self.num[key]
        if sub.ndim != 2:
            raise IndexError("ExactMatrix indexing must keep two dimensions")
        return ExactMatrix(sub.copy(), self.den)

    def take_rows(self, idx):
        return ExactMatrix(self.num[list(idx), :], self.den)

    def take_cols(self, idx):
        return ExactMatrix(self.num[:, list(idx)], self.den)

    def kron(self, other):
        return ExactMatrix(_compact(np.kron(_obj(self.num), _obj(other.num))), self.den * other.den)

    @staticmethod
    def hstack(mats):
        mats = list(mats)
        l = 1
        for m in mats:
            l = l * m.den // math.gcd(l, m.den)
        return ExactMatrix(_cat([_scale(m.num, l // m.den) for m in mats], axis=1), l)

    @staticmethod
    def vstack(mats):
        mats = list(mats)
        l = 1
        for m in mats:
            l = l * m.den // math.gcd(l, m.den)
        return ExactMatrix(_cat([_scale(m.num, l // m.den) for m in mats], axis=0), l)

    @staticmethod
    def block_diag(mats):
        mats = list(mats)
        m = sum(x.shape[0] for x in mats)
        n = sum(x.shape[1] for x in mats)
        l = 1
        for x in mats:
            l = l * x.den // math.gcd(l, x.den)
        big = any(x.num.dtype == object for x in mats)
        out = np.zeros((m, n), dtype=object if big else np.int64)
        i = j = 0
        for x in mats:
            out[i : i + x.shape[0], j : j + x.shape[1]] = _scale(x.num, l // x.den)
            i += x.shape[0]
            j += x.shape[1]
        return ExactMatrix(out, l)


def _scale(a, c):
    if c == 1:
        return a
    if a.dtype != object and _maxabs(a) * abs(c) < _INT64_SAFE:
        return a * c
    return _obj(a) * c


def _int_add(a, b):
    if a.dtype != object and b.dtype != object and _maxabs(a) + _maxabs(b) < _INT64_SAFE:
        return a + b
    return _obj(a) + _obj(b)


def _cat(arrs, axis):
    if any(a.dtype == object for a in arrs):
        arrs = [_obj(a) for a in arrs]
    return np.concatenate(arrs, axis=axis)


# ----------------------------------------------------------------------------
# multimodular row reduction
# ----------------------------------------------------------------------------


def _rational_reconstruct(a, m):
    """Find n/d == a (mod m) with |n|, d <= sqrt(m/2); None if there is none."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if math.gcd(r1, abs(s1)) != 1:
        return None
    if s1 < 0:
        return -r1, -s1
    return r1, s1


def _better(new, old):
    if old is None:
        return True
    if len(new) != len(old):
        return len(new) > len(old)
    return new < old


def _crt(images):
    """Combine residue arrays [(p, array)] into one array modulo prod(p)."""
    p0, x = images[0]
    x = _obj(x)
    m = p0
    for p, r in images[1:]:
        inv = pow(m % p, -1, p)
        t = ((_obj(r) - x % p) * inv) % p
        x = x + m * t
        m *= p
    return x, m


def rref(A):
    """Reduced row echelon form ``(R, pivots)`` of an ExactMatrix.

    ``R`` has the same shape as ``A`` with zero rows below the rank.
    """
    mrows, ncols = A.shape
    M = A.num
    if mrows == 0 or ncols == 0 or not np.any(M):
        return ExactMatrix.zeros(mrows, ncols), ()
    idx = 0
    images = []
    best = None
    want = 2
    while True:
        while len(images) < want:
            p = elimination_prime(idx)
            idx += 1
            Rp, piv, r = _kernels.rref_mod_p(_mod(M, p), p)
            pivs = tuple(int(c) for c in piv[:r])
            if _better(pivs, best):
                best, images = pivs, [(p, Rp)]
            elif pivs == best:
                images.append((p, Rp))
        R = _lift(images, best, mrows, ncols)
        if R is not None and _certify_rref(A, R, best):
            return R, best
        want *= 2
        if want > 4096:
            raise VerificationError("multimodular reduction failed to certify")


def _lift(images, pivots, mrows, ncols):
    r = len(pivots)
    free = [j for j in range(ncols) if j not in set(pivots)]
    out = np.zeros((mrows, ncols), dtype=object)
    for i, c in enumerate(pivots):
        out[i, c] = 1
    if not free or r == 0:
        return ExactMatrix(out)
    sub = [(p, Rp[:r][:, free]) for p, Rp in images]
    x, m = _crt(sub)
    nums = np.empty(x.shape, dtype=object)
    dens = np.empty(x.shape, dtype=object)
    for (i, j), v in np.ndenumerate(x):
        if v == 0:
            nums[i, j], dens[i, j] = 0, 1
            continue
        rec = _rational_reconstruct(int(v), m)
        if rec is None:
            return None
        nums[i, j], dens[i, j] = rec
    l = 1
    for d in dens.flat:
        l = l * d // math.gcd(l, d)
    out = _obj(out) * l
    for jj, j in enumerate(free):
        for i in range(r):
            out[i, j] = nums[i, jj] * (l // dens[i, jj])
    return ExactMatrix(out, l)


def _certify_rref(A, R, pivots):
    # A == A[:, pivots] @ R, scaled to integers: A.num * R.den == A.num[:, piv] @ R.num
    r = len(pivots)
    lhs_x = A.num[:, list(pivots)]
    rhs = _scale(A.num, R.den)
    return product_equals(lhs_x, R.num[:r], rhs)


def rank(A):
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(rref(A)[1])


def nullspace(A):
    """Basis of ``{x : A x = 0}`` as columns; identity on the free coordinates."""
    mrows, ncols = A.shape
    R, piv = rref(A)
    free = [j for j in range(ncols) if j not in set(piv)]
    N = np.zeros((ncols, len(free)), dtype=object)
    Rn = R.num
    for k, j in enumerate(free):
        N[j, k] = R.den
        for i, c in enumerate(piv):
            N[c, k] = -Rn[i, j]
    return ExactMatrix(N, R.den) if free else ExactMatrix(np.zeros((ncols, 0), dtype=np.int64))


def solve(A, B):
    """Unique ``X`` with ``A X = B`` for ``A`` of full column rank."""
    n = A.shape[1]
    R, piv = rref(ExactMatrix.hstack([A, B]))
    if tuple(piv) != tuple(range(n)):
        raise VerificationError("solve: system is singular or inconsistent")
    return R[:n, n:]


def inverse(A):
    if A.shape[0] != A.shape[1]:
        raise ValueError("inverse of a non-square matrix")
    return solve(A, ExactMatrix.identity(A.shape[0]))


# ----------------------------------------------------------------------------
# subspaces
# ----------------------------------------------------------------------------


class ExactSubspace:
    """A subspace of Q^ambient, stored by a canonical column basis.

    The basis is the transpose of the reduced echelon form of any spanning
    set, so it restricts to the identity on ``pivot_rows``; coordinates of a
    member vector are read off those rows.
    """

    __slots__ = ("ambient_dim", "basis", "pivot_rows")

    def __init__(self, basis, _canonical=False):
        if not _canonical:
            R, piv = rref(basis.T)
            basis = R[: len(piv), :].T
        else:
            R, piv = None, None
        self.basis = basis
        self.ambient_dim = basis.shape[0]
        if piv is None:
            piv = _pivot_rows_of(basis)
        self.pivot_rows = tuple(piv)

    @classmethod
    def span(cls, M):
        return cls(M)

    @classmethod
    def zero(cls, ambient):
        return cls(ExactMatrix.zeros(ambient, 0), _canonical=True)

    @classmethod
    def full(cls, ambient):
        return cls(ExactMatrix.identity(ambient), _canonical=True)

    @classmethod
    def kernel(cls, A):
        N = nullspace(A)
        return cls(N)

    @property
    def dim(self):
        return self.basis.shape[1]

    def __repr__(self):
        return f"ExactSubspace(dim={self.dim}, ambient={self.ambient_dim})"

    def coords(self, X):
        """Coordinates of the columns of X; raises if X is not inside."""
        C = X.take_rows(self.pivot_rows)
        if not (self.basis @ C) == X:
            raise VerificationError("vector not contained in subspace")
        return C

    def contains(self, X):
        C = X.take_rows(self.pivot_rows)
        return (self.basis @ C) == X

    def annihilator(self):
        """Rows spanning the space of functionals vanishing on the subspace."""
        return nullspace(self.basis.T).T

    def intersect(self, other):
        if self.dim == 0 or other.dim == self.ambient_dim:
            return self
        ann = other.annihilator()
        Y = nullspace(ann @ self.basis)
        return ExactSubspace(self.basis @ Y)

    def __add__(self, other):
        return ExactSubspace(ExactMatrix.hstack([self.basis, other.basis]))

    def is_subspace_of(self, other):
        return other.contains(self.basis)

    def equals(self, other):
        return self.dim == other.dim and self.is_subspace_of(other)

    def orth_complement(self, gram=None):
        G = gram if gram is not None else ExactMatrix.identity(self.ambient_dim)
        return ExactSubspace.kernel(self.basis.T @ G)

    def projector(self, gram=None):
        """Projection onto this subspace, orthogonal for ``gram``."""
        return orthogonal_projector(self.basis, gram)


def _pivot_rows_of(B):
    # rows where the canonical basis is the identity
    out = []
    for k in range(B.shape[1]):
        col = B.num[:, k]
        nz = np.nonzero(col)[0]
        out.append(int(nz[0]))
    return out


def orthogonal_projector(B, gram=None):
    """``B (B^T G B)^{-1} B^T G`` for a full-column-rank basis ``B``."""
    n = B.shape[0]
    if B.shape[1] == 0:
        return ExactMatrix.zeros(n, n)
    G = gram if gram is not None else ExactMatrix.identity(n)
    BtG = B.T @ G
    return B @ solve(BtG @ B, BtG)
