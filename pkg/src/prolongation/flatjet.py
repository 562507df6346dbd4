"""
The flat model: polynomial sections on R^n with coordinate differentiation.

A polynomial section stores its coefficients as a matrix whose rows are
monomials of total degree <= degree_bound (graded, then lexicographic in
the sorted variable tuple) and whose columns are fibre coordinates.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import VerificationError
from .exact import ExactMatrix, nullspace, rank
from .hodge import harmonic_projection
from .kostant import make_structure, order_N, prolongation_module
from .liealg import weyl_dimension
from .tensorlab import multiset_index, multisets, remove_one, sym_dim, symbol_projector


@lru_cache(maxsize=None)
def monomials(n, d):
    """Monomials of degree <= d as sorted variable tuples."""
    out = []
    for m in range(d + 1):
        out.extend(multisets(n, m))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n, d):
    return {M: i for i, M in enumerate(monomials(n, d))}


def _derivative_coefficient(M, J):
    """d^J x^M = coeff * x^(M - J); returns (coeff, M - J) or (0, None)."""
    coeff = 1
    rest = list(M)
    for v in set(J):
        a, b = M.count(v), J.count(v)
        if b > a:
            return 0, None
        coeff *= math.factorial(a) // math.factorial(a - b)
    for v in J:
        rest.remove(v)
    return coeff, tuple(rest)


@lru_cache(maxsize=None)
def derivative_matrix(n, d, a):
    """d/dx_a on polynomials of degree <= d (as a map into the same space)."""
    idx = monomial_index(n, d)
    M = np.zeros((len(idx), len(idx)), dtype=np.int64)
    for c, mono in enumerate(monomials(n, d)):
        cnt = mono.count(a)
        if cnt:
            M[idx[remove_one(mono, a)], c] = cnt
    return ExactMatrix(M)


@dataclass(frozen=True, eq=False)
class PolySection:
    n: int
    fibre_dim: int
    degree_bound: int
    coeffs: ExactMatrix
    model: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.coeffs.shape != (len(monomials(self.n, self.degree_bound)), self.fibre_dim):
            raise ValueError("coefficient matrix shape does not match degree bound and fibre")

    def derivative(self, a):
        return PolySection(self.n, self.fibre_dim, self.degree_bound, derivative_matrix(self.n, self.degree_bound, a) @ self.coeffs, self.model)

    def value_at_origin(self):
        return self.coeffs[0:1, :]

    def jet(self, order):
        """Coefficients of all monomials of degree <= order (Taylor coefficients up to factorials)."""
        return self.coeffs[: len(monomials(self.n, order)), :]

    def evaluate(self, point):
        vals = []
        for mono in monomials(self.n, self.degree_bound):
            v = Fraction(1)
            for x in mono:
                v *= Fraction(point[x])
            vals.append(v)
        row = ExactMatrix.from_rows([vals])
        return row @ self.coeffs

    def is_zero(self):
        return self.coeffs.is_zero()

    def __eq__(self, other):
        return isinstance(other, PolySection) and self.degree_bound == other.degree_bound and self.coeffs == other.coeffs

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GradedPolySection:
    components: tuple

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)

    def __eq__(self, other):
        return isinstance(other, GradedPolySection) and len(self) == len(other) and all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None


# ----------------------------------------------------------------------------
# the operator D and its kernel
# ----------------------------------------------------------------------------


def kth_derivative_matrix(n, d, k, dimE):
    """(M, e) -> coefficients of the k-th symmetric derivative, rows (monomial deg <= d-k, J, e)."""
    src = monomials(n, d)
    tgt = monomial_index(n, d - k)
    Js = multisets(n, k)
    nJ = len(Js)
    out = np.zeros((len(tgt) * nJ * dimE, len(src) * dimE), dtype=np.int64)
    for c, M in enumerate(src):
        if len(M) < k:
            continue
        for jj, J in enumerate(Js):
            coeff, rest = _derivative_coefficient(M, J)
            if coeff:
                r = tgt[rest]
                for e in range(dimE):
                    out[(r * nJ + jj) * dimE + e, c * dimE + e] = coeff
    return ExactMatrix(out)


def flat_operator_matrix(n, structure_kind, espec, k, degree_bound, symbol=None):
    """Matrix of sigma -> P(nabla^k sigma) on E-valued polynomials of degree <= degree_bound.

    Below degree k the target is empty and the matrix has no rows.
    """
    if degree_bound < 0:
        raise VerificationError("degree bound must be non-negative")
    symbol = symbol or symbol_projector(n, structure_kind, espec, k)
    dimE = symbol.domain.dim
    Dk = kth_derivative_matrix(n, degree_bound, k, dimE)
    P = symbol.cartan_projector
    blocks = len(monomials(n, degree_bound - k))
    return ExactMatrix.identity(blocks).kron(P) @ Dk


@dataclass(frozen=True, eq=False)
class SolutionSpace:
    dim: int
    basis: tuple
    degree_bound: int
    predicted: int
    stable_dim: int
    jet_rank: int
    kernel: ExactMatrix = field(repr=False)

    @property
    def vanishing_jet_dim(self):
        """Dimension of the solutions whose (N-1)-jet at the origin vanishes."""
        return self.dim - self.jet_rank


def _kernel_sections(n, dimE, d, K, model=None):
    secs = []
    for c in range(K.shape[1]):
        col = K[:, c : c + 1]
        coeffs = ExactMatrix(col.num.reshape(-1, dimE), col.den)
        secs.append(PolySection(n, dimE, d, coeffs, model))
    return tuple(secs)


def solution_space(n, structure_kind, espec, k, check=True):
    """Kernel of the flat operator at degree N, with a stability re-check at N+1."""
    symbol = symbol_projector(n, structure_kind, espec, k)
    s = make_structure(structure_kind, n)
    E = s.labels_for(symbol.domain.espec)
    V = prolongation_module(s, E, k)
    N = order_N(s, E, k)
    dimV = weyl_dimension(s.g_root_data, V)
    dimE = symbol.domain.dim
    K = nullspace(flat_operator_matrix(n, structure_kind, espec, k, N, symbol=symbol))
    K2 = nullspace(flat_operator_matrix(n, structure_kind, espec, k, N + 1, symbol=symbol))
    # jet map of order N-1: coefficients of monomials of degree < N
    low = len(monomials(n, N - 1)) * dimE if N >= 1 else 0
    jet_rank = rank(K[:low, :]) if low and K.shape[1] else 0
    out = SolutionSpace(
        dim=K.shape[1],
        basis=_kernel_sections(n, dimE, N, K, symbol.domain),
        degree_bound=N,
        predicted=dimV,
        stable_dim=K2.shape[1],
        jet_rank=jet_rank,
        kernel=K,
    )
    if check and not (out.dim == dimV == out.stable_dim):
        raise VerificationError(f"flat solution space has dim {out.dim} (degree N+1: {out.stable_dim}), expected {dimV}")
    return out


# ----------------------------------------------------------------------------
# the splitting operator
# ----------------------------------------------------------------------------


def nabla(section, n):
    """Coordinate gradient: fibre coordinates become (a, c), a-major."""
    return ExactMatrix.hstack([derivative_matrix(n, section.degree_bound, a) @ section.coeffs for a in range(n)])


def _lift(graded_model, j, coeffs):
    # pointwise delta*_0 : Lambda^1 (x) V_{j-1} -> V_j applied to every monomial row
    return coeffs @ graded_model.deltastar(0, j).T


def splitting_L(graded_model, sigma):
    """Sigma_0 = sigma, Sigma_i = -delta*(nabla Sigma_{i-1})."""
    n = graded_model.n
    comps = [sigma]
    for j in range(1, graded_model.N + 1):
        prev = comps[-1]
        nxt = -_lift(graded_model, j, nabla(prev, n))
        comps.append(PolySection(n, graded_model.levels[j].dim, sigma.degree_bound, nxt))
    return GradedPolySection(tuple(comps))


def check_splitting_range(graded_model, Sigma):
    """True iff Sigma_i = -delta*(nabla Sigma_{i-1}) for every i >= 1."""
    n = graded_model.n
    if len(Sigma) != graded_model.N + 1:
        return False
    for j in range(1, len(Sigma)):
        want = -_lift(graded_model, j, nabla(Sigma[j - 1], n))
        if not (Sigma[j].coeffs == want):
            return False
    return True


def tilde_nabla(graded_model, Sigma):
    """Components of (nabla + d) Sigma in Lambda^1 (x) V_i, one coefficient matrix per level."""
    n = graded_model.n
    out = []
    for i in range(len(Sigma)):
        comp = nabla(Sigma[i], n)
        if i + 1 < len(Sigma):
            comp = comp + Sigma[i + 1].coeffs @ graded_model.d(0, i + 1).T
        out.append(comp)
    return out


def tilde_nabla_direction(graded_model, Sigma, a):
    """(nabla + d)_a Sigma as a graded section: d/dx_a Sigma_i + (d Sigma_{i+1})(e_a)."""
    comps = []
    for i in range(len(Sigma)):
        s = Sigma[i]
        c = derivative_matrix(s.n, s.degree_bound, a) @ s.coeffs
        if i + 1 < len(Sigma):
            dim = graded_model.levels[i].dim
            c = c + Sigma[i + 1].coeffs @ graded_model.d(0, i + 1)[a * dim : (a + 1) * dim, :].T
        comps.append(PolySection(s.n, s.fibre_dim, s.degree_bound, c, s.model))
    return GradedPolySection(tuple(comps))


def tilde_curvature(graded_model, Sigma, a, b):
    """[tilde nabla_a, tilde nabla_b] Sigma in the flat chart."""
    ab = tilde_nabla_direction(graded_model, tilde_nabla_direction(graded_model, Sigma, b), a)
    ba = tilde_nabla_direction(graded_model, tilde_nabla_direction(graded_model, Sigma, a), b)
    return GradedPolySection(tuple(PolySection(x.n, x.fibre_dim, x.degree_bound, x.coeffs - y.coeffs) for x, y in zip(ab, ba)))


def deltastar_of_tilde_nabla(graded_model, Sigma):
    """delta*(tilde nabla Sigma) as coefficient matrices on levels 1..N."""
    tn = tilde_nabla(graded_model, Sigma)
    return [_lift(graded_model, j, tn[j - 1]) for j in range(1, len(Sigma))]


def is_parallel(graded_model, Sigma):
    return all(c.is_zero() for c in tilde_nabla(graded_model, Sigma))


def splitting_operator_kernel_dim(graded_model, degree_bound):
    """dim ker(sigma -> pi(tilde nabla L sigma)), the operator written through L and pi."""
    n, k = graded_model.n, graded_model.k
    dimE = graded_model.levels[0].dim
    rows = len(monomials(n, degree_bound))
    cols = []
    pi = harmonic_projection(graded_model, k - 1)
    for c in range(rows * dimE):
        num = np.zeros((rows, dimE), dtype=np.int64)
        num[c // dimE, c % dimE] = 1
        sigma = PolySection(n, dimE, degree_bound, ExactMatrix(num))
        Sigma = splitting_L(graded_model, sigma)
        comp = tilde_nabla(graded_model, Sigma)[k - 1] @ pi.T
        cols.append(ExactMatrix(comp.num.reshape(-1, 1), comp.den))
    A = ExactMatrix.hstack(cols)
    return A.shape[1] - rank(A)


def jet_map_rank(graded_model, i):
    """Rank of sigma -> ((L sigma)_0(0), ..., (L sigma)_i(0)) on polynomials of degree <= i."""
    n = graded_model.n
    dimE = graded_model.levels[0].dim
    rows = len(monomials(n, i))
    cols = []
    for c in range(rows * dimE):
        num = np.zeros((rows, dimE), dtype=np.int64)
        num[c // dimE, c % dimE] = 1
        Sigma = splitting_L(graded_model, PolySection(n, dimE, i, ExactMatrix(num)))
        vals = [Sigma[j].value_at_origin() for j in range(min(i, graded_model.N) + 1)]
        cols.append(ExactMatrix.hstack(vals).T)
    A = ExactMatrix.hstack(cols)
    return rank(A), sum(graded_model.level_dims[: i + 1]), rows * dimE


def leading_term_holds(graded_model, i):
    """(L sigma)_i = (-1)^i nabla^i sigma for every monomial section of exact degree i < k."""
    n = graded_model.n
    dimE = graded_model.levels[0].dim
    Vi = graded_model.levels[i]
    if Vi.dim != sym_dim(n, i) * dimE:
        return False
    Js = multiset_index(n, i)
    mons = monomials(n, i)
    for c, M in enumerate(mons):
        if len(M) != i:
            continue
        for e in range(dimE):
            num = np.zeros((len(mons), dimE), dtype=np.int64)
            num[c, e] = 1
            Sigma = splitting_L(graded_model, PolySection(n, dimE, i, ExactMatrix(num)))
            want = np.zeros((len(Js) * dimE, 1), dtype=np.int64)
            coeff, _ = _derivative_coefficient(M, M)
            want[Js[M] * dimE + e, 0] = (-1) ** i * coeff
            got = Vi.basis @ Sigma[i].value_at_origin().T
            if not (got == ExactMatrix(want)):
                return False
            # only the constant term survives at level i
            if not Sigma[i].coeffs[1:, :].is_zero():
                return False
    return True


def random_section(rng, n, dimE, degree_bound, max_coeff=5):
    """A seeded random polynomial section with small integer coefficients."""
    rows = len(monomials(n, degree_bound))
    num = rng.integers(-max_coeff, max_coeff + 1, size=(rows, dimE)).astype(np.int64)
    den = int(rng.integers(1, 4))
    return PolySection(n, dimE, degree_bound, ExactMatrix(num, den))


def perturb_top(Sigma, rng=None):
    """Copy of Sigma with one extra unit added to the top component's constant term."""
    comps = list(Sigma.components)
    top = comps[-1]
    num = np.zeros(top.coeffs.shape, dtype=np.int64)
    num[0, 0] = 1
    comps[-1] = PolySection(top.n, top.fibre_dim, top.degree_bound, top.coeffs + ExactMatrix(num), top.model)
    return GradedPolySection(tuple(comps))
