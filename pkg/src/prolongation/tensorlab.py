"""
Concrete tensor models and the brute-force prolongation oracle.

Coordinates.  A symmetric tensor is recorded by its components at sorted
index tuples ("natural coordinates"); an alternating one likewise, with the
sign of the sorting permutation.  The fibre of ``E`` has a basis whose
columns are given both in natural coordinates and in the full ``n**m``
component basis.  A space ``S^i (x) E`` (symmetric i-tensors with values in
E) has coordinates indexed by ``(J, e)``: a sorted multi-index J of length i
and an E-basis index e, flattened J-major.

The restriction of the standard tensor inner product to natural
coordinates weights a component by the number of distinct permutations of
its index; this is the Gram matrix used for all orthogonal complements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .catalog import check_supported, espec_dimension
from .errors import VerificationError
from .exact import ExactMatrix, ExactSubspace, nullspace, orthogonal_projector, rank, solve
from .kostant import cartan_product_labels, make_structure, order_N
from .liealg import weyl_dimension

DEFAULT_LEVEL_CAP = 200000


# ----------------------------------------------------------------------------
# index bookkeeping
# ----------------------------------------------------------------------------


@lru_cache(maxsize=None)
def multisets(n, d):
    """Sorted index tuples of length d, lexicographic."""
    return tuple(itertools.combinations_with_replacement(range(n), d))


@lru_cache(maxsize=None)
def multiset_index(n, d):
    return {J: i for i, J in enumerate(multisets(n, d))}


@lru_cache(maxsize=None)
def subsets(n, p):
    return tuple(itertools.combinations(range(n), p))


@lru_cache(maxsize=None)
def subset_index(n, p):
    return {B: i for i, B in enumerate(subsets(n, p))}


def perm_count(J):
    """Number of distinct orderings of the multi-index J."""
    out = factorial(len(J))
    for v in set(J):
        out //= factorial(J.count(v))
    return out


def insert_sorted(J, c):
    return tuple(sorted(J + (c,)))


def remove_one(J, c):
    i = J.index(c)
    return J[:i] + J[i + 1 :]


def wedge_insert(B, c):
    """(sign, sorted tuple) for c placed in front of the sorted tuple B; sign 0 if c in B."""
    if c in B:
        return 0, B
    pos = sum(1 for b in B if b < c)
    return (-1) ** pos, B[:pos] + (c,) + B[pos:]


def sym_dim(n, i):
    return comb(n + i - 1, i)


def _dense(shape, entries):
    M = np.zeros(shape, dtype=np.int64)
    for (r, c), v in entries.items():
        M[r, c] += v
    return ExactMatrix(M)


# ----------------------------------------------------------------------------
# fibre models
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TensorModel:
    n: int
    valence: int
    basis: ExactMatrix
    espec: object
    structure_kind: str
    slot_type: str = field(repr=False)
    natural_index: tuple = field(repr=False)
    natural_basis: ExactMatrix = field(repr=False)
    gram: ExactMatrix = field(repr=False)

    @property
    def dim(self):
        return self.basis.shape[1]

    def action(self, M):
        """Matrix of an n x n matrix acting on E, in the E basis."""
        return solve(self.basis, _full_action(self.n, self.valence, M) @ self.basis)

    def natural_weights(self):
        if self.slot_type == "sym":
            return [perm_count(J) for J in self.natural_index]
        return [1] * len(self.natural_index)


def _full_embedding(n, m, slot_type, index):
    """Columns: natural-coordinate unit vectors written as full n**m tensors."""
    E = np.zeros((n**m, len(index)), dtype=np.int64)
    for col, I in enumerate(index):
        for perm in set(itertools.permutations(range(m))):
            J = tuple(I[p] for p in perm)
            flat = 0
            for j in J:
                flat = flat * n + j
            if slot_type == "alt":
                E[flat, col] = _perm_sign(perm)
            else:
                E[flat, col] = 1
    return ExactMatrix(E)


def _perm_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _full_action(n, m, M):
    """Derivation action of M on components of an m-tensor: sum over slots."""
    M = M if isinstance(M, ExactMatrix) else ExactMatrix.from_rows(M)
    out = ExactMatrix.zeros(n**m, n**m)
    I = ExactMatrix.identity(n)
    for s in range(m):
        term = None
        for t in range(m):
            f = M if t == s else I
            term = f if term is None else term.kron(f)
        out = out + term
    if m == 0:
        return ExactMatrix.zeros(1, 1)
    return out


def trace_matrix(n, s, q):
    """Traces on S^s (x) Lambda^q in natural coordinates, stacked.

    One symmetric-symmetric and one symmetric-alternating trace suffice
    because the remaining ones agree with these up to sign.
    """
    src_s, src_a = multisets(n, s), subsets(n, q)
    nq = len(src_a)
    blocks = []
    if s >= 2:
        tgt = multisets(n, s - 2)
        ent = {}
        si = multiset_index(n, s)
        for r, A in enumerate(tgt):
            for c in range(n):
                j = si[tuple(sorted(A + (c, c)))]
                for b in range(nq):
                    ent[(r * nq + b, j * nq + b)] = ent.get((r * nq + b, j * nq + b), 0) + 1
        blocks.append(_dense((len(tgt) * nq, len(src_s) * nq), ent))
    if s >= 1 and q >= 1:
        tgt_s, tgt_a = multisets(n, s - 1), subsets(n, q - 1)
        si, ai = multiset_index(n, s), subset_index(n, q)
        ent = {}
        na = len(tgt_a)
        for r, A in enumerate(tgt_s):
            for rb, B in enumerate(tgt_a):
                for c in range(n):
                    sign, Bc = wedge_insert(B, c)
                    if sign:
                        key = (r * na + rb, si[insert_sorted(A, c)] * nq + ai[Bc])
                        ent[key] = ent.get(key, 0) + sign
        blocks.append(_dense((len(tgt_s) * na, len(src_s) * nq), ent))
    if not blocks:
        return ExactMatrix.zeros(0, len(src_s) * nq)
    return ExactMatrix.vstack(blocks)


def realize_bundle(n, structure_kind, espec):
    """Concrete model of the fibre of E."""
    e = check_supported(n, structure_kind, espec)
    if e.family == "trivial":
        m, slot, index = 0, "sym", ((),)
    elif e.family == "lambda":
        m, slot, index = e.degree, "alt", subsets(n, e.degree)
    else:
        m, slot, index = e.degree, "sym", multisets(n, e.degree)
    if e.family == "sym0":
        nat = nullspace(trace_matrix(n, m, 0))
    else:
        nat = ExactMatrix.identity(len(index))
    full = _full_embedding(n, m, slot, index) @ nat
    if slot == "sym":
        W = ExactMatrix.diag([perm_count(J) for J in index])
    else:
        W = ExactMatrix.identity(len(index))
    model = TensorModel(
        n=n,
        valence=m,
        basis=full,
        espec=e,
        structure_kind=structure_kind,
        slot_type=slot,
        natural_index=index,
        natural_basis=nat,
        gram=nat.T @ W @ nat,
    )
    if model.dim != espec_dimension(n, e):
        raise VerificationError(f"{e}: model dimension {model.dim} != {espec_dimension(n, e)}")
    return model


# ----------------------------------------------------------------------------
# the structure algebra acting on S^i (x) E
# ----------------------------------------------------------------------------


def generators(n, structure_kind):
    """A Lie-algebra generating set of gl(n) resp. so(n), as integer matrices."""
    out = []

    def unit(a, b):
        M = [[0] * n for _ in range(n)]
        M[a][b] = 1
        return M

    for a in range(n - 1):
        if structure_kind == "affine":
            out.append(unit(a, a + 1))
            out.append(unit(a + 1, a))
        else:
            M = unit(a, a + 1)
            M[a + 1][a] = -1
            out.append(M)
    if structure_kind == "affine":
        out.append(unit(0, 0))
    return out


def sym_action(n, i, M):
    """Derivation action of M on components of symmetric i-tensors."""
    idx = multiset_index(n, i)
    Ms = M.to_object_fractions() if isinstance(M, ExactMatrix) else M
    size = len(idx)
    out = [[0] * size for _ in range(size)]
    for r, J in enumerate(multisets(n, i)):
        for s in range(i):
            rest = J[:s] + J[s + 1 :]
            for c in range(n):
                v = Ms[J[s]][c]
                if v:
                    out[r][idx[insert_sorted(rest, c)]] += v
    return ExactMatrix.from_rows(out, ncols=size)


def level_action(model, i, M):
    """Action of M on S^i (x) E in (J, e) coordinates."""
    S = sym_action(model.n, i, M)
    return S.kron(ExactMatrix.identity(model.dim)) + ExactMatrix.identity(sym_dim(model.n, i)).kron(model.action(M))


def is_invariant(subspace, action_mats):
    for A in action_mats:
        if not subspace.contains(A @ subspace.basis):
            return False
    return True


def level_gram(model, i):
    w = ExactMatrix.diag([perm_count(J) for J in multisets(model.n, i)])
    return w.kron(model.gram)


# ----------------------------------------------------------------------------
# the symbol: Cartan product and its kernel K
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymbolData:
    domain: TensorModel
    k: int
    cartan_projector: ExactMatrix
    K_basis: ExactSubspace
    annihilator: ExactMatrix = field(repr=False)
    F_labels: tuple = ()


def _koszul(n, k, p):
    """S^k (x) Lambda^p -> S^{k+1} (x) Lambda^{p-1}: symmetrise the k slots with the first form slot."""
    src_s, src_a = multiset_index(n, k), subset_index(n, p)
    tgt_s, tgt_a = multisets(n, k + 1), subsets(n, p - 1)
    nq, na = len(src_a), len(tgt_a)
    ent = {}
    for r, A in enumerate(tgt_s):
        for rb, B in enumerate(tgt_a):
            for c in set(A):
                sign, Bc = wedge_insert(B, c)
                if sign:
                    key = (r * na + rb, src_s[remove_one(A, c)] * nq + src_a[Bc])
                    ent[key] = ent.get(key, 0) + sign * A.count(c)
    return _dense((len(tgt_s) * na, len(src_s) * nq), ent), (k + 1, p - 1)


def _multiply(n, k, m):
    """S^k (x) S^m -> S^{k+m} on components."""
    src_k, src_m = multiset_index(n, k), multiset_index(n, m)
    ent = {}
    nm = len(src_m)
    for r, A in enumerate(multisets(n, k + m)):
        for J in set(itertools.combinations(A, k)):
            rest = list(A)
            for j in J:
                rest.remove(j)
            coeff = 1
            for v in set(A):
                coeff *= comb(A.count(v), J.count(v))
            key = (r, src_k[J] * nm + src_m[tuple(rest)])
            ent[key] = coeff
    return _dense((len(multisets(n, k + m)), len(src_k) * nm), ent), (k + m, 0)


def _cartan_map(model, k):
    """An equivariant map on S^k (x) E (E-basis coordinates) whose kernel is K."""
    n, e = model.n, model.espec
    if e.family == "trivial":
        Phi, target = ExactMatrix.identity(sym_dim(n, k)), (k, 0)
    elif e.family == "lambda":
        Phi, target = _koszul(n, k, e.degree)
    else:
        Phi, target = _multiply(n, k, e.degree)
    Phi = Phi @ ExactMatrix.identity(sym_dim(n, k)).kron(model.natural_basis)
    if model.structure_kind == "riemannian":
        s, q = target
        W0 = nullspace(trace_matrix(n, s, q))
        wt = ExactMatrix.diag([perm_count(A) for A in multisets(n, s)]).kron(ExactMatrix.identity(comb(n, q)))
        Phi = W0.T @ wt @ Phi
    return Phi


def symbol_projector(n, structure_kind, espec, k):
    """Projector onto the Cartan component of S^k (x) E, with kernel K."""
    model = realize_bundle(n, structure_kind, espec)
    s = make_structure(structure_kind, n)
    E_labels = s.labels_for(model.espec)
    F = cartan_product_labels(s, E_labels, k)
    Phi = _cartan_map(model, k)
    K = ExactSubspace.kernel(Phi)
    G = level_gram(model, k)
    comp = K.orth_complement(G)
    P = orthogonal_projector(comp.basis, G)
    want = weyl_dimension(s.g0prime_root_data, F)
    if comp.dim != want or rank(P) != want:
        raise VerificationError(f"Cartan projector has rank {comp.dim}, expected {want}")
    return SymbolData(model, k, P, K, K.annihilator(), F)


# ----------------------------------------------------------------------------
# classical prolongations
# ----------------------------------------------------------------------------


def slice_constraints(n, i, k, Q, dimE):
    """Rows expressing that every (i-k)-slice of a tensor in S^i (x) E is killed by Q."""
    q = Q.shape[0]
    rows_J = multisets(n, i - k)
    col_idx = multiset_index(n, i)
    small = multisets(n, k)
    Qn = Q.num
    big = Qn.dtype == object
    out = np.zeros((len(rows_J) * q, len(col_idx) * dimE), dtype=object if big else np.int64)
    for jr, J in enumerate(rows_J):
        for mi, Mset in enumerate(small):
            L = col_idx[tuple(sorted(J + Mset))]
            out[jr * q : (jr + 1) * q, L * dimE : (L + 1) * dimE] += Qn[:, mi * dimE : (mi + 1) * dimE]
    return ExactMatrix(out, Q.den)


@dataclass(frozen=True)
class ProlongationResult:
    levels: tuple
    skipped: tuple
    zero_level: object
    predicted_N: int

    @property
    def dims(self):
        return [None if V is None else V.dim for V in self.levels]


def prolongation_level(symbol, i):
    model, k = symbol.domain, symbol.k
    ambient = sym_dim(model.n, i) * model.dim
    if i < k:
        return ExactSubspace.full(ambient)
    A = slice_constraints(model.n, i, k, symbol.annihilator, model.dim)
    return ExactSubspace.kernel(A)


def classical_prolongations(n, structure_kind, espec, k, cap=DEFAULT_LEVEL_CAP, symbol=None):
    """V_0, V_1, ... computed level by level from the symbol kernel K."""
    symbol = symbol or symbol_projector(n, structure_kind, espec, k)
    model = symbol.domain
    s = make_structure(structure_kind, n)
    N = order_N(s, s.labels_for(model.espec), k)
    levels, skipped = [], []
    i = 0
    zero = None
    while True:
        if n**i * model.dim > cap:
            skipped.append(i)
            levels.append(None)
            if i > N:
                break
            i += 1
            continue
        V = prolongation_level(symbol, i)
        if V.dim == 0:
            zero = i
            break
        levels.append(V)
        if i > N:
            raise VerificationError(f"level {i} is nonzero beyond the predicted order N={N}")
        i += 1
    return ProlongationResult(tuple(levels), tuple(skipped), zero, N)
