"""
The graded complex on the concrete prolongation spaces.

``V = V_0 + ... + V_N`` with ``V_j`` the classical prolongation spaces.  A
tangent vector ``e_a`` acts ``V_j -> V_{j-1}`` by contraction into the
symmetric slot, and

    (d phi)(e_t0, ..., e_tp) = sum_i (-1)^i e_ti . phi(..., omit t_i, ...)

defines ``d: Lambda^p (x) V_j -> Lambda^{p+1} (x) V_{j-1}``.  Coordinates on
``Lambda^p (x) V_j`` are (sorted p-subset T, coordinate in the basis of
V_j), T-major.

The splitting ``delta*`` is the pseudo-inverse of each block for the inner
product restricted from ordinary tensors.  For a metric structure this
inner product is invariant; for the affine structure it is only a
convenient choice and equivariance is reported, not required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import VerificationError
from .exact import ExactMatrix, ExactSubspace, nullspace, rank, solve
from .tensorlab import (
    classical_prolongations,
    generators,
    level_action,
    level_gram,
    multiset_index,
    multisets,
    prolongation_level,
    subset_index,
    subsets,
    symbol_projector,
)


@dataclass(frozen=True, eq=False)
class GradedModel:
    n: int
    structure_kind: str
    espec: object
    k: int
    N: int
    symbol: object = field(repr=False)
    levels: tuple = field(repr=False)
    del_maps: dict = field(repr=False)
    phi_maps: tuple = field(repr=False)
    grams: dict = field(repr=False)
    deltastar_maps: dict = field(default=None, repr=False)
    max_form_degree: int = 2

    @property
    def model(self):
        return self.symbol.domain

    @property
    def level_dims(self):
        return [V.dim for V in self.levels]

    def form_dim(self, p):
        return math.comb(self.n, p) if 0 <= p <= self.n else 0

    def block_dim(self, p, j):
        if j < 0 or j > self.N:
            return 0
        return self.form_dim(p) * self.levels[j].dim

    def d(self, p, j):
        """Block of d on Lambda^p (x) V_j."""
        return self.del_maps[(p, j)]

    def deltastar(self, p, j):
        """Block of delta* : Lambda^{p+1} (x) V_{j-1} -> Lambda^p (x) V_j."""
        if self.deltastar_maps is None:
            raise VerificationError("codifferential not assembled")
        return self.deltastar_maps[(p, j)]


# ----------------------------------------------------------------------------
# assembly
# ----------------------------------------------------------------------------


def _assemble(shape, blocks):
    """Dense matrix from (row, col, sign, ExactMatrix) blocks."""
    l = 1
    for _, _, _, B in blocks:
        l = l * B.den // math.gcd(l, B.den)
    big = any(B.num.dtype == object for *_, B in blocks)
    out = np.zeros(shape, dtype=object if big else np.int64)
    for r, c, s, B in blocks:
        h, w = B.shape
        out[r : r + h, c : c + w] += s * B.num * (l // B.den)
    return ExactMatrix(out, l)


def contraction(n, j, dimE, a):
    """Ambient map S^j (x) E -> S^{j-1} (x) E inserting e_a into a symmetric slot."""
    src = multiset_index(n, j)
    tgt = multisets(n, j - 1)
    M = np.zeros((len(tgt) * dimE, len(src) * dimE), dtype=np.int64)
    for r, J in enumerate(tgt):
        c = src[tuple(sorted(J + (a,)))]
        for e in range(dimE):
            M[r * dimE + e, c * dimE + e] = 1
    return ExactMatrix(M)


def _level_contractions(levels, n, dimE):
    """C[j][a]: matrix of e_a : V_j -> V_{j-1} in level bases."""
    out = {}
    for j in range(1, len(levels)):
        Vj, Vl = levels[j], levels[j - 1]
        mats = []
        for a in range(n):
            img = contraction(n, j, dimE, a) @ Vj.basis
            mats.append(Vl.coords(img))
        out[j] = mats
    return out


def _del_block(n, p, dims, C, j):
    rows = math.comb(n, p + 1) * (dims[j - 1] if j >= 1 else 0)
    cols = math.comb(n, p) * dims[j]
    if rows == 0 or cols == 0:
        return ExactMatrix.zeros(rows, cols)
    src = subset_index(n, p)
    dj, dl = dims[j], dims[j - 1]
    blocks = []
    for r, T in enumerate(subsets(n, p + 1)):
        for i, t in enumerate(T):
            rest = T[:i] + T[i + 1 :]
            blocks.append((r * dl, src[rest] * dj, (-1) ** i, C[j][t]))
    return _assemble((rows, cols), blocks)


def _form_gram(n, p, G):
    return ExactMatrix.identity(math.comb(n, p)).kron(G)


def _phi_maps(levels, C, n, dimE):
    """phi_j : V_j -> full j-tensors with values in E (E-basis coordinates), built recursively."""
    phis = [ExactMatrix.identity(dimE)]
    for j in range(1, len(levels)):
        # d v in Lambda^1 (x) V_{j-1}, a-major; then (id (x) phi_{j-1})
        stacked = ExactMatrix.vstack([phis[j - 1] @ C[j][a] for a in range(n)])
        phis.append(stacked)
    return tuple(phis)


def assemble_graded_module(n, structure_kind, espec, k, max_form_degree=2, prolongations=None):
    """Levels, d blocks for form degrees 0..max_form_degree, phi maps; invariants checked."""
    symbol = symbol_projector(n, structure_kind, espec, k)
    res = prolongations or classical_prolongations(n, structure_kind, espec, k, symbol=symbol)
    if res.skipped:
        raise VerificationError(f"levels {list(res.skipped)} were skipped by the size cap")
    levels = tuple(res.levels)
    N = len(levels) - 1
    dimE = symbol.domain.dim
    dims = [V.dim for V in levels]
    C = _level_contractions(levels, n, dimE)
    del_maps = {}
    for p in range(0, max_form_degree + 1):
        for j in range(0, N + 1):
            del_maps[(p, j)] = _del_block(n, p, dims, C, j)
    grams = {}
    for j, V in enumerate(levels):
        G = level_gram(symbol.domain, j)
        grams[j] = V.basis.T @ G @ V.basis
    model = GradedModel(
        n=n,
        structure_kind=structure_kind,
        espec=symbol.domain.espec,
        k=k,
        N=N,
        symbol=symbol,
        levels=levels,
        del_maps=del_maps,
        phi_maps=_phi_maps(levels, C, n, dimE),
        grams=grams,
        max_form_degree=max_form_degree,
    )
    _check_d_squared(model)
    return model


def _check_d_squared(model):
    for p in range(model.max_form_degree):
        for j in range(2, model.N + 1):
            if not (model.d(p + 1, j - 1) @ model.d(p, j)).is_zero():
                raise VerificationError(f"d o d != 0 on Lambda^{p} (x) V_{j}")


def gram(model, p, j):
    return _form_gram(model.n, p, model.grams[j])


# ----------------------------------------------------------------------------
# the splitting delta*
# ----------------------------------------------------------------------------


def _pseudo_inverse(D, Gx, Gy):
    """R M^{-1} (D R)^T Gy with R a basis of the Gx-complement of ker D."""
    m, n = D.shape
    if min(m, n) == 0 or D.is_zero():
        return ExactMatrix.zeros(n, m)
    K = nullspace(D)
    R = nullspace(K.T @ Gx) if K.shape[1] else ExactMatrix.identity(n)
    DR = D @ R
    M = DR.T @ Gy @ DR
    return R @ solve(M, DR.T @ Gy)


def codifferential(model):
    """Return a copy of the model with delta* blocks filled in; identities checked."""
    ds = {}
    for p in range(model.max_form_degree + 1):
        for j in range(model.N + 1):
            D = model.d(p, j)
            if j == 0 or D.shape[0] == 0:
                ds[(p, j)] = ExactMatrix.zeros(D.shape[1], D.shape[0])
                continue
            ds[(p, j)] = _pseudo_inverse(D, gram(model, p, j), gram(model, p + 1, j - 1))
    out = replace(model, deltastar_maps=ds)
    for (p, j), S in ds.items():
        D = out.d(p, j)
        if not (S @ D @ S == S and D @ S @ D == D):
            raise VerificationError(f"delta* fails the splitting identities on Lambda^{p} (x) V_{j}")
        if p >= 1 and j + 1 <= out.N:
            if not (out.deltastar(p - 1, j + 1) @ S).is_zero():
                raise VerificationError(f"delta* o delta* != 0 at Lambda^{p} (x) V_{j}")
    return out


def build_model(n, structure_kind, espec, k, max_form_degree=2):
    return codifferential(assemble_graded_module(n, structure_kind, espec, k, max_form_degree))


# ----------------------------------------------------------------------------
# Hodge decomposition and the projection pi
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class HodgeSplit:
    p: int
    im_del: ExactSubspace
    harmonic: ExactSubspace
    complement: ExactSubspace
    ambient_dim: int


def _block_offsets(model, p):
    offs, o = [], 0
    for j in range(model.N + 1):
        offs.append(o)
        o += model.block_dim(p, j)
    return offs, o


def _embed(model, p, j, M):
    offs, total = _block_offsets(model, p)
    out = ExactMatrix.zeros(total, M.shape[1])
    if M.shape[0] == 0:
        return out
    return _assemble((total, M.shape[1]), [(offs[j], 0, 1, M)])


def _subspace_from_blocks(model, p, pieces):
    cols = [_embed(model, p, j, B) for j, B in pieces if B.shape[1]]
    offs, total = _block_offsets(model, p)
    if not cols:
        return ExactSubspace.zero(total)
    return ExactSubspace(ExactMatrix.hstack(cols))


def hodge_split(model, p):
    """im d, harmonic part and the complement of ker d in Lambda^p (x) V."""
    if p not in (0, 1, 2) or p > model.max_form_degree:
        raise VerificationError(f"hodge_split supports p in 0..{min(2, model.max_form_degree)}")
    ims, harms, comps = [], [], []
    for j in range(model.N + 1):
        X = model.block_dim(p, j)
        if X == 0:
            continue
        G = gram(model, p, j)
        ker = nullspace(model.d(p, j)) if model.block_dim(p + 1, j - 1) else ExactMatrix.identity(X)
        if p >= 1 and j + 1 <= model.N:
            im = model.d(p - 1, j + 1)
            im = ExactSubspace(im).basis if im.shape[1] else ExactMatrix.zeros(X, 0)
        else:
            im = ExactMatrix.zeros(X, 0)
        K = ExactSubspace(ker) if ker.shape[1] else ExactSubspace.zero(X)
        harm = K.intersect(ExactSubspace.kernel(im.T @ G)) if im.shape[1] else K
        comp = K.orth_complement(G)
        ims.append((j, im))
        harms.append((j, harm.basis))
        comps.append((j, comp.basis))
    _, total = _block_offsets(model, p)
    split = HodgeSplit(
        p,
        _subspace_from_blocks(model, p, ims),
        _subspace_from_blocks(model, p, harms),
        _subspace_from_blocks(model, p, comps),
        total,
    )
    if split.im_del.dim + split.harmonic.dim + split.complement.dim != total:
        raise VerificationError(f"Hodge parts do not fill Lambda^{p} (x) V")
    if not (split.im_del + split.harmonic + split.complement).dim == total:
        raise VerificationError("Hodge parts are not complementary")
    return split


def harmonic_projection(model, j):
    """pi = id - delta* d - d delta* on Lambda^1 (x) V_j."""
    X = model.block_dim(1, j)
    out = ExactMatrix.identity(X)
    if model.block_dim(2, j - 1):
        out = out - model.deltastar(1, j) @ model.d(1, j)
    if j + 1 <= model.N:
        out = out - model.d(0, j + 1) @ model.deltastar(0, j + 1)
    return out


# ----------------------------------------------------------------------------
# checks on phi and exactness
# ----------------------------------------------------------------------------


@dataclass
class PhiReport:
    checks: list = field(default_factory=list)
    exactness_defects: dict = field(default_factory=dict)
    deltastar_equivariant: object = None

    def add(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.checks)

    def failures(self):
        return [c for c in self.checks if not c[1]]


def _full_symmetric_embedding(n, j, dimE):
    """S^j (x) E (natural components) -> full j-tensors (x) E."""
    idx = multiset_index(n, j)
    rows = n**j * dimE
    M = np.zeros((rows, len(idx) * dimE), dtype=np.int64)
    for flat in range(n**j):
        J, f = [], flat
        for _ in range(j):
            J.append(f % n)
            f //= n
        c = idx[tuple(sorted(J))]
        for e in range(dimE):
            M[flat * dimE + e, c * dimE + e] = 1
    return ExactMatrix(M)


def _swap_adjacent(n, j, dimE, s):
    """Permutation matrix exchanging tensor slots s and s+1."""
    size = n**j
    M = np.zeros((size * dimE, size * dimE), dtype=np.int64)
    for flat in range(size):
        digits = []
        f = flat
        for _ in range(j):
            digits.append(f % n)
            f //= n
        digits = digits[::-1]
        digits[s], digits[s + 1] = digits[s + 1], digits[s]
        g = 0
        for d in digits:
            g = g * n + d
        for e in range(dimE):
            M[g * dimE + e, flat * dimE + e] = 1
    return ExactMatrix(M)


def exactness_defect(model, i):
    """dim ker(d on Lambda^1 (x) V_{i-1}) - rank(d on V_i)."""
    if i - 1 < 0 or i - 1 > model.N:
        return 0
    D1 = model.d(1, i - 1)
    ker = model.block_dim(1, i - 1) - (rank(D1) if D1.shape[0] else 0)
    im = rank(model.d(0, i)) if i <= model.N and model.block_dim(0, i) else 0
    return ker - im


def verify_phi(model, check_equivariance=True):
    """Checks on the maps phi_i, delta*, and exactness of V_i -> Lambda^1 V_{i-1} -> Lambda^2 V_{i-2}."""
    rep = PhiReport()
    n, k, N = model.n, model.k, model.N
    dimE = model.model.dim
    K = model.symbol.K_basis
    Fdim = K.ambient_dim - K.dim
    for i, V in enumerate(model.levels):
        phi = model.phi_maps[i]
        rep.add(f"phi_{i} injective", rank(phi) == V.dim)
        if i >= 1:
            rep.add(f"d injective on V_{i}", rank(model.d(0, i)) == V.dim)
        emb = _full_symmetric_embedding(n, i, dimE)
        sym_ok = all((_swap_adjacent(n, i, dimE, s) @ phi) == phi for s in range(i - 1))
        rep.add(f"phi_{i} lands in symmetric tensors", sym_ok)
        same = ExactSubspace(phi).equals(ExactSubspace(emb @ V.basis)) if V.dim else True
        rep.add(f"phi_{i} image equals the prolongation space", same)
        full = math.comb(n + i - 1, i) * dimE
        if i < k:
            rep.add(f"phi_{i} onto S^{i} (x) E", V.dim == full)
        else:
            # image = S^i (x) E intersected with S^{i-k} (x) K, recomputed independently
            slices = prolongation_level(model.symbol, i)
            rep.add(f"phi_{i} onto the symbol intersection", slices.equals(V))
    # delta* o (id (x) phi_{i-1}^{-1}) = phi_i^{-1} on S^i (x) E for 1 <= i <= k-1
    for i in range(1, min(k, N + 1)):
        phi_prev, phi_i = model.phi_maps[i - 1], model.phi_maps[i]
        S = _full_symmetric_embedding(n, i, dimE)
        blocks = []
        rows_prev = n ** (i - 1) * dimE
        for a in range(n):
            part = S[a * rows_prev : (a + 1) * rows_prev, :]
            blocks.append(solve(phi_prev, part))
        lifted = model.deltastar(0, i) @ ExactMatrix.vstack(blocks)
        direct = solve(phi_i, S)
        rep.add(f"delta* inverts phi at level {i}", lifted == direct)
    # exactness
    for i in range(1, N + 2):
        defect = exactness_defect(model, i)
        rep.exactness_defects[i] = defect
        if i == k:
            rep.add(f"exactness fails at i=k={k} with defect dim F", defect == Fdim, f"defect {defect}")
        else:
            rep.add(f"exact at i={i}", defect == 0, f"defect {defect}")
    # cokernel of phi_k is F
    if k <= N:
        full = math.comb(n + k - 1, k) * dimE
        rep.add("cokernel of phi_k has dim F", full - model.levels[k].dim == Fdim)
    else:
        rep.add("cokernel of phi_k has dim F", math.comb(n + k - 1, k) * dimE == Fdim)
    if check_equivariance:
        rep.deltastar_equivariant = deltastar_equivariant(model)
    return rep


def deltastar_equivariant(model):
    """Whether delta* : Lambda^1 (x) V_{j-1} -> V_j commutes with the structure algebra."""
    mod = model.model
    for M in generators(model.n, model.structure_kind):
        Mx = ExactMatrix.from_rows(M)
        acts = []
        for j, V in enumerate(model.levels):
            acts.append(V.coords(level_action(mod, j, M) @ V.basis))
        for j in range(1, model.N + 1):
            src = Mx.kron(ExactMatrix.identity(model.levels[j - 1].dim)) + ExactMatrix.identity(model.n).kron(acts[j - 1])
            S = model.deltastar(0, j)
            if not (S @ src == acts[j] @ S):
                return False
    return True
