"""
Root data, Weyl dimensions and weight multiplicities for types A, B, D.

Node order.  Nodes are numbered 0..rank-1 from left to right as the
diagrams are usually drawn:

* ``A_r``: a chain.
* ``B_r``: a chain whose last node (index ``rank-1``) is the short root.
* ``D_r``: a chain 0..rank-2 with node ``rank-1`` also attached to node
  ``rank-3``; the two fork nodes are the last two indices.  Tie-break: in
  the orthonormal model, node ``rank-2`` is e_{r-1} - e_r and node ``rank-1``
  is e_{r-1} + e_r.  For ``D_3`` node 0 is the branch point.

Cartan matrix convention: ``C[i][j] = 2 (a_i, a_j) / (a_i, a_i)``, so the
simple root ``a_j`` has fundamental-weight coordinates given by column ``j``.
All arithmetic is exact.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from types import MappingProxyType

from .errors import ConfigurationError, ResourceError, VerificationError

DEFAULT_WEIGHT_CAP = 20000


@dataclass(frozen=True)
class RootData:
    series: str
    rank: int
    cartan_matrix: tuple
    positive_roots: tuple
    rho: tuple
    symmetric_form: tuple
    half_norms: tuple = field(repr=False)
    inverse_cartan: tuple = field(repr=False)

    def root_to_weight(self, root):
        """Fundamental-weight coordinates of a root given in simple-root coordinates."""
        C = self.cartan_matrix
        return tuple(sum(C[i][j] * root[j] for j in range(self.rank)) for i in range(self.rank))

    def simple_root(self, j):
        return tuple(self.cartan_matrix[i][j] for i in range(self.rank))

    def to_root_coords(self, weight):
        """Simple-root coordinates (rational) of a weight in fundamental coordinates."""
        Ci = self.inverse_cartan
        return tuple(sum(Ci[i][j] * weight[j] for j in range(self.rank)) for i in range(self.rank))

    def inner(self, lam, mu):
        S = self.symmetric_form
        r = self.rank
        return sum(lam[i] * S[i][j] * mu[j] for i in range(r) for j in range(r))

    def pair_with_root(self, weight, root):
        # (weight, root) for a root in simple-root coordinates
        return sum(Fraction(weight[j]) * root[j] * self.half_norms[j] for j in range(self.rank))

    def reflect(self, weight, i):
        a = self.simple_root(i)
        c = weight[i]
        return tuple(w - c * ai for w, ai in zip(weight, a))

    def validate_labels(self, labels):
        labels = tuple(labels)
        if len(labels) != self.rank:
            raise ConfigurationError(f"{self.series}: expected {self.rank} labels, got {len(labels)}")
        if any(int(a) != a or a < 0 for a in labels):
            raise ConfigurationError(f"labels must be non-negative integers: {labels}")
        return tuple(int(a) for a in labels)


def _cartan(series, rank):
    C = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        C[i][i] = 2
    if series == "A":
        for i in range(rank - 1):
            C[i][i + 1] = C[i + 1][i] = -1
    elif series == "B":
        for i in range(rank - 1):
            C[i][i + 1] = C[i + 1][i] = -1
        C[rank - 1][rank - 2] = -2
    elif series == "D":
        for i in range(rank - 2):
            C[i][i + 1] = C[i + 1][i] = -1
        C[rank - 3][rank - 1] = C[rank - 1][rank - 3] = -1
    return C


def _half_norms(C):
    r = len(C)
    d = [None] * r
    for start in range(r):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        comp = [start]
        while stack:
            i = stack.pop()
            for j in range(r):
                if j != i and C[i][j] != 0 and d[j] is None:
                    d[j] = d[i] * C[i][j] / C[j][i]
                    stack.append(j)
                    comp.append(j)
        top = max(d[j] for j in comp)
        for j in comp:
            d[j] /= top
    return tuple(d)


def _inverse(C):
    r = len(C)
    M = [[Fraction(C[i][j]) for j in range(r)] + [Fraction(int(i == j)) for j in range(r)] for i in range(r)]
    for c in range(r):
        p = next(i for i in range(c, r) if M[i][c] != 0)
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for i in range(r):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return tuple(tuple(row[r:]) for row in M)


def _positive_roots(C):
    r = len(C)
    simple = [tuple(int(i == j) for i in range(r)) for j in range(r)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(r):
                # alpha_i string through beta: p steps down, q = p - <beta, a_i^v> up
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in roots:
                        p += 1
                    else:
                        break
                pairing = sum(C[i][j] * beta[j] for j in range(r))
                if p - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        layer = nxt
    return tuple(sorted(roots, key=lambda a: (sum(a), tuple(-x for x in a))))


def root_data_from_cartan(cartan, series):
    C = tuple(tuple(int(v) for v in row) for row in cartan)
    r = len(C)
    d = _half_norms(C)
    Ci = _inverse(C)
    # (w_i, w_k) = Cinv[k][i] * d_k
    S = tuple(tuple(Ci[k][i] * d[k] for k in range(r)) for i in range(r))
    return RootData(
        series=series,
        rank=r,
        cartan_matrix=C,
        positive_roots=_positive_roots(C),
        rho=(1,) * r,
        symmetric_form=S,
        half_norms=d,
        inverse_cartan=Ci,
    )


_MIN_RANK = {"A": 1, "B": 2, "D": 3}


@lru_cache(maxsize=None)
def build_root_system(series, rank):
    """Root data of type ``series`` (A, B or D) and the given rank."""
    series = str(series).upper()
    if series not in _MIN_RANK:
        raise ConfigurationError(f"unsupported series {series!r}; only A, B, D are implemented")
    if int(rank) != rank or rank < _MIN_RANK[series]:
        raise ConfigurationError(f"{series}{rank}: rank must be at least {_MIN_RANK[series]}")
    return root_data_from_cartan(_cartan(series, int(rank)), f"{series}{int(rank)}")


def delete_node(rd, node):
    """Root data of the diagram with ``node`` and its edges removed."""
    keep = [i for i in range(rd.rank) if i != node]
    C = [[rd.cartan_matrix[i][j] for j in keep] for i in keep]
    return root_data_from_cartan(C, _component_name(C))


def _component_name(C):
    r = len(C)
    seen = [False] * r
    parts = []
    for s in range(r):
        if seen[s]:
            continue
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(r):
                if j != i and C[i][j] != 0 and not seen[j]:
                    seen[j] = True
                    stack.append(j)
        sub = [[C[i][j] for j in sorted(comp)] for i in sorted(comp)]
        parts.append(_classify(sub))
    return "x".join(parts)


def _classify(C):
    r = len(C)
    if any(C[i][j] == -2 for i in range(r) for j in range(r)):
        return f"B{r}"
    degree = [sum(1 for j in range(r) if j != i and C[i][j]) for i in range(r)]
    if max(degree, default=0) >= 3:
        return f"D{r}"
    return f"A{r}"


def weyl_dimension(rd, labels):
    """Dimension of the irreducible module with the given highest weight."""
    lam = rd.validate_labels(labels)
    shifted = tuple(a + 1 for a in lam)
    num = Fraction(1)
    for alpha in rd.positive_roots:
        num *= rd.pair_with_root(shifted, alpha) / rd.pair_with_root(rd.rho, alpha)
    if num.denominator != 1:
        raise VerificationError(f"Weyl dimension not integral: {num}")
    return int(num)


@dataclass(frozen=True)
class WeightMultiplicityTable:
    highest_weight: tuple
    entries: MappingProxyType

    def total(self):
        return sum(self.entries.values())

    def __getitem__(self, weight):
        return self.entries.get(tuple(weight), 0)

    def __len__(self):
        return len(self.entries)

    def items(self):
        return self.entries.items()


def _integer_form(rd):
    den = lcm(*(v.denominator for row in rd.symmetric_form for v in row))
    return [[int(v * den) for v in row] for row in rd.symmetric_form]


def weight_multiplicities(rd, labels, cap=DEFAULT_WEIGHT_CAP):
    """Weight multiplicities by Freudenthal's recursion.

    Weights are generated by closing the highest weight under simple-root
    strings and processed by increasing depth below the highest weight.
    """
    lam = rd.validate_labels(labels)
    dim = weyl_dimension(rd, lam)
    if dim > cap:
        raise ResourceError(f"module of dimension {dim} exceeds the weight cap {cap}", cap=cap)
    r = rd.rank
    S = _integer_form(rd)

    def ip(x, y):
        return sum(x[i] * S[i][j] * y[j] for i in range(r) for j in range(r) if S[i][j])

    pos = [rd.root_to_weight(a) for a in rd.positive_roots]
    simple = [rd.simple_root(i) for i in range(r)]
    lam_rho = tuple(a + 1 for a in lam)
    top = ip(lam_rho, lam_rho)

    by_depth = defaultdict(set)
    by_depth[0].add(lam)
    mult = {}
    depth = 0
    while by_depth.get(depth):
        for mu in sorted(by_depth.pop(depth)):
            if mu == lam:
                m = 1
            else:
                acc = 0
                for a in pos:
                    nu = tuple(x + y for x, y in zip(mu, a))
                    while nu in mult:
                        acc += mult[nu] * ip(nu, a)
                        nu = tuple(x + y for x, y in zip(nu, a))
                mr = tuple(x + 1 for x in mu)
                denom = top - ip(mr, mr)
                if denom <= 0 or (2 * acc) % denom:
                    raise VerificationError(f"Freudenthal step failed at {mu}")
                m = 2 * acc // denom
            if m == 0:
                continue
            mult[mu] = m
            for i in range(r):
                for j in range(1, mu[i] + 1):
                    nu = tuple(x - j * y for x, y in zip(mu, simple[i]))
                    by_depth[depth + j].add(nu)
        depth += 1
    total = sum(mult.values())
    if total != dim:
        raise VerificationError(f"multiplicities sum to {total}, Weyl dimension is {dim}")
    return WeightMultiplicityTable(lam, MappingProxyType(mult))
