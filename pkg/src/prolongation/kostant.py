"""
The two graded structure families and the predictions derived from them.

For the affine structure on an n-manifold the ambient algebra is sl(n+1)
(series A, rank n); for a Riemannian structure it is so(n+1, 1) (series B
of rank (n+1)/2 for odd n, series D of rank (n+2)/2 for even n).  In both
cases the crossed node is node 0 and deleting it leaves the semisimple part
of the structure group: sl(n) resp. so(n).

Labels always name the highest weight of the dual representation, so the
bundle E itself sits at the top of the alpha_0-string: level i of V is the
set of weights whose alpha_0-coefficient is i below the maximum.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .catalog import check_kind, espec_labels
from .errors import ConfigurationError, VerificationError
from .liealg import (
    DEFAULT_WEIGHT_CAP,
    RootData,
    build_root_system,
    delete_node,
    weight_multiplicities,
    weyl_dimension,
)


@dataclass(frozen=True)
class StructureData:
    kind: str
    n: int
    g_root_data: RootData
    crossed_node: int
    g0prime_root_data: RootData
    grading_functional: tuple

    @property
    def g0prime_nodes(self):
        return tuple(i for i in range(self.g_root_data.rank) if i != self.crossed_node)

    @property
    def alpha0(self):
        """The crossed simple root in fundamental-weight coordinates."""
        return self.g_root_data.simple_root(self.crossed_node)

    def restrict(self, weight):
        return tuple(weight[i] for i in self.g0prime_nodes)

    def grade(self, weight):
        return sum(c * w for c, w in zip(self.grading_functional, weight))

    @property
    def lambda1_labels(self):
        """Labels of the cotangent representation on the semisimple part."""
        return self.restrict(tuple(-a for a in self.alpha0))

    def labels_for(self, espec):
        return espec_labels(self, espec)


@dataclass(frozen=True)
class GradedProfile:
    V_labels: tuple
    N: int
    total_dim: int
    level_dims: tuple


@dataclass(frozen=True)
class Cohomology:
    H0_labels: tuple
    H1_labels: tuple


def _parse_kind(kind, n):
    if n is None:
        text = str(kind).replace(" ", "")
        if "(" in text and text.endswith(")"):
            kind, arg = text[:-1].split("(", 1)
            n = int(arg)
        else:
            raise ConfigurationError(f"structure {kind!r} needs a dimension, e.g. affine(3)")
    return check_kind(kind), int(n)


def make_structure(kind, n=None):
    """Structure data for ``make_structure("affine", 3)`` or ``make_structure("affine(3)")``."""
    kind, n = _parse_kind(kind, n)
    if kind == "affine":
        if n < 2:
            raise ConfigurationError("affine structures need n >= 2")
        g = build_root_system("A", n)
    else:
        if n < 3:
            raise ConfigurationError("Riemannian structures need n >= 3")
        g = build_root_system("B", (n + 1) // 2) if n % 2 else build_root_system("D", (n + 2) // 2)
    g0 = delete_node(g, 0)
    if kind == "riemannian" and n % 2 == 0 and n >= 6:
        # so(6) = A3 as a diagram, but the node order is that of D3
        g0 = type(g0)(**{**g0.__dict__, "series": f"D{g0.rank}"})
    grading = tuple(g.inverse_cartan[0])
    return StructureData(kind, n, g, 0, g0, grading)


def _check_E(structure, E_labels, k):
    if int(k) != k or k < 1:
        raise ConfigurationError(f"order k must be a positive integer, got {k}")
    return structure.g0prime_root_data.validate_labels(E_labels)


def prolongation_module(structure, E_labels, k):
    """Labels of V: k-1 on the crossed node, E copied onto the others."""
    E = _check_E(structure, E_labels, k)
    lab = [0] * structure.g_root_data.rank
    lab[structure.crossed_node] = k - 1
    for node, a in zip(structure.g0prime_nodes, E):
        lab[node] = a
    return tuple(lab)


def order_N(structure, E_labels, k):
    """Closed-form order N (the top level of V)."""
    E = _check_E(structure, E_labels, k)
    if structure.kind == "affine":
        return k - 1 + sum(E)
    if structure.g_root_data.series.startswith("B"):
        return 2 * (k - 1 + sum(E[:-1])) + E[-1]
    # D series: both fork labels enter with weight one
    return 2 * (k - 1 + sum(E[:-2])) + E[-2] + E[-1]


def graded_profile(structure, E_labels, k, cap=DEFAULT_WEIGHT_CAP):
    """Bucket the weights of V by the grading element."""
    E = _check_E(structure, E_labels, k)
    V = prolongation_module(structure, E, k)
    table = weight_multiplicities(structure.g_root_data, V, cap=cap)
    grades = Counter()
    for mu, m in table.items():
        grades[structure.grade(mu)] += m
    top = max(grades)
    levels = []
    for g in sorted(grades, reverse=True):
        i = top - g
        if Fraction(i).denominator != 1:
            raise VerificationError(f"non-integral level {i}")
        levels.append((int(i), grades[g]))
    size = levels[-1][0] + 1
    dims = [0] * size
    for i, d in levels:
        dims[i] = d
    if any(d == 0 for d in dims):
        raise VerificationError(f"gap in graded profile {dims}")
    if dims[0] != weyl_dimension(structure.g0prime_root_data, E):
        raise VerificationError("level 0 is not E")
    return GradedProfile(V, size - 1, sum(dims), tuple(dims))


def cartan_product_labels(structure, E_labels, k):
    """Labels of the Cartan product of the k-th symmetric power of the cotangent bundle with E."""
    E = _check_E(structure, E_labels, k)
    return tuple(a + k * b for a, b in zip(E, structure.lambda1_labels))


def cohomology(structure, V_labels):
    """H0 and H1 of the abelian nilradical with values in V, as labels on the semisimple part."""
    V = structure.g_root_data.validate_labels(V_labels)
    ell = V[structure.crossed_node]
    shifted = tuple(v - (ell + 1) * a for v, a in zip(V, structure.alpha0))
    H0 = structure.restrict(V)
    H1 = structure.restrict(shifted)
    if any(x < 0 for x in H1):
        raise VerificationError(f"H1 labels {H1} not dominant")
    return Cohomology(H0, H1)


def profile_for(kind, n, espec, k, cap=DEFAULT_WEIGHT_CAP):
    """Convenience: structure, E labels and graded profile for a descriptor."""
    s = make_structure(kind, n)
    E = s.labels_for(espec)
    return s, E, graded_profile(s, E, k, cap=cap)
