"""
Bundle descriptors ("especs") and the test catalog.

An espec names an irreducible tensor bundle E by its symmetry type:

* ``trivial``       functions
* ``lambda(p)``     p-forms
* ``sym(m)``        symmetric m-tensors (affine structure only)
* ``sym0(m)``       trace-free symmetric m-tensors (Riemannian only)

``espec_labels`` converts a descriptor into Dynkin labels on the
semisimple part of the structure group, using the node order of
:mod:`prolongation.liealg`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import comb

from .errors import ConfigurationError

KINDS = ("affine", "riemannian")

_ESPEC_RE = re.compile(r"^(trivial|lambda|sym0|sym)(?:\(?(\d+)\)?)?$")


@dataclass(frozen=True)
class ESpec:
    family: str
    degree: int = 0

    def __str__(self):
        return "trivial" if self.family == "trivial" else f"{self.family}({self.degree})"


def parse_espec(text):
    if isinstance(text, ESpec):
        return text
    m = _ESPEC_RE.match(str(text).strip().replace(" ", "").lower())
    if not m:
        raise ConfigurationError(f"unrecognised bundle descriptor {text!r}")
    family, deg = m.group(1), m.group(2)
    if family == "trivial":
        if deg not in (None, "0"):
            raise ConfigurationError("trivial takes no degree")
        return ESpec("trivial", 0)
    if deg is None:
        raise ConfigurationError(f"{family} needs a degree, e.g. {family}(2)")
    return ESpec(family, int(deg))


def check_kind(kind):
    if kind not in KINDS:
        raise ConfigurationError(f"structure must be one of {KINDS}, got {kind!r}")
    return kind


def check_supported(n, kind, espec):
    """Raise ConfigurationError unless the descriptor is in the supported catalog."""
    check_kind(kind)
    e = parse_espec(espec)
    if e.family == "trivial":
        return e
    if e.family == "lambda":
        top = n - 1 if kind == "affine" else (n - 1) // 2
        if not 1 <= e.degree <= top:
            raise ConfigurationError(f"lambda({e.degree}) unsupported for {kind} n={n}: need 1 <= p <= {top}")
    elif e.family == "sym":
        if kind != "affine":
            raise ConfigurationError("sym(m) is reducible for a metric; use sym0(m)")
        if e.degree < 1:
            raise ConfigurationError("sym(m) needs m >= 1")
    elif e.family == "sym0":
        if kind != "riemannian":
            raise ConfigurationError("sym0(m) needs a metric")
        if e.degree < 1:
            raise ConfigurationError("sym0(m) needs m >= 1")
    return e


def espec_dimension(n, espec):
    """Closed-form fibre dimension."""
    e = parse_espec(espec)
    if e.family == "trivial":
        return 1
    if e.family == "lambda":
        return comb(n, e.degree)
    m = e.degree
    if e.family == "sym":
        return comb(n + m - 1, m)
    full = comb(n + m - 1, m)
    return full - (comb(n + m - 3, m - 2) if m >= 2 else 0)


def espec_labels(structure, espec):
    """Labels of E on the nodes of the structure's semisimple part, in node order."""
    e = check_supported(structure.n, structure.kind, espec)
    r = structure.g0prime_root_data.rank
    lab = [0] * r
    if e.family == "trivial":
        return tuple(lab)
    if e.family == "sym":
        lab[0] = e.degree
        return tuple(lab)
    if e.family == "sym0":
        return tuple(e.degree * a for a in structure.lambda1_labels)
    p = e.degree
    if structure.kind == "affine":
        lab[p - 1] = 1
        return tuple(lab)
    if structure.n % 2 == 1:
        # so(n), n = 2r+1: the last node is short; the top form is twice its weight
        if p < r:
            lab[p - 1] = 1
        else:
            lab[r - 1] = 2
        return tuple(lab)
    # so(n), n = 2r: forms of degree r-1 sit on both fork nodes
    if r == 1:
        raise ConfigurationError("no supported forms for so(2)")
    if r == 2:
        # so(4) = A1 x A1, vector = (1, 1)
        return (1, 1)
    if p <= r - 2:
        lab[p - 1] = 1
    else:
        lab[r - 2] = lab[r - 1] = 1
    return tuple(lab)


@dataclass(frozen=True)
class CatalogCase:
    name: str
    kind: str
    espec: ESpec
    k: int
    min_n: int

    def label(self, n):
        return f"{self.name}[{self.kind}, n={n}, E={self.espec}, k={self.k}]"


CATALOG = (
    CatalogCase("killing", "affine", ESpec("lambda", 1), 1, 2),
    CatalogCase("hessian", "affine", ESpec("trivial"), 2, 2),
    CatalogCase("third_derivative", "affine", ESpec("trivial"), 3, 2),
    CatalogCase("killing_yano", "affine", ESpec("lambda", 2), 1, 3),
    CatalogCase("killing_tensor", "affine", ESpec("sym", 2), 1, 2),
    CatalogCase("conformal_killing", "riemannian", ESpec("lambda", 1), 1, 3),
    CatalogCase("tracefree_hessian", "riemannian", ESpec("trivial"), 2, 3),
    CatalogCase("second_order_conformal", "riemannian", ESpec("lambda", 1), 2, 3),
    CatalogCase("conformal_killing_tensor", "riemannian", ESpec("sym0", 2), 1, 3),
    CatalogCase("conformal_killing_yano", "riemannian", ESpec("lambda", 2), 1, 5),
)


def catalog_cases(n):
    return [c for c in CATALOG if n >= c.min_n]
