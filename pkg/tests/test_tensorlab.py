from math import comb

import pytest

from prolongation.catalog import catalog_cases
from prolongation.errors import ConfigurationError
from prolongation.exact import ExactSubspace, rank
from prolongation.kostant import profile_for
from prolongation.liealg import weyl_dimension
from prolongation.tensorlab import (
    _full_action,
    classical_prolongations,
    generators,
    is_invariant,
    level_action,
    level_gram,
    realize_bundle,
    symbol_projector,
)


def test_bundle_dimensions():
    assert realize_bundle(4, "affine", "lambda(2)").dim == 6
    assert realize_bundle(3, "riemannian", "sym0(2)").dim == 5
    for n in (3, 4, 5):
        for kind in ("affine", "riemannian"):
            assert realize_bundle(n, kind, "trivial").dim == 1
    assert realize_bundle(4, "riemannian", "sym0(3)").dim == comb(6, 3) - 4


@pytest.mark.parametrize("n,kind,espec", [(3, "affine", "lambda2"), (4, "affine", "sym(2)"), (3, "riemannian", "sym0(2)"), (5, "riemannian", "lambda(2)")])
def test_bundle_is_invariant(n, kind, espec):
    model = realize_bundle(n, kind, espec)
    assert rank(model.basis) == model.dim
    span = ExactSubspace(model.basis)
    assert is_invariant(span, [_full_action(n, model.valence, M) for M in generators(n, kind)])


def test_unsupported_bundles():
    with pytest.raises(ConfigurationError):
        realize_bundle(3, "riemannian", "lambda(2)")
    with pytest.raises(ConfigurationError):
        realize_bundle(3, "affine", "sym0(2)")
    with pytest.raises(ConfigurationError):
        realize_bundle(3, "affine", "lambda(3)")


def test_symbol_examples():
    s = symbol_projector(3, "affine", "lambda(1)", 1)
    assert rank(s.cartan_projector) == 6
    s = symbol_projector(3, "riemannian", "lambda(1)", 1)
    assert rank(s.cartan_projector) == 5
    s = symbol_projector(3, "riemannian", "lambda(1)", 2)
    assert rank(s.cartan_projector) == 7 and s.K_basis.dim == 11


@pytest.mark.parametrize("n", [3, 4])
def test_symbol_projector_properties(n):
    for case in catalog_cases(n):
        s = symbol_projector(n, case.kind, case.espec, case.k)
        P = s.cartan_projector
        assert P @ P == P
        assert (P @ s.K_basis.basis).is_zero()
        assert rank(P) + s.K_basis.dim == P.shape[0]
        mats = [level_action(s.domain, case.k, M) for M in generators(n, case.kind)]
        assert is_invariant(s.K_basis, mats)


def test_prolongation_examples():
    assert classical_prolongations(3, "riemannian", "lambda(1)", 1).dims == [3, 4, 3]
    assert classical_prolongations(3, "affine", "lambda(1)", 1).dims == [3, 3]
    r = classical_prolongations(3, "riemannian", "lambda(1)", 2)
    assert sum(r.dims) == 35 and r.zero_level == 5


@pytest.mark.parametrize("n", [3, 4])
def test_oracle_matches_grading(n):
    for case in catalog_cases(n):
        s, E, prof = profile_for(case.kind, n, case.espec, case.k)
        res = classical_prolongations(n, case.kind, case.espec, case.k)
        assert tuple(res.dims) == prof.level_dims, case.label(n)
        assert res.zero_level == prof.N + 1
        assert sum(res.dims) == weyl_dimension(s.g_root_data, prof.V_labels)


@pytest.mark.parametrize("name", ["conformal_killing", "killing_tensor", "second_order_conformal"])
def test_levels_are_invariant(name):
    n = 3
    case = next(c for c in catalog_cases(n) if c.name == name)
    res = classical_prolongations(n, case.kind, case.espec, case.k)
    model = realize_bundle(n, case.kind, case.espec)
    for i, V in enumerate(res.levels):
        mats = [level_action(model, i, M) for M in generators(n, case.kind)]
        assert is_invariant(V, mats)
        # the weighted inner product is nondegenerate on each level
        G = level_gram(model, i)
        assert rank(V.basis.T @ G @ V.basis) == V.dim


def test_cap_reports_skipped_levels():
    res = classical_prolongations(3, "riemannian", "lambda(1)", 2, cap=3 * 27)
    assert res.skipped and all(res.levels[i] is None for i in res.skipped)
