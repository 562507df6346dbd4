from functools import lru_cache

import pytest

from prolongation.catalog import catalog_cases
from prolongation.exact import ExactSubspace, nullspace, rank
from prolongation.hodge import (
    build_model,
    exactness_defect,
    gram,
    harmonic_projection,
    hodge_split,
    verify_phi,
)
from prolongation.kostant import profile_for

CASES = [(c.kind, str(c.espec), c.k) for c in catalog_cases(3)]


@lru_cache(maxsize=None)
def model(kind, espec, k, n=3):
    return build_model(n, kind, espec, k)


def F_dim(gm):
    K = gm.symbol.K_basis
    return K.ambient_dim - K.dim


@pytest.mark.parametrize("case", CASES, ids=[f"{a}-{b}-k{c}" for a, b, c in CASES])
def test_levels_match_profile(case):
    gm = model(*case)
    _, _, prof = profile_for(case[0], 3, case[1], case[2])
    assert list(gm.level_dims) == list(prof.level_dims)
    assert gm.N == prof.N


@pytest.mark.parametrize("case", CASES, ids=[f"{a}-{b}-k{c}" for a, b, c in CASES])
def test_del_squared_and_splitting_identities(case):
    gm = model(*case)
    for p in range(2):
        for j in range(2, gm.N + 1):
            assert (gm.d(p + 1, j - 1) @ gm.d(p, j)).is_zero()
    for p in range(3):
        for j in range(1, gm.N + 1):
            D, S = gm.d(p, j), gm.deltastar(p, j)
            if D.shape[0] == 0:
                continue
            assert S @ D @ S == S  # delta* d = id on im delta*
            assert D @ S @ D == D  # d delta* = id on im d


@pytest.mark.parametrize("case", CASES, ids=[f"{a}-{b}-k{c}" for a, b, c in CASES])
def test_harmonic_dimensions(case):
    gm = model(*case)
    h0 = hodge_split(gm, 0)
    assert h0.harmonic.dim == gm.levels[0].dim
    h1 = hodge_split(gm, 1)
    assert h1.harmonic.dim == F_dim(gm)
    assert h1.im_del.dim + h1.harmonic.dim + h1.complement.dim == h1.ambient_dim


@pytest.mark.parametrize("case", CASES, ids=[f"{a}-{b}-k{c}" for a, b, c in CASES])
def test_phi_report_and_exactness(case):
    gm = model(*case)
    rep = verify_phi(gm, check_equivariance=False)
    assert rep.passed, rep.failures
    for i, defect in rep.exactness_defects.items():
        assert defect == (F_dim(gm) if i == gm.k else 0)


def test_kernel_of_del_on_V_is_V0():
    gm = model("riemannian", "lambda1", 1)
    # d on V_0 is zero by construction; on the rest it is injective
    for j in range(1, gm.N + 1):
        assert nullspace(gm.d(0, j)).shape[1] == 0
    assert gm.levels[1].dim == 4


def test_image_of_deltastar_in_degree_zero():
    gm = model("riemannian", "lambda1", 2)
    for j in range(1, gm.N + 1):
        assert rank(gm.deltastar(0, j)) == gm.levels[j].dim


@pytest.mark.parametrize("case", [("riemannian", "lambda1", 1), ("affine", "trivial", 3), ("riemannian", "trivial", 2)])
def test_pi_is_harmonic_projection(case):
    gm = model(*case)
    j = gm.k - 1
    pi = harmonic_projection(gm, j)
    assert pi @ pi == pi
    assert rank(pi) == F_dim(gm)
    if gm.block_dim(2, j - 1):
        assert (gm.d(1, j) @ pi).is_zero()


def test_deltastar_vanishes_off_image():
    gm = model("riemannian", "lambda1", 1)
    D = gm.d(0, 1)
    G = ExactSubspace(D).orth_complement(gram(gm, 1, 0))
    assert (gm.deltastar(0, 1) @ G.basis).is_zero()


def test_equivariance_is_reported():
    rep = verify_phi(model("riemannian", "lambda1", 1))
    assert rep.deltastar_equivariant is True


def test_exactness_fails_only_at_k():
    gm = model("affine", "trivial", 2)
    assert exactness_defect(gm, 2) == F_dim(gm)
    assert exactness_defect(gm, 1) == 0
