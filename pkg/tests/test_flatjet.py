from functools import lru_cache

import numpy as np
import pytest

from prolongation.catalog import catalog_cases
from prolongation.errors import VerificationError
from prolongation.exact import ExactMatrix, nullspace
from prolongation.flatjet import (
    PolySection,
    check_splitting_range,
    deltastar_of_tilde_nabla,
    derivative_matrix,
    flat_operator_matrix,
    is_parallel,
    jet_map_rank,
    leading_term_holds,
    monomials,
    perturb_top,
    random_section,
    solution_space,
    splitting_L,
    splitting_operator_kernel_dim,
    tilde_nabla,
)
from prolongation.hodge import build_model

CASES = [(c.kind, str(c.espec), c.k) for c in catalog_cases(3)]
IDS = [f"{a}-{b}-k{c}" for a, b, c in CASES]


@lru_cache(maxsize=None)
def model(kind, espec, k, n=3):
    return build_model(n, kind, espec, k)


@lru_cache(maxsize=None)
def solutions(kind, espec, k, n=3):
    return solution_space(n, kind, espec, k)


def monomial_section(n, dimE, d, row, e=0):
    num = np.zeros((len(monomials(n, d)), dimE), dtype=np.int64)
    num[row, e] = 1
    return PolySection(n, dimE, d, ExactMatrix(num))


def test_monomial_order():
    assert monomials(2, 2) == ((), (0,), (1,), (0, 0), (0, 1), (1, 1))
    D0 = derivative_matrix(2, 2, 0)
    # d/dx0 of x0^2 is 2 x0
    assert D0.entry(1, 3) == 2


@pytest.mark.parametrize(
    "n,kind,espec,k,d,dim",
    [(3, "affine", "trivial", 2, 2, 4), (3, "riemannian", "lambda1", 1, 2, 10), (3, "riemannian", "lambda1", 2, 4, 35)],
)
def test_flat_operator_kernels(n, kind, espec, k, d, dim):
    assert nullspace(flat_operator_matrix(n, kind, espec, k, d)).shape[1] == dim


def test_flat_operator_rejects_negative_degree():
    with pytest.raises(VerificationError):
        flat_operator_matrix(3, "affine", "trivial", 2, -1)


@pytest.mark.parametrize("case", CASES, ids=IDS)
def test_solution_space_is_sharp(case):
    sol = solutions(*case)
    assert sol.dim == sol.predicted == sol.stable_dim
    gm = model(*case)
    # solutions with vanishing (N-1)-jet are exactly the top level
    assert sol.vanishing_jet_dim == gm.levels[gm.N].dim > 0


@pytest.mark.parametrize(
    "n,kind,espec,k,dim", [(3, "affine", "lambda1", 1, 6), (3, "riemannian", "trivial", 2, 5), (4, "riemannian", "lambda1", 1, 15)]
)
def test_solution_space_examples(n, kind, espec, k, dim):
    assert solution_space(n, kind, espec, k).dim == dim


def test_constant_section_lifts_to_itself():
    gm = model("riemannian", "lambda1", 1)
    sigma = monomial_section(3, 3, 2, 0, 1)
    Sigma = splitting_L(gm, sigma)
    assert Sigma[0] == sigma
    assert all(c.is_zero() for c in Sigma.components[1:])


def test_splitting_of_a_coordinate_function():
    gm = model("riemannian", "trivial", 2)
    Sigma = splitting_L(gm, monomial_section(3, 1, 1, 1))
    assert Sigma[1].coeffs == ExactMatrix(np.array([[-1, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]]))
    assert Sigma[2].is_zero()


@pytest.mark.parametrize("case", CASES, ids=IDS)
def test_splitting_operator_properties(case):
    gm = model(*case)
    dimE = gm.levels[0].dim
    rng = np.random.default_rng(20)
    for _ in range(20):
        sigma = random_section(rng, 3, dimE, gm.N + 1)
        Sigma = splitting_L(gm, sigma)
        assert Sigma[0] == sigma
        assert all(c.is_zero() for c in deltastar_of_tilde_nabla(gm, Sigma))
        assert check_splitting_range(gm, Sigma)
        assert not check_splitting_range(gm, perturb_top(Sigma))


@pytest.mark.parametrize("case", CASES, ids=IDS)
def test_jet_map_and_leading_term(case):
    gm = model(*case)
    for i in range(gm.k):
        got, expected, _ = jet_map_rank(gm, i)
        assert got == expected
        assert leading_term_holds(gm, i)


@pytest.mark.parametrize("case", CASES, ids=IDS)
def test_solutions_are_parallel(case):
    gm = model(*case)
    for sigma in solutions(*case).basis:
        Sigma = splitting_L(gm, sigma)
        assert is_parallel(gm, Sigma)
        assert all(c.is_zero() for c in tilde_nabla(gm, Sigma))


@pytest.mark.parametrize("case", [("affine", "lambda1", 1), ("riemannian", "trivial", 2), ("riemannian", "lambda1", 1)])
def test_operator_through_L_has_the_right_kernel(case):
    gm = model(*case)
    assert splitting_operator_kernel_dim(gm, gm.N) == solutions(*case).dim
