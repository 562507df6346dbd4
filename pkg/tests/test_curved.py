from fractions import Fraction

import pytest
import sympy as sp

from prolongation.curved import (
    ClosedSystemState,
    K_is_tracefree,
    check_geometry,
    flat_tilde_curvature_vanishes,
    forced_components_match,
    geometry,
    known_solutions,
    prolong_from_sigma,
    random_non_solution,
    random_points,
    residual,
    sphere_geometry,
)
from prolongation.errors import ConfigurationError

P = (Fraction(1, 2), Fraction(1, 3), Fraction(0))


def test_sphere_metric_at_origin():
    ev = sphere_geometry(3, (0, 0, 0))
    assert ev.metric == 4 * sp.eye(3)


@pytest.mark.parametrize("point", [(0, 0, 0), P, (Fraction(-3, 7), 2, Fraction(5, 16))])
def test_sphere_is_unit_round(point):
    geo = geometry(3, "sphere")
    assert geo.ricci(point) == 2 * geo.metric(point)
    assert check_geometry(geo, point)


def test_flat_riemann_vanishes():
    geo = geometry(3, "flat")
    assert all(v == 0 for v in geo.riemann(P).values())


def test_random_points_are_seeded_with_small_denominators():
    a = random_points(3, 5, 7)
    assert a == random_points(3, 5, 7)
    assert a != random_points(3, 5, 8)
    assert all(x.denominator <= 16 for pt in a for x in pt)


@pytest.mark.parametrize(
    "chart,system,count",
    [("flat", "killing", 6), ("flat", "conformal_killing", 10), ("sphere", "killing", 6), ("flat", "hessian", 4), ("flat", "tracefree_hessian", 5), ("sphere", "tracefree_hessian", 5), ("sphere", "hessian", 1)],
)
def test_known_solutions_have_zero_residual(chart, system, count):
    geo = geometry(3, chart)
    sols = known_solutions(3, chart, system)
    assert len(sols) == count
    for s in sols:
        for pt in random_points(3, 5, 11):
            assert all(v == 0 for v in residual(geo, s, pt)), s.label
        assert forced_components_match(geo, s, P)


def test_sphere_killing_example_point():
    geo = geometry(3, "sphere")
    for s in known_solutions(3, "sphere", "killing"):
        assert all(v == 0 for v in residual(geo, s, P))
        mu = s.fields["mu"]
        assert all(sp.simplify(mu[(a, b)] + mu[(b, a)]) == 0 for a in range(3) for b in range(3))


@pytest.mark.slow
def test_sphere_conformal_killing():
    geo = geometry(3, "sphere")
    sols = known_solutions(3, "sphere", "conformal_killing")
    assert len(sols) == 10
    for s in sols:
        assert all(v == 0 for v in residual(geo, s, P)), s.label
        assert K_is_tracefree(geo, s, P)


@pytest.mark.parametrize("chart", ["flat", "sphere"])
def test_K_tracefree(chart):
    geo = geometry(3, chart)
    s = known_solutions(3, chart, "conformal_killing")[-1] if chart == "flat" else random_non_solution(3, chart, "conformal_killing", 2)
    for pt in random_points(3, 3, 1):
        assert K_is_tracefree(geo, s, pt)


def test_non_solution_is_rejected():
    geo = geometry(3, "flat")
    x = geo.coords
    sigma = {(b,): x[b] * x[0] for b in range(3)}
    state = ClosedSystemState("killing", "flat", 3, prolong_from_sigma(geo, "killing", sigma))
    assert any(v != 0 for v in residual(geo, state, P))
    for system in ("killing", "conformal_killing", "tracefree_hessian"):
        bad = random_non_solution(3, "flat", system, 5)
        assert any(v != 0 for pt in random_points(3, 5, 3) for v in residual(geo, bad, pt))


def test_altered_component_breaks_forcing():
    geo = geometry(3, "flat")
    s = known_solutions(3, "flat", "conformal_killing")[-1]
    fields = dict(s.fields)
    fields["nu"] = {(): s.fields["nu"][()] + 1}
    bad = ClosedSystemState(s.system_id, s.chart, 3, fields)
    assert not forced_components_match(geo, bad, P)
    assert any(v != 0 for v in residual(geo, bad, P))


def test_missing_field_and_bad_requests():
    geo = geometry(3, "flat")
    with pytest.raises(ConfigurationError):
        residual(geo, ClosedSystemState("killing", "flat", 3, {"sigma": {(a,): 0 for a in range(3)}}), P)
    with pytest.raises(ConfigurationError):
        known_solutions(3, "torus", "killing")
    with pytest.raises(ConfigurationError):
        known_solutions(3, "flat", "yano")


@pytest.mark.parametrize(
    "kind,espec,k", [("affine", "lambda1", 1), ("affine", "trivial", 2), ("riemannian", "lambda1", 1), ("riemannian", "trivial", 2), ("riemannian", "lambda1", 2)]
)
def test_flat_tilde_connection_is_flat(kind, espec, k):
    assert flat_tilde_curvature_vanishes(3, kind, espec, k, seed=4)
