"""
Closed first-order systems checked on explicit geometries.

Geometries are the flat metric on R^n and the unit round sphere in
stereographic coordinates, g = 4 / (1 + |x|^2)^2 * delta.  All tensors are
lower-index dictionaries ``{index tuple: sympy expression}`` in the chart
coordinates; derivatives are taken symbolically and residuals are evaluated
at rational points, so a residual is either exactly zero or not.

Curvature convention: (nabla_a nabla_b - nabla_b nabla_a) V^c = R_ab^c_d V^d,
with Ricci R_bd = R_cb^c_d.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy as sp

from .errors import ConfigurationError, VerificationError
from .flatjet import GradedPolySection, random_section, tilde_curvature
from .hodge import build_model

SYSTEMS = ("killing", "hessian", "tracefree_hessian", "conformal_killing")
CHARTS = ("flat", "sphere")

# number of fields of each valence carried by each closed system
FIELD_SHAPES = {
    "killing": {"sigma": 1, "mu": 2},
    "hessian": {"sigma": 0, "mu": 1},
    "tracefree_hessian": {"sigma": 0, "mu": 1, "rho": 0},
    "conformal_killing": {"sigma": 1, "mu": 2, "nu": 0, "rho": 1},
}


def _idx(n, m):
    return list(itertools.product(range(n), repeat=m))


# ----------------------------------------------------------------------------
# geometry
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GeometryData:
    n: int
    chart: str
    coords: tuple
    g: sp.Matrix = field(repr=False)
    ginv: sp.Matrix = field(repr=False)
    gamma: dict = field(repr=False)  # gamma[(c, a, b)] = Gamma^c_ab
    R: dict = field(repr=False)  # R[(a, b, c, d)] = R_ab^c_d
    Ric: dict = field(repr=False)

    def subs_map(self, point):
        if len(point) != self.n:
            raise ConfigurationError(f"point needs {self.n} coordinates")
        return {x: sp.Rational(Fraction(v).numerator, Fraction(v).denominator) for x, v in zip(self.coords, point)}

    def metric(self, point):
        return self.g.subs(self.subs_map(point))

    def inverse_metric(self, point):
        return self.ginv.subs(self.subs_map(point))

    def christoffel(self, point):
        s = self.subs_map(point)
        return {k: v.subs(s) for k, v in self.gamma.items()}

    def riemann(self, point):
        s = self.subs_map(point)
        return {k: v.subs(s) for k, v in self.R.items()}

    def ricci(self, point):
        s = self.subs_map(point)
        return sp.Matrix(self.n, self.n, lambda a, b: self.Ric[(a, b)].subs(s))


@lru_cache(maxsize=None)
def geometry(n, chart):
    """Symbolic geometry data for the given chart."""
    if chart not in CHARTS:
        raise ConfigurationError(f"chart must be one of {CHARTS}")
    xs = sp.symbols(f"x0:{n}", real=True)
    if chart == "flat":
        g = sp.eye(n)
    else:
        r2 = sum(x**2 for x in xs)
        g = sp.eye(n) * 4 / (1 + r2) ** 2
    ginv = sp.simplify(g.inv())
    gamma = {}
    for c, a, b in _idx(n, 3):
        expr = sum(
            ginv[c, d] * (sp.diff(g[d, b], xs[a]) + sp.diff(g[d, a], xs[b]) - sp.diff(g[a, b], xs[d]))
            for d in range(n)
        ) / 2
        gamma[(c, a, b)] = sp.cancel(expr)
    riemann = {}
    for a, b, c, d in _idx(n, 4):
        expr = sp.diff(gamma[(c, b, d)], xs[a]) - sp.diff(gamma[(c, a, d)], xs[b])
        expr += sum(gamma[(c, a, e)] * gamma[(e, b, d)] - gamma[(c, b, e)] * gamma[(e, a, d)] for e in range(n))
        riemann[(a, b, c, d)] = sp.cancel(expr)
    ricci = {(b, d): sp.cancel(sum(riemann[(c, b, c, d)] for c in range(n))) for b, d in _idx(n, 2)}
    return GeometryData(n, chart, xs, g, ginv, gamma, riemann, ricci)


def sphere_geometry(n, point=None):
    """The round sphere chart; evaluated matrices at ``point`` when given."""
    geo = geometry(n, "sphere")
    if point is None:
        return geo
    return EvaluatedGeometry.at(geo, point)


@dataclass(frozen=True)
class EvaluatedGeometry:
    n: int
    chart: str
    point: tuple
    metric: sp.Matrix
    inverse_metric: sp.Matrix
    christoffel: dict
    riemann: dict
    ricci: sp.Matrix

    @classmethod
    def at(cls, geo, point):
        return cls(geo.n, geo.chart, tuple(point), geo.metric(point), geo.inverse_metric(point), geo.christoffel(point), geo.riemann(point), geo.ricci(point))


def check_geometry(geo, point):
    """Symmetry, positivity, curvature symmetries and the Ricci contraction at a point."""
    ev = EvaluatedGeometry.at(geo, point)
    n = geo.n
    g = ev.metric
    ok = g == g.T and all(g[:k, :k].det() > 0 for k in range(1, n + 1))
    R = ev.riemann
    for a, b, c, d in _idx(n, 4):
        if R[(a, b, c, d)] + R[(b, a, c, d)] != 0:
            ok = False
    # first Bianchi: R_[ab}^c_{d] = 0
    for a, b, c, d in _idx(n, 4):
        if R[(a, b, c, d)] + R[(b, d, c, a)] + R[(d, a, c, b)] != 0:
            ok = False
    for b, d in _idx(n, 2):
        if ev.ricci[b, d] != sum(R[(c, b, c, d)] for c in range(n)):
            ok = False
    return ok


# ----------------------------------------------------------------------------
# tensor calculus on lower-index dictionaries
# ----------------------------------------------------------------------------


def covariant_derivative(geo, T, m):
    """nabla_a T_{b_1..b_m}; keys (a, b_1, ..., b_m)."""
    n, xs = geo.n, geo.coords
    out = {}
    for a in range(n):
        for b in _idx(n, m):
            expr = sp.diff(T[b], xs[a])
            for s in range(m):
                for e in range(n):
                    G = geo.gamma[(e, a, b[s])]
                    if G != 0:
                        expr -= G * T[b[:s] + (e,) + b[s + 1 :]]
            out[(a,) + b] = expr
    return out


def raised_ricci(geo):
    """R_a^b = g^{bc} R_ac, keyed (a, b)."""
    n = geo.n
    return {(a, b): sum(geo.ginv[b, c] * geo.Ric[(a, c)] for c in range(n)) for a, b in _idx(n, 2)}


def K_tensor(geo, sigma):
    """K_abc = R_bc^d_a sigma_d + (g_ab R_c^d sigma_d - g_ac R_b^d sigma_d)/(n-1)."""
    n = geo.n
    Rup = raised_ricci(geo)
    Rs = {c: sum(Rup[(c, d)] * sigma[(d,)] for d in range(n)) for c in range(n)}
    K = {}
    for a, b, c in _idx(n, 3):
        expr = sum(geo.R[(b, c, d, a)] * sigma[(d,)] for d in range(n))
        expr += (geo.g[a, b] * Rs[c] - geo.g[a, c] * Rs[b]) / (n - 1)
        K[(a, b, c)] = expr
    return K


# ----------------------------------------------------------------------------
# states and known solutions
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClosedSystemState:
    system_id: str
    chart: str
    n: int
    fields: dict
    label: str = ""

    def K(self, geo):
        if self.system_id != "conformal_killing":
            raise ConfigurationError("K is only defined for the conformal Killing system")
        return K_tensor(geo, self.fields["sigma"])


def _scalar(expr):
    return {(): sp.sympify(expr)}


def _vector(exprs):
    return {(a,): sp.sympify(e) for a, e in enumerate(exprs)}


def _matrix(n, fn):
    return {(a, b): sp.sympify(fn(a, b)) for a, b in _idx(n, 2)}


def prolong_from_sigma(geo, system_id, sigma):
    """Fill in the prolonged components from the primary unknown by their defining formulas."""
    n = geo.n
    if system_id in ("hessian", "tracefree_hessian"):
        mu = {(a,): v for (a,), v in covariant_derivative(geo, sigma, 0).items()}
        fields = {"sigma": sigma, "mu": mu}
        if system_id == "tracefree_hessian":
            dmu = covariant_derivative(geo, mu, 1)
            rho = sum(geo.ginv[a, b] * dmu[(a, b)] for a, b in _idx(n, 2)) / n
            fields["rho"] = {(): rho}
        return fields
    ds = covariant_derivative(geo, sigma, 1)
    if system_id == "killing":
        return {"sigma": sigma, "mu": {(a, b): (ds[(a, b)] - ds[(b, a)]) / 2 for a, b in _idx(n, 2)}}
    if system_id == "conformal_killing":
        nu = sum(geo.ginv[a, b] * ds[(a, b)] for a, b in _idx(n, 2)) / n
        mu = {(a, b): (ds[(a, b)] - ds[(b, a)]) / 2 for a, b in _idx(n, 2)}
        dmu = covariant_derivative(geo, mu, 2)
        rho = {(c,): sum(geo.ginv[a, b] * dmu[(a, b, c)] for a, b in _idx(n, 2)) / (n - 1) for c in range(n)}
        return {"sigma": sigma, "mu": mu, "nu": {(): nu}, "rho": rho}
    raise ConfigurationError(f"unknown system {system_id!r}")


def _skew_basis(n):
    for i, j in itertools.combinations(range(n), 2):
        A = sp.zeros(n, n)
        A[i, j], A[j, i] = 1, -1
        yield (i, j), A


def _flat_known(n, system_id, xs):
    r2 = sum(x**2 for x in xs)
    out = []
    if system_id == "hessian":
        out.append(("1", {"sigma": _scalar(1), "mu": _vector([0] * n)}))
        for i in range(n):
            out.append((f"x{i}", {"sigma": _scalar(xs[i]), "mu": _vector([int(a == i) for a in range(n)])}))
        return out
    if system_id == "tracefree_hessian":
        out.append(("1", {"sigma": _scalar(1), "mu": _vector([0] * n), "rho": _scalar(0)}))
        for i in range(n):
            out.append((f"x{i}", {"sigma": _scalar(xs[i]), "mu": _vector([int(a == i) for a in range(n)]), "rho": _scalar(0)}))
        out.append(("|x|^2", {"sigma": _scalar(r2), "mu": _vector([2 * x for x in xs]), "rho": _scalar(2)}))
        return out
    zero2 = _matrix(n, lambda a, b: 0)
    for i in range(n):
        f = {"sigma": _vector([int(a == i) for a in range(n)]), "mu": zero2}
        if system_id == "conformal_killing":
            f.update(nu=_scalar(0), rho=_vector([0] * n))
        out.append((f"translation {i}", f))
    for (i, j), A in _skew_basis(n):
        sigma = _vector([sum(A[b, c] * xs[c] for c in range(n)) for b in range(n)])
        f = {"sigma": sigma, "mu": _matrix(n, lambda a, b: A[b, a])}
        if system_id == "conformal_killing":
            f.update(nu=_scalar(0), rho=_vector([0] * n))
        out.append((f"rotation {i}{j}", f))
    if system_id == "conformal_killing":
        out.append(("dilation", {"sigma": _vector(xs), "mu": zero2, "nu": _scalar(1), "rho": _vector([0] * n)}))
        for i in range(n):
            b = [int(a == i) for a in range(n)]
            bx = xs[i]
            f = {
                "sigma": _vector([2 * bx * xs[a] - r2 * b[a] for a in range(n)]),
                "mu": _matrix(n, lambda a, c: 2 * (b[a] * xs[c] - xs[a] * b[c])),
                "nu": _scalar(2 * bx),
                "rho": _vector([-2 * b[c] for c in range(n)]),
            }
            out.append((f"special conformal {i}", f))
    return out


def _stereo_inverse(xs):
    r2 = sum(x**2 for x in xs)
    return [2 * x / (1 + r2) for x in xs] + [(r2 - 1) / (1 + r2)]


def _sphere_known(geo, system_id):
    n, xs = geo.n, geo.coords
    X = _stereo_inverse(xs)
    out = []
    if system_id == "killing":
        for (i, j), A in _skew_basis(n + 1):
            AX = [sum(A[r, c] * X[c] for c in range(n + 1)) for r in range(n + 1)]
            sigma = _vector([sp.cancel(sum(sp.diff(X[r], xs[a]) * AX[r] for r in range(n + 1))) for a in range(n)])
            out.append((f"ambient rotation {i}{j}", prolong_from_sigma(geo, system_id, sigma)))
        return out
    if system_id == "hessian":
        return [("1", prolong_from_sigma(geo, system_id, _scalar(1)))]
    if system_id == "tracefree_hessian":
        out.append(("1", prolong_from_sigma(geo, system_id, _scalar(1))))
        for i in range(n + 1):
            out.append((f"X{i}", prolong_from_sigma(geo, system_id, _scalar(X[i]))))
        return out
    # conformal Killing fields of the sphere are those of flat space, lowered with g
    for label, f in _flat_known(n, "conformal_killing", xs):
        v = [f["sigma"][(b,)] for b in range(n)]
        sigma = _vector([sp.cancel(sum(geo.g[a, b] * v[b] for b in range(n))) for a in range(n)])
        out.append((label, prolong_from_sigma(geo, system_id, sigma)))
    return out


def known_solutions(n, chart, system_id):
    """Explicit generators of the solution space with all prolonged components."""
    if system_id not in SYSTEMS:
        raise ConfigurationError(f"system must be one of {SYSTEMS}")
    if chart not in CHARTS:
        raise ConfigurationError(f"chart must be one of {CHARTS}")
    if n < 3 and system_id in ("tracefree_hessian", "conformal_killing"):
        raise ConfigurationError("metric systems need n >= 3")
    geo = geometry(n, chart)
    pairs = _flat_known(n, system_id, geo.coords) if chart == "flat" else _sphere_known(geo, system_id)
    return [ClosedSystemState(system_id, chart, n, f, label) for label, f in pairs]


# ----------------------------------------------------------------------------
# residuals
# ----------------------------------------------------------------------------


def _check_fields(state):
    need = FIELD_SHAPES[state.system_id]
    for name, m in need.items():
        f = state.fields.get(name)
        if f is None:
            raise ConfigurationError(f"{state.system_id}: missing field {name}")
        if len(f) != state.n**m:
            raise ConfigurationError(f"{state.system_id}: field {name} has {len(f)} components, expected {state.n ** m}")


def residual_expressions(geo, state):
    """Left minus right sides of every equation of the closed system, symbolically."""
    _check_fields(state)
    n, g = geo.n, geo.g
    F = state.fields
    out = []
    sid = state.system_id
    if sid == "killing":
        ds = covariant_derivative(geo, F["sigma"], 1)
        dmu = covariant_derivative(geo, F["mu"], 2)
        out += [ds[(a, b)] - F["mu"][(a, b)] for a, b in _idx(n, 2)]
        out += [dmu[(a, b, c)] - sum(geo.R[(b, c, d, a)] * F["sigma"][(d,)] for d in range(n)) for a, b, c in _idx(n, 3)]
    elif sid == "hessian":
        ds = covariant_derivative(geo, F["sigma"], 0)
        dmu = covariant_derivative(geo, F["mu"], 1)
        out += [ds[(a,)] - F["mu"][(a,)] for a in range(n)]
        out += [dmu[(a, b)] for a, b in _idx(n, 2)]
    elif sid == "tracefree_hessian":
        Rup = raised_ricci(geo)
        ds = covariant_derivative(geo, F["sigma"], 0)
        dmu = covariant_derivative(geo, F["mu"], 1)
        drho = covariant_derivative(geo, F["rho"], 0)
        rho = F["rho"][()]
        out += [ds[(a,)] - F["mu"][(a,)] for a in range(n)]
        out += [dmu[(a, b)] - rho * g[a, b] for a, b in _idx(n, 2)]
        out += [drho[(a,)] + sum(Rup[(a, b)] * F["mu"][(b,)] for b in range(n)) / (n - 1) for a in range(n)]
    elif sid == "conformal_killing":
        Rup = raised_ricci(geo)
        sigma, mu, nu, rho = F["sigma"], F["mu"], F["nu"][()], F["rho"]
        ds = covariant_derivative(geo, sigma, 1)
        dnu = covariant_derivative(geo, F["nu"], 0)
        dmu = covariant_derivative(geo, mu, 2)
        drho = covariant_derivative(geo, rho, 1)
        K = K_tensor(geo, sigma)
        dK = covariant_derivative(geo, K, 3)
        # skewness of mu is part of the system
        out += [mu[(a, b)] + mu[(b, a)] for a, b in _idx(n, 2)]
        out += [ds[(a, b)] - mu[(a, b)] - nu * g[a, b] for a, b in _idx(n, 2)]
        out += [dnu[(a,)] + rho[(a,)] + sum(Rup[(a, b)] * sigma[(b,)] for b in range(n)) / (n - 1) for a in range(n)]
        out += [dmu[(a, b, c)] - (g[a, b] * rho[(c,)] - g[a, c] * rho[(b,)] + K[(a, b, c)]) for a, b, c in _idx(n, 3)]
        for a, b in _idx(n, 2):
            t1 = sum(Rup[(a, c)] * mu[(b, c)] for c in range(n))
            # R_a^{cd}_b = g^{ce} R_ae^d_b
            t2 = sum(geo.ginv[c, e] * geo.R[(a, e, d, b)] * mu[(c, d)] for c, d, e in _idx(n, 3))
            t3 = sum(geo.ginv[c, e] * dK[(e, a, b, c)] for c, e in _idx(n, 2))
            out.append(drho[(a, b)] - (t1 - t2 - t3) / (n - 2))
    else:
        raise ConfigurationError(f"unknown system {sid!r}")
    return out


def _to_fraction(v):
    v = sp.nsimplify(v) if not v.is_Rational else v
    if not v.is_Rational:
        raise VerificationError(f"residual did not evaluate to a rational number: {v}")
    return Fraction(int(v.p), int(v.q))


def residual(geo, state, point):
    """Exact residual vector of the closed system at a rational point."""
    if isinstance(geo, EvaluatedGeometry):
        raise ConfigurationError("residual needs the symbolic geometry (derivatives of curvature enter)")
    if state.n != geo.n or state.chart != geo.chart:
        raise ConfigurationError("state and geometry do not match")
    s = geo.subs_map(point)
    return [_to_fraction(e.subs(s)) for e in residual_expressions(geo, state)]


def K_is_tracefree(geo, state, point):
    """All three metric traces of K_abc vanish at the point."""
    n = geo.n
    s = geo.subs_map(point)
    K = {key: v.subs(s) for key, v in state.K(geo).items()}
    ginv = geo.inverse_metric(point)
    for c in range(n):
        traces = (
            sum(ginv[a, b] * K[(a, b, c)] for a, b in _idx(n, 2)),
            sum(ginv[a, b] * K[(a, c, b)] for a, b in _idx(n, 2)),
            sum(ginv[a, b] * K[(c, a, b)] for a, b in _idx(n, 2)),
        )
        if any(t != 0 for t in traces):
            return False
    return True


def forced_components_match(geo, state, point):
    """Recompute the prolonged components from sigma and compare at a point."""
    again = prolong_from_sigma(geo, state.system_id, state.fields["sigma"])
    s = geo.subs_map(point)
    for name, comp in again.items():
        for key, expr in comp.items():
            if sp.sympify(expr - state.fields[name][key]).subs(s) != 0:
                return False
    return True


def random_points(n, count, seed, max_den=16, span=2):
    """Seeded rational points with denominators <= max_den."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        pt = []
        for _ in range(n):
            q = int(rng.integers(1, max_den + 1))
            p = int(rng.integers(-span * q, span * q + 1))
            pt.append(Fraction(p, q))
        pts.append(tuple(pt))
    return pts


def random_non_solution(n, chart, system_id, seed):
    """A seeded quadratic sigma, with prolonged parts filled by their definitions."""
    geo = geometry(n, chart)
    rng = np.random.default_rng(seed)
    xs = geo.coords
    valence = FIELD_SHAPES[system_id]["sigma"]

    def quad():
        c = rng.integers(1, 4, size=(n, n))
        return sum(int(c[i, j]) * xs[i] * xs[j] for i in range(n) for j in range(i, n)) + sum(xs) ** 3 * int(rng.integers(1, 3))

    sigma = _scalar(quad()) if valence == 0 else _vector([quad() for _ in range(n)])
    return ClosedSystemState(system_id, chart, n, prolong_from_sigma(geo, system_id, sigma), f"random seed {seed}")


def flat_tilde_curvature_vanishes(n, structure_kind, espec, k, seed=0, samples=3, degree_bound=3):
    """nabla + d on the flat chart has zero curvature on seeded random graded sections."""
    gm = build_model(n, structure_kind, espec, k)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        Sigma = GradedPolySection(tuple(random_section(rng, n, lv.dim, degree_bound) for lv in gm.levels))
        for a, b in itertools.combinations(range(n), 2):
            if not all(c.is_zero() for c in tilde_curvature(gm, Sigma, a, b)):
                return False
    return True
