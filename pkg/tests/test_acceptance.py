"""
Acceptance criteria 1-8.  Every comparison is exact.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary, and also when this file is run as a script.
"""

from math import comb

import numpy as np
import pytest

from prolongation.catalog import catalog_cases
from prolongation.curved import geometry, known_solutions, random_non_solution, random_points, residual
from prolongation.flatjet import (
    GradedPolySection,
    check_splitting_range,
    deltastar_of_tilde_nabla,
    jet_map_rank,
    perturb_top,
    random_section,
    solution_space,
    splitting_L,
)
from prolongation.hodge import build_model, exactness_defect, hodge_split
from prolongation.kostant import profile_for
from prolongation.liealg import weyl_dimension
from prolongation.tensorlab import classical_prolongations

RESULTS = {}


def record(number, title, failures):
    status = "PASS" if not failures else "FAIL"
    detail = "" if not failures else "  " + "; ".join(failures[:5])
    RESULTS[number] = f"criterion {number} [{title}]: {status}{detail}"
    assert not failures, RESULTS[number]


def profile(kind, n, espec, k):
    return profile_for(kind, n, espec, k)[2]


def test_criterion_1_profiles():
    bad = []
    for n in (3, 4, 5, 6):
        p = profile("riemannian", n, "lambda1", 1)
        if (p.total_dim, p.N) != ((n + 1) * (n + 2) // 2, 2):
            bad.append(f"conformal Killing n={n}: total {p.total_dim}, N {p.N}")
        p = profile("affine", n, "lambda1", 1)
        if (p.total_dim, p.N) != (n * (n + 1) // 2, 1):
            bad.append(f"Killing n={n}: total {p.total_dim}, N {p.N}")
    record(1, "profile reproduction", bad)


def test_criterion_2_second_order_conformal():
    bad = []
    for n in (3, 5):
        p = profile("riemannian", n, "lambda1", 2)
        if (p.total_dim, p.N) != (n * (n + 2) * (n + 4) // 3, 4):
            bad.append(f"n={n}: total {p.total_dim}, N {p.N}")
    record(2, "second-order conformal bound", bad)


def test_criterion_3_conformal_killing_forms():
    bad = []
    for n, q in ((5, 2), (6, 1), (6, 2)):
        p = profile("riemannian", n, f"lambda{q}", 1)
        levels = [comb(n, q), comb(n, q + 1) + comb(n, q - 1), comb(n, q)]
        if p.total_dim != comb(n + 2, q + 1) or list(p.level_dims) != levels:
            bad.append(f"(n,p)=({n},{q}): total {p.total_dim}, levels {list(p.level_dims)}")
    record(3, "conformal Killing forms", bad)


def test_criterion_4_oracle_equivalence():
    bad = []
    for n in (3, 4):
        for c in catalog_cases(n):
            s, E, p = profile_for(c.kind, n, str(c.espec), c.k)
            res = classical_prolongations(n, c.kind, str(c.espec), c.k)
            tag = c.label(n)
            if res.skipped:
                bad.append(f"{tag}: levels {res.skipped} above the cap")
                continue
            if res.dims != list(p.level_dims):
                bad.append(f"{tag}: oracle {res.dims} vs {list(p.level_dims)}")
            if res.zero_level != p.N + 1:
                bad.append(f"{tag}: oracle stops at {res.zero_level}, N={p.N}")
            if sum(res.dims) != weyl_dimension(s.g_root_data, p.V_labels):
                bad.append(f"{tag}: oracle total {sum(res.dims)}")
    record(4, "oracle equivalence", bad)


def test_criterion_5_algebraic_identities():
    bad = []
    for c in catalog_cases(3):
        gm = build_model(3, c.kind, str(c.espec), c.k)
        tag = c.label(3)
        for p in range(2):
            for j in range(2, gm.N + 1):
                if not (gm.d(p + 1, j - 1) @ gm.d(p, j)).is_zero():
                    bad.append(f"{tag}: d^2 != 0 at ({p},{j})")
        for p in range(3):
            for j in range(1, gm.N + 1):
                D, S = gm.d(p, j), gm.deltastar(p, j)
                if D.shape[0] == 0:
                    continue
                if not S @ D @ S == S:
                    bad.append(f"{tag}: delta* d != id on im delta* at ({p},{j})")
                if not D @ S @ D == D:
                    bad.append(f"{tag}: d delta* != id on im d at ({p},{j})")
        K = gm.symbol.K_basis
        Fdim = K.ambient_dim - K.dim
        if hodge_split(gm, 0).harmonic.dim != gm.levels[0].dim:
            bad.append(f"{tag}: harmonic p=0")
        if hodge_split(gm, 1).harmonic.dim != Fdim:
            bad.append(f"{tag}: harmonic p=1")
        for i in range(1, gm.N + 2):
            want = Fdim if i == gm.k else 0
            got = exactness_defect(gm, i)
            if got != want:
                bad.append(f"{tag}: exactness defect {got} at i={i}, expected {want}")
    record(5, "algebraic identity suite", bad)


FLAT = [
    ("Killing", "affine", "lambda1", 1, 6),
    ("conformal Killing", "riemannian", "lambda1", 1, 10),
    ("Hessian", "affine", "trivial", 2, 4),
    ("trace-free Hessian", "riemannian", "trivial", 2, 5),
    ("second-order conformal", "riemannian", "lambda1", 2, 35),
]


def test_criterion_6_flat_solver():
    bad = []
    for name, kind, espec, k, dim in FLAT:
        sol = solution_space(3, kind, espec, k, check=False)
        if sol.dim != dim:
            bad.append(f"{name}: kernel dim {sol.dim}, expected {dim}")
        if sol.stable_dim != sol.dim:
            bad.append(f"{name}: degree N+1 gives {sol.stable_dim}")
        if sol.vanishing_jet_dim < 1:
            bad.append(f"{name}: no nonzero solution with vanishing (N-1)-jet")
    record(6, "flat solver sharpness", bad)


def test_criterion_7_splitting_operator():
    bad = []
    for c in catalog_cases(3):
        gm = build_model(3, c.kind, str(c.espec), c.k)
        tag = c.label(3)
        dimE = gm.levels[0].dim
        rng = np.random.default_rng(7)
        for t in range(20):
            sigma = random_section(rng, 3, dimE, gm.N + 1)
            Sigma = splitting_L(gm, sigma)
            if not all(x.is_zero() for x in deltastar_of_tilde_nabla(gm, Sigma)):
                bad.append(f"{tag}: delta* tilde nabla L sigma != 0 (sample {t})")
            if not Sigma[0] == sigma:
                bad.append(f"{tag}: (L sigma)_0 != sigma (sample {t})")
            if not check_splitting_range(gm, Sigma):
                bad.append(f"{tag}: L sigma rejected (sample {t})")
            if check_splitting_range(gm, perturb_top(Sigma)):
                bad.append(f"{tag}: perturbed section accepted (sample {t})")
            other = GradedPolySection(tuple(random_section(rng, 3, lv.dim, gm.N + 1) for lv in gm.levels))
            if gm.N >= 1 and check_splitting_range(gm, other):
                bad.append(f"{tag}: random graded section accepted (sample {t})")
        for i in range(gm.k):
            got, want, _ = jet_map_rank(gm, i)
            if got != want:
                bad.append(f"{tag}: jet map rank {got} != {want} at i={i}")
    record(7, "splitting operator", bad)


def test_criterion_8_curved_residuals():
    bad = []
    pts = random_points(3, 5, 2024)
    sphere = geometry(3, "sphere")
    flat = geometry(3, "flat")
    killing = known_solutions(3, "sphere", "killing")
    conformal = known_solutions(3, "flat", "conformal_killing")
    if len(killing) != 6 or len(conformal) != 10:
        bad.append(f"generator counts {len(killing)}, {len(conformal)}")
    for geo, sols in ((sphere, killing), (flat, conformal)):
        for s in sols:
            for pt in pts:
                if any(v != 0 for v in residual(geo, s, pt)):
                    bad.append(f"{geo.chart} {s.system_id} {s.label} at {pt}")
    for geo, system in ((sphere, "killing"), (flat, "conformal_killing")):
        ns = random_non_solution(3, geo.chart, system, 2024)
        if not any(v != 0 for pt in pts for v in residual(geo, ns, pt)):
            bad.append(f"{geo.chart} {system}: seeded non-solution has zero residual")
    record(8, "curved residuals", bad)


if __name__ == "__main__":
    import sys

    code = 0
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            code = 1
        number = int(name.split("_")[2])
        print(RESULTS.get(number, f"criterion {number}: FAIL (error)"))
    sys.exit(code)
