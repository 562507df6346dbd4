"""
Command-line front end.

    prolong profile      --structure riemannian --n 3 --e lambda1 --k 1
    prolong oracle       --structure riemannian --n 3 --e lambda1 --k 2
    prolong flat-solve   --structure affine --n 3 --e trivial --k 2 --basis
    prolong curved-check --system conformal_killing --chart flat --n 3
    prolong suite        --n 3 --seed 0

Every subcommand writes one report per case (one JSON object per line with
``--format json``).  Exit status: 0 when every check passes, 2 on a
verification failure, 1 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .catalog import KINDS, catalog_cases, check_supported, parse_espec
from .curved import CHARTS, SYSTEMS, geometry, known_solutions, random_non_solution, random_points, residual
from .errors import ConfigurationError, ProlongationError, ResourceError, VerificationError
from .flatjet import check_splitting_range, deltastar_of_tilde_nabla, perturb_top, random_section, solution_space, splitting_L
from .hodge import build_model, verify_phi
from .kostant import graded_profile, make_structure
from .liealg import weyl_dimension
from .tensorlab import DEFAULT_LEVEL_CAP, classical_prolongations

EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2
BIG = 2**53

# catalog case -> closed system checked by curved-check
SYSTEM_FOR_CASE = {
    ("affine", "lambda(1)", 1): "killing",
    ("affine", "trivial", 2): "hessian",
    ("riemannian", "trivial", 2): "tracefree_hessian",
    ("riemannian", "lambda(1)", 1): "conformal_killing",
}
CASE_FOR_SYSTEM = {v: k for k, v in SYSTEM_FOR_CASE.items()}


@dataclass
class CaseSpec:
    structure_kind: str
    n: int
    k: int
    espec: object = None
    E_labels: tuple = None

    def as_dict(self):
        return {
            "structure": self.structure_kind,
            "n": self.n,
            "k": self.k,
            "espec": None if self.espec is None else str(self.espec),
            "E_labels": None if self.E_labels is None else list(self.E_labels),
        }

    def require_espec(self, what):
        if self.espec is None:
            raise ConfigurationError(f"{what} needs a bundle descriptor (e.g. lambda1), not raw labels")
        return str(self.espec)


@dataclass
class Report:
    case: CaseSpec
    prediction: dict = None
    oracle_dims: list = None
    flat_dim: int = None
    checks: list = field(default_factory=list)
    timing_ms: float = 0.0
    extra: dict = field(default_factory=dict)

    def check(self, name, ok, detail=""):
        self.checks.append({"name": name, "pass": None if ok is None else bool(ok), "detail": str(detail)})
        return ok

    @property
    def failed(self):
        return any(c["pass"] is False for c in self.checks)

    def as_dict(self):
        out = {
            "case": self.case.as_dict(),
            "prediction": self.prediction,
            "oracle_dims": self.oracle_dims,
            "flat_dim": self.flat_dim,
            "checks": self.checks,
            "timing_ms": round(self.timing_ms, 3),
        }
        out.update(self.extra)
        return _bigints(out)


def _bigints(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return str(int(obj)) if abs(int(obj)) >= BIG else int(obj)
    if isinstance(obj, dict):
        return {k: _bigints(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_bigints(v) for v in obj]
    return obj


# ----------------------------------------------------------------------------
# argument handling
# ----------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(message)


def _labels_or_espec(text):
    if text is None:
        raise ConfigurationError("--e is required")
    if "," in text or text.strip().isdigit():
        try:
            return None, tuple(int(t) for t in text.split(","))
        except ValueError as exc:
            raise ConfigurationError(f"bad label list {text!r}") from exc
    return parse_espec(text), None


def case_from_args(args):
    if args.structure is None or args.n is None or args.k is None:
        raise ConfigurationError("--structure, --n, --e and --k are required")
    espec, labels = _labels_or_espec(args.e)
    if espec is not None:
        espec = check_supported(args.n, args.structure, espec)
    return CaseSpec(args.structure, args.n, args.k, espec, labels)


def build_parser():
    p = _Parser(prog="prolong", description="Prolongation profiles, oracles and solution checks.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, case=True):
        if case:
            sp.add_argument("--structure", choices=KINDS)
            sp.add_argument("--n", type=int)
            sp.add_argument("--e", help="bundle descriptor (trivial, lambda1, sym2, sym0(2)) or comma-separated labels")
            sp.add_argument("--k", type=int)
        sp.add_argument("--format", choices=("json", "text"), default="text")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--cap", type=int, default=DEFAULT_LEVEL_CAP, help="size cap for oracle levels (n^i dim E)")

    common(sub.add_parser("profile", help="predicted graded profile"))
    common(sub.add_parser("oracle", help="classical prolongations versus the prediction"))
    fs = sub.add_parser("flat-solve", help="polynomial solutions on flat space")
    common(fs)
    fs.add_argument("--basis", action="store_true", help="print the solution basis")
    cc = sub.add_parser("curved-check", help="residuals of explicit solutions of a closed system")
    common(cc)
    cc.add_argument("--system", choices=SYSTEMS)
    cc.add_argument("--chart", choices=CHARTS, default="flat")
    cc.add_argument("--points", type=int, default=5)
    su = sub.add_parser("suite", help="run the whole catalog")
    common(su, case=False)
    su.add_argument("--n", type=int, nargs="+", default=[3])
    su.add_argument("--no-curved", action="store_true", help="skip the symbolic residual checks")
    return p


# ----------------------------------------------------------------------------
# the individual steps
# ----------------------------------------------------------------------------


def _labels(case):
    s = make_structure(case.structure_kind, case.n)
    E = case.E_labels if case.E_labels is not None else s.labels_for(case.espec)
    return s, E


def do_profile(case, rep):
    s, E = _labels(case)
    prof = graded_profile(s, E, case.k)
    rep.prediction = {"labels": list(prof.V_labels), "N": prof.N, "total": prof.total_dim, "levels": list(prof.level_dims)}
    rep.check("levels sum to the Weyl dimension", sum(prof.level_dims) == weyl_dimension(s.g_root_data, prof.V_labels))
    return prof


def do_oracle(case, rep, cap):
    prof = do_profile(case, rep)
    res = classical_prolongations(case.n, case.structure_kind, case.require_espec("oracle"), case.k, cap=cap)
    dims = res.dims
    rep.oracle_dims = dims
    for i, want in enumerate(prof.level_dims):
        got = dims[i] if i < len(dims) else 0
        if got is None:
            rep.check(f"oracle level {i}", None, "skipped: above the size cap")
        else:
            rep.check(f"oracle level {i}", got == want, f"{got} vs {want}")
    if res.zero_level is None:
        rep.check("oracle terminates at N", None, "skipped: above the size cap")
    else:
        rep.check("oracle terminates at N", res.zero_level == prof.N + 1, f"first zero level {res.zero_level}")
    if not res.skipped:
        rep.check("oracle total equals Weyl dimension", sum(dims) == prof.total_dim, sum(dims))
    return res


def do_flat(case, rep, basis=False):
    prof = do_profile(case, rep)
    sol = solution_space(case.n, case.structure_kind, case.require_espec("flat-solve"), case.k, check=False)
    rep.flat_dim = sol.dim
    rep.check("kernel dim equals prediction", sol.dim == prof.total_dim, f"{sol.dim} vs {prof.total_dim}")
    rep.check("degree N+1 recomputation is stable", sol.stable_dim == sol.dim, sol.stable_dim)
    rep.check("a solution with vanishing (N-1)-jet exists", sol.vanishing_jet_dim > 0, sol.vanishing_jet_dim)
    if basis:
        rep.extra["basis"] = [[[str(x) for x in row] for row in s.coeffs.to_object_fractions()] for s in sol.basis]
    return sol


def do_hodge(case, rep, seed):
    gm = build_model(case.n, case.structure_kind, case.require_espec("the identity suite"), case.k)
    phi = verify_phi(gm, check_equivariance=False)
    for name, ok, detail in phi.checks:
        rep.check(name, ok, detail)
    rng = np.random.default_rng(seed)
    dimE = gm.levels[0].dim
    ok_ds = ok_range = ok_perturb = True
    for _ in range(5):
        Sigma = splitting_L(gm, random_section(rng, case.n, dimE, gm.N + 1))
        ok_ds &= all(c.is_zero() for c in deltastar_of_tilde_nabla(gm, Sigma))
        ok_range &= check_splitting_range(gm, Sigma)
        ok_perturb &= not check_splitting_range(gm, perturb_top(Sigma))
    rep.check("delta*(tilde nabla L sigma) = 0", ok_ds)
    rep.check("L sigma lies in the splitting range", ok_range)
    rep.check("perturbed top component is rejected", ok_perturb)


def do_curved(system, chart, n, rep, seed, points):
    geo = geometry(n, chart)
    pts = random_points(n, points, seed)
    sols = known_solutions(n, chart, system)
    rep.extra.update(system=system, chart=chart, generators=len(sols))
    for s in sols:
        bad = [pt for pt in pts if any(v != 0 for v in residual(geo, s, pt))]
        rep.check(f"{chart} {system}: {s.label}", not bad, f"nonzero at {[tuple(map(str, p)) for p in bad]}" if bad else f"{len(pts)} points")
    ns = random_non_solution(n, chart, system, seed)
    hit = any(v != 0 for pt in pts for v in residual(geo, ns, pt))
    rep.check(f"{chart} {system}: seeded non-solution is rejected", hit)


# ----------------------------------------------------------------------------
# output
# ----------------------------------------------------------------------------


def _emit(rep, fmt, out):
    if fmt == "json":
        out.write(json.dumps(rep.as_dict()) + "\n")
        return
    c = rep.case
    head = f"{c.structure_kind} n={c.n} E={c.espec if c.espec is not None else list(c.E_labels)} k={c.k}"
    out.write(head + "\n")
    if rep.prediction:
        p = rep.prediction
        out.write(f"  V labels {p['labels']}  N {p['N']}  total {p['total']}  levels {p['levels']}\n")
    if rep.oracle_dims is not None:
        out.write(f"  oracle dims {rep.oracle_dims}\n")
    if rep.flat_dim is not None:
        out.write(f"  flat kernel dim {rep.flat_dim}\n")
    for key, val in rep.extra.items():
        if key != "basis":
            out.write(f"  {key} {val}\n")
        else:
            for i, b in enumerate(val):
                out.write(f"  basis[{i}] {b}\n")
    for chk in rep.checks:
        tag = {True: "PASS", False: "FAIL", None: "SKIP"}[chk["pass"]]
        extra = f" ({chk['detail']})" if chk["detail"] else ""
        out.write(f"  {tag} {chk['name']}{extra}\n")
    verdict = "FAIL" if rep.failed else "PASS"
    out.write(f"  verdict {verdict}  [{rep.timing_ms:.0f} ms]\n")


def _run_one(fn, case, args, out):
    rep = Report(case)
    t0 = time.perf_counter()
    try:
        fn(rep)
    except VerificationError as exc:
        rep.check("internal identities", False, exc)
    except ResourceError as exc:
        rep.check("resource cap", None, exc)
    rep.timing_ms = (time.perf_counter() - t0) * 1000
    _emit(rep, args.format, out)
    return rep


def _curved_case(args):
    if args.system:
        kind, espec, k = CASE_FOR_SYSTEM[args.system]
        return args.system, CaseSpec(kind, args.n if args.n is not None else 3, k, parse_espec(espec))
    case = case_from_args(args)
    key = (case.structure_kind, str(case.espec), case.k)
    if key not in SYSTEM_FOR_CASE:
        raise ConfigurationError(f"no closed system is coded for {key}; choose --system from {SYSTEMS}")
    return SYSTEM_FOR_CASE[key], case


def run(argv, out=None, err=None):
    """Run the command line; returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise ConfigurationError("a subcommand is required: profile, oracle, flat-solve, curved-check, suite")
        reports = []
        if args.command == "profile":
            case = case_from_args(args)
            reports.append(_run_one(lambda r: do_profile(case, r), case, args, out))
        elif args.command == "oracle":
            case = case_from_args(args)
            case.require_espec("oracle")
            reports.append(_run_one(lambda r: do_oracle(case, r, args.cap), case, args, out))
        elif args.command == "flat-solve":
            case = case_from_args(args)
            case.require_espec("flat-solve")
            reports.append(_run_one(lambda r: do_flat(case, r, args.basis), case, args, out))
        elif args.command == "curved-check":
            system, case = _curved_case(args)
            if case.n < 3 and system in ("tracefree_hessian", "conformal_killing"):
                raise ConfigurationError("metric systems need n >= 3")

            def step(r):
                do_profile(case, r)
                do_curved(system, args.chart, case.n, r, args.seed, args.points)

            reports.append(_run_one(step, case, args, out))
        else:
            reports += run_suite(args, out)
    except ConfigurationError as exc:
        err.write(f"prolong: configuration error: {exc}\n")
        return EXIT_CONFIG
    except ProlongationError as exc:
        err.write(f"prolong: {exc}\n")
        return EXIT_FAIL
    return EXIT_FAIL if any(r.failed for r in reports) else EXIT_OK


def run_suite(args, out):
    reports = []
    for n in args.n:
        for cc in catalog_cases(n):
            case = CaseSpec(cc.kind, n, cc.k, cc.espec)

            def step(r, case=case):
                do_oracle(case, r, args.cap)
                do_flat(case, r)
                do_hodge(case, r, args.seed)

            reports.append(_run_one(step, case, args, out))
        if args.no_curved or n < 3:
            continue
        for system in SYSTEMS:
            kind, espec, k = CASE_FOR_SYSTEM[system]
            case = CaseSpec(kind, n, k, parse_espec(espec))
            charts = ("flat",) if system == "conformal_killing" else CHARTS
            for chart in charts:
                reports.append(_run_one(lambda r, s=system, c=chart, case=case: do_curved(s, c, n, r, args.seed, 5), case, args, out))
    return reports


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
