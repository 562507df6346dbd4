import io
import json

import pytest

from prolongation.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, Report, CaseSpec, run

KEYS = {"case", "prediction", "oracle_dims", "flat_dim", "checks", "timing_ms"}


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def reports(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_profile_conformal_killing():
    code, out, _ = call("profile", "--structure", "riemannian", "--n", "3", "--e", "lambda1", "--k", "1", "--format", "json")
    assert code == EXIT_OK
    (r,) = reports(out)
    assert KEYS <= set(r)
    assert r["prediction"]["total"] == 10
    assert r["prediction"]["N"] == 2
    assert r["prediction"]["levels"] == [3, 4, 3]


def test_profile_forms_in_six_dimensions():
    code, out, _ = call("profile", "--structure", "riemannian", "--n", "6", "--e", "lambda2", "--k", "1", "--format", "json")
    assert code == EXIT_OK
    assert reports(out)[0]["prediction"]["total"] == 56


def test_profile_accepts_raw_labels():
    code, out, _ = call("profile", "--structure", "affine", "--n", "3", "--e", "1,0", "--k", "1", "--format", "json")
    assert code == EXIT_OK
    assert reports(out)[0]["prediction"]["total"] == 6


def test_oracle_second_order_conformal():
    code, out, _ = call("oracle", "--structure", "riemannian", "--n", "3", "--e", "lambda1", "--k", "2", "--format", "json")
    assert code == EXIT_OK
    r = reports(out)[0]
    assert sum(r["oracle_dims"]) == 35
    assert all(c["pass"] for c in r["checks"])


def test_oracle_cap_skips_levels():
    code, out, _ = call("oracle", "--structure", "riemannian", "--n", "3", "--e", "lambda1", "--k", "2", "--cap", "50", "--format", "json")
    assert code == EXIT_OK
    r = reports(out)[0]
    assert None in r["oracle_dims"]
    assert any(c["pass"] is None for c in r["checks"])


def test_flat_solve_with_basis_text():
    code, out, _ = call("flat-solve", "--structure", "affine", "--n", "3", "--e", "trivial", "--k", "2", "--basis")
    assert code == EXIT_OK
    assert "flat kernel dim 4" in out
    assert out.count("basis[") == 4
    assert "verdict PASS" in out


def test_curved_check_from_case():
    code, out, _ = call("curved-check", "--structure", "affine", "--n", "3", "--e", "lambda1", "--k", "1", "--format", "json")
    assert code == EXIT_OK
    r = reports(out)[0]
    assert r["system"] == "killing" and r["generators"] == 6


@pytest.mark.parametrize(
    "argv",
    [
        ["profile", "--bogus"],
        [],
        ["profile", "--structure", "riemannian", "--n", "3", "--e", "lambda5", "--k", "1"],
        ["profile", "--structure", "conformal", "--n", "3", "--e", "lambda1", "--k", "1"],
        ["oracle", "--structure", "affine", "--n", "3", "--e", "1,0", "--k", "1"],
        ["curved-check", "--structure", "affine", "--n", "3", "--e", "sym2", "--k", "1"],
        ["profile", "--structure", "affine", "--n", "3", "--e", "lambda1"],
    ],
)
def test_configuration_errors(argv):
    code, _, err = call(*argv)
    assert code == EXIT_CONFIG
    assert err


def test_failed_check_gives_exit_two(monkeypatch):
    import prolongation.cli as cli

    def broken(case, rep):
        rep.check("deliberately broken", False)

    monkeypatch.setattr(cli, "do_profile", broken)
    code, _, _ = call("profile", "--structure", "affine", "--n", "3", "--e", "lambda1", "--k", "1")
    assert code == EXIT_FAIL


def test_big_integers_become_strings():
    rep = Report(CaseSpec("affine", 3, 1), flat_dim=2**60)
    assert rep.as_dict()["flat_dim"] == str(2**60)
    assert Report(CaseSpec("affine", 3, 1), flat_dim=7).as_dict()["flat_dim"] == 7


def test_suite_is_deterministic():
    a = call("suite", "--n", "3", "--no-curved", "--format", "json", "--seed", "3")
    b = call("suite", "--n", "3", "--no-curved", "--format", "json", "--seed", "3")
    assert a[0] == b[0] == EXIT_OK

    def strip(text):
        rs = reports(text)
        for r in rs:
            r.pop("timing_ms")
        return rs

    assert strip(a[1]) == strip(b[1])
    assert len(strip(a[1])) == 9
