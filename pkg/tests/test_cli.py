import json

import pytest

from lamadic.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eps(capsys):
    code, out, _ = invoke(capsys, "eps", "--ell", "11", "--r", "8")
    assert code == 0 and out.strip() == "-1"
    code, out, _ = invoke(capsys, "eps", "--ell", "11", "--r", "8", "--json")
    assert json.loads(out)["epsilon"] == -1


def test_unknown_command_exits_1(capsys):
    assert invoke(capsys, "frobnicate")[0] == 1


def test_missing_flag_exits_1(capsys):
    assert invoke(capsys, "eps", "--ell", "11")[0] == 1


def test_unknown_flag_exits_1(capsys):
    assert invoke(capsys, "eps", "--ell", "11", "--r", "8", "--zap", "1")[0] == 1


def test_c_lr_and_h_minus(capsys):
    code, out, _ = invoke(capsys, "c-lr", "--ell", "11", "--r", "8", "--json")
    data = json.loads(out)
    assert code == 0 and data["r_ell"] == 10 and data["c"] == 32769
    code, out, _ = invoke(capsys, "h-minus", "--ell", "23")
    assert code == 0 and out.strip() == "3"


def test_computation_error_exits_2(capsys):
    code, out, _ = invoke(capsys, "c-lr", "--ell", "5", "--r", "10", "--json")
    assert code == 2
    assert json.loads(out)["code"] == 2


def test_demjanenko_and_kappa(capsys):
    code, out, _ = invoke(capsys, "demjanenko", "--ell", "11", "--r", "8", "--json")
    data = json.loads(out)
    assert code == 0 and data["kappa_bound"] == 0 and data["t"] == 0
    code, out, _ = invoke(capsys, "kappa", "--ell", "3", "--r", "2", "--json")
    assert json.loads(out) == {"ell": 3, "r": 2, "kappa_bound": 0, "t": 0}


def test_su_order(capsys):
    code, out, _ = invoke(
        capsys, "su-order", "--ell", "11", "--d", "7", "--n", "10", "--k", "1", "--json"
    )
    assert code == 0 and json.loads(out)["exponent"] == 219


def test_verify_commutator(capsys):
    for n in (3, 4, 6):
        code, out, _ = invoke(capsys, "verify-commutator", "--n", str(n), "--json")
        assert code == 0 and json.loads(out)["holds"] is True


def test_lift_check(capsys):
    code, out, _ = invoke(
        capsys, "lift-check", "--ell", "3", "--d", "2", "--n", "4",
        "--trials", "3", "--seed", "5", "--json",
    )
    data = json.loads(out)
    assert code == 0 and data["passed"] == 3


def test_lattice_index(capsys):
    code, out, _ = invoke(capsys, "lattice-index", "--ell", "11", "--r", "8", "--json")
    assert code == 0 and json.loads(out)["t"] == 0


def test_check_curve_hypothesis_failure_exits_3(capsys):
    code, out, err = invoke(
        capsys, "check-curve", "--ell", "11", "--poly", "x^8 + x + 1"
    )
    assert code == 3


def test_check_curve_success(capsys):
    code, out, _ = invoke(
        capsys, "check-curve", "--ell", "11", "--poly", "x^8 + x - 1", "--json"
    )
    data = json.loads(out)
    assert code == 0 and data["galois"] == "symmetric"


def test_poly_syntax_error_exits_1(capsys):
    code, _, _ = invoke(capsys, "check-curve", "--ell", "11", "--poly", "x^-1")
    assert code == 1


def test_division_degree_paths(capsys):
    code, _, _ = invoke(
        capsys, "division-degree", "--ell", "11", "--poly", "x^8 + x + 1"
    )
    assert code == 3
    code, out, _ = invoke(
        capsys,
        "division-degree", "--ell", "11", "--poly", "x^8 + x + 1",
        "--override-hypotheses", "--json",
    )
    data = json.loads(out)
    assert code == 0
    assert data["degree"]["coeff"] == 40320
    assert data["components"]["su_exponent"] == 219
    assert data["reference"] == {"coeff": 40320, "ell_exponent": 260}
    assert data["discrepancy"]["coeff_matches"] is True


def test_selftest_deterministic(capsys):
    code1, out1, _ = invoke(capsys, "selftest", "--seed", "42", "--json")
    code2, out2, _ = invoke(capsys, "selftest", "--seed", "42", "--json")
    assert code1 == code2 == 0
    assert out1 == out2
    assert json.loads(out1)["ok"] is True
