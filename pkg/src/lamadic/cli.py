"""Command-line front end: every computation as a subcommand, with text or
JSON output, a deterministic seed, and an exit-code taxonomy that separates
argument errors (1), computation errors (2), and hypothesis failures (3).
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .ring import RingCtx, CycloElt, RingError, DomainError
from .matrices import (
    HermitianForm,
    MatLocal,
    classify_membership,
    filtration_order_exponent,
    legendre,
    lift_su,
    random_su_element,
    weil_gram_and_epsilon,
)
from .commutators import (
    matrix_commutator_check,
    su_commutator_span_check,
    verify_commutator_identity,
)
from .classnum import c_lr, demjanenko_det, h_minus, kappa_and_t
from .lattices import (
    infinity_type_matrix_check,
    lattice_index_check,
    u_prime_basis,
    u_reduction_order,
)
from .curves import (
    HypothesisError,
    PolySyntaxError,
    discriminant,
    division_degree_report,
    find_simple_prime,
    galois_certificate,
    parse_poly,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def build_parser() -> _Parser:
    p = _Parser(prog="lamadic", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text, *flags):
        sp = sub.add_parser(name, help=help_text)
        for flag, kind, required in flags:
            sp.add_argument(flag, type=kind, required=required)
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--seed", type=int, default=0)
        return sp

    add("eps", "square class of r modulo ell", ("--ell", int, True), ("--r", int, True))
    add("c-lr", "the order r_ell and the constant c", ("--ell", int, True), ("--r", int, True))
    add("h-minus", "relative class number", ("--ell", int, True))
    add("demjanenko", "half-system determinant report", ("--ell", int, True), ("--r", int, True))
    add("kappa", "index bound and exact exponent", ("--ell", int, True), ("--r", int, True))
    add(
        "su-order",
        "exponent e with |SU(V/lambda^n)_k| = ell^e",
        ("--ell", int, True), ("--d", int, True), ("--n", int, True), ("--k", int, True),
    )
    add("verify-commutator", "symbolic commutator identity", ("--n", int, True))
    add(
        "lift-check",
        "randomized constructive-lift verification",
        ("--ell", int, True), ("--d", int, True), ("--n", int, True), ("--trials", int, False),
    )
    add("lattice-index", "cokernel exponent cross-check", ("--ell", int, True), ("--r", int, True))
    ccur = add(
        "check-curve",
        "hypothesis checks for a monic integer polynomial",
        ("--ell", int, True), ("--poly", str, True), ("--budget", int, False),
    )
    ddeg = add(
        "division-degree",
        "degree report for the torsion field",
        ("--ell", int, True), ("--poly", str, True), ("--budget", int, False),
    )
    ddeg.add_argument("--override-hypotheses", action="store_true")
    add("selftest", "run the property grid", ("--trials", int, False))
    return p


def _cmd_eps(args):
    if args.r % args.ell == 0:
        raise DomainError("ell must not divide r")
    _, square_class, eps = weil_gram_and_epsilon(args.ell, args.r)
    _emit(args, {"ell": args.ell, "r": args.r, "epsilon": eps,
                 "gram_square_class": square_class}, str(eps))
    return 0


def _cmd_c_lr(args):
    r_ell, c = c_lr(args.ell, args.r)
    _emit(args, {"ell": args.ell, "r": args.r, "r_ell": r_ell, "c": c},
          f"r_ell = {r_ell}, c = {c}")
    return 0


def _cmd_h_minus(args):
    h = h_minus(args.ell)
    _emit(args, {"ell": args.ell, "h_minus": h}, str(h))
    return 0


def _cmd_demjanenko(args):
    rep = demjanenko_det(args.ell, args.r)
    if args.json:
        print(json.dumps(rep.to_json_dict(), sort_keys=True))
    else:
        print(
            f"det = {rep.det}, h_minus = {rep.h_minus}, c = {rep.c_lr}, "
            f"kappa_bound = {rep.kappa_bound}, t = {rep.t}"
        )
    return 0


def _cmd_kappa(args):
    kappa, t = kappa_and_t(args.ell, args.r)
    _emit(args, {"ell": args.ell, "r": args.r, "kappa_bound": kappa, "t": t},
          f"kappa_bound = {kappa}, t = {t}")
    return 0


def _cmd_su_order(args):
    e = filtration_order_exponent(args.ell, args.d, args.n, args.k)
    _emit(args, {"ell": args.ell, "d": args.d, "n": args.n, "k": args.k, "exponent": e},
          f"|SU(V/lambda^{args.n})_{args.k}| = {args.ell}^{e}")
    return 0


def _cmd_verify_commutator(args):
    ok, residual = verify_commutator_identity(args.n)
    _emit(
        args,
        {"n": args.n, "holds": ok,
         "residual": [[deg, list(word), str(coef)] for (deg, word), coef in residual]},
        "identity holds" if ok else f"RESIDUAL: {residual}",
    )
    return 0 if ok else 2


def _cmd_lift_check(args):
    trials = args.trials or 20
    rng = random.Random(args.seed)
    n = args.n
    if n < 2:
        raise DomainError("need n >= 2")
    form1 = HermitianForm.standard(RingCtx(args.ell, 1), args.d)
    passed = 0
    for _ in range(trials):
        a = random_su_element(form1, n - 1, rng)
        form_prev = HermitianForm.standard(RingCtx(args.ell, n - 1), args.d)
        lifted = lift_su(a, form_prev)
        form_n = HermitianForm.standard(RingCtx(args.ell, n), args.d)
        verdict = classify_membership(lifted, form_n)
        if verdict.kind == "SU" and lifted.truncate(n - 1) == a:
            passed += 1
    ok = passed == trials
    _emit(args, {"ell": args.ell, "d": args.d, "n": n, "trials": trials, "passed": passed},
          f"{passed}/{trials} lifts verified")
    return 0 if ok else 2


def _cmd_lattice_index(args):
    t_prime = lattice_index_check(args.ell, args.r)
    _emit(args, {"ell": args.ell, "r": args.r, "t": t_prime}, f"t = {t_prime}")
    return 0


def _cmd_check_curve(args):
    f = parse_poly(args.poly)
    if not f.is_monic:
        raise DomainError("polynomial must be monic")
    budget = args.budget or 200000
    disc = discriminant(f)
    if disc == 0:
        raise HypothesisError("polynomial is not separable")
    simple_p, proven = find_simple_prime(disc, args.ell, budget)
    verdict = galois_certificate(f)
    payload = {
        "ell": args.ell,
        "poly": str(f),
        "disc": disc,
        "simple_prime": simple_p,
        "simple_prime_proven": proven,
        "galois": verdict.status,
        "epsilon": legendre(f.degree, args.ell),
    }
    ok = verdict.status == "symmetric" and simple_p is not None
    _emit(args, payload,
          f"disc = {disc}, simple prime = {simple_p}, galois = {verdict.status}")
    if not ok:
        raise HypothesisError(
            f"galois = {verdict.status}, simple prime = {simple_p}"
        )
    return 0


def _cmd_division_degree(args):
    f = parse_poly(args.poly)
    rep = division_degree_report(
        args.ell, f,
        budget=args.budget or 200000,
        override_hypotheses=args.override_hypotheses,
    )
    if args.json:
        print(json.dumps(rep.to_json_dict(), sort_keys=True))
    else:
        print(f"degree = {rep.degree_coeff} * {args.ell}^{rep.degree_ell_exponent}")
        if rep.discrepancy is not None:
            print(f"reference = {rep.reference['coeff']} * "
                  f"{args.ell}^{rep.reference['ell_exponent']}; "
                  f"exponent difference {rep.discrepancy['ell_exponent_difference']}")
    return 0


def _cmd_selftest(args):
    rng = random.Random(args.seed)
    results = {}

    def check(name, fn):
        results[name] = bool(fn())

    ctx = RingCtx(3, 4)
    check("ring_digit_roundtrip", lambda: all(
        CycloElt(ctx, CycloElt.from_poly(CycloElt(ctx, tuple(ds)).lift_poly(), ctx).digits).digits == tuple(ds)
        for ds in [(0, 1, 2, 0), (2, 2, 2, 2), (1, 0, 0, 1)]
    ))
    check("conjugate_congruence", lambda: all(
        (CycloElt.lam(RingCtx(ell, 2), 1)
         + CycloElt.lam(RingCtx(ell, 2), 1).conjugate()).ord_lambda >= 2
        for ell in (3, 5, 7, 11)
    ))
    check("su_order_anchor", lambda: filtration_order_exponent(11, 7, 10, 1) == 219)
    check("commutator_identity", lambda: all(
        verify_commutator_identity(n)[0] for n in range(3, 8)
    ))
    check("span_small", lambda: su_commutator_span_check(3, 3, 3))

    def lift_trials():
        form1 = HermitianForm.standard(RingCtx(3, 1), 2)
        for _ in range(args.trials or 5):
            a = random_su_element(form1, 3, rng)
            form3 = HermitianForm.standard(RingCtx(3, 3), 2)
            if classify_membership(a, form3).kind != "SU":
                return False
        return True

    check("random_su_members", lift_trials)
    check("demjanenko_small", lambda: demjanenko_det(5, 2).t == 0)
    check("h_minus_small", lambda: h_minus(7) == 1)
    check("lattice_index_small", lambda: lattice_index_check(5, 3) in (0, 1))
    check("infinity_type_matrix", lambda: infinity_type_matrix_check(5, 2))
    check("u_prime_rank", lambda: len(u_prime_basis(7, 8).log_generators) == 3)
    check("reduction_order_positive", lambda: u_reduction_order(5, 2, 4)[0] > 0)
    check("eps_example", lambda: legendre(8, 11) == -1)
    ok = all(results.values())
    payload = {"seed": args.seed, "results": results, "ok": ok}
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for name in sorted(results):
            print(f"{'PASS' if results[name] else 'FAIL'} {name}")
        print("OK" if ok else "FAILED")
    return 0 if ok else 2


_COMMANDS = {
    "eps": _cmd_eps,
    "c-lr": _cmd_c_lr,
    "h-minus": _cmd_h_minus,
    "demjanenko": _cmd_demjanenko,
    "kappa": _cmd_kappa,
    "su-order": _cmd_su_order,
    "verify-commutator": _cmd_verify_commutator,
    "lift-check": _cmd_lift_check,
    "lattice-index": _cmd_lattice_index,
    "check-curve": _cmd_check_curve,
    "division-degree": _cmd_division_degree,
    "selftest": _cmd_selftest,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    try:
        return _COMMANDS[args.command](args)
    except HypothesisError as e:
        _error(args, str(e), 3)
        return 3
    except PolySyntaxError as e:
        _error(args, str(e), 1)
        return 1
    except (RingError, DomainError, ValueError, ArithmeticError, AssertionError) as e:
        _error(args, f"{type(e).__name__}: {e}", 2)
        return 2


def _error(args, message: str, code: int):
    if getattr(args, "json", False):
        print(json.dumps({"error": message, "code": code}, sort_keys=True))
    else:
        print(f"error: {message}", file=sys.stderr)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
