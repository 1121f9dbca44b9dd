"""Command-line front end: ``effectalg <command> [options]``.

Exit codes: 0 when every executed check passes, 1 when a check fails
(a theorem-level violation, reported with witnesses), 2 for unreadable or
malformed input and calls outside an operation's domain.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import commutative_mv as cm
from . import jc_matrix as jc
from . import serialization as io
from .effect_core import (
    PreconditionError,
    StructuralError,
    classify,
    derive_order,
    state_space,
    validate_effect_algebra,
)
from .fixtures import path as fixture_path
from .mv_core import validate_mv
from .state_ops import (
    DEFAULT_MAX_N,
    EnumerationRefused,
    enumerate_state_operators,
    quotient_state_operator,
    validate_state_operator,
)
from .suite import CHECKS, run_suite

COMMANDS = (
    "validate", "classify", "enumerate", "check-tau", "quotient", "luders", "ks-check",
    "decompose", "support", "strong", "ce", "mvce", "suite",
)

FAILURES = (
    cm.TheoremViolation,
    cm.InternalError,
    jc.InternalConsistencyError,
    jc.SupportCertificationError,
    jc.DecompositionError,
    AssertionError,
)
BAD_INPUT = (io.InputError, StructuralError, PreconditionError, EnumerationRefused, jc.InvalidPVM, ValueError)


class Abort(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def resolve(p: Optional[str], flag: str) -> str:
    """An existing path, or the name of a bundled fixture file."""
    if p is None:
        raise Abort(2, f"{flag} is required for this command")
    if os.path.exists(p):
        return p
    bundled = fixture_path(os.path.basename(p))
    if os.path.exists(bundled):
        return bundled
    raise Abort(2, f"{flag}: no such file {p!r} (and no bundled fixture of that name)")


def load(args, flag: str) -> Any:
    return io.read_json(resolve(getattr(args, flag.lstrip("-").replace("-", "_")), flag))


# ---------------------------------------------------------------------------
# finite algebras


def cmd_validate(args) -> Tuple[bool, dict]:
    E, M = io.parse_algebra(load(args, "--algebra"))
    rep = validate_effect_algebra(E)
    out = {"n": E.n, "effect_algebra": rep.to_dict()}
    ok = rep.valid
    if M is not None:
        mrep = validate_mv(M)
        out["mv_algebra"] = mrep.to_dict()
        ok = ok and mrep.valid
    return ok, out


def _valid_algebra(args):
    E, _ = io.parse_algebra(load(args, "--algebra"))
    rep = validate_effect_algebra(E)
    if not rep.valid:
        raise PreconditionError(f"not an effect algebra: {rep.to_dict()['violations'][:3]}")
    return E


def cmd_classify(args) -> Tuple[bool, dict]:
    E = _valid_algebra(args)
    o = derive_order(E)
    return True, {
        "n": E.n,
        "classification": classify(E).to_dict(),
        "orthosupplement": list(o.perp),
        "states": state_space(E).to_dict(),
    }


def cmd_enumerate(args) -> Tuple[bool, dict]:
    E = _valid_algebra(args)
    ops = enumerate_state_operators(E, max_n=args.max_n)
    listed = []
    for t in ops:
        r = validate_state_operator(E, t)
        listed.append({"tau": list(t.tau), "strong": r.is_strong, "faithful": r.is_faithful, "kernel": list(r.kernel)})
    return True, {"n": E.n, "count": len(ops), "operators": listed}


def cmd_check_tau(args) -> Tuple[bool, dict]:
    E = _valid_algebra(args)
    tau = io.parse_tau(load(args, "--tau"))
    r = validate_state_operator(E, tau)
    ok = r.is_state_operator and all(r.lemma_clauses.values())
    return ok, {"tau": tau, **r.to_dict()}


def cmd_quotient(args) -> Tuple[bool, dict]:
    E = _valid_algebra(args)
    tau = io.parse_tau(load(args, "--tau"))
    q = quotient_state_operator(E, tau)
    ok = q.report.is_state_operator and bool(q.report.is_faithful)
    return ok, {
        "kernel": list(q.kernel),
        "class_map": list(q.quotient.class_map),
        "representatives": list(q.quotient.representatives),
        "quotient": q.quotient.algebra.to_dict(),
        "tau_hat": list(q.tau_hat.tau),
        "tau_hat_report": q.report.to_dict(),
    }


# ---------------------------------------------------------------------------
# matrix maps


def _tol(args) -> jc.Tolerances:
    return jc.Tolerances(args.eps_eq, args.eps_psd)


def _map(args) -> jc.HermitianMap:
    if args.map:
        return io.parse_map(load(args, "--map"))
    if args.pvm:
        return jc.luders_operator(io.parse_pvm(load(args, "--pvm")), _tol(args))
    raise Abort(2, "one of --map or --pvm is required")


def cmd_luders(args) -> Tuple[bool, dict]:
    tol = _tol(args)
    P = io.parse_pvm(load(args, "--pvm"))
    m = jc.luders_operator(P, tol)
    rep = jc.check_state_operator(m, tol, args.seed)
    ce = jc.is_conditional_expectation(m, tol, args.seed)
    out = {"dim": m.dim, "blocks": len(P), "report": rep.to_dict(), "conditional_expectation": ce.value}
    if args.matrix:
        a = io.parse_hermitian(load(args, "--matrix"))
        out["image"] = m(a)
        out["fixed"] = jc.opnorm(m(a) - a) <= tol.eps_eq
        out["commutes_with_pvm"] = jc.commutes_with_pvm(a, P, tol)
    ok = rep.is_state_operator and rep.faithful and ce.value
    return ok, out


def cmd_ks_check(args) -> Tuple[bool, dict]:
    tol = _tol(args)
    m = _map(args)
    if args.matrix:
        effects = [io.parse_hermitian(load(args, "--matrix"))]
    else:
        rng = np.random.default_rng(args.seed)
        effects = [jc.random_effect(m.dim, rng) for _ in range(100)]
    gaps = [jc.kadison_schwarz_check(m, a, tol) for a in effects]
    bad = [i for i, g in enumerate(gaps) if not g.ok]
    return not bad, {
        "effects": len(effects),
        "min_lhs_gap": min(g.lhs_gap for g in gaps),
        "min_rhs_gap": min(g.rhs_gap for g in gaps),
        "witnesses": [effects[i] for i in bad[:3]],
    }


def cmd_support(args) -> Tuple[bool, dict]:
    tol = _tol(args)
    m = _map(args)
    s = jc.support_projection(m, tol, args.seed)
    return True, {"e": s.e, "rank": s.rank, "faithful": s.rank == m.dim, "certification_family": s.family_size}


def cmd_decompose(args) -> Tuple[bool, dict]:
    tol = _tol(args)
    m = _map(args)
    d = jc.decompose(m, tol, args.seed)
    return True, {
        "e": d.e,
        "mu": d.mu.to_dict(),
        "range_dim": int(d.range_mu.shape[1]),
        "e_tau_dim": int(d.e_tau.shape[1]),
        "composition_error": d.composition_error,
        "range_distance": d.range_distance,
    }


def cmd_strong(args) -> Tuple[bool, dict]:
    T = io.parse_stochastic(load(args, "--matrix"))
    rep = cm.validate_stochastic_idempotent(T)
    if not rep.valid:
        return False, {"validation": rep.to_dict()}
    s = cm.is_strong_commutative(T, seed=args.seed)
    c = cm.is_ce_commutative(T, seed=args.seed)
    return s.value == c.value, {
        "strong": s.value,
        "witness": s.witness,
        "conditional_expectation": c.value,
        "kernel_support": list(cm.kernel_ideals(T).K),
    }


def cmd_ce(args) -> Tuple[bool, dict]:
    if args.matrix and not (args.map or args.pvm):
        T = io.parse_stochastic(load(args, "--matrix"))
        rep = cm.validate_stochastic_idempotent(T)
        if not rep.valid:
            return False, {"validation": rep.to_dict()}
        c = cm.is_ce_commutative(T, seed=args.seed)
        s = cm.is_strong_commutative(T, seed=args.seed)
        out: Dict[str, Any] = {"conditional_expectation": c.value, "witness": c.witness, "strong": s.value}
        w = cm.jordan_witness(T)
        out["jordan"] = w is None
        if w is None:
            js = cm.jordan_support_characterization(T)
            out["jordan_support"] = {"K": list(js.K), "extension_check": js.extension_check}
        return c.value == s.value, out
    tol = _tol(args)
    m = _map(args)
    rep = jc.check_state_operator(m, tol, args.seed)
    if not rep.is_state_operator:
        return False, {"report": rep.to_dict()}
    ce = jc.is_conditional_expectation(m, tol, args.seed)
    jo = jc.is_jordan_state_operator(m, tol=tol, seed=args.seed)
    return True, {
        "report": rep.to_dict(),
        "conditional_expectation": ce.value,
        "witness": list(ce.witness) if ce.witness else None,
        "jordan": jo.value,
        "jordan_witness": list(jo.witness) if jo.witness else None,
    }


def cmd_mvce(args) -> Tuple[bool, dict]:
    data = load(args, "--prob")
    P = io.parse_prob(data)
    if args.matrix:
        T = io.parse_stochastic(load(args, "--matrix"))
        r = cm.mv_ce_from_strong_operator(T, P)
        return r.ok, {"weights": r.weights, "crisp": r.crisp, "identities_checked": r.checked}
    blocks = io.parse_blocks(load(args, "--blocks") if args.blocks else data)
    space, part = cm.FiniteProbSpace(P), cm.BlockPartition(blocks)
    q = cm.quotient_strong_operator(space, part)
    out: Dict[str, Any] = {"support": list(q.points), "quotient_T": q.T, "quotient_blocks": q.blocks}
    ok = True
    if args.event:
        a = io.parse_prob(io.read_json(resolve(args.event, "--event")))
        out["expectation"] = cm.mv_conditional_expectation(space, part, a)
        out["clauses"] = cm.conditional_expectation_clauses(space, part, a)
        ok = all(out["clauses"].values())
    return ok, out


def cmd_suite(args) -> Tuple[bool, dict]:
    only = args.only.split(",") if args.only else None
    unknown = [x for x in only or [] if x not in CHECKS]
    if unknown:
        raise Abort(2, f"unknown checks: {unknown}")
    results = run_suite(args.seed, _tol(args), only)
    return all(r.status == "pass" for r in results), {
        "checks": [r.to_dict(timing=args.timing) for r in results],
        "passed": sum(r.status == "pass" for r in results),
        "total": len(results),
    }


HANDLERS = {
    "validate": cmd_validate,
    "classify": cmd_classify,
    "enumerate": cmd_enumerate,
    "check-tau": cmd_check_tau,
    "quotient": cmd_quotient,
    "luders": cmd_luders,
    "ks-check": cmd_ks_check,
    "decompose": cmd_decompose,
    "support": cmd_support,
    "strong": cmd_strong,
    "ce": cmd_ce,
    "mvce": cmd_mvce,
    "suite": cmd_suite,
}


# ---------------------------------------------------------------------------
# rendering


def render_markdown(report: dict) -> str:
    lines = [f"# effectalg {report['command']}", ""]
    lines.append(f"- status: **{'PASS' if report['ok'] else 'FAIL'}**")
    lines.append(f"- seed: {report['seed']}")
    tol = report["tolerances"]
    lines.append(f"- tolerances: eps_eq={tol['eps_eq']}, eps_psd={tol['eps_psd']}")
    if "error" in report:
        lines += ["", f"**error:** {report['error']}"]
    res = report.get("result", {})
    if report["command"] == "suite" and "checks" in res:
        lines += ["", "| check | status | details |", "|---|---|---|"]
        for c in res["checks"]:
            det = ", ".join(f"{k}={v}" for k, v in c["details"].items() if not isinstance(v, (dict, list)))
            if "seconds" in c:
                det += f", {c['seconds']} s"
            lines.append(f"| {c['name']} | {c['status']} | {det} |")
            if c["witnesses"]:
                lines.append(f"|  | witnesses | `{io.dumps(c['witnesses'][:2]).strip()}` |")
        lines += ["", f"{res['passed']}/{res['total']} checks passed"]
    elif res:
        lines += ["", "```json", io.dumps(res).rstrip(), "```"]
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps-eq", type=float, default=jc.DEFAULT_TOL.eps_eq, help="equality tolerance")
    common.add_argument("--eps-psd", type=float, default=jc.DEFAULT_TOL.eps_psd, help="eigenvalue slack")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized checks (suite: 42, else 0)")
    common.add_argument("--format", choices=("json", "markdown"), default="json")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings in the report")
    for flag, what in (
        ("--algebra", "effect algebra or MV-algebra JSON"),
        ("--tau", "state operator candidate JSON"),
        ("--matrix", "Hermitian matrix JSON, or stochastic matrix JSON for strong/ce/mvce"),
        ("--map", "Hermitian map JSON"),
        ("--pvm", "projection-valued measure JSON"),
        ("--prob", "probability vector JSON (may carry blocks)"),
        ("--blocks", "block partition JSON"),
        ("--event", "fuzzy event JSON for mvce"),
    ):
        common.add_argument(flag, help=what + " (bundled fixture names are accepted)")
    common.add_argument("--max-n", type=int, default=DEFAULT_MAX_N, help="size bound for enumeration")
    common.add_argument("--only", help="comma-separated subset of suite checks")

    parser = argparse.ArgumentParser(prog="effectalg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for c in COMMANDS:
        sub.add_parser(c, parents=[common], help=(HANDLERS[c].__doc__ or c).splitlines()[0])
    return parser


def run(argv: Optional[List[str]] = None) -> Tuple[int, str]:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = 42 if args.command == "suite" else 0
    report: Dict[str, Any] = {
        "command": args.command,
        "seed": args.seed,
        "tolerances": {"eps_eq": args.eps_eq, "eps_psd": args.eps_psd},
    }
    t0 = time.perf_counter()
    try:
        if args.eps_eq <= 0 or args.eps_psd <= 0:
            raise Abort(2, "tolerances must be positive")
        ok, result = HANDLERS[args.command](args)
        report.update(ok=bool(ok), result=result)
        code = 0 if ok else 1
    except Abort as exc:
        report.update(ok=False, error=str(exc))
        code = exc.code
    except FAILURES as exc:
        report.update(ok=False, error=f"{type(exc).__name__}: {exc}")
        code = 1
    except BAD_INPUT as exc:
        report.update(ok=False, error=f"{type(exc).__name__}: {exc}")
        code = 2
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)
    text = io.dumps(report) if args.format == "json" else render_markdown(io.jsonable(report))
    return code, text


def main(argv: Optional[List[str]] = None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
