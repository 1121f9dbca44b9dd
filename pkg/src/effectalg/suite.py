"""The bundled theorem checks run by ``effectalg suite``.

Each check is a function ``(seed, tol) -> CheckResult``. Checks are
independent, seeded and deterministic; the report lists them sorted by
name.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from . import commutative_mv as cm
from . import jc_matrix as jc
from .effect_core import FiniteEffectAlgebra, classify, confirm_witness, state_space, validate_effect_algebra
from .fixtures import EFFECT_ALGEBRAS, PROB_CASES, STOCHASTIC, STRONG_CE_CASES
from .state_ops import enumerate_state_operators, induced_state, quotient_state_operator, validate_state_operator

GATE_FIXTURES = ("chain2", "chain3", "diamond", "mo2", "luk3", "luk3x3")


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | skipped
    witnesses: List = field(default_factory=list)
    details: Dict = field(default_factory=dict)
    seconds: Optional[float] = None

    def to_dict(self, timing: bool = False) -> dict:
        d = {"name": self.name, "status": self.status, "witnesses": self.witnesses, "details": self.details}
        if timing and self.seconds is not None:
            d["seconds"] = round(self.seconds, 3)
        return d


def _result(name: str, failures: List, **details) -> CheckResult:
    return CheckResult(name, "fail" if failures else "pass", failures[:10], details)


def mutate_cell(E: FiniteEffectAlgebra, rng: np.random.Generator) -> FiniteEffectAlgebra:
    """Change one cell of the sum table to a different value (possibly undefined)."""
    n = E.n
    i, j = (int(x) for x in rng.integers(0, n, size=2))
    choices = [v for v in [None, *range(n)] if v != E.sum[i][j]]
    v = choices[int(rng.integers(len(choices)))]
    table = [list(r) for r in E.sum]
    table[i][j] = v
    return FiniteEffectAlgebra(n, E.zero, E.one, table)


# ---------------------------------------------------------------------------
# finite effect algebras


def check_axiom_gate(seed: int, tol: jc.Tolerances, mutations: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    failures, rejected, accepted = [], 0, 0
    for name in GATE_FIXTURES:
        E = EFFECT_ALGEBRAS[name]()
        if not validate_effect_algebra(E).valid:
            failures.append({"fixture": name, "error": "fixture rejected"})
        for k in range(mutations):
            M = mutate_cell(E, rng)
            rep = validate_effect_algebra(M)
            if rep.valid:
                accepted += 1
                continue
            rejected += 1
            bad = [v.to_dict() for v in rep.violations if not confirm_witness(M, v)]
            if bad:
                failures.append({"fixture": name, "mutation": k, "unconfirmed": bad})
    return _result("axiom_gate", failures, rejected=rejected, accepted_valid_mutants=accepted)


def _enumerated(max_n: int = 9):
    for name, build in sorted(EFFECT_ALGEBRAS.items()):
        E = build()
        if E.n <= max_n:
            yield name, E, enumerate_state_operators(E, max_n=max_n)


def check_state_operator_lemma(seed: int, tol: jc.Tolerances) -> CheckResult:
    failures, count = [], 0
    for name, E, ops in _enumerated():
        for t in ops:
            count += 1
            clauses = validate_state_operator(E, t).lemma_clauses
            if not all(clauses.values()):
                failures.append({"fixture": name, "tau": list(t.tau), "clauses": clauses})
    return _result("state_operator_lemma", failures, operators=count)


def check_faithful_implies_strong(seed: int, tol: jc.Tolerances) -> CheckResult:
    failures, faithful = [], 0
    for name, E, ops in _enumerated():
        for t in ops:
            rep = validate_state_operator(E, t)
            faithful += rep.is_faithful
            if rep.is_faithful and not rep.is_strong:
                failures.append({"fixture": name, "tau": list(t.tau), "witness": rep.strong_witness})
    return _result("faithful_implies_strong", failures, faithful_operators=faithful)


def check_quotient_faithful(seed: int, tol: jc.Tolerances) -> CheckResult:
    failures, count = [], 0
    for name, E, ops in _enumerated():
        if not classify(E).is_mv_effect_algebra:
            continue
        for t in ops:
            count += 1
            q = quotient_state_operator(E, t)
            if not (q.report.is_state_operator and q.report.is_faithful):
                failures.append({"fixture": name, "tau": list(t.tau)})
    E = EFFECT_ALGEBRAS["diamond"]()
    q = quotient_state_operator(E, (0, 0, 3, 3))
    two_chain = EFFECT_ALGEBRAS["chain2"]()
    if q.quotient.algebra != two_chain or q.tau_hat.tau != (0, 1):
        failures.append({"fixture": "diamond", "tau": [0, 0, 3, 3], "error": "expected 2-chain with identity"})
    return _result("quotient_faithful", failures, operators=count)


def check_induced_state(seed: int, tol: jc.Tolerances) -> CheckResult:
    failures, count = [], 0
    for name, E, ops in _enumerated():
        for omega in state_space(E).vertices:
            for t in ops:
                count += 1
                try:
                    induced_state(E, t, omega)
                except (AssertionError, ValueError) as exc:
                    failures.append({"fixture": name, "tau": list(t.tau), "error": str(exc)})
    return _result("induced_state", failures, triples=count)


# ---------------------------------------------------------------------------
# matrix algebras


def random_pvm_instance(rng: np.random.Generator, max_d: int = 6):
    d = int(rng.integers(1, max_d + 1))
    k = int(rng.integers(1, d + 1))
    return jc.random_pvm(d, k, rng), jc.random_effect(d, rng)


def check_kadison_schwarz(seed: int, tol: jc.Tolerances, trials: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed)
    failures, worst = [], np.inf
    for i in range(trials):
        P, a = random_pvm_instance(rng)
        gaps = jc.kadison_schwarz_check(jc.luders_operator(P, tol), a, tol)
        worst = min(worst, gaps.lhs_gap, gaps.rhs_gap)
        if not gaps.ok:
            failures.append({"instance": i, "lhs_gap": gaps.lhs_gap, "rhs_gap": gaps.rhs_gap})
    return _result("kadison_schwarz", failures, trials=trials, min_gap=worst)


def luders_instance_errors(P, a, b, tol: jc.Tolerances) -> Dict[str, float]:
    """Errors for idempotence, the triple identity, trace preservation and range membership."""
    m = jc.luders_operator(P, tol)
    d = m.dim
    ta = m(a)
    in_range = m(b)  # always in the range
    errs = {
        "idempotence": float(np.linalg.norm(m.matrix @ m.matrix - m.matrix, 2)),
        "triple": jc.opnorm(m(ta @ b @ ta) - ta @ m(b) @ ta),
        # ||m*(I) - I|| small gives ||a|| <= tr a = tr m(a) <= d ||m(a)|| for a >= 0
        "trace": jc.opnorm(jc.unit_adjoint(m) - np.eye(d)),
    }
    mismatches = 0
    for x in (a, in_range):
        fixed = jc.opnorm(m(x) - x) <= 1e-8
        mismatches += fixed != jc.commutes_with_pvm(x, P, jc.Tolerances(1e-8, tol.eps_psd))
    errs["range_mismatches"] = float(mismatches)
    return errs


def check_luders(seed: int, tol: jc.Tolerances, trials: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed + 1)
    failures, worst = [], {}
    for i in range(trials):
        P, a = random_pvm_instance(rng)
        b = jc.random_effect(P[0].shape[0], rng)
        errs = luders_instance_errors(P, a, b, tol)
        for k, v in errs.items():
            worst[k] = max(worst.get(k, 0.0), v)
        if max(errs["idempotence"], errs["triple"], errs["trace"]) > 1e-8 or errs["range_mismatches"]:
            failures.append({"instance": i, **errs})
    return _result("luders", failures, trials=trials, worst=worst)


def lemma_instance(i: int, rng: np.random.Generator, idempotent: bool):
    """A (map, effect) pair; maps and effects cycle through kinds so both outcomes occur."""
    d = int(rng.integers(2, 5))
    kind = i % 4 if not idempotent else (0, 1, 3)[i % 3]
    if kind == 0:
        m = jc.luders_operator(jc.random_pvm(d, int(rng.integers(1, d + 1)), rng))
    elif kind == 1:
        m = jc.random_block_map(d, rng)
    elif kind == 2:
        m = jc.random_mixed_unitary(d, rng)
    else:
        m = jc.vector_state_map(d, int(rng.integers(d)))
    pick = int(rng.integers(3))
    if pick == 0:
        a = jc.random_effect(d, rng)
    elif pick == 1:
        a = m(jc.random_effect(d, rng))
    else:
        a = float(rng.uniform()) * np.eye(d)
    return m, a


def check_equivalence_lemmas(seed: int, tol: jc.Tolerances, trials: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed + 2)
    failures, true_cases = [], {"first": 0, "second": 0}
    for i in range(trials):
        m, a = lemma_instance(i, rng, idempotent=False)
        r = jc.equivalence_lemma_check(m, a, tol)
        true_cases["first"] += r.clauses[0]
        if not r.agree:
            failures.append({"lemma": "first", "instance": i, "clauses": r.clauses, "errors": r.errors})
    for i in range(trials):
        m, a = lemma_instance(i, rng, idempotent=True)
        if i % 2:
            a = jc.random_in_span(jc.fixed_jordan_space(m, tol), m.dim, rng)
        r = jc.second_lemma_check(m, a, tol)
        true_cases["second"] += r.clauses[0]
        if not r.agree:
            failures.append({"lemma": "second", "instance": i, "clauses": r.clauses, "errors": r.errors})
    return _result("equivalence_lemmas", failures, trials=trials, all_true_instances=true_cases)


def check_decomposition(seed: int, tol: jc.Tolerances, trials: int = 100) -> CheckResult:
    failures = []
    m = jc.vector_state_map(2)
    dec = jc.decompose(m, tol, seed)
    pinch = jc.luders_operator([np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)], tol)
    if float(np.abs(dec.mu.matrix - pinch.matrix).max()) > 1e-8 or dec.composition_error > 1e-8:
        failures.append({"instance": "vector_state", "composition_error": dec.composition_error})
    rng = np.random.default_rng(seed + 3)
    worst = {"composition": 0.0, "range": 0.0}
    for i in range(trials):
        d = int(rng.integers(2, 5))
        m = jc.random_block_map(d, rng)
        try:
            dec = jc.decompose(m, tol, seed + i)
        except (jc.DecompositionError, jc.SupportCertificationError, jc.InternalConsistencyError) as exc:
            failures.append({"instance": i, "dim": d, "error": str(exc)})
            continue
        worst["composition"] = max(worst["composition"], dec.composition_error)
        worst["range"] = max(worst["range"], dec.range_distance)
    return _result("decomposition", failures, trials=trials, worst=worst)


# ---------------------------------------------------------------------------
# commutative model


def check_strong_iff_ce(seed: int, tol: jc.Tolerances, trials: int = 1000) -> CheckResult:
    failures = []
    rng = np.random.default_rng(seed + 4)
    mats = [(k, T) for k, T in sorted(STOCHASTIC.items())]
    mats += [(f"random{i}", cm.random_stochastic_idempotent(int(rng.integers(1, 9)), rng)) for i in range(trials)]
    strong = 0
    for i, (name, T) in enumerate(mats):
        s = cm.is_strong_commutative(T, seed=seed + i)
        c = cm.is_ce_commutative(T, seed=seed + i)
        strong += s.value
        if s.value != c.value:
            failures.append({"matrix": name, "strong": s.value, "ce": c.value})
    s = cm.is_strong_commutative(STOCHASTIC["nonstrong3"])
    c = cm.is_ce_commutative(STOCHASTIC["nonstrong3"])
    if s.value or c.value or s.witness != c.witness:
        failures.append({"matrix": "nonstrong3", "error": "expected matching not-strong / not-CE witnesses"})
    return _result("strong_iff_ce", failures, matrices=len(mats), strong=strong)


def check_mv_conditional_expectation(seed: int, tol: jc.Tolerances, trials: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed + 5)
    failures = []
    for i in range(trials):
        n = int(rng.integers(1, 9))
        space, part = cm.random_space(n, rng), cm.random_partition(n, rng)
        a = cm.random_fuzzy(n, rng)
        try:
            ea = cm.mv_conditional_expectation(space, part, a)
            clauses = cm.conditional_expectation_clauses(space, part, a)
            tower = cm.mv_conditional_expectation(space, part, ea) == ea
        except cm.TheoremViolation as exc:
            failures.append({"instance": i, "error": str(exc)})
            continue
        if not all(clauses.values()) or not tower:
            failures.append({"instance": i, "clauses": clauses, "tower": tower})
    return _result("mv_conditional_expectation", failures, trials=trials)


def check_quotient_strong(seed: int, tol: jc.Tolerances) -> CheckResult:
    failures, checked = [], 0
    for name, case in sorted(PROB_CASES.items()):
        space = cm.FiniteProbSpace(case["P"])
        part = cm.BlockPartition(case["blocks"])
        try:
            q = cm.quotient_strong_operator(space, part)
            rep = cm.mv_ce_from_strong_operator(q.T, [space.P[x] for x in q.points])
            checked += rep.checked
        except (cm.TheoremViolation, ValueError) as exc:
            failures.append({"case": name, "error": str(exc)})
    for name, case in sorted(STRONG_CE_CASES.items()):
        try:
            checked += cm.mv_ce_from_strong_operator(STOCHASTIC[case["T"]], case["s"]).checked
        except (cm.TheoremViolation, ValueError) as exc:
            failures.append({"case": name, "error": str(exc)})
    return _result("quotient_strong", failures, identities_checked=checked)


CHECKS: Dict[str, Callable[[int, jc.Tolerances], CheckResult]] = {
    "axiom_gate": check_axiom_gate,
    "state_operator_lemma": check_state_operator_lemma,
    "faithful_implies_strong": check_faithful_implies_strong,
    "quotient_faithful": check_quotient_faithful,
    "induced_state": check_induced_state,
    "kadison_schwarz": check_kadison_schwarz,
    "luders": check_luders,
    "equivalence_lemmas": check_equivalence_lemmas,
    "decomposition": check_decomposition,
    "strong_iff_ce": check_strong_iff_ce,
    "mv_conditional_expectation": check_mv_conditional_expectation,
    "quotient_strong": check_quotient_strong,
}


def run_suite(seed: int = 42, tol: jc.Tolerances = jc.DEFAULT_TOL, only: Optional[List[str]] = None) -> List[CheckResult]:
    out = []
    for name in sorted(only or CHECKS):
        t0 = time.perf_counter()
        try:
            res = CHECKS[name](seed, tol)
        except Exception as exc:  # a crash inside a theorem check is a failed check
            res = CheckResult(name, "fail", [{"error": f"{type(exc).__name__}: {exc}"}])
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out
