"""Acceptance criteria 1-13, one test each, at the stated tolerances and sizes.

Each test registers a PASS/FAIL line that is printed in the pytest
terminal summary under "acceptance criteria".
"""
import itertools
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

import oracles as O
from effectalg import commutative_mv as cm
from effectalg import jc_matrix as jc
from effectalg.effect_core import FiniteEffectAlgebra, classify, state_space, validate_effect_algebra
from effectalg.fixtures import EFFECT_ALGEBRAS, PROB_CASES, STOCHASTIC, STRONG_CE_CASES
from effectalg.state_ops import enumerate_state_operators, induced_state, quotient_state_operator, validate_state_operator

pytestmark = pytest.mark.acceptance

GATE = ("chain2", "chain3", "diamond", "mo2", "luk3", "luk3x3")
TOL = jc.Tolerances()


def table_of(E):
    return [list(r) for r in E.sum]


def mutate(E, rng):
    n = E.n
    i, j = int(rng.integers(n)), int(rng.integers(n))
    new = [v for v in [None, *range(n)] if v != E.sum[i][j]]
    t = table_of(E)
    t[i][j] = new[int(rng.integers(len(new)))]
    return FiniteEffectAlgebra(n, E.zero, E.one, t)


def enumerated():
    for name, build in sorted(EFFECT_ALGEBRAS.items()):
        E = build()
        if E.n <= 9:
            yield name, E, enumerate_state_operators(E, max_n=9)


def test_c01_axiom_gate(criterion):
    rec = criterion(1, "axiom gate: fixtures accepted, 100 rejected mutations each with correct witnesses, < 1 s")
    rng = np.random.default_rng(2024)
    spent = 0.0
    valid_mutants = 0
    for name in GATE:
        E = EFFECT_ALGEBRAS[name]()
        t0 = time.perf_counter()
        assert validate_effect_algebra(E).valid, name
        spent += time.perf_counter() - t0
        assert O.oracle_violated_axioms(E.n, E.zero, E.one, E.sum) == set()
        rejected = 0
        while rejected < 100:
            M = mutate(E, rng)
            t0 = time.perf_counter()
            rep = validate_effect_algebra(M)
            spent += time.perf_counter() - t0
            truth = O.oracle_violated_axioms(M.n, M.zero, M.one, M.sum)
            assert rep.axioms == truth, (name, M.sum, rep.to_dict(), truth)
            if rep.valid:
                valid_mutants += 1  # a mutation can land on another effect algebra
                continue
            rejected += 1
            for v in rep.violations:
                assert O.oracle_confirms(M.n, M.zero, M.one, M.sum, v.axiom, v.witness), (name, v)
    assert spent < 1.0, spent
    rec.note(f"600 rejections, {valid_mutants} valid mutants accepted, validator time {spent:.3f} s")


def test_c02_state_operator_lemma(criterion):
    rec = criterion(2, "every enumerated state operator satisfies the five consequences, < 10 s")
    t0 = time.perf_counter()
    count = 0
    for name, E, ops in enumerated():
        assert [t.tau for t in ops] == O.brute_state_operators(E.n, E.zero, E.one, table_of(E)), name
        for t in ops:
            count += 1
            clauses = validate_state_operator(E, t).lemma_clauses
            assert all(clauses.values()), (name, t.tau, clauses)
            assert all(O.lemma_clauses(E.n, E.zero, E.one, table_of(E), t.tau)), (name, t.tau)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10, elapsed
    rec.note(f"{count} operators on 7 fixtures, {elapsed:.2f} s")


def test_c03_faithful_implies_strong(criterion):
    rec = criterion(3, "no faithful-but-not-strong state operator on any fixture")
    faithful = 0
    for name, E, ops in enumerated():
        for t in ops:
            rep = validate_state_operator(E, t)
            oracle_faithful = [a for a in range(E.n) if t.tau[a] == E.zero] == [E.zero]
            assert rep.is_faithful == oracle_faithful
            assert rep.is_strong == O.is_strong(E.n, table_of(E), t.tau)
            if oracle_faithful:
                faithful += 1
                assert O.is_strong(E.n, table_of(E), t.tau), (name, t.tau)
    rec.note(f"{faithful} faithful operators, all strong")


def test_c04_quotient_faithful(criterion):
    rec = criterion(4, "quotient by the kernel gives a faithful state operator; diamond example")
    count = 0
    for name, E, ops in enumerated():
        if not classify(E).is_mv_effect_algebra:
            continue
        for t in ops:
            q = quotient_state_operator(E, t)
            Q = q.quotient.algebra
            hat = q.tau_hat.tau
            assert hat in O.brute_state_operators(Q.n, Q.zero, Q.one, table_of(Q)), (name, t.tau)
            assert [k for k in range(Q.n) if hat[k] == Q.zero] == [Q.zero], (name, t.tau)
            assert q.report.is_faithful
            count += 1
    q = quotient_state_operator(EFFECT_ALGEBRAS["diamond"](), (0, 0, 3, 3))
    assert table_of(q.quotient.algebra) == [[0, 1], [1, None]]
    assert q.quotient.class_map == (0, 0, 1, 1)
    assert q.tau_hat.tau == (0, 1)
    rec.note(f"{count} operators on MV fixtures")


def test_c05_induced_state(criterion):
    rec = criterion(5, "omega o tau is a state for every fixture, operator and vertex")
    count = 0
    for name, E, ops in enumerated():
        verts = state_space(E).vertices
        for w in verts:
            assert O.is_state(E.n, E.one, table_of(E), w)
            for t in ops:
                s = induced_state(E, t, w)
                assert O.is_state(E.n, E.one, table_of(E), s), (name, t.tau, w)
                assert list(s) == [w[t.tau[a]] for a in range(E.n)]
                count += 1
    assert count > 0
    rec.note(f"{count} triples")


def random_pvm_family(seed, count):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        d = int(rng.integers(1, 7))
        k = int(rng.integers(1, d + 1))
        P = jc.random_pvm(d, k, rng)
        yield P, jc.random_effect(d, rng), jc.random_effect(d, rng)


def min_eig(x):
    return float(np.linalg.eigvalsh((x + x.conj().T) / 2)[0])


def test_c06_kadison_schwarz(criterion):
    rec = criterion(6, "Kadison-Schwarz gaps >= -1e-9 on 1000 random (PVM, effect) pairs, d <= 6")
    worst = np.inf
    for P, a, _ in random_pvm_family(6, 1000):
        assert not jc.validate_pvm(P)
        ta = O.pinching(P, a)
        mid = O.pinching(P, ta @ ta)
        lhs, rhs = min_eig(mid - ta @ ta), min_eig(O.pinching(P, a @ a) - mid)
        g = jc.kadison_schwarz_check(jc.luders_operator(P), a)
        assert abs(g.lhs_gap - lhs) < 1e-10 and abs(g.rhs_gap - rhs) < 1e-10
        assert lhs >= -1e-9 and rhs >= -1e-9, (lhs, rhs)
        worst = min(worst, lhs, rhs)
    rec.note(f"smallest gap {worst:.2e}")


def test_c07_luders(criterion):
    rec = criterion(7, "Luders map: idempotent, triple identity, faithful, range = commutant, < 30 s")
    t0 = time.perf_counter()
    worst = dict(idem=0.0, triple=0.0, faith=0.0)
    for P, a, b in random_pvm_family(7, 1000):
        m = jc.luders_operator(P)
        d = m.dim
        worst["idem"] = max(worst["idem"], np.linalg.norm(m.matrix @ m.matrix - m.matrix, 2))
        ta = O.pinching(P, a)
        err = np.linalg.norm(O.pinching(P, ta @ b @ ta) - ta @ O.pinching(P, b) @ ta, 2)
        worst["triple"] = max(worst["triple"], err)
        # faithfulness: the map preserves traces, so ||x|| <= tr x = tr m(x) <= d ||m(x)|| for x >= 0
        worst["faith"] = max(worst["faith"], np.linalg.norm(jc.unit_adjoint(m) - np.eye(d), 2))
        rank_one = np.outer(a[:, 0], a[:, 0].conj())
        assert np.linalg.norm(rank_one, 2) <= d * np.linalg.norm(m(rank_one), 2) + 1e-8
        # range membership: fixed points are exactly the effects commuting with every projection
        for x in (a, ta, O.pinching(P, b)):
            fixed = np.linalg.norm(m(x) - x, 2) <= 1e-8
            commutes = all(np.linalg.norm(p @ x - x @ p, 2) <= 1e-8 for p in P)
            assert fixed == commutes
    elapsed = time.perf_counter() - t0
    assert max(worst.values()) <= 1e-8, worst
    assert elapsed < 30, elapsed
    rec.note(f"worst errors {', '.join(f'{k}={v:.1e}' for k, v in worst.items())}; {elapsed:.1f} s")


def lemma_family(seed, count, idempotent):
    rng = np.random.default_rng(seed)
    for i in range(count):
        d = int(rng.integers(2, 5))
        kinds = ("luders", "block", "vector") if idempotent else ("luders", "block", "mixed", "vector")
        kind = kinds[i % len(kinds)]
        if kind == "luders":
            m = jc.luders_operator(jc.random_pvm(d, int(rng.integers(1, d + 1)), rng))
        elif kind == "block":
            m = jc.random_block_map(d, rng)
        elif kind == "mixed":
            m = jc.random_mixed_unitary(d, rng)
        else:
            m = jc.vector_state_map(d, int(rng.integers(d)))
        pick = i % 3
        if pick == 0:
            a = jc.random_effect(d, rng)
        elif pick == 1:
            a = m(jc.random_effect(d, rng))
        elif idempotent:
            a = jc.random_in_span(jc.fixed_jordan_space(m), d, rng)
        else:
            a = float(rng.uniform()) * np.eye(d)
        yield m, a


def test_c08_equivalence_lemmas(criterion):
    rec = criterion(8, "clause agreement for both three-way equivalences on 1000 instances each")
    outcomes = {"first": [0, 0], "second": [0, 0]}
    for m, a in lemma_family(81, 1000, idempotent=False):
        r = jc.equivalence_lemma_check(m, a)
        ma = m(a)
        assert abs(r.errors[0] - np.linalg.norm(m(a @ a) - ma @ ma, 2)) < 1e-12
        assert r.agree, (r.clauses, r.errors)
        outcomes["first"][r.clauses[0]] += 1
    for m, a in lemma_family(82, 1000, idempotent=True):
        assert jc.check_state_operator(m).is_state_operator
        r = jc.second_lemma_check(m, a)
        ma = m(a)
        assert abs(r.errors[0] - np.linalg.norm(m(a @ a) - m(ma @ ma), 2)) < 1e-12
        assert r.agree, (r.clauses, r.errors)
        outcomes["second"][r.clauses[0]] += 1
    assert all(f > 0 and t > 0 for f, t in outcomes.values()), outcomes
    rec.note(f"[false, true] counts {outcomes}")


def test_c09_decomposition(criterion):
    rec = criterion(9, "decomposition m = phi o mu: vector-state example and 100 block maps, d <= 4")
    m = jc.vector_state_map(2)
    dec = jc.decompose(m)
    e0, e1 = np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)
    assert np.allclose(dec.e, e0, atol=1e-12)
    rng = np.random.default_rng(90)
    for _ in range(20):
        x = jc.random_effect(2, rng)
        assert np.linalg.norm(dec.mu(x) - O.pinching([e0, e1], x), 2) <= 1e-8
        assert np.linalg.norm(m(dec.mu(x)) - m(x), 2) <= 1e-8
        assert np.linalg.norm(m(np.diag(np.diag(x))) - x[0, 0].real * np.eye(2), 2) <= 1e-8
    worst = 0.0
    for i in range(100):
        d = int(rng.integers(2, 5))
        m = jc.random_block_map(d, rng)
        dec = jc.decompose(m, seed=i)
        mu = dec.mu
        assert dec.composition_error <= 1e-8 and dec.range_distance <= 1e-8
        assert min_eig(jc.unit_adjoint(mu)) > 1e-7  # faithful
        assert O.max_ce_defect(mu, d, rng, trials=30) <= 1e-8
        for _ in range(5):
            y = jc.random_in_span(dec.range_mu, d, rng)
            my = m(y)
            assert np.linalg.norm(m(y @ y) - m(my @ my), 2) <= 1e-8
            x = jc.random_effect(d, rng)
            err = np.linalg.norm(m(mu(x)) - m(x), 2)
            assert err <= 1e-8
            worst = max(worst, err)
    rec.note(f"worst composition error on samples {worst:.1e}")


def test_c10_strong_iff_ce(criterion):
    rec = criterion(10, "strong = conditional expectation for bundled and 1000 random idempotents, n <= 8")
    rng = np.random.default_rng(10)
    mats = list(STOCHASTIC.values()) + [cm.random_stochastic_idempotent(int(rng.integers(1, 9)), rng) for _ in range(1000)]
    strong = 0
    for k, T in enumerate(mats):
        assert cm.validate_stochastic_idempotent(T).valid
        s, c = cm.is_strong_commutative(T), cm.is_ce_commutative(T)
        assert s.value == c.value
        if len(T) <= 5 and k % 4 == 0:
            assert s.value == O.strong_by_crisp_pairs(T)
        strong += s.value
    assert 0 < strong < len(mats)
    T = STOCHASTIC["nonstrong3"]
    s, c = cm.is_strong_commutative(T), cm.is_ce_commutative(T)
    assert not s.value and not c.value
    assert s.witness == c.witness == ((1, 0, 0), (0, 1, 0))
    f, g = s.witness
    Tf = [sum(Fraction(T[x][y]) * f[y] for y in range(3)) for x in range(3)]
    Tg = [sum(Fraction(T[x][y]) * g[y] for y in range(3)) for x in range(3)]
    mn = [min(u, v) for u, v in zip(Tf, Tg)]
    assert mn == [0, 0, Fraction(1, 2)]
    assert [sum(Fraction(T[x][y]) * mn[y] for y in range(3)) for x in range(3)] == [0, 0, 0]
    rec.note(f"{len(mats)} matrices, {strong} strong")


def test_c11_mv_conditional_expectation(criterion):
    rec = criterion(11, "integral identity and the four defining clauses, exact, 1000 random triples")
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        space, part = cm.random_space(n, rng), cm.random_partition(n, rng)
        a = cm.random_fuzzy(n, rng)
        out = cm.mv_conditional_expectation(space, part, a)
        assert list(out) == O.block_average(space.P, part.blocks, a)
        for r in range(len(part.blocks) + 1):
            for chosen in itertools.combinations(part.blocks, r):
                B = {x for b in chosen for x in b}
                assert O.integral_identity(space.P, part.blocks, a, out, B)
        clauses = cm.conditional_expectation_clauses(space, part, a)
        assert all(clauses.values()), clauses
        supp = [x for x in range(n) if space.P[x] > 0]
        one = O.block_average(space.P, part.blocks, [1] * n)
        assert all(one[x] == 1 for x in supp) and all(v == 0 for v in O.block_average(space.P, part.blocks, [0] * n))
        b = [(1 - x) / 2 for x in a]
        lhs = O.block_average(space.P, part.blocks, [x + y for x, y in zip(a, b)])
        rhs = [u + v for u, v in zip(out, O.block_average(space.P, part.blocks, b))]
        assert lhs == rhs and all(0 <= v <= 1 for v in out)
    rec.note("1000 triples, n <= 8, rational arithmetic")


def fixed_crisp(T):
    n = len(T)
    out = []
    for f in itertools.product((0, 1), repeat=n):
        if [sum(Fraction(T[x][y]) * f[y] for y in range(n)) for x in range(n)] == list(f):
            out.append(f)
    return out


def test_c12_quotient_and_strong_expectations(criterion):
    rec = criterion(12, "conditioning quotient is strong with block-constant range; identity from strong operators")
    for name, case in PROB_CASES.items():
        space, part = cm.FiniteProbSpace(case["P"]), cm.BlockPartition(case["blocks"])
        q = cm.quotient_strong_operator(space, part)
        pts = [x for x in range(space.n) if space.P[x] > 0]
        assert list(q.points) == pts
        Pq = [space.P[x] for x in pts]
        for i in range(len(pts)):
            e = [int(j == i) for j in range(len(pts))]
            assert [row[i] for row in q.T] == O.block_average(Pq, q.blocks, e)
        assert O.strong_by_crisp_pairs(q.T)
        assert sum(q.T[i][i] for i in range(len(pts))) == len(q.blocks)  # trace of an idempotent is its rank
        for b in q.blocks:
            chi = [int(i in b) for i in range(len(pts))]
            assert [sum(q.T[x][y] * chi[y] for y in range(len(pts))) for x in range(len(pts))] == chi
        cm.mv_ce_from_strong_operator(q.T, Pq)
    rng = np.random.default_rng(12)
    for name, case in STRONG_CE_CASES.items():
        T, s = STOCHASTIC[case["T"]], [Fraction(x) for x in case["s"]]
        n = len(T)
        rep = cm.mv_ce_from_strong_operator(T, s)
        assert rep.ok
        mu = [sum(s[x] * Fraction(T[x][y]) for x in range(n)) for y in range(n)]
        assert list(rep.weights) == mu
        crisp = fixed_crisp(T)
        assert sorted(tuple(int(v) for v in b) for b in rep.crisp) == sorted(crisp)
        family = [[int(i == j) for j in range(n)] for i in range(n)] + [list(cm.random_fuzzy(n, rng)) for _ in range(5)]
        for a in family:
            Ta = [sum(Fraction(T[x][y]) * a[y] for y in range(n)) for x in range(n)]
            for b in crisp:
                assert sum(mu[x] * Ta[x] * b[x] for x in range(n)) == sum(mu[x] * min(a[x], b[x]) for x in range(n))
    rec.note(f"{len(PROB_CASES)} spaces, {len(STRONG_CE_CASES)} strong operators incl. null weights")


def test_c13_cli_determinism(criterion):
    rec = criterion(13, "suite --seed 42 --format json twice is byte-identical, < 5 min")
    runs = []
    for _ in range(2):
        t0 = time.perf_counter()
        p = subprocess.run(
            [sys.executable, "-m", "effectalg", "suite", "--seed", "42", "--format", "json"],
            capture_output=True,
            timeout=300,
        )
        runs.append((p.returncode, p.stdout, time.perf_counter() - t0))
    (c1, out1, t1), (c2, out2, t2) = runs
    assert c1 == c2 == 0, out1[-2000:]
    assert out1 == out2
    assert max(t1, t2) < 300
    rec.note(f"exit 0 twice, {len(out1)} identical bytes, {max(t1, t2):.1f} s per run")
