from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import linprog

import oracles
from effectalg.effect_core import (
    FiniteEffectAlgebra,
    PreconditionError,
    StructuralError,
    Violation,
    classify,
    confirm_witness,
    derive_order,
    is_ideal,
    is_ordering_set,
    is_state,
    ordering_witness,
    quotient_mv,
    state_space,
    symmetric_difference,
    validate_effect_algebra,
)
from effectalg.fixtures import EFFECT_ALGEBRAS, chain2, chain3, diamond, luk3x3, mo2

ALL = sorted(EFFECT_ALGEBRAS)


def _mutated_chain3():
    t = [list(r) for r in chain3().sum]
    t[1][2] = t[2][1] = 2  # u + 1 = 1
    return FiniteEffectAlgebra(3, 0, 2, t)


@pytest.mark.parametrize("name", ALL)
def test_fixtures_are_valid(name):
    E = EFFECT_ALGEBRAS[name]()
    assert validate_effect_algebra(E).valid
    assert oracles.oracle_violated_axioms(E.n, E.zero, E.one, E.sum) == set()


def test_ea4_witness_on_mutated_chain():
    E = _mutated_chain3()
    rep = validate_effect_algebra(E)
    assert "EA4" in rep.axioms
    assert Violation("EA4", (1, 2)) in rep.violations
    assert rep.axioms == oracles.oracle_violated_axioms(3, 0, 2, E.sum)
    assert all(confirm_witness(E, v) for v in rep.violations)


def test_asymmetric_cell_reports_ea1():
    t = [list(r) for r in diamond().sum]
    t[1][2] = None  # b + a still defined
    E = FiniteEffectAlgebra(4, 0, 3, t)
    rep = validate_effect_algebra(E)
    assert Violation("EA1", (2, 1)) in rep.violations or Violation("EA1", (1, 2)) in rep.violations
    for v in rep.violations:
        assert oracles.oracle_confirms(4, 0, 3, t, v.axiom, v.witness)


def test_fake_witness_not_confirmed():
    assert not confirm_witness(chain3(), Violation("EA4", (1, 2)))
    assert not confirm_witness(chain3(), Violation("EA1", (0, 1)))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=2, zero=0, one=1, sum=[[0, 1]]),  # missing row
        dict(n=2, zero=0, one=1, sum=[[0, 1], [1]]),  # ragged
        dict(n=2, zero=0, one=1, sum=[[0, 5], [1, None]]),  # bad index
        dict(n=2, zero=0, one=2, sum=[[0, 1], [1, None]]),  # bad unit
        dict(n=0, zero=0, one=0, sum=[]),
    ],
)
def test_structural_errors(kwargs):
    with pytest.raises(StructuralError):
        FiniteEffectAlgebra(**kwargs)


def test_from_dict_missing_key():
    with pytest.raises(StructuralError):
        FiniteEffectAlgebra.from_dict({"n": 2, "zero": 0})


@pytest.mark.parametrize("name", ALL)
def test_order_matches_definition(name):
    E = EFFECT_ALGEBRAS[name]()
    o = derive_order(E)
    le = oracles.order(E.n, E.sum)
    pp = oracles.perp(E.n, E.one, E.sum)
    assert [list(r) for r in o.leq] == le
    assert list(o.perp) == pp
    for a in range(E.n):
        assert o.perp[o.perp[a]] == a
        for b in range(E.n):
            # a + b defined iff a <= b'
            assert (E.sum[a][b] is not None) == o.leq[a][o.perp[b]]
            if o.leq[a][b]:
                assert o.leq[o.perp[b]][o.perp[a]]
                assert E.sum[a][o.ominus[b][a]] == b
            assert o.meet[a][b] == oracles.meet(le, a, b)
            assert o.join[a][b] == oracles.join(le, a, b)


def test_chain3_order_example():
    o = derive_order(chain3())
    assert o.perp == (2, 1, 0)
    assert o.ominus[2][1] == 1
    assert o.leq[0][1] and o.leq[1][2] and not o.leq[2][1]


def test_classify_examples():
    assert classify(mo2()).to_dict() == {"is_lattice": True, "is_oml": True, "is_mv_effect_algebra": False}
    assert classify(diamond()).to_dict() == {"is_lattice": True, "is_oml": True, "is_mv_effect_algebra": True}
    c = classify(chain3())
    assert c.is_lattice and c.is_mv_effect_algebra and not c.is_oml  # u <= u' but u ^ u = u


def test_classify_rejects_invalid():
    with pytest.raises(PreconditionError):
        classify(_mutated_chain3())


def test_ideals():
    assert is_ideal(diamond(), {0})
    assert is_ideal(diamond(), {0, 1})
    assert not is_ideal(diamond(), {1})  # not downward closed
    assert not is_ideal(chain3(), {0, 1})  # u + u = 1 escapes
    assert is_ideal(chain3(), {0, 1, 2})


def test_symmetric_difference_diamond():
    assert symmetric_difference(diamond(), 1, 2) == 3
    assert symmetric_difference(diamond(), 1, 1) == 0
    assert symmetric_difference(chain3(), 1, 2) == 1


def test_quotient_by_atom_ideal():
    q = quotient_mv(diamond(), {0, 1})
    assert q.algebra == chain2()
    assert q.class_map == (0, 0, 1, 1)
    assert q.representatives == (0, 2)


def test_quotient_by_zero_is_identity():
    q = quotient_mv(diamond(), {0})
    assert q.algebra == diamond()
    assert q.class_map == (0, 1, 2, 3)


def test_quotient_product_ideal():
    E = luk3x3()
    ideal = [a for a in range(9) if a // 3 == 0]  # {0} x L3
    q = quotient_mv(E, ideal)
    assert q.algebra.n == 3
    assert validate_effect_algebra(q.algebra).valid
    assert [q.class_map[a] for a in range(9)] == [a // 3 for a in range(9)]


def test_quotient_preconditions():
    with pytest.raises(PreconditionError):
        quotient_mv(mo2(), {0})
    with pytest.raises(PreconditionError):
        quotient_mv(chain3(), {0, 1})


def test_state_space_examples():
    assert state_space(chain3()).vertices == ((0, F(1, 2), 1),)
    assert set(state_space(diamond()).vertices) == {(0, 0, 1, 1), (0, 1, 0, 1)}
    assert len(state_space(mo2()).vertices) == 4


def test_state_space_empty():
    # one element: 0 + 0 = 0 forces s(0) = 0 while s(1) = 1
    E = FiniteEffectAlgebra(1, 0, 0, [[0]])
    sp = state_space(E)
    assert sp.empty and sp.certificate


EXPECTED_VERTEX_COUNTS = {"chain2": 1, "chain3": 1, "diamond": 2, "mo2": 4, "luk3": 1, "luk3x3": 2, "boolean8": 3}


@pytest.mark.parametrize("name", ALL)
def test_state_space_against_lp(name):
    E = EFFECT_ALGEBRAS[name]()
    verts = state_space(E).vertices
    assert len(verts) == EXPECTED_VERTEX_COUNTS[name]
    for v in verts:
        assert oracles.is_state(E.n, E.one, E.sum, v)
    # the polytope from the raw equations has the same support function
    n = E.n
    rows, rhs = [], []
    for (a, b), c in oracles.sums(E.sum).items():
        r = np.zeros(n)
        r[a] += 1
        r[b] += 1
        r[c] -= 1
        rows.append(r)
        rhs.append(0.0)
    r = np.zeros(n)
    r[E.one] = 1
    rows.append(r)
    rhs.append(1.0)
    rng = np.random.default_rng(7)
    V = np.array([[float(x) for x in v] for v in verts])
    for _ in range(20):
        c = rng.normal(size=n)
        res = linprog(-c, A_eq=np.array(rows), b_eq=rhs, bounds=[(0, 1)] * n)
        assert res.status == 0
        assert -res.fun == pytest.approx(float((V @ c).max()), abs=1e-9)


def test_is_state_rejects():
    assert not is_state(diamond(), (0, F(1, 2), F(1, 3), 1))
    assert not is_state(diamond(), (0, 0, 0, 0))
    assert is_state(diamond(), (0, F(1, 3), F(2, 3), 1))


def test_ordering_sets():
    D = diamond()
    two = [(0, F(1, 3), F(2, 3), 1), (0, F(2, 3), F(1, 3), 1)]
    assert is_ordering_set(D, two)
    assert not is_ordering_set(D, [(0, F(1, 2), F(1, 2), 1)])
    assert ordering_witness(D, [(0, F(1, 2), F(1, 2), 1)]) == (1, 2)
    assert is_ordering_set(chain3(), [(0, F(1, 2), 1)])


def test_ordering_set_rejects_non_state():
    with pytest.raises(PreconditionError):
        is_ordering_set(diamond(), [(0, 1, 1, 1)])


@pytest.mark.parametrize("name", ALL)
def test_ordering_set_semantics(name):
    E = EFFECT_ALGEBRAS[name]()
    verts = state_space(E).vertices
    le = oracles.order(E.n, E.sum)
    embeds = all(
        le[e][f] == all(w[e] <= w[f] for w in verts) for e in range(E.n) for f in range(E.n)
    )
    assert is_ordering_set(E, verts) == embeds
