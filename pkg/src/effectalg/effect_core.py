"""Finite effect algebras given by partial sum tables.

An algebra on ``n`` elements is an ``n x n`` table whose cell ``(a, b)`` is
the index of ``a + b`` or ``None`` when the sum is undefined. Everything
else (order, orthosupplement, difference, meets and joins, ideals,
quotients, the state polytope) is derived from that table by exhaustive
search, which is fine for the sizes this module targets (n up to ~12 for
exact work, a few hundred for plain validation).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

from . import _exact, _kernels

Table = Tuple[Tuple[Optional[int], ...], ...]


class StructuralError(ValueError):
    """The input is not even a well-formed table (ragged rows, bad indices)."""


class PreconditionError(ValueError):
    """An operation was called on an input outside its domain."""


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness)}


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def axioms(self) -> set:
        return {v.axiom for v in self.violations}

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": [v.to_dict() for v in self.violations]}


@dataclass(frozen=True)
class FiniteEffectAlgebra:
    """Partial algebra ``(E; 0, 1, +)`` stored as a dense table.

    Construction only checks the table is well formed; use
    :func:`validate_effect_algebra` for the axioms.
    """

    n: int
    zero: int
    one: int
    sum: Table
    labels: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise StructuralError(f"n must be a positive integer, got {self.n!r}")
        for name in ("zero", "one"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v < self.n:
                raise StructuralError(f"{name}={v!r} out of range for n={self.n}")
        rows = tuple(tuple(row) for row in self.sum)
        if len(rows) != self.n:
            raise StructuralError(f"sum table has {len(rows)} rows, expected {self.n}")
        for i, row in enumerate(rows):
            if len(row) != self.n:
                raise StructuralError(f"row {i} has length {len(row)}, expected {self.n}")
            for j, v in enumerate(row):
                if v is None:
                    continue
                if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < self.n:
                    raise StructuralError(f"sum[{i}][{j}]={v!r} is not an element index")
        object.__setattr__(self, "sum", rows)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.n:
                raise StructuralError("labels must have one entry per element")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteEffectAlgebra":
        try:
            return cls(
                n=data["n"],
                zero=data["zero"],
                one=data["one"],
                sum=data["sum"],
                labels=data.get("labels"),
            )
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed algebra: {exc}") from exc

    def to_dict(self) -> dict:
        d = {"n": self.n, "zero": self.zero, "one": self.one, "sum": [list(r) for r in self.sum]}
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)

    def plus(self, a: int, b: int) -> Optional[int]:
        return self.sum[a][b]

    @cached_property
    def int_table(self) -> List[List[int]]:
        """The table with ``-1`` for undefined cells, as the kernels expect."""
        return [[-1 if v is None else v for v in row] for row in self.sum]

    @cached_property
    def order(self) -> "DerivedOrder":
        return derive_order(self)

    def defined_sums(self) -> Iterable[Tuple[int, int, int]]:
        for a in range(self.n):
            for b in range(self.n):
                c = self.sum[a][b]
                if c is not None:
                    yield a, b, c


def validate_effect_algebra(E: FiniteEffectAlgebra, max_per_axiom: int = 8) -> ValidationReport:
    """Check EA1-EA4 exhaustively and report every violated axiom.

    Associativity is checked over all ``n**3`` triples in both directions,
    so a table where only one side of the associative law is defined is
    reported. A designated zero that is not neutral is reported as
    ``ZERO``.
    """
    raw = _kernels.ea_violations(E.int_table, E.zero, E.one, max_per_axiom)
    return ValidationReport(tuple(Violation(ax, tuple(w)) for ax, w in raw))


def confirm_witness(E: FiniteEffectAlgebra, v: Violation) -> bool:
    """Re-evaluate one reported violation directly on the table."""
    s, w = E.sum, v.witness
    try:
        if v.axiom == "EA1":
            a, b = w
            return s[a][b] is not None and s[a][b] != s[b][a]
        if v.axiom == "EA2":
            a, b, c = w
            ab, bc = s[a][b], s[b][c]
            lhs = s[ab][c] if ab is not None else None
            rhs = s[a][bc] if bc is not None else None
            return (lhs is not None or rhs is not None) and lhs != rhs
        if v.axiom == "EA3":
            sup = [f for f in range(E.n) if s[w[0]][f] == E.one]
            if len(w) == 1:
                return not sup
            return w[1] != w[2] and w[1] in sup and w[2] in sup
        if v.axiom == "EA4":
            e, one = w
            return one == E.one and e != E.zero and (s[e][one] is not None or s[one][e] is not None)
        if v.axiom == "ZERO":
            z, a = w
            return z == E.zero and (s[z][a] != a or s[a][z] != a)
    except (ValueError, IndexError, TypeError):
        return False
    return False


def _require_valid(E: FiniteEffectAlgebra) -> None:
    report = validate_effect_algebra(E, max_per_axiom=1)
    if not report.valid:
        v = report.violations[0]
        raise PreconditionError(f"not an effect algebra: {v.axiom} fails at {v.witness}")


@dataclass(frozen=True)
class DerivedOrder:
    """Order, orthosupplement, difference and lattice operations of a valid EA.

    ``ominus[b][a]`` is ``b - a`` (defined iff ``a <= b``); ``meet`` and
    ``join`` hold ``None`` where the infimum/supremum does not exist.
    """

    leq: Tuple[Tuple[bool, ...], ...]
    perp: Tuple[int, ...]
    ominus: Table
    meet: Table
    join: Table


def derive_order(E: FiniteEffectAlgebra) -> DerivedOrder:
    n = E.n
    leq = [[False] * n for _ in range(n)]
    ominus: List[List[Optional[int]]] = [[None] * n for _ in range(n)]
    perp = [-1] * n
    for a, c, b in E.defined_sums():
        leq[a][b] = True
        ominus[b][a] = c
        if b == E.one and perp[a] == -1:
            perp[a] = c
    if -1 in perp:
        raise PreconditionError(f"element {perp.index(-1)} has no orthosupplement")

    def bound(a, b, lower):
        cands = [c for c in range(n) if (leq[c][a] and leq[c][b] if lower else leq[a][c] and leq[b][c])]
        for g in cands:
            if all((leq[c][g] if lower else leq[g][c]) for c in cands):
                return g
        return None

    meet = [[bound(a, b, True) for b in range(n)] for a in range(n)]
    join = [[bound(a, b, False) for b in range(n)] for a in range(n)]
    freeze = lambda m: tuple(tuple(r) for r in m)  # noqa: E731
    return DerivedOrder(freeze(leq), tuple(perp), freeze(ominus), freeze(meet), freeze(join))


@dataclass(frozen=True)
class Classification:
    is_lattice: bool
    is_oml: bool
    is_mv_effect_algebra: bool

    def to_dict(self) -> dict:
        return {
            "is_lattice": self.is_lattice,
            "is_oml": self.is_oml,
            "is_mv_effect_algebra": self.is_mv_effect_algebra,
        }


def classify(E: FiniteEffectAlgebra) -> Classification:
    """Lattice / orthomodular lattice / MV-effect algebra flags, by brute force.

    OML: lattice and ``a <= b' => a ^ b = 0``.
    MV: lattice and ``a ^ b = 0 => a <= b'``.
    """
    _require_valid(E)
    o = E.order
    n = E.n
    pairs = list(itertools.product(range(n), repeat=2))
    lattice = all(o.meet[a][b] is not None and o.join[a][b] is not None for a, b in pairs)
    oml = lattice and all(o.meet[a][b] == E.zero for a, b in pairs if o.leq[a][o.perp[b]])
    mv = lattice and all(o.leq[a][o.perp[b]] for a, b in pairs if o.meet[a][b] == E.zero)
    return Classification(lattice, oml, mv)


def is_ideal(E: FiniteEffectAlgebra, subset: Iterable[int]) -> bool:
    """Downward closed and closed under every defined sum."""
    s = set(subset)
    if not s:
        return False
    o = E.order
    for a in s:
        if any(o.leq[b][a] and b not in s for b in range(E.n)):
            return False
    return all(E.sum[a][b] is None or E.sum[a][b] in s for a in s for b in s)


def _require_mv(E: FiniteEffectAlgebra) -> None:
    if not classify(E).is_mv_effect_algebra:
        raise PreconditionError("algebra is not an MV-effect algebra")


def symmetric_difference(E: FiniteEffectAlgebra, a: int, b: int) -> int:
    """``(a v b) - (a ^ b)`` in a lattice-ordered effect algebra."""
    o = E.order
    j, m = o.join[a][b], o.meet[a][b]
    if j is None or m is None:
        raise PreconditionError(f"meet/join of {a},{b} does not exist")
    return o.ominus[j][m]


@dataclass(frozen=True)
class Quotient:
    """A quotient algebra and the class map ``E -> E/I``.

    Class ``k`` of the quotient is labelled by its least member,
    ``representatives[k]``.
    """

    algebra: FiniteEffectAlgebra
    class_map: Tuple[int, ...]
    representatives: Tuple[int, ...]


def quotient_mv(E: FiniteEffectAlgebra, ideal: Iterable[int]) -> Quotient:
    """Quotient of an MV-effect algebra by an ideal, ``a ~ b`` iff ``a (+) b`` lies in the ideal.

    Here ``(+)`` is the symmetric difference. The quotient sum is
    ``[a] + [b] = [a1 + b1]`` for any representatives whose sum is defined;
    independence of the representatives is checked, not assumed.
    """
    _require_mv(E)
    I = set(ideal)
    if not is_ideal(E, I):
        raise PreconditionError(f"{sorted(I)} is not an ideal")
    n = E.n
    cls = [-1] * n
    reps: List[int] = []
    for a in range(n):
        if cls[a] != -1:
            continue
        k = len(reps)
        reps.append(a)
        for b in range(a, n):
            if cls[b] == -1 and symmetric_difference(E, a, b) in I:
                cls[b] = k
    # the relation must be transitive for the classes above to be well defined
    for a in range(n):
        for b in range(n):
            if (cls[a] == cls[b]) != (symmetric_difference(E, a, b) in I):
                raise PreconditionError(f"congruence fails at ({a}, {b})")
    m = len(reps)
    table: List[List[Optional[int]]] = [[None] * m for _ in range(m)]
    for a, b, c in E.defined_sums():
        ka, kb, kc = cls[a], cls[b], cls[c]
        if table[ka][kb] is None:
            table[ka][kb] = kc
        elif table[ka][kb] != kc:
            raise PreconditionError(f"quotient sum not well defined at classes ({ka}, {kb})")
    labels = None
    if E.labels:
        labels = tuple(f"[{E.labels[r]}]" for r in reps)
    Q = FiniteEffectAlgebra(m, cls[E.zero], cls[E.one], table, labels)
    report = validate_effect_algebra(Q)
    if not report.valid:
        raise PreconditionError(f"quotient is not an effect algebra: {report.to_dict()}")
    return Quotient(Q, tuple(cls), tuple(reps))


def is_state(E: FiniteEffectAlgebra, values: Sequence) -> bool:
    """Unital, additive, ``[0, 1]``-valued."""
    v = [_exact.to_fraction(x) if not isinstance(x, float) else x for x in values]
    if len(v) != E.n or v[E.one] != 1:
        return False
    if any(x < 0 or x > 1 for x in v):
        return False
    tol = 1e-12 if any(isinstance(x, float) for x in v) else 0
    return all(abs(v[a] + v[b] - v[c]) <= tol for a, b, c in E.defined_sums())


@dataclass(frozen=True)
class StatePolytope:
    """Vertices of the state space, or an emptiness certificate."""

    vertices: Tuple[Tuple[Fraction, ...], ...]
    certificate: Optional[str] = None

    @property
    def empty(self) -> bool:
        return not self.vertices

    def to_dict(self) -> dict:
        return {
            "empty": self.empty,
            "vertices": [[str(x) for x in v] for v in self.vertices],
            "certificate": self.certificate,
        }


def state_space(E: FiniteEffectAlgebra) -> StatePolytope:
    """Exact vertex description of ``{s : s(1) = 1, s additive, s >= 0}``.

    The equality system is solved over the rationals as ``s = x0 + N t``;
    vertices are the feasible points where ``dim t`` independent
    nonnegativity constraints are tight. Upper bounds ``s <= 1`` follow
    from ``s(a) + s(a') = 1``.
    """
    _require_valid(E)
    n = E.n
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    unit = [Fraction(0)] * n
    unit[E.one] = Fraction(1)
    rows.append(unit)
    rhs.append(Fraction(1))
    seen = set()
    for a, b, c in E.defined_sums():
        r = [Fraction(0)] * n
        r[a] += 1
        r[b] += 1
        r[c] -= 1
        key = tuple(r)
        if key in seen or not any(r):
            continue
        seen.add(key)
        rows.append(r)
        rhs.append(Fraction(0))
    sol = _exact.solve_affine(rows, rhs)
    if sol is None:
        return StatePolytope((), "additivity equations are inconsistent")
    x0, null = sol
    k = len(null)
    # inequality i reads x0[i] + sum_j null[j][i] t_j >= 0
    ineqs = {}
    for i in range(n):
        coeffs = tuple(null[j][i] for j in range(k))
        ineqs.setdefault((coeffs, x0[i]), i)
    ineq_list = list(ineqs)

    def point(t):
        return tuple(x0[i] + sum((null[j][i] * t[j] for j in range(k)), Fraction(0)) for i in range(n))

    vertices = set()
    if k == 0:
        p = point(())
        if all(x >= 0 for x in p):
            vertices.add(p)
    else:
        for combo in itertools.combinations(ineq_list, k):
            a = [list(c[0]) for c in combo]
            b = [-c[1] for c in combo]
            t = _exact.solve_square(a, b)
            if t is None:
                continue
            p = point(t)
            if all(x >= 0 for x in p):
                vertices.add(p)
    if not vertices:
        return StatePolytope((), "no feasible vertex of the bounded solution set")
    return StatePolytope(tuple(sorted(vertices)))


def ordering_witness(E: FiniteEffectAlgebra, states: Sequence[Sequence]) -> Optional[Tuple[int, int]]:
    """A pair ``(e, f)`` with every state ``w(e) <= w(f)`` but ``e`` not below ``f``."""
    o = E.order
    for e in range(E.n):
        for f in range(E.n):
            if not o.leq[e][f] and all(w[e] <= w[f] for w in states):
                return e, f
    return None


def is_ordering_set(E: FiniteEffectAlgebra, states: Sequence[Sequence]) -> bool:
    """Whether the states separate the order (``w(e) <= w(f)`` for all w forces ``e <= f``).

    When true, ``e -> (w(e))_w`` is an order embedding of ``E`` into ``[0,1]^states``.
    """
    for w in states:
        if not is_state(E, w):
            raise PreconditionError(f"{list(w)} is not a state")
    return ordering_witness(E, states) is None
