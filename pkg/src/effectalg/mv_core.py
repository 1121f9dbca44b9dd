"""Finite MV-algebras as total tables, and the dictionary with MV-effect algebras."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, List, Optional, Sequence, Tuple

from .effect_core import (
    FiniteEffectAlgebra,
    PreconditionError,
    StructuralError,
    ValidationReport,
    Violation,
    classify,
    validate_effect_algebra,
)


@dataclass(frozen=True)
class MvAlgebra:
    """``(M; boxplus, neg, 0)`` on elements ``0..n-1``."""

    n: int
    boxplus: Tuple[Tuple[int, ...], ...]
    neg: Tuple[int, ...]
    zero: int
    labels: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise StructuralError(f"n must be a positive integer, got {self.n!r}")
        rows = tuple(tuple(r) for r in self.boxplus)
        neg = tuple(self.neg)
        if len(rows) != self.n or any(len(r) != self.n for r in rows):
            raise StructuralError("boxplus must be an n x n table")
        if len(neg) != self.n:
            raise StructuralError("neg must have n entries")
        for v in itertools.chain(itertools.chain.from_iterable(rows), neg, (self.zero,)):
            if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < self.n:
                raise StructuralError(f"{v!r} is not an element index")
        object.__setattr__(self, "boxplus", rows)
        object.__setattr__(self, "neg", neg)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))

    @property
    def one(self) -> int:
        return self.neg[self.zero]

    @classmethod
    def from_dict(cls, data: dict) -> "MvAlgebra":
        try:
            return cls(data["n"], data["boxplus"], data["neg"], data.get("zero", 0), data.get("labels"))
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed MV-algebra: {exc}") from exc

    def to_dict(self) -> dict:
        d = {"n": self.n, "zero": self.zero, "boxplus": [list(r) for r in self.boxplus], "neg": list(self.neg)}
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d

    @cached_property
    def ops(self) -> "MvDerivedOps":
        return derived_ops(self)


@dataclass(frozen=True)
class MvDerivedOps:
    boxdot: Tuple[Tuple[int, ...], ...]
    vee: Tuple[Tuple[int, ...], ...]
    wedge: Tuple[Tuple[int, ...], ...]
    boxminus: Tuple[Tuple[int, ...], ...]


def derived_ops(M: MvAlgebra) -> MvDerivedOps:
    """``x.y = (x'+y')'``, ``x v y = (x'+y)'+y``, ``x ^ y = (x' v y')'``, ``x - y = (x'+y)'``."""
    p, ng, r = M.boxplus, M.neg, range(M.n)
    boxdot = tuple(tuple(ng[p[ng[x]][ng[y]]] for y in r) for x in r)
    vee = tuple(tuple(p[ng[p[ng[x]][y]]][y] for y in r) for x in r)
    wedge = tuple(tuple(ng[vee[ng[x]][ng[y]]] for y in r) for x in r)
    boxminus = tuple(tuple(ng[p[ng[x]][y]] for y in r) for x in r)
    return MvDerivedOps(boxdot, vee, wedge, boxminus)


def validate_mv(M: MvAlgebra, max_per_axiom: int = 8) -> ValidationReport:
    """Exhaustive check of the MV identities, one tag per identity.

    Tags: ``COMM``, ``ASSOC``, ``NEUTRAL``, ``INVOLUTION``, ``ABSORB``
    (``x + 1 = 1``), ``LUKASIEWICZ`` (``x+(x+y')' = y+(y+x')'``).
    """
    p, ng, z, n = M.boxplus, M.neg, M.zero, M.n
    one = ng[z]
    out: List[Violation] = []
    counts: dict = {}

    def emit(tag, *w):
        if counts.get(tag, 0) < max_per_axiom:
            out.append(Violation(tag, tuple(w)))
        counts[tag] = counts.get(tag, 0) + 1

    for x in range(n):
        if ng[ng[x]] != x:
            emit("INVOLUTION", x)
    for x in range(n):
        if p[x][z] != x:
            emit("NEUTRAL", x)
        if p[x][one] != one:
            emit("ABSORB", x)
    for x, y in itertools.product(range(n), repeat=2):
        if p[x][y] != p[y][x]:
            emit("COMM", x, y)
        if p[x][ng[p[x][ng[y]]]] != p[y][ng[p[y][ng[x]]]]:
            emit("LUKASIEWICZ", x, y)
    for x, y, w in itertools.product(range(n), repeat=3):
        if p[p[x][y]][w] != p[x][p[y][w]]:
            emit("ASSOC", x, y, w)
    return ValidationReport(tuple(out))


def _require_mv_table(M: MvAlgebra) -> None:
    report = validate_mv(M, max_per_axiom=1)
    if not report.valid:
        v = report.violations[0]
        raise PreconditionError(f"not an MV-algebra: {v.axiom} fails at {v.witness}")


def mv_to_effect_algebra(M: MvAlgebra) -> FiniteEffectAlgebra:
    """``a + b`` defined iff ``a . b = 0``, and then equals ``a boxplus b``."""
    _require_mv_table(M)
    dot = M.ops.boxdot
    table = [[M.boxplus[a][b] if dot[a][b] == M.zero else None for b in range(M.n)] for a in range(M.n)]
    return FiniteEffectAlgebra(M.n, M.zero, M.one, table, M.labels)


def effect_algebra_to_mv(E: FiniteEffectAlgebra) -> MvAlgebra:
    """``a boxplus b = a + (a' ^ b)`` and ``a' = `` orthosupplement."""
    if not classify(E).is_mv_effect_algebra:
        raise PreconditionError("effect algebra is not an MV-effect algebra")
    o = E.order
    table = [[E.sum[a][o.meet[o.perp[a]][b]] for b in range(E.n)] for a in range(E.n)]
    M = MvAlgebra(E.n, table, o.perp, E.zero, E.labels)
    _require_mv_table(M)
    return M


def boolean_skeleton(M: MvAlgebra) -> FrozenSet[int]:
    """Idempotents ``{a : a + a = a}``; closure under ``+`` and ``'`` is checked."""
    _require_mv_table(M)
    B = frozenset(a for a in range(M.n) if M.boxplus[a][a] == a)
    for a in B:
        if M.neg[a] not in B or any(M.boxplus[a][b] not in B for b in B):
            raise AssertionError(f"idempotents not closed at {a}")
    return B


def is_boolean_subalgebra(M: MvAlgebra, subset: Sequence[int]) -> bool:
    """Idempotence plus distributivity of the induced lattice on ``subset``."""
    S = list(subset)
    ops = M.ops
    if any(M.boxplus[a][a] != a for a in S):
        return False
    for a, b, c in itertools.product(S, repeat=3):
        if ops.wedge[a][ops.vee[b][c]] != ops.vee[ops.wedge[a][b]][ops.wedge[a][c]]:
            return False
    return all(ops.wedge[a][M.neg[a]] == M.zero and ops.vee[a][M.neg[a]] == M.one for a in S)


def symmetric_difference(M: MvAlgebra, a: int, b: int) -> int:
    """``(a v b) - (a ^ b)``, computed as ``(a v b) . (a ^ b)'``."""
    ops = M.ops
    return ops.boxdot[ops.vee[a][b]][M.neg[ops.wedge[a][b]]]


# ---------------------------------------------------------------------------
# constructors


def lukasiewicz_chain(k: int) -> MvAlgebra:
    """The chain ``{0, 1/k, ..., 1}`` with truncated addition."""
    r = range(k + 1)
    labels = ["0" if i == 0 else "1" if i == k else f"{i}/{k}" for i in r]
    return MvAlgebra(k + 1, [[min(i + j, k) for j in r] for i in r], [k - i for i in r], 0, labels)


def product(M1: MvAlgebra, M2: MvAlgebra) -> MvAlgebra:
    """Direct product; the pair ``(x, y)`` has index ``x * M2.n + y``."""
    n2 = M2.n
    idx = lambda x, y: x * n2 + y  # noqa: E731
    pairs = list(itertools.product(range(M1.n), range(n2)))
    table = [[idx(M1.boxplus[x1][x2], M2.boxplus[y1][y2]) for (x2, y2) in pairs] for (x1, y1) in pairs]
    neg = [idx(M1.neg[x], M2.neg[y]) for x, y in pairs]
    labels = None
    if M1.labels and M2.labels:
        labels = [f"({M1.labels[x]},{M2.labels[y]})" for x, y in pairs]
    return MvAlgebra(M1.n * n2, table, neg, idx(M1.zero, M2.zero), labels)


def power(M: MvAlgebra, k: int) -> MvAlgebra:
    """``M^k``, the finite grid of functions from ``k`` points into ``M``."""
    out = M
    for _ in range(k - 1):
        out = product(out, M)
    return out


def check_round_trip(M: MvAlgebra) -> bool:
    """MV -> effect algebra -> MV returns the same tables."""
    E = mv_to_effect_algebra(M)
    if not validate_effect_algebra(E).valid:
        return False
    back = effect_algebra_to_mv(E)
    return back.boxplus == M.boxplus and back.neg == M.neg and back.zero == M.zero
