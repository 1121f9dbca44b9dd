"""State operators on finite effect algebras.

A state operator is a self-map ``tau`` with ``tau(1) = 1``,
``tau(a + b) = tau(a) + tau(b)`` whenever ``a + b`` is defined, and
``tau(tau(a)) = tau(a)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import _kernels
from .effect_core import (
    FiniteEffectAlgebra,
    PreconditionError,
    Quotient,
    Violation,
    classify,
    is_ideal,
    is_ordering_set,
    is_state,
    quotient_mv,
    _require_valid,
)

DEFAULT_MAX_N = 8


class EnumerationRefused(RuntimeError):
    """Raised instead of searching an algebra above the size bound."""

    def __init__(self, n: int, bound: int):
        self.n = n
        self.bound = bound
        self.candidates = n**n
        super().__init__(f"n={n} exceeds bound {bound}; refusing to search {n}**{n}={n**n} maps")


@dataclass(frozen=True)
class ElementMap:
    """A candidate state operator, ``tau[a]`` being the image of ``a``."""

    tau: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(int(x) for x in self.tau))

    def __call__(self, a: int) -> int:
        return self.tau[a]

    def __len__(self):
        return len(self.tau)


def _as_map(m) -> ElementMap:
    return m if isinstance(m, ElementMap) else ElementMap(tuple(m))


@dataclass(frozen=True)
class StateOperatorReport:
    is_state_operator: bool
    violated: Tuple[Violation, ...] = ()
    is_strong: Optional[bool] = None
    is_faithful: Optional[bool] = None
    kernel: Tuple[int, ...] = ()
    lemma_clauses: Dict[str, bool] = field(default_factory=dict)
    strong_witness: Optional[Tuple[int, int]] = None

    def to_dict(self) -> dict:
        d = {
            "is_state_operator": self.is_state_operator,
            "violated": [v.to_dict() for v in self.violated],
        }
        if self.is_state_operator:
            d.update(
                is_strong=self.is_strong,
                is_faithful=self.is_faithful,
                kernel=list(self.kernel),
                lemma_clauses=dict(self.lemma_clauses),
            )
            if self.strong_witness is not None:
                d["strong_witness"] = list(self.strong_witness)
        return d


def _axiom_violations(E: FiniteEffectAlgebra, tau: Sequence[int]) -> List[Violation]:
    out = []
    if tau[E.one] != E.one:
        out.append(Violation("(i)", (E.one,)))
    for a, b, c in E.defined_sums():
        s = E.sum[tau[a]][tau[b]]
        if s is None or s != tau[c]:
            out.append(Violation("(ii)", (a, b)))
            break
    for a in range(E.n):
        if tau[tau[a]] != tau[a]:
            out.append(Violation("(iii)", (a,)))
            break
    return out


def lemma_clauses(E: FiniteEffectAlgebra, tau: Sequence[int]) -> Dict[str, bool]:
    """The five consequences every state operator must satisfy, checked exhaustively.

    (i) ``tau(0) = 0``; (ii) ``tau(a') = tau(a)'``; (iii) monotone and
    ``tau(b - a) = tau(b) - tau(a)``; (iv) ``tau(a ^ b) <= tau(a), tau(b)``
    and ``tau(a), tau(b) <= tau(a v b)`` where those exist; (v) the image
    is a sub-effect algebra.
    """
    o = E.order
    n = E.n
    r = range(n)
    c1 = tau[E.zero] == E.zero
    c2 = all(tau[o.perp[a]] == o.perp[tau[a]] for a in r)
    c3 = all(
        o.leq[tau[a]][tau[b]] and tau[o.ominus[b][a]] == o.ominus[tau[b]][tau[a]]
        for a in r
        for b in r
        if o.leq[a][b]
    )
    c4 = True
    for a in r:
        for b in r:
            m, j = o.meet[a][b], o.join[a][b]
            if m is not None and not (o.leq[tau[m]][tau[a]] and o.leq[tau[m]][tau[b]]):
                c4 = False
            if j is not None and not (o.leq[tau[a]][tau[j]] and o.leq[tau[b]][tau[j]]):
                c4 = False
    image = set(tau)
    c5 = all(o.perp[x] in image for x in image) and all(
        E.sum[x][y] is None or E.sum[x][y] in image for x in image for y in image
    )
    return {"(i)": c1, "(ii)": c2, "(iii)": c3, "(iv)": c4, "(v)": c5}


def strong_witness(E: FiniteEffectAlgebra, tau: Sequence[int]) -> Optional[Tuple[int, int]]:
    """A pair ``(a, b)`` where ``tau(a) ^ tau(b)`` exists but is not fixed by tau."""
    o = E.order
    for a in range(E.n):
        for b in range(E.n):
            m = o.meet[tau[a]][tau[b]]
            if m is not None and tau[m] != m:
                return a, b
    return None


def validate_state_operator(E: FiniteEffectAlgebra, m) -> StateOperatorReport:
    """Check (i)-(iii); for valid maps add strong/faithful flags, kernel and the lemma clauses.

    Invalid candidates produce a report with witnesses, never an exception.
    """
    tau = _as_map(m).tau
    if len(tau) != E.n or any(not 0 <= x < E.n for x in tau):
        raise PreconditionError(f"map of length {len(tau)} with values outside 0..{E.n - 1}")
    bad = _axiom_violations(E, tau)
    if bad:
        return StateOperatorReport(False, tuple(bad))
    kernel = tuple(a for a in range(E.n) if tau[a] == E.zero)
    w = strong_witness(E, tau)
    return StateOperatorReport(
        True,
        (),
        is_strong=w is None,
        is_faithful=kernel == (E.zero,),
        kernel=kernel,
        lemma_clauses=lemma_clauses(E, tau),
        strong_witness=w,
    )


def enumerate_state_operators(E: FiniteEffectAlgebra, max_n: int = DEFAULT_MAX_N) -> List[ElementMap]:
    """Every state operator on ``E``, in lexicographic order of ``tau``.

    Raises :class:`EnumerationRefused` when ``E.n > max_n``.
    """
    if E.n > max_n:
        raise EnumerationRefused(E.n, max_n)
    _require_valid(E)
    found = _kernels.enumerate_state_operators(E.int_table, list(E.order.perp), E.zero, E.one)
    return [ElementMap(t) for t in found]


@dataclass(frozen=True)
class QuotientOperator:
    quotient: Quotient
    tau_hat: ElementMap
    kernel: Tuple[int, ...]
    report: StateOperatorReport


def quotient_state_operator(M: FiniteEffectAlgebra, m) -> QuotientOperator:
    """Pass to ``M / I_tau`` with ``I_tau = {a : tau(a) = 0}`` and ``[a] -> [tau(a)]``.

    ``M`` must be an MV-effect algebra. Well-definedness of the induced
    map is checked on every pair of equivalent elements.
    """
    tau = _as_map(m).tau
    if not classify(M).is_mv_effect_algebra:
        raise PreconditionError("algebra is not an MV-effect algebra")
    rep = validate_state_operator(M, tau)
    if not rep.is_state_operator:
        raise PreconditionError(f"not a state operator: {rep.to_dict()['violated']}")
    kernel = rep.kernel
    if not is_ideal(M, kernel):
        raise AssertionError(f"kernel {kernel} is not an ideal")
    q = quotient_mv(M, kernel)
    cls = q.class_map
    k = q.algebra.n
    hat = [-1] * k
    for a in range(M.n):
        img = cls[tau[a]]
        if hat[cls[a]] == -1:
            hat[cls[a]] = img
        elif hat[cls[a]] != img:
            raise AssertionError(f"induced map not well defined at {a}")
    hat_map = ElementMap(tuple(hat))
    return QuotientOperator(q, hat_map, kernel, validate_state_operator(q.algebra, hat_map))


def induced_state(
    E: FiniteEffectAlgebra,
    m,
    omega: Sequence,
    ordering_set: Optional[Sequence[Sequence]] = None,
) -> Tuple[Fraction, ...]:
    """The state ``a -> omega(tau(a))``.

    When ``ordering_set`` is given it must contain ``omega`` and separate
    the order of ``E``; both are checked.
    """
    tau = _as_map(m).tau
    if not is_state(E, omega):
        raise PreconditionError(f"{list(omega)} is not a state")
    if ordering_set is not None:
        if not any(list(w) == list(omega) for w in ordering_set):
            raise PreconditionError("omega is not a member of the supplied ordering set")
        if not is_ordering_set(E, ordering_set):
            raise PreconditionError("supplied states do not form an ordering set")
    rep = validate_state_operator(E, tau)
    if not rep.is_state_operator:
        raise PreconditionError("map is not a state operator")
    s = tuple(omega[tau[a]] for a in range(E.n))
    if not is_state(E, s):
        raise AssertionError("composition is not a state")
    return s
