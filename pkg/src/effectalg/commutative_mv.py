"""Fuzzy events on a finite set: stochastic idempotents and conditional expectations.

Functions ``X -> [0, 1]`` on a finite ``X`` are vectors; a linear positive
unital idempotent map on them is a row-stochastic matrix ``T`` with
``T @ T == T``. Rational inputs (``Fraction`` or ``{"num", "den"}``) are
handled exactly; floats are converted to nearby fractions first.

Structure used throughout: the nonzero columns of ``T`` are its recurrent
states, grouped into blocks of identical rows; every other row is a
mixture of the block rows. ``range(T)`` is spanned by the absorption
vectors ``u_i(x) = sum_{y in block i} T[x][y]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._exact import Matrix, as_matrix, matmul, matvec, rref, to_fraction

Vector = Tuple[Fraction, ...]


class InternalError(RuntimeError):
    """An exact decision contradicted a sampled or structural cross-check."""


class TheoremViolation(AssertionError):
    pass


class NotJordan(ValueError):
    def __init__(self, witness: Vector):
        self.witness = witness
        super().__init__(f"T(f^2) != T((Tf)^2) at f={[str(x) for x in witness]}")


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class StochasticReport:
    violations: Tuple[Tuple[str, Tuple[int, ...]], ...]

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": [{"check": c, "witness": list(w)} for c, w in self.violations]}


def as_stochastic(T) -> Matrix:
    m = as_matrix(T)
    if not m or any(len(r) != len(m) for r in m):
        raise ValueError("T must be a non-empty square matrix")
    return m


def validate_stochastic_idempotent(T) -> StochasticReport:
    """Tags ``NONNEG (i, j)``, ``ROWSUM (i,)`` and ``IDEMPOTENT (i, j)``, first witness each."""
    m = as_stochastic(T)
    n = len(m)
    out = []
    neg = next(((i, j) for i in range(n) for j in range(n) if m[i][j] < 0), None)
    if neg:
        out.append(("NONNEG", neg))
    row = next((i for i in range(n) if sum(m[i]) != 1), None)
    if row is not None:
        out.append(("ROWSUM", (row,)))
    sq = matmul(m, m)
    idem = next(((i, j) for i in range(n) for j in range(n) if sq[i][j] != m[i][j]), None)
    if idem:
        out.append(("IDEMPOTENT", idem))
    return StochasticReport(tuple(out))


def _require_valid(T) -> Matrix:
    m = as_stochastic(T)
    rep = validate_stochastic_idempotent(m)
    if not rep.valid:
        c, w = rep.violations[0]
        raise ValueError(f"not a stochastic idempotent: {c} at {w}")
    return m


@dataclass(frozen=True)
class BlockStructure:
    recurrent: Tuple[int, ...]
    blocks: Tuple[Tuple[int, ...], ...]
    absorption: Tuple[Vector, ...]  # absorption[i][x] = u_i(x)

    def mixed_state(self) -> Optional[Tuple[int, int, int]]:
        """A state ``x`` absorbed into two blocks ``i < j``, if any."""
        for x in range(len(self.absorption[0]) if self.absorption else 0):
            pos = [i for i, u in enumerate(self.absorption) if u[x] > 0]
            if len(pos) > 1:
                return x, pos[0], pos[1]
        return None


def block_structure(T) -> BlockStructure:
    m = _require_valid(T)
    n = len(m)
    rec = [y for y in range(n) if any(m[x][y] != 0 for x in range(n))]
    blocks: List[List[int]] = []
    for y in rec:
        for b in blocks:
            if m[b[0]] == m[y]:
                b.append(y)
                break
        else:
            blocks.append([y])
    absorption = tuple(tuple(sum((m[x][y] for y in b), Fraction(0)) for x in range(n)) for b in blocks)
    return BlockStructure(tuple(rec), tuple(tuple(b) for b in blocks), absorption)


# ---------------------------------------------------------------------------
# range analysis


class _Span:
    """Row space of a Fraction matrix with fast exact membership."""

    def __init__(self, vectors: Sequence[Sequence[Fraction]]):
        self.red, self.pivots = rref([list(v) for v in vectors]) if vectors else ([], [])

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def __contains__(self, v) -> bool:
        w = list(v)
        for row, p in zip(self.red, self.pivots):
            c = w[p]
            if c:
                w = [a - c * b for a, b in zip(w, row)]
        return not any(w)


def range_span(T) -> _Span:
    m = as_stochastic(T)
    return _Span([list(col) for col in zip(*m)])


def _proportional_groups(rows: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    groups: List[List[int]] = []
    for x, r in enumerate(rows):
        if not any(r):
            continue
        for g in groups:
            s = rows[g[0]]
            k = next(i for i, v in enumerate(s) if v)
            ratio = r[k] / s[k]
            if ratio > 0 and all(a == ratio * b for a, b in zip(r, s)):
                g.append(x)
                break
        else:
            groups.append([x])
    return groups


def crisp_range_atoms(T) -> List[Vector]:
    """Indicators of the row-direction groups of a range basis.

    ``range(T)`` is closed under pointwise min exactly when the nonzero rows of
    a range basis lie on ``dim`` positive rays; the group indicators are then
    the minimal crisp elements of the range.
    """
    span = range_span(T)
    n = len(as_stochastic(T))
    rows = [[row[x] for row in span.red] for x in range(n)]
    return [tuple(Fraction(int(x in g)) for x in range(n)) for g in _proportional_groups(rows)]


@dataclass(frozen=True)
class Decision:
    value: bool
    witness: Optional[Tuple[Vector, Vector]] = None


def _chi(n: int, S) -> Vector:
    return tuple(Fraction(int(x in S)) for x in range(n))


def _structural_witness(T, m: Matrix) -> Tuple[Vector, Vector]:
    st = block_structure(m)
    mixed = st.mixed_state()
    if mixed is None:
        raise InternalError("range test failed but every state is absorbed into a single block")
    _, i, j = mixed
    n = len(m)
    return _chi(n, st.blocks[i]), _chi(n, st.blocks[j])


def _sample_pairs(m: Matrix, trials: int, seed: int):
    rng = np.random.default_rng(seed)
    Tf = np.array(m, float)
    n = len(m)
    F = rng.uniform(0, 1, (trials, n))
    G = rng.uniform(0, 1, (trials, n))
    return Tf, F @ Tf.T, G @ Tf.T, F, G


def is_strong_commutative(T, trials: int = 1000, seed: int = 0) -> Decision:
    """``T(min(Tf, Tg)) = min(Tf, Tg)`` for all ``f, g``, decided exactly.

    Exact route: the number of positive row directions of a range basis
    equals the range dimension. Witness: indicators of two blocks into
    which one state is absorbed. Cross-check: ``trials`` random pairs
    when the answer is positive, and the witness itself when negative.
    """
    m = _require_valid(T)
    span = range_span(m)
    strong = len(crisp_range_atoms(m)) == span.dim
    Tf, TF, TG, _, _ = _sample_pairs(m, trials, seed)
    if strong:
        M = np.minimum(TF, TG)
        err = np.abs(M @ Tf.T - M).max(initial=0.0)
        if err > 1e-9:
            raise InternalError(f"decided strong but a sampled pair fails by {err:.3g}")
        return Decision(True)
    f, g = _structural_witness(T, m)
    mn = [min(a, b) for a, b in zip(matvec(m, f), matvec(m, g))]
    if matvec(m, mn) == mn:
        raise InternalError("decided not strong but the witness pair passes")
    return Decision(False, (f, g))


def is_ce_commutative(T, trials: int = 1000, seed: int = 0) -> Decision:
    """``T((Tf) g (Tf)) = (Tf)(Tg)(Tf)`` for all ``f, g``, decided exactly.

    Exact route: range(T) is closed under pointwise products of basis
    pairs (a unital subalgebra). Cross-checked like the strong test.
    """
    m = _require_valid(T)
    span = range_span(m)
    basis = span.red
    closed = all(
        tuple(a * b for a, b in zip(basis[i], basis[j])) in span
        for i in range(len(basis))
        for j in range(i, len(basis))
    )
    Tf, TF, TG, F, G = _sample_pairs(m, trials, seed)
    if closed:
        lhs = (TF * G * TF) @ Tf.T
        rhs = TF * TG * TF
        err = np.abs(lhs - rhs).max(initial=0.0)
        if err > 1e-9:
            raise InternalError(f"range is a subalgebra but a sampled pair fails by {err:.3g}")
        return Decision(True)
    f, g = _structural_witness(T, m)
    tf, tg = matvec(m, f), matvec(m, g)
    if matvec(m, [a * b * a for a, b in zip(tf, g)]) == [a * b * a for a, b in zip(tf, tg)]:
        raise InternalError("range is not a subalgebra but the witness pair passes")
    return Decision(False, (f, g))


# ---------------------------------------------------------------------------
# Jordan maps and kernels


@dataclass(frozen=True)
class JordanSupport:
    K: Tuple[int, ...]
    phi: Matrix  # n x |K|, columns of T on K
    extension_check: bool


def jordan_witness(T) -> Optional[Vector]:
    """A 0/1 vector ``f`` with ``T(f^2) != T((Tf)^2)``, or None if T is Jordan."""
    m = _require_valid(T)
    n = len(m)
    cols = [[m[x][y] for x in range(n)] for y in range(n)]
    for j in range(n):
        for k in range(j, n):
            e = [Fraction(int(x == j == k)) for x in range(n)]
            prod = [a * b for a, b in zip(cols[j], cols[k])]
            if matvec(m, e) != matvec(m, prod):
                for S in ({j}, {k}, {j, k}):
                    f = _chi(n, S)
                    tf = matvec(m, f)
                    if matvec(m, [v * v for v in f]) != matvec(m, [v * v for v in tf]):
                        return f
                raise InternalError("polarized Jordan identity fails but no 0/1 witness found")
    return None


def jordan_support_characterization(T) -> JordanSupport:
    """``K = {x : row x is e_x}`` and ``T f = phi(f|K)`` with ``phi`` the columns of T on K.

    Raises :class:`NotJordan` carrying a witness when ``T`` fails the Jordan identity.
    """
    m = _require_valid(T)
    w = jordan_witness(m)
    if w is not None:
        raise NotJordan(w)
    n = len(m)
    K = tuple(x for x in range(n) if all(m[x][y] == int(x == y) for y in range(n)))
    phi = [[m[x][y] for y in K] for x in range(n)]
    outside_zero = all(m[x][y] == 0 for x in range(n) for y in range(n) if y not in K)
    unital = all(sum(r) == 1 for r in phi) and all(v >= 0 for r in phi for v in r)
    return JordanSupport(K, phi, outside_zero and unital)


@dataclass(frozen=True)
class KernelIdeal:
    K: Tuple[int, ...]
    n: int

    def contains(self, f: Sequence) -> bool:
        """``f`` lies in the kernel ideal iff it vanishes on ``K``."""
        return all(to_fraction(f[x]) == 0 for x in self.K)


def kernel_ideals(T) -> KernelIdeal:
    """``K`` is the complement of the largest set ``A`` with ``T chi_A = 0``."""
    m = _require_valid(T)
    n = len(m)
    K = tuple(y for y in range(n) if any(m[x][y] != 0 for x in range(n)))
    ideal = KernelIdeal(K, n)
    for y in range(n):
        e = _chi(n, {y})
        if (not any(matvec(m, e))) != ideal.contains(e):
            raise InternalError(f"kernel test disagrees at coordinate {y}")
    return ideal


# ---------------------------------------------------------------------------
# finite probability spaces


@dataclass(frozen=True)
class FiniteProbSpace:
    P: Vector

    def __post_init__(self):
        P = tuple(to_fraction(p) for p in self.P)
        if not P or any(p < 0 for p in P) or sum(P) != 1:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "P", P)

    @property
    def n(self) -> int:
        return len(self.P)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(x for x, p in enumerate(self.P) if p > 0)


@dataclass(frozen=True)
class BlockPartition:
    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(x) for x in b)) for b in self.blocks)
        if any(not b for b in blocks):
            raise ValueError("empty block")
        object.__setattr__(self, "blocks", blocks)

    def check(self, n: int) -> None:
        pts = sorted(x for b in self.blocks for x in b)
        if pts != list(range(n)):
            raise ValueError(f"blocks do not partition 0..{n - 1}")

    def unions(self, limit: int = 10):
        """Indicators of block unions; every union when there are at most ``limit`` blocks,
        otherwise the single blocks (the identities checked are additive in ``b``)."""
        k = len(self.blocks)
        if k <= limit:
            for mask in range(2**k):
                yield {x for i, b in enumerate(self.blocks) if mask >> i & 1 for x in b}
        else:
            for b in self.blocks:
                yield set(b)


def _fuzzy(a: Sequence, n: int) -> Vector:
    v = tuple(to_fraction(x) for x in a)
    if len(v) != n or any(not 0 <= x <= 1 for x in v):
        raise ValueError("fuzzy event must have n entries in [0, 1]")
    return v


def _mean(space: FiniteProbSpace, a: Sequence[Fraction]) -> Fraction:
    return sum((p * x for p, x in zip(space.P, a)), Fraction(0))


def conditional_mean(space: FiniteProbSpace, partition: BlockPartition, a: Sequence[Fraction]) -> Vector:
    """Blockwise ``P``-average, 0 on null blocks; no checks."""
    out = [Fraction(0)] * space.n
    for b in partition.blocks:
        mass = sum((space.P[x] for x in b), Fraction(0))
        if mass:
            v = sum((space.P[x] * a[x] for x in b), Fraction(0)) / mass
            for x in b:
                out[x] = v
    return tuple(out)


def mv_conditional_expectation(space: FiniteProbSpace, partition: BlockPartition, a: Sequence) -> Vector:
    """Conditional expectation of a fuzzy event given the block algebra, exactly.

    The defining identity ``sum(E[a] b P) = sum(min(a, b) P)`` is verified for
    every crisp ``b`` measurable with respect to the blocks.
    """
    partition.check(space.n)
    av = _fuzzy(a, space.n)
    out = conditional_mean(space, partition, av)
    for S in partition.unions():
        b = _chi(space.n, S)
        lhs = _mean(space, [o * bx for o, bx in zip(out, b)])
        rhs = _mean(space, [min(x, bx) for x, bx in zip(av, b)])
        if lhs != rhs:
            raise TheoremViolation(f"integral identity fails for b={sorted(S)}")
    return out


def conditional_expectation_clauses(
    space: FiniteProbSpace,
    partition: BlockPartition,
    a: Sequence,
    b: Optional[Sequence] = None,
    chain_length: int = 5,
) -> Dict[str, bool]:
    """The four defining properties of an MV-conditional expectation, compared on support(P).

    ``zero_one``: E[0] = 0 and E[1] = 1; ``additive``: E[a + b] = E[a] + E[b]
    when ``a + b <= 1`` (``b`` defaults to ``(1 - a)/2``); ``unit_range``:
    values in [0, 1]; ``monotone_chain``: along ``a_k = (k/L) a`` the
    conditional expectations increase to ``E[a]``.
    """
    n = space.n
    supp = space.support
    av = _fuzzy(a, n)
    bv = _fuzzy(b, n) if b is not None else tuple((1 - x) / 2 for x in av)
    if any(x + y > 1 for x, y in zip(av, bv)):
        raise ValueError("a + b exceeds 1")
    E = lambda v: mv_conditional_expectation(space, partition, v)  # noqa: E731
    on = lambda u, v: all(u[x] == v[x] for x in supp)  # noqa: E731
    zero = tuple(Fraction(0) for _ in range(n))
    one = tuple(Fraction(1) for _ in range(n))
    Ea, Eb = E(av), E(bv)
    Esum = E(tuple(x + y for x, y in zip(av, bv)))
    chain = [E(tuple(Fraction(k, chain_length) * x for x in av)) for k in range(chain_length + 1)]
    mono = all(chain[k][x] <= chain[k + 1][x] for k in range(chain_length) for x in range(n))
    return {
        "zero_one": on(E(zero), zero) and on(E(one), one),
        "additive": on(Esum, tuple(x + y for x, y in zip(Ea, Eb))),
        "unit_range": all(0 <= x <= 1 for x in Ea),
        "monotone_chain": mono and on(chain[-1], Ea),
    }


# ---------------------------------------------------------------------------
# quotient by the null ideal, and expectations from strong operators


@dataclass(frozen=True)
class QuotientStrong:
    points: Tuple[int, ...]  # support(P), the surviving points in order
    T: Matrix
    blocks: Tuple[Tuple[int, ...], ...]  # blocks over positions in ``points``


def quotient_strong_operator(space: FiniteProbSpace, partition: BlockPartition) -> QuotientStrong:
    """Conditioning as a matrix on ``support(P)``, checked strong with block-constant range."""
    partition.check(space.n)
    pts = space.support
    pos = {x: i for i, x in enumerate(pts)}
    blocks = tuple(tuple(pos[x] for x in b if x in pos) for b in partition.blocks)
    blocks = tuple(b for b in blocks if b)
    k = len(pts)
    T = [[Fraction(0)] * k for _ in range(k)]
    for b in blocks:
        mass = sum((space.P[pts[i]] for i in b), Fraction(0))
        for i in b:
            for j in b:
                T[i][j] = space.P[pts[j]] / mass
    if not validate_stochastic_idempotent(T).valid:
        raise TheoremViolation("conditioning matrix is not a stochastic idempotent")
    if not is_strong_commutative(T).value:
        raise TheoremViolation("conditioning operator is not strong")
    if not range_equals_block_constants(T, blocks):
        raise TheoremViolation("range differs from block-constant functions")
    return QuotientStrong(pts, T, blocks)


def range_equals_block_constants(T, blocks: Sequence[Sequence[int]]) -> bool:
    n = len(T)
    span = range_span(T)
    return span.dim == len(blocks) and all(_chi(n, set(b)) in span for b in blocks)


@dataclass(frozen=True)
class StrongCEReport:
    weights: Vector  # the measure s^T T
    crisp: Tuple[Vector, ...]
    checked: int
    ok: bool


def mv_ce_from_strong_operator(T, s: Sequence, test_family: Optional[Sequence[Sequence]] = None) -> StrongCEReport:
    """With ``m = s o T``, verify ``sum(m * (Ta) * b) = m(min(a, b))`` for crisp ``b`` in range(T).

    ``a`` runs over the coordinate vectors (the identity is linear in ``a``)
    plus ``test_family``; ``b`` over all unions of minimal crisp range elements.
    Raises :class:`TheoremViolation` on failure.
    """
    m = _require_valid(T)
    n = len(m)
    if not is_strong_commutative(m).value:
        raise ValueError("T is not strong")
    sv = tuple(to_fraction(x) for x in s)
    if len(sv) != n or any(x < 0 for x in sv) or sum(sv) != 1:
        raise ValueError("s must be a probability vector of length n")
    mu = tuple(sum((sv[x] * m[x][y] for x in range(n)), Fraction(0)) for y in range(n))
    atoms = crisp_range_atoms(m)
    span = range_span(m)
    crisp = []
    for mask in range(2 ** len(atoms)):
        b = tuple(sum((atoms[i][x] for i in range(len(atoms)) if mask >> i & 1), Fraction(0)) for x in range(n))
        if b not in span:
            raise TheoremViolation("union of crisp atoms is not in the range")
        crisp.append(b)
    family = [_chi(n, {x}) for x in range(n)] + [_fuzzy(a, n) for a in (test_family or [])]
    checked = 0
    for a in family:
        ta = matvec(m, list(a))
        for b in crisp:
            lhs = sum((w * t * bx for w, t, bx in zip(mu, ta, b)), Fraction(0))
            rhs = sum((w * min(x, bx) for w, x, bx in zip(mu, a, b)), Fraction(0))
            checked += 1
            if lhs != rhs:
                raise TheoremViolation(f"integral identity fails at a={a}, b={b}")
    return StrongCEReport(mu, tuple(crisp), checked, True)


# ---------------------------------------------------------------------------
# random instances


def _random_distribution(k: int, rng: np.random.Generator, max_den: int = 6) -> List[Fraction]:
    w = [int(v) for v in rng.integers(1, max_den + 1, size=k)]
    tot = sum(w)
    return [Fraction(x, tot) for x in w]


def random_stochastic_idempotent(
    n: int,
    rng: np.random.Generator,
    allow_faithful: bool = True,
    mixing: float = 0.5,
) -> Matrix:
    """Exact random stochastic idempotent built from its block structure.

    Recurrent states are split into blocks sharing one positive row
    supported on the block; each remaining state gets a row that mixes
    block rows (with probability ``mixing``) or copies one of them.
    """
    if n < 1 or (not allow_faithful and n < 2):
        raise ValueError("n too small")
    lo = 1
    hi = n if allow_faithful else n - 1
    r = int(rng.integers(lo, hi + 1))
    perm = [int(x) for x in rng.permutation(n)]
    rec, trans = perm[:r], perm[r:]
    k = int(rng.integers(1, r + 1))
    labels = [int(x) for x in rng.integers(0, k, size=r)]
    labels[:k] = range(k)
    blocks = [[rec[i] for i in range(r) if labels[i] == b] for b in range(k)]
    rows = []
    for b in blocks:
        row = [Fraction(0)] * n
        for y, p in zip(b, _random_distribution(len(b), rng)):
            row[y] = p
        rows.append(row)
    T = [[Fraction(0)] * n for _ in range(n)]
    for b, row in zip(blocks, rows):
        for x in b:
            T[x] = list(row)
    for x in trans:
        if k > 1 and rng.uniform() < mixing:
            w = _random_distribution(k, rng)
        else:
            j = int(rng.integers(k))
            w = [Fraction(int(i == j)) for i in range(k)]
        T[x] = [sum((wi * row[y] for wi, row in zip(w, rows)), Fraction(0)) for y in range(n)]
    return T


def random_fuzzy(n: int, rng: np.random.Generator, den: int = 12) -> Vector:
    return tuple(Fraction(int(v), den) for v in rng.integers(0, den + 1, size=n))


def random_space(n: int, rng: np.random.Generator, null_prob: float = 0.2) -> FiniteProbSpace:
    w = [0 if rng.uniform() < null_prob else int(rng.integers(1, 7)) for _ in range(n)]
    if not any(w):
        w[int(rng.integers(n))] = 1
    tot = sum(w)
    return FiniteProbSpace(tuple(Fraction(x, tot) for x in w))


def random_partition(n: int, rng: np.random.Generator) -> BlockPartition:
    k = int(rng.integers(1, n + 1))
    labels = [int(x) for x in rng.integers(0, k, size=n)]
    blocks = [tuple(x for x in range(n) if labels[x] == b) for b in range(k)]
    return BlockPartition(tuple(b for b in blocks if b))
