"""Effects in finite-dimensional matrix algebras and maps between them.

Hermitian ``d x d`` matrices form a real space of dimension ``d**2``. We
fix the trace-orthonormal basis

    E_ii,  (E_ij + E_ji)/sqrt(2),  i(E_ij - E_ji)/sqrt(2)   (i < j)

and store a real-linear map on Hermitian matrices as a ``d**2 x d**2``
real matrix in that basis, so composition is matrix multiplication and
the trace adjoint is the transpose.

Everything here is floating point. Equalities are decided with
``Tolerances.eps_eq`` on operator norms, positivity with
``Tolerances.eps_psd`` on eigenvalues and numerical rank with
``Tolerances.eps_rank``. Randomized checks take an explicit seed.
In finite dimensions every positive map is normal, so no continuity
conditions are checked.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np


class InvalidPVM(ValueError):
    pass


class InternalConsistencyError(RuntimeError):
    """Two independent decisions of the same property disagreed."""


class SupportCertificationError(RuntimeError):
    pass


class DecompositionError(RuntimeError):
    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        super().__init__(f"decomposition check failed: {clause} {detail}".strip())


class ExtensionError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    eps_eq: float = 1e-9
    eps_psd: float = 1e-9
    eps_rank: float = 1e-7

    def __post_init__(self):
        if min(self.eps_eq, self.eps_psd, self.eps_rank) <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerances()


# ---------------------------------------------------------------------------
# basis and coordinates


@lru_cache(maxsize=None)
def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian basis as an array of shape ``(d*d, d, d)``."""
    out = []
    for i in range(d):
        b = np.zeros((d, d), complex)
        b[i, i] = 1
        out.append(b)
    s = 1 / math.sqrt(2)
    for i in range(d):
        for j in range(i + 1, d):
            b = np.zeros((d, d), complex)
            b[i, j] = b[j, i] = s
            out.append(b)
    for i in range(d):
        for j in range(i + 1, d):
            b = np.zeros((d, d), complex)
            b[i, j] = 1j * s
            b[j, i] = -1j * s
            out.append(b)
    basis = np.array(out)
    basis.setflags(write=False)
    return basis


def to_vec(x: np.ndarray) -> np.ndarray:
    """Coordinates ``tr(B_k x)``; accepts a stack ``(..., d, d)``."""
    x = np.asarray(x)
    B = hermitian_basis(x.shape[-1])
    return np.einsum("kij,...ji->...k", B, x).real


def from_vec(v: np.ndarray, d: int) -> np.ndarray:
    return np.einsum("...k,kij->...ij", np.asarray(v, float), hermitian_basis(d))


def herm(x: np.ndarray) -> np.ndarray:
    return (x + x.conj().T) / 2


def opnorm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x, 2)) if x.size else 0.0


def min_eig(x: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(herm(x))[0])


def is_effect(a: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    if opnorm(a - a.conj().T) > tol.eps_eq:
        return False
    w = np.linalg.eigvalsh(herm(a))
    return bool(w[0] >= -tol.eps_psd and w[-1] <= 1 + tol.eps_psd)


def matrix_from_json(data: dict) -> np.ndarray:
    """``{"dim": d, "re": [[..]], "im": [[..]]}`` (``im`` optional)."""
    re = np.asarray(data["re"], float)
    im = np.asarray(data.get("im", np.zeros_like(re)), float)
    if re.shape != (data["dim"], data["dim"]) or im.shape != re.shape:
        raise ValueError("matrix shape does not match dim")
    return re + 1j * im


def matrix_to_json(x: np.ndarray) -> dict:
    x = np.asarray(x, complex)
    return {"dim": x.shape[0], "re": x.real.tolist(), "im": x.imag.tolist()}


# ---------------------------------------------------------------------------
# products


def jordan_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a o b = (ab + ba)/2``."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    return (a @ b + b @ a) / 2


def triple_product(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """``{abc} = (abc + cba)/2``; ``{aba}`` is ``aba``."""
    a, b, c = np.asarray(a), np.asarray(b), np.asarray(c)
    if not a.shape == b.shape == c.shape:
        raise ValueError("dimension mismatch")
    return (a @ b @ c + c @ b @ a) / 2


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True, eq=False)
class HermitianMap:
    """Real-linear map on ``d x d`` Hermitian matrices, as a ``d**2 x d**2`` matrix."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, float)
        if m.shape != (self.dim**2, self.dim**2):
            raise ValueError(f"matrix must be {self.dim**2}x{self.dim**2}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_function(cls, d: int, f: Callable[[np.ndarray], np.ndarray]) -> "HermitianMap":
        cols = [to_vec(f(b)) for b in hermitian_basis(d)]
        return cls(d, np.array(cols).T)

    @classmethod
    def identity(cls, d: int) -> "HermitianMap":
        return cls(d, np.eye(d * d))

    @classmethod
    def from_dict(cls, data: dict) -> "HermitianMap":
        return cls(int(data["dim"]), np.asarray(data["matrix"], float))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "matrix": self.matrix.tolist()}

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return from_vec(to_vec(x) @ self.matrix.T, self.dim)

    def apply_complex(self, x: np.ndarray) -> np.ndarray:
        """Complex-linear extension to all ``d x d`` matrices."""
        h1 = (x + x.conj().T) / 2
        h2 = (x - x.conj().T) / 2j
        return self(h1) + 1j * self(h2)

    def __matmul__(self, other: "HermitianMap") -> "HermitianMap":
        return HermitianMap(self.dim, self.matrix @ other.matrix)

    def adjoint(self) -> "HermitianMap":
        return HermitianMap(self.dim, self.matrix.T)

    def choi(self) -> np.ndarray:
        d = self.dim
        J = np.zeros((d * d, d * d), complex)
        for i in range(d):
            for j in range(d):
                e = np.zeros((d, d), complex)
                e[i, j] = 1
                J += np.kron(e, self.apply_complex(e))
        return J


def range_basis(m: HermitianMap, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns spanning the range, in basis coordinates."""
    u, s, _ = np.linalg.svd(m.matrix)
    r = int(np.sum(s > tol.eps_rank * max(1.0, s[0] if s.size else 1.0)))
    return u[:, :r]


def kernel_basis(m: HermitianMap, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    _, s, vt = np.linalg.svd(m.matrix)
    r = int(np.sum(s > tol.eps_rank * max(1.0, s[0] if s.size else 1.0)))
    return vt[r:].T


def _null_psd(g: np.ndarray, tol: Tolerances) -> np.ndarray:
    w, v = np.linalg.eigh((g + g.T) / 2)
    scale = max(1.0, abs(w).max() if w.size else 1.0)
    return v[:, w <= tol.eps_rank * scale]


def subspace_distance(q1: np.ndarray, q2: np.ndarray) -> float:
    """Operator-norm distance between orthogonal projectors onto two column spans."""
    return opnorm(q1 @ q1.T - q2 @ q2.T)


# ---------------------------------------------------------------------------
# projection-valued measures and Luders maps


def validate_pvm(projections: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOL) -> List[str]:
    """Problems found, empty when the projections are orthogonal and sum to I."""
    P = [np.asarray(p, complex) for p in projections]
    if not P:
        return ["empty PVM"]
    d = P[0].shape[0]
    for i, p in enumerate(P):
        if p.shape != (d, d):
            return [f"projection {i} has shape {p.shape}"]
    errs = []
    for i, p in enumerate(P):
        if opnorm(p - p.conj().T) > tol.eps_eq or opnorm(p @ p - p) > tol.eps_eq:
            errs.append(f"p{i} is not an orthogonal projection")
        for j in range(i + 1, len(P)):
            if opnorm(p @ P[j]) > tol.eps_eq:
                errs.append(f"p{i} p{j} != 0")
    if opnorm(sum(P) - np.eye(d)) > tol.eps_eq:
        errs.append("projections do not sum to I")
    return errs


def luders_operator(projections: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOL) -> HermitianMap:
    """``a -> sum_i p_i a p_i``, checked unital, idempotent and faithful."""
    errs = validate_pvm(projections, tol)
    if errs:
        raise InvalidPVM("; ".join(errs))
    P = [np.asarray(p, complex) for p in projections]
    d = P[0].shape[0]
    m = HermitianMap.from_function(d, lambda a: sum(p @ a @ p for p in P))
    if opnorm(m(np.eye(d)) - np.eye(d)) > tol.eps_eq:
        raise AssertionError("Luders map is not unital")
    if opnorm(m.matrix @ m.matrix - m.matrix) > tol.eps_eq:
        raise AssertionError("Luders map is not idempotent")
    if not is_faithful(m, tol):
        raise AssertionError("Luders map is not faithful")
    return m


def commutes_with_pvm(a: np.ndarray, projections: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOL) -> bool:
    return all(opnorm(p @ a - a @ p) <= tol.eps_eq for p in projections)


# ---------------------------------------------------------------------------
# state operator checks


@dataclass(frozen=True)
class MapReport:
    unital: bool
    positive: bool
    idempotent: bool
    faithful: bool
    positivity_certificate: str
    min_eigenvalue: float
    unital_error: float
    idempotence_error: float

    @property
    def is_state_operator(self) -> bool:
        return self.unital and self.positive and self.idempotent

    def to_dict(self) -> dict:
        return {
            "is_state_operator": self.is_state_operator,
            "unital": self.unital,
            "positive": self.positive,
            "idempotent": self.idempotent,
            "faithful": self.faithful,
            "positivity_certificate": self.positivity_certificate,
            "min_eigenvalue": self.min_eigenvalue,
            "unital_error": self.unital_error,
            "idempotence_error": self.idempotence_error,
        }


def unit_adjoint(m: HermitianMap) -> np.ndarray:
    """``m*(I)``: the matrix ``T`` with ``tr(m(x)) = tr(T x)``."""
    d = m.dim
    return from_vec(m.matrix.T @ to_vec(np.eye(d)), d)


def is_faithful(m: HermitianMap, tol: Tolerances = DEFAULT_TOL) -> bool:
    """For positive ``m``: ``m(a) = 0, a >= 0`` forces ``a = 0`` iff ``m*(I)`` is definite."""
    w = np.linalg.eigvalsh(herm(unit_adjoint(m)))
    return bool(w[0] > tol.eps_rank * max(1.0, w[-1]))


def sampled_min_eigenvalue(m: HermitianMap, n_samples: int, rng: np.random.Generator) -> float:
    """Smallest eigenvalue of ``m(vv*)`` over random unit vectors and the standard basis."""
    d = m.dim
    v = rng.normal(size=(n_samples, d)) + 1j * rng.normal(size=(n_samples, d))
    v = np.concatenate([v, np.eye(d)])
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    rank_one = np.einsum("ni,nj->nij", v, v.conj())
    images = from_vec(to_vec(rank_one) @ m.matrix.T, d)
    images = (images + np.conj(np.swapaxes(images, -1, -2))) / 2
    return float(np.linalg.eigvalsh(images)[:, 0].min())


def check_state_operator(
    m: HermitianMap,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
    n_samples: int = 10_000,
) -> MapReport:
    """Unital, positive and idempotent, each decided numerically.

    Positivity is certified outright when the Choi matrix is PSD; failing
    that, it is decided by sampling ``m(vv*)`` over ``n_samples`` random
    unit vectors plus the standard basis. The sampled check is sound for
    rejections only. Complete positivity is never assumed.
    """
    d = m.dim
    I = np.eye(d)
    unital_err = opnorm(m(I) - I)
    idem_err = opnorm(m.matrix @ m.matrix - m.matrix)
    lam = min_eig(m.choi())
    if lam >= -tol.eps_psd:
        cert = "choi"
        positive = True
    else:
        lam = sampled_min_eigenvalue(m, n_samples, np.random.default_rng(seed))
        cert = "sampled"
        positive = lam >= -tol.eps_psd
    return MapReport(
        unital=unital_err <= tol.eps_eq,
        positive=positive,
        idempotent=idem_err <= tol.eps_eq,
        faithful=positive and is_faithful(m, tol),
        positivity_certificate=cert,
        min_eigenvalue=lam,
        unital_error=unital_err,
        idempotence_error=idem_err,
    )


@dataclass(frozen=True)
class KSGaps:
    lhs_gap: float
    rhs_gap: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.lhs_gap >= -self.tol and self.rhs_gap >= -self.tol


def kadison_schwarz_check(m: HermitianMap, a: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> KSGaps:
    """Minimum eigenvalues of ``m(m(a)^2) - m(a)^2`` and ``m(a^2) - m(m(a)^2)``."""
    ta = m(a)
    mid = m(ta @ ta)
    return KSGaps(min_eig(mid - ta @ ta), min_eig(m(a @ a) - mid), tol.eps_psd)


# ---------------------------------------------------------------------------
# conditional expectations and Jordan state operators


@dataclass(frozen=True)
class Decision:
    value: bool
    witness: Optional[Tuple[np.ndarray, ...]] = None
    detail: dict = field(default_factory=dict)


def _effect_from(c: np.ndarray) -> np.ndarray:
    """Affine rescaling ``(c + |c| I) / (2|c|)`` of a Hermitian matrix into an effect."""
    nrm = opnorm(c)
    d = c.shape[0]
    if nrm == 0:
        return np.eye(d) / 2
    return (c + nrm * np.eye(d)) / (2 * nrm)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / abs(np.diag(r)))


def random_effect(d: int, rng: np.random.Generator) -> np.ndarray:
    u = random_unitary(d, rng)
    return herm(u @ np.diag(rng.uniform(0, 1, d)) @ u.conj().T)


def random_pvm(d: int, k: int, rng: np.random.Generator, unitary: Optional[np.ndarray] = None) -> List[np.ndarray]:
    """``k`` nonzero orthogonal projections summing to ``I``, in a random basis."""
    if not 1 <= k <= d:
        raise ValueError("need 1 <= k <= d")
    u = random_unitary(d, rng) if unitary is None else unitary
    cuts = np.sort(rng.choice(np.arange(1, d), size=k - 1, replace=False)) if k > 1 else np.array([], int)
    bounds = [0, *cuts.tolist(), d]
    out = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        v = u[:, lo:hi]
        out.append(herm(v @ v.conj().T))
    return out


def is_conditional_expectation(
    m: HermitianMap,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
    trials: int = 100,
) -> Decision:
    """Decide ``m(m(a) b m(a)) = m(a) m(b) m(a)`` for all effects ``a, b``.

    Primary route: the range is closed under the Jordan product, tested on
    every pair of an orthonormal range basis (exact by polarization; the
    range contains ``I`` and is spanned by effects). Secondary route:
    the defining identity on ``trials`` random effect pairs, plus the
    explicit witness built from a failing basis pair. Disagreement raises
    :class:`InternalConsistencyError`.
    """
    d = m.dim
    Q = range_basis(m, tol)
    mats = from_vec(Q.T, d)
    P = Q @ Q.T
    bad = None
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i, len(mats)):
            c = to_vec(jordan_product(mats[i], mats[j]))
            res = float(np.linalg.norm(c - P @ c))
            worst = max(worst, res)
            if res > tol.eps_eq and bad is None:
                bad = (i, j)

    def defect(a, b):
        ta = m(a)
        return opnorm(m(ta @ b @ ta) - ta @ m(b) @ ta)

    if bad is None:
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            a, b = random_effect(d, rng), random_effect(d, rng)
            err = defect(a, b)
            if err > tol.eps_eq * 100:
                raise InternalConsistencyError(f"range is Jordan-closed but identity fails by {err:.3g}")
        return Decision(True, None, {"range_dim": len(mats), "closure_residual": worst})

    i, j = bad
    for c in (mats[i], mats[j], mats[i] + mats[j]):
        c2 = to_vec(c @ c)
        if np.linalg.norm(c2 - P @ c2) > tol.eps_eq / 4:
            a = _effect_from(c)
            b = np.eye(d)
            if defect(a, b) > tol.eps_eq:
                return Decision(False, (a, b), {"range_dim": len(mats), "basis_pair": bad})
    raise InternalConsistencyError(f"range not closed at basis pair {bad} but no failing effect pair found")


def jordan_defect(m: HermitianMap, a: np.ndarray) -> float:
    ta = m(a)
    return opnorm(m(a @ a) - m(ta @ ta))


def _domain(d: int, on: Optional[np.ndarray]) -> np.ndarray:
    return np.eye(d * d) if on is None else np.asarray(on, float)


def is_jordan_state_operator(
    m: HermitianMap,
    on: Optional[np.ndarray] = None,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
    trials: int = 100,
) -> Decision:
    """Decide ``m(a^2) = m(m(a)^2)`` for every effect ``a`` of the domain.

    ``on`` optionally restricts the domain to a unital Jordan subalgebra
    invariant under ``m`` (orthonormal columns in basis coordinates); by
    default it is all Hermitian matrices. The polarized identity
    ``m(x o y) = m(m(x) o m(y))`` is tested on basis pairs, then on random
    effects. On success ``detail["ideal_is_kernel"]`` records whether
    ``{c : m(c^2) = 0}`` coincides with ``ker m`` on the domain.
    """
    d = m.dim
    D = _domain(d, on)
    mats = from_vec(D.T, d)
    bad = None
    for i in range(len(mats)):
        for j in range(i, len(mats)):
            x, y = mats[i], mats[j]
            err = opnorm(m(jordan_product(x, y)) - m(jordan_product(m(x), m(y))))
            if err > tol.eps_eq:
                bad = (i, j)
                break
        if bad:
            break
    rng = np.random.default_rng(seed)

    def random_domain_effect():
        if on is None:
            return random_effect(d, rng)
        return _effect_from(from_vec(D @ rng.normal(size=D.shape[1]), d))

    if bad is not None:
        i, j = bad
        for c in (mats[i], mats[j], mats[i] + mats[j]):
            if jordan_defect(m, c) > tol.eps_eq / 4:
                a = _effect_from(c)
                if jordan_defect(m, a) > tol.eps_eq / 16:
                    return Decision(False, (a,), {"basis_pair": bad})
        raise InternalConsistencyError(f"polarized identity fails at {bad} but no failing effect found")

    for _ in range(trials):
        a = random_domain_effect()
        err = jordan_defect(m, a)
        if err > tol.eps_eq * 100:
            raise InternalConsistencyError(f"basis test passed but random effect fails by {err:.3g}")

    # {c : m(c^2) = 0} is the null space of the PSD form G_kl = tr m(B_k o B_l)
    I = to_vec(np.eye(d))
    G = np.array([[I @ to_vec(m(jordan_product(x, y))) for y in mats] for x in mats])
    ideal = D @ _null_psd(G, tol)
    restricted = m.matrix @ D
    _, s, vt = np.linalg.svd(restricted)
    r = int(np.sum(s > tol.eps_rank * max(1.0, s[0] if s.size else 1.0)))
    kern = D @ vt[r:].T
    match = ideal.shape[1] == kern.shape[1] and (
        ideal.shape[1] == 0 or subspace_distance(ideal, kern) <= 1e-6
    )
    return Decision(True, None, {"ideal_is_kernel": bool(match), "ideal_dim": int(ideal.shape[1])})


@dataclass(frozen=True)
class ClauseReport:
    clauses: Tuple[bool, bool, bool]
    errors: Tuple[float, float, float]

    @property
    def agree(self) -> bool:
        return len(set(self.clauses)) == 1

    @property
    def violation(self) -> bool:
        return not self.agree


def equivalence_lemma_check(m: HermitianMap, a: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> ClauseReport:
    """For positive unital ``p``: ``p(a^2) = p(a)^2`` iff ``p(b o a) = p(b) o p(a)`` for all ``b``
    iff ``p(aba) = p(a)p(b)p(a)`` for all ``b``.

    The ``b`` clauses are linear in ``b`` and are tested on the basis.
    """
    pa = m(a)
    ea = opnorm(m(a @ a) - pa @ pa)
    B = hermitian_basis(m.dim)
    eb = max(opnorm(m(jordan_product(b, a)) - jordan_product(m(b), pa)) for b in B)
    ec = max(opnorm(m(a @ b @ a) - pa @ m(b) @ pa) for b in B)
    errs = (ea, eb, ec)
    return ClauseReport(tuple(e <= tol.eps_eq for e in errs), errs)


def second_lemma_check(m: HermitianMap, a: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> ClauseReport:
    """For positive unital idempotent ``p``: ``p(a^2) = p(p(a)^2)`` iff
    ``p(a o b) = p(p(a) o p(b))`` for all ``b`` iff ``p(aba) = p(p(a)p(b)p(a))`` for all ``b``.
    """
    pa = m(a)
    ea = opnorm(m(a @ a) - m(pa @ pa))
    B = hermitian_basis(m.dim)
    eb = max(opnorm(m(jordan_product(a, b)) - m(jordan_product(pa, m(b)))) for b in B)
    ec = max(opnorm(m(a @ b @ a) - m(pa @ m(b) @ pa)) for b in B)
    errs = (ea, eb, ec)
    return ClauseReport(tuple(e <= tol.eps_eq for e in errs), errs)


# ---------------------------------------------------------------------------
# support, compression, decomposition


@dataclass(frozen=True)
class Support:
    e: np.ndarray
    f: np.ndarray
    rank: int
    family_size: int


def support_projection(
    m: HermitianMap,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
    trials: int = 50,
) -> Support:
    """Complement ``e`` of the largest projection ``f`` with ``m(f) = 0``.

    For positive ``m``, ``m(vv*) = 0`` iff ``tr m(vv*) = <v, m*(I) v> = 0``,
    so ``f`` is the projection onto ``ker m*(I)``. The result is certified
    by ``m(f) = 0``, by checking every spectral projection ``g`` of a basis
    of ``ker m`` with ``m(g) = 0`` satisfies ``g <= f``, and by the
    consequences ``m(a) = m(eae)`` and ``e m(a) = m(a) e`` on random effects.
    """
    d = m.dim
    T = herm(unit_adjoint(m))
    w, v = np.linalg.eigh(T)
    null = w <= tol.eps_rank * max(1.0, w[-1])
    V = v[:, null]
    f = herm(V @ V.conj().T) if V.shape[1] else np.zeros((d, d), complex)
    e = np.eye(d) - f
    if opnorm(m(f)) > tol.eps_eq * 10:
        raise SupportCertificationError(f"m(f) = {opnorm(m(f)):.3g} is not zero")
    count = 0
    for k in from_vec(kernel_basis(m, tol).T, d):
        kw, kv = np.linalg.eigh(herm(k))
        for lam in np.unique(np.round(kw, 9)):
            vecs = kv[:, np.abs(kw - lam) < 1e-9]
            g = vecs @ vecs.conj().T
            count += 1
            if opnorm(m(g)) <= tol.eps_eq * 10 and opnorm(f @ g - g) > 1e-6:
                raise SupportCertificationError("a projection annihilated by m is not below f")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        a = random_effect(d, rng)
        ta = m(a)
        if opnorm(ta - m(e @ a @ e)) > tol.eps_eq * 100 or opnorm(e @ ta - ta @ e) > tol.eps_eq * 100:
            raise SupportCertificationError("support consequences fail on a random effect")
    return Support(e, f, d - int(V.shape[1]), count)


def _range_isometry(e: np.ndarray, tol: Tolerances) -> np.ndarray:
    d = e.shape[0]
    if opnorm(e - np.eye(d)) <= tol.eps_eq * 10:
        return np.eye(d, dtype=complex)
    w, v = np.linalg.eigh(herm(e))
    return v[:, w > 0.5]


def compress(m: HermitianMap, e: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> HermitianMap:
    """``a -> m(a) e`` on the corner ``eHe``, written in an orthonormal basis of ``eH``."""
    sup = support_projection(m, tol)
    if opnorm(sup.e - e) > 1e-6:
        raise ValueError("e is not the support projection of m")
    V = _range_isometry(sup.e, tol)
    r = V.shape[1]
    return HermitianMap.from_function(r, lambda y: V.conj().T @ m(V @ y @ V.conj().T) @ V)


@dataclass(frozen=True)
class Decomposition:
    e: np.ndarray
    mu: HermitianMap
    phi: HermitianMap
    range_mu: np.ndarray
    e_tau: np.ndarray
    composition_error: float
    range_distance: float


def fixed_jordan_space(m: HermitianMap, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Basis of ``{a : m(a^2) = m(m(a)^2)}``, the null space of a PSD quadratic form."""
    d = m.dim
    B = hermitian_basis(d)
    MB = from_vec(m.matrix.T, d)
    I = to_vec(np.eye(d))
    G = np.array(
        [[I @ (to_vec(m(jordan_product(x, y))) - to_vec(m(jordan_product(mx, my)))) for y, my in zip(B, MB)]
         for x, mx in zip(B, MB)]
    )
    return _null_psd(G, tol)


def decompose(m: HermitianMap, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> Decomposition:
    """Split a state operator as ``m = phi o mu``.

    ``mu(a) = e m(a) e + (1-e) a (1-e)`` with ``e`` the support of ``m``;
    ``mu`` must be a faithful conditional expectation whose range is
    ``{a : m(a^2) = m(m(a)^2)}``, and ``phi`` (``m`` restricted to that
    range) must be a Jordan state operator there.
    """
    d = m.dim
    rep = check_state_operator(m, tol, seed)
    if not rep.is_state_operator:
        raise DecompositionError("state-operator", str(rep.to_dict()))
    e = support_projection(m, tol, seed).e
    f = np.eye(d) - e
    mu = HermitianMap.from_function(d, lambda a: e @ m(a) @ e + f @ a @ f)
    mrep = check_state_operator(mu, tol, seed)
    if not mrep.is_state_operator:
        raise DecompositionError("mu-state-operator", str(mrep.to_dict()))
    if not mrep.faithful:
        raise DecompositionError("mu-faithful")
    if not is_conditional_expectation(mu, tol, seed).value:
        raise DecompositionError("mu-conditional-expectation")
    range_mu = range_basis(mu, tol)
    e_tau = fixed_jordan_space(m, tol)
    dist = subspace_distance(range_mu, e_tau) if range_mu.shape[1] == e_tau.shape[1] else float("inf")
    if dist > 1e-8:
        raise DecompositionError("range", f"distance {dist:.3g}")
    jd = is_jordan_state_operator(m, on=range_mu, tol=tol, seed=seed)
    if not jd.value:
        raise DecompositionError("phi-jordan")
    comp = opnorm(m.matrix @ mu.matrix - m.matrix)
    if comp > 1e-8:
        raise DecompositionError("composition", f"error {comp:.3g}")
    return Decomposition(e, mu, m, range_mu, e_tau, comp, dist)


# ---------------------------------------------------------------------------
# extension from effects


def _spectral_parts(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(herm(x))
    pos = (v * np.clip(w, 0, None)) @ v.conj().T
    neg = (v * np.clip(-w, 0, None)) @ v.conj().T
    return herm(pos), herm(neg)


def extend_to_linear(
    f: Callable[[np.ndarray], np.ndarray],
    dim: int,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
    trials: int = 20,
) -> HermitianMap:
    """Extend an additive idempotent map on effects to a linear map on Hermitians.

    Positive ``a`` goes to ``n f(a/n)`` with ``n >= ||a||``; a Hermitian
    ``x = x1 - x2`` goes to ``p(x1) - p(x2)``. Well-definedness is tested on
    two different splittings of random Hermitians, and homogeneity
    ``f(t a) = t f(a)`` for rational and irrational ``t``.
    """
    rng = np.random.default_rng(seed)
    d = dim
    I = np.eye(d)

    def close(x, y, scale=1.0):
        return opnorm(x - y) <= tol.eps_eq * 1e3 * max(1.0, scale)

    for _ in range(trials):
        a, b = random_effect(d, rng) / 2, random_effect(d, rng) / 2
        if not close(f(a + b), f(a) + f(b)):
            raise ExtensionError("f is not additive on orthogonal effects")
        if not close(f(f(a)), f(a)):
            raise ExtensionError("f is not idempotent")

    def p_pos(a):
        n = max(1, math.ceil(opnorm(a) - 1e-12))
        return n * f(a / n)

    def p_shift(x):
        c = max(0.0, -min_eig(x))
        return p_pos(x + c * I) - p_pos(c * I)

    def p_split(x):
        pos, neg = _spectral_parts(x)
        return p_pos(pos) - p_pos(neg)

    m = HermitianMap.from_function(d, p_shift)
    for _ in range(trials):
        x = herm(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) * 2
        s = opnorm(x)
        if not close(p_shift(x), p_split(x), s) or not close(m(x), p_split(x), s):
            raise ExtensionError("extension depends on the splitting")
        a = random_effect(d, rng)
        for t in (1 / 3, 2 / 7, math.sqrt(2) / 2, 1 / math.pi):
            if not close(f(t * a), t * f(a)):
                raise ExtensionError(f"f is not homogeneous at t={t:.4f}")
    return m


# ---------------------------------------------------------------------------
# example maps


def vector_state_map(d: int = 2, index: int = 0) -> HermitianMap:
    """``x -> <i|x|i> I``."""
    return HermitianMap.from_function(d, lambda x: x[index, index].real * np.eye(d))


def diagonal_embedding(T: np.ndarray, unitary: Optional[np.ndarray] = None) -> HermitianMap:
    """``x -> U diag(T diag(U* x U)) U*`` for a stochastic matrix ``T``."""
    T = np.asarray(T, float)
    d = T.shape[0]
    U = np.eye(d) if unitary is None else unitary

    def f(x):
        y = U.conj().T @ x @ U
        return U @ np.diag(T @ np.diag(y).real) @ U.conj().T

    return HermitianMap.from_function(d, f)


def diagonal_subalgebra(d: int, unitary: Optional[np.ndarray] = None) -> np.ndarray:
    """Coordinates of the commutative subalgebra diagonal in the columns of ``unitary``."""
    U = np.eye(d) if unitary is None else unitary
    cols = []
    for i in range(d):
        p = np.outer(U[:, i], U[:, i].conj())
        cols.append(to_vec(p))
    q, _ = np.linalg.qr(np.array(cols).T)
    return q


def luders_with_states(
    p_blocks: Sequence[np.ndarray],
    q_blocks: Sequence[np.ndarray],
    densities: Sequence[np.ndarray],
) -> HermitianMap:
    """``x -> sum_i p_i x p_i + sum_j tr(rho_j x) q_j``.

    Idempotent when each ``rho_j`` is invariant under the pinching
    ``sum_i p_i . p_i`` and annihilated by the ``q`` part, or when all
    ``rho_j`` equal one density supported under ``sum q_j``.
    """
    d = (p_blocks or q_blocks)[0].shape[0]
    return HermitianMap.from_function(
        d,
        lambda x: sum((p @ x @ p for p in p_blocks), np.zeros((d, d), complex))
        + sum((np.trace(r @ x).real * q for r, q in zip(densities, q_blocks)), np.zeros((d, d), complex)),
    )


def _random_density(v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density on the column span of ``v``."""
    k = v.shape[1]
    w = rng.uniform(0.1, 1.0, k)
    w /= w.sum()
    u = random_unitary(k, rng)
    return herm(v @ u @ np.diag(w) @ u.conj().T @ v.conj().T)


def _block_vectors(p: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(herm(p))
    return v[:, w > 0.5]


def random_block_map(d: int, rng: np.random.Generator) -> HermitianMap:
    """A random non-faithful state operator from one of three families.

    A: pinching on ``pH`` plus ``tr(rho_j x) q_j`` with ``rho_j`` on ``pH``
    commuting with the pinching blocks;
    B: pinching on ``pH`` plus ``tr(rho x) q`` with ``rho`` inside ``qH``;
    C: a stochastic idempotent acting on the diagonal of a random basis.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    U = random_unitary(d, rng)
    family = int(rng.integers(3))
    if family == 2:
        from .commutative_mv import random_stochastic_idempotent

        T = np.array(random_stochastic_idempotent(d, rng, allow_faithful=False), float)
        return diagonal_embedding(T, U)
    rp = int(rng.integers(1, d))  # rank of p, 1..d-1
    P, Qv = U[:, :rp], U[:, rp:]
    kp = int(rng.integers(1, rp + 1))
    p_blocks = [herm(P @ b @ P.conj().T) for b in random_pvm(rp, kp, rng)]
    if family == 0:
        kq = int(rng.integers(1, d - rp + 1))
        q_blocks = [herm(Qv @ b @ Qv.conj().T) for b in random_pvm(d - rp, kq, rng)]
        dens = []
        for _ in q_blocks:
            w = rng.dirichlet(np.ones(len(p_blocks)))
            dens.append(herm(sum(wi * _random_density(_block_vectors(pb), rng) for wi, pb in zip(w, p_blocks))))
        return luders_with_states(p_blocks, q_blocks, dens)
    q = herm(Qv @ Qv.conj().T)
    s = int(rng.integers(1, d - rp + 1))
    rho = _random_density(Qv[:, :s], rng)
    return luders_with_states(p_blocks, [q], [rho])


def random_mixed_unitary(d: int, rng: np.random.Generator, k: int = 2) -> HermitianMap:
    """``x -> sum_i w_i U_i* x U_i``: positive and unital, generally not idempotent."""
    w = rng.dirichlet(np.ones(k))
    Us = [random_unitary(d, rng) for _ in range(k)]
    return HermitianMap.from_function(d, lambda x: sum(wi * u.conj().T @ x @ u for wi, u in zip(w, Us)))


def random_in_span(basis: np.ndarray, d: int, rng: np.random.Generator) -> np.ndarray:
    """Random effect inside the span of ``basis`` (coordinates), assuming it contains ``I``."""
    return _effect_from(from_vec(basis @ rng.normal(size=basis.shape[1]), d))
