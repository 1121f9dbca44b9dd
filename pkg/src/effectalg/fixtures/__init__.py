"""Bundled example algebras, maps and probability spaces.

Each builder has a JSON twin in this directory (``diamond.json`` etc.);
``load(name)`` reads the JSON, ``BUILDERS[name]()`` rebuilds it in code.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from ..effect_core import FiniteEffectAlgebra
from ..mv_core import lukasiewicz_chain, mv_to_effect_algebra, power, product

_ = None  # undefined sum


def chain2() -> FiniteEffectAlgebra:
    return FiniteEffectAlgebra(2, 0, 1, [[0, 1], [1, _]], ("0", "1"))


def chain3() -> FiniteEffectAlgebra:
    return FiniteEffectAlgebra(3, 0, 2, [[0, 1, 2], [1, 2, _], [2, _, _]], ("0", "u", "1"))


def diamond() -> FiniteEffectAlgebra:
    return FiniteEffectAlgebra(
        4, 0, 3,
        [[0, 1, 2, 3], [1, _, 3, _], [2, 3, _, _], [3, _, _, _]],
        ("0", "a", "b", "1"),
    )


def mo2() -> FiniteEffectAlgebra:
    # 0, a, a', b, b', 1
    t = [[_] * 6 for _i in range(6)]
    for x in range(6):
        t[0][x] = t[x][0] = x
    t[1][2] = t[2][1] = 5
    t[3][4] = t[4][3] = 5
    return FiniteEffectAlgebra(6, 0, 5, t, ("0", "a", "a'", "b", "b'", "1"))


def luk3_mv():
    return lukasiewicz_chain(2)


def luk3() -> FiniteEffectAlgebra:
    return mv_to_effect_algebra(luk3_mv())


def luk3x3_mv():
    return product(lukasiewicz_chain(2), lukasiewicz_chain(2))


def luk3x3() -> FiniteEffectAlgebra:
    return mv_to_effect_algebra(luk3x3_mv())


def boolean8() -> FiniteEffectAlgebra:
    return mv_to_effect_algebra(power(lukasiewicz_chain(1), 3))


EFFECT_ALGEBRAS = {
    "chain2": chain2,
    "chain3": chain3,
    "diamond": diamond,
    "mo2": mo2,
    "luk3": luk3,
    "luk3x3": luk3x3,
    "boolean8": boolean8,
}
MV_ALGEBRAS = {"luk3": luk3_mv, "luk3x3": luk3x3_mv}

half = Fraction(1, 2)
STOCHASTIC = {
    "identity3": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    "collapse2": [[1, 0], [1, 0]],
    "nonstrong3": [[1, 0, 0], [0, 1, 0], [half, half, 0]],
    "average4": [[half, half, 0, 0], [half, half, 0, 0], [0, 0, half, half], [0, 0, half, half]],
}


PROB_CASES = {
    "uniform4": {"P": [Fraction(1, 4)] * 4, "blocks": [[0, 1], [2, 3]]},
    "halfnull4": {"P": [half, half, 0, 0], "blocks": [[0, 1], [2, 3]]},
    "mixednull5": {"P": [Fraction(1, 3), 0, Fraction(1, 6), half, 0], "blocks": [[0, 1], [2, 4], [3]]},
    "singletons3": {"P": [Fraction(1, 3)] * 3, "blocks": [[0], [1], [2]]},
}

# (stochastic idempotent, weights) pairs for expectations built from strong operators
STRONG_CE_CASES = {
    "collapse2": {"T": "collapse2", "s": [Fraction(1, 4), Fraction(3, 4)]},
    "average4_uniform": {"T": "average4", "s": [Fraction(1, 4)] * 4},
    "average4_null": {"T": "average4", "s": [0, 0, half, half]},
    "identity3_null": {"T": "identity3", "s": [half, 0, half]},
}


def pvm(name: str):
    """Bundled projection-valued measures as lists of complex arrays."""
    import numpy as np

    if name == "pinching2":
        return [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
    if name == "block3":
        return [np.diag([1.0, 1.0, 0.0]).astype(complex), np.diag([0.0, 0.0, 1.0]).astype(complex)]
    if name == "hadamard2":
        v = np.array([1.0, 1.0]) / np.sqrt(2)
        p = np.outer(v, v).astype(complex)
        return [p, np.eye(2) - p]
    raise KeyError(name)


def hermitian_map(name: str):
    """Bundled maps on Hermitian matrices."""
    import numpy as np

    from .. import jc_matrix as jc

    if name == "vector_state2":
        return jc.vector_state_map(2)
    if name == "diagonal_average3":
        # x -> diag(x00, (x00 + x22)/2, x22): a state operator that is not a conditional expectation
        return jc.diagonal_embedding(np.array([[1, 0, 0], [0.5, 0, 0.5], [0, 0, 1]]))
    if name == "block3":
        # pinching on span(e0) plus tr(rho x) on span(e1, e2) with rho = |e1><e1|
        e = np.eye(3)
        p = [np.outer(e[0], e[0]).astype(complex)]
        q = np.diag([0.0, 1.0, 1.0]).astype(complex)
        rho = np.outer(e[1], e[1]).astype(complex)
        return jc.luders_with_states(p, [q], [rho])
    raise KeyError(name)


PVMS = ("pinching2", "block3", "hadamard2")
MAPS = ("vector_state2", "diagonal_average3", "block3")
TAUS = {"diamond_collapse": ("diamond", [0, 0, 3, 3]), "diamond_swap": ("diamond", [0, 2, 1, 3])}
EFFECTS = {"offdiag2": [[0.5, 0.3], [0.3, 0.5]]}


def _frac(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else {"num": x.numerator, "den": x.denominator}


def documents() -> dict:
    """Every bundled JSON file, keyed by file name, as built from code."""
    import numpy as np

    from .. import jc_matrix as jc

    docs = {f"{k}.json": b().to_dict() for k, b in EFFECT_ALGEBRAS.items()}
    docs.update({f"{k}.mv.json": b().to_dict() for k, b in MV_ALGEBRAS.items()})
    docs.update({f"{k}.tau.json": {"algebra": a, "tau": t} for k, (a, t) in TAUS.items()})
    docs.update({f"{k}.pvm.json": {"projections": [jc.matrix_to_json(p) for p in pvm(k)]} for k in PVMS})
    docs.update({f"{k}.map.json": hermitian_map(k).to_dict() for k in MAPS})
    docs.update({f"{k}.effect.json": jc.matrix_to_json(np.array(v, complex)) for k, v in EFFECTS.items()})
    docs.update({f"{k}.T.json": {"T": [[_frac(x) for x in r] for r in T]} for k, T in STOCHASTIC.items()})
    docs.update(
        {f"{k}.prob.json": {"P": [_frac(x) for x in c["P"]], "blocks": c["blocks"]} for k, c in PROB_CASES.items()}
    )
    docs.update(
        {f"{k}.weights.json": {"matrix": f"{c['T']}.T.json", "P": [_frac(x) for x in c["s"]]} for k, c in STRONG_CE_CASES.items()}
    )
    return docs


def format_document(doc: dict) -> str:
    """One top-level key per line, one matrix row per line."""
    lines = []
    for key, value in doc.items():
        if isinstance(value, list) and value and all(isinstance(r, list) for r in value):
            rows = ",\n    ".join(json.dumps(r) for r in value)
            lines.append(f'  {json.dumps(key)}: [\n    {rows}\n  ]')
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(value)}")
    return "{\n" + ",\n".join(lines) + "\n}\n"


def write_all(directory: str) -> None:
    """Regenerate the bundled JSON files from the builders."""
    import os

    for name, doc in documents().items():
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            fh.write(format_document(doc))


def load(name: str) -> dict:
    """Raw JSON content of a bundled fixture file, e.g. ``load("diamond.json")``."""
    with resources.files(__package__).joinpath(name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


def path(name: str) -> str:
    return str(resources.files(__package__).joinpath(name))
