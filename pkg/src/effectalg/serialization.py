"""JSON readers and a deterministic JSON writer for every input kind the CLI accepts."""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any, List, Optional, Tuple

import numpy as np

from .effect_core import FiniteEffectAlgebra, StructuralError
from .jc_matrix import HermitianMap, matrix_from_json, matrix_to_json
from .mv_core import MvAlgebra, mv_to_effect_algebra


class InputError(ValueError):
    """Unreadable or malformed input file (exit code 2)."""


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def parse_algebra(data: Any) -> Tuple[FiniteEffectAlgebra, Optional[MvAlgebra]]:
    """Effect-algebra tables carry ``sum``; MV-algebra tables carry ``boxplus`` and ``neg``."""
    if not isinstance(data, dict):
        raise InputError("algebra file must hold a JSON object")
    try:
        if "boxplus" in data:
            M = MvAlgebra.from_dict(data)
            return mv_to_effect_algebra(M), M
        return FiniteEffectAlgebra.from_dict(data), None
    except (StructuralError, ValueError) as exc:
        raise InputError(f"malformed algebra: {exc}") from exc


def parse_tau(data: Any) -> List[int]:
    tau = data.get("tau") if isinstance(data, dict) else data
    if not isinstance(tau, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in tau):
        raise InputError("tau must be a list of element indices")
    return tau


def parse_hermitian(data: Any) -> np.ndarray:
    try:
        x = matrix_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix: {exc}") from exc
    if not np.allclose(x, x.conj().T, atol=1e-12):
        raise InputError("matrix is not Hermitian")
    return x


def parse_pvm(data: Any) -> List[np.ndarray]:
    projs = data.get("projections") if isinstance(data, dict) else data
    if not isinstance(projs, list) or not projs:
        raise InputError("PVM must be a non-empty list of matrices")
    return [parse_hermitian(p) for p in projs]


def parse_map(data: Any) -> HermitianMap:
    try:
        return HermitianMap.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed map: {exc}") from exc


def parse_stochastic(data: Any) -> List[List[Fraction]]:
    from ._exact import as_matrix

    rows = data.get("T") if isinstance(data, dict) else data
    try:
        m = as_matrix(rows)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed stochastic matrix: {exc}") from exc
    if not m or any(len(r) != len(m) for r in m):
        raise InputError("stochastic matrix must be square")
    return m


def parse_prob(data: Any):
    from ._exact import to_fraction

    P = data.get("P") if isinstance(data, dict) else data
    try:
        return tuple(to_fraction(x) for x in P)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed probability vector: {exc}") from exc


def parse_blocks(data: Any) -> Tuple[Tuple[int, ...], ...]:
    blocks = data.get("blocks") if isinstance(data, dict) else data
    if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
        raise InputError("blocks must be a list of lists of indices")
    return tuple(tuple(int(x) for x in b) for b in blocks)


def jsonable(obj: Any, digits: int = 12) -> Any:
    """Fractions become ``"p/q"`` strings, arrays become lists, floats are rounded."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return str(v)
        v = float(f"{v:.{digits}g}")
        return 0.0 if v == 0 else v
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj) and obj.ndim == 2 and obj.shape[0] == obj.shape[1]:
            return jsonable(matrix_to_json(obj), digits)
        return jsonable(obj.real.tolist() if np.iscomplexobj(obj) else obj.tolist(), digits)
    if isinstance(obj, dict):
        return {str(k): jsonable(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v, digits) for v in items]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict(), digits)
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
