"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json]

Validation is timed on products of Lukasiewicz chains (n up to 121),
enumeration on the bundled algebras and a 16-element Boolean algebra.
Both backends are checked to return identical results before timing.
"""
import argparse
import json
import timeit

from effectalg._kernels import _pykernels
from effectalg.fixtures import EFFECT_ALGEBRAS
from effectalg.mv_core import lukasiewicz_chain, mv_to_effect_algebra, power, product

try:
    from effectalg._kernels import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None


def cases():
    for k in (4, 6, 10):
        E = mv_to_effect_algebra(product(lukasiewicz_chain(k), lukasiewicz_chain(k)))
        yield f"validate L{k + 1}xL{k + 1}", "ea_violations", (E.int_table, E.zero, E.one)
    for name in ("boolean8", "luk3x3", "mo2"):
        E = EFFECT_ALGEBRAS[name]()
        yield f"enumerate {name}", "enumerate_state_operators", (E.int_table, list(E.order.perp), E.zero, E.one)
    E = mv_to_effect_algebra(power(lukasiewicz_chain(1), 4))
    yield "enumerate boolean16", "enumerate_state_operators", (E.int_table, list(E.order.perp), E.zero, E.one)


def best(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.2 and number < 10_000:
        number *= 4
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    if _ckernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    rows = []
    for label, fname, fargs in cases():
        py, cy = getattr(_pykernels, fname), getattr(_ckernels, fname)
        if py(*fargs) != cy(*fargs):
            raise SystemExit(f"backends disagree on {label}")
        tp, tc = best(py, fargs, args.repeat), best(cy, fargs, args.repeat)
        rows.append({"case": label, "python_s": tp, "cython_s": tc, "speedup": tp / tc})
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'case':<24}{'python':>12}{'cython':>12}{'speedup':>10}")
    for r in rows:
        print(f"{r['case']:<24}{r['python_s'] * 1e3:>10.3f}ms{r['cython_s'] * 1e3:>10.3f}ms{r['speedup']:>9.1f}x")


if __name__ == "__main__":
    main()
