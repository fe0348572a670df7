"""Time the compiled and numpy kernels on refined-cube circle graphs.

    python3 benchmarks/bench_kernels.py [--sizes 2 4 8 16] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from koebe_minimal import _pykernels
from koebe_minimal.pattern_sphere import _circle_graph, default_targets
from koebe_minimal.quadgraph import make_refined_cube

try:
    from koebe_minimal import _ckernels
except ImportError:
    _ckernels = None


def problem(size):
    g = make_refined_cube(size, size, size)
    cg = _circle_graph(g)
    phi = cg.to_array(default_targets(g))
    rho = np.random.default_rng(0).normal(-1.0, 0.3, len(cg))
    return rho, cg.ei, cg.ej, phi


def bench(mod, rho, ei, ej, phi, repeat):
    calls = {
        "dilog_f_array": lambda: mod.dilog_f_array(rho),
        "functional": lambda: mod.functional(rho, ei, ej, phi),
        "gradient": lambda: mod.gradient(rho, ei, ej, phi),
        "ones_derivative": lambda: mod.ones_derivative(rho, ei, ej, phi, 0.1),
        "hessian": lambda: mod.hessian(rho, ei, ej),
    }
    out = {}
    for name, fn in calls.items():
        n, _ = timeit.Timer(fn).autorange()
        out[name] = min(timeit.repeat(fn, number=n, repeat=repeat)) / n
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8, 16])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; timing the numpy backend only")
    print(f"{'size':>4} {'circles':>7} {'kernel':<16} {'python [us]':>12} {'cython [us]':>12} {'speedup':>8}")
    for size in args.sizes:
        rho, ei, ej, phi = problem(size)
        py = bench(_pykernels, rho, ei, ej, phi, args.repeat)
        cy = bench(_ckernels, rho, ei, ej, phi, args.repeat) if _ckernels else {}
        for name, t in py.items():
            c = cy.get(name)
            cs = f"{c * 1e6:12.1f}" if c else f"{'-':>12}"
            sp = f"{t / c:8.1f}" if c else f"{'-':>8}"
            print(f"{size:4d} {len(rho):7d} {name:<16} {t * 1e6:12.1f} {cs} {sp}")


if __name__ == "__main__":
    main()
