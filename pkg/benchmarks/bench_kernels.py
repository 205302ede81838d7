"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import timeit

import numpy as np

from ctrlprop import kernels
from ctrlprop.random_diagrams import random_diagram
from ctrlprop.semantics import interpret


def _rand(rng, shape):
    return np.ascontiguousarray(rng.normal(size=shape) + 1j * rng.normal(size=shape))


def cases():
    rng = np.random.default_rng(0)
    m64, g2, g4 = _rand(rng, (64, 64)), _rand(rng, (2, 2)), _rand(rng, (4, 4))
    a8, b8 = _rand(rng, (8, 8)), _rand(rng, (8, 8))
    u16 = _rand(rng, (16, 16))
    m256 = _rand(rng, (256, 256))
    terms = [random_diagram(random.Random(s), wires=4, depth=8) for s in range(20)]
    return {
        "apply_local 64x64, 1q gate": lambda: kernels.apply_local(m64, g2, 4, 8),
        "apply_local 64x64, 2q gate": lambda: kernels.apply_local(m64, g4, 2, 8),
        "kron 8x8 (x) 8x8": lambda: kernels.kron(a8, b8),
        "controlled 16x16": lambda: kernels.controlled(u16),
        "max_abs_diff 256x256": lambda: kernels.max_abs_diff(m256, m256),
        "interpret 20 random 4-wire terms": lambda: [interpret(t) for t in terms],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=200)
    args = ap.parse_args()
    try:
        kernels.use_backend("cython")
    except ImportError:
        print("compiled kernels not built; only the python backend is available")
        backends = ["python"]
    else:
        backends = ["cython", "python"]
    results = {}
    for name in backends:
        kernels.use_backend(name)
        for label, fn in cases().items():
            number = max(1, args.number // 20) if label.startswith("interpret") else args.number
            best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            results[(label, name)] = best
    print(f"{'kernel':<36}" + "".join(f"{b:>14}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for label in cases():
        row = f"{label:<36}" + "".join(f"{results[(label, b)] * 1e6:>12.1f}us" for b in backends)
        if len(backends) > 1:
            row += f"   {results[(label, 'python')] / results[(label, 'cython')]:7.2f}x"
        print(row)


if __name__ == "__main__":
    main()
