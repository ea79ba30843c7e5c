"""Compiled vs pure-Python kernel timings.

Two levels are timed:

* ``mul_terms`` on random sparse term maps (the raw kernel), in-process;
* an operator commutator and a sub-structure check, each in a fresh
  interpreter with and without ``KEPLER_QALG_PURE=1``.

Run ``python3 benchmarks/bench_kernel.py [--repeat N]``.
"""

import argparse
import json
import os
import random
import subprocess
import sys
import timeit

STACK_SNIPPET = r"""
import json, time
from kepler_qalg import kernel
from kepler_qalg.qalg import integrals, verify_substructure1
from kepler_qalg.weyl import commutator
t0 = time.perf_counter()
I = integrals({n})
C = I.C1()
t1 = time.perf_counter()
commutator(I.X, C)
t2 = time.perf_counter()
verify_substructure1({n})
t3 = time.perf_counter()
print(json.dumps({{"backend": kernel.BACKEND, "build": t1 - t0, "commutator": t2 - t1, "sub1": t3 - t2}}))
"""


def random_terms(rng, size, nvars=6, bits=10, maxexp=6):
    out = {}
    while len(out) < size:
        key = sum(rng.randrange(maxexp) << (bits * j) for j in range(nvars))
        out[key] = rng.randrange(-50, 51) or 1
    return out


def bench_raw(repeat):
    from kepler_qalg import _pykernel

    try:
        from kepler_qalg import _ckernel
    except ImportError:
        _ckernel = None
    rng = random.Random(12345)
    rows = []
    for size in (10, 100, 400):
        a, b = random_terms(rng, size), random_terms(rng, size)
        py = min(timeit.repeat(lambda: _pykernel.mul_terms(a, b), number=5, repeat=repeat)) / 5
        row = {"size": size, "python_s": py}
        if _ckernel is not None:
            assert _ckernel.mul_terms(a, b) == _pykernel.mul_terms(a, b)
            c = min(timeit.repeat(lambda: _ckernel.mul_terms(a, b), number=5, repeat=repeat)) / 5
            row["compiled_s"] = c
            row["speedup"] = py / c
        rows.append(row)
    return rows


def bench_stack(n, pure):
    env = dict(os.environ)
    if pure:
        env["KEPLER_QALG_PURE"] = "1"
    else:
        env.pop("KEPLER_QALG_PURE", None)
    out = subprocess.run(
        [sys.executable, "-c", STACK_SNIPPET.format(n=n)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, nargs="+", default=[3, 4])
    args = ap.parse_args(argv)

    print("raw mul_terms (seconds per call)")
    for row in bench_raw(args.repeat):
        line = f"  size {row['size']:>4}: python {row['python_s']:.2e}"
        if "compiled_s" in row:
            line += f"  compiled {row['compiled_s']:.2e}  speedup {row['speedup']:.1f}x"
        else:
            line += "  (extension not built)"
        print(line)

    print("operator level (seconds, fresh interpreter)")
    for n in args.n:
        for pure in (True, False):
            r = bench_stack(n, pure)
            print(f"  n={n} {r['backend']:<9} build {r['build']:.3f}  [X,C1] {r['commutator']:.3f}  sub1 {r['sub1']:.3f}")


if __name__ == "__main__":
    main()
