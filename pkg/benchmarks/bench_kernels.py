"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row reports the best of N runs per backend and the speedup.
"""

import argparse
import time

import numpy as np

from polylat import _kernels, gf2poly


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    for m in (8, 10, 12):
        p = gf2poly.find_irreducible(m)
        table = np.array(gf2poly.vm_table(p, m, 2 * m - 1), dtype=np.uint64)
        w = rng.random(1 << m)
        cands = np.arange(1, 1 << m, dtype=np.uint64)
        yield f"class_sums m={m} (all candidates)", lambda k, w=w, t=table, m=m, c=cands: k.class_sums(w, t, m, c)
    for m, s in ((10, 20), (14, 10)):
        numer = rng.integers(0, 1 << m, size=(1 << m, s)).astype(np.uint64)
        yield f"owen_scramble N=2^{m} s={s}", lambda k, a=numer, m=m: k.owen_scramble(a, m, 53, 1)
    for n, s in ((512, 5), (2048, 5)):
        x = rng.random((n, s))
        g = np.full(s, 0.9)
        yield f"warnock_rows N={n} s={s}", lambda k, x=x, g=g: k.warnock_rows(x, g)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    names = sorted(_kernels.BACKENDS)
    print(f"{'kernel':40s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in cases():
        times = {n: best_of(lambda: fn(_kernels.BACKENDS[n]), args.repeat) for n in names}
        line = f"{label:40s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in names)
        if len(names) == 2:
            line += f"{times['python'] / times['cython']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
