"""Compare the compiled and numpy kernels on ray exits, orbits and a profile.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import time

import numpy as np

from eqlab import kernels
from eqlab.bodies2d import make_ellipse, make_parabola_body, make_yanagihara
from eqlab.property_lab import profile


def timeit(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases():
    ell, circ = make_ellipse(2.0, 1.0)
    par, unit = make_parabola_body()
    yan = make_yanagihara()
    rng = np.random.default_rng(0)
    n = 4096
    ang = rng.uniform(0, 2 * np.pi, n)
    ux, uy = np.cos(ang), np.sin(ang)
    o = 0.1 * rng.uniform(-1, 1, (n, 2))
    for name, K in (("ellipse", ell), ("parabola_body", par), ("yanagihara", yan)):
        yield f"ray_exit x{n} {name}", lambda K=K: kernels.ray_exit(K, o[:, 0], o[:, 1], ux, uy)
    yield "orbit x500 ellipse", lambda: kernels.orbit(ell, circ.center, circ.radius, 0.3, 500)
    yield "orbit x500 parabola_body", lambda: kernels.orbit(par, unit.center, unit.radius, 0.3, 500)
    yield "profile 720 ellipse", lambda: profile(ell, circ)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"{'case':32s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in cases():
        times = []
        for b in backends:
            with kernels.using(b):
                fn()  # warm caches
                times.append(timeit(fn, args.repeat))
        row = f"{name:32s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"  {times[1] / times[0]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
