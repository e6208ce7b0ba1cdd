"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--sizes 10,30,60,120]

Prints one row per problem size with the best-of-``repeat`` time of each
backend and the speedup.  The two backends are also checked for identical
output on every size.
"""
import argparse
import sys
import timeit

import numpy as np

from covert_route import _fallback
from covert_route.routing import link_cost
from covert_route.scenario import generate_random

try:
    from covert_route import _kernels
except ImportError:
    sys.exit("compiled extension not built; run `pip install -e . --no-build-isolation`")


def best(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="10,30,60,120", help="relay counts; wardens match")
    args = ap.parse_args(argv)

    print(f"{'kernel':<10}{'nodes':>7}{'compiled':>14}{'python':>14}{'speedup':>10}")
    for relays in (int(v) for v in args.sizes.split(",")):
        s = generate_random(0, relays, relays)
        arrays = s.arrays() + (s.alpha,)
        om_c = _kernels.exposure_matrix(*arrays)
        om_p = _fallback.exposure_matrix(*arrays)
        assert np.array_equal(om_c, om_p)
        cost = link_cost(om_c, "mt-sk")
        assert _kernels.dense_dijkstra(cost, 0, 1) == _fallback.dense_dijkstra(cost, 0, 1)

        for name, fc, fp in (
            ("exposure", lambda: _kernels.exposure_matrix(*arrays),
             lambda: _fallback.exposure_matrix(*arrays)),
            ("dijkstra", lambda: _kernels.dense_dijkstra(cost, 0, 1),
             lambda: _fallback.dense_dijkstra(cost, 0, 1)),
        ):
            tc, tp = best(fc, args.repeat), best(fp, args.repeat)
            print(f"{name:<10}{s.n_nodes:>7}{tc * 1e3:>12.3f}ms{tp * 1e3:>12.3f}ms{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
