"""Compare batch mask-evaluation backends on line-ball workloads.

Times CompiledEval.count for each available implementation over a grid of
sentences and sample counts, printing rows/second and the speedup of numba
over numpy where both are present. Set ZOL_NO_NUMBA=1 to confirm the numpy
fallback path alone.

Usage: python benchmarks/bench_eval.py [--radius 4] [--samples 200000]
"""

import argparse
import time

from zol import available_impls, ball_of, compile_eval, make_generator, parse, sample_masks

SENTENCES = [
    "exists x. exists y. S(x,y)",
    "forall x. exists y. S(x,y) | S(y,x)",
    "exists x. forall y. ~S(y,x)",
    "forall x. forall y. S(x,y) -> ~S(y,x)",
]


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=int, default=4, help="ball radius on the line")
    ap.add_argument("--samples", type=int, default=200_000, help="masks per run")
    ap.add_argument("--repeats", type=int, default=3, help="keep the best of this many runs")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    host = ball_of(make_generator("z"), "0", args.radius).structure
    masks = sample_masks(args.seed, args.samples, host.size, 0.5)
    impls = available_impls()
    print(f"host: radius-{args.radius} line ball, {host.size} elements; "
          f"{args.samples} masks; impls: {', '.join(impls)}")
    print(f"{'sentence':44s} {'impl':6s} {'time':>9s} {'rows/s':>12s}")

    for text in SENTENCES:
        ce = compile_eval(host, parse(text))
        timings = {}
        for impl in impls:
            ce.count(masks[:256], impl=impl)  # warm-up, pays any JIT cost
            counts = set()
            timings[impl] = best_of(lambda: counts.add(ce.count(masks, impl=impl)),
                                    args.repeats)
            if len(counts) != 1:
                raise SystemExit(f"impl {impl} is not deterministic on {text!r}")
            print(f"{text:44s} {impl:6s} {timings[impl]*1e3:8.1f}ms "
                  f"{args.samples/timings[impl]:12.0f}")
        if {"numpy", "numba"} <= timings.keys():
            print(f"{'':44s} numba speedup x{timings['numpy']/timings['numba']:.1f}")


if __name__ == "__main__":
    main()
