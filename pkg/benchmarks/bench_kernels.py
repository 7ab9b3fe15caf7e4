"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--samples 400000]

Both backends run the same public calls (joint_signature with the cache
cleared, simulate_failure_times), so shared Python overhead is included.
Numba compilation happens in an untimed warm-up call.
"""

import argparse
import time

from jointsig import Event, Exponential, Order, _accel, build_model, joint_signature, simulate_failure_times
from jointsig.structure import And, Atom, KofN, Or


def bench_model():
    shared = [f"S{i}" for i in range(8)]
    own1 = [f"A{i}" for i in range(4)]
    own2 = [f"B{i}" for i in range(4)]
    s1 = Or([KofN(3, [Atom(c) for c in shared[:5] + own1[:2]]), And([Atom(c) for c in own1[2:] + shared[5:]])])
    s2 = KofN(4, [Atom(c) for c in shared + own2])
    return build_model([("S1", s1), ("S2", s2)], dict.fromkeys(shared + own1 + own2, "T"))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def run_backend(use_numba, model, repeat, samples):
    _accel.USE_NUMBA = use_numba
    dists = {"T": Exponential(1.0)}

    def signature():
        joint_signature.cache_clear()
        for order in Order.all(2):
            joint_signature(model, order, Event.BOTH_FUNCTION)

    def simulate():
        simulate_failure_times(model, dists, 1, samples)

    signature()
    simulate_failure_times(model, dists, 1, 100)
    return best_of(signature, repeat), best_of(simulate, repeat)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--samples", type=int, default=400_000)
    args = p.parse_args()
    model = bench_model()
    if not _accel.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed")
    rows = {
        "numpy": run_backend(False, model, args.repeat, args.samples),
        "numba": run_backend(True, model, args.repeat, args.samples),
    }
    print(f"{'backend':<8} {'signature (3 orders)':>22} {'simulate':>12}")
    for name, (sig, sim) in rows.items():
        print(f"{name:<8} {sig:>20.4f} s {sim:>10.4f} s")
    (a, b), (c, d) = rows["numpy"], rows["numba"]
    print(f"speedup  {a / c:>20.1f} x {b / d:>10.1f} x")


if __name__ == "__main__":
    main()
