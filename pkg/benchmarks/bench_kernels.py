"""Time the compiled kernels against the numpy fallback on the same inputs.

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""
import argparse
import time

import numpy as np

from pbgspec import _backend
from pbgspec.oracle import _volterra_weights, build_comb
from pbgspec.reservoir import DomModel


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=3000, help="time steps per run")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    model = DomModel.lorentzian_defect(0.0, 1.0, -2.5, 1.0)
    h = 0.02
    w, end = _volterra_weights(model, 1.0, h, args.steps)
    comb = build_comb(model, 1.0, spacing=0.02)
    e2 = complex(comb.level_shift) - 0.5j
    modes0 = np.zeros(len(comb), dtype=complex)
    cases = {
        "volterra_march": lambda k: k.volterra_march(w, end, h, 1.0, 1.0, -1.5, 1 + 0j, 0j, args.steps),
        f"comb_rk4 ({len(comb)} modes)": lambda k: k.comb_rk4(comb.frequencies, comb.couplings, e2, 1.0, -1.5,
                                                             1 + 0j, 0j, modes0, h, args.steps),
    }
    backends = {"python": _backend.python_kernels}
    if _backend.compiled_kernels is not None:
        backends["cython"] = _backend.compiled_kernels
    else:
        print("compiled extension not built; timing the fallback only")

    print(f"{'kernel':28s} {'backend':8s} {'seconds':>9s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, run in cases.items():
        results = {label: _best(lambda: run(kern), args.repeat) for label, kern in backends.items()}
        base_time, base = results["python"]
        for label, (t, out) in results.items():
            diff = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) for a, b in zip(out, base))
            print(f"{name:28s} {label:8s} {t:9.3f} {base_time / t:8.1f} {diff:11.1e}")


if __name__ == "__main__":
    main()
