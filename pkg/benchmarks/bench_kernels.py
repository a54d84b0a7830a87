"""Compare the compiled and pure-Python integration kernels.

Runs the same adiabatic fig2a power sweep through both kernels, checks that
they agree, and prints wall times.

    python benchmarks/bench_kernels.py --points 100 --repeat 3
"""
import argparse
import time

import numpy as np

from kerrmag import _kernel_py
from kerrmag.dynamics import (DEFAULT_OPTIONS, ModeState, _amplitude_scale,
                              kernel_coefficients)
from kerrmag.experiments import scenario_catalog


def sweep(kernel, cases, opts=DEFAULT_OPTIONS):
    """Chain settles along the grid the way the hysteresis sweep does."""
    y = [0.0] * 6
    out = []
    for coef in cases:
        y, _, status, _ = kernel.settle(coef, list(y), opts.horizon, opts.window,
                                        opts.conv_tol, opts.rtol, opts.atol,
                                        opts.ceiling, opts.h_max)
        out.append(sum(v * v for v in y[4:6]))
    return np.array(out)


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    spec = scenario_catalog()["fig2a"]
    cases = []
    # one amplitude scale for the whole chain so the states carry over
    p0, d0 = spec.configure_single(spec.lo, "pdc")
    scale = _amplitude_scale(p0, d0, ModeState())
    for x in np.linspace(0.15, 0.2, args.points):
        p, d = spec.configure_single(float(x), "pdc")
        cases.append(kernel_coefficients(p, d, scale))

    try:
        from kerrmag import _kernel
    except ImportError:
        _kernel = None

    t_py, m_py = best_time(lambda: sweep(_kernel_py, cases), args.repeat)
    print(f"python  {t_py:9.4f} s  ({args.points} settles)")
    if _kernel is None:
        print("cython  not built (pip install -e . --no-build-isolation)")
        return
    t_cy, m_cy = best_time(lambda: sweep(_kernel, cases), args.repeat)
    diff = np.max(np.abs(m_cy - m_py) / np.maximum(np.abs(m_py), 1e-300))
    print(f"cython  {t_cy:9.4f} s  ({args.points} settles)")
    print(f"speedup {t_py / t_cy:9.1f}x, max relative difference {diff:.2e}")


if __name__ == "__main__":
    main()
