"""Time the numba kernels against the numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--points 20000] [--repeat 5]

Both paths run in one process by toggling ``akweyl._jit.USE_NUMBA``; results
are checked for agreement before timings are printed.
"""
import argparse
import time

import numpy as np

from akweyl import _jit, catalog, geometry, kernels
from akweyl import sd_algebra as sd


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def _cases(npoints, seed):
    entry = catalog.load("cp2_fs")
    pts = entry.sample_points(npoints, seed=seed)
    g, dg, ddg = geometry.metric_jets(entry.description, pts)
    R = kernels.riemann(g, dg, ddg)
    R = R[2]
    E = kernels.gram_schmidt(g)
    rng = np.random.default_rng(seed)
    W = sd.random_traceless(rng, npoints)
    om = sd.random_omega(rng, npoints)
    return {
        "riemann": lambda: kernels.riemann(g, dg, ddg),
        "gram_schmidt": lambda: kernels.gram_schmidt(g),
        "to_frame4": lambda: kernels.to_frame4(R, E),
        "lemma1_gap_batch": lambda: sd.lemma1_gap_batch(W, om),
    }


def run(npoints=20_000, repeat=5, seed=0):
    if not _jit.HAVE_NUMBA:
        print("numba not installed; only the numpy path is available")
    saved = _jit.USE_NUMBA
    rows = []
    try:
        cases = _cases(npoints, seed)
        for name, fn in cases.items():
            _jit.USE_NUMBA = False
            t_np, ref = _best(fn, repeat)
            t_nb = float("nan")
            if _jit.HAVE_NUMBA:
                _jit.USE_NUMBA = True
                fn()  # compile
                t_nb, out = _best(fn, repeat)
                pairs = zip(out, ref) if isinstance(ref, tuple) else [(out, ref)]
                err = max(float(np.max(np.abs(a - b))) for a, b in pairs)
                scale = max(float(np.max(np.abs(r))) for r in (ref if isinstance(ref, tuple) else [ref]))
                if err > 1e-9 * max(1.0, scale):
                    raise AssertionError(f"{name}: numba and numpy disagree by {err:.3e}")
            rows.append((name, t_np, t_nb))
    finally:
        _jit.USE_NUMBA = saved
    print(f"{npoints} points, best of {repeat}")
    print(f"{'kernel':18s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for name, t_np, t_nb in rows:
        print(f"{name:18s} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.1f}x")
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    run(a.points, a.repeat, a.seed)
