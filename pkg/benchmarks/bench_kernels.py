"""Benchmark the compiled kernels against the pure-Python fallback.

Times the raw dict/tuple kernels on synthetic workloads and the full
pipeline (reduced basis + IO equation) on the bundled models, once per
backend. Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import random
import subprocess
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def _random_dict(rng, nvars, nterms, deg, coeff):
    out = {}
    while len(out) < nterms:
        exps = tuple(rng.randrange(deg + 1) for _ in range(nvars))
        out[exps] = rng.randrange(-coeff, coeff) or 1
    return out


def bench_kernels(mod, repeats=200):
    rng = random.Random(7)
    a = _random_dict(rng, 6, 25, 3, 10 ** 6)
    b = _random_dict(rng, 6, 25, 3, 10 ** 6)
    t0 = time.perf_counter()
    for _ in range(repeats):
        c = mod.dict_mul(a, b)
        mod.dict_add(c, a)
        mod.dict_int_content(c)
    mul_t = time.perf_counter() - t0

    ka = list(a)
    kb = list(b)
    t0 = time.perf_counter()
    for _ in range(repeats * 50):
        for x in ka:
            for y in kb:
                mod.expvec_add(x, y)
                mod.expvec_divides(x, y)
    exp_t = time.perf_counter() - t0
    return mul_t, exp_t


def bench_pipeline():
    from paramvariety.ioeq import derive_io_basis
    from paramvariety.model import load_model

    times = {}
    for name in ("viral", "lotka_volterra"):
        model = load_model(ROOT / "models" / f"{name}.model")
        t0 = time.perf_counter()
        basis = derive_io_basis(model)
        times[name] = time.perf_counter() - t0
        assert basis.L == 2
    return times


def run_backend(pure):
    import importlib

    import paramvariety._kernels as K

    if pure and K.BACKEND != "pure":
        # re-exec under the fallback
        out = subprocess.run(
            [sys.executable, __file__, "--pure-child"],
            env={"PARAMVARIETY_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin",
                 "PYTHONPATH": str(ROOT / "src")},
            capture_output=True, text=True, check=True)
        print(out.stdout, end="")
        return
    importlib.reload(K)
    mul_t, exp_t = bench_kernels(K._impl)
    pipe = bench_pipeline()
    print(f"backend: {K.BACKEND}")
    print(f"  dict_mul/add/content workload : {mul_t * 1e3:8.1f} ms")
    print(f"  exponent-vector workload      : {exp_t * 1e3:8.1f} ms")
    for name, t in pipe.items():
        print(f"  IO equation ({name:<15}) : {t * 1e3:8.1f} ms")


def main():
    if "--pure-child" in sys.argv:
        run_backend(pure=False)  # child already runs with the env var set
        return
    run_backend(pure=False)
    run_backend(pure=True)


if __name__ == "__main__":
    main()
