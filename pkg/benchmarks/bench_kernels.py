"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 20] [--trials 40]

Times each kernel on bpas taken from a real experiment chain, then the full
experiment loop under each backend (in a subprocess, since the backend is
chosen at import).
"""

import argparse
import importlib
import os
import subprocess
import sys
import timeit

from evidential import _pure
from evidential.core import combine
from evidential.testbed import GenConfig, gen_random_bpa, trial_rng

EXPERIMENT = """
import time
from evidential import BACKEND
from evidential.testbed import ExperimentConfig, GenConfig, run_experiment
cfg = ExperimentConfig(gen=GenConfig(rng_seed=1), trials={trials})
t = time.perf_counter()
run_experiment(cfg)
print(BACKEND, time.perf_counter() - t)
"""


def chain(seed=5, length=5):
    cfg = GenConfig(rng_seed=seed)
    rng = trial_rng(seed, 0)
    acc = gen_random_bpa(cfg, rng)
    for _ in range(length - 1):
        acc = combine(acc, gen_random_bpa(cfg, rng))
    return acc, gen_random_bpa(cfg, rng)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--trials", type=int, default=40)
    args = ap.parse_args()

    backends = {"python": _pure}
    try:
        backends["cython"] = importlib.import_module("evidential._ckernels")
    except ImportError:
        print("compiled kernels not built; timing pure Python only")

    big, fresh = chain()
    a_masks, a_vals = big._arrays()
    b_masks, b_vals = fresh._arrays()
    print(f"accumulated bpa: {len(big)} focal sets, fresh: {len(fresh)}")
    print(f"{'kernel':<20}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for kernel, call in (
        ("combine_masses", lambda mod: mod.combine_masses(a_masks, a_vals, b_masks, b_vals)),
        ("pignistic_masses", lambda mod: mod.pignistic_masses(a_masks, a_vals, 32)),
        ("singleton_support", lambda mod: mod.singleton_support(a_masks, a_vals, 32)),
    ):
        times = {name: min(timeit.repeat(lambda: call(mod), number=1, repeat=args.repeat)) for name, mod in backends.items()}
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{kernel:<20}" + "".join(f"{t * 1e3:>10.3f}ms" for t in times.values()) + f"{speed:>9.1f}x")

    print(f"\nfull experiment, default suite, {args.trials} trials:")
    for force in ("0", "1"):
        env = dict(os.environ, EVIDENTIAL_PURE_PYTHON=force)
        out = subprocess.run([sys.executable, "-c", EXPERIMENT.format(trials=args.trials)], env=env,
                             capture_output=True, text=True, check=True)
        name, secs = out.stdout.split()
        print(f"  {name:<8} {float(secs):.2f}s")


if __name__ == "__main__":
    main()
