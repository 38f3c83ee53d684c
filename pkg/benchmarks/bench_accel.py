"""Wall-clock comparison of the numba kernels and the numpy fallback.

    python3 benchmarks/bench_accel.py [--repeat N]

Each backend runs in its own interpreter because the flag is read at import.
The numba column excludes compilation (first call is a warm-up).
"""

import argparse
import json
import os
import subprocess
import sys

WORK = """
import json, time
from k3lab._accel import backend
from k3lab.periods import appell_f4, gauss_2f1
from k3lab.modular import loop_monodromy_traces

def f21():
    for k in range(2000):
        gauss_2f1(1/3, 2/3, 1, -0.9 + 0.0009 * k)

def f4():
    for k in range(200):
        appell_f4(1/3, 2/3, 1, 1, 0.001 * k - 0.1, 0.02)

def ode():
    loop_monodromy_traces()

res = {"backend": backend()}
for name, fn in (("2F1 x2000", f21), ("F4 x200", f4), ("ODE loops", ode)):
    fn()
    best = float("inf")
    for _ in range(REPEAT):
        t0 = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t0)
    res[name] = best
print(json.dumps(res))
"""


def measure(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("K3LAB_DISABLE_NUMBA", None)
    if disable:
        env["K3LAB_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", WORK.replace("REPEAT", str(repeat))],
                         capture_output=True, text=True, env=env, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast, slow = measure(False, args.repeat), measure(True, args.repeat)
    print(f"{'kernel':<12}{fast['backend']:>10}{slow['backend']:>10}{'speedup':>10}")
    for k in fast:
        if k == "backend":
            continue
        print(f"{k:<12}{fast[k]:>10.4f}{slow[k]:>10.4f}{slow[k] / fast[k]:>9.1f}x")


if __name__ == "__main__":
    main()
