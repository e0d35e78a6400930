"""Time the census kernels with numba and with the pure Python fallback.

Each backend runs in its own interpreter because REFBOUND_NUMBA is read at
import time.  Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

CASES = {
    "quadratic_1e6": ("count_real_quadratic", 10**6),
    "cubic_1e4": ("count_totally_real_cubic", 10**4),
    "cubic_1e5": ("count_totally_real_cubic", 10**5),
    "cubic_1e6": ("count_totally_real_cubic", 10**6),
}

CHILD = """
import json, sys, time
from refbound._accel import backend_name
from refbound import census
cases, repeat = json.loads(sys.argv[1]), int(sys.argv[2])
out = {"backend": backend_name(), "cases": {}}
for name, (fn, limit) in cases.items():
    f = getattr(census, fn)
    t0 = time.perf_counter()
    count = f(limit).count
    first = time.perf_counter() - t0
    best = first
    for _ in range(repeat - 1):
        t0 = time.perf_counter()
        f(limit)
        best = min(best, time.perf_counter() - t0)
    out["cases"][name] = {"count": count, "first": first, "best": best}
print(json.dumps(out))
"""


def run_backend(flag: str, cases: dict, repeat: int) -> dict:
    env = {**os.environ, "REFBOUND_NUMBA": flag}
    res = subprocess.run([sys.executable, "-c", CHILD, json.dumps(cases), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-slow", action="store_true", help="drop the 1e6 cubic case for the fallback")
    args = ap.parse_args()

    fast = run_backend("1", CASES, args.repeat)
    slow_cases = {k: v for k, v in CASES.items() if not (args.skip_slow and k == "cubic_1e6")}
    slow = run_backend("0", slow_cases, 1)

    print(f"{'case':16s} {'count':>8s} {'numba first':>12s} {'numba best':>11s} {'python':>9s} {'speedup':>8s}")
    for name in CASES:
        f = fast["cases"][name]
        s = slow["cases"].get(name)
        if s is not None and s["count"] != f["count"]:
            raise SystemExit(f"{name}: backends disagree ({f['count']} vs {s['count']})")
        py = f"{s['best']:9.3f}" if s else f"{'-':>9s}"
        speed = f"{s['best'] / f['best']:8.1f}" if s else f"{'-':>8s}"
        print(f"{name:16s} {f['count']:8d} {f['first']:12.3f} {f['best']:11.3f} {py} {speed}")


if __name__ == "__main__":
    main()
