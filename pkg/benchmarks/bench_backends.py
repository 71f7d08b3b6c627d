"""Compare the compiled row kernels against the pure-Python fallback.

Each workload builds kernel presentations for random congruence systems
shaped like cochain transition maps: many coordinates, about half as many
congruence rows, small composite modulus.  The child process does the
timing so each backend is selected cleanly at import time via
``PROFINITY_PURE``.

Run with::

    python3 benchmarks/bench_backends.py
"""

from __future__ import annotations

import json
import os
import subprocess
import sys

WORKLOADS = [
    {"name": "small  (n=60,  8 systems)", "n": 60, "k": 30, "count": 8, "L": 12},
    {"name": "medium (n=160, 4 systems)", "n": 160, "k": 80, "count": 4, "L": 12},
    {"name": "large  (n=320, 2 systems)", "n": 320, "k": 160, "count": 2, "L": 24},
]

CHILD = r"""
import json, random, sys, time
from profinity.exact_algebra import ModSubquotient
from profinity._rows import pack_row, compiled_backend_active

spec = json.load(sys.stdin)
rng = random.Random(2024)
results = []
for w in spec:
    n, k, count, L = w["n"], w["k"], w["count"], w["L"]
    total = 0.0
    check = 0
    for _ in range(count):
        moduli = [rng.choice([m for m in (2, 3, 4, 6, 12) if L % m == 0])
                  for _ in range(n)]
        rows = [
            pack_row([(L // moduli[j]) * rng.randrange(moduli[j])
                      for j in range(n)], L)
            for _ in range(k)
        ]
        t0 = time.perf_counter()
        sq = ModSubquotient(moduli, rows, L)
        total += time.perf_counter() - t0
        check ^= hash((sq.group.factors, sq.kernel_order))
    results.append({"name": w["name"], "seconds": total, "check": check})
print(json.dumps({"compiled": compiled_backend_active(), "results": results}))
"""


def run_backend(pure: bool) -> dict:
    env = dict(os.environ, PROFINITY_PURE="1" if pure else "0")
    out = subprocess.run(
        [sys.executable, "-c", CHILD],
        input=json.dumps(WORKLOADS),
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout)


def main() -> None:
    pure = run_backend(pure=True)
    fast = run_backend(pure=False)
    if fast["compiled"]:
        print("compiled backend: available")
    else:
        print("compiled backend: NOT BUILT; comparing pure against itself")
    print()
    print(f"{'workload':<28} {'pure (s)':>10} {'compiled (s)':>14} {'speedup':>9}")
    for p, f in zip(pure["results"], fast["results"]):
        if p["check"] != f["check"]:
            raise SystemExit(f"backends disagree on workload {p['name']!r}")
        ratio = p["seconds"] / f["seconds"] if f["seconds"] else float("inf")
        print(
            f"{p['name']:<28} {p['seconds']:>10.3f} {f['seconds']:>14.3f} "
            f"{ratio:>8.1f}x"
        )


if __name__ == "__main__":
    main()
