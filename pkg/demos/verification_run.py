"""Run every verification suite in quick mode and summarize.

The same reports are available from the command line with
``todamap verify --suite all --quick``.
"""

import time

from todamap.verification import SUITES, run_suite

start = time.perf_counter()
for name in SUITES:
    t = time.perf_counter()
    (rep,) = run_suite(name, {"quick": True})
    print(f"{rep}   ({time.perf_counter() - t:.1f}s)")
    if name == "hirota":
        for key in ("eq1", "eq2", "eq3", "eq3_printed"):
            print(f"      {key:<12} {rep.notes[key]:.2e}")
    if name == "tail":
        sums = rep.notes["degree_sums"]
        print("      " + "  ".join(f"K={k}:{float(v):.1e}" for k, v in sums.items()))
print(f"total {time.perf_counter() - start:.1f}s")
