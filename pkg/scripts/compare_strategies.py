"""Time one-shot versus staged elimination on corpus constructions.

Each configuration runs in a fresh subprocess with a wall-clock budget, so a
stalled Groebner computation cannot hold up the rest of the table.

    python scripts/compare_strategies.py corpus/*.lcs --budget 60
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
import time

CONFIGS = {"one-shot": (False, 1), "staged-1": (True, 1), "staged-2": (True, 2)}

WORKER = """
import json, sys, time
from loceq.dsl import parse_file
from loceq.envelope import envelope_equation
from loceq.groebner import Budget
from loceq.locus import locus_equation
path, staged, batch, budget = sys.argv[1], sys.argv[2] == "1", int(sys.argv[3]), float(sys.argv[4])
prog = parse_file(path)
t = time.perf_counter()
if prog.goal == "envelope":
    r = envelope_equation(prog, Budget(timeout=budget), method="jacobian", staged=staged, batch=batch)
else:
    r = locus_equation(prog, Budget(timeout=budget), staged=staged, batch=batch)
print(json.dumps({"seconds": time.perf_counter() - t, "degree": r.degree}))
"""


def run(path: str, staged: bool, batch: int, budget: float) -> str:
    t0 = time.perf_counter()
    try:
        proc = subprocess.run(
            [sys.executable, "-c", WORKER, path, "1" if staged else "0", str(batch), str(budget)],
            capture_output=True, text=True, timeout=budget + 30,
        )
    except subprocess.TimeoutExpired:
        return f"timeout>{budget:g}s"
    if proc.returncode != 0:
        last = proc.stderr.strip().splitlines()[-1] if proc.stderr.strip() else "failed"
        return "limit" if "ResourceLimitExceeded" in last else last[:30]
    data = json.loads(proc.stdout)
    return f"{data['seconds']:.3f}s d={data['degree']}"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("files", nargs="+")
    ap.add_argument("--budget", type=float, default=60.0)
    args = ap.parse_args()
    width = max(len(f) for f in args.files)
    print(f"{'case':<{width}}  " + "  ".join(f"{c:>16}" for c in CONFIGS))
    for f in args.files:
        cells = [run(f, s, b, args.budget) for s, b in CONFIGS.values()]
        print(f"{f:<{width}}  " + "  ".join(f"{c:>16}" for c in cells), flush=True)


if __name__ == "__main__":
    main()
