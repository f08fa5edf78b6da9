"""Seeded fuzzing of ``verify`` over a config, one seed per iteration.

Usage: python scripts/fuzz.py configs/fuzz_shannon.toml --iterations 200 [--start 0]

Each iteration overrides the seed (as ESL_SEED would), runs verify twice and
checks that the two reports are byte-identical, that the verdict is
withinBound and that eps1 <= 2*delta and eps2 <= 3*delta up to the float
tolerance. Exits 1 on the first violation.
"""

import argparse
import sys
import time

from entropy_stability import report
from entropy_stability.cli import run
from entropy_stability.config import SEED_ENV, load


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--iterations", type=int, default=100)
    ap.add_argument("--start", type=int, default=0, help="first seed")
    args = ap.parse_args()

    start = time.perf_counter()
    worst = [0.0, 0.0]
    for seed in range(args.start, args.start + args.iterations):
        cfg = load(args.config, env={SEED_ENV: str(seed)})
        code, doc, _ = run("verify", cfg)
        if report.dumps(doc) != report.dumps(run("verify", cfg)[1]):
            print(f"seed {seed}: reports differ between identical runs")
            return 1
        res = doc["results"]
        delta = cfg["perturbation.amplitude"]
        tol = res["tolerance"]
        e1, e2 = res["eps_hat"]["eps1"], res["eps_hat"]["eps2"]
        if code != 0 or e1 > 2 * delta + tol or e2 > 3 * delta + tol:
            print(f"seed {seed}: exit={code} eps1={e1:.6g} eps2={e2:.6g} delta={delta:g}")
            return 1
        if delta > 0:
            worst = [max(worst[0], e1 / delta), max(worst[1], e2 / delta)]
    print(f"{args.iterations} iterations ok in {time.perf_counter() - start:.1f} s; "
          f"worst eps1/delta={worst[0]:.4f} eps2/delta={worst[1]:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
