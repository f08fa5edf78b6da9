"""Regenerate the golden verify reports for the shipped regression configs.

Usage: python scripts/make_goldens.py [--check]

With --check nothing is written; the script exits 1 if any report differs
from its committed golden file.
"""

import argparse
import sys
from pathlib import Path

from entropy_stability import report
from entropy_stability.cli import run
from entropy_stability.config import load

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs" / "regression"
GOLDEN = ROOT / "tests" / "golden"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    stale = 0
    for cfg_path in sorted(CONFIGS.glob("*.toml")):
        code, doc, _ = run("verify", load(cfg_path, env={}))
        text = report.dumps(doc)
        target = GOLDEN / (cfg_path.stem + ".json")
        res = doc["results"]
        print(f"{cfg_path.stem:18s} exit={code} {res['verdict']:13s} "
              f"residual={res['fit']['residual_sup']:.3e} bound={res['bound']:.3e}")
        if args.check:
            if not target.exists() or target.read_text() != text:
                print(f"  golden differs: {target.name}")
                stale += 1
        else:
            target.write_text(text)
    return 1 if stale else 0


if __name__ == "__main__":
    sys.exit(main())
