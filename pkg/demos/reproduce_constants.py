"""Run every reproduction target and print computed values next to the expected ones."""

from __future__ import annotations

import json
import time

from graphon_commons import repro


def main() -> int:
    failed = 0
    for target in repro.load_manifest():
        t0 = time.perf_counter()
        res = repro.run_target(target)
        dt = time.perf_counter() - t0
        failed += not res.passed
        mark = "PASS" if res.passed else "FAIL"
        print(f"{mark}  {target.criterion:>2}  {target.id:<22} {dt:6.2f}s")
        print(f"      {target.description}")
        print(f"      {json.dumps(res.computed, sort_keys=True)}")
    print(f"\n{failed} target(s) failed")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
