"""Compare the numba kernels with the pure numpy/Python fallback.

Each mode runs in its own interpreter, because MDIM_DISABLE_NUMBA is read
at import time. Both modes must produce identical moments.

    python3 benchmarks/bench_kernels.py --lattice z2 --orders 16 20 24 28
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from mdim import _accel
from mdim.graph import LatticeSpec, neighbor_table
from mdim.saw import lattice_moments
from mdim._kernels import count_walks

lattice, orders, repeats = sys.argv[1], [int(k) for k in sys.argv[2].split(",")], int(sys.argv[3])
spec = LatticeSpec.parse(lattice)
# warm up (compilation or cache load is not part of the timing)
lattice_moments(spec, 4)
nbr, _ = neighbor_table(spec, 4)
count_walks(nbr, 0, 4)
rows = []
for K in orders:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        mu = lattice_moments(spec, K)
        best = min(best, time.perf_counter() - t0)
    nbr, _ = neighbor_table(spec, K // 2)
    t0 = time.perf_counter()
    saws = count_walks(nbr, 0, K // 2)
    t_saw = time.perf_counter() - t0
    rows.append({"K": K, "moments_s": best, "saw_s": t_saw,
                 "mu": [str(x) for x in mu.mu], "saws": [int(x) for x in saws]})
print(json.dumps({"numba": _accel.USE_NUMBA, "rows": rows}))
"""


def run(mode_disabled: bool, lattice: str, orders: list[int], repeats: int) -> dict:
    env = dict(os.environ, MDIM_DISABLE_NUMBA="1" if mode_disabled else "0")
    out = subprocess.run(
        [sys.executable, "-c", WORKER, lattice, ",".join(map(str, orders)), str(repeats)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lattice", default="z2")
    ap.add_argument("--orders", type=int, nargs="+", default=[16, 20, 24, 28])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)

    fast = run(False, args.lattice, args.orders, args.repeats)
    slow = run(True, args.lattice, args.orders, args.repeats)
    if not fast["numba"]:
        print("warning: numba unavailable, both runs use the fallback", file=sys.stderr)

    print(f"lattice {args.lattice}: best of {args.repeats}")
    print(f"{'K':>4} {'numba moments':>14} {'fallback':>10} {'speedup':>8} "
          f"{'numba saw':>10} {'fallback':>10} {'same':>5}")
    ok = True
    for a, b in zip(fast["rows"], slow["rows"]):
        same = a["mu"] == b["mu"] and a["saws"] == b["saws"]
        ok &= same
        print(f"{a['K']:>4} {a['moments_s']:>13.4f}s {b['moments_s']:>9.4f}s "
              f"{b['moments_s'] / max(a['moments_s'], 1e-9):>7.1f}x "
              f"{a['saw_s']:>9.4f}s {b['saw_s']:>9.4f}s {str(same):>5}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
