"""Accuracy and timing over 10 sets of 100 sampled targets.

Prints one row per set (mean verification / solve time and FK error) and
the average row, in the layout of a results table.

    python3 scripts/run_bench.py --bundle ev3.bundle
"""

import argparse

from cgsik.bundle import load_bundle
from cgsik.cli import run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bundle", default="ev3.bundle")
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--sets", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    b = load_bundle(args.bundle)
    doc = run_bench(b, args.n, args.seed, args.sets, args.jobs, args.bundle)
    print(f"{'set':>4} {'verify (s)':>11} {'solve (s)':>10} {'total (s)':>10} {'mean err (mm)':>14} {'max err (mm)':>13}  counts")
    for s in doc["sets"]:
        print(f"{s['set']:>4} {s['t_verify']:>11.3g} {s['t_solve']:>10.3g} {s['t_total']:>10.3g} "
              f"{s['mean_error']:>14.3e} {s['max_error']:>13.3e}  {s['counts']}")
    a = doc["average"]
    print(f"{'avg':>4} {a['t_verify']:>11.3g} {a['t_solve']:>10.3g} {a['t_total']:>10.3g} {a['mean_error']:>14.3e}")


if __name__ == "__main__":
    main()
