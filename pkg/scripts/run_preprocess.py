"""Build the EV3 solver bundle and report what survived each filter.

    python3 scripts/run_preprocess.py --out ev3.bundle
"""

import argparse
import logging
import time

from cgsik import pipeline
from cgsik.bundle import save_bundle
from cgsik.polyring import format_poly


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="ev3.bundle")
    ap.add_argument("--seed", type=int, default=pipeline.PreprocessConfig.seed)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    t0 = time.perf_counter()
    res = pipeline.preprocess_full(pipeline.PreprocessConfig(seed=args.seed))
    elapsed = time.perf_counter() - t0
    save_bundle(res.bundle, args.out)

    kept = {bb.index for bb in res.bundle.main_branches}
    print(f"main CGS: {len(res.main_cgs.branches)} branches")
    for b in res.main_cgs.branches:
        eq = ", ".join(format_poly(e) for e in b.segment.eq_gens) or "-"
        mark = "kept" if b.index in kept else ""
        print(f"  {b.index:3d}  {len(b.basis):3d} polys  eq: {eq[:60]:60s} {mark}")
    if res.axis_cgs is not None:
        print(f"axis CGS: {len(res.axis_cgs.branches)} branches, kept {[bb.index for bb in res.bundle.axis_branches]}")
    for k, v in res.bundle.stats.items():
        print(f"  {k}: {v:.3g}" if isinstance(v, float) else f"  {k}: {v}")
    print(f"wrote {args.out} in {elapsed:.1f} s")


if __name__ == "__main__":
    main()
