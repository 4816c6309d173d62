"""Check a bundle against Groebner bases computed directly at sampled
targets, and count real solutions over the workspace.

    python3 scripts/run_validate.py --bundle ev3.bundle --samples 100
"""

import argparse
import json
from collections import Counter

from cgsik import pipeline
from cgsik.bundle import load_bundle
from cgsik.kinematics import sample_targets


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bundle", default="ev3.bundle")
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    b = load_bundle(args.bundle)
    rep = pipeline.validate_bundle(b, args.samples, args.seed)
    print(json.dumps(rep, indent=2))

    counts = Counter()
    for t in sample_targets(args.samples, args.seed + 1):
        bb, axis = pipeline.select_branch(b, t)
        counts[pipeline.verify_real_count(b, bb, t, axis).real_count] += 1
    print("real solution counts:", dict(sorted(counts.items())))


if __name__ == "__main__":
    main()
