"""Command-line interface.

Exit codes: 0 success, 1 infeasible target, 2 usage error (including a
missing or unreadable bundle), 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

from . import bundle as bundle_io
from . import kinematics, pipeline
from .kinematics import IKTarget, JointAngles

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
BUNDLE_ENV = "CGSIK_BUNDLE"

log = logging.getLogger("cgsik")


class UsageError(Exception):
    pass


def parse_exact(text: str) -> Fraction:
    """``p/q``, an integer or a decimal literal, converted exactly."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not an exact rational: {text!r}") from None


def parse_target(text: str) -> IKTarget:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"target needs three comma-separated values, got {text!r}")
    return IKTarget(*(parse_exact(p) for p in parts))


def parse_angles(text: str) -> JointAngles:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"angles need three comma-separated values, got {text!r}")
    try:
        return JointAngles(*(float(p) for p in parts))
    except ValueError:
        raise UsageError(f"bad angles {text!r}") from None


def _sig(v: float) -> float:
    return float(f"{v:.3g}")


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc) + "\n")


def _load(args) -> pipeline.SolverBundle:
    path = args.bundle or os.environ.get(BUNDLE_ENV)
    if not path:
        raise UsageError(f"no bundle given (use --bundle or set {BUNDLE_ENV})")
    if not os.path.exists(path):
        raise UsageError(f"bundle not found: {path}")
    try:
        return bundle_io.load_bundle(path)
    except bundle_io.BundleError as exc:
        raise UsageError(f"cannot load bundle {path}: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_preprocess(args) -> int:
    kw = {"seed": args.seed} if args.seed is not None else {}
    cfg = (pipeline.PreprocessConfig.from_override_file(args.override, **kw) if args.override
           else pipeline.PreprocessConfig(**kw))
    b = pipeline.preprocess(cfg)
    bundle_io.save_bundle(b, args.out)
    stats = {k: (_sig(v) if isinstance(v, float) else v) for k, v in b.stats.items()}
    _emit({"bundle": args.out, "main_branches": [bb.index for bb in b.main_branches],
           "axis_branches": [bb.index for bb in b.axis_branches], **stats})
    return EXIT_OK


def _print_table(res: pipeline.SolveResult) -> None:
    r = res.report
    print(f"branch {r.branch_index} axis={r.axis} real_count={r.real_count} (S+={r.s_plus}, S-={r.s_minus})")
    if res.solutions is None:
        return
    print(f"{'':3}{'theta1':>12}{'theta4':>12}{'theta7':>12}{'fk err (mm)':>14}")
    for i, s in enumerate(res.solutions.solutions):
        mark = "*" if i == res.solutions.selected else " "
        t = s.angles.as_tuple()
        print(f"{mark:3}{t[0]:12.6f}{t[1]:12.6f}{t[2]:12.6f}{s.fk_residual:14.3e}")


def cmd_solve(args) -> int:
    b = _load(args)
    target = parse_target(args.target)
    res = pipeline.solve(b, target)
    if args.format == "table":
        _print_table(res)
    else:
        doc = res.to_json()
        doc["target"] = target.to_json()
        doc["t_verify"] = _sig(res.t_verify)
        doc["t_solve"] = _sig(res.t_solve)
        _emit(doc)
    return EXIT_OK if res.report.real_count > 0 else EXIT_INFEASIBLE


def cmd_count(args) -> int:
    b = _load(args)
    target = parse_target(args.target)
    bb, axis = pipeline.select_branch(b, target)
    rep = pipeline.verify_real_count(b, bb, target, axis)
    _emit(rep.to_json())
    return EXIT_OK if rep.real_count > 0 else EXIT_INFEASIBLE


def cmd_fk(args) -> int:
    _emit(list(kinematics.fk_numeric(parse_angles(args.angles))))
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    for t in kinematics.sample_targets(args.n, args.seed, axis=args.axis):
        _emit(t.to_json())
    return EXIT_OK


_WORKER_BUNDLE = None


def _init_worker(path):
    global _WORKER_BUNDLE
    _WORKER_BUNDLE = bundle_io.load_bundle(path)


def _bench_row(b: pipeline.SolverBundle, target: IKTarget):
    t0 = time.perf_counter()
    res = pipeline.solve(b, target)
    total = time.perf_counter() - t0
    err = res.solutions.best.fk_residual if res.solutions else None
    return res.t_verify, res.t_solve, total, res.report.real_count, err


def _bench_worker(target: IKTarget):
    return _bench_row(_WORKER_BUNDLE, target)


def run_bench(b: pipeline.SolverBundle, n: int, seed: int, sets: int, jobs: int = 1, path: Optional[str] = None) -> dict:
    out = []
    for k in range(sets):
        targets = kinematics.sample_targets(n, seed + k)
        if jobs > 1 and path:
            with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(path,)) as ex:
                rows = list(ex.map(_bench_worker, targets))
        else:
            rows = [_bench_row(b, t) for t in targets]
        errs = [r[4] for r in rows if r[4] is not None]
        counts = {}
        for r in rows:
            counts[str(r[3])] = counts.get(str(r[3]), 0) + 1
        out.append({
            "set": k + 1,
            "seed": seed + k,
            "n": n,
            "t_verify": _sig(statistics.fmean(r[0] for r in rows)),
            "t_solve": _sig(statistics.fmean(r[1] for r in rows)),
            "t_total": _sig(statistics.fmean(r[2] for r in rows)),
            "mean_error": statistics.fmean(errs) if errs else None,
            "max_error": max(errs) if errs else None,
            "counts": dict(sorted(counts.items())),
        })
    all_err = [s["mean_error"] for s in out if s["mean_error"] is not None]
    return {
        "sets": out,
        "average": {
            "t_verify": _sig(statistics.fmean(s["t_verify"] for s in out)),
            "t_solve": _sig(statistics.fmean(s["t_solve"] for s in out)),
            "t_total": _sig(statistics.fmean(s["t_total"] for s in out)),
            "mean_error": statistics.fmean(all_err) if all_err else None,
        },
    }


def cmd_bench(args) -> int:
    b = _load(args)
    path = args.bundle or os.environ.get(BUNDLE_ENV)
    _emit(run_bench(b, args.n, args.seed, args.sets, args.jobs, path))
    return EXIT_OK


def cmd_validate(args) -> int:
    b = _load(args)
    rep = pipeline.validate_bundle(b, args.samples, args.seed)
    _emit(rep)
    return EXIT_OK if rep["ok"] else EXIT_INTERNAL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cgsik", description="EV3 inverse kinematics via a comprehensive Groebner system")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_bundle(sp):
        sp.add_argument("--bundle", help=f"bundle file (default: ${BUNDLE_ENV})")

    sp = sub.add_parser("preprocess", help="compute the CGS and write a bundle")
    sp.add_argument("--out", required=True)
    sp.add_argument("--override", help="JSON file with main/axis include/exclude branch lists")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_preprocess)

    sp = sub.add_parser("solve", help="solve for joint angles at a target")
    with_bundle(sp)
    sp.add_argument("--target", required=True, help="x,y,z as exact rationals, e.g. 50,-40,601/2")
    sp.add_argument("--format", choices=("json", "table"), default="json")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("count", help="real solution count at a target")
    with_bundle(sp)
    sp.add_argument("--target", required=True)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("fk", help="forward kinematics")
    sp.add_argument("--angles", required=True, help="theta1,theta4,theta7 in radians")
    sp.set_defaults(func=cmd_fk)

    sp = sub.add_parser("sample", help="random reachable targets as JSON lines")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--axis", action="store_true", help="targets on the z-axis")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("bench", help="accuracy/timing protocol over sampled targets")
    with_bundle(sp)
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sets", type=int, default=10)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("validate-bundle", help="check the bundle's branches against direct Groebner bases")
    with_bundle(sp)
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_validate)
    return p


_VALUE_OPTIONS = ("--target", "--angles")


def _join_negative_values(argv: Sequence[str]) -> list:
    """argparse takes ``--target -5,1,2`` for an option; glue such values on."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cgsik: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"cgsik: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
