"""Offline preprocessing (CGS, branch filtering, Hermite polynomials) and the
online solve: locate the segment, count real solutions, back-substitute.

No Groebner basis is computed on the online path.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import cgs, groebner, kinematics, realroot
from .cgs import Branch, point_in_segment, specialize_branch
from .groebner import QuotientBasis
from .kinematics import AXIS_RING, IKTarget, JointAngles
from .polyring import Poly, format_monomial, specialize
from .realroot import CharPoly

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8  # on the polynomial system
FK_ACCEPT = 1e-6  # mm


class PipelineError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# configuration and bundle types


@dataclass
class Override:
    include: Tuple[int, ...] = ()
    exclude: Tuple[int, ...] = ()


@dataclass
class PreprocessConfig:
    grid_steps: int = 12  # per joint, for theta4 and theta7
    theta1_steps: int = 8  # multiples of pi/4, so the coordinate planes are hit
    random_samples: int = 2000
    axis_samples: int = 200
    seed: int = 20240601
    max_den: int = 99
    charpoly_budget: int = 400_000  # terms per intermediate entry
    max_depth: int = cgs.DEFAULT_MAX_DEPTH
    main_override: Override = field(default_factory=Override)
    axis_override: Override = field(default_factory=Override)

    @classmethod
    def from_override_file(cls, path: str, **kw) -> "PreprocessConfig":
        with open(path) as fh:
            data = json.load(fh)
        cfg = cls(**kw)
        for key in ("main", "axis"):
            part = data.get(key, {})
            ov = Override(tuple(part.get("include", ())), tuple(part.get("exclude", ())))
            setattr(cfg, f"{key}_override", ov)
        return cfg


@dataclass
class BundleBranch:
    branch: Branch
    charpoly: Optional[CharPoly]  # None: computed per query at solve time
    qbasis: QuotientBasis

    @property
    def index(self) -> int:
        return self.branch.index


@dataclass
class SolverBundle:
    main_branches: List[BundleBranch]
    axis_branches: List[BundleBranch]
    fingerprint: str
    version: int = 1
    stats: Dict[str, object] = field(default_factory=dict)


@dataclass
class FeasibilityReport:
    branch_index: Optional[int]
    axis: bool
    real_count: int
    s_plus: int = 0
    s_minus: int = 0

    @property
    def matched(self) -> bool:
        return self.branch_index is not None

    def to_json(self) -> dict:
        return {
            "branch": self.branch_index,
            "axis": self.axis,
            "real_count": self.real_count,
            "s_plus": self.s_plus,
            "s_minus": self.s_minus,
        }


@dataclass
class Solution:
    angles: JointAngles
    witness: Tuple[float, float, float, float, float, float]  # c1 s1 c4 s4 c7 s7
    fk_residual: float

    def to_json(self) -> dict:
        return {
            "angles": list(self.angles.as_tuple()),
            "witness": dict(zip(kinematics.DECISION_VARS, self.witness)),
            "fk_residual": self.fk_residual,
        }


@dataclass
class SolutionSet:
    solutions: List[Solution]
    selected: int = 0
    shape: str = ""

    def __len__(self):
        return len(self.solutions)

    @property
    def best(self) -> Solution:
        return self.solutions[self.selected]

    def to_json(self) -> dict:
        return {"solutions": [s.to_json() for s in self.solutions], "selected": self.selected, "shape": self.shape}


class InfeasibleTarget(PipelineError):
    def __init__(self, report: FeasibilityReport):
        self.report = report
        why = "no segment contains the target" if not report.matched else "no real solution"
        super().__init__(why)


# ---------------------------------------------------------------------------
# preprocessing


def workspace_samples(cfg: PreprocessConfig) -> List[Tuple]:
    """Rationalized FK images of an angle grid and of random angles."""
    rng = np.random.default_rng(cfg.seed)
    t1s = [k * 2 * math.pi / cfg.theta1_steps for k in range(cfg.theta1_steps)]
    grid = [-math.pi + (k + 0.5) * 2 * math.pi / cfg.grid_steps for k in range(cfg.grid_steps)] + [0.0, math.pi / 2, -math.pi / 2, math.pi]
    angles = [(a, b, c) for a in t1s for b in grid for c in grid]
    angles += [tuple(rng.uniform(-math.pi, math.pi, size=3)) for _ in range(cfg.random_samples)]
    seen = set()
    out = []
    for t in angles:
        p = tuple(kinematics.rationalize(v, cfg.max_den) for v in kinematics.fk_numeric(JointAngles(*t)))
        if p not in seen:
            seen.add(p)
            out.append(p)
    for t in kinematics.sample_targets(cfg.axis_samples, cfg.seed + 1, axis=True, max_den=cfg.max_den):
        p = (t.x, t.y, t.z)
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def _zero_dimensional(b: Branch) -> bool:
    dring = b.ring.decision_ring()
    nx = b.ring.ndecision
    return groebner.is_zero_dimensional([dring.monomial(g.lm()[:nx]) for g in b.basis])


def forces_axis(b: Branch, hits: Sequence[Tuple]) -> bool:
    """The segment lies over x = y = 0 (symbolically), and every real sample
    in it confirms this."""
    pring = b.ring.param_ring()
    if "x" not in pring.names or "y" not in pring.names:
        return False
    E = b.segment.eq_gens
    if not E:
        return False
    x, y = pring.gen("x"), pring.gen("y")
    symbolic = (groebner.in_radical(x, E) and groebner.in_radical(y, E)) or groebner.in_radical(x * x + y * y, E)
    return symbolic and all(p[0] == 0 and p[1] == 0 for p in hits)


def _filter(result: cgs.CGSResult, samples: Sequence[Tuple], override: Override, allow_axis: bool):
    """Keep zero-dimensional, nontrivial, real-sample-covered branches.

    Returns (kept branches, axis-triggering branches, per-branch log lines).
    """
    kept, axis, notes = [], [], []
    for b in result.branches:
        hits = [p for p in samples if point_in_segment(b.segment, p)]
        if b.index in override.exclude:
            notes.append((b.index, "excluded by override"))
            continue
        if not b.basis or b.is_unit():
            notes.append((b.index, "no solutions (unit ideal)" if b.basis else "zero ideal"))
            continue
        covered = bool(hits) or b.index in override.include
        if not _zero_dimensional(b):
            if covered and allow_axis and forces_axis(b, hits):
                axis.append(b)
                notes.append((b.index, f"positive-dimensional over the z-axis ({len(hits)} samples)"))
                continue
            if covered:
                raise PipelineError(f"branch {b.index} is positive-dimensional with real samples and is not the axis case")
            notes.append((b.index, "positive-dimensional, no real sample"))
            continue
        if not covered:
            notes.append((b.index, "no real sample"))
            continue
        kept.append(b)
        notes.append((b.index, f"kept ({len(hits)} samples)"))
    return kept, axis, notes


def _with_charpoly(b: Branch, budget: int) -> BundleBranch:
    N, lcs, exps, qb = realroot.parametric_hermite(b.basis)
    try:
        chi = realroot.parametric_char_poly(N, lcs, exps, budget=budget)
    except realroot.BudgetExceeded as exc:
        log.warning("branch %d: characteristic polynomial deferred (%s)", b.index, exc)
        chi = None
    return BundleBranch(b, chi, qb)


@dataclass
class PreprocessResult:
    bundle: SolverBundle
    main_cgs: cgs.CGSResult
    axis_cgs: Optional[cgs.CGSResult]


def preprocess_full(cfg: PreprocessConfig | None = None, main_cgs: Optional[cgs.CGSResult] = None,
                    axis_cgs: Optional[cgs.CGSResult] = None) -> PreprocessResult:
    """Build the EV3 bundle (CGS, filtering, axis recursion, characteristic
    polynomials), keeping the full CGS results.

    Previously computed CGS results may be passed in to skip their computation.
    """
    cfg = cfg or PreprocessConfig()
    stats: Dict[str, object] = {}
    t0 = time.perf_counter()
    if main_cgs is None:
        main_cgs = cgs.compute_cgs(kinematics.build_ik_system(), max_depth=cfg.max_depth)
    stats["cgs_branches"] = len(main_cgs.branches)
    stats["cgs_seconds"] = time.perf_counter() - t0

    samples = workspace_samples(cfg)
    stats["samples"] = len(samples)
    kept, axis_trigger, notes = _filter(main_cgs, samples, cfg.main_override, allow_axis=True)
    for idx, why in notes:
        log.info("main branch %d: %s", idx, why)

    axis_kept: List[Branch] = []
    if axis_trigger:
        t1 = time.perf_counter()
        if axis_cgs is None:
            axis_cgs = cgs.compute_cgs(kinematics.build_axis_system(), max_depth=cfg.max_depth)
        stats["axis_cgs_branches"] = len(axis_cgs.branches)
        stats["axis_cgs_seconds"] = time.perf_counter() - t1
        axis_samples = [(p[2],) for p in samples if p[0] == 0 and p[1] == 0]
        axis_kept, more, notes = _filter(axis_cgs, axis_samples, cfg.axis_override, allow_axis=False)
        for idx, why in notes:
            log.info("axis branch %d: %s", idx, why)
        if more:
            raise PipelineError("positive-dimensional branch in the axis system")

    if not kept and not axis_kept:
        raise PipelineError("empty bundle: no branch survived filtering")

    t2 = time.perf_counter()
    main = [_with_charpoly(b, cfg.charpoly_budget) for b in kept]
    axis = [_with_charpoly(b, cfg.charpoly_budget) for b in axis_kept]
    stats["charpoly_seconds"] = time.perf_counter() - t2
    stats["total_seconds"] = time.perf_counter() - t0
    bundle = SolverBundle(main, axis, kinematics.table_fingerprint(), stats=stats)
    return PreprocessResult(bundle, main_cgs, axis_cgs)


def preprocess(cfg: PreprocessConfig | None = None) -> SolverBundle:
    """Build the EV3 solver bundle."""
    return preprocess_full(cfg).bundle


# ---------------------------------------------------------------------------
# online steps


def _point(target: IKTarget, axis: bool) -> Tuple:
    return (target.z,) if axis else (target.x, target.y, target.z)


def select_branch(bundle: SolverBundle, target: IKTarget) -> Tuple[Optional[BundleBranch], bool]:
    """The branch whose segment contains the target (axis targets
    use the axis sub-bundle)."""
    axis = target.on_axis()
    pool = bundle.axis_branches if axis else bundle.main_branches
    point = _point(target, axis)
    for bb in pool:
        if point_in_segment(bb.branch.segment, point):
            return bb, axis
    return None, axis


def _specialized_charpoly(bb: BundleBranch, point) -> CharPoly:
    G = specialize_branch(bb.branch, point, check=False)
    return realroot.char_poly(realroot.hermite_matrix(G))


def verify_real_count(bundle: SolverBundle, bb: Optional[BundleBranch], target: IKTarget,
                      axis: Optional[bool] = None, cross_check: bool = False) -> FeasibilityReport:
    """Real solution count by sign changes of the Hermite polynomial."""
    if axis is None:
        axis = target.on_axis()
    if bb is None:
        return FeasibilityReport(None, axis, 0)
    point = _point(target, axis)
    if bb.charpoly is not None:
        try:
            chi = bb.charpoly.evaluate(point)
        except ZeroDivisionError as exc:
            raise PipelineError(f"branch {bb.index}: {exc}; leading coefficient vanishes inside its segment") from exc
        if cross_check:
            other = _specialized_charpoly(bb, point)
            if other.coeffs != chi.coeffs:
                raise PipelineError(f"branch {bb.index}: stored and specialized characteristic polynomials differ")
    else:
        chi = _specialized_charpoly(bb, point)
    sc = realroot.count_signs(chi)
    return FeasibilityReport(bb.index, axis, sc.count, sc.s_plus, sc.s_minus)


class _Compiled:
    """Float evaluation (and gradient) of a polynomial system."""

    def __init__(self, polys: Sequence[Poly]):
        self.n = polys[0].ring.nvars
        self.data = []
        for p in polys:
            E = np.array([m for m in p.terms], dtype=float).reshape(-1, self.n)
            C = np.array([c.to_float() for c in p.terms.values()])
            self.data.append((E, C))

    def values(self, x: np.ndarray) -> np.ndarray:
        return np.array([C @ np.prod(x ** E, axis=1) for E, C in self.data])

    def scales(self, x: np.ndarray) -> np.ndarray:
        return np.array([np.abs(C) @ np.abs(np.prod(x ** E, axis=1)) for E, C in self.data])

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        J = np.zeros((len(self.data), self.n))
        for i, (E, C) in enumerate(self.data):
            for v in range(self.n):
                col = E[:, v]
                mask = col > 0
                if not mask.any():
                    continue
                Ev = E[mask].copy()
                Ev[:, v] -= 1
                J[i, v] = (C[mask] * col[mask]) @ np.prod(x ** Ev, axis=1)
        return J


def _newton(system: _Compiled, x: np.ndarray, iters: int = 8) -> np.ndarray:
    for _ in range(iters):
        f = system.values(x)
        if np.max(np.abs(f)) < 1e-13 * max(1.0, float(np.max(system.scales(x)))):
            break
        J = system.jacobian(x)
        step, *_ = np.linalg.lstsq(J, -f, rcond=None)
        x = x + step
        if np.max(np.abs(step)) < 1e-15:
            break
    return x


def classify_shape(G: Sequence[Poly]) -> str:
    """'six' or 'seven' for the two triangular shapes of the main system."""
    names = G[0].ring.names if G else ()
    lms = sorted((tuple(g.lm()) for g in G))
    if names != kinematics.DECISION_VARS:
        return "axis" if names == AXIS_RING.names else "other"
    got = [format_monomial(m, names) for m in lms]
    if got == ["s7^4", "c7", "s4", "c4", "s1", "c1"]:
        return "six"
    if len(got) == 7 and "c7*s7" in got and "c7^2" in got:
        return "seven"
    return "other"


def _triangular_candidates(G: Sequence[Poly], tol: float) -> List[np.ndarray]:
    """Back-substitute a lex-triangular basis from the last variable up.

    For each variable the polynomials whose leading monomial has it as the
    highest variable are specialized at the values found so far; the real
    roots of the lowest-degree one that does not vanish identically are the
    candidates, screened by the others.
    """
    ring = G[0].ring
    n = ring.nvars
    by_var: Dict[int, List[Poly]] = {v: [] for v in range(n)}
    for g in G:
        lead = next(i for i, e in enumerate(g.lm()) if e)
        by_var[lead].append(g)
    partial: List[Dict[int, float]] = [{}]
    for v in range(n - 1, -1, -1):
        polys = sorted(by_var[v], key=lambda g: g.lm())
        if not polys:
            raise PipelineError(f"basis is not triangular in {ring.names[v]}")
        nxt = []
        for assign in partial:
            unis = [_univariate(p, v, assign) for p in polys]
            live = [(c, s) for c, s in unis if len(c) > 1]
            if not live:
                continue
            coeffs, _ = live[0]
            for r in realroot.univar_real_roots(coeffs, tol):
                ok = all(abs(np.polyval(c, r)) <= 1e-6 * max(1.0, s) for c, s in unis)
                if ok:
                    a = dict(assign)
                    a[v] = r
                    nxt.append(a)
        partial = nxt
    return [np.array([a[i] for i in range(n)]) for a in partial]


def _univariate(p: Poly, v: int, assign: Dict[int, float]) -> Tuple[np.ndarray, float]:
    """Coefficients (highest first) of p in variable v with the others
    substituted, trimmed of numerically vanishing leading terms, and the
    magnitude scale used for that test."""
    deg = p.degree(v)
    coeffs = np.zeros(deg + 1)
    mags = np.zeros(deg + 1)
    for m, c in p.terms.items():
        t = c.to_float()
        for i, e in enumerate(m):
            if e and i != v:
                t *= assign[i] ** e
        coeffs[deg - m[v]] += t
        mags[deg - m[v]] += abs(t)
    scale = float(mags.max()) if mags.size else 0.0
    k = 0
    while k < deg and abs(coeffs[k]) <= 1e-10 * max(1.0, scale):
        k += 1
    return coeffs[k:], scale


_SYSTEMS: Dict[str, List[Poly]] = {}


def _system(axis: bool) -> List[Poly]:
    key = "axis" if axis else "main"
    if key not in _SYSTEMS:
        _SYSTEMS[key] = kinematics.build_axis_system() if axis else kinematics.build_ik_system()
    return _SYSTEMS[key]


def _validate(cand: np.ndarray, full: _Compiled, local: _Compiled, axis: bool, target: IKTarget) -> Optional[Solution]:
    """Newton-refine on the (square) system of the branch, then accept if the
    original system and the circle relations hold to RESIDUAL_TOL and the
    forward kinematics lands within FK_ACCEPT of the target."""
    w = _newton(local, cand.copy())
    if axis:
        w = np.concatenate(([1.0, 0.0], w))
    res = full.values(w)
    if not np.all(np.isfinite(res)) or np.max(np.abs(res)) > RESIDUAL_TOL:
        return None
    c1, s1, c4, s4, c7, s7 = (float(v) for v in w)
    theta1 = 0.0 if axis else math.atan2(s1, c1)
    angles = JointAngles(theta1, math.atan2(s4, c4), math.atan2(s7, c7))
    err = math.dist(kinematics.fk_numeric(angles), target.as_floats())
    if err > FK_ACCEPT:
        return None
    return Solution(angles, (c1, s1, c4, s4, c7, s7), err)


def solve_at_target(bundle: SolverBundle, target: IKTarget, report: Optional[FeasibilityReport] = None,
                    bb: Optional[BundleBranch] = None, tol: float = realroot.DEFAULT_TOL) -> SolutionSet:
    """Specialize, back-substitute and validate, for a target whose real
    count is positive."""
    if report is None or bb is None:
        bb, axis = select_branch(bundle, target)
        report = verify_real_count(bundle, bb, target, axis)
    if bb is None or report.real_count <= 0:
        raise InfeasibleTarget(report)
    axis = report.axis
    point = _point(target, axis)
    G = specialize_branch(bb.branch, point).generators
    shape = classify_shape(G)
    cands = _triangular_candidates(G, tol)
    full = _Compiled([specialize(f, (target.x, target.y, target.z)) for f in _system(False)])
    local = full if not axis else _Compiled([specialize(f, point) for f in _system(True)])
    sols: List[Solution] = []
    for c in cands:
        s = _validate(c, full, local, axis, target)
        if s is None:
            continue
        if any(max(abs(a - b) for a, b in zip(s.angles.as_tuple(), o.angles.as_tuple())) < 1e-7 for o in sols):
            continue
        sols.append(s)
    if not sols:
        raise PipelineError(f"real count {report.real_count} but no candidate survived validation at {target.to_json()}")
    sols.sort(key=lambda s: s.angles.as_tuple())
    return SolutionSet(sols, 0, shape)


@dataclass
class SolveResult:
    report: FeasibilityReport
    solutions: Optional[SolutionSet]
    t_verify: float = 0.0
    t_solve: float = 0.0

    def to_json(self) -> dict:
        out = self.report.to_json()
        if self.solutions is not None:
            out.update(self.solutions.to_json())
        else:
            out.update({"solutions": [], "selected": None})
        return out


def solve(bundle: SolverBundle, target: IKTarget) -> SolveResult:
    """Select, count, then solve; infeasible targets stop after the count,
    with no root finding."""
    t0 = time.perf_counter()
    bb, axis = select_branch(bundle, target)
    report = verify_real_count(bundle, bb, target, axis)
    t1 = time.perf_counter()
    if report.real_count <= 0:
        return SolveResult(report, None, t1 - t0, 0.0)
    sols = solve_at_target(bundle, target, report, bb)
    return SolveResult(report, sols, t1 - t0, time.perf_counter() - t1)


# ---------------------------------------------------------------------------
# offline validation of a bundle


def validate_bundle(bundle: SolverBundle, n: int, seed: int) -> dict:
    """Check the kept branches at sampled targets against direct Groebner
    bases of the specialized system, and the stored characteristic
    polynomials against ones built from the specialized basis."""
    targets = kinematics.sample_targets(n, seed)
    axis_targets = kinematics.sample_targets(max(1, n // 5), seed, axis=True)
    out = {"samples": n, "axis_samples": len(axis_targets)}
    ok = True
    parts = (
        ("main", bundle.main_branches, kinematics.build_ik_system(), [(t.x, t.y, t.z) for t in targets]),
        ("axis", bundle.axis_branches, kinematics.build_axis_system(), [(t.z,) for t in axis_targets]),
    )
    for name, pool, system, points in parts:
        if not pool:
            out[name] = {"branches": 0}
            continue
        res = cgs.CGSResult([bb.branch for bb in pool], pool[0].branch.ring, system)
        rep = cgs.validate_specialization(res, points)
        charpoly_mismatch = []
        for point in points:
            for bb in pool:
                if bb.charpoly is not None and point_in_segment(bb.branch.segment, point):
                    if bb.charpoly.evaluate(point).coeffs != _specialized_charpoly(bb, point).coeffs:
                        charpoly_mismatch.append(str(point))
        out[name] = {
            "branches": len(pool),
            "partition_violations": rep.partition_violations,
            "basis_mismatches": rep.basis_mismatches,
            "lc_violations": rep.lc_violations,
            "charpoly_mismatches": charpoly_mismatch,
        }
        ok = ok and rep.ok and not charpoly_mismatch
    out["ok"] = ok
    return out
