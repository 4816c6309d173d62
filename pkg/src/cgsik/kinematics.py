"""EV3 manipulator model: DH table, forward kinematics and the IK polynomial
systems derived from it.

The joint frames follow the modified DH convention
``T_i = Rot_x(alpha_i) Trans_x(a_i) Rot_z(theta_i) Trans_z(d_i)``.  Every fixed
angle is a multiple of pi/4 (stored as an integer count of eighth turns), so
all symbolic entries stay in Q(sqrt 2).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

import numpy as np

from .exactnum import QS2, ZERO, ONE, to_rational
from .polyring import Poly, PolyRing

DECISION_VARS = ("c1", "s1", "c4", "s4", "c7", "s7")
PARAMS = ("x", "y", "z")
IK_RING = PolyRing(DECISION_VARS + PARAMS, nparams=3)
AXIS_RING = PolyRing(("c4", "s4", "c7", "s7", "z"), nparams=1)

FK_TOL = 1e-9  # mm, matrix product vs closed form

_H = QS2(0, Fraction(1, 2))  # sqrt(2)/2
_COS8 = [ONE, _H, ZERO, -_H, -ONE, -_H, ZERO, _H]


def cos_eighth(k: int) -> QS2:
    return _COS8[k % 8]


def sin_eighth(k: int) -> QS2:
    return _COS8[(k - 2) % 8]


@dataclass(frozen=True)
class DHRow:
    a: QS2
    alpha: int  # eighth turns
    d: QS2
    theta: Union[int, str]  # eighth turns, or the name of a free joint


@dataclass(frozen=True)
class JointAngles:
    theta1: float
    theta4: float
    theta7: float

    def normalized(self) -> "JointAngles":
        return JointAngles(*(wrap_angle(t) for t in (self.theta1, self.theta4, self.theta7)))

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.theta1, self.theta4, self.theta7)


@dataclass(frozen=True)
class IKTarget:
    x: object
    y: object
    z: object

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))

    def as_tuple(self):
        return (self.x, self.y, self.z)

    def as_floats(self) -> Tuple[float, float, float]:
        return tuple(float(Fraction(int(v.numerator), int(v.denominator))) for v in self.as_tuple())

    def on_axis(self) -> bool:
        return self.x == 0 and self.y == 0

    def to_json(self) -> dict:
        from .exactnum import format_rational
        return {k: format_rational(v) for k, v in zip("xyz", self.as_tuple())}


def wrap_angle(t: float) -> float:
    """Map to (-pi, pi]."""
    t = math.remainder(t, 2 * math.pi)
    if t <= -math.pi:
        t += 2 * math.pi
    return t


EV3_TABLE: Tuple[DHRow, ...] = (
    DHRow(QS2(0), 0, QS2(80), "theta1"),
    DHRow(QS2(0), 2, QS2(0), 1),
    DHRow(QS2(88), 0, QS2(0), 1),
    DHRow(QS2(24), 0, QS2(0), "theta4"),
    DHRow(QS2(96), 0, QS2(0), -2),
    DHRow(QS2(16), 0, QS2(0), 2),
    DHRow(QS2(40), 0, QS2(0), "theta7"),
    DHRow(QS2(112), 0, QS2(0), 0),
)

_JOINT_VARS = {"theta1": ("c1", "s1"), "theta4": ("c4", "s4"), "theta7": ("c7", "s7")}


def table_fingerprint(table: Sequence[DHRow] = EV3_TABLE) -> str:
    lines = [f"{r.a}|{r.alpha}|{r.d}|{r.theta}" for r in table]
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()[:16]


def _link_matrix(row: DHRow, ring: PolyRing):
    """Symbolic 3x4 upper block of the modified-DH link transform."""
    ca, sa = cos_eighth(row.alpha), sin_eighth(row.alpha)
    if isinstance(row.theta, str):
        cn, sn = _JOINT_VARS[row.theta]
        ct, st = ring.gen(cn), ring.gen(sn)
    else:
        ct, st = ring.const(cos_eighth(row.theta)), ring.const(sin_eighth(row.theta))
    k = ring.const
    return [
        [ct, -st, k(0), k(row.a)],
        [st * ca, ct * ca, k(-sa), k(-sa * row.d)],
        [st * sa, ct * sa, k(ca), k(ca * row.d)],
    ]


def _compose(A, B, ring):
    """Product of two affine 3x4 blocks (implicit last row 0 0 0 1)."""
    out = []
    for i in range(3):
        row = []
        for j in range(4):
            acc = ring.zero()
            for k in range(3):
                acc = acc + A[i][k] * B[k][j]
            if j == 3:
                acc = acc + A[i][3]
            row.append(acc)
        out.append(row)
    return out


def symbolic_position(table: Sequence[DHRow] = EV3_TABLE, ring: PolyRing = IK_RING) -> Tuple[Poly, Poly, Poly]:
    """End-effector position as polynomials in the joint cosines/sines."""
    T = _link_matrix(table[0], ring)
    for row in table[1:]:
        T = _compose(T, _link_matrix(row, ring), ring)
    return T[0][3], T[1][3], T[2][3]


_FK_POLYS = None


def _fk_polys():
    global _FK_POLYS
    if _FK_POLYS is None:
        _FK_POLYS = symbolic_position()
    return _FK_POLYS


def _numeric_product(angles: JointAngles, table: Sequence[DHRow] = EV3_TABLE) -> np.ndarray:
    joint = {"theta1": angles.theta1, "theta4": angles.theta4, "theta7": angles.theta7}
    T = np.eye(4)
    for row in table:
        al = row.alpha * math.pi / 4
        th = joint[row.theta] if isinstance(row.theta, str) else row.theta * math.pi / 4
        a, d = row.a.to_float(), row.d.to_float()
        ca, sa, ct, st = math.cos(al), math.sin(al), math.cos(th), math.sin(th)
        link = np.array([
            [ct, -st, 0.0, a],
            [st * ca, ct * ca, -sa, -sa * d],
            [st * sa, ct * sa, ca, ca * d],
            [0.0, 0.0, 0.0, 1.0],
        ])
        T = T @ link
    return T[:3, 3]


def fk_closed_form(angles: JointAngles) -> Tuple[float, float, float]:
    t1, t4, t7 = angles.as_tuple()
    point = [math.cos(t1), math.sin(t1), math.cos(t4), math.sin(t4), math.cos(t7), math.sin(t7), 0.0, 0.0, 0.0]
    return tuple(p.evaluate_float(point) for p in _fk_polys())


def fk_numeric(angles: JointAngles | Sequence[float]) -> Tuple[float, float, float]:
    """End-effector position (mm); the closed form is cross-checked against
    the numeric product of link matrices."""
    if not isinstance(angles, JointAngles):
        angles = JointAngles(*angles)
    closed = fk_closed_form(angles)
    product = _numeric_product(angles)
    err = max(abs(a - b) for a, b in zip(closed, product))
    if err > FK_TOL:
        raise RuntimeError(f"forward kinematics mismatch {err:.3e} mm at {angles}")
    return closed


def build_ik_system(table: Sequence[DHRow] = EV3_TABLE) -> List[Poly]:
    """f1..f6: position equations ``param - fk = 0`` and the three circle relations."""
    ring = IK_RING
    px, py, pz = symbolic_position(table, ring)
    x, y, z = ring.gen("x"), ring.gen("y"), ring.gen("z")
    c1, s1, c4, s4, c7, s7 = (ring.gen(n) for n in DECISION_VARS)
    return [
        x - px,
        y - py,
        z - pz,
        s1 ** 2 + c1 ** 2 - 1,
        s4 ** 2 + c4 ** 2 - 1,
        s7 ** 2 + c7 ** 2 - 1,
    ]


def build_axis_system(table: Sequence[DHRow] = EV3_TABLE) -> List[Poly]:
    """h1..h4: the IK system on the z-axis with theta1 pinned to 0.

    Obtained by substituting c1=1, s1=0, x=y=0: f2 vanishes, f4 is dropped,
    and f1, -f3, f5, f6 become h1..h4.
    """
    F = build_ik_system(table)
    idx = {n: i for i, n in enumerate(IK_RING.names)}
    sub = {idx["c1"]: 1, idx["s1"]: 0, idx["x"]: 0, idx["y"]: 0}
    f1, f2, f3, _f4, f5, f6 = (f.substitute(sub, AXIS_RING) for f in F)
    if not f2.is_zero():
        raise RuntimeError("f2 does not vanish on the axis")
    return [f1, -f3, f5, f6]


def rationalize(v: float, max_den: int = 99) -> Fraction:
    return Fraction(v).limit_denominator(max_den)


def sample_targets(n: int, seed: int, axis: bool = False, max_den: int = 99,
                   axis_clearance: float = 1.0) -> List[IKTarget]:
    """Random reachable targets with coordinates rounded to rationals with
    denominator <= ``max_den``.

    Targets within ``axis_clearance`` mm of the z-axis are redrawn unless
    ``axis`` is set, in which case theta1 is irrelevant and x = y = 0.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    out: List[IKTarget] = []
    while len(out) < n:
        t = rng.uniform(-math.pi, math.pi, size=3)
        if axis:
            # theta1 only rotates about z; pick the arm pose that puts the tip on the axis
            pose = _axis_pose(t[1], rng)
            if pose is None:
                continue
            z = fk_numeric(pose)[2]
            out.append(IKTarget(0, 0, rationalize(z, max_den)))
            continue
        x, y, z = fk_numeric(JointAngles(*t))
        if math.hypot(x, y) < axis_clearance:
            continue
        out.append(IKTarget(rationalize(x, max_den), rationalize(y, max_den), rationalize(z, max_den)))
    return out


def _axis_pose(theta4: float, rng) -> JointAngles | None:
    """A pose with theta1=0 whose tip lies on the z-axis, or None.

    With theta1 = 0 the x coordinate is A cos t7 + B sin t7 + C (the forward
    kinematics is linear in each joint's cosine and sine); A, B, C are read
    off three evaluations and the equation x = 0 is solved for t7.
    """
    x0 = fk_numeric(JointAngles(0.0, theta4, 0.0))[0]
    x1 = fk_numeric(JointAngles(0.0, theta4, math.pi / 2))[0]
    x2 = fk_numeric(JointAngles(0.0, theta4, math.pi))[0]
    c = (x0 + x2) / 2
    a = (x0 - x2) / 2
    b = x1 - c
    r = math.hypot(a, b)
    if r == 0 or abs(c) > r:
        return None
    phi = math.atan2(b, a)
    delta = math.acos(-c / r)
    t7 = phi + delta if rng.uniform() < 0.5 else phi - delta
    return JointAngles(0.0, theta4, wrap_angle(t7))
