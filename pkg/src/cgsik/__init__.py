"""Inverse kinematics of the EV3 arm through a precomputed comprehensive
Groebner system and Hermite real root counting."""

from .kinematics import IKTarget, JointAngles, fk_numeric
from .pipeline import PreprocessConfig, SolverBundle, preprocess, solve

__version__ = "0.1.0"

__all__ = ["IKTarget", "JointAngles", "fk_numeric", "PreprocessConfig", "SolverBundle", "preprocess", "solve"]
