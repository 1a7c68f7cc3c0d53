"""Linear algebra of Lorentz-Minkowski space with metric dx1^2 + dx2^2 - dx3^2.

Points and vectors are plain ``numpy`` arrays whose last axis has length 3;
every function broadcasts over leading axes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

ETA = np.diag([1.0, 1.0, -1.0])
DEFAULT_LIGHTLIKE_TOL = 1e-9
ISOMETRY_TOL = 1e-12


class CausalClass(str, enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def as_lvec(p) -> np.ndarray:
    """Return ``p`` as a float array of trailing shape (3,), rejecting NaN/Inf."""
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1:] != (3,):
        raise ValueError(f"expected trailing dimension 3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite coordinates")
    return arr


def lorentz_inner(u, v) -> np.ndarray | float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def causal_class(v, tol: float = DEFAULT_LIGHTLIKE_TOL) -> CausalClass:
    """Causal character of a single vector.

    The vector is lightlike when ``|<v,v>| <= tol * (1 + |v|^2)`` with the
    Euclidean norm on the right; otherwise the sign of ``<v,v>`` decides.
    """
    v = as_lvec(v)
    n = float(lorentz_inner(v, v))
    if abs(n) <= tol * (1.0 + float(np.dot(v, v))):
        return CausalClass.LIGHTLIKE
    return CausalClass.SPACELIKE if n > 0 else CausalClass.TIMELIKE


def lorentz_cross(u, v) -> np.ndarray:
    """Lorentzian cross product, characterised by ``<u x v, t> = det[u v t]``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.cross(u, v)
    w[..., 2] *= -1.0
    return w


@dataclass(frozen=True)
class IsometryL3:
    """Affine rigid motion ``p -> linear @ p + translation`` of L^3."""

    linear: np.ndarray
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        lin = np.array(self.linear, dtype=float)
        t = as_lvec(self.translation).copy()
        if lin.shape != (3, 3) or not np.all(np.isfinite(lin)):
            raise ValueError("linear part must be a finite 3x3 matrix")
        defect = lin.T @ ETA @ lin - ETA
        if np.max(np.abs(defect)) > ISOMETRY_TOL:
            raise ValueError(
                f"linear part does not preserve the Lorentz metric (defect {np.max(np.abs(defect)):.3e})"
            )
        lin.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "IsometryL3":
        return cls(np.eye(3))

    @classmethod
    def translation_by(cls, t) -> "IsometryL3":
        return cls(np.eye(3), t)

    @classmethod
    def rotation_x3(cls, angle: float) -> "IsometryL3":
        """Euclidean rotation about the (timelike) x3-axis."""
        c, s = np.cos(angle), np.sin(angle)
        return cls(np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]))

    @classmethod
    def boost_x1(cls, rapidity: float) -> "IsometryL3":
        """Hyperbolic rotation of the x2x3-plane, fixing the x1-axis."""
        ch, sh = np.cosh(rapidity), np.sinh(rapidity)
        return cls(np.array([[1.0, 0.0, 0.0], [0.0, ch, sh], [0.0, sh, ch]]))

    @classmethod
    def half_turn_about_line(cls, point, direction_axis: int = 1) -> "IsometryL3":
        """Rotation by pi about the line through ``point`` parallel to a spacelike axis.

        Only coordinate axes 0 and 1 are supported; the linear part is the
        diagonal matrix with +1 on the axis and -1 elsewhere.
        """
        if direction_axis not in (0, 1):
            raise ValueError("half turns are only defined about the x1 or x2 axis")
        d = -np.ones(3)
        d[direction_axis] = 1.0
        lin = np.diag(d)
        p = as_lvec(point)
        return cls(lin, p - lin @ p)

    def __call__(self, p) -> np.ndarray:
        return apply_isometry(self, p)

    def compose(self, other: "IsometryL3") -> "IsometryL3":
        """``self o other``."""
        return IsometryL3(self.linear @ other.linear, self.linear @ other.translation + self.translation)


def apply_isometry(g: IsometryL3, p) -> np.ndarray:
    if not isinstance(g, IsometryL3):
        raise TypeError("expected an IsometryL3")
    # instances may have been built around __post_init__ (e.g. via object.__new__)
    defect = g.linear.T @ ETA @ g.linear - ETA
    if np.max(np.abs(defect)) > ISOMETRY_TOL:
        raise ValueError("isometry does not preserve the Lorentz metric")
    p = np.asarray(p, dtype=float)
    return p @ g.linear.T + g.translation
