"""Limit line, Schwarz reflection across it and the periodic extension."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConelikePoint, NoLimitLine
from .families import LimitHigh, LimitLow, Profile, case_report
from .minkowski import IsometryL3, lorentz_inner
from .quadrature import DEFAULT_TOL, asymptotic_limits
from .surface import SurfacePatch, centre_curve

E2 = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class LimitLine:
    """The line ``point + t (0, 1, 0)`` met by the surface at its asymptotic height."""

    point: np.ndarray
    direction: np.ndarray = E2

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        if not np.array_equal(d, E2):
            raise ValueError("limit lines are parallel to e2 in the normalised frame")
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "direction", d)

    @property
    def reflection(self) -> IsometryL3:
        """Half turn about the line: ``(x1, x2, x3) -> (2 p1 - x1, x2, 2 p3 - x3)``."""
        return IsometryL3.half_turn_about_line(self.point, direction_axis=1)

    def distance(self, x) -> np.ndarray:
        """Euclidean distance of points to the line."""
        x = np.asarray(x, dtype=float)
        return np.hypot(x[..., 0] - self.point[0], x[..., 2] - self.point[2])


def detect_boundary_line(profile: Profile, tol: float = DEFAULT_TOL) -> LimitLine:
    """The line ``x1 = -c, x3 = z0`` with ``c = lim (m - sqrt q)``.

    The centres sit at ``x1 = -m``, so the circles close up on ``x1 = -c``.
    """
    rep = case_report(profile)
    if rep.limit_high is not LimitHigh.LINE_ORTHOGONAL_TO_PI:
        raise NoLimitLine(
            f"{profile.selector} at lambda={profile.lam} ({profile.branch.value} branch) "
            f"ends in {rep.limit_high.value}, not in a straight line"
        )
    lim = asymptotic_limits(profile, tol)
    return LimitLine(np.array([-lim.c, 0.0, lim.z0]))


def schwarz_reflect(patch: SurfacePatch, line: LimitLine) -> SurfacePatch:
    """Image of the patch under the half turn about ``line``; W and tags carry over."""
    return patch.moved(line.reflection)


def conelike_point(profile: Profile, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Point where the circles shrink to zero radius."""
    rep = case_report(profile)
    if rep.limit_low is not LimitLow.CONELIKE_POINT:
        raise NoConelikePoint(
            f"{profile.selector} at lambda={profile.lam} ({profile.branch.value} branch) "
            f"starts at a {rep.limit_low.value}, not at a conelike point"
        )
    return centre_curve(profile, np.array(profile.q0), tol)


def period_vector(profile: Profile, line: LimitLine, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``T = R(P) - P`` for the conelike point P and the reflection R across ``line``."""
    P = conelike_point(profile, tol)
    return line.reflection(P) - P


def periodic_extend(patch: SurfacePatch, reflected: SurfacePatch, n: int, tol: float = DEFAULT_TOL) -> list[SurfacePatch]:
    """Translates ``patch + k T`` and ``reflected + k T`` for ``k = -n..n``.

    ``reflected`` must come from :func:`schwarz_reflect` applied to ``patch``;
    the line is recovered from the relative motion between the two.  The
    list alternates original and reflected copies in increasing k.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    rel = reflected.transform.compose(_inverse(patch.transform))
    if not np.allclose(rel.linear, np.diag([-1.0, 1.0, -1.0]), atol=1e-12, rtol=0):
        raise ValueError("reflected is not a half-turn image of patch about a line parallel to e2")
    P = patch.transform(conelike_point(patch.profile, tol))
    T = rel(P) - P
    out = []
    for k in range(-n, n + 1):
        shift = IsometryL3.translation_by(k * T)
        out.append(patch.moved(shift))
        out.append(reflected.moved(shift))
    return out


def _inverse(g: IsometryL3) -> IsometryL3:
    # eta L^T eta is the inverse of a Lorentz transformation
    eta = np.diag([1.0, 1.0, -1.0])
    inv = eta @ g.linear.T @ eta
    return IsometryL3(inv, -inv @ g.translation)


def is_null(v, tol: float = 1e-12) -> bool:
    v = np.asarray(v, dtype=float)
    return abs(float(lorentz_inner(v, v))) <= tol * (1.0 + float(v @ v))

