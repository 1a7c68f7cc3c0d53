"""Parametrizations X(q, v), tangents, the causal weight W and the H = 0 check.

Each non-constant family is

    X(q, v) = centre(q) + sqrt(q) c(v)

with ``centre = (-m a, z)`` for spacelike planes and ``(x, m a)`` for
timelike planes, and ``c(v)`` the unit circle of the plane:
``(cos v, sin v, 0)``, ``(0, sinh v, e cosh v)`` or ``(0, e cosh v, sinh v)``.
``e = +-1`` picks the sheet of the hyperbola.  Constant-radius families use
the foliation coordinate ``s`` in place of ``q``:

    X(s, v) = s d + r c(v),   d = (-r^2 a, 1)  or  (1, r^2 a).

All functions broadcast over array arguments ``q`` and ``v``; points carry
their coordinates on the last axis.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegeneratePoint, DomainError, SingularPoint
from .families import Profile
from .minkowski import (
    DEFAULT_LIGHTLIKE_TOL,
    CausalClass,
    IsometryL3,
    lorentz_cross,
    lorentz_inner,
)
from .quadrature import DEFAULT_TOL, closed_form, profile_integrals_grid

DEFAULT_VMAX = 3.0
DEFAULT_FD_STEP = 1e-4
DEGENERATE_BAND = 1e-4
CONST_SPAN = 2.0

CAUSAL_CODES = {CausalClass.SPACELIKE: 1, CausalClass.TIMELIKE: -1, CausalClass.LIGHTLIKE: 0}
_CODE_TO_CLASS = {v: k for k, v in CAUSAL_CODES.items()}
EXCLUDED = 2


# ---------------------------------------------------------------------------
# frames


def _circle(model: int, v, sheet: int = 1):
    """Unit circle of the foliation plane and its first derivative in v."""
    v = np.asarray(v, dtype=float)
    zero = np.zeros_like(v)
    if model == 3:
        cv, sv = np.cos(v), np.sin(v)
        return np.stack([cv, sv, zero], -1), np.stack([-sv, cv, zero], -1)
    ch, sh = np.cosh(v), np.sinh(v)
    if model == 4:
        return np.stack([zero, sh, sheet * ch], -1), np.stack([zero, ch, sheet * sh], -1)
    return np.stack([zero, sheet * ch, sh], -1), np.stack([zero, sheet * sh, ch], -1)


def _centre(profile: Profile, z, m):
    a1, a2 = profile.a
    z, m = np.asarray(z, dtype=float), np.asarray(m, dtype=float)
    if profile.model == 3:
        return np.stack([-m * a1, -m * a2, z], -1)
    return np.stack([z, m * a1, m * a2], -1)


def _const_direction(profile: Profile) -> np.ndarray:
    # r^2 a is a unit vector of the plane; divide by its norm rather than squaring r
    a1, a2 = profile.a
    if profile.model == 3:
        n = math.hypot(a1, a2)
        return np.array([-a1 / n, -a2 / n, 1.0])
    n = math.sqrt(abs(a1 * a1 - a2 * a2))
    return np.array([1.0, a1 / n, a2 / n])


def profile_values(profile: Profile, q, tol: float = DEFAULT_TOL, method: str = "auto"):
    """``(z, m)`` on an array of q: closed forms when available, else quadrature."""
    q = np.asarray(q, dtype=float)
    flat = q.ravel()
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    res = None
    if method != "quadrature":
        profile.check(flat)
        res = closed_form(profile, flat) if flat.size else (flat, flat)
        if res is None and method == "closed":
            raise DomainError(f"no closed form for {profile.selector} at lambda={profile.lam}")
    if res is None:
        uniq, inv = np.unique(flat, return_inverse=True)
        z, m, _, _ = profile_integrals_grid(profile, uniq, tol)
        res = (z[inv], m[inv])
    return res[0].reshape(q.shape), res[1].reshape(q.shape)


def parametrize(profile: Profile, q, v, sheet: int = 1, tol: float = DEFAULT_TOL, method: str = "auto"):
    """The point X(q, v) of the surface."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    q, v = np.broadcast_arrays(q, v)
    circ, _ = _circle(profile.model, v, sheet)
    if profile.radius is not None:
        return q[..., None] * _const_direction(profile) + profile.radius * circ
    z, m = profile_values(profile, q, tol, method)
    return _centre(profile, z, m) + np.sqrt(q)[..., None] * circ


def centre_curve(profile: Profile, q, tol: float = DEFAULT_TOL):
    """Centres of the foliating circles."""
    q = np.asarray(q, dtype=float)
    if profile.radius is not None:
        return q[..., None] * _const_direction(profile)
    z, m = profile_values(profile, q, tol)
    return _centre(profile, z, m)


def tangents(profile: Profile, q, v, sheet: int = 1):
    """Analytic ``(X_q, X_v)``; z' and m' are the profile integrands."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    q, v = np.broadcast_arrays(q, v)
    circ, dcirc = _circle(profile.model, v, sheet)
    if profile.radius is not None:
        return np.broadcast_to(_const_direction(profile), circ.shape).copy(), profile.radius * dcirc
    if not np.all(profile.interior(q)):
        raise DomainError("tangents need q in the open interior of the profile domain")
    c3, c2, c1 = profile.coeffs
    zp = 0.5 / np.sqrt(q * (c1 + q * (c2 + q * c3)))
    rq = np.sqrt(q)
    Xq = _centre(profile, zp, q * zp) + circ / (2.0 * rq)[..., None]
    Xv = rq[..., None] * dcirc
    return Xq, Xv


def metric(Xq, Xv):
    """``(g11, g12, g22)`` of the induced first fundamental form."""
    return lorentz_inner(Xq, Xq), lorentz_inner(Xq, Xv), lorentz_inner(Xv, Xv)


def metric_W(profile: Profile, q, v, sheet: int = 1):
    """``W = g11 g22 - g12^2`` from the tangents, with the scale ``|X_q|^2 |X_v|^2`` (Euclidean norms)."""
    Xq, Xv = tangents(profile, q, v, sheet)
    g11, g12, g22 = metric(Xq, Xv)
    return g11 * g22 - g12**2, np.sum(Xq * Xq, -1) * np.sum(Xv * Xv, -1)


def _closed_W(profile: Profile, q, v):
    """Closed-form W (sheet +1); the spacelike-plane family uses its sign factor."""
    sel, lam = profile.selector, profile.lam
    q, v = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(v, dtype=float))
    if sel == "s3":
        cv = np.cos(v)
        rD = np.sqrt(q * q + lam * q + 1.0)
        return (1.0 + cv * cv) * q - 2.0 * cv * rD + lam
    if sel in ("s3-rot", "t4-rot", "t5-rot"):
        E = lam * q + (-1.0 if sel == "t5-rot" else 1.0)
        sign = 1.0 if sel == "s3-rot" else -1.0
        return sign * lam * q / (4.0 * E) + 0.0 * v
    if sel == "t4-a10":
        sh = np.sinh(v)
        D = -q * q + lam * q + 1.0
        return q * (q - q * sh * sh + 2.0 * sh * np.sqrt(D) - lam) / (4.0 * D)
    if sel in ("t4-a01", "t5-a10"):
        ch = np.cosh(v)
        D = q * q + lam * q + (1.0 if sel == "t4-a01" else -1.0)
        return -q * ((1.0 + ch * ch) * q + 2.0 * ch * np.sqrt(D) + lam) / (4.0 * D)
    if sel == "t5-a01":
        sh = np.sinh(v)
        D = -q * q + lam * q - 1.0
        return -q * ((sh * sh - 1.0) * q - 2.0 * sh * np.sqrt(D) + lam) / (4.0 * D)
    if sel in ("t4-a11", "t5-a11"):
        E = lam * q + (1.0 if sel == "t4-a11" else -1.0)
        ev = np.exp(-v)
        return -q * (lam + 2.0 * ev * np.sqrt(E) + q * ev * ev) / (4.0 * E)
    # constant radius: g11 = 0 along the null ruling direction, so W = -g12^2
    _, g12, _ = metric(*tangents(profile, q, v))
    return -(g12**2)


def weight_W(profile: Profile, q, v):
    """The explicit expression whose sign is the causal character at X(q, v).

    For spacelike planes with ``a != 0`` this is the factor
    ``(1 + cos^2 v) q - 2 cos v sqrt(q^2 + lam q + 1) + lam`` of W
    (W itself is ``q/(4 D)`` times it); for the other families it is W.
    """
    q = np.asarray(q, dtype=float)
    if profile.radius is None and not np.all(profile.interior(q)):
        raise DomainError("W is evaluated in the open interior of the profile domain")
    out = _closed_W(profile, q, v)
    return out if np.ndim(out) else float(out)


def weight_scale(profile: Profile, q, v, sheet: int = 1):
    """Magnitude against which W is compared when deciding lightlikeness."""
    if profile.selector == "s3" and sheet == 1:
        q, v = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(v, dtype=float))
        cv = np.cos(v)
        return (1.0 + cv * cv) * q + 2.0 * np.abs(cv) * np.sqrt(q * q + profile.lam * q + 1.0) + abs(profile.lam)
    return metric_W(profile, q, v, sheet)[1]


def classify_W(W, scale, band: float = DEFAULT_LIGHTLIKE_TOL):
    """Integer causal codes: 1 spacelike, -1 timelike, 0 lightlike."""
    W = np.asarray(W, dtype=float)
    return np.where(np.abs(W) <= band * np.asarray(scale), 0, np.sign(W)).astype(int)


# ---------------------------------------------------------------------------
# grids and patches


def default_q_grid(profile: Profile, n: int, span: float | None = None) -> np.ndarray:
    """Interior grid, uniform in t = sqrt(q) (foliation coordinate s for constant radii)."""
    if n < 2:
        raise ValueError("grid sizes must be >= 2")
    if profile.radius is not None:
        s = CONST_SPAN if span is None else span
        return np.linspace(-s, s, n)
    t_lo = math.sqrt(profile.q_lo)
    if math.isfinite(profile.q_hi):
        t_hi = math.sqrt(profile.q_hi)
    else:
        t_hi = t_lo + (4.0 if span is None else span)
    t = t_lo + (t_hi - t_lo) * np.arange(1, n + 1) / (n + 1)
    return t * t


def default_v_grid(profile: Profile, n: int, v_max: float = DEFAULT_VMAX) -> np.ndarray:
    """[0, 2 pi) for Euclidean circles, [-v_max, v_max] for hyperbolas."""
    if n < 2:
        raise ValueError("grid sizes must be >= 2")
    if profile.model == 3:
        return 2.0 * math.pi * np.arange(n) / n
    return np.linspace(-v_max, v_max, n)


@dataclass(frozen=True)
class SurfaceVertex:
    position: np.ndarray
    q: float
    v: float
    W: float
    causal: CausalClass | None


@dataclass(frozen=True, eq=False)
class SurfacePatch:
    """Grid of vertices with causal data.

    ``positions`` are already mapped by ``transform``; ``W`` and the causal
    codes are intrinsic and therefore shared by all rigid copies.
    """

    profile: Profile
    q_grid: np.ndarray
    v_grid: np.ndarray
    positions: np.ndarray
    W: np.ndarray
    scale: np.ndarray
    codes: np.ndarray
    sheet: int = 1
    transform: IsometryL3 = field(default_factory=IsometryL3.identity)
    band: float = DEFAULT_LIGHTLIKE_TOL

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.q_grid), len(self.v_grid))

    @property
    def excluded(self) -> np.ndarray:
        return self.codes == EXCLUDED

    @property
    def census(self) -> dict[str, int]:
        return {
            "spacelike": int(np.count_nonzero(self.codes == 1)),
            "timelike": int(np.count_nonzero(self.codes == -1)),
            "lightlike": int(np.count_nonzero(self.codes == 0)),
            "excluded": int(np.count_nonzero(self.codes == EXCLUDED)),
        }

    def classes(self) -> set[CausalClass]:
        return {_CODE_TO_CLASS[c] for c in np.unique(self.codes) if c != EXCLUDED}

    def vertex(self, i: int, j: int) -> SurfaceVertex:
        code = int(self.codes[i, j])
        return SurfaceVertex(
            self.positions[i, j].copy(),
            float(self.q_grid[i]),
            float(self.v_grid[j]),
            float(self.W[i, j]),
            _CODE_TO_CLASS.get(code),
        )

    def moved(self, g: IsometryL3) -> "SurfacePatch":
        """The same patch after the rigid motion ``g``."""
        pos = self.positions @ g.linear.T + g.translation
        return _replace(self, positions=pos, transform=g.compose(self.transform))


def _replace(patch: SurfacePatch, **kw) -> SurfacePatch:
    from dataclasses import replace

    return replace(patch, **kw)


def thread_count() -> int:
    """Worker threads for row-parallel evaluation (``LRF_THREADS``, 0 = auto)."""
    raw = os.environ.get("LRF_THREADS", "1").strip() or "1"
    n = int(raw)
    if n < 0:
        raise ValueError("LRF_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _rows_W(profile, q_rows, v_grid, sheet):
    qq, vv = np.meshgrid(q_rows, v_grid, indexing="ij")
    if sheet == 1:
        W = _closed_W(profile, qq, vv)
        scale = weight_scale(profile, qq, vv)
    else:
        W, scale = metric_W(profile, qq, vv, sheet)
    return W, scale


def causal_map(
    profile: Profile,
    q_grid,
    v_grid,
    band: float = DEFAULT_LIGHTLIKE_TOL,
    sheet: int = 1,
    tol: float = DEFAULT_TOL,
    threads: int | None = None,
) -> SurfacePatch:
    """Evaluate positions, W and causal tags on the grid.

    Rows with q outside the open domain are excluded (their vertices get the
    ``EXCLUDED`` code and NaN positions) instead of aborting the whole grid.
    """
    q_grid = np.asarray(q_grid, dtype=float)
    v_grid = np.asarray(v_grid, dtype=float)
    for g in (q_grid, v_grid):
        if g.ndim != 1 or g.size < 2 or np.any(np.diff(g) <= 0):
            raise ValueError("grids must be strictly increasing with at least 2 entries")
    nq, nv = q_grid.size, v_grid.size
    ok = np.ones(nq, bool) if profile.radius is not None else np.asarray(profile.interior(q_grid))
    positions = np.full((nq, nv, 3), np.nan)
    W = np.full((nq, nv), np.nan)
    scale = np.full((nq, nv), np.nan)
    codes = np.full((nq, nv), EXCLUDED, dtype=int)
    idx = np.flatnonzero(ok)
    if idx.size:
        qs = q_grid[idx]
        positions[idx] = parametrize(profile, qs[:, None], v_grid[None, :], sheet, tol)
        n_threads = thread_count() if threads is None else max(1, threads)
        chunks = [c for c in np.array_split(np.arange(idx.size), n_threads) if c.size]
        if len(chunks) > 1:
            with ThreadPoolExecutor(len(chunks)) as pool:
                parts = list(pool.map(lambda c: _rows_W(profile, qs[c], v_grid, sheet), chunks))
        else:
            parts = [_rows_W(profile, qs, v_grid, sheet)]
        W[idx] = np.concatenate([p[0] for p in parts])
        scale[idx] = np.concatenate([p[1] for p in parts])
        codes[idx] = classify_W(W[idx], scale[idx], band)
    return SurfacePatch(profile, q_grid, v_grid, positions, W, scale, codes, sheet, band=band)


# ---------------------------------------------------------------------------
# symmetry


@dataclass(frozen=True)
class MirrorSymmetry:
    """``X(q, v', sheet') = linear X(q, v, sheet)`` with ``v' = -v`` or ``v``."""

    linear: np.ndarray
    flip_v: bool
    swap_sheet: bool


def mirror_symmetry(profile: Profile) -> MirrorSymmetry | None:
    """Reflection in the plane of the centres, when it is an isometry mapping the surface to itself."""
    a1, a2 = profile.a
    sec = profile.model
    diag = np.diag
    if sec == 3:
        if a2 == 0.0:
            return MirrorSymmetry(diag([1.0, -1.0, 1.0]), True, False)
        return None
    if a1 != 0.0 and a2 != 0.0:
        # the centres span a lightlike plane; reflecting in it is not an isometry
        return None
    if sec == 4:
        if a1 == 0.0:
            return MirrorSymmetry(diag([1.0, -1.0, 1.0]), True, False)
        return MirrorSymmetry(diag([1.0, 1.0, -1.0]), False, True)
    if a2 == 0.0:
        return MirrorSymmetry(diag([1.0, 1.0, -1.0]), True, False)
    return MirrorSymmetry(diag([1.0, -1.0, 1.0]), False, True)


# ---------------------------------------------------------------------------
# lightlike loci


@dataclass(frozen=True)
class LightlikeCurve:
    """A curve ``q -> X(q, v(q))`` of lightlike points.

    ``point``/``direction`` are set when the curve is a straight line
    ``point + t direction`` with null direction.
    """

    label: str
    q_lo: float
    q_hi: float
    v_of_q: Callable
    point: np.ndarray | None = None
    direction: np.ndarray | None = None

    def angles(self, q):
        return self.v_of_q(np.asarray(q, dtype=float))

    def positions(self, profile: Profile, q, tol: float = DEFAULT_TOL):
        q = np.asarray(q, dtype=float)
        return parametrize(profile, q, self.angles(q), tol=tol)


def _const_v(value: float):
    return lambda q: np.full(np.shape(q), value)


def lightlike_locus(profile: Profile) -> list[LightlikeCurve]:
    """Explicit curves solving W = 0 (sheet +1); empty when there are none."""
    sel, lam = profile.selector, profile.lam
    lo, hi = profile.q_lo, profile.q_hi
    curves: list[LightlikeCurve] = []
    if profile.radius is not None:
        a1, a2 = profile.a
        d = _const_direction(profile)
        r = profile.radius
        if profile.model == 3:
            v0 = math.atan2(a2, a1)
            angles = [v0, v0 + math.pi]
        elif profile.model == 4 and abs(a1) < abs(a2):
            angles = [math.atanh(a1 / a2)]
        else:
            angles = []
        for k, v0 in enumerate(angles):
            circ, _ = _circle(profile.model, np.array(v0))
            curves.append(LightlikeCurve(f"ruling-{k}", -math.inf, math.inf, _const_v(v0), r * circ, d))
        return curves

    if sel == "s3":
        for s in (-1.0, 1.0):
            # cos v = (sqrt(D) + s)/q stays in [-1, 1] on the whole domain or nowhere
            if s < 0 and not (-2.0 <= lam <= 2.0 or lo >= 1.0):
                continue
            if s > 0 and not (lam <= -2.0 and lo >= 1.0):
                continue

            def cosv(q, s=s):
                return np.clip((np.sqrt(q * q + lam * q + 1.0) + s) / q, -1.0, 1.0)

            if lam == 2.0 and s < 0:
                curves.append(LightlikeCurve("v=0", lo, hi, _const_v(0.0), np.zeros(3), np.array([1.0, 0.0, 1.0])))
            elif lam == -2.0 and lo >= 1.0 and s > 0:
                curves.append(LightlikeCurve("v=0", lo, hi, _const_v(0.0), np.zeros(3), np.array([-1.0, 0.0, 1.0])))
            elif lam == -2.0 and hi <= 1.0:
                curves.append(LightlikeCurve("v=pi", lo, hi, _const_v(math.pi), np.zeros(3), np.array([-1.0, 0.0, 1.0])))
            else:
                tag = "+" if s > 0 else "-"
                curves.append(LightlikeCurve(f"cos{tag}", lo, hi, lambda q, f=cosv: np.arccos(f(q))))
                curves.append(LightlikeCurve(f"cos{tag}'", lo, hi, lambda q, f=cosv: 2 * math.pi - np.arccos(f(q))))
        return curves
    if sel == "t4-a10":
        for s in (-1.0, 1.0):
            curves.append(LightlikeCurve(
                f"sinh{'+' if s > 0 else '-'}", lo, hi,
                lambda q, s=s: np.arcsinh((np.sqrt(-q * q + lam * q + 1.0) + s) / q),
            ))
        return curves
    if sel == "t4-a01" and lam <= -2.0 and hi <= 1.0:
        def coshv(q):
            return np.maximum((1.0 - np.sqrt(q * q + lam * q + 1.0)) / q, 1.0)

        if lam == -2.0:
            return [LightlikeCurve("v=0", lo, hi, _const_v(0.0))]
        return [
            LightlikeCurve("cosh+", lo, hi, lambda q: np.arccosh(coshv(q))),
            LightlikeCurve("cosh-", lo, hi, lambda q: -np.arccosh(coshv(q))),
        ]
    if sel == "t4-a11" and lam < 0:
        return [LightlikeCurve("exp", lo, hi, lambda q: -np.log((1.0 - np.sqrt(1.0 + lam * q)) / q))]
    return curves


def locus_angles(profile: Profile, q: float) -> list[float]:
    """v-values of the lightlike points on the circle of radius sqrt(q)."""
    return [float(c.angles(np.array(q))) for c in lightlike_locus(profile)]


# ---------------------------------------------------------------------------
# mean curvature


@dataclass(frozen=True)
class ParametricSurface:
    """A generic chart with analytic first derivatives, used for control surfaces."""

    point: Callable
    tangents: Callable
    u_range: tuple[float, float] = (-math.inf, math.inf)
    name: str = "surface"


def plane_control() -> ParametricSurface:
    return ParametricSurface(
        lambda u, v: np.stack(np.broadcast_arrays(u, v, np.zeros_like(u)), -1),
        lambda u, v: (
            np.broadcast_to([1.0, 0.0, 0.0], np.broadcast(u, v).shape + (3,)),
            np.broadcast_to([0.0, 1.0, 0.0], np.broadcast(u, v).shape + (3,)),
        ),
        name="plane",
    )


def sphere_control() -> ParametricSurface:
    """Euclidean unit sphere; its Lorentzian mean curvature does not vanish."""

    def point(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return np.stack([np.sin(u) * np.cos(v), np.sin(u) * np.sin(v), np.cos(u)], -1)

    def tang(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        Xu = np.stack([np.cos(u) * np.cos(v), np.cos(u) * np.sin(v), -np.sin(u)], -1)
        Xv = np.stack([-np.sin(u) * np.sin(v), np.sin(u) * np.cos(v), np.zeros_like(u)], -1)
        return Xu, Xv

    return ParametricSurface(point, tang, (0.0, math.pi), "sphere")


def _chart(surface, sheet: int, transform: IsometryL3 | None):
    if isinstance(surface, ParametricSurface):
        tang, rng = surface.tangents, surface.u_range
    else:
        def tang(q, v):
            return tangents(surface, q, v, sheet)

        rng = (surface.q_lo, surface.q_hi) if surface.radius is None else (-math.inf, math.inf)
    if transform is None:
        return tang, rng
    lin = transform.linear

    def moved(q, v):
        Xq, Xv = tang(q, v)
        return Xq @ lin.T, Xv @ lin.T

    return moved, rng


@dataclass(frozen=True)
class CurvatureSample:
    value: np.ndarray  # normalised numerator (NaN at skipped points)
    W: np.ndarray
    skipped: int

    @property
    def max_abs(self) -> float:
        vals = np.abs(self.value[np.isfinite(self.value)])
        return float(vals.max()) if vals.size else 0.0


def mean_curvature_grid(
    surface,
    q,
    v,
    h: float = DEFAULT_FD_STEP,
    sheet: int = 1,
    transform: IsometryL3 | None = None,
    band: float = DEGENERATE_BAND,
) -> CurvatureSample:
    """Normalised ``h22 g11 - 2 h12 g12 + h11 g22`` on broadcast (q, v) arrays.

    ``h_ij = <X_ij, n>`` with ``n = X_q x X_v``; the second derivatives are
    fourth-order central differences of the analytic tangents.  Points with
    ``|W| <= band (|g11 g22| + g12^2)`` are degenerate and skipped (NaN).
    """
    tang, (lo, hi) = _chart(surface, sheet, transform)
    q, v = np.broadcast_arrays(np.asarray(q, float), np.asarray(v, float))
    # relative step near a finite end of the domain, where the tangents blow up
    room = np.minimum(q - lo, hi - q)
    hq = h * np.minimum(1.0 + np.abs(q), 0.5 * room)
    Xq, Xv = tang(q, v)
    # fourth-order central differences of the analytic tangents
    wq = hq[..., None]
    Dq = [tang(q + k * hq, v) for k in (2, 1, -1, -2)]
    Dv = [tang(q, v + k * h) for k in (2, 1, -1, -2)]

    def diff(vals, i, step):
        f2, f1, m1, m2 = (d[i] for d in vals)
        return (-f2 + 8.0 * f1 - 8.0 * m1 + m2) / (12.0 * step)

    Xqq = diff(Dq, 0, wq)
    Xqv = 0.5 * (diff(Dv, 0, h) + diff(Dq, 1, wq))
    Xvv = diff(Dv, 1, h)
    g11, g12, g22 = metric(Xq, Xv)
    n = lorentz_cross(Xq, Xv)
    h11, h12, h22 = lorentz_inner(Xqq, n), lorentz_inner(Xqv, n), lorentz_inner(Xvv, n)
    num = h22 * g11 - 2.0 * h12 * g12 + h11 * g22
    scale = np.abs(h22 * g11) + 2.0 * np.abs(h12 * g12) + np.abs(h11 * g22)
    # guard against cancellation in all three products (e.g. along null rulings)
    nq_, nv_ = np.linalg.norm(Xq, axis=-1), np.linalg.norm(Xv, axis=-1)
    euclid = np.linalg.norm(n, axis=-1) * (
        np.linalg.norm(Xvv, axis=-1) * nq_**2
        + 2.0 * np.linalg.norm(Xqv, axis=-1) * nq_ * nv_
        + np.linalg.norm(Xqq, axis=-1) * nv_**2
    )
    scale = np.maximum(scale, 1e-3 * euclid)
    W = g11 * g22 - g12**2
    degenerate = np.abs(W) <= band * (np.abs(g11 * g22) + g12**2)
    with np.errstate(invalid="ignore", divide="ignore"):
        # scale = 0 only when every h_ij vanishes (planes)
        value = np.where(degenerate, np.nan, np.where(scale == 0, 0.0, num / scale))
    return CurvatureSample(value, W, int(np.count_nonzero(degenerate)))


def mean_curvature_numerator(surface, q: float, v: float, h: float = DEFAULT_FD_STEP, sheet: int = 1) -> float:
    """Normalised mean-curvature numerator at a single non-degenerate point."""
    res = mean_curvature_grid(surface, q, v, h, sheet)
    val = float(res.value)
    if not math.isfinite(val):
        raise DegeneratePoint(f"the induced metric degenerates at (q, v) = ({q}, {v})")
    return val


def patch_mean_curvature(patch: SurfacePatch, h: float = DEFAULT_FD_STEP) -> CurvatureSample:
    """H-check on the vertices of a (possibly moved) patch."""
    ok = ~patch.excluded.any(axis=1)
    q = patch.q_grid[ok][:, None]
    v = patch.v_grid[None, :]
    return mean_curvature_grid(patch.profile, q, v, h, patch.sheet, patch.transform)


# ---------------------------------------------------------------------------
# implicit form


def _fd_grad_hess(F: Callable, p: np.ndarray, h: float):
    eye = np.eye(3)
    f0 = F(p)
    grad = np.empty(3)
    hess = np.empty((3, 3))
    for i in range(3):
        ei = h * eye[i]
        fp, fm = F(p + ei), F(p - ei)
        grad[i] = (fp - fm) / (2 * h)
        hess[i, i] = (fp - 2 * f0 + fm) / (h * h)
        for j in range(i + 1, 3):
            ej = h * eye[j]
            hess[i, j] = hess[j, i] = (
                F(p + ei + ej) - F(p + ei - ej) - F(p - ei + ej) + F(p - ei - ej)
            ) / (4 * h * h)
    return grad, hess


def implicit_zmc_residual(
    F: Callable,
    p,
    h: float = 1e-4,
    grad: Callable | None = None,
    hess: Callable | None = None,
) -> float:
    """``-<grad F, grad F> lap F + Hess F(grad F, grad F)`` over ``|grad F|^4``.

    Gradient, Laplacian and Hessian are the Lorentzian ones; the Hessian
    matrix is that of coordinate second partials.  Derivatives come from
    ``grad``/``hess`` when supplied, else from central differences.
    """
    p = np.asarray(p, dtype=float)
    if grad is None or hess is None:
        g_fd, H_fd = _fd_grad_hess(F, p, h)
    g = np.asarray(grad(p), float) if grad is not None else g_fd
    H = np.asarray(hess(p), float) if hess is not None else H_fd
    gl = g * np.array([1.0, 1.0, -1.0])
    norm = float(np.linalg.norm(gl))
    if norm < 1e-8 * (1.0 + float(np.linalg.norm(p))):
        raise SingularPoint(f"grad F vanishes at {p}")
    lap = H[0, 0] + H[1, 1] - H[2, 2]
    val = -float(lorentz_inner(gl, gl)) * lap + float(gl @ H @ gl)
    return val / norm**4
