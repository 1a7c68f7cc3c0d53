"""Profile integrals z(q), m(q), their limits as q -> inf, and closed forms.

The integrands ``1/(2 sqrt P)`` and ``u/(2 sqrt P)`` have square-root
singularities at the zeros of ``P`` and decay like ``u^(-3/2)`` at infinity.
Every piece of the q-axis is therefore integrated in a variable in which the
integrand is smooth:

* ``u = L + s^2`` next to a simple zero ``L`` (including ``u = 0``),
* ``u = R - s^2`` next to a simple zero ``R`` on the right,
* ``u = 1/t^2`` towards infinity when ``P`` is cubic,
* ``u = B exp(w)`` towards infinity when ``P`` is quadratic,

and the smooth pieces go through a vectorised adaptive Gauss-Kronrod (7/15)
rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, Divergent, ToleranceNotMet
from .families import Profile

DEFAULT_TOL = 1e-10
MIN_TOL = 1e-13
DEFAULT_CUTOFF = 1e8
MAX_PANELS = 20000

# Kronrod 15-point nodes on [0, 1] (symmetric); the odd-indexed ones are the Gauss 7 nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def gauss_kronrod_panels(f: Callable, a: np.ndarray, b: np.ndarray):
    """Kronrod estimate and |Kronrod - Gauss| on each panel ``[a_i, b_i]``."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = f(x)
    k = half * (fx @ KRONROD_WEIGHTS)
    g = half * (fx @ GAUSS_WEIGHTS)
    # |K - G| is the error of the Gauss rule and grossly overstates that of
    # Kronrod; keep a floor at the rounding level of the panel.
    roundoff = 10 * np.finfo(float).eps * np.abs(half) * (np.abs(fx) @ KRONROD_WEIGHTS)
    return k, np.maximum(np.abs(k - g), roundoff)


def integrate_breakpoints(f: Callable, points, tol: float, max_panels: int = MAX_PANELS):
    """Integrate ``f`` over consecutive intervals of the sorted ``points``.

    Returns ``(values, error)`` where ``values[i]`` is the integral over
    ``[points[i], points[i+1]]`` and ``error`` bounds the sum of absolute
    errors over all intervals.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size < 2:
        return np.zeros(0), 0.0
    total_width = pts[-1] - pts[0]
    if total_width <= 0:
        return np.zeros(pts.size - 1), 0.0
    a, b = pts[:-1].copy(), pts[1:].copy()
    owner = np.arange(a.size)
    values = np.zeros(a.size)
    err_total = 0.0
    n_panels = a.size
    while a.size:
        k, err = gauss_kronrod_panels(f, a, b)
        if not np.all(np.isfinite(k)):
            raise ToleranceNotMet("non-finite integrand values")
        share = tol * (b - a) / total_width
        # panels already at the rounding floor cannot improve by splitting
        floor = 10 * np.finfo(float).eps * 0.5 * (b - a) * np.abs(k / (0.5 * (b - a)))
        done = (err <= share) | (err <= 2 * floor) | ((b - a) <= 1e-14 * max(1.0, abs(total_width)))
        np.add.at(values, owner[done], k[done])
        err_total += float(err[done].sum())
        a, b, owner = a[~done], b[~done], owner[~done]
        if a.size:
            n_panels += a.size
            if n_panels > max_panels:
                raise ToleranceNotMet(
                    f"adaptive quadrature exceeded {max_panels} panels at tol={tol:g}"
                )
            m = 0.5 * (a + b)
            a, b = np.concatenate([a, m]), np.concatenate([m, b])
            owner = np.concatenate([owner, owner])
    if err_total > tol:
        raise ToleranceNotMet(f"error estimate {err_total:.3e} exceeds tol={tol:g}")
    return values, err_total


def integrate(f: Callable, a: float, b: float, tol: float = DEFAULT_TOL):
    """Definite integral of a vectorised smooth ``f`` over ``[a, b]``."""
    if b < a:
        v, e = integrate(f, b, a, tol)
        return -v, e
    vals, err = integrate_breakpoints(f, [a, b], tol)
    return float(vals.sum()), err


def _cumulative(f: Callable, s_from: float, s_targets: np.ndarray, tol: float):
    """``int_{s_from}^{s_t} f`` for every target (targets may lie on either side)."""
    s_targets = np.asarray(s_targets, dtype=float)
    pts = np.unique(np.concatenate([[s_from], s_targets]))
    vals, err = integrate_breakpoints(f, pts, tol)
    cum = np.concatenate([[0.0], np.cumsum(vals)])
    idx = np.searchsorted(pts, s_targets)
    i0 = np.searchsorted(pts, s_from)
    return cum[idx] - cum[i0], err


# ---------------------------------------------------------------------------
# pieces of the q-axis


@dataclass(frozen=True)
class _Piece:
    """A stretch [u_start, u_end] of the q-axis together with its smoothing variable."""

    u_start: float
    u_end: float
    to_s: Callable  # u -> s
    gz: Callable  # integrand of z in s
    gm: Callable  # integrand of m (or of m - sqrt(u)) in s
    m_minus_sqrt: bool = False


def _poly(c3, c2, c1):
    return lambda u: u * (c1 + u * (c2 + u * c3))


def _pieces(profile: Profile, q_max: float) -> list[_Piece]:
    c3, c2, c1 = profile.coeffs
    P = _poly(c3, c2, c1)
    lo, hi = profile.q0, profile.q_hi
    pieces: list[_Piece] = []

    def left_root_piece(L, end):
        if L == 0.0:
            def K(u):
                return c1 + u * (c2 + u * c3)
        elif c3 == 0.0:
            def K(u):
                return c2 * u
        else:
            def K(u):
                return u * (c3 * u + c2 + c3 * L)

        def gz(s):
            return 1.0 / np.sqrt(K(L + s * s))

        def gm(s):
            u = L + s * s
            return u / np.sqrt(K(u))

        return _Piece(L, end, lambda u: np.sqrt(np.maximum(u - L, 0.0)), gz, gm)

    def right_root_piece(start, R):
        if c3 == 0.0:
            def negK(u):
                return -c2 * u
        else:
            def negK(u):
                return -u * (c3 * u + c2 + c3 * R)

        def gz(s):
            return 1.0 / np.sqrt(negK(R - s * s))

        def gm(s):
            u = R - s * s
            return u / np.sqrt(negK(u))

        return _Piece(start, R, lambda u: np.sqrt(np.maximum(R - u, 0.0)), gz, gm)

    def plain_piece(start, end):
        def gz(u):
            return 0.5 / np.sqrt(P(u))

        def gm(u):
            return 0.5 * u / np.sqrt(P(u))

        return _Piece(start, end, lambda u: np.asarray(u, dtype=float), gz, gm)

    def cubic_tail_piece(start):
        if c3 != 1.0:
            raise DomainError("unbounded cubic profiles must have leading coefficient 1")

        def G(t):
            t2 = t * t
            return 1.0 + t2 * (c2 + c1 * t2)

        def gz(t):
            return 1.0 / np.sqrt(G(t))

        def gm(t):
            t2 = t * t
            g = G(t)
            rg = np.sqrt(g)
            return -(c2 + c1 * t2) / (rg * (1.0 + rg))

        return _Piece(start, math.inf, lambda u: 1.0 / np.sqrt(u), gz, gm, m_minus_sqrt=True)

    def log_tail_piece(start):
        def gz(w):
            u = start * np.exp(w)
            return 0.5 * np.sqrt(u) / np.sqrt(c2 * u + c1)

        def gm(w):
            u = start * np.exp(w)
            return 0.5 * u * np.sqrt(u) / np.sqrt(c2 * u + c1)

        return _Piece(start, math.inf, lambda u: np.log(u / start), gz, gm)

    left_singular = profile.lo_kind in ("origin", "simple")
    if math.isfinite(hi):
        mid = 0.5 * (lo + hi)
        pieces.append(left_root_piece(lo, mid) if left_singular else plain_piece(lo, mid))
        pieces.append(right_root_piece(mid, hi) if profile.hi_kind == "simple" else plain_piece(mid, hi))
    else:
        brk = max(lo + 1.0, 2.0 * lo)
        pieces.append(left_root_piece(lo, brk) if left_singular else plain_piece(lo, brk))
        if c3 > 0:
            pieces.append(cubic_tail_piece(brk))
        else:
            pieces.append(log_tail_piece(brk))
    return pieces


@dataclass(frozen=True)
class ProfileEval:
    q: float
    z: float
    m: float
    err_z: float
    err_m: float


@dataclass(frozen=True)
class LimitData:
    z0: float
    c: float | None


def _check_tol(tol: float) -> float:
    if not tol >= MIN_TOL:
        raise ValueError(f"tolerance must be >= {MIN_TOL:g}")
    return float(tol)


def profile_integrals_grid(profile: Profile, qs, tol: float = DEFAULT_TOL):
    """Vectorised :func:`profile_integrals`.

    Returns ``(z, m, err_z, err_m)`` arrays (errors are global bounds shared
    by all entries).  Each piece is integrated once with the grid points as
    breakpoints, so a whole grid costs about as much as its largest entry.
    """
    if profile.family.constant_radius:
        raise DomainError("constant-radius profiles have no profile integrals")
    return _integrals_grid(profile, qs, _check_tol(tol))


def _integrals_grid(profile: Profile, qs, tol: float):
    qs = np.atleast_1d(np.asarray(qs, dtype=float))
    profile.check(qs)
    pieces = _pieces(profile, float(qs.max()) if qs.size else profile.q0)
    ptol = tol / (2 * len(pieces))
    z = np.full(qs.shape, profile.z_base)
    m = np.full(qs.shape, profile.m_base)
    err_z = err_m = 0.0
    for piece in pieces:
        if not np.any(qs > piece.u_start):
            break
        inside = qs > piece.u_start
        u_t = np.minimum(qs[inside], piece.u_end)
        s_from = float(piece.to_s(piece.u_start))
        s_t = piece.to_s(u_t)
        vz, ez = _cumulative(piece.gz, s_from, s_t, ptol)
        vm, em = _cumulative(piece.gm, s_from, s_t, ptol)
        # decreasing substitutions run backwards
        sign = 1.0 if (np.all(s_t >= s_from)) else -1.0
        vz, vm = sign * vz, sign * vm
        if piece.m_minus_sqrt:
            vm = vm + np.sqrt(u_t) - math.sqrt(piece.u_start)
        z[inside] += vz
        m[inside] += vm
        err_z += ez
        err_m += em
    if err_z > tol or err_m > tol:
        raise ToleranceNotMet(f"error bounds ({err_z:.2e}, {err_m:.2e}) exceed tol={tol:g}")
    return z, m, err_z, err_m


def profile_integrals(profile: Profile, q: float, tol: float = DEFAULT_TOL) -> ProfileEval:
    """z(q) and m(q) integrated from the base point ``profile.q0``."""
    z, m, ez, em = profile_integrals_grid(profile, [q], tol)
    return ProfileEval(float(q), float(z[0]), float(m[0]), ez, em)


def profile_derivatives(profile: Profile, q):
    """dz/dq and dm/dq: the profile integrands themselves."""
    c3, c2, c1 = profile.coeffs
    q = np.asarray(q, dtype=float)
    root = np.sqrt(_poly(c3, c2, c1)(q))
    return 0.5 / root, 0.5 * q / root


# ---------------------------------------------------------------------------
# improper limits


def _tail_corrections(c2: float, c1: float, cutoff: float) -> tuple[float, float]:
    """Contributions of ``[cutoff, inf)`` to z and to m - sqrt(q), two terms each."""
    tau = cutoff ** -0.5
    tz = tau - c2 * tau**3 / 6.0
    tm = -0.5 * c2 * tau + (3.0 * c2 * c2 / 8.0 - 0.5 * c1) * tau**3 / 3.0
    return tz, tm


def asymptotic_limits(profile: Profile, tol: float = DEFAULT_TOL, cutoff: float = DEFAULT_CUTOFF) -> LimitData:
    """Limits of z(q) and of m(q) - sqrt(q) at the upper end of the profile.

    Unbounded cubic profiles are integrated up to ``cutoff`` and completed by
    the two-term expansion of the tail.  Bounded profiles whose upper end is
    a simple zero return the (finite) value there, with ``c = None``.
    """
    if profile.family.constant_radius:
        raise Divergent("constant-radius surfaces are unbounded along the foliation")
    tol = _check_tol(tol)
    c3, c2, c1 = profile.coeffs
    if math.isfinite(profile.q_hi):
        if profile.hi_kind != "simple":
            raise Divergent("the profile integral diverges at a double root")
        z, _, _, _ = _integrals_grid(profile, [profile.q_hi], tol)
        return LimitData(float(z[0]), None)
    if c3 <= 0:
        raise Divergent("z(q) grows without bound (logarithmically) as q -> inf")
    if cutoff <= max(profile.q0 + 1.0, 2.0 * profile.q0):
        raise ValueError("cutoff must lie beyond the first quadrature piece")
    head, tail = _pieces(profile, cutoff)
    # up to the break point, then the tail in t = 1/sqrt(u) where m - sqrt(u)
    # is integrated directly (no cancellation against sqrt(cutoff))
    z, m, _, _ = _integrals_grid(profile, [tail.u_start], tol / 3)
    t_brk, tau = float(tail.to_s(tail.u_start)), cutoff**-0.5
    vz, _ = integrate(tail.gz, tau, t_brk, tol / 3)
    vm, _ = integrate(tail.gm, tau, t_brk, tol / 3)
    tz, tm = _tail_corrections(c2, c1, cutoff)
    return LimitData(float(z[0]) + vz + tz, float(m[0]) - math.sqrt(tail.u_start) + vm + tm)


# ---------------------------------------------------------------------------
# explicit integrals


def _closed_arrays(profile: Profile, q: np.ndarray):
    sel, lam = profile.selector, profile.lam
    r = np.sqrt(q)
    if sel in ("s3", "t4-a01") and lam == 2.0:
        z = np.arctan(r)
        return z, r - z
    if sel in ("s3", "t4-a01") and lam == -2.0:
        if profile.q_hi <= 1.0:
            z = np.arctanh(r)
            return z, -r + z
        z = 0.5 * np.log((r - 1.0) / (r + 1.0))
        return z, r + z
    if sel in ("s3-rot", "t4-rot", "t4-a11"):
        if lam == 0.0:
            return r, r**3 / 3.0
        if lam > 0:
            sl = math.sqrt(lam)
            z = np.arcsinh(sl * r) / sl
            return z, r * np.sqrt(lam * q + 1.0) / (2.0 * lam) - np.arcsinh(sl * r) / (2.0 * lam * sl)
        nl = -lam
        z = np.arcsin(np.clip(math.sqrt(nl) * r, -1.0, 1.0)) / math.sqrt(nl)
        m = r * np.sqrt(np.maximum(lam * q + 1.0, 0.0)) / (2.0 * lam) + np.arcsin(
            np.clip(-2.0 * lam * q - 1.0, -1.0, 1.0)
        ) / (4.0 * nl**1.5)
        if sel != "t4-a11":
            # rotational families are anchored at m(0) = 0
            m = m + math.pi / (8.0 * nl**1.5)
        return z, m
    if sel in ("t5-rot", "t5-a11") and lam > 0:
        sl = math.sqrt(lam)
        w = np.sqrt(np.maximum(lam * q - 1.0, 0.0))
        x = np.arccosh(np.maximum(sl * r, 1.0)) / sl
        return x, (sl * r * w + np.arcsinh(w)) / (2.0 * lam * sl)
    return None


def has_closed_form(profile: Profile) -> bool:
    if profile.family.constant_radius:
        return False
    return _closed_arrays(profile, np.array([profile.q0])) is not None


def closed_form(profile: Profile, q):
    """Explicit ``(z, m)`` (or ``(x, m)``) when the case is integrable by elementary functions.

    Returns ``None`` outside the dictionary of explicit cases.
    """
    if profile.family.constant_radius:
        return None
    qa = np.asarray(q, dtype=float)
    if not np.all(profile.contains(qa)):
        raise DomainError(f"q={q} outside the domain of the explicit parametrization")
    res = _closed_arrays(profile, np.atleast_1d(qa))
    if res is None:
        return None
    z, m = res
    if qa.ndim == 0:
        return float(z[0]), float(m[0])
    return z, m
