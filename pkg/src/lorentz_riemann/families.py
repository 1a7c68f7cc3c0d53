"""Surface families, their cubic radicands and the case analysis in lambda.

A family is fixed by the causal type of the foliation planes, the type of
circle and the (normalised) vector ``a`` that drives the curve of centres.
Each non-constant family reduces to the quadrature

    z(q) = 1/2 int du / sqrt(P(u)),    m(q) = 1/2 int u du / sqrt(P(u)),

with ``P(u) = c3 u^3 + lam u^2 + c1 u``.  ``q = r^2`` is the squared radius
and ``z`` (or ``x`` for timelike planes) the foliation coordinate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .minkowski import CausalClass

LAMBDA_MAX = 1e8
DOUBLE_ROOT_TOL = 1e-12
DEFAULT_R0 = 1.5

S, T, L = CausalClass.SPACELIKE, CausalClass.TIMELIKE, CausalClass.LIGHTLIKE


class PlaneType(str, enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"


class CircleType(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    SPACELIKE_HYPERBOLA = "spacelike-hyperbola"
    TIMELIKE_HYPERBOLA = "timelike-hyperbola"


class AClass(str, enum.Enum):
    ZERO = "0"
    UNIT10 = "10"
    UNIT01 = "01"
    NULL11 = "11"

    @property
    def vector(self) -> tuple[float, float]:
        return {"0": (0.0, 0.0), "10": (1.0, 0.0), "01": (0.0, 1.0), "11": (1.0, 1.0)}[self.value]


class Branch(str, enum.Enum):
    LOW = "low"
    HIGH = "high"


class LimitLow(str, enum.Enum):
    CONELIKE_POINT = "conelike-point"
    POINT = "point"
    CIRCLE = "circle"
    HYPERBOLA = "hyperbola"
    UNBOUNDED = "unbounded"


class LimitHigh(str, enum.Enum):
    LINE_ORTHOGONAL_TO_PI = "line-orthogonal-to-pi"
    CIRCLE = "circle"
    HYPERBOLA = "hyperbola"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class FamilyId:
    plane: PlaneType
    circle: CircleType
    a_class: AClass
    constant_radius: bool = False

    def __post_init__(self):
        if self.plane is PlaneType.SPACELIKE:
            if self.circle is not CircleType.EUCLIDEAN:
                raise ValueError("spacelike planes only carry Euclidean circles")
            if self.a_class not in (AClass.ZERO, AClass.UNIT10):
                raise ValueError("spacelike-plane families normalise a to 0 or (1,0)")
        elif self.circle is CircleType.EUCLIDEAN:
            raise ValueError("timelike planes carry hyperbolas, not Euclidean circles")
        if self.constant_radius:
            if self.a_class is AClass.ZERO:
                raise ValueError("constant radii require a nonzero vector a")

    @property
    def model(self) -> int:
        """3, 4 or 5, the digit of the selector prefix (s3, t4, t5)."""
        if self.plane is PlaneType.SPACELIKE:
            return 3
        return 4 if self.circle is CircleType.SPACELIKE_HYPERBOLA else 5

    @property
    def a_vector(self) -> np.ndarray:
        return np.array(self.a_class.vector)

    @property
    def a_norm2(self) -> float:
        """Squared norm of ``a`` in the metric of the foliation plane."""
        return plane_norm2(self.model, self.a_vector)

    @property
    def is_rotational(self) -> bool:
        return self.a_class is AClass.ZERO

    @property
    def selector(self) -> str:
        for key, fam in SELECTORS.items():
            if fam == self:
                return key
        raise KeyError(self)  # pragma: no cover

    @classmethod
    def from_selector(cls, selector: str) -> "FamilyId":
        try:
            return SELECTORS[selector]
        except KeyError:
            raise DomainError(f"unknown family selector {selector!r}") from None


def plane_norm2(model: int, a) -> float:
    a = np.asarray(a, dtype=float)
    if model == 3:
        return float(a[0] ** 2 + a[1] ** 2)
    return float(a[0] ** 2 - a[1] ** 2)


_SP, _TP = PlaneType.SPACELIKE, PlaneType.TIMELIKE
_EC, _SH, _TH = CircleType.EUCLIDEAN, CircleType.SPACELIKE_HYPERBOLA, CircleType.TIMELIKE_HYPERBOLA

SELECTORS: dict[str, FamilyId] = {
    "s3": FamilyId(_SP, _EC, AClass.UNIT10),
    "s3-rot": FamilyId(_SP, _EC, AClass.ZERO),
    "s3-const": FamilyId(_SP, _EC, AClass.UNIT10, True),
    "t4-a10": FamilyId(_TP, _SH, AClass.UNIT10),
    "t4-a01": FamilyId(_TP, _SH, AClass.UNIT01),
    "t4-a11": FamilyId(_TP, _SH, AClass.NULL11),
    "t4-rot": FamilyId(_TP, _SH, AClass.ZERO),
    "t4-const": FamilyId(_TP, _SH, AClass.UNIT01, True),
    "t5-a10": FamilyId(_TP, _TH, AClass.UNIT10),
    "t5-a01": FamilyId(_TP, _TH, AClass.UNIT01),
    "t5-a11": FamilyId(_TP, _TH, AClass.NULL11),
    "t5-rot": FamilyId(_TP, _TH, AClass.ZERO),
    "t5-const": FamilyId(_TP, _TH, AClass.UNIT01, True),
}


def _family(family) -> FamilyId:
    return FamilyId.from_selector(family) if isinstance(family, str) else family


def radicand_coeffs(family, lam: float) -> tuple[float, float, float]:
    """``(c3, c2, c1)`` with ``P(u) = c3 u^3 + c2 u^2 + c1 u`` and ``c2 = lam``."""
    family = _family(family)
    a2 = family.a_norm2
    sec = family.model
    if sec == 3:
        return (a2, float(lam), 1.0)
    if sec == 4:
        return (-a2, float(lam), 1.0)
    return (a2, float(lam), -1.0)


def radicand(family, lam: float, u):
    """The polynomial under the square root of the profile integrals."""
    c3, c2, c1 = radicand_coeffs(family, lam)
    u = np.asarray(u, dtype=float)
    out = u * (c1 + u * (c2 + u * c3))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RootPair:
    """Nonzero roots of the radicand; ``None`` when absent."""

    q1: float | None
    q2: float | None

    @property
    def double(self) -> bool:
        return self.q1 is not None and self.q1 == self.q2


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not math.isfinite(lam):
        raise DomainError("lambda must be finite")
    if abs(lam) > LAMBDA_MAX:
        raise DomainError(f"|lambda| > {LAMBDA_MAX:g} is not supported")
    return lam


def cubic_roots(family, lam: float) -> RootPair:
    """Nonzero roots of the radicand, i.e. roots of ``c3 u^2 + lam u + c1``.

    Uses the cancellation-free form of the quadratic formula.  When the
    discriminant is zero up to ``DOUBLE_ROOT_TOL`` in lambda the double root
    is returned exactly.
    """
    family = _family(family)
    lam = _check_lambda(lam)
    c3, c2, c1 = radicand_coeffs(family, lam)
    if c3 == 0.0:
        if c2 == 0.0:
            return RootPair(None, None)
        return RootPair(-c1 / c2, None)
    disc = c2 * c2 - 4.0 * c3 * c1
    if c3 * c1 > 0 and abs(abs(c2) - 2.0 * math.sqrt(c3 * c1)) <= DOUBLE_ROOT_TOL:
        disc = 0.0
    if disc < 0:
        return RootPair(None, None)
    if disc == 0.0:
        r = math.copysign(math.sqrt(c1 / c3), -c2 * c3)
        return RootPair(r, r)
    sq = math.sqrt(disc)
    s = -0.5 * (c2 + math.copysign(sq, c2))
    r1, r2 = s / c3, c1 / s
    return RootPair(min(r1, r2), max(r1, r2))


@dataclass(frozen=True)
class Profile:
    """One admissible q-interval of a family at fixed lambda.

    ``z_base``/``m_base`` are the values of the foliation coordinate and of
    the centre displacement at ``q0``.  They are zero except where a closed
    form fixes a different integration constant.  For constant-radius
    families ``q`` is the foliation coordinate itself and ``radius`` is set.
    """

    family: FamilyId
    lam: float
    branch: Branch
    q0: float
    q_lo: float
    q_hi: float
    lo_kind: str  # origin | simple | regular | open
    hi_kind: str  # simple | double | infinity | open
    z_base: float = 0.0
    m_base: float = 0.0
    a: tuple[float, float] = field(default=(0.0, 0.0))
    radius: float | None = None

    @property
    def coeffs(self) -> tuple[float, float, float]:
        return radicand_coeffs(self.family, self.lam)

    @property
    def selector(self) -> str:
        return self.family.selector

    @property
    def model(self) -> int:
        return self.family.model

    @property
    def a_vector(self) -> np.ndarray:
        return np.array(self.a, dtype=float)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.q_hi)

    def contains(self, q) -> np.ndarray | bool:
        """Whether q lies where the profile integrals converge."""
        q = np.asarray(q, dtype=float)
        lo_ok = q >= self.q_lo if self.lo_kind in ("origin", "simple", "regular") else q > self.q_lo
        hi_ok = q <= self.q_hi if self.hi_kind == "simple" else q < self.q_hi
        out = lo_ok & hi_ok & np.isfinite(q)
        return out if out.ndim else bool(out)

    def interior(self, q) -> np.ndarray | bool:
        q = np.asarray(q, dtype=float)
        out = (q > self.q_lo) & (q < self.q_hi)
        return out if out.ndim else bool(out)

    def check(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if not np.all(self.contains(q)):
            bad = q[~np.asarray(self.contains(q), dtype=bool)] if q.ndim else q
            raise DomainError(
                f"q={np.ravel(bad)[:3]} outside the domain [{self.q_lo}, {self.q_hi}] "
                f"of {self.selector} (lambda={self.lam}, {self.branch.value} branch)"
            )
        return q


@dataclass(frozen=True)
class CaseReport:
    profile: Profile
    predicted_causal: frozenset
    limit_low: LimitLow
    limit_high: LimitHigh
    slab_finite: bool

    def as_dict(self) -> dict:
        p = self.profile
        return {
            "family": p.selector,
            "lambda": p.lam,
            "branch": p.branch.value,
            "q_domain": [p.q_lo, p.q_hi if math.isfinite(p.q_hi) else "inf"],
            "q0": p.q0,
            "predicted_causal": sorted(c.value for c in self.predicted_causal),
            "limit_low": self.limit_low.value,
            "limit_high": self.limit_high.value,
            "slab_finite": self.slab_finite,
        }


def _positive_intervals(family: FamilyId, lam: float):
    """Maximal intervals of (0, inf) on which the radicand is positive."""
    roots = cubic_roots(family, lam)
    pts = sorted({r for r in (roots.q1, roots.q2) if r is not None and r > 0})
    edges = [0.0, *pts, math.inf]
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        probe = lo + 1.0 if math.isinf(hi) else 0.5 * (lo + hi)
        if radicand(family, lam, probe) > 0:
            out.append((lo, hi))
    return out, roots


def _closed_anchor(sel: str, lam: float, q0: float) -> tuple[float, float]:
    """Integration constants matching the explicit parametrizations."""
    if lam == -2.0 and sel in ("s3", "t4-a01") and q0 > 1.0:
        r0 = math.sqrt(q0)
        base = 0.5 * math.log((r0 - 1.0) / (r0 + 1.0))
        return base, r0 + base
    if sel == "t4-a11" and lam < 0:
        return 0.0, -math.pi / (8.0 * (-lam) ** 1.5)
    return 0.0, 0.0


def _qualitative(sel: str, lam: float, index: int, n: int, lo: float, hi: float, hi_kind: str, c3: float):
    """Predicted causal content and limit objects, per the case analysis."""
    sec = int(sel[1])
    curved_low = LimitLow.CIRCLE if sec == 3 else LimitLow.HYPERBOLA
    curved_high = LimitHigh.CIRCLE if sec == 3 else LimitHigh.HYPERBOLA
    both = n == 2
    low_branch = index == 0

    # causal content
    if sel == "s3":
        if lam > 2:
            causal = {S}
        elif lam == 2:
            causal = {S, L}
        elif lam > -2:
            causal = {S, T, L}
        elif lam == -2:
            causal = {T, L} if low_branch else {S, T, L}
        else:
            causal = {T} if (both and low_branch) else {S, T, L}
    elif sel == "s3-rot":
        causal = {S} if lam > 0 else {T}
    elif sel == "t4-a10":
        causal = {S, T, L}
    elif sel == "t4-a01":
        if lam > -2:
            causal = {T}
        elif lam == -2:
            causal = {T, L} if low_branch else {T}
        else:
            causal = {S, T, L} if low_branch else {T}
    elif sel == "t4-a11":
        causal = {T} if lam >= 0 else {S, T, L}
    elif sel == "t4-rot":
        causal = {S} if lam < 0 else {T}
    else:  # t5 families: always timelike
        causal = {T}

    # lower limit object
    if lo == 0.0:
        spacelike_tip = (sel == "s3" and lam > -2) or (sel == "s3-rot" and lam > 0)
        limit_low = LimitLow.CONELIKE_POINT if spacelike_tip else LimitLow.POINT
    else:
        limit_low = curved_low

    # upper limit object and slab
    if hi_kind == "simple":
        limit_high, slab = curved_high, True
    elif hi_kind == "double":
        limit_high, slab = LimitHigh.UNBOUNDED, False
    elif c3 > 0:
        limit_high = LimitHigh.LINE_ORTHOGONAL_TO_PI if sec == 3 else LimitHigh.UNBOUNDED
        slab = True
    else:
        limit_high, slab = LimitHigh.UNBOUNDED, False
    return frozenset(causal), limit_low, limit_high, slab


def _constant_case(family: FamilyId, lam: float, a=None) -> CaseReport:
    sec = family.model
    a = tuple(float(x) for x in (a if a is not None else family.a_vector))
    r = constant_radius_solution(family, a)
    if r is None:
        raise DomainError(f"no constant-radius surface for a={a} in {family.selector}")
    profile = Profile(
        family, float(lam), Branch.LOW, 0.0, -math.inf, math.inf, "open", "open", a=a, radius=r
    )
    causal = frozenset({T}) if sec == 5 else frozenset({T, L})
    return CaseReport(profile, causal, LimitLow.UNBOUNDED, LimitHigh.UNBOUNDED, False)


def classify_case(family, lam: float, r0: float = DEFAULT_R0, a=None) -> list[CaseReport]:
    """One report per admissible q-interval; empty when the case is discarded.

    ``r0`` is the free lower radius used on the upper branch of a double
    root (lambda = -2), where the integrals diverge at the root itself.
    ``a`` is only used by constant-radius families.
    """
    family = _family(family)
    lam = _check_lambda(lam)
    if family.constant_radius:
        try:
            return [_constant_case(family, lam, a)]
        except DomainError:
            return []
    sel = family.selector
    c3, _, _ = radicand_coeffs(family, lam)
    if abs(abs(lam) - 2.0) <= DOUBLE_ROOT_TOL:
        lam = math.copysign(2.0, lam)
    if family.is_rotational and lam == 0.0:
        # P(u) = +-u: a light cone (s3 selectors) or no real surface; never non-degenerate
        return []
    intervals, roots = _positive_intervals(family, lam)
    reports = []
    n = len(intervals)
    for i, (lo, hi) in enumerate(intervals):
        lo_kind = "origin" if lo == 0.0 else ("double" if roots.double else "simple")
        hi_kind = "infinity" if math.isinf(hi) else ("double" if roots.double else "simple")
        q0, q_lo = lo, lo
        if lo_kind == "double":
            if not r0 > 1.0:
                raise DomainError("the free lower radius r0 must exceed the double root 1")
            q0 = q_lo = float(r0) ** 2
            lo_kind = "regular"
        z_base, m_base = _closed_anchor(sel, lam, q0)
        branch = Branch.HIGH if (n == 2 and i == 1) else Branch.LOW
        profile = Profile(
            family, lam, branch, q0, q_lo, hi, lo_kind, hi_kind, z_base, m_base,
            a=tuple(family.a_vector.tolist()),
        )
        causal, lim_lo, lim_hi, slab = _qualitative(sel, lam, i, n, lo, hi, hi_kind, c3)
        if lo_kind == "regular":
            lim_lo = LimitLow.CIRCLE if family.model == 3 else LimitLow.HYPERBOLA
        reports.append(CaseReport(profile, causal, lim_lo, lim_hi, slab))
    return reports


def make_profile(family, lam: float, branch=None, r0: float = DEFAULT_R0, a=None) -> Profile:
    """Pick one profile out of :func:`classify_case`.

    With two q-intervals ``branch`` chooses between them (default: low).
    """
    family = _family(family)
    reports = classify_case(family, lam, r0=r0, a=a)
    if not reports:
        raise DomainError(
            f"case discarded: {family.selector} admits no surface for lambda={lam}"
        )
    if branch is None:
        return reports[0].profile
    branch = Branch(branch)
    for rep in reports:
        if rep.profile.branch is branch:
            return rep.profile
    if len(reports) == 1:
        raise DomainError(f"{family.selector} at lambda={lam} has a single branch")
    raise DomainError(f"no {branch.value} branch")  # pragma: no cover


def case_report(profile: Profile) -> CaseReport:
    """The report that produced ``profile``."""
    r0 = math.sqrt(profile.q0) if profile.lo_kind == "regular" else DEFAULT_R0
    for rep in classify_case(profile.family, profile.lam, r0=r0, a=profile.a):
        if rep.profile.branch is profile.branch:
            return replace(rep, profile=profile)
    raise DomainError("profile does not belong to any admissible case")  # pragma: no cover


def ode_residual(family, a_norm2: float, q, qp, qpp):
    """Left-hand side of the second-order ODE for ``q = r^2`` along the foliation."""
    sec = _family(family).model
    q, qp, qpp = (np.asarray(x, dtype=float) for x in (q, qp, qpp))
    if sec == 3:
        out = 2 * a_norm2 * q**3 + qp**2 - q * (2 + qpp)
    elif sec == 4:
        out = 2 * a_norm2 * q**3 - qp**2 + q * (2 + qpp)
    else:
        out = 2 * a_norm2 * q**3 + qp**2 + q * (2 - qpp)
    return out if out.ndim else float(out)


def first_integral_rhs(family, a_norm2: float, lam: float, q):
    sec = _family(family).model
    q = np.asarray(q, dtype=float)
    if sec == 3:
        out = 4 * (a_norm2 * q + 1 / q) + 4 * lam
    elif sec == 4:
        out = 4 * (-a_norm2 * q + 1 / q) + 4 * lam
    else:
        out = 4 * (a_norm2 * q - 1 / q) + 4 * lam
    return out if out.ndim else float(out)


def first_integral_residual(family, a_norm2: float, lam: float, q, qp):
    """``(q')^2/q^2`` minus the right-hand side of the first integral."""
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    out = qp**2 / q**2 - first_integral_rhs(family, a_norm2, lam, q)
    return out if out.ndim else float(out)


def constant_radius_solution(family, a) -> float | None:
    """Radius of the constant-radius solution, or ``None`` when there is none."""
    sec = _family(family).model
    a = np.asarray(a, dtype=float)
    n2 = plane_norm2(sec, a)
    if sec == 3:
        if n2 <= 0:
            return None
        return n2 ** -0.25  # r^2 = 1/|a|
    if n2 >= 0:
        return None
    return (-n2) ** -0.25  # q^2 = -1/<a,a>, resp. <a,a> r^4 + 1 = 0


def reduce_spacelike_a(a, lam: float) -> tuple[float, float, float]:
    """Normalise a general ``a`` for spacelike planes.

    Returns ``(angle, ratio, lam_normalised)``: rotate by ``-angle`` about the
    x3-axis to bring ``a`` to ``|a|(1,0)``; then the surface with ``(|a|, lam)``
    is ``1/ratio`` times the normalised one with ``lam/|a|``, evaluated at
    ``|a| q``.
    """
    a = np.asarray(a, dtype=float)
    norm = float(np.hypot(a[0], a[1]))
    if norm == 0:
        raise DomainError("a = 0 is the rotational family; nothing to normalise")
    return float(np.arctan2(a[1], a[0])), math.sqrt(norm), lam / norm
