"""Command line front end: ``generate``, ``classify``, ``verify`` and ``reflect``."""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    DegeneratePoint,
    Divergent,
    DomainError,
    NoConelikePoint,
    NoLimitLine,
    ToleranceNotMet,
)
from .extension import detect_boundary_line, period_vector, periodic_extend, schwarz_reflect
from .families import DEFAULT_R0, SELECTORS, case_report, classify_case, make_profile
from .io import SCHEMA_VERSION, atlas_csv, dumps, write_mesh
from .minkowski import DEFAULT_LIGHTLIKE_TOL, lorentz_inner
from .quadrature import DEFAULT_TOL, asymptotic_limits, closed_form, has_closed_form, profile_integrals_grid
from .surface import (
    DEFAULT_VMAX,
    causal_map,
    centre_curve,
    default_q_grid,
    default_v_grid,
    lightlike_locus,
    mean_curvature_grid,
    metric_W,
    mirror_symmetry,
    parametrize,
    patch_mean_curvature,
    sphere_control,
    plane_control,
    weight_W,
)

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_TOL = 0, 1, 2, 3
H_THRESHOLD = 1e-6
CONTROLS = {"sphere": sphere_control, "plane": plane_control}


def _tool() -> dict:
    return {"name": "lorentz-riemann", "version": __version__}


def _config(args) -> dict:
    keys = ("family", "lam", "branch", "r0", "nq", "nv", "vmax", "tol", "band", "format", "copies")
    out = {}
    for k in keys:
        if hasattr(args, k):
            val = getattr(args, k)
            out["lambda" if k == "lam" else k] = val
    for k in ("out", "report"):
        if getattr(args, k, None):
            out[k] = Path(getattr(args, k)).name
    return out


def _emit_report(args, report: dict) -> None:
    text = dumps(report)
    if getattr(args, "report", None):
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _profile(args):
    return make_profile(args.family, args.lam, branch=args.branch, r0=args.r0)


def _patch(profile, args):
    q = default_q_grid(profile, args.nq)
    v = default_v_grid(profile, args.nv, args.vmax)
    return causal_map(profile, q, v, band=args.band, tol=args.tol)


def _limits(profile, tol: float):
    try:
        lim = asymptotic_limits(profile, tol)
    except Divergent as exc:
        return {"finite": False, "reason": str(exc)}
    return {"finite": True, "z0": lim.z0, "c": lim.c}


def _loci(profile) -> list[dict]:
    out = []
    for c in lightlike_locus(profile):
        entry = {"label": c.label, "q_range": [c.q_lo, c.q_hi]}
        if c.point is not None:
            entry["line"] = {"point": c.point, "direction": c.direction}
        out.append(entry)
    return out


def _curvature(patch) -> dict:
    res = patch_mean_curvature(patch)
    return {"max_normalized": res.max_abs, "skipped": res.skipped, "threshold": H_THRESHOLD}


def cmd_generate(args) -> int:
    profile = _profile(args)
    patch = _patch(profile, args)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": _tool(),
        "command": "generate",
        "config": _config(args),
        "case": case_report(profile).as_dict(),
        "census": patch.census,
        "limits": _limits(profile, args.tol),
        "lightlike_loci": _loci(profile),
        "mean_curvature": _curvature(patch),
    }
    if args.out:
        write_mesh(args.out, [patch], args.format)
        report["mesh"] = {"format": args.format, "vertices": int((~patch.excluded).sum())}
    _emit_report(args, report)
    return EXIT_OK


def _lambdas(args) -> list[float]:
    lams = list(args.lam or [])
    if args.range:
        start, stop, num = args.range
        if int(num) < 1 or int(num) != num:
            raise DomainError("the sample count of --range must be a positive integer")
        lams.extend(np.linspace(start, stop, int(num)).tolist())
    if not lams:
        raise DomainError("classify needs --lambda values or a --range")
    return lams


def cmd_classify(args) -> int:
    rows = []
    for lam in _lambdas(args):
        reps = classify_case(args.family, lam, r0=args.r0)
        if not reps:
            rows.append({"family": args.family, "lambda": float(lam), "branch": "discarded"})
        for rep in reps:
            p = rep.profile
            rows.append({
                "family": p.selector,
                "lambda": p.lam,
                "branch": p.branch.value,
                "q_lo": p.q_lo,
                "q_hi": p.q_hi,
                "q0": p.q0,
                "predicted_causal": sorted(c.value for c in rep.predicted_causal),
                "limit_low": rep.limit_low.value,
                "limit_high": rep.limit_high.value,
                "slab_finite": rep.slab_finite,
            })
    csv_text = atlas_csv(rows)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    elif not args.report:
        sys.stdout.write(csv_text)
    if args.report:
        _emit_report(args, {
            "schema_version": SCHEMA_VERSION,
            "tool": _tool(),
            "command": "classify",
            "family": args.family,
            "rows": rows,
        })
    return EXIT_OK


def _check(name: str, value: float, threshold: float, above: bool = False) -> dict:
    passed = value > threshold if above else value <= threshold
    return {"name": name, "value": value, "threshold": threshold, "passed": bool(passed)}


def _verify_profile(profile, args) -> list[dict]:
    checks = []
    q = default_q_grid(profile, args.nq)
    v = default_v_grid(profile, args.nv, args.vmax)
    qq, vv = np.meshgrid(q, v, indexing="ij")
    H = mean_curvature_grid(profile, qq, vv)
    checks.append(_check("mean_curvature", H.max_abs, H_THRESHOLD))

    # the closed-form W and the determinant of the metric agree in sign
    Wd, scale = metric_W(profile, qq, vv)
    Wc = weight_W(profile, qq, vv)
    firm = np.abs(Wd) > 1e-6 * scale
    mismatch = int(np.count_nonzero(np.sign(Wc[firm]) != np.sign(Wd[firm])))
    checks.append(_check("w_sign_mismatches", float(mismatch), 0.0))

    X = parametrize(profile, qq, vv, tol=args.tol)
    C = centre_curve(profile, qq, tol=args.tol)
    d = X - C
    radius2 = profile.radius**2 if profile.radius is not None else qq
    expected = -radius2 if profile.model == 5 else radius2
    circ = float(np.max(np.abs(lorentz_inner(d, d) - expected) / (1.0 + np.abs(expected))))
    checks.append(_check("circle_radius", circ, 1e-10))

    sym = mirror_symmetry(profile)
    if sym is not None:
        v2 = -vv if sym.flip_v else vv
        Y = parametrize(profile, qq, v2, sheet=-1 if sym.swap_sheet else 1, tol=args.tol)
        err = float(np.max(np.abs(Y - X @ sym.linear.T)))
        checks.append(_check("mirror_symmetry", err, 1e-12))

    if profile.radius is None and has_closed_form(profile):
        z, m, _, _ = profile_integrals_grid(profile, q, args.tol)
        zc, mc = closed_form(profile, q)
        err = float(max(np.max(np.abs(z - zc)), np.max(np.abs(m - mc))))
        checks.append(_check("closed_form", err, 1e-9))
    return checks


def cmd_verify(args) -> int:
    if args.family in CONTROLS:
        surf = CONTROLS[args.family]()
        lo, hi = surf.u_range
        lo, hi = (0.1, 2.0) if not math.isfinite(lo) else (lo + 0.1, hi - 0.1)
        u = np.linspace(lo, hi, args.nq)[:, None]
        w = np.linspace(0.0, 2 * math.pi, args.nv, endpoint=False)[None, :]
        H = mean_curvature_grid(surf, u, w)
        checks = [_check("mean_curvature", H.max_abs, H_THRESHOLD)]
        case = {"family": args.family, "control": True}
    else:
        profile = _profile(args)
        checks = _verify_profile(profile, args)
        case = case_report(profile).as_dict()
    passed = all(c["passed"] for c in checks)
    _emit_report(args, {
        "schema_version": SCHEMA_VERSION,
        "tool": _tool(),
        "command": "verify",
        "config": _config(args),
        "case": case,
        "checks": checks,
        "passed": passed,
    })
    return EXIT_OK if passed else EXIT_FAIL


def cmd_reflect(args) -> int:
    profile = _profile(args)
    rep = case_report(profile)
    line = detect_boundary_line(profile, args.tol)
    patch = _patch(profile, args)
    reflected = schwarz_reflect(patch, line)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": _tool(),
        "command": "reflect",
        "config": _config(args),
        "case": rep.as_dict(),
        "line": {"point": line.point, "direction": line.direction},
        # lower boundaries of the glued surface M u R(M); the seam is the line itself
        "boundary": {"original": rep.limit_low.value, "reflected": rep.limit_low.value},
        "census": patch.census,
        "mean_curvature": {
            "original": _curvature(patch)["max_normalized"],
            "reflected": _curvature(reflected)["max_normalized"],
        },
    }
    patches = [patch, reflected]
    if args.copies > 0:
        patches = periodic_extend(patch, reflected, args.copies, args.tol)
        T = period_vector(profile, line, args.tol)
        report["period"] = {"vector": T, "norm2": float(lorentz_inner(T, T)), "copies": 2 * args.copies + 1}
    if args.out:
        write_mesh(args.out, patches, args.format)
        report["mesh"] = {"format": args.format, "patches": len(patches)}
    _emit_report(args, report)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, families, with_grid: bool = True) -> None:
    p.add_argument("--family", required=True, choices=families)
    p.add_argument("--branch", choices=("low", "high"), default=None)
    p.add_argument("--r0", type=float, default=DEFAULT_R0, help="free lower radius on a double-root branch")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="quadrature tolerance")
    p.add_argument("--report", help="JSON report path (stdout when omitted)")
    if with_grid:
        p.add_argument("--nq", type=int, default=40)
        p.add_argument("--nv", type=int, default=40)
        p.add_argument("--vmax", type=float, default=DEFAULT_VMAX)
        p.add_argument("--band", type=float, default=DEFAULT_LIGHTLIKE_TOL, help="lightlike band")
        p.add_argument("--out", help="mesh output path")
        p.add_argument("--format", choices=("obj", "ply"), default="obj")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lorentz-riemann",
        description="Riemann-type zero mean curvature surfaces of Lorentz-Minkowski 3-space.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    fams = sorted(SELECTORS)

    g = sub.add_parser("generate", help="mesh one surface with causal colouring")
    _add_common(g, fams)
    g.add_argument("--lambda", dest="lam", type=float, required=True)

    c = sub.add_parser("classify", help="case atlas over a set of lambda values")
    _add_common(c, fams, with_grid=False)
    c.add_argument("--lambda", dest="lam", type=float, nargs="+")
    c.add_argument("--range", type=float, nargs=3, metavar=("START", "STOP", "NUM"))
    c.add_argument("--out", help="CSV output path")

    v = sub.add_parser("verify", help="run the residual checks on one surface")
    _add_common(v, fams + sorted(CONTROLS))
    v.add_argument("--lambda", dest="lam", type=float, default=0.0)

    r = sub.add_parser("reflect", help="Schwarz reflection across the limit line")
    _add_common(r, fams)
    r.add_argument("--lambda", dest="lam", type=float, required=True)
    r.add_argument("--copies", type=int, default=0, help="periodic copies on each side")
    return parser


COMMANDS = {"generate": cmd_generate, "classify": cmd_classify, "verify": cmd_verify, "reflect": cmd_reflect}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("nq", "nv"):
        if getattr(args, name, 2) < 2:
            parser.error(f"--{name} must be >= 2")
    if getattr(args, "copies", 0) < 0:
        parser.error("--copies must be >= 0")
    if args.tol < 1e-13:
        parser.error("--tol must be >= 1e-13")
    try:
        return COMMANDS[args.command](args)
    except (DomainError, NoLimitLine, NoConelikePoint, Divergent, DegeneratePoint) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ToleranceNotMet as exc:
        print(f"error: tolerance not met: {exc}", file=sys.stderr)
        return EXIT_TOL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
