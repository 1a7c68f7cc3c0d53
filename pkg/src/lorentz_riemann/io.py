"""Mesh export with causal colouring, a deterministic JSON emitter and CSV atlases."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .surface import SurfacePatch

SCHEMA_VERSION = 1

COLORS = {
    1: (0, 90, 200),  # spacelike
    -1: (200, 40, 40),  # timelike
    0: (40, 180, 60),  # lightlike
}


def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    s = format(float(x), ".17g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


# ---------------------------------------------------------------------------
# meshes


def _wraps(patch: SurfacePatch) -> bool:
    """Whether the v-grid is a full turn of a Euclidean circle."""
    v = patch.v_grid
    if patch.profile.model != 3 or v.size < 3:
        return False
    step = v[1] - v[0]
    return abs(v[-1] + step - v[0] - 2.0 * math.pi) < 1e-9 and np.allclose(np.diff(v), step, rtol=1e-9, atol=0)


def mesh_arrays(patches: Sequence[SurfacePatch]):
    """Stacked vertices, W, codes and triangle indices (0-based) of the valid vertices."""
    verts, Ws, codes, faces = [], [], [], []
    offset = 0
    for patch in patches:
        nq, nv = patch.shape
        valid = ~patch.excluded
        index = np.full((nq, nv), -1, dtype=int)
        index[valid] = offset + np.arange(int(valid.sum()))
        verts.append(patch.positions[valid])
        Ws.append(patch.W[valid])
        codes.append(patch.codes[valid])
        cols = nv if _wraps(patch) else nv - 1
        for i in range(nq - 1):
            for j in range(cols):
                jn = (j + 1) % nv
                a, b, c, d = index[i, j], index[i + 1, j], index[i + 1, jn], index[i, jn]
                if min(a, b, c, d) < 0:
                    continue
                faces.append((a, b, c))
                faces.append((a, c, d))
        offset += int(valid.sum())
    empty3 = np.zeros((0, 3))
    return (
        np.concatenate(verts) if verts else empty3,
        np.concatenate(Ws) if Ws else np.zeros(0),
        np.concatenate(codes) if codes else np.zeros(0, int),
        np.array(faces, dtype=int).reshape(-1, 3),
    )


def write_obj(stream: TextIO, patches: Sequence[SurfacePatch]) -> None:
    """ASCII OBJ; colours use the 6-float ``v x y z r g b`` extension."""
    V, _, codes, F = mesh_arrays(patches)
    stream.write("# lorentz-riemann mesh\n")
    for p, code in zip(V, codes):
        r, g, b = (c / 255.0 for c in COLORS[int(code)])
        stream.write(f"v {fmt(p[0])} {fmt(p[1])} {fmt(p[2])} {fmt(r)} {fmt(g)} {fmt(b)}\n")
    for a, b, c in F:
        stream.write(f"f {a + 1} {b + 1} {c + 1}\n")


def write_ply(stream: TextIO, patches: Sequence[SurfacePatch]) -> None:
    """ASCII PLY with per-vertex W and causal colour."""
    V, W, codes, F = mesh_arrays(patches)
    stream.write(
        "ply\nformat ascii 1.0\ncomment lorentz-riemann mesh\n"
        f"element vertex {len(V)}\n"
        "property double x\nproperty double y\nproperty double z\nproperty double w_scalar\n"
        "property uchar red\nproperty uchar green\nproperty uchar blue\n"
        f"element face {len(F)}\nproperty list uchar int vertex_indices\nend_header\n"
    )
    for p, w, code in zip(V, W, codes):
        r, g, b = COLORS[int(code)]
        stream.write(f"{fmt(p[0])} {fmt(p[1])} {fmt(p[2])} {fmt(w)} {r} {g} {b}\n")
    for a, b, c in F:
        stream.write(f"3 {a} {b} {c}\n")


def write_mesh(path, patches: Sequence[SurfacePatch], fmt_name: str = "obj") -> None:
    writer = {"obj": write_obj, "ply": write_ply}.get(fmt_name)
    if writer is None:
        raise ValueError(f"unknown mesh format {fmt_name!r}")
    with open(path, "w", newline="\n") as fh:
        writer(fh, patches)


def read_obj_vertices(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positions, colours and faces (0-based) back from an OBJ written here."""
    verts, faces = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:7]])
        elif parts[0] == "f":
            faces.append([int(x) - 1 for x in parts[1:4]])
    V = np.array(verts).reshape(-1, 6)
    return V[:, :3], V[:, 3:], np.array(faces, dtype=int).reshape(-1, 3)


def read_ply(path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Positions, W, colours and faces from an ASCII PLY written here."""
    lines = Path(path).read_text().splitlines()
    n_v = n_f = 0
    for k, line in enumerate(lines):
        if line.startswith("element vertex"):
            n_v = int(line.split()[-1])
        elif line.startswith("element face"):
            n_f = int(line.split()[-1])
        elif line == "end_header":
            start = k + 1
            break
    rows = np.array([[float(x) for x in lines[start + i].split()] for i in range(n_v)]).reshape(-1, 7)
    faces = np.array([[int(x) for x in lines[start + n_v + i].split()[1:]] for i in range(n_f)], dtype=int)
    return rows[:, :3], rows[:, 3], rows[:, 4:].astype(int), faces.reshape(-1, 3)


# ---------------------------------------------------------------------------
# JSON


def _emit(obj, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append({None: "null", True: "true", False: "false"}[None if obj is None else bool(obj)])
    elif isinstance(obj, enum.Enum):
        _emit(obj.value, out, indent, level)
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            out.append(fmt(x))
        else:
            out.append('"nan"' if math.isnan(x) else ('"inf"' if x > 0 else '"-inf"'))
    elif isinstance(obj, str):
        out.append(_quote(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for k, (key, val) in enumerate(items):
            out.append(f"{pad}{_quote(str(key))}: ")
            _emit(val, out, indent, level + 1)
            out.append(",\n" if k < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            out.append("[]")
            return
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in seq):
            parts: list[str] = []
            for x in seq:
                sub: list[str] = []
                _emit(x, sub, indent, level + 1)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for k, val in enumerate(seq):
            out.append(pad)
            _emit(val, out, indent, level + 1)
            out.append(",\n" if k < len(seq) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def _quote(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits."""
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(dumps(obj))


# ---------------------------------------------------------------------------
# CSV


ATLAS_COLUMNS = (
    "family",
    "lambda",
    "branch",
    "q_lo",
    "q_hi",
    "q0",
    "predicted_causal",
    "limit_low",
    "limit_high",
    "slab_finite",
)


def atlas_csv(rows: Iterable[dict]) -> str:
    """One line per case report; a discarded lambda gives a row with empty columns."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ATLAS_COLUMNS)
    for row in rows:
        vals = []
        for col in ATLAS_COLUMNS:
            val = row.get(col, "")
            if isinstance(val, float):
                val = fmt(val) if math.isfinite(val) else ("inf" if val > 0 else "-inf")
            elif isinstance(val, (list, tuple)):
                val = "|".join(str(x) for x in val)
            elif isinstance(val, bool):
                val = "true" if val else "false"
            vals.append(val)
        w.writerow(vals)
    return buf.getvalue()

