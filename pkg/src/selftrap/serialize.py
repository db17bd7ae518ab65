"""Bit-exact CSV/JSON serialization for all exportable results.

Conventions: floats are written with 17 significant digits (enough to
round-trip any double exactly), CSV uses comma separators and plain \\n
line endings with the headers fixed below, JSON keys are emitted in
lexicographic order, and the hard-wall sentinel is the literal token
``inf`` (a bare token in CSV, a string in JSON).
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError
from .numerics import UNITS, ComplexField, RealField
from .profile import ProfileSolution, SweepRecord

PROFILE_HEADER = "q,rho,R,U"
SWEEP_HEADER = "T,L_m,U_bar,entropy,Z"
SNAPSHOT_HEADER = "t,q,rho,re_psi,im_psi"


def format_float(x: float) -> str:
    """17-significant-digit decimal form; infinities become ``inf``."""
    if math.isnan(x):
        raise ParameterError("NaN is not serializable")
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _csv(header: str, columns: Sequence[np.ndarray]) -> str:
    rows = [header]
    for values in zip(*columns):
        rows.append(",".join(format_float(float(v)) for v in values))
    return "\n".join(rows) + "\n"


def profile_csv(sol: ProfileSolution, shift_potential: bool = False) -> str:
    """Profile table; optionally shifts the potential column so its
    global minimum is zero (presentation only, the solution is unchanged)."""
    U = sol.U.values
    if shift_potential:
        U = U - U.min()
    return _csv(
        PROFILE_HEADER, (sol.grid.points, sol.rho.values, sol.R.values, U)
    )


def fields_csv(grid_points: np.ndarray, rho: RealField, R: RealField, U: RealField) -> str:
    """Generic q,rho,R,U table (used for the box-limit fields, where the
    potential carries the hard-wall sentinel)."""
    return _csv(PROFILE_HEADER, (grid_points, rho.values, R.values, U.values))


def sweep_csv(records: Iterable[SweepRecord]) -> str:
    recs = list(records)
    cols = (
        np.array([r.T for r in recs]),
        np.array([r.L_m for r in recs]),
        np.array([r.U_bar for r in recs]),
        np.array([r.entropy for r in recs]),
        np.array([r.Z for r in recs]),
    )
    return _csv(SWEEP_HEADER, cols)


def snapshots_csv(times: Sequence[float], snapshots: Sequence[ComplexField]) -> str:
    rows = [SNAPSHOT_HEADER]
    for t, snap in zip(times, snapshots):
        q = snap.grid.points
        rho = np.abs(snap.values) ** 2
        re, im = snap.values.real, snap.values.imag
        t_str = format_float(float(t))
        for j in range(len(q)):
            rows.append(
                ",".join(
                    (
                        t_str,
                        format_float(float(q[j])),
                        format_float(float(rho[j])),
                        format_float(float(re[j])),
                        format_float(float(im[j])),
                    )
                )
            )
    return "\n".join(rows) + "\n"


def parse_csv(text: str) -> tuple[list[str], dict[str, np.ndarray]]:
    """Parse a CSV produced here back into named float columns."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParameterError("empty CSV")
    names = lines[0].split(",")
    data = [[] for _ in names]
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(names):
            raise ParameterError(f"malformed CSV row: {line!r}")
        for col, part in zip(data, parts):
            col.append(float(part))
    return names, {n: np.asarray(c) for n, c in zip(names, data)}


# ---------------------------------------------------------------------------
# JSON with deterministic layout


def dumps_stable(obj, indent: int = 0) -> str:
    """Deterministic JSON: lexicographic keys, 17-digit floats, the
    ``inf`` sentinel as a string."""
    pad = "  " * indent
    pad_in = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format_float(x)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = [dumps_stable(v, indent + 1) for v in obj]
        if not items:
            return "[]"
        return "[\n" + ",\n".join(pad_in + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        keys = sorted(obj)
        if not keys:
            return "{}"
        items = [f'{pad_in}"{k}": ' + dumps_stable(obj[k], indent + 1) for k in keys]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise ParameterError(f"unsupported type for JSON serialization: {type(obj)!r}")


def loads_stable(text: str):
    """Inverse of dumps_stable: restores ``inf`` sentinel strings to
    floats (those strings never denote text in our schemas)."""
    import json

    def restore(node):
        if isinstance(node, dict):
            return {k: restore(v) for k, v in node.items()}
        if isinstance(node, list):
            return [restore(v) for v in node]
        if node == "inf":
            return math.inf
        if node == "-inf":
            return -math.inf
        return node

    return restore(json.loads(text))


def summary_dict(command: str, parameters: dict, results: dict) -> dict:
    """Self-describing run summary embedding the units convention."""
    return {
        "command": command,
        "parameters": parameters,
        "results": results,
        "units": UNITS.as_dict(),
    }
