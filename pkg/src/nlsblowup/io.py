"""CSV / JSON / config-file helpers. Floats are written with 17 significant digits."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

PROFILE_COLUMNS = ("rho", "re_q", "im_q", "abs_q", "re_dq", "im_dq")
SNAPSHOT_COLUMNS = ("x", "re_psi", "im_psi", "abs_psi")
DIAGNOSTIC_COLUMNS = ("t", "mass", "hamiltonian", "linf", "focusing")
TRACE_COLUMNS = ("iter", "a", "q0", "abs_c2")


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path, columns, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader], dtype=float)
    data = data.reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def profile_rows(profile):
    q, dq = profile.q, profile.dq
    return zip(profile.rho, q.real, q.imag, np.abs(q), dq.real, dq.imag)


def write_profile_csv(path, profile) -> Path:
    return write_csv(path, PROFILE_COLUMNS, profile_rows(profile))


def write_snapshot_csv(path, x, psi) -> Path:
    return write_csv(path, SNAPSHOT_COLUMNS, zip(x, psi.real, psi.imag, np.abs(psi)))


def read_snapshot_csv(path):
    cols = read_csv(path)
    return cols["x"], cols["re_psi"] + 1j * cols["im_psi"]


def write_diagnostics_csv(path, trace) -> Path:
    return write_csv(path, DIAGNOSTIC_COLUMNS, ((r.t, r.mass, r.hamiltonian, r.linf, r.focusing) for r in trace))


def write_trace_csv(path, trace) -> Path:
    return write_csv(path, TRACE_COLUMNS, ((e.index, e.a, e.q0, e.abs_c2) for e in trace))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment, dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out
