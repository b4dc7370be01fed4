"""Trace and metrics export.

The CSV header is part of the external contract and must stay bit-exact:

    t,x,y,theta,xhat,yhat,thetahat,Q,G1,G2,G3,u1,u2,xi,event

Floats are written with 17 significant digits so that re-parsing
reproduces them bit-exactly.  Averaged-loop traces carry one extra
trailing ``system`` column with the literal value ``average``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from etseek.trace import RunMetrics, SimulationTrace

CSV_HEADER = "t,x,y,theta,xhat,yhat,thetahat,Q,G1,G2,G3,u1,u2,xi,event"

_FLOAT_COLUMNS = (
    "t",
    "x",
    "y",
    "theta",
    "xhat",
    "yhat",
    "thetahat",
    "q",
    "g1",
    "g2",
    "g3",
    "u1",
    "u2",
    "xi",
)


def export_trace(trace: SimulationTrace, path: str | Path) -> None:
    path = Path(path)
    marker = trace.system != "full"
    header = CSV_HEADER + (",system" if marker else "")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(header + "\n")
            columns = [getattr(trace, name) for name in _FLOAT_COLUMNS]
            events = trace.event
            for i in range(len(trace)):
                fields = [format(col[i], ".17g") for col in columns]
                fields.append(str(int(events[i])))
                if marker:
                    fields.append(trace.system)
                handle.write(",".join(fields) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc}") from exc


def import_trace(path: str | Path) -> SimulationTrace:
    """Re-parse an exported trace (columns only; the event log is not in CSV)."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            header = handle.readline().rstrip("\n")
            lines = handle.read().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read trace from {path}: {exc}") from exc
    if header not in (CSV_HEADER, CSV_HEADER + ",system"):
        raise ValueError(f"unexpected trace header in {path}: {header!r}")
    system = "full"
    rows = [line.split(",") for line in lines if line]
    n = len(rows)
    data = {name: np.empty(n) for name in _FLOAT_COLUMNS}
    event = np.zeros(n, dtype=np.int64)
    for i, parts in enumerate(rows):
        for j, name in enumerate(_FLOAT_COLUMNS):
            data[name][i] = float(parts[j])
        event[i] = int(parts[len(_FLOAT_COLUMNS)])
        if len(parts) > len(_FLOAT_COLUMNS) + 1:
            system = parts[len(_FLOAT_COLUMNS) + 1]
    return SimulationTrace(event=event, system=system, **data)


def export_metrics(metrics: RunMetrics | dict, path: str | Path) -> None:
    """Write metrics as JSON with the stable key names."""
    payload = metrics.as_dict() if isinstance(metrics, RunMetrics) else metrics
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=False)
            handle.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write metrics to {path}: {exc}") from exc
