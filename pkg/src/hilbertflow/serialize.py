"""CSV/JSON output of flow traces and INI run configuration.

CSV files are UTF-8, comma separated, with a header row; reals are written
with 17 significant digits so they round-trip exactly. JSON trace files mirror
:class:`~hilbertflow.flow.FlowTrace` field by field; the only non-finite
value that can occur (the discriminant of a linear step) is stored as
``null``.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
from pathlib import Path

from .flow import FlowTrace

__all__ = [
    "fmt_real",
    "trace_to_json",
    "trace_from_json",
    "write_trace_json",
    "read_trace_json",
    "trace_header",
    "trace_rows",
    "trace_to_csv",
    "rows_to_csv",
    "read_config_file",
]


def fmt_real(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float) and math.isnan(x):
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _nan_to_none(x):
    return None if isinstance(x, float) and math.isnan(x) else x


def _none_to_nan(x):
    return math.nan if x is None else x


def trace_to_dict(trace: FlowTrace) -> dict:
    d = trace.to_dict()
    for s in d["steps"]:
        s["discriminant"] = _nan_to_none(s["discriminant"])
    return d


def trace_to_json(trace: FlowTrace) -> str:
    return json.dumps(trace_to_dict(trace), indent=2, allow_nan=False) + "\n"


def trace_from_json(text: str) -> FlowTrace:
    d = json.loads(text)
    for s in d["steps"]:
        s["discriminant"] = _none_to_nan(s["discriminant"])
    return FlowTrace.from_dict(d)


def write_trace_json(trace: FlowTrace, path) -> None:
    Path(path).write_text(trace_to_json(trace), encoding="utf-8")


def read_trace_json(path) -> FlowTrace:
    return trace_from_json(Path(path).read_text(encoding="utf-8"))


def trace_header(m_track: int) -> list:
    return (
        ["dimension", "g"]
        + [f"lambda_{k}" for k in range(1, m_track + 1)]
        + ["discriminant", "residual", "chosen_root", "other_root"]
    )


def trace_rows(trace: FlowTrace) -> list:
    """One row for the starting point, then one per step.

    The starting row leaves the step-only columns empty (``None``).
    """
    m = trace.config.m_track

    def pad(spec):
        spec = list(spec)
        return spec + [None] * (m - len(spec))

    rows = [[trace.initial_dim, trace.initial_g] + pad(trace.initial_spectrum) + [None] * 4]
    for s in trace.steps:
        rows.append(
            [s.dim_after, s.g_after]
            + pad(s.spectrum_after)
            + [_nan_to_none(s.discriminant), s.residual, s.g_after, s.other_root]
        )
    return rows


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt_real(x) for x in r])
    return buf.getvalue()


def trace_to_csv(trace: FlowTrace) -> str:
    return rows_to_csv(trace_header(trace.config.m_track), trace_rows(trace))


_INT_KEYS = {"n", "n_min", "m_track", "anchor_index", "workers"}
_FLOAT_KEYS = {
    "beta", "gamma", "diag_val", "offdiag_val", "g0", "residual_tol",
    "fixed_point_tol", "degeneracy_tol",
}
_SECTIONS = {
    "model": {"kind", "n", "beta", "gamma", "diag_val", "offdiag_val", "g0", "source_path"},
    "flow": {"n_min", "m_track", "target_mode", "anchor_index", "elimination_order",
             "residual_tol", "eigen_method"},
    "analysis": {"fixed_point_tol", "degeneracy_tol"},
    "output": {"format", "out", "workers"},
}


def read_config_file(path) -> dict:
    """Parse an INI run configuration into ``{section: {key: value}}``.

    Sections: ``[model]``, ``[flow]``, ``[analysis]``, ``[output]``. Unknown
    sections or keys raise ``ValueError``.
    """
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as f:
        parser.read_file(f)
    out = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ValueError(f"{path}: unknown section [{section}]")
        values = {}
        for key, raw in parser.items(section):
            if key not in _SECTIONS[section]:
                raise ValueError(f"{path}: unknown key {key!r} in [{section}]")
            try:
                if key in _INT_KEYS:
                    values[key] = int(raw)
                elif key in _FLOAT_KEYS:
                    values[key] = float(raw)
                else:
                    values[key] = raw.strip()
            except ValueError:
                raise ValueError(f"{path}: [{section}] {key} = {raw!r} is not a valid number") from None
        out[section] = values
    return out
