"""Tabular output for sweeps and hysteresis traces.

Files are plain CSV with a JSON sidecar holding the resolved configuration.
Floats are written with ``repr`` so output is byte-for-byte reproducible.
"""
from __future__ import annotations

import csv
import io
import json
import math

from .experiments import SweepVariable
from .params import TWO_PI

MAX_ROOTS = 5

SWEEP_COLUMNS = (["abscissa"] + [f"m_root_{k}" for k in range(1, MAX_ROOTS + 1)]
                 + [f"stab_{k}" for k in range(1, MAX_ROOTS + 1)]
                 + ["m1", "m2", "nr_abs", "nr_db", "flags"])

HYSTERESIS_COLUMNS = ["abscissa", "M_forward", "M_backward", "jump_forward",
                      "jump_backward"]

# abscissa column: (unit label, divisor from internal SI)
ABSCISSA_OUTPUT = {
    SweepVariable.POWER: ("W", 1.0),
    SweepVariable.DETUNING: ("Hz (f/2pi)", TWO_PI),
    SweepVariable.BIAS_FIELD: ("T", 1.0),
    SweepVariable.KERR: ("Hz (f/2pi)", TWO_PI),
}


def fmt(x):
    if x is None:
        return ""
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def abscissa_value(variable, x):
    return x / ABSCISSA_OUTPUT[SweepVariable(variable)][1]


def sweep_rows(records, variable):
    for r in records:
        roots = list(r.roots)[:MAX_ROOTS]
        ms = [fmt(m) for m, _ in roots] + [""] * (MAX_ROOTS - len(roots))
        st = [s.value for _, s in roots] + [""] * (MAX_ROOTS - len(roots))
        yield ([fmt(abscissa_value(variable, r.abscissa))] + ms + st
               + [fmt(r.m1), fmt(r.m2), fmt(r.nr_abs), fmt(r.nr_db), ";".join(r.flags)])


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def sweep_csv(records, variable):
    return _csv_text(SWEEP_COLUMNS, sweep_rows(records, variable))


def hysteresis_csv(xs, forward, backward, jumps_fwd, jumps_bwd, variable):
    jf, jb = set(jumps_fwd), set(jumps_bwd)
    rows = ([fmt(abscissa_value(variable, x)), fmt(f), fmt(b), int(i in jf), int(i in jb)]
            for i, (x, f, b) in enumerate(zip(xs, forward, backward)))
    return _csv_text(HYSTERESIS_COLUMNS, rows)


def metadata(config, kind, variable, columns, version):
    return {
        "package": "kerrmag",
        "version": version,
        "kind": kind,
        "abscissa_unit": ABSCISSA_OUTPUT[SweepVariable(variable)][0],
        "m_unit": "dimensionless magnon number |m_s|^2",
        "columns": list(columns),
        "config": dict(config.values),
        "config_text": config.render(),
    }


def sidecar_path(path):
    return f"{path}.meta.json"


def write_table(path, text, meta):
    """Write the CSV and its sidecar; OSError propagates to the caller."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    with open(sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
