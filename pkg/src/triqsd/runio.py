"""Serialization of run results: versioned CSV and metadata JSON.

The results CSV starts with one comment line carrying the schema version
and the compact config echo, then the fixed header
``time,fidelity,fidelity_stderr,jx,jy,jz,trace,trace_stderr``.  Oracle
series reuse the identical schema with zero standard errors so downstream
plotting code handles both.  Numbers are written with 17 significant
digits, so a rerun with the same seed reproduces the file byte for byte.
"""

import json

import numpy as np

from .config import SCHEMA_VERSION, RunConfig
from .ensemble import DensitySeries

CSV_HEADER = "time,fidelity,fidelity_stderr,jx,jy,jz,trace,trace_stderr"


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _comment_line(config: RunConfig) -> str:
    return "# %s config=%s" % (SCHEMA_VERSION, config.to_json(compact=True))


def write_results_csv(path, series: DensitySeries, config: RunConfig) -> None:
    rows = [_comment_line(config), CSV_HEADER]
    for i, t in enumerate(series.times):
        rows.append(
            ",".join(
                _fmt(v)
                for v in (
                    t,
                    series.fidelity[i],
                    series.fidelity_stderr[i],
                    series.jx[i],
                    series.jy[i],
                    series.jz[i],
                    series.trace[i],
                    series.trace_stderr[i],
                )
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")


def write_oracle_csv(path, times, fidelity, jx, jy, jz, trace, config: RunConfig) -> None:
    rows = [_comment_line(config), CSV_HEADER]
    for i, t in enumerate(times):
        rows.append(
            ",".join(
                _fmt(v)
                for v in (t, fidelity[i], 0.0, jx[i], jy[i], jz[i], trace[i], 0.0)
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")


def write_coefficients_csv(path, tables) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if tables.model == "dephasing":
            fh.write("t,f\n")
            for t, v in zip(tables.times, tables.f):
                fh.write("%s,%s\n" % (_fmt(t), _fmt(v)))
        else:
            fh.write("t,re_f1,im_f1,re_f2,im_f2,re_f3,im_f3,re_f4,im_f4\n")
            for i, t in enumerate(tables.times):
                vals = [t]
                for arr in (tables.f1, tables.f2, tables.f3, tables.f4):
                    vals.extend([arr[i].real, arr[i].imag])
                fh.write(",".join(_fmt(v) for v in vals) + "\n")


def write_metadata(
    path,
    config: RunConfig,
    schedule,
    series: DensitySeries,
    wall_time_s: float,
    backend: str,
    version: str,
) -> None:
    meta = {
        "schema": SCHEMA_VERSION,
        "version": version,
        "backend": backend,
        "config": config.to_dict(),
        "pulse_times": {
            "outer": list(schedule.outer_times),
            "inner": list(schedule.inner_times),
        },
        "n_output_times": int(len(series.times)),
        "component_weights": list(series.component_weights),
        "positivity_tol": series.positivity_tol,
        "positivity_violations": [
            {"time": t, "min_eigenvalue": e} for t, e in series.positivity_violations
        ],
        "frame": series.frame,
        "fidelity_convention": series.fidelity_convention,
        "wall_time_s": wall_time_s,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_results_csv(path):
    """Parse a results/oracle CSV back into arrays (column name -> array)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    data_lines = [ln for ln in lines if ln and not ln.startswith("#")]
    header = data_lines[0].split(",")
    cols = {name: [] for name in header}
    for ln in data_lines[1:]:
        for name, val in zip(header, ln.split(",")):
            cols[name].append(float(val))
    return {name: np.array(vals) for name, vals in cols.items()}
