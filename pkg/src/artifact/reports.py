"""JSON reports, CSV summaries and reproducibility manifests."""

import csv
import datetime
import hashlib
import io
import json
import math
import os
import platform
from importlib import metadata

import numpy as np

REPORT_KEYS = ("grid", "params", "modes", "probes", "manifest")


def tool_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def config_hash(config_bytes):
    return hashlib.sha256(config_bytes).hexdigest()


def manifest(config_bytes, command, cfg, seed=None, argv=None):
    return {
        "config_sha256": config_hash(config_bytes),
        "tool_version": tool_version(),
        "command": command,
        "seed": seed,
        "argv": list(argv) if argv is not None else None,
        "grid": {"L": cfg.grid.L, "n": cfg.grid.n},
        "date": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def to_jsonable(obj):
    """Recursively convert numpy scalars, arrays, tuples and complex numbers for JSON."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    return obj


def build_report(cfg, manifest_dict, modes=(), probes=(), **extra):
    report = {"grid": {"L": cfg.grid.L, "n": cfg.grid.n, "h": cfg.grid_spec.h},
              "params": {"omega": list(cfg.params.omega), "beta": list(cfg.params.beta)},
              "modes": list(modes), "probes": list(probes), "manifest": manifest_dict}
    report.update(extra)
    return to_jsonable(report)


def format_cell(v):
    """Fixed formatting: floats at 12 significant digits, None as empty."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.12g" % float(v)
    return str(v)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_cell(row.get(k)) for k in header])
    return buf.getvalue()


def write_outputs(out_dir, stem, report, header, rows, formats=("json", "csv")):
    """Write <stem>.json and <stem>.csv atomically; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if "json" in formats:
        paths.append(_atomic_write(os.path.join(out_dir, f"{stem}.json"),
                                   json.dumps(report, indent=2, sort_keys=True) + "\n"))
    if "csv" in formats:
        paths.append(_atomic_write(os.path.join(out_dir, f"{stem}.csv"), csv_text(header, rows)))
    return paths


def _atomic_write(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path
