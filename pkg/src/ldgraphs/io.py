"""CSV/JSON output with schema line, seed and config hash on every row."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np

SCHEMA = 1


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


def fmt(v) -> str:
    """Stable text form: repr for floats (round-trips exactly), str otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def write_csv(path, columns, rows, seed: int, cfg_hash: str) -> Path:
    """Write rows (dicts) with a '#schema=1' line and seed/config_hash columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = list(columns) + ["seed", "config_hash"]
    with open(path, "w", newline="") as fh:
        fh.write(f"#schema={SCHEMA}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([fmt(r.get(c)) for c in columns] + [str(seed), cfg_hash])
    return path


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#schema="):
            raise ValueError(f"{path}: missing schema line")
        return list(csv.DictReader(fh))


def write_manifest(path, command: str, config: dict, seed: int, outputs) -> Path:
    from . import __version__
    from .kernels import BACKEND

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "command": command,
        "config": _plain(config),
        "config_hash": config_hash(config),
        "seed": seed,
        "schema": SCHEMA,
        "outputs": [Path(o).name for o in outputs],
        "versions": {
            "ldgraphs": __version__,
            "backend": BACKEND,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": __import__("scipy").__version__,
            "platform": platform.platform(),
        },
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
