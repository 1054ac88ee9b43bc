"""Deterministic CSV/JSON artifact writing and flat config files.

CSV bodies are byte-identical across reruns of the same (config, seed):
floats are written with repr (shortest round-trip), and anything
time-dependent (wall clock, host) is quarantined to the JSON manifest.

Config files are flat ``key = value`` text: ints, floats, booleans, strings
and comma-separated lists, with ``#`` comments.  Every experiment echoes its
fully resolved configuration (defaults included) into the manifest, so any
artifact can be reproduced from the manifest alone.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path


def _format_value(v) -> str:
    if hasattr(v, "item"):  # numpy scalar -> native
        v = v.item()
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_csv(path):
    """(header, rows-as-strings); numeric parsing is the caller's concern."""
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def sha256_file(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _parse_scalar(raw: str):
    raw = raw.strip()
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def parse_config(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, raw = line.split("=", 1)
        raw = raw.strip()
        if "," in raw:
            out[key.strip()] = [_parse_scalar(tok) for tok in raw.split(",") if tok.strip()]
        else:
            out[key.strip()] = _parse_scalar(raw)
    return out


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())


def render_config(cfg: dict) -> str:
    lines = []
    for key in sorted(cfg):
        v = cfg[key]
        if isinstance(v, (list, tuple)):
            lines.append(f"{key} = {', '.join(_format_value(x) for x in v)}")
        else:
            lines.append(f"{key} = {_format_value(v)}")
    return "\n".join(lines) + "\n"


def resolve_config(user: dict, schema: dict, name: str) -> dict:
    """Apply defaults and reject unknown keys.

    schema: key -> (default, doc).  A default of Ellipsis marks a required key.
    """
    unknown = set(user) - set(schema)
    if unknown:
        raise ValueError(f"{name}: unknown config keys {sorted(unknown)}")
    out = {}
    for key, (default, _doc) in schema.items():
        if key in user:
            out[key] = user[key]
        elif default is Ellipsis:
            raise ValueError(f"{name}: missing required config key {key!r}")
        else:
            out[key] = default
    return out


class ManifestWriter:
    """Collects outputs and telemetry for one experiment run."""

    def __init__(self, experiment: str, out_dir, config: dict, seed: int):
        self.experiment = experiment
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.config = dict(config)
        self.seed = seed
        self.outputs = []
        self.telemetry = {}
        self._t0 = time.perf_counter()

    def path(self, filename: str) -> Path:
        return self.out_dir / filename

    def register(self, path) -> None:
        path = Path(path)
        self.outputs.append({"path": path.name, "sha256": sha256_file(path)})

    def write_json(self, filename: str, payload: dict) -> Path:
        path = self.path(filename)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        self.register(path)
        return path

    def write_csv(self, filename: str, header, rows) -> Path:
        path = self.path(filename)
        write_csv(path, header, rows)
        self.register(path)
        return path

    def finalize(self, passed: bool, summary: dict) -> Path:
        import numpy
        import scipy

        from . import __version__

        try:
            import numba

            numba_version = numba.__version__
        except Exception:  # pragma: no cover
            numba_version = None
        config_text = render_config(self.config)
        manifest = {
            "experiment": self.experiment,
            "config": self.config,
            "config_sha256": sha256_text(config_text),
            "seed": self.seed,
            "passed": passed,
            "summary": summary,
            "outputs": self.outputs,
            "telemetry": dict(
                self.telemetry, wall_time_s=time.perf_counter() - self._t0
            ),
            "versions": {
                "rdex": __version__,
                "numpy": numpy.__version__,
                "scipy": scipy.__version__,
                "numba": numba_version,
            },
            "created_unix": time.time(),
        }
        path = self.path("manifest.json")
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return path
