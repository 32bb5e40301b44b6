"""CSV and manifest output with reproducible formatting.

Floats are written with 12 significant digits and a fixed '\n' terminator so
that re-running a command produces byte-identical data files.
"""
from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

from .errors import ConfigError


def fmt(x: float) -> str:
    """12-significant-digit decimal text; negative zero is normalized."""
    x = float(x)
    if x == 0.0:
        x = 0.0
    return "%.12g" % x


def fmt_int(x) -> str:
    return "%d" % int(round(float(x)))


def write_csv(path: Path, header: str, rows) -> Path:
    """Write pre-formatted string rows under a fixed header."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    return path


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir: Path, command: str, config: dict, files, version: str) -> Path:
    """Record the run configuration and a checksum for every emitted file."""
    out_dir = Path(out_dir)
    entries = {}
    for path in files:
        path = Path(path)
        entries[path.name] = {
            "sha256": sha256_file(path),
            "bytes": path.stat().st_size,
        }
    manifest = {
        "artifact_version": version,
        "command": command,
        "config": config,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "files": entries,
    }
    target = out_dir / "manifest.json"
    target.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return target


def load_manifest(out_dir: Path) -> dict:
    path = Path(out_dir) / "manifest.json"
    if not path.is_file():
        raise ConfigError(f"no manifest.json in {out_dir}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest.json is not valid JSON: {exc}") from exc


def verify_manifest(out_dir: Path) -> list[str]:
    """Re-check every file listed in the manifest; return mismatch messages."""
    out_dir = Path(out_dir)
    manifest = load_manifest(out_dir)
    problems = []
    for name, entry in sorted(manifest.get("files", {}).items()):
        path = out_dir / name
        if not path.is_file():
            problems.append(f"{name}: missing")
            continue
        if path.stat().st_size != entry["bytes"]:
            problems.append(f"{name}: size changed")
            continue
        if sha256_file(path) != entry["sha256"]:
            problems.append(f"{name}: checksum mismatch")
    return problems
