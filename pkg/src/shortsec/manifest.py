"""Run manifests: what was computed, from which inputs, into which files.

A manifest is written next to every artifact the command line front end
produces. It carries the fully resolved parameter set, so feeding it back
via ``--config`` reproduces the run (bit-exact on analytic paths, and on
Monte Carlo paths too because the seed is part of the record).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict

from . import __version__


class RunManifest(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: str
    parameters: Dict[str, Any]
    seed: Optional[int] = None
    version: str = __version__
    duration_seconds: float
    outputs: Dict[str, str]  # file name -> sha256 hex digest


def file_digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(m: RunManifest, path: Path) -> Path:
    path.write_text(json.dumps(m.model_dump(), indent=2) + "\n", encoding="utf-8")
    return path
