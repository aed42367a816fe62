"""Reproducibility envelope written next to every pipeline output."""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

from .io_utils import write_json

MANIFEST_NAME = "manifest.json"


def file_digest(path: str | Path) -> str:
    hasher = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            hasher.update(chunk)
    return hasher.hexdigest()


class RunManifest:
    def __init__(self, command: str, config: dict, backend: Optional[str] = None):
        self.command = command
        self.config = config
        self.backend = backend
        self.inputs: dict[str, str] = {}
        self.outputs: list[str] = []
        self.stats: dict[str, Any] = {}
        self.started = datetime.now(timezone.utc).isoformat()
        self.finished: Optional[str] = None

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = file_digest(path)

    def add_output(self, path: str | Path) -> None:
        self.outputs.append(str(path))

    def finish(self) -> None:
        self.finished = datetime.now(timezone.utc).isoformat()

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "backend": self.backend,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "stats": self.stats,
            "started": self.started,
            "finished": self.finished,
        }

    def write(self, out_dir: str | Path) -> Path:
        self.finish()
        path = Path(out_dir) / MANIFEST_NAME
        write_json(path, self.to_dict())
        return path


def load_manifest(out_dir: str | Path) -> dict:
    return json.loads((Path(out_dir) / MANIFEST_NAME).read_text(encoding="utf-8"))
