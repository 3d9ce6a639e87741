"""Run manifests: what ran, with which flags, backends, and inputs.

A manifest is emitted next to every command's primary output so results can
be traced back to exact inputs (by digest) and backend variants.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping

from .output import write_json


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    command: str
    config: Mapping[str, Any]
    backends: Mapping[str, Any] = field(default_factory=dict)
    input_digests: Mapping[str, str] = field(default_factory=dict)
    started_at: str = ""
    finished_at: str = ""
    embed_texts: int = 0
    scorer_pairs: int = 0

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "config": dict(self.config),
            "backends": dict(self.backends),
            "input_digests": dict(self.input_digests),
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "embed_texts": self.embed_texts,
            "scorer_pairs": self.scorer_pairs,
        }

    def write(self, path: str | Path) -> None:
        write_json(path, self.to_json())
