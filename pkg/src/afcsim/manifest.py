"""Run manifests: config snapshot, seed, and content hashes of outputs."""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


class RunManifest:
    """Collects emitted files during a run and writes manifest.json.

    Re-running with an identical config and seed reproduces identical
    hashes for every numeric output; the timestamps recorded here are
    metadata and are not part of that guarantee.
    """

    def __init__(self, config_snapshot: dict, seed: int, tool_version: str):
        self.config_snapshot = config_snapshot
        self.seed = seed
        self.tool_version = tool_version
        self.started = datetime.now(timezone.utc).isoformat()
        self.files: list[dict] = []

    def add_file(self, path: str | Path, base_dir: str | Path) -> None:
        path = Path(path)
        self.files.append(
            {
                "path": str(path.relative_to(base_dir)),
                "sha256": sha256_file(path),
                "bytes": path.stat().st_size,
            }
        )

    def write(self, out_dir: str | Path) -> Path:
        out = Path(out_dir) / "manifest.json"
        payload = {
            "tool_version": self.tool_version,
            "seed": self.seed,
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "config": self.config_snapshot,
            "files": self.files,
        }
        out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return out
