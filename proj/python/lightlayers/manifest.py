"""Reader for the manifest.jsonl written by `lightlayers gen-data`."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

MANIFEST_NAME = "manifest.jsonl"


@dataclass(frozen=True)
class Record:
    root: Path
    stem: str
    index: int
    seed: int
    resolution: int
    directional: bool
    exposure_scale: float
    gamma: float
    files: list[str] = field(default_factory=list)
    raw: dict[str, Any] = field(default_factory=dict, repr=False)

    @property
    def path(self) -> Path:
        """Layer-file stem, e.g. <root>/rec_00000."""
        return self.root / self.stem

    @property
    def composite(self) -> Path:
        return self.root / f"{self.stem}.composed.png"


def read_manifest(root: str | Path) -> list[Record]:
    root = Path(root)
    records = []
    with open(root / MANIFEST_NAME, encoding="utf-8") as f:
        for n, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                records.append(
                    Record(
                        root=root,
                        stem=entry["stem"],
                        index=int(entry["index"]),
                        seed=int(entry["seed"]),
                        resolution=int(entry["resolution"]),
                        directional=bool(entry["directional"]),
                        exposure_scale=float(entry["exposure_scale"]),
                        gamma=float(entry["gamma"]),
                        files=list(entry["files"]),
                        raw=entry,
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"{root / MANIFEST_NAME}:{n}: bad manifest line ({exc})") from exc
    return records
