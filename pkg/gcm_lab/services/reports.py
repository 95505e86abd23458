from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from gcm_lab.config import REPORTS_DIR, SCHEMA_VERSION


def to_plain(value: Any) -> Any:
    """Recursively turn numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


def dumps(payload: dict) -> str:
    return json.dumps(to_plain(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class ReportStore:
    def __init__(self, directory: Path | str = REPORTS_DIR) -> None:
        self.directory = Path(directory)

    def path_for(self, name: str) -> Path:
        return self.directory / f"{name}.json"

    def save(self, name: str, payload: dict) -> Path:
        """Write one report; the content never carries timestamps so reruns are byte-identical."""
        self.directory.mkdir(parents=True, exist_ok=True)
        body = {"schema_version": SCHEMA_VERSION, **payload}
        path = self.path_for(name)
        with path.open("w", encoding="utf-8") as f:
            f.write(dumps(body))
        return path

    def read(self, name: str) -> dict:
        path = self.path_for(name)
        if not path.exists():
            return {}
        with path.open("r", encoding="utf-8") as f:
            return json.load(f)

    def read_all(self) -> dict[str, dict]:
        if not self.directory.exists():
            return {}
        return {p.stem: self.read(p.stem) for p in sorted(self.directory.glob("*.json"))}
