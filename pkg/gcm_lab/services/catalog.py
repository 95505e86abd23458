from __future__ import annotations

import difflib
import re
from pathlib import Path

import yaml

from gcm_lab import models
from gcm_lab.config import LABELS_PATH
from gcm_lab.errors import UnknownLabelError

_LABEL = re.compile(r"^\s*([A-Za-z_]+)\s*(\(.*\))?\s*$")


class LabelCatalog:
    def __init__(self, path: Path = LABELS_PATH) -> None:
        self.path = path
        self._data = self._load()

    def _load(self) -> dict:
        if not self.path.exists():
            return {"functions": {}, "suites": {}}
        with self.path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        return {
            "functions": data.get("functions", {}),
            "suites": data.get("suites", {}),
        }

    def known_labels(self) -> list[str]:
        return sorted(self._data["functions"]) + sorted(self._data["suites"])

    def explain(self, label: str) -> models.ExplainEntry:
        match = _LABEL.match(label)
        head = match.group(1) if match else label
        has_args = bool(match and match.group(2))
        if has_args and head in self._data["functions"]:
            return self._entry(label, "function", self._data["functions"][head])
        if not has_args and head in self._data["suites"]:
            return self._entry(label, "suite", self._data["suites"][head])
        if not has_args and head in self._data["functions"]:
            return self._entry(label, "function", self._data["functions"][head])
        suggestions = difflib.get_close_matches(head, self.known_labels(), n=3, cutoff=0.5)
        raise UnknownLabelError(label, suggestions)

    @staticmethod
    def _entry(label: str, kind: str, raw: dict) -> models.ExplainEntry:
        return models.ExplainEntry(
            label=label.strip(),
            kind=kind,
            title=raw.get("title", ""),
            formula=raw.get("formula", ""),
            citation=raw.get("citation", ""),
            description=" ".join(str(raw.get("description", "")).split()),
        )

    def render(self, label: str) -> str:
        entry = self.explain(label)
        source = f"  source: {entry.citation}\n" if entry.citation else ""
        return f"{entry.label}: {entry.title}\n  {entry.formula}\n{source}\n{entry.description}\n"
