from __future__ import annotations

import json
from pathlib import Path

from gcm_lab import models
from gcm_lab.config import PRESETS_PATH


class RunPresets:
    def __init__(self, path: Path = PRESETS_PATH) -> None:
        self.path = path

    def _load(self) -> list[dict]:
        if not self.path.exists():
            return []
        with self.path.open("r", encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, list):
            return []
        return data

    def list_presets(self) -> list[models.PresetSummary]:
        return [
            models.PresetSummary(name=p.get("name", ""), description=p.get("description", ""))
            for p in self._load()
        ]

    def get_preset(self, name: str | None = None) -> dict:
        presets = self._load()
        if not presets:
            raise ValueError("No presets configured")
        if not name:
            return dict(presets[0].get("config", {}))
        for preset in presets:
            if preset.get("name") == name:
                return dict(preset.get("config", {}))
        raise ValueError(f"Preset '{name}' not found")

    def build_config(self, name: str | None = None, **overrides) -> models.RunConfig:
        """Preset values with non-None overrides on top."""
        raw = self.get_preset(name)
        raw.update({("lambda" if k == "lam" else k): v for k, v in overrides.items() if v is not None})
        return models.RunConfig.model_validate(raw)
