from __future__ import annotations

import os
from pathlib import Path

try:
    from dotenv import load_dotenv
except Exception:  # pragma: no cover - optional dependency
    load_dotenv = None  # type: ignore[assignment]

BASE_DIR = Path(__file__).resolve().parent.parent
if load_dotenv:
    load_dotenv(BASE_DIR / ".env")
DATA_DIR = BASE_DIR / "data"
LABELS_PATH = DATA_DIR / "labels.yaml"
PRESETS_PATH = DATA_DIR / "presets.json"
REPORTS_DIR = Path(os.getenv("GCM_LAB_REPORTS_DIR", str(BASE_DIR / "reports")))

SCHEMA_VERSION = 1

GCM_LAB_THREADS = max(1, int(os.getenv("GCM_LAB_THREADS", str(min(8, os.cpu_count() or 1)))))
DEFAULT_N = int(os.getenv("GCM_LAB_N", "2"))
DEFAULT_TRIALS = int(os.getenv("GCM_LAB_TRIALS", "20"))
DEFAULT_TOL = float(os.getenv("GCM_LAB_TOL", "2e-5"))
DEFAULT_FD_STEP = float(os.getenv("GCM_LAB_FD_STEP", "1e-5"))
DEFAULT_ORDER = int(os.getenv("GCM_LAB_ORDER", "6"))
RANK_TOL = float(os.getenv("GCM_LAB_RANK_TOL", "1e-6"))
GAP_FLOOR = float(os.getenv("GCM_LAB_GAP_FLOOR", "1e-4"))
MAX_RESAMPLE = int(os.getenv("GCM_LAB_MAX_RESAMPLE", "50"))
LOG_LEVEL = os.getenv("GCM_LAB_LOG_LEVEL", "WARNING").upper()
