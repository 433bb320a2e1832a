from __future__ import annotations

import csv
import io
import json
import os
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np
from sqlitedict import SqliteDict

# fixed CSV column orders
CORRECTOR_COLUMNS_1D = ("y1", "u", "H")
CORRECTOR_COLUMNS_2D = ("y1", "y2", "u", "H")
MEASURE_COLUMNS_1D = ("node", "y1", "alpha", "orientation", "weight")
MEASURE_COLUMNS_2D = ("node", "y1", "y2", "alpha", "orientation", "weight")
ERRORMAP_COLUMNS = ("lambda1", "lambda2", "phi", "hbar_formula", "hbar_pde", "abs_error", "hbar_linearized",
                    "linearized_error", "status")
SWEEP_COLUMNS = ("Q", "hbar", "envelope_lower", "envelope_upper", "status")
RATE_COLUMNS = ("eps", "sample", "norm", "error")
FIELD_COLUMNS = ("x", "u", "ubar")


def _plain(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dumps(data: Dict[str, Any]) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2, default=_plain)


def write_json(data: Dict[str, Any], path: Optional[str] = None, stream: Optional[TextIO] = None) -> Optional[str]:
    """Write to ``path`` when given, else to ``stream``."""
    text = dumps(data)
    if path is None:
        if stream is not None:
            stream.write(text + "\n")
        return None
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text + "\n")
    return path


def write_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], path: Optional[str] = None,
              stream: Optional[TextIO] = None) -> Optional[str]:
    if path is None:
        if stream is not None:
            _write_rows(stream, columns, rows)
        return None
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        _write_rows(f, columns, rows)
    return path


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    _write_rows(buffer, columns, rows)
    return buffer.getvalue()


def read_csv(path: str) -> List[Dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def _write_rows(stream: TextIO, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(stream)
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


class RunStore:
    """SQLite-backed key-value store of CLI run records."""

    def __init__(self, db_path: str = "app/data/runs.sqlite") -> None:
        _ensure_parent(db_path)
        self.db_path = db_path

    def save_run(self, command: str, config: Dict[str, Any], result: Dict[str, Any],
                 run_id: Optional[str] = None) -> str:
        created = datetime.now(timezone.utc)
        run_id = run_id or created.strftime("%Y%m%d%H%M%S%f")
        record = {"run_id": run_id, "command": command, "config": config,
                  "result": json.loads(dumps(result)), "created_at": created.isoformat()}
        with SqliteDict(self.db_path) as db:
            db[run_id] = record
            db.commit()
        return run_id

    def load_run(self, run_id: str) -> Optional[Dict[str, Any]]:
        with SqliteDict(self.db_path) as db:
            return db.get(run_id)

    def export_json(self, run_id: str, out_dir: str = "app/data") -> Optional[str]:
        record = self.load_run(run_id)
        if record is None:
            return None
        return write_json(record, os.path.join(out_dir, f"run_{run_id}.json"))

    def list_runs(self, limit: int = 10) -> List[Tuple[str, str, str]]:
        """Return [(run_id, command, created_at_iso)] for recent runs."""
        items: List[Tuple[str, str, str]] = []
        with SqliteDict(self.db_path) as db:
            for key, record in db.items():
                items.append((str(key), str(record.get("command", "")), str(record.get("created_at", ""))))
        items.sort(key=lambda x: x[0], reverse=True)
        return items[:limit]
