"""Collation of hyperparameter-sweep results into the grid table.

One record per (preset, frozen layers, input length) cell, carrying the
test macro-F1 percentage or an explicit dash for configurations that did
not produce a usable model. The table has one row per input length and one
column per (preset, frozen-layer) combination that is structurally valid,
i.e. frozen count not above the preset's layer count.
"""

from __future__ import annotations

import io
import json
from csv import reader as csv_reader
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, DataError, DuplicateCellError, MalformedRecordError
from .scoring import INPUT_LENGTH_GRID, PRESETS

FROZEN_LAYER_GRID = (0, 6, 12, 18)

PRESET_ORDER = ("Xsmall", "Small", "Base", "Large")

STATUS_OK = "ok"
STATUS_DASH = "dash"


@dataclass(frozen=True)
class AblationRecord:
    """Outcome of one sweep cell; status 'dash' marks a failed configuration."""

    preset: str
    frozen_layers: int
    input_length: int
    macro_f1_pct: float | None = None
    status: str = STATUS_OK

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        if self.frozen_layers not in FROZEN_LAYER_GRID:
            raise ConfigError(f"frozen_layers {self.frozen_layers} not in {FROZEN_LAYER_GRID}")
        if self.frozen_layers > PRESETS[self.preset].layers:
            raise ConfigError(
                f"frozen_layers {self.frozen_layers} exceeds {self.preset}'s "
                f"{PRESETS[self.preset].layers} layers")
        if self.input_length not in INPUT_LENGTH_GRID:
            raise ConfigError(f"input_length {self.input_length} not in {INPUT_LENGTH_GRID}")
        if self.status not in (STATUS_OK, STATUS_DASH):
            raise ConfigError(f"status must be '{STATUS_OK}' or '{STATUS_DASH}', got {self.status!r}")
        if self.status == STATUS_OK and self.macro_f1_pct is None:
            raise ConfigError("an 'ok' record needs macro_f1_pct")
        if self.status == STATUS_DASH and self.macro_f1_pct is not None:
            raise ConfigError("a 'dash' record must not carry macro_f1_pct")

    @property
    def cell(self) -> tuple[int, str, int]:
        return (self.input_length, self.preset, self.frozen_layers)

    def to_dict(self) -> dict:
        return {
            "preset": self.preset,
            "frozen_layers": self.frozen_layers,
            "input_length": self.input_length,
            "macro_f1_pct": self.macro_f1_pct,
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AblationRecord":
        try:
            value = raw.get("macro_f1_pct")
            return cls(preset=raw["preset"],
                       frozen_layers=int(raw["frozen_layers"]),
                       input_length=int(raw["input_length"]),
                       macro_f1_pct=None if value is None else float(value),
                       status=raw.get("status", STATUS_OK))
        except KeyError as exc:
            raise MalformedRecordError(f"ablation record missing field {exc}") from exc


def grid_columns() -> list[tuple[str, int]]:
    """All structurally valid (preset, frozen layers) columns, preset-major."""
    return [(name, k)
            for name in PRESET_ORDER
            for k in FROZEN_LAYER_GRID
            if k <= PRESETS[name].layers]


class AblationGrid:
    """Cell map keyed by (input_length, preset, frozen_layers)."""

    def __init__(self, records: list[AblationRecord] | None = None):
        self.cells: dict[tuple[int, str, int], AblationRecord] = {}
        for record in records or []:
            self.add(record)

    def add(self, record: AblationRecord) -> None:
        if record.cell in self.cells:
            raise DuplicateCellError(f"two records for cell {record.cell}")
        self.cells[record.cell] = record

    def value(self, input_length: int, preset: str, frozen: int) -> float | None:
        record = self.cells.get((input_length, preset, frozen))
        if record is None or record.status == STATUS_DASH:
            return None
        return record.macro_f1_pct

    def __len__(self) -> int:
        return len(self.cells)

    def __eq__(self, other) -> bool:
        return isinstance(other, AblationGrid) and self.cells == other.cells


def load_records_dir(path) -> AblationGrid:
    """Read every *.json record in a directory into a grid."""
    root = Path(path)
    if not root.is_dir():
        raise DataError(f"not a directory: {root}")
    grid = AblationGrid()
    for file in sorted(root.glob("*.json")):
        try:
            raw = json.loads(file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedRecordError(f"{file}: invalid JSON: {exc}") from exc
        grid.add(AblationRecord.from_dict(raw))
    return grid


def _cell_text(grid: AblationGrid, input_length: int, preset: str, frozen: int) -> str:
    value = grid.value(input_length, preset, frozen)
    return "-" if value is None else f"{value:.2f}"


def render_markdown(grid: AblationGrid) -> str:
    """Markdown grid table; the best value in each row is bold."""
    columns = grid_columns()
    header = ["input"] + [f"{preset}/{k}" for preset, k in columns]
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join("---" for _ in header) + "|"]
    for input_length in INPUT_LENGTH_GRID:
        values = [grid.value(input_length, preset, k) for preset, k in columns]
        present = [v for v in values if v is not None]
        best = max(present) if present else None
        cells = [str(input_length)]
        for v in values:
            if v is None:
                cells.append("-")
            elif best is not None and v == best:
                cells.append(f"**{v:.2f}**")
            else:
                cells.append(f"{v:.2f}")
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def render_csv(grid: AblationGrid) -> str:
    """CSV form of the grid; parse_csv is its exact inverse."""
    columns = grid_columns()
    lines = [",".join(["input"] + [f"{preset}/{k}" for preset, k in columns])]
    for input_length in INPUT_LENGTH_GRID:
        cells = [str(input_length)] + [_cell_text(grid, input_length, preset, k)
                                       for preset, k in columns]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> AblationGrid:
    """Parse a grid CSV produced by render_csv back into an AblationGrid."""
    rows = list(csv_reader(io.StringIO(text)))
    if not rows:
        raise MalformedRecordError("empty ablation CSV")
    header = rows[0]
    expected = ["input"] + [f"{preset}/{k}" for preset, k in grid_columns()]
    if header != expected:
        raise MalformedRecordError(f"unexpected ablation CSV header: {header}")
    grid = AblationGrid()
    for row in rows[1:]:
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRecordError(f"row has {len(row)} cells, expected {len(header)}")
        input_length = int(row[0])
        for (preset, k), cell in zip(grid_columns(), row[1:]):
            if cell == "-":
                grid.add(AblationRecord(preset=preset, frozen_layers=k,
                                        input_length=input_length, status=STATUS_DASH))
            else:
                grid.add(AblationRecord(preset=preset, frozen_layers=k,
                                        input_length=input_length,
                                        macro_f1_pct=float(cell)))
    return grid
