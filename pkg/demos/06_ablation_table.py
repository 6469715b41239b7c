"""
Collating a sweep into the grid table
=====================================

Each sweep run leaves one AblationRecord JSON; the collator arranges them
as input-length rows by (preset, frozen-layers) columns. Cells that are
structurally impossible or failed stay as dashes.
"""

from mgtdetect import AblationGrid, AblationRecord, grid_columns, parse_csv, render_csv, render_markdown

print("columns:", [f"{p}/{k}" for p, k in grid_columns()])

grid = AblationGrid()
sweep = [
    ("Xsmall", 0, 256, 97.32), ("Xsmall", 0, 512, 98.33),
    ("Xsmall", 0, 1024, 86.38), ("Xsmall", 0, 2048, 67.87),
    ("Small", 6, 256, 93.10), ("Small", 6, 512, 95.40),
    ("Base", 0, 512, 98.90),
]
for preset, frozen, length, value in sweep:
    grid.add(AblationRecord(preset=preset, frozen_layers=frozen,
                            input_length=length, macro_f1_pct=value))

# a run that ran out of memory gets an explicit dash
grid.add(AblationRecord(preset="Large", frozen_layers=0, input_length=2048, status="dash"))

print(render_markdown(grid))

# the CSV form parses back into an equal grid
csv_text = render_csv(grid)
reparsed = parse_csv(csv_text)
print("csv round-trips:", all(
    reparsed.value(n, p, k) == grid.value(n, p, k)
    for n in (256, 512, 1024, 2048) for p, k in grid_columns()))
