import json

import pytest

from mgtdetect import (
    AblationGrid,
    AblationRecord,
    grid_columns,
    load_records_dir,
    parse_csv,
    render_csv,
    render_markdown,
)
from mgtdetect.ablation import STATUS_DASH
from mgtdetect.errors import ConfigError, DataError, DuplicateCellError, MalformedRecordError


def ok(preset, frozen, length, value):
    return AblationRecord(preset=preset, frozen_layers=frozen,
                          input_length=length, macro_f1_pct=value)


def dash(preset, frozen, length):
    return AblationRecord(preset=preset, frozen_layers=frozen,
                          input_length=length, status=STATUS_DASH)


def test_record_validation():
    ok("Xsmall", 0, 256, 97.32)
    with pytest.raises(ConfigError):
        ok("Tiny", 0, 256, 1.0)
    with pytest.raises(ConfigError):
        ok("Xsmall", 5, 256, 1.0)
    with pytest.raises(ConfigError):
        ok("Xsmall", 0, 300, 1.0)
    with pytest.raises(ConfigError):
        AblationRecord(preset="Xsmall", frozen_layers=0, input_length=256)
    with pytest.raises(ConfigError):
        AblationRecord(preset="Xsmall", frozen_layers=0, input_length=256,
                       macro_f1_pct=1.0, status=STATUS_DASH)
    with pytest.raises(ConfigError):
        AblationRecord(preset="Xsmall", frozen_layers=0, input_length=256,
                       macro_f1_pct=1.0, status="maybe")


def test_frozen_layers_bounded_by_preset():
    """Small has 6 layers, so freezing 12 or 18 of them is impossible."""
    ok("Small", 6, 256, 90.0)
    with pytest.raises(ConfigError):
        ok("Small", 12, 256, 90.0)
    with pytest.raises(ConfigError):
        ok("Small", 18, 256, 90.0)
    ok("Large", 18, 256, 90.0)


def test_record_dict_round_trip():
    record = ok("Base", 12, 1024, 88.5)
    assert AblationRecord.from_dict(record.to_dict()) == record
    record = dash("Large", 18, 2048)
    assert AblationRecord.from_dict(record.to_dict()) == record
    with pytest.raises(MalformedRecordError):
        AblationRecord.from_dict({"preset": "Base"})


def test_grid_columns_jagged():
    assert grid_columns() == [
        ("Xsmall", 0), ("Xsmall", 6), ("Xsmall", 12),
        ("Small", 0), ("Small", 6),
        ("Base", 0), ("Base", 6), ("Base", 12),
        ("Large", 0), ("Large", 6), ("Large", 12), ("Large", 18),
    ]


def test_grid_duplicate_cell():
    grid = AblationGrid([ok("Xsmall", 0, 256, 97.32)])
    with pytest.raises(DuplicateCellError):
        grid.add(ok("Xsmall", 0, 256, 95.00))


def test_grid_value_semantics():
    grid = AblationGrid([ok("Xsmall", 0, 256, 97.32), dash("Small", 6, 256)])
    assert grid.value(256, "Xsmall", 0) == 97.32
    assert grid.value(256, "Small", 6) is None     # explicit dash
    assert grid.value(512, "Xsmall", 0) is None    # missing


def test_load_records_dir(tmp_path):
    records = [ok("Xsmall", 0, 256, 97.32), dash("Base", 6, 512)]
    for i, record in enumerate(records):
        (tmp_path / f"r{i}.json").write_text(json.dumps(record.to_dict()))
    grid = load_records_dir(tmp_path)
    assert len(grid) == 2
    assert grid.value(256, "Xsmall", 0) == 97.32

    (tmp_path / "r9.json").write_text(json.dumps(records[0].to_dict()))
    with pytest.raises(DuplicateCellError):
        load_records_dir(tmp_path)


def test_load_records_dir_errors(tmp_path):
    with pytest.raises(DataError):
        load_records_dir(tmp_path / "missing")
    (tmp_path / "bad.json").write_text("{nope")
    with pytest.raises(MalformedRecordError):
        load_records_dir(tmp_path)


def golden_column_grid():
    values = {256: 97.32, 512: 98.33, 1024: 86.38, 2048: 67.87}
    return AblationGrid([ok("Xsmall", 0, n, v) for n, v in values.items()])


def test_markdown_golden_column():
    lines = render_markdown(golden_column_grid()).splitlines()
    assert lines[0].split("|")[1].strip() == "input"
    assert lines[0].split("|")[2].strip() == "Xsmall/0"
    by_input = {line.split("|")[1].strip(): line.split("|")[2].strip()
                for line in lines[2:]}
    # the only populated column holds the row maximum, hence bold
    assert by_input == {"256": "**97.32**", "512": "**98.33**",
                        "1024": "**86.38**", "2048": "**67.87**"}


def test_markdown_bolds_best_per_row():
    grid = AblationGrid([
        ok("Xsmall", 0, 256, 90.0), ok("Small", 0, 256, 95.0),
        ok("Xsmall", 0, 512, 96.0), ok("Small", 0, 512, 92.0),
    ])
    text = render_markdown(grid)
    row256 = next(line for line in text.splitlines() if line.startswith("| 256"))
    row512 = next(line for line in text.splitlines() if line.startswith("| 512"))
    assert "**95.00**" in row256 and "**90.00**" not in row256
    assert "**96.00**" in row512 and "**92.00**" not in row512


def test_markdown_empty_grid():
    text = render_markdown(AblationGrid())
    lines = text.splitlines()
    assert len(lines) == 2 + 4  # header, separator, one row per input length
    assert all(cell.strip() == "-" for cell in lines[2].split("|")[2:-1])


def test_csv_round_trip_total_grid():
    """With every cell present, parsing the rendered CSV rebuilds the grid."""
    grid = AblationGrid()
    value = 60.0
    for length in (256, 512, 1024, 2048):
        for preset, k in grid_columns():
            if (preset, k) == ("Base", 6):
                grid.add(dash(preset, k, length))
            else:
                grid.add(ok(preset, k, length, round(value, 2)))
                value += 0.37
    assert parse_csv(render_csv(grid)) == grid


def test_csv_render_is_inverse_of_parse():
    text = render_csv(golden_column_grid())
    assert render_csv(parse_csv(text)) == text
    assert "97.32" in text and text.count("-") > 0


def test_csv_partial_grid_values_survive():
    grid = golden_column_grid()
    reparsed = parse_csv(render_csv(grid))
    for length in (256, 512, 1024, 2048):
        for preset, k in grid_columns():
            assert reparsed.value(length, preset, k) == grid.value(length, preset, k)


def test_csv_header_check():
    with pytest.raises(MalformedRecordError):
        parse_csv("input,Nope/0\n256,1.0\n")
    with pytest.raises(MalformedRecordError):
        parse_csv("")
