import json

import numpy as np
import pytest

from mgtdetect import (
    Arch,
    dataset_to_jsonl,
    random_weights,
    save_artifact,
    synthetic_dataset,
)
from mgtdetect.cli import main


def write_corpus(tmp_path, n_docs=3, seed=11, name="data.jsonl"):
    dataset, rule = synthetic_dataset(n_docs, seed=seed)
    data = tmp_path / name
    data.write_text(dataset_to_jsonl(dataset), encoding="utf-8")
    rule_path = tmp_path / "rule.json"
    rule_path.write_text(json.dumps(rule), encoding="utf-8")
    return data, rule_path, dataset


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_predict_mock_three_docs(tmp_path, capsys):
    data, rule, _ = write_corpus(tmp_path)
    out_file = tmp_path / "pred.jsonl"
    code, out, _ = run(capsys, "predict", "--backend", "mock", "--rule", str(rule),
                       "--data", str(data), "--out-file", str(out_file))
    assert code == 0
    assert "3 predictions" in out
    assert len(out_file.read_text().splitlines()) == 3


def test_predict_is_byte_deterministic(tmp_path, capsys):
    data, rule, _ = write_corpus(tmp_path)
    outputs = []
    for name in ("a.jsonl", "b.jsonl"):
        out_file = tmp_path / name
        code, _, _ = run(capsys, "predict", "--backend", "mock", "--rule", str(rule),
                         "--noise", "0.3", "--seed", "5",
                         "--data", str(data), "--out-file", str(out_file), "--dists")
        assert code == 0
        outputs.append(out_file.read_bytes())
    assert outputs[0] == outputs[1]


def test_predict_missing_rule_is_validation_error(tmp_path, capsys):
    data, _, _ = write_corpus(tmp_path)
    code, _, err = run(capsys, "predict", "--backend", "mock",
                       "--rule", str(tmp_path / "absent.json"),
                       "--data", str(data), "--out-file", str(tmp_path / "p.jsonl"))
    assert code == 2
    assert "--rule" in err


def test_predict_without_model_source(tmp_path, capsys):
    data, _, _ = write_corpus(tmp_path)
    code, _, err = run(capsys, "predict", "--data", str(data),
                       "--out-file", str(tmp_path / "p.jsonl"))
    assert code == 2
    assert "model" in err


def test_predict_unreadable_data_is_data_error(tmp_path, capsys):
    _, rule, _ = write_corpus(tmp_path)
    code, _, _ = run(capsys, "predict", "--backend", "mock", "--rule", str(rule),
                     "--data", str(tmp_path / "none.jsonl"),
                     "--out-file", str(tmp_path / "p.jsonl"))
    assert code == 3


def test_predict_off_grid_length_rejected(tmp_path, capsys):
    data, rule, _ = write_corpus(tmp_path)
    args = ["predict", "--backend", "mock", "--rule", str(rule), "--data", str(data),
            "--out-file", str(tmp_path / "p.jsonl"), "--max-subtokens", "300"]
    code, _, err = run(capsys, *args)
    assert code == 2
    assert "max_subtokens" in err
    code, _, _ = run(capsys, *args, "--allow-custom-length")
    assert code == 0


def test_evaluate_gold_vs_itself(tmp_path, capsys):
    data, rule, _ = write_corpus(tmp_path)
    pred = tmp_path / "pred.jsonl"
    run(capsys, "predict", "--backend", "mock", "--rule", str(rule),
        "--data", str(data), "--out-file", str(pred))
    code, out, _ = run(capsys, "evaluate", "--gold", str(data), "--pred", str(pred))
    assert code == 0
    assert out.strip() == "100.00"


def test_evaluate_engineered_eleven_fifteenths(tmp_path, capsys):
    """Two classes, F1 2/3 and 4/5: the printout is exactly 73.33."""
    gold = tmp_path / "gold.jsonl"
    gold.write_text('{"id":"d","text":"a b c d","tokens":["a","b","c","d"],"labels":[0,0,1,1]}\n')
    pred = tmp_path / "pred.jsonl"
    pred.write_text('{"doc_id":"d","labels":[0,1,1,1]}\n')
    code, out, _ = run(capsys, "evaluate", "--gold", str(gold), "--pred", str(pred))
    assert code == 0
    assert out.strip() == "73.33"


def test_evaluate_mismatched_ids(tmp_path, capsys):
    data, _, _ = write_corpus(tmp_path)
    pred = tmp_path / "pred.jsonl"
    pred.write_text('{"doc_id":"ghost","labels":[0]}\n')
    code, _, _ = run(capsys, "evaluate", "--gold", str(data), "--pred", str(pred))
    assert code == 3


def test_evaluate_table_and_json(tmp_path, capsys):
    data, rule, _ = write_corpus(tmp_path)
    pred = tmp_path / "pred.jsonl"
    run(capsys, "predict", "--backend", "mock", "--rule", str(rule),
        "--data", str(data), "--out-file", str(pred))
    json_out = tmp_path / "report.json"
    code, out, _ = run(capsys, "evaluate", "--gold", str(data), "--pred", str(pred),
                       "--table", "--json-out", str(json_out))
    assert code == 0
    assert "macro F1" in out
    report = json.loads(json_out.read_text())
    assert report["macro_f1"] == 1.0

    # byte-identical across runs
    first = json_out.read_bytes()
    run(capsys, "evaluate", "--gold", str(data), "--pred", str(pred),
        "--json-out", str(json_out))
    assert json_out.read_bytes() == first


def test_ensemble_identical_files_passthrough(tmp_path, capsys):
    data, rule, _ = write_corpus(tmp_path)
    pred = tmp_path / "pred.jsonl"
    run(capsys, "predict", "--backend", "mock", "--rule", str(rule),
        "--data", str(data), "--out-file", str(pred), "--dists")
    combined = tmp_path / "ens.jsonl"
    code, _, _ = run(capsys, "ensemble", "--pred", str(pred), "--pred", str(pred),
                     "--pred", str(pred), "--out-file", str(combined))
    assert code == 0
    want = [json.loads(line)["labels"] for line in pred.read_text().splitlines()]
    got = [json.loads(line)["labels"] for line in combined.read_text().splitlines()]
    assert got == want


def test_ensemble_evaluate_invariant(tmp_path, capsys):
    """evaluate(ensemble(p,p,p)) equals evaluate(p) for any prediction file."""
    data, rule, _ = write_corpus(tmp_path, seed=13)
    pred = tmp_path / "pred.jsonl"
    run(capsys, "predict", "--backend", "mock", "--rule", str(rule), "--noise", "0.25",
        "--data", str(data), "--out-file", str(pred), "--dists")
    combined = tmp_path / "ens.jsonl"
    run(capsys, "ensemble", "--pred", str(pred), "--pred", str(pred),
        "--pred", str(pred), "--out-file", str(combined))
    _, single, _ = run(capsys, "evaluate", "--gold", str(data), "--pred", str(pred))
    _, triple, _ = run(capsys, "evaluate", "--gold", str(data), "--pred", str(combined))
    assert single == triple


def test_ensemble_doc_set_mismatch(tmp_path, capsys):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    a.write_text('{"doc_id":"d1","labels":[0]}\n')
    b.write_text('{"doc_id":"d2","labels":[0]}\n')
    code, _, err = run(capsys, "ensemble", "--pred", str(a), "--pred", str(b),
                       "--out-file", str(tmp_path / "e.jsonl"))
    assert code == 3
    assert "doc" in err.lower()


def test_ensemble_lowest_id_policy_without_dists(tmp_path, capsys):
    a = tmp_path / "a.jsonl"
    a.write_text('{"doc_id":"d1","labels":[2]}\n')
    b = tmp_path / "b.jsonl"
    b.write_text('{"doc_id":"d1","labels":[3]}\n')
    out_file = tmp_path / "e.jsonl"
    # default policy needs distributions
    code, _, _ = run(capsys, "ensemble", "--pred", str(a), "--pred", str(b),
                     "--out-file", str(out_file))
    assert code == 3
    code, _, _ = run(capsys, "ensemble", "--pred", str(a), "--pred", str(b),
                     "--policy", "lowest_id", "--out-file", str(out_file))
    assert code == 0
    assert json.loads(out_file.read_text())["labels"] == [2]


def test_convert_csv(tmp_path, capsys):
    csv_path = tmp_path / "export.csv"
    csv_path.write_text(
        'id,text,tokens,labels\n'
        'a1,alpha beta,"[""alpha"", ""beta""]","[0, 2]"\n')
    out_file = tmp_path / "native.jsonl"
    code, _, _ = run(capsys, "convert", "--in", str(csv_path),
                     "--in-format", "csv", "--out", str(out_file))
    assert code == 0
    assert json.loads(out_file.read_text()) == {
        "id": "a1", "text": "alpha beta", "tokens": ["alpha", "beta"], "labels": [0, 2]}


def test_ablate_golden_column(tmp_path, capsys):
    records = tmp_path / "records"
    records.mkdir()
    for i, (length, value) in enumerate([(256, 97.32), (512, 98.33),
                                         (1024, 86.38), (2048, 67.87)]):
        (records / f"r{i}.json").write_text(json.dumps({
            "preset": "Xsmall", "frozen_layers": 0,
            "input_length": length, "macro_f1_pct": value, "status": "ok"}))
    code, out, _ = run(capsys, "ablate", "--records", str(records))
    assert code == 0
    assert "**97.32**" in out and "**67.87**" in out
    assert (records / "ablation.md").exists()
    assert (records / "ablation.csv").exists()


def test_ablate_invalid_record(tmp_path, capsys):
    records = tmp_path / "records"
    records.mkdir()
    (records / "bad.json").write_text(json.dumps({
        "preset": "Small", "frozen_layers": 18,
        "input_length": 256, "macro_f1_pct": 90.0, "status": "ok"}))
    code, _, _ = run(capsys, "ablate", "--records", str(records))
    assert code == 2


def test_report_spans(tmp_path, capsys):
    data, rule, _ = write_corpus(tmp_path, n_docs=1)
    pred = tmp_path / "pred.jsonl"
    run(capsys, "predict", "--backend", "mock", "--rule", str(rule),
        "--data", str(data), "--out-file", str(pred))
    code, out, _ = run(capsys, "report", "--pred", str(pred), "--gold", str(data))
    assert code == 0
    assert out.startswith("doc ")
    assert "disagreements vs gold: 0" in out


def test_config_file_drives_predict(tmp_path, capsys):
    data, rule, _ = write_corpus(tmp_path)
    config = tmp_path / "run.json"
    config.write_text(json.dumps({
        "datasets": {"test": str(data)},
        "max_subtokens": 1024,
        "seed": 3,
    }))
    out_file = tmp_path / "p.jsonl"
    code, _, _ = run(capsys, "--config", str(config), "predict", "--backend", "mock",
                     "--rule", str(rule), "--out-file", str(out_file))
    assert code == 0
    assert len(out_file.read_text().splitlines()) == 3


def test_config_validation_errors(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"max_subtokens": 300}))
    code, _, err = run(capsys, "--config", str(config), "evaluate",
                       "--gold", "x", "--pred", "y")
    assert code == 2
    assert "max_subtokens" in err

    config.write_text("{broken")
    code, _, err = run(capsys, "--config", str(config), "evaluate",
                       "--gold", "x", "--pred", "y")
    assert code == 2

    config.write_text(json.dumps({"models": [{"id": "m"}]}))
    code, _, err = run(capsys, "--config", str(config), "evaluate",
                       "--gold", "x", "--pred", "y")
    assert code == 2
    assert "models[0]" in err


def tiny_artifact(tmp_path, name="art"):
    vocab = ["<unk>", "<bos>", "<eos>"] + list("abcdefghij")
    arch = Arch(vocab_size=len(vocab), hidden_size=8, ffn_size=16, layers=6)
    rng = np.random.default_rng(0)
    return save_artifact(tmp_path / name, "Small", 256, vocab, 0, 1, 2,
                         random_weights(arch, 256, rng))


def test_predict_artifact_backend(tmp_path, capsys):
    root = tiny_artifact(tmp_path)
    data = tmp_path / "data.jsonl"
    data.write_text('{"id":"d","text":"abc de fgh","tokens":["abc","de","fgh"],"labels":[0,0,0]}\n')
    out_file = tmp_path / "p.jsonl"
    code, _, _ = run(capsys, "predict", "--model-dir", str(root),
                     "--data", str(data), "--max-subtokens", "256",
                     "--out-file", str(out_file))
    assert code == 0
    record = json.loads(out_file.read_text())
    assert len(record["labels"]) == 3


def test_artifact_root_env(tmp_path, capsys, monkeypatch):
    tiny_artifact(tmp_path, name="art")
    monkeypatch.setenv("MGTDETECT_ARTIFACTS_ROOT", str(tmp_path))
    data = tmp_path / "data.jsonl"
    data.write_text('{"id":"d","text":"ab cd","tokens":["ab","cd"],"labels":[0,0]}\n')
    out_file = tmp_path / "p.jsonl"
    code, _, _ = run(capsys, "predict", "--model-dir", "art",
                     "--data", str(data), "--max-subtokens", "256",
                     "--out-file", str(out_file))
    assert code == 0


def test_config_model_id_lookup(tmp_path, capsys):
    root = tiny_artifact(tmp_path)
    config = tmp_path / "run.json"
    config.write_text(json.dumps({
        "models": [{"id": "m1", "path": str(root)}],
        "max_subtokens": 256,
    }))
    data = tmp_path / "data.jsonl"
    data.write_text('{"id":"d","text":"ab","tokens":["ab"],"labels":[0]}\n')
    out_file = tmp_path / "p.jsonl"
    code, _, _ = run(capsys, "--config", str(config), "predict", "--model-id", "m1",
                     "--data", str(data), "--out-file", str(out_file))
    assert code == 0
    code, _, err = run(capsys, "--config", str(config), "predict", "--model-id", "mX",
                       "--data", str(data), "--out-file", str(out_file))
    assert code == 2
    assert "mX" in err
