"""Command-line surface: convert, predict, ensemble, evaluate, ablate, report.

Exit codes: 0 success, 2 validation error (bad flags or config), 3 data
error (unreadable or inconsistent inputs). Output files are written via a
temp file plus rename, so concurrent sweeps never see partial results.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .ablation import load_records_dir, render_csv, render_markdown
from .alignment import AGGREGATION_STRATEGIES
from .artifacts import load_artifact_dir
from .corpus import FORMATS, dataset_to_jsonl, load_dataset
from .ensemble import TIE_POLICIES, majority_vote, vote_tallies
from .errors import (
    ConfigError,
    DataError,
    DocIdMismatchError,
    MissingDistributionsError,
    ValidationError,
)
from .evaluation import evaluate_dataset, format_pct
from .reporting import (
    PredictionRecord,
    dists_array,
    predictions_as_map,
    read_predictions,
    render_span_report,
    write_predictions,
)
from .scoring import INPUT_LENGTH_GRID, mock_scorer, predict_document

ARTIFACTS_ROOT_ENV = "MGTDETECT_ARTIFACTS_ROOT"


@dataclass
class ModelRef:
    id: str
    path: str


@dataclass
class RunConfig:
    """Run configuration; loadable from a JSON file via --config."""

    datasets: dict[str, str] = field(default_factory=dict)
    models: list[ModelRef] = field(default_factory=list)
    max_subtokens: int = 512
    aggregation: str = "mean"
    ensemble_members: list[str] = field(default_factory=list)
    tie_policy: str = "sum_probability_then_lowest_id"
    out_dir: str | None = None
    seed: int = 0
    allow_custom_length: bool = False

    def validate(self) -> None:
        if self.max_subtokens not in INPUT_LENGTH_GRID and not self.allow_custom_length:
            raise ConfigError(
                f"max_subtokens: {self.max_subtokens} not in {INPUT_LENGTH_GRID} "
                "(set allow_custom_length to override)")
        if self.max_subtokens < 3:
            raise ConfigError(f"max_subtokens: {self.max_subtokens} leaves no room for content")
        if self.aggregation not in AGGREGATION_STRATEGIES:
            raise ConfigError(f"aggregation: unknown strategy {self.aggregation!r}")
        if self.tie_policy not in TIE_POLICIES:
            raise ConfigError(f"tie_policy: unknown policy {self.tie_policy!r}")
        seen = set()
        for i, model in enumerate(self.models):
            if not model.id:
                raise ConfigError(f"models[{i}].id: empty")
            if model.id in seen:
                raise ConfigError(f"models[{i}].id: duplicate {model.id!r}")
            seen.add(model.id)
            if not model.path:
                raise ConfigError(f"models[{i}].path: empty")


def load_run_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path}: expected a JSON object")
    models = []
    for i, entry in enumerate(raw.get("models", [])):
        if not isinstance(entry, dict) or "id" not in entry or "path" not in entry:
            raise ConfigError(f"models[{i}]: expected an object with id and path")
        models.append(ModelRef(id=str(entry["id"]), path=str(entry["path"])))
    ensemble_raw = raw.get("ensemble", {})
    config = RunConfig(
        datasets={str(k): str(v) for k, v in raw.get("datasets", {}).items()},
        models=models,
        max_subtokens=int(raw.get("max_subtokens", 512)),
        aggregation=str(raw.get("aggregation", "mean")),
        ensemble_members=[str(m) for m in ensemble_raw.get("member_ids", [])],
        tie_policy=str(ensemble_raw.get("tie_policy", "sum_probability_then_lowest_id")),
        out_dir=raw.get("out_dir"),
        seed=int(raw.get("seed", 0)),
        allow_custom_length=bool(raw.get("allow_custom_length", False)),
    )
    config.validate()
    return config


def resolve_artifact_path(path: str) -> Path:
    """Relative artifact paths resolve against $MGTDETECT_ARTIFACTS_ROOT if set."""
    p = Path(path)
    root = os.environ.get(ARTIFACTS_ROOT_ENV)
    if root and not p.is_absolute():
        return Path(root) / p
    return p


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- subcommands --

def cmd_convert(args) -> int:
    if args.in_format not in FORMATS:
        raise ConfigError(f"--in-format: unknown format {args.in_format!r}")
    dataset = load_dataset(args.infile, format=args.in_format, split=args.split)
    atomic_write_text(args.out_file, dataset_to_jsonl(dataset))
    print(f"wrote {len(dataset)} documents to {args.out_file}")
    return 0


def _build_scorer(args, config: RunConfig):
    if args.backend == "mock":
        if not args.rule:
            raise ConfigError("--rule: required for the mock backend")
        try:
            rule_raw = json.loads(Path(args.rule).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"--rule: file not found: {args.rule}") from exc
        rule = {str(word): int(label) for word, label in rule_raw.items()}
        return mock_scorer(rule, noise_rate=args.noise, seed=config.seed,
                           id=args.model_id or f"mock-{config.seed}")
    if args.model_dir:
        return load_artifact_dir(resolve_artifact_path(args.model_dir),
                                 id=args.model_id or "")
    if args.model_id:
        for model in config.models:
            if model.id == args.model_id:
                return load_artifact_dir(resolve_artifact_path(model.path), id=model.id)
        raise ConfigError(f"--model-id: {args.model_id!r} not found in config models")
    raise ConfigError("--model-dir or --model-id: required for the artifact backend")


def cmd_predict(args, config: RunConfig) -> int:
    data_path = args.data or config.datasets.get(args.split)
    if not data_path:
        raise ConfigError(f"--data: no dataset given (and none in config for split {args.split!r})")
    scorer = _build_scorer(args, config)
    dataset = load_dataset(data_path, split=args.split)

    records = []
    for doc in dataset:
        prediction = predict_document(scorer, doc, config.max_subtokens, config.aggregation)
        dists = tuple(tuple(row) for row in prediction.dists) if args.dists else None
        records.append(PredictionRecord(doc_id=doc.id, labels=prediction.labels, dists=dists))

    buffer = io.StringIO()
    write_predictions(records, buffer)
    atomic_write_text(args.out_file, buffer.getvalue())
    print(f"wrote {len(records)} predictions to {args.out_file}")
    return 0


def cmd_ensemble(args, config: RunConfig) -> int:
    all_records = []
    for pred_path in args.pred:
        with open(pred_path, "r", encoding="utf-8") as handle:
            all_records.append(read_predictions(handle))
    if not all_records:
        raise ConfigError("--pred: at least one prediction file required")

    id_sets = [tuple(r.doc_id for r in records) for records in all_records]
    doc_ids = id_sets[0]
    for path, ids in zip(args.pred[1:], id_sets[1:]):
        if set(ids) != set(doc_ids):
            raise DocIdMismatchError(
                f"{args.pred[0]} and {path} cover different document ids")

    by_id = [{r.doc_id: r for r in records} for records in all_records]
    policy = args.policy or config.tie_policy
    out_records = []
    for doc_id in doc_ids:
        members = [m[doc_id] for m in by_id]
        labels_in = [m.labels for m in members]
        dists_in = None
        if policy == "sum_probability_then_lowest_id":
            if any(m.dists is None for m in members):
                raise MissingDistributionsError(
                    f"tie policy {policy} needs prediction files written with --dists")
            dists_in = [dists_array(m) for m in members]
        voted = majority_vote(labels_in, dists_in, policy=policy)
        tallies = None
        if args.tallies:
            tallies = tuple(tuple(int(c) for c in row) for row in vote_tallies(labels_in))
        out_records.append(PredictionRecord(doc_id=doc_id, labels=tuple(voted), tallies=tallies))

    buffer = io.StringIO()
    write_predictions(out_records, buffer)
    atomic_write_text(args.out_file, buffer.getvalue())
    print(f"wrote {len(out_records)} ensembled predictions to {args.out_file}")
    return 0


def cmd_evaluate(args, config: RunConfig) -> int:
    gold = load_dataset(args.gold, split="gold")
    with open(args.pred, "r", encoding="utf-8") as handle:
        predictions = predictions_as_map(read_predictions(handle))
    report = evaluate_dataset(gold, predictions, class_policy=args.policy)
    print(format_pct(report.macro_f1))
    if args.table:
        print(report.to_table())
    if args.json_out:
        atomic_write_text(args.json_out, report.to_json() + "\n")
    return 0


def cmd_ablate(args, out_dir: str | None) -> int:
    grid = load_records_dir(args.records)
    markdown = render_markdown(grid)
    csv_text = render_csv(grid)
    target = Path(out_dir) if out_dir else Path(args.records)
    atomic_write_text(target / "ablation.md", markdown)
    atomic_write_text(target / "ablation.csv", csv_text)
    print(markdown, end="")
    return 0


def cmd_report(args) -> int:
    with open(args.pred, "r", encoding="utf-8") as handle:
        records = read_predictions(handle)
    gold_by_id = {}
    if args.gold:
        gold_by_id = load_dataset(args.gold, split="gold").by_id()
    chunks = []
    for record in records:
        chunks.append(render_span_report(record, gold_by_id.get(record.doc_id)))
    text = "\n".join(chunks)
    if args.out_file:
        atomic_write_text(args.out_file, text)
    else:
        print(text, end="")
    return 0


def _add_globals(parser: argparse.ArgumentParser, suppress: bool,
                 include_out: bool = True) -> None:
    # Subparser copies use SUPPRESS so a pre-subcommand value survives.
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="run config JSON")
    parser.add_argument("--seed", type=int, default=default,
                        help="override the config seed")
    if include_out:
        parser.add_argument("--out", default=default, help="output directory override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mgtdetect",
        description="Token-level machine-generated-text detection pipeline")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, include_out=True, **kwargs):
        p = sub.add_parser(name, **kwargs)
        _add_globals(p, suppress=True, include_out=include_out)
        return p

    # convert owns --out as its output file, so it skips the global --out.
    p = add_parser("convert", include_out=False,
                   help="convert a tabular export to the native JSON-lines format")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--in-format", default="csv", choices=FORMATS)
    p.add_argument("--out", dest="out_file", required=True)
    p.add_argument("--split", default="test")

    p = add_parser("predict", help="run one scorer over a dataset")
    p.add_argument("--data", help="dataset JSON-lines path (default: config datasets[--split])")
    p.add_argument("--split", default="test")
    p.add_argument("--backend", default="artifact", choices=("artifact", "mock"))
    p.add_argument("--model-dir", help="artifact directory (artifact backend)")
    p.add_argument("--model-id", help="scorer id; with --config, selects from config models")
    p.add_argument("--rule", help="word→label JSON map (mock backend)")
    p.add_argument("--noise", type=float, default=0.0, help="mock noise rate")
    p.add_argument("--max-subtokens", type=int, help="override config max_subtokens")
    p.add_argument("--strategy", choices=AGGREGATION_STRATEGIES, help="override aggregation")
    p.add_argument("--dists", action="store_true", help="include per-word distributions")
    p.add_argument("--allow-custom-length", action="store_true")
    p.add_argument("--out-file", required=True)

    p = add_parser("ensemble", help="majority-vote prediction files")
    p.add_argument("--pred", action="append", required=True, help="prediction file (repeatable)")
    p.add_argument("--policy", choices=TIE_POLICIES)
    p.add_argument("--tallies", action="store_true", help="emit per-position vote tallies")
    p.add_argument("--out-file", required=True)

    p = add_parser("evaluate", help="macro-F1 of predictions against gold labels")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--policy", default="present", choices=("present", "all_four"))
    p.add_argument("--table", action="store_true", help="also print the per-class table")
    p.add_argument("--json-out", help="write the full report as JSON")

    p = add_parser("ablate", help="collate sweep records into the grid table")
    p.add_argument("--records", required=True, help="directory of ablation record JSON files")

    p = add_parser("report", help="span-level view of a prediction file")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold")
    p.add_argument("--out-file")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_run_config(args.config) if args.config else RunConfig()
        if args.seed is not None:
            config.seed = args.seed
        if args.out:
            config.out_dir = args.out
        if args.command == "predict":
            if args.max_subtokens is not None:
                config.max_subtokens = args.max_subtokens
            if args.strategy is not None:
                config.aggregation = args.strategy
            if args.allow_custom_length:
                config.allow_custom_length = True
            config.validate()
        if args.command == "convert":
            return cmd_convert(args)
        if args.command == "predict":
            return cmd_predict(args, config)
        if args.command == "ensemble":
            return cmd_ensemble(args, config)
        if args.command == "evaluate":
            return cmd_evaluate(args, config)
        if args.command == "ablate":
            return cmd_ablate(args, config.out_dir)
        if args.command == "report":
            return cmd_report(args)
        parser.error(f"unknown command {args.command!r}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
