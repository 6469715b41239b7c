"""Portable model artifacts: serialized tagger graphs plus their tokenizers.

An artifact directory holds three JSON files:

  metadata.json   tagger-artifact/1: preset name, max input length, class
                  count, label map, training config hash, file names
  model.json      tagger-graph/1: architecture sizes and all weights
  tokenizer.json  subtok-greedy/1: vocab list and special token ids

The graph is a small post-norm transformer encoder with single-head
attention, a tanh-approximation GELU feed-forward, and a linear softmax
head. Exporters in any language can target this format; inference here is
plain numpy. Weights are float32, stored as nested JSON lists.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alignment import Chunk, VocabSubtokenizer
from .corpus import NUM_CLASSES, LabelMap
from .errors import (
    ClassCountMismatchError,
    MetadataMismatchError,
    MissingFileError,
)
from .scoring import PRESETS, ChunkScores, ModelPreset

MODEL_FORMAT = "tagger-graph/1"
TOKENIZER_FORMAT = "subtok-greedy/1"
METADATA_FORMAT = "tagger-artifact/1"

METADATA_FILE = "metadata.json"
MODEL_FILE = "model.json"
TOKENIZER_FILE = "tokenizer.json"

LN_EPS = 1e-5
_GELU_C = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class Arch:
    """Actual graph dimensions; layer count always matches the preset."""

    vocab_size: int
    hidden_size: int
    ffn_size: int
    layers: int


def _layer_norm(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray) -> np.ndarray:
    mean = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return (x - mean) / np.sqrt(var + LN_EPS) * gamma + beta


def _gelu(x: np.ndarray) -> np.ndarray:
    # tanh approximation; the exporter must use the same formula
    return 0.5 * x * (1.0 + np.tanh(_GELU_C * (x + 0.044715 * x ** 3)))


def _softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


class TaggerGraph:
    """Numpy forward pass over a tagger-graph/1 weight set."""

    def __init__(self, arch: Arch, weights: dict, max_input_length: int):
        self.arch = arch
        self.max_input_length = max_input_length
        self.embedding = self._matrix(weights, "embedding", (arch.vocab_size, arch.hidden_size))
        self.positional = self._matrix(weights, "positional", (max_input_length, arch.hidden_size))
        layer_blocks = weights.get("layers")
        if not isinstance(layer_blocks, list) or len(layer_blocks) != arch.layers:
            raise MetadataMismatchError(
                f"expected {arch.layers} layer blocks, got "
                f"{len(layer_blocks) if isinstance(layer_blocks, list) else type(layer_blocks).__name__}")
        d, f = arch.hidden_size, arch.ffn_size
        self.layers = []
        for i, block in enumerate(layer_blocks):
            attn, ln1 = block.get("attn", {}), block.get("ln1", {})
            ffn, ln2 = block.get("ffn", {}), block.get("ln2", {})
            self.layers.append({
                "wq": self._matrix(attn, "wq", (d, d), f"layers[{i}].attn"),
                "bq": self._matrix(attn, "bq", (d,), f"layers[{i}].attn"),
                "wk": self._matrix(attn, "wk", (d, d), f"layers[{i}].attn"),
                "bk": self._matrix(attn, "bk", (d,), f"layers[{i}].attn"),
                "wv": self._matrix(attn, "wv", (d, d), f"layers[{i}].attn"),
                "bv": self._matrix(attn, "bv", (d,), f"layers[{i}].attn"),
                "wo": self._matrix(attn, "wo", (d, d), f"layers[{i}].attn"),
                "bo": self._matrix(attn, "bo", (d,), f"layers[{i}].attn"),
                "ln1_gamma": self._matrix(ln1, "gamma", (d,), f"layers[{i}].ln1"),
                "ln1_beta": self._matrix(ln1, "beta", (d,), f"layers[{i}].ln1"),
                "w1": self._matrix(ffn, "w1", (d, f), f"layers[{i}].ffn"),
                "b1": self._matrix(ffn, "b1", (f,), f"layers[{i}].ffn"),
                "w2": self._matrix(ffn, "w2", (f, d), f"layers[{i}].ffn"),
                "b2": self._matrix(ffn, "b2", (d,), f"layers[{i}].ffn"),
                "ln2_gamma": self._matrix(ln2, "gamma", (d,), f"layers[{i}].ln2"),
                "ln2_beta": self._matrix(ln2, "beta", (d,), f"layers[{i}].ln2"),
            })
        head = weights.get("head", {})
        self.head_w = self._matrix(head, "w", (d, NUM_CLASSES), "head")
        self.head_b = self._matrix(head, "b", (NUM_CLASSES,), "head")

    @staticmethod
    def _matrix(container: dict, name: str, shape: tuple, where: str = "weights") -> np.ndarray:
        value = container.get(name)
        if value is None:
            raise MetadataMismatchError(f"missing weight {where}.{name}")
        arr = np.asarray(value, dtype=np.float32)
        if arr.shape != shape:
            raise MetadataMismatchError(
                f"weight {where}.{name} has shape {arr.shape}, expected {shape}")
        return arr

    def forward(self, ids: list[int]) -> np.ndarray:
        """Class probabilities for every position of a full input sequence."""
        n = len(ids)
        if n > self.max_input_length:
            raise MetadataMismatchError(
                f"sequence of {n} subtokens exceeds the graph's input length {self.max_input_length}")
        idx = np.asarray(ids, dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= self.arch.vocab_size):
            raise MetadataMismatchError("subtoken id outside the graph's vocabulary")
        x = self.embedding[idx] + self.positional[:n]
        scale = np.float32(1.0 / math.sqrt(self.arch.hidden_size))
        for layer in self.layers:
            q = x @ layer["wq"] + layer["bq"]
            k = x @ layer["wk"] + layer["bk"]
            v = x @ layer["wv"] + layer["bv"]
            attn = _softmax((q @ k.T) * scale) @ v
            x = _layer_norm(x + attn @ layer["wo"] + layer["bo"],
                            layer["ln1_gamma"], layer["ln1_beta"])
            hidden = _gelu(x @ layer["w1"] + layer["b1"])
            x = _layer_norm(x + hidden @ layer["w2"] + layer["b2"],
                            layer["ln2_gamma"], layer["ln2_beta"])
        logits = (x @ self.head_w + self.head_b).astype(np.float64)
        return _softmax(logits)


@dataclass
class SerializedScorer:
    """Scorer backed by a loaded artifact (satisfies the Scorer protocol)."""

    id: str
    preset: ModelPreset
    max_input_length: int
    num_classes: int
    label_map: LabelMap
    training_config_hash: str
    subtokenizer: VocabSubtokenizer
    graph: TaggerGraph

    def score_chunk(self, chunk: Chunk) -> ChunkScores:
        tok = self.subtokenizer
        ids = [tok.bos_id, *chunk.subtoken_ids, tok.eos_id]
        probs = self.graph.forward(ids)
        return ChunkScores(probs[1:-1])


def _read_json(path: Path, what: str) -> dict:
    if not path.exists():
        raise MissingFileError(f"{what} file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MetadataMismatchError(f"{what} file {path} unreadable: {exc}") from exc
    if not isinstance(data, dict):
        raise MetadataMismatchError(f"{what} file {path} is not a JSON object")
    return data


def _require(data: dict, name: str, where: str):
    if name not in data:
        raise MetadataMismatchError(f"{where} missing field {name!r}")
    return data[name]


def load_serialized_scorer(model_path, tokenizer_path, id: str = "",
                           training_config_hash: str = "",
                           label_map: LabelMap | None = None) -> SerializedScorer:
    """Load a serialized graph plus its matching tokenizer as a Scorer.

    The two files must agree on the preset, the tokenizer vocab must match
    the graph's embedding table, and the class count must be 4.
    """
    model = _read_json(Path(model_path), "model")
    tokenizer = _read_json(Path(tokenizer_path), "tokenizer")

    if model.get("format") != MODEL_FORMAT:
        raise MetadataMismatchError(
            f"model format {model.get('format')!r}, expected {MODEL_FORMAT!r}")
    if tokenizer.get("format") != TOKENIZER_FORMAT:
        raise MetadataMismatchError(
            f"tokenizer format {tokenizer.get('format')!r}, expected {TOKENIZER_FORMAT!r}")

    preset_name = _require(model, "preset", "model")
    if preset_name not in PRESETS:
        raise MetadataMismatchError(f"unknown preset {preset_name!r}")
    if tokenizer.get("preset") != preset_name:
        raise MetadataMismatchError(
            f"tokenizer preset {tokenizer.get('preset')!r} does not match model preset {preset_name!r}")
    preset = PRESETS[preset_name]

    num_classes = int(_require(model, "num_classes", "model"))
    if num_classes != NUM_CLASSES:
        raise ClassCountMismatchError(f"model has {num_classes} classes, expected {NUM_CLASSES}")

    arch_raw = _require(model, "arch", "model")
    arch = Arch(vocab_size=int(_require(arch_raw, "vocab_size", "model.arch")),
                hidden_size=int(_require(arch_raw, "hidden_size", "model.arch")),
                ffn_size=int(_require(arch_raw, "ffn_size", "model.arch")),
                layers=int(_require(arch_raw, "layers", "model.arch")))
    if arch.layers != preset.layers:
        raise MetadataMismatchError(
            f"graph has {arch.layers} layers but preset {preset_name} has {preset.layers}")

    vocab = _require(tokenizer, "vocab", "tokenizer")
    if len(vocab) != arch.vocab_size:
        raise MetadataMismatchError(
            f"tokenizer vocab size {len(vocab)} does not match graph vocab size {arch.vocab_size}")
    subtok = VocabSubtokenizer(vocab,
                               unk_id=int(_require(tokenizer, "unk_id", "tokenizer")),
                               bos_id=int(_require(tokenizer, "bos_id", "tokenizer")),
                               eos_id=int(_require(tokenizer, "eos_id", "tokenizer")))

    max_input_length = int(_require(model, "max_input_length", "model"))
    graph = TaggerGraph(arch, _require(model, "weights", "model"), max_input_length)

    return SerializedScorer(id=id or Path(model_path).parent.name,
                            preset=preset,
                            max_input_length=max_input_length,
                            num_classes=num_classes,
                            label_map=label_map or LabelMap(),
                            training_config_hash=training_config_hash,
                            subtokenizer=subtok,
                            graph=graph)


def load_artifact_dir(path, id: str = "") -> SerializedScorer:
    """Load an artifact directory via its metadata.json."""
    root = Path(path)
    meta = _read_json(root / METADATA_FILE, "metadata")
    if meta.get("format") != METADATA_FORMAT:
        raise MetadataMismatchError(
            f"metadata format {meta.get('format')!r}, expected {METADATA_FORMAT!r}")
    label_map = LabelMap(names={int(k): str(v)
                                for k, v in _require(meta, "label_map", "metadata").items()})
    scorer = load_serialized_scorer(
        root / meta.get("model_file", MODEL_FILE),
        root / meta.get("tokenizer_file", TOKENIZER_FILE),
        id=id or root.name,
        training_config_hash=str(meta.get("training_config_hash", "")),
        label_map=label_map)
    for name in ("preset", "max_input_length", "num_classes"):
        model_value = getattr(scorer, name) if name != "preset" else scorer.preset.name
        if meta.get(name) != model_value:
            raise MetadataMismatchError(
                f"metadata {name}={meta.get(name)!r} disagrees with model {model_value!r}")
    return scorer


def save_artifact(path, preset_name: str, max_input_length: int,
                  vocab: list[str], unk_id: int, bos_id: int, eos_id: int,
                  weights: dict, label_map: LabelMap | None = None,
                  training_config_hash: str = "", dev_macro_f1: float | None = None) -> Path:
    """Write a complete artifact directory; returns its path.

    Weight arrays may be numpy; they are rounded to float32 and stored as
    nested lists.
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    label_map = label_map or LabelMap()

    def listify(value):
        if isinstance(value, np.ndarray):
            return value.astype(np.float32).tolist()
        if isinstance(value, dict):
            return {k: listify(v) for k, v in value.items()}
        if isinstance(value, list):
            return [listify(v) for v in value]
        return value

    embedding = np.asarray(weights["embedding"])
    layers = weights["layers"]
    ffn_size = np.asarray(layers[0]["ffn"]["w1"]).shape[1] if layers else 0
    model = {
        "format": MODEL_FORMAT,
        "preset": preset_name,
        "max_input_length": max_input_length,
        "num_classes": NUM_CLASSES,
        "arch": {
            "vocab_size": int(embedding.shape[0]),
            "hidden_size": int(embedding.shape[1]),
            "ffn_size": int(ffn_size),
            "layers": len(layers),
        },
        "weights": listify(weights),
    }
    tokenizer = {
        "format": TOKENIZER_FORMAT,
        "preset": preset_name,
        "vocab": list(vocab),
        "unk_id": unk_id,
        "bos_id": bos_id,
        "eos_id": eos_id,
    }
    metadata = {
        "format": METADATA_FORMAT,
        "preset": preset_name,
        "max_input_length": max_input_length,
        "num_classes": NUM_CLASSES,
        "label_map": {str(k): v for k, v in sorted(label_map.names.items())},
        "training_config_hash": training_config_hash,
        "dev_macro_f1": dev_macro_f1,
        "model_file": MODEL_FILE,
        "tokenizer_file": TOKENIZER_FILE,
    }
    (root / MODEL_FILE).write_text(json.dumps(model), encoding="utf-8")
    (root / TOKENIZER_FILE).write_text(json.dumps(tokenizer), encoding="utf-8")
    (root / METADATA_FILE).write_text(json.dumps(metadata, indent=2), encoding="utf-8")
    return root


def random_weights(arch: Arch, max_input_length: int, rng: np.random.Generator,
                   scale: float = 0.1) -> dict:
    """Random float32 weight set matching an Arch; for tests and demos."""
    d, f = arch.hidden_size, arch.ffn_size

    def mat(*shape):
        return (rng.standard_normal(shape) * scale).astype(np.float32)

    layers = []
    for _ in range(arch.layers):
        layers.append({
            "attn": {"wq": mat(d, d), "bq": mat(d), "wk": mat(d, d), "bk": mat(d),
                     "wv": mat(d, d), "bv": mat(d), "wo": mat(d, d), "bo": mat(d)},
            "ln1": {"gamma": np.ones(d, dtype=np.float32), "beta": np.zeros(d, dtype=np.float32)},
            "ffn": {"w1": mat(d, f), "b1": mat(f), "w2": mat(f, d), "b2": mat(d)},
            "ln2": {"gamma": np.ones(d, dtype=np.float32), "beta": np.zeros(d, dtype=np.float32)},
        })
    return {
        "embedding": mat(arch.vocab_size, d),
        "positional": mat(max_input_length, d),
        "layers": layers,
        "head": {"w": mat(d, NUM_CLASSES), "b": mat(NUM_CLASSES)},
    }
