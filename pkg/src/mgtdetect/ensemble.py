"""Majority voting across independently trained scorers.

Votes are counted at word level, after each member's subtoken scores have
been aggregated, so members with different subtokenizers can be combined.
Member selection picks the k models with the best development-split metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .corpus import NUM_CLASSES, Document, LabelId
from .errors import (
    InsufficientModelsError,
    LengthMismatchError,
    MissingDistributionsError,
    UnknownStrategyError,
    ValidationError,
)
from .scoring import DocumentPrediction, Scorer, predict_document

TIE_POLICIES = ("sum_probability_then_lowest_id", "lowest_id")
DEFAULT_TIE_POLICY = "sum_probability_then_lowest_id"


@dataclass(frozen=True)
class EnsembleConfig:
    """Member set and tie handling for a majority-vote ensemble."""

    member_ids: tuple[str, ...]
    tie_policy: str = DEFAULT_TIE_POLICY
    selection_k: int = 3

    def __post_init__(self):
        if len(self.member_ids) == 0:
            raise ValidationError("ensemble needs at least one member")
        if len(set(self.member_ids)) != len(self.member_ids):
            raise ValidationError(f"duplicate member ids: {self.member_ids}")
        if self.tie_policy not in TIE_POLICIES:
            raise UnknownStrategyError(f"unknown tie policy {self.tie_policy!r}")


def majority_vote(per_model_labels: Sequence[Sequence[LabelId]],
                  per_model_dists: Sequence[np.ndarray] | None = None,
                  policy: str = DEFAULT_TIE_POLICY) -> list[LabelId]:
    """Per-position label with the most votes across models.

    Ties under sum_probability_then_lowest_id go to the tied label with the
    largest probability mass summed across all models, then to the lowest
    label id; under lowest_id, directly to the lowest tied id.
    """
    if policy not in TIE_POLICIES:
        raise UnknownStrategyError(f"unknown tie policy {policy!r}")
    if len(per_model_labels) == 0:
        raise ValidationError("majority_vote needs at least one model")
    n = len(per_model_labels[0])
    for seq in per_model_labels:
        if len(seq) != n:
            raise LengthMismatchError(f"label sequences of lengths {len(seq)} and {n}")

    labels = np.asarray(per_model_labels, dtype=np.intp)  # [models, positions]
    counts = np.zeros((n, NUM_CLASSES), dtype=np.int64)
    for row in labels:
        counts[np.arange(n), row] += 1

    mass = None
    if policy == "sum_probability_then_lowest_id":
        if per_model_dists is None:
            raise MissingDistributionsError(
                "tie policy sum_probability_then_lowest_id needs per-model distributions")
        if len(per_model_dists) != len(per_model_labels):
            raise LengthMismatchError(
                f"{len(per_model_dists)} distribution sets vs {len(per_model_labels)} label sets")
        mass = np.zeros((n, NUM_CLASSES), dtype=np.float64)
        for dists in per_model_dists:
            dists = np.asarray(dists, dtype=np.float64)
            if dists.shape != (n, NUM_CLASSES):
                raise LengthMismatchError(
                    f"distributions of shape {dists.shape}, expected {(n, NUM_CLASSES)}")
            mass += dists

    out: list[LabelId] = []
    for pos in range(n):
        row = counts[pos]
        top = row.max()
        tied = np.flatnonzero(row == top)
        if len(tied) == 1 or mass is None:
            out.append(int(tied[0]))
        else:
            tied_mass = mass[pos, tied]
            out.append(int(tied[int(np.argmax(tied_mass))]))  # argmax keeps lowest id on ties
    return out


def vote_tallies(per_model_labels: Sequence[Sequence[LabelId]]) -> np.ndarray:
    """Per-position vote counts over the four classes."""
    labels = np.asarray(per_model_labels, dtype=np.intp)
    n = labels.shape[1]
    counts = np.zeros((n, NUM_CLASSES), dtype=np.int64)
    for row in labels:
        counts[np.arange(n), row] += 1
    return counts


def select_top_k(dev_scores: Mapping[str, float], k: int) -> list[str]:
    """Ids of the k best-scoring models, descending; ties lexicographic."""
    if k > len(dev_scores):
        raise InsufficientModelsError(f"asked for {k} models, only {len(dev_scores)} scored")
    ranked = sorted(dev_scores.items(), key=lambda item: (-item[1], item[0]))
    return [model_id for model_id, _ in ranked[:k]]


@dataclass(frozen=True)
class EnsemblePrediction:
    """Voted labels plus the per-position tallies that produced them."""

    doc_id: str
    labels: tuple[LabelId, ...]
    tallies: np.ndarray
    member_predictions: tuple[DocumentPrediction, ...] = field(repr=False, default=())


def ensemble_predict(members: Sequence[Scorer], d: Document, max_subtokens: int,
                     config: EnsembleConfig, strategy: str = "mean") -> EnsemblePrediction:
    """Run every member over the document and vote per word."""
    member_ids = tuple(s.id for s in members)
    if member_ids != config.member_ids:
        raise ValidationError(
            f"members {member_ids} do not match configured ids {config.member_ids}")
    predictions = [predict_document(s, d, max_subtokens, strategy) for s in members]
    labels = majority_vote([p.labels for p in predictions],
                           [p.dists for p in predictions],
                           policy=config.tie_policy)
    return EnsemblePrediction(doc_id=d.id,
                              labels=tuple(labels),
                              tallies=vote_tallies([p.labels for p in predictions]),
                              member_predictions=tuple(predictions))
