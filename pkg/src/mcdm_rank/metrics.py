"""Classification and ranking-agreement metrics between score sources.

Zero-division cases (e.g. a class never predicted) report 0.0 and list the
affected metric in ``zero_division`` instead of producing NaN.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import ValidationError
from .topsis import TopsisResult

NDCG_GAIN = "linear"
NDCG_DISCOUNT = "1/log2(rank+1)"


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true labels, columns are predicted labels."""

    classes: tuple[str, ...]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_json_obj(self) -> dict:
        return {"classes": list(self.classes), "counts": self.counts.tolist()}

    def to_grid(self) -> str:
        labels = list(self.classes)
        cells = [[str(int(v)) for v in row] for row in self.counts]
        head = "true \\ pred"
        width = max([len(head)] + [len(c) for c in labels] + [len(v) for row in cells for v in row])
        lines = [" ".join([head.ljust(width)] + [c.rjust(width) for c in labels])]
        for label, row in zip(labels, cells):
            lines.append(" ".join([label.ljust(width)] + [v.rjust(width) for v in row]))
        return "\n".join(lines)


@dataclass(frozen=True)
class ClassMetrics:
    label: str
    precision: float
    recall: float
    f1: float
    support: int
    zero_division: tuple[str, ...] = ()


@dataclass(frozen=True)
class ClassificationReport:
    per_class: tuple[ClassMetrics, ...]
    accuracy: float
    hamming_loss: float
    macro_f1: float
    confusion: ConfusionMatrix

    def __getitem__(self, label: str) -> ClassMetrics:
        for cm in self.per_class:
            if cm.label == label:
                return cm
        raise KeyError(label)


def confusion_matrix(true: Sequence[str], pred: Sequence[str], classes: Sequence[str]) -> ConfusionMatrix:
    true, pred = list(true), list(pred)
    if len(true) != len(pred):
        raise ValidationError(f"label sequences differ in length: {len(true)} vs {len(pred)}")
    if not true:
        raise ValidationError("label sequences are empty")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(true, pred):
        for label in (t, p):
            if label not in index:
                raise ValidationError(f"unknown label {label!r}; expected one of {', '.join(classes)}")
        counts[index[t], index[p]] += 1
    counts.setflags(write=False)
    return ConfusionMatrix(tuple(classes), counts)


def classification_metrics(
    true: Sequence[str], pred: Sequence[str], classes: Sequence[str] = ("Poor", "Fair", "Excellent")
) -> ClassificationReport:
    cm = confusion_matrix(true, pred, classes)
    counts = cm.counts
    per_class = []
    for i, label in enumerate(cm.classes):
        tp = int(counts[i, i])
        predicted = int(counts[:, i].sum())
        actual = int(counts[i, :].sum())
        flags = []
        if predicted == 0:
            precision = 0.0
            flags.append("precision")
        else:
            precision = tp / predicted
        if actual == 0:
            recall = 0.0
            flags.append("recall")
        else:
            recall = tp / actual
        if precision + recall == 0:
            f1 = 0.0
            flags.append("f1")
        else:
            f1 = 2 * precision * recall / (precision + recall)
        per_class.append(ClassMetrics(label, precision, recall, f1, actual, tuple(flags)))
    total = cm.total
    correct = int(np.trace(counts))
    accuracy = correct / total
    # single-label case: every sample carries exactly one label
    hamming = (total - correct) / total
    macro_f1 = math.fsum(c.f1 for c in per_class) / len(per_class)
    return ClassificationReport(tuple(per_class), accuracy, hamming, macro_f1, cm)


@dataclass(frozen=True)
class ScoreAgreement:
    mae: float
    rmse: float
    cosine: float


def score_agreement(a: Sequence[float], b: Sequence[float]) -> ScoreAgreement:
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    if len(a) != len(b):
        raise ValidationError(f"score vectors differ in length: {len(a)} vs {len(b)}")
    if not a:
        raise ValidationError("score vectors are empty")
    n = len(a)
    diffs = [x - y for x, y in zip(a, b)]
    mae = math.fsum(abs(d) for d in diffs) / n
    rmse = math.sqrt(math.fsum(d * d for d in diffs) / n)
    # power-mean inequality holds exactly; guard against last-ulp rounding
    rmse = max(rmse, mae)
    na = math.fsum(x * x for x in a)
    nb = math.fsum(y * y for y in b)
    if na == 0 or nb == 0:
        raise ValidationError("cosine similarity is undefined for a zero vector")
    dot = math.fsum(x * y for x, y in zip(a, b))
    cosine = max(-1.0, min(1.0, dot / math.sqrt(na * nb)))
    return ScoreAgreement(mae, rmse, cosine)


@dataclass(frozen=True)
class RankingMetrics:
    map: float
    mrr: float
    ndcg: float
    k: Optional[int] = None
    relevant: tuple[str, ...] = ()


def _dcg(gains: Sequence[float]) -> float:
    return math.fsum(g / math.log2(pos + 1) for pos, g in enumerate(gains, start=1))


def ranking_metrics(
    predicted_ranking: Sequence[str], relevance: Mapping[str, float], k: Optional[int] = None
) -> RankingMetrics:
    """MAP, MRR and NDCG of one ranked list against graded relevance.

    Items with grade > 0 count as relevant for MAP and MRR. With a cutoff
    ``k`` only the top k positions count, and average precision divides by
    min(#relevant, k).
    """
    order = list(predicted_ranking)
    if len(set(order)) != len(order):
        raise ValidationError("predicted ranking contains duplicate ids")
    if set(order) != set(relevance):
        diff = sorted(set(order) ^ set(relevance))
        raise ValidationError(f"ranking and relevance cover different ids: {', '.join(map(str, diff))}")
    for item, grade in relevance.items():
        if not grade >= 0:
            raise ValidationError(f"relevance grade for {item!r} must be >= 0, got {grade}")
    if k is not None:
        if k < 1:
            raise ValidationError(f"cutoff k must be >= 1, got {k}")
        cut = order[:k]
    else:
        cut = order

    relevant = {item for item, g in relevance.items() if g > 0}
    if not relevant:
        raise ValidationError("no relevant items: MAP, MRR and NDCG are undefined")

    hits = 0
    precisions = []
    first = None
    for pos, item in enumerate(cut, start=1):
        if item in relevant:
            hits += 1
            precisions.append(hits / pos)
            if first is None:
                first = pos
    denom = len(relevant) if k is None else min(len(relevant), k)
    ap = math.fsum(precisions) / denom
    mrr = 0.0 if first is None else 1.0 / first

    gains = [float(relevance[item]) for item in cut]
    ideal = sorted((float(g) for g in relevance.values()), reverse=True)[: len(cut)]
    idcg = _dcg(ideal)
    ndcg = _dcg(gains) / idcg
    return RankingMetrics(ap, mrr, min(ndcg, 1.0), k, tuple(i for i in order if i in relevant))


# --- multi-source comparison ---------------------------------------------

RankSource = Union[TopsisResult, Sequence[str], Mapping[str, int]]


@dataclass(frozen=True)
class PairEvaluation:
    """One source measured against the reference."""

    source: str
    reference: str
    n: int
    agreement: Optional[ScoreAgreement] = None
    ranking: Optional[RankingMetrics] = None
    classification: Optional[ClassificationReport] = None


@dataclass(frozen=True)
class EvaluationReport:
    reference: str
    sources: tuple[str, ...]
    comparisons: tuple[PairEvaluation, ...]
    rank_table: tuple[tuple[str, tuple[Optional[int], ...]], ...] = ()
    metadata: dict = field(default_factory=dict)

    def pair(self, source: str) -> PairEvaluation:
        for p in self.comparisons:
            if p.source == source:
                return p
        raise KeyError(source)


def _as_ranks(source: RankSource, name: str) -> tuple[dict[str, int], Optional[dict[str, float]]]:
    if isinstance(source, TopsisResult):
        return source.ranks, source.closeness
    if isinstance(source, Mapping):
        ranks = {str(k): int(v) for k, v in source.items()}
        values = list(ranks.values())
        if len(set(values)) != len(values):
            raise ValidationError(f"source {name!r} assigns the same rank twice")
        if any(v < 1 for v in values):
            raise ValidationError(f"source {name!r} has ranks below 1")
        return ranks, None
    order = [str(x) for x in source]
    if len(set(order)) != len(order):
        raise ValidationError(f"source {name!r} lists a candidate twice")
    return {cid: pos for pos, cid in enumerate(order, start=1)}, None


def reference_relevance(reference_order: Sequence[str], relevant_top: Optional[int] = None) -> dict[str, int]:
    """Grades from a reference ordering: its top r items get r, r-1, ..., 1; the rest 0.

    ``relevant_top`` defaults to ceil(n / 2).
    """
    n = len(reference_order)
    r = math.ceil(n / 2) if relevant_top is None else int(relevant_top)
    if not 1 <= r <= n:
        raise ValidationError(f"relevant_top must lie in [1, {n}], got {relevant_top}")
    return {cid: (r - pos if pos < r else 0) for pos, cid in enumerate(reference_order)}


def compare_rankings(
    rankings: Mapping[str, RankSource],
    reference: str,
    relevant_top: Optional[int] = None,
) -> EvaluationReport:
    """Measure every ranking source against ``reference`` as ground truth."""
    if reference not in rankings:
        raise ValidationError(f"reference source {reference!r} not among {list(rankings)}")
    parsed = {name: _as_ranks(src, name) for name, src in rankings.items()}
    ref_ranks, ref_close = parsed[reference]
    ids = set(ref_ranks)
    for name, (ranks, _) in parsed.items():
        if set(ranks) != ids:
            diff = sorted(set(ranks) ^ ids)
            raise ValidationError(
                f"source {name!r} covers a different candidate set than {reference!r}: "
                f"symmetric difference {', '.join(diff)}"
            )
    ref_order = sorted(ids, key=lambda c: (ref_ranks[c], c))
    grades = reference_relevance(ref_order, relevant_top)

    comparisons = []
    for name, (ranks, close) in parsed.items():
        if name == reference:
            continue
        order = sorted(ids, key=lambda c: (ranks[c], c))
        agreement = None
        if close is not None and ref_close is not None:
            agreement = score_agreement([close[c] for c in ref_order], [ref_close[c] for c in ref_order])
        comparisons.append(PairEvaluation(
            name, reference, len(ids), agreement, ranking_metrics(order, grades),
        ))

    names = tuple(rankings)
    table = tuple(
        (cid, tuple(parsed[name][0][cid] for name in names)) for cid in ref_order
    )
    metadata = {
        "kind": "ranking",
        "relevant_top": sum(1 for g in grades.values() if g > 0),
        "ndcg_gain": NDCG_GAIN,
        "ndcg_discount": NDCG_DISCOUNT,
        "relevance": "reference top-r graded r..1",
    }
    return EvaluationReport(reference, names, tuple(comparisons), table, metadata)


def compare_labels(
    labels: Mapping[str, Mapping[str, str]],
    reference: str,
    classes: Sequence[str] = ("Poor", "Fair", "Excellent"),
) -> EvaluationReport:
    """Classification metrics of every label source against ``reference``."""
    if reference not in labels:
        raise ValidationError(f"reference source {reference!r} not among {list(labels)}")
    ref = labels[reference]
    ids = sorted(ref)
    comparisons = []
    for name, src in labels.items():
        if set(src) != set(ref):
            diff = sorted(set(src) ^ set(ref))
            raise ValidationError(
                f"source {name!r} labels a different sample set than {reference!r}: "
                f"symmetric difference {', '.join(diff)}"
            )
        if name == reference:
            continue
        report = classification_metrics([ref[i] for i in ids], [src[i] for i in ids], classes)
        comparisons.append(PairEvaluation(name, reference, len(ids), classification=report))
    metadata = {"kind": "labels", "classes": list(classes), "hamming_loss": "single-label mislabeled fraction"}
    return EvaluationReport(reference, tuple(labels), tuple(comparisons), (), metadata)
