"""JSON/CSV rendering of results with stable bytes.

Floats are written with 10 significant digits and keys keep the insertion
order documented in README.md, so identical inputs give identical files.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable, Optional

from .errors import ValidationError
from .fuzzy import TriangularFuzzyNumber
from .metrics import EvaluationReport, PairEvaluation
from .topsis import CandidateResult, TopsisResult
from .weighting import WeightVector

SIG_DIGITS = 10

RANKING_CSV_COLUMNS = ("rank", "candidate_id", "closeness", "d_plus", "d_minus")
EVALUATION_CSV_COLUMNS = (
    "reference", "source", "n", "accuracy", "hamming_loss", "macro_f1",
    "mae", "rmse", "cosine", "map", "mrr", "ndcg",
)


def sig(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


def fmt(x: Optional[float]) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.{SIG_DIGITS}g}"


def rounded(obj: Any) -> Any:
    """Recursively round every float to SIG_DIGITS significant digits."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return sig(obj)
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(rounded(obj), indent=2, ensure_ascii=False) + "\n"


def write_json(obj: Any, path) -> Path:
    path = Path(path)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def write_csv(rows: Iterable[Iterable[Any]], header: Iterable[str], path) -> Path:
    path = Path(path)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, int)) and not isinstance(v, bool) else
                         ("" if v is None else v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read: {exc.strerror}") from None


# --- weights ---------------------------------------------------------------

def weights_metadata(weights: WeightVector) -> dict:
    if weights.fuzzy_weights is not None:
        return {c: list(t.as_tuple()) for c, t in zip(weights.criteria, weights.fuzzy_weights)}
    return dict(zip(weights.criteria, weights.weights))


def weights_from_metadata(data: dict) -> WeightVector:
    criteria = tuple(data)
    values = list(data.values())
    if values and all(isinstance(v, list) for v in values):
        fuzzy = tuple(TriangularFuzzyNumber(*v) for v in values)
        return WeightVector(criteria, tuple(t.m for t in fuzzy), fuzzy)
    return WeightVector(criteria, tuple(float(v) for v in values))


# --- TOPSIS results ----------------------------------------------------------

def topsis_to_json(result: TopsisResult) -> dict:
    return {
        "candidates": [
            {
                "id": c.id,
                "d_plus": c.d_plus,
                "d_minus": c.d_minus,
                "closeness": c.closeness,
                "rank": c.rank,
            }
            for c in result.ranked()
        ],
        "metadata": {
            "mode": result.mode,
            "normalization": result.normalization,
            "weights": weights_metadata(result.weights),
            "distance": result.distance,
            "tie_breaks": [list(group) for group in result.tie_breaks],
        },
    }


def topsis_from_json(data: dict) -> TopsisResult:
    try:
        meta = data["metadata"]
        rows = data["candidates"]
        candidates = tuple(
            CandidateResult(str(r["id"]), float(r["d_plus"]), float(r["d_minus"]),
                            float(r["closeness"]), int(r["rank"]))
            for r in rows
        )
        return TopsisResult(
            candidates=candidates,
            mode=meta["mode"],
            normalization=meta["normalization"],
            weights=weights_from_metadata(meta["weights"]),
            distance=meta["distance"],
            tie_breaks=tuple(tuple(g) for g in meta.get("tie_breaks", [])),
            criteria=tuple(meta["weights"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"not a ranking document: missing or bad field {exc}") from None


def ranking_rows(result: TopsisResult) -> list[list]:
    return [[c.rank, c.id, c.closeness, c.d_plus, c.d_minus] for c in result.ranked()]


def format_rank_table(result: TopsisResult) -> str:
    rows = [("rank", "candidate", "closeness", "d_plus", "d_minus")]
    for c in result.ranked():
        rows.append((str(c.rank), c.id, f"{c.closeness:.6f}", f"{c.d_plus:.6f}", f"{c.d_minus:.6f}"))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = []
    for r in rows:
        lines.append("  ".join(
            r[i].ljust(widths[i]) if i == 1 else r[i].rjust(widths[i]) for i in range(5)
        ).rstrip())
    return "\n".join(lines)


# --- evaluation reports --------------------------------------------------------

def _pair_to_json(p: PairEvaluation) -> dict:
    a, r, c = p.agreement, p.ranking, p.classification
    return {
        "source": p.source,
        "reference": p.reference,
        "n": p.n,
        "accuracy": c.accuracy if c else None,
        "hamming_loss": c.hamming_loss if c else None,
        "macro_f1": c.macro_f1 if c else None,
        "mae": a.mae if a else None,
        "rmse": a.rmse if a else None,
        "cosine": a.cosine if a else None,
        "map": r.map if r else None,
        "mrr": r.mrr if r else None,
        "ndcg": r.ndcg if r else None,
        "relevant": list(r.relevant) if r else None,
        "per_class": [
            {
                "label": m.label,
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
                "zero_division": list(m.zero_division),
            }
            for m in c.per_class
        ] if c else None,
        "confusion": c.confusion.to_json_obj() if c else None,
    }


def evaluation_to_json(report: EvaluationReport) -> dict:
    return {
        "reference": report.reference,
        "sources": list(report.sources),
        "comparisons": [_pair_to_json(p) for p in report.comparisons],
        "rank_table": [
            {"candidate_id": cid, "ranks": dict(zip(report.sources, ranks))}
            for cid, ranks in report.rank_table
        ],
        "metadata": dict(report.metadata),
    }


def evaluation_rows(report: EvaluationReport) -> list[list]:
    rows = []
    for p in report.comparisons:
        d = _pair_to_json(p)
        rows.append([d[col] for col in EVALUATION_CSV_COLUMNS])
    return rows


def format_evaluation(report: EvaluationReport) -> str:
    lines = [f"reference: {report.reference}"]
    for p in report.comparisons:
        d = _pair_to_json(p)
        parts = [f"{k}={fmt(d[k])}" for k in EVALUATION_CSV_COLUMNS[3:] if d[k] is not None]
        lines.append(f"{p.source}: " + " ".join(parts))
        if p.classification is not None:
            lines.append(p.classification.confusion.to_grid())
    if report.rank_table:
        header = ["candidate"] + list(report.sources)
        body = [[cid] + ["" if r is None else str(r) for r in ranks] for cid, ranks in report.rank_table]
        widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
        for row in [header] + body:
            lines.append("  ".join(v.ljust(widths[i]) for i, v in enumerate(row)).rstrip())
    return "\n".join(lines)
