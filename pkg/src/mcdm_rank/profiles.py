"""Candidate profiles, expert/model score records, and label <-> score mapping."""
from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import ValidationError
from .fuzzy import DEFAULT_VOCABULARY, LinguisticVocabulary, TriangularFuzzyNumber, tfn_aggregate
from .topsis import ScoreTable

LABELS = ("Poor", "Fair", "Excellent")
SOURCES = ("expert", "model")
SCORE_MIN, SCORE_MAX = 1.0, 5.0
DEFAULT_CRITERIA = ("Skills", "Experience", "Education", "About")

CANDIDATE_HEADER = ("id", "experience", "education", "skills", "about")
SCORE_HEADER = ("candidate_id", "criterion", "score", "source", "rater")

DEFAULT_BINDING = (
    (1.0, 1.8, "Very Low"),
    (1.8, 2.6, "Low"),
    (2.6, 3.4, "Medium"),
    (3.4, 4.2, "High"),
    (4.2, 5.0, "Very High"),
)


def parse_label(text: str) -> str:
    key = str(text).strip().casefold()
    for label in LABELS:
        if label.casefold() == key:
            return label
    raise ValidationError(f"unknown label {text!r}; expected one of {', '.join(LABELS)}")


def _check_score(score: float) -> float:
    score = float(score)
    if not math.isfinite(score) or not (SCORE_MIN <= score <= SCORE_MAX):
        raise ValidationError(f"score {score:g} is outside [1, 5]")
    return score


def score_to_label(score: float) -> str:
    """Poor below 2.5, Fair below 3.5, Excellent from 3.5 up."""
    score = _check_score(score)
    if score < 2.5:
        return "Poor"
    if score < 3.5:
        return "Fair"
    return "Excellent"


@dataclass(frozen=True)
class LabelMapping:
    """Representative crisp score for each predicted label."""

    poor: float = 1.5
    fair: float = 3.0
    excellent: float = 4.5

    def __post_init__(self):
        for label in LABELS:
            value = _check_score(getattr(self, label.lower()))
            if score_to_label(value) != label:
                raise ValidationError(
                    f"representative score {value:g} for {label} falls in the "
                    f"{score_to_label(value)} range"
                )
            object.__setattr__(self, label.lower(), value)

    @classmethod
    def from_overrides(cls, overrides: Optional[Mapping[str, float]]) -> "LabelMapping":
        if not overrides:
            return cls()
        kwargs = {}
        for key, value in overrides.items():
            kwargs[parse_label(key).lower()] = float(value)
        return cls(**kwargs)

    def as_dict(self) -> dict[str, float]:
        return {label: getattr(self, label.lower()) for label in LABELS}


DEFAULT_MAPPING = LabelMapping()


def label_to_score(label: str, mapping: LabelMapping = DEFAULT_MAPPING) -> float:
    return getattr(mapping, parse_label(label).lower())


@dataclass(frozen=True)
class CandidateRecord:
    id: str
    attributes: Mapping[str, str] = field(default_factory=dict)
    source: str = ""

    def __post_init__(self):
        if not str(self.id).strip():
            raise ValidationError("candidate id is empty")


@dataclass(frozen=True)
class ScoreRecord:
    """One rating of one candidate on one criterion.

    ``value`` is either a float in [1, 5] or one of the three labels.
    """

    candidate_id: str
    criterion: str
    value: Union[float, str]
    source: str = "expert"
    rater: str = ""

    def __post_init__(self):
        if not str(self.candidate_id).strip():
            raise ValidationError("score record has an empty candidate_id")
        if not str(self.criterion).strip():
            raise ValidationError("score record has an empty criterion")
        source = str(self.source).strip().lower()
        if source not in SOURCES:
            raise ValidationError(f"source must be expert or model, got {self.source!r}")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "value", parse_score_value(self.value))

    @property
    def is_label(self) -> bool:
        return isinstance(self.value, str)

    def numeric(self, mapping: LabelMapping = DEFAULT_MAPPING) -> float:
        return label_to_score(self.value, mapping) if self.is_label else self.value


def parse_score_value(value) -> Union[float, str]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return _check_score(value)
    text = str(value).strip()
    try:
        number = float(text)
    except ValueError:
        return parse_label(text)
    return _check_score(number)


def _canonical_criteria(criteria: Sequence[str]) -> dict[str, str]:
    index = {}
    for name in criteria:
        key = name.casefold()
        if key in index:
            raise ValidationError(f"duplicate criterion {name!r}")
        index[key] = name
    return index


def build_score_table(
    records: Iterable[ScoreRecord],
    criteria: Sequence[str] = DEFAULT_CRITERIA,
    mapping: LabelMapping = DEFAULT_MAPPING,
    source: Optional[str] = None,
    candidates: Optional[Sequence[str]] = None,
    kinds: Sequence[str] = (),
) -> ScoreTable:
    """Average every (candidate, criterion) cell into a crisp table.

    Records for criteria outside ``criteria`` (e.g. an evaluation-only
    ``Overall`` column) are ignored. Candidate order follows ``candidates``
    when given, otherwise sorted ids, so record order never matters.
    """
    index = _canonical_criteria(criteria)
    cells: dict[tuple[str, str], list[float]] = defaultdict(list)
    seen: set[str] = set()
    for rec in records:
        if source is not None and rec.source != source:
            continue
        name = index.get(rec.criterion.strip().casefold())
        if name is None:
            continue
        seen.add(rec.candidate_id)
        cells[(rec.candidate_id, name)].append(rec.numeric(mapping))

    if candidates is None:
        order = sorted(seen)
    else:
        order = list(candidates)
        unknown = sorted(seen - set(order))
        if unknown:
            raise ValidationError(f"scores reference unknown candidates: {', '.join(unknown)}")
    if not order:
        raise ValidationError("no score records left after filtering")
    gaps = [(cid, name) for cid in order for name in criteria if not cells.get((cid, name))]
    if gaps:
        shown = "; ".join(f"({c}, {n})" for c, n in gaps[:10])
        more = f" and {len(gaps) - 10} more" if len(gaps) > 10 else ""
        raise ValidationError(f"missing scores for {shown}{more}")

    values = np.array(
        [[math.fsum(cells[(cid, name)]) / len(cells[(cid, name)]) for name in criteria] for cid in order]
    )
    return ScoreTable(tuple(order), tuple(criteria), values, tuple(kinds), source or "all")


def validate_binding(binding: Sequence[tuple[float, float, str]], vocab: LinguisticVocabulary):
    """Check that half-open bins cover [1, 5] exactly once, in order."""
    if not binding:
        raise ValidationError("linguistic binding is empty")
    bins = sorted((float(lo), float(hi), str(term)) for lo, hi, term in binding)
    if bins[0][0] != SCORE_MIN:
        raise ValidationError(f"linguistic binding starts at {bins[0][0]:g}, expected 1")
    if bins[-1][1] != SCORE_MAX:
        raise ValidationError(f"linguistic binding ends at {bins[-1][1]:g}, expected 5")
    for lo, hi, term in bins:
        if not lo < hi:
            raise ValidationError(f"empty binding range [{lo:g}, {hi:g}) for {term!r}")
        vocab.lookup(term)
    for (lo0, hi0, t0), (lo1, hi1, t1) in zip(bins, bins[1:]):
        if hi0 < lo1:
            raise ValidationError(f"binding gap between {hi0:g} and {lo1:g}")
        if hi0 > lo1:
            raise ValidationError(f"binding ranges for {t0!r} and {t1!r} overlap")
    return tuple(bins)


def bind_score(score: float, bins, vocab: LinguisticVocabulary) -> TriangularFuzzyNumber:
    score = _check_score(score)
    for pos, (lo, hi, term) in enumerate(bins):
        last = pos == len(bins) - 1
        if lo <= score < hi or (last and score == hi):
            return vocab.lookup(term)
    raise AssertionError(f"score {score} not covered by a validated binding")


def fuzzify_score_table(
    table: ScoreTable,
    vocab: LinguisticVocabulary = DEFAULT_VOCABULARY,
    binding: Sequence[tuple[float, float, str]] = DEFAULT_BINDING,
) -> ScoreTable:
    """Map every crisp score to its linguistic term's TFN."""
    if table.is_fuzzy:
        raise ValidationError("table is already fuzzy")
    bins = validate_binding(binding, vocab)
    values = np.array(
        [[bind_score(v, bins, vocab).as_tuple() for v in row] for row in table.values.tolist()]
    )
    return ScoreTable(table.candidates, table.criteria, values, table.kinds, table.provenance)


def fuzzify_records(
    records: Iterable[ScoreRecord],
    criteria: Sequence[str] = DEFAULT_CRITERIA,
    vocab: LinguisticVocabulary = DEFAULT_VOCABULARY,
    binding: Sequence[tuple[float, float, str]] = DEFAULT_BINDING,
    mapping: LabelMapping = DEFAULT_MAPPING,
    source: Optional[str] = None,
    candidates: Optional[Sequence[str]] = None,
) -> ScoreTable:
    """Fuzzify each rating separately, then average the TFNs per cell."""
    records = [r for r in records if source is None or r.source == source]
    bins = validate_binding(binding, vocab)
    # reuse the crisp builder for ordering and gap checks
    crisp = build_score_table(records, criteria, mapping, None, candidates)
    index = _canonical_criteria(criteria)
    cells: dict[tuple[str, str], list[TriangularFuzzyNumber]] = defaultdict(list)
    for rec in records:
        name = index.get(rec.criterion.strip().casefold())
        if name is not None:
            cells[(rec.candidate_id, name)].append(bind_score(rec.numeric(mapping), bins, vocab))
    values = np.array([
        [tfn_aggregate(cells[(cid, name)]).as_tuple() for name in crisp.criteria]
        for cid in crisp.candidates
    ])
    return ScoreTable(crisp.candidates, crisp.criteria, values, crisp.kinds, source or "all")


# --- CSV ingestion -------------------------------------------------------

def _open_csv(path) -> tuple[list[str], list[tuple[int, dict]]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ValidationError(f"{path}: not valid UTF-8") from None
    reader = csv.reader(io.StringIO(text, newline=""), strict=True)
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError(f"{path}: empty file") from None
    except csv.Error as exc:
        raise ValidationError(f"{path}:1: malformed CSV: {exc}") from None
    header = [h.strip().lower() for h in header]
    rows = []
    try:
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ValidationError(
                    f"{path}:{line}: expected {len(header)} fields, found {len(row)}"
                )
            rows.append((line, dict(zip(header, row))))
    except csv.Error as exc:
        raise ValidationError(f"{path}:{reader.line_num}: malformed CSV: {exc}") from None
    return header, rows


def _require_columns(path, header, required):
    missing = [c for c in required if c not in header]
    if missing:
        raise ValidationError(f"{path}:1: missing column(s) {', '.join(missing)}")


def read_candidates(path) -> list[CandidateRecord]:
    header, rows = _open_csv(path)
    _require_columns(path, header, ("id",))
    out, seen = [], set()
    for line, row in rows:
        cid = row["id"].strip()
        try:
            rec = CandidateRecord(cid, {k: row.get(k, "") for k in CANDIDATE_HEADER[1:]}, str(path))
        except ValidationError as exc:
            raise ValidationError(f"{path}:{line}: {exc}") from None
        if cid in seen:
            raise ValidationError(f"{path}:{line}: duplicate candidate id {cid!r}")
        seen.add(cid)
        out.append(rec)
    return out


def read_scores(path) -> list[ScoreRecord]:
    header, rows = _open_csv(path)
    _require_columns(path, header, SCORE_HEADER[:3])
    out = []
    for line, row in rows:
        try:
            out.append(ScoreRecord(
                row["candidate_id"].strip(),
                row["criterion"].strip(),
                row["score"],
                (row.get("source") or "expert").strip(),
                (row.get("rater") or "").strip(),
            ))
        except ValidationError as exc:
            raise ValidationError(f"{path}:{line}: {exc}") from None
    return out


def write_scores(records: Iterable[ScoreRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCORE_HEADER)
        for rec in records:
            value = rec.value if rec.is_label else repr(rec.value)
            writer.writerow([rec.candidate_id, rec.criterion, value, rec.source, rec.rater])
