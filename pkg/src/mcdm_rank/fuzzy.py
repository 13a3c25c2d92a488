"""Triangular fuzzy numbers, linguistic vocabularies, and fuzzy distance."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ValidationError

DISTANCE_NAME = "vertex"


@dataclass(frozen=True)
class TriangularFuzzyNumber:
    """Triangular fuzzy number (l, m, u) with l <= m <= u.

    A degenerate number (c, c, c) behaves as the crisp value c everywhere.
    """

    l: float
    m: float
    u: float

    def __post_init__(self):
        for name in ("l", "m", "u"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ValidationError(f"TFN field {name} is not a number: {value!r}") from None
            if not math.isfinite(value):
                raise ValidationError(f"TFN field {name} is not finite: {value!r}")
            object.__setattr__(self, name, value)
        if self.l > self.m:
            raise ValidationError(f"invalid TFN ({self.l}, {self.m}, {self.u}): l > m")
        if self.m > self.u:
            raise ValidationError(f"invalid TFN ({self.l}, {self.m}, {self.u}): m > u")

    @classmethod
    def crisp(cls, value: float) -> "TriangularFuzzyNumber":
        return cls(value, value, value)

    @property
    def is_degenerate(self) -> bool:
        return self.l == self.m == self.u

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.l, self.m, self.u)

    def centroid(self) -> float:
        return defuzzify_centroid(self)

    def scale(self, factor: float) -> "TriangularFuzzyNumber":
        """Multiply by a non-negative crisp factor."""
        if factor < 0:
            raise ValidationError(f"cannot scale a TFN by negative factor {factor}")
        return TriangularFuzzyNumber(self.l * factor, self.m * factor, self.u * factor)

    def __mul__(self, other):
        # Component-wise product; only defined for non-negative operands.
        if isinstance(other, TriangularFuzzyNumber):
            if other.l < 0 or self.l < 0:
                raise ValidationError("fuzzy product requires non-negative TFNs")
            return TriangularFuzzyNumber(self.l * other.l, self.m * other.m, self.u * other.u)
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __str__(self):
        return f"({self.l:g}, {self.m:g}, {self.u:g})"


TFN = TriangularFuzzyNumber


def tfn_new(l: float, m: float, u: float) -> TriangularFuzzyNumber:
    return TriangularFuzzyNumber(l, m, u)


def tfn_aggregate(tfns: Iterable[TriangularFuzzyNumber]) -> TriangularFuzzyNumber:
    """Component-wise arithmetic mean of several opinions."""
    tfns = list(tfns)
    if not tfns:
        raise ValidationError("cannot aggregate an empty list of TFNs")
    n = len(tfns)
    return TriangularFuzzyNumber(
        math.fsum(t.l for t in tfns) / n,
        math.fsum(t.m for t in tfns) / n,
        math.fsum(t.u for t in tfns) / n,
    )


def defuzzify_centroid(a: TriangularFuzzyNumber) -> float:
    if a.l == a.m == a.u:
        return a.m
    return (a.l + a.m + a.u) / 3.0


def tfn_distance(a: TriangularFuzzyNumber, b: TriangularFuzzyNumber) -> float:
    """Vertex distance sqrt(((dl)^2 + (dm)^2 + (du)^2) / 3)."""
    if a.is_degenerate and b.is_degenerate:
        return abs(a.m - b.m)
    # hypot scales internally, so tiny differences do not underflow to zero
    return math.hypot(a.l - b.l, a.m - b.m, a.u - b.u) / math.sqrt(3.0)


def fuzzy_sort_key(a: TriangularFuzzyNumber) -> tuple[float, float, float]:
    """Total order used to pick fuzzy extremes: centroid, then u, then m."""
    return (defuzzify_centroid(a), a.u, a.m)


class LinguisticVocabulary:
    """Ordered mapping from linguistic terms to TFNs.

    Lookups ignore case and surrounding whitespace.
    """

    def __init__(self, entries: Sequence[tuple[str, TriangularFuzzyNumber]]):
        entries = [(str(term).strip(), tfn) for term, tfn in entries]
        if not entries:
            raise ValidationError("linguistic vocabulary is empty")
        seen = set()
        for term, tfn in entries:
            if not term:
                raise ValidationError("linguistic vocabulary contains an empty term")
            key = term.casefold()
            if key in seen:
                raise ValidationError(f"duplicate linguistic term {term!r}")
            seen.add(key)
            if not isinstance(tfn, TriangularFuzzyNumber):
                raise ValidationError(f"term {term!r} is not bound to a TFN")
        for (t0, a), (t1, b) in zip(entries, entries[1:]):
            if not a.m < b.m:
                raise ValidationError(
                    f"modal values must increase: {t0!r} ({a.m}) then {t1!r} ({b.m})"
                )
        self._entries = tuple(entries)
        self._index = {term.casefold(): tfn for term, tfn in self._entries}

    @property
    def entries(self) -> tuple[tuple[str, TriangularFuzzyNumber], ...]:
        return self._entries

    @property
    def terms(self) -> list[str]:
        return [term for term, _ in self._entries]

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __eq__(self, other):
        if not isinstance(other, LinguisticVocabulary):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self):
        return f"LinguisticVocabulary({list(self._entries)!r})"

    def lookup(self, term: str) -> TriangularFuzzyNumber:
        try:
            return self._index[str(term).strip().casefold()]
        except KeyError:
            valid = ", ".join(self.terms)
            raise ValidationError(f"unknown linguistic term {term!r}; valid terms: {valid}") from None

    def canonical(self, term: str) -> str:
        """Return the vocabulary's spelling of ``term``."""
        key = str(term).strip().casefold()
        for name, _ in self._entries:
            if name.casefold() == key:
                return name
        self.lookup(term)  # raises with the list of valid terms
        raise AssertionError("unreachable")

    def to_json_obj(self) -> list[dict]:
        return [{"term": t, "l": a.l, "m": a.m, "u": a.u} for t, a in self._entries]

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"

    @classmethod
    def from_json_obj(cls, data) -> "LinguisticVocabulary":
        if not isinstance(data, list):
            raise ValidationError("linguistic vocabulary JSON must be an array of objects")
        entries = []
        for pos, item in enumerate(data):
            if not isinstance(item, dict):
                raise ValidationError(f"vocabulary entry {pos} is not an object")
            missing = [k for k in ("term", "l", "m", "u") if k not in item]
            if missing:
                raise ValidationError(f"vocabulary entry {pos} lacks {', '.join(missing)}")
            entries.append((item["term"], TriangularFuzzyNumber(item["l"], item["m"], item["u"])))
        return cls(entries)

    @classmethod
    def from_json(cls, text: str) -> "LinguisticVocabulary":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"vocabulary is not valid JSON: {exc}") from None
        return cls.from_json_obj(data)

    @classmethod
    def load(cls, path) -> "LinguisticVocabulary":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


DEFAULT_VOCABULARY = LinguisticVocabulary([
    ("Very Low", TriangularFuzzyNumber(0.0, 0.1, 0.3)),
    ("Low", TriangularFuzzyNumber(0.1, 0.3, 0.5)),
    ("Medium", TriangularFuzzyNumber(0.3, 0.5, 0.7)),
    ("High", TriangularFuzzyNumber(0.5, 0.7, 0.9)),
    ("Very High", TriangularFuzzyNumber(0.7, 0.9, 1.0)),
])


def lookup_linguistic(vocab: LinguisticVocabulary, term: str) -> TriangularFuzzyNumber:
    return vocab.lookup(term)
