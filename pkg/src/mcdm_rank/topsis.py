"""Crisp and fuzzy TOPSIS over a candidates x criteria score table.

Crisp tables hold an ``(n, m)`` float array; fuzzy tables hold an
``(n, m, 3)`` array of (l, m, u) triples. Row and column sums go through
``math.fsum`` so results do not depend on candidate or criterion order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DegenerateProblemError, ValidationError
from .fuzzy import DISTANCE_NAME, TriangularFuzzyNumber, fuzzy_sort_key
from .weighting import WeightVector

BENEFIT = "benefit"
COST = "cost"
VECTOR = "vector"
LINEAR_MAX = "linear_max"
SCHEMES = (VECTOR, LINEAR_MAX)
TIE_TOL = 1e-12

Cell = Union[float, TriangularFuzzyNumber]


def canonical_scheme(scheme: str) -> str:
    key = str(scheme).strip().lower().replace("-", "_")
    if key not in SCHEMES:
        raise ValidationError(f"unknown normalization scheme {scheme!r}; use vector or linear_max")
    return key


@dataclass(frozen=True)
class ScoreTable:
    candidates: tuple[str, ...]
    criteria: tuple[str, ...]
    values: np.ndarray
    kinds: tuple[str, ...] = ()
    provenance: str = ""

    def __post_init__(self):
        candidates = tuple(str(c) for c in self.candidates)
        criteria = tuple(str(c) for c in self.criteria)
        values = np.array(self.values, dtype=float)
        if len(candidates) < 1 or len(criteria) < 1:
            raise ValidationError("a score table needs at least one candidate and one criterion")
        if len(set(candidates)) != len(candidates):
            raise ValidationError("candidate ids must be unique")
        if len({c.casefold() for c in criteria}) != len(criteria):
            raise ValidationError("criterion names must be unique")
        n, m = len(candidates), len(criteria)
        if values.shape not in ((n, m), (n, m, 3)):
            raise ValidationError(
                f"score values have shape {values.shape}, expected ({n}, {m}) or ({n}, {m}, 3)"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("score table contains non-finite values")
        if values.ndim == 3:
            bad = np.argwhere((values[..., 0] > values[..., 1]) | (values[..., 1] > values[..., 2]))
            if len(bad):
                i, j = bad[0]
                raise ValidationError(
                    f"cell ({candidates[i]}, {criteria[j]}) is not a valid TFN: {values[i, j].tolist()}"
                )
        kinds = tuple(self.kinds) if self.kinds else (BENEFIT,) * m
        if len(kinds) != m:
            raise ValidationError(f"{len(kinds)} criterion kinds given for {m} criteria")
        for k in kinds:
            if k not in (BENEFIT, COST):
                raise ValidationError(f"criterion kind must be benefit or cost, got {k!r}")
        values.setflags(write=False)
        object.__setattr__(self, "candidates", candidates)
        object.__setattr__(self, "criteria", criteria)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "kinds", kinds)

    @classmethod
    def from_cells(
        cls,
        candidates: Sequence[str],
        criteria: Sequence[str],
        cells: Sequence[Sequence[Cell]],
        kinds: Sequence[str] = (),
        provenance: str = "",
    ) -> "ScoreTable":
        """Build from nested rows of floats or of TFNs (not mixed)."""
        flat = [c for row in cells for c in row]
        fuzzy = [isinstance(c, TriangularFuzzyNumber) for c in flat]
        if any(fuzzy) and not all(fuzzy):
            raise ValidationError("a score table cannot mix crisp and fuzzy cells")
        if flat and all(fuzzy):
            values = [[c.as_tuple() for c in row] for row in cells]
        else:
            values = cells
        return cls(tuple(candidates), tuple(criteria), np.array(values, dtype=float), tuple(kinds), provenance)

    @property
    def is_fuzzy(self) -> bool:
        return self.values.ndim == 3

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.candidates), len(self.criteria))

    def cell(self, i: int, j: int) -> Cell:
        if self.is_fuzzy:
            return TriangularFuzzyNumber(*self.values[i, j])
        return float(self.values[i, j])

    def column(self, j: int) -> list[Cell]:
        return [self.cell(i, j) for i in range(len(self.candidates))]

    def replace(self, values: np.ndarray) -> "ScoreTable":
        return ScoreTable(self.candidates, self.criteria, values, self.kinds, self.provenance)

    def to_degenerate_fuzzy(self) -> "ScoreTable":
        """Lift a crisp table to degenerate TFNs (c, c, c)."""
        if self.is_fuzzy:
            return self
        v = self.values
        return self.replace(np.stack([v, v, v], axis=-1))

    def to_json_obj(self) -> dict:
        rows = []
        for i, cid in enumerate(self.candidates):
            cells = {}
            for j, name in enumerate(self.criteria):
                cells[name] = self.values[i, j].tolist()
            rows.append({"id": cid, "scores": cells})
        return {
            "mode": "fuzzy" if self.is_fuzzy else "crisp",
            "criteria": list(self.criteria),
            "kinds": list(self.kinds),
            "provenance": self.provenance,
            "candidates": rows,
        }

    @classmethod
    def from_json_obj(cls, data) -> "ScoreTable":
        try:
            criteria = list(data["criteria"])
            rows = data["candidates"]
            candidates = [r["id"] for r in rows]
            values = [[r["scores"][c] for c in criteria] for r in rows]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"score table JSON is missing field {exc}") from None
        return cls(
            tuple(candidates), tuple(criteria), np.array(values, dtype=float),
            tuple(data.get("kinds") or ()), data.get("provenance", ""),
        )


@dataclass(frozen=True)
class CandidateResult:
    id: str
    d_plus: float
    d_minus: float
    closeness: float
    rank: int


@dataclass(frozen=True)
class TopsisResult:
    """Per-candidate outcome listed in input order, plus run metadata."""

    candidates: tuple[CandidateResult, ...]
    mode: str
    normalization: str
    weights: WeightVector
    distance: str
    tie_breaks: tuple[tuple[str, ...], ...] = ()
    criteria: tuple[str, ...] = field(default=())

    def ranked(self) -> list[CandidateResult]:
        return sorted(self.candidates, key=lambda c: c.rank)

    @property
    def closeness(self) -> dict[str, float]:
        return {c.id: c.closeness for c in self.candidates}

    @property
    def ranks(self) -> dict[str, int]:
        return {c.id: c.rank for c in self.candidates}

    def ranking(self) -> list[str]:
        return [c.id for c in self.ranked()]


def _check_mode(table: ScoreTable, fuzzy_weights: bool):
    if table.is_fuzzy != fuzzy_weights:
        raise ValidationError(
            "crisp tables need crisp weights and fuzzy tables need fuzzy weights "
            f"(table is {'fuzzy' if table.is_fuzzy else 'crisp'})"
        )


def normalize(table: ScoreTable, scheme: str = VECTOR) -> ScoreTable:
    scheme = canonical_scheme(scheme)
    if table.is_fuzzy and scheme != LINEAR_MAX:
        raise ValidationError("fuzzy tables support only linear_max normalization")
    values = table.values
    out = np.empty_like(values)
    for j, name in enumerate(table.criteria):
        col = values[:, j]
        if not np.any(col):
            raise ValidationError(f"criterion {name!r} is all zero and cannot be normalized")
        if scheme == VECTOR:
            denom = math.sqrt(math.fsum((col * col).tolist()))
        else:
            if np.any(col < 0):
                raise ValidationError(f"linear_max needs non-negative scores in {name!r}")
            denom = float(col.max())
        out[:, j] = col / denom
    return table.replace(out)


def apply_weights(
    table: ScoreTable,
    weights: Union[WeightVector, Mapping[str, Union[float, TriangularFuzzyNumber]]],
) -> ScoreTable:
    """Multiply each column by its criterion weight, matching criteria by name."""
    if isinstance(weights, WeightVector):
        w = weights.reorder(table.criteria)
        factors = list(w.fuzzy_weights) if table.is_fuzzy and w.is_fuzzy else list(w.weights)
        _check_mode(table, w.is_fuzzy)
    else:
        lookup = {str(k).casefold(): v for k, v in weights.items()}
        if set(lookup) != {c.casefold() for c in table.criteria}:
            raise ValidationError(
                f"weight criteria {list(weights)} do not match table criteria {list(table.criteria)}"
            )
        factors = [lookup[c.casefold()] for c in table.criteria]
        kinds = {isinstance(f, TriangularFuzzyNumber) for f in factors}
        if len(kinds) != 1:
            raise ValidationError("weights mix crisp and fuzzy values")
        _check_mode(table, kinds.pop())
    if table.is_fuzzy:
        factor = np.array([f.as_tuple() for f in factors], dtype=float)
        if np.any(factor < 0) or np.any(table.values < 0):
            raise ValidationError("fuzzy weighting requires non-negative values")
        return table.replace(table.values * factor[None, :, :])
    return table.replace(table.values * np.asarray(factors, dtype=float)[None, :])


def ideal_solutions(weighted: ScoreTable) -> tuple[list[Cell], list[Cell]]:
    """Per-criterion best and worst cells; cost criteria swap the extremes."""
    best, worst = [], []
    for j, kind in enumerate(weighted.kinds):
        column = weighted.column(j)
        key = fuzzy_sort_key if weighted.is_fuzzy else None
        hi = max(column, key=key)
        lo = min(column, key=key)
        if kind == BENEFIT:
            best.append(hi)
            worst.append(lo)
        else:
            best.append(lo)
            worst.append(hi)
    return best, worst


def _distances(weighted: ScoreTable, target: list[Cell]) -> list[float]:
    values = weighted.values
    if weighted.is_fuzzy:
        ref = np.array([t.as_tuple() for t in target], dtype=float)
        diff = values - ref[None, :, :]
        # squared vertex distance per cell; degenerate pairs reduce to |a - b|^2
        per_cell = np.where(
            np.all(diff == diff[..., :1], axis=-1),
            diff[..., 1] ** 2,
            (diff ** 2).sum(axis=-1) / 3.0,
        )
    else:
        per_cell = (values - np.asarray(target, dtype=float)[None, :]) ** 2
    return [math.sqrt(math.fsum(row)) for row in per_cell.tolist()]


def assign_ranks(
    candidates: Sequence[str], closeness: Sequence[float], tol: float = TIE_TOL
) -> tuple[list[int], list[tuple[str, ...]]]:
    """Rank by descending closeness; near-equal values are ordered by candidate id.

    Returns ranks aligned with ``candidates`` and the groups of tied ids.
    """
    order = sorted(range(len(candidates)), key=lambda i: -closeness[i])
    groups: list[list[int]] = []
    for i in order:
        if groups and abs(closeness[groups[-1][0]] - closeness[i]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    ranks = [0] * len(candidates)
    ties = []
    position = 1
    for group in groups:
        group.sort(key=lambda i: candidates[i])
        if len(group) > 1:
            ties.append(tuple(candidates[i] for i in group))
        for i in group:
            ranks[i] = position
            position += 1
    return ranks, ties


def run_topsis(
    table: ScoreTable,
    weights: WeightVector,
    scheme: Optional[str] = None,
) -> TopsisResult:
    """Normalize, weight, find ideals, and score every candidate.

    ``scheme`` defaults to vector normalization for crisp tables and
    linear_max for fuzzy ones.
    """
    if scheme is None:
        scheme = LINEAR_MAX if table.is_fuzzy else VECTOR
    scheme = canonical_scheme(scheme)
    if table.is_fuzzy and not weights.is_fuzzy:
        raise ValidationError("fuzzy TOPSIS needs fuzzy weights; call fuzzify_weights first")
    weights = weights.reorder(table.criteria)
    if table.is_fuzzy:
        weighted = apply_weights(normalize(table, scheme), weights)
    else:
        crisp = WeightVector(weights.criteria, weights.weights, None,
                             weights.consistency_ratio, weights.lambda_max)
        weighted = apply_weights(normalize(table, scheme), crisp)

    best, worst = ideal_solutions(weighted)
    d_plus = _distances(weighted, best)
    d_minus = _distances(weighted, worst)
    closeness = []
    for cid, sp, sm in zip(table.candidates, d_plus, d_minus):
        total = sp + sm
        if total == 0.0:
            raise DegenerateProblemError(
                "degenerate decision problem: every candidate is identical on all weighted criteria"
            )
        closeness.append(sm / total)

    ranks, ties = assign_ranks(table.candidates, closeness)
    results = tuple(
        CandidateResult(cid, sp, sm, cc, rk)
        for cid, sp, sm, cc, rk in zip(table.candidates, d_plus, d_minus, closeness, ranks)
    )
    return TopsisResult(
        candidates=results,
        mode="fuzzy" if table.is_fuzzy else "crisp",
        normalization=scheme,
        weights=weights,
        distance=DISTANCE_NAME if table.is_fuzzy else "euclidean",
        tie_breaks=tuple(ties),
        criteria=table.criteria,
    )
