"""Criterion weights from expert pairwise comparisons (AHP eigenvector method)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceError, ValidationError
from .fuzzy import TriangularFuzzyNumber

# Saaty's random consistency indices by matrix order.
RANDOM_INDEX = {
    2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24,
    7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49,
}
CR_WARNING_THRESHOLD = 0.10
DEFAULT_SPREAD = 0.25
RECIPROCAL_TOL = 1e-9
WEIGHT_SUM_TOL = 1e-9

PAPER_WEIGHTS = {
    "Skills": 0.60,
    "Experience": 0.20,
    "Education": 0.15,
    "About": 0.05,
}


def _check_criteria(criteria) -> tuple[str, ...]:
    criteria = tuple(str(c) for c in criteria)
    folded = [c.casefold() for c in criteria]
    if len(set(folded)) != len(folded):
        raise ValidationError(f"duplicate criterion names in {list(criteria)}")
    return criteria


@dataclass(frozen=True)
class PairwiseComparisonMatrix:
    """Reciprocal matrix of importance ratios: entries[i][j] = importance of i over j."""

    criteria: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self):
        criteria = _check_criteria(self.criteria)
        entries = np.array(self.entries, dtype=float)
        n = len(criteria)
        if n < 2:
            raise ValidationError("a pairwise comparison matrix needs at least 2 criteria")
        if entries.shape != (n, n):
            raise ValidationError(f"pairwise matrix has shape {entries.shape}, expected ({n}, {n})")
        if not np.all(np.isfinite(entries)) or np.any(entries <= 0):
            raise ValidationError("pairwise entries must be finite and positive")
        for i in range(n):
            if entries[i, i] != 1.0:
                raise ValidationError(
                    f"diagonal entry for {criteria[i]!r} is {entries[i, i]}, expected 1"
                )
            for j in range(i + 1, n):
                if abs(entries[i, j] * entries[j, i] - 1.0) > RECIPROCAL_TOL:
                    raise ValidationError(
                        f"matrix is not reciprocal at ({criteria[i]!r}, {criteria[j]!r}): "
                        f"{entries[i, j]} * {entries[j, i]} != 1"
                    )
        entries.setflags(write=False)
        object.__setattr__(self, "criteria", criteria)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.criteria)

    @classmethod
    def from_weights(cls, criteria: Sequence[str], weights: Sequence[float]) -> "PairwiseComparisonMatrix":
        """Perfectly consistent matrix with entries w_i / w_j."""
        w = np.asarray(weights, dtype=float)
        entries = w[:, None] / w[None, :]
        np.fill_diagonal(entries, 1.0)
        return cls(tuple(criteria), entries)

    def to_json_obj(self) -> dict:
        return {"criteria": list(self.criteria), "entries": self.entries.tolist()}

    @classmethod
    def from_json_obj(cls, data) -> "PairwiseComparisonMatrix":
        if not isinstance(data, dict) or "criteria" not in data or "entries" not in data:
            raise ValidationError('pairwise matrix JSON must have "criteria" and "entries"')
        try:
            entries = np.array(data["entries"], dtype=float)
        except (TypeError, ValueError):
            raise ValidationError("pairwise entries must be a rectangular array of numbers") from None
        return cls(tuple(data["criteria"]), entries)

    @classmethod
    def load(cls, path) -> "PairwiseComparisonMatrix":
        return cls.from_json_obj(_read_json(path))


@dataclass(frozen=True)
class WeightVector:
    """Normalized criterion weights, optionally with TFN counterparts.

    ``consistency_ratio`` is None when the weights were given directly rather
    than derived from a pairwise matrix.
    """

    criteria: tuple[str, ...]
    weights: tuple[float, ...]
    fuzzy_weights: Optional[tuple[TriangularFuzzyNumber, ...]] = None
    consistency_ratio: Optional[float] = None
    lambda_max: Optional[float] = None
    iterations: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        criteria = _check_criteria(self.criteria)
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != len(criteria):
            raise ValidationError(f"{len(weights)} weights given for {len(criteria)} criteria")
        if not criteria:
            raise ValidationError("weight vector is empty")
        for name, w in zip(criteria, weights):
            if not math.isfinite(w) or w <= 0:
                raise ValidationError(f"weight for {name!r} must be positive, got {w}")
        total = math.fsum(weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights sum to {total!r}, expected 1")
        if self.fuzzy_weights is not None:
            fuzzy = tuple(self.fuzzy_weights)
            if len(fuzzy) != len(weights):
                raise ValidationError("fuzzy weights and crisp weights differ in length")
            for name, w, t in zip(criteria, weights, fuzzy):
                if t.m != w:
                    raise ValidationError(f"fuzzy weight for {name!r} has modal {t.m}, expected {w}")
            object.__setattr__(self, "fuzzy_weights", fuzzy)
        object.__setattr__(self, "criteria", criteria)
        object.__setattr__(self, "weights", weights)

    @property
    def is_fuzzy(self) -> bool:
        return self.fuzzy_weights is not None

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.criteria, self.weights))

    @classmethod
    def from_mapping(cls, weights: dict[str, float]) -> "WeightVector":
        return cls(tuple(weights), tuple(weights.values()))

    @classmethod
    def paper(cls) -> "WeightVector":
        return cls.from_mapping(PAPER_WEIGHTS)

    def reorder(self, criteria: Sequence[str]) -> "WeightVector":
        """Return the same weights listed in ``criteria`` order (matched case-insensitively)."""
        index = {c.casefold(): i for i, c in enumerate(self.criteria)}
        missing = [c for c in criteria if c.casefold() not in index]
        extra = set(index) - {c.casefold() for c in criteria}
        if missing or extra:
            raise ValidationError(
                f"weight criteria {list(self.criteria)} do not match table criteria {list(criteria)}"
            )
        order = [index[c.casefold()] for c in criteria]
        fuzzy = None if self.fuzzy_weights is None else tuple(self.fuzzy_weights[i] for i in order)
        return WeightVector(
            tuple(criteria),
            tuple(self.weights[i] for i in order),
            fuzzy,
            self.consistency_ratio,
            self.lambda_max,
            self.iterations,
        )

    def to_json_obj(self) -> dict:
        out = {
            "criteria": list(self.criteria),
            "weights": list(self.weights),
            "fuzzy_weights": None if self.fuzzy_weights is None
            else [list(t.as_tuple()) for t in self.fuzzy_weights],
            "consistency_ratio": self.consistency_ratio,
            "lambda_max": self.lambda_max,
        }
        return out

    @classmethod
    def from_json_obj(cls, data) -> "WeightVector":
        if not isinstance(data, dict) or "criteria" not in data or "weights" not in data:
            raise ValidationError('weight JSON must have "criteria" and "weights"')
        criteria, weights = data["criteria"], data["weights"]
        if not isinstance(criteria, list) or not isinstance(weights, list):
            raise ValidationError('"criteria" and "weights" must be arrays')
        try:
            weights = tuple(float(w) for w in weights)
        except (TypeError, ValueError):
            raise ValidationError("weights must be numbers") from None
        fuzzy = data.get("fuzzy_weights")
        if fuzzy is not None:
            fuzzy = tuple(TriangularFuzzyNumber(*t) for t in fuzzy)
        return cls(tuple(criteria), weights, fuzzy, data.get("consistency_ratio"), data.get("lambda_max"))

    @classmethod
    def load(cls, path) -> "WeightVector":
        return cls.from_json_obj(_read_json(path))


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read: {exc.strerror}") from None


def aggregate_judgments(matrices: Sequence[PairwiseComparisonMatrix]) -> PairwiseComparisonMatrix:
    """Element-wise geometric mean of several experts' matrices."""
    matrices = list(matrices)
    if not matrices:
        raise ValidationError("no pairwise matrices to aggregate")
    first = matrices[0]
    for other in matrices[1:]:
        if other.n != first.n:
            raise ValidationError(
                f"pairwise matrices cover {first.n} and {other.n} criteria"
            )
        for a, b in zip(first.criteria, other.criteria):
            if a.casefold() != b.casefold():
                raise ValidationError(f"criterion lists diverge at {a!r} vs {b!r}")
    if len(matrices) == 1:
        return first
    k = len(matrices)
    stack = np.stack([m.entries for m in matrices])
    entries = np.prod(stack, axis=0) ** (1.0 / k)
    np.fill_diagonal(entries, 1.0)
    return PairwiseComparisonMatrix(first.criteria, entries)


def principal_eigenvector(
    entries: np.ndarray, tol: float = 1e-12, max_iter: int = 10_000
) -> tuple[np.ndarray, int]:
    """Power iteration from the uniform vector, normalized to sum 1 each step."""
    n = entries.shape[0]
    w = np.full(n, 1.0 / n)
    residual = math.inf
    for it in range(1, max_iter + 1):
        nxt = entries @ w
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - w).sum() / np.abs(nxt).sum())
        w = nxt
        if residual < tol:
            return w, it
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations (residual {residual:.3e})",
        residual,
    )


def derive_weights(matrix: PairwiseComparisonMatrix, max_iter: int = 10_000) -> WeightVector:
    w, iterations = principal_eigenvector(matrix.entries, max_iter=max_iter)
    n = matrix.n
    if n not in RANDOM_INDEX:
        raise ValidationError(f"no random index for {n} criteria (supported: 2-10)")
    lam = float(np.mean((matrix.entries @ w) / w))
    ri = RANDOM_INDEX[n]
    if ri == 0.0:
        cr = 0.0
    else:
        # rounding can push lambda_max a hair below n on consistent matrices
        cr = max(0.0, ((lam - n) / (n - 1)) / ri)
    return WeightVector(matrix.criteria, tuple(w.tolist()), None, cr, lam, iterations)


def fuzzify_weights(weights: WeightVector, spread: float = DEFAULT_SPREAD) -> WeightVector:
    """Attach TFNs (w(1-spread), w, w(1+spread)) clamped to [0, 1]."""
    if not (0.0 <= spread < 1.0):
        raise ValidationError(f"spread must lie in [0, 1), got {spread}")
    fuzzy = tuple(
        TriangularFuzzyNumber(max(0.0, w * (1.0 - spread)), w, min(1.0, w * (1.0 + spread)))
        for w in weights.weights
    )
    return WeightVector(
        weights.criteria, weights.weights, fuzzy,
        weights.consistency_ratio, weights.lambda_max, weights.iterations,
    )
