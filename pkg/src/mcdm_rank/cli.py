"""Command-line interface: ``mcdm-rank {rank,weights,evaluate,fuzzify}``.

Exit codes: 0 success, 1 validation/config error, 2 computation error.
Every failure prints one ``mcdm-rank: error: <kind>: <reason>`` line on
stderr.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import os
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import ComputationError, MCDMError, ValidationError
from .fuzzy import DEFAULT_VOCABULARY, LinguisticVocabulary
from .metrics import compare_labels, compare_rankings
from .profiles import (
    DEFAULT_BINDING,
    DEFAULT_CRITERIA,
    LabelMapping,
    build_score_table,
    fuzzify_records,
    parse_label,
    read_candidates,
    read_scores,
    validate_binding,
)
from .reporting import (
    EVALUATION_CSV_COLUMNS,
    RANKING_CSV_COLUMNS,
    evaluation_rows,
    evaluation_to_json,
    format_evaluation,
    format_rank_table,
    ranking_rows,
    read_json,
    topsis_from_json,
    topsis_to_json,
    write_csv,
    write_json,
)
from .topsis import BENEFIT, COST, LINEAR_MAX, VECTOR, ScoreTable, canonical_scheme, run_topsis
from .weighting import (
    CR_WARNING_THRESHOLD,
    DEFAULT_SPREAD,
    PairwiseComparisonMatrix,
    WeightVector,
    aggregate_judgments,
    derive_weights,
    fuzzify_weights,
)

PROG = "mcdm-rank"
OUT_ENV = "MCDM_RANK_OUT"
DEFAULT_OUT = "mcdm-out"


@dataclass
class RunConfig:
    scores: Optional[str] = None
    candidates: Optional[str] = None
    criteria: tuple[str, ...] = DEFAULT_CRITERIA
    kinds: dict = field(default_factory=dict)
    weights: Optional[str] = None
    pairwise: tuple[str, ...] = ()
    paper_weights: bool = False
    mode: str = "crisp"
    normalization: Optional[str] = None
    spread: float = DEFAULT_SPREAD
    source: Optional[str] = None
    label_to_score: dict = field(default_factory=dict)
    linguistic_binding: tuple = DEFAULT_BINDING
    vocabulary: Optional[str] = None
    out: Optional[str] = None
    seed: Optional[int] = None  # reserved; every path here is deterministic

    KEYS = (
        "scores", "candidates", "criteria", "kinds", "weights", "pairwise", "paper_weights",
        "mode", "normalization", "spread", "source", "label_to_score", "linguistic_binding",
        "vocabulary", "out", "seed",
    )
    PATH_KEYS = ("scores", "candidates", "weights", "vocabulary")

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        data = read_json(path)
        if not isinstance(data, dict):
            raise ValidationError(f"{path}: config must be a JSON object")
        unknown = sorted(set(data) - set(cls.KEYS))
        if unknown:
            raise ValidationError(f"{path}: unknown config key(s) {', '.join(unknown)}")
        base = Path(path).resolve().parent

        def resolve(p):
            return str(p if Path(p).is_absolute() else base / p)

        kwargs = {}
        for key, value in data.items():
            if key in cls.PATH_KEYS and value is not None:
                value = resolve(value)
            elif key == "pairwise":
                value = tuple(resolve(p) for p in ([value] if isinstance(value, str) else value))
            elif key == "criteria":
                value = tuple(value)
            elif key == "linguistic_binding":
                value = tuple(tuple(b) for b in value)
            kwargs[key] = value
        return cls(**kwargs)

    def weight_sources(self) -> list[str]:
        chosen = []
        if self.weights:
            chosen.append("weights")
        if self.pairwise:
            chosen.append("pairwise")
        if self.paper_weights:
            chosen.append("paper_weights")
        return chosen

    def validate(self):
        if self.mode not in ("crisp", "fuzzy"):
            raise ValidationError(f"mode must be crisp or fuzzy, got {self.mode!r}")
        if self.normalization is not None:
            self.normalization = canonical_scheme(self.normalization)
            if self.mode == "fuzzy" and self.normalization == VECTOR:
                raise ValidationError("fuzzy mode supports only linear-max normalization")
        if not (0.0 <= float(self.spread) < 1.0):
            raise ValidationError(f"spread must lie in [0, 1), got {self.spread}")
        if self.source is not None and self.source not in ("expert", "model"):
            raise ValidationError(f"source must be expert or model, got {self.source!r}")
        for name, kind in self.kinds.items():
            if kind not in (BENEFIT, COST):
                raise ValidationError(f"kind for {name!r} must be benefit or cost")
        sources = self.weight_sources()
        if len(sources) != 1:
            raise ValidationError(
                "exactly one weight source is required (--weights, --pairwise or --paper-weights); "
                f"got {', '.join(sources) if sources else 'none'}"
            )

    def snapshot(self) -> dict:
        out = {}
        for key in self.KEYS:
            value = getattr(self, key)
            if isinstance(value, tuple):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            out[key] = value
        return out


# --- helpers -------------------------------------------------------------------

def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _out_dir(flag: Optional[str], config_value: Optional[str] = None) -> Path:
    out = Path(flag or config_value or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_manifest(out: Path, command: str, config: dict, inputs: Sequence, outputs: Sequence[Path]) -> Path:
    manifest = {
        "tool": PROG,
        "version": __version__,
        "command": command,
        "config": config,
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs],
        "environment": {"python": platform.python_version(), "numpy": np.__version__},
        "outputs": [p.name for p in outputs],
        "created_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return write_json(manifest, out / "manifest.json")


def resolve_weights(cfg: RunConfig) -> WeightVector:
    if cfg.paper_weights:
        return WeightVector.paper()
    if cfg.weights:
        return WeightVector.load(cfg.weights)
    matrices = [PairwiseComparisonMatrix.load(p) for p in cfg.pairwise]
    return derive_weights(aggregate_judgments(matrices))


def _warn(msg: str):
    print(f"{PROG}: warning: {msg}", file=sys.stderr)


def load_table(cfg: RunConfig) -> ScoreTable:
    if not cfg.scores:
        raise ValidationError("no score file given (--scores)")
    order = None
    if cfg.candidates:
        order = [c.id for c in read_candidates(cfg.candidates)]
    if cfg.scores.lower().endswith(".json"):
        table = ScoreTable.from_json_obj(read_json(cfg.scores))
        if order is not None and set(order) != set(table.candidates):
            raise ValidationError(f"{cfg.scores}: candidates differ from {cfg.candidates}")
    else:
        records = read_scores(cfg.scores)
        mapping = LabelMapping.from_overrides(cfg.label_to_score)
        try:
            table = build_score_table(records, cfg.criteria, mapping, cfg.source, order)
        except ValidationError as exc:
            raise ValidationError(f"{cfg.scores}: {exc}") from None
    lookup = {k.casefold(): v for k, v in cfg.kinds.items()}
    kinds = tuple(lookup.get(c.casefold(), BENEFIT) for c in table.criteria)
    return ScoreTable(table.candidates, table.criteria, table.values, kinds, table.provenance)


# --- subcommands ---------------------------------------------------------------------

def cmd_rank(cfg: RunConfig, out: Path, stdout=None):
    stdout = stdout or sys.stdout
    cfg.validate()
    table = load_table(cfg)
    weights = resolve_weights(cfg)
    if weights.consistency_ratio is not None and weights.consistency_ratio > CR_WARNING_THRESHOLD:
        _warn(f"consistency ratio {weights.consistency_ratio:.4f} exceeds {CR_WARNING_THRESHOLD}")
    if cfg.mode == "fuzzy":
        table = table.to_degenerate_fuzzy()
        weights = fuzzify_weights(weights, float(cfg.spread))
        scheme = cfg.normalization or LINEAR_MAX
    else:
        if table.is_fuzzy:
            raise ValidationError(f"{cfg.scores}: fuzzy score table requires --mode fuzzy")
        scheme = cfg.normalization or VECTOR
    result = run_topsis(table, weights, scheme)
    cfg.normalization = result.normalization

    outputs = [
        write_json(topsis_to_json(result), out / "ranking.json"),
        write_csv(ranking_rows(result), RANKING_CSV_COLUMNS, out / "ranking.csv"),
    ]
    inputs = [p for p in (cfg.scores, cfg.candidates, cfg.weights, *cfg.pairwise) if p]
    write_manifest(out, "rank", cfg.snapshot(), inputs, outputs)
    print(format_rank_table(result), file=stdout)
    return result


def cmd_weights(pairwise: Sequence[str], out: Path, spread: Optional[float] = None, stdout=None):
    stdout = stdout or sys.stdout
    if not pairwise:
        raise ValidationError("at least one --pairwise file is required")
    matrices = []
    for path in pairwise:
        try:
            matrices.append(PairwiseComparisonMatrix.load(path))
        except ValidationError as exc:
            msg = str(exc)
            raise ValidationError(msg if msg.startswith(str(path)) else f"{path}: {msg}") from None
    weights = derive_weights(aggregate_judgments(matrices))
    if spread is not None:
        weights = fuzzify_weights(weights, spread)
    warn = weights.consistency_ratio > CR_WARNING_THRESHOLD
    if warn:
        _warn(f"consistency ratio {weights.consistency_ratio:.4f} exceeds {CR_WARNING_THRESHOLD}")
    doc = weights.to_json_obj()
    doc["cr_warning"] = warn
    doc["experts"] = len(matrices)
    doc["aggregation"] = "geometric_mean"
    doc["spread"] = spread
    outputs = [write_json(doc, out / "weights.json")]
    write_manifest(out, "weights", {"pairwise": list(pairwise), "spread": spread}, pairwise, outputs)
    for name, w in zip(weights.criteria, weights.weights):
        print(f"{name}\t{w:.6f}", file=stdout)
    print(f"CR\t{weights.consistency_ratio:.6f}", file=stdout)
    return weights


def _read_rank_or_label_csv(path) -> tuple[str, dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read: {exc.strerror}") from None
    reader = csv.DictReader(io.StringIO(text, newline=""), strict=True)
    try:
        rows = list(reader)
    except csv.Error as exc:
        raise ValidationError(f"{path}:{reader.line_num}: malformed CSV: {exc}") from None
    header = [h.strip().lower() for h in (reader.fieldnames or [])]
    id_col = next((c for c in ("candidate_id", "id", "sample_id") if c in header), None)
    if id_col is None:
        raise ValidationError(f"{path}:1: no id column (candidate_id, id or sample_id)")
    kind = "labels" if "label" in header else "ranking" if "rank" in header else None
    if kind is None:
        raise ValidationError(f"{path}:1: need a 'rank' or 'label' column")
    key_map = {h.strip().lower(): h for h in reader.fieldnames}
    data = {}
    for line, row in enumerate(rows, start=2):
        if None in row or any(v is None for v in row.values()):
            raise ValidationError(f"{path}:{line}: wrong number of fields")
        ident = row[key_map[id_col]].strip()
        if ident in data:
            raise ValidationError(f"{path}:{line}: duplicate id {ident!r}")
        try:
            if kind == "labels":
                data[ident] = parse_label(row[key_map["label"]])
            else:
                data[ident] = int(row[key_map["rank"]])
        except (ValidationError, ValueError) as exc:
            raise ValidationError(f"{path}:{line}: {exc}") from None
    if not data:
        raise ValidationError(f"{path}: no rows")
    return kind, data


def load_source(path):
    if str(path).lower().endswith(".json"):
        try:
            return "ranking", topsis_from_json(read_json(path))
        except ValidationError as exc:
            raise ValidationError(f"{path}: {exc}") from None
    return _read_rank_or_label_csv(path)


def cmd_evaluate(sources: Sequence[tuple[str, str]], reference: Optional[str], out: Path,
                 relevant_top: Optional[int] = None, stdout=None):
    stdout = stdout or sys.stdout
    if len(sources) < 2:
        raise ValidationError("evaluate needs at least two --source NAME=PATH entries")
    names = [n for n, _ in sources]
    if len(set(names)) != len(names):
        raise ValidationError("source names must be unique")
    reference = reference or names[0]
    loaded = {name: load_source(path) for name, path in sources}
    kinds = {k for k, _ in loaded.values()}
    if len(kinds) != 1:
        raise ValidationError("cannot mix ranking and label sources in one evaluation")
    kind = kinds.pop()
    data = {name: value for name, (_, value) in loaded.items()}
    if kind == "labels":
        report = compare_labels(data, reference)
    else:
        report = compare_rankings(data, reference, relevant_top)
    outputs = [
        write_json(evaluation_to_json(report), out / "evaluation.json"),
        write_csv(evaluation_rows(report), EVALUATION_CSV_COLUMNS, out / "evaluation.csv"),
    ]
    config = {"sources": [{"name": n, "path": p} for n, p in sources],
              "reference": reference, "relevant_top": relevant_top}
    write_manifest(out, "evaluate", config, [p for _, p in sources], outputs)
    print(format_evaluation(report), file=stdout)
    return report


def cmd_fuzzify(cfg: RunConfig, out: Path, stdout=None):
    stdout = stdout or sys.stdout
    if not cfg.scores:
        raise ValidationError("no score file given (--scores)")
    vocab = LinguisticVocabulary.load(cfg.vocabulary) if cfg.vocabulary else DEFAULT_VOCABULARY
    validate_binding(cfg.linguistic_binding, vocab)
    order = [c.id for c in read_candidates(cfg.candidates)] if cfg.candidates else None
    records = read_scores(cfg.scores)
    try:
        table = fuzzify_records(records, cfg.criteria, vocab, cfg.linguistic_binding,
                                LabelMapping.from_overrides(cfg.label_to_score), cfg.source, order)
    except ValidationError as exc:
        raise ValidationError(f"{cfg.scores}: {exc}") from None
    outputs = [write_json(table.to_json_obj(), out / "fuzzy_scores.json")]
    snap = {k: v for k, v in cfg.snapshot().items()
            if k in ("scores", "candidates", "criteria", "source", "label_to_score",
                     "linguistic_binding", "vocabulary")}
    inputs = [p for p in (cfg.scores, cfg.candidates, cfg.vocabulary) if p]
    write_manifest(out, "fuzzify", snap, inputs, outputs)
    print(f"wrote {outputs[0]}", file=stdout)
    return table


# --- argument parsing ------------------------------------------------------------------

def _source_pair(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected NAME=PATH, got {text!r}")
    name, path = text.split("=", 1)
    if not name.strip() or not path.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=PATH, got {text!r}")
    return name.strip(), path.strip()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"usage: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=PROG, description="Rank candidates with crisp or fuzzy TOPSIS and evaluate rankings.")
    p.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="run config JSON; flags override its values")
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")

    def data_flags(sp):
        sp.add_argument("--scores", help="score CSV (or fuzzy score JSON for rank)")
        sp.add_argument("--candidates", help="candidate CSV; fixes candidate order")
        sp.add_argument("--criteria", nargs="+", help="criteria in column order")
        sp.add_argument("--source", choices=("expert", "model"), help="use only this score source")

    r = sub.add_parser("rank", help="rank candidates with TOPSIS")
    common(r)
    data_flags(r)
    r.add_argument("--weights", help="weight JSON {criteria, weights}")
    r.add_argument("--pairwise", nargs="+", help="one pairwise JSON per expert")
    r.add_argument("--paper-weights", action="store_true",
                   help="Skills 0.60, Experience 0.20, Education 0.15, About 0.05")
    r.add_argument("--mode", choices=("crisp", "fuzzy"))
    r.add_argument("--normalization", choices=("vector", "linear-max", "linear_max"))
    r.add_argument("--spread", type=float, help=f"TFN weight spread (default {DEFAULT_SPREAD})")

    w = sub.add_parser("weights", help="derive AHP weights from pairwise matrices")
    common(w)
    w.add_argument("--pairwise", nargs="+", help="one pairwise JSON per expert")
    w.add_argument("--spread", type=float, help="also emit TFN weights with this spread")

    e = sub.add_parser("evaluate", help="compare rankings or label files against a reference")
    common(e)
    e.add_argument("--source", dest="sources", action="append", type=_source_pair, default=[],
                   metavar="NAME=PATH", help="ranking.json, rank CSV, or label CSV; repeat")
    e.add_argument("--reference", help="source name treated as ground truth (default: first)")
    e.add_argument("--relevant-top", type=int, help="reference top-k counted relevant (default ceil(n/2))")

    f = sub.add_parser("fuzzify", help="map scores to linguistic TFNs and average raters")
    common(f)
    data_flags(f)
    f.add_argument("--vocabulary", help="linguistic vocabulary JSON (default: 5-term scale)")
    return p


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    flag_sources = [name for name in ("weights", "pairwise", "paper_weights") if getattr(args, name, None)]
    if len(flag_sources) > 1:
        raise ValidationError(f"conflicting weight sources: {', '.join(flag_sources)}")
    if flag_sources:
        cfg.weights, cfg.pairwise, cfg.paper_weights = None, (), False
    overrides = {
        "scores": "scores", "candidates": "candidates", "source": "source", "weights": "weights",
        "paper_weights": "paper_weights", "mode": "mode", "normalization": "normalization",
        "spread": "spread", "vocabulary": "vocabulary",
    }
    for attr, key in overrides.items():
        value = getattr(args, attr, None)
        if value is not None and value is not False:
            setattr(cfg, key, value)
    if getattr(args, "pairwise", None):
        cfg.pairwise = tuple(args.pairwise)
    if getattr(args, "criteria", None):
        cfg.criteria = tuple(args.criteria)
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command in ("rank", "fuzzify"):
            cfg = _config_from_args(args)
            out = _out_dir(args.out, cfg.out)
            if args.command == "rank":
                cmd_rank(cfg, out)
            else:
                cmd_fuzzify(cfg, out)
        elif args.command == "weights":
            cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
            pairwise = args.pairwise or list(cfg.pairwise)
            spread = args.spread
            cmd_weights(pairwise, _out_dir(args.out, cfg.out), spread)
        else:
            cmd_evaluate(args.sources, args.reference, _out_dir(args.out), args.relevant_top)
    except ValidationError as exc:
        _fail("validation", exc)
        return 1
    except ComputationError as exc:
        _fail("computation", exc)
        return 2
    except MCDMError as exc:
        _fail("error", exc)
        return 1
    return 0


def _fail(kind: str, exc: Exception):
    reason = " ".join(str(exc).split())
    print(f"{PROG}: error: {kind}: {reason}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
