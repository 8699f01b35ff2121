"""Link-prediction ranking and metrics.

Queries are partial triples, (h, r, ?) for tail prediction or (?, r, t) for
head prediction. Ranking is pessimistic on ties (the gold entity ranks below
every rival with an equal score) and filtered by default: candidates that
form other known-true triples for the same query, in any split, are removed
before ranking. Both choices are stamped into every MetricsReport.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .kg import KnowledgeGraph

HITS_KS = (1, 3, 10)

PESSIMISTIC = "pessimistic"
CANDIDATE_ORDER = "candidate-order"


@dataclass(frozen=True)
class Query:
    """One link-prediction query: ``known`` is (entity_id, relation_id)."""

    known: tuple[str, str]
    direction: str  # "tail" for (h, r, ?), "head" for (?, r, t)
    gold: str

    def __post_init__(self) -> None:
        if self.direction not in ("tail", "head"):
            raise ValueError(f"direction must be 'tail' or 'head', got {self.direction!r}")


@dataclass(frozen=True)
class RankingRecord:
    query: Query
    gold_rank: int


@dataclass(frozen=True)
class MetricsReport:
    hits: dict[int, float]
    mr: float
    mrr: float
    filtered: bool = True
    tie_policy: str = PESSIMISTIC

    def to_text(self) -> str:
        """Flat key<TAB>value rendering, full float precision."""
        lines = [f"hits@{k}\t{self.hits[k]!r}" for k in sorted(self.hits)]
        lines.append(f"mr\t{self.mr!r}")
        lines.append(f"mrr\t{self.mrr!r}")
        lines.append(f"filtered\t{str(self.filtered).lower()}")
        lines.append(f"tie_policy\t{self.tie_policy}")
        return "\n".join(lines) + "\n"


def rank_gold(
    scores: dict[str, float],
    query: Query,
    kg: KnowledgeGraph,
    filtered: bool = True,
) -> RankingRecord:
    """Rank the gold entity within ``scores`` (higher score is better).

    rank = 1 + number of surviving candidates scoring >= the gold score.
    With ``filtered``, entities answering the same partial query elsewhere in
    train/valid/test are dropped from the candidate set first.
    """
    if query.gold not in scores:
        raise ValidationError(f"gold entity {query.gold!r} missing from scores")
    if len(scores) != len(kg.entities):
        raise ValidationError(
            f"scores cover {len(scores)} entities, expected {len(kg.entities)}"
        )
    gold_score = scores[query.gold]
    known_entity, relation = query.known
    excluded: frozenset[str] = frozenset()
    if filtered:
        excluded = kg.answer_index.get((query.direction, known_entity, relation), frozenset())
    # rank = 1 + |{e != gold, e not excluded : score(e) >= gold_score}|; counted
    # in bulk, then the gold itself and the (few) excluded rivals are backed out.
    values = np.fromiter(scores.values(), dtype=float, count=len(scores))
    at_or_above = int((values >= gold_score).sum())
    excluded_at_or_above = sum(
        1
        for entity in excluded
        if entity != query.gold and scores.get(entity, float("-inf")) >= gold_score
    )
    return RankingRecord(query=query, gold_rank=at_or_above - excluded_at_or_above)


def compute_metrics(
    records: list[RankingRecord],
    filtered: bool = True,
    tie_policy: str = PESSIMISTIC,
) -> MetricsReport:
    """Aggregate gold ranks into Hits@k for k in {1,3,10}, MR, and MRR."""
    if not records:
        raise ValueError("cannot compute metrics over zero records")
    n = len(records)
    hits = {k: sum(1 for rec in records if rec.gold_rank <= k) / n for k in HITS_KS}
    mr = sum(rec.gold_rank for rec in records) / n
    mrr = sum(1.0 / rec.gold_rank for rec in records) / n
    return MetricsReport(hits=hits, mr=mr, mrr=mrr, filtered=filtered, tie_policy=tie_policy)


def split_queries(kg: KnowledgeGraph, split: str = "test") -> list[Query]:
    """Both-direction queries for every triple of a split, in split order."""
    queries = []
    for h, r, t in kg.split(split):
        queries.append(Query(known=(h, r), direction="tail", gold=t))
        queries.append(Query(known=(t, r), direction="head", gold=h))
    return queries


def evaluate_predictions(kg: KnowledgeGraph, predictions_file: str | Path) -> MetricsReport:
    """Score an external system's ranked candidate lists against the test split.

    File format, one line per (triple, direction):
    ``head<TAB>relation<TAB>tail<TAB>direction<TAB>candidate,candidate,...``
    with candidates best-first. The gold rank is its 1-based list position;
    a gold entity absent from its list is ranked |E| (worst case).
    """
    path = Path(predictions_file)
    entity_ids = set(kg.entity_ids)
    relation_ids = set(kg.relation_ids)
    ranked: dict[tuple[str, str, str, str], list[str]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) != 5:
                raise ValidationError(f"{path.name}:{lineno}: expected 5 tab-separated fields")
            h, r, t, direction, candidate_cell = cells
            if direction not in ("tail", "head"):
                raise ValidationError(f"{path.name}:{lineno}: bad direction {direction!r}")
            for eid in (h, t):
                if eid not in entity_ids:
                    raise ValidationError(f"{path.name}:{lineno}: unknown entity {eid!r}")
            if r not in relation_ids:
                raise ValidationError(f"{path.name}:{lineno}: unknown relation {r!r}")
            candidates = candidate_cell.split(",") if candidate_cell else []
            for c in candidates:
                if c not in entity_ids:
                    raise ValidationError(f"{path.name}:{lineno}: unknown candidate {c!r}")
            key = (h, r, t, direction)
            if key in ranked:
                raise ValidationError(f"{path.name}:{lineno}: duplicate prediction for {key}")
            ranked[key] = candidates

    missing = []
    for h, r, t in kg.test:
        for direction in ("tail", "head"):
            if (h, r, t, direction) not in ranked:
                missing.append((h, r, t, direction))
    if missing:
        shown = ", ".join(map(str, missing[:5]))
        raise ValidationError(
            f"predictions missing for {len(missing)} (triple, direction) queries: {shown}"
        )

    worst = len(kg.entities)
    records = []
    for h, r, t in kg.test:
        for direction in ("tail", "head"):
            candidates = ranked[(h, r, t, direction)]
            gold = t if direction == "tail" else h
            known = (h, r) if direction == "tail" else (t, r)
            try:
                rank = candidates.index(gold) + 1
            except ValueError:
                rank = worst
            records.append(
                RankingRecord(
                    query=Query(known=known, direction=direction, gold=gold),
                    gold_rank=rank,
                )
            )
    return compute_metrics(records, filtered=False, tie_policy=CANDIDATE_ORDER)
