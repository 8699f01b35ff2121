"""Text-blind translational embedding baseline.

Entities and relations live in R^d; a triple (h, r, t) scores the negative
distance ||v_h + v_r - v_t|| under L1 or L2. Training minimizes the margin
ranking loss max(0, margin + d_pos - d_neg) with uniform negative sampling,
one corrupted head or tail per positive. The model consumes ids only, never
surface text, which is exactly what makes it a perturbation-invariance
oracle for the transform suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import KgsynthError, ValidationError
from .evaluate import MetricsReport, Query, compute_metrics, rank_gold
from .kg import KnowledgeGraph

_EPS = 1e-12


class DivergenceError(KgsynthError):
    """Training produced non-finite embeddings."""


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 100
    margin: float = 1.0
    norm: str = "L1"
    learning_rate: float = 0.01
    epochs: int = 100
    negatives_per_positive: int = 1
    seed: int = 0
    workers: int = 1  # >1 trades bit-exact reproducibility for speed


@dataclass(frozen=True)
class EmbeddingModel:
    entity_ids: tuple[str, ...]
    relation_ids: tuple[str, ...]
    entity_vectors: np.ndarray  # (n_entities, dim)
    relation_vectors: np.ndarray  # (n_relations, dim)
    norm: str = "L1"
    margin: float = 1.0

    @cached_property
    def entity_row(self) -> dict[str, int]:
        return {eid: i for i, eid in enumerate(self.entity_ids)}

    @cached_property
    def relation_row(self) -> dict[str, int]:
        return {rid: i for i, rid in enumerate(self.relation_ids)}

    @property
    def dim(self) -> int:
        return self.entity_vectors.shape[1]

    def entity_vector(self, entity_id: str) -> np.ndarray:
        row = self.entity_row.get(entity_id)
        if row is None:
            raise ValueError(f"unknown entity id {entity_id!r}")
        return self.entity_vectors[row]

    def relation_vector(self, relation_id: str) -> np.ndarray:
        row = self.relation_row.get(relation_id)
        if row is None:
            raise ValueError(f"unknown relation id {relation_id!r}")
        return self.relation_vectors[row]


def _distance(diff: np.ndarray, norm: str) -> float:
    if norm == "L1":
        return float(np.abs(diff).sum())
    return float(np.sqrt((diff * diff).sum()))


def _distance_grad(diff: np.ndarray, norm: str) -> np.ndarray:
    # Subgradient at kinks: sign(0) = 0 for L1, zero vector at d = 0 for L2.
    if norm == "L1":
        return np.sign(diff)
    d = np.sqrt((diff * diff).sum())
    if d < _EPS:
        return np.zeros_like(diff)
    return diff / d


def init_model(kg: KnowledgeGraph, dim: int, seed: int, norm: str = "L1",
               margin: float = 1.0) -> EmbeddingModel:
    """Uniform(-6/sqrt(dim), 6/sqrt(dim)) init; all vectors L2-normalized."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if norm not in ("L1", "L2"):
        raise ValueError(f"norm must be 'L1' or 'L2', got {norm!r}")
    rng = np.random.default_rng(seed)
    bound = 6.0 / np.sqrt(dim)
    entity_vectors = rng.uniform(-bound, bound, size=(len(kg.entities), dim))
    relation_vectors = rng.uniform(-bound, bound, size=(len(kg.relations), dim))
    _normalize_rows(entity_vectors)
    _normalize_rows(relation_vectors)
    return EmbeddingModel(
        entity_ids=kg.entity_ids,
        relation_ids=kg.relation_ids,
        entity_vectors=entity_vectors,
        relation_vectors=relation_vectors,
        norm=norm,
        margin=margin,
    )


def _normalize_rows(matrix: np.ndarray) -> None:
    # Skip rows already unit-norm so renormalizing is a bit-exact no-op on an
    # untouched model (zero learning rate must reproduce the init exactly).
    norms = np.sqrt((matrix * matrix).sum(axis=1, keepdims=True))
    np.maximum(norms, _EPS, out=norms)
    rows = (np.abs(norms - 1.0) > 1e-12)[:, 0]
    if rows.any():
        matrix[rows] /= norms[rows]


def score_triple(model: EmbeddingModel, h: str, r: str, t: str) -> float:
    """Negative translation distance; higher means more plausible."""
    diff = model.entity_vector(h) + model.relation_vector(r) - model.entity_vector(t)
    return -_distance(diff, model.norm)


def margin_loss_and_grads(
    e_h: np.ndarray,
    e_r: np.ndarray,
    e_t: np.ndarray,
    e_h_neg: np.ndarray,
    e_t_neg: np.ndarray,
    margin: float,
    norm: str,
) -> tuple[float, tuple[np.ndarray, ...]]:
    """Hinge loss max(0, margin + d_pos - d_neg) and its gradients.

    Returns (loss, (g_h, g_r, g_t, g_h_neg, g_t_neg)); gradients are zero
    when the hinge is inactive.
    """
    diff_pos = e_h + e_r - e_t
    diff_neg = e_h_neg + e_r - e_t_neg
    loss = margin + _distance(diff_pos, norm) - _distance(diff_neg, norm)
    if loss <= 0.0:
        zero = np.zeros_like(e_h)
        return 0.0, (zero, zero.copy(), zero.copy(), zero.copy(), zero.copy())
    g_pos = _distance_grad(diff_pos, norm)
    g_neg = _distance_grad(diff_neg, norm)
    return loss, (g_pos, g_pos - g_neg, -g_pos, -g_neg, g_neg)


def train(kg: KnowledgeGraph, config: TrainConfig = TrainConfig()) -> EmbeddingModel:
    """Margin-ranking SGD over the train split.

    Deterministic for a fixed seed when ``workers == 1``; with more workers,
    disjoint minibatches update the shared vectors last-write-wins and only
    statistical reproducibility is claimed. Entity vectors are renormalized
    to unit L2 norm after every epoch.
    """
    if not kg.train:
        raise ValueError("train split is empty")
    model = init_model(kg, config.dim, config.seed, norm=config.norm, margin=config.margin)
    entity_row = model.entity_row
    relation_row = model.relation_row
    h_idx = np.array([entity_row[h] for h, _, _ in kg.train], dtype=np.int64)
    r_idx = np.array([relation_row[r] for _, r, _ in kg.train], dtype=np.int64)
    t_idx = np.array([entity_row[t] for _, _, t in kg.train], dtype=np.int64)

    entities = model.entity_vectors
    relations = model.relation_vectors
    n_train = len(kg.train)
    n_entities = len(kg.entity_ids)
    rng = np.random.default_rng([config.seed, 1])

    # overflow inside a diverging epoch is reported via the finiteness check,
    # not as a stream of runtime warnings
    with np.errstate(all="ignore"):
        for epoch in range(config.epochs):
            order = rng.permutation(n_train)
            repeats = config.negatives_per_positive
            corrupt_tail = rng.random((n_train, repeats)) < 0.5
            corrupt_with = rng.integers(0, n_entities, size=(n_train, repeats))
            if config.workers > 1:
                _run_epoch_threaded(
                    entities, relations, h_idx, r_idx, t_idx,
                    order, corrupt_tail, corrupt_with, config,
                )
            else:
                _run_epoch(
                    entities, relations, h_idx, r_idx, t_idx,
                    order, corrupt_tail, corrupt_with, config,
                )
            _normalize_rows(entities)
            if not (np.isfinite(entities).all() and np.isfinite(relations).all()):
                raise DivergenceError(f"non-finite embeddings after epoch {epoch + 1}")
    return model


def _run_epoch(entities, relations, h_idx, r_idx, t_idx,
               order, corrupt_tail, corrupt_with, config) -> None:
    lr = config.learning_rate
    margin = config.margin
    norm = config.norm
    for i in order:
        h, r, t = h_idx[i], r_idx[i], t_idx[i]
        for k in range(corrupt_tail.shape[1]):
            if corrupt_tail[i, k]:
                h_neg, t_neg = h, corrupt_with[i, k]
            else:
                h_neg, t_neg = corrupt_with[i, k], t
            loss, grads = margin_loss_and_grads(
                entities[h], relations[r], entities[t],
                entities[h_neg], entities[t_neg], margin, norm,
            )
            if loss <= 0.0:
                continue
            g_h, g_r, g_t, g_h_neg, g_t_neg = grads
            entities[h] -= lr * g_h
            relations[r] -= lr * g_r
            entities[t] -= lr * g_t
            entities[h_neg] -= lr * g_h_neg
            entities[t_neg] -= lr * g_t_neg


def _run_epoch_threaded(entities, relations, h_idx, r_idx, t_idx,
                        order, corrupt_tail, corrupt_with, config) -> None:
    from concurrent.futures import ThreadPoolExecutor

    chunks = np.array_split(order, config.workers)
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = [
            pool.submit(
                _run_epoch, entities, relations, h_idx, r_idx, t_idx,
                chunk, corrupt_tail, corrupt_with, config,
            )
            for chunk in chunks
            if len(chunk)
        ]
        for future in futures:
            future.result()


def probe_loss(model: EmbeddingModel, kg: KnowledgeGraph, seed: int = 0,
               batch_size: int = 1000) -> float:
    """Mean hinge loss over a fixed probe batch with fixed negatives.

    Depends only on (kg, seed, batch_size) for the batch, so successive
    models from a deterministic training run are directly comparable.
    """
    n = min(batch_size, len(kg.train))
    if n == 0:
        raise ValueError("train split is empty")
    rng = np.random.default_rng([seed, 2])
    entity_row = model.entity_row
    triples = kg.train[:n]
    corrupt_tail = rng.random(n) < 0.5
    corrupt_with = rng.integers(0, len(kg.entity_ids), size=n)
    total = 0.0
    for i, (h, r, t) in enumerate(triples):
        h_row, t_row = entity_row[h], entity_row[t]
        if corrupt_tail[i]:
            h_neg, t_neg = h_row, int(corrupt_with[i])
        else:
            h_neg, t_neg = int(corrupt_with[i]), t_row
        loss, _ = margin_loss_and_grads(
            model.entity_vectors[h_row],
            model.relation_vector(r),
            model.entity_vectors[t_row],
            model.entity_vectors[h_neg],
            model.entity_vectors[t_neg],
            model.margin,
            model.norm,
        )
        total += loss
    return total / n


def score_all(model: EmbeddingModel, known_id: str, relation_id: str,
              direction: str) -> dict[str, float]:
    """score_triple against every entity at once, as a scores table.

    Vectorized but definitionally identical to calling score_triple per
    candidate (the equivalence is covered by tests).
    """
    known = model.entity_vector(known_id)
    rel = model.relation_vector(relation_id)
    if direction == "tail":
        diff = (known + rel) - model.entity_vectors
    elif direction == "head":
        diff = (model.entity_vectors + rel) - known
    else:
        raise ValueError(f"direction must be 'tail' or 'head', got {direction!r}")
    # in-place ops reuse the (n_entities, dim) buffer; this path runs once per
    # query over the full entity table, so allocation churn matters
    if model.norm == "L1":
        np.abs(diff, out=diff)
        dists = diff.sum(axis=1)
    else:
        np.multiply(diff, diff, out=diff)
        dists = diff.sum(axis=1)
        np.sqrt(dists, out=dists)
    np.negative(dists, out=dists)
    return dict(zip(model.entity_ids, dists.tolist()))


def evaluate_model(model: EmbeddingModel, kg: KnowledgeGraph, split: str = "test",
                   filtered: bool = True) -> MetricsReport:
    """Rank every split triple in both directions and aggregate the metrics."""
    records = []
    for h, r, t in kg.split(split):
        for direction, known, gold in (("tail", h, t), ("head", t, h)):
            scores = score_all(model, known, r, direction)
            query = Query(known=(known, r), direction=direction, gold=gold)
            records.append(rank_gold(scores, query, kg, filtered=filtered))
    return compute_metrics(records, filtered=filtered)


def save_model(model: EmbeddingModel, directory: str | Path) -> None:
    """TSV checkpoint: id<TAB>comma-joined components, plus a manifest."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    _dump_vectors(root / "entity_vectors.tsv", model.entity_ids, model.entity_vectors)
    _dump_vectors(root / "relation_vectors.tsv", model.relation_ids, model.relation_vectors)
    with open(root / "model.tsv", "w", encoding="utf-8", newline="") as fh:
        fh.write(f"dim\t{model.dim}\n")
        fh.write(f"norm\t{model.norm}\n")
        fh.write(f"margin\t{model.margin!r}\n")


def _dump_vectors(path: Path, ids: tuple[str, ...], matrix: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row_id, row in zip(ids, matrix):
            fh.write(row_id + "\t" + ",".join(repr(float(v)) for v in row) + "\n")


def load_model(directory: str | Path) -> EmbeddingModel:
    root = Path(directory)
    meta = {}
    with open(root / "model.tsv", encoding="utf-8") as fh:
        for line in fh:
            key, value = line.rstrip("\n").split("\t")
            meta[key] = value
    entity_ids, entity_vectors = _load_vectors(root / "entity_vectors.tsv")
    relation_ids, relation_vectors = _load_vectors(root / "relation_vectors.tsv")
    return EmbeddingModel(
        entity_ids=entity_ids,
        relation_ids=relation_ids,
        entity_vectors=entity_vectors,
        relation_vectors=relation_vectors,
        norm=meta["norm"],
        margin=float(meta["margin"]),
    )


def _load_vectors(path: Path) -> tuple[tuple[str, ...], np.ndarray]:
    ids = []
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            row_id, cells = line.rstrip("\n").split("\t")
            ids.append(row_id)
            rows.append([float(v) for v in cells.split(",")])
    if not rows:
        raise ValidationError(f"{path} holds no vectors")
    return tuple(ids), np.array(rows, dtype=float)
