"""Knowledge-graph data model and bit-exact TSV I/O.

A dataset directory holds six UTF-8, LF-terminated files:

    train.tsv / valid.tsv / test.tsv   head_id<TAB>relation_id<TAB>tail_id
    entities.tsv                       entity_id<TAB>name
    relations.tsv                      relation_id<TAB>name
    descriptions.tsv                   entity_id<TAB>description

Names and descriptions must not contain tabs or newlines; such values are
rejected rather than escaped so files stay greppable and round-trips stay
byte-exact. ``descriptions.tsv`` may omit entities (missing means empty).
Entity and relation iteration order is file order; every seeded algorithm
downstream indexes against this order, which is what makes runs reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import LoadError, ValidationError

Triple = tuple[str, str, str]

DATASET_FILES = (
    "train.tsv",
    "valid.tsv",
    "test.tsv",
    "entities.tsv",
    "relations.tsv",
    "descriptions.tsv",
)

SPLITS = ("train", "valid", "test")


@dataclass(frozen=True)
class KnowledgeGraph:
    """Immutable knowledge graph with per-entity descriptions.

    ``entities`` and ``relations`` are (id, name) pairs in file order;
    ``descriptions`` maps every entity id to a (possibly empty) string.
    """

    entities: tuple[tuple[str, str], ...]
    relations: tuple[tuple[str, str], ...]
    train: tuple[Triple, ...]
    valid: tuple[Triple, ...]
    test: tuple[Triple, ...]
    descriptions: dict[str, str]

    @cached_property
    def entity_ids(self) -> tuple[str, ...]:
        return tuple(eid for eid, _ in self.entities)

    @cached_property
    def relation_ids(self) -> tuple[str, ...]:
        return tuple(rid for rid, _ in self.relations)

    @cached_property
    def entity_names(self) -> dict[str, str]:
        return dict(self.entities)

    @cached_property
    def relation_names(self) -> dict[str, str]:
        return dict(self.relations)

    def split(self, name: str) -> tuple[Triple, ...]:
        if name not in SPLITS:
            raise ValueError(f"unknown split {name!r}, expected one of {SPLITS}")
        return getattr(self, name)

    @cached_property
    def all_triples(self) -> tuple[Triple, ...]:
        return self.train + self.valid + self.test

    @cached_property
    def answer_index(self) -> dict[tuple[str, str, str], frozenset[str]]:
        """Known-true answers per partial query, over train+valid+test.

        Keyed by (direction, known_entity, relation): for "tail" the known
        entity is the head and answers are tails, for "head" the reverse.
        """
        index: dict[tuple[str, str, str], set[str]] = {}
        for h, r, t in self.all_triples:
            index.setdefault(("tail", h, r), set()).add(t)
            index.setdefault(("head", t, r), set()).add(h)
        return {key: frozenset(vals) for key, vals in index.items()}

    def validate(self) -> None:
        """Check every structural invariant; raise ValidationError on the first breach."""
        seen_e: set[str] = set()
        for eid, _ in self.entities:
            if eid in seen_e:
                raise ValidationError(f"duplicate entity id {eid!r}")
            seen_e.add(eid)
        seen_r: set[str] = set()
        for rid, _ in self.relations:
            if rid in seen_r:
                raise ValidationError(f"duplicate relation id {rid!r}")
            seen_r.add(rid)
        for split in SPLITS:
            for h, r, t in self.split(split):
                if h not in seen_e:
                    raise ValidationError(f"{split}: unknown head entity {h!r}")
                if t not in seen_e:
                    raise ValidationError(f"{split}: unknown tail entity {t!r}")
                if r not in seen_r:
                    raise ValidationError(f"{split}: unknown relation {r!r}")
        if set(self.descriptions) != seen_e:
            extra = sorted(set(self.descriptions) - seen_e)
            missing = sorted(seen_e - set(self.descriptions))
            raise ValidationError(
                f"descriptions out of sync with entities "
                f"(unknown ids: {extra[:3]}, missing ids: {missing[:3]})"
            )
        train, valid, test = set(self.train), set(self.valid), set(self.test)
        if train & valid or train & test or valid & test:
            overlap = (train & valid) | (train & test) | (valid & test)
            raise ValidationError(f"splits share triples, e.g. {next(iter(overlap))}")
        for text in list(self.entity_names.values()) + list(self.relation_names.values()):
            _check_cell(text, "name")
        for text in self.descriptions.values():
            _check_cell(text, "description")


@dataclass(frozen=True)
class DatasetStats:
    n_entities: int
    n_relations: int
    n_train: int
    n_valid: int
    n_test: int

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.n_entities, self.n_relations, self.n_train, self.n_valid, self.n_test)


def _check_cell(text: str, what: str) -> None:
    if "\t" in text or "\n" in text or "\r" in text:
        raise ValidationError(f"{what} contains a tab or newline: {text!r}")


def _read_pairs(path: Path) -> list[tuple[str, str]]:
    pairs = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) != 2:
                raise ValidationError(f"{path.name}:{lineno}: expected 2 tab-separated fields")
            pairs.append((cells[0], cells[1]))
    return pairs


def _read_triples(path: Path, entity_ids: set[str], relation_ids: set[str]) -> list[Triple]:
    triples = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) != 3:
                raise ValidationError(f"{path.name}:{lineno}: expected 3 tab-separated fields")
            h, r, t = cells
            if h not in entity_ids:
                raise ValidationError(f"{path.name}:{lineno}: unknown head entity {h!r}")
            if r not in relation_ids:
                raise ValidationError(f"{path.name}:{lineno}: unknown relation {r!r}")
            if t not in entity_ids:
                raise ValidationError(f"{path.name}:{lineno}: unknown tail entity {t!r}")
            triples.append((h, r, t))
    return triples


def load_dataset(directory: str | os.PathLike) -> KnowledgeGraph:
    """Load and validate a dataset directory.

    Raises LoadError when a file is missing, ValidationError (with a line
    number where possible) when the contents are malformed.
    """
    root = Path(directory)
    for name in DATASET_FILES:
        if name == "descriptions.tsv":
            continue  # optional: omitted entries mean empty descriptions
        if not (root / name).is_file():
            raise LoadError(f"missing dataset file: {root / name}")

    entities = _read_pairs(root / "entities.tsv")
    relations = _read_pairs(root / "relations.tsv")
    entity_ids = {eid for eid, _ in entities}
    relation_ids = {rid for rid, _ in relations}

    descriptions = {eid: "" for eid, _ in entities}
    desc_path = root / "descriptions.tsv"
    if desc_path.is_file():
        described: set[str] = set()
        with open(desc_path, encoding="utf-8", newline="") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                cells = line.split("\t")
                if len(cells) != 2:
                    raise ValidationError(
                        f"descriptions.tsv:{lineno}: expected 2 tab-separated fields"
                    )
                eid, text = cells
                if eid not in entity_ids:
                    raise ValidationError(f"descriptions.tsv:{lineno}: unknown entity {eid!r}")
                if eid in described:
                    raise ValidationError(f"descriptions.tsv:{lineno}: duplicate entity {eid!r}")
                described.add(eid)
                descriptions[eid] = text

    kg = KnowledgeGraph(
        entities=tuple(entities),
        relations=tuple(relations),
        train=tuple(_read_triples(root / "train.tsv", entity_ids, relation_ids)),
        valid=tuple(_read_triples(root / "valid.tsv", entity_ids, relation_ids)),
        test=tuple(_read_triples(root / "test.tsv", entity_ids, relation_ids)),
        descriptions=descriptions,
    )
    kg.validate()
    return kg


def write_dataset(kg: KnowledgeGraph, directory: str | os.PathLike) -> None:
    """Write ``kg`` into ``directory``; repeated writes are byte-identical."""
    kg.validate()
    root = Path(directory)
    try:
        root.mkdir(parents=True, exist_ok=True)
        _write_rows(root / "entities.tsv", kg.entities)
        _write_rows(root / "relations.tsv", kg.relations)
        _write_rows(root / "descriptions.tsv", [(eid, kg.descriptions[eid]) for eid, _ in kg.entities])
        for split in SPLITS:
            _write_rows(root / f"{split}.tsv", kg.split(split))
    except OSError as exc:
        raise LoadError(f"cannot write dataset under {root}: {exc}") from exc


def _write_rows(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in rows:
            fh.write("\t".join(row) + "\n")


def compute_stats(kg: KnowledgeGraph) -> DatasetStats:
    return DatasetStats(
        n_entities=len(kg.entities),
        n_relations=len(kg.relations),
        n_train=len(kg.train),
        n_valid=len(kg.valid),
        n_test=len(kg.test),
    )


def stream_stats(directory: str | os.PathLike) -> DatasetStats:
    """Count entities/relations/triples without materializing the graph.

    Line-counting only (no id checks), so it stays fast on multi-million-triple
    dumps; use load_dataset when validation matters.
    """
    root = Path(directory)
    counts = {}
    for name, key in [
        ("entities.tsv", "n_entities"),
        ("relations.tsv", "n_relations"),
        ("train.tsv", "n_train"),
        ("valid.tsv", "n_valid"),
        ("test.tsv", "n_test"),
    ]:
        path = root / name
        if not path.is_file():
            raise LoadError(f"missing dataset file: {path}")
        n = 0
        with open(path, encoding="utf-8", newline="") as fh:
            for line in fh:
                if line.rstrip("\n"):
                    n += 1
        counts[key] = n
    return DatasetStats(**counts)
