"""Adapters from public KGC distributions to the toolkit's dataset layout.

Two source layouts are understood:

- ``kgbert``: ``train/dev|valid/test`` triple files plus ``entity2text.txt``
  and ``relation2text.txt`` (optionally ``entity2textlong.txt`` for long
  descriptions). With ``gloss_split``, an entity text of the form
  "name, gloss..." is split at the first comma into name and description.
- ``wikidata5m``: ``wikidata5m_transductive_{train,valid,test}.txt`` triple
  files plus alias files (``wikidata5m_entity.txt``/``_relation.txt``, first
  alias wins) and ``wikidata5m_text.txt`` descriptions. Entities and
  relations are restricted to those appearing in the triples, in first
  appearance order, since the alias files cover a superset.

Conversion streams the triple files, so multi-million-triple dumps convert
without materializing the graph. Tabs and newlines inside source text are
replaced by spaces to fit the strict TSV cell rules.
"""

from __future__ import annotations

from pathlib import Path

from .errors import LoadError, ValidationError
from .kg import DatasetStats

FORMATS = ("kgbert", "wikidata5m")


def _clean(text: str) -> str:
    return text.replace("\t", " ").replace("\n", " ").replace("\r", " ")


def _find_file(root: Path, names: list[str]) -> Path:
    for name in names:
        path = root / name
        if path.is_file():
            return path
    raise LoadError(f"none of {names} found under {root}")


def _read_text_map(path: Path) -> dict[str, str]:
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise ValidationError(f"{path.name}:{lineno}: expected id<TAB>text")
            key, text = line.split("\t", 1)
            if key in mapping:
                raise ValidationError(f"{path.name}:{lineno}: duplicate id {key!r}")
            mapping[key] = text
    return mapping


def convert_kgbert(
    input_dir: str | Path, output_dir: str | Path, gloss_split: bool = False
) -> DatasetStats:
    """Convert a kgbert-style directory; returns the converted stats."""
    src = Path(input_dir)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)

    entity_text = _read_text_map(_find_file(src, ["entity2text.txt", "entity2text.tsv"]))
    relation_text = _read_text_map(_find_file(src, ["relation2text.txt", "relation2text.tsv"]))
    long_text: dict[str, str] = {}
    long_path = src / "entity2textlong.txt"
    if long_path.is_file():
        long_text = _read_text_map(long_path)

    names: dict[str, str] = {}
    descriptions: dict[str, str] = {}
    for eid, text in entity_text.items():
        if gloss_split and ", " in text:
            name, gloss = text.split(", ", 1)
        else:
            name, gloss = text, ""
        names[eid] = _clean(name)
        descriptions[eid] = _clean(long_text.get(eid, gloss))

    split_files = {
        "train": _find_file(src, ["train.tsv", "train.txt"]),
        "valid": _find_file(src, ["valid.tsv", "dev.tsv", "valid.txt", "dev.txt"]),
        "test": _find_file(src, ["test.tsv", "test.txt"]),
    }
    counts = _stream_triples(split_files, out, known_entities=set(entity_text),
                             known_relations=set(relation_text))

    _write_pairs(out / "entities.tsv", names.items())
    _write_pairs(out / "relations.tsv", ((rid, _clean(t)) for rid, t in relation_text.items()))
    _write_pairs(out / "descriptions.tsv", descriptions.items())
    return DatasetStats(
        n_entities=len(names), n_relations=len(relation_text),
        n_train=counts["train"], n_valid=counts["valid"], n_test=counts["test"],
    )


def convert_wikidata5m(input_dir: str | Path, output_dir: str | Path) -> DatasetStats:
    """Convert a wikidata5m transductive dump; returns the converted stats."""
    src = Path(input_dir)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)

    split_files = {
        "train": _find_file(src, ["wikidata5m_transductive_train.txt", "train.txt"]),
        "valid": _find_file(src, ["wikidata5m_transductive_valid.txt", "valid.txt"]),
        "test": _find_file(src, ["wikidata5m_transductive_test.txt", "test.txt"]),
    }

    seen_entities: dict[str, None] = {}
    seen_relations: dict[str, None] = {}
    counts = _stream_triples(split_files, out, collect_entities=seen_entities,
                             collect_relations=seen_relations)

    entity_alias = _read_first_alias(_find_file(src, ["wikidata5m_entity.txt"]))
    relation_alias = _read_first_alias(_find_file(src, ["wikidata5m_relation.txt"]))
    _write_pairs(
        out / "entities.tsv",
        ((eid, _clean(entity_alias.get(eid, eid))) for eid in seen_entities),
    )
    _write_pairs(
        out / "relations.tsv",
        ((rid, _clean(relation_alias.get(rid, rid))) for rid in seen_relations),
    )

    text_path = src / "wikidata5m_text.txt"
    with open(out / "descriptions.tsv", "w", encoding="utf-8", newline="") as dst:
        if text_path.is_file():
            with open(text_path, encoding="utf-8", newline="") as fh:
                for line in fh:
                    line = line.rstrip("\n")
                    if not line or "\t" not in line:
                        continue
                    eid, text = line.split("\t", 1)
                    if eid in seen_entities:
                        dst.write(f"{eid}\t{_clean(text)}\n")
    return DatasetStats(
        n_entities=len(seen_entities), n_relations=len(seen_relations),
        n_train=counts["train"], n_valid=counts["valid"], n_test=counts["test"],
    )


def _read_first_alias(path: Path) -> dict[str, str]:
    aliases: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            cells = line.rstrip("\n").split("\t")
            if len(cells) >= 2 and cells[0] not in aliases:
                aliases[cells[0]] = cells[1]
    return aliases


def _stream_triples(
    split_files: dict[str, Path],
    out: Path,
    known_entities: set[str] | None = None,
    known_relations: set[str] | None = None,
    collect_entities: dict[str, None] | None = None,
    collect_relations: dict[str, None] | None = None,
) -> dict[str, int]:
    counts = {}
    for split, path in split_files.items():
        n = 0
        with open(path, encoding="utf-8", newline="") as fh, \
                open(out / f"{split}.tsv", "w", encoding="utf-8", newline="") as dst:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                cells = line.split("\t")
                if len(cells) != 3:
                    raise ValidationError(f"{path.name}:{lineno}: expected 3 fields")
                h, r, t = cells
                if known_entities is not None and (h not in known_entities or t not in known_entities):
                    raise ValidationError(f"{path.name}:{lineno}: entity without text entry")
                if known_relations is not None and r not in known_relations:
                    raise ValidationError(f"{path.name}:{lineno}: relation without text entry")
                if collect_entities is not None:
                    collect_entities.setdefault(h)
                    collect_entities.setdefault(t)
                if collect_relations is not None:
                    collect_relations.setdefault(r)
                dst.write(line + "\n")
                n += 1
        counts[split] = n
    return counts


def _write_pairs(path: Path, pairs) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for key, value in pairs:
            fh.write(f"{key}\t{value}\n")
