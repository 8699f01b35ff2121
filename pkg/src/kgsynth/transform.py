"""Structure-preserving text perturbations and the full variant suite.

Four recipes rewrite a knowledge graph's surface text while leaving the id
structure of every triple untouched:

- ``virtual_world``: derange entity and/or relation names; with entities
  targeted, in-description mentions move to the post-shuffle names.
- ``anonymized_entities``: replace targeted names with unique random strings
  from a character unigram model fitted on the original names; mentions
  follow.
- ``inconsistent_descriptions``: break the text-to-structure link, either by
  deranging the description assignment alone or by shuffling names with each
  description traveling along (mentions left as-is).
- ``fully_anonymized``: replace every description with an independent unique
  random string, optionally anonymizing names too.

Randomness is derived per (seed, kind, field) with a stable 64-bit mix, so
results are reproducible regardless of execution order or thread count.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from . import derangement as drg
from .errors import InfeasibleError, KgsynthError
from .kg import KnowledgeGraph, write_dataset
from .rewriter import NameMap, rewrite_descriptions
from .textgen import fit_unigram, sample_unique_strings

KINDS = (
    "virtual_world",
    "anonymized_entities",
    "inconsistent_descriptions",
    "fully_anonymized",
)
NAME_TARGETS = frozenset({"entities", "relations"})
ALL_TARGETS = frozenset({"entities", "relations", "descriptions"})
_TARGET_ORDER = ("entities", "relations", "descriptions")

MAPPING_FILE = "mapping.tsv"
RECIPE_FILE = "recipe.tsv"


@dataclass(frozen=True)
class TransformRecipe:
    kind: str
    targets: frozenset[str]
    seed: int

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown recipe kind {self.kind!r}")
        if not self.targets <= ALL_TARGETS:
            raise ValueError(f"unknown targets: {sorted(self.targets - ALL_TARGETS)}")
        if self.kind in ("virtual_world", "anonymized_entities"):
            if not self.targets or not self.targets <= NAME_TARGETS:
                raise ValueError(
                    f"{self.kind} requires a nonempty subset of {sorted(NAME_TARGETS)}"
                )
        elif "descriptions" not in self.targets:
            raise ValueError(f"{self.kind} requires 'descriptions' among its targets")


@dataclass(frozen=True)
class TransformMapping:
    """Recorded old->new correspondences, the ground truth for audits.

    ``entity_map``/``relation_map`` give the new surface name per id.
    ``description_map`` gives, per entity id, the source entity id when
    descriptions were reassigned or the literal replacement string when they
    were regenerated.
    """

    recipe: TransformRecipe
    entity_map: dict[str, str] = field(default_factory=dict)
    relation_map: dict[str, str] = field(default_factory=dict)
    description_map: dict[str, str] = field(default_factory=dict)


def _field_seed(seed: int, kind: str, part: str) -> int:
    """Stable 64-bit mix of (seed, kind, part); independent of process hashing."""
    digest = hashlib.blake2b(f"{seed}:{kind}:{part}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _rewrite_map(kg: KnowledgeGraph, new_names: list[str]) -> NameMap:
    # One replacement per distinct surface form; first occurrence wins when
    # several entities share a name (the per-id mapping stays exact).
    name_map: NameMap = {}
    for (_, old_name), new_name in zip(kg.entities, new_names):
        if old_name and old_name not in name_map:
            name_map[old_name] = new_name
    return name_map


def _deranged_entity_names(kg: KnowledgeGraph, seed: int) -> drg.DerangementResult:
    names = [name for _, name in kg.entities]
    try:
        return drg.derange(names, seed)
    except InfeasibleError as exc:
        raise InfeasibleError(f"entity-name derangement failed: {exc}") from exc


def _deranged_relation_names(kg: KnowledgeGraph, seed: int) -> drg.DerangementResult:
    names = [name for _, name in kg.relations]
    removed = drg.build_removed_edges(kg)
    try:
        return drg.bipartite_derange(names, removed, seed)
    except InfeasibleError as exc:
        raise InfeasibleError(f"relation-name derangement failed: {exc}") from exc


def virtual_world(
    kg: KnowledgeGraph, targets: set[str] | frozenset[str], seed: int
) -> tuple[KnowledgeGraph, TransformMapping]:
    """Shuffle targeted name tables; graph structure and ids stay put.

    Entity names are deranged; relation names are deranged under the
    removed-edge constraint so no swap can leave a triple unchanged. When
    entities are targeted, descriptions are rewritten to mention the
    post-shuffle names.
    """
    recipe = TransformRecipe("virtual_world", frozenset(targets), seed)
    recipe.validate()

    new_entities = kg.entities
    new_relations = kg.relations
    descriptions = dict(kg.descriptions)
    entity_map: dict[str, str] = {}
    relation_map: dict[str, str] = {}

    if "entities" in recipe.targets:
        result = _deranged_entity_names(kg, _field_seed(seed, recipe.kind, "entities"))
        new_entities = tuple(
            (eid, result.res[i]) for i, (eid, _) in enumerate(kg.entities)
        )
        entity_map = {eid: name for (eid, _), name in zip(kg.entities, result.res)}
        descriptions = rewrite_descriptions(kg, _rewrite_map(kg, list(result.res)))
    if "relations" in recipe.targets:
        result = _deranged_relation_names(kg, _field_seed(seed, recipe.kind, "relations"))
        new_relations = tuple(
            (rid, result.res[i]) for i, (rid, _) in enumerate(kg.relations)
        )
        relation_map = {rid: name for (rid, _), name in zip(kg.relations, result.res)}

    out = KnowledgeGraph(
        entities=new_entities,
        relations=new_relations,
        train=kg.train,
        valid=kg.valid,
        test=kg.test,
        descriptions=descriptions,
    )
    return out, TransformMapping(recipe=recipe, entity_map=entity_map, relation_map=relation_map)


def _names_model_and_forbidden(kg: KnowledgeGraph):
    corpus = [name for _, name in kg.entities] + [name for _, name in kg.relations]
    model = fit_unigram(corpus)
    forbidden = set(corpus) | set(kg.descriptions.values())
    return model, forbidden


def anonymized_entities(
    kg: KnowledgeGraph, targets: set[str] | frozenset[str], seed: int
) -> tuple[KnowledgeGraph, TransformMapping]:
    """Replace targeted names with unique random strings; mentions follow.

    Strings come from a character unigram model fitted on the original entity
    and relation names, and are globally unique: distinct from each other and
    from every original surface form.
    """
    recipe = TransformRecipe("anonymized_entities", frozenset(targets), seed)
    recipe.validate()

    model, forbidden = _names_model_and_forbidden(kg)
    new_entities = kg.entities
    new_relations = kg.relations
    descriptions = dict(kg.descriptions)
    entity_map: dict[str, str] = {}
    relation_map: dict[str, str] = {}

    if "entities" in recipe.targets:
        sampled = sample_unique_strings(
            model, len(kg.entities), forbidden, _field_seed(seed, recipe.kind, "entities")
        )
        forbidden.update(sampled)
        new_entities = tuple((eid, sampled[i]) for i, (eid, _) in enumerate(kg.entities))
        entity_map = {eid: name for (eid, _), name in zip(kg.entities, sampled)}
        descriptions = rewrite_descriptions(kg, _rewrite_map(kg, sampled))
    if "relations" in recipe.targets:
        sampled = sample_unique_strings(
            model, len(kg.relations), forbidden, _field_seed(seed, recipe.kind, "relations")
        )
        forbidden.update(sampled)
        new_relations = tuple((rid, sampled[i]) for i, (rid, _) in enumerate(kg.relations))
        relation_map = {rid: name for (rid, _), name in zip(kg.relations, sampled)}

    out = KnowledgeGraph(
        entities=new_entities,
        relations=new_relations,
        train=kg.train,
        valid=kg.valid,
        test=kg.test,
        descriptions=descriptions,
    )
    return out, TransformMapping(recipe=recipe, entity_map=entity_map, relation_map=relation_map)


def inconsistent_descriptions(
    kg: KnowledgeGraph, also_shuffle: set[str] | frozenset[str], seed: int
) -> tuple[KnowledgeGraph, TransformMapping]:
    """Break the entity-description correspondence.

    With ``also_shuffle`` empty, descriptions alone are reassigned by a
    derangement and names stay put. With entities in ``also_shuffle``, names
    are shuffled as in virtual_world and each description travels with its
    name; in-description mentions are left unchanged, which is the point.
    Relations in ``also_shuffle`` are shuffled as in virtual_world either way.
    """
    recipe = TransformRecipe(
        "inconsistent_descriptions", frozenset(also_shuffle) | {"descriptions"}, seed
    )
    recipe.validate()

    entity_ids = list(kg.entity_ids)
    new_entities = kg.entities
    new_relations = kg.relations
    entity_map: dict[str, str] = {}
    relation_map: dict[str, str] = {}

    if "entities" in recipe.targets:
        result = _deranged_entity_names(kg, _field_seed(seed, recipe.kind, "entities"))
        source = result.permutation
        new_entities = tuple(
            (eid, result.res[i]) for i, (eid, _) in enumerate(kg.entities)
        )
        entity_map = {eid: name for (eid, _), name in zip(kg.entities, result.res)}
    else:
        # Descriptions alone move; an index derangement cannot have repeats,
        # so plain rejection sampling always applies.
        source = drg.derange(
            list(range(len(entity_ids))), _field_seed(seed, recipe.kind, "descriptions")
        ).permutation

    descriptions = {
        eid: kg.descriptions[entity_ids[source[i]]] for i, eid in enumerate(entity_ids)
    }
    description_map = {eid: entity_ids[source[i]] for i, eid in enumerate(entity_ids)}

    if "relations" in recipe.targets:
        result = _deranged_relation_names(kg, _field_seed(seed, recipe.kind, "relations"))
        new_relations = tuple(
            (rid, result.res[i]) for i, (rid, _) in enumerate(kg.relations)
        )
        relation_map = {rid: name for (rid, _), name in zip(kg.relations, result.res)}

    out = KnowledgeGraph(
        entities=new_entities,
        relations=new_relations,
        train=kg.train,
        valid=kg.valid,
        test=kg.test,
        descriptions=descriptions,
    )
    return out, TransformMapping(
        recipe=recipe,
        entity_map=entity_map,
        relation_map=relation_map,
        description_map=description_map,
    )


def fully_anonymized(
    kg: KnowledgeGraph, also_anonymize: set[str] | frozenset[str], seed: int
) -> tuple[KnowledgeGraph, TransformMapping]:
    """Replace every description with an independent unique random string.

    Optionally anonymizes entity/relation names the same way. All strings
    share one uniqueness scope (fitted model and forbidden set as in
    anonymized_entities); nothing is rewritten inside the new descriptions,
    which are opaque noise by design.
    """
    recipe = TransformRecipe(
        "fully_anonymized", frozenset(also_anonymize) | {"descriptions"}, seed
    )
    recipe.validate()

    model, forbidden = _names_model_and_forbidden(kg)
    new_entities = kg.entities
    new_relations = kg.relations
    entity_map: dict[str, str] = {}
    relation_map: dict[str, str] = {}

    if "entities" in recipe.targets:
        sampled = sample_unique_strings(
            model, len(kg.entities), forbidden, _field_seed(seed, recipe.kind, "entities")
        )
        forbidden.update(sampled)
        new_entities = tuple((eid, sampled[i]) for i, (eid, _) in enumerate(kg.entities))
        entity_map = {eid: name for (eid, _), name in zip(kg.entities, sampled)}
    if "relations" in recipe.targets:
        sampled = sample_unique_strings(
            model, len(kg.relations), forbidden, _field_seed(seed, recipe.kind, "relations")
        )
        forbidden.update(sampled)
        new_relations = tuple((rid, sampled[i]) for i, (rid, _) in enumerate(kg.relations))
        relation_map = {rid: name for (rid, _), name in zip(kg.relations, sampled)}

    sampled = sample_unique_strings(
        model, len(kg.entities), forbidden, _field_seed(seed, recipe.kind, "descriptions")
    )
    descriptions = {eid: sampled[i] for i, (eid, _) in enumerate(kg.entities)}
    description_map = dict(descriptions)

    out = KnowledgeGraph(
        entities=new_entities,
        relations=new_relations,
        train=kg.train,
        valid=kg.valid,
        test=kg.test,
        descriptions=descriptions,
    )
    return out, TransformMapping(
        recipe=recipe,
        entity_map=entity_map,
        relation_map=relation_map,
        description_map=description_map,
    )


def apply_recipe(
    kg: KnowledgeGraph, kind: str, targets: set[str] | frozenset[str], seed: int
) -> tuple[KnowledgeGraph, TransformMapping]:
    """Dispatch one recipe by kind; targets follow the recipe's own convention."""
    targets = frozenset(targets)
    if kind == "virtual_world":
        return virtual_world(kg, targets, seed)
    if kind == "anonymized_entities":
        return anonymized_entities(kg, targets, seed)
    if kind == "inconsistent_descriptions":
        return inconsistent_descriptions(kg, targets - {"descriptions"}, seed)
    if kind == "fully_anonymized":
        return fully_anonymized(kg, targets - {"descriptions"}, seed)
    raise ValueError(f"unknown recipe kind {kind!r}")


# (label, kind, targets); "base" is the canonical rewrite of the input.
SUITE_VARIANTS: tuple[tuple[str, str, frozenset[str]], ...] = (
    ("base", "base", frozenset()),
    ("vw-e", "virtual_world", frozenset({"entities"})),
    ("vw-r", "virtual_world", frozenset({"relations"})),
    ("vw-er", "virtual_world", frozenset({"entities", "relations"})),
    ("anon-e", "anonymized_entities", frozenset({"entities"})),
    ("anon-r", "anonymized_entities", frozenset({"relations"})),
    ("anon-er", "anonymized_entities", frozenset({"entities", "relations"})),
    ("incons-d", "inconsistent_descriptions", frozenset({"descriptions"})),
    ("incons-ed", "inconsistent_descriptions", frozenset({"descriptions", "entities"})),
    (
        "incons-erd",
        "inconsistent_descriptions",
        frozenset({"descriptions", "entities", "relations"}),
    ),
    ("fullanon-d", "fully_anonymized", frozenset({"descriptions"})),
    ("fullanon-ed", "fully_anonymized", frozenset({"descriptions", "entities"})),
    (
        "fullanon-erd",
        "fully_anonymized",
        frozenset({"descriptions", "entities", "relations"}),
    ),
)


@dataclass(frozen=True)
class VariantResult:
    label: str
    kind: str
    targets: frozenset[str]
    path: Path | None
    mapping: TransformMapping | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _targets_text(targets: frozenset[str]) -> str:
    return ",".join(t for t in _TARGET_ORDER if t in targets)


def write_mapping(
    kg_before: KnowledgeGraph,
    kg_after: KnowledgeGraph,
    mapping: TransformMapping,
    path: Path,
) -> None:
    """Dump old->new rows as ``kind<TAB>id<TAB>old_text<TAB>new_text``."""
    old_entity_names = kg_before.entity_names
    old_relation_names = kg_before.relation_names
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for eid, _ in kg_before.entities:
            if eid in mapping.entity_map:
                fh.write(f"entity\t{eid}\t{old_entity_names[eid]}\t{mapping.entity_map[eid]}\n")
        for rid, _ in kg_before.relations:
            if rid in mapping.relation_map:
                fh.write(
                    f"relation\t{rid}\t{old_relation_names[rid]}\t{mapping.relation_map[rid]}\n"
                )
        for eid, _ in kg_before.entities:
            if eid in mapping.description_map:
                fh.write(
                    f"description\t{eid}\t{kg_before.descriptions[eid]}"
                    f"\t{kg_after.descriptions[eid]}\n"
                )


def write_recipe(label: str, kind: str, targets: frozenset[str], seed: int, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"label\t{label}\n")
        fh.write(f"kind\t{kind}\n")
        fh.write(f"targets\t{_targets_text(targets)}\n")
        fh.write(f"seed\t{seed}\n")


def generate_suite(
    kg: KnowledgeGraph,
    seed: int,
    output_dir: str | Path,
    variants: tuple[tuple[str, str, frozenset[str]], ...] = SUITE_VARIANTS,
) -> list[VariantResult]:
    """Emit every suite variant under ``output_dir/<label>/``.

    Each variant gets the six dataset files plus mapping.tsv and recipe.tsv,
    under a seed derived from (seed, label). A failing variant is reported in
    its result entry; the remaining variants still run.
    """
    root = Path(output_dir)
    root.mkdir(parents=True, exist_ok=True)
    results: list[VariantResult] = []
    for label, kind, targets in variants:
        variant_seed = _field_seed(seed, "suite", label)
        variant_dir = root / label
        try:
            if kind == "base":
                # Canonical rewrite of the input; empty mapping by construction.
                out_kg = kg
                mapping = TransformMapping(recipe=TransformRecipe("base", frozenset(), variant_seed))
                write_dataset(out_kg, variant_dir)
                (variant_dir / MAPPING_FILE).write_text("", encoding="utf-8")
            else:
                out_kg, mapping = apply_recipe(kg, kind, targets, variant_seed)
                write_dataset(out_kg, variant_dir)
                write_mapping(kg, out_kg, mapping, variant_dir / MAPPING_FILE)
            write_recipe(label, kind, targets, variant_seed, variant_dir / RECIPE_FILE)
            results.append(
                VariantResult(label=label, kind=kind, targets=targets, path=variant_dir,
                              mapping=mapping, error=None)
            )
        except KgsynthError as exc:
            results.append(
                VariantResult(label=label, kind=kind, targets=targets, path=None,
                              mapping=None, error=str(exc))
            )
    return results
