"""Trie-backed multi-pattern replacement of surface names inside descriptions.

Matching rules, shared with the leakage analysis so the two can never
diverge:

- a key matches only at token boundaries: the characters immediately before
  and after the span must not be letters or digits (text edges count);
- matching is case-sensitive;
- rewriting is a single greedy left-to-right pass taking the longest key at
  each position, and replacement text is never rescanned.
"""

from __future__ import annotations

from .kg import KnowledgeGraph

# Original surface name -> replacement, insertion-ordered.
NameMap = dict[str, str]

_ROOT = 0


class PatternIndex:
    """Prefix tree over the keys of a NameMap; accepting nodes carry the replacement.

    States are array indices: ``children[s]`` maps a character to the next
    state, ``payload[s]`` holds the replacement when ``s`` accepts a key.
    """

    __slots__ = ("children", "payload", "size")

    def __init__(self) -> None:
        self.children: list[dict[str, int]] = [{}]
        self.payload: list[str | None] = [None]
        self.size = 0

    def _insert(self, key: str, replacement: str) -> None:
        node = _ROOT
        for char in key:
            nxt = self.children[node].get(char)
            if nxt is None:
                nxt = len(self.children)
                self.children[node][char] = nxt
                self.children.append({})
                self.payload.append(None)
            node = nxt
        if self.payload[node] is None:
            self.size += 1
        self.payload[node] = replacement

    def lookup(self, key: str) -> str | None:
        """Replacement for an exact key, or None when the key is not indexed."""
        node = _ROOT
        for char in key:
            nxt = self.children[node].get(char)
            if nxt is None:
                return None
            node = nxt
        return self.payload[node]


def build_index(name_map: NameMap) -> PatternIndex:
    """Build a PatternIndex holding exactly the keys of ``name_map``."""
    index = PatternIndex()
    for key, replacement in name_map.items():
        if not key:
            raise ValueError("cannot index an empty key")
        index._insert(key, replacement)
    return index


def _is_word_char(char: str) -> bool:
    return char.isalnum()


def rewrite_text(index: PatternIndex, text: str) -> str:
    """Replace every boundary occurrence of an indexed key, longest key first.

    Scanning resumes after each replacement, so replacement text cannot
    trigger further matches within the same pass.
    """
    children = index.children
    payload = index.payload
    n = len(text)
    out: list[str] = []
    plain_start = 0
    i = 0
    while i < n:
        if (i == 0 or not _is_word_char(text[i - 1])) and text[i] in children[_ROOT]:
            node = _ROOT
            j = i
            best_end = -1
            best_replacement = None
            while j < n:
                node = children[node].get(text[j], -1)
                if node < 0:
                    break
                j += 1
                if payload[node] is not None and (j == n or not _is_word_char(text[j])):
                    best_end = j
                    best_replacement = payload[node]
            if best_replacement is not None:
                out.append(text[plain_start:i])
                out.append(best_replacement)
                i = best_end
                plain_start = best_end
                continue
        i += 1
    out.append(text[plain_start:])
    return "".join(out)


def find_keys(index: PatternIndex, text: str) -> set[str]:
    """All indexed keys occurring in ``text`` at token boundaries.

    Unlike rewrite_text this reports every match, including overlapping and
    nested ones; it backs the description-leakage statistic and residual-name
    audits.
    """
    children = index.children
    payload = index.payload
    n = len(text)
    found: set[str] = set()
    for i in range(n):
        if i > 0 and _is_word_char(text[i - 1]):
            continue
        node = _ROOT
        j = i
        while j < n:
            node = children[node].get(text[j], -1)
            if node < 0:
                break
            j += 1
            if payload[node] is not None and (j == n or not _is_word_char(text[j])):
                found.add(text[i:j])
    return found


def rewrite_descriptions(kg: KnowledgeGraph, name_map: NameMap) -> dict[str, str]:
    """Apply rewrite_text to every description; ids and order are untouched."""
    if not name_map:
        return dict(kg.descriptions)
    index = build_index(name_map)
    return {eid: rewrite_text(index, text) for eid, text in kg.descriptions.items()}
