"""Character-level unigram model and unique random-string generation.

The model treats a string as independent character draws followed by one
end-of-sequence event, so a fitted model assigns every training string a
probability and sampled strings mimic the corpus alphabet and mean length
without carrying any character co-occurrence information.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import SamplingError, UniquenessError

EOS = "<EOS>"

# One sample_string call may consume at most this many symbol draws (characters
# plus end-of-sequence events); exceeding it signals a degenerate model.
_MAX_SYMBOL_DRAWS = 10_000


@dataclass(frozen=True)
class UnigramModel:
    """Character probabilities plus the end-of-sequence probability.

    Probabilities are non-negative and sum to 1 with ``eos_probability``;
    ``eos_probability`` must be positive or sampling would never terminate.
    """

    probabilities: dict[str, float]
    eos_probability: float

    def __post_init__(self) -> None:
        if self.eos_probability <= 0:
            raise ValueError("eos_probability must be positive")
        if any(p < 0 for p in self.probabilities.values()):
            raise ValueError("character probabilities must be non-negative")
        total = sum(self.probabilities.values()) + self.eos_probability
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}, expected 1.0")

    @cached_property
    def _symbols(self) -> list[str]:
        return list(self.probabilities) + [EOS]

    @cached_property
    def _cumulative(self) -> list[float]:
        weights = list(self.probabilities.values()) + [self.eos_probability]
        cumulative = []
        acc = 0.0
        for w in weights:
            acc += w
            cumulative.append(acc)
        cumulative[-1] = 1.0  # guard against float drift at the top end
        return cumulative

    def sample_symbol(self, rng: random.Random) -> str:
        """Draw one character, or EOS for the end-of-sequence event."""
        return self._symbols[bisect_right(self._cumulative, rng.random())]


def fit_unigram(corpus: list[str]) -> UnigramModel:
    """Fit character probabilities on ``corpus``, one EOS event per string."""
    if not corpus:
        raise ValueError("cannot fit a unigram model on an empty corpus")
    counts: Counter[str] = Counter()
    total_chars = 0
    for text in corpus:
        counts.update(text)
        total_chars += len(text)
    if total_chars == 0:
        raise ValueError("corpus must contain at least one non-empty string")
    denom = total_chars + len(corpus)
    probabilities = {char: counts[char] / denom for char in sorted(counts)}
    return UnigramModel(probabilities=probabilities, eos_probability=len(corpus) / denom)


def sample_string(model: UnigramModel, rng: random.Random) -> str:
    """Sample one non-empty string; characters are i.i.d., EOS terminates.

    Empty draws (EOS sampled first) are rejected and resampled. Every symbol
    draw counts toward a hard cap that aborts pathological models.
    """
    chars: list[str] = []
    for _ in range(_MAX_SYMBOL_DRAWS):
        symbol = model.sample_symbol(rng)
        if symbol is not EOS:
            chars.append(symbol)
        elif chars:
            return "".join(chars)
    raise SamplingError(
        f"no string produced within {_MAX_SYMBOL_DRAWS} symbol draws; "
        "the model is degenerate"
    )


def sample_unique_strings(
    model: UnigramModel, count: int, forbidden: set[str], seed: int
) -> list[str]:
    """Sample ``count`` pairwise-distinct strings, none of them in ``forbidden``.

    Deterministic for a fixed seed. Collisions are rejected and resampled
    within a budget of 1000 rejections per requested string.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = random.Random(seed)
    taken = set(forbidden)
    out: list[str] = []
    budget = 1000 * count
    rejections = 0
    while len(out) < count:
        candidate = sample_string(model, rng)
        if candidate in taken:
            rejections += 1
            if rejections > budget:
                raise UniquenessError(
                    f"exhausted {budget} rejections while sampling "
                    f"{count} unique strings ({len(out)} produced)"
                )
            continue
        taken.add(candidate)
        out.append(candidate)
    return out


def log_probability(model: UnigramModel, text: str) -> float:
    """log p(text): sum of per-character log probabilities plus log p(EOS)."""
    logp = math.log(model.eos_probability)
    for char in text:
        p = model.probabilities.get(char, 0.0)
        if p == 0.0:
            return float("-inf")
        logp += math.log(p)
    return logp


def dump_unigram(model: UnigramModel, path: str | Path) -> None:
    """Write the model as ``char<TAB>probability`` rows plus an ``<EOS>`` row."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for char, prob in model.probabilities.items():
            fh.write(f"{char}\t{prob!r}\n")
        fh.write(f"{EOS}\t{model.eos_probability!r}\n")
