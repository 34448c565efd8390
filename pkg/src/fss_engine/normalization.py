"""Citation baselines and fractional author contributions."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .corpus import Authorship, BylineConvention, Publication


class MissingBaseline(KeyError):
    pass


class InvalidSlot(ValueError):
    pass


class BaselineEntry(NamedTuple):
    mean_cited: float
    n_cited: int


# (year, category) -> BaselineEntry
CitationBaseline = Mapping[tuple[int, str], BaselineEntry]


def build_baselines(publications: Iterable[Publication]) -> dict[tuple[int, str], BaselineEntry]:
    """Mean citations of *cited* publications per (year, subject category).

    Uncited publications never enter a mean, and a cell with no cited
    publication is simply absent.
    """
    totals: dict[tuple[int, str], list[int]] = defaultdict(lambda: [0, 0])
    for pub in publications:
        if pub.citations < 1:
            continue
        for cat in set(pub.subject_categories):
            cell = totals[(pub.year, cat)]
            cell[0] += pub.citations
            cell[1] += 1
    # int / int is correctly rounded
    return {key: BaselineEntry(total / n, n) for key, (total, n) in sorted(totals.items())}


def scaling_factor(pub: Publication, baselines: CitationBaseline) -> float:
    """``citations / B`` with ``B`` the mean baseline over the publication's categories."""
    if pub.citations == 0:
        return 0.0
    refs = []
    for cat in pub.subject_categories:
        try:
            refs.append(baselines[(pub.year, cat)].mean_cited)
        except KeyError:
            raise MissingBaseline(f"no baseline for ({pub.year}, {cat!r}) "
                                  f"needed by publication {pub.pub_id}") from None
    return pub.citations / (math.fsum(refs) / len(refs))


@dataclass(frozen=True)
class PositionWeights:
    first: float
    last: float
    middle_pool: float

    def __post_init__(self):
        parts = (self.first, self.last, self.middle_pool)
        if any(p < 0 for p in parts):
            raise ValueError(f"weights must be non-negative: {parts}")
        if abs(math.fsum(parts) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1: {parts}")


@dataclass(frozen=True)
class WeightScheme:
    intramural: PositionWeights = PositionWeights(0.40, 0.30, 0.30)
    extramural: PositionWeights = PositionWeights(0.30, 0.20, 0.50)


DEFAULT_WEIGHTS = WeightScheme()


def fractional_contribution(auth: Authorship, convention: BylineConvention,
                            weights: WeightScheme = DEFAULT_WEIGHTS) -> float:
    """Share of the publication credited to the author in ``auth``'s slot."""
    n, slot = auth.total_authors, auth.author_slot
    if n < 1 or not 1 <= slot <= n:
        raise InvalidSlot(f"slot {slot} outside byline of {n} on {auth.pub_id}")
    if n == 1:
        return 1.0
    if convention is BylineConvention.ALPHABETICAL:
        return 1 / n
    triple = weights.extramural if auth.extramural_byline else weights.intramural
    if n == 2:
        # the middle pool has nobody to go to: split it in proportion to first/last
        ends = triple.first + triple.last
        if ends == 0:
            return 0.5
        return (triple.first if slot == 1 else triple.last) / ends
    if slot == 1:
        return triple.first
    if slot == n:
        return triple.last
    return triple.middle_pool / (n - 2)
