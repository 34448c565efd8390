"""Cohort statistics, macro-region gap tables and the exclusion rules feeding them."""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .corpus import REGIONS, MacroRegion
from .productivity import (OVERALL, ProductivityScore, Scope, UniversityScore,
                           rank_universities, university_score)


class EmptyCohort(ValueError):
    pass


class UnknownRule(KeyError):
    pass


@dataclass(frozen=True)
class ExclusionPolicy:
    min_obs_per_region_sds: int = 3
    min_universities_per_region_sds: int = 3
    min_staff_per_university_sds: int = 3
    min_professors_per_university_uda: int = 5
    min_professors_per_sds_university_overall: int = 10

    def __post_init__(self):
        for name, value in vars(self).items():
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")

    def threshold(self, rule: str) -> int:
        if rule not in RULES:
            raise UnknownRule(rule)
        return getattr(self, rule)


@dataclass(frozen=True)
class ThresholdSpec:
    """Percentile cuts reported by :func:`cohort_stats`.

    ``top_cut=None`` counts as top only whoever holds the unique maximum of
    its pool (percentile exactly 100); a number turns it into ``percentile >= top_cut``.
    """

    bottom: tuple[float, ...] = (10, 20)
    top: tuple[float, ...] = (20, 10)
    top_cut: Optional[float] = None

    def names(self) -> list[str]:
        return ([f"bottom_{_fmt_cut(k)}" for k in self.bottom] + ["above_median"]
                + [f"top_{_fmt_cut(k)}" for k in self.top] + ["top"])


def _fmt_cut(k: float) -> str:
    return str(int(k)) if float(k).is_integer() else str(k).replace(".", "_")


DEFAULT_THRESHOLDS = ThresholdSpec()


@dataclass(frozen=True)
class CohortStats:
    observations: int
    pct_unproductive: float
    mean_fss_star: float
    mean_percentile: float
    shares: dict[str, float]

    def as_row(self) -> dict[str, object]:
        row = {"observations": self.observations, "pct_unproductive": self.pct_unproductive,
               "mean_fss_star": self.mean_fss_star, "mean_percentile": self.mean_percentile}
        row.update(self.shares)
        return row


def cohort_stats(items: Sequence, thresholds: ThresholdSpec = DEFAULT_THRESHOLDS) -> CohortStats:
    """Summary statistics of one cohort.

    ``items`` expose ``score`` (FSS* or FSS^U) and ``percentile``. Zeros count
    towards the mean score. Bottom cuts use ``percentile <= k``, top cuts
    ``percentile >= 100 - k`` and the median split is strict.
    """
    n = len(items)
    if n == 0:
        raise EmptyCohort("cohort has no observations")
    pcts = [it.percentile for it in items]

    def share(pred: Callable[[float], bool]) -> float:
        return 100 * sum(1 for p in pcts if pred(p)) / n

    shares = {}
    for k in thresholds.bottom:
        shares[f"bottom_{_fmt_cut(k)}"] = share(lambda p, k=k: p <= k)
    shares["above_median"] = share(lambda p: p > 50)
    for k in thresholds.top:
        shares[f"top_{_fmt_cut(k)}"] = share(lambda p, k=k: p >= 100 - k)
    if thresholds.top_cut is None:
        shares["top"] = share(lambda p: p == 100)
    else:
        shares["top"] = share(lambda p: p >= thresholds.top_cut)
    return CohortStats(
        observations=n,
        pct_unproductive=100 * sum(1 for it in items if it.score == 0) / n,
        mean_fss_star=math.fsum(it.score for it in items) / n,
        mean_percentile=math.fsum(pcts) / n,
        shares=shares,
    )


# -- exclusions ------------------------------------------------------------------

def _sds(rec) -> str:
    if isinstance(rec, UniversityScore):
        if rec.scope.kind != "sds":
            raise ValueError(f"{rec.scope} unit has no SDS")
        return rec.scope.code
    return rec.sds_code


def _uda(rec) -> str:
    if isinstance(rec, UniversityScore):
        if rec.scope.kind != "uda":
            raise ValueError(f"{rec.scope} unit has no UDA")
        return rec.scope.code
    return rec.uda_code


def _weight(rec) -> int:
    return rec.rs if isinstance(rec, UniversityScore) else 1


def _region(rec) -> MacroRegion:
    return rec.macro_region


RULES: dict[str, tuple[Callable, str]] = {
    # rule -> (unit key, what is counted)
    "min_obs_per_region_sds": (lambda r: _sds(r), "observations per region"),
    "min_universities_per_region_sds": (lambda r: _sds(r), "universities per region"),
    "min_staff_per_university_sds": (lambda r: f"{r.university_id}|{_sds(r)}", "research staff"),
    "min_professors_per_university_uda": (lambda r: f"{r.university_id}|{_uda(r)}", "professors"),
    "min_professors_per_sds_university_overall":
        (lambda r: f"{r.university_id}|{_sds(r)}", "professors"),
}


@dataclass(frozen=True)
class ExclusionEntry:
    rule: str
    unit: str
    detail: str


@dataclass
class ExclusionResult:
    retained: list
    excluded: list
    log: list[ExclusionEntry] = field(default_factory=list)


def apply_exclusions(records: Iterable, policy: ExclusionPolicy, rule: str) -> ExclusionResult:
    """Drop every unit that falls short of ``policy``'s threshold for ``rule``.

    Units are SDSs for the per-region rules and university pairs for the
    staff rules. Each excluded unit is logged once with its shortfall.
    """
    if rule not in RULES:
        raise UnknownRule(rule)
    threshold = policy.threshold(rule)
    unit_of, what = RULES[rule]
    records = list(records)
    failing: dict[str, str] = {}

    if rule in ("min_obs_per_region_sds", "min_universities_per_region_sds"):
        counts: dict[str, Counter] = defaultdict(Counter)
        seen: set[tuple[str, MacroRegion, str]] = set()
        for rec in records:
            unit, region = unit_of(rec), _region(rec)
            if rule == "min_universities_per_region_sds":
                if (unit, region, rec.university_id) in seen:
                    continue
                seen.add((unit, region, rec.university_id))
                counts[unit][region] += 1
            else:
                counts[unit][region] += 1
        for unit, per_region in counts.items():
            short = [f"{reg.value}={per_region[reg]}" for reg in REGIONS if per_region[reg] < threshold]
            if short:
                failing[unit] = f"{what} below {threshold}: " + ", ".join(short)
    else:
        sizes: Counter = Counter()
        for rec in records:
            sizes[unit_of(rec)] += _weight(rec)
        for unit, size in sizes.items():
            if size < threshold:
                failing[unit] = f"{what} {size} below {threshold}"

    result = ExclusionResult([], [])
    for rec in records:
        (result.excluded if unit_of(rec) in failing else result.retained).append(rec)
    result.log = [ExclusionEntry(rule, unit, failing[unit]) for unit in sorted(failing)]
    return result


# -- gap tables --------------------------------------------------------------------

PAIRS = (("north_south", MacroRegion.NORTH, MacroRegion.SOUTH),
         ("north_center", MacroRegion.NORTH, MacroRegion.CENTER),
         ("center_south", MacroRegion.CENTER, MacroRegion.SOUTH))


def exact(value: float) -> Fraction:
    """The decimal a float prints as, held exactly."""
    return Fraction(repr(float(value)))


@dataclass(frozen=True)
class GapRow:
    """Mean percentile per region for one SDS and the three pairwise gaps.

    Means and gaps are exact rationals over the printed percentile values, so
    ``north_south == north_center + center_south`` holds with no rounding.
    """

    sds_code: str
    counts: dict[MacroRegion, int]
    means: dict[MacroRegion, Fraction]

    def gap(self, a: MacroRegion, b: MacroRegion) -> Fraction:
        return self.means[a] - self.means[b]

    @property
    def north_south(self) -> Fraction:
        return self.gap(MacroRegion.NORTH, MacroRegion.SOUTH)

    @property
    def north_center(self) -> Fraction:
        return self.gap(MacroRegion.NORTH, MacroRegion.CENTER)

    @property
    def center_south(self) -> Fraction:
        return self.gap(MacroRegion.CENTER, MacroRegion.SOUTH)


@dataclass(frozen=True)
class PairSummary:
    pair: str
    highest: Optional[tuple[Fraction, str]]
    lowest: Optional[tuple[Fraction, str]]
    n_nonnegative: int
    n_negative: int


@dataclass
class GapTable:
    rows: list[GapRow]
    summary: list[PairSummary]
    log: list[ExclusionEntry]


def gap_row(sds_code: str, by_region: dict[MacroRegion, Sequence[float]]) -> GapRow:
    counts, means = {}, {}
    for reg in REGIONS:
        pcts = by_region.get(reg, ())
        if not pcts:
            raise EmptyCohort(f"{sds_code} has no {reg.value} observations")
        counts[reg] = len(pcts)
        means[reg] = sum((exact(p) for p in pcts), Fraction(0)) / len(pcts)
    return GapRow(sds_code, counts, means)


def summarize_gaps(rows: Sequence[GapRow]) -> list[PairSummary]:
    out = []
    for name, a, b in PAIRS:
        gaps = [(row.gap(a, b), row.sds_code) for row in rows]
        if gaps:
            highest = min(gaps, key=lambda g: (-g[0], g[1]))
            lowest = min(gaps)
        else:
            highest = lowest = None
        out.append(PairSummary(name, highest, lowest,
                               sum(1 for g, _ in gaps if g >= 0), sum(1 for g, _ in gaps if g < 0)))
    return out


def gap_table(records: Iterable, policy: ExclusionPolicy = ExclusionPolicy(),
              rule: str = "min_obs_per_region_sds") -> GapTable:
    """Per-SDS regional mean percentiles and pairwise gaps.

    ``records`` carry ``sds_code`` (or an SDS scope), ``macro_region`` and a
    pool ``percentile``. SDSs short of the rule's per-region minimum are
    dropped before any gap is computed.
    """
    kept = apply_exclusions(records, policy, rule)
    grouped: dict[str, dict[MacroRegion, list[float]]] = defaultdict(lambda: defaultdict(list))
    for rec in kept.retained:
        grouped[_sds(rec)][_region(rec)].append(rec.percentile)
    rows = [gap_row(sds, grouped[sds]) for sds in sorted(grouped)]
    return GapTable(rows, summarize_gaps(rows), kept.log)


# -- university level ----------------------------------------------------------------

def aggregate_universities(scores: Iterable[ProductivityScore], kind: str,
                           policy: ExclusionPolicy = ExclusionPolicy()
                           ) -> tuple[dict[str, list[UniversityScore]], list[ExclusionEntry]]:
    """FSS^U per university within each scope of ``kind`` (``"sds"``, ``"uda"`` or ``"overall"``).

    For the overall scope, SDS-university pairs below the overall minimum are
    removed first; the other scopes keep everyone and leave size rules to
    :func:`university_report`.
    """
    scores = list(scores)
    log: list[ExclusionEntry] = []
    if kind == "overall":
        kept = apply_exclusions(scores, policy, "min_professors_per_sds_university_overall")
        scores, log = kept.retained, kept.log
    members: dict[tuple[str, str], list[ProductivityScore]] = defaultdict(list)
    for s in scores:
        code = {"sds": s.sds_code, "uda": s.uda_code, "overall": ""}[kind]
        members[(code, s.university_id)].append(s)
    out: dict[str, list[UniversityScore]] = defaultdict(list)
    for (code, uni) in sorted(members):
        group = members[(code, uni)]
        scope = OVERALL if kind == "overall" else Scope(kind, code)
        out[code].append(university_score([m.fss_star for m in group], scope, uni,
                                          group[0].macro_region))
    return dict(out), log


SCOPE_RULE = {"uda": "min_professors_per_university_uda", "sds": "min_staff_per_university_sds"}


@dataclass
class UniversityReport:
    scope: Scope
    ranked: list[UniversityScore]
    stats: dict[MacroRegion, CohortStats]
    log: list[ExclusionEntry]


def university_report(units: Sequence[UniversityScore], policy: ExclusionPolicy = ExclusionPolicy(),
                      thresholds: ThresholdSpec = DEFAULT_THRESHOLDS) -> UniversityReport:
    """Rank the universities of one scope and summarize them per macro-region.

    Each university is one observation. Universities whose staff in the scope
    falls below the scope's minimum are excluded before ranking.
    """
    units = list(units)
    scopes = {u.scope for u in units}
    if len(scopes) > 1:
        raise ValueError(f"units span several scopes: {sorted(map(str, scopes))}")
    scope = scopes.pop() if scopes else OVERALL
    log: list[ExclusionEntry] = []
    if scope.kind in SCOPE_RULE:
        kept = apply_exclusions(units, policy, SCOPE_RULE[scope.kind])
        units, log = kept.retained, kept.log
    ranked = rank_universities(units)
    stats = {}
    for reg in REGIONS:
        members = [u for u in ranked if u.macro_region is reg]
        if members:
            stats[reg] = cohort_stats(members, thresholds)
    return UniversityReport(scope, ranked, stats, log)


def university_gap_table(scores: Iterable[ProductivityScore],
                         policy: ExclusionPolicy = ExclusionPolicy()) -> GapTable:
    """Gaps between universities: university-SDS units ranked within their SDS."""
    by_sds, _ = aggregate_universities(scores, "sds", policy)
    units = [u for code in sorted(by_sds) for u in by_sds[code]]
    staffed = apply_exclusions(units, policy, "min_staff_per_university_sds")
    pool: dict[str, list[UniversityScore]] = defaultdict(list)
    for u in staffed.retained:
        pool[u.scope.code].append(u)
    ranked = [u for code in sorted(pool) for u in rank_universities(pool[code])]
    table = gap_table(ranked, policy, "min_universities_per_region_sds")
    table.log = staffed.log + table.log
    return table


# -- researcher cohorts ----------------------------------------------------------------

def grouped_stats(scores: Sequence[ProductivityScore], key: Callable[[ProductivityScore], object],
                  thresholds: ThresholdSpec = DEFAULT_THRESHOLDS, with_total: bool = True
                  ) -> list[tuple[object, str, CohortStats]]:
    """Cohort stats for each value of ``key`` crossed with macro-region (plus a Total column)."""
    groups: dict[object, list[ProductivityScore]] = defaultdict(list)
    for s in scores:
        groups[key(s)].append(s)
    out = []
    for value in sorted(groups, key=_sort_key):
        members = groups[value]
        for reg in REGIONS:
            cohort = [s for s in members if s.macro_region is reg]
            if cohort:
                out.append((value, reg.value, cohort_stats(cohort, thresholds)))
        if with_total:
            out.append((value, "Total", cohort_stats(members, thresholds)))
    return out


def _sort_key(value) -> str:
    return "" if value is None else getattr(value, "value", str(value))
