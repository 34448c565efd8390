"""Researcher and university productivity: FSS, FSS*, FSS^U and percentile ranks."""
from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .corpus import (AcademicRank, Authorship, BylineConvention, Gender, MacroRegion,
                     NoEmployment, ObservationWindow, Publication, Researcher,
                     ResearchCorpus, SalaryScale, current_rank, resolve_w_and_t_exact)
from .normalization import (DEFAULT_WEIGHTS, CitationBaseline, WeightScheme,
                            build_baselines, fractional_contribution, scaling_factor)


class MissingSdsBaseline(KeyError):
    pass


class EmptyStaff(ValueError):
    pass


@dataclass(frozen=True)
class ProductivityScore:
    researcher_id: str
    fss: float
    fss_star: float
    percentile: float
    sds_code: str = ""
    uda_code: str = ""
    university_id: str = ""
    macro_region: Optional[MacroRegion] = None
    gender: Gender = Gender.UNSPECIFIED
    rank: Optional[AcademicRank] = None
    w: float = math.nan
    t: float = math.nan

    @property
    def productive(self) -> bool:
        return self.fss > 0

    @property
    def score(self) -> float:
        return self.fss_star


@dataclass(frozen=True)
class Scope:
    kind: str  # "sds", "uda" or "overall"
    code: str = ""

    def __post_init__(self):
        if self.kind not in ("sds", "uda", "overall"):
            raise ValueError(f"unknown scope kind {self.kind!r}")

    def __str__(self) -> str:
        return self.kind if self.kind == "overall" else f"{self.kind}:{self.code}"


OVERALL = Scope("overall")


@dataclass(frozen=True)
class UniversityScore:
    university_id: str
    scope: Scope
    fss_u: float
    rs: int
    macro_region: Optional[MacroRegion] = None
    percentile: Optional[float] = None

    @property
    def score(self) -> float:
        return self.fss_u


# -- FSS ------------------------------------------------------------------------

def fss_terms(researcher: Researcher, authorships: Iterable[Authorship],
              publications: Mapping[str, Publication], baselines: CitationBaseline,
              window: ObservationWindow, convention: BylineConvention,
              weights: WeightScheme = DEFAULT_WEIGHTS) -> list[float]:
    """Per-publication ``(c / c_bar) * f`` terms for the researcher's in-window output."""
    terms = []
    for auth in authorships:
        if auth.researcher_id != researcher.researcher_id:
            raise ValueError(f"authorship on {auth.pub_id} belongs to {auth.researcher_id}")
        pub = publications[auth.pub_id]
        if pub.year not in window:
            continue
        sf = scaling_factor(pub, baselines)
        if sf:
            terms.append(sf * fractional_contribution(auth, convention, weights))
    return terms


def compute_fss(researcher: Researcher, authorships: Iterable[Authorship],
                publications: Mapping[str, Publication], baselines: CitationBaseline,
                scale: SalaryScale, window: ObservationWindow, convention: BylineConvention,
                weights: WeightScheme = DEFAULT_WEIGHTS) -> float:
    """Fractional scientific strength of one researcher, per currency unit per year."""
    w, t = resolve_w_and_t_exact(researcher, scale, window)
    terms = fss_terms(researcher, authorships, publications, baselines, window,
                      convention, weights)
    return math.fsum(terms) / float(w * t)


# -- FSS* -----------------------------------------------------------------------

def compute_sds_baselines(fss_by_sds: Mapping[str, Sequence[float]]) -> dict[str, float]:
    """Mean FSS of the productive (FSS > 0) researchers of each SDS."""
    out = {}
    for sds in sorted(fss_by_sds):
        productive = [v for v in fss_by_sds[sds] if v > 0]
        if productive:
            out[sds] = math.fsum(productive) / len(productive)
    return out


def standardize(fss: float, sds_baseline: Optional[float]) -> float:
    if fss == 0:
        return 0.0
    if sds_baseline is None or not sds_baseline > 0:
        raise MissingSdsBaseline(f"productive score {fss} has no SDS baseline")
    return fss / sds_baseline


# -- percentile scale -----------------------------------------------------------

def rank_percentiles(values: Sequence[float]) -> list[float]:
    """0-100 percentile (worst to best) of every value within its pool.

    Ascending rank ``r`` maps to ``100 (r - 1) / (N - 1)``; tied values share
    the mean of their slots, and a lone value sits at 50.
    """
    n = len(values)
    if n == 0:
        return []
    if any(math.isnan(v) for v in values):
        raise ValueError("cannot rank NaN")
    if n == 1:
        return [50.0]
    order = sorted(range(n), key=values.__getitem__)
    out = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        # slots i..j (0-based); mean of 100*k/(n-1) over them
        pct = 100 * (i + j) / (2 * (n - 1))
        for k in range(i, j + 1):
            out[order[k]] = pct
        i = j + 1
    return out


# -- FSS^U ----------------------------------------------------------------------

def university_score(member_scores: Sequence[float], scope: Scope = OVERALL,
                     university_id: str = "",
                     macro_region: Optional[MacroRegion] = None) -> UniversityScore:
    if not member_scores:
        raise EmptyStaff(f"university {university_id or '?'} has no staff in {scope}")
    return UniversityScore(university_id, scope, math.fsum(member_scores) / len(member_scores),
                           len(member_scores), macro_region)


def rank_universities(scores: Sequence[UniversityScore]) -> list[UniversityScore]:
    """Attach pool percentiles by FSS^U, pooling everything passed in."""
    ordered = sorted(scores, key=lambda s: s.university_id)
    pct = rank_percentiles([s.fss_u for s in ordered])
    return [UniversityScore(s.university_id, s.scope, s.fss_u, s.rs, s.macro_region, p)
            for s, p in zip(ordered, pct)]


# -- whole-corpus scoring ---------------------------------------------------------

@dataclass
class ScoringResult:
    scores: list[ProductivityScore]
    sds_baselines: dict[str, float]
    unscored: list[tuple[str, str]] = field(default_factory=list)
    citation_baselines: Mapping = field(default_factory=dict)

    def by_id(self) -> dict[str, ProductivityScore]:
        return {s.researcher_id: s for s in self.scores}


def score_corpus(corpus: ResearchCorpus, window: ObservationWindow,
                 weights: WeightScheme = DEFAULT_WEIGHTS,
                 baselines: Optional[CitationBaseline] = None,
                 workers: int = 1) -> ScoringResult:
    """Score every researcher employed in the window and rank them within their SDS.

    Standardization runs on salaries expressed relative to the scale's
    smallest entry, which is exact, so FSS* and percentiles do not move when
    the whole scale is multiplied by a constant.
    """
    if baselines is None:
        baselines = build_baselines(corpus.publications.values())

    by_sds: dict[str, list[Researcher]] = defaultdict(list)
    for rid in sorted(corpus.researchers):
        r = corpus.researchers[rid]
        by_sds[r.sds_code].append(r)
    sds_codes = sorted(by_sds)

    def score_sds(sds: str):
        entry = corpus.fields[sds]
        rows, unscored = [], []
        for r in by_sds[sds]:
            try:
                w, t = resolve_w_and_t_exact(r, corpus.salaries, window)
            except NoEmployment:
                unscored.append((r.researcher_id, "no_employment"))
                continue
            w_rel = w / corpus.salaries.reference
            terms = fss_terms(r, corpus.authorships_by_researcher.get(r.researcher_id, ()),
                              corpus.publications, baselines, window,
                              entry.byline_convention, weights)
            impact = math.fsum(terms)
            rows.append((r, w, t, impact / float(w * t), impact / float(w_rel * t)))
        sds_mean = compute_sds_baselines({sds: [row[3] for row in rows]}).get(sds)
        rel_mean = compute_sds_baselines({sds: [row[4] for row in rows]}).get(sds)
        stars = [standardize(row[4], rel_mean) for row in rows]
        pcts = rank_percentiles(stars)
        uni = corpus.universities
        scores = [
            ProductivityScore(
                researcher_id=r.researcher_id, fss=fss, fss_star=star, percentile=p,
                sds_code=sds, uda_code=entry.uda_code, university_id=r.university_id,
                macro_region=uni[r.university_id].macro_region, gender=r.gender,
                rank=current_rank(r, window), w=float(w), t=float(t))
            for (r, w, t, fss, _), star, p in zip(rows, stars, pcts)
        ]
        return scores, sds_mean, unscored

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(score_sds, sds_codes))
    else:
        parts = [score_sds(sds) for sds in sds_codes]

    result = ScoringResult([], {}, [], baselines)
    for sds, (scores, sds_mean, unscored) in zip(sds_codes, parts):
        result.scores.extend(scores)
        result.unscored.extend(unscored)
        if sds_mean is not None:
            result.sds_baselines[sds] = sds_mean
    result.scores.sort(key=lambda s: s.researcher_id)
    result.unscored.sort()
    return result
