"""Seeded synthetic corpora with injectable regional productivity effects.

Citations follow a discretized log-normal whose location varies by SDS.
Every random draw is made regardless of the regional factors, so two
profiles differing only in ``delta`` produce the same corpus apart from
citation counts, which are monotone in ``delta``.
"""
from __future__ import annotations

import datetime as dt
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .corpus import (REGIONS, AcademicRank, Authorship, BylineConvention, DocType,
                     EmploymentSpell, FieldEntry, Gender, MacroRegion, Publication, Researcher,
                     ResearchCorpus, SalaryScale, University, build_corpus)


class InfeasibleProfile(ValueError):
    pass


N, C, S = REGIONS


@dataclass(frozen=True)
class SynthProfile:
    researchers: int = 2000
    universities_per_region: Mapping[MacroRegion, int] = field(
        default_factory=lambda: {N: 10, C: 8, S: 8})
    # share of professors per macro-region
    region_shares: Mapping[MacroRegion, float] = field(
        default_factory=lambda: {N: 0.428, C: 0.257, S: 0.315})
    udas: int = 3
    sds_per_uda: int = 4
    pubs_per_year: float = 1.6
    citation_mu: float = 1.8
    citation_dispersion: float = 1.0
    uncited_share: float = 0.12
    delta: Mapping[MacroRegion, float] = field(default_factory=lambda: {N: 1.0, C: 1.0, S: 1.0})
    unproductive_share: Mapping[MacroRegion, float] = field(
        default_factory=lambda: {N: 0.102, C: 0.118, S: 0.133})
    female_share: float = 0.31
    rank_mix: tuple[float, float, float] = (0.39, 0.34, 0.27)  # assistant, associate, full
    first_year: int = 2009
    last_year: int = 2013
    seed: int = 0

    def check(self) -> None:
        counts = [self.researchers, self.udas, self.sds_per_uda,
                  *(self.universities_per_region.get(r, 0) for r in REGIONS)]
        if min(counts) < 1:
            raise InfeasibleProfile(f"all counts must be >= 1: {counts}")
        if sum(self.universities_per_region[r] for r in REGIONS) > self.researchers:
            raise InfeasibleProfile("more universities than researchers")
        if any(self.delta.get(r, 0) <= 0 for r in REGIONS):
            raise InfeasibleProfile("regional factors must be positive")
        shares = [self.region_shares.get(r, -1) for r in REGIONS]
        probs = [*shares, *(self.unproductive_share.get(r, -1) for r in REGIONS),
                 self.female_share, self.uncited_share, *self.rank_mix]
        if any(not 0 <= p <= 1 for p in probs):
            raise InfeasibleProfile("shares must lie in [0, 1]")
        if abs(sum(shares) - 1) > 1e-9 or abs(sum(self.rank_mix) - 1) > 1e-9:
            raise InfeasibleProfile("region shares and rank mix must each sum to 1")
        if self.first_year > self.last_year or self.pubs_per_year <= 0:
            raise InfeasibleProfile("bad window or publication rate")


SALARY_BASE = {AcademicRank.ASSISTANT: (38000, 1500), AcademicRank.ASSOCIATE: (52000, 2500),
               AcademicRank.FULL: (72000, 4000)}
BANDS = 4
RANKS = (AcademicRank.ASSISTANT, AcademicRank.ASSOCIATE, AcademicRank.FULL)


def _random_date(rng, lo: dt.date, hi: dt.date) -> dt.date:
    return lo + dt.timedelta(days=int(rng.integers(0, (hi - lo).days)))


def generate_corpus(profile: SynthProfile) -> ResearchCorpus:
    profile.check()
    rng = np.random.default_rng(profile.seed)
    w_start = dt.date(profile.first_year, 1, 1)
    w_end = dt.date(profile.last_year + 1, 1, 1)

    universities = []
    uni_by_region = {}
    for reg in REGIONS:
        ids = [f"U{reg.value[0]}{k:02d}" for k in range(1, profile.universities_per_region[reg] + 1)]
        uni_by_region[reg] = ids
        universities += [University(u, f"University {u}", reg) for u in ids]

    fields = {}
    sds_codes = []
    for u in range(1, profile.udas + 1):
        # odd-numbered areas follow the life-science practice of meaningful byline order
        conv = BylineConvention.POSITION_WEIGHTED if u % 2 == 1 else BylineConvention.ALPHABETICAL
        for k in range(1, profile.sds_per_uda + 1):
            code = f"A{u:02d}/{k:02d}"
            fields[code] = FieldEntry(f"A{u:02d}", conv)
            sds_codes.append(code)
    sds_rate = {s: profile.pubs_per_year * float(rng.uniform(0.5, 1.5)) for s in sds_codes}
    sds_mu = {s: profile.citation_mu + float(rng.normal(0, 0.4)) for s in sds_codes}
    siblings = defaultdict(list)
    for s in sds_codes:
        siblings[fields[s].uda_code].append(s)

    salaries = SalaryScale({(rank, band): base + step * band
                            for rank, (base, step) in SALARY_BASE.items() for band in range(BANDS)})

    region_p = [profile.region_shares[r] for r in REGIONS]
    researchers = []
    plans = []
    for i in range(1, profile.researchers + 1):
        rid = f"R{i:06d}"
        reg = REGIONS[int(rng.choice(3, p=region_p))]
        uni = uni_by_region[reg][int(rng.integers(len(uni_by_region[reg])))]
        sds = sds_codes[int(rng.integers(len(sds_codes)))]
        gender = Gender.F if rng.random() < profile.female_share else Gender.M
        rank = RANKS[int(rng.choice(3, p=list(profile.rank_mix)))]
        band = int(rng.integers(BANDS))
        kind = rng.random()
        if kind < 0.10:
            spells = (EmploymentSpell(_random_date(rng, w_start, w_end - dt.timedelta(days=60)),
                                      None, rank, band),)
        elif kind < 0.20 and rank is not AcademicRank.ASSISTANT:
            promoted = _random_date(rng, w_start + dt.timedelta(days=30), w_end)
            lower = RANKS[RANKS.index(rank) - 1]
            spells = (EmploymentSpell(dt.date(2001, 1, 1), promoted, lower, BANDS - 1),
                      EmploymentSpell(promoted, None, rank, 0))
        else:
            spells = (EmploymentSpell(dt.date(2001, 1, 1), None, rank, band),)
        unproductive = rng.random() < profile.unproductive_share[reg]
        talent = float(rng.lognormal(0.0, 0.5))
        researchers.append(Researcher(rid, gender, sds, uni, spells))
        plans.append((rid, reg, uni, sds, spells[0].start, unproductive, talent))

    # only productive colleagues co-author, so the unproductive share is exactly as drawn
    colleagues = defaultdict(list)
    for rid, reg, uni, sds, _, unproductive, _ in plans:
        if not unproductive:
            colleagues[(uni, sds)].append(rid)

    publications, authorships = [], []
    n_pub = 0
    for rid, reg, uni, sds, hired, unproductive, talent in plans:
        first = max(hired.year, profile.first_year)
        years_active = profile.last_year - first + 1
        count = int(rng.poisson(sds_rate[sds] * years_active))
        if unproductive:
            # either silent or publishing work nobody cites
            count = 0 if rng.random() < 0.5 else min(count, 2)
        elif count == 0:
            count = 1
        for k in range(count):
            n_pub += 1
            pid = f"P{n_pub:07d}"
            year = int(rng.integers(first, profile.last_year + 1))
            z = float(rng.normal())
            uncited = rng.random() < profile.uncited_share
            second = rng.random() < 0.15
            other = siblings[fields[sds].uda_code][int(rng.integers(len(siblings[fields[sds].uda_code])))]
            doc = rng.random()
            n_auth = min(1 + int(rng.poisson(3.0)), 12)
            slot = int(rng.integers(1, n_auth + 1))
            extramural = n_auth > 1 and rng.random() < 0.4
            partner_draw = rng.random()
            partner_slot = int(rng.integers(1, n_auth + 1))

            if unproductive:
                cites = 0
            else:
                raw = math.exp(sds_mu[sds] + profile.citation_dispersion * z) * talent
                cites = int(math.floor(raw * profile.delta[reg]))
                if k == 0:
                    cites = max(cites, 1)
                elif uncited:
                    cites = 0
            cats = (f"C-{sds}",) if not second or other == sds else (f"C-{sds}", f"C-{other}")
            doc_type = (DocType.ARTICLE if doc < 0.8 else
                        DocType.REVIEW if doc < 0.9 else DocType.PROCEEDINGS_PAPER)
            publications.append(Publication(pid, year, doc_type, cites, cats))
            authorships.append(Authorship(pid, slot, n_auth, rid, extramural))
            mates = [c for c in colleagues[(uni, sds)] if c != rid]
            if not unproductive and n_auth > 1 and partner_draw < 0.25 and mates \
                    and partner_slot != slot:
                mate = mates[int(partner_draw * 4 * len(mates)) % len(mates)]
                authorships.append(Authorship(pid, partner_slot, n_auth, mate, extramural))
    return build_corpus(universities, fields, researchers, publications, authorships, salaries)
