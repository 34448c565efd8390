"""Hand-built score sets for the exclusion and gap fixtures."""
from __future__ import annotations

import itertools

from fss_engine.corpus import AcademicRank, Gender, MacroRegion
from fss_engine.productivity import ProductivityScore

N, C, S = MacroRegion.NORTH, MacroRegion.CENTER, MacroRegion.SOUTH

_ids = itertools.count(1)


def score(sds="X/01", region=N, percentile=50.0, fss_star=1.0, university=None, uda="01",
          gender=Gender.F, rank=AcademicRank.FULL) -> ProductivityScore:
    rid = f"S{next(_ids):07d}"
    return ProductivityScore(
        researcher_id=rid, fss=fss_star / 1000, fss_star=fss_star, percentile=percentile,
        sds_code=sds, uda_code=uda, university_id=university or f"U-{region.value}",
        macro_region=region, gender=gender, rank=rank, w=1000.0, t=1.0)


# the ten sectors dropped for thin regional coverage, with the region and count that fail
THIN_SECTORS = {
    "CHIM/05": (S, 2), "FIS/08": (C, 1), "GEO/12": (S, 0), "ING-IND/18": (C, 2),
    "ING-IND/20": (N, 2), "ING-IND/30": (S, 1), "MED/47": (C, 0), "ING-IND/01": (S, 2),
    "ING-IND/02": (C, 2), "ING-IND/23": (N, 1),
}


def thin_sector_fixture() -> list[ProductivityScore]:
    """192 sectors; exactly the ten in ``THIN_SECTORS`` have fewer than 3 researchers
    in some region."""
    codes = sorted(THIN_SECTORS) + [f"GEN/{k:03d}" for k in range(1, 183)]
    out = []
    for i, code in enumerate(codes):
        for j, reg in enumerate((N, C, S)):
            n = 3 + (i + j) % 4
            if code in THIN_SECTORS and THIN_SECTORS[code][0] is reg:
                n = THIN_SECTORS[code][1]
            out += [score(code, reg, percentile=100 * k / 7, fss_star=k / 7) for k in range(n)]
    return out


def six_point_four_fixture() -> list[ProductivityScore]:
    """One sector whose northern mean percentile is 52.0 and southern 45.6."""
    pct = {N: [50.0, 54.0, 52.0], C: [30.0, 60.0, 45.0], S: [40.0, 46.8, 50.0]}
    return [score("BIO/10", reg, p, p / 50) for reg, ps in pct.items() for p in ps]
