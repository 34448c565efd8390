import datetime as dt

import pytest

from fss_engine.corpus import (AcademicRank, Authorship, BylineConvention, DocType,
                               EmploymentSpell, FieldEntry, Gender, MacroRegion, ObservationWindow,
                               Publication, Researcher, SalaryScale, University, build_corpus)
from fss_engine.io import write_corpus

FULL = AcademicRank.FULL
ASSOC = AcademicRank.ASSOCIATE
ASSIST = AcademicRank.ASSISTANT
WINDOW = ObservationWindow(2009, 2013)


def spell(start, end=None, rank=ASSOC, band=0):
    return EmploymentSpell(dt.date.fromisoformat(start),
                           dt.date.fromisoformat(end) if end else None, rank, band)


def make_tiny_corpus():
    """12 researchers in 3 universities (one per region) and 2 SDSs."""
    universities = [University("UN", "Nord", MacroRegion.NORTH),
                    University("UC", "Centro", MacroRegion.CENTER),
                    University("US", "Sud", MacroRegion.SOUTH)]
    fields = {"BIO/10": FieldEntry("05", BylineConvention.POSITION_WEIGHTED),
              "MAT/05": FieldEntry("01", BylineConvention.ALPHABETICAL)}
    salaries = SalaryScale({(ASSIST, 0): 40000, (ASSOC, 0): 55000, (ASSOC, 1): 58000,
                            (FULL, 0): 75000})
    researchers = []
    ranks = [ASSIST, ASSOC, FULL, ASSOC]
    genders = [Gender.F, Gender.M, Gender.M, Gender.UNSPECIFIED]
    k = 0
    for uni in ("UN", "UC", "US"):
        for j, sds in enumerate(["BIO/10", "BIO/10", "MAT/05", "MAT/05"]):
            k += 1
            spells = (spell("2005-01-01", rank=ranks[j]),)
            if k == 5:  # promoted mid-window
                spells = (spell("2005-01-01", "2011-03-01", ASSOC, 0),
                          spell("2011-03-01", rank=ASSOC, band=1))
            researchers.append(Researcher(f"R{k:02d}", genders[j], sds, uni, spells))
    pubs = [
        Publication("P01", 2010, DocType.ARTICLE, 10, ("BIOCHEM",)),
        Publication("P02", 2010, DocType.ARTICLE, 2, ("BIOCHEM",)),
        Publication("P03", 2011, DocType.REVIEW, 0, ("BIOCHEM",)),
        Publication("P04", 2012, DocType.ARTICLE, 6, ("BIOCHEM", "CELLBIO")),
        Publication("P05", 2012, DocType.ARTICLE, 3, ("CELLBIO",)),
        Publication("P06", 2011, DocType.ARTICLE, 4, ("MATH",)),
        Publication("P07", 2011, DocType.PROCEEDINGS_PAPER, 1, ("MATH",)),
        Publication("P08", 2013, DocType.ARTICLE, 5, ("MATH",)),
        Publication("P09", 2008, DocType.ARTICLE, 9, ("MATH",)),
        Publication("P10", 2013, DocType.ARTICLE, 0, ("MATH",)),
    ]
    auths = [
        Authorship("P01", 1, 4, "R01", False), Authorship("P01", 4, 4, "R02", False),
        Authorship("P02", 2, 3, "R05", True),
        Authorship("P03", 1, 1, "R06", False),
        Authorship("P04", 1, 2, "R09", True), Authorship("P04", 2, 2, "R01", True),
        Authorship("P05", 3, 5, "R10", False),
        Authorship("P06", 1, 2, "R03", False), Authorship("P06", 2, 2, "R04", False),
        Authorship("P07", 1, 3, "R07", True),
        Authorship("P08", 2, 4, "R11", True),
        Authorship("P09", 1, 1, "R12", False),
        Authorship("P10", 1, 2, "R08", False),
    ]
    return build_corpus(universities, fields, researchers, pubs, auths, salaries)


@pytest.fixture
def tiny_corpus():
    return make_tiny_corpus()


@pytest.fixture
def tiny_dir(tmp_path):
    return write_corpus(make_tiny_corpus(), tmp_path / "corpus")


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], outcome, props.get("detail")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, detail in sorted(lines, key=lambda x: int(x[0].split()[0])):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {label}"
                                    + (f"  [{detail}]" if detail else ""))
