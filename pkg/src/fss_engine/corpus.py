"""Domain model for a disambiguated research corpus.

A corpus bundles universities, the SDS field scheme, researchers with their
employment spells, the salary scale, publications and authorships. Everything
is immutable once built; :func:`validate_corpus` reports structural problems
as data instead of raising.
"""
from __future__ import annotations

import datetime as dt
import enum
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional


class CorpusError(Exception):
    """Base class for corpus-level failures."""


class NoEmployment(CorpusError):
    pass


class UnknownSalaryKey(CorpusError):
    pass


class MacroRegion(str, enum.Enum):
    NORTH = "North"
    CENTER = "Center"
    SOUTH = "South"

    @classmethod
    def parse(cls, text: str) -> "MacroRegion":
        key = text.strip().lower()
        aliases = {"north": cls.NORTH, "n": cls.NORTH, "center": cls.CENTER,
                   "centre": cls.CENTER, "c": cls.CENTER, "south": cls.SOUTH, "s": cls.SOUTH}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown macro-region {text!r}") from None


REGIONS = (MacroRegion.NORTH, MacroRegion.CENTER, MacroRegion.SOUTH)


class Gender(str, enum.Enum):
    F = "F"
    M = "M"
    UNSPECIFIED = "Unspecified"

    @classmethod
    def parse(cls, text: str) -> "Gender":
        key = text.strip().upper()
        if key in ("F", "M"):
            return cls(key)
        if key in ("", "U", "UNSPECIFIED"):
            return cls.UNSPECIFIED
        raise ValueError(f"unknown gender {text!r}")


class AcademicRank(str, enum.Enum):
    ASSISTANT = "Assistant"
    ASSOCIATE = "Associate"
    FULL = "Full"

    @classmethod
    def parse(cls, text: str) -> "AcademicRank":
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        raise ValueError(f"unknown academic rank {text!r}")


class BylineConvention(str, enum.Enum):
    ALPHABETICAL = "Alphabetical"
    POSITION_WEIGHTED = "PositionWeighted"

    @classmethod
    def parse(cls, text: str) -> "BylineConvention":
        key = text.strip().lower().replace("_", "").replace("-", "")
        if key == "alphabetical":
            return cls.ALPHABETICAL
        if key == "positionweighted":
            return cls.POSITION_WEIGHTED
        raise ValueError(f"unknown byline convention {text!r}")


class DocType(str, enum.Enum):
    ARTICLE = "Article"
    REVIEW = "Review"
    PROCEEDINGS_PAPER = "ProceedingsPaper"

    @classmethod
    def parse(cls, text: str) -> "DocType":
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        raise ValueError(f"unknown document type {text!r}")


@dataclass(frozen=True)
class University:
    university_id: str
    name: str
    macro_region: MacroRegion


@dataclass(frozen=True)
class FieldEntry:
    uda_code: str
    byline_convention: BylineConvention


# sds_code -> FieldEntry
FieldScheme = Mapping[str, FieldEntry]


@dataclass(frozen=True)
class EmploymentSpell:
    """Half-open employment interval ``[start, end)``; ``end=None`` means still employed."""

    start: dt.date
    end: Optional[dt.date]
    rank: AcademicRank
    seniority_band: int


@dataclass(frozen=True)
class Researcher:
    researcher_id: str
    gender: Gender
    sds_code: str
    university_id: str
    spells: tuple[EmploymentSpell, ...] = ()


class SalaryScale:
    """Yearly salary per (rank, seniority band).

    Salaries are held as exact rationals so that rescaling the whole scale
    never perturbs standardized scores.
    """

    def __init__(self, salaries: Mapping[tuple[AcademicRank, int], object]):
        table = {}
        for (rank, band), value in salaries.items():
            amount = _exact(value)
            if amount <= 0:
                raise ValueError(f"salary for ({rank}, {band}) must be positive, got {value}")
            table[(AcademicRank(rank), int(band))] = amount
        self._table = table

    def __getitem__(self, key: tuple[AcademicRank, int]) -> Fraction:
        try:
            return self._table[key]
        except KeyError:
            raise UnknownSalaryKey(f"no salary for rank={key[0].value} band={key[1]}") from None

    def __contains__(self, key) -> bool:
        return key in self._table

    def __len__(self) -> int:
        return len(self._table)

    def items(self):
        return sorted(self._table.items(), key=lambda kv: (kv[0][0].value, kv[0][1]))

    def __eq__(self, other) -> bool:
        return isinstance(other, SalaryScale) and self._table == other._table

    def __repr__(self) -> str:
        return f"SalaryScale({len(self._table)} entries)"

    @property
    def reference(self) -> Fraction:
        """Smallest salary in the scale; the unit for relative salaries."""
        return min(self._table.values())

    def scaled(self, factor) -> "SalaryScale":
        lam = _exact(factor)
        return SalaryScale({key: value * lam for key, value in self._table.items()})

    def relative(self) -> "SalaryScale":
        """The scale divided exactly by its reference salary."""
        ref = self.reference
        return SalaryScale({key: value / ref for key, value in self._table.items()})


def _exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


@dataclass(frozen=True)
class Publication:
    pub_id: str
    year: int
    doc_type: DocType
    citations: int
    subject_categories: tuple[str, ...]


@dataclass(frozen=True)
class Authorship:
    pub_id: str
    author_slot: int
    total_authors: int
    researcher_id: Optional[str]  # None marks an author outside the corpus
    extramural_byline: bool


@dataclass(frozen=True)
class ObservationWindow:
    first_year: int
    last_year: int
    citation_census_date: Optional[dt.date] = None

    def __post_init__(self):
        if self.first_year > self.last_year:
            raise ValueError("first_year must not exceed last_year")

    @property
    def start(self) -> dt.date:
        return dt.date(self.first_year, 1, 1)

    @property
    def end(self) -> dt.date:
        return dt.date(self.last_year + 1, 1, 1)

    @property
    def years(self) -> int:
        return self.last_year - self.first_year + 1

    def __contains__(self, year: int) -> bool:
        return self.first_year <= year <= self.last_year


@dataclass(frozen=True)
class ResearchCorpus:
    universities: Mapping[str, University]
    fields: FieldScheme
    researchers: Mapping[str, Researcher]
    publications: Mapping[str, Publication]
    authorships: tuple[Authorship, ...]
    salaries: SalaryScale = field(default_factory=lambda: SalaryScale({}))

    @cached_property
    def authorships_by_researcher(self) -> dict[str, list[Authorship]]:
        index: dict[str, list[Authorship]] = defaultdict(list)
        for auth in self.authorships:
            if auth.researcher_id is not None:
                index[auth.researcher_id].append(auth)
        return dict(index)

    def with_salaries(self, salaries: SalaryScale) -> "ResearchCorpus":
        return ResearchCorpus(self.universities, self.fields, self.researchers,
                              self.publications, self.authorships, salaries)


def _year_fraction(start: dt.date, end: dt.date) -> Fraction:
    """Length of ``[start, end)`` in years, prorating each calendar year by its own day count."""
    total = Fraction(0)
    for year in range(start.year, end.year + 1):
        lo = max(start, dt.date(year, 1, 1))
        hi = min(end, dt.date(year + 1, 1, 1))
        if hi > lo:
            days_in_year = (dt.date(year + 1, 1, 1) - dt.date(year, 1, 1)).days
            total += Fraction((hi - lo).days, days_in_year)
    return total


def employment_in_window(researcher: Researcher, window: ObservationWindow
                         ) -> list[tuple[EmploymentSpell, Fraction]]:
    """Spells intersecting the window, paired with the years they contribute."""
    out = []
    for spell in researcher.spells:
        lo = max(spell.start, window.start)
        hi = window.end if spell.end is None else min(spell.end, window.end)
        if hi > lo:
            out.append((spell, _year_fraction(lo, hi)))
    return out


def resolve_w_and_t_exact(researcher: Researcher, scale: SalaryScale,
                          window: ObservationWindow) -> tuple[Fraction, Fraction]:
    worked = employment_in_window(researcher, window)
    if not worked:
        raise NoEmployment(f"researcher {researcher.researcher_id} has no spell in "
                           f"{window.first_year}-{window.last_year}")
    t = sum((years for _, years in worked), Fraction(0))
    paid = sum((scale[(spell.rank, spell.seniority_band)] * years for spell, years in worked),
               Fraction(0))
    return paid / t, t


def resolve_w_and_t(researcher: Researcher, scale: SalaryScale,
                    window: ObservationWindow) -> tuple[float, float]:
    """Average yearly salary ``w`` and years worked ``t`` inside the window.

    ``t`` prorates partial years by calendar days; ``w`` is the
    time-weighted mean of the salaries of the spells worked.
    """
    w, t = resolve_w_and_t_exact(researcher, scale, window)
    return float(w), float(t)


def current_rank(researcher: Researcher, window: ObservationWindow) -> Optional[AcademicRank]:
    """Rank held in the latest spell that intersects the window."""
    worked = employment_in_window(researcher, window)
    if not worked:
        return None
    return max(worked, key=lambda pair: pair[0].start)[0].rank


# -- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    entity: str
    key: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.entity} {self.key}: {self.message}"


def validate_corpus(corpus: ResearchCorpus,
                    window: Optional[ObservationWindow] = None) -> list[Violation]:
    """Return every structural violation in ``corpus``; empty iff well-formed."""
    out: list[Violation] = []

    def flag(rule, entity, key, message):
        out.append(Violation(rule, entity, str(key), message))

    for sds, entry in sorted(corpus.fields.items()):
        if not entry.uda_code:
            flag("MissingUda", "field", sds, "SDS has no UDA")

    for rid in sorted(corpus.researchers):
        r = corpus.researchers[rid]
        if r.university_id not in corpus.universities:
            flag("DanglingReference", "researcher", rid, f"unknown university {r.university_id!r}")
        if r.sds_code not in corpus.fields:
            flag("DanglingReference", "researcher", rid, f"unknown SDS {r.sds_code!r}")
        spells = sorted(r.spells, key=lambda s: s.start)
        for s in spells:
            if s.end is not None and s.end <= s.start:
                flag("DegenerateSpell", "spell", rid, f"start {s.start} not before end {s.end}")
            if (s.rank, s.seniority_band) not in corpus.salaries:
                flag("UnknownSalaryKey", "spell", rid,
                     f"no salary for rank={s.rank.value} band={s.seniority_band}")
        for prev, nxt in zip(spells, spells[1:]):
            if prev.end is None or nxt.start < prev.end:
                flag("OverlappingSpells", "spell", rid, f"spell starting {nxt.start} overlaps previous")

    for pid in sorted(corpus.publications):
        p = corpus.publications[pid]
        if not p.subject_categories:
            flag("EmptyCategories", "publication", pid, "no subject categories")
        if p.citations < 0:
            flag("NegativeCitations", "publication", pid, f"citations={p.citations}")
        if window is not None and p.year > window.last_year:
            flag("PublicationAfterWindow", "publication", pid, f"year {p.year} > {window.last_year}")

    byline_size: dict[str, int] = {}
    slots_seen: set[tuple[str, int]] = set()
    pairs_seen: set[tuple[str, str]] = set()
    for a in corpus.authorships:
        key = f"{a.pub_id}#{a.author_slot}"
        if a.pub_id not in corpus.publications:
            flag("DanglingReference", "authorship", key, f"unknown publication {a.pub_id!r}")
        if a.researcher_id is not None and a.researcher_id not in corpus.researchers:
            flag("DanglingReference", "authorship", key, f"unknown researcher {a.researcher_id!r}")
        if a.total_authors < 1 or not 1 <= a.author_slot <= a.total_authors:
            flag("SlotOutOfRange", "authorship", key,
                 f"slot {a.author_slot} outside 1..{a.total_authors}")
        if byline_size.setdefault(a.pub_id, a.total_authors) != a.total_authors:
            flag("InconsistentByline", "authorship", key, "total_authors disagrees with other rows")
        if (a.pub_id, a.author_slot) in slots_seen:
            flag("DuplicateSlot", "authorship", key, "slot already taken")
        slots_seen.add((a.pub_id, a.author_slot))
        if a.researcher_id is not None:
            if (a.pub_id, a.researcher_id) in pairs_seen:
                flag("DuplicateAuthorship", "authorship", key,
                     f"researcher {a.researcher_id} already on this byline")
            pairs_seen.add((a.pub_id, a.researcher_id))
    return out


def build_corpus(universities: Iterable[University], fields: Mapping[str, FieldEntry],
                 researchers: Iterable[Researcher], publications: Iterable[Publication],
                 authorships: Iterable[Authorship], salaries: SalaryScale) -> ResearchCorpus:
    """Assemble a corpus from iterables, keying entities by identifier."""
    return ResearchCorpus(
        universities={u.university_id: u for u in universities},
        fields=dict(fields),
        researchers={r.researcher_id: r for r in researchers},
        publications={p.pub_id: p for p in publications},
        authorships=tuple(authorships),
        salaries=salaries,
    )
