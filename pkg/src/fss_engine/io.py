"""Corpus directories: reading, writing and fingerprinting.

A corpus directory holds seven comma-separated UTF-8 files with fixed
headers (see ``HEADERS``) plus an optional ``baselines.csv`` that replaces
the citation baselines derived from the corpus itself.
"""
from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Optional

from .corpus import (AcademicRank, Authorship, BylineConvention, DocType, EmploymentSpell,
                     FieldEntry, Gender, MacroRegion, Publication, Researcher, ResearchCorpus,
                     SalaryScale, University, validate_corpus)
from .normalization import BaselineEntry

HEADERS = {
    "universities.csv": ["university_id", "name", "macro_region"],
    "fields.csv": ["sds_code", "uda_code", "byline_convention"],
    "researchers.csv": ["researcher_id", "gender", "sds_code", "university_id"],
    "spells.csv": ["researcher_id", "start", "end", "rank", "seniority_band"],
    "salaries.csv": ["rank", "seniority_band", "yearly_salary"],
    "publications.csv": ["pub_id", "year", "doc_type", "citations", "categories"],
    "authorships.csv": ["pub_id", "author_slot", "total_authors", "researcher_id",
                        "extramural_byline"],
}
BASELINES_FILE = "baselines.csv"
BASELINES_HEADER = ["year", "category", "mean_cited"]
EXTERNAL = "-"


class MissingFile(FileNotFoundError):
    pass


@dataclass(frozen=True)
class Problem:
    file: str
    row: int  # 1-based line number, header is line 1
    column: str
    reason: str

    def __str__(self) -> str:
        where = f"{self.file}:{self.row}" + (f" [{self.column}]" if self.column else "")
        return f"{where}: {self.reason}"


class SchemaError(ValueError):
    def __init__(self, problems: list[Problem]):
        self.problems = problems
        shown = "; ".join(map(str, problems[:5]))
        more = f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""
        super().__init__(f"{len(problems)} schema problem(s): {shown}{more}")


class DanglingReference(ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(map(str, violations[:5])))


class _Reader:
    """Collects per-cell parse failures instead of stopping at the first one."""

    def __init__(self):
        self.problems: list[Problem] = []

    def rows(self, path: Path, header: list[str]) -> Iterator[tuple[int, dict[str, str]]]:
        name = path.name
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            got = next(reader, None)
            if got is None:
                self.problems.append(Problem(name, 1, "", "missing header"))
                return
            if [h.strip() for h in got] != header:
                self.problems.append(Problem(name, 1, "", f"expected header {header}, got {got}"))
                return
            for lineno, raw in enumerate(reader, start=2):
                if not raw or all(not c.strip() for c in raw):
                    continue
                if len(raw) != len(header):
                    self.problems.append(Problem(name, lineno, "",
                                                 f"expected {len(header)} cells, got {len(raw)}"))
                    continue
                yield lineno, {h: c.strip() for h, c in zip(header, raw)}

    def cell(self, file: str, lineno: int, row: dict, column: str, parse: Callable):
        try:
            return parse(row[column])
        except (ValueError, TypeError, ArithmeticError) as exc:
            self.problems.append(Problem(file, lineno, column, str(exc) or "invalid value"))
            return None


def _nonempty(text: str) -> str:
    if not text:
        raise ValueError("empty value")
    return text


def _int(text: str) -> int:
    return int(text)


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise ValueError(f"must be non-negative, got {value}")
    return value


def _pos_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError(f"must be positive, got {value}")
    return value


def _bool(text: str) -> bool:
    key = text.lower()
    if key in ("true", "1", "yes", "y", "t"):
        return True
    if key in ("false", "0", "no", "n", "f"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _date(text: str) -> dt.date:
    return dt.date.fromisoformat(text)


def _opt_date(text: str) -> Optional[dt.date]:
    return dt.date.fromisoformat(text) if text else None


def _salary(text: str) -> Fraction:
    value = Fraction(text)
    if value <= 0:
        raise ValueError(f"salary must be positive, got {text}")
    return value


def _positive_real(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise ValueError(f"must be positive, got {text}")
    return value


def load_corpus(directory, strict: bool = True) -> ResearchCorpus:
    """Read a corpus directory.

    Any malformed cell aborts the load with a :class:`SchemaError` listing
    every problem found. With ``strict`` (the default) dangling identifiers
    also abort, as :class:`DanglingReference`; other structural issues are
    left to :func:`validate_corpus`.
    """
    root = Path(directory)
    missing = [name for name in HEADERS if not (root / name).is_file()]
    if missing:
        raise MissingFile(f"{root}: missing {', '.join(missing)}")
    rd = _Reader()
    dupes: list[Problem] = []

    def keyed(file, lineno, key, store):
        if key in store:
            dupes.append(Problem(file, lineno, "", f"duplicate identifier {key!r}"))
            return False
        return True

    universities: dict[str, University] = {}
    f = "universities.csv"
    for ln, row in rd.rows(root / f, HEADERS[f]):
        uid = rd.cell(f, ln, row, "university_id", _nonempty)
        region = rd.cell(f, ln, row, "macro_region", MacroRegion.parse)
        if None not in (uid, region) and keyed(f, ln, uid, universities):
            universities[uid] = University(uid, row["name"], region)

    fields: dict[str, FieldEntry] = {}
    f = "fields.csv"
    for ln, row in rd.rows(root / f, HEADERS[f]):
        sds = rd.cell(f, ln, row, "sds_code", _nonempty)
        uda = rd.cell(f, ln, row, "uda_code", _nonempty)
        conv = rd.cell(f, ln, row, "byline_convention", BylineConvention.parse)
        if None not in (sds, uda, conv) and keyed(f, ln, sds, fields):
            fields[sds] = FieldEntry(uda, conv)

    salaries: dict[tuple[AcademicRank, int], Fraction] = {}
    f = "salaries.csv"
    for ln, row in rd.rows(root / f, HEADERS[f]):
        rank = rd.cell(f, ln, row, "rank", AcademicRank.parse)
        band = rd.cell(f, ln, row, "seniority_band", _nonneg_int)
        amount = rd.cell(f, ln, row, "yearly_salary", _salary)
        if None not in (rank, band, amount) and keyed(f, ln, (rank, band), salaries):
            salaries[(rank, band)] = amount

    spells: dict[str, list[EmploymentSpell]] = {}
    f = "spells.csv"
    spell_rows = []
    for ln, row in rd.rows(root / f, HEADERS[f]):
        rid = rd.cell(f, ln, row, "researcher_id", _nonempty)
        start = rd.cell(f, ln, row, "start", _date)
        end = rd.cell(f, ln, row, "end", _opt_date)
        rank = rd.cell(f, ln, row, "rank", AcademicRank.parse)
        band = rd.cell(f, ln, row, "seniority_band", _nonneg_int)
        if None not in (rid, start, rank, band):
            spell_rows.append((ln, rid))
            spells.setdefault(rid, []).append(EmploymentSpell(start, end, rank, band))

    researchers: dict[str, Researcher] = {}
    f = "researchers.csv"
    for ln, row in rd.rows(root / f, HEADERS[f]):
        rid = rd.cell(f, ln, row, "researcher_id", _nonempty)
        gender = rd.cell(f, ln, row, "gender", Gender.parse)
        sds = rd.cell(f, ln, row, "sds_code", _nonempty)
        uid = rd.cell(f, ln, row, "university_id", _nonempty)
        if None not in (rid, gender, sds, uid) and keyed(f, ln, rid, researchers):
            own = tuple(sorted(spells.get(rid, ()), key=lambda s: s.start))
            researchers[rid] = Researcher(rid, gender, sds, uid, own)

    publications: dict[str, Publication] = {}
    f = "publications.csv"
    for ln, row in rd.rows(root / f, HEADERS[f]):
        pid = rd.cell(f, ln, row, "pub_id", _nonempty)
        year = rd.cell(f, ln, row, "year", _int)
        doc = rd.cell(f, ln, row, "doc_type", DocType.parse)
        cites = rd.cell(f, ln, row, "citations", _nonneg_int)
        cats = tuple(c.strip() for c in row["categories"].split(";") if c.strip())
        if None not in (pid, year, doc, cites) and keyed(f, ln, pid, publications):
            publications[pid] = Publication(pid, year, doc, cites, cats)

    authorships: list[Authorship] = []
    f = "authorships.csv"
    for ln, row in rd.rows(root / f, HEADERS[f]):
        pid = rd.cell(f, ln, row, "pub_id", _nonempty)
        slot = rd.cell(f, ln, row, "author_slot", _pos_int)
        total = rd.cell(f, ln, row, "total_authors", _pos_int)
        extra = rd.cell(f, ln, row, "extramural_byline", _bool)
        rid = row["researcher_id"]
        if None not in (pid, slot, total, extra):
            authorships.append(Authorship(pid, slot, total, None if rid in ("", EXTERNAL) else rid,
                                          extra))

    problems = rd.problems + dupes
    if problems:
        raise SchemaError(sorted(problems, key=lambda p: (p.file, p.row, p.column)))

    corpus = ResearchCorpus(universities, fields, researchers, publications,
                            tuple(authorships), SalaryScale(salaries))
    if strict:
        orphan_spells = [f"spells.csv:{ln}: unknown researcher {rid!r}"
                         for ln, rid in spell_rows if rid not in researchers]
        dangling = [v for v in validate_corpus(corpus) if v.rule == "DanglingReference"]
        if orphan_spells or dangling:
            raise DanglingReference(orphan_spells + dangling)
    return corpus


def load_baselines(directory) -> Optional[dict[tuple[int, str], BaselineEntry]]:
    """The optional baseline override in a corpus directory, or ``None``."""
    path = Path(directory) / BASELINES_FILE
    if not path.is_file():
        return None
    rd = _Reader()
    out = {}
    for ln, row in rd.rows(path, BASELINES_HEADER):
        year = rd.cell(BASELINES_FILE, ln, row, "year", _int)
        cat = rd.cell(BASELINES_FILE, ln, row, "category", _nonempty)
        mean = rd.cell(BASELINES_FILE, ln, row, "mean_cited", _positive_real)
        if None not in (year, cat, mean):
            out[(year, cat)] = BaselineEntry(mean, 0)
    if rd.problems:
        raise SchemaError(rd.problems)
    return out


def fingerprint_directory(directory) -> str:
    """SHA-256 over the names and bytes of every input file present."""
    root = Path(directory)
    h = hashlib.sha256()
    for name in sorted([*HEADERS, BASELINES_FILE]):
        path = root / name
        if path.is_file():
            data = path.read_bytes()
            h.update(f"{name}\0{len(data)}\0".encode())
            h.update(data)
    return h.hexdigest()


# -- writing -----------------------------------------------------------------------

def fraction_text(value: Fraction) -> str:
    """Exact decimal text when the fraction terminates, else the nearest float."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    d = value.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return repr(float(value))
    digits = 0
    while (value * 10 ** digits).denominator != 1:
        digits += 1
    scaled = abs(value.numerator * 10 ** digits // value.denominator)
    whole, frac = divmod(scaled, 10 ** digits)
    sign = "-" if value < 0 else ""
    return f"{sign}{whole}.{frac:0{digits}d}"


def corpus_tables(corpus: ResearchCorpus) -> dict[str, list[list[str]]]:
    """Rows (header first) of every corpus file, in canonical order."""
    t = {name: [list(header)] for name, header in HEADERS.items()}
    for uid in sorted(corpus.universities):
        u = corpus.universities[uid]
        t["universities.csv"].append([uid, u.name, u.macro_region.value])
    for sds in sorted(corpus.fields):
        e = corpus.fields[sds]
        t["fields.csv"].append([sds, e.uda_code, e.byline_convention.value])
    for rid in sorted(corpus.researchers):
        r = corpus.researchers[rid]
        t["researchers.csv"].append([rid, r.gender.value, r.sds_code, r.university_id])
        for s in r.spells:
            t["spells.csv"].append([rid, s.start.isoformat(), s.end.isoformat() if s.end else "",
                                    s.rank.value, str(s.seniority_band)])
    for (rank, band), amount in corpus.salaries.items():
        t["salaries.csv"].append([rank.value, str(band), fraction_text(amount)])
    for pid in sorted(corpus.publications):
        p = corpus.publications[pid]
        t["publications.csv"].append([pid, str(p.year), p.doc_type.value, str(p.citations),
                                      ";".join(p.subject_categories)])
    for a in sorted(corpus.authorships, key=lambda a: (a.pub_id, a.author_slot)):
        t["authorships.csv"].append([a.pub_id, str(a.author_slot), str(a.total_authors),
                                     a.researcher_id or EXTERNAL,
                                     "true" if a.extramural_byline else "false"])
    return t


def _csv_bytes(rows: list[list[str]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def write_corpus(corpus: ResearchCorpus, directory) -> Path:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    for name, rows in corpus_tables(corpus).items():
        (root / name).write_bytes(_csv_bytes(rows))
    return root


def fingerprint_corpus(corpus: ResearchCorpus) -> str:
    """Fingerprint of the canonical on-disk form of an in-memory corpus."""
    h = hashlib.sha256()
    for name, rows in sorted(corpus_tables(corpus).items()):
        data = _csv_bytes(rows)
        h.update(f"{name}\0{len(data)}\0".encode())
        h.update(data)
    return h.hexdigest()
