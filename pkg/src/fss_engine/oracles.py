"""Brute-force reference implementations used to cross-check the engine.

Nothing here imports or calls engine code: the oracles work on plain
records (tuples, dicts, numbers) and re-derive every quantity the slow,
obvious way.
"""
from __future__ import annotations

import datetime as dt
from fractions import Fraction

import numpy as np


def oracle_rank(values):
    """Percentiles by counting, for each value, how many are below and equal to it."""
    n = len(values)
    if n == 1:
        return [50.0]
    arr = np.asarray(values, dtype=float)
    below = (arr[None, :] < arr[:, None]).sum(axis=1)
    equal = (arr[None, :] == arr[:, None]).sum(axis=1)
    out = []
    for lo, eq in zip(below.tolist(), equal.tolist()):
        # ranks lo+1 .. lo+eq, each worth 100 (rank - 1) / (n - 1)
        slots = sum(range(lo, lo + eq))
        out.append(float(Fraction(100 * slots, eq * (n - 1))))
    return out


def oracle_baselines(publications):
    """Group-by mean over cited publications; ``publications`` is an iterable of
    ``(year, citations, categories)``."""
    groups = {}
    for year, citations, categories in publications:
        if citations == 0:
            continue
        for cat in set(categories):
            groups.setdefault((year, cat), []).append(citations)
    return {key: sum(v) / len(v) for key, v in groups.items()}


def _years_between(start, end):
    total = 0.0
    for year in range(start.year, end.year + 1):
        jan1, next_jan1 = dt.date(year, 1, 1), dt.date(year + 1, 1, 1)
        days = (min(end, next_jan1) - max(start, jan1)).days
        if days > 0:
            total += days / (next_jan1 - jan1).days
    return total


def _share(slot, n, convention, extramural, weights):
    if n == 1:
        return 1.0
    if convention == "Alphabetical":
        return 1.0 / n
    first, last, middle = weights["extramural" if extramural else "intramural"]
    if n == 2:
        return (first if slot == 1 else last) / (first + last)
    if slot == 1:
        return first
    if slot == n:
        return last
    return middle / (n - 2)


DEFAULT_ORACLE_WEIGHTS = {"intramural": (0.40, 0.30, 0.30), "extramural": (0.30, 0.20, 0.50)}


def oracle_fss(record):
    """FSS of one researcher from a flat record.

    ``record`` holds ``window`` (first_year, last_year), ``spells`` as
    ``(start, end_or_None, yearly_salary)`` and ``pubs`` as dicts with
    ``year``, ``citations``, ``baselines`` (one per category), ``slot``,
    ``n_authors``, ``convention`` and ``extramural``.
    """
    first_year, last_year = record["window"]
    w_start, w_end = dt.date(first_year, 1, 1), dt.date(last_year + 1, 1, 1)
    weights = record.get("weights", DEFAULT_ORACLE_WEIGHTS)

    years_worked, salary_years = 0.0, 0.0
    for start, end, salary in record["spells"]:
        lo = max(start, w_start)
        hi = w_end if end is None else min(end, w_end)
        if hi <= lo:
            continue
        y = _years_between(lo, hi)
        years_worked += y
        salary_years += float(salary) * y
    if years_worked == 0:
        raise ValueError("no employment in window")
    w = salary_years / years_worked
    t = years_worked

    total = 0.0
    for p in record["pubs"]:
        if not first_year <= p["year"] <= last_year or p["citations"] == 0:
            continue
        c_bar = sum(p["baselines"]) / len(p["baselines"])
        f = _share(p["slot"], p["n_authors"], p["convention"], p["extramural"], weights)
        total += p["citations"] / c_bar * f
    return (1 / w) * (1 / t) * total


def flatten_corpus(corpus, window, weights=None):
    """Flat ``oracle_fss`` records for every researcher, keyed by id.

    Reads corpus attributes only; baselines come from :func:`oracle_baselines`.
    """
    pubs = corpus.publications
    table = oracle_baselines((p.year, p.citations, p.subject_categories) for p in pubs.values())
    by_researcher = {}
    for a in corpus.authorships:
        if a.researcher_id is not None:
            by_researcher.setdefault(a.researcher_id, []).append(a)
    records = {}
    for rid, r in corpus.researchers.items():
        convention = corpus.fields[r.sds_code].byline_convention.value
        spells = [(s.start, s.end, corpus.salaries[(s.rank, s.seniority_band)]) for s in r.spells]
        flat_pubs = []
        for a in by_researcher.get(rid, ()):
            p = pubs[a.pub_id]
            flat_pubs.append({
                "year": p.year, "citations": p.citations,
                "baselines": [table.get((p.year, c)) for c in p.subject_categories],
                "slot": a.author_slot, "n_authors": a.total_authors,
                "convention": convention, "extramural": a.extramural_byline,
            })
        rec = {"window": (window.first_year, window.last_year), "spells": spells, "pubs": flat_pubs}
        if weights is not None:
            rec["weights"] = weights
        records[rid] = rec
    return records
