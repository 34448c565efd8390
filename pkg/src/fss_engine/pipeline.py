"""End-to-end run: score the corpus, build the selected report families, emit a bundle."""
from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .cohort import (REGIONS, CohortStats, ExclusionEntry, ExclusionPolicy, GapTable,
                     ThresholdSpec, aggregate_universities, grouped_stats, gap_table,
                     university_gap_table, university_report)
from .config import PipelineConfig
from .corpus import AcademicRank, Gender, MacroRegion, ResearchCorpus, validate_corpus
from .io import fingerprint_corpus
from .normalization import CitationBaseline
from .productivity import ProductivityScore, ScoringResult, score_corpus


class CorpusInvalid(ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__(f"{len(violations)} corpus violation(s); first: {violations[0]}")


def cell(value) -> str:
    """CSV text for a value; floats use the shortest round-trip decimal."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, Fraction):
        return repr(float(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _human(value) -> str:
    if isinstance(value, (float, Fraction)) and not isinstance(value, bool):
        v = float(value)
        if v == 0 or abs(v) >= 0.1:
            return f"{v:.2f}"
        return f"{v:.4g}"
    return cell(value)


@dataclass
class Table:
    name: str
    title: str
    header: list[str]
    rows: list[list] = field(default_factory=list)

    def csv_bytes(self) -> bytes:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([cell(v) for v in row])
        return buf.getvalue().encode("utf-8")

    def text_bytes(self) -> bytes:
        grid = [self.header] + [[_human(v) for v in row] for row in self.rows]
        widths = [max(len(r[i]) for r in grid) for i in range(len(self.header))]
        lines = [self.title, ""]
        for k, r in enumerate(grid):
            lines.append("  ".join(c.rjust(w) if k else c.ljust(w) for c, w in zip(r, widths)).rstrip())
            if k == 0:
                lines.append("  ".join("-" * w for w in widths))
        return ("\n".join(lines) + "\n").encode("utf-8")


@dataclass
class ReportBundle:
    tables: dict[str, Table]
    manifest: dict

    def files(self) -> dict[str, bytes]:
        out = {}
        for name in sorted(self.tables):
            out[f"{name}.csv"] = self.tables[name].csv_bytes()
            out[f"{name}.txt"] = self.tables[name].text_bytes()
        manifest = dict(self.manifest)
        manifest["files"] = {k: hashlib.sha256(v).hexdigest() for k, v in out.items()}
        out["manifest.json"] = (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode()
        return out

    def write(self, directory) -> Path:
        root = Path(directory)
        root.mkdir(parents=True, exist_ok=True)
        for name, data in self.files().items():
            (root / name).write_bytes(data)
        return root


# -- tables ------------------------------------------------------------------------

SCORE_HEADER = ["researcher_id", "sds_code", "uda_code", "university_id", "macro_region",
                "gender", "rank", "w", "t", "fss", "fss_star", "percentile"]


def _stats_header(thresholds: ThresholdSpec) -> list[str]:
    return ["observations", "pct_unproductive", "mean_fss_star", "mean_percentile",
            *thresholds.names()]


def _stats_cells(stats: CohortStats) -> list:
    return list(stats.as_row().values())


def _log_rows(entries: Sequence[ExclusionEntry], family: str = "") -> list[list]:
    return [([family] if family else []) + [e.rule, e.unit, e.detail] for e in entries]


def score_tables(result: ScoringResult) -> list[Table]:
    scores = Table("scores_researchers", "Researcher productivity (FSS, FSS*, SDS percentile)",
                   SCORE_HEADER)
    for s in result.scores:
        scores.rows.append([s.researcher_id, s.sds_code, s.uda_code, s.university_id,
                            s.macro_region, s.gender, s.rank, s.w, s.t, s.fss, s.fss_star,
                            s.percentile])
    pool: dict[str, list[ProductivityScore]] = {}
    for s in result.scores:
        pool.setdefault(s.sds_code, []).append(s)
    base = Table("scores_sds_baselines", "National mean FSS of productive researchers per SDS",
                 ["sds_code", "uda_code", "researchers", "productive", "mean_fss", "singleton_pool"])
    for sds in sorted(pool):
        members = pool[sds]
        base.rows.append([sds, members[0].uda_code, len(members),
                          sum(1 for m in members if m.productive),
                          result.sds_baselines.get(sds), len(members) == 1])
    excl = Table("scores_exclusions", "Researchers not scored", ["rule", "unit", "detail"],
                 [["no_employment", rid, "no employment spell inside the window"]
                  for rid, _ in result.unscored])
    return [scores, base, excl]


def cohort_tables(scores: Sequence[ProductivityScore], thresholds: ThresholdSpec) -> list[Table]:
    head = _stats_header(thresholds)
    specs = [
        ("cohorts_overall", "Research performance (FSS*) by macro-region", None, None),
        ("cohorts_gender", "Research performance (FSS*) by gender and macro-region", "gender",
         lambda s: s.gender),
        ("cohorts_rank", "Research performance (FSS*) by academic rank and macro-region", "rank",
         lambda s: s.rank),
        ("cohorts_uda", "Research performance (FSS*) by UDA and macro-region", "uda_code",
         lambda s: s.uda_code),
    ]
    tables = []
    for name, title, dim, key in specs:
        if key is None:
            rows = grouped_stats(scores, lambda s: None, thresholds)
            table = Table(name, title, ["region", *head],
                          [[region, *_stats_cells(st)] for _, region, st in rows])
        else:
            rows = grouped_stats(scores, key, thresholds, with_total=(dim != "uda_code"))
            table = Table(name, title, [dim, "region", *head],
                          [[value, region, *_stats_cells(st)] for value, region, st in rows])
        tables.append(table)
    return tables


def _gap_tables(prefix: str, label: str, table: GapTable) -> list[Table]:
    rows = Table(f"gaps_{prefix}", f"Mean percentile gaps by SDS ({label})",
                 ["sds_code", "n_north", "n_center", "n_south", "mean_north", "mean_center",
                  "mean_south", "north_south", "north_center", "center_south"])
    for r in table.rows:
        rows.rows.append([r.sds_code, *(r.counts[g] for g in REGIONS),
                          *(r.means[g] for g in REGIONS),
                          r.north_south, r.north_center, r.center_south])
    total = len(table.rows)
    summary = Table(f"gaps_{prefix}_summary", f"Gap summary ({label})",
                    ["pair", "highest_gap", "highest_sds", "lowest_gap", "lowest_sds",
                     "n_gap_ge_0", "pct_gap_ge_0", "n_gap_lt_0", "pct_gap_lt_0"])
    for p in table.summary:
        hi, lo = p.highest or (None, ""), p.lowest or (None, "")
        summary.rows.append([p.pair, hi[0], hi[1], lo[0], lo[1],
                             p.n_nonnegative, 100 * p.n_nonnegative / total if total else None,
                             p.n_negative, 100 * p.n_negative / total if total else None])
    return [rows, summary]


def gap_tables(scores: Sequence[ProductivityScore], policy: ExclusionPolicy) -> list[Table]:
    researchers = gap_table(scores, policy, "min_obs_per_region_sds")
    universities = university_gap_table(scores, policy)
    log = Table("gaps_exclusions", "Units excluded from the gap tables",
                ["family", "rule", "unit", "detail"],
                _log_rows(researchers.log, "researchers") + _log_rows(universities.log, "universities"))
    return (_gap_tables("researchers", "professors", researchers)
            + _gap_tables("universities", "universities, FSS^U", universities) + [log])


def _university_reports(scores, policy, thresholds):
    """Ranked units and per-region stats for every UDA scope plus the overall scope."""
    reports = []
    by_uda, _ = aggregate_universities(scores, "uda", policy)
    for code in sorted(by_uda):
        reports.append(university_report(by_uda[code], policy, thresholds))
    overall, overall_log = aggregate_universities(scores, "overall", policy)
    rep = university_report(overall.get("", []), policy, thresholds)
    rep.log = overall_log + rep.log
    reports.append(rep)
    return reports


def university_tables(scores, policy, thresholds) -> list[Table]:
    table = Table("universities_scores", "University productivity (FSS^U) and scope percentile",
                  ["scope", "university_id", "macro_region", "rs", "fss_u", "percentile"])
    log_rows = []
    for rep in _university_reports(scores, policy, thresholds):
        for u in rep.ranked:
            table.rows.append([str(u.scope), u.university_id, u.macro_region, u.rs, u.fss_u,
                               u.percentile])
        log_rows += _log_rows(rep.log)
    by_sds, _ = aggregate_universities(scores, "sds", policy)
    for code in sorted(by_sds):
        rep = university_report(by_sds[code], policy, thresholds)
        for u in rep.ranked:
            table.rows.append([str(u.scope), u.university_id, u.macro_region, u.rs, u.fss_u,
                               u.percentile])
        log_rows += _log_rows(rep.log)
    log = Table("universities_exclusions", "University units excluded from scoring",
                ["rule", "unit", "detail"], log_rows)
    return [table, log]


def university_report_tables(scores, policy, thresholds) -> list[Table]:
    table = Table("unireport_table", "Macro-regional performance of universities (FSS^U)",
                  ["scope", "region", *_stats_header(thresholds)])
    log_rows = []
    for rep in _university_reports(scores, policy, thresholds):
        for reg in REGIONS:
            if reg in rep.stats:
                table.rows.append([str(rep.scope), reg, *_stats_cells(rep.stats[reg])])
        log_rows += _log_rows(rep.log)
    log = Table("unireport_exclusions", "Units excluded from the university report",
                ["rule", "unit", "detail"], log_rows)
    return [table, log]


def build_reports(scores: Sequence[ProductivityScore], config: PipelineConfig,
                  families: Optional[Sequence[str]] = None) -> list[Table]:
    """Every report family computable from researcher scores alone."""
    families = set(config.reports if families is None else families)
    policy = config.exclusions.to_policy()
    thresholds = config.thresholds.to_spec()
    tables: list[Table] = []
    if "cohorts" in families:
        tables += cohort_tables(scores, thresholds)
    if "gaps" in families:
        tables += gap_tables(scores, policy)
    if "universities" in families:
        tables += university_tables(scores, policy, thresholds)
    if "university_report" in families:
        tables += university_report_tables(scores, policy, thresholds)
    return tables


def run_pipeline(corpus: ResearchCorpus, config: PipelineConfig = PipelineConfig(),
                 baselines: Optional[CitationBaseline] = None,
                 fingerprint: Optional[str] = None) -> ReportBundle:
    window = config.window.to_window()
    violations = validate_corpus(corpus, window)
    if violations:
        raise CorpusInvalid(violations)
    result = score_corpus(corpus, window, config.weights.to_scheme(), baselines, config.workers)
    tables = score_tables(result) if "scores" in config.reports else []
    tables += build_reports(result.scores, config)
    manifest = {
        "generator": "fss-engine",
        "version": __version__,
        "config_sha256": config.digest(),
        "input_fingerprint": fingerprint or fingerprint_corpus(corpus),
        "baseline_source": "override" if baselines is not None else "corpus",
        "window": [window.first_year, window.last_year],
        "researchers": len(corpus.researchers),
        "scored": len(result.scores),
    }
    return ReportBundle({t.name: t for t in tables}, manifest)


# -- reading scores back ------------------------------------------------------------

def _opt(parse, text):
    return parse(text) if text != "" else None


def read_scores(path) -> list[ProductivityScore]:
    """Load a ``scores_researchers.csv`` written by :func:`run_pipeline`."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SCORE_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        out = []
        for row in reader:
            out.append(ProductivityScore(
                researcher_id=row["researcher_id"], fss=float(row["fss"]),
                fss_star=float(row["fss_star"]), percentile=float(row["percentile"]),
                sds_code=row["sds_code"], uda_code=row["uda_code"],
                university_id=row["university_id"],
                macro_region=_opt(MacroRegion.parse, row["macro_region"]),
                gender=Gender.parse(row["gender"]),
                rank=_opt(AcademicRank.parse, row["rank"]),
                w=float(row["w"] or "nan"), t=float(row["t"] or "nan")))
    return out


def report_from_scores(scores_path, config: PipelineConfig) -> ReportBundle:
    """Re-emit the score-derived report families from a cached researcher score file."""
    data = Path(scores_path).read_bytes()
    scores = read_scores(scores_path)
    families = [f for f in config.reports if f != "scores"]
    tables = build_reports(scores, config, families)
    manifest = {
        "generator": "fss-engine",
        "version": __version__,
        "config_sha256": config.digest(),
        "input_fingerprint": hashlib.sha256(data).hexdigest(),
        "source": "scores_researchers.csv",
    }
    return ReportBundle({t.name: t for t in tables}, manifest)

