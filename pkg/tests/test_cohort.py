import random
from fractions import Fraction

import pytest

from fss_engine.cohort import (EmptyCohort, ExclusionPolicy, ThresholdSpec, UnknownRule,
                               aggregate_universities, apply_exclusions, cohort_stats, gap_table,
                               grouped_stats, university_gap_table, university_report)
from fss_engine.productivity import OVERALL, Scope, UniversityScore, score_corpus

from builders import C, N, S, THIN_SECTORS, score, six_point_four_fixture, thin_sector_fixture
from conftest import WINDOW
from fss_engine.synth import SynthProfile, generate_corpus

ONES = ExclusionPolicy(*([1] * 5))


def test_cohort_stats_example():
    items = [score(percentile=10, fss_star=0), score(percentile=40, fss_star=0.5),
             score(percentile=60, fss_star=1.2), score(percentile=95, fss_star=2.1)]
    st = cohort_stats(items)
    assert st.observations == 4
    assert st.pct_unproductive == 25
    assert st.shares["bottom_10"] == 25
    assert st.shares["above_median"] == 50
    assert st.shares["top_10"] == 25
    assert st.shares["top"] == 0
    assert st.mean_fss_star == pytest.approx(0.95)


def test_all_tied_cohort_has_nobody_above_median():
    st = cohort_stats([score(percentile=50.0) for _ in range(6)])
    assert st.shares["above_median"] == 0 and st.mean_percentile == 50


def test_single_productive_researcher():
    st = cohort_stats([score(percentile=100.0, fss_star=3.0)])
    assert (st.observations, st.pct_unproductive, st.shares["top"]) == (1, 0, 100)


def test_empty_cohort():
    with pytest.raises(EmptyCohort):
        cohort_stats([])


def test_configurable_top_cut():
    items = [score(percentile=p) for p in (99.0, 100.0, 40.0, 0.0)]
    assert cohort_stats(items).shares["top"] == 25
    assert cohort_stats(items, ThresholdSpec(top_cut=99)).shares["top"] == 50


def test_shares_recombine_over_disjoint_subcohorts():
    rng = random.Random(11)
    items = [score(percentile=rng.choice([0, 12.5, 37.5, 50, 62.5, 90, 100]),
                   fss_star=rng.random()) for _ in range(500)]
    parts = [items[:123], items[123:124], items[124:400], items[400:]]
    pooled = cohort_stats(items)
    stats = [cohort_stats(p) for p in parts]
    for name, value in pooled.shares.items():
        weighted = sum(s.shares[name] * s.observations for s in stats) / len(items)
        assert abs(weighted - value) <= 1e-9
    assert abs(sum(s.pct_unproductive * s.observations for s in stats) / len(items)
               - pooled.pct_unproductive) <= 1e-9


# -- exclusions ------------------------------------------------------------------

def test_thin_sectors_are_excluded():
    records = thin_sector_fixture()
    result = apply_exclusions(records, ExclusionPolicy(), "min_obs_per_region_sds")
    assert [e.unit for e in result.log] == sorted(THIN_SECTORS)
    retained = {r.sds_code for r in result.retained}
    assert len(retained) == 182
    assert len(result.retained) + len(result.excluded) == len(records)


def test_sector_with_two_northern_observations_dropped():
    recs = ([score("A/1", N) for _ in range(2)] + [score("A/1", C) for _ in range(5)]
            + [score("A/1", S) for _ in range(7)])
    assert gap_table(recs).rows == []
    assert gap_table(recs).log[0].detail == "observations per region below 3: North=2"


def test_unit_thresholds_of_one_exclude_nothing():
    # a sector with no researcher at all in a region still fails any per-region minimum
    records = [r for r in thin_sector_fixture() if THIN_SECTORS.get(r.sds_code, (N, 1))[1] > 0]
    for rule in ("min_obs_per_region_sds", "min_staff_per_university_sds",
                 "min_professors_per_sds_university_overall"):
        result = apply_exclusions(records, ONES, rule)
        assert result.excluded == [] and result.log == []


def test_university_sds_pair_with_two_staff_logged():
    recs = [score("A/1", N, university="U1") for _ in range(2)] + \
           [score("A/1", N, university="U2") for _ in range(3)]
    result = apply_exclusions(recs, ExclusionPolicy(), "min_staff_per_university_sds")
    assert [(e.unit, e.rule) for e in result.log] == [("U1|A/1", "min_staff_per_university_sds")]
    assert {r.university_id for r in result.retained} == {"U2"}


def test_unknown_rule():
    with pytest.raises(UnknownRule):
        apply_exclusions([], ExclusionPolicy(), "min_vibes")


def test_policy_rejects_zero():
    with pytest.raises(ValueError):
        ExclusionPolicy(min_obs_per_region_sds=0)


def test_uda_scope_drops_universities_under_five():
    units = [UniversityScore(u, Scope("uda", "05"), fss, rs, reg)
             for u, fss, rs, reg in [("UA", 1.0, 4, N), ("UB", 0.8, 5, C), ("UC", 1.3, 12, S),
                                     ("UD", 0.2, 3, N), ("UE", 0.9, 40, N)]]
    report = university_report(units)
    assert [u.university_id for u in report.ranked] == ["UB", "UC", "UE"]
    assert [e.unit for e in report.log] == ["UA|05", "UD|05"]


def test_overall_scope_drops_small_sds_pairs():
    recs = ([score("A/1", N, university="U1") for _ in range(9)]
            + [score("A/1", N, university="U2") for _ in range(10)]
            + [score("B/2", N, university="U1") for _ in range(12)])
    by_scope, log = aggregate_universities(recs, "overall")
    assert [e.unit for e in log] == ["U1|A/1"]
    units = {u.university_id: u.rs for u in by_scope[""]}
    assert units == {"U1": 12, "U2": 10}


def test_university_report_ranks_and_groups():
    units = [UniversityScore(u, OVERALL, fss, 20, reg)
             for u, fss, reg in [("U1", 0.5, S), ("U2", 1.0, C), ("U3", 1.5, N)]]
    report = university_report(units)
    assert [u.percentile for u in report.ranked] == [0, 50, 100]
    assert report.stats[N].mean_percentile == 100
    assert report.stats[S].mean_percentile == 0


def test_single_university_sits_at_fifty():
    report = university_report([UniversityScore("U1", OVERALL, 0.3, 20, S)])
    assert report.ranked[0].percentile == 50


# -- gaps ----------------------------------------------------------------------------

def test_six_point_four():
    table = gap_table(six_point_four_fixture())
    (row,) = table.rows
    assert row.means[N] == 52 and row.means[S] == Fraction("45.6")
    assert row.north_south == Fraction(32, 5)
    assert float(row.north_south) == 6.4


def test_identical_regions_give_zero_gaps():
    recs = [score("Q/1", reg, p) for reg in (N, C, S) for p in (10.0, 33.3, 80.1)]
    table = gap_table(recs)
    assert [row.north_south for row in table.rows] == [0]
    assert all(s.n_nonnegative == 1 and s.n_negative == 0 for s in table.summary)


def test_gap_identity_on_synthetic_scores():
    corpus = generate_corpus(SynthProfile(researchers=1500, seed=5))
    scores = score_corpus(corpus, WINDOW).scores
    for table in (gap_table(scores), university_gap_table(scores, ONES)):
        assert table.rows
        for row in table.rows:
            assert row.north_south == row.north_center + row.center_south


def test_gap_summary_extremes():
    recs = []
    for code, north in (("A/1", 60.0), ("B/1", 20.0), ("C/1", 60.0)):
        recs += [score(code, N, north) for _ in range(3)]
        recs += [score(code, reg, 40.0) for reg in (C, S) for _ in range(3)]
    ns = gap_table(recs).summary[0]
    assert ns.pair == "north_south"
    assert ns.highest == (20, "A/1") and ns.lowest == (-20, "B/1")
    assert (ns.n_nonnegative, ns.n_negative) == (2, 1)


def test_grouped_stats_totals(tiny_corpus):
    scores = score_corpus(tiny_corpus, WINDOW).scores
    rows = grouped_stats(scores, lambda s: s.gender)
    totals = [st.observations for _, col, st in rows if col == "Total"]
    assert sum(totals) == len(scores) == 12
    assert [v.value for v, col, _ in rows if col == "Total"] == ["F", "M", "Unspecified"]
