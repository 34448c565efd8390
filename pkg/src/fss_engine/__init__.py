"""Research productivity indicators (FSS, FSS*, FSS^U), national percentile
rankings and macro-region cohort/gap reports for a disambiguated corpus."""

__version__ = "0.1.0"

from .corpus import (MacroRegion, ObservationWindow, ResearchCorpus, SalaryScale,  # noqa: E402
                     resolve_w_and_t, validate_corpus)
from .normalization import build_baselines, fractional_contribution, scaling_factor  # noqa: E402
from .productivity import (compute_fss, compute_sds_baselines, rank_percentiles,  # noqa: E402
                           score_corpus, standardize, university_score)
from .cohort import apply_exclusions, cohort_stats, gap_table, university_report  # noqa: E402

__all__ = [
    "MacroRegion", "ObservationWindow", "ResearchCorpus", "SalaryScale", "resolve_w_and_t",
    "validate_corpus", "build_baselines", "fractional_contribution", "scaling_factor",
    "compute_fss", "compute_sds_baselines", "rank_percentiles", "score_corpus", "standardize",
    "university_score", "apply_exclusions", "cohort_stats", "gap_table", "university_report",
]
