"""Semantic discords: local anomalies found by normalising candidate
subsequences with the larger windows that contain them.

>>> import numpy as np
>>> from semdiscord import SearchConfig, pruned_search, random_walk
>>> report, metrics = pruned_search(random_walk(300, seed=1), SearchConfig(40, 16))
>>> report.target_len, report.context_len
(16, 40)
"""
from .bound import LBRow, lb_row, lower_bound
from .distance import (DistanceInputs, context_aware_dist_direct,
                       context_aware_dist_fast, correlation, z_norm_dist)
from .errors import (CalibrationError, FlatWindowError, GenerationError,
                     InfeasiblePairError, InvalidSeriesError, InvalidWindowError,
                     MetricError, NoFeasibleTargetError, SemDiscordError)
from .harness import (InstancePool, LabeledSeries, ProtocolResult,
                      generate_bump_series, generate_concat_series,
                      overlapping_rate, random_walk, read_series_csv,
                      run_concat_protocol)
from .discord import (DiscordReport, NNProfile, SearchConfig, SearchMetrics,
                     brute_force_search, calibrate_epsilon, candidate_pair_count,
                     classic_discord, classic_profile, d_opt, is_self_match,
                     omega_pairs, prepare, pruned_search, search,
                     semantic_profile)
from .stats import (MovingStats, QTRow, WindowedMaxStd, as_time_series,
                    compute_moving_stats, compute_window_max_std, qt_first_row,
                    qt_next_row)

__version__ = "0.1.0"

__all__ = [
    "as_time_series", "brute_force_search", "calibrate_epsilon",
    "CalibrationError", "candidate_pair_count", "classic_discord",
    "classic_profile", "compute_moving_stats", "compute_window_max_std",
    "context_aware_dist_direct", "context_aware_dist_fast", "correlation",
    "d_opt", "DiscordReport", "DistanceInputs", "FlatWindowError",
    "generate_bump_series", "generate_concat_series", "GenerationError",
    "InfeasiblePairError", "InstancePool", "InvalidSeriesError",
    "InvalidWindowError", "is_self_match", "LabeledSeries", "lb_row", "LBRow",
    "lower_bound", "MetricError", "MovingStats", "NNProfile",
    "NoFeasibleTargetError", "omega_pairs", "overlapping_rate", "prepare",
    "ProtocolResult", "pruned_search", "qt_first_row", "qt_next_row", "QTRow",
    "random_walk", "read_series_csv", "run_concat_protocol", "search",
    "SearchConfig", "SearchMetrics", "semantic_profile", "SemDiscordError",
    "WindowedMaxStd", "z_norm_dist",
]
