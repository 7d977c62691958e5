"""Config-performance maps for evaluating verification systems from score files."""

from .cpmap import CPMap, GridSpec, TrialConfig, compute_cp_map, config_at, export_cp_map, parse_cp_map
from .delta import DeltaMap, WtlSummary, compute_delta_map, export_delta_map, summarize_wtl
from .errors import EvaluationError, InputError, ParseError, TrialMapError
from .hardness import HardnessOrder, fuse_orderings, rank_normalize, read_order, self_order, write_order
from .metrics import (
    DcfParams,
    DcfResult,
    EerResult,
    compute_eer,
    compute_min_dcf,
    det_points,
    error_rates_at,
)
from .render import ColorScale, render_diverging, render_sequential
from .score_io import ScoredTrials, ScoreTable, join, parse_scores, parse_trials, write_scores, write_trials
from .synth import GaussianScoreModel, SampleSpec, analytic_eer, sample_scores
from .trial_model import Trial, TrialSet, Utterance, generate_enrollment_fixed, generate_full_cross_pairing

__version__ = "0.1.0"
