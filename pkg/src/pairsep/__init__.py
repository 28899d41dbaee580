"""Transferability analysis from per-pair linear heads on frozen features."""

__version__ = "0.1.0"

from .analysis import PosetReport, analyze, to_dot
from .constructions import construct_hypercube, construct_parity, hypercube_bank
from .cover import (
    fundamental_number_exact,
    fundamental_number_greedy,
    greedy_cover,
    minimum_cover,
    theorem1_check,
)
from .errors import (
    BudgetError,
    ContractError,
    DataError,
    DegenerateVarianceError,
    DomainError,
    NotSeparableError,
    PairsepError,
    SizeError,
)
from .features import FeatureSet
from .fewshot import EpisodeConfig, EpisodeStats, best_worst_pair_sets, ncm_classify, run_episodes
from .heads import (
    HeadBank,
    Hyperplane,
    TrainConfig,
    build_bank,
    decision,
    empirical_error,
    epsilon_separates,
    gaussian_error,
    orient_for_pair,
    train_head,
)
from .metrics import MetricTable, RunRecord, build_table, class_separability, pair_separability, pearson
from .poset import (
    AbstractModel,
    SeparableSet,
    bounds,
    equivalence_classes,
    equivalent,
    fundamental_pairs,
    hasse_diagram,
    leq,
    separable_set,
    separates,
)
from .separability import (
    SeparabilityReport,
    best_head_per_pair,
    separability_matrix,
    separability_report,
    separability_score,
)
from .synth import GaussianSpec, generate, pairwise_bayes_error
