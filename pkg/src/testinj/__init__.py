"""Detection of testimonially unjust vocabulary in clinical notes and
constraint-based causal discovery over the derived binary features."""

from .citest import CITestResult, chi_square_cdf, ci_test, g_squared, stratify
from .corpus import (
    AgeGroup,
    Patient,
    Race,
    RawRecord,
    age_group,
    build_patients,
    code_race,
    filter_records,
    merge_patients,
    read_records,
)
from .dataset import BinaryDataset
from .discovery import DiscoveryConfig, fci, meek_rules, orient_v_structures, pc, run, skeleton
from .experiment import (
    AlphaSweepResult,
    SyntheticScm,
    alpha_sweep,
    double_data,
    paper_scenario_generator,
    sample,
)
from .graphs import (
    BackgroundKnowledge,
    Dag,
    EndpointMark,
    MixedGraph,
    apply_background_knowledge,
    connected_nonisolated,
    emit_dot,
)
from .labeling import (
    ThresholdPolicy,
    binarize_demographics,
    build_dataset,
    category_threshold,
    coarse_marginalization,
    coarsen,
    compute_rates,
    label_patients,
)
from .lexicon import (
    Lexicon,
    Term,
    TermCategory,
    count_matches,
    expand_lexicon,
    load_base_lexicon,
    save_lexicon,
    tokenize,
)
from .stemming import stem
from .wordnet import SynonymDatabase, parse_wordnet

__version__ = "0.1.0"
