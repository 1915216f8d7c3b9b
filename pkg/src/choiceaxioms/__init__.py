"""Choice correspondences, aggregation-rule axioms and exhaustive impossibility checks."""

from .audit import AxiomReport, audit, audit_table
from .axioms import (
    Verdict,
    Witness,
    check_alpha,
    check_beta,
    check_ci,
    check_iih,
    check_internal_consistency,
    check_ir,
    check_pareto,
    decisive_sets,
    find_dictator,
    is_globally_decisive,
    is_locally_decisive,
    replay,
)
from .core import (
    AffineTransform,
    ChoiceCorrespondence,
    FeasibleFamily,
    MonotoneTransform,
    OrdinalProfile,
    RiskProfile,
    Universe,
    apply_affine,
    default_universe,
    enumerate_menus,
    make_menu,
    make_profile,
    make_universe,
    monotone_catalogue,
    ordinalize,
    strict_profiles,
)
from .exceptions import GuardError, NotInDomainError, ValidationError
from .revealed import RevealedPreference, check_complete_transitive, rationalize, reveal, roundtrip_check
from .risk import (
    LossSpec,
    RegularizerSpec,
    SyntheticDataset,
    TabularHypothesis,
    build_profile_block,
    build_profile_multisource,
    empirical_risk,
    loss_eval,
    synth_generate,
)
from .rules import (
    ZOO,
    borda,
    erm_single,
    leximin,
    make_rule,
    nash_product,
    pareto_front,
    pooled_erm,
    risk_min,
    weighted_sum,
)
from .trace import DecisivenessTrace, trace_decisiveness, validate_trace
from .verify import (
    CandidateRule,
    PairwiseTable,
    SurvivorReport,
    enumerate_pairwise_tables,
    search_survivors,
    verify_corollary,
    verify_theorem,
)

__version__ = "0.1.0"

__all__ = [
    "AffineTransform",
    "AxiomReport",
    "CandidateRule",
    "ChoiceCorrespondence",
    "DecisivenessTrace",
    "FeasibleFamily",
    "GuardError",
    "LossSpec",
    "MonotoneTransform",
    "NotInDomainError",
    "OrdinalProfile",
    "PairwiseTable",
    "RegularizerSpec",
    "RevealedPreference",
    "RiskProfile",
    "SurvivorReport",
    "SyntheticDataset",
    "TabularHypothesis",
    "Universe",
    "ValidationError",
    "Verdict",
    "Witness",
    "ZOO",
    "apply_affine",
    "audit",
    "audit_table",
    "borda",
    "build_profile_block",
    "build_profile_multisource",
    "check_alpha",
    "check_beta",
    "check_ci",
    "check_complete_transitive",
    "check_iih",
    "check_internal_consistency",
    "check_ir",
    "check_pareto",
    "decisive_sets",
    "default_universe",
    "empirical_risk",
    "enumerate_menus",
    "enumerate_pairwise_tables",
    "erm_single",
    "find_dictator",
    "is_globally_decisive",
    "is_locally_decisive",
    "leximin",
    "loss_eval",
    "make_menu",
    "make_profile",
    "make_rule",
    "make_universe",
    "monotone_catalogue",
    "nash_product",
    "ordinalize",
    "pareto_front",
    "pooled_erm",
    "rationalize",
    "replay",
    "reveal",
    "risk_min",
    "roundtrip_check",
    "search_survivors",
    "strict_profiles",
    "synth_generate",
    "trace_decisiveness",
    "validate_trace",
    "verify_corollary",
    "verify_theorem",
    "weighted_sum",
]
