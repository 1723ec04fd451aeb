"""Architecture selection from stakeholder benefits, with manipulation analysis."""

from truthful_arch.core import (
    Alternative,
    BenefitOutOfRange,
    BenefitProfile,
    DimensionMismatch,
    InvalidDictator,
    Mechanism,
    MechanismOutcome,
    MissingActualBenefits,
    NonPositiveCost,
    Scenario,
    ScenarioError,
    ScoreOutOfRange,
    Stakeholder,
    UnknownMechanism,
    VcgTrace,
    apply_mechanism,
    build_scenario,
    contribution_to_benefit,
    scenario_to_document,
    validate_scenario,
)
from truthful_arch.mechanisms import (
    cbam_desirability,
    cbam_select,
    dictator_select,
    dictatorial_cbam_select,
    vcg_select,
)
from truthful_arch.strategic import (
    GridTooFine,
    ManipulationQuery,
    ManipulationReport,
    search_coalition,
    search_unilateral,
    verify_truthfulness,
)

__version__ = "0.1.0"
