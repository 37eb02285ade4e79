"""Hierarchical Mamdani scoring of Likert-scale project-success surveys."""

__version__ = "0.1.0"

from .fuzzy_core import (
    DEFAULT_OPS,
    LARSEN_OPS,
    EmptyAggregateError,
    LinguisticVariable,
    OperatorSet,
    SampledFuzzySet,
    Trapezoidal,
    Triangular,
    aggregate,
    clip,
    defuzzify_centroid,
    fuzzify,
    likert_variable,
    membership,
    output_variable,
    sample,
)
from .rulebase import (
    ANY,
    Rule,
    RuleBase,
    RuleSyntaxError,
    RuleValidationError,
    WeightProfile,
    generate_rulebase,
    parse_rules,
    render_rules,
)
from .inference import FiringTrace, FisConfig, calibrate, infer, rescale
from .construct import (
    FIVE_POINT,
    SEVEN_POINT,
    ConstructConfig,
    EvaluationResult,
    LikertResponse,
    baseline_mean,
    build_construct,
    default_construct,
    evaluate,
    impute_neutral,
    load_config,
    mirror,
    save_config,
)
from .survey import emit_plot_data, load_csv, report_to_csv, report_to_json, score_dataset
