"""Cost-sensitive, multidimensional analysis of AI benchmark results."""

from .core import (
    MISSING,
    CombinationMode,
    ContractError,
    CostfrontError,
    DimensionSpec,
    LifecycleStage,
    Orientation,
    PerformanceVector,
    Quantity,
    ReportStatus,
    ResourceKind,
    ResourceVector,
    SchemaError,
    Source,
    SystemRecord,
    UnitMismatchError,
    UnknownDimensionError,
    project,
)
from .ingest import (
    DEFAULT_REGISTRY,
    Dataset,
    UnitRegistry,
    UnknownUnitError,
    bundled_case_studies,
    coverage_report,
    load_case_study,
    load_dataset,
    normalize_compute,
    read_dataset,
    save_dataset,
)
from .lifecycle import (
    LifecycleAccount,
    average_cost_curve,
    check_specific_reproducibility,
    replicability_cost,
    stage_rollup,
    total_cost,
)
from .pareto import (
    ClassifierConfig,
    Frontier,
    ProgressClass,
    achievable_frontier,
    assess_progress,
    classify_progress,
    dominates,
    front_gain,
    hypervolume,
    mix,
    pareto_front,
)
from .utility import (
    CostModel,
    PiecewiseLinear,
    ReceiverProfile,
    UtilityModel,
    evaluate_utility,
    parse_gradient,
    receiver_utility,
    select_optimal,
)

__version__ = "0.1.0"

__all__ = [
    "achievable_frontier",
    "assess_progress",
    "average_cost_curve",
    "bundled_case_studies",
    "check_specific_reproducibility",
    "ClassifierConfig",
    "classify_progress",
    "CombinationMode",
    "ContractError",
    "CostfrontError",
    "CostModel",
    "coverage_report",
    "Dataset",
    "DEFAULT_REGISTRY",
    "DimensionSpec",
    "dominates",
    "evaluate_utility",
    "front_gain",
    "Frontier",
    "hypervolume",
    "LifecycleAccount",
    "LifecycleStage",
    "load_case_study",
    "load_dataset",
    "MISSING",
    "mix",
    "normalize_compute",
    "Orientation",
    "pareto_front",
    "parse_gradient",
    "PerformanceVector",
    "PiecewiseLinear",
    "ProgressClass",
    "project",
    "Quantity",
    "read_dataset",
    "receiver_utility",
    "ReceiverProfile",
    "replicability_cost",
    "ReportStatus",
    "ResourceKind",
    "ResourceVector",
    "save_dataset",
    "SchemaError",
    "select_optimal",
    "Source",
    "stage_rollup",
    "SystemRecord",
    "total_cost",
    "UnitMismatchError",
    "UnitRegistry",
    "UnknownDimensionError",
    "UnknownUnitError",
    "UtilityModel",
]
