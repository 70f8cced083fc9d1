"""steelcast: steel-consumption forecasting from economic activity.

Library layers, bottom to top: annual series and transforms (`series`), OLS
with diagnostics (`regression`), correlation and stationarity tests
(`stattests`), the intensity-of-use fit (`iou`), SMO-trained kernel machines
(`svm`), split/CV/tuning (`evaluation`), the forecasting pipeline
(`forecast`), and the CLI (`cli`).
"""

from .errors import SteelcastError
from .evaluation import (
    DEFAULT_C_GRID,
    CvSpec,
    Metrics,
    SplitSpec,
    TuneResult,
    compute_metrics,
    cross_validate,
    split,
    tune_c,
)
from .forecast import (
    ForecastConfig,
    ForecastReport,
    PipelineState,
    extrapolate_linear,
    forecast,
    prepare,
)
from .iou import IouFit, fit_iou, intensity_of_use
from .regression import DesignMatrix, LinearModel, ols_fit, predict
from .series import (
    DifferenceState,
    Panel,
    StandardizationParams,
    TimeSeries,
    align,
    difference,
    integrate,
    invert_standardize,
    standardize,
)
from .stattests import (
    CorrelationResult,
    StationarityResult,
    adf_test,
    kendall_test,
    kpss_test,
    normal_cdf,
    pearson_test,
    spearman_test,
    student_t_cdf,
)
from .svm import (
    Kernel,
    SvcModel,
    SvmProblem,
    SvrModel,
    decision,
    dual_objective,
    dumps_model,
    kernel_eval,
    kkt_residual,
    loads_model,
    train_svc,
    train_svr,
)

__version__ = "0.1.0"

__all__ = [
    "SteelcastError",
    "TimeSeries",
    "Panel",
    "StandardizationParams",
    "DifferenceState",
    "align",
    "standardize",
    "invert_standardize",
    "difference",
    "integrate",
    "DesignMatrix",
    "LinearModel",
    "ols_fit",
    "predict",
    "CorrelationResult",
    "StationarityResult",
    "pearson_test",
    "kendall_test",
    "spearman_test",
    "adf_test",
    "kpss_test",
    "normal_cdf",
    "student_t_cdf",
    "IouFit",
    "fit_iou",
    "intensity_of_use",
    "Kernel",
    "SvmProblem",
    "SvcModel",
    "SvrModel",
    "train_svc",
    "train_svr",
    "decision",
    "kernel_eval",
    "kkt_residual",
    "dual_objective",
    "dumps_model",
    "loads_model",
    "Metrics",
    "SplitSpec",
    "CvSpec",
    "TuneResult",
    "DEFAULT_C_GRID",
    "split",
    "compute_metrics",
    "cross_validate",
    "tune_c",
    "ForecastConfig",
    "ForecastReport",
    "PipelineState",
    "extrapolate_linear",
    "prepare",
    "forecast",
]
