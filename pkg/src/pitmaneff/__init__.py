"""Pitman and empirical relative efficiency of two uniformity tests.

The V test rejects for a large sample mean, the T test for a large mean of
squares. Alternatives are beta contaminations of the uniform law on (0, 1).
"""

__version__ = "0.1.0"

from .dist_core import (  # noqa: E402
    NULL,
    Alternative,
    BetaParams,
    ThetaWarning,
    density,
    hellinger,
    hellinger_product,
    mixture_moment,
    sample,
    tau,
)
from .quadrature import QuadratureError, tanh_sinh  # noqa: E402
from .test_engine import (  # noqa: E402
    CriticalValueRule,
    CVKind,
    McConfig,
    PowerEstimate,
    TestId,
    calibrate,
    critical_value,
    power_at,
    power_mc,
    power_scan,
    stat_T,
    stat_V,
)
from .pitman import (  # noqa: E402
    PATH_NAMES,
    Path,
    PathError,
    PitmanResult,
    builtin_path,
    path_slopes,
    pitman_linear,
    pitman_path,
)
from .cache import ResultsCache  # noqa: E402
from .empirical_eff import (  # noqa: E402
    EfficiencyReport,
    SampleSizeNotReached,
    SampleSizeResult,
    convergence_probe,
    matched_ere,
    min_sample_size,
)
