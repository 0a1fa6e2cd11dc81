"""Labor productivity growth driven by real GDP per capita and demography."""

__version__ = "0.1.0"

from labprod.calibration import (  # noqa: E402
    CalibrationResult,
    SearchSpec,
    calibrate_gdp_model,
    calibrate_lfp_response,
    calibrate_n9_model,
    ols,
    r_squared,
)
from labprod.forecast import (  # noqa: E402
    ForecastSeries,
    PopulationTable,
    cohort_consistency,
    extend_n9,
    forecast_productivity,
)
from labprod.model import (  # noqa: E402
    COUNTRY_PRESETS,
    GdpModelParams,
    LfpResponseParams,
    LfpSimParams,
    LfpToCohortParams,
    N9ModelParams,
    check_params,
    n9_implied_by_lfp,
    potential_rate,
    productivity_from_g,
    productivity_from_lfp,
    productivity_from_n9,
    simulate_lfp,
    synthetic_population,
)
from labprod.series import (  # noqa: E402
    AnnualSeries,
    align,
    growth_rate,
    lag,
    moving_average_centered,
)
