"""
Annual series: growth rates, smoothing and lags
================================================

Every model input is an ``AnnualSeries``: a start year plus a gapless array
of values. Transforms keep track of which calendar year each value belongs to.
"""

import numpy as np

from labprod import AnnualSeries
from labprod.series import align, growth_rate, lag, moving_average_centered

# A GDP-per-capita path growing by roughly $400 a year
G = AnnualSeries(1960, 12000 + 400 * np.arange(20) + 300 * np.sin(np.arange(20)), label="G")
print(G)

# Growth rates are dated at the later year, so the first year drops out
r = growth_rate(G)
print("growth starts in", r.start_year, "first value", round(r[1961], 4))

# A centered 5-year average trims two years from each end
s = moving_average_centered(r, window=5)
print("smoothed span", s.start_year, "-", s.end_year)

# Shifting by two years moves every value two years later
print("lagged span", lag(s, 2).start_year, "-", lag(s, 2).end_year)

# align() cuts a group of series down to the years they share
span, (a, b) = align([r, lag(s, 2)])
print("common span", span, "lengths", len(a), len(b))
