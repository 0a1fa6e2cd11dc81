"""
Round trip: generate a country, then calibrate it back
=======================================================

A synthetic country is built from known parameters, optionally with noise,
and the GDP-family calibrator is asked to recover them.
"""

import time

from labprod import SearchSpec
from labprod.calibration import calibrate_gdp_model
from labprod.dataio import DEMO_GDP_PATH, generate_synthetic_country
from labprod.model import COUNTRY_PRESETS

truth = COUNTRY_PRESETS["france"]
spec = SearchSpec(a2=(300, 600, 10), T=(0, 4, 1), N0=truth.N0, t0=truth.t0)

for sigma in (0.0, 0.005):
    ds = generate_synthetic_country(truth, DEMO_GDP_PATH, noise_sigma=sigma, seed=0)
    tic = time.perf_counter()
    fit = calibrate_gdp_model(ds.observed["per-person"], ds.G, spec, workers=4)
    print(f"--- noise sigma {sigma} ({time.perf_counter() - tic:.2f} s)")
    for line in fit.summary_lines():
        print("   ", line)
    print(f"    true: A2={truth.A2} T={truth.T} N0/B={truth.N0 / truth.B:.4f} C={truth.C}")

# A small slice of the search trace: SSE by lag at the best A2
best = fit.params.A2
for pt in fit.trace:
    if pt.candidate["A2"] == best:
        print("    A2", best, "T", pt.candidate["T"], "SSE", f"{pt.sse:.3e}")
