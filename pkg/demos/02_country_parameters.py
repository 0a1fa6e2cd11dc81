"""
Published country parameter sets and their steady states
=========================================================

While the synthetic population stays at its starting size ``N0``, the
GDP-driven model predicts a constant productivity growth of ``N0/B + C``.
That number is a quick plausibility check for any parameter set.
"""

from labprod.model import COUNTRY_PRESETS, check_params

for name, p in COUNTRY_PRESETS.items():
    chk = check_params(p)
    status = "ok" if chk.ok else "FLAGGED"
    print(f"{name:7s} N0={p.N0:>9,.0f} A2={p.A2:4.0f} B={p.B:>12,.0f} C={p.C:+.3f}"
          f"  steady state {chk.steady_state:+.4f}/yr  {status}")

# The US set as printed gives more than 100% growth a year. The same line
# with a ten times larger B would be in range:
us = COUNTRY_PRESETS["us"]
print("US with B x 10:", round(us.N0 / (10 * us.B) + us.C, 4))

# Only the ratio N0/B matters: scaling both leaves every prediction unchanged
print(check_params(us).lines()[-1])
