"""
One participation path, two productivity measures
=================================================

Output per person and output per hour respond to participation with
different sensitivities. Each measure gets its own calibration.
"""

import numpy as np

from labprod import AnnualSeries, SearchSpec
from labprod.calibration import calibrate_lfp_response
from labprod.model import LfpResponseParams, productivity_from_lfp

# A participation rate drifting up from 0.59 with a slow wobble
years = np.arange(45)
lfp = AnnualSeries(1960, 0.59 + 0.0018 * years + 0.006 * np.sin(years / 3), label="LFP")

generators = {
    "per-person": LfpResponseParams(B2=-5.0, C2=0.040, alpha=5.0, LFP0=lfp[1960]),
    "per-hour": LfpResponseParams(B2=-3.5, C2=0.042, alpha=3.8, LFP0=lfp[1960]),
}
spec = SearchSpec(alpha=(0, 8, 0.1))

for name, p in generators.items():
    observed = productivity_from_lfp(lfp, p)
    fit = calibrate_lfp_response(observed, lfp, spec)
    q = fit.params
    print(f"{name:10s} true B2={p.B2:+.2f} C2={p.C2:.3f} alpha={p.alpha:.1f}"
          f" | fitted B2={q.B2:+.3f} C2={q.C2:.4f} alpha={q.alpha:.1f} R2={fit.r_squared:.4f}")
