"""
Tracking two peaks that swap sides
==================================

The two Gaussians slide along straight lines in opposite directions.  The
s-curve exponent gamma sets how abrupt the motion is near the start and end
of the run; the middle of the run is slow for every gamma in (0,1).
"""
import numpy as np

from ergocover import MOVING, baseline_of, compare, default_config, scurve_progress

s = np.linspace(0, 1, 11)
for gamma in (0.2, 0.3):
    print("gamma", gamma, "progress", np.round(scurve_progress(s, gamma), 3))

for gamma in (0.2, 0.3):
    cfg = default_config(MOVING).replace("field.gamma", gamma)
    cmp = compare(cfg, baseline_of(cfg))
    n = cmp.delta.size
    q = slice(3 * n // 4, n)
    print(
        f"gamma={gamma}: mean RMSE adaptive {cmp.a.rmse.mean():.4f} uniform {cmp.b.rmse.mean():.4f}; "
        f"final quarter adaptive<=uniform on {cmp.final_quarter_fraction:.0%} of samples, "
        f"mean delta there {cmp.delta[q].mean():+.4f}"
    )
