#!/usr/bin/env python3
"""Compressive process tomography of a low-Kraus-rank channel.

Prepares random pure states, measures Haar-rotated observables, and
reconstructs the channel with and without the channel-structure constraints.
"""

import numpy as np

from diamondrec import measure, norms, recovery
from diamondrec.choi import OperatorMap, is_cpt, random_channel

rng = np.random.default_rng(11)
truth = random_channel(2, 2, 2, rng)
print(f"truth: Kraus-rank-2 channel, diamond norm {norms.diamond_norm(truth):.6f}")

for m in (8, 10, 12, 14):
    ensemble = measure.process_tomo_ensemble(m, (2, 2), seed=m)
    y = measure.apply_measurement(ensemble, truth)
    line = [f"m={m:3d}"]
    for cpt in (False, True):
        problem = recovery.RecoveryProblem(ensemble, y, 0.0, "nuclear", cpt=cpt)
        result = recovery.recover(problem, truth=truth)
        tag = "with channel constraints" if cpt else "plain nuclear           "
        line.append(f"{tag}: err {result.frob_error:9.2e}")
    print("   ".join(line))

ensemble = measure.process_tomo_ensemble(12, (2, 2), seed=99)
y = measure.apply_measurement(ensemble, truth)
result = recovery.recover(
    recovery.RecoveryProblem(ensemble, y, 0.0, "square"), truth=truth
)
flags = is_cpt(OperatorMap(result.estimate), tol=1e-5)
print(f"\nsquare-norm estimate at m=12: err {result.frob_error:.2e}, "
      f"channel structure check {flags} (inbuilt, no explicit constraints)")
