#!/usr/bin/env python3
"""Blind matrix deconvolution from circular convolutions.

Unknown rotations U, V act on probe vectors before known mixing matrices and
a circular convolution; lifting turns the observations into linear
measurements of the rank-one Choi matrix of X -> U X V^T, which square-norm
minimization recovers from few probes.
"""

import numpy as np

from diamondrec import measure, recovery
from diamondrec.choi import map_of_unitary_pair, random_orthogonal
from diamondrec.linalg import frobenius

rng = np.random.default_rng(21)
n = 3
u, v = random_orthogonal(n, rng), random_orthogonal(n, rng)
truth = map_of_unitary_pair(u, v.T)

for probes in (4, 8, 10):
    ensemble = measure.deconv_ensemble(n, n, probes, seed=probes)
    y = measure.apply_measurement(ensemble, truth)
    problem = recovery.RecoveryProblem(ensemble, y, 0.0, "square")
    result = recovery.recover(problem, truth=truth)
    print(f"probes {probes:2d} (m={ensemble.m:3d}): error {result.frob_error:9.2e}")

# read the rotations back off the recovered rank-one Choi matrix
ensemble = measure.deconv_ensemble(n, n, 10, seed=10)
y = measure.apply_measurement(ensemble, truth)
result = recovery.recover(recovery.RecoveryProblem(ensemble, y, 0.0, "square"))
w, s, zh = np.linalg.svd(result.estimate.mat)
u_hat = np.sqrt(n) * w[:, 0].reshape(n, n)
phase = np.vdot(u_hat, u) / abs(np.vdot(u_hat, u))
print(f"\nrecovered U up to a global phase: residual "
      f"{frobenius(u_hat * phase - u):.2e}")
