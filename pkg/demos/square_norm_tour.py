#!/usr/bin/env python3
"""A walk through the norm machinery on small operators.

Shows the square norm against the nuclear norm, the extremality test, the
explicit optimal SDP points, and the variational lower bound.
"""

import numpy as np

from diamondrec import norms
from diamondrec.choi import map_of_unitary_pair, random_unitary
from diamondrec.linalg import BipartiteOperator, nuclear_norm

rng = np.random.default_rng(2024)

print("== A generic bipartite operator on 2 (x) 2 ==")
x = BipartiteOperator(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)), 2, 2)
rep = norms.square_norm(x)
print(f"nuclear norm   {nuclear_norm(x.mat):.6f}")
print(f"square norm    {rep.value:.6f}   (primal/dual gap {rep.gap:.1e})")
print(f"dimension bound {x.dim_v * nuclear_norm(x.mat):.6f}  (square norm must stay below)")
ext = norms.extremality_check(x)
print(f"extremality residual {ext.residual:.3f}  -> extremal: {ext.extremal}")

print("\n== The Choi matrix of X -> U X V is extremal ==")
m = map_of_unitary_pair(random_unitary(3, rng), random_unitary(3, rng))
ext = norms.extremality_check(m.choi)
rep = norms.square_norm(m.choi)
print(f"extremality residual {ext.residual:.1e}")
print(f"square norm {rep.value:.9f} == nuclear norm {nuclear_norm(m.choi.mat):.9f}")

print("\n== Explicit optimal points, no solver involved ==")
points = norms.verify_optimal_points(m.choi)
print(f"primal objective {points.primal_objective:.9f}")
print(f"dual objective   {points.dual_objective:.9f}")
print(f"largest residual across feasibility/slackness checks: {points.max_residual():.1e}")

print("\n== Sampling the variational form from below ==")
corner = np.zeros((4, 4), dtype=complex)
corner[0, 0] = 1.0
xc = BipartiteOperator(corner, 2, 2)
for samples in (1, 10, 100, 1000):
    bound = norms.variational_lower_bound(xc, samples, np.random.default_rng(7))
    print(f"samples {samples:5d}: lower bound {bound:.4f}")
print(f"square norm of the corner projector: {norms.square_norm(xc).value:.6f} "
      f"(saturates dim_v x nuclear = 2)")
