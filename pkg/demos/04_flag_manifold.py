"""
Flag manifold
=============

The unit group moves flags around; near the base flag the Gauss lower
factor is a chart, and unitaries already reach every point.
"""

import numpy as np

from flagfact import (BlockAlgebra, DenseAlgebra, LoopAlgebra, base_point, chart_sigma,
                      flag_action, omega_membership, same_point, standard_flag,
                      unitary_transitivity_witness)

A = DenseAlgebra(2)
flag = standard_flag(A)
P = base_point(flag)
moved = flag_action(A.element([[1, 1], [0, 1]]), P)
print("moved rep:\n", moved.reps[0].element.matrix.real)
print("same point as the base:", same_point(moved, P))

print("[[0,1],[1,0]] in the big cell:", bool(omega_membership(A.element([[0, 1], [1, 0]]), flag)))
print("chart coordinate of [[2,1],[1,1]]:\n", chart_sigma(A.element([[2, 1], [1, 1]]), flag).point.matrix.real)

# Loops with values in 4x4 matrices, organised as 2x2 blocks.
rng = np.random.default_rng(2)
M = BlockAlgebra(2, LoopAlgebra(2, 64))
g = M.random_invertible(rng)
w = unitary_transitivity_witness(g, standard_flag(M))
print("unitary witness: |u*u - 1| =", w.unitarity,
      " u^-1 g triangular residual =", w.delta_residual)
