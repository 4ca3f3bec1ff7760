"""
Where transitivity fails
========================

With the twisted involution of M_2 the self-adjoint ``a = [[0,1],[-1,0]]``
squares to -1.  The element ``[[1,0],[a,1]]`` then has a singular top-left
corner in its Gram element, and ``[[a+i, a], [a, a-i]]`` preserves the
indefinite form while missing the big cell.
"""

import warnings

import numpy as np

from flagfact import (BlockAlgebra, DenseAlgebra, NonHermitianWarning, counterexample_char,
                      omega_membership, random_u11, standard_flag, u11_counterexample)

J = DenseAlgebra(2, signature=(1, -1))
a = J.element([[0, 1], [-1, 0]])

with warnings.catch_warnings():
    warnings.simplefilter("ignore", NonHermitianWarning)
    report = counterexample_char(a)
print("|1 + a^2| =", report.one_plus_a2_norm)
print("nest-Gram stopped at corner", report.failing_corner, "-", report.message)

# Same shape with a hermitian instance: nothing goes wrong.
control = counterexample_char(DenseAlgebra(2).element([[0, 1], [1, 0]]), check_witness=False)
print("hermitian control failed:", control.failed)

u11 = u11_counterexample(a)
print("U(1,1) residual:", u11.residual, " smallest singular value of g11:", u11.g11_smallest)
print("in the big cell:", u11.omega_member)

# Over an ordinary matrix algebra, U(1,1) elements do lie in the big cell.
rng = np.random.default_rng(3)
M = BlockAlgebra(2, DenseAlgebra(2))
print("random U(1,1) elements in the big cell:",
      all(bool(omega_membership(random_u11(M, rng), standard_flag(M))) for _ in range(20)))
